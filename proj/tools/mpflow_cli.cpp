// Copyright 2026 The mpflow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "mpflow/error.hpp"
#include "mpflow/report.hpp"
#include "mpflow/scenario.hpp"

namespace {

mpflow::Scenario load(const std::string& name_or_path)
{
    if (!std::filesystem::exists(name_or_path)) {
        return mpflow::builtin_scenario(name_or_path);
    }
    std::ifstream in(name_or_path);
    if (!in) {
        throw mpflow::Error(mpflow::ErrorKind::io, "cannot read " + name_or_path);
    }
    std::ostringstream text;
    text << in.rdbuf();
    return mpflow::parse_scenario(text.str());
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"mpflow: multipath transport simulator with sub-flow priorities and primary-path-only scheduling"};
    app.require_subcommand(1);

    std::string scenario_arg;
    std::int64_t bucket_ms = 1000;
    std::int64_t duration_ms = 0;
    std::uint64_t seed = 0;
    std::string out_path;
    bool print_scenario = false;
    auto* run = app.add_subcommand("run", "run a built-in or file scenario and emit the CSV timeline");
    run->add_option("--scenario", scenario_arg, "built-in name or path to a scenario file")->required();
    run->add_option("--bucket-ms", bucket_ms, "throughput bucket width")->check(CLI::PositiveNumber);
    run->add_option("--duration-ms", duration_ms, "override the scenario duration")->check(CLI::PositiveNumber);
    run->add_option("--seed", seed, "reserved; the engine is deterministic");
    run->add_option("--out", out_path, "write CSV here instead of stdout");
    run->add_flag("--print-scenario", print_scenario, "print the canonical scenario text instead of running it");

    app.add_subcommand("list-scenarios", "list built-in scenarios");

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "parse and validate a scenario file");
    validate->add_option("path", validate_path)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("list-scenarios")) {
            for (const auto& name : mpflow::builtin_scenario_names()) {
                std::cout << name << '\n';
            }
            return 0;
        }

        if (app.got_subcommand("validate")) {
            const auto s = load(validate_path);
            std::cout << "ok: " << s.name << ", " << s.links.size() << " links, " << s.actions.size()
                      << " actions, " << s.duration_ms << " ms\n";
            return 0;
        }

        auto scenario = load(scenario_arg);
        if (duration_ms > 0) {
            scenario.duration_ms = duration_ms;
        }
        if (print_scenario) {
            std::cout << mpflow::emit_scenario(scenario);
            return 0;
        }

        mpflow::RunOptions opts;
        opts.bucket_ms = bucket_ms;
        opts.seed = seed;
        opts.force_primary_path = mpflow::primary_path_forced_by_environment();
        const auto report = mpflow::run_scenario(scenario, opts);

        if (out_path.empty()) {
            mpflow::emit_csv(report, std::cout);
        } else {
            std::ofstream out(out_path, std::ios::binary);
            if (!out) {
                throw mpflow::Error(mpflow::ErrorKind::io, "cannot open " + out_path);
            }
            mpflow::emit_csv(report, out);
        }
        for (const auto& d : report.diagnostics) {
            std::cerr << d << '\n';
        }
    } catch (const mpflow::Error& e) {
        std::cerr << "error (" << mpflow::to_string(e.kind()) << "): " << e.what() << '\n';
        return 1;
    }
    return 0;
}
