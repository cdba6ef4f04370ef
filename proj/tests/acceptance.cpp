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

// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Timelines are judged from the emitted CSV, by path.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mpflow/error.hpp"
#include "mpflow/scenario.hpp"
#include "mpflow/scheduler.hpp"
#include "mpflow/sockopt.hpp"
#include "mpflow/wire.hpp"

using namespace mpflow;

namespace {

using Clock = std::chrono::steady_clock;

struct CsvRow {
    std::int64_t bucket = 0;
    int id = 0;
    std::string pair;
    std::uint64_t bytes = 0;
    bool low_prio = false;
    bool alive = false;
};

struct Timeline {
    std::vector<CsvRow> rows;
    std::string text;
    double seconds = 0;

    // Paths ("1", "2", "3" for the remote 10.N.0.1) with bytes in a bucket.
    std::set<std::string> paths(std::int64_t bucket_ms) const
    {
        std::set<std::string> out;
        for (const auto& r : rows) {
            if (r.bucket == bucket_ms && r.bytes > 0) {
                out.insert(r.pair.substr(r.pair.find('>') + 4, 1));
            }
        }
        return out;
    }
    std::uint64_t bytes_on(std::int64_t bucket_ms, const std::string& pair) const
    {
        std::uint64_t sum = 0;
        for (const auto& r : rows) {
            if (r.bucket == bucket_ms && r.pair == pair) {
                sum += r.bytes;
            }
        }
        return sum;
    }
};

Timeline run_csv(const Scenario& s)
{
    const auto t0 = Clock::now();
    std::ostringstream out;
    emit_csv(run_scenario(s), out);
    Timeline t;
    t.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    t.text = out.str();

    std::istringstream in(t.text);
    std::string line;
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) {
            f.push_back(cell);
        }
        if (f.size() != 7) {
            throw Error(ErrorKind::malformed, "bad CSV line: " + line);
        }
        t.rows.push_back({std::stoll(f[0]), std::stoi(f[1]), f[2], std::stoull(f[3]), f[5] == "1", f[6] == "1"});
    }
    return t;
}

int failures = 0;

void report(int n, const std::string& title, bool ok, const std::string& detail)
{
    std::printf("criterion %d %s: %s%s%s\n", n, ok ? "PASS" : "FAIL", title.c_str(), detail.empty() ? "" : " -- ",
                detail.c_str());
    failures += ok ? 0 : 1;
}

std::string join(const std::set<std::string>& s)
{
    std::string out = "{";
    for (const auto& x : s) {
        out += (out.size() > 1 ? "," : "") + x;
    }
    return out + "}";
}

struct Phase {
    double from_s, to_s; // buckets fully inside [from, to]
    std::set<std::string> expected;
};

// Checks every bucket inside a phase that lies at least 2 s from any event.
bool check_phases(const Timeline& t, const std::vector<Phase>& phases, const std::vector<double>& events,
                  std::string& detail)
{
    for (const auto& p : phases) {
        for (std::int64_t b = 0; b < 100; ++b) {
            if (b < p.from_s || b + 1 > p.to_s) {
                continue;
            }
            const bool near = std::any_of(events.begin(), events.end(),
                                          [&](double e) { return b + 1 > e - 2 && b < e + 2; });
            if (near) {
                continue;
            }
            const auto got = t.paths(b * 1000);
            if (got != p.expected) {
                detail = "bucket " + std::to_string(b) + "s has " + join(got) + ", expected " + join(p.expected);
                return false;
            }
        }
    }
    return true;
}

const std::vector<double> kFigEvents = {15, 35, 55, 75, 95};

void criterion_1()
{
    const auto t = run_csv(builtin_scenario("fig4"));
    std::string detail;
    const bool phases = check_phases(t,
                                     {{0, 15, {"1", "2", "3"}},
                                      {16, 35, {"1"}},
                                      {37, 55, {"2", "3"}},
                                      {56, 75, {"1"}},
                                      {76, 95, {"1"}},
                                      {97, 100, {"1", "2", "3"}}},
                                     kFigEvents, detail);
    const bool fast = t.seconds < 5;
    if (!fast) {
        detail += " runtime " + std::to_string(t.seconds) + " s";
    }
    report(1, "fig4 phase membership", phases && fast, detail);
}

void criterion_2()
{
    const auto t = run_csv(builtin_scenario("fig5"));
    std::string detail;
    const bool phases = check_phases(t,
                                     {{0, 15, {"1", "2", "3"}},
                                      {16, 35, {"1"}},
                                      {37, 55, {"2", "3"}},
                                      {56, 75, {"1"}},
                                      {76, 95, {"1"}},
                                      {97, 100, {"1"}}},
                                     kFigEvents, detail);
    const bool fast = t.seconds < 5;
    if (!fast) {
        detail += " runtime " + std::to_string(t.seconds) + " s";
    }
    report(2, "fig5 re-created sub-flows stay backup", phases && fast, detail);
}

void criterion_3()
{
    const std::string primary = "10.0.0.1>10.1.0.1";
    std::string detail;

    const auto d = run_csv(builtin_scenario("fig6_default"));
    std::map<std::int64_t, bool> bucket_ok;
    for (const auto& r : d.rows) {
        auto [it, _] = bucket_ok.try_emplace(r.bucket, true);
        if (r.alive && r.bytes == 0) {
            it->second = false;
        }
    }
    const auto good = std::count_if(bucket_ok.begin(), bucket_ok.end(), [](const auto& kv) { return kv.second; });
    const bool spread = !bucket_ok.empty() && good * 100 >= 95 * static_cast<long>(bucket_ok.size());
    detail = "default " + std::to_string(good) + "/" + std::to_string(bucket_ok.size()) + " buckets";

    const auto p = run_csv(builtin_scenario("fig6_ppos"));
    bool ppos = true;
    bool resumed = false;
    for (const auto& r : p.rows) {
        const double start = static_cast<double>(r.bucket) / 1000;
        const double end = start + 1;
        const bool on_primary = r.pair == primary;
        if (!on_primary && r.bytes > 0 && !(start >= 30 && end <= 72)) {
            ppos = false;
            detail += "; non-primary bytes at " + std::to_string(r.bucket) + " ms";
        }
        if (on_primary && r.bytes > 0 && start >= 32 && end <= 70) {
            ppos = false;
            detail += "; primary bytes at " + std::to_string(r.bucket) + " ms";
        }
        if (on_primary && r.bytes > 0 && start >= 70 && end <= 72) {
            resumed = true;
        }
    }
    if (!resumed) {
        detail += "; primary not resumed by 72 s";
    }
    report(3, "fig6 default vs primary-path-only", spread && ppos && resumed, detail);
}

double steady_aggregate_bps(SchedulerKind kind)
{
    Scenario s = builtin_scenario("fig6_default");
    s.name = "steady";
    s.duration_ms = 30000;
    s.actions.clear();
    s.scheduler = kind;
    const auto t = run_csv(s);
    std::uint64_t bytes = 0;
    for (const auto& r : t.rows) {
        if (r.bucket >= 5000) {
            bytes += r.bytes;
        }
    }
    return static_cast<double>(bytes) * 8 / 25.0;
}

void criterion_4()
{
    // Window (32 MSS) exceeds the 1 Mbps x 211.68 ms bandwidth-delay product,
    // so each used link runs at its bandwidth.
    const double def = steady_aggregate_bps(SchedulerKind::lowest_rtt);
    const double pp = steady_aggregate_bps(SchedulerKind::primary_path_only);
    const bool ok = std::abs(def - 3e6) <= 0.3e6 && std::abs(pp - 1e6) <= 0.1e6;
    char buf[96];
    std::snprintf(buf, sizeof buf, "default %.0f bps, ppos %.0f bps", def, pp);
    report(4, "steady-state throughput", ok, buf);
}

void criterion_5()
{
    const auto p = InterfacePair::parse("10.0.0.1>10.1.0.1");
    const auto other = InterfacePair::parse("10.0.0.1>10.9.0.1");
    // (active list non-empty, pair in it, pair in backup list) -> backup.
    // The active list, when non-empty, decides alone; otherwise backup
    // membership does.
    struct Row {
        bool active_nonempty, in_active, in_backup, expected;
    };
    const Row rows[] = {
        {false, false, false, false}, {false, false, true, true}, {true, false, false, true},
        {true, false, true, true},    {true, true, false, false}, {true, true, true, false},
        {false, true, false, false},  {false, true, true, true},
    };
    int ok = 0;
    for (const auto& r : rows) {
        PriorityLists lists;
        if (r.active_nonempty) {
            lists.active_list.push_back(r.in_active ? p : other);
        }
        // A pair listed as active with an otherwise empty active list is the
        // same as in_active on a non-empty list; rows 7 and 8 cover the
        // backup list holding only another pair.
        if (!r.active_nonempty && r.in_active) {
            lists.backup_list.push_back(other);
        }
        if (r.in_backup) {
            lists.backup_list.push_back(p);
        }
        ok += classify_subflow_priority(p, lists) == r.expected ? 1 : 0;
    }
    report(5, "priority classification truth table", ok == 8, std::to_string(ok) + "/8 rows");
}

void criterion_6()
{
    const auto t0 = Clock::now();
    const int srtts[] = {50, 100, 150};
    const auto local = EndpointAddress::parse("10.0.0.1");
    const std::vector<EndpointAddress> remotes = {EndpointAddress::parse("10.1.0.1"),
                                                  EndpointAddress::parse("10.2.0.1"),
                                                  EndpointAddress::parse("10.3.0.1")};
    int cases = 0;
    int mismatches = 0;
    for (int n = 1; n <= 3; ++n) {
        int total = 1;
        for (int i = 0; i < n; ++i) {
            total *= 12;
        }
        for (int code = 0; code < total; ++code) {
            auto conn = new_connection({local}, std::vector(remotes.begin(), remotes.begin() + n));
            int c = code;
            for (auto& sf : conn.subflows) {
                sf.alive = c % 2;
                sf.low_prio = (c / 2) % 2;
                sf.srtt = std::chrono::milliseconds(srtts[(c / 4) % 3]);
                sf.inflight_bytes = 0;
                c /= 12;
            }
            // Brute force: lowest (srtt, id) among alive actives, else among
            // alive backups.
            std::optional<SubflowId> want;
            DecisionReason reason = DecisionReason::no_path;
            for (bool backup : {false, true}) {
                for (const auto& sf : conn.subflows) {
                    if (!sf.alive || sf.low_prio != backup) {
                        continue;
                    }
                    const auto* cur = want ? conn.find(*want) : nullptr;
                    if (!cur || sf.srtt < cur->srtt || (sf.srtt == cur->srtt && sf.id < cur->id)) {
                        want = sf.id;
                    }
                }
                if (want) {
                    reason = backup ? DecisionReason::backup_fallback : DecisionReason::active_path;
                    break;
                }
            }
            const auto got = select_default(conn, 1460, 32 * 1460);
            mismatches += (got.chosen == want && got.reason == reason) ? 0 : 1;
            ++cases;
        }
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    report(6, "scheduler oracle equivalence", mismatches == 0 && secs < 1,
           std::to_string(cases) + " states, " + std::to_string(mismatches) + " mismatches, " + std::to_string(secs) +
               " s");
}

bool rejects(const std::vector<std::uint8_t>& bytes)
{
    try {
        decode_mp_prio(bytes);
    } catch (const Error&) {
        return true;
    }
    return false;
}

void criterion_7()
{
    int round_trips = 0;
    int mutations = 0;
    int accepted_mutations = 0;
    std::vector<MpPrioOption> values;
    for (bool flag : {false, true}) {
        values.push_back({flag, std::nullopt});
        for (int a = 0; a < 256; ++a) {
            values.push_back({flag, static_cast<std::uint8_t>(a)});
        }
    }
    for (const auto& v : values) {
        const auto bytes = encode_mp_prio(v);
        round_trips += decode_mp_prio(bytes) == v ? 1 : 0;
        for (int k = 0; k < 256; ++k) {
            if (k != bytes[0]) {
                auto m = bytes;
                m[0] = static_cast<std::uint8_t>(k);
                ++mutations;
                accepted_mutations += rejects(m) ? 0 : 1;
            }
            if (k != bytes[1]) {
                auto m = bytes;
                m[1] = static_cast<std::uint8_t>(k);
                ++mutations;
                accepted_mutations += rejects(m) ? 0 : 1;
            }
        }
    }

    std::mt19937_64 rng(20261019);
    int stray = 0;
    for (int i = 0; i < 100000; ++i) {
        std::vector<std::uint8_t> buf(rng() % 9);
        for (auto& b : buf) {
            b = static_cast<std::uint8_t>(rng());
        }
        try {
            decode_mp_prio(buf);
        } catch (const Error&) {
        } catch (...) {
            ++stray;
        }
    }
    const bool ok = round_trips == 514 && accepted_mutations == 0 && stray == 0;
    report(7, "MP_PRIO wire round trip", ok,
           std::to_string(round_trips) + "/514 round trips, " + std::to_string(mutations - accepted_mutations) + "/" +
               std::to_string(mutations) + " mutations rejected, 100000 fuzz inputs");
}

void criterion_8()
{
    std::string bad;
    for (const auto& name : builtin_scenario_names()) {
        const auto s = builtin_scenario(name);
        if (run_csv(s).text != run_csv(s).text) {
            bad += " " + name;
        }
    }
    report(8, "deterministic CSV for every built-in", bad.empty(), bad.empty() ? "" : "differs:" + bad);
}

} // namespace

int main()
{
    const std::vector<std::function<void()>> criteria = {criterion_1, criterion_2, criterion_3, criterion_4,
                                                         criterion_5, criterion_6, criterion_7, criterion_8};
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        try {
            criteria[i]();
        } catch (const std::exception& e) {
            report(static_cast<int>(i + 1), "aborted", false, e.what());
        }
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
