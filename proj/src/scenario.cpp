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

#include "mpflow/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <map>
#include <sstream>

#include "mpflow/error.hpp"

namespace mpflow {

namespace {

// Three paths between one sender interface and three receiver interfaces,
// each {1 Mbps, 100 ms}. Link n carries sub-flow S-n.
constexpr std::string_view kThreePathTopology =
    "link 1 10.0.0.1>10.1.0.1 bandwidth_bps=1000000 delay_ms=100\n"
    "link 2 10.0.0.1>10.2.0.1 bandwidth_bps=1000000 delay_ms=100\n"
    "link 3 10.0.0.1>10.3.0.1 bandwidth_bps=1000000 delay_ms=100\n";

const std::map<std::string, std::string, std::less<>>& builtins()
{
    static const std::map<std::string, std::string, std::less<>> docs = [] {
        const std::string topo(kThreePathTopology);
        const std::string fig4_events =
            "at 15000 set_sub_prio ids=2,3 low_prio=1\n"
            "at 35000 link_down links=1\n"
            "at 55000 link_up links=1\n"
            "at 75000 link_down links=2,3\n"
            "at 95000 link_up links=2,3\n";
        std::map<std::string, std::string, std::less<>> m;
        m["fig4"] = "# Priorities changed per sub-flow; re-created sub-flows come back active.\n"
                    "name fig4\nduration_ms 100000\nscheduler default\n" +
                    topo + fig4_events;
        m["fig5"] = "# As fig4, with S-2 and S-3 pairs in the backup list from the start.\n"
                    "name fig5\nduration_ms 100000\nscheduler default\n" +
                    topo + "at 0 set_backup_list pairs=10.0.0.1>10.2.0.1,10.0.0.1>10.3.0.1\n" + fig4_events;
        m["fig6_default"] = "# Default scheduler, S-1 down between 30 s and 70 s.\n"
                            "name fig6_default\nduration_ms 100000\nscheduler default\n" +
                            topo + "at 30000 link_down links=1\nat 70000 link_up links=1\n";
        m["fig6_ppos"] = "# Primary path only on S-1, S-1 down between 30 s and 70 s.\n"
                         "name fig6_ppos\nduration_ms 100000\nscheduler default\n" +
                         topo +
                         "at 0 enable_ppos pairs=10.0.0.1>10.1.0.1\n"
                         "at 30000 link_down links=1\nat 70000 link_up links=1\n";
        return m;
    }();
    return docs;
}

[[noreturn]] void syntax_error(std::size_t line, const std::string& msg)
{
    throw Error(ErrorKind::syntax, "line " + std::to_string(line) + ": " + msg);
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    if (s.empty()) {
        return out;
    }
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) {
            return out;
        }
        start = pos + 1;
    }
}

std::vector<std::string_view> tokens(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) {
            ++i;
        }
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') {
            ++i;
        }
        if (i > start) {
            out.push_back(line.substr(start, i - start));
        }
    }
    return out;
}

template <typename Int>
Int parse_int(std::string_view text, std::size_t line, std::string_view what)
{
    Int value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        syntax_error(line, "expected an integer for " + std::string(what) + ", got '" + std::string(text) + "'");
    }
    return value;
}

bool parse_flag(std::string_view text, std::size_t line, std::string_view what)
{
    if (text == "1") {
        return true;
    }
    if (text == "0") {
        return false;
    }
    syntax_error(line, std::string(what) + " must be 0 or 1");
}

// key=value arguments; every key must be consumed.
class Args {
public:
    Args(std::span<const std::string_view> toks, std::size_t line) : line_(line)
    {
        for (auto t : toks) {
            const auto eq = t.find('=');
            if (eq == std::string_view::npos || eq == 0) {
                syntax_error(line, "expected key=value, got '" + std::string(t) + "'");
            }
            if (!kv_.emplace(t.substr(0, eq), t.substr(eq + 1)).second) {
                syntax_error(line, "duplicate key '" + std::string(t.substr(0, eq)) + "'");
            }
        }
    }

    std::optional<std::string_view> take(std::string_view key)
    {
        auto it = kv_.find(key);
        if (it == kv_.end()) {
            return std::nullopt;
        }
        auto v = it->second;
        kv_.erase(it);
        return v;
    }

    std::string_view require(std::string_view key)
    {
        auto v = take(key);
        if (!v) {
            syntax_error(line_, "missing '" + std::string(key) + "='");
        }
        return *v;
    }

    void finish() const
    {
        if (!kv_.empty()) {
            syntax_error(line_, "unknown key '" + std::string(kv_.begin()->first) + "'");
        }
    }

private:
    std::size_t line_;
    std::map<std::string_view, std::string_view, std::less<>> kv_;
};

std::vector<InterfacePair> parse_pairs(std::string_view text, std::size_t line)
{
    std::vector<InterfacePair> out;
    for (auto item : split(text, ',')) {
        try {
            out.push_back(InterfacePair::parse(item));
        } catch (const Error& e) {
            syntax_error(line, e.what());
        }
    }
    return out;
}

template <typename Int>
std::vector<Int> parse_int_list(std::string_view text, std::size_t line, std::string_view what)
{
    std::vector<Int> out;
    for (auto item : split(text, ',')) {
        out.push_back(parse_int<Int>(item, line, what));
    }
    return out;
}

AppAction parse_action(std::string_view tag, Args& args, std::size_t line)
{
    if (tag == "set_sub_prio") {
        action::SetSubPrio a;
        for (auto id : parse_int_list<unsigned>(args.require("ids"), line, "ids")) {
            if (id == 0 || id > 255) {
                syntax_error(line, "sub-flow id " + std::to_string(id) + " outside 1..255");
            }
            a.ids.push_back(SubflowId{static_cast<std::uint8_t>(id)});
        }
        a.low_prio = parse_flag(args.require("low_prio"), line, "low_prio");
        return a;
    }
    if (tag == "set_active_list") {
        return action::SetActiveList{parse_pairs(args.require("pairs"), line)};
    }
    if (tag == "set_backup_list") {
        return action::SetBackupList{parse_pairs(args.require("pairs"), line)};
    }
    if (tag == "enable_ppos") {
        auto pairs = args.take("pairs");
        return action::EnablePpos{pairs ? parse_pairs(*pairs, line) : std::vector<InterfacePair>{}};
    }
    if (tag == "link_down") {
        return action::LinkDown{parse_int_list<std::uint32_t>(args.require("links"), line, "links")};
    }
    if (tag == "link_up") {
        return action::LinkUp{parse_int_list<std::uint32_t>(args.require("links"), line, "links")};
    }
    syntax_error(line, "unknown action '" + std::string(tag) + "'");
}

std::string join_pairs(const std::vector<InterfacePair>& pairs)
{
    std::string out;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        out += (i ? "," : "") + pairs[i].to_string();
    }
    return out;
}

template <typename T, typename F>
std::string join(const std::vector<T>& items, F render)
{
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        out += (i ? "," : "") + render(items[i]);
    }
    return out;
}

struct ActionText {
    std::string operator()(const action::SetSubPrio& a) const
    {
        return "set_sub_prio ids=" + join(a.ids, [](SubflowId id) { return std::to_string(id.value); }) +
               " low_prio=" + (a.low_prio ? "1" : "0");
    }
    std::string operator()(const action::SetActiveList& a) const { return "set_active_list pairs=" + join_pairs(a.pairs); }
    std::string operator()(const action::SetBackupList& a) const { return "set_backup_list pairs=" + join_pairs(a.pairs); }
    std::string operator()(const action::EnablePpos& a) const
    {
        return a.pairs.empty() ? "enable_ppos" : "enable_ppos pairs=" + join_pairs(a.pairs);
    }
    std::string operator()(const action::LinkDown& a) const
    {
        return "link_down links=" + join(a.links, [](std::uint32_t l) { return std::to_string(l); });
    }
    std::string operator()(const action::LinkUp& a) const
    {
        return "link_up links=" + join(a.links, [](std::uint32_t l) { return std::to_string(l); });
    }
};

struct Endpoints {
    std::vector<EndpointAddress> local;
    std::vector<EndpointAddress> remote;
};

Endpoints endpoints_of(const std::vector<LinkSpec>& links)
{
    Endpoints e;
    for (const auto& l : links) {
        if (std::find(e.local.begin(), e.local.end(), l.pair.src()) == e.local.end()) {
            e.local.push_back(l.pair.src());
        }
        if (std::find(e.remote.begin(), e.remote.end(), l.pair.dst()) == e.remote.end()) {
            e.remote.push_back(l.pair.dst());
        }
    }
    return e;
}

} // namespace

void validate_scenario(const Scenario& s)
{
    auto fail = [&](const std::string& msg) {
        throw Error(ErrorKind::validation, "scenario '" + s.name + "': " + msg);
    };

    if (s.duration_ms <= 0) {
        fail("duration_ms must be positive");
    }
    if (s.links.empty()) {
        fail("topology has no links");
    }
    for (std::size_t i = 0; i < s.links.size(); ++i) {
        const auto& l = s.links[i];
        if (l.bandwidth_bps == 0) {
            fail("link " + std::to_string(l.link_id) + " has zero bandwidth");
        }
        if (l.one_way_delay < Micros{0}) {
            fail("link " + std::to_string(l.link_id) + " has negative delay");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (s.links[j].link_id == l.link_id) {
                fail("duplicate link " + std::to_string(l.link_id));
            }
            if (s.links[j].pair == l.pair) {
                fail("pair " + l.pair.to_string() + " is bound to links " + std::to_string(s.links[j].link_id) +
                     " and " + std::to_string(l.link_id));
            }
        }
    }

    const Endpoints ep = endpoints_of(s.links);
    auto has_link = [&](const InterfacePair& p) {
        return std::any_of(s.links.begin(), s.links.end(), [&](const LinkSpec& l) { return l.pair == p; });
    };
    for (const auto& local : ep.local) {
        for (const auto& remote : ep.remote) {
            if (local.family() == remote.family() && !has_link(InterfacePair(local, remote))) {
                fail("pair " + InterfacePair(local, remote).to_string() + " of the full mesh has no link");
            }
        }
    }

    auto check_links = [&](const std::vector<std::uint32_t>& ids) {
        if (ids.empty()) {
            fail("link action names no link");
        }
        for (auto id : ids) {
            if (std::none_of(s.links.begin(), s.links.end(), [&](const LinkSpec& l) { return l.link_id == id; })) {
                fail("action references link " + std::to_string(id) + " but the topology has " +
                     std::to_string(s.links.size()) + " links");
            }
        }
    };
    auto check_pairs = [&](const std::vector<InterfacePair>& pairs) {
        for (const auto& p : pairs) {
            if (!has_link(p)) {
                fail("action references pair " + p.to_string() + " which is not in the topology");
            }
        }
    };

    std::int64_t last = 0;
    for (const auto& a : s.actions) {
        if (a.at_ms < 0) {
            fail("action time " + std::to_string(a.at_ms) + " is negative");
        }
        if (a.at_ms < last) {
            fail("actions are not sorted by time");
        }
        last = a.at_ms;
        std::visit(
            [&](const auto& act) {
                using T = std::decay_t<decltype(act)>;
                if constexpr (std::is_same_v<T, action::LinkDown> || std::is_same_v<T, action::LinkUp>) {
                    check_links(act.links);
                } else if constexpr (std::is_same_v<T, action::SetSubPrio>) {
                    if (act.ids.empty()) {
                        fail("set_sub_prio names no sub-flow");
                    }
                } else {
                    check_pairs(act.pairs);
                }
            },
            a.action);
    }
}

Scenario parse_scenario(std::string_view text)
{
    Scenario s;
    bool have_duration = false;
    std::size_t line_no = 0;
    for (auto raw : split(text, '\n')) {
        ++line_no;
        if (const auto hash = raw.find('#'); hash != std::string_view::npos) {
            raw = raw.substr(0, hash);
        }
        const auto toks = tokens(raw);
        if (toks.empty()) {
            continue;
        }
        const auto directive = toks[0];
        if (directive == "name") {
            if (toks.size() != 2) {
                syntax_error(line_no, "usage: name <identifier>");
            }
            s.name = std::string(toks[1]);
        } else if (directive == "duration_ms") {
            if (toks.size() != 2) {
                syntax_error(line_no, "usage: duration_ms <ms>");
            }
            s.duration_ms = parse_int<std::int64_t>(toks[1], line_no, "duration_ms");
            have_duration = true;
        } else if (directive == "scheduler") {
            if (toks.size() != 2) {
                syntax_error(line_no, "usage: scheduler default|ppos");
            }
            try {
                s.scheduler = parse_scheduler_kind(toks[1]);
            } catch (const Error& e) {
                syntax_error(line_no, e.what());
            }
        } else if (directive == "link") {
            if (toks.size() < 3) {
                syntax_error(line_no, "usage: link <id> <src>><dst> bandwidth_bps=N delay_ms=N [up=0|1]");
            }
            LinkSpec l;
            l.link_id = parse_int<std::uint32_t>(toks[1], line_no, "link id");
            try {
                l.pair = InterfacePair::parse(toks[2]);
            } catch (const Error& e) {
                syntax_error(line_no, e.what());
            }
            Args args(std::span<const std::string_view>(toks).subspan(3), line_no);
            l.bandwidth_bps = parse_int<std::uint64_t>(args.require("bandwidth_bps"), line_no, "bandwidth_bps");
            if (auto ms = args.take("delay_ms")) {
                l.one_way_delay = std::chrono::milliseconds(parse_int<std::int64_t>(*ms, line_no, "delay_ms"));
            } else {
                l.one_way_delay = Micros(parse_int<std::int64_t>(args.require("delay_us"), line_no, "delay_us"));
            }
            if (auto up = args.take("up")) {
                l.up = parse_flag(*up, line_no, "up");
            }
            args.finish();
            s.links.push_back(std::move(l));
        } else if (directive == "at") {
            if (toks.size() < 3) {
                syntax_error(line_no, "usage: at <ms> <action> [key=value ...]");
            }
            TimedAction a;
            a.at_ms = parse_int<std::int64_t>(toks[1], line_no, "action time");
            Args args(std::span<const std::string_view>(toks).subspan(3), line_no);
            a.action = parse_action(toks[2], args, line_no);
            args.finish();
            s.actions.push_back(std::move(a));
        } else {
            syntax_error(line_no, "unknown directive '" + std::string(directive) + "'");
        }
    }

    if (!have_duration) {
        throw Error(ErrorKind::validation, "scenario '" + s.name + "': missing duration_ms");
    }
    std::stable_sort(s.actions.begin(), s.actions.end(),
                     [](const TimedAction& a, const TimedAction& b) { return a.at_ms < b.at_ms; });
    validate_scenario(s);
    return s;
}

std::string emit_scenario(const Scenario& s)
{
    std::ostringstream out;
    out << "name " << s.name << '\n';
    out << "duration_ms " << s.duration_ms << '\n';
    out << "scheduler " << to_string(s.scheduler) << '\n';
    for (const auto& l : s.links) {
        out << "link " << l.link_id << ' ' << l.pair.to_string() << " bandwidth_bps=" << l.bandwidth_bps;
        if (l.one_way_delay.count() % 1000 == 0) {
            out << " delay_ms=" << l.one_way_delay.count() / 1000;
        } else {
            out << " delay_us=" << l.one_way_delay.count();
        }
        if (!l.up) {
            out << " up=0";
        }
        out << '\n';
    }
    for (const auto& a : s.actions) {
        out << "at " << a.at_ms << ' ' << std::visit(ActionText{}, a.action) << '\n';
    }
    return out.str();
}

std::vector<std::string> builtin_scenario_names()
{
    std::vector<std::string> names;
    for (const auto& [name, doc] : builtins()) {
        names.push_back(name);
    }
    return names;
}

std::string_view builtin_scenario_text(std::string_view name)
{
    const auto& docs = builtins();
    auto it = docs.find(name);
    if (it == docs.end()) {
        throw Error(ErrorKind::not_found, "no built-in scenario named '" + std::string(name) + "'");
    }
    return it->second;
}

Scenario builtin_scenario(std::string_view name)
{
    return parse_scenario(builtin_scenario_text(name));
}

TimelineReport run_scenario(const Scenario& scenario, const RunOptions& options)
{
    validate_scenario(scenario);
    const Endpoints ep = endpoints_of(scenario.links);
    ConnectionState sender = new_connection(ep.local, ep.remote);

    std::vector<TimedAction> actions;
    if (scenario.scheduler == SchedulerKind::primary_path_only || options.force_primary_path) {
        actions.push_back(TimedAction{0, action::EnablePpos{}});
    }
    actions.insert(actions.end(), scenario.actions.begin(), scenario.actions.end());

    SimConfig cfg = options.sim;
    cfg.bucket_ms = options.bucket_ms;
    return run(std::move(sender), scenario.links, actions, std::chrono::milliseconds(scenario.duration_ms), cfg);
}

bool primary_path_forced_by_environment()
{
    const char* v = std::getenv("MPFLOW_PRIMARY_PATH_ONLY");
    return v && *v && std::string_view(v) != "0";
}

} // namespace mpflow
