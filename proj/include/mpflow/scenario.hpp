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

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mpflow/connection.hpp"
#include "mpflow/report.hpp"
#include "mpflow/simnet.hpp"

namespace mpflow {

/// A timed experiment: topology plus application actions.
///
/// Text form, one directive per line, `#` starts a comment:
///
///     name fig4
///     duration_ms 100000
///     scheduler default
///     link 1 10.0.0.1>10.1.0.1 bandwidth_bps=1000000 delay_ms=100
///     at 15000 set_sub_prio ids=2,3 low_prio=1
///     at 35000 link_down links=1
///
/// Actions: set_sub_prio ids=.. low_prio=0|1, set_active_list pairs=..,
/// set_backup_list pairs=.., enable_ppos [pairs=..], link_down links=..,
/// link_up links=... Lists are comma separated and may be empty.
/// Local and remote addresses are taken from the link pairs in order of
/// first appearance; every (local, remote) combination needs its own link.
struct Scenario {
    std::string name;
    std::int64_t duration_ms = 0;
    SchedulerKind scheduler = SchedulerKind::lowest_rtt; // ppos: primary path enabled at t=0
    std::vector<LinkSpec> links;
    std::vector<TimedAction> actions; // stable-sorted by time
};

/// Throws Error(syntax) with a line number for malformed text and
/// Error(validation) naming the offending link or pair for semantic errors.
Scenario parse_scenario(std::string_view text);

/// Canonical text form; parse_scenario(emit_scenario(s)) reproduces `s`.
std::string emit_scenario(const Scenario& scenario);

/// Semantic checks shared by the parser and programmatic construction.
void validate_scenario(const Scenario& scenario);

std::vector<std::string> builtin_scenario_names();
/// Throws Error(not_found) for unknown names.
std::string_view builtin_scenario_text(std::string_view name);
Scenario builtin_scenario(std::string_view name);

struct RunOptions {
    std::int64_t bucket_ms = 1000;
    std::uint64_t seed = 0;         // accepted for interface stability; the engine is deterministic
    bool force_primary_path = false; // enable PPoS at t=0 on the default primary pair
    SimConfig sim{};                 // bucket_ms above takes precedence
};

TimelineReport run_scenario(const Scenario& scenario, const RunOptions& options = {});

/// True when MPFLOW_PRIMARY_PATH_ONLY is set to a non-empty value other
/// than `0`.
bool primary_path_forced_by_environment();

} // namespace mpflow
