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
#include <optional>
#include <string_view>

#include "mpflow/connection.hpp"

namespace mpflow {

enum class DecisionReason { active_path, backup_fallback, primary_path, no_path };

std::string_view to_string(DecisionReason reason) noexcept;

struct SchedulerDecision {
    std::optional<SubflowId> chosen;
    DecisionReason reason = DecisionReason::no_path;

    friend bool operator==(const SchedulerDecision&, const SchedulerDecision&) = default;
};

/// Alive with room for one more MSS in the send window.
bool is_schedulable(const SubflowState& sf, std::uint64_t mss, std::uint64_t window);

/// Alive and not currently in retransmission-timeout recovery. A usable
/// sub-flow whose window is merely full still owns the traffic: the
/// selectors wait for it rather than spilling onto lower tiers.
bool is_usable(const SubflowState& sf);

/// Lowest-RTT selection over schedulable active sub-flows. Backup sub-flows
/// are considered only when no active sub-flow is schedulable or usable.
/// Ties go to the lowest id.
SchedulerDecision select_default(const ConnectionState& conn, std::uint64_t mss, std::uint64_t window);

/// Primary Path only: send on a schedulable primary-pair sub-flow, wait
/// while a primary is usable but window-limited, otherwise run the default
/// selector over the remaining sub-flows. Being re-evaluated per segment,
/// traffic returns to the primary path as soon as a sub-flow exists on it
/// again.
SchedulerDecision select_ppos(const ConnectionState& conn, std::uint64_t mss, std::uint64_t window);

/// Dispatches on conn.scheduler.
SchedulerDecision select_subflow(const ConnectionState& conn, std::uint64_t mss, std::uint64_t window);

} // namespace mpflow
