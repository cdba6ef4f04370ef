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

#include "mpflow/scheduler.hpp"

namespace mpflow {

namespace {

// Result of scanning one tier of candidates.
struct TierPick {
    const SubflowState* best = nullptr; // schedulable, min srtt
    bool any_usable = false;
};

template <typename Pred>
TierPick pick_tier(const ConnectionState& conn, std::uint64_t mss, std::uint64_t window, Pred in_tier)
{
    TierPick pick;
    for (const auto& sf : conn.subflows) {
        if (!in_tier(sf)) {
            continue;
        }
        pick.any_usable = pick.any_usable || is_usable(sf);
        if (!is_schedulable(sf, mss, window)) {
            continue;
        }
        if (!pick.best || sf.srtt < pick.best->srtt || (sf.srtt == pick.best->srtt && sf.id < pick.best->id)) {
            pick.best = &sf;
        }
    }
    return pick;
}

template <typename Pred>
SchedulerDecision select_default_among(const ConnectionState& conn, std::uint64_t mss, std::uint64_t window,
                                       Pred eligible)
{
    const TierPick active =
        pick_tier(conn, mss, window, [&](const SubflowState& sf) { return eligible(sf) && !sf.low_prio; });
    if (active.best) {
        return {active.best->id, DecisionReason::active_path};
    }
    if (active.any_usable) {
        return {};
    }
    const TierPick backup =
        pick_tier(conn, mss, window, [&](const SubflowState& sf) { return eligible(sf) && sf.low_prio; });
    if (backup.best) {
        return {backup.best->id, DecisionReason::backup_fallback};
    }
    return {};
}

} // namespace

std::string_view to_string(DecisionReason reason) noexcept
{
    switch (reason) {
    case DecisionReason::active_path: return "active-path";
    case DecisionReason::backup_fallback: return "backup-fallback";
    case DecisionReason::primary_path: return "primary-path";
    case DecisionReason::no_path: return "no-path";
    }
    return "no-path";
}

bool is_schedulable(const SubflowState& sf, std::uint64_t mss, std::uint64_t window)
{
    return sf.alive && sf.inflight_bytes + mss <= window;
}

bool is_usable(const SubflowState& sf)
{
    return sf.alive && sf.consecutive_timeouts == 0;
}

SchedulerDecision select_default(const ConnectionState& conn, std::uint64_t mss, std::uint64_t window)
{
    return select_default_among(conn, mss, window, [](const SubflowState&) { return true; });
}

SchedulerDecision select_ppos(const ConnectionState& conn, std::uint64_t mss, std::uint64_t window)
{
    auto on_primary = [&](const SubflowState& sf) { return conn.is_primary(sf.pair()); };

    const TierPick primary = pick_tier(conn, mss, window, on_primary);
    if (primary.best) {
        return {primary.best->id, DecisionReason::primary_path};
    }
    if (primary.any_usable) {
        return {};
    }

    SchedulerDecision d =
        select_default_among(conn, mss, window, [&](const SubflowState& sf) { return !on_primary(sf); });
    if (d.chosen) {
        d.reason = DecisionReason::backup_fallback;
    }
    return d;
}

SchedulerDecision select_subflow(const ConnectionState& conn, std::uint64_t mss, std::uint64_t window)
{
    if (conn.scheduler == SchedulerKind::primary_path_only && conn.primary_path_only) {
        return select_ppos(conn, mss, window);
    }
    return select_default(conn, mss, window);
}

} // namespace mpflow
