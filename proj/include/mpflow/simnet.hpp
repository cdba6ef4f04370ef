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
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "mpflow/connection.hpp"
#include "mpflow/report.hpp"

namespace mpflow {

/// A point-to-point path bound to one interface pair. Data segments are
/// serialized at `bandwidth_bps`; acknowledgments only pay the delay.
struct LinkSpec {
    std::uint32_t link_id = 0;
    InterfacePair pair;
    std::uint64_t bandwidth_bps = 0;
    Micros one_way_delay{0};
    bool up = true;
};

namespace action {

struct SetSubPrio {
    std::vector<SubflowId> ids;
    bool low_prio = false;
};
struct SetActiveList {
    std::vector<InterfacePair> pairs;
};
struct SetBackupList {
    std::vector<InterfacePair> pairs;
};
/// An empty set selects the connection's first (local, remote) pair.
struct EnablePpos {
    std::vector<InterfacePair> pairs;
};
struct LinkDown {
    std::vector<std::uint32_t> links;
};
struct LinkUp {
    std::vector<std::uint32_t> links;
};

} // namespace action

using AppAction = std::variant<action::SetSubPrio, action::SetActiveList, action::SetBackupList,
                               action::EnablePpos, action::LinkDown, action::LinkUp>;

struct TimedAction {
    std::int64_t at_ms = 0;
    AppAction action;
};

struct SimConfig {
    std::uint64_t mss = 1460;
    std::uint64_t window = 32 * 1460;
    std::int64_t bucket_ms = 1000;
    Micros rto_min{200'000};
    std::uint32_t max_consecutive_timeouts = 3;
    Micros reestablish_period{1'000'000};
    Micros keepalive_interval{1'000'000};
};

/// Retransmission timeout after `consecutive_timeouts` expiries:
/// max(2 * srtt, rto_min) doubled once per expiry.
Micros rto_interval(Micros srtt, std::uint32_t consecutive_timeouts, Micros rto_min);

/// Single-threaded discrete-event simulation of one multipath connection
/// between a sender with an infinite backlog and a receiver.
///
/// Events at equal timestamps run in insertion order. Link failures are only
/// discovered through retransmission timeouts: a sub-flow that exhausts
/// `max_consecutive_timeouts` is declared dead, its unacknowledged data is
/// handed back to the scheduler and its pair is retried every
/// `reestablish_period` until the link comes back, at which point a fresh
/// sub-flow (new id, priority from the lists) is opened. Idle sub-flows send
/// a zero-length probe every `keepalive_interval` so failures of idle
/// backup paths are detected as well.
class Simulator {
public:
    /// Throws Error(validation) when a sub-flow's pair has no link, a pair
    /// has several links, link ids repeat or a bandwidth is zero.
    Simulator(ConnectionState sender, std::vector<LinkSpec> links, SimConfig config = {});
    ~Simulator();
    Simulator(Simulator&&) noexcept;
    Simulator& operator=(Simulator&&) noexcept;

    /// Throws Error(validation) for links the topology does not contain.
    void schedule(const TimedAction& action);

    /// Changes link state at `at` (immediately when `at` is not in the
    /// future). A down link drops everything queued or propagating on it.
    void set_link_state(std::uint32_t link_id, bool up, Micros at);

    /// Processes every event strictly before `end`.
    void run_until(Micros end);

    /// Timeout expiry on `id`. Exposed for tests; normally driven by timers.
    void handle_rto(SubflowId id);

    Micros now() const;
    const ConnectionState& sender() const;
    const ConnectionState& receiver() const;
    const SimConfig& config() const;

    /// Buckets covering [0, time reached by run_until).
    TimelineReport report() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Runs a complete simulation of `duration` and returns its timeline.
TimelineReport run(ConnectionState sender, std::vector<LinkSpec> links, std::span<const TimedAction> actions,
                   Micros duration, SimConfig config = {});

} // namespace mpflow
