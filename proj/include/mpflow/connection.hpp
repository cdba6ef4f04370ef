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

#include <chrono>
#include <compare>
#include <cstdint>
#include <deque>
#include <string>
#include <string_view>
#include <vector>

#include "mpflow/address.hpp"
#include "mpflow/wire.hpp"

namespace mpflow {

using Micros = std::chrono::microseconds;

struct SubflowId {
    std::uint8_t value = 0;

    friend bool operator==(SubflowId, SubflowId) = default;
    friend auto operator<=>(SubflowId, SubflowId) = default;
};

enum class SchedulerKind { lowest_rtt, primary_path_only };

std::string_view to_string(SchedulerKind kind) noexcept;
/// Accepts `default` and `ppos`. Throws Error(validation).
SchedulerKind parse_scheduler_kind(std::string_view text);

struct SubflowTuple {
    EndpointAddress src;
    EndpointAddress dst;

    InterfacePair pair() const { return InterfacePair(src, dst); }
    SubflowTuple reversed() const { return {dst, src}; }

    friend bool operator==(const SubflowTuple&, const SubflowTuple&) = default;
};

struct SubflowState {
    SubflowId id;
    SubflowTuple tuple;
    bool low_prio = false; // true: backup sub-flow
    bool alive = true;
    Micros srtt{0};        // zero until the first RTT sample
    std::uint64_t inflight_bytes = 0;
    std::uint32_t consecutive_timeouts = 0;
    std::uint64_t bytes_sent_total = 0;

    InterfacePair pair() const { return tuple.pair(); }
};

struct PriorityLists {
    std::vector<InterfacePair> active_list;
    std::vector<InterfacePair> backup_list;
};

/// The meta-connection: every sub-flow ever created (dead ones are kept so
/// ids are never reused), the persistent priority lists and the scheduler
/// configuration.
struct ConnectionState {
    std::vector<SubflowState> subflows;
    SubflowId next_id{1};
    PriorityLists lists;
    bool primary_path_only = false;
    std::vector<InterfacePair> primary_pairs;
    SchedulerKind scheduler = SchedulerKind::lowest_rtt;
    std::vector<EndpointAddress> local_addrs;
    std::vector<EndpointAddress> remote_addrs;
    std::deque<MpPrioOption> outbox;

    SubflowState* find(SubflowId id);
    const SubflowState* find(SubflowId id) const;
    /// nullptr unless the sub-flow exists and is alive.
    SubflowState* find_alive(SubflowId id);
    const SubflowState* find_alive(SubflowId id) const;

    bool has_pair(const InterfacePair& pair) const;
    bool is_primary(const InterfacePair& pair) const;
};

inline constexpr std::uint16_t kSubflowPortBase = 40000;
inline constexpr std::uint16_t kListenPort = 5001;

/// Tuple used for a new sub-flow with the given id: the source port is
/// derived from the id, the destination is the listening port.
SubflowTuple make_subflow_tuple(const EndpointAddress& local, const EndpointAddress& remote, SubflowId id);

/// Full-mesh path manager: one sub-flow per (local, remote) pair, created in
/// local-major order with ids 1..m*n.
ConnectionState new_connection(std::vector<EndpointAddress> local_addrs,
                               std::vector<EndpointAddress> remote_addrs,
                               SchedulerKind scheduler = SchedulerKind::lowest_rtt);

/// The remote host's view of `conn`: same ids, tuples reversed, flags copied.
ConnectionState mirror_connection(const ConnectionState& conn);

std::vector<SubflowId> list_subflow_ids(const ConnectionState& conn);
SubflowTuple get_subflow_tuple(const ConnectionState& conn, SubflowId id);

/// Creates a sub-flow with a fresh id. Its priority at birth comes from the
/// connection's lists, with non-primary pairs forced to backup when the
/// primary-path-only scheduler is enabled.
SubflowId open_subflow(ConnectionState& conn, const SubflowTuple& tuple);

void close_subflow(ConnectionState& conn, SubflowId id);

} // namespace mpflow
