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

#include "mpflow/connection.hpp"

#include <algorithm>
#include <string>

#include "mpflow/error.hpp"
#include "mpflow/sockopt.hpp"

namespace mpflow {

std::string_view to_string(SchedulerKind kind) noexcept
{
    return kind == SchedulerKind::primary_path_only ? "ppos" : "default";
}

SchedulerKind parse_scheduler_kind(std::string_view text)
{
    if (text == "default") {
        return SchedulerKind::lowest_rtt;
    }
    if (text == "ppos") {
        return SchedulerKind::primary_path_only;
    }
    throw Error(ErrorKind::validation, "unknown scheduler '" + std::string(text) + "'");
}

SubflowState* ConnectionState::find(SubflowId id)
{
    auto it = std::find_if(subflows.begin(), subflows.end(), [id](const SubflowState& s) { return s.id == id; });
    return it == subflows.end() ? nullptr : &*it;
}

const SubflowState* ConnectionState::find(SubflowId id) const
{
    return const_cast<ConnectionState*>(this)->find(id);
}

SubflowState* ConnectionState::find_alive(SubflowId id)
{
    SubflowState* sf = find(id);
    return sf && sf->alive ? sf : nullptr;
}

const SubflowState* ConnectionState::find_alive(SubflowId id) const
{
    return const_cast<ConnectionState*>(this)->find_alive(id);
}

bool ConnectionState::has_pair(const InterfacePair& pair) const
{
    return std::find(local_addrs.begin(), local_addrs.end(), pair.src()) != local_addrs.end() &&
           std::find(remote_addrs.begin(), remote_addrs.end(), pair.dst()) != remote_addrs.end();
}

bool ConnectionState::is_primary(const InterfacePair& pair) const
{
    return std::find(primary_pairs.begin(), primary_pairs.end(), pair) != primary_pairs.end();
}

SubflowTuple make_subflow_tuple(const EndpointAddress& local, const EndpointAddress& remote, SubflowId id)
{
    return {local.with_port(static_cast<std::uint16_t>(kSubflowPortBase + id.value)), remote.with_port(kListenPort)};
}

ConnectionState new_connection(std::vector<EndpointAddress> local_addrs,
                               std::vector<EndpointAddress> remote_addrs,
                               SchedulerKind scheduler)
{
    if (local_addrs.empty() || remote_addrs.empty()) {
        throw Error(ErrorKind::configuration, "a connection needs at least one local and one remote address");
    }

    ConnectionState conn;
    conn.scheduler = scheduler;
    for (const auto& a : local_addrs) {
        conn.local_addrs.push_back(a.without_port());
    }
    for (const auto& a : remote_addrs) {
        conn.remote_addrs.push_back(a.without_port());
    }

    for (const auto& local : conn.local_addrs) {
        for (const auto& remote : conn.remote_addrs) {
            if (local.family() != remote.family()) {
                continue;
            }
            open_subflow(conn, make_subflow_tuple(local, remote, conn.next_id));
        }
    }
    if (conn.subflows.empty()) {
        throw Error(ErrorKind::configuration, "no local/remote address pair shares an address family");
    }
    return conn;
}

ConnectionState mirror_connection(const ConnectionState& conn)
{
    ConnectionState peer;
    peer.next_id = conn.next_id;
    peer.local_addrs = conn.remote_addrs;
    peer.remote_addrs = conn.local_addrs;
    for (SubflowState sf : conn.subflows) {
        sf.tuple = sf.tuple.reversed();
        sf.srtt = Micros{0};
        sf.inflight_bytes = 0;
        sf.consecutive_timeouts = 0;
        sf.bytes_sent_total = 0;
        peer.subflows.push_back(sf);
    }
    return peer;
}

std::vector<SubflowId> list_subflow_ids(const ConnectionState& conn)
{
    std::vector<SubflowId> ids;
    for (const auto& sf : conn.subflows) {
        if (sf.alive) {
            ids.push_back(sf.id);
        }
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

SubflowTuple get_subflow_tuple(const ConnectionState& conn, SubflowId id)
{
    const SubflowState* sf = conn.find(id);
    if (!sf) {
        throw Error(ErrorKind::not_found, "no sub-flow with id " + std::to_string(id.value));
    }
    return sf->tuple;
}

SubflowId open_subflow(ConnectionState& conn, const SubflowTuple& tuple)
{
    const InterfacePair pair = tuple.pair(); // validates the family
    for (const auto& sf : conn.subflows) {
        if (sf.alive && sf.tuple == tuple) {
            throw Error(ErrorKind::already_exists,
                        "sub-flow " + std::to_string(sf.id.value) + " already uses " + pair.to_string());
        }
    }
    if (conn.next_id.value == 0) {
        throw Error(ErrorKind::configuration, "sub-flow id space exhausted");
    }

    SubflowState sf;
    sf.id = conn.next_id;
    sf.tuple = tuple;
    sf.low_prio = classify_subflow_priority(pair, conn.lists) ||
                  (conn.primary_path_only && !conn.is_primary(pair));
    conn.subflows.push_back(sf);
    // 255 wraps to 0, which marks the space as exhausted.
    conn.next_id.value = static_cast<std::uint8_t>(conn.next_id.value + 1);
    return sf.id;
}

void close_subflow(ConnectionState& conn, SubflowId id)
{
    SubflowState* sf = conn.find_alive(id);
    if (!sf) {
        throw Error(ErrorKind::not_found, "no alive sub-flow with id " + std::to_string(id.value));
    }
    sf->alive = false;
    sf->inflight_bytes = 0;
}

} // namespace mpflow
