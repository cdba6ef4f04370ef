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

#include "mpflow/sockopt.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "mpflow/error.hpp"

namespace mpflow {

namespace {

bool contains(const std::vector<InterfacePair>& list, const InterfacePair& pair)
{
    return std::find(list.begin(), list.end(), pair) != list.end();
}

std::vector<InterfacePair> dedup(std::span<const InterfacePair> pairs)
{
    std::vector<InterfacePair> out;
    for (const auto& p : pairs) {
        if (!contains(out, p)) {
            out.push_back(p);
        }
    }
    return out;
}

} // namespace

bool classify_subflow_priority(const InterfacePair& pair, const PriorityLists& lists)
{
    if (!lists.active_list.empty()) {
        return !contains(lists.active_list, pair);
    }
    if (!lists.backup_list.empty()) {
        return contains(lists.backup_list, pair);
    }
    return false;
}

void set_subflow_priority(ConnectionState& conn, const SubPrioRequest& req)
{
    SubflowState* sf = conn.find_alive(req.id);
    if (!sf) {
        throw Error(ErrorKind::not_found, "no alive sub-flow with id " + std::to_string(req.id.value));
    }
    sf->low_prio = req.low_prio;
    conn.outbox.push_back(MpPrioOption{req.low_prio, req.id.value});
}

bool apply_remote_mp_prio(ConnectionState& conn, const MpPrioOption& opt, SubflowId arrived_on)
{
    const SubflowId target = opt.addr_id ? SubflowId{*opt.addr_id} : arrived_on;
    SubflowState* sf = conn.find_alive(target);
    if (!sf) {
        return false;
    }
    sf->low_prio = opt.backup_flag;
    return true;
}

void set_active_interface_list(ConnectionState& conn, std::span<const InterfacePair> pairs)
{
    conn.lists.active_list = dedup(pairs);
}

void set_backup_interface_list(ConnectionState& conn, std::span<const InterfacePair> pairs)
{
    conn.lists.backup_list = dedup(pairs);
}

void enable_primary_path_only(ConnectionState& conn, std::span<const InterfacePair> primary_pairs)
{
    if (primary_pairs.empty()) {
        throw Error(ErrorKind::validation, "primary path set is empty");
    }
    for (const auto& p : primary_pairs) {
        if (!conn.has_pair(p)) {
            throw Error(ErrorKind::validation, "primary pair " + p.to_string() + " is not a path of this connection");
        }
    }

    conn.primary_path_only = true;
    conn.primary_pairs = dedup(primary_pairs);
    conn.scheduler = SchedulerKind::primary_path_only;

    std::vector<SubflowId> demote;
    for (const auto& sf : conn.subflows) {
        if (sf.alive && !sf.low_prio && !conn.is_primary(sf.pair())) {
            demote.push_back(sf.id);
        }
    }
    for (SubflowId id : demote) {
        set_subflow_priority(conn, {id, true});
    }
}

} // namespace mpflow
