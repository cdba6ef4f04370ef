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

#include <span>

#include "mpflow/connection.hpp"
#include "mpflow/wire.hpp"

namespace mpflow {

struct SubPrioRequest {
    SubflowId id;
    bool low_prio = false;
};

/// Priority for a sub-flow created on `pair`. A non-empty active list wins
/// outright: its members are active and everything else is backup. Otherwise
/// members of the backup list are backup. With both lists empty every
/// sub-flow is active.
bool classify_subflow_priority(const InterfacePair& pair, const PriorityLists& lists);

/// Sets the flag and queues an MP_PRIO for the peer, even when the flag does
/// not change. Throws Error(not_found) for unknown or dead ids.
void set_subflow_priority(ConnectionState& conn, const SubPrioRequest& req);

/// Applies an MP_PRIO received on sub-flow `arrived_on`. Returns false and
/// leaves the state untouched when the option addresses no alive sub-flow.
bool apply_remote_mp_prio(ConnectionState& conn, const MpPrioOption& opt, SubflowId arrived_on);

// Both list setters replace the list wholesale and only influence sub-flows
// created afterwards. Duplicates are collapsed, first occurrence kept.
void set_active_interface_list(ConnectionState& conn, std::span<const InterfacePair> pairs);
void set_backup_interface_list(ConnectionState& conn, std::span<const InterfacePair> pairs);

/// Switches the connection to the primary-path-only scheduler. Every alive
/// sub-flow off `primary_pairs` is made backup (emitting MP_PRIO); future
/// sub-flows off the primary pairs are born backup. Throws Error(validation)
/// for an empty set or a pair the connection cannot form.
void enable_primary_path_only(ConnectionState& conn, std::span<const InterfacePair> primary_pairs);

} // namespace mpflow
