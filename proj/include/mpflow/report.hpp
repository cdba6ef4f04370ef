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
#include <ostream>
#include <string>
#include <vector>

#include "mpflow/connection.hpp"

namespace mpflow {

struct ThroughputBucket {
    std::int64_t bucket_start_ms = 0;
    SubflowId subflow_id;
    std::uint64_t bytes_acked = 0;

    friend bool operator==(const ThroughputBucket&, const ThroughputBucket&) = default;
};

/// One bucket of one sub-flow. Flags are sampled at the end of the bucket.
struct TimelineRow {
    ThroughputBucket bucket;
    InterfacePair pair;
    bool low_prio = false;
    bool alive = false;
};

struct GenealogyEntry {
    SubflowId id;
    InterfacePair pair;
    Micros created_at{0};
    std::optional<Micros> died_at;
};

struct TimelineReport {
    std::int64_t bucket_ms = 1000;
    std::int64_t duration_ms = 0;
    std::vector<TimelineRow> rows;             // sorted by (bucket_start_ms, subflow_id)
    std::vector<GenealogyEntry> subflow_genealogy; // sorted by id
    std::vector<std::string> diagnostics;

    /// Bytes acked on `id` in the bucket starting at `bucket_start_ms`; zero
    /// when the sub-flow has no row there.
    std::uint64_t bytes(SubflowId id, std::int64_t bucket_start_ms) const;
    const GenealogyEntry* genealogy(SubflowId id) const;
};

inline constexpr const char* kCsvHeader = "bucket_start_ms,subflow_id,pair,bytes_acked,throughput_bps,low_prio,alive";

/// Writes the header, one row per TimelineRow and, when the report has any
/// sub-flows, a `#`-prefixed genealogy footer. Throws Error(io) when the
/// stream fails.
void emit_csv(const TimelineReport& report, std::ostream& out);

} // namespace mpflow
