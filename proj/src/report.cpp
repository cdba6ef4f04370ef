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

#include "mpflow/report.hpp"

#include <algorithm>

#include "mpflow/error.hpp"

namespace mpflow {

std::uint64_t TimelineReport::bytes(SubflowId id, std::int64_t bucket_start_ms) const
{
    auto it = std::lower_bound(rows.begin(), rows.end(), std::pair{bucket_start_ms, id},
                               [](const TimelineRow& r, const std::pair<std::int64_t, SubflowId>& key) {
                                   return std::pair{r.bucket.bucket_start_ms, r.bucket.subflow_id} < key;
                               });
    if (it == rows.end() || it->bucket.bucket_start_ms != bucket_start_ms || it->bucket.subflow_id != id) {
        return 0;
    }
    return it->bucket.bytes_acked;
}

const GenealogyEntry* TimelineReport::genealogy(SubflowId id) const
{
    for (const auto& g : subflow_genealogy) {
        if (g.id == id) {
            return &g;
        }
    }
    return nullptr;
}

void emit_csv(const TimelineReport& report, std::ostream& out)
{
    out << kCsvHeader << '\n';
    for (const auto& row : report.rows) {
        const auto bps = row.bucket.bytes_acked * 8 * 1000 / static_cast<std::uint64_t>(report.bucket_ms);
        out << row.bucket.bucket_start_ms << ',' << unsigned{row.bucket.subflow_id.value} << ','
            << row.pair.to_string() << ',' << row.bucket.bytes_acked << ',' << bps << ','
            << (row.low_prio ? 1 : 0) << ',' << (row.alive ? 1 : 0) << '\n';
    }
    if (!report.subflow_genealogy.empty()) {
        out << "# genealogy\n";
        out << "# subflow_id,pair,created_ms,died_ms\n";
        for (const auto& g : report.subflow_genealogy) {
            out << "# " << unsigned{g.id.value} << ',' << g.pair.to_string() << ','
                << std::chrono::duration_cast<std::chrono::milliseconds>(g.created_at).count() << ',';
            if (g.died_at) {
                out << std::chrono::duration_cast<std::chrono::milliseconds>(*g.died_at).count();
            }
            out << '\n';
        }
    }
    out.flush();
    if (!out) {
        throw Error(ErrorKind::io, "failed to write CSV timeline");
    }
}

} // namespace mpflow
