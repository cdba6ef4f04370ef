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
#include <span>
#include <vector>

namespace mpflow {

inline constexpr std::uint8_t kMptcpOptionKind = 30;
inline constexpr std::uint8_t kMpPrioSubtype = 0x5;

/// MP_PRIO option (RFC 6824 section 3.3.8).
///
///      0                   1                   2                   3
///     +---------------+---------------+-------+-----+-+--------------+
///     |     Kind      |     Length    |Subtype|     |B| AddrID (opt) |
///     +---------------+---------------+-------+-----+-+--------------+
///
/// An absent addr_id means the option applies to the sub-flow it arrives on.
struct MpPrioOption {
    bool backup_flag = false;
    std::optional<std::uint8_t> addr_id;

    friend bool operator==(const MpPrioOption&, const MpPrioOption&) = default;
};

/// 3 bytes without an address id, 4 with one. Reserved bits are zero.
std::vector<std::uint8_t> encode_mp_prio(const MpPrioOption& opt);

/// Strict on framing, liberal on reserved bits. The buffer must hold exactly
/// one option. Throws Error(not_mp_prio) for a foreign kind or subtype and
/// Error(malformed) for bad length or truncation.
MpPrioOption decode_mp_prio(std::span<const std::uint8_t> bytes);

} // namespace mpflow
