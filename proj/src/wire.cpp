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

#include "mpflow/wire.hpp"

#include <string>

#include "mpflow/error.hpp"

namespace mpflow {

namespace {

constexpr std::uint8_t kLenNoAddr = 3;
constexpr std::uint8_t kLenWithAddr = 4;
constexpr std::uint8_t kBackupBit = 0x01;

} // namespace

std::vector<std::uint8_t> encode_mp_prio(const MpPrioOption& opt)
{
    std::vector<std::uint8_t> out;
    out.reserve(kLenWithAddr);
    out.push_back(kMptcpOptionKind);
    out.push_back(opt.addr_id ? kLenWithAddr : kLenNoAddr);
    out.push_back(static_cast<std::uint8_t>((kMpPrioSubtype << 4) | (opt.backup_flag ? kBackupBit : 0)));
    if (opt.addr_id) {
        out.push_back(*opt.addr_id);
    }
    return out;
}

MpPrioOption decode_mp_prio(std::span<const std::uint8_t> bytes)
{
    if (bytes.empty()) {
        throw Error(ErrorKind::malformed, "MP_PRIO: empty buffer");
    }
    if (bytes[0] != kMptcpOptionKind) {
        throw Error(ErrorKind::not_mp_prio, "option kind " + std::to_string(bytes[0]) + " is not MPTCP");
    }
    if (bytes.size() < 2) {
        throw Error(ErrorKind::malformed, "MP_PRIO: truncated before length");
    }
    const std::uint8_t len = bytes[1];
    if (len != kLenNoAddr && len != kLenWithAddr) {
        throw Error(ErrorKind::malformed, "MP_PRIO: illegal length " + std::to_string(len));
    }
    if (bytes.size() != len) {
        throw Error(ErrorKind::malformed, "MP_PRIO: length field " + std::to_string(len) +
                                              " but buffer holds " + std::to_string(bytes.size()));
    }
    const std::uint8_t subtype = bytes[2] >> 4;
    if (subtype != kMpPrioSubtype) {
        throw Error(ErrorKind::not_mp_prio, "MPTCP subtype " + std::to_string(subtype) + " is not MP_PRIO");
    }

    MpPrioOption opt;
    opt.backup_flag = (bytes[2] & kBackupBit) != 0;
    if (len == kLenWithAddr) {
        opt.addr_id = bytes[3];
    }
    return opt;
}

} // namespace mpflow
