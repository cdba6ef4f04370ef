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

#include "mpflow/address.hpp"

#include <arpa/inet.h>

#include <algorithm>

#include "mpflow/error.hpp"

namespace mpflow {

std::string_view to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::configuration: return "configuration";
    case ErrorKind::not_found: return "not-found";
    case ErrorKind::already_exists: return "already-exists";
    case ErrorKind::validation: return "validation";
    case ErrorKind::malformed: return "malformed";
    case ErrorKind::not_mp_prio: return "not-mp-prio";
    case ErrorKind::syntax: return "syntax";
    case ErrorKind::io: return "io";
    }
    return "unknown";
}

EndpointAddress EndpointAddress::v4(const std::array<std::uint8_t, 4>& bytes, std::uint16_t port)
{
    EndpointAddress a;
    a.family_ = AddressFamily::v4;
    std::copy(bytes.begin(), bytes.end(), a.addr_.begin());
    a.port_ = port;
    return a;
}

EndpointAddress EndpointAddress::v6(const std::array<std::uint8_t, 16>& bytes, std::uint16_t port)
{
    EndpointAddress a;
    a.family_ = AddressFamily::v6;
    a.addr_ = bytes;
    a.port_ = port;
    return a;
}

EndpointAddress EndpointAddress::parse(std::string_view text, std::uint16_t port)
{
    const std::string s(text);
    std::array<std::uint8_t, 16> buf{};
    if (s.find(':') == std::string::npos) {
        if (inet_pton(AF_INET, s.c_str(), buf.data()) == 1) {
            return v4({buf[0], buf[1], buf[2], buf[3]}, port);
        }
    } else if (inet_pton(AF_INET6, s.c_str(), buf.data()) == 1) {
        return v6(buf, port);
    }
    throw Error(ErrorKind::validation, "invalid address '" + s + "'");
}

std::span<const std::uint8_t> EndpointAddress::bytes() const noexcept
{
    return {addr_.data(), family_ == AddressFamily::v4 ? 4u : 16u};
}

EndpointAddress EndpointAddress::with_port(std::uint16_t port) const noexcept
{
    EndpointAddress a = *this;
    a.port_ = port;
    return a;
}

std::string EndpointAddress::to_string() const
{
    char buf[INET6_ADDRSTRLEN] = {};
    const int af = family_ == AddressFamily::v4 ? AF_INET : AF_INET6;
    inet_ntop(af, addr_.data(), buf, sizeof buf);
    return buf;
}

InterfacePair::InterfacePair(const EndpointAddress& src, const EndpointAddress& dst)
    : src_(src.without_port()), dst_(dst.without_port())
{
    if (src.family() != dst.family()) {
        throw Error(ErrorKind::validation,
                    "interface pair mixes address families: " + src.to_string() + " and " +
                        dst.to_string());
    }
}

InterfacePair InterfacePair::parse(std::string_view text)
{
    const auto sep = text.find('>');
    if (sep == std::string_view::npos) {
        throw Error(ErrorKind::validation,
                    "interface pair '" + std::string(text) + "' is not of the form src>dst");
    }
    return InterfacePair(EndpointAddress::parse(text.substr(0, sep)),
                         EndpointAddress::parse(text.substr(sep + 1)));
}

std::string InterfacePair::to_string() const
{
    return src_.to_string() + ">" + dst_.to_string();
}

} // namespace mpflow
