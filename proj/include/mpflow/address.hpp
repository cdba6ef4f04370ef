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

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace mpflow {

enum class AddressFamily : std::uint8_t { v4, v6 };

/// An IPv4 or IPv6 address plus a transport port.
///
/// Storage is always 16 bytes; only the first 4 are significant for v4 and
/// the rest stay zero, so defaulted comparison is exact byte equality.
class EndpointAddress {
public:
    EndpointAddress() = default;

    static EndpointAddress v4(const std::array<std::uint8_t, 4>& bytes, std::uint16_t port = 0);
    static EndpointAddress v6(const std::array<std::uint8_t, 16>& bytes, std::uint16_t port = 0);

    /// Parses dotted-quad or RFC 4291 text. Throws Error(validation).
    static EndpointAddress parse(std::string_view text, std::uint16_t port = 0);

    AddressFamily family() const noexcept { return family_; }
    std::span<const std::uint8_t> bytes() const noexcept;
    std::uint16_t port() const noexcept { return port_; }

    EndpointAddress with_port(std::uint16_t port) const noexcept;
    EndpointAddress without_port() const noexcept { return with_port(0); }

    /// Address text only; the port is not rendered.
    std::string to_string() const;

    friend bool operator==(const EndpointAddress&, const EndpointAddress&) = default;
    friend auto operator<=>(const EndpointAddress&, const EndpointAddress&) = default;

private:
    AddressFamily family_ = AddressFamily::v4;
    std::array<std::uint8_t, 16> addr_{};
    std::uint16_t port_ = 0;
};

/// A (source interface, destination interface) pair. Ports never take part
/// in identity.
class InterfacePair {
public:
    InterfacePair() = default; // 0.0.0.0>0.0.0.0

    /// Throws Error(validation) when the two addresses differ in family.
    InterfacePair(const EndpointAddress& src, const EndpointAddress& dst);

    /// Parses `src>dst`.
    static InterfacePair parse(std::string_view text);

    AddressFamily family() const noexcept { return src_.family(); }
    const EndpointAddress& src() const noexcept { return src_; }
    const EndpointAddress& dst() const noexcept { return dst_; }

    InterfacePair reversed() const { return InterfacePair(dst_, src_); }

    std::string to_string() const;

    friend bool operator==(const InterfacePair&, const InterfacePair&) = default;
    friend auto operator<=>(const InterfacePair&, const InterfacePair&) = default;

private:
    EndpointAddress src_;
    EndpointAddress dst_;
};

} // namespace mpflow
