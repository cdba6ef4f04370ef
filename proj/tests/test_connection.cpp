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

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "mpflow/connection.hpp"
#include "mpflow/error.hpp"
#include "mpflow/sockopt.hpp"
#include "test_support.hpp"

using namespace mpflow;
using namespace mpflow::testing;

namespace {

std::vector<std::uint8_t> ids_of(const std::vector<SubflowId>& ids)
{
    std::vector<std::uint8_t> out;
    for (auto id : ids) {
        out.push_back(id.value);
    }
    return out;
}

std::vector<EndpointAddress> make_addrs(int count, int second_octet)
{
    std::vector<EndpointAddress> out;
    for (int i = 0; i < count; ++i) {
        out.push_back(EndpointAddress::v4({10, static_cast<std::uint8_t>(second_octet), static_cast<std::uint8_t>(i), 1}));
    }
    return out;
}

} // namespace

TEST_CASE("endpoint addresses parse, compare and render")
{
    const auto a = EndpointAddress::parse("192.168.1.7", 80);
    CHECK(a.family() == AddressFamily::v4);
    CHECK(a.bytes().size() == 4);
    CHECK(a.port() == 80);
    CHECK(a.to_string() == "192.168.1.7");
    CHECK(a.without_port() == EndpointAddress::parse("192.168.1.7"));

    const auto b = EndpointAddress::parse("fe80::1");
    CHECK(b.family() == AddressFamily::v6);
    CHECK(b.bytes().size() == 16);
    CHECK(b.to_string() == "fe80::1");

    CHECK_THROWS_AS(EndpointAddress::parse("10.0.0"), Error);
    CHECK_THROWS_AS(EndpointAddress::parse("nonsense"), Error);
}

TEST_CASE("interface pairs ignore ports and reject mixed families")
{
    const InterfacePair p(addr("10.0.0.1").with_port(1), addr("10.1.0.1").with_port(2));
    CHECK(p == pair("10.0.0.1", "10.1.0.1"));
    CHECK(InterfacePair::parse("10.0.0.1>10.1.0.1") == p);
    CHECK(p.to_string() == "10.0.0.1>10.1.0.1");

    try {
        InterfacePair(addr("10.0.0.1"), addr("::1"));
        FAIL("expected validation error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::validation);
    }
    CHECK_THROWS_AS(InterfacePair::parse("10.0.0.1-10.1.0.1"), Error);
}

TEST_CASE("new_connection builds the full mesh in local-major order")
{
    SUBCASE("one local, three remotes")
    {
        const auto conn = three_path_connection();
        REQUIRE(conn.subflows.size() == 3);
        CHECK(ids_of(list_subflow_ids(conn)) == std::vector<std::uint8_t>{1, 2, 3});
        for (const auto& sf : conn.subflows) {
            CHECK_FALSE(sf.low_prio);
            CHECK(sf.alive);
        }
        CHECK(conn.outbox.empty());
    }
    SUBCASE("one local, one remote")
    {
        const auto conn = new_connection({kH1}, {kRemotes[0]});
        CHECK(conn.subflows.size() == 1);
    }
    SUBCASE("empty address list is a configuration error")
    {
        try {
            new_connection({}, kRemotes);
            FAIL("expected configuration error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::configuration);
        }
        CHECK_THROWS_AS(new_connection({kH1}, {}), Error);
    }
}

TEST_CASE("full-mesh cardinality matches a cross-product enumeration for m, n in [1, 4]")
{
    for (int m = 1; m <= 4; ++m) {
        for (int n = 1; n <= 4; ++n) {
            const auto locals = make_addrs(m, 0);
            const auto remotes = make_addrs(n, 100);
            const auto conn = new_connection(locals, remotes);

            std::multiset<InterfacePair> expected;
            for (const auto& l : locals) {
                for (const auto& r : remotes) {
                    expected.insert(InterfacePair(l, r));
                }
            }
            std::multiset<InterfacePair> actual;
            for (const auto& sf : conn.subflows) {
                actual.insert(sf.pair());
            }
            CHECK(conn.subflows.size() == static_cast<std::size_t>(m * n));
            CHECK(actual == expected);
        }
    }
}

TEST_CASE("sub-flow tuples follow construction order")
{
    const auto locals = make_addrs(2, 0);
    const auto remotes = make_addrs(3, 100);
    const auto conn = new_connection(locals, remotes);

    // Independent enumeration of the construction order.
    std::uint8_t id = 1;
    for (const auto& l : locals) {
        for (const auto& r : remotes) {
            const auto t = get_subflow_tuple(conn, SubflowId{id});
            CHECK(t.src.without_port() == l);
            CHECK(t.dst.without_port() == r);
            CHECK(t.src.port() == kSubflowPortBase + id);
            ++id;
        }
    }

    const auto three = three_path_connection();
    CHECK(get_subflow_tuple(three, SubflowId{1}).pair() == InterfacePair(kH1, kRemotes[0]));
    CHECK(get_subflow_tuple(three, SubflowId{3}).pair() == InterfacePair(kH1, kRemotes[2]));
    try {
        get_subflow_tuple(three, SubflowId{99});
        FAIL("expected not-found");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::not_found);
    }
}

TEST_CASE("closing and reopening sub-flows")
{
    auto conn = three_path_connection();

    close_subflow(conn, SubflowId{2});
    CHECK(ids_of(list_subflow_ids(conn)) == std::vector<std::uint8_t>{1, 3});

    close_subflow(conn, SubflowId{1});
    CHECK(ids_of(list_subflow_ids(conn)) == std::vector<std::uint8_t>{3});

    // Re-establishing S-1's pair yields a fresh id.
    const auto id = open_subflow(conn, make_subflow_tuple(kH1, kRemotes[0], conn.next_id));
    CHECK(id.value == 4);
    CHECK(ids_of(list_subflow_ids(conn)) == std::vector<std::uint8_t>{3, 4});

    SUBCASE("closing an unknown or dead id fails")
    {
        CHECK_THROWS_AS(close_subflow(conn, SubflowId{1}), Error);
        CHECK_THROWS_AS(close_subflow(conn, SubflowId{42}), Error);
    }
    SUBCASE("closing the last alive sub-flows leaves nothing to list")
    {
        close_subflow(conn, SubflowId{3});
        close_subflow(conn, SubflowId{4});
        CHECK(list_subflow_ids(conn).empty());
    }
}

TEST_CASE("open_subflow rejects a duplicate 4-tuple and derives priority from the lists")
{
    auto conn = three_path_connection();
    const auto existing = get_subflow_tuple(conn, SubflowId{1});
    try {
        open_subflow(conn, existing);
        FAIL("expected already-exists");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::already_exists);
    }

    const auto s2 = InterfacePair(kH1, kRemotes[1]);
    const auto s3 = InterfacePair(kH1, kRemotes[2]);

    SUBCASE("pair in backup list is born backup")
    {
        set_backup_interface_list(conn, std::vector{s2});
        close_subflow(conn, SubflowId{2});
        const auto id = open_subflow(conn, make_subflow_tuple(kH1, kRemotes[1], conn.next_id));
        CHECK(conn.find(id)->low_prio);
    }
    SUBCASE("empty lists give an active sub-flow, whatever the predecessor was")
    {
        set_subflow_priority(conn, {SubflowId{2}, true});
        close_subflow(conn, SubflowId{2});
        const auto id = open_subflow(conn, make_subflow_tuple(kH1, kRemotes[1], conn.next_id));
        CHECK_FALSE(conn.find(id)->low_prio);
    }
    SUBCASE("pair in both lists is active")
    {
        set_active_interface_list(conn, std::vector{s3});
        set_backup_interface_list(conn, std::vector{s3});
        close_subflow(conn, SubflowId{3});
        const auto id = open_subflow(conn, make_subflow_tuple(kH1, kRemotes[2], conn.next_id));
        CHECK_FALSE(conn.find(id)->low_prio);
    }
}

TEST_CASE("id space exhaustion is reported")
{
    auto conn = new_connection({kH1}, {kRemotes[0]});
    for (int i = 0; i < 254; ++i) {
        close_subflow(conn, list_subflow_ids(conn).front());
        open_subflow(conn, make_subflow_tuple(kH1, kRemotes[0], conn.next_id));
    }
    CHECK(list_subflow_ids(conn).front().value == 255);
    close_subflow(conn, SubflowId{255});
    CHECK_THROWS_AS(open_subflow(conn, make_subflow_tuple(kH1, kRemotes[0], SubflowId{0})), Error);
}

TEST_CASE("random event sequences keep ids fresh, hide the dead and honour priority at birth")
{
    std::mt19937 rng(20261019);
    const std::vector<InterfacePair> pairs = {InterfacePair(kH1, kRemotes[0]), InterfacePair(kH1, kRemotes[1]),
                                              InterfacePair(kH1, kRemotes[2])};

    for (int trial = 0; trial < 50; ++trial) {
        auto conn = three_path_connection();
        std::map<std::uint8_t, bool> birth_prio;
        for (const auto& sf : conn.subflows) {
            birth_prio[sf.id.value] = sf.low_prio;
        }

        for (int step = 0; step < 60 && conn.next_id.value != 0; ++step) {
            const int op = std::uniform_int_distribution<int>(0, 3)(rng);
            if (op == 0) {
                const auto alive = list_subflow_ids(conn);
                if (!alive.empty()) {
                    close_subflow(conn, alive[std::uniform_int_distribution<std::size_t>(0, alive.size() - 1)(rng)]);
                }
            } else if (op == 1) {
                const auto& p = pairs[std::uniform_int_distribution<std::size_t>(0, 2)(rng)];
                const PriorityLists before = conn.lists;
                try {
                    const auto id = open_subflow(conn, make_subflow_tuple(p.src(), p.dst(), conn.next_id));
                    CHECK(conn.find(id)->low_prio == classify_subflow_priority(p, before));
                    birth_prio[id.value] = conn.find(id)->low_prio;
                } catch (const Error& e) {
                    CHECK(e.kind() == ErrorKind::already_exists);
                }
            } else {
                std::vector<InterfacePair> subset;
                for (const auto& p : pairs) {
                    if (rng() & 1) {
                        subset.push_back(p);
                    }
                }
                if (op == 2) {
                    set_active_interface_list(conn, subset);
                } else {
                    set_backup_interface_list(conn, subset);
                }
            }

            std::set<std::uint8_t> seen;
            for (const auto& sf : conn.subflows) {
                CHECK(seen.insert(sf.id.value).second);
            }
            for (auto id : list_subflow_ids(conn)) {
                CHECK(conn.find(id)->alive);
            }
        }
        // Nothing but explicit requests changes a flag after birth.
        for (const auto& sf : conn.subflows) {
            CHECK(sf.low_prio == birth_prio.at(sf.id.value));
        }
    }
}

TEST_CASE("mirror_connection gives the peer view with the same ids")
{
    auto conn = three_path_connection();
    set_subflow_priority(conn, {SubflowId{2}, true});
    const auto peer = mirror_connection(conn);
    REQUIRE(peer.subflows.size() == 3);
    CHECK(peer.local_addrs == conn.remote_addrs);
    CHECK(peer.next_id == conn.next_id);
    CHECK(peer.subflows[1].tuple == conn.subflows[1].tuple.reversed());
    CHECK(peer.subflows[1].low_prio);
    CHECK(peer.outbox.empty());
}
