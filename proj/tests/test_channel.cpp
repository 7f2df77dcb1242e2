// SPDX-License-Identifier: Apache-2.0
//
// relaycap: capacity bounds for Gaussian MIMO relay channels
// Copyright (C) 2026 The relaycap authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#include "relaycap/channel.hpp"
#include "relaycap/channel_io.hpp"
#include "relaycap/compute.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace relaycap;

TEST_CASE("random_channel is deterministic and shaped", "[channel]")
{
    const AntennaConfig c{2, 2, 2, 2};
    const ChannelMatrices a = random_channel(c, 42, 3), b = random_channel(c, 42, 3);
    CHECK(a.g21() == b.g21());
    CHECK(a.g31() == b.g31());
    CHECK(a.g32() == b.g32());
    CHECK(a.g21() != random_channel(c, 42, 4).g21());
    CHECK(a.g21() != random_channel(c, 43, 3).g21());
    CHECK((a.g21().rows() == 2 && a.g21().cols() == 2));
    CHECK((a.g31().rows() == 2 && a.g31().cols() == 2));
    CHECK((a.g32().rows() == 2 && a.g32().cols() == 2));

    const AntennaConfig d{3, 1, 2, 4};
    const ChannelMatrices m = random_channel(d, 1);
    CHECK((m.g3star().rows() == 4 && m.g3star().cols() == 4));
    CHECK((m.gstar1().rows() == 6 && m.gstar1().cols() == 3));
    CHECK(m.g3star().leftCols(3) == m.g31());
    CHECK(m.gstar1().bottomRows(4) == m.g31());
}

TEST_CASE("random_channel entries have unit power", "[channel]")
{
    const AntennaConfig c{1, 1, 1, 1};
    double sum = 0.0, re2 = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i)
    {
        const ChannelMatrices m = random_channel(c, 99, static_cast<std::uint64_t>(i));
        sum += std::norm(m.g21()(0, 0));
        re2 += m.g21()(0, 0).real() * m.g21()(0, 0).real();
    }
    CHECK(std::abs(sum / n - 1.0) <= 0.05);
    CHECK(std::abs(re2 / n - 0.5) <= 0.05);
}

TEST_CASE("AntennaConfig bounds", "[channel]")
{
    CHECK_THROWS_AS((AntennaConfig{0, 1, 1, 1}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((AntennaConfig{1, 17, 1, 1}.validate()), std::invalid_argument);
    CHECK_NOTHROW((AntennaConfig{16, 1, 1, 16}.validate()));
    CHECK_THROWS_AS(PowerConstraint(-1.0), std::invalid_argument);
}

TEST_CASE("sfd_embed places the zero blocks", "[channel]")
{
    const HalfDuplexChannel hd = random_halfduplex(HalfDuplexMode::SFD, {3, 2, 2, 2}, {1, 2}, 5);
    const ChannelMatrices e = sfd_embed(hd);
    CHECK(e.g21().leftCols(1).cwiseAbs().maxCoeff() == 0.0);
    CHECK(e.g31().rightCols(2).cwiseAbs().maxCoeff() == 0.0);
    CHECK(e.g21().rightCols(2) == hd.G21);
    CHECK(e.g31().leftCols(1) == hd.G31);
    CHECK(e.g32() == hd.G32);
    CHECK(e.g21().norm() == hd.G21.norm());
    CHECK(e.g31().norm() == hd.G31.norm());
    // no sender antenna reaches both the relay and the receiver
    CHECK((e.g21().adjoint() * e.g31()).diagonal().cwiseAbs().maxCoeff() == 0.0);

    const HalfDuplexChannel unit = random_halfduplex(HalfDuplexMode::SFD, {2, 1, 1, 1}, {1, 1}, 6);
    CHECK(sfd_embed(unit).g21().col(0).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(rfd_embed(unit), std::invalid_argument);
}

TEST_CASE("rfd_embed places the zero blocks", "[channel]")
{
    const HalfDuplexChannel hd = random_halfduplex(HalfDuplexMode::RFD, {2, 2, 2, 2}, {1, 1}, 7);
    const ChannelMatrices e = rfd_embed(hd);
    CHECK(e.g31().bottomRows(1).cwiseAbs().maxCoeff() == 0.0);
    CHECK(e.g32().topRows(1).cwiseAbs().maxCoeff() == 0.0);
    CHECK(e.g32().row(0).cwiseAbs().maxCoeff() == 0.0);
    CHECK(e.g21() == hd.G21);
    CHECK(e.g32().norm() == hd.G32.norm());
    CHECK_THROWS_AS(sfd_embed(hd), std::invalid_argument);
}

TEST_CASE("extract_halfduplex inverts the embeddings", "[channel]")
{
    const HalfDuplexChannel s = random_halfduplex(HalfDuplexMode::SFD, {3, 2, 2, 2}, {2, 1}, 8);
    const HalfDuplexChannel s2 = extract_halfduplex(sfd_embed(s), HalfDuplexMode::SFD, {2, 1});
    CHECK(s2.G21 == s.G21);
    CHECK(s2.G31 == s.G31);
    const HalfDuplexChannel r = random_halfduplex(HalfDuplexMode::RFD, {2, 2, 2, 3}, {2, 1}, 8);
    const HalfDuplexChannel r2 = extract_halfduplex(rfd_embed(r), HalfDuplexMode::RFD, {2, 1});
    CHECK(r2.G32 == r.G32);
    CHECK_THROWS_AS(extract_halfduplex(random_channel({2, 1, 1, 1}, 1), HalfDuplexMode::SFD, {1, 1}),
                    std::invalid_argument);
    CHECK_THROWS_AS(random_halfduplex(HalfDuplexMode::SFD, {3, 1, 1, 1}, {1, 1}, 1), std::invalid_argument);
}

TEST_CASE("embedded cutset equals the half-duplex capacity expression", "[channel]")
{
    // both paths solved independently; they must agree within solver tolerance
    const SolverConfig cfg;
    for (std::uint64_t s = 0; s < 3; ++s)
    {
        const HalfDuplexChannel hd = random_halfduplex(HalfDuplexMode::SFD, {2, 1, 1, 1}, {1, 1}, 21, s);
        const double direct = compute_bound(BoundKind::SFD_CAP, hd, 2.0, cfg).value_bits;
        const double embedded = compute_bound(BoundKind::CS, sfd_embed(hd), 2.0, cfg).value_bits;
        CHECK(std::abs(direct - embedded) <= 2.0 * cfg.tol_bits);
    }
    for (std::uint64_t s = 0; s < 3; ++s)
    {
        const HalfDuplexChannel hd = random_halfduplex(HalfDuplexMode::RFD, {1, 1, 1, 2}, {1, 1}, 22, s);
        const double direct = compute_bound(BoundKind::RFD_CS, hd, 2.0, cfg).value_bits;
        const double embedded = compute_bound(BoundKind::CS, rfd_embed(hd), 2.0, cfg).value_bits;
        CHECK(std::abs(direct - embedded) <= 2.0 * cfg.tol_bits);
    }
}

TEST_CASE("channel JSON round trip and diagnostics", "[channel]")
{
    const ChannelMatrices ch = random_channel({2, 1, 3, 2}, 4);
    const ChannelMatrices back = channel_from_json(channel_to_json(ch));
    CHECK(back.g21() == ch.g21());
    CHECK(back.g31() == ch.g31());
    CHECK(back.g32() == ch.g32());

    nlohmann::json doc = channel_to_json(ch);
    doc.erase("G32");
    try
    {
        channel_from_json(doc);
        FAIL("missing field accepted");
    }
    catch (const ChannelFormatError &e)
    {
        CHECK(e.field() == "G32");
    }

    doc = channel_to_json(ch);
    doc["G21"].erase(0);
    CHECK_THROWS_AS(channel_from_json(doc), ChannelFormatError);
    doc = channel_to_json(ch);
    doc["t1"] = 0;
    CHECK_THROWS_AS(channel_from_json(doc), ChannelFormatError);
    CHECK_THROWS_AS(parse_channel("{not json"), ChannelFormatError);

    // rows of [re, im] pairs are accepted as well
    const ChannelMatrices s = parse_channel(
        R"({"t1":1,"t2":1,"r2":1,"r3":2,"G21":[[[1,0]]],"G31":[[[0,1]],[[2,0]]],"G32":[[1,0],[0,0]]})");
    CHECK(s.g31()(0, 0) == cplx(0.0, 1.0));
    CHECK(s.g31()(1, 0) == cplx(2.0, 0.0));
}
