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


#include "relaycap/gaps.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace relaycap;
using Catch::Approx;

TEST_CASE("theoretical gap values", "[gaps]")
{
    const AntennaConfig two{2, 2, 2, 2};
    CHECK(theoretical_gap(GapBoundKind::PDF_ADDITIVE, two) == 2.0);
    CHECK(theoretical_gap(GapBoundKind::CF_ADDITIVE, two) == 4.0);
    CHECK(theoretical_gap(GapBoundKind::NPDF_ADDITIVE, {1, 2, 2, 3}) == 3.0);
    CHECK(theoretical_gap(GapBoundKind::CF_KOLTE, two, 1.0) == Approx(2.0 * std::log2(3.0) + 2.0).margin(1e-12));
    CHECK(theoretical_gap(GapBoundKind::CF_ADDITIVE_SIGMA, two, 1.0) == Approx(4.0).margin(1e-12));
    CHECK(theoretical_gap(GapBoundKind::MULTIPLICATIVE_PDF, two) == 2.0);
    CHECK(theoretical_gap(GapBoundKind::MULTIPLICATIVE_DF_CF, {3, 1, 4, 2}) == 2.0);
    CHECK(theoretical_gap(GapBoundKind::RFD_PDF, {3, 1, 2, 2}) == 2.0);
    CHECK(theoretical_gap(GapBoundKind::SFD_NPDF, {3, 1, 2, 4}, std::nullopt, std::pair{2, 1}) == 3.0);
    CHECK(theoretical_gap(GapBoundKind::SFD_CF, {3, 1, 2, 2}, std::nullopt, std::pair{2, 1}) == 4.0);
    CHECK(theoretical_gap(GapBoundKind::RFD_CF, {3, 1, 1, 3}, std::nullopt, std::pair{1, 2}) == 2.0);
}

TEST_CASE("sigma2 minimization", "[gaps]")
{
    // r2 = bc = 2: the two terms cross where 2 + 2 log2(1 + 1/s) = 2 log2(1 + s)
    const double m = theoretical_gap(GapBoundKind::CF_ADDITIVE_SIGMA, {2, 2, 2, 2});
    double grid = 1e300;
    for (int i = -20000; i <= 20000; ++i)
        grid = std::min(grid, theoretical_gap(GapBoundKind::CF_ADDITIVE_SIGMA, {2, 2, 2, 2}, std::exp2(i * 1e-3)));
    CHECK(m <= grid + 1e-6); // search tolerance 1e-6 on log2 sigma2
    CHECK(m >= grid - 2e-3); // the grid step in log2 sigma2 is 1e-3
    CHECK(m <= theoretical_gap(GapBoundKind::CF_ADDITIVE_SIGMA, {2, 2, 2, 2}, 1.0));
}

TEST_CASE("compress-forward gap tightens the earlier expression", "[gaps]")
{
    for (int t1 = 1; t1 <= 4; ++t1)
        for (int t2 = 1; t2 <= 4; ++t2)
            for (int r2 = 1; r2 <= 4; ++r2)
                for (int r3 = 1; r3 <= 4; ++r3)
                {
                    const AntennaConfig c{t1, t2, r2, r3};
                    for (int k = -6; k <= 6; ++k)
                    {
                        const double s2 = std::ldexp(1.0, k);
                        CHECK(theoretical_gap(GapBoundKind::CF_ADDITIVE_SIGMA, c, s2) <=
                              theoretical_gap(GapBoundKind::CF_KOLTE, c, s2));
                    }
                    CHECK(theoretical_gap(GapBoundKind::CF_ADDITIVE_SIGMA, c) <=
                          theoretical_gap(GapBoundKind::CF_KOLTE, c) + 1e-9);
                }
}

TEST_CASE("theoretical gap argument errors", "[gaps]")
{
    CHECK_THROWS_AS(theoretical_gap(GapBoundKind::SFD_NPDF, {2, 1, 1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(theoretical_gap(GapBoundKind::SFD_CF, {2, 1, 1, 1}, std::nullopt, std::pair{1, 2}),
                    std::invalid_argument);
    CHECK_THROWS_AS(theoretical_gap(GapBoundKind::RFD_CF, {2, 1, 1, 2}), std::invalid_argument);
    CHECK_THROWS_AS(theoretical_gap(GapBoundKind::CF_KOLTE, {2, 1, 1, 2}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(theoretical_gap(GapBoundKind::PDF_ADDITIVE, {0, 1, 1, 2}), std::invalid_argument);
}

TEST_CASE("Monte Carlo with no channels", "[gaps]")
{
    const GapReport r = montecarlo_gaps({2, 2, 2, 2}, 0, {0.0, 10.0}, 1);
    CHECK(r.rows.empty());
    CHECK(r.aggregates.empty());
    CHECK(r.points == 0);
}

TEST_CASE("Monte Carlo is deterministic and respects the ceilings", "[gaps]")
{
    const std::vector<double> snr{0.0, 20.0};
    const GapReport a = montecarlo_gaps({2, 2, 2, 2}, 4, snr, 9, {}, 1);
    const GapReport b = montecarlo_gaps({2, 2, 2, 2}, 4, snr, 9, {}, 2);
    REQUIRE(a.rows.size() == 4 * 2 * 6);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i)
    {
        CHECK(a.rows[i].channel_id == b.rows[i].channel_id);
        CHECK(a.rows[i].bound == b.rows[i].bound);
        CHECK(a.rows[i].value_bits == b.rows[i].value_bits);
    }
    CHECK(a.flagged_points == 0);
    CHECK(*a.overall_max("CS-PDF") <= 2.01);
    CHECK(*a.overall_max("CS-NPDF") <= 2.01);
    CHECK(*a.overall_max("CS-CF") <= 4.01);
    CHECK(*a.overall_max("CS/PDF") <= 2.001);
    CHECK(*a.overall_max("CS/max(DF,CF)") <= 2.001);
    const auto agg = a.find(20.0, "CS-PDF");
    REQUIRE(agg.has_value());
    CHECK(agg->count == 4);
    CHECK(agg->avg <= agg->max);
}

TEST_CASE("separation curve", "[gaps]")
{
    const auto rows = separation_curve({1.0}, 1.0);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].pdf_lower_bits == Approx(0.0).margin(1e-12));
    CHECK(rows[0].dfdt_upper_bits == Approx(2.0).margin(1e-12));
    CHECK(rows[0].separation_bits == Approx(-2.0).margin(1e-12));

    const auto ten = separation_curve({10.0}, 10.0);
    CHECK(ten[0].pdf_lower_bits == Approx(2.0 * std::log2(506.0) - 2.0).margin(1e-9));
    CHECK(ten[0].dfdt_upper_bits == Approx(std::log2(11.0 * 1001.0)).margin(1e-9));
    CHECK(ten[0].separation_bits == Approx(2.540).margin(1e-3));

    std::vector<double> g;
    for (double x = 10.0; x <= 1e4; x *= 1.5)
        g.push_back(x);
    const auto curve = separation_curve(g, 10.0);
    for (std::size_t i = 1; i < curve.size(); ++i)
        CHECK(curve[i].separation_bits > curve[i - 1].separation_bits);
    CHECK(curve.back().separation_bits > 10.0);
    CHECK_THROWS_AS(separation_curve({0.0}, 1.0), std::invalid_argument);
}

TEST_CASE("separation channel layout", "[gaps]")
{
    const ChannelMatrices ch = separation_channel(3.0);
    CHECK(ch.g31()(0, 0) == cplx(3.0));
    CHECK(ch.g31()(1, 1) == cplx(1.0));
    CHECK(ch.g21()(0, 0) == cplx(1.0));
    CHECK(ch.g21()(1, 1) == cplx(3.0));
    CHECK(ch.g32()(0, 0) == cplx(3.0));
    CHECK(ch.g32()(0, 1) == cplx(0.0));
}
