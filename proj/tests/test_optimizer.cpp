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


#include "relaycap/compute.hpp"
#include "relaycap/optimizer.hpp"

#include "oracles.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

using namespace relaycap;
using Catch::Approx;

namespace
{

CMat s(double v)
{
    return CMat::Constant(1, 1, cplx(v, 0.0));
}

ChannelMatrices scalar_channel(double g21, double g31, double g32)
{
    return ChannelMatrices::from_matrices(s(g21), s(g31), s(g32));
}

CMat random_hermitian(CounterRng &rng, int n, double scale)
{
    CMat a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            a(i, j) = rng.complex_normal() * scale;
    return detail::hermitian_part(a);
}

// Eigenvalue projection onto {x >= 0, sum x <= P}, by bisection on the shift.
RVec capped_simplex(const RVec &x, double P)
{
    if (x.cwiseMax(0.0).sum() <= P)
        return x.cwiseMax(0.0);
    double lo = 0.0, hi = x.maxCoeff();
    for (int i = 0; i < 200; ++i)
    {
        const double mid = 0.5 * (lo + hi);
        ((x.array() - mid).cwiseMax(0.0).sum() > P ? lo : hi) = mid;
    }
    return (x.array() - hi).cwiseMax(0.0);
}

double frob2(const CMat &m)
{
    return m.squaredNorm();
}

} // namespace

TEST_CASE("projection on a single node matches the eigenvalue oracle", "[optimizer]")
{
    CounterRng rng(11);
    for (int k = 0; k < 100; ++k)
    {
        const int n = 1 + k % 4;
        const double P = 0.5 + rng.uniform() * 4.0;
        const FeasibleSet set = FeasibleSet::sender_only(n, P);
        const CMat H = random_hermitian(rng, n, 2.0);
        const auto es = detail::eigh(H);
        const CMat want = es.eigenvectors() * capped_simplex(es.eigenvalues(), P).asDiagonal() * es.eigenvectors().adjoint();
        CHECK(detail::max_abs(set.project(H) - want) <= 1e-8);
    }
}

TEST_CASE("projection satisfies the variational inequality", "[optimizer]")
{
    CounterRng rng(12);
    for (int k = 0; k < 40; ++k)
    {
        const int t1 = 1 + k % 3, t2 = 1 + (k / 3) % 2;
        const double P = 1.0 + rng.uniform() * 5.0;
        const FeasibleSet set = k % 2 ? FeasibleSet::coherent(t1, t2, P) : FeasibleSet::noncoherent(t1, t2, P);
        CMat V = CMat::Zero(set.dim(), set.dim());
        for (const auto &g : set.groups())
        {
            const CMat h = random_hermitian(rng, static_cast<int>(g.size()), 3.0);
            for (std::size_t i = 0; i < g.size(); ++i)
                for (std::size_t j = 0; j < g.size(); ++j)
                    V(g[i], g[j]) = h(i, j);
        }
        const CMat X = set.project(V);
        CHECK(detail::is_psd(X));
        CHECK(set.node_trace(X, 0) <= P + 1e-9);
        CHECK(set.node_trace(X, 1) <= P + 1e-9);
        for (int m = 0; m < 50; ++m)
        {
            const CMat W = set.random_member(rng) * rng.uniform();
            CHECK(detail::real_inner(V - X, W - X) <= 1e-7 * (1.0 + frob2(V)));
        }
    }
}

TEST_CASE("linear_max bounds every member and is exact on one node", "[optimizer]")
{
    CounterRng rng(13);
    for (int k = 0; k < 40; ++k)
    {
        const double P = 2.0;
        const FeasibleSet one = FeasibleSet::sender_only(3, P);
        const CMat G1 = random_hermitian(rng, 3, 1.0);
        CHECK(one.linear_max(G1) == Approx(P * std::max(0.0, detail::max_eigenvalue(G1))).margin(1e-9));

        const FeasibleSet set = FeasibleSet::coherent(2, 2, P);
        const CMat G = random_hermitian(rng, set.dim(), 1.0);
        const double bound = set.linear_max(G);
        double seen = 0.0;
        for (int m = 0; m < 300; ++m)
            seen = std::max(seen, detail::real_inner(G, set.random_member(rng)));
        CHECK(seen <= bound + 1e-9);
    }
}

TEST_CASE("membership test", "[optimizer]")
{
    const FeasibleSet nc = FeasibleSet::noncoherent(1, 1, 1.0);
    CMat K = CMat::Identity(2, 2);
    CHECK(nc.contains(K));
    K(0, 1) = K(1, 0) = 0.5;
    CHECK_FALSE(nc.contains(K));
    CHECK(FeasibleSet::coherent(1, 1, 1.0).contains(K));
    CHECK_FALSE(FeasibleSet::coherent(1, 1, 0.5).contains(K));
    K(0, 1) = K(1, 0) = 2.0;
    CHECK_FALSE(FeasibleSet::coherent(1, 1, 1.0).contains(K));
}

TEST_CASE("maximize_weighted direct transmission", "[optimizer]")
{
    const SolverConfig cfg;
    const WeightedResult r = maximize_weighted(objectives::dt(scalar_channel(1.0, 1.0, 1.0)), 1.0,
                                               FeasibleSet::sender_only(1, 3.0), cfg);
    CHECK(r.weighted == Approx(2.0).margin(1e-3));
    CHECK(r.K(0, 0).real() == Approx(3.0).margin(1e-3));

    CMat g31 = CMat::Zero(2, 2);
    g31(0, 0) = 2.0;
    g31(1, 1) = 1.0;
    const ChannelMatrices ch = ChannelMatrices::from_matrices(CMat::Zero(2, 2), g31, CMat::Zero(2, 1));
    const WeightedResult w = maximize_weighted(objectives::dt(ch), 1.0, FeasibleSet::sender_only(2, 2.0), cfg);
    double grid = 0.0;
    for (int j = 0; j <= 2000; ++j)
    {
        const double p = 2.0 * j / 2000.0;
        grid = std::max(grid, std::log2(1.0 + 4.0 * p) + std::log2(1.0 + (2.0 - p)));
    }
    CHECK(std::abs(w.weighted - grid) <= 1e-3);
}

TEST_CASE("maximize_weighted scalar cutset at equal weights", "[optimizer]")
{
    const ChannelMatrices ch = scalar_channel(1.0, 1.0, 1.0);
    const WeightedResult r =
        maximize_weighted(objectives::cutset(ch), 0.5, FeasibleSet::coherent(1, 1, 1.0), SolverConfig{});
    const double grid = oracle::scalar_cutset({1.0, 1.0, 1.0}, 1.0, 0.5);
    CHECK(std::abs(r.weighted - grid) <= 1e-2);
    CHECK(r.weighted <= r.upper + 1e-9);
    CHECK(FeasibleSet::coherent(1, 1, 1.0).contains(r.K));
}

TEST_CASE("maxmin examples", "[optimizer]")
{
    const SolverConfig cfg;
    SECTION("identical objectives")
    {
        const ChannelMatrices ch = scalar_channel(1.0, 1.0, 1.0);
        const MaxMinResult m = maxmin(objectives::dt(ch), FeasibleSet::sender_only(1, 3.0), cfg);
        CHECK(m.value == Approx(2.0).margin(1e-3));
        CHECK_FALSE(m.flagged);
    }
    SECTION("scalar cutset against the grid")
    {
        const ChannelMatrices ch = scalar_channel(1.0, 1.0, 1.0);
        const MaxMinResult m = maxmin(objectives::cutset(ch), FeasibleSet::coherent(1, 1, 1.0), cfg);
        CHECK(std::abs(m.value - oracle::scalar_cutset({1.0, 1.0, 1.0}, 1.0)) <= 1e-2);
        CHECK(m.certificate_gap() <= 2.0 * cfg.tol_bits);
    }
    SECTION("relay cut never binding")
    {
        const ChannelMatrices ch = scalar_channel(100.0, 1.0, 1.0);
        const FeasibleSet set = FeasibleSet::coherent(1, 1, 1.0);
        const MaxMinResult m = maxmin(objectives::cutset(ch), set, cfg);
        const WeightedResult w = maximize_weighted(objectives::cutset(ch), 1.0, set, cfg);
        CHECK(std::abs(m.value - w.terms.a) <= 2.0 * cfg.tol_bits);
        CHECK(m.value == Approx(std::log2(5.0)).margin(2e-3)); // fully coherent MAC
    }
}

TEST_CASE("zero power returns zero", "[optimizer]")
{
    const ChannelMatrices ch = scalar_channel(1.0, 2.0, 3.0);
    const MaxMinResult m = maxmin(objectives::cutset(ch), FeasibleSet::coherent(1, 1, 0.0), SolverConfig{});
    CHECK(m.value == 0.0);
    CHECK(m.K.isZero(0.0));
}

TEST_CASE("certificate soundness and feasibility on random channels", "[optimizer]")
{
    const SolverConfig cfg;
    for (std::uint64_t k = 0; k < 10; ++k)
    {
        const ChannelMatrices ch = random_channel({2, 2, 2, 2}, 77, k);
        const double P = std::pow(10.0, static_cast<double>(k % 4) - 1.0);
        const FeasibleSet set = FeasibleSet::coherent(2, 2, P);
        const MaxMinResult m = maxmin(objectives::cutset(ch), set, cfg);
        CHECK(m.value <= m.upper + 1e-9);
        CHECK(set.contains(m.K));
        CHECK_FALSE(m.flagged);
        const CutTerms direct = cutset_terms(ch, JointCovariance::from_joint(m.K, 2));
        CHECK(std::abs(direct.value - m.value) <= 1e-6);
    }
}

TEST_CASE("SolverConfig validation", "[optimizer]")
{
    SolverConfig c;
    c.tol_bits = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    SolverConfig g;
    g.sigma2_grid.clear();
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    CHECK_THROWS_AS(maximize_weighted(objectives::dt(scalar_channel(1, 1, 1)), 1.5, FeasibleSet::sender_only(1, 1.0),
                                      SolverConfig{}),
                    std::invalid_argument);
}
