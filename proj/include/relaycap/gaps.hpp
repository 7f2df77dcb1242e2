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

#pragma once

// Channel-independent gap ceilings, the Monte Carlo gap experiment and the
// diagonal channel on which partial decode-forward outgrows both decode-forward
// and direct transmission.

#include "relaycap/compute.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace relaycap
{

enum class GapBoundKind
{
    PDF_ADDITIVE,
    NPDF_ADDITIVE,
    CF_ADDITIVE,
    CF_ADDITIVE_SIGMA,
    CF_KOLTE,
    MULTIPLICATIVE_PDF,
    MULTIPLICATIVE_NPDF,
    MULTIPLICATIVE_DF_CF,
    SFD_NPDF,
    SFD_CF,
    RFD_PDF,
    RFD_CF
};

inline const char *to_string(GapBoundKind k)
{
    switch (k)
    {
    case GapBoundKind::PDF_ADDITIVE:
        return "PDF_ADDITIVE";
    case GapBoundKind::NPDF_ADDITIVE:
        return "NPDF_ADDITIVE";
    case GapBoundKind::CF_ADDITIVE:
        return "CF_ADDITIVE";
    case GapBoundKind::CF_ADDITIVE_SIGMA:
        return "CF_ADDITIVE_SIGMA";
    case GapBoundKind::CF_KOLTE:
        return "CF_KOLTE";
    case GapBoundKind::MULTIPLICATIVE_PDF:
        return "MULTIPLICATIVE_PDF";
    case GapBoundKind::MULTIPLICATIVE_NPDF:
        return "MULTIPLICATIVE_NPDF";
    case GapBoundKind::MULTIPLICATIVE_DF_CF:
        return "MULTIPLICATIVE_DF_CF";
    case GapBoundKind::SFD_NPDF:
        return "SFD_NPDF";
    case GapBoundKind::SFD_CF:
        return "SFD_CF";
    case GapBoundKind::RFD_PDF:
        return "RFD_PDF";
    case GapBoundKind::RFD_CF:
        return "RFD_CF";
    }
    return "?";
}

namespace detail
{

// max[ a + r2 log2(1 + 1/s), c log2(1 + s) ], the compress-forward gap at
// quantization noise s; `a` is the receiver-side term.
inline double cf_gap_at(double a, int r2, int c, double sigma2)
{
    return std::max(a + r2 * std::log2(1.0 + 1.0 / sigma2), c * std::log2(1.0 + sigma2));
}

// The first term falls and the second rises in sigma2, so their max is
// unimodal in log sigma2.
inline double cf_gap_min(double a, int r2, int c)
{
    const auto f = [&](double e) { return cf_gap_at(a, r2, c, std::exp2(e)); };
    const double e = golden_min(f, -20.0, 20.0, 1e-6);
    return std::min({f(e), f(-20.0), f(20.0)});
}

inline void require_split(const std::optional<std::pair<int, int>> &split, int total, const char *what)
{
    if (!split)
        throw std::invalid_argument(std::string("theoretical_gap: needs a split of ") + what);
    if (split->first < 1 || split->second < 1 || split->first + split->second != total)
        throw std::invalid_argument(std::string("theoretical_gap: split does not add up to ") + what);
}

} // namespace detail

/// Gap ceiling in bits (additive kinds) or as a ratio (multiplicative kinds).
/// CF_ADDITIVE_SIGMA and CF_KOLTE evaluate at `sigma2` when given and are
/// minimized over it otherwise. SFD_NPDF and SFD_CF take the split
/// (t1', t1''); RFD_CF takes (r3', r3'').
inline double theoretical_gap(GapBoundKind kind, const AntennaConfig &c, std::optional<double> sigma2 = std::nullopt,
                              std::optional<std::pair<int, int>> split = std::nullopt)
{
    c.validate();
    if (sigma2 && !(*sigma2 > 0.0 && std::isfinite(*sigma2)))
        throw std::invalid_argument("theoretical_gap: sigma2 must be positive and finite");
    const int mac = std::min(c.t1 + c.t2, c.r3);
    const int bc = std::min(c.t1, c.r2 + c.r3);
    switch (kind)
    {
    case GapBoundKind::PDF_ADDITIVE:
    case GapBoundKind::RFD_PDF:
        return std::min(c.t1, c.r2);
    case GapBoundKind::NPDF_ADDITIVE:
        return std::max(std::min(c.t1, c.r2), mac);
    case GapBoundKind::CF_ADDITIVE:
        return mac + c.r2;
    case GapBoundKind::CF_ADDITIVE_SIGMA:
        return sigma2 ? detail::cf_gap_at(mac, c.r2, bc, *sigma2) : detail::cf_gap_min(mac, c.r2, bc);
    case GapBoundKind::CF_KOLTE: {
        const double a = mac * std::log2(1.0 + static_cast<double>(c.t1 + c.t2) / mac);
        return sigma2 ? detail::cf_gap_at(a, c.r2, bc, *sigma2) : detail::cf_gap_min(a, c.r2, bc);
    }
    case GapBoundKind::MULTIPLICATIVE_PDF:
    case GapBoundKind::MULTIPLICATIVE_NPDF:
    case GapBoundKind::MULTIPLICATIVE_DF_CF:
        return 2.0;
    case GapBoundKind::SFD_NPDF:
        detail::require_split(split, c.t1, "t1");
        return std::min(split->first + c.t2, c.r3);
    case GapBoundKind::SFD_CF:
        detail::require_split(split, c.t1, "t1");
        return std::min(split->first + c.t2, c.r3) + c.r2;
    case GapBoundKind::RFD_CF:
        detail::require_split(split, c.r3, "r3");
        return std::max(std::min(c.t1, c.r2 + split->first), c.r2);
    }
    throw std::invalid_argument("theoretical_gap: unknown kind");
}

/// The six bounds of one Monte Carlo point, in this order.
inline constexpr std::array<BoundKind, 6> gap_bounds{BoundKind::CS,   BoundKind::DF,   BoundKind::DT,
                                                     BoundKind::PDF,  BoundKind::NPDF, BoundKind::CF};

struct GapRow
{
    int channel_id = 0;
    double snr_db = 0.0;
    BoundKind bound = BoundKind::CS;
    double value_bits = 0.0;
    std::optional<CompressionNoise> sigma2_used;
    double certificate_gap_bits = 0.0;
    bool flagged = false;
};

struct GapAggregate
{
    double snr_db = 0.0;
    std::string metric; // CS-PDF, CS-NPDF, CS-CF, CS/PDF, CS/NPDF, CS/max(DF,CF)
    double max = 0.0;
    double avg = 0.0;
    int count = 0;
};

struct GapReport
{
    std::vector<GapRow> rows; // ordered by (channel_id, snr_db, bound)
    std::vector<GapAggregate> aggregates;
    int points = 0;
    int flagged_points = 0;  // excluded from every aggregate
    int low_rate_points = 0; // CS <= 1e-6, excluded from ratio aggregates

    std::optional<GapAggregate> find(double snr_db, const std::string &metric) const
    {
        for (const auto &a : aggregates)
            if (a.snr_db == snr_db && a.metric == metric)
                return a;
        return std::nullopt;
    }

    /// Largest value of a metric over every SNR, or nullopt if never measured.
    std::optional<double> overall_max(const std::string &metric) const
    {
        std::optional<double> m;
        for (const auto &a : aggregates)
            if (a.metric == metric)
                m = m ? std::max(*m, a.max) : a.max;
        return m;
    }
};

inline constexpr double low_rate_bits = 1e-6;

namespace detail
{

inline std::vector<GapRow> gap_point(const ChannelMatrices &ch, int id, double snr_db, const SolverConfig &cfg)
{
    BoundSuite suite(ch, PowerConstraint::from_db(snr_db).P, cfg);
    std::vector<GapRow> rows;
    for (BoundKind k : gap_bounds)
    {
        const BoundResult r = suite.bound(k);
        rows.push_back({id, snr_db, k, r.value_bits, r.sigma2_used, r.certificate_gap_bits, r.flagged});
    }
    return rows;
}

// Runs f(i) for i in [0, n) on up to `threads` workers.
inline void parallel_for(int n, int threads, const auto &f)
{
    threads = std::clamp(threads, 1, std::max(n, 1));
    if (threads == 1)
    {
        for (int i = 0; i < n; ++i)
            f(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (int i = next++; i < n && !failed; i = next++)
            {
                try
                {
                    f(i);
                }
                catch (...)
                {
                    if (!failed.exchange(true))
                        error = std::current_exception();
                }
            }
        });
    for (auto &th : pool)
        th.join();
    if (error)
        std::rethrow_exception(error);
}

} // namespace detail

/// Every (channel, SNR) point runs the six bounds; channel i is
/// random_channel(config, seed, i) and P = 10^(snr_db / 10). The report does
/// not depend on `threads`.
inline GapReport montecarlo_gaps(const AntennaConfig &config, int n_channels, const std::vector<double> &snr_db_grid,
                                 std::uint64_t seed, const SolverConfig &cfg = {}, int threads = 1)
{
    config.validate();
    cfg.validate();
    if (n_channels < 0)
        throw std::invalid_argument("montecarlo_gaps: n_channels must be >= 0");
    const int n_snr = static_cast<int>(snr_db_grid.size());
    std::vector<std::vector<GapRow>> points(static_cast<std::size_t>(n_channels) * n_snr);
    detail::parallel_for(static_cast<int>(points.size()), threads, [&](int i) {
        const int ch = i / n_snr;
        const ChannelMatrices g = random_channel(config, seed, static_cast<std::uint64_t>(ch));
        points[static_cast<std::size_t>(i)] = detail::gap_point(g, ch, snr_db_grid[static_cast<std::size_t>(i % n_snr)], cfg);
    });

    GapReport rep;
    struct Acc
    {
        double max = -std::numeric_limits<double>::infinity();
        double sum = 0.0;
        int count = 0;
        void add(double v)
        {
            max = std::max(max, v);
            sum += v;
            ++count;
        }
    };
    static const std::array<const char *, 6> metrics{"CS-PDF", "CS-NPDF", "CS-CF", "CS/PDF", "CS/NPDF", "CS/max(DF,CF)"};
    std::vector<std::array<Acc, 6>> acc(static_cast<std::size_t>(n_snr));
    for (std::size_t i = 0; i < points.size(); ++i)
    {
        const auto &p = points[i];
        rep.rows.insert(rep.rows.end(), p.begin(), p.end());
        ++rep.points;
        if (std::any_of(p.begin(), p.end(), [](const GapRow &r) { return r.flagged; }))
        {
            ++rep.flagged_points;
            continue;
        }
        const double cs = p[0].value_bits, df = p[1].value_bits, pdf = p[3].value_bits, npdf = p[4].value_bits,
                     cf = p[5].value_bits;
        auto &a = acc[i % static_cast<std::size_t>(n_snr)];
        a[0].add(cs - pdf);
        a[1].add(cs - npdf);
        a[2].add(cs - cf);
        if (cs <= low_rate_bits)
        {
            ++rep.low_rate_points;
            continue;
        }
        a[3].add(cs / pdf);
        a[4].add(cs / npdf);
        a[5].add(cs / std::max(df, cf));
    }
    for (int s = 0; s < n_snr; ++s)
        for (std::size_t m = 0; m < metrics.size(); ++m)
        {
            const Acc &x = acc[static_cast<std::size_t>(s)][m];
            if (x.count > 0)
                rep.aggregates.push_back({snr_db_grid[static_cast<std::size_t>(s)], metrics[m], x.max, x.sum / x.count, x.count});
        }
    return rep;
}

/// G31 = diag(g, 1), G21 = diag(1, g), G32 = diag(g, g).
inline ChannelMatrices separation_channel(double g)
{
    if (!(g > 0.0) || !std::isfinite(g))
        throw std::invalid_argument("separation_channel: g must be positive and finite");
    CMat g31 = CMat::Zero(2, 2), g21 = CMat::Zero(2, 2), g32 = CMat::Zero(2, 2);
    g31(0, 0) = g;
    g31(1, 1) = 1.0;
    g21(0, 0) = 1.0;
    g21(1, 1) = g;
    g32(0, 0) = g;
    g32(1, 1) = g;
    return ChannelMatrices::from_matrices(g21, g31, g32);
}

struct SeparationRow
{
    double g = 0.0;
    double pdf_lower_bits = 0.0;
    double dfdt_upper_bits = 0.0;
    double separation_bits = 0.0;
};

/// Closed-form partial decode-forward lower bound and decode-forward /
/// direct-transmission upper bound on separation_channel(g).
inline std::vector<SeparationRow> separation_curve(const std::vector<double> &g_values, double P)
{
    if (!(P > 0.0) || !std::isfinite(P))
        throw std::invalid_argument("separation_curve: P must be positive and finite");
    std::vector<SeparationRow> rows;
    for (double g : g_values)
    {
        if (!(g > 0.0) || !std::isfinite(g))
            throw std::invalid_argument("separation_curve: g must be positive and finite");
        const double g2 = g * g;
        const double half = 1.0 + (1.0 + g2) * P / 2.0;
        SeparationRow r;
        r.g = g;
        r.pdf_lower_bits = std::min(std::log2((1.0 + g2 * P) * half), 2.0 * std::log2(half) - 2.0);
        r.dfdt_upper_bits = std::log2((1.0 + P) * (1.0 + g2 * P));
        r.separation_bits = r.pdf_lower_bits - r.dfdt_upper_bits;
        rows.push_back(r);
    }
    return rows;
}

} // namespace relaycap
