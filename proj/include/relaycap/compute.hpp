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

#include "relaycap/bounds.hpp"
#include "relaycap/channel.hpp"
#include "relaycap/optimizer.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace relaycap
{

enum class BoundKind
{
    CS,
    DF,
    DT,
    PDF,
    NPDF,
    CF,
    SFD_CAP,
    SFD_CF,
    RFD_CS,
    RFD_PDF,
    RFD_CF
};

inline const char *to_string(BoundKind k)
{
    switch (k)
    {
    case BoundKind::CS:
        return "CS";
    case BoundKind::DF:
        return "DF";
    case BoundKind::DT:
        return "DT";
    case BoundKind::PDF:
        return "PDF";
    case BoundKind::NPDF:
        return "NPDF";
    case BoundKind::CF:
        return "CF";
    case BoundKind::SFD_CAP:
        return "SFD_CAP";
    case BoundKind::SFD_CF:
        return "SFD_CF";
    case BoundKind::RFD_CS:
        return "RFD_CS";
    case BoundKind::RFD_PDF:
        return "RFD_PDF";
    case BoundKind::RFD_CF:
        return "RFD_CF";
    }
    return "?";
}

inline BoundKind parse_bound_kind(const std::string &s)
{
    for (int i = 0; i <= static_cast<int>(BoundKind::RFD_CF); ++i)
        if (s == to_string(static_cast<BoundKind>(i)))
            return static_cast<BoundKind>(i);
    throw std::invalid_argument("unknown bound \"" + s + "\"");
}

inline bool is_half_duplex(BoundKind k)
{
    return k >= BoundKind::SFD_CAP;
}

struct BoundResult
{
    BoundKind kind = BoundKind::CS;
    double value_bits = 0.0;
    CMat achieving_K;  // (t1 + t2) square, sender coordinates first
    int t1 = 0;
    std::optional<CompressionNoise> sigma2_used;
    double upper_certificate_bits = 0.0;
    double certificate_gap_bits = 0.0;
    bool flagged = false;
    std::string note;

    JointCovariance covariance() const { return JointCovariance::from_joint(achieving_K, t1); }
};

/// Term pairs for every bound. A coherent pair is laid out for
/// FeasibleSet::coherent: S over (X1, X2), then the lifted Q of X1 given X2.
/// Independent pairs use (X1, X2) directly. SFD splits X1 = (X1', X1''),
/// t1' first.
namespace objectives
{

inline IndexList all(int n) { return FeasibleSet::range(0, n); }

// parts of K = S + diag(Q, 0) over `rows`, where `lifted` lists the Q index
// of each row or -1
inline LogDetTerm lifted_term(CMat G, IndexList rows, IndexList lifted)
{
    return {std::move(G), {std::move(rows), std::move(lifted)}};
}

inline IndexList aux_then_pad(int first, int count, int pad)
{
    IndexList r = FeasibleSet::range(first, first + count);
    r.insert(r.end(), static_cast<std::size_t>(pad), -1);
    return r;
}

inline LogDetTerm joint_term(const ChannelMatrices &ch, bool coherent)
{
    const int t1 = ch.config().t1, n = t1 + ch.config().t2;
    if (!coherent)
        return LogDetTerm::on(ch.g3star(), all(n));
    return lifted_term(ch.g3star(), all(n), aux_then_pad(n, t1, n - t1));
}

// log|I + G K_{1|2} G^H| when coherent, log|I + G K1 G^H| otherwise
inline LogDetTerm sender_term(const ChannelMatrices &ch, CMat G, bool coherent)
{
    const int t1 = ch.config().t1, n = t1 + ch.config().t2;
    return LogDetTerm::on(std::move(G), coherent ? FeasibleSet::range(n, n + t1) : all(t1));
}

inline TermPair cutset(const ChannelMatrices &ch)
{
    TermPair p;
    p.a.terms.push_back(joint_term(ch, true));
    p.b.terms.push_back(sender_term(ch, ch.gstar1(), true));
    return p;
}

/// Decode-forward; `coherent` = false is laid out for independent inputs.
inline TermPair df(const ChannelMatrices &ch, bool coherent = true)
{
    TermPair p;
    p.a.terms.push_back(joint_term(ch, coherent));
    p.b.terms.push_back(sender_term(ch, ch.g21(), coherent));
    return p;
}

/// Direct transmission over the sender coordinates only.
inline TermPair dt(const ChannelMatrices &ch)
{
    TermPair p;
    p.a.terms.push_back(LogDetTerm::on(ch.g31(), all(ch.config().t1)));
    p.b = p.a;
    return p;
}

inline TermPair pdf_relaxed(const ChannelMatrices &ch, bool coherent = true)
{
    TermPair p;
    p.a.terms.push_back(joint_term(ch, coherent));
    p.b.terms.push_back(sender_term(ch, ch.gstar1(), coherent));
    p.b.offset = -std::min(ch.config().t1, ch.config().r2);
    return p;
}

/// Independent inputs.
inline TermPair cf(const ChannelMatrices &ch, const CompressionNoise &noise)
{
    detail::require_cf_noise(noise, "objectives::cf");
    TermPair p;
    p.a.terms.push_back(joint_term(ch, false));
    p.a.offset = -detail::cf_penalty(noise, ch.config().r2);
    p.b.terms.push_back(LogDetTerm::on(
        detail::vstack(ch.g21() * std::sqrt(detail::cf_relay_weight(noise)), ch.g31()), all(ch.config().t1)));
    return p;
}

inline IndexList sfd_mac(const HalfDuplexChannel &hd)
{
    IndexList mac = FeasibleSet::range(0, hd.split.first);
    for (int i = hd.t1(); i < hd.t1() + hd.t2(); ++i)
        mac.push_back(i);
    return mac;
}

/// Laid out for FeasibleSet::sender_split(..., coherent = true).
inline TermPair sfd_cap(const HalfDuplexChannel &hd)
{
    const int ta = hd.split.first, t1 = hd.t1(), n = t1 + hd.t2();
    TermPair p;
    p.a.terms.push_back(lifted_term(detail::hstack(hd.G31, hd.G32), sfd_mac(hd), aux_then_pad(n, ta, hd.t2())));
    p.b.terms.push_back(LogDetTerm::on(hd.G21, FeasibleSet::range(ta, t1)));
    p.b.terms.push_back(LogDetTerm::on(hd.G31, FeasibleSet::range(n, n + ta)));
    return p;
}

inline TermPair sfd_cf(const HalfDuplexChannel &hd, const CompressionNoise &noise)
{
    detail::require_cf_noise(noise, "objectives::sfd_cf");
    const int ta = hd.split.first, t1 = hd.t1();
    TermPair p;
    p.a.terms.push_back(LogDetTerm::on(detail::hstack(hd.G31, hd.G32), sfd_mac(hd)));
    p.a.offset = -detail::cf_penalty(noise, hd.r2());
    p.b.terms.push_back(LogDetTerm::on(hd.G31, FeasibleSet::range(0, ta)));
    p.b.terms.push_back(
        LogDetTerm::on(hd.G21 * std::sqrt(detail::cf_relay_weight(noise)), FeasibleSet::range(ta, t1)));
    return p;
}

inline TermPair rfd_cutset(const HalfDuplexChannel &hd)
{
    const int t1 = hd.t1(), t2 = hd.t2();
    TermPair p;
    p.a.terms.push_back(LogDetTerm::on(hd.G31, all(t1)));
    p.a.terms.push_back(LogDetTerm::on(hd.G32, FeasibleSet::range(t1, t1 + t2)));
    p.b.terms.push_back(LogDetTerm::on(detail::vstack(hd.G21, hd.G31), all(t1)));
    return p;
}

inline TermPair rfd_cf(const HalfDuplexChannel &hd, const CompressionNoise &noise)
{
    detail::require_cf_noise(noise, "objectives::rfd_cf");
    TermPair p = rfd_cutset(hd);
    p.a.offset = -detail::cf_penalty(noise, hd.r2());
    p.b.terms.front().G = detail::vstack(hd.G21 * std::sqrt(detail::cf_relay_weight(noise)), hd.G31);
    return p;
}

} // namespace objectives

namespace detail
{

inline BoundResult from_maxmin(BoundKind kind, const MaxMinResult &m, int t1)
{
    BoundResult r;
    r.kind = kind;
    r.value_bits = std::max(0.0, m.value);
    r.achieving_K = m.K;
    r.t1 = t1;
    r.upper_certificate_bits = std::max(m.upper, r.value_bits);
    r.certificate_gap_bits = r.upper_certificate_bits - r.value_bits;
    r.flagged = m.flagged;
    r.note = m.note;
    return r;
}

inline BoundResult zero_bound(BoundKind kind, int t1, int t2)
{
    BoundResult r;
    r.kind = kind;
    r.achieving_K = CMat::Zero(t1 + t2, t1 + t2);
    r.t1 = t1;
    return r;
}

/// Sender-only covariance padded with a zero relay block.
inline CMat pad_relay(const CMat &K1, int t2)
{
    return block_diag(K1, CMat::Zero(t2, t2));
}

struct Scored
{
    double value = -std::numeric_limits<double>::infinity();
    std::size_t candidate = 0;
    std::optional<CompressionNoise> noise;
};

// Best (candidate, sigma2) pair. Ties within 1e-9 go to the smaller sigma2;
// the grid is walked in ascending order so the first hit wins.
inline Scored best_over_grid(std::vector<CompressionNoise> grid, std::size_t n_candidates, const auto &score)
{
    std::sort(grid.begin(), grid.end());
    std::vector<Scored> per_noise;
    double top = -std::numeric_limits<double>::infinity();
    for (const auto &noise : grid)
    {
        Scored s;
        s.noise = noise;
        for (std::size_t c = 0; c < n_candidates; ++c)
        {
            const double v = score(c, noise);
            if (v > s.value)
            {
                s.value = v;
                s.candidate = c;
            }
        }
        top = std::max(top, s.value);
        per_noise.push_back(s);
    }
    for (const auto &s : per_noise)
        if (s.value >= top - 1e-9)
            return s;
    return {};
}

inline std::vector<CompressionNoise> cf_grid(const std::vector<CompressionNoise> &grid)
{
    std::vector<CompressionNoise> out;
    for (const auto &n : grid)
        if (!n.is_zero())
            out.push_back(n);
    if (std::none_of(out.begin(), out.end(), [](const CompressionNoise &n) { return n.is_infinite(); }))
        out.push_back(CompressionNoise::infinite());
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<CompressionNoise> pdf_grid(const std::vector<CompressionNoise> &grid)
{
    std::vector<CompressionNoise> out = grid;
    // the DF and DT endpoints are always part of the family
    if (std::none_of(out.begin(), out.end(), [](const CompressionNoise &n) { return n.is_zero(); }))
        out.push_back(CompressionNoise::zero());
    if (std::none_of(out.begin(), out.end(), [](const CompressionNoise &n) { return n.is_infinite(); }))
        out.push_back(CompressionNoise::infinite());
    std::sort(out.begin(), out.end());
    return out;
}

/// Max over the sigma2 grid of a max-min family; ties go to the smaller sigma2.
/// The certificate is the largest per-sigma2 upper bound.
inline BoundResult grid_maxmin(BoundKind kind, const std::vector<CompressionNoise> &grid, int t1,
                               const auto &make_objective, const FeasibleSet &set, const SolverConfig &cfg)
{
    BoundResult best;
    best.kind = kind;
    best.value_bits = -std::numeric_limits<double>::infinity();
    double upper = -std::numeric_limits<double>::infinity();
    bool flagged = false;
    std::string note;
    std::optional<CMat> warm;
    for (const auto &noise : grid)
    {
        const MaxMinResult m = maxmin(make_objective(noise), set, cfg, warm ? &*warm : nullptr);
        warm = m.V;
        upper = std::max(upper, m.upper);
        if (m.flagged)
        {
            flagged = true;
            note = "sigma2 = " + noise.to_string() + ": " + m.note;
        }
        if (m.value > best.value_bits + 1e-9)
        {
            best.value_bits = m.value;
            best.achieving_K = m.K;
            best.sigma2_used = noise;
        }
    }
    best.value_bits = std::max(0.0, best.value_bits);
    best.t1 = t1;
    best.upper_certificate_bits = std::max(upper, best.value_bits);
    best.certificate_gap_bits = best.upper_certificate_bits - best.value_bits;
    best.flagged = flagged;
    best.note = note;
    return best;
}

} // namespace detail

/// All full-duplex bounds for one (channel, P). Shared solves are memoized,
/// so asking for several kinds costs no more than the union of their solves.
class BoundSuite
{
  public:
    BoundSuite(ChannelMatrices ch, double power, SolverConfig cfg = {})
        : ch_(std::move(ch)), power_(PowerConstraint(power).P), cfg_(std::move(cfg))
    {
        cfg_.validate();
    }

    const ChannelMatrices &channel() const { return ch_; }
    double power() const { return power_; }

    BoundResult bound(BoundKind kind)
    {
        if (is_half_duplex(kind))
            throw std::invalid_argument(std::string("BoundSuite: ") + to_string(kind) + " needs a half-duplex channel");
        auto it = cache_.find(kind);
        if (it != cache_.end())
            return it->second;
        BoundResult r = power_ == 0.0 ? detail::zero_bound(kind, t1(), t2()) : compute(kind);
        cache_.emplace(kind, r);
        return r;
    }

  private:
    int t1() const { return ch_.config().t1; }
    int t2() const { return ch_.config().t2; }

    FeasibleSet coherent_set() const { return FeasibleSet::coherent(t1(), t2(), power_); }
    FeasibleSet noncoherent_set() const { return FeasibleSet::noncoherent(t1(), t2(), power_); }

    const MaxMinResult &solve(const std::string &key, const TermPair &obj, const FeasibleSet &set)
    {
        auto it = solves_.find(key);
        if (it == solves_.end())
            it = solves_.emplace(key, maxmin(obj, set, cfg_)).first;
        return it->second;
    }

    const MaxMinResult &cs() { return solve("cs", objectives::cutset(ch_), coherent_set()); }
    const MaxMinResult &df() { return solve("df", objectives::df(ch_), coherent_set()); }
    const MaxMinResult &df_nc() { return solve("df_nc", objectives::df(ch_, false), noncoherent_set()); }
    const MaxMinResult &dt() { return solve("dt", objectives::dt(ch_), FeasibleSet::sender_only(t1(), power_)); }
    const MaxMinResult &pdf_rel() { return solve("pdf_rel", objectives::pdf_relaxed(ch_), coherent_set()); }
    const MaxMinResult &pdf_rel_nc()
    {
        return solve("pdf_rel_nc", objectives::pdf_relaxed(ch_, false), noncoherent_set());
    }

    CMat dt_embedded() { return detail::pad_relay(dt().K, t2()); }

    // Lower bounds on rates that are not solved to certified optimality are
    // certified from above by the cutset bound.
    void attach_cutset_certificate(BoundResult &r)
    {
        const MaxMinResult &c = cs();
        r.upper_certificate_bits = std::max(c.upper, r.value_bits);
        r.certificate_gap_bits = r.upper_certificate_bits - r.value_bits;
    }

    BoundResult rescored(BoundKind kind, const std::vector<const MaxMinResult *> &sources, std::vector<CMat> candidates,
                         bool noncoherent)
    {
        const std::vector<CompressionNoise> grid = detail::pdf_grid(cfg_.sigma2_grid);
        std::vector<std::optional<JointCovariance>> joint;
        for (const auto &k : candidates)
            joint.emplace_back(JointCovariance::from_joint(k, t1()));
        const auto score = [&](std::size_t c, const CompressionNoise &noise) {
            const JointCovariance &K = *joint[c];
            if (noncoherent)
                return npdf_terms(ch_, PsdMatrix(K.k1()), PsdMatrix(K.k2()), noise).value;
            return pdf_terms(ch_, K, noise).value;
        };
        const detail::Scored s = detail::best_over_grid(grid, candidates.size(), score);
        BoundResult r;
        r.kind = kind;
        r.t1 = t1();
        r.value_bits = std::max(0.0, s.value);
        r.achieving_K = candidates[s.candidate];
        r.sigma2_used = s.noise;
        for (const auto *m : sources)
            if (m->flagged)
            {
                r.flagged = true;
                r.note = m->note;
            }
        attach_cutset_certificate(r);
        return r;
    }

    BoundResult compute(BoundKind kind)
    {
        switch (kind)
        {
        case BoundKind::CS:
            return detail::from_maxmin(kind, cs(), t1());
        case BoundKind::DF:
            return detail::from_maxmin(kind, df(), t1());
        case BoundKind::DT: {
            BoundResult r = detail::from_maxmin(kind, dt(), t1());
            r.achieving_K = dt_embedded();
            return r;
        }
        case BoundKind::PDF: {
            // The relaxed surrogate, both DF optima and the DT optimum are
            // re-scored with the exact rate over the whole sigma2 family.
            const auto &a = pdf_rel();
            const auto &b = df();
            const auto &c = pdf_rel_nc();
            const auto &d = df_nc();
            const auto &e = dt();
            return rescored(kind, {&a, &b, &c, &d, &e}, {a.K, b.K, c.K, d.K, dt_embedded()}, false);
        }
        case BoundKind::NPDF: {
            const auto &c = pdf_rel_nc();
            const auto &d = df_nc();
            const auto &e = dt();
            return rescored(kind, {&c, &d, &e}, {c.K, d.K, dt_embedded()}, true);
        }
        case BoundKind::CF: {
            BoundResult r = detail::grid_maxmin(
                kind, detail::cf_grid(cfg_.sigma2_grid), t1(),
                [this](const CompressionNoise &n) { return objectives::cf(ch_, n); }, noncoherent_set(), cfg_);
            // DT endpoint: sigma2 = INFINITE with the relay silent
            const CMat kdt = dt_embedded();
            const JointCovariance j = JointCovariance::from_joint(kdt, t1());
            const double v = cf_terms(ch_, PsdMatrix(j.k1()), PsdMatrix(j.k2()), CompressionNoise::infinite()).value;
            if (v > r.value_bits + 1e-9)
            {
                r.value_bits = v;
                r.achieving_K = kdt;
                r.sigma2_used = CompressionNoise::infinite();
                r.upper_certificate_bits = std::max(r.upper_certificate_bits, v);
                r.certificate_gap_bits = r.upper_certificate_bits - r.value_bits;
            }
            return r;
        }
        default:
            break;
        }
        throw std::invalid_argument("BoundSuite: unsupported kind");
    }

    ChannelMatrices ch_;
    double power_;
    SolverConfig cfg_;
    std::map<std::string, MaxMinResult> solves_;
    std::map<BoundKind, BoundResult> cache_;
};

/// CS on the embedded full-duplex channel next to the SFD optimum, whose
/// exact partial decode-forward rate (noiseless auxiliary) is reported as pdf_bits.
struct SfdCheck
{
    double cs_bits = 0.0;
    double pdf_bits = 0.0;
    double sfd_bits = 0.0;
    bool flagged = false;
    double difference() const { return cs_bits - pdf_bits; }
};

/// RFD partial decode-forward with coherent and with independent inputs.
struct RfdCheck
{
    double pdf_bits = 0.0;
    double npdf_bits = 0.0;
    bool flagged = false;
    double difference() const { return pdf_bits - npdf_bits; }
};

class HalfDuplexSuite
{
  public:
    HalfDuplexSuite(HalfDuplexChannel hd, double power, SolverConfig cfg = {})
        : hd_(std::move(hd)), power_(PowerConstraint(power).P), cfg_(std::move(cfg)), embedded_(embed(hd_), power_, cfg_)
    {
        hd_.validate();
        cfg_.validate();
    }

    const HalfDuplexChannel &channel() const { return hd_; }

    BoundResult bound(BoundKind kind)
    {
        if (!is_half_duplex(kind))
            throw std::invalid_argument(std::string("HalfDuplexSuite: ") + to_string(kind) + " is a full-duplex bound");
        const bool sfd_kind = kind == BoundKind::SFD_CAP || kind == BoundKind::SFD_CF;
        if (sfd_kind != (hd_.mode == HalfDuplexMode::SFD))
            throw std::invalid_argument(std::string("HalfDuplexSuite: ") + to_string(kind) + " does not apply to " +
                                        to_string(hd_.mode) + " channels");
        auto it = cache_.find(kind);
        if (it != cache_.end())
            return it->second;
        BoundResult r = power_ == 0.0 ? detail::zero_bound(kind, hd_.t1(), hd_.t2()) : compute(kind);
        cache_.emplace(kind, r);
        return r;
    }

    SfdCheck sfd_check()
    {
        if (hd_.mode != HalfDuplexMode::SFD)
            throw std::invalid_argument("sfd_check: channel is not in SFD mode");
        SfdCheck c;
        const BoundResult cap = bound(BoundKind::SFD_CAP);
        const BoundResult cs = embedded_.bound(BoundKind::CS);
        c.sfd_bits = cap.value_bits;
        c.cs_bits = cs.value_bits;
        c.pdf_bits = std::max(
            0.0, pdf_terms(embedded_.channel(), cap.covariance(), CompressionNoise::zero()).value);
        c.flagged = cap.flagged || cs.flagged;
        return c;
    }

    RfdCheck rfd_check()
    {
        if (hd_.mode != HalfDuplexMode::RFD)
            throw std::invalid_argument("rfd_check: channel is not in RFD mode");
        const BoundResult p = embedded_.bound(BoundKind::PDF);
        const BoundResult n = embedded_.bound(BoundKind::NPDF);
        return {p.value_bits, n.value_bits, p.flagged || n.flagged};
    }

  private:
    BoundResult compute(BoundKind kind)
    {
        const int t1 = hd_.t1(), t2 = hd_.t2();
        switch (kind)
        {
        case BoundKind::SFD_CAP: {
            const auto set = FeasibleSet::sender_split(hd_.split.first, hd_.split.second, t2, power_, true);
            return detail::from_maxmin(kind, maxmin(objectives::sfd_cap(hd_), set, cfg_), t1);
        }
        case BoundKind::SFD_CF: {
            const auto set = FeasibleSet::sender_split(hd_.split.first, hd_.split.second, t2, power_, false);
            BoundResult r = detail::grid_maxmin(
                kind, detail::cf_grid(cfg_.sigma2_grid), t1,
                [this](const CompressionNoise &n) { return objectives::sfd_cf(hd_, n); }, set, cfg_);
            return r;
        }
        case BoundKind::RFD_CS:
            return detail::from_maxmin(kind, maxmin(objectives::rfd_cutset(hd_), FeasibleSet::noncoherent(t1, t2, power_), cfg_),
                                       t1);
        case BoundKind::RFD_PDF: {
            BoundResult r = embedded_.bound(BoundKind::PDF);
            r.kind = kind;
            return r;
        }
        case BoundKind::RFD_CF:
            return detail::grid_maxmin(
                kind, detail::cf_grid(cfg_.sigma2_grid), t1,
                [this](const CompressionNoise &n) { return objectives::rfd_cf(hd_, n); },
                FeasibleSet::noncoherent(t1, t2, power_), cfg_);
        default:
            break;
        }
        throw std::invalid_argument("HalfDuplexSuite: unsupported kind");
    }

    HalfDuplexChannel hd_;
    double power_;
    SolverConfig cfg_;
    BoundSuite embedded_;
    std::map<BoundKind, BoundResult> cache_;
};

inline BoundResult compute_bound(BoundKind kind, const ChannelMatrices &ch, double power, const SolverConfig &cfg = {})
{
    return BoundSuite(ch, power, cfg).bound(kind);
}

inline BoundResult compute_bound(BoundKind kind, const HalfDuplexChannel &hd, double power,
                                 const SolverConfig &cfg = {})
{
    return HalfDuplexSuite(hd, power, cfg).bound(kind);
}

} // namespace relaycap
