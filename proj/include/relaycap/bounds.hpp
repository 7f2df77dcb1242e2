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

// Closed-form cut/rate terms of every bound at a fixed Gaussian input
// covariance. Each evaluator returns both terms of its min{., .} so the
// optimizer can weight them; `value` is their minimum.

#include "relaycap/channel.hpp"
#include "relaycap/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

namespace relaycap
{

/// Variance of the auxiliary noise in U = G21 X1 + Z2' (partial
/// decode-forward) or Y2hat = Y2 + Z2hat (compress-forward).
/// ZERO means a noiseless auxiliary, INFINITE an uninformative one.
class CompressionNoise
{
  public:
    enum class Kind
    {
        Zero,
        Finite,
        Infinite
    };

    static CompressionNoise zero() { return CompressionNoise(Kind::Zero, 0.0); }
    static CompressionNoise infinite() { return CompressionNoise(Kind::Infinite, std::numeric_limits<double>::infinity()); }
    static CompressionNoise finite(double sigma2)
    {
        if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
            throw std::invalid_argument("CompressionNoise: finite sigma2 must be in (0, inf)");
        return CompressionNoise(Kind::Finite, sigma2);
    }

    Kind kind() const { return kind_; }
    bool is_zero() const { return kind_ == Kind::Zero; }
    bool is_infinite() const { return kind_ == Kind::Infinite; }
    bool is_finite() const { return kind_ == Kind::Finite; }

    /// 0, the finite variance, or +inf.
    double sigma2() const { return value_; }

    std::string to_string() const
    {
        if (is_zero())
            return "0";
        if (is_infinite())
            return "inf";
        std::ostringstream os;
        os.precision(9);
        os << value_;
        return os.str();
    }

    // ZERO < finite (ascending) < INFINITE
    bool operator<(const CompressionNoise &o) const { return value_ < o.value_; }
    bool operator==(const CompressionNoise &o) const { return kind_ == o.kind_ && value_ == o.value_; }

  private:
    CompressionNoise(Kind k, double v) : kind_(k), value_(v) {}
    Kind kind_;
    double value_;
};

struct CutTerms
{
    double term_a = 0.0;
    double term_b = 0.0;
    double value = 0.0;

    static CutTerms of(double a, double b) { return {a, b, std::min(a, b)}; }
};

namespace detail
{

inline void expect_cov_shape(const ChannelMatrices &ch, const JointCovariance &K, const char *who)
{
    if (K.t1() != ch.config().t1 || K.t2() != ch.config().t2)
        throw std::invalid_argument(std::string(who) + ": covariance is " + std::to_string(K.t1()) + "+" +
                                    std::to_string(K.t2()) + " but channel has t1 = " + std::to_string(ch.config().t1) +
                                    ", t2 = " + std::to_string(ch.config().t2));
}

inline void expect_dim(Eigen::Index got, Eigen::Index want, const char *who, const char *what)
{
    if (got != want)
        throw std::invalid_argument(std::string(who) + ": " + what + " has dimension " + std::to_string(got) +
                                    ", expected " + std::to_string(want));
}

inline double ld(const CMat &G, const CMat &X)
{
    return logdet_unchecked(G, X);
}

/// Cov(X1 | U, X2) for U = G21 X1 + Z2', Z2' ~ CN(0, sigma2 I), given
/// Cov(X1 | X2) = Q:  Q - Q G21^H (sigma2 I + G21 Q G21^H)^+ G21 Q.
inline CMat conditional_given_aux(const CMat &Q, const CMat &G21, const CompressionNoise &noise)
{
    if (noise.is_infinite() || G21.rows() == 0)
        return Q;
    const CMat qg = Q * G21.adjoint();
    CMat s = G21 * qg;
    CMat inv;
    if (noise.is_zero())
        inv = pinv_hermitian(s);
    else
    {
        s.diagonal().array() += noise.sigma2();
        inv = hermitian_part(s).llt().solve(CMat::Identity(s.rows(), s.cols()));
    }
    return hermitian_part(Q - qg * inv * qg.adjoint());
}

inline double cf_penalty(const CompressionNoise &noise, int r2)
{
    if (noise.is_infinite())
        return 0.0;
    return r2 * std::log2(1.0 + 1.0 / noise.sigma2());
}

/// 1 / (1 + sigma2), zero at INFINITE.
inline double cf_relay_weight(const CompressionNoise &noise)
{
    return noise.is_infinite() ? 0.0 : 1.0 / (1.0 + noise.sigma2());
}

inline void require_cf_noise(const CompressionNoise &noise, const char *who)
{
    if (noise.is_zero())
        throw std::invalid_argument(std::string(who) +
                                    ": compress-forward needs sigma2 in (0, inf) or INFINITE, got ZERO");
}

} // namespace detail

/// Cutset bound terms: MAC cut log|I + G3* K G3*^H| and broadcast cut
/// log|I + G*1 K_{1|2} G*1^H|.
inline CutTerms cutset_terms(const ChannelMatrices &ch, const JointCovariance &K)
{
    detail::expect_cov_shape(ch, K, "cutset_terms");
    const PsdMatrix q = schur_conditional(K);
    const double a = logdet_id_plus(ch.g3star(), PsdMatrix(K.assembled()));
    const double b = logdet_id_plus(ch.gstar1(), q);
    return CutTerms::of(a, b);
}

/// Broadcast cut through the Gram form log|I_t1 + (G21^H G21 + G31^H G31) K_{1|2}|,
/// evaluated as a Hermitian log-det of I + Q^{1/2} M Q^{1/2}.
inline double cutset_term_b_gram(const ChannelMatrices &ch, const JointCovariance &K)
{
    detail::expect_cov_shape(ch, K, "cutset_term_b_gram");
    const CMat m = ch.g21().adjoint() * ch.g21() + ch.g31().adjoint() * ch.g31();
    const CMat s = detail::psd_sqrt(schur_conditional(K).matrix());
    CMat w = s * m * s;
    w.diagonal().array() += 1.0;
    return detail::log2det_hpd(w);
}

inline double dt_rate(const ChannelMatrices &ch, const PsdMatrix &K1)
{
    detail::expect_dim(K1.dim(), ch.config().t1, "dt_rate", "K1");
    return logdet_id_plus(ch.g31(), K1);
}

inline CutTerms df_terms(const ChannelMatrices &ch, const JointCovariance &K)
{
    detail::expect_cov_shape(ch, K, "df_terms");
    const PsdMatrix q = schur_conditional(K);
    const double a = logdet_id_plus(ch.g3star(), PsdMatrix(K.assembled()));
    const double b = logdet_id_plus(ch.g21(), q);
    return CutTerms::of(a, b);
}

namespace detail
{

// I(U; Y2 | X2) + I(X1; Y3 | X2, U) with Cov(X1 | X2) = Q.
inline double pdf_second_term(const ChannelMatrices &ch, const CMat &Q, const CompressionNoise &noise)
{
    const CMat c = conditional_given_aux(Q, ch.g21(), noise);
    return ld(ch.g21(), Q) + ld(ch.g31(), c) - ld(ch.g21(), c);
}

} // namespace detail

/// Partial decode-forward terms with U = G21 X1 + Z2', Z2' ~ CN(0, sigma2 I).
inline CutTerms pdf_terms(const ChannelMatrices &ch, const JointCovariance &K, const CompressionNoise &noise)
{
    detail::expect_cov_shape(ch, K, "pdf_terms");
    const PsdMatrix q = schur_conditional(K);
    const double a = logdet_id_plus(ch.g3star(), PsdMatrix(K.assembled()));
    return CutTerms::of(a, detail::pdf_second_term(ch, q.matrix(), noise));
}

/// Unit-noise second term written as
/// log|I + (A + B) Q| + log|I + A Q| - log|I + 2 A Q|, A = G21^H G21, B = G31^H G31.
inline double pdf_term_b_unit_noise(const ChannelMatrices &ch, const JointCovariance &K)
{
    detail::expect_cov_shape(ch, K, "pdf_term_b_unit_noise");
    const CMat q = schur_conditional(K).matrix();
    const CMat g21x2 = ch.g21() * std::sqrt(2.0);
    return detail::ld(ch.gstar1(), q) + detail::ld(ch.g21(), q) - detail::ld(g21x2, q);
}

/// Concave surrogate: broadcast cut minus min(t1, r2).
inline CutTerms pdf_terms_relaxed(const ChannelMatrices &ch, const JointCovariance &K)
{
    detail::expect_cov_shape(ch, K, "pdf_terms_relaxed");
    const PsdMatrix q = schur_conditional(K);
    const double a = logdet_id_plus(ch.g3star(), PsdMatrix(K.assembled()));
    const double b = logdet_id_plus(ch.gstar1(), q) - std::min(ch.config().t1, ch.config().r2);
    return CutTerms::of(a, b);
}

/// Noncoherent partial decode-forward: independent X1 ~ CN(0, K1), X2 ~ CN(0, K2).
inline CutTerms npdf_terms(const ChannelMatrices &ch, const PsdMatrix &K1, const PsdMatrix &K2,
                           const CompressionNoise &noise)
{
    detail::expect_dim(K1.dim(), ch.config().t1, "npdf_terms", "K1");
    detail::expect_dim(K2.dim(), ch.config().t2, "npdf_terms", "K2");
    const double a = detail::ld(ch.g3star(), detail::block_diag(K1.matrix(), K2.matrix()));
    return CutTerms::of(a, detail::pdf_second_term(ch, K1.matrix(), noise));
}

/// Compress-forward with Y2hat = Y2 + Z2hat, Z2hat ~ CN(0, sigma2 I).
/// term_a may be negative; it is reported as is.
inline CutTerms cf_terms(const ChannelMatrices &ch, const PsdMatrix &K1, const PsdMatrix &K2,
                         const CompressionNoise &noise)
{
    detail::require_cf_noise(noise, "cf_terms");
    detail::expect_dim(K1.dim(), ch.config().t1, "cf_terms", "K1");
    detail::expect_dim(K2.dim(), ch.config().t2, "cf_terms", "K2");
    const double a = detail::ld(ch.g3star(), detail::block_diag(K1.matrix(), K2.matrix())) -
                     detail::cf_penalty(noise, ch.config().r2);
    const CMat g = detail::vstack(ch.g21() * std::sqrt(detail::cf_relay_weight(noise)), ch.g31());
    return CutTerms::of(a, detail::ld(g, K1.matrix()));
}

/// Sender frequency division: MAC cut over (X1', X2) with cross-covariance
/// K12', and the orthogonal relay link plus the conditional direct link.
inline CutTerms sfd_terms(const HalfDuplexChannel &hd, const PsdMatrix &Kp, const PsdMatrix &Kpp, const PsdMatrix &K2,
                          const CMat &K12p, std::optional<PowerConstraint> power = std::nullopt)
{
    if (hd.mode != HalfDuplexMode::SFD)
        throw std::invalid_argument("sfd_terms: channel is not in SFD mode");
    detail::expect_dim(Kp.dim(), hd.split.first, "sfd_terms", "K1'");
    detail::expect_dim(Kpp.dim(), hd.split.second, "sfd_terms", "K1''");
    detail::expect_dim(K2.dim(), hd.t2(), "sfd_terms", "K2");
    if (K12p.rows() != Kp.dim() || K12p.cols() != K2.dim())
        throw std::invalid_argument("sfd_terms: K12' must be t1' x t2");
    const JointCovariance sub(Kp.matrix(), K12p, K2.matrix()); // throws if not PSD
    if (power && (detail::real_trace(Kp.matrix()) + detail::real_trace(Kpp.matrix()) > power->P + 1e-9 ||
                  detail::real_trace(K2.matrix()) > power->P + 1e-9))
        throw std::invalid_argument("sfd_terms: covariance violates the power budget");
    const double a = detail::ld(detail::hstack(hd.G31, hd.G32), sub.assembled());
    const double b = detail::ld(hd.G21, Kpp.matrix()) + detail::ld(hd.G31, schur_conditional(sub).matrix());
    return CutTerms::of(a, b);
}

inline CutTerms sfd_cf_terms(const HalfDuplexChannel &hd, const PsdMatrix &Kp, const PsdMatrix &Kpp,
                             const PsdMatrix &K2, const CompressionNoise &noise)
{
    if (hd.mode != HalfDuplexMode::SFD)
        throw std::invalid_argument("sfd_cf_terms: channel is not in SFD mode");
    detail::require_cf_noise(noise, "sfd_cf_terms");
    detail::expect_dim(Kp.dim(), hd.split.first, "sfd_cf_terms", "K1'");
    detail::expect_dim(Kpp.dim(), hd.split.second, "sfd_cf_terms", "K1''");
    detail::expect_dim(K2.dim(), hd.t2(), "sfd_cf_terms", "K2");
    const double a = detail::ld(detail::hstack(hd.G31, hd.G32), detail::block_diag(Kp.matrix(), K2.matrix())) -
                     detail::cf_penalty(noise, hd.r2());
    const double b = detail::ld(hd.G31, Kp.matrix()) +
                     detail::ld(hd.G21 * std::sqrt(detail::cf_relay_weight(noise)), Kpp.matrix());
    return CutTerms::of(a, b);
}

/// Receiver frequency division cutset: I(X1; Y3') + I(X2; Y3'') and I(X1; Y2, Y3').
inline CutTerms rfd_cutset_terms(const HalfDuplexChannel &hd, const PsdMatrix &K1, const PsdMatrix &K2)
{
    if (hd.mode != HalfDuplexMode::RFD)
        throw std::invalid_argument("rfd_cutset_terms: channel is not in RFD mode");
    detail::expect_dim(K1.dim(), hd.t1(), "rfd_cutset_terms", "K1");
    detail::expect_dim(K2.dim(), hd.t2(), "rfd_cutset_terms", "K2");
    const double a = detail::ld(hd.G31, K1.matrix()) + detail::ld(hd.G32, K2.matrix());
    const double b = detail::ld(detail::vstack(hd.G21, hd.G31), K1.matrix());
    return CutTerms::of(a, b);
}

inline CutTerms rfd_cf_terms(const HalfDuplexChannel &hd, const PsdMatrix &K1, const PsdMatrix &K2,
                             const CompressionNoise &noise)
{
    if (hd.mode != HalfDuplexMode::RFD)
        throw std::invalid_argument("rfd_cf_terms: channel is not in RFD mode");
    detail::require_cf_noise(noise, "rfd_cf_terms");
    detail::expect_dim(K1.dim(), hd.t1(), "rfd_cf_terms", "K1");
    detail::expect_dim(K2.dim(), hd.t2(), "rfd_cf_terms", "K2");
    const double a = detail::ld(hd.G31, K1.matrix()) + detail::ld(hd.G32, K2.matrix()) -
                     detail::cf_penalty(noise, hd.r2());
    const CMat g = detail::vstack(hd.G21 * std::sqrt(detail::cf_relay_weight(noise)), hd.G31);
    return CutTerms::of(a, detail::ld(g, K1.matrix()));
}

} // namespace relaycap
