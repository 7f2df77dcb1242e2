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

// Complex-matrix primitives shared by the bound evaluators and the optimizer.
// Every rate is in bits; every log-det goes through a Hermitian factorization.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace relaycap
{

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;

inline constexpr double hermitian_tol = 1e-12;
inline constexpr double psd_tol = 1e-9;
inline constexpr double pinv_rel_threshold = 1e-10;

namespace detail
{

inline double max_abs(const CMat &m)
{
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline CMat hermitian_part(const CMat &m)
{
    return (m + m.adjoint()) * 0.5;
}

inline bool is_hermitian(const CMat &m, double tol = hermitian_tol)
{
    if (m.rows() != m.cols())
        return false;
    // entrywise tolerance, scaled for matrices with large entries
    const double scale = std::max(1.0, max_abs(m));
    return m.size() == 0 || (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

// Eigen-decomposition of the Hermitian part. Eigenvalues ascending.
inline Eigen::SelfAdjointEigenSolver<CMat> eigh(const CMat &m, bool vectors = true)
{
    return Eigen::SelfAdjointEigenSolver<CMat>(hermitian_part(m), vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
}

inline double psd_floor(const RVec &eigenvalues)
{
    double largest = 1.0;
    if (eigenvalues.size() > 0)
        largest = std::max(largest, eigenvalues.cwiseAbs().maxCoeff());
    return -psd_tol * largest;
}

inline bool is_psd(const CMat &m)
{
    if (m.size() == 0)
        return true;
    if (!is_hermitian(m))
        return false;
    const RVec ev = eigh(m, false).eigenvalues();
    return ev.minCoeff() >= psd_floor(ev);
}

inline double min_eigenvalue(const CMat &m)
{
    return m.size() == 0 ? 0.0 : eigh(m, false).eigenvalues().minCoeff();
}

inline double max_eigenvalue(const CMat &m)
{
    return m.size() == 0 ? 0.0 : eigh(m, false).eigenvalues().maxCoeff();
}

// Eigenvalue-thresholded pseudo-inverse of a Hermitian matrix.
inline CMat pinv_hermitian(const CMat &m, double rel_threshold = pinv_rel_threshold)
{
    if (m.size() == 0)
        return m;
    const auto es = eigh(m);
    const RVec &ev = es.eigenvalues();
    const double cutoff = rel_threshold * std::max(ev.cwiseAbs().maxCoeff(), 0.0);
    RVec inv = RVec::Zero(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev(i) > cutoff && ev(i) > 0.0)
            inv(i) = 1.0 / ev(i);
    return hermitian_part(es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint());
}

// Principal square root of a PSD matrix (negative eigenvalues clipped).
inline CMat psd_sqrt(const CMat &m)
{
    if (m.size() == 0)
        return m;
    const auto es = eigh(m);
    const RVec s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
}

// log2 det of a Hermitian positive-definite matrix via Cholesky, falling back
// to the eigenvalue sum when the factorization breaks down.
inline double log2det_hpd(const CMat &m)
{
    if (m.size() == 0)
        return 0.0;
    const CMat h = hermitian_part(m);
    Eigen::LLT<CMat> llt(h);
    if (llt.info() == Eigen::Success)
    {
        const RVec d = llt.matrixLLT().diagonal().real();
        double acc = 0.0;
        for (Eigen::Index i = 0; i < d.size(); ++i)
            acc += std::log2(d(i));
        return 2.0 * acc;
    }
    const RVec ev = eigh(h, false).eigenvalues();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        acc += std::log2(std::max(ev(i), std::numeric_limits<double>::min()));
    return acc;
}

// log2|I + G X G^H| without input validation. X is assumed PSD up to
// round-off. Uses whichever of the two Sylvester forms is smaller.
inline double logdet_unchecked(const CMat &G, const CMat &X)
{
    if (G.rows() == 0 || G.cols() == 0)
        return 0.0;
    if (G.rows() <= G.cols())
    {
        CMat w = G * X * G.adjoint();
        w.diagonal().array() += 1.0;
        return std::max(0.0, log2det_hpd(w));
    }
    const CMat s = psd_sqrt(X);
    CMat w = s * (G.adjoint() * G) * s;
    w.diagonal().array() += 1.0;
    return std::max(0.0, log2det_hpd(w));
}

inline CMat block_diag(const CMat &a, const CMat &b)
{
    CMat out = CMat::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    out.topLeftCorner(a.rows(), a.cols()) = a;
    out.bottomRightCorner(b.rows(), b.cols()) = b;
    return out;
}

inline CMat hstack(const CMat &a, const CMat &b)
{
    CMat out(a.rows(), a.cols() + b.cols());
    out << a, b;
    return out;
}

inline CMat vstack(const CMat &a, const CMat &b)
{
    CMat out(a.rows() + b.rows(), a.cols());
    out << a, b;
    return out;
}

inline double real_trace(const CMat &m)
{
    return m.size() == 0 ? 0.0 : m.trace().real();
}

} // namespace detail

/// A square complex matrix equal to its conjugate transpose. Construction
/// validates the property and stores the exactly symmetrized form.
class HermitianMatrix
{
  public:
    HermitianMatrix() = default;

    explicit HermitianMatrix(const CMat &entries)
    {
        if (entries.rows() != entries.cols())
            throw std::invalid_argument("HermitianMatrix: matrix is not square (" + std::to_string(entries.rows()) + "x" +
                                        std::to_string(entries.cols()) + ")");
        if (!detail::is_hermitian(entries))
            throw std::invalid_argument("HermitianMatrix: matrix is not Hermitian within tolerance");
        entries_ = detail::hermitian_part(entries);
    }

    Eigen::Index dim() const { return entries_.rows(); }
    const CMat &matrix() const { return entries_; }

  private:
    CMat entries_;
};

/// Hermitian matrix whose eigenvalues are nonnegative up to 1e-9 relative
/// to the largest eigenvalue magnitude (floor 1).
class PsdMatrix
{
  public:
    PsdMatrix() = default;

    explicit PsdMatrix(const HermitianMatrix &base) : base_(base)
    {
        if (!detail::is_psd(base_.matrix()))
            throw std::invalid_argument("PsdMatrix: matrix has a negative eigenvalue beyond tolerance");
    }

    explicit PsdMatrix(const CMat &entries) : PsdMatrix(HermitianMatrix(entries)) {}

    static PsdMatrix zero(Eigen::Index n) { return PsdMatrix(CMat::Zero(n, n)); }
    static PsdMatrix scaled_identity(Eigen::Index n, double s) { return PsdMatrix(CMat::Identity(n, n) * s); }

    Eigen::Index dim() const { return base_.dim(); }
    const CMat &matrix() const { return base_.matrix(); }
    const HermitianMatrix &hermitian() const { return base_; }

  private:
    HermitianMatrix base_;
};

/// Blocked input covariance [K1 K12; K12^H K2] of sender and relay.
class JointCovariance
{
  public:
    JointCovariance() = default;

    JointCovariance(const CMat &k1, const CMat &k12, const CMat &k2) : k1_(k1), k12_(k12), k2_(k2)
    {
        if (k1.rows() != k1.cols() || k2.rows() != k2.cols() || k12.rows() != k1.rows() || k12.cols() != k2.rows())
            throw std::invalid_argument("JointCovariance: block dimensions do not conform");
        if (!detail::is_hermitian(k1) || !detail::is_hermitian(k2))
            throw std::invalid_argument("JointCovariance: diagonal blocks are not Hermitian");
        k1_ = detail::hermitian_part(k1);
        k2_ = detail::hermitian_part(k2);
        if (!detail::is_psd(assembled()))
            throw std::invalid_argument("JointCovariance: joint matrix is not PSD");
    }

    /// Split an assembled (t1+t2)-square matrix.
    static JointCovariance from_joint(const CMat &k, Eigen::Index t1)
    {
        if (k.rows() != k.cols() || t1 < 0 || t1 > k.rows())
            throw std::invalid_argument("JointCovariance: bad joint matrix or split");
        const Eigen::Index t2 = k.rows() - t1;
        const CMat h = detail::hermitian_part(k);
        return JointCovariance(h.topLeftCorner(t1, t1), h.topRightCorner(t1, t2), h.bottomRightCorner(t2, t2));
    }

    static JointCovariance independent(const PsdMatrix &k1, const PsdMatrix &k2)
    {
        return JointCovariance(k1.matrix(), CMat::Zero(k1.dim(), k2.dim()), k2.matrix());
    }

    Eigen::Index t1() const { return k1_.rows(); }
    Eigen::Index t2() const { return k2_.rows(); }
    const CMat &k1() const { return k1_; }
    const CMat &k12() const { return k12_; }
    const CMat &k2() const { return k2_; }

    CMat assembled() const
    {
        CMat k(t1() + t2(), t1() + t2());
        k.topLeftCorner(t1(), t1()) = k1_;
        k.topRightCorner(t1(), t2()) = k12_;
        k.bottomLeftCorner(t2(), t1()) = k12_.adjoint();
        k.bottomRightCorner(t2(), t2()) = k2_;
        return k;
    }

    double trace1() const { return detail::real_trace(k1_); }
    double trace2() const { return detail::real_trace(k2_); }

    bool within_budget(double power, double slack = 1e-9) const
    {
        return trace1() <= power + slack && trace2() <= power + slack;
    }

  private:
    CMat k1_, k12_, k2_;
};

/// log2 det(I_r + G K G^H) in bits, evaluated as the Cholesky log-det of
/// I_t + K^{1/2} G^H G K^{1/2}.
inline double logdet_id_plus(const CMat &G, const PsdMatrix &K)
{
    if (G.cols() != K.dim())
        throw std::invalid_argument("logdet_id_plus: G has " + std::to_string(G.cols()) + " columns but K is " +
                                    std::to_string(K.dim()) + "x" + std::to_string(K.dim()));
    if (G.rows() == 0 || G.cols() == 0)
        return 0.0;
    const CMat s = detail::psd_sqrt(K.matrix());
    CMat w = s * (G.adjoint() * G) * s;
    w.diagonal().array() += 1.0;
    return std::max(0.0, detail::log2det_hpd(w));
}

/// Conditional covariance K1 - K12 pinv(K2) K12^H.
inline PsdMatrix schur_conditional(const JointCovariance &K)
{
    const CMat q = K.k1() - K.k12() * detail::pinv_hermitian(K.k2()) * K.k12().adjoint();
    return PsdMatrix(detail::hermitian_part(q));
}

/// Frobenius-nearest PSD matrix: clip negative eigenvalues.
inline PsdMatrix psd_project(const HermitianMatrix &H)
{
    if (H.dim() == 0)
        return PsdMatrix(H);
    const auto es = detail::eigh(H.matrix());
    const RVec clipped = es.eigenvalues().cwiseMax(0.0);
    return PsdMatrix(detail::hermitian_part(es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint()));
}

/// Scales the sender and relay blocks by congruence so both trace budgets
/// hold. A block already within budget (or of zero trace) is left alone.
inline JointCovariance block_trace_retract(const JointCovariance &K, double power)
{
    if (power < 0.0)
        throw std::invalid_argument("block_trace_retract: negative power");
    const auto factor = [power](double tr) { return tr > power && tr > 0.0 ? power / tr : 1.0; };
    const double a = std::sqrt(factor(K.trace1()));
    const double b = std::sqrt(factor(K.trace2()));
    return JointCovariance(K.k1() * (a * a), K.k12() * (a * b), K.k2() * (b * b));
}

} // namespace relaycap
