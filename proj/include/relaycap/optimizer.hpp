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

// Max-min of two concave log-det objectives over a spectrahedron
//
//     maximize  min{ f_a, f_b }
//     subject to  K >= 0, tr K1 <= P, tr K2 <= P, structural zeros,
//
// solved through g(lambda) = max lambda f_a + (1 - lambda) f_b, which is
// convex in lambda and whose minimum equals the max-min value. The inner
// maximization is a projected gradient ascent. Every inner solve also
// yields a Frank-Wolfe upper bound on g(lambda) from a dual solution of
// the linear maximization over the feasible set, so the reported
// certificate is a true upper bound on the max-min value.
//
// Conditional covariances are not formed by Schur complements. A coherent
// set is lifted to V = diag(S, Q) with S, Q >= 0 and K = S + diag(Q, 0);
// then Q ranges exactly over {Q : 0 <= Q <= K_{1|2}}, and a term such as
// log|I + G K_{1|2} G^H| becomes the smooth concave log|I + G Q G^H|.

#include "relaycap/bounds.hpp"
#include "relaycap/kernels.hpp"
#include "relaycap/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace relaycap
{

using IndexList = std::vector<Eigen::Index>;

/// log2|I + G X G^H| with X(i, j) = sum_k V(p_k[i], p_k[j]) over the parts
/// p_k of the optimization variable V. An index of -1 contributes zero.
struct LogDetTerm
{
    CMat G;
    std::vector<IndexList> parts;

    static LogDetTerm on(CMat G, IndexList rows) { return {std::move(G), {std::move(rows)}}; }
};

struct TermSum
{
    std::vector<LogDetTerm> terms;
    double offset = 0.0;
};

/// The two concave objectives whose minimum is maximized.
struct TermPair
{
    TermSum a, b;
};

namespace detail
{

inline constexpr double inv_ln2 = 1.0 / std::numbers::ln2;

inline CMat submatrix(const CMat &K, const IndexList &r, const IndexList &c)
{
    CMat out(r.size(), c.size());
    for (std::size_t i = 0; i < r.size(); ++i)
        for (std::size_t j = 0; j < c.size(); ++j)
            out(i, j) = K(r[i], c[j]);
    return out;
}

inline void scatter_add(CMat &V, const IndexList &r, const CMat &block)
{
    for (std::size_t i = 0; i < r.size(); ++i)
        for (std::size_t j = 0; j < r.size(); ++j)
            V(r[i], r[j]) += block(i, j);
}

// Value and gradient of one term. With W = I + G X G^H the gradient with
// respect to X is G^H W^{-1} G / ln 2, scattered back through every part.
inline double eval_term(const LogDetTerm &t, const CMat &V, CMat *grad)
{
    const auto m = static_cast<Eigen::Index>(t.parts.front().size());
    CMat X = CMat::Zero(m, m);
    for (const auto &p : t.parts)
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < m; ++j)
                if (p[i] >= 0 && p[j] >= 0)
                    X(i, j) += V(p[i], p[j]);
    CMat W = t.G * X * t.G.adjoint();
    W.diagonal().array() += 1.0;
    W = hermitian_part(W);
    Eigen::LLT<CMat> llt(W);
    double value = 0.0;
    CMat winv_g;
    if (llt.info() == Eigen::Success)
    {
        const RVec d = llt.matrixLLT().diagonal().real();
        for (Eigen::Index i = 0; i < d.size(); ++i)
            value += 2.0 * std::log2(d(i));
        if (grad)
            winv_g = llt.solve(t.G);
    }
    else
    {
        // round-off left W slightly indefinite
        const auto es = eigh(W);
        const RVec ev = es.eigenvalues().cwiseMax(1e-300);
        value = ev.array().log().sum() * inv_ln2;
        if (grad)
            winv_g = es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().adjoint() * t.G;
    }
    if (grad)
    {
        const CMat Z = hermitian_part(t.G.adjoint() * winv_g) * inv_ln2;
        for (const auto &p : t.parts)
            for (Eigen::Index i = 0; i < m; ++i)
                for (Eigen::Index j = 0; j < m; ++j)
                    if (p[i] >= 0 && p[j] >= 0)
                        (*grad)(p[i], p[j]) += Z(i, j);
    }
    return value;
}

inline double eval_sum(const TermSum &s, const CMat &V, CMat *grad)
{
    double v = s.offset;
    for (const auto &t : s.terms)
        v += eval_term(t, V, grad);
    return v;
}

inline double real_inner(const CMat &a, const CMat &b)
{
    return (a.adjoint() * b).trace().real();
}

inline double golden_min(const auto &f, double lo, double hi, double tol, int max_iter = 200)
{
    constexpr double r = 0.6180339887498949;
    double c = hi - r * (hi - lo), d = lo + r * (hi - lo);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < max_iter && (hi - lo) > tol; ++i)
    {
        if (fc <= fd)
        {
            hi = d;
            d = c;
            fd = fc;
            c = hi - r * (hi - lo);
            fc = f(c);
        }
        else
        {
            lo = c;
            c = d;
            fc = fd;
            d = lo + r * (hi - lo);
            fd = f(d);
        }
    }
    return fc <= fd ? c : d;
}

// Projection of a block-diagonal Hermitian M onto {V >= 0, tr_1 V <= P,
// tr_2 V <= P}, where tr_k sums the diagonal over coordinates of node k:
// V = psd(M - mu1 E1 - mu2 E2) with (mu1, mu2) >= 0 maximizing the concave
// dual g(mu) = 1/2 |V(mu) - M|^2 + sum_k mu_k (tr_k V(mu) - P), whose
// gradient is (tr_k V(mu) - P). Damped Newton with the Daleckii-Krein Jacobian.
class TraceProjection
{
  public:
    TraceProjection(const CMat &M, const std::vector<int> &node, const std::vector<IndexList> &groups, double power)
        : n_(M.rows()), power_(power)
    {
        const CMat h = hermitian_part(M);
        for (const auto &g : groups)
        {
            Group gr;
            gr.idx = g;
            gr.node = RVec(static_cast<Eigen::Index>(g.size()));
            bool has1 = false, has2 = false;
            for (std::size_t i = 0; i < g.size(); ++i)
            {
                const bool first = node[static_cast<std::size_t>(g[i])] == 0;
                gr.node(static_cast<Eigen::Index>(i)) = first ? 0.0 : 1.0;
                (first ? has1 : has2) = true;
            }
            gr.mixed = has1 && has2;
            gr.pure_node = has1 ? 0 : 1;
            gr.M = submatrix(h, g, g);
            if (!gr.mixed)
            {
                const auto es = eigh(gr.M);
                gr.U = es.eigenvectors();
                gr.nu = es.eigenvalues();
            }
            groups_.push_back(std::move(gr));
        }
    }

    CMat solve()
    {
        Eigen::Vector2d mu(0.0, 0.0);
        Point pt = eval(mu, true);
        const double tol_t = 1e-12 * std::max(1.0, power_);
        for (int it = 0; it < 100; ++it)
        {
            const Eigen::Vector2d grad = pt.T.array() - power_;
            bool optimal = true;
            for (int i = 0; i < 2; ++i)
                optimal = optimal && (mu(i) > 0.0 ? std::abs(grad(i)) <= tol_t : grad(i) <= tol_t);
            if (optimal)
                break;
            // a multiplier at zero with a pushing gradient stays there
            std::array<bool, 2> free{};
            for (int i = 0; i < 2; ++i)
                free[i] = !(mu(i) == 0.0 && grad(i) <= 0.0);
            Eigen::Vector2d d(0.0, 0.0);
            const double reg = 1e-12 * (1.0 + pt.J.cwiseAbs().maxCoeff());
            if (free[0] && free[1])
            {
                Eigen::Matrix2d H = pt.J;
                H.diagonal().array() -= reg;
                d = -H.fullPivLu().solve(grad);
            }
            else
            {
                for (int i = 0; i < 2; ++i)
                    if (free[i])
                        d(i) = -grad(i) / (pt.J(i, i) - reg);
            }
            if (!(grad.dot(d) > 0.0) || !d.allFinite())
            {
                d = grad;
                for (int i = 0; i < 2; ++i)
                    if (!free[i])
                        d(i) = 0.0;
            }
            double t = 1.0;
            bool moved = false;
            for (int ls = 0; ls < 60; ++ls, t *= 0.5)
            {
                const Eigen::Vector2d trial = (mu + t * d).cwiseMax(0.0);
                Point q = eval(trial, true);
                if (q.g >= pt.g + 1e-4 * grad.dot(trial - mu) - 1e-15 * std::abs(pt.g))
                {
                    moved = (trial - mu).norm() > 0.0;
                    mu = trial;
                    pt = std::move(q);
                    break;
                }
            }
            if (!moved)
                break;
        }
        return assemble(mu, pt);
    }

  private:
    struct Group
    {
        IndexList idx;
        RVec node;
        bool mixed = false;
        int pure_node = 0;
        CMat M, U;
        RVec nu;
    };

    struct Point
    {
        double g = 0.0;
        Eigen::Vector2d T = Eigen::Vector2d::Zero();
        Eigen::Matrix2d J = Eigen::Matrix2d::Zero();
        std::vector<CMat> blocks; // projected mixed blocks
    };

    Point eval(const Eigen::Vector2d &mu, bool jacobian) const
    {
        Point p;
        p.g = -(mu(0) + mu(1)) * power_;
        for (const auto &gr : groups_)
        {
            if (!gr.mixed)
            {
                const int k = gr.pure_node;
                for (Eigen::Index i = 0; i < gr.nu.size(); ++i)
                {
                    const double v = gr.nu(i) - mu(k);
                    const double kp = std::max(v, 0.0);
                    p.T(k) += kp;
                    p.g += 0.5 * (kp - gr.nu(i)) * (kp - gr.nu(i)) + mu(k) * kp;
                    if (v > 0.0)
                        p.J(k, k) -= 1.0;
                }
                continue;
            }
            CMat X = gr.M;
            for (Eigen::Index i = 0; i < X.rows(); ++i)
                X(i, i) -= gr.node(i) == 0.0 ? mu(0) : mu(1);
            const auto es = eigh(X);
            const RVec lam = es.eigenvalues();
            const RVec lp = lam.cwiseMax(0.0);
            const CMat &U = es.eigenvectors();
            CMat Kg = hermitian_part(U * lp.asDiagonal() * U.adjoint());
            double t1 = 0.0, t2 = 0.0;
            for (Eigen::Index i = 0; i < Kg.rows(); ++i)
                (gr.node(i) == 0.0 ? t1 : t2) += Kg(i, i).real();
            p.T(0) += t1;
            p.T(1) += t2;
            p.g += 0.5 * (Kg - gr.M).squaredNorm() + mu(0) * t1 + mu(1) * t2;
            if (jacobian)
            {
                const Eigen::Index m = lam.size();
                const RVec e1 = (1.0 - gr.node.array()).matrix();
                const CMat E1 = U.adjoint() * e1.asDiagonal() * U;
                const CMat E2 = U.adjoint() * gr.node.asDiagonal() * U;
                for (Eigen::Index k = 0; k < m; ++k)
                    for (Eigen::Index l = 0; l < m; ++l)
                    {
                        double rho;
                        if (lam(k) > 0.0 && lam(l) > 0.0)
                            rho = 1.0;
                        else if (lam(k) <= 0.0 && lam(l) <= 0.0)
                            rho = 0.0;
                        else
                            rho = (lp(k) - lp(l)) / (lam(k) - lam(l));
                        if (rho == 0.0)
                            continue;
                        p.J(0, 0) -= rho * std::real(E1(l, k) * E1(k, l));
                        p.J(0, 1) -= rho * std::real(E1(l, k) * E2(k, l));
                        p.J(1, 1) -= rho * std::real(E2(l, k) * E2(k, l));
                    }
            }
            p.blocks.push_back(std::move(Kg));
        }
        p.J(1, 0) = p.J(0, 1);
        return p;
    }

    CMat assemble(const Eigen::Vector2d &mu, const Point &pt) const
    {
        CMat out = CMat::Zero(n_, n_);
        std::size_t b = 0;
        for (const auto &gr : groups_)
        {
            CMat block;
            if (gr.mixed)
                block = pt.blocks[b++];
            else
            {
                const RVec v = (gr.nu.array() - mu(gr.pure_node)).cwiseMax(0.0).matrix();
                block = hermitian_part(gr.U * v.asDiagonal() * gr.U.adjoint());
            }
            for (std::size_t i = 0; i < gr.idx.size(); ++i)
                for (std::size_t j = 0; j < gr.idx.size(); ++j)
                    out(gr.idx[i], gr.idx[j]) = block(i, j);
        }
        return out;
    }

    Eigen::Index n_;
    double power_;
    std::vector<Group> groups_;
};

} // namespace detail

struct PairValue
{
    double a = 0.0;
    double b = 0.0;
    double min() const { return std::min(a, b); }
};

inline PairValue evaluate_pair(const TermPair &obj, const CMat &V)
{
    return {detail::eval_sum(obj.a, V, nullptr), detail::eval_sum(obj.b, V, nullptr)};
}

/// Input covariances of (X1, X2) with t1 + t2 coordinates: PSD,
/// tr K1 <= P, tr K2 <= P, and zero cross-covariance between groups.
///
/// The optimization variable V is block diagonal over `groups`. Its first
/// t1 + t2 coordinates are the covariance coordinates; a lifted set appends
/// auxiliary coordinates, each adding into one sender coordinate of K.
/// The budget of node k is the trace of V over every coordinate that
/// lands on node k.
class FeasibleSet
{
  public:
    /// Sender coordinates `sender` are lifted by the appended coordinates
    /// `aux` (same length), which are conditionally independent of `relay`.
    struct Lift
    {
        IndexList sender, relay, aux;
    };

    FeasibleSet(int n1, int n2, double power, std::vector<IndexList> groups, std::optional<Lift> lift = std::nullopt)
        : n1_(n1), n2_(n2), power_(power), groups_(std::move(groups)), lift_(std::move(lift))
    {
        if (n1 < 1 || n2 < 0)
            throw std::invalid_argument("FeasibleSet: need t1 >= 1 and t2 >= 0");
        if (!(power >= 0.0) || !std::isfinite(power))
            throw std::invalid_argument("FeasibleSet: power must be finite and nonnegative");
        target_ = range(0, n1 + n2);
        if (lift_)
        {
            if (lift_->sender.size() != lift_->aux.size())
                throw std::invalid_argument("FeasibleSet: lift needs one auxiliary coordinate per sender coordinate");
            for (std::size_t i = 0; i < lift_->aux.size(); ++i)
            {
                if (lift_->aux[i] != static_cast<Eigen::Index>(target_.size()) || lift_->sender[i] >= n1)
                    throw std::invalid_argument("FeasibleSet: auxiliary coordinates must follow the covariance ones");
                target_.push_back(lift_->sender[i]);
            }
        }
        std::vector<int> seen(target_.size(), 0);
        for (const auto &g : groups_)
            for (auto i : g)
            {
                if (i < 0 || i >= dim())
                    throw std::invalid_argument("FeasibleSet: group index out of range");
                ++seen[static_cast<std::size_t>(i)];
            }
        for (int s : seen)
            if (s != 1)
                throw std::invalid_argument("FeasibleSet: groups must partition the coordinates");
        for (auto t : target_)
            node_.push_back(t < n1_ ? 0 : 1);
    }

    /// Arbitrary jointly PSD (K1, K12, K2), lifted on every sender coordinate.
    /// Layout: V = diag(S, Q), S over [0, t1 + t2), Q over [t1 + t2, 2 t1 + t2).
    static FeasibleSet coherent(int t1, int t2, double power)
    {
        const int n = t1 + t2;
        return FeasibleSet(t1, t2, power, {range(0, n), range(n, n + t1)},
                           Lift{range(0, t1), range(t1, n), range(n, n + t1)});
    }

    /// Independent inputs, K12 = 0.
    static FeasibleSet noncoherent(int t1, int t2, double power)
    {
        if (t2 == 0)
            return sender_only(t1, power);
        return FeasibleSet(t1, t2, power, {range(0, t1), range(t1, t1 + t2)});
    }

    /// Sender only (no relay coordinates).
    static FeasibleSet sender_only(int t1, double power) { return FeasibleSet(t1, 0, power, {range(0, t1)}); }

    /// Sender split X1 = (X1', X1''), t1' coordinates first. X1'' is
    /// independent of (X1', X2). The coherent set lifts X1' given X2 and
    /// appends t1' coordinates after t1 + t2; otherwise all three parts are
    /// independent.
    static FeasibleSet sender_split(int t1a, int t1b, int t2, double power, bool coherent)
    {
        const int t1 = t1a + t1b, n = t1 + t2;
        if (coherent)
        {
            IndexList mixed = range(0, t1a);
            const IndexList relay = range(t1, n);
            mixed.insert(mixed.end(), relay.begin(), relay.end());
            return FeasibleSet(t1, t2, power, {mixed, range(t1a, t1), range(n, n + t1a)},
                               Lift{range(0, t1a), relay, range(n, n + t1a)});
        }
        return FeasibleSet(t1, t2, power, {range(0, t1a), range(t1a, t1), range(t1, n)});
    }

    static IndexList range(int lo, int hi)
    {
        IndexList r;
        for (int i = lo; i < hi; ++i)
            r.push_back(i);
        return r;
    }

    int t1() const { return n1_; }
    int t2() const { return n2_; }
    /// Size of the covariance K.
    int cov_dim() const { return n1_ + n2_; }
    /// Size of the optimization variable V.
    int dim() const { return static_cast<int>(target_.size()); }
    double power() const { return power_; }
    const std::vector<IndexList> &groups() const { return groups_; }
    const std::optional<Lift> &lift() const { return lift_; }

    /// True when K12 may be nonzero.
    bool coherent() const
    {
        for (const auto &g : groups_)
        {
            bool has1 = false, has2 = false;
            for (auto i : g)
                (node_[static_cast<std::size_t>(i)] == 0 ? has1 : has2) = true;
            if (has1 && has2)
                return true;
        }
        return false;
    }

    double node_trace(const CMat &V, int node) const
    {
        double t = 0.0;
        for (Eigen::Index i = 0; i < dim(); ++i)
            if (node_[static_cast<std::size_t>(i)] == node)
                t += V(i, i).real();
        return t;
    }

    /// K from V.
    CMat covariance(const CMat &V) const
    {
        CMat K = V.topLeftCorner(cov_dim(), cov_dim());
        if (lift_)
            for (std::size_t i = 0; i < lift_->aux.size(); ++i)
                for (std::size_t j = 0; j < lift_->aux.size(); ++j)
                    K(lift_->sender[i], lift_->sender[j]) += V(lift_->aux[i], lift_->aux[j]);
        return K;
    }

    /// Membership of a covariance K in the set.
    bool contains(const CMat &K, double tol = 1e-9) const
    {
        if (K.rows() != cov_dim() || K.cols() != cov_dim())
            return false;
        if (!detail::is_hermitian(K))
            return false;
        const double t1 = K.diagonal().head(n1_).real().sum();
        const double t2 = K.diagonal().tail(n2_).real().sum();
        if (t1 > power_ + tol || t2 > power_ + tol)
            return false;
        for (Eigen::Index i = 0; i < cov_dim(); ++i)
            for (Eigen::Index j = 0; j < cov_dim(); ++j)
                if (!may_correlate(i, j) && K(i, j) != cplx(0.0))
                    return false;
        return detail::is_psd(K);
    }

    /// Euclidean projection of a Hermitian V: pinch to the groups, then the
    /// PSD projection with both trace budgets through their multipliers.
    /// A last congruence absorbs round-off in the budgets.
    CMat project(const CMat &V) const
    {
        return retract(detail::TraceProjection(V, node_, groups_, power_).solve());
    }

    /// diag(d) V diag(d) with d = sqrt(P / tr_k) on node k if over budget.
    CMat retract(const CMat &V) const
    {
        const auto factor = [this](double tr) { return tr > power_ && tr > 0.0 ? std::sqrt(power_ / tr) : 1.0; };
        const double a = factor(node_trace(V, 0));
        const double b = factor(node_trace(V, 1));
        if (a == 1.0 && b == 1.0)
            return V;
        RVec d(dim());
        for (Eigen::Index i = 0; i < dim(); ++i)
            d(i) = node_[static_cast<std::size_t>(i)] == 0 ? a : b;
        return d.asDiagonal() * V * d.asDiagonal();
    }

    /// Full-power isotropic start.
    CMat initial() const
    {
        std::array<int, 2> count{};
        for (int n : node_)
            ++count[static_cast<std::size_t>(n)];
        CMat V = CMat::Zero(dim(), dim());
        for (Eigen::Index i = 0; i < dim(); ++i)
            V(i, i) = power_ / count[static_cast<std::size_t>(node_[static_cast<std::size_t>(i)])];
        return V;
    }

    /// Random full-power member.
    CMat random_member(CounterRng &rng) const
    {
        CMat A(dim(), dim());
        for (Eigen::Index i = 0; i < dim(); ++i)
            for (Eigen::Index j = 0; j < dim(); ++j)
                A(i, j) = rng.complex_normal();
        CMat V = CMat::Zero(dim(), dim());
        const CMat full = A * A.adjoint();
        for (const auto &g : groups_)
            for (auto i : g)
                for (auto j : g)
                    V(i, j) = full(i, j);
        const double t1 = node_trace(V, 0), t2 = node_trace(V, 1);
        RVec d(dim());
        for (Eigen::Index i = 0; i < dim(); ++i)
        {
            const double t = node_[static_cast<std::size_t>(i)] == 0 ? t1 : t2;
            d(i) = t > 0.0 ? std::sqrt(power_ / t) : 0.0;
        }
        return d.asDiagonal() * V * d.asDiagonal();
    }

    /// Moves the part of S1 not explained by the relay into Q, so that
    /// K12 = F S2 and K_{1|2} = Q exactly, with F = S12 pinv(S2). The
    /// covariance and the budgets are unchanged up to round-off.
    CMat canonicalize(const CMat &V) const
    {
        if (!lift_)
            return V;
        const auto &L = *lift_;
        const CMat s1 = detail::submatrix(V, L.sender, L.sender);
        const CMat s12 = detail::submatrix(V, L.sender, L.relay);
        const CMat s2 = detail::submatrix(V, L.relay, L.relay);
        const CMat q = detail::submatrix(V, L.aux, L.aux);
        const CMat F = s12 * detail::pinv_hermitian(s2);
        const CMat explained = detail::hermitian_part(F * s2 * F.adjoint());
        const auto es = detail::eigh(s1 - explained);
        const CMat rest = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).asDiagonal() * es.eigenvectors().adjoint();
        CMat out = V;
        const CMat k12 = F * s2;
        const CMat qn = detail::hermitian_part(q + rest);
        for (std::size_t i = 0; i < L.sender.size(); ++i)
        {
            for (std::size_t j = 0; j < L.sender.size(); ++j)
            {
                out(L.sender[i], L.sender[j]) = explained(i, j);
                out(L.aux[i], L.aux[j]) = qn(i, j);
            }
            for (std::size_t j = 0; j < L.relay.size(); ++j)
            {
                out(L.sender[i], L.relay[j]) = k12(i, j);
                out(L.relay[j], L.sender[i]) = std::conj(k12(i, j));
            }
        }
        return retract(out);
    }

    /// Upper bound on max { Re tr(Gamma V) : V in the set } from a feasible
    /// point of the dual  min P (mu1 + mu2)  s.t.  mu_node(i) on the diagonal
    /// dominates Gamma on every group. Exact for groups within one node.
    double linear_max(const CMat &Gamma) const
    {
        double l1 = 0.0, l2 = 0.0;
        struct Mixed
        {
            CMat g11, g12, g22;
        };
        std::vector<Mixed> mixed;
        for (const auto &g : groups_)
        {
            IndexList p1, p2;
            for (auto i : g)
                (node_[static_cast<std::size_t>(i)] == 0 ? p1 : p2).push_back(i);
            if (p2.empty())
                l1 = std::max(l1, detail::max_eigenvalue(detail::submatrix(Gamma, p1, p1)));
            else if (p1.empty())
                l2 = std::max(l2, detail::max_eigenvalue(detail::submatrix(Gamma, p2, p2)));
            else
            {
                Mixed m{detail::submatrix(Gamma, p1, p1), detail::submatrix(Gamma, p1, p2),
                        detail::submatrix(Gamma, p2, p2)};
                l1 = std::max(l1, detail::max_eigenvalue(m.g11));
                l2 = std::max(l2, detail::max_eigenvalue(m.g22));
                mixed.push_back(std::move(m));
            }
        }
        if (mixed.empty())
            return power_ * (l1 + l2);

        double top = std::max(l1, l2);
        for (const auto &m : mixed)
        {
            const Eigen::Index a = m.g11.rows(), b = m.g22.rows();
            CMat full(a + b, a + b);
            full << m.g11, m.g12, m.g12.adjoint(), m.g22;
            top = std::max(top, detail::max_eigenvalue(full));
        }
        const double scale = std::max({1.0, std::abs(l1), std::abs(top)});
        const double lo = l1 + 1e-12 * scale;
        const double hi = std::max(top, lo) + 1e-12 * scale;
        // smallest relay multiplier satisfying every mixed group for a given mu1
        const auto relay_mu = [&](double mu1) {
            double mu2 = l2;
            for (const auto &m : mixed)
            {
                CMat shifted = -m.g11;
                shifted.diagonal().array() += mu1;
                const CMat s = m.g22 + m.g12.adjoint() * shifted.llt().solve(m.g12);
                mu2 = std::max(mu2, detail::max_eigenvalue(s));
            }
            return mu2 * (1.0 + 1e-12) + 1e-15 * scale;
        };
        const auto dual = [&](double mu1) {
            const double mu2 = relay_mu(mu1);
            return std::isfinite(mu2) ? mu1 + mu2 : std::numeric_limits<double>::infinity();
        };
        // mu1 + mu2(mu1) is convex; its minimizer may lie beyond hi
        double far = hi;
        for (double w = std::max(hi - lo, 1e-6 * scale); w < 1e12 * scale; w *= 2.0)
        {
            const bool still_falling = dual(far + w) < dual(far);
            far += w;
            if (!still_falling)
                break;
        }
        const double best_mu1 = detail::golden_min(dual, lo, far, 1e-10 * scale, 100);
        return power_ * std::min({dual(best_mu1), dual(hi), dual(far), 2.0 * hi});
    }

  private:
    bool may_correlate(Eigen::Index i, Eigen::Index j) const
    {
        if (i == j)
            return true;
        for (const auto &g : groups_)
        {
            bool hi = false, hj = false;
            for (auto v : g)
            {
                hi = hi || target_[static_cast<std::size_t>(v)] == i;
                hj = hj || target_[static_cast<std::size_t>(v)] == j;
            }
            if (hi && hj)
                return true;
        }
        return false;
    }

    int n1_, n2_;
    double power_;
    std::vector<IndexList> groups_;
    std::optional<Lift> lift_;
    IndexList target_;
    std::vector<int> node_;
};

/// An objective pair together with the set it is maximized over.
struct Problem
{
    TermPair obj;
    FeasibleSet set;
};

/// {ZERO, 2^-6, ..., 2^6, INFINITE}
inline std::vector<CompressionNoise> default_sigma2_grid()
{
    std::vector<CompressionNoise> grid{CompressionNoise::zero()};
    for (int k = -6; k <= 6; ++k)
        grid.push_back(CompressionNoise::finite(std::ldexp(1.0, k)));
    grid.push_back(CompressionNoise::infinite());
    return grid;
}

struct SolverConfig
{
    double tol_bits = 1e-3;
    int max_inner_iterations = 5000;
    double outer_interval_tol = 1e-4; // golden-section interval on lambda
    double initial_step = 1.0;        // first step, relative to P / |gradient|
    std::uint64_t seed = 0;
    int restarts = 3;
    std::vector<CompressionNoise> sigma2_grid = default_sigma2_grid();

    void validate() const
    {
        if (!(tol_bits > 0.0))
            throw std::invalid_argument("SolverConfig: tol_bits must be positive");
        if (max_inner_iterations < 1)
            throw std::invalid_argument("SolverConfig: max_inner_iterations must be >= 1");
        if (!(outer_interval_tol > 0.0) || !(initial_step > 0.0) || restarts < 0)
            throw std::invalid_argument("SolverConfig: invalid search parameters");
        if (sigma2_grid.empty())
            throw std::invalid_argument("SolverConfig: sigma2 grid is empty");
    }
};

struct WeightedResult
{
    CMat V; // optimization variable
    CMat K; // covariance
    PairValue terms;
    double weighted = 0.0; // lambda f_a + (1 - lambda) f_b
    double upper = 0.0;    // certified upper bound on the weighted maximum
    int iterations = 0;
    bool converged = false;
};

namespace detail
{

struct Ascent
{
    const TermPair &obj;
    double lambda;
    const FeasibleSet &set;

    double eval(const CMat &V, PairValue &pv, CMat *grad) const
    {
        if (!grad)
        {
            pv.a = lambda > 0.0 ? eval_sum(obj.a, V, nullptr) : 0.0;
            pv.b = lambda < 1.0 ? eval_sum(obj.b, V, nullptr) : 0.0;
            return lambda * pv.a + (1.0 - lambda) * pv.b;
        }
        CMat ga = CMat::Zero(V.rows(), V.cols());
        CMat gb = CMat::Zero(V.rows(), V.cols());
        pv.a = lambda > 0.0 ? eval_sum(obj.a, V, &ga) : 0.0;
        pv.b = lambda < 1.0 ? eval_sum(obj.b, V, &gb) : 0.0;
        *grad = hermitian_part(ga * lambda + gb * (1.0 - lambda));
        return lambda * pv.a + (1.0 - lambda) * pv.b;
    }

    double upper_bound(const CMat &V, double phi, const CMat &grad) const
    {
        return phi + set.linear_max(grad) - real_inner(grad, V);
    }

    // Projected gradient ascent. Trial steps follow Barzilai-Borwein; a
    // step that does not improve the objective is halved.
    WeightedResult run(const CMat &start, double tol, int max_iter, double initial_step) const
    {
        CMat V = set.project(start);
        CMat grad;
        PairValue pv;
        double phi = eval(V, pv, &grad);
        double gnorm = grad.norm();
        const double pscale = std::max(set.power(), 1e-300);
        double step = gnorm > 0.0 ? initial_step * pscale / gnorm : 1.0;
        double upper = upper_bound(V, phi, grad);
        int it = 0;
        int since_check = 0;
        while (it < max_iter && upper - phi > tol)
        {
            ++it;
            CMat trial;
            PairValue trial_pv;
            double trial_phi = phi;
            bool accepted = false;
            for (int bt = 0; bt < 60; ++bt)
            {
                trial = set.project(V + grad * step);
                trial_phi = eval(trial, trial_pv, nullptr);
                if (trial_phi > phi)
                {
                    accepted = true;
                    break;
                }
                step *= 0.5;
                if (step * gnorm < 1e-15 * pscale)
                    break;
            }
            if (!accepted)
                break;
            CMat trial_grad;
            eval(trial, trial_pv, &trial_grad);
            const CMat s = trial - V;
            const CMat y = grad - trial_grad;
            const double sy = real_inner(s, y);
            const double ss = real_inner(s, s);
            V = std::move(trial);
            grad = std::move(trial_grad);
            pv = trial_pv;
            phi = trial_phi;
            gnorm = grad.norm();
            step = sy > 0.0 ? ss / sy : step * 2.0;
            const double gn = std::max(gnorm, 1e-300);
            step = std::clamp(step, 1e-12 * pscale / gn, 1e6 * pscale / gn);
            if (++since_check >= 5)
            {
                since_check = 0;
                upper = std::min(upper, upper_bound(V, phi, grad));
            }
        }
        upper = std::min(upper, upper_bound(V, phi, grad));
        WeightedResult r;
        r.V = std::move(V);
        r.terms = pv;
        r.weighted = phi;
        r.upper = upper;
        r.iterations = it;
        r.converged = upper - phi <= tol;
        return r;
    }
};

} // namespace detail

/// Maximize lambda f_a + (1 - lambda) f_b over the set. A run that does not
/// certify within tol_bits / 4 is retried from `restarts` random members.
inline WeightedResult maximize_weighted(const TermPair &obj, double lambda, const FeasibleSet &set,
                                        const SolverConfig &cfg, const CMat *start = nullptr)
{
    cfg.validate();
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw std::invalid_argument("maximize_weighted: lambda must lie in [0, 1]");
    if (start && (start->rows() != set.dim() || start->cols() != set.dim()))
        throw std::invalid_argument("maximize_weighted: start has the wrong size");
    WeightedResult best;
    if (set.power() == 0.0)
    {
        best.V = CMat::Zero(set.dim(), set.dim());
        best.converged = true;
    }
    else
    {
        const double tol = cfg.tol_bits / 4.0;
        const detail::Ascent ascent{obj, lambda, set};
        best = ascent.run(start ? *start : set.initial(), tol, cfg.max_inner_iterations, cfg.initial_step);
        if (!best.converged && cfg.restarts > 0)
        {
            CounterRng rng(cfg.seed, 0x5EEDull);
            for (int k = 0; k < cfg.restarts && !best.converged; ++k)
            {
                WeightedResult r =
                    ascent.run(set.random_member(rng), tol, cfg.max_inner_iterations, cfg.initial_step);
                const double upper = std::min(best.upper, r.upper);
                if (r.weighted > best.weighted)
                    best = std::move(r);
                best.upper = upper;
                best.converged = best.upper - best.weighted <= tol;
            }
        }
    }
    best.V = set.canonicalize(best.V);
    best.K = set.covariance(best.V);
    best.terms = evaluate_pair(obj, best.V);
    best.weighted = lambda * best.terms.a + (1.0 - lambda) * best.terms.b;
    if (set.power() == 0.0)
        best.upper = best.weighted;
    return best;
}

struct MaxMinResult
{
    CMat V;
    CMat K;
    PairValue terms;
    double value = 0.0; // min(f_a, f_b) at V
    double upper = 0.0; // certified upper bound on the max-min value
    double lambda = 1.0; // weight of the inner solve that produced V
    int inner_solves = 0;
    bool flagged = false;
    std::string note;

    double certificate_gap() const { return upper - value; }
};

namespace detail
{

struct MaxMinTracker
{
    const TermPair &obj;
    const FeasibleSet &set;
    MaxMinResult best;
    std::optional<CMat> a_limited; // f_a <= f_b
    std::optional<double> a_limited_value;
    std::optional<CMat> b_limited; // f_b < f_a
    std::optional<double> b_limited_value;

    bool offer(const CMat &V, const PairValue &pv)
    {
        if (!(pv.min() > best.value))
            return false;
        best.value = pv.min();
        best.terms = pv;
        best.V = V;
        return true;
    }

    bool record(const WeightedResult &r)
    {
        bool improved = offer(r.V, r.terms);
        const bool a_side = r.terms.a <= r.terms.b;
        auto &side = a_side ? a_limited : b_limited;
        auto &side_value = a_side ? a_limited_value : b_limited_value;
        if (!side || r.terms.min() > *side_value)
        {
            side = r.V;
            side_value = r.terms.min();
        }
        if (a_limited && b_limited)
            improved = mix() || improved;
        return improved;
    }

    // min(f_a, f_b) is concave along the segment between an a-limited and a
    // b-limited point; search it for the crossing.
    bool mix()
    {
        const CMat &va = *a_limited;
        const CMat &vb = *b_limited;
        const auto neg = [&](double theta) { return -evaluate_pair(obj, va * theta + vb * (1.0 - theta)).min(); };
        const double theta = golden_min(neg, 0.0, 1.0, 1e-7, 60);
        const CMat v = set.canonicalize(va * theta + vb * (1.0 - theta));
        return offer(v, evaluate_pair(obj, v));
    }
};

} // namespace detail

/// max min{f_a, f_b} by golden-section search over the weight lambda.
inline MaxMinResult maxmin(const TermPair &obj, const FeasibleSet &set, const SolverConfig &cfg,
                           const CMat *start = nullptr)
{
    cfg.validate();
    detail::MaxMinTracker tr{obj, set, {}, std::nullopt, std::nullopt, std::nullopt, std::nullopt};
    tr.best.value = -std::numeric_limits<double>::infinity();
    tr.best.upper = std::numeric_limits<double>::infinity();
    bool all_converged = true;

    struct Eval
    {
        double lambda;
        CMat V;
    };
    std::vector<Eval> evals;
    const auto nearest_start = [&](double lambda) -> const CMat * {
        if (evals.empty())
            return start;
        const Eval *e = &evals.front();
        for (const auto &x : evals)
            if (std::abs(x.lambda - lambda) < std::abs(e->lambda - lambda))
                e = &x;
        return &e->V;
    };
    const auto solve = [&](double lambda) {
        WeightedResult r = maximize_weighted(obj, lambda, set, cfg, nearest_start(lambda));
        all_converged = all_converged && r.converged;
        ++tr.best.inner_solves;
        if (tr.record(r))
            tr.best.lambda = lambda;
        tr.best.upper = std::min(tr.best.upper, r.upper);
        evals.push_back({lambda, r.V});
        return r.weighted;
    };
    const auto done = [&] { return tr.best.upper - tr.best.value <= cfg.tol_bits; };

    solve(1.0);
    if (!done())
        solve(0.0);
    if (!done())
    {
        constexpr double r = 0.6180339887498949;
        double lo = 0.0, hi = 1.0;
        double c = hi - r * (hi - lo), d = lo + r * (hi - lo);
        double fc = solve(c);
        double fd = done() ? fc : solve(d);
        while (!done() && hi - lo > cfg.outer_interval_tol)
        {
            if (fc <= fd)
            {
                hi = d;
                d = c;
                fd = fc;
                c = hi - r * (hi - lo);
                fc = solve(c);
            }
            else
            {
                lo = c;
                c = d;
                fc = fd;
                d = lo + r * (hi - lo);
                fd = solve(d);
            }
        }
    }

    MaxMinResult out = std::move(tr.best);
    out.K = set.covariance(out.V);
    // exact duality makes upper >= value; this only absorbs round-off
    out.upper = std::max(out.upper, out.value);
    if (out.certificate_gap() > 10.0 * cfg.tol_bits)
    {
        out.flagged = true;
        out.note = "certificate gap " + std::to_string(out.certificate_gap()) + " bits exceeds 10 tol";
    }
    else if (!all_converged && out.certificate_gap() > 2.0 * cfg.tol_bits)
        out.note = "inner solver hit the iteration limit";
    return out;
}

inline MaxMinResult maxmin(const Problem &p, const SolverConfig &cfg, const CMat *start = nullptr)
{
    return maxmin(p.obj, p.set, cfg, start);
}

} // namespace relaycap
