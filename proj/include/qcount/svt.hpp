// Copyright 2026 The qcount Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file
 * Singular value threshold amplification at matrix level.
 *
 * The verifier's block encoding U = <1| V (|x>|0^a> (x) I_W) has singular
 * values sigma_i with sigma_i^2 the eigenvalues of the acceptance operator.
 * An even polynomial P that is ~0 inside (-t+D, t-D) and ~1 outside
 * (-t-D, t+D) maps U to P(U); the amplified acceptance operator
 * V P(Sigma)^2 V^dag then has eigenvalues pushed towards 0 or 1.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/SVD>
#include <boost/math/special_functions/erf.hpp>
#include <json.hpp>

#include "circuit.hpp"
#include "errors.hpp"
#include "spectral.hpp"
#include "statevector.hpp"

namespace qcount {

/// Degree budget p <= kDegreeConstant * ln(1/eps) / Delta.
inline constexpr double kDegreeConstant = 40.0;
inline constexpr std::size_t kGridPoints = 10001;

/// Evaluate sum_k c_k T_k(x) by Clenshaw's recurrence.
inline double chebyshev_eval(const std::vector<double> &coeffs, double x) noexcept {
    double b1 = 0.0;
    double b2 = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 1;) {
        const double b0 = 2.0 * x * b1 - b2 + coeffs[k];
        b2 = b1;
        b1 = b0;
    }
    return x * b1 - b2 + (coeffs.empty() ? 0.0 : coeffs[0]);
}

/// Chebyshev interpolant of f at the degree+1 first-kind nodes.
template <class Fn>
std::vector<double> chebyshev_interpolate(const Fn &f, std::size_t degree) {
    const std::size_t n = degree + 1;
    std::vector<double> fx(n);
    for (std::size_t j = 0; j < n; ++j) {
        fx[j] = f(std::cos(std::numbers::pi * (static_cast<double>(j) + 0.5) / static_cast<double>(n)));
    }
    std::vector<double> coeffs(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            acc += fx[j] * std::cos(std::numbers::pi * static_cast<double>(k) *
                                    (static_cast<double>(j) + 0.5) / static_cast<double>(n));
        }
        coeffs[k] = 2.0 * acc / static_cast<double>(n);
    }
    coeffs[0] *= 0.5;
    return coeffs;
}

/// Violation counts for the three rectangle-polynomial properties.
struct GridReport {
    std::size_t points{0};
    std::size_t bounded_violations{0}; ///< |P| > 1 anywhere
    std::size_t outer_violations{0};   ///< P outside [1-eps, 1] for |x| >= t+D
    std::size_t inner_violations{0};   ///< P outside [0, eps] for |x| <= t-D
    double max_abs{0.0};
    double min_outer{1.0};
    double max_inner{0.0};
    double min_inner{0.0};
    double max_asymmetry{0.0}; ///< max |P(x) - P(-x)|

    [[nodiscard]] std::size_t violations() const noexcept {
        return bounded_violations + outer_violations + inner_violations;
    }
};

class RectanglePolynomial {
  public:
    RectanglePolynomial(std::vector<double> coeffs, double threshold, double half_width,
                        double accuracy)
        : coeffs_(std::move(coeffs)), t_(threshold), width_(half_width), eps_(accuracy) {
        detail::require(!coeffs_.empty(), "polynomial needs at least one coefficient");
        for (std::size_t k = 1; k < coeffs_.size(); k += 2) {
            coeffs_[k] = 0.0;
        }
        while (coeffs_.size() > 1 && coeffs_.back() == 0.0) {
            coeffs_.pop_back();
        }
    }

    [[nodiscard]] const std::vector<double> &coefficients() const noexcept { return coeffs_; }
    [[nodiscard]] std::size_t degree() const noexcept { return coeffs_.size() - 1; }
    [[nodiscard]] double threshold() const noexcept { return t_; }
    [[nodiscard]] double half_width() const noexcept { return width_; }
    [[nodiscard]] double accuracy() const noexcept { return eps_; }

    double operator()(double x) const noexcept { return chebyshev_eval(coeffs_, x); }

    /// Check all three properties on `points` uniform nodes of [-1,1] plus the
    /// band edges.
    [[nodiscard]] GridReport check(std::size_t points = kGridPoints) const {
        std::vector<double> xs;
        xs.reserve(points + 8);
        for (std::size_t i = 0; i < points; ++i) {
            xs.push_back(-1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(points - 1));
        }
        for (const double e : {t_ + width_, t_ - width_, 0.0, 1.0}) {
            xs.push_back(e);
            xs.push_back(-e);
        }
        GridReport r;
        r.points = xs.size();
        r.min_inner = 1.0;
        for (const double x : xs) {
            const double p = (*this)(x);
            const double ax = std::abs(x);
            r.max_abs = std::max(r.max_abs, std::abs(p));
            r.max_asymmetry = std::max(r.max_asymmetry, std::abs(p - (*this)(-x)));
            if (std::abs(p) > 1.0) {
                ++r.bounded_violations;
            }
            if (ax >= t_ + width_) {
                r.min_outer = std::min(r.min_outer, p);
                if (p < 1.0 - eps_ || p > 1.0) {
                    ++r.outer_violations;
                }
            }
            if (ax <= t_ - width_) {
                r.max_inner = std::max(r.max_inner, p);
                r.min_inner = std::min(r.min_inner, p);
                if (p < 0.0 || p > eps_) {
                    ++r.inner_violations;
                }
            }
        }
        return r;
    }

  private:
    std::vector<double> coeffs_;
    double t_;
    double width_;
    double eps_;
};

inline std::size_t rect_degree_budget(double half_width, double eps) {
    return static_cast<std::size_t>(std::floor(kDegreeConstant * std::log(1.0 / eps) / half_width));
}

/**
 * Smooth target for the rectangle polynomial:
 *   F(x) = eps/4 + (1 - eps/2) R(x),
 *   R(x) = 1 - (erf(k(x+t)) - erf(k(x-t)))/2,  k = erfc^{-1}(eps/4)/D.
 * R <= eps/4 on |x| <= t-D and R >= 1 - eps/8 on |x| >= t+D, so any
 * approximation within eps/8 of F satisfies all three properties.
 */
struct RectangleTarget {
    double t;
    double width;
    double eps;
    double steepness;

    RectangleTarget(double threshold, double half_width, double accuracy)
        : t(threshold), width(half_width), eps(accuracy),
          steepness(boost::math::erfc_inv(accuracy / 4.0) / half_width) {}

    double operator()(double x) const noexcept {
        const double r = 1.0 - 0.5 * (std::erf(steepness * (x + t)) - std::erf(steepness * (x - t)));
        return eps / 4.0 + (1.0 - eps / 2.0) * r;
    }
};

namespace detail {

inline bool rect_candidate_ok(const RectangleTarget &target, const RectanglePolynomial &p) {
    constexpr std::size_t dense = 2 * kGridPoints;
    double err = 0.0;
    for (std::size_t i = 0; i < dense; ++i) {
        const double x = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(dense - 1);
        err = std::max(err, std::abs(p(x) - target(x)));
    }
    return err <= target.eps / 8.0 && p.check().violations() == 0;
}

} // namespace detail

/**
 * Even polynomial approximation of the rectangle function with threshold t,
 * half-width D and accuracy eps. The degree is found by doubling and then
 * bisecting over even degrees; construction fails if the degree budget
 * 40 ln(1/eps)/D is exhausted.
 */
inline RectanglePolynomial rect_poly(double t, double half_width, double eps) {
    detail::require(t > 0.0 && t < 1.0, "threshold t must lie in (0,1)");
    detail::require(half_width > 0.0 && half_width <= std::min(t, 1.0 - t),
                    "half-width must satisfy 0 < D <= min(t, 1-t)");
    detail::require(eps > 0.0 && eps < 0.5, "accuracy must lie in (0, 1/2)");
    const RectangleTarget target(t, half_width, eps);
    const std::size_t budget = rect_degree_budget(half_width, eps);
    auto build = [&](std::size_t degree) {
        return RectanglePolynomial(chebyshev_interpolate(target, degree), t, half_width, eps);
    };

    std::size_t lo = 0; // largest degree known to fail
    std::size_t hi = 2;
    while (!detail::rect_candidate_ok(target, build(hi))) {
        lo = hi;
        if (hi >= budget) {
            throw PreconditionError("rectangle polynomial construction failed within degree budget " +
                                    std::to_string(budget));
        }
        hi = std::min(2 * hi, budget - budget % 2);
        if (hi <= lo) {
            throw PreconditionError("rectangle polynomial construction failed within degree budget " +
                                    std::to_string(budget));
        }
    }
    while (hi - lo > 2) {
        std::size_t mid = lo + (hi - lo) / 2;
        mid -= mid % 2;
        if (mid <= lo) {
            break;
        }
        if (detail::rect_candidate_ok(target, build(mid))) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return build(hi);
}

inline nlohmann::json to_json(const GridReport &r) {
    return {{"points", r.points},
            {"violations", r.violations()},
            {"bounded_violations", r.bounded_violations},
            {"outer_violations", r.outer_violations},
            {"inner_violations", r.inner_violations},
            {"max_abs", r.max_abs},
            {"min_outer", r.min_outer},
            {"max_inner", r.max_inner},
            {"min_inner", r.min_inner},
            {"max_asymmetry", r.max_asymmetry}};
}

inline nlohmann::json to_json(const RectanglePolynomial &p) {
    return {{"t", p.threshold()},
            {"width", p.half_width()},
            {"eps", p.accuracy()},
            {"degree", p.degree()},
            {"degree_budget", rect_degree_budget(p.half_width(), p.accuracy())},
            {"basis", "chebyshev"},
            {"coefficients", p.coefficients()}};
}

/// Block encoding and its thin SVD. Singular values are sorted descending.
class BlockEncoding {
  public:
    BlockEncoding(ComplexMatrix u, unsigned witness_qubits) : u_(std::move(u)), witness_(witness_qubits) {
        Eigen::JacobiSVD<ComplexMatrix> svd(u_, Eigen::ComputeThinU | Eigen::ComputeThinV);
        sigma_ = svd.singularValues();
        v_ = svd.matrixV();
        detail::ensure(v_.cols() == u_.cols(), "block encoding needs a full right singular basis");
        for (Eigen::Index i = 0; i < sigma_.size(); ++i) {
            detail::ensure(sigma_[i] <= 1.0 + kUnitaryTol, "singular value above 1");
        }
    }

    [[nodiscard]] const ComplexMatrix &matrix() const noexcept { return u_; }
    [[nodiscard]] const RealVector &singular_values() const noexcept { return sigma_; }
    [[nodiscard]] const ComplexMatrix &right_vectors() const noexcept { return v_; }
    [[nodiscard]] unsigned witness_qubits() const noexcept { return witness_; }

    /// Singular values >= a under the tie rule.
    [[nodiscard]] std::uint64_t count_geq(double a) const noexcept {
        std::uint64_t n = 0;
        for (Eigen::Index i = 0; i < sigma_.size(); ++i) {
            if (sigma_[i] >= a - kTieTol) {
                ++n;
            }
        }
        return n;
    }

  private:
    ComplexMatrix u_;
    unsigned witness_;
    RealVector sigma_;
    ComplexMatrix v_;
};

inline BlockEncoding build_block_encoding(const VerifierCircuit &circuit, const std::vector<bool> &x) {
    return {output_block(circuit, x), circuit.num_witness()};
}

/// V P(Sigma)^2 V^dag, the acceptance operator of P(U).
inline AcceptanceOperator apply_svt(const BlockEncoding &u, const RectanglePolynomial &p) {
    const auto &sigma = u.singular_values();
    RealVector amplified(sigma.size());
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
        const double ps = p(sigma[i]);
        amplified[i] = ps * ps;
    }
    const auto &v = u.right_vectors();
    ComplexMatrix op = v * amplified.cast<Complex>().asDiagonal() * v.adjoint();
    op = (0.5 * (op + op.adjoint())).eval();
    return {std::move(op), u.witness_qubits()};
}

/// Convert an eigenvalue threshold to the matching singular-value threshold.
inline double singular_threshold(double eigen_threshold) {
    detail::require(eigen_threshold >= 0.0 && eigen_threshold <= 1.0,
                    "eigenvalue threshold must lie in [0,1]");
    return std::sqrt(eigen_threshold);
}

struct AmplificationReport {
    AcceptanceOperator op;
    std::size_t degree{0};
    double c{0.0}; ///< singular-value thresholds
    double s{0.0};
    double eps{0.0};
    std::uint64_t n_geq_c{0};
    std::uint64_t n_geq_s{0};
    std::uint64_t in_gap{0}; ///< singular values strictly inside (s, c)
    double trace{0.0};
    double lower{0.0}; ///< N_{>=c} - (2 eps - eps^2) 2^w
    double upper{0.0}; ///< N_{>=s} + eps^2 2^w

    [[nodiscard]] bool sandwich_holds() const noexcept {
        return trace >= lower - 1e-9 && trace <= upper + 1e-9;
    }
};

/**
 * Amplify with t = (s+c)/2, D = (c-s)/2, thresholds taken on singular values.
 * Reports the trace sandwich N_{>=c} - (2eps - eps^2) 2^w <= Tr <= N_{>=s} + eps^2 2^w.
 */
inline AmplificationReport amplify(const BlockEncoding &u, double c, double s, double eps) {
    require_thresholds(c, s);
    const auto poly = rect_poly(0.5 * (c + s), 0.5 * (c - s), eps);
    AmplificationReport r{apply_svt(u, poly)};
    r.degree = poly.degree();
    r.c = c;
    r.s = s;
    r.eps = eps;
    r.n_geq_c = u.count_geq(c);
    r.n_geq_s = u.count_geq(s);
    for (Eigen::Index i = 0; i < u.singular_values().size(); ++i) {
        const double sv = u.singular_values()[i];
        if (sv > s + kTieTol && sv < c - kTieTol) {
            ++r.in_gap;
        }
    }
    const double dim = std::ldexp(1.0, static_cast<int>(u.witness_qubits()));
    r.trace = r.op.trace();
    r.lower = static_cast<double>(r.n_geq_c) - (2.0 * eps - eps * eps) * dim;
    r.upper = static_cast<double>(r.n_geq_s) + eps * eps * dim;
    return r;
}

inline AmplificationReport amplified_acceptance(const VerifierCircuit &circuit,
                                                const std::vector<bool> &x, double c, double s,
                                                double eps) {
    return amplify(build_block_encoding(circuit, x), c, s, eps);
}

} // namespace qcount
