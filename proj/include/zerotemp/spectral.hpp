#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "zerotemp/detail/bigfloat.hpp"
#include "zerotemp/errors.hpp"
#include "zerotemp/potential.hpp"
#include "zerotemp/symbolic.hpp"

namespace zerotemp {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

/// Square matrix of exponents; entry -inf stands for a zero weight.
class LogMatrix {
public:
    LogMatrix() = default;
    explicit LogMatrix(std::size_t n) : n_(n), e_(n * n, neg_inf) {}

    static LogMatrix from_rows(const std::vector<std::vector<double>>& rows) {
        LogMatrix m(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != rows.size()) throw InvalidArgument("LogMatrix: ragged rows");
            for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
        }
        return m;
    }

    std::size_t size() const noexcept { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return e_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return e_[i * n_ + j]; }

    LogMatrix transposed() const {
        LogMatrix t(n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

private:
    std::size_t n_ = 0;
    std::vector<double> e_;
};

struct PerronOptions {
    /// Relative accuracy of the eigenvalue gap to the reference root.
    double tol = 1e-14;
    std::size_t max_iterations = 100000;
    /// Log-matrix whose Perron root the excess is measured against; the root 1 if absent.
    std::optional<LogMatrix> reference;
    /// Raise precision until the gap to the reference root is resolved.
    bool resolve_excess = true;
    mpfr_prec_t initial_bits = 256;
    mpfr_prec_t max_bits = 1 << 14;
};

/// Perron root and eigenvectors of a nonnegative irreducible matrix, in log form.
struct PerronSolution {
    double log_lambda = 0.0;
    std::vector<double> log_right;  ///< right eigenvector, entry 0 equal to 1
    std::vector<double> log_left;   ///< left eigenvector, summing to 1
    double log_reference = 0.0;     ///< log of the reference root
    /// log(log_lambda - log_reference); -inf when not positive at working precision.
    double log_excess = neg_inf;
    bool excess_resolved = false;
    mpfr_prec_t bits = 0;
    std::size_t iterations = 0;
};

namespace detail {

/// Shifted inverse iteration with Collatz-Wielandt bounds at a fixed precision.
class NodaIteration {
public:
    NodaIteration(const LogMatrix& m, mpfr_prec_t bits) : n_(m.size()), bits_(bits) {
        a_.reserve(n_ * n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                a_.push_back(m(i, j) == neg_inf ? BigFloat(bits, 0.0) : BigFloat::exp_of(bits, m(i, j)));
        for (std::size_t i = 0; i < n_; ++i) x_.emplace_back(bits, 1.0);
        upper_ = BigFloat(bits, 0.0);
        lower_ = BigFloat(bits, 0.0);
    }

    void warm_start(const std::vector<BigFloat>& x) {
        for (std::size_t i = 0; i < n_; ++i) mpfr_set(x_[i].get(), x[i].get(), MPFR_RNDN);
    }

    /// Iterate until the bracket is within `rel_target` of |lambda - reference|, or precision floor.
    std::size_t run(const std::optional<BigFloat>& reference, double tol, std::size_t max_iterations) {
        std::size_t it = 0;
        for (;; ++it) {
            bounds();
            BigFloat gap = upper_ - lower_;
            if (gap.sign() <= 0) return it;
            BigFloat target(bits_, tol);
            target *= abs(lower_ - (reference ? *reference : BigFloat(bits_, 1.0)));
            if (gap <= target) return it;
            BigFloat floor_gap(bits_, 1.0);
            mpfr_mul_2si(floor_gap.get(), upper_.get(), -static_cast<long>(bits_) + 24, MPFR_RNDN);
            if (gap <= floor_gap) return it;
            if (it >= max_iterations) throw NumericalError("perron", "iteration cap reached");
            if (!inverse_step()) return it;
        }
    }

    const BigFloat& upper() const { return upper_; }
    const BigFloat& lower() const { return lower_; }
    const std::vector<BigFloat>& vector() const { return x_; }

    BigFloat midpoint() const {
        BigFloat m = upper_ + lower_;
        mpfr_div_2ui(m.get(), m.get(), 1, MPFR_RNDN);
        return m;
    }

private:
    BigFloat& at(std::vector<BigFloat>& v, std::size_t i, std::size_t j) { return v[i * n_ + j]; }

    void bounds() {
        upper_ = BigFloat(bits_, 0.0);
        lower_ = BigFloat(bits_, 0.0);
        for (std::size_t i = 0; i < n_; ++i) {
            BigFloat y(bits_, 0.0);
            for (std::size_t j = 0; j < n_; ++j) y.fma_add(a_[i * n_ + j], x_[j]);
            y /= x_[i];
            if (i == 0 || upper_ < y) upper_ = y;
            if (i == 0 || y < lower_) lower_ = y;
        }
        if (lower_.sign() <= 0) throw NumericalError("perron", "matrix is not irreducible");
    }

    /// Solve (upper I - A) z = x without pivoting; false once the shift is no longer above the root.
    bool inverse_step() {
        std::vector<BigFloat> lu;
        lu.reserve(n_ * n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) {
                BigFloat v(bits_, 0.0);
                v -= a_[i * n_ + j];
                if (i == j) v += upper_;
                lu.push_back(std::move(v));
            }
        std::vector<BigFloat> z = x_;
        for (std::size_t k = 0; k < n_; ++k) {
            const BigFloat pivot = at(lu, k, k);
            if (pivot.sign() <= 0) return false;
            for (std::size_t i = k + 1; i < n_; ++i) {
                if (at(lu, i, k).is_zero()) continue;
                BigFloat f = at(lu, i, k) / pivot;
                for (std::size_t j = k + 1; j < n_; ++j) at(lu, i, j).fms_sub(f, at(lu, k, j));
                z[i].fms_sub(f, z[k]);
            }
        }
        for (std::size_t k = n_; k-- > 0;) {
            for (std::size_t j = k + 1; j < n_; ++j) z[k].fms_sub(at(lu, k, j), z[j]);
            z[k] /= at(lu, k, k);
            if (z[k].sign() <= 0) return false;
        }
        const BigFloat scale = z[0];
        for (auto& v : z) v /= scale;
        x_ = std::move(z);
        return true;
    }

    std::size_t n_;
    mpfr_prec_t bits_;
    std::vector<BigFloat> a_;
    std::vector<BigFloat> x_;
    BigFloat upper_{64};
    BigFloat lower_{64};
};

inline std::vector<double> log_normalized(const std::vector<BigFloat>& x, bool unit_sum) {
    const mpfr_prec_t bits = x.front().precision();
    BigFloat scale = x.front();
    if (unit_sum) {
        scale = BigFloat(bits, 0.0);
        for (const auto& v : x) scale += v;
    }
    std::vector<double> out;
    out.reserve(x.size());
    for (const auto& v : x) out.push_back((v / scale).log_double());
    return out;
}

}  // namespace detail

/// Perron data of exp(m), adaptively raising precision until the excess over the reference is resolved.
inline PerronSolution solve_perron(const LogMatrix& m, const PerronOptions& opts = {}) {
    if (!(opts.tol > 0.0)) throw InvalidArgument("perron: tol must be positive");
    if (m.size() == 0) throw InvalidArgument("perron: empty matrix");
    const double guard_bits = std::log2(1.0 / opts.tol) + 32.0;

    PerronSolution out;
    std::optional<std::vector<detail::BigFloat>> right_start, left_start;
    const LogMatrix mt = m.transposed();
    for (mpfr_prec_t bits = opts.initial_bits;; bits *= 2) {
        std::optional<detail::BigFloat> reference;
        if (opts.reference) {
            detail::NodaIteration ref(*opts.reference, bits);
            ref.run(std::nullopt, 0.0, opts.max_iterations);
            reference = ref.midpoint();
        }
        detail::NodaIteration right(m, bits);
        if (right_start) right.warm_start(*right_start);
        std::size_t iterations = right.run(reference, opts.tol, opts.max_iterations);
        detail::NodaIteration left(mt, bits);
        if (left_start) left.warm_start(*left_start);
        iterations += left.run(reference, opts.tol, opts.max_iterations);

        const detail::BigFloat lambda = right.midpoint();
        const detail::BigFloat ref_root = reference ? *reference : detail::BigFloat(bits, 1.0);
        detail::BigFloat excess = log(lambda) - log(ref_root);
        detail::BigFloat resolution(bits, 1.0);
        mpfr_mul_2si(resolution.get(), resolution.get(), -static_cast<long>(bits - guard_bits), MPFR_RNDN);
        const bool resolved = resolution < abs(lambda - ref_root) / lambda;

        out.iterations += iterations;
        if (resolved || !opts.resolve_excess || bits * 2 > opts.max_bits) {
            out.log_lambda = log(lambda).to_double();
            out.log_reference = log(ref_root).to_double();
            out.excess_resolved = resolved;
            out.log_excess = (resolved && excess.sign() > 0) ? log(excess).to_double() : neg_inf;
            out.log_right = detail::log_normalized(right.vector(), false);
            out.log_left = detail::log_normalized(left.vector(), true);
            out.bits = bits;
            return out;
        }
        right_start = right.vector();
        left_start = left.vector();
    }
}

/// Log-domain transfer matrix: entry (target, source) = beta * A(source word extended by target's last symbol).
inline LogMatrix transfer_matrix(const LocallyConstantPotential& a, double beta,
                                 const LocallyConstantPotential* additive = nullptr) {
    if (!(beta > 0.0)) throw InvalidArgument("transfer_matrix: beta must be positive");
    if (additive && additive->words() != a.words())
        throw InvalidArgument("transfer_matrix: perturbation table does not match the potential");
    LogMatrix t(a.nodes().size());
    for (std::size_t i = 0; i < a.words().size(); ++i) {
        double v = beta * a.values()[i];
        if (additive) v += additive->values()[i];
        t(a.edge_target(i), a.edge_source(i)) = v;
    }
    return t;
}

/// Equilibrium data of beta*A (+ optional unscaled perturbation).
class PerronData {
public:
    PerronData(const LocallyConstantPotential& a, double beta, PerronSolution sol,
               const LocallyConstantPotential* additive)
        : a_(a), beta_(beta), sol_(std::move(sol)) {
        g_.resize(a.words().size());
        for (std::size_t i = 0; i < g_.size(); ++i) {
            double v = beta * a.values()[i];
            if (additive) v += additive->values()[i];
            g_[i] = v + sol_.log_right[a.edge_source(i)] - sol_.log_right[a.edge_target(i)] - sol_.log_lambda;
        }
        std::vector<double> logs(a.nodes().size());
        double top = neg_inf;
        for (std::size_t i = 0; i < logs.size(); ++i) {
            logs[i] = sol_.log_right[i] + sol_.log_left[i];
            top = std::max(top, logs[i]);
        }
        double total = 0.0;
        for (double l : logs) total += std::exp(l - top);
        log_node_mass_.resize(logs.size());
        for (std::size_t i = 0; i < logs.size(); ++i) log_node_mass_[i] = logs[i] - top - std::log(total);
    }

    double beta() const noexcept { return beta_; }
    double log_lambda() const noexcept { return sol_.log_lambda; }
    double pressure() const noexcept { return sol_.log_lambda; }
    /// log(P - h) when positive and resolved; -inf otherwise.
    double pressure_excess() const noexcept { return sol_.log_excess; }
    bool excess_resolved() const noexcept { return sol_.excess_resolved; }
    const std::vector<double>& log_H() const noexcept { return sol_.log_right; }
    const std::vector<double>& log_nu() const noexcept { return sol_.log_left; }
    const PerronSolution& solution() const noexcept { return sol_; }
    const LocallyConstantPotential& potential() const noexcept { return a_; }

    std::vector<double> nu() const {
        std::vector<double> v;
        for (double l : sol_.log_left) v.push_back(std::exp(l));
        return v;
    }

    /// log of the equilibrium mass of [w]; -inf for inadmissible words.
    double log_cylinder_mass(const Word& w) const {
        const std::size_t k = a_.state_length();
        if (w.empty() || !a_.sft().admissible(w)) return neg_inf;
        if (w.size() < k) {
            double top = neg_inf;
            std::vector<double> parts;
            for (std::size_t i = 0; i < a_.nodes().size(); ++i)
                if (std::equal(w.begin(), w.end(), a_.nodes()[i].begin())) parts.push_back(log_node_mass_[i]);
            for (double p : parts) top = std::max(top, p);
            if (top == neg_inf) return neg_inf;
            double s = 0.0;
            for (double p : parts) s += std::exp(p - top);
            return top + std::log(s);
        }
        double lm = log_node_mass_[a_.node_index(Word(w.end() - static_cast<std::ptrdiff_t>(k), w.end()))];
        for (std::size_t i = 0; i + k < w.size(); ++i) {
            Word window(w.begin() + static_cast<std::ptrdiff_t>(i),
                        w.begin() + static_cast<std::ptrdiff_t>(i + k + 1));
            lm += g_[a_.word_index(window)];
        }
        return lm;
    }

    /// Integral of A against the equilibrium measure.
    double mean_potential() const {
        double s = 0.0;
        for (std::size_t i = 0; i < a_.words().size(); ++i)
            s += a_.values()[i] * std::exp(log_cylinder_mass(a_.words()[i]));
        return s;
    }

private:
    LocallyConstantPotential a_;
    double beta_;
    PerronSolution sol_;
    std::vector<double> g_;
    std::vector<double> log_node_mass_;
};

/// Perron data of beta*A; `options.reference` sets the entropy the excess is measured from.
inline PerronData perron(const LocallyConstantPotential& a, double beta, const PerronOptions& options = {},
                         const LocallyConstantPotential* additive = nullptr) {
    if (!a.sft().is_aperiodic()) throw InvalidArgument("perron: shift must be aperiodic");
    return PerronData(a, beta, solve_perron(transfer_matrix(a, beta, additive), options), additive);
}

inline double equilibrium_cylinder_mass(const PerronData& p, const Word& w) {
    return std::exp(p.log_cylinder_mass(w));
}

struct Interval {
    double lo;
    double hi;
    bool contains(double x, double slack = 0.0) const { return lo - slack <= x && x <= hi + slack; }
};

inline Interval pressure_bounds_under_perturbation(double pressure, double b_sup) {
    if (b_sup < 0.0) throw InvalidArgument("pressure_bounds_under_perturbation: B_sup must be >= 0");
    return {pressure - b_sup, pressure + b_sup};
}

}  // namespace zerotemp
