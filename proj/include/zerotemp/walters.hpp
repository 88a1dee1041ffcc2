#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "zerotemp/detail/logsum.hpp"
#include "zerotemp/errors.hpp"
#include "zerotemp/maxplus.hpp"
#include "zerotemp/spectral.hpp"

namespace zerotemp {

/// a_2, a_3, ...: explicit head values, then alpha * rho^(n-1).
struct GeometricTailSequence {
    std::vector<double> head;
    double alpha = 0.0;
    double rho = 0.5;

    static GeometricTailSequence geometric(double alpha, double rho) { return {{}, alpha, rho}; }

    /// a_n for n >= 2.
    double term(std::size_t n) const {
        if (n < 2) throw InvalidArgument("GeometricTailSequence: index starts at 2");
        if (n - 2 < head.size()) return head[n - 2];
        return alpha * std::pow(rho, static_cast<double>(n - 1));
    }

    /// First index covered by the geometric rule.
    std::size_t tail_start() const { return head.size() + 2; }

    /// Sum of all terms.
    double sum() const {
        double s = 0.0;
        for (double h : head) s += h;
        return s + alpha * std::pow(rho, static_cast<double>(tail_start() - 1)) / (1.0 - rho);
    }

    /// Smallest K with |a_n| <= K theta^n for all n.
    double lipschitz_constant(double theta) const {
        double k = 0.0;
        for (std::size_t n = 2; n < tail_start(); ++n)
            k = std::max(k, std::abs(term(n)) / std::pow(theta, static_cast<double>(n)));
        const std::size_t n = tail_start();
        return std::max(k, std::abs(term(n)) / std::pow(theta, static_cast<double>(n)));
    }
};

/// Walters potential on the full 2-shift.
struct WaltersPotential {
    double b = -1.0;
    double d = -1.0;
    GeometricTailSequence a_seq;
    GeometricTailSequence c_seq;
    double theta = 0.5;
    /// Allow zero terms, only requiring b + d < 0 and a_2, c_2 < 0.
    bool relaxed = false;

    void validate() const {
        if (!(theta > 0.0 && theta < 1.0)) throw InvalidArgument("WaltersPotential: theta must lie in (0,1)");
        for (const auto* s : {&a_seq, &c_seq}) {
            if (!(s->rho > 0.0 && s->rho < 1.0)) throw InvalidArgument("WaltersPotential: rho must lie in (0,1)");
            if (s->rho > theta) throw InvalidArgument("WaltersPotential: tail decays slower than theta^n");
            if (!std::isfinite(s->alpha)) throw InvalidArgument("WaltersPotential: alpha must be finite");
            for (std::size_t n = 2; n <= s->tail_start(); ++n) {
                const double v = s->term(n);
                if (v > 0.0 || (!relaxed && v == 0.0) || (n == 2 && v == 0.0))
                    throw InvalidArgument("WaltersPotential: a_n and c_n must be negative");
            }
        }
        if (relaxed) {
            if (!(b + d < 0.0) || b > 0.0 || d > 0.0) throw InvalidArgument("WaltersPotential: need b, d <= 0 and b + d < 0");
        } else if (!(b < 0.0 && d < 0.0)) {
            throw InvalidArgument("WaltersPotential: b and d must be negative");
        }
    }

    double a() const { return a_seq.sum(); }
    double c() const { return c_seq.sum(); }

    /// Relabel 0 <-> 1.
    WaltersPotential mirrored() const { return {d, b, c_seq, a_seq, theta, relaxed}; }

    /// Values on the cylinders [0^n 1] (n >= 1): b for n = 1, a_n otherwise.
    double zero_run(std::size_t n) const { return n == 1 ? b : a_seq.term(n); }
    double one_run(std::size_t n) const { return n == 1 ? d : c_seq.term(n); }
};

inline double walters_gamma(const WaltersPotential& w) {
    const double a = w.a(), c = w.c();
    return std::max({a + w.b + w.d, c + w.b + w.d, (a + c + w.b + w.d) / 2.0});
}

/// Cost matrix [[a+b+d, c+d], [a+b, b+c+d]].
inline MaxPlusMatrix<double> walters_cost_matrix(const WaltersPotential& w) {
    const double a = w.a(), c = w.c();
    return {{a + w.b + w.d, c + w.d}, {a + w.b, w.b + c + w.d}};
}

/// Smallest J with K theta^J / (1 - theta) < 1e-15 |sum|, at least the explicit head, capped at 1e5.
inline std::size_t walters_truncation(const GeometricTailSequence& s, double theta) {
    const double k = s.lipschitz_constant(theta);
    const double target = 1e-15 * std::max(std::abs(s.sum()), 1e-300);
    std::size_t j = 1;
    double bound = k * theta / (1.0 - theta);
    while (bound >= target && j < 100000) {
        bound *= theta;
        ++j;
    }
    return std::max(j, s.head.size() + 1);
}

inline std::size_t walters_truncation(const WaltersPotential& w) {
    return std::max(walters_truncation(w.a_seq, w.theta), walters_truncation(w.c_seq, w.theta));
}

/// log F = log(1 + sum_j e^{beta s_j - j z}) and log G = log(1 + sum_j (j+1) e^{beta s_j - j z}).
struct SeriesLogs {
    double log_f;
    double log_g;
};

inline SeriesLogs walters_series(const GeometricTailSequence& s, double beta, double z, std::size_t trunc,
                                 const char* op) {
    if (!(z > 0.0)) throw NumericalError(op, "divergent series: perturbation too large for series method");
    detail::LogSum f, g;
    f.add(0.0);
    g.add(0.0);
    double partial = 0.0;
    for (std::size_t j = 1; j <= trunc; ++j) {
        partial += s.term(j + 1);
        const double e = beta * partial - static_cast<double>(j) * z;
        f.add(e);
        g.add(e + std::log(static_cast<double>(j + 1)));
    }
    const double k = static_cast<double>(trunc + 1);
    const double inv = -detail::log_one_minus_exp_neg(z);
    const double tail = beta * s.sum() - k * z + inv;
    f.add(tail);
    g.add(tail + detail::log_add_exp(std::log(k), inv));
    return {f.log_value(), g.log_value()};
}

/// Pressure of beta A + B (B = a_beta on [0]) with the gap P - a_beta kept at full relative precision.
struct WaltersRoot {
    double pressure;
    double gap;
};

/// Root of 2P = beta(b+d) + a_beta + log F_a(P - a_beta) + log F_c(P).
/// For a_beta > 0 the unknown is log(P - a_beta), otherwise log P.
inline WaltersRoot walters_pressure_root(const WaltersPotential& w, double beta, double a_beta = 0.0,
                                         std::optional<std::size_t> trunc = std::nullopt) {
    w.validate();
    if (!(beta > 0.0)) throw InvalidArgument("walters_pressure: beta must be positive");
    if (!std::isfinite(a_beta)) throw InvalidArgument("walters_pressure: perturbation must be finite");
    const std::size_t j = trunc.value_or(walters_truncation(w));
    const bool by_gap = a_beta > 0.0;
    auto unpack = [&](double t) {
        const double e = std::exp(t);
        return by_gap ? WaltersRoot{a_beta + e, e} : WaltersRoot{e, e - a_beta};
    };
    auto phi = [&](double t) {
        const WaltersRoot r = unpack(t);
        if (!(r.gap > 0.0)) return std::numeric_limits<double>::infinity();
        return beta * (w.b + w.d) + a_beta + walters_series(w.a_seq, beta, r.gap, j, "walters_pressure").log_f +
               walters_series(w.c_seq, beta, r.pressure, j, "walters_pressure").log_f - 2.0 * r.pressure;
    };
    double lo = beta * walters_gamma(w) - 10.0;
    const double hi = std::log(std::log(2.0) + std::abs(a_beta)) + 1.0;
    double f_lo = phi(lo);
    for (int widen = 0; widen < 64 && !(f_lo > 0.0); ++widen) f_lo = phi(lo -= 10.0);
    const double f_hi = phi(hi);
    if (!(f_lo > 0.0) || !(f_hi < 0.0)) throw NumericalError("walters_pressure", "root not bracketed");
    std::uintmax_t iterations = 200;
    const auto root = boost::math::tools::toms748_solve(phi, lo, hi, f_lo, f_hi,
                                                        boost::math::tools::eps_tolerance<double>(50), iterations);
    if (iterations >= 200) throw NumericalError("walters_pressure", "root finder did not converge");
    return unpack((root.first + root.second) / 2.0);
}

inline double walters_pressure(const WaltersPotential& w, double beta, double a_beta = 0.0,
                               std::optional<std::size_t> trunc = std::nullopt) {
    return walters_pressure_root(w, beta, a_beta, trunc).pressure;
}

struct CylinderRatio {
    double log_ratio;  ///< log(S_0 / S_1)
    double ratio;
    double mu0;  ///< mass of [0]
};

/// S_0 / S_1 and mu([0]) for beta A + B with B = a_beta on [0].
inline CylinderRatio walters_cylinder_ratio(const WaltersPotential& w, double beta, const WaltersRoot& root,
                                            std::optional<std::size_t> trunc = std::nullopt) {
    const std::size_t j = trunc.value_or(walters_truncation(w));
    const auto s0 = walters_series(w.a_seq, beta, root.gap, j, "walters_cylinder_ratio");
    const auto s1 = walters_series(w.c_seq, beta, root.pressure, j, "walters_cylinder_ratio");
    const double lr = (s0.log_g - s0.log_f) - (s1.log_g - s1.log_f);
    return {lr, std::exp(lr), 1.0 / (1.0 + std::exp(-lr))};
}

inline CylinderRatio walters_cylinder_ratio(const WaltersPotential& w, double a_beta, double beta, double pressure,
                                            std::optional<std::size_t> trunc = std::nullopt) {
    return walters_cylinder_ratio(w, beta, WaltersRoot{pressure, pressure - a_beta}, trunc);
}

/// ((P^2 + e^{beta a}) / (P + e^{beta a})) * ((P + e^{beta c}) / (P^2 + e^{beta c})).
inline double walters_asymptotic_ratio(const WaltersPotential& w, double pressure, double beta) {
    if (!(pressure > 0.0)) throw InvalidArgument("walters_asymptotic_ratio: P must be positive");
    using detail::log_add_exp;
    const double lp = std::log(pressure), ba = beta * w.a(), bc = beta * w.c();
    return std::exp(log_add_exp(2 * lp, ba) - log_add_exp(lp, ba) + log_add_exp(lp, bc) - log_add_exp(2 * lp, bc));
}

/// log(H(1^inf) / H(0^inf)) from the eigen relations at the two fixed points.
inline double walters_log_h_ratio(const WaltersPotential& w, double beta, const WaltersRoot& root,
                                  std::optional<std::size_t> trunc = std::nullopt) {
    if (!(root.gap > 0.0)) throw NumericalError("walters_log_h_ratio", "perturbation not below the pressure");
    const std::size_t j = trunc.value_or(walters_truncation(w));
    const auto s1 = walters_series(w.c_seq, beta, root.pressure, j, "walters_log_h_ratio");
    const double a_beta = root.pressure - root.gap;
    const double log_gap_b = a_beta + std::log(std::expm1(root.gap));
    const double log_gap_1 = std::log(std::expm1(root.pressure));
    return root.pressure + log_gap_b - beta * w.d - log_gap_1 - s1.log_f;
}

inline double walters_log_h_ratio(const WaltersPotential& w, double a_beta, double beta, double pressure,
                                  std::optional<std::size_t> trunc = std::nullopt) {
    return walters_log_h_ratio(w, beta, WaltersRoot{pressure, pressure - a_beta}, trunc);
}

enum class WaltersRegime { symmetric, two_cycle_dominant, zero_dominant, boundary_golden };

inline std::string to_string(WaltersRegime r) {
    switch (r) {
        case WaltersRegime::symmetric: return "symmetric";
        case WaltersRegime::two_cycle_dominant: return "two-cycle-dominant";
        case WaltersRegime::zero_dominant: return "zero-dominant";
        case WaltersRegime::boundary_golden: return "boundary-golden";
    }
    return "unknown";
}

struct WaltersZeroTempReport {
    double gamma = 0.0;
    WaltersRegime regime = WaltersRegime::symmetric;
    /// Classified on the relabelled potential (c > a).
    bool mirrored = false;
    double limit_mass_0 = 0.5;
    std::optional<double> l_limit;

    std::string tag() const { return to_string(regime) + (mirrored ? " (mirrored)" : ""); }
};

inline const double golden_ratio = (1.0 + std::sqrt(5.0)) / 2.0;
inline const double golden_mass = (10.0 + 2.0 * std::sqrt(5.0)) / 20.0;

inline WaltersZeroTempReport classify_regime(const WaltersPotential& w, double tie_tol = 1e-12) {
    w.validate();
    WaltersZeroTempReport r;
    r.gamma = walters_gamma(w);
    auto equal = [&](double x, double y) { return std::abs(x - y) <= tie_tol * (1.0 + std::abs(x) + std::abs(y)); };
    double a = w.a(), c = w.c();
    if (equal(a, c)) {
        r.regime = WaltersRegime::symmetric;
        return r;
    }
    if (c > a) {
        std::swap(a, c);
        r.mirrored = true;
    }
    double mass = 0.5;
    const double lhs = a + w.b + w.d;
    if (equal(lhs, c)) {
        r.regime = WaltersRegime::boundary_golden;
        mass = golden_mass;
        r.l_limit = golden_ratio;
    } else if (lhs < c) {
        r.regime = WaltersRegime::two_cycle_dominant;
    } else {
        r.regime = WaltersRegime::zero_dominant;
        mass = 1.0;
    }
    r.limit_mass_0 = r.mirrored ? 1.0 - mass : mass;
    return r;
}

enum class PerturbationKind { first_coord, cylinder_indicator };

struct StabilityRow {
    double beta = 0.0;
    double pressure = 0.0;
    double pressure_plus = 0.0;
    double pressure_minus = 0.0;
    double mu0 = 0.0;
    double mu0_plus = 0.0;
    double mu0_minus = 0.0;
    double v1 = 0.0;  ///< (1/beta) log H(1^inf), with H(0^inf) = 1
    double v1_plus = 0.0;
    double v1_minus = 0.0;
    bool sandwich_ok = true;

    double mu_gap() const { return std::max(std::abs(mu0_plus - mu0), std::abs(mu0_minus - mu0)); }
    double v1_gap() const { return std::max(std::abs(v1_plus - v1), std::abs(v1_minus - v1)); }
};

struct StabilityReport {
    double delta = 0.0;
    double gamma = 0.0;
    std::vector<StabilityRow> rows;
    double sup_mu_gap_tail = 0.0;  ///< over the second half of the grid
    double sup_v1_gap_tail = 0.0;
    bool gap_shrinks = true;
    bool sandwich_ok = true;
};

namespace detail {

struct PerturbedPoint {
    double pressure, mu0, v1;
};

inline PerturbedPoint walters_point(const WaltersPotential& w, double a_beta, double beta, std::size_t trunc) {
    const WaltersRoot r = walters_pressure_root(w, beta, a_beta, trunc);
    return {r.pressure, walters_cylinder_ratio(w, beta, r, trunc).mu0, walters_log_h_ratio(w, beta, r, trunc) / beta};
}

}  // namespace detail

/// Perturbation by +-e^{beta delta} on [omega]; first-coord is the case omega = 0.
inline StabilityReport perturbation_stability_experiment(const WaltersPotential& w, double delta,
                                                         PerturbationKind kind, const std::vector<double>& beta_grid,
                                                         Symbol omega = 0) {
    w.validate();
    if (beta_grid.empty()) throw InvalidArgument("perturbation_stability_experiment: empty beta grid");
    if (kind == PerturbationKind::first_coord && omega != 0)
        throw InvalidArgument("perturbation_stability_experiment: first-coordinate perturbations live on [0]");
    if (omega > 1) throw InvalidArgument("perturbation_stability_experiment: omega must be 0 or 1");
    const WaltersPotential base = omega == 0 ? w : w.mirrored();
    const std::size_t trunc = walters_truncation(base);
    StabilityReport rep;
    rep.delta = delta;
    rep.gamma = walters_gamma(w);
    for (double beta : beta_grid) {
        const double size = std::exp(beta * delta);
        auto u = detail::walters_point(base, 0.0, beta, trunc);
        auto p = detail::walters_point(base, size, beta, trunc);
        auto m = detail::walters_point(base, -size, beta, trunc);
        if (omega == 1)
            for (auto* q : {&u, &p, &m}) {
                q->mu0 = 1.0 - q->mu0;
                q->v1 = -q->v1;
            }
        StabilityRow row{beta, u.pressure, p.pressure, m.pressure, u.mu0, p.mu0, m.mu0, u.v1, p.v1, m.v1, true};
        const auto box = pressure_bounds_under_perturbation(u.pressure, size);
        const double slack = 1e-12 * std::max(u.pressure, size);
        row.sandwich_ok = box.contains(p.pressure, slack) && box.contains(m.pressure, slack);
        rep.sandwich_ok = rep.sandwich_ok && row.sandwich_ok;
        rep.rows.push_back(row);
    }
    const std::size_t from = rep.rows.size() / 2;
    for (std::size_t i = from; i < rep.rows.size(); ++i) {
        rep.sup_mu_gap_tail = std::max(rep.sup_mu_gap_tail, rep.rows[i].mu_gap());
        rep.sup_v1_gap_tail = std::max(rep.sup_v1_gap_tail, rep.rows[i].v1_gap());
    }
    rep.gap_shrinks = rep.rows.back().mu_gap() <= rep.rows[from].mu_gap() + 1e-15;
    return rep;
}

}  // namespace zerotemp
