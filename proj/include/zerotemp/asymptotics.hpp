#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "zerotemp/aubry.hpp"
#include "zerotemp/detail/parallel.hpp"
#include "zerotemp/maxplus.hpp"
#include "zerotemp/spectral.hpp"

namespace zerotemp {

/// 2, 4, 8, ..., 256.
inline std::vector<double> default_beta_grid() {
    std::vector<double> g;
    for (double b = 2.0; b <= 256.0; b *= 2.0) g.push_back(b);
    return g;
}

struct GammaEstimate {
    std::vector<double> beta_grid;
    std::vector<double> pressure;
    std::vector<double> log_excess;  ///< log(P(beta A) - h)
    std::vector<double> gamma_hat;   ///< log_excess / beta
    double gamma_maxplus = 0.0;
    double h = 0.0;
    AubryDecomposition aubry;

    bool is_non_increasing(double slack = 1e-12) const {
        for (std::size_t i = 1; i < gamma_hat.size(); ++i)
            if (gamma_hat[i] > gamma_hat[i - 1] + slack) return false;
        return true;
    }

    /// Smallest C with |gamma_hat - gamma_maxplus| <= C / beta over grid points [from, to).
    double rate_constant(std::size_t from, std::size_t to) const {
        double c = 0.0;
        for (std::size_t i = from; i < to; ++i)
            c = std::max(c, beta_grid[i] * std::abs(gamma_hat[i] - gamma_maxplus));
        return c;
    }
};

inline void require_increasing(const std::vector<double>& grid, const char* op) {
    if (grid.empty()) throw InvalidArgument(std::string(op) + ": empty beta grid");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0)) throw InvalidArgument(std::string(op) + ": beta must be positive");
        if (i > 0 && !(grid[i] > grid[i - 1])) throw InvalidArgument(std::string(op) + ": beta grid must increase");
    }
}

inline GammaEstimate estimate_gamma(const LocallyConstantPotential& a, const std::vector<double>& beta_grid,
                                    double tol = 1e-14, std::size_t threads = 1) {
    require_increasing(beta_grid, "estimate_gamma");
    if (!is_normalized_for_optimization(a))
        throw InvalidArgument("estimate_gamma: potential must be non-positive with maximal cycle mean 0");
    GammaEstimate est;
    est.beta_grid = beta_grid;
    est.aubry = decompose_aubry(WordGraph(a));
    est.h = est.aubry.entropy;
    PerronOptions opts;
    opts.tol = tol;
    opts.reference = est.aubry.entropy_reference();
    auto solved = detail::parallel_map<PerronSolution>(
        beta_grid.size(), [&](std::size_t i) { return solve_perron(transfer_matrix(a, beta_grid[i]), opts); },
        threads);
    for (std::size_t i = 0; i < beta_grid.size(); ++i) {
        if (solved[i].log_excess == neg_inf)
            throw NumericalError("estimate_gamma", "P(beta A) - h is not positive at beta = " +
                                                       std::to_string(beta_grid[i]));
        est.pressure.push_back(solved[i].log_lambda);
        est.log_excess.push_back(solved[i].log_excess);
        est.gamma_hat.push_back(solved[i].log_excess / beta_grid[i]);
    }
    est.gamma_maxplus = gamma_maxplus(est.aubry);
    return est;
}

struct SubactionEstimate {
    double beta = 0.0;
    std::vector<double> V_hat;  ///< per node, (1/beta) log H
    double calibration_residual = 0.0;
    std::size_t eigenspace_dim = 0;
    /// Basis offsets of the max-plus eigenspace on the maximal components.
    std::vector<std::vector<double>> eigenvector_offsets;
    /// Reconstruction from the eigenvector and Mañé values; empty when the eigenspace is not a line.
    std::vector<double> V_rec;
    double reconstruction_gap = neg_inf;
};

/// max_x |max_{z -> x} [A(z) + V(z) - V(x)]| over the word graph.
inline double calibration_residual(const WordGraph& g, const std::vector<double>& v) {
    double worst = 0.0;
    for (std::size_t x = 0; x < g.size(); ++x) {
        double best = neg_inf;
        for (std::size_t z = 0; z < g.size(); ++z)
            if (g.has_edge(z, x)) best = std::max(best, g.weight(z, x) + v[z] - v[x]);
        worst = std::max(worst, std::abs(best));
    }
    return worst;
}

/// V(x) = max_j [V(Σ_j) + S_j(x)], shifted so that the 0-word gets 0.
inline std::vector<double> reconstruct_subaction(const AubryDecomposition& d, const std::vector<double>& component_values) {
    const std::size_t n = d.mane.size();
    std::vector<double> v(n, neg_inf);
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t j = 0; j < d.components.size(); ++j) {
            const auto& comp = d.components[j];
            const bool inside = std::find(comp.begin(), comp.end(), x) != comp.end();
            const double s = inside ? 0.0 : d.mane[comp.front()][x];
            v[x] = std::max(v[x], component_values[j] + s);
        }
    const double base = v[0];
    for (double& x : v) x -= base;
    return v;
}

inline SubactionEstimate estimate_subaction(const LocallyConstantPotential& a, double beta, double tol = 1e-14) {
    PerronOptions opts;
    opts.tol = tol;
    const PerronData p = perron(a, beta, opts);
    const WordGraph g(a);
    SubactionEstimate s;
    s.beta = beta;
    for (double l : p.log_H()) s.V_hat.push_back(l / beta);
    s.calibration_residual = calibration_residual(g, s.V_hat);

    const AubryDecomposition d = decompose_aubry(g);
    if (d.cost.size() == 0) return s;
    const auto eig = mp_eigenvectors(maximal_cost(d));
    s.eigenspace_dim = eig.eigenspace_dim;
    s.eigenvector_offsets = eig.eigenvectors;
    if (eig.eigenspace_dim != 1) return s;
    s.V_rec = reconstruct_subaction(d, extend_to_small_components(d, eig.eigenvectors.front()));
    s.reconstruction_gap = 0.0;
    for (std::size_t x = 0; x < s.V_rec.size(); ++x)
        s.reconstruction_gap = std::max(s.reconstruction_gap, std::abs(s.V_rec[x] - s.V_hat[x]));
    return s;
}

struct LimitMeasureEstimate {
    double beta = 0.0;
    std::vector<std::pair<Word, double>> masses;
    /// Equilibrium mass of the cylinders of Aubry nodes.
    double aubry_mass = 0.0;
};

inline LimitMeasureEstimate limit_measure_estimate(const LocallyConstantPotential& a, double beta,
                                                   const std::vector<Word>& words, double tol = 1e-14) {
    PerronOptions opts;
    opts.tol = tol;
    const PerronData p = perron(a, beta, opts);
    LimitMeasureEstimate out;
    out.beta = beta;
    for (const Word& w : words) out.masses.emplace_back(w, equilibrium_cylinder_mass(p, w));
    const AubryDecomposition d = decompose_aubry(WordGraph(a));
    for (const auto& comp : d.components)
        for (std::size_t node : comp) out.aubry_mass += equilibrium_cylinder_mass(p, a.nodes()[node]);
    return out;
}

}  // namespace zerotemp
