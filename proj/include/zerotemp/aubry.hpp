#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "zerotemp/detail/graph.hpp"
#include "zerotemp/errors.hpp"
#include "zerotemp/maxplus.hpp"
#include "zerotemp/potential.hpp"
#include "zerotemp/spectral.hpp"

namespace zerotemp {

/// Weighted graph on k-words; the edge u -> v carries A on the (k+1)-word u·v_last.
class WordGraph {
public:
    explicit WordGraph(const LocallyConstantPotential& a) : a_(a), n_(a.nodes().size()) {
        weight_.assign(n_, std::vector<double>(n_, neg_inf));
        for (std::size_t i = 0; i < a.words().size(); ++i)
            weight_[a.edge_source(i)][a.edge_target(i)] = a.values()[i];
    }

    std::size_t size() const noexcept { return n_; }
    const LocallyConstantPotential& potential() const noexcept { return a_; }
    const std::vector<Word>& nodes() const noexcept { return a_.nodes(); }
    double weight(std::size_t u, std::size_t v) const { return weight_[u][v]; }
    bool has_edge(std::size_t u, std::size_t v) const { return weight_[u][v] != neg_inf; }

    MaxPlusMatrix<double> as_maxplus() const {
        MaxPlusMatrix<double> m(n_);
        for (std::size_t u = 0; u < n_; ++u)
            for (std::size_t v = 0; v < n_; ++v) m(u, v) = weight_[u][v];
        return m;
    }

private:
    LocallyConstantPotential a_;
    std::size_t n_;
    std::vector<std::vector<double>> weight_;
};

/// Maximum mean weight over cycles of the graph, i.e. m(A).
inline double max_cycle_mean(const WordGraph& g) { return mp_eigenvalue(g.as_maxplus()); }

/// Best path weights of length >= 1 from `source` to every node, by longest-path relaxation.
inline std::vector<double> mane_from(const WordGraph& g, std::size_t source) {
    const std::size_t n = g.size();
    std::vector<double> dist(n, neg_inf);
    for (std::size_t v = 0; v < n; ++v) dist[v] = g.weight(source, v);
    for (std::size_t pass = 0; pass <= n; ++pass) {
        bool changed = false;
        for (std::size_t u = 0; u < n; ++u) {
            if (dist[u] == neg_inf) continue;
            for (std::size_t v = 0; v < n; ++v) {
                if (!g.has_edge(u, v)) continue;
                const double cand = dist[u] + g.weight(u, v);
                if (cand > dist[v]) {
                    dist[v] = cand;
                    changed = true;
                }
            }
        }
        if (!changed) return dist;
    }
    throw NumericalError("mane_potential", "positive cycle found; the potential is not normalized (m(A) > 0)");
}

/// All-pairs Mañé values S(u, v).
inline std::vector<std::vector<double>> mane_table(const WordGraph& g) {
    std::vector<std::vector<double>> s;
    for (std::size_t u = 0; u < g.size(); ++u) s.push_back(mane_from(g, u));
    return s;
}

inline double mane_potential(const WordGraph& g, std::size_t u, std::size_t v) {
    return mane_from(g, u).at(v);
}

inline bool symmetrized_mane_check(const WordGraph& g, std::size_t u, std::size_t v, double tol = 1e-12) {
    const double s = mane_potential(g, u, v) + mane_potential(g, v, u);
    return s != neg_inf && std::abs(s) <= tol;
}

struct FlaggedEdge {
    std::size_t component;
    std::size_t source;
    std::size_t target;
};

struct AubryDecomposition {
    std::vector<std::vector<std::size_t>> components;
    std::vector<double> entropies;
    double entropy = 0.0;  ///< maximal component entropy h
    std::vector<std::size_t> maximal_set;
    /// Cost between components; 0x0 when every edge is critical.
    MaxPlusMatrix<double> cost;
    std::vector<std::vector<bool>> critical_edge;
    std::vector<std::vector<double>> mane;
    /// Non-critical edges joining two nodes of the same component; included in the cost.
    std::vector<FlaggedEdge> flagged_internal_edges;

    std::size_t component_of(std::size_t node) const {
        for (std::size_t i = 0; i < components.size(); ++i)
            if (std::find(components[i].begin(), components[i].end(), node) != components[i].end()) return i;
        return components.size();
    }

    /// 0/1 log adjacency of the first maximal-entropy component.
    LogMatrix entropy_reference() const { return component_adjacency(maximal_set.front()); }

    LogMatrix component_adjacency(std::size_t i) const {
        const auto& comp = components[i];
        LogMatrix t(comp.size());
        for (std::size_t r = 0; r < comp.size(); ++r)
            for (std::size_t c = 0; c < comp.size(); ++c)
                if (critical_edge[comp[c]][comp[r]]) t(r, c) = 0.0;
        return t;
    }
};

inline constexpr double critical_edge_threshold = -1e-12;
inline constexpr double entropy_tie_tolerance = 1e-9;

inline AubryDecomposition decompose_aubry(const WordGraph& g) {
    const std::size_t n = g.size();
    AubryDecomposition d;
    d.mane = mane_table(g);
    d.critical_edge.assign(n, std::vector<bool>(n, false));
    std::vector<bool> on_critical(n, false);
    bool all_critical = true;
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = 0; v < n; ++v) {
            if (!g.has_edge(u, v)) continue;
            const double back = (u == v) ? 0.0 : d.mane[v][u];
            const bool crit = back != neg_inf && g.weight(u, v) + back >= critical_edge_threshold;
            d.critical_edge[u][v] = crit;
            all_critical = all_critical && crit;
            if (crit) on_critical[u] = on_critical[v] = true;
        }
    d.components = detail::strongly_connected_components(d.critical_edge, on_critical, true);
    if (d.components.empty())
        throw NumericalError("decompose_aubry", "empty Aubry set; the potential is not normalized (m(A) < 0)");

    PerronOptions entropy_opts;
    entropy_opts.resolve_excess = false;
    entropy_opts.initial_bits = 128;
    d.entropy = neg_inf;
    for (std::size_t i = 0; i < d.components.size(); ++i) {
        const double h = solve_perron(d.component_adjacency(i), entropy_opts).log_lambda;
        d.entropies.push_back(h);
        d.entropy = std::max(d.entropy, h);
    }
    for (std::size_t i = 0; i < d.components.size(); ++i)
        if (d.entropies[i] >= d.entropy - entropy_tie_tolerance) d.maximal_set.push_back(i);

    if (all_critical) return d;

    const std::size_t l = d.components.size();
    d.cost = MaxPlusMatrix<double>(l);
    std::vector<std::size_t> owner(n, l);
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t v : d.components[i]) owner[v] = i;
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = 0; v < n; ++v) {
            const std::size_t i = owner[v];
            if (i == l || !g.has_edge(u, v)) continue;
            if (owner[u] == i && d.critical_edge[u][v]) continue;
            if (owner[u] == i) d.flagged_internal_edges.push_back({i, u, v});
            for (std::size_t j = 0; j < l; ++j) {
                const double to_u = (owner[u] == j) ? 0.0 : d.mane[d.components[j].front()][u];
                const double cand = g.weight(u, v) + to_u;
                if (cand > d.cost(i, j)) d.cost(i, j) = cand;
            }
        }
    return d;
}

/// Violations of: finite entries, entries <= 0, diagonal < 0, a_li + a_ij <= a_lj.
inline std::vector<std::string> check_cost_laws(const MaxPlusMatrix<double>& a, double slack = 0.0) {
    std::vector<std::string> bad;
    const std::size_t l = a.size();
    auto at = [](std::size_t i, std::size_t j) { return "(" + std::to_string(i) + "," + std::to_string(j) + ")"; };
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = 0; j < l; ++j) {
            if (!std::isfinite(a(i, j))) bad.push_back("entry " + at(i, j) + " not finite");
            else if (a(i, j) > slack) bad.push_back("entry " + at(i, j) + " positive");
        }
    for (std::size_t i = 0; i < l; ++i)
        if (!(a(i, i) < 0.0)) bad.push_back("diagonal " + at(i, i) + " not negative");
    for (std::size_t x = 0; x < l; ++x)
        for (std::size_t i = 0; i < l; ++i)
            for (std::size_t j = 0; j < l; ++j)
                if (a(x, i) + a(i, j) > a(x, j) + slack)
                    bad.push_back("triangle " + std::to_string(x) + "->" + std::to_string(i) + "->" +
                                  std::to_string(j));
    return bad;
}

/// Cost matrix restricted to the maximal-entropy components.
inline MaxPlusMatrix<double> maximal_cost(const AubryDecomposition& d) {
    return mp_restrict(d.cost, d.maximal_set);
}

/// Max-plus eigenvalue of the maximal-entropy block of the cost matrix.
inline double gamma_maxplus(const AubryDecomposition& d) {
    if (d.cost.size() == 0) throw NumericalError("gamma_maxplus", "cost matrix is empty");
    return mp_eigenvalue(maximal_cost(d));
}

/// Maximal block after eliminating small-entropy components: a_KK ⊕ a_KS ⊗ a_SS* ⊗ a_SK.
inline MaxPlusMatrix<double> reduced_cost(const AubryDecomposition& d) {
    std::vector<std::size_t> small;
    for (std::size_t i = 0; i < d.components.size(); ++i)
        if (std::find(d.maximal_set.begin(), d.maximal_set.end(), i) == d.maximal_set.end()) small.push_back(i);
    MaxPlusMatrix<double> out = maximal_cost(d);
    if (small.empty()) return out;
    const MaxPlusMatrix<double> ss = mp_restrict(d.cost, small);
    MaxPlusMatrix<double> star = mp_kleene_plus(ss);
    for (std::size_t i = 0; i < small.size(); ++i) star(i, i) = std::max(star(i, i), 0.0);
    const auto& k = d.maximal_set;
    for (std::size_t r = 0; r < k.size(); ++r)
        for (std::size_t c = 0; c < k.size(); ++c)
            for (std::size_t p = 0; p < small.size(); ++p)
                for (std::size_t q = 0; q < small.size(); ++q) {
                    const double v = d.cost(k[r], small[p]) + star(p, q) + d.cost(small[q], k[c]);
                    if (v > out(r, c)) out(r, c) = v;
                }
    return out;
}

/// Values on small-entropy components forced by the maximal ones: a_SS* ⊗ a_SK ⊗ V_K.
inline std::vector<double> extend_to_small_components(const AubryDecomposition& d, const std::vector<double>& v_max) {
    const std::size_t l = d.components.size();
    std::vector<double> v(l, neg_inf);
    for (std::size_t r = 0; r < d.maximal_set.size(); ++r) v[d.maximal_set[r]] = v_max.at(r);
    std::vector<std::size_t> small;
    for (std::size_t i = 0; i < l; ++i)
        if (v[i] == neg_inf) small.push_back(i);
    if (small.empty()) return v;
    const MaxPlusMatrix<double> ss = mp_restrict(d.cost, small);
    MaxPlusMatrix<double> star = mp_kleene_plus(ss);
    for (std::size_t i = 0; i < small.size(); ++i) star(i, i) = std::max(star(i, i), 0.0);
    std::vector<double> rhs(small.size(), neg_inf);
    for (std::size_t p = 0; p < small.size(); ++p)
        for (std::size_t r : d.maximal_set) rhs[p] = std::max(rhs[p], d.cost(small[p], r) + v[r]);
    const auto vs = mp_apply(star, rhs);
    for (std::size_t p = 0; p < small.size(); ++p) v[small[p]] = vs[p];
    return v;
}

/// A is non-positive and has maximal cycle mean 0.
inline bool is_normalized_for_optimization(const LocallyConstantPotential& a, double tol = 1e-12) {
    for (double v : a.values())
        if (v > 0.0) return false;
    return std::abs(max_cycle_mean(WordGraph(a))) <= tol;
}

}  // namespace zerotemp
