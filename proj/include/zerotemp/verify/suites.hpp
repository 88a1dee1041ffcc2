#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "zerotemp/appendix.hpp"
#include "zerotemp/asymptotics.hpp"
#include "zerotemp/experiment.hpp"
#include "zerotemp/verify/oracles.hpp"
#include "zerotemp/walters.hpp"

namespace zerotemp::verify {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
    double budget_seconds = 0.0;  ///< 0 means no runtime bound

    std::string line() const {
        char t[64];
        std::snprintf(t, sizeof t, "%.3fs", seconds);
        std::string s = "criterion " + std::to_string(id) + " [" + name + "]: " + (pass ? "PASS" : "FAIL") + " (" + t;
        if (budget_seconds > 0) s += " of " + format_number(budget_seconds) + "s";
        return s + ") " + detail;
    }
};

namespace examples {

inline LocallyConstantPotential lc1() { return two_symbol_potential(0.0, -1.0, -1.0, 0.0); }
inline LocallyConstantPotential lc2() { return two_symbol_potential(0.0, -1.0, -2.0, 0.0); }

/// Full 3-shift with zero cycles 0->0 and 1->2->1; negative elsewhere.
inline LocallyConstantPotential three_symbol() {
    return LocallyConstantPotential(full_shift(2, 0.5), 1,
                                    {{{0, 0}, 0.0}, {{0, 1}, -1.0}, {{0, 2}, -0.5},
                                     {{1, 0}, -2.0}, {{1, 1}, -0.5}, {{1, 2}, 0.0},
                                     {{2, 0}, -1.5}, {{2, 1}, 0.0}, {{2, 2}, -1.0}});
}

inline WaltersPotential walters(double b, double d, double a_alpha, double c_alpha, double rho = 0.5) {
    return {b, d, GeometricTailSequence::geometric(a_alpha, rho), GeometricTailSequence::geometric(c_alpha, rho), 0.5, false};
}

/// Regime representatives; with rho = 1/2 the tail sums equal alpha.
inline WaltersPotential w_symmetric() { return walters(-1.0, -1.0, -1.0, -1.0); }
inline WaltersPotential w_two_cycle() { return walters(-1.0, -1.0, -1.0, -2.0); }
inline WaltersPotential w_zero_dominant() { return walters(-0.5, -0.5, -1.0, -3.0); }
inline WaltersPotential w_boundary() { return walters(-1.0, -1.0, -1.0, -3.0); }

struct NamedWalters {
    const char* name;
    WaltersPotential w;
};

inline std::vector<NamedWalters> regimes() {
    return {{"W1", w_symmetric()}, {"W2", w_two_cycle()}, {"W3", w_zero_dominant()}, {"W4", w_boundary()}};
}

inline std::string lc1_config() {
    return R"({"potential": {"type": "locally-constant", "alphabet_size": 2, "theta": "0.5", "depth": 1,
  "values": {"00": "0", "01": "-1", "10": "-1", "11": "0"}},
 "beta_grid": ["2", "4", "8", "16", "32", "64", "128", "256"],
 "reports": ["gamma", "subaction", "measure"]})";
}

inline std::string w4_config() {
    return R"({"potential": {"type": "walters", "b": "-1", "d": "-1",
  "a": {"alpha": "-1", "rho": "0.5"}, "c": {"alpha": "-3", "rho": "0.5"}},
 "beta_grid": ["10", "50", "100", "150"],
 "perturbation": {"delta": "-3.5", "kind": "first-coord", "sign": "both"},
 "reports": ["pressure", "ratio", "regime", "stability"]})";
}

}  // namespace examples

namespace detail {

inline std::string fmt(double x) { return format_number(x); }

inline double rel_err(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

template <class F>
CriterionResult timed(int id, std::string name, double budget, F body) {
    CriterionResult r;
    r.id = id;
    r.name = std::move(name);
    r.budget_seconds = budget;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        std::ostringstream detail;
        r.pass = body(detail);
        r.detail = detail.str();
    } catch (const std::exception& e) {
        r.pass = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budget > 0 && r.seconds > budget) {
        r.pass = false;
        r.detail += " [over runtime budget]";
    }
    return r;
}

}  // namespace detail

inline CriterionResult criterion_closed_form_perron() {
    return detail::timed(1, "closed-form Perron", 1.0, [](std::ostringstream& out) {
        double worst1 = 0, worst2 = 0;
        for (int beta = 1; beta <= 50; ++beta) {
            const double b = beta;
            worst1 = std::max(worst1, detail::rel_err(perron(examples::lc1(), b).pressure(), std::log1p(std::exp(-b))));
            worst2 = std::max(worst2, detail::rel_err(perron(examples::lc2(), b).pressure(), std::log1p(std::exp(-1.5 * b))));
        }
        const double zero = perron(zero_potential(full_shift(1, 0.5)), 1.0).pressure();
        const double zerr = std::abs(zero - std::log(2.0));
        out << "LC1 max rel err " << detail::fmt(worst1) << ", LC2 max rel err " << detail::fmt(worst2)
            << " (limit 1e-12); |P(0) - log 2| " << detail::fmt(zerr) << " (limit 1e-12)";
        return worst1 <= 1e-12 && worst2 <= 1e-12 && zerr <= 1e-12;
    });
}

struct RateExample {
    const char* name;
    LocallyConstantPotential potential;
};

inline std::vector<RateExample> rate_examples() {
    return {{"LC1", examples::lc1()}, {"LC2", examples::lc2()}, {"3-symbol", examples::three_symbol()}};
}

inline CriterionResult criterion_rate() {
    return detail::timed(2, "zero-temperature rate", 10.0, [](std::ostringstream& out) {
        bool ok = true;
        for (const auto& ex : rate_examples()) {
            const auto g = estimate_gamma(ex.potential, default_beta_grid());
            const double err = std::abs(g.gamma_hat.back() - mp_eigenvalue(maximal_cost(g.aubry)));
            const bool mono = g.is_non_increasing(1e-12);
            ok = ok && err <= 0.05 && mono;
            out << ex.name << ": gamma_hat(256) " << detail::fmt(g.gamma_hat.back()) << " vs eigenvalue "
                << detail::fmt(g.gamma_maxplus) << " |diff| " << detail::fmt(err) << " (limit 0.05), non-increasing "
                << (mono ? "yes" : "no") << " [gamma_hat(2) " << detail::fmt(g.gamma_hat.front()) << ", gamma_hat(4) "
                << detail::fmt(g.gamma_hat[1]) << "]; ";
        }
        return ok;
    });
}

inline CriterionResult criterion_maxplus_oracle() {
    return detail::timed(3, "max-plus oracle", 10.0, [](std::ostringstream& out) {
        std::mt19937_64 rng(20240611);
        std::uniform_int_distribution<int> size(1, 6), entry(-9, 0), hole(0, 4);
        std::size_t cycle_mismatch = 0, identity_fail = 0, vectors = 0;
        for (int trial = 0; trial < 500; ++trial) {
            const std::size_t n = static_cast<std::size_t>(size(rng));
            MaxPlusMatrix<ExtRational> exact(n);
            MaxPlusMatrix<double> approx(n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    const int v = entry(rng);
                    if (trial % 2 == 1 && i != j && hole(rng) == 0) continue;
                    exact(i, j) = ExtRational(v);
                    approx(i, j) = v;
                }
            const ExtRational lam = mp_eigenvalue(exact);
            if (!(lam == brute_force_max_cycle_mean(exact))) ++cycle_mismatch;
            if (std::abs(mp_eigenvalue(approx) - brute_force_max_cycle_mean(approx)) > 1e-12) ++cycle_mismatch;
            const auto eig = mp_eigenvectors(exact);
            for (const auto& v : eig.eigenvectors) {
                ++vectors;
                const auto mv = mp_apply(exact, v);
                for (std::size_t i = 0; i < n; ++i)
                    if (!(mv[i] == lam + v[i])) {
                        ++identity_fail;
                        break;
                    }
            }
        }
        std::uniform_real_distribution<double> real(-9.0, 0.0);
        std::size_t closed_mismatch = 0;
        double worst = 0.0;
        for (int trial = 0; trial < 1000; ++trial) {
            const MaxPlusMatrix<double> m{{real(rng), real(rng)}, {real(rng), real(rng)}};
            const auto p = mp_2x2_parameters(m(0, 0), m(0, 1), m(1, 0), m(1, 1));
            const auto cf = mp_2x2_closed_form(p[0], p[1], p[2], p[3]);
            const auto eig = mp_eigenvectors(m);
            double err = std::abs(cf.eigenvalue - eig.eigenvalue);
            if (eig.eigenspace_dim == 1) err = std::max(err, std::abs(cf.offset - eig.eigenvectors[0][1]));
            else ++closed_mismatch;
            for (const auto& v : eig.eigenvectors) {
                ++vectors;
                const auto mv = mp_apply(m, v);
                for (std::size_t i = 0; i < 2; ++i)
                    if (std::abs(mv[i] - (eig.eigenvalue + v[i])) > 1e-12) ++identity_fail;
            }
            worst = std::max(worst, err);
            if (err > 1e-12) ++closed_mismatch;
        }
        out << "cycle-mean mismatches " << cycle_mismatch << "/1000 (exact and float), 2x2 closed-form mismatches "
            << closed_mismatch << "/1000 (max err " << detail::fmt(worst) << ", limit 1e-12), eigen-identity failures "
            << identity_fail << "/" << vectors;
        return cycle_mismatch == 0 && closed_mismatch == 0 && identity_fail == 0;
    });
}

inline CriterionResult criterion_cost_laws() {
    return detail::timed(4, "cost-matrix laws", 0.0, [](std::ostringstream& out) {
        bool ok = true;
        for (const auto& ex : rate_examples()) {
            const auto d = decompose_aubry(WordGraph(ex.potential));
            const auto bad = check_cost_laws(d.cost);
            ok = ok && bad.empty() && d.cost.size() > 0;
            out << ex.name << ": " << d.components.size() << " components, " << bad.size() << " violations; ";
        }
        return ok;
    });
}

inline CriterionResult criterion_walters_gamma() {
    return detail::timed(5, "Walters gamma", 5.0, [](std::ostringstream& out) {
        bool ok = true;
        for (const auto& [name, w] : examples::regimes()) {
            const double est = std::log(walters_pressure(w, 150.0)) / 150.0;
            const double err = std::abs(est - walters_gamma(w));
            ok = ok && err <= 0.05;
            out << name << ": log(P)/beta " << detail::fmt(est) << " gamma " << detail::fmt(walters_gamma(w))
                << " |diff| " << detail::fmt(err) << "; ";
        }
        out << "(limit 0.05)";
        return ok;
    });
}

inline CriterionResult criterion_limit_measures() {
    return detail::timed(6, "limit measures", 10.0, [](std::ostringstream& out) {
        const double beta = 150.0;
        auto mu = [&](const WaltersPotential& w) {
            return walters_cylinder_ratio(w, 0.0, beta, walters_pressure(w, beta)).mu0;
        };
        const double m1 = mu(examples::w_symmetric()), m2 = mu(examples::w_two_cycle());
        const double m3 = mu(examples::w_zero_dominant()), m4 = mu(examples::w_boundary());
        const auto w4 = examples::w_boundary();
        const double l = walters_pressure(w4, beta) / std::exp(beta * walters_gamma(w4));
        out << "W1 mu0 " << detail::fmt(m1) << ", W2 mu0 " << detail::fmt(m2) << ", W3 mu0 " << detail::fmt(m3)
            << " (>= 0.98), W4 mu0 " << detail::fmt(m4) << " vs " << detail::fmt(golden_mass) << ", W4 l "
            << detail::fmt(l) << " vs " << detail::fmt(golden_ratio) << " (limits 0.02)";
        return std::abs(m1 - 0.5) <= 0.02 && std::abs(m2 - 0.5) <= 0.02 && m3 >= 0.98 &&
               std::abs(m4 - golden_mass) <= 0.02 && std::abs(l - golden_ratio) <= 0.02;
    });
}

inline CriterionResult criterion_stability() {
    return detail::timed(7, "perturbation stability", 10.0, [](std::ostringstream& out) {
        bool ok = true;
        for (const auto& [name, w] : examples::regimes()) {
            const auto rep = perturbation_stability_experiment(w, walters_gamma(w) - 0.5, PerturbationKind::first_coord, {150.0});
            const auto& r = rep.rows.back();
            ok = ok && r.mu_gap() <= 0.02 && r.v1_gap() <= 0.02 && rep.sandwich_ok;
            out << name << ": mu gap " << detail::fmt(r.mu_gap()) << ", V(1^inf) gap " << detail::fmt(r.v1_gap())
                << (rep.sandwich_ok ? "" : " sandwich violated") << "; ";
        }
        out << "(limits 0.02)";
        return ok;
    });
}

inline CriterionResult criterion_selection_flip() {
    return detail::timed(8, "two-loop selection flip", 2.0, [](std::ostringstream& out) {
        const double g = -2.0, eta = -1.0;
        double worst = 0.0, worst_mu = 0.0;
        for (double beta : {5.0, 10.0, 20.0}) {
            const auto c = appendix_example(g, eta, beta);
            const auto n = appendix_numeric(g, eta, beta);
            worst = std::max({worst, detail::rel_err(n.lambda_tilde, c.lambda_tilde),
                              detail::rel_err(n.pressure_pert, c.pressure_pert),
                              std::abs(std::expm1(n.log_H1_pert - c.log_H1_pert)), detail::rel_err(n.p0, c.p0),
                              detail::rel_err(n.H1_unpert, c.H1_unpert)});
            worst_mu = std::max(worst_mu, std::abs(n.mu0_unpert - 0.5));
        }
        const double p20 = appendix_numeric(g, eta, 20.0).p0;
        const double h50 = appendix_numeric(g, eta, 50.0).log_H1_pert / 50.0;
        out << "max rel err vs closed forms " << detail::fmt(worst) << " (limit 1e-10), p0(20) " << detail::fmt(p20)
            << " (<= 1e-8), (1/50) log H1 " << detail::fmt(h50) << " vs " << detail::fmt(eta - g)
            << " (limit 0.02), unperturbed |mu0 - 1/2| " << detail::fmt(worst_mu) << " (limit 1e-10)";
        return worst <= 1e-10 && p20 <= 1e-8 && std::abs(h50 - (eta - g)) <= 0.02 && worst_mu <= 1e-10;
    });
}

inline CriterionResult criterion_calibration() {
    return detail::timed(9, "calibration residual", 5.0, [](std::ostringstream& out) {
        bool ok = true;
        for (const auto& [name, a] : {std::pair{"LC1", examples::lc1()}, std::pair{"LC2", examples::lc2()}}) {
            const auto s = estimate_subaction(a, 256.0);
            const auto d = decompose_aubry(WordGraph(a));
            double spread = 0.0;
            for (const auto& comp : d.components)
                for (std::size_t node : comp) spread = std::max(spread, std::abs(s.V_hat[node] - s.V_hat[comp.front()]));
            ok = ok && s.calibration_residual <= 0.02 && spread <= 1e-9;
            out << name << ": residual " << detail::fmt(s.calibration_residual) << " (limit 0.02), component spread "
                << detail::fmt(spread) << " (limit 1e-9); ";
        }
        return ok;
    });
}

/// Runs each config twice into fresh directories and compares every output byte.
inline CriterionResult criterion_determinism(const std::filesystem::path& scratch) {
    return detail::timed(10, "determinism", 0.0, [&](std::ostringstream& out) {
        bool ok = true;
        std::size_t files = 0;
        for (const auto& [name, text] : {std::pair{"lc1", examples::lc1_config()}, std::pair{"w4", examples::w4_config()}}) {
            std::vector<std::vector<std::string>> runs;
            for (std::size_t threads : {1, 1, 4}) {
                const auto dir = scratch / (std::string(name) + "_" + std::to_string(runs.size()));
                std::filesystem::remove_all(dir);
                const auto cfg = parse_config(text);
                std::vector<std::string> bytes;
                for (const auto& p : write_experiment(cfg, run_experiment(cfg, threads), dir)) bytes.push_back(read_file(p));
                runs.push_back(std::move(bytes));
            }
            ok = ok && runs[0] == runs[1] && runs[0] == runs[2];
            files += runs[0].size();
        }
        out << files << " files compared across two sequential runs and one 4-thread run: "
            << (ok ? "identical" : "DIFFERENT");
        return ok;
    });
}

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"closed-forms", "theorem-a", "theorem-b", "appendix", "maxplus-oracle"};
    return names;
}

/// Criteria of a named suite; empty for unknown names.
inline std::vector<std::function<CriterionResult()>> suite(const std::string& name) {
    if (name == "closed-forms") return {criterion_closed_form_perron, criterion_walters_gamma, criterion_calibration};
    if (name == "theorem-a") return {criterion_rate, criterion_cost_laws};
    if (name == "theorem-b") return {criterion_limit_measures, criterion_stability};
    if (name == "appendix") return {criterion_selection_flip};
    if (name == "maxplus-oracle") return {criterion_maxplus_oracle};
    return {};
}

}  // namespace zerotemp::verify
