#pragma once

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "zerotemp/appendix.hpp"
#include "zerotemp/asymptotics.hpp"
#include "zerotemp/detail/parallel.hpp"
#include "zerotemp/walters.hpp"

namespace zerotemp {

/// Config file does not match the schema.
class ConfigError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

struct LocallyConstantSpec {
    LocallyConstantPotential potential;
};

struct AppendixSpec {
    double gamma;
    double eta;
};

struct PerturbationSpec {
    double delta = 0.0;
    PerturbationKind kind = PerturbationKind::first_coord;
    std::string sign = "both";
    Symbol omega = 0;
};

struct ExperimentConfig {
    std::variant<AppendixSpec, LocallyConstantSpec, WaltersPotential> potential;
    std::vector<double> beta_grid;
    std::optional<PerturbationSpec> perturbation;
    std::vector<std::string> reports;
    std::string digest;
};

/// FNV-1a, 64 bit, as 16 hex digits.
inline std::string config_digest(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// 17 significant digits, locale independent.
inline std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x < 0 ? "-inf" : "inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

namespace detail {

inline double parse_number(const nlohmann::json& j, const std::string& where) {
    if (j.is_number()) return j.get<double>();
    if (!j.is_string()) throw ConfigError(where + ": expected a number or decimal string");
    const std::string s = j.get<std::string>();
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
        throw ConfigError(where + ": '" + s + "' is not a finite decimal number");
    return v;
}

inline const nlohmann::json& require(const nlohmann::json& obj, const std::string& key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
    return obj.at(key);
}

inline void only_keys(const nlohmann::json& obj, std::initializer_list<const char*> keys, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : keys) known = known || it.key() == k;
        if (!known) throw ConfigError(where + ": unknown key '" + it.key() + "'");
    }
}

inline std::size_t parse_count(const nlohmann::json& j, const std::string& where) {
    if (!j.is_number_integer() || j.get<long long>() < 0) throw ConfigError(where + ": expected a non-negative integer");
    return j.get<std::size_t>();
}

inline GeometricTailSequence parse_sequence(const nlohmann::json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    only_keys(j, {"head", "alpha", "rho"}, where);
    GeometricTailSequence s;
    if (j.contains("head")) {
        if (!j.at("head").is_array()) throw ConfigError(where + ".head: expected a list");
        for (const auto& v : j.at("head")) s.head.push_back(parse_number(v, where + ".head"));
    }
    s.alpha = parse_number(require(j, "alpha", where), where + ".alpha");
    s.rho = parse_number(require(j, "rho", where), where + ".rho");
    return s;
}

inline LocallyConstantPotential parse_locally_constant(const nlohmann::json& p) {
    const std::string where = "potential";
    only_keys(p, {"type", "alphabet_size", "theta", "transitions", "depth", "values"}, where);
    const std::size_t n = parse_count(require(p, "alphabet_size", where), where + ".alphabet_size");
    if (n < 2 || n > 10) throw ConfigError(where + ".alphabet_size: must be between 2 and 10");
    const double theta = p.contains("theta") ? parse_number(p.at("theta"), where + ".theta") : 0.5;
    std::vector<std::vector<bool>> trans(n, std::vector<bool>(n, true));
    if (p.contains("transitions")) {
        const auto& t = p.at("transitions");
        if (!t.is_array() || t.size() != n) throw ConfigError(where + ".transitions: expected " + std::to_string(n) + " rows");
        for (std::size_t i = 0; i < n; ++i) {
            if (!t[i].is_array() || t[i].size() != n) throw ConfigError(where + ".transitions: ragged row");
            for (std::size_t j = 0; j < n; ++j) {
                if (!t[i][j].is_number_integer() || (t[i][j] != 0 && t[i][j] != 1))
                    throw ConfigError(where + ".transitions: entries must be 0 or 1");
                trans[i][j] = t[i][j] == 1;
            }
        }
    }
    const std::size_t depth = parse_count(require(p, "depth", where), where + ".depth");
    const auto& vals = require(p, "values", where);
    if (!vals.is_object()) throw ConfigError(where + ".values: expected an object keyed by words");
    std::map<Word, double> table;
    for (auto it = vals.begin(); it != vals.end(); ++it) {
        Word w;
        for (char c : it.key()) {
            if (c < '0' || c > '9' || static_cast<std::size_t>(c - '0') >= n)
                throw ConfigError(where + ".values: bad word '" + it.key() + "'");
            w.push_back(static_cast<Symbol>(c - '0'));
        }
        table[w] = parse_number(it.value(), where + ".values." + it.key());
    }
    try {
        LocallyConstantPotential a(Sft(n, trans, theta), depth, table);
        if (!a.sft().is_aperiodic()) throw ConfigError(where + ": shift is not aperiodic");
        a.normalized_for_optimization = is_normalized_for_optimization(a);
        if (!a.normalized_for_optimization)
            throw ConfigError(where + ": potential must be non-positive with maximal cycle mean 0");
        return a;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string(where) + ": " + e.what());
    }
}

inline WaltersPotential parse_walters(const nlohmann::json& p) {
    const std::string where = "potential";
    only_keys(p, {"type", "b", "d", "a", "c", "theta", "relaxed"}, where);
    WaltersPotential w;
    w.b = parse_number(require(p, "b", where), where + ".b");
    w.d = parse_number(require(p, "d", where), where + ".d");
    w.a_seq = parse_sequence(require(p, "a", where), where + ".a");
    w.c_seq = parse_sequence(require(p, "c", where), where + ".c");
    if (p.contains("theta")) w.theta = parse_number(p.at("theta"), where + ".theta");
    if (p.contains("relaxed")) {
        if (!p.at("relaxed").is_boolean()) throw ConfigError(where + ".relaxed: expected a boolean");
        w.relaxed = p.at("relaxed").get<bool>();
    }
    try {
        w.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string(where) + ": " + e.what());
    }
    return w;
}

}  // namespace detail

inline ExperimentConfig parse_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    detail::only_keys(j, {"potential", "beta_grid", "perturbation", "reports"}, "config");
    ExperimentConfig cfg;
    cfg.digest = config_digest(text);

    const auto& p = detail::require(j, "potential", "config");
    const auto& type = detail::require(p, "type", "potential");
    if (!type.is_string()) throw ConfigError("potential.type: expected a string");
    const std::string t = type.get<std::string>();
    std::vector<std::string> allowed;
    if (t == "locally-constant") {
        cfg.potential = LocallyConstantSpec{detail::parse_locally_constant(p)};
        allowed = {"gamma", "subaction", "measure"};
    } else if (t == "walters") {
        cfg.potential = detail::parse_walters(p);
        allowed = {"pressure", "ratio", "regime", "stability"};
    } else if (t == "appendix") {
        detail::only_keys(p, {"type", "gamma", "eta"}, "potential");
        AppendixSpec s{detail::parse_number(detail::require(p, "gamma", "potential"), "potential.gamma"),
                       detail::parse_number(detail::require(p, "eta", "potential"), "potential.eta")};
        if (!(s.gamma < s.eta && s.eta < 0.0)) throw ConfigError("potential: need gamma < eta < 0");
        cfg.potential = s;
        allowed = {"appendix"};
    } else {
        throw ConfigError("potential.type: unknown type '" + t + "'");
    }

    if (j.contains("beta_grid")) {
        const auto& g = j.at("beta_grid");
        if (!g.is_array() || g.empty()) throw ConfigError("beta_grid: expected a non-empty list");
        for (const auto& b : g) cfg.beta_grid.push_back(detail::parse_number(b, "beta_grid"));
    } else {
        cfg.beta_grid = default_beta_grid();
    }
    for (std::size_t i = 0; i < cfg.beta_grid.size(); ++i) {
        if (!(cfg.beta_grid[i] > 0.0)) throw ConfigError("beta_grid: values must be positive");
        if (i > 0 && !(cfg.beta_grid[i] > cfg.beta_grid[i - 1])) throw ConfigError("beta_grid: must be strictly increasing");
    }

    if (j.contains("perturbation") && !j.at("perturbation").is_null()) {
        const auto& q = j.at("perturbation");
        if (!q.is_object()) throw ConfigError("perturbation: expected an object");
        detail::only_keys(q, {"delta", "kind", "sign", "omega"}, "perturbation");
        PerturbationSpec s;
        s.delta = detail::parse_number(detail::require(q, "delta", "perturbation"), "perturbation.delta");
        if (q.contains("kind")) {
            const std::string k = q.at("kind").is_string() ? q.at("kind").get<std::string>() : "";
            if (k == "first-coord") s.kind = PerturbationKind::first_coord;
            else if (k == "cylinder-indicator") s.kind = PerturbationKind::cylinder_indicator;
            else throw ConfigError("perturbation.kind: expected first-coord or cylinder-indicator");
        }
        if (q.contains("sign")) {
            s.sign = q.at("sign").is_string() ? q.at("sign").get<std::string>() : "";
            if (s.sign != "plus" && s.sign != "minus" && s.sign != "both")
                throw ConfigError("perturbation.sign: expected plus, minus or both");
        }
        if (q.contains("omega")) {
            const std::size_t o = detail::parse_count(q.at("omega"), "perturbation.omega");
            if (o > 1 || (o == 1 && s.kind == PerturbationKind::first_coord))
                throw ConfigError("perturbation.omega: must be 0, or 1 for cylinder-indicator");
            s.omega = static_cast<Symbol>(o);
        }
        cfg.perturbation = s;
    }

    const auto& r = detail::require(j, "reports", "config");
    if (!r.is_array() || r.empty()) throw ConfigError("reports: expected a non-empty list");
    for (const auto& x : r) {
        if (!x.is_string()) throw ConfigError("reports: entries must be strings");
        const std::string name = x.get<std::string>();
        if (std::find(allowed.begin(), allowed.end(), name) == allowed.end())
            throw ConfigError("reports: '" + name + "' is not available for potential type " + t);
        if (std::find(cfg.reports.begin(), cfg.reports.end(), name) != cfg.reports.end())
            throw ConfigError("reports: duplicate '" + name + "'");
        cfg.reports.push_back(name);
    }
    if (std::find(cfg.reports.begin(), cfg.reports.end(), "stability") != cfg.reports.end() && !cfg.perturbation)
        throw ConfigError("reports: stability needs a perturbation block");
    return cfg;
}

/// One CSV table.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<double> values) {
        std::vector<std::string> row;
        for (double v : values) row.push_back(format_number(v));
        rows.push_back(std::move(row));
    }

    std::string csv(const std::string& digest) const {
        std::ostringstream out;
        out << "# config fnv1a64:" << digest << '\n';
        for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
        out << '\n';
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
            out << '\n';
        }
        return out.str();
    }
};

struct ExperimentResult {
    std::vector<std::pair<std::string, Table>> tables;  ///< report name, table
    std::vector<std::string> summary;
};

namespace detail {

inline std::string fixed7(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.7f", x);
    return buf;
}

inline void run_locally_constant(const ExperimentConfig& cfg, const LocallyConstantPotential& a, std::size_t threads,
                                 ExperimentResult& out) {
    const auto& grid = cfg.beta_grid;
    for (const std::string& rep : cfg.reports) {
        Table t;
        if (rep == "gamma") {
            const GammaEstimate g = estimate_gamma(a, grid, 1e-14, threads);
            t.header = {"beta", "pressure", "log_excess", "gamma_hat", "gamma_maxplus", "h"};
            for (std::size_t i = 0; i < grid.size(); ++i)
                t.add({grid[i], g.pressure[i], g.log_excess[i], g.gamma_hat[i], g.gamma_maxplus, g.h});
            out.summary.push_back("gamma_maxplus " + format_number(g.gamma_maxplus) + ", gamma_hat(" +
                                  format_number(grid.back()) + ") " + format_number(g.gamma_hat.back()) + ", h " +
                                  format_number(g.h) + ", components " + std::to_string(g.aubry.components.size()));
        } else if (rep == "subaction") {
            const auto s = parallel_map<SubactionEstimate>(
                grid.size(), [&](std::size_t i) { return estimate_subaction(a, grid[i]); }, threads);
            t.header = {"beta", "calibration_residual", "reconstruction_gap"};
            for (const Word& w : a.nodes()) t.header.push_back("V_" + to_string(w));
            for (const auto& e : s) {
                std::vector<double> row{e.beta, e.calibration_residual, e.reconstruction_gap};
                row.insert(row.end(), e.V_hat.begin(), e.V_hat.end());
                t.add(row);
            }
            std::string offs;
            for (const auto& v : s.back().eigenvector_offsets) {
                offs += " (";
                for (std::size_t i = 0; i < v.size(); ++i) offs += (i ? ", " : "") + format_number(v[i]);
                offs += ")";
            }
            out.summary.push_back("subaction residual " + format_number(s.back().calibration_residual) +
                                  ", eigenspace_dim " + std::to_string(s.back().eigenspace_dim) + ", offsets" + offs);
        } else if (rep == "measure") {
            const auto m = parallel_map<LimitMeasureEstimate>(
                grid.size(), [&](std::size_t i) { return limit_measure_estimate(a, grid[i], a.nodes()); }, threads);
            t.header = {"beta", "aubry_mass"};
            for (const Word& w : a.nodes()) t.header.push_back("mu_" + to_string(w));
            for (const auto& e : m) {
                std::vector<double> row{e.beta, e.aubry_mass};
                for (const auto& [w, mass] : e.masses) row.push_back(mass);
                t.add(row);
            }
            out.summary.push_back("aubry mass at beta " + format_number(grid.back()) + ": " +
                                  format_number(m.back().aubry_mass));
        }
        out.tables.emplace_back(rep, std::move(t));
    }
}

inline void run_walters(const ExperimentConfig& cfg, const WaltersPotential& w, std::size_t threads,
                        ExperimentResult& out) {
    const auto& grid = cfg.beta_grid;
    const double gamma = walters_gamma(w);
    const auto pressures =
        parallel_map<double>(grid.size(), [&](std::size_t i) { return walters_pressure(w, grid[i]); }, threads);
    for (const std::string& rep : cfg.reports) {
        Table t;
        if (rep == "pressure") {
            t.header = {"beta", "pressure", "log_pressure_over_beta", "gamma", "l"};
            for (std::size_t i = 0; i < grid.size(); ++i)
                t.add({grid[i], pressures[i], std::log(pressures[i]) / grid[i], gamma,
                       std::exp(std::log(pressures[i]) - grid[i] * gamma)});
            out.summary.push_back("gamma " + format_number(gamma) + ", log(P)/beta at beta " +
                                  format_number(grid.back()) + ": " +
                                  format_number(std::log(pressures.back()) / grid.back()));
        } else if (rep == "ratio") {
            t.header = {"beta", "pressure", "ratio", "asymptotic_ratio", "mu_0"};
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const auto r = walters_cylinder_ratio(w, 0.0, grid[i], pressures[i]);
                t.add({grid[i], pressures[i], r.ratio, walters_asymptotic_ratio(w, pressures[i], grid[i]), r.mu0});
            }
        } else if (rep == "regime") {
            const auto r = classify_regime(w);
            t.header = {"regime", "mirrored", "gamma", "limit_mass_0", "l_limit"};
            t.rows.push_back({to_string(r.regime), r.mirrored ? "1" : "0", format_number(r.gamma),
                              format_number(r.limit_mass_0), r.l_limit ? format_number(*r.l_limit) : "none"});
            out.summary.push_back(r.tag() + ", mass " + fixed7(r.limit_mass_0));
        } else if (rep == "stability") {
            const auto& q = *cfg.perturbation;
            const auto s = perturbation_stability_experiment(w, q.delta, q.kind, grid, q.omega);
            const bool plus = q.sign != "minus", minus = q.sign != "plus";
            t.header = {"beta", "pressure", "mu_0", "v1"};
            if (plus) t.header.insert(t.header.end(), {"pressure_plus", "mu_0_plus", "v1_plus"});
            if (minus) t.header.insert(t.header.end(), {"pressure_minus", "mu_0_minus", "v1_minus"});
            t.header.push_back("sandwich_ok");
            for (const auto& r : s.rows) {
                std::vector<double> row{r.beta, r.pressure, r.mu0, r.v1};
                if (plus) row.insert(row.end(), {r.pressure_plus, r.mu0_plus, r.v1_plus});
                if (minus) row.insert(row.end(), {r.pressure_minus, r.mu0_minus, r.v1_minus});
                row.push_back(r.sandwich_ok ? 1.0 : 0.0);
                t.add(row);
            }
            out.summary.push_back("stability delta " + format_number(q.delta) + " (gamma " + format_number(gamma) +
                                  "): tail mu gap " + format_number(s.sup_mu_gap_tail) + ", tail v1 gap " +
                                  format_number(s.sup_v1_gap_tail) + (s.gap_shrinks ? ", shrinking" : ", not shrinking"));
        }
        out.tables.emplace_back(rep, std::move(t));
    }
}

inline void run_appendix(const ExperimentConfig& cfg, const AppendixSpec& s, std::size_t threads, ExperimentResult& out) {
    const auto& grid = cfg.beta_grid;
    Table t;
    t.header = {"beta", "lambda_tilde", "log_lambda_tilde_minus_one", "log_H1_pert_over_beta", "p0",
                "H1_unpert", "pressure_unpert", "p0_numeric", "log_H1_pert_over_beta_numeric", "mu0_unpert_numeric"};
    struct Row {
        AppendixRecord closed;
        AppendixNumeric numeric;
    };
    const auto rows = parallel_map<Row>(
        grid.size(),
        [&](std::size_t i) { return Row{appendix_example(s.gamma, s.eta, grid[i]), appendix_numeric(s.gamma, s.eta, grid[i])}; },
        threads);
    for (const auto& r : rows)
        t.add({r.closed.beta, r.closed.lambda_tilde, r.closed.log_lambda_tilde_minus_one,
               r.closed.log_H1_pert / r.closed.beta, r.closed.p0, r.closed.H1_unpert, r.closed.pressure_unpert,
               r.numeric.p0, r.numeric.log_H1_pert / r.closed.beta, r.numeric.mu0_unpert});
    out.summary.push_back("appendix: p0 at beta " + format_number(grid.back()) + " = " + format_number(rows.back().closed.p0) +
                          ", (1/beta) log H1 = " + format_number(rows.back().closed.log_H1_pert / grid.back()) +
                          " (eta - gamma = " + format_number(s.eta - s.gamma) + ")");
    out.tables.emplace_back("appendix", std::move(t));
}

}  // namespace detail

/// Compute every requested report in memory.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, std::size_t threads = 1) {
    ExperimentResult out;
    if (const auto* lc = std::get_if<LocallyConstantSpec>(&cfg.potential))
        detail::run_locally_constant(cfg, lc->potential, threads, out);
    else if (const auto* w = std::get_if<WaltersPotential>(&cfg.potential))
        detail::run_walters(cfg, *w, threads, out);
    else
        detail::run_appendix(cfg, std::get<AppendixSpec>(cfg.potential), threads, out);
    return out;
}

/// Write <report>.csv per table and summary.txt into `dir`.
inline std::vector<std::filesystem::path> write_experiment(const ExperimentConfig& cfg, const ExperimentResult& result,
                                                           const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    for (const auto& [name, table] : result.tables) {
        const auto path = dir / (name + ".csv");
        std::ofstream f(path, std::ios::binary);
        f << table.csv(cfg.digest);
        if (!f) throw std::runtime_error("cannot write " + path.string());
        written.push_back(path);
    }
    const auto path = dir / "summary.txt";
    std::ofstream f(path, std::ios::binary);
    f << "# config fnv1a64:" << cfg.digest << '\n';
    for (const auto& line : result.summary) f << line << '\n';
    if (!f) throw std::runtime_error("cannot write " + path.string());
    written.push_back(path);
    return written;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot read config " + path.string());
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

}  // namespace zerotemp
