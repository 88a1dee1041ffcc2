// zerotemp: batch runner for zero-temperature experiments.

#include <charconv>
#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "zerotemp/experiment.hpp"
#include "zerotemp/verify/suites.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failed = 1;
constexpr int exit_schema = 2;
constexpr int exit_numerical = 3;

std::size_t worker_count() {
    const char* env = std::getenv("ZEROTEMP_THREADS");
    if (env == nullptr || *env == '\0') return 1;
    std::size_t n = 0;
    const std::string s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
    if (ec != std::errc() || ptr != s.data() + s.size() || n == 0)
        throw zerotemp::ConfigError("ZEROTEMP_THREADS: expected a positive integer, got '" + s + "'");
    return n;
}

void print_tables(const zerotemp::ExperimentConfig& cfg, const zerotemp::ExperimentResult& r) {
    for (const auto& [name, table] : r.tables) std::cout << "# report " << name << '\n' << table.csv(cfg.digest);
    for (const auto& line : r.summary) std::cout << line << '\n';
}

int cmd_run(const std::string& config_path, const std::string& out_dir) {
    const auto cfg = zerotemp::parse_config(zerotemp::read_file(config_path));
    const auto result = zerotemp::run_experiment(cfg, worker_count());
    for (const auto& p : zerotemp::write_experiment(cfg, result, out_dir)) std::cout << "wrote " << p.string() << '\n';
    for (const auto& line : result.summary) std::cout << line << '\n';
    return exit_ok;
}

int cmd_gamma(const std::string& config_path) {
    auto cfg = zerotemp::parse_config(zerotemp::read_file(config_path));
    if (!std::holds_alternative<zerotemp::LocallyConstantSpec>(cfg.potential))
        throw zerotemp::ConfigError("gamma: config must describe a locally-constant potential");
    cfg.reports = {"gamma"};
    print_tables(cfg, zerotemp::run_experiment(cfg, worker_count()));
    return exit_ok;
}

int cmd_walters(const std::string& config_path) {
    auto cfg = zerotemp::parse_config(zerotemp::read_file(config_path));
    if (!std::holds_alternative<zerotemp::WaltersPotential>(cfg.potential))
        throw zerotemp::ConfigError("walters: config must describe a walters potential");
    cfg.reports = {"pressure", "ratio", "regime"};
    if (cfg.perturbation) cfg.reports.push_back("stability");
    print_tables(cfg, zerotemp::run_experiment(cfg, worker_count()));
    return exit_ok;
}

int cmd_appendix(const std::string& gamma, const std::string& eta, const std::string& beta_max) {
    const double b = zerotemp::detail::parse_number(nlohmann::json(beta_max), "--beta-max");
    if (!(b >= 1.0) || b > 1e4) throw zerotemp::ConfigError("--beta-max: expected a value in [1, 10000]");
    nlohmann::json grid = nlohmann::json::array();
    for (int beta = 1; beta <= static_cast<int>(b); ++beta) grid.push_back(std::to_string(beta));
    const nlohmann::json cfg_json = {{"potential", {{"type", "appendix"}, {"gamma", gamma}, {"eta", eta}}},
                                     {"beta_grid", grid},
                                     {"reports", {"appendix"}}};
    const auto cfg = zerotemp::parse_config(cfg_json.dump());
    print_tables(cfg, zerotemp::run_experiment(cfg, worker_count()));
    return exit_ok;
}

int cmd_verify(const std::string& name) {
    const auto criteria = zerotemp::verify::suite(name);
    if (criteria.empty()) {
        std::cerr << "verify: unknown suite '" << name << "'; known suites:";
        for (const auto& s : zerotemp::verify::suite_names()) std::cerr << ' ' << s;
        std::cerr << '\n';
        return exit_schema;
    }
    bool all = true;
    for (const auto& criterion : criteria) {
        const auto r = criterion();
        std::cout << r.line() << '\n';
        all = all && r.pass;
    }
    std::cout << "suite " << name << ": " << (all ? "PASS" : "FAIL") << '\n';
    return all ? exit_ok : exit_failed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Zero-temperature asymptotics of Gibbs states on subshifts of finite type"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "zerotemp-out", suite_name, gamma, eta, beta_max;
    auto* run = app.add_subcommand("run", "Run every report of a config and write CSV files");
    run->add_option("config", config_path, "JSON config file")->required();
    run->add_option("--out", out_dir, "Output directory")->capture_default_str();
    auto* verify = app.add_subcommand("verify", "Run an acceptance suite");
    verify->add_option("suite", suite_name, "closed-forms, theorem-a, theorem-b, appendix or maxplus-oracle")->required();
    auto* gamma_cmd = app.add_subcommand("gamma", "Print the rate table of a locally-constant config");
    gamma_cmd->add_option("config", config_path, "JSON config file")->required();
    auto* walters_cmd = app.add_subcommand("walters", "Print pressure, ratio and regime tables of a walters config");
    walters_cmd->add_option("config", config_path, "JSON config file")->required();
    auto* appendix_cmd = app.add_subcommand("appendix", "Print the two-symbol counterexample for beta = 1..beta-max");
    appendix_cmd->add_option("--gamma", gamma, "Off-diagonal value")->required();
    appendix_cmd->add_option("--eta", eta, "Perturbation exponent")->required();
    appendix_cmd->add_option("--beta-max", beta_max, "Largest beta")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_schema;
    }

    try {
        if (*run) return cmd_run(config_path, out_dir);
        if (*verify) return cmd_verify(suite_name);
        if (*gamma_cmd) return cmd_gamma(config_path);
        if (*walters_cmd) return cmd_walters(config_path);
        if (*appendix_cmd) return cmd_appendix(gamma, eta, beta_max);
    } catch (const zerotemp::NumericalError& e) {
        std::cerr << "numerical failure (operation " << e.operation() << "): " << e.what() << '\n';
        return exit_numerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_schema;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_failed;
    }
    return exit_failed;
}
