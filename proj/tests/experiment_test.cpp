#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "zerotemp/experiment.hpp"
#include "zerotemp/verify/suites.hpp"

using namespace zerotemp;
namespace ex = zerotemp::verify::examples;

namespace {

std::vector<std::string> column(const std::string& csv, const std::string& name) {
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);  // digest comment
    std::getline(in, line);
    std::vector<std::string> header;
    std::stringstream hs(line);
    for (std::string cell; std::getline(hs, cell, ',');) header.push_back(cell);
    const auto idx = static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
    std::vector<std::string> out;
    while (std::getline(in, line)) {
        std::stringstream rs(line);
        std::vector<std::string> cells;
        for (std::string cell; std::getline(rs, cell, ',');) cells.push_back(cell);
        out.push_back(cells.at(idx));
    }
    return out;
}

const Table& table(const ExperimentResult& r, const std::string& name) {
    for (const auto& [n, t] : r.tables)
        if (n == name) return t;
    throw std::runtime_error("no table " + name);
}

std::string lc_config(const std::string& values, const std::string& extra = "") {
    return R"({"potential": {"type": "locally-constant", "alphabet_size": 2, "depth": 1, "values": )" + values + "}" +
           extra + R"(, "reports": ["gamma"]})";
}

const std::string lc1_values = R"({"00": "0", "01": "-1", "10": "-1", "11": "0"})";

}  // namespace

TEST(FormatNumber, SeventeenDigitsAndSentinels) {
    EXPECT_EQ(format_number(0.1), "0.10000000000000001");
    EXPECT_EQ(format_number(-1.0), "-1");
    EXPECT_EQ(format_number(-std::numeric_limits<double>::infinity()), "-inf");
    EXPECT_EQ(format_number(6.6162610567094853e-112), "6.6162610567094853e-112");
}

TEST(ConfigDigest, Fnv1a) {
    EXPECT_EQ(config_digest(""), "cbf29ce484222325");
    EXPECT_EQ(config_digest("a"), "af63dc4c8601ec8c");
}

TEST(ParseConfig, LocallyConstant) {
    const auto cfg = parse_config(ex::lc1_config());
    ASSERT_TRUE(std::holds_alternative<LocallyConstantSpec>(cfg.potential));
    EXPECT_EQ(cfg.beta_grid, default_beta_grid());
    EXPECT_EQ(cfg.reports, (std::vector<std::string>{"gamma", "subaction", "measure"}));
    EXPECT_EQ(cfg.digest, config_digest(ex::lc1_config()));
    EXPECT_TRUE(std::get<LocallyConstantSpec>(cfg.potential).potential.normalized_for_optimization);
}

TEST(ParseConfig, NumbersAsDecimalStringsOrJsonNumbers) {
    const auto a = parse_config(lc_config(lc1_values, R"(, "beta_grid": ["0.1", 2, "3e1"])"));
    EXPECT_EQ(a.beta_grid, (std::vector<double>{0.1, 2.0, 30.0}));
}

TEST(ParseConfig, Walters) {
    const auto cfg = parse_config(ex::w4_config());
    ASSERT_TRUE(std::holds_alternative<WaltersPotential>(cfg.potential));
    const auto& w = std::get<WaltersPotential>(cfg.potential);
    EXPECT_EQ(w.a(), -1.0);
    EXPECT_EQ(w.c(), -3.0);
    ASSERT_TRUE(cfg.perturbation);
    EXPECT_EQ(cfg.perturbation->delta, -3.5);
}

TEST(ParseConfig, SchemaViolations) {
    const std::vector<std::string> bad{
        "not json",
        "[]",
        lc_config(lc1_values, R"(, "extra": 1)"),
        lc_config(R"({"00": "0", "01": "-1", "10": "-1"})"),
        lc_config(R"({"00": "0", "01": "-1", "10": "-1", "11": "0.5"})"),
        lc_config(R"({"00": "0", "01": "-1", "10": "-1", "12": "0"})"),
        lc_config(R"({"00": "0", "01": "-1", "10": "-1", "11": "1e400"})"),
        lc_config(lc1_values, R"(, "beta_grid": [4, 2])"),
        lc_config(lc1_values, R"(, "beta_grid": [0, 2])"),
        lc_config(lc1_values, R"(, "beta_grid": [])"),
        R"({"potential": {"type": "locally-constant", "alphabet_size": 2, "depth": 1, "transitions": [[0, 1], [1, 0]],
            "values": {"01": "0", "10": "0"}}, "reports": ["gamma"]})",
        R"({"potential": {"type": "bogus"}, "reports": ["gamma"]})",
        R"({"potential": {"type": "appendix", "gamma": "-1", "eta": "-2"}, "reports": ["appendix"]})",
        R"({"potential": {"type": "appendix", "gamma": "-2", "eta": "-1"}, "reports": ["gamma"]})",
        R"({"potential": {"type": "walters", "b": "-1", "d": "-1", "a": {"alpha": "1", "rho": "0.5"},
            "c": {"alpha": "-1", "rho": "0.5"}}, "reports": ["pressure"]})",
        R"({"potential": {"type": "walters", "b": "-1", "d": "-1", "a": {"alpha": "-1", "rho": "0.5"},
            "c": {"alpha": "-1", "rho": "0.5"}}, "reports": ["stability"]})",
        R"({"potential": {"type": "walters", "b": "-1", "d": "-1", "a": {"alpha": "-1", "rho": "0.5"},
            "c": {"alpha": "-1", "rho": "0.5"}}, "perturbation": {"delta": "-3", "sign": "up"}, "reports": ["pressure"]})",
        R"({"potential": {"type": "walters", "b": "-1", "d": "-1", "a": {"alpha": "-1", "rho": "0.5"},
            "c": {"alpha": "-1", "rho": "0.5"}}, "reports": ["pressure", "pressure"]})",
    };
    for (const auto& text : bad) EXPECT_THROW(parse_config(text), ConfigError) << text;
}

TEST(RunExperiment, SymmetricGammaColumnEndsNearMinusOne) {
    const auto cfg = parse_config(lc_config(lc1_values).replace(lc_config(lc1_values).find(R"(["gamma"])"), 9,
                                                                 R"(["gamma", "subaction"])"));
    const auto r = run_experiment(cfg);
    const auto col = column(table(r, "gamma").csv(cfg.digest), "gamma_hat");
    ASSERT_EQ(col.size(), default_beta_grid().size());
    EXPECT_NEAR(std::stod(col.back()), -1.0, 0.05);
    EXPECT_EQ(table(r, "subaction").header[3], "V_0");
}

TEST(RunExperiment, BoundaryRegimeSummaryLine) {
    auto cfg = parse_config(ex::w4_config());
    cfg.reports = {"regime"};
    const auto r = run_experiment(cfg);
    ASSERT_EQ(r.summary.size(), 1u);
    EXPECT_EQ(r.summary[0], "boundary-golden, mass 0.7236068");
}

TEST(RunExperiment, CsvCarriesDigestAndHeader) {
    const auto cfg = parse_config(ex::w4_config());
    const auto r = run_experiment(cfg);
    for (const auto& [name, t] : r.tables) {
        const std::string csv = t.csv(cfg.digest);
        EXPECT_EQ(csv.rfind("# config fnv1a64:" + cfg.digest + "\n", 0), 0u) << name;
        for (const auto& row : t.rows) EXPECT_EQ(row.size(), t.header.size()) << name;
    }
}

TEST(RunExperiment, TwoLoopTable) {
    const auto cfg = parse_config(R"({"potential": {"type": "appendix", "gamma": "-2", "eta": "-1"},
                                      "beta_grid": ["5", "10", "20"], "reports": ["appendix"]})");
    const auto r = run_experiment(cfg);
    const auto csv = table(r, "appendix").csv(cfg.digest);
    const auto p0 = column(csv, "p0"), p0n = column(csv, "p0_numeric");
    for (std::size_t i = 0; i < p0.size(); ++i) EXPECT_NEAR(std::stod(p0n[i]) / std::stod(p0[i]), 1.0, 1e-10);
}

TEST(RunExperiment, NumericalFailureNamesTheOperation) {
    const auto cfg = parse_config(lc_config(R"({"00": "0", "01": "0", "10": "0", "11": "0"})"));
    try {
        run_experiment(cfg);
        FAIL() << "expected a numerical failure";
    } catch (const NumericalError& e) {
        EXPECT_EQ(e.operation(), "estimate_gamma");
    }
}

TEST(RunExperiment, ByteIdenticalAcrossRunsAndThreadCounts) {
    for (const auto& text : {ex::lc1_config(), ex::w4_config()}) {
        const auto cfg = parse_config(text);
        const auto a = run_experiment(cfg, 1), b = run_experiment(cfg, 1), c = run_experiment(cfg, 3);
        ASSERT_EQ(a.tables.size(), c.tables.size());
        for (std::size_t i = 0; i < a.tables.size(); ++i) {
            EXPECT_EQ(a.tables[i].second.csv(cfg.digest), b.tables[i].second.csv(cfg.digest));
            EXPECT_EQ(a.tables[i].second.csv(cfg.digest), c.tables[i].second.csv(cfg.digest));
        }
        EXPECT_EQ(a.summary, c.summary);
    }
}

TEST(WriteExperiment, OneCsvPerReportPlusSummary) {
    const auto dir = std::filesystem::temp_directory_path() / "zerotemp-write-test";
    std::filesystem::remove_all(dir);
    const auto cfg = parse_config(ex::w4_config());
    const auto files = write_experiment(cfg, run_experiment(cfg), dir);
    ASSERT_EQ(files.size(), cfg.reports.size() + 1);
    for (std::size_t i = 0; i < cfg.reports.size(); ++i) EXPECT_EQ(files[i].filename(), cfg.reports[i] + ".csv");
    EXPECT_EQ(read_file(dir / "summary.txt").rfind("# config fnv1a64:", 0), 0u);
    std::filesystem::remove_all(dir);
}
