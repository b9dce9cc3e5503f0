#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <sys/wait.h>

#include "commands.hpp"

using namespace eur;
using namespace eur::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("eur_cli_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(EUR_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
    fs::create_directories(dir);
    const auto path = dir / "config.json";
    std::ofstream(path) << text;
    return path;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    for (std::string line; std::getline(is, line);) out.push_back(line);
    return out;
}

}  // namespace

TEST(ParseConfig, Defaults) {
    const auto c = parse_config(json::object());
    EXPECT_EQ(c.spectrum.preset, "qubit");
    EXPECT_EQ(c.alpha.size(), 9u);
    EXPECT_EQ(c.eta, (std::vector<double>{0.5, 0.75, 1.0}));
    EXPECT_EQ(c.fig1.beta, (std::vector<double>{0.55, 0.7, 0.85, 1.0}));
}

TEST(ParseConfig, FullConfig) {
    const auto c = parse_config(json::parse(R"({
        "spectrum": {"levels": [0, 1, 1.5]},
        "state": {"random": {"rank": 2}},
        "s": {"from": 3, "to": 6},
        "alpha": [0.75, 2, "inf"],
        "eta": [0.5, 1.0],
        "tau0": 0.25,
        "partitions": [{"uniform": 8}, {"random": 5}, {"marks": [0, 1, 12.566370614359172]}],
        "fig1": {"r": [1], "beta": [0.6], "s_plus_1_min": 2, "s_plus_1_max": 10},
        "sweep": {"trials": 3, "presets": ["qubit"], "max_extra_s": 4},
        "continuum": {"enabled": false, "resolution": 33},
        "seed": 9
    })"));
    EXPECT_EQ(c.spectrum.levels, (std::vector<double>{0.0, 1.0, 1.5}));
    EXPECT_EQ(c.s, (std::vector<std::int64_t>{3, 4, 5, 6}));
    EXPECT_TRUE(is_infinite(c.alpha.back()));
    EXPECT_EQ(c.partitions.size(), 3u);
    EXPECT_EQ(c.partitions[2].kind, PartitionSpec::Kind::Marks);
    EXPECT_FALSE(c.continuum.enabled);
    EXPECT_EQ(c.seed, 9u);
    EXPECT_EQ(std::get<RandomStateSpec>(c.state.source).rank, 2);
}

TEST(ParseConfig, RejectsUnknownAndInvalid) {
    for (const char* text : {R"({"bogus": 1})", R"({"spectrum": {"preset": "qubit", "x": 1}})",
                             R"({"fig1": {"betas": [0.6]}})", R"({"alpha": [0]})", R"({"alpha": ["big"]})",
                             R"({"eta": [0.3]})", R"({"s": [0]})", R"({"s": {"from": 5, "to": 2}})",
                             R"({"fig1": {"beta": [0.5]}})", R"({"partitions": [{"uniform": 0}]})",
                             R"({"state": {"random": {"rank": 1}, "bloch": [1, 0, 0]}})",
                             R"({"spectrum": {"preset": "qubit", "levels": [0, 1]}})", R"([1, 2])"})
        EXPECT_THROW(parse_config(json::parse(text)), ConfigError) << text;
}

TEST(ResolveInputs, Errors) {
    auto c = parse_config(json::parse(R"({"spectrum": {"preset": "three-level-3-2"}, "s": [2]})"));
    EXPECT_THROW(resolve_inputs(c), ConfigError);
    c = parse_config(json::parse(R"({"state": {"bloch": [1, 0, 0]}, "spectrum": {"preset": "equidistant:2"}})"));
    EXPECT_THROW(resolve_inputs(c), ConfigError);
    c = parse_config(json::parse(R"({"spectrum": {"levels": [0, 2, 1]}})"));
    EXPECT_THROW(resolve_inputs(c), ConfigError);
    c = parse_config(json::parse(R"({"partitions": [{"marks": [0, 1, 2]}]})"));
    EXPECT_THROW(resolve_inputs(c), ConfigError);
    c = parse_config(json::parse(R"({"spectrum": {"preset": "three-level-3-2"}})"));
    const auto in = resolve_inputs(c);
    EXPECT_EQ(in.s_values, (std::vector<std::int64_t>{3}));
}

TEST(Certify, QubitPlusExactCase) {
    auto c = parse_config(json::parse(R"({"state": {"bloch": [1, 0, 0]}, "s": [1], "alpha": [1]})"));
    const auto result = cmd_certify(c);
    EXPECT_TRUE(result.all_hold);
    bool seen = false;
    for (const auto& r : result.reports) {
        EXPECT_TRUE(r.applicable);
        if (r.relation == RelationId::RENFR) {
            EXPECT_NEAR(r.slack, 0.0, 1e-12);
            seen = true;
        }
    }
    EXPECT_TRUE(seen);
}

TEST(Certify, ThreeLevelSweepAllHold) {
    auto c = parse_config(json::parse(
        R"({"spectrum": {"preset": "three-level-3-2"}, "s": {"from": 4, "to": 64}, "continuum": {"enabled": false}})"));
    const auto result = cmd_certify(c);
    EXPECT_TRUE(result.all_hold);
    EXPECT_GT(result.reports.size(), 100u);
}

TEST(Sweep, DeterministicAndIncludesEtaRows) {
    auto c = parse_config(json::parse(R"({"sweep": {"trials": 50}})"));
    c.formats = {io::ReportFormat::Csv};
    const auto a = cmd_sweep(c);
    const auto b = cmd_sweep(c);
    ASSERT_EQ(a.files.size(), b.files.size());
    for (std::size_t i = 0; i < a.files.size(); ++i) EXPECT_EQ(a.files[i].contents, b.files[i].contents);
    EXPECT_TRUE(a.all_hold);
    const auto summary = summarize(a.reports);
    EXPECT_TRUE(summary.contains(RelationId::ETAUN));
    EXPECT_TRUE(summary.contains(RelationId::MUHETA));
    c.seed = 2;
    EXPECT_NE(cmd_sweep(c).files[0].contents, a.files[0].contents);
}

TEST(Fig1, EqualityRowAndOrdering) {
    auto c = parse_config(json::parse(R"({"fig1": {"s_plus_1_max": 200}})"));
    const auto result = cmd_fig1(c);
    EXPECT_TRUE(result.all_hold);
    ASSERT_EQ(result.files.size(), 3u);
    EXPECT_EQ(result.files[0].name, "fig1_r1.csv");
    EXPECT_EQ(result.files[1].name, "fig1_r0.75.csv");
    const auto rows = lines(result.files[0].contents);
    EXPECT_EQ(rows.front(), "s_plus_1,beta,lhs,ln_bound,slack");
    EXPECT_EQ(rows.size(), 1u + 4u * 199u);
    // beta = 1 block, first row is s+1 = 2
    const auto& eq = rows[1 + 3 * 199];
    EXPECT_EQ(eq.substr(0, 4), "2,1,");
    const double slack = std::stod(eq.substr(eq.rfind(',') + 1));
    EXPECT_NEAR(slack, 0.0, 1e-12);
    EXPECT_THROW(cmd_fig1(parse_config(json::parse(R"({"spectrum": {"preset": "equidistant:2"}})"))),
                 ConfigError);
}

TEST(Continuum, DensityCsv) {
    auto c = parse_config(json::parse(R"({"state": {"bloch": [1, 0, 0]}, "continuum": {"resolution": 9}})"));
    const auto result = cmd_continuum(c);
    EXPECT_TRUE(result.all_hold);
    const auto rows = lines(result.files[0].contents);
    ASSERT_EQ(rows.size(), 10u);
    EXPECT_EQ(rows[0], "tau,w");
    EXPECT_EQ(rows[1], "0," + io::format_double(1.0 / std::numbers::pi));
}

TEST(Binary, ExitCodesAndFiles) {
    const auto dir = scratch("exit");
    const auto bad = write_config(dir, R"({"unknown": true})");
    EXPECT_EQ(run_cli("certify --config " + bad.string() + " --out-dir " + (dir / "out").string()), 2);
    EXPECT_FALSE(fs::exists(dir / "out"));

    const auto bad_s = write_config(dir / "s", R"({"spectrum": {"preset": "three-level-3-2"}, "s": [2]})");
    EXPECT_EQ(run_cli("certify --config " + bad_s.string() + " --out-dir " + (dir / "out").string()), 2);
    EXPECT_FALSE(fs::exists(dir / "out"));

    const auto irrational = write_config(dir / "irr", R"({"spectrum": {"levels": [0, 1, 1.4142135623730951]}, "max_denominator": 50, "tolerance": 1e-12})");
    EXPECT_EQ(run_cli("certify --config " + irrational.string() + " --out-dir " + (dir / "out").string()), 3);
    EXPECT_FALSE(fs::exists(dir / "out"));

    EXPECT_EQ(run_cli("certify --out-dir " + (dir / "ok").string() + " --format jsonl"), 0);
    EXPECT_TRUE(fs::exists(dir / "ok" / "reports.jsonl"));
    EXPECT_FALSE(fs::exists(dir / "ok" / "reports.csv"));
    EXPECT_TRUE(fs::exists(dir / "ok" / "certify_meta.json"));
    const auto meta = json::parse(slurp(dir / "ok" / "certify_meta.json"));
    EXPECT_LT(meta["measurements"][0]["identity_defect"].get<double>(), 1e-10);

    EXPECT_EQ(run_cli("frobnicate"), 2);
    EXPECT_EQ(run_cli("certify --format xml"), 2);
}

TEST(Binary, SweepByteIdenticalAcrossThreadCounts) {
    const auto dir = scratch("sweep");
    const auto cfg = write_config(dir, R"({"sweep": {"trials": 40}})");
    EXPECT_EQ(run_cli("sweep --config " + cfg.string() + " --seed 5 --format csv --out-dir " + (dir / "a").string()), 0);
    EXPECT_EQ(run_cli("sweep --config " + cfg.string() + " --seed 5 --format csv --out-dir " + (dir / "b").string()), 0);
    const std::string one = "EUR_NUM_THREADS=1 ";
    const int status = std::system((one + EUR_CLI_PATH + " sweep --config " + cfg.string() +
                                    " --seed 5 --format csv --out-dir " + (dir / "c").string() + " > /dev/null")
                                       .c_str());
    EXPECT_EQ(WEXITSTATUS(status), 0);
    EXPECT_EQ(slurp(dir / "a" / "sweep.csv"), slurp(dir / "b" / "sweep.csv"));
    EXPECT_EQ(slurp(dir / "a" / "sweep.csv"), slurp(dir / "c" / "sweep.csv"));
    EXPECT_EQ(slurp(dir / "a" / "sweep_summary.csv"), slurp(dir / "c" / "sweep_summary.csv"));
}

TEST(Io, ReportRoundTrip) {
    const auto m = build_povm(reduce_to_integers(preset_spectrum("qubit")), 0.0, 1);
    const auto [r, t] = check_maassen_uffink(m, bloch_qubit(1, 0, 0), kInfinity);
    const auto j = io::to_json(r);
    EXPECT_EQ(j["relation_id"], "RENGR");
    EXPECT_EQ(j["alpha"], "inf");
    EXPECT_EQ(j["beta"].get<double>(), 0.5);
    const auto row = io::to_csv_row(r);
    EXPECT_EQ(row.substr(0, 16), "RENGR,inf,0.5,1,");
    EXPECT_EQ(io::format_double(0.1), "0.10000000000000001");
}

TEST(Io, StateAndSpectrumReaders) {
    const auto rho = io::state_from_json(json::parse(R"({"coefficients": {"re": [1, 0], "im": [0, 1]}})"));
    EXPECT_NEAR(std::abs(rho(0, 1) - Complex(0.0, -0.5)), 0.0, 1e-15);
    const auto full = io::state_from_json(json::parse(R"({"re": [[0.5, 0], [0, 0.5]]})"));
    EXPECT_NEAR(purity(full), 0.5, 1e-15);
    EXPECT_THROW(io::state_from_json(json::parse(R"({"re": [[1, 0]]})")), InvalidState);
    EXPECT_EQ(io::parse_spectrum_text("# levels\n0\n1.0  # first\n\n1.5\n").levels(),
              (std::vector<double>{0.0, 1.0, 1.5}));
    EXPECT_EQ(io::parse_spectrum_text(R"({"levels": [0, 2]})").levels(), (std::vector<double>{0.0, 2.0}));
    EXPECT_THROW(io::parse_spectrum_text("0\nabc\n"), InvalidSpectrum);
}
