#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "eur/eur.hpp"
#include "eur/io.hpp"

namespace eur::cli {

using nlohmann::json;

/// Raised for anything wrong with the configuration itself (exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SpectrumSource {
    std::string preset = "qubit";
    std::string file;
    std::vector<double> levels;
};

struct RandomStateSpec {
    std::optional<int> rank;  // nullopt: full rank
};

struct StateSpec {
    std::variant<RandomStateSpec, json> source = RandomStateSpec{};
};

struct PartitionSpec {
    enum class Kind { Uniform, Random, Marks } kind = Kind::Uniform;
    std::size_t bins = 16;
    std::vector<double> marks;  // offsets from tau0, last one = T_c
};

struct Fig1Config {
    std::vector<double> r = {1.0, 0.75};
    std::vector<double> beta = {0.55, 0.7, 0.85, 1.0};
    std::int64_t s_plus_1_min = 2;
    std::int64_t s_plus_1_max = 1000;
};

struct SweepConfig {
    std::size_t trials = 1000;
    std::vector<std::string> presets = {"qubit", "equidistant:5", "three-level-3-2"};
    std::int64_t max_extra_s = 64;
};

struct ContinuumConfig {
    bool enabled = true;
    std::size_t resolution = 1025;
    std::int64_t intervals = 0;  // 0: automatic
};

inline const std::vector<double>& default_alpha_grid() {
    static const std::vector<double> grid = {0.5, 0.6, 0.75, 1.0, 1.5, 2.0, 3.0, 5.0, kInfinity};
    return grid;
}

struct RunConfig {
    SpectrumSource spectrum;
    std::int64_t max_denominator = kDefaultMaxDenominator;
    double tolerance = kDefaultRationalTolerance;
    StateSpec state;
    std::vector<std::int64_t> s;  // empty: min valid s
    std::vector<double> alpha = default_alpha_grid();
    std::vector<double> eta = {0.5, 0.75, 1.0};
    double tau0 = 0.0;
    std::vector<PartitionSpec> partitions = {PartitionSpec{}};
    Fig1Config fig1;
    SweepConfig sweep;
    ContinuumConfig continuum;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    std::vector<io::ReportFormat> formats = {io::ReportFormat::Csv, io::ReportFormat::JsonLines};
};

namespace detail {

inline void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                           const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items())
        if (!ok.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

inline double read_order(const json& v, const std::string& where) {
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf" || s == "infinity") return kInfinity;
        throw ConfigError(where + ": bad order '" + s + "'");
    }
    if (!v.is_number()) throw ConfigError(where + ": order must be a number or \"inf\"");
    const double x = v.get<double>();
    if (!(x > 0.0)) throw ConfigError(where + ": order must be > 0");
    return x;
}

template <class T>
T get_as(const json& v, const std::string& where) {
    try {
        return v.get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

inline std::vector<std::int64_t> read_s(const json& v) {
    std::vector<std::int64_t> out;
    if (v.is_array()) {
        out = get_as<std::vector<std::int64_t>>(v, "s");
    } else if (v.is_object()) {
        reject_unknown(v, {"from", "to"}, "s");
        const auto from = get_as<std::int64_t>(v.at("from"), "s.from");
        const auto to = get_as<std::int64_t>(v.at("to"), "s.to");
        if (to < from) throw ConfigError("s.to < s.from");
        for (auto x = from; x <= to; ++x) out.push_back(x);
    } else {
        throw ConfigError("s must be a list or {from, to}");
    }
    for (auto x : out)
        if (x < 1) throw ConfigError("s values must be >= 1");
    return out;
}

inline PartitionSpec read_partition(const json& v) {
    reject_unknown(v, {"uniform", "random", "marks"}, "partition");
    if (v.size() != 1) throw ConfigError("partition needs exactly one of uniform/random/marks");
    PartitionSpec p;
    if (v.contains("uniform")) {
        p.kind = PartitionSpec::Kind::Uniform;
        p.bins = get_as<std::size_t>(v.at("uniform"), "partition.uniform");
    } else if (v.contains("random")) {
        p.kind = PartitionSpec::Kind::Random;
        p.bins = get_as<std::size_t>(v.at("random"), "partition.random");
    } else {
        p.kind = PartitionSpec::Kind::Marks;
        p.marks = get_as<std::vector<double>>(v.at("marks"), "partition.marks");
        if (p.marks.size() < 2) throw ConfigError("partition.marks needs at least two entries");
    }
    if (p.kind != PartitionSpec::Kind::Marks && (p.bins < 1 || p.bins > 1'000'000))
        throw ConfigError("partition bin count out of range");
    return p;
}

}  // namespace detail

/// Parses a JSON configuration; every object rejects keys it does not know.
inline RunConfig parse_config(const json& j) {
    using detail::get_as;
    RunConfig c;
    detail::reject_unknown(j,
                           {"spectrum", "max_denominator", "tolerance", "state", "s", "alpha",
                            "eta", "tau0", "partitions", "fig1", "sweep", "continuum", "seed"},
                           "config");
    if (j.contains("spectrum")) {
        const auto& sp = j.at("spectrum");
        detail::reject_unknown(sp, {"preset", "file", "levels"}, "spectrum");
        if (sp.size() != 1) throw ConfigError("spectrum needs exactly one of preset/file/levels");
        c.spectrum.preset.clear();
        if (sp.contains("preset")) c.spectrum.preset = get_as<std::string>(sp.at("preset"), "spectrum.preset");
        if (sp.contains("file")) c.spectrum.file = get_as<std::string>(sp.at("file"), "spectrum.file");
        if (sp.contains("levels"))
            c.spectrum.levels = get_as<std::vector<double>>(sp.at("levels"), "spectrum.levels");
    }
    if (j.contains("max_denominator")) {
        c.max_denominator = get_as<std::int64_t>(j.at("max_denominator"), "max_denominator");
        if (c.max_denominator < 1) throw ConfigError("max_denominator must be >= 1");
    }
    if (j.contains("tolerance")) {
        c.tolerance = get_as<double>(j.at("tolerance"), "tolerance");
        if (!(c.tolerance > 0.0)) throw ConfigError("tolerance must be > 0");
    }
    if (j.contains("state")) {
        const auto& st = j.at("state");
        if (!st.is_object()) throw ConfigError("state must be an object");
        if (st.contains("random")) {
            detail::reject_unknown(st, {"random"}, "state");
            const auto& r = st.at("random");
            detail::reject_unknown(r, {"rank"}, "state.random");
            RandomStateSpec spec;
            if (r.contains("rank")) spec.rank = get_as<int>(r.at("rank"), "state.random.rank");
            c.state.source = spec;
        } else {
            detail::reject_unknown(st, {"re", "im", "bloch", "coefficients"}, "state");
            c.state.source = st;
        }
    }
    if (j.contains("s")) c.s = detail::read_s(j.at("s"));
    if (j.contains("alpha")) {
        const auto& a = j.at("alpha");
        if (!a.is_array() || a.empty()) throw ConfigError("alpha must be a non-empty list");
        c.alpha.clear();
        for (const auto& v : a) c.alpha.push_back(detail::read_order(v, "alpha"));
    }
    if (j.contains("eta")) {
        c.eta = get_as<std::vector<double>>(j.at("eta"), "eta");
        if (c.eta.empty()) throw ConfigError("eta must be a non-empty list");
        for (double e : c.eta)
            if (!(e >= 0.5 && e <= 1.0)) throw ConfigError("eta values must lie in [0.5, 1]");
    }
    if (j.contains("tau0")) c.tau0 = get_as<double>(j.at("tau0"), "tau0");
    if (j.contains("partitions")) {
        const auto& ps = j.at("partitions");
        if (!ps.is_array()) throw ConfigError("partitions must be a list");
        c.partitions.clear();
        for (const auto& p : ps) c.partitions.push_back(detail::read_partition(p));
    }
    if (j.contains("fig1")) {
        const auto& f = j.at("fig1");
        detail::reject_unknown(f, {"r", "beta", "s_plus_1_min", "s_plus_1_max"}, "fig1");
        if (f.contains("r")) c.fig1.r = get_as<std::vector<double>>(f.at("r"), "fig1.r");
        if (f.contains("beta")) c.fig1.beta = get_as<std::vector<double>>(f.at("beta"), "fig1.beta");
        if (f.contains("s_plus_1_min"))
            c.fig1.s_plus_1_min = get_as<std::int64_t>(f.at("s_plus_1_min"), "fig1.s_plus_1_min");
        if (f.contains("s_plus_1_max"))
            c.fig1.s_plus_1_max = get_as<std::int64_t>(f.at("s_plus_1_max"), "fig1.s_plus_1_max");
        for (double r : c.fig1.r)
            if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("fig1.r values must lie in [0, 1]");
        for (double b : c.fig1.beta)
            if (!(b > 0.5 && b <= 1.0)) throw ConfigError("fig1.beta values must lie in (1/2, 1]");
        if (c.fig1.s_plus_1_min < 2 || c.fig1.s_plus_1_max < c.fig1.s_plus_1_min)
            throw ConfigError("fig1 s+1 range must satisfy 2 <= min <= max");
    }
    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        detail::reject_unknown(s, {"trials", "presets", "max_extra_s"}, "sweep");
        if (s.contains("trials")) c.sweep.trials = get_as<std::size_t>(s.at("trials"), "sweep.trials");
        if (s.contains("presets"))
            c.sweep.presets = get_as<std::vector<std::string>>(s.at("presets"), "sweep.presets");
        if (s.contains("max_extra_s"))
            c.sweep.max_extra_s = get_as<std::int64_t>(s.at("max_extra_s"), "sweep.max_extra_s");
        if (c.sweep.presets.empty()) throw ConfigError("sweep.presets must be non-empty");
        if (c.sweep.max_extra_s < 0) throw ConfigError("sweep.max_extra_s must be >= 0");
    }
    if (j.contains("continuum")) {
        const auto& k = j.at("continuum");
        detail::reject_unknown(k, {"enabled", "resolution", "intervals"}, "continuum");
        if (k.contains("enabled")) c.continuum.enabled = get_as<bool>(k.at("enabled"), "continuum.enabled");
        if (k.contains("resolution"))
            c.continuum.resolution = get_as<std::size_t>(k.at("resolution"), "continuum.resolution");
        if (k.contains("intervals"))
            c.continuum.intervals = get_as<std::int64_t>(k.at("intervals"), "continuum.intervals");
        if (c.continuum.resolution < 2) throw ConfigError("continuum.resolution must be >= 2");
    }
    if (j.contains("seed")) c.seed = get_as<std::uint64_t>(j.at("seed"), "seed");
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config JSON: ") + e.what());
    }
    return parse_config(j);
}

inline EnergySpectrum resolve_spectrum(const SpectrumSource& src) {
    try {
        if (!src.file.empty()) return io::read_spectrum_file(src.file);
        if (!src.levels.empty()) return EnergySpectrum(src.levels);
        return preset_spectrum(src.preset);
    } catch (const InvalidSpectrum& e) {
        throw ConfigError(e.what());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("spectrum file: ") + e.what());
    }
}

inline DensityMatrix resolve_state(const StateSpec& spec, int dimension, std::uint64_t seed) {
    if (const auto* r = std::get_if<RandomStateSpec>(&spec.source)) {
        const int rank = r->rank.value_or(dimension);
        if (rank < 1 || rank > dimension) throw ConfigError("state.random.rank out of range");
        return random_state(dimension, rank, seed);
    }
    try {
        DensityMatrix rho = io::state_from_json(std::get<json>(spec.source));
        if (rho.dimension() != dimension)
            throw ConfigError("state dimension " + std::to_string(rho.dimension()) +
                              " does not match the spectrum dimension " + std::to_string(dimension));
        return rho;
    } catch (const eur::Error& e) {
        throw ConfigError(e.what());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("state: ") + e.what());
    }
}

inline BinPartition resolve_partition(const PartitionSpec& spec, double tau0, double period,
                                      std::uint64_t seed) {
    try {
        switch (spec.kind) {
            case PartitionSpec::Kind::Uniform: return BinPartition::uniform(tau0, period, spec.bins);
            case PartitionSpec::Kind::Random: return BinPartition::random(tau0, period, spec.bins, seed);
            case PartitionSpec::Kind::Marks: {
                std::vector<double> marks;
                for (double m : spec.marks) marks.push_back(tau0 + m);
                if (std::fabs(spec.marks.front()) > 1e-12 ||
                    std::fabs(spec.marks.back() - period) > 1e-9 * std::max(1.0, period))
                    throw ConfigError("partition.marks must run from 0 to T_c = " +
                                      io::format_double(period));
                marks.front() = tau0;
                marks.back() = tau0 + period;
                return BinPartition(std::move(marks));
            }
        }
    } catch (const InvalidPartition& e) {
        throw ConfigError(e.what());
    }
    throw ConfigError("unknown partition kind");
}

}  // namespace eur::cli
