#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "eur/eur.hpp"
#include "eur/io.hpp"
#include "run_config.hpp"

namespace eur::cli {

enum ExitCode : int { kAllHold = 0, kSomeFail = 1, kConfigFailure = 2, kNumericalFailure = 3 };

/// Worker count: hardware concurrency capped by EUR_NUM_THREADS.
inline unsigned worker_count() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("EUR_NUM_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return n;
}

/// Runs task(i) for i in [0, count) and returns the results in index order.
/// The first exception thrown by any task is rethrown after all workers join.
template <class T, class F>
std::vector<T> parallel_map(std::size_t count, const F& task) {
    std::vector<T> results(count);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_lock;
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                results[i] = task(i);
            } catch (...) {
                std::lock_guard lock(failure_lock);
                if (!failure) failure = std::current_exception();
                next.store(count);
            }
        }
    };
    const unsigned threads = std::min<std::size_t>(worker_count(), std::max<std::size_t>(count, 1));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    return results;
}

struct OutputFile {
    std::string name;
    std::string contents;
};

/// Everything a command produces; files are written only after the whole
/// computation succeeded.
struct CommandResult {
    std::vector<BoundReport> reports;
    std::vector<OutputFile> files;
    bool all_hold = true;
    std::string summary;
};

inline void write_outputs(const std::string& dir, const std::vector<OutputFile>& files) {
    std::filesystem::create_directories(dir);
    for (const auto& f : files) {
        std::ofstream out(std::filesystem::path(dir) / f.name, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + f.name);
        out << f.contents;
    }
}

inline std::string render_reports(const std::vector<BoundReport>& reports, io::ReportFormat format) {
    std::ostringstream os;
    io::write_reports(os, reports, format);
    return os.str();
}

inline void add_report_files(CommandResult& result, const std::string& stem,
                             const std::vector<io::ReportFormat>& formats) {
    for (auto format : formats) {
        const char* ext = format == io::ReportFormat::Csv ? ".csv" : ".jsonl";
        result.files.push_back({stem + ext, render_reports(result.reports, format)});
    }
}

inline bool every_report_holds(const std::vector<BoundReport>& reports) {
    return std::all_of(reports.begin(), reports.end(), [](const BoundReport& r) { return r.holds; });
}

inline void keep_applicable(std::vector<BoundReport>& out, std::vector<BoundReport> in) {
    for (auto& r : in)
        if (r.applicable) out.push_back(std::move(r));
}

/// Discrete relations over an order grid and symmetric efficiencies eta_E = eta_T.
/// Landau-Pollak appears once; each extra eta adds only the inefficiency rows.
inline std::vector<BoundReport> discrete_reports(const ComplementMeasurement& measurement,
                                                 const DensityMatrix& state,
                                                 const std::vector<double>& alphas,
                                                 const std::vector<double>& etas) {
    std::vector<BoundReport> out;
    for (std::size_t a = 0; a < alphas.size(); ++a) {
        const double eta0 = etas.front();
        keep_applicable(out, check_all_discrete(measurement, state, alphas[a], eta0, eta0, a == 0));
        for (std::size_t e = 1; e < etas.size(); ++e)
            keep_applicable(out, check_inefficiency(measurement, state, etas[e], etas[e], alphas[a]));
    }
    return out;
}

/// Configuration resolved against the library; throws ConfigError on any
/// invalid input so that nothing is written.
struct ResolvedInputs {
    RationalStructure structure;
    DensityMatrix state;
    std::vector<std::int64_t> s_values;
    std::vector<BinPartition> partitions;
};

inline ResolvedInputs resolve_inputs(const RunConfig& config) {
    const EnergySpectrum spectrum = resolve_spectrum(config.spectrum);
    RationalStructure structure = reduce_to_integers(spectrum, config.max_denominator, config.tolerance);
    DensityMatrix state = resolve_state(config.state, structure.dimension(), config.seed);
    std::vector<std::int64_t> s_values = config.s;
    if (s_values.empty()) s_values.push_back(min_valid_s(structure));
    for (auto s : s_values)
        if (!validate_s(structure, s))
            throw ConfigError("s = " + std::to_string(s) + " is not valid for this spectrum (minimum " +
                              std::to_string(min_valid_s(structure)) + ")");
    std::vector<BinPartition> partitions;
    for (std::size_t i = 0; i < config.partitions.size(); ++i)
        partitions.push_back(resolve_partition(config.partitions[i], config.tau0,
                                               structure.characteristic_time, config.seed + i));
    return {std::move(structure), std::move(state), std::move(s_values), std::move(partitions)};
}

inline std::vector<BoundReport> continuum_reports(const TimeDensity& w, const RunConfig& config,
                                                  const std::vector<std::int64_t>& s_values,
                                                  const std::vector<BinPartition>& partitions) {
    std::vector<BoundReport> out;
    const auto intervals = config.continuum.intervals;
    for (double alpha : config.alpha) {
        if (!(alpha > 0.5)) continue;
        out.push_back(check_continuous_relation(w, alpha, intervals));
        for (const auto& partition : partitions) {
            auto [renyi_report, tsallis_report] = check_binned_relations(w, partition, alpha);
            keep_applicable(out, {renyi_report, tsallis_report});
            for (auto s : s_values)
                keep_applicable(out, check_norm_inequalities(w, partition, alpha, s, intervals));
        }
    }
    return out;
}

inline json run_metadata(const RunConfig& config, const RationalStructure& structure) {
    json alphas = json::array();
    for (double a : config.alpha) alphas.push_back(io::number_to_json(a));
    return json{{"seed", config.seed},
                {"tau0", config.tau0},
                {"alpha", alphas},
                {"eta", config.eta},
                {"structure", io::structure_to_json(structure)}};
}

inline CommandResult cmd_certify(const RunConfig& config) {
    const ResolvedInputs in = resolve_inputs(config);
    CommandResult result;
    json meta = run_metadata(config, in.structure);
    meta["purity"] = purity(in.state);
    json per_s = json::array();
    for (auto s : in.s_values) {
        const ComplementMeasurement measurement(in.structure, config.tau0, s);
        keep_applicable(result.reports, discrete_reports(measurement, in.state, config.alpha, config.eta));
        json entry{{"s", s},
                   {"identity_defect", measurement.identity_defect()},
                   {"flat_overlap", overlap_f(measurement)}};
        if (s >= in.structure.max_r()) {
            const ExtendedSystem system(in.structure, config.tau0, s);
            entry["naimark_consistency"] = consistency_check(system, in.state);
        } else {
            entry["naimark_consistency"] = nullptr;
        }
        per_s.push_back(std::move(entry));
    }
    meta["measurements"] = per_s;
    if (config.continuum.enabled) {
        const TimeDensity w(in.structure, in.state, config.tau0);
        for (auto& r : continuum_reports(w, config, in.s_values, in.partitions))
            result.reports.push_back(std::move(r));
    }
    result.all_hold = every_report_holds(result.reports);
    add_report_files(result, "reports", config.formats);
    result.files.push_back({"certify_meta.json", meta.dump(2) + "\n"});
    std::ostringstream os;
    os << result.reports.size() << " reports, "
       << std::count_if(result.reports.begin(), result.reports.end(),
                        [](const BoundReport& r) { return !r.holds; })
       << " failing\n";
    result.summary = os.str();
    return result;
}

struct Fig1Row {
    std::int64_t s_plus_1 = 0;
    double beta = 0.0;
    double lhs = 0.0;
    double ln_bound = 0.0;
};

inline CommandResult cmd_fig1(const RunConfig& config) {
    const EnergySpectrum spectrum = resolve_spectrum(config.spectrum);
    if (spectrum.dimension() != 2) throw ConfigError("fig1 needs a qubit spectrum");
    const RationalStructure structure =
        reduce_to_integers(spectrum, config.max_denominator, config.tolerance);
    const auto& f = config.fig1;
    const std::size_t count = static_cast<std::size_t>(f.s_plus_1_max - f.s_plus_1_min + 1);
    for (std::size_t i = 0; i < count; ++i)
        if (!validate_s(structure, f.s_plus_1_min + static_cast<std::int64_t>(i) - 1))
            throw ConfigError("fig1 s range contains an invalid s for this spectrum");

    std::vector<DensityMatrix> states;
    for (double r : f.r) states.push_back(bloch_qubit(r, 0.0, 0.0));

    // rows[i][k] for s+1 = min + i and state k, beta-major inside.
    using Block = std::vector<std::vector<Fig1Row>>;
    const auto blocks = parallel_map<Block>(count, [&](std::size_t i) {
        const std::int64_t s_plus_1 = f.s_plus_1_min + static_cast<std::int64_t>(i);
        const ComplementMeasurement measurement(structure, config.tau0, s_plus_1 - 1);
        Block block(states.size());
        for (std::size_t k = 0; k < states.size(); ++k) {
            const ProbabilityVector p = energy_probabilities(states[k]);
            const ProbabilityVector q = complement_probabilities(measurement, states[k]);
            for (double beta : f.beta) {
                const double alpha = conjugate_beta(beta);
                block[k].push_back({s_plus_1, beta, renyi(p, alpha) + renyi(q, beta),
                                    std::log(static_cast<double>(s_plus_1))});
            }
        }
        return block;
    });

    CommandResult result;
    json meta{{"r", f.r},
              {"beta", f.beta},
              {"s_plus_1_min", f.s_plus_1_min},
              {"s_plus_1_max", f.s_plus_1_max},
              {"tau0", config.tau0},
              {"bloch_axis", "x"},
              {"files", json::array()}};
    json alphas = json::array();
    for (double beta : f.beta) alphas.push_back(conjugate_beta(beta));
    meta["alpha"] = alphas;
    std::ostringstream summary;
    for (std::size_t k = 0; k < states.size(); ++k) {
        std::ostringstream csv;
        csv << "s_plus_1,beta,lhs,ln_bound,slack\n";
        double slack_sum = 0.0;
        std::size_t rows = 0;
        for (std::size_t b = 0; b < f.beta.size(); ++b) {
            for (const auto& block : blocks) {
                const Fig1Row& row = block[k][b];
                const double slack = row.lhs - row.ln_bound;
                if (slack < -kBoundTolerance) result.all_hold = false;
                slack_sum += slack;
                ++rows;
                csv << row.s_plus_1 << ',' << io::format_double(row.beta) << ','
                    << io::format_double(row.lhs) << ',' << io::format_double(row.ln_bound) << ','
                    << io::format_double(slack) << '\n';
            }
        }
        const std::string name = "fig1_r" + io::format_double(f.r[k]) + ".csv";
        result.files.push_back({name, csv.str()});
        meta["files"].push_back(name);
        summary << name << ": " << rows << " rows, mean slack "
                << io::format_double(slack_sum / static_cast<double>(rows)) << '\n';
    }
    result.files.push_back({"fig1_meta.json", meta.dump(2) + "\n"});
    result.summary = summary.str();
    return result;
}

/// One randomized trial of the sweep; everything derives from (seed, trial).
inline std::vector<BoundReport> sweep_trial(const RunConfig& config, std::size_t trial) {
    std::seed_seq seq{static_cast<std::uint64_t>(config.seed), static_cast<std::uint64_t>(trial)};
    std::mt19937_64 rng(seq);
    const auto& presets = config.sweep.presets;
    const std::string& preset =
        presets[std::uniform_int_distribution<std::size_t>(0, presets.size() - 1)(rng)];
    const RationalStructure structure =
        reduce_to_integers(preset_spectrum(preset), config.max_denominator, config.tolerance);
    const int dim = structure.dimension();
    const int rank = std::uniform_int_distribution<int>(1, dim)(rng);
    const DensityMatrix state = random_state(dim, rank, rng());
    std::int64_t s = min_valid_s(structure) +
                     std::uniform_int_distribution<std::int64_t>(0, config.sweep.max_extra_s)(rng);
    while (!validate_s(structure, s)) ++s;
    const ComplementMeasurement measurement(structure, config.tau0, s);
    return discrete_reports(measurement, state, config.alpha, config.eta);
}

inline std::vector<BoundReport> sweep_reports(const RunConfig& config) {
    for (const auto& p : config.sweep.presets) {
        try {
            (void)preset_spectrum(p);
        } catch (const InvalidSpectrum& e) {
            throw ConfigError(e.what());
        }
    }
    const auto per_trial = parallel_map<std::vector<BoundReport>>(
        config.sweep.trials, [&](std::size_t t) { return sweep_trial(config, t); });
    std::vector<BoundReport> out;
    for (const auto& block : per_trial) out.insert(out.end(), block.begin(), block.end());
    return out;
}

struct RelationSummary {
    std::size_t count = 0;
    std::size_t failures = 0;
    double min_slack = std::numeric_limits<double>::infinity();
};

inline std::map<RelationId, RelationSummary> summarize(const std::vector<BoundReport>& reports) {
    std::map<RelationId, RelationSummary> out;
    for (const auto& r : reports) {
        auto& s = out[r.relation];
        ++s.count;
        if (!r.holds) ++s.failures;
        s.min_slack = std::min(s.min_slack, r.slack);
    }
    return out;
}

inline CommandResult cmd_sweep(const RunConfig& config) {
    CommandResult result;
    result.reports = sweep_reports(config);
    result.all_hold = every_report_holds(result.reports);
    add_report_files(result, "sweep", config.formats);
    std::ostringstream csv;
    csv << "relation_id,count,failures,min_slack\n";
    for (const auto& [id, s] : summarize(result.reports))
        csv << to_string(id) << ',' << s.count << ',' << s.failures << ','
            << io::format_double(s.min_slack) << '\n';
    result.files.push_back({"sweep_summary.csv", csv.str()});
    result.summary = csv.str();
    return result;
}

inline CommandResult cmd_continuum(const RunConfig& config) {
    const ResolvedInputs in = resolve_inputs(config);
    const TimeDensity w(in.structure, in.state, config.tau0);
    CommandResult result;
    std::ostringstream csv;
    csv << "tau,w\n";
    for (const auto& [tau, value] : sample_density(w, config.continuum.resolution))
        csv << io::format_double(tau) << ',' << io::format_double(value) << '\n';
    result.files.push_back({"density.csv", csv.str()});
    result.reports = continuum_reports(w, config, in.s_values, in.partitions);
    result.all_hold = every_report_holds(result.reports);
    add_report_files(result, "continuum_reports", config.formats);
    const QuadratureResult mass = power_integral(w, 1.0, config.continuum.intervals);
    json meta = run_metadata(config, in.structure);
    meta["normalization"] = mass.value;
    meta["resolution"] = config.continuum.resolution;
    result.files.push_back({"continuum_meta.json", meta.dump(2) + "\n"});
    std::ostringstream os;
    os << "integral of w = " << io::format_double(mass.value) << ", " << result.reports.size()
       << " reports\n";
    result.summary = os.str();
    return result;
}

}  // namespace eur::cli
