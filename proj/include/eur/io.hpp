#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eur/bounds.hpp"
#include "eur/errors.hpp"
#include "eur/naimark.hpp"
#include "eur/povm.hpp"
#include "eur/spectrum.hpp"
#include "eur/states.hpp"

namespace eur::io {

using nlohmann::json;

/// Shortest round-trip text for a double; "inf" and "nan" spelled out.
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline json number_to_json(double x) {
    if (std::isnan(x)) return nullptr;
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

inline constexpr const char* kReportCsvHeader =
    "relation_id,alpha,beta,s,d,purity,eta,lhs,rhs,slack,holds";

inline std::string to_csv_row(const BoundReport& r) {
    std::ostringstream os;
    os << to_string(r.relation) << ',' << format_double(r.params.alpha) << ','
       << format_double(r.params.beta) << ',' << (r.params.s ? std::to_string(*r.params.s) : "")
       << ',' << r.params.d << ',' << format_double(r.params.purity) << ','
       << format_double(r.params.eta) << ',' << format_double(r.lhs) << ',' << format_double(r.rhs)
       << ',' << format_double(r.slack) << ',' << (r.holds ? "true" : "false");
    return os.str();
}

inline json to_json(const BoundReport& r) {
    json j;
    j["relation_id"] = std::string(to_string(r.relation));
    j["alpha"] = number_to_json(r.params.alpha);
    j["beta"] = number_to_json(r.params.beta);
    j["mu"] = number_to_json(r.params.mu);
    j["s"] = r.params.s ? json(*r.params.s) : json(nullptr);
    j["d"] = r.params.d;
    j["purity"] = number_to_json(r.params.purity);
    j["eta"] = number_to_json(r.params.eta);
    j["eta_energy"] = number_to_json(r.params.eta_energy);
    j["eta_complement"] = number_to_json(r.params.eta_complement);
    j["lhs"] = number_to_json(r.lhs);
    j["rhs"] = number_to_json(r.rhs);
    j["slack"] = number_to_json(r.slack);
    j["tolerance"] = number_to_json(r.tolerance);
    j["holds"] = r.holds;
    return j;
}

enum class ReportFormat { Csv, JsonLines };

inline void write_reports(std::ostream& os, const std::vector<BoundReport>& reports,
                          ReportFormat format) {
    if (format == ReportFormat::Csv) {
        os << kReportCsvHeader << '\n';
        for (const auto& r : reports) os << to_csv_row(r) << '\n';
    } else {
        for (const auto& r : reports) os << to_json(r).dump() << '\n';
    }
}

inline json matrix_to_json(const ComplexMatrix& m) {
    json re = json::array(), im = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json rr = json::array(), ri = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            rr.push_back(m(i, j).real());
            ri.push_back(m(i, j).imag());
        }
        re.push_back(std::move(rr));
        im.push_back(std::move(ri));
    }
    return json{{"re", re}, {"im", im}};
}

inline json structure_to_json(const RationalStructure& s) {
    json ratios = json::array();
    for (const auto& f : s.ratios) ratios.push_back({f.numerator, f.denominator});
    return json{{"levels", s.levels},
                {"r", s.r},
                {"ratios", ratios},
                {"characteristic_time", s.characteristic_time},
                {"residual", s.residual},
                {"max_denominator", s.max_denominator},
                {"tolerance", s.tolerance}};
}

/// Kets stored column-wise as (d+1) x (s+1) re/im arrays.
inline json measurement_to_json(const ComplementMeasurement& m) {
    return json{{"s", m.s()},
                {"tau0", m.tau0()},
                {"tau_grid", m.tau_grid()},
                {"kets", matrix_to_json(m.kets())},
                {"identity_defect", m.identity_defect()},
                {"structure", structure_to_json(m.structure())}};
}

inline json extended_operators_to_json(const ExtendedSystem& system) {
    const auto [number, phase] = conjugate_operators(system);
    return json{{"s", system.s()},
                {"index_map", system.index_map()},
                {"theta_grid", system.theta_grid()},
                {"number_operator", matrix_to_json(number)},
                {"phase_operator", matrix_to_json(phase)}};
}

inline std::vector<std::vector<double>> read_real_rows(const json& j, const char* what) {
    if (!j.is_array()) throw InvalidState(std::string(what) + " must be an array of rows");
    std::vector<std::vector<double>> rows;
    for (const auto& row : j) {
        if (!row.is_array()) throw InvalidState(std::string(what) + " must be an array of rows");
        rows.push_back(row.get<std::vector<double>>());
    }
    return rows;
}

/// Accepts {"re": [[...]], "im": [[...]]}, {"bloch": [x, y, z]} or
/// {"coefficients": {"re": [...], "im": [...]}}.
inline DensityMatrix state_from_json(const json& j) {
    if (!j.is_object()) throw InvalidState("state must be a JSON object");
    if (j.contains("bloch")) {
        const auto v = j.at("bloch").get<std::vector<double>>();
        if (v.size() != 3) throw InvalidState("bloch needs three components");
        return bloch_qubit(v[0], v[1], v[2]);
    }
    if (j.contains("coefficients")) {
        const auto& c = j.at("coefficients");
        const auto re = c.at("re").get<std::vector<double>>();
        const auto im = c.contains("im") ? c.at("im").get<std::vector<double>>()
                                         : std::vector<double>(re.size(), 0.0);
        if (re.size() != im.size()) throw InvalidState("re/im length mismatch");
        ComplexVector v(static_cast<Eigen::Index>(re.size()));
        for (std::size_t i = 0; i < re.size(); ++i) v(static_cast<Eigen::Index>(i)) = Complex(re[i], im[i]);
        return pure_state(v);
    }
    if (j.contains("re")) {
        const auto re = read_real_rows(j.at("re"), "re");
        const auto im = j.contains("im") ? read_real_rows(j.at("im"), "im") : re;
        const auto n = static_cast<Eigen::Index>(re.size());
        ComplexMatrix m(n, n);
        for (Eigen::Index a = 0; a < n; ++a) {
            const auto& rr = re[static_cast<std::size_t>(a)];
            const auto& ri = im[static_cast<std::size_t>(a)];
            if (static_cast<Eigen::Index>(rr.size()) != n || static_cast<Eigen::Index>(ri.size()) != n)
                throw InvalidState("density matrix rows must be square");
            for (Eigen::Index b = 0; b < n; ++b)
                m(a, b) = Complex(rr[static_cast<std::size_t>(b)],
                                  j.contains("im") ? ri[static_cast<std::size_t>(b)] : 0.0);
        }
        return DensityMatrix(m);
    }
    throw InvalidState("state JSON needs one of re/im, bloch, coefficients");
}

/// Spectrum file: a JSON object with "levels", or one decimal level per line
/// ('#' starts a comment). Units: hbar = 1.
inline EnergySpectrum parse_spectrum_text(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        const json j = json::parse(text);
        if (!j.contains("levels")) throw InvalidSpectrum("JSON spectrum needs key \"levels\"");
        return EnergySpectrum(j.at("levels").get<std::vector<double>>());
    }
    std::vector<double> levels;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto e = line.find_last_not_of(" \t\r");
        const std::string token = line.substr(b, e - b + 1);
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(token, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != token.size()) throw InvalidSpectrum("bad level line '" + token + "'");
        levels.push_back(value);
    }
    return EnergySpectrum(std::move(levels));
}

inline EnergySpectrum read_spectrum_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidSpectrum("cannot open spectrum file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_spectrum_text(ss.str());
}

}  // namespace eur::io
