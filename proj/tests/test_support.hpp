#pragma once

#include <random>
#include <string>
#include <vector>

#include "eur/eur.hpp"

namespace eur::fixtures {

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {"qubit", "equidistant:5", "three-level-3-2"};
    return names;
}

inline RationalStructure preset_structure(const std::string& name) {
    return reduce_to_integers(preset_spectrum(name));
}

inline std::vector<double> random_distribution(std::mt19937_64& rng, std::size_t n) {
    std::exponential_distribution<double> e(1.0);
    std::vector<double> p(n);
    double total = 0.0;
    for (double& x : p) total += (x = e(rng));
    for (double& x : p) x /= total;
    return p;
}

/// Valid s values at or above min_valid_s, in increasing order.
inline std::vector<std::int64_t> valid_s_values(const RationalStructure& st, std::size_t count) {
    std::vector<std::int64_t> out;
    for (std::int64_t s = min_valid_s(st); out.size() < count; ++s)
        if (validate_s(st, s)) out.push_back(s);
    return out;
}

}  // namespace eur::fixtures
