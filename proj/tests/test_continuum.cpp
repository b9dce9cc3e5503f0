#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "eur/continuum.hpp"
#include "test_support.hpp"

using namespace eur;
using fixtures::preset_structure;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(Density, Examples) {
    for (const auto& name : fixtures::preset_names()) {
        const auto st = preset_structure(name);
        ComplexVector e = ComplexVector::Zero(st.dimension());
        e(st.d()) = 1.0;
        for (double tau : {0.0, 0.3, 2.0, 5.5}) {
            EXPECT_NEAR(density(st, maximally_mixed(st.dimension()), tau), 1.0 / st.characteristic_time, 1e-14);
            EXPECT_NEAR(density(st, pure_state(e), tau), 1.0 / st.characteristic_time, 1e-14);
        }
    }
    const auto qubit = preset_structure("qubit");
    for (double tau : {0.0, 1.0, kPi, 4.0})
        EXPECT_NEAR(density(qubit, bloch_qubit(1, 0, 0), tau), (1.0 + std::cos(tau)) / (2.0 * kPi), 1e-15);
}

TEST(Density, GridConsistency) {
    for (const auto& name : fixtures::preset_names()) {
        const auto st = preset_structure(name);
        for (auto s : fixtures::valid_s_values(st, 5)) {
            const auto m = build_povm(st, 0.4, s);
            const auto rho = random_state(st.dimension(), st.dimension(), s);
            const TimeDensity w(st, rho, 0.4);
            const auto q = complement_probabilities(m, rho);
            for (std::int64_t k = 0; k <= s; ++k)
                EXPECT_NEAR(w(m.tau_grid()[k]) * st.characteristic_time / (s + 1), q[k], 1e-10);
        }
    }
}

TEST(Quadrature, NormalizationAndOracles) {
    const auto qubit = preset_structure("qubit");
    const TimeDensity plus(qubit, bloch_qubit(1, 0, 0));
    const auto mass = power_integral(plus, 1.0);
    EXPECT_NEAR(mass.value, 1.0, 1e-12);
    EXPECT_NEAR(differential_renyi(plus, 2.0).value, std::log(4.0 * kPi / 3.0), 1e-10);
    // Shannon: h(w) = ln(2 pi) + ln 2 - 1 for w = (1 + cos)/(2 pi)
    EXPECT_NEAR(differential_renyi(plus, 1.0).value, std::log(2.0 * kPi) + std::log(2.0) - 1.0, 1e-8);

    const TimeDensity flat(qubit, maximally_mixed(2));
    for (double a : {0.5, 1.0, 2.0, 7.0})
        EXPECT_NEAR(differential_renyi(flat, a).value, std::log(2.0 * kPi), 1e-12);
    EXPECT_THROW(differential_renyi(flat, kInfinity), OutOfRange);

    for (const auto& name : fixtures::preset_names()) {
        const auto st = preset_structure(name);
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const TimeDensity w(st, random_state(st.dimension(), 1 + seed % 2, seed), 0.3);
            const auto r = power_integral(w, 1.0);
            EXPECT_NEAR(r.value, 1.0, 1e-9 + 10.0 * r.delta);
        }
    }
}

TEST(Quadrature, UnconvergedIsReported) {
    QuadratureOptions opts;
    opts.initial_intervals = 4;
    opts.max_intervals = 16;
    opts.relative_tolerance = 1e-15;
    const auto rough = [](double x) { return std::sqrt(std::fabs(std::sin(50.0 * x))); };
    EXPECT_THROW(integrate(rough, 0.0, 1.0, [](double x) { return x; }, opts), QuadratureUnconverged);
}

TEST(Quadrature, TimeUnitShift) {
    const EnergySpectrum base({0.0, 1.0, 1.5});
    const auto rho = random_state(3, 3, 4);
    const double h = differential_renyi(TimeDensity(reduce_to_integers(base), rho), 2.0).value;
    for (double lambda : {0.1, 3.0, 10.0}) {
        const TimeDensity w(reduce_to_integers(base.scaled(lambda)), rho);
        EXPECT_NEAR(differential_renyi(w, 2.0).value, h - std::log(lambda), 1e-9);
    }
}

TEST(BinPartition, Construction) {
    EXPECT_THROW(BinPartition({0.0}), InvalidPartition);
    EXPECT_THROW(BinPartition({0.0, 1.0, 1.0}), InvalidPartition);
    const auto u = BinPartition::uniform(0.5, 2.0, 4);
    EXPECT_EQ(u.bins(), 4u);
    EXPECT_NEAR(u.max_width(), 0.5, 1e-15);
    const auto a = BinPartition::random(0.0, 1.0, 10, 3);
    const auto b = BinPartition::random(0.0, 1.0, 10, 3);
    EXPECT_EQ(a.marks(), b.marks());
    EXPECT_EQ(a.bins(), 10u);
}

TEST(BinProbabilities, Examples) {
    const auto qubit = preset_structure("qubit");
    const TimeDensity flat(qubit, maximally_mixed(2));
    const auto q = bin_probabilities(flat, BinPartition::uniform(0.0, 2.0 * kPi, 8));
    for (double x : q.probabilities) EXPECT_NEAR(x, 1.0 / 8.0, 1e-13);
    const auto one = bin_probabilities(flat, BinPartition::uniform(0.0, 2.0 * kPi, 1));
    EXPECT_NEAR(one.probabilities[0], 1.0, 1e-13);
    EXPECT_THROW(bin_probabilities(flat, BinPartition::uniform(0.1, 2.0 * kPi, 4)), InvalidPartition);

    const TimeDensity plus(qubit, bloch_qubit(1, 0, 0));
    const auto halves = bin_probabilities(plus, BinPartition({0.0, kPi, 2.0 * kPi}));
    // integral of (1 + cos)/(2 pi) over [0, pi] is 1/2
    EXPECT_NEAR(halves.probabilities[0], 0.5, 1e-12);
    const auto quarter = bin_probabilities(plus, BinPartition({0.0, kPi / 2, 2.0 * kPi}));
    EXPECT_NEAR(quarter.probabilities[0], 0.25 + 1.0 / (2.0 * kPi), 1e-12);
}

TEST(ContinuousRelation, Examples) {
    for (const auto& name : fixtures::preset_names()) {
        const auto st = preset_structure(name);
        const auto r = check_continuous_relation(st, maximally_mixed(st.dimension()), 1.0);
        EXPECT_NEAR(r.lhs, std::log(st.dimension()) + std::log(st.characteristic_time), 1e-10);
        EXPECT_NEAR(r.rhs, std::log(st.characteristic_time), 1e-15);
        EXPECT_TRUE(r.holds);
    }
    const auto plus = check_continuous_relation(preset_structure("qubit"), bloch_qubit(1, 0, 0), 1.0);
    EXPECT_NEAR(plus.lhs, std::log(2.0) + std::log(2.0 * kPi) + std::log(2.0) - 1.0, 1e-8);
    EXPECT_TRUE(plus.holds);
    EXPECT_FALSE(check_continuous_relation(preset_structure("qubit"), bloch_qubit(1, 0, 0), 0.5).applicable);
}

TEST(ContinuousRelation, TimeUnitCovariance) {
    const EnergySpectrum base({0.0, 1.0, 1.5});
    const auto rho = random_state(3, 2, 8);
    for (double a : {0.75, 1.0, 2.0, kInfinity}) {
        const double slack = check_continuous_relation(reduce_to_integers(base), rho, a).slack;
        for (double lambda : {0.1, 3.0, 10.0})
            EXPECT_NEAR(check_continuous_relation(reduce_to_integers(base.scaled(lambda)), rho, a).slack,
                        slack, 1e-9);
    }
}

TEST(BinnedRelations, RandomStatesAndPartitions) {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 40; ++t) {
        const auto st = preset_structure(t % 2 ? "qubit" : "three-level-3-2");
        const auto rho = random_state(st.dimension(), 1 + static_cast<int>(rng() % st.dimension()), rng());
        const TimeDensity w(st, rho);
        const auto part = BinPartition::random(0.0, st.characteristic_time, 1 + rng() % 64, rng());
        for (double a : {0.6, 1.0, 2.0, kInfinity}) {
            const auto [r, ts] = check_binned_relations(w, part, a);
            EXPECT_TRUE(r.holds) << r.slack;
            if (ts.applicable) EXPECT_TRUE(ts.holds) << ts.slack;
        }
    }
    const TimeDensity flat(preset_structure("qubit"), maximally_mixed(2));
    const auto [single, _] = check_binned_relations(flat, BinPartition::uniform(0.0, 2.0 * kPi, 1), 1.0);
    EXPECT_NEAR(single.rhs, 0.0, 1e-15);
    const auto [uniform, __] = check_binned_relations(flat, BinPartition::uniform(0.0, 2.0 * kPi, 16), 1.0);
    EXPECT_NEAR(uniform.lhs, std::log(2.0) + std::log(16.0), 1e-12);
}

TEST(NormInequalities, HoldOnRandomStates) {
    for (const auto& name : fixtures::preset_names()) {
        const auto st = preset_structure(name);
        for (std::uint64_t seed = 0; seed < 6; ++seed) {
            const auto rho = random_state(st.dimension(), 1 + seed % st.dimension(), seed);
            const TimeDensity w(st, rho, 0.2);
            const auto part = BinPartition::random(0.2, st.characteristic_time, 5 + seed * 7, seed);
            for (double a : {1.25, 2.0, 4.0}) {
                const auto reports = check_norm_inequalities(w, part, a, fixtures::valid_s_values(st, 3).back());
                ASSERT_EQ(reports.size(), 7u);
                for (const auto& r : reports)
                    EXPECT_TRUE(r.holds) << name << ' ' << to_string(r.relation) << " slack " << r.slack;
            }
        }
    }
}

TEST(NormInequalities, SaturatedByEnergyEigenstate) {
    const auto st = preset_structure("equidistant:5");
    ComplexVector e = ComplexVector::Zero(6);
    e(2) = 1.0;
    const TimeDensity w(st, pure_state(e));
    const auto reports = check_norm_inequalities(w, BinPartition::uniform(0.0, st.characteristic_time, 9), 2.0, 7);
    // p is a point mass while q, w and the binned q are flat
    for (const auto& r : reports) EXPECT_NEAR(r.slack, 0.0, 1e-9) << to_string(r.relation);
}

TEST(NormInequalities, OutsideStrictRange) {
    const auto st = preset_structure("qubit");
    const TimeDensity w(st, maximally_mixed(2));
    for (double a : {1.0, 0.8, kInfinity})
        for (const auto& r : check_norm_inequalities(w, BinPartition::uniform(0.0, 2 * kPi, 2), a, 1))
            EXPECT_FALSE(r.applicable);
}

TEST(SampleDensity, CoversPeriod) {
    const TimeDensity w(preset_structure("qubit"), bloch_qubit(1, 0, 0), 1.0);
    const auto pts = sample_density(w, 5);
    ASSERT_EQ(pts.size(), 5u);
    EXPECT_EQ(pts.front().first, 1.0);
    EXPECT_EQ(pts.back().first, 1.0 + 2.0 * kPi);
    EXPECT_THROW(sample_density(w, 1), OutOfRange);
}
