#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rb/clifford.hpp"
#include "rb/noise.hpp"
#include "rb/ptm.hpp"

using namespace rb;

TEST_CASE("ginibre draws have the right sample moments") {
    Rng rng(1);
    GinibreDraw g = ginibre_draw(120, rng);  // 14400 entries per matrix
    for (const Eigen::MatrixXd* m : {&g.s, &g.t}) {
        const double n = static_cast<double>(m->size());
        const double mean = m->sum() / n;
        const double var = (m->array() - mean).square().sum() / (n - 1);
        // 5 sigma bounds: se(mean) = 1/sqrt(n), se(var) ~ sqrt(2/n)
        CHECK(std::abs(mean) < 5.0 / std::sqrt(n));
        CHECK(std::abs(var - 1.0) < 5.0 * std::sqrt(2.0 / n));
    }
}

TEST_CASE("random_unitary_error hits the target rate to 1e-10") {
    Rng rng(2);
    for (double r : {1e-4, 1e-3, 1e-2, 0.2}) {
        Ptm e = random_unitary_error(r, rng);
        CHECK(std::abs(error_rate(e) - r) < 1e-10);
        CHECK(e.is_trace_preserving(1e-12));
        Eigen::Matrix3d rot = e.entries().bottomRightCorner<3, 3>();
        CHECK((rot * rot.transpose() - Eigen::Matrix3d::Identity())
                  .cwiseAbs()
                  .maxCoeff() < 1e-12);
    }
    // r -> 0 forces the channel to the identity
    Ptm tiny = random_unitary_error(1e-12, rng);
    CHECK((tiny.entries() - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() <
          1e-5);
    CHECK_THROWS_AS(random_unitary_error(0.6, rng), std::invalid_argument);
}

TEST_CASE("random_cptp: complete Kraus set, exact rate, CPTP") {
    Rng rng(3);
    for (double r : {1e-3, 1e-2, 0.1}) {
        Ptm e = random_cptp(r, rng);
        CHECK(std::abs(error_rate(e) - r) < 1e-6);
        CHECK(e.is_cptp(1e-8));
        CHECK(e.is_trace_preserving(1e-10));
    }
}

TEST_CASE("amplitude damping generators") {
    const double r = 1e-3;

    SUBCASE("r -> 0 gives the ideal generators") {
        const auto gens = amplitude_damping_generators(1e-13, 2000);
        for (int g = 0; g < 7; ++g) {
            const Eigen::Matrix4d ideal =
                generator_ptm_int(static_cast<Generator>(g)).cast<double>();
            CHECK((gens[g].entries() - ideal).cwiseAbs().maxCoeff() < 1e-9);
        }
    }

    SUBCASE("product formula has converged by N = 2000") {
        // Splitting error is O(gamma t_g (pi/2) / 2N) ~ 7.5e-7 per pulse at
        // r = 1e-3; the pi maps are squares of the pi/2 products and carry
        // twice that.
        const auto coarse = amplitude_damping_generators(r, 2000);
        const auto fine = amplitude_damping_generators(r, 2000000);
        for (int g = 0; g < 5; ++g)
            CHECK((coarse[g].entries() - fine[g].entries())
                      .cwiseAbs()
                      .maxCoeff() < 1e-6);
        for (int g = 5; g < 7; ++g)
            CHECK((coarse[g].entries() - fine[g].entries())
                      .cwiseAbs()
                      .maxCoeff() < 2e-6);
    }

    SUBCASE("damped idle has error rate exactly r; pulses scale with length") {
        const auto gens = amplitude_damping_generators(r, 2000000);
        // closed form: (3 + eta)(1 - eta)/6 = r for the idle channel
        CHECK(error_rate(gens[0]) == doctest::Approx(r).epsilon(1e-10));
        // each pi/2 pulse damps for one gate time: error ~ r to first order
        for (int g = 1; g <= 4; ++g) {
            const Eigen::Matrix4d ideal =
                generator_ptm_int(static_cast<Generator>(g)).cast<double>();
            Ptm err(2, gens[g].entries() * ideal.transpose());
            CHECK(std::abs(error_rate(err) - r) / r < 0.01);
        }
        // pi pulses damp for two gate times
        for (int g = 5; g <= 6; ++g) {
            const Eigen::Matrix4d ideal =
                generator_ptm_int(static_cast<Generator>(g)).cast<double>();
            Ptm err(2, gens[g].entries() * ideal.transpose());
            CHECK(std::abs(error_rate(err) - 2.0 * r) / (2.0 * r) < 0.01);
        }
    }

    SUBCASE("range validation") {
        CHECK_THROWS_AS(amplitude_damping_generators(0.3, 100),
                        std::invalid_argument);
    }
}

TEST_CASE("amplitude damping model: assembled Clifford errors") {
    const double r = 1e-3;
    NoiseModelConfig cfg{NoiseKind::amplitude_damping, r, 7, 2000};
    NoiseModel model = NoiseModel::build(cfg, 1);
    REQUIRE(model.gate_errors().size() == 24);

    // Group mean calibrated to r; individual errors scale with the gate
    // duration (pi/2 pulses and the idle damp for one gate time, pi pulses
    // for two), mean slot count 53/24.
    CHECK(model.true_average_error() == doctest::Approx(r).epsilon(1e-7));

    const auto& group = CliffordGroup::instance();
    double total_duration = 0.0;
    for (const auto& el : group.elements())
        for (Generator g : el.generators)
            total_duration += (g == Generator::XPi || g == Generator::YPi)
                                  ? 2.0
                                  : 1.0;
    CHECK(total_duration == 53.0);
    const double per_slot = r * 24.0 / 53.0;
    for (const auto& el : group.elements()) {
        double dur = 0.0;
        for (Generator g : el.generators)
            dur += (g == Generator::XPi || g == Generator::YPi) ? 2.0 : 1.0;
        const double err = error_rate(model.gate_errors()[el.index]);
        CHECK(std::abs(err - per_slot * dur) / (per_slot * dur) < 0.05);
    }

    for (const auto& e : model.gate_errors()) {
        CHECK(e.is_trace_preserving(1e-12));
        CHECK(e.is_cptp(1e-8));
    }
}

TEST_CASE("model_error_for: fixed, generator-dependent, drift, gaussian") {
    Rng scratch(0);

    SUBCASE("fixed unitary returns one channel for all draws") {
        NoiseModel model =
            NoiseModel::build({NoiseKind::fixed_unitary, 1e-3, 5}, 10);
        const Ptm a = model.error_for(3, 1, 0, scratch);
        const Ptm b = model.error_for(17, 9, 4, scratch);
        CHECK((a.entries() - b.entries()).cwiseAbs().maxCoeff() == 0.0);
        CHECK(std::abs(error_rate(a) - 1e-3) < 1e-10);
    }

    SUBCASE("gate-dependent errors are all calibrated to r") {
        NoiseModel model =
            NoiseModel::build({NoiseKind::gate_dependent_unitary, 1e-3, 5}, 10);
        REQUIRE(model.gate_errors().size() == 24);
        for (const auto& e : model.gate_errors())
            CHECK(std::abs(error_rate(e) - 1e-3) < 1e-10);
        CHECK(model.true_average_error() ==
              doctest::Approx(1e-3).epsilon(1e-8));
    }

    SUBCASE("generator-dependent mean per-Clifford error is near r") {
        // Monte Carlo over model seeds: per-generator errors of strength
        // r/1.875 compose along the decompositions (1.875 generators per
        // Clifford on average), so the group mean lands near r.
        const double r = 1e-3;
        double acc = 0.0;
        const int n_models = 40;
        for (int s = 0; s < n_models; ++s) {
            NoiseModel model = NoiseModel::build(
                {NoiseKind::generator_dependent, r, 1000 + s}, 1);
            acc += model.true_average_error();
        }
        acc /= n_models;
        CHECK(std::abs(acc - r) / r < 0.1);
    }

    SUBCASE("slow drift ramps r/2 -> 3r/2 with r at the midpoint") {
        const double r = 1e-3;
        const int big_k = 1001;
        NoiseModel model =
            NoiseModel::build({NoiseKind::slow_drift, r, 5}, big_k);
        const double r_first =
            error_rate(model.error_for(0, 1, 0, scratch));
        const double r_mid =
            error_rate(model.error_for(0, 1, (big_k - 1) / 2, scratch));
        const double r_last =
            error_rate(model.error_for(0, 1, big_k - 1, scratch));
        CHECK(r_first == doctest::Approx(r / 2).epsilon(1e-9));
        CHECK(r_mid == doctest::Approx(r).epsilon(1e-9));
        CHECK(r_last == doctest::Approx(1.5 * r).epsilon(1e-9));
    }

    SUBCASE("gaussian_fast draw statistics match Normal(r, r/4)") {
        const double r = 1e-2;
        NoiseModel model =
            NoiseModel::build({NoiseKind::gaussian_fast, r, 5}, 1);
        Rng rng(99);
        const int n = 10000;
        double sum = 0.0, sum2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double ri = error_rate(model.error_for(0, 1, 0, rng));
            sum += ri;
            sum2 += ri * ri;
        }
        const double mean = sum / n;
        const double sd = std::sqrt((sum2 - n * mean * mean) / (n - 1));
        // 3 standard errors: se(mean) = sd/sqrt(n), se(sd) ~ sd/sqrt(2n)
        CHECK(std::abs(mean - r) < 3.0 * sd / std::sqrt(n));
        CHECK(std::abs(sd - r / 4) < 3.0 * (r / 4) / std::sqrt(2.0 * n));
    }
}

TEST_CASE("leakage unitaries") {
    Rng rng(11);

    SUBCASE("calibrated qubit-block rate") {
        for (double r : {1e-3, 1e-2}) {
            Ptm e = leakage_unitary(r, rng);
            CHECK(std::abs(qubit_block_error_rate(e) - r) < 1e-8);
            CHECK(e.is_trace_preserving(1e-12));
        }
    }

    SUBCASE("repeated application shows collapse and revival") {
        // Track excited-state survival under a fixed leakage unitary. The
        // coherent rotation into the third level makes the decay
        // non-monotone: survival dips and then substantially recovers.
        Ptm e = leakage_unitary(1e-2, rng);
        Eigen::MatrixXcd rho1 = Eigen::MatrixXcd::Zero(3, 3);
        rho1(1, 1) = 1.0;
        const Eigen::VectorXd excited = state_coefficients(rho1);
        Eigen::VectorXd state = excited;
        double min_f = 1.0, best_revival = 0.0;
        for (int m = 1; m <= 3000; ++m) {
            state = e.apply(state);
            const double f = excited.dot(state);
            min_f = std::min(min_f, f);
            best_revival = std::max(best_revival, f - min_f);
        }
        CHECK(min_f < 0.9);
        CHECK(best_revival > 0.5 * (1.0 - min_f));
    }

    SUBCASE("leakage_random model caches one unitary per group element") {
        NoiseModel model =
            NoiseModel::build({NoiseKind::leakage_random, 1e-3, 21}, 1);
        REQUIRE(model.gate_errors().size() == 48);
        CHECK(model.dim() == 3);
        for (const auto& e : model.gate_errors())
            CHECK(std::abs(qubit_block_error_rate(e) - 1e-3) < 1e-8);
    }
}

TEST_CASE("noise model tables are bitwise deterministic in the seed") {
    for (NoiseKind kind :
         {NoiseKind::gate_dependent_unitary, NoiseKind::generator_dependent,
          NoiseKind::leakage_random}) {
        NoiseModel a = NoiseModel::build({kind, 1e-3, 12345}, 4);
        NoiseModel b = NoiseModel::build({kind, 1e-3, 12345}, 4);
        NoiseModel c = NoiseModel::build({kind, 1e-3, 54321}, 4);
        REQUIRE(a.gate_errors().size() == b.gate_errors().size());
        double max_ab = 0.0, max_ac = 0.0;
        for (size_t i = 0; i < a.gate_errors().size(); ++i) {
            max_ab = std::max(max_ab, (a.gate_errors()[i].entries() -
                                       b.gate_errors()[i].entries())
                                          .cwiseAbs()
                                          .maxCoeff());
            max_ac = std::max(max_ac, (a.gate_errors()[i].entries() -
                                       c.gate_errors()[i].entries())
                                          .cwiseAbs()
                                          .maxCoeff());
        }
        CHECK(max_ab == 0.0);
        CHECK(max_ac > 1e-6);
    }
}

TEST_CASE("every emitted channel is trace preserving and CPTP") {
    Rng rng(8);
    for (NoiseKind kind :
         {NoiseKind::depolarizing, NoiseKind::gate_dependent_unitary,
          NoiseKind::fixed_unitary, NoiseKind::generator_dependent,
          NoiseKind::amplitude_damping, NoiseKind::leakage_fixed}) {
        NoiseModelConfig cfg{kind, 5e-3, 31, 2000};
        NoiseModel model = NoiseModel::build(cfg, 4);
        for (const auto& e : model.gate_errors()) {
            CHECK(e.is_trace_preserving(1e-11));
            CHECK(e.is_cptp(1e-8));
        }
    }
    // per-draw kinds
    for (NoiseKind kind : {NoiseKind::gaussian_fast, NoiseKind::slow_drift}) {
        NoiseModel model = NoiseModel::build({kind, 5e-3, 31}, 8);
        for (int i = 0; i < 20; ++i) {
            Ptm e = model.error_for(0, i + 1, i % 8, rng);
            CHECK(e.is_trace_preserving(1e-11));
            CHECK(e.is_cptp(1e-8));
        }
    }
}
