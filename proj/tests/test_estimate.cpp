#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sudest/estimate.hpp"

#include <cmath>

using namespace sudest;

TEST_CASE("outcome sampling tracks the distribution") {
    RealVector p(3);
    p << 0.5, 0.3, 0.2;
    Rng rng(81);
    const Index shots = 20000;
    const std::vector<Index> counts = sample_counts(p, shots, rng);
    REQUIRE(counts.size() == 3);
    Index total = 0;
    for (std::size_t k = 0; k < 3; ++k) {
        total += counts[k];
        const double freq = static_cast<double>(counts[k]) / shots;
        CHECK(std::abs(freq - p[static_cast<Index>(k)]) < 0.02);
    }
    CHECK(total == shots);

    Rng a(5), b(5);
    for (int i = 0; i < 50; ++i) CHECK(sample_outcome(p, a) == sample_outcome(p, b));
}

TEST_CASE("mle recovers the truth from the saturating measurement") {
    const Chart chart = chart_at_identity(2);
    const StructuredState s = from_design(mub_vectors(2), 2);
    RealVector truth(3);
    truth << 0.12, -0.07, 0.2;
    const Povm povm = optimal_povm(s, chart, RealVector::Zero(3));
    const RealVector p = outcome_probabilities(povm, truth).p;
    Rng rng(91);
    const std::vector<Index> counts = sample_counts(p, 40000, rng);

    const MleResult fit = mle({povm}, {counts}, RealVector::Zero(3));
    CHECK(fit.converged);
    CHECK((fit.theta - truth).norm() < 0.05);
}

TEST_CASE("mle pools information across measurement blocks") {
    const Chart chart = chart_at_identity(2);
    const StructuredState s = from_design(mub_vectors(2), 1);
    RealVector truth(3);
    truth << -0.05, 0.1, 0.08;
    Rng rng(93);
    const Povm first = optimal_povm(s, chart, RealVector::Zero(3));
    RealVector anchor(3);
    anchor << 0.1, 0.0, 0.1;
    const Povm second = optimal_povm(s, chart, anchor);
    const std::vector<Index> c1 = sample_counts(outcome_probabilities(first, truth).p, 20000, rng);
    const std::vector<Index> c2 = sample_counts(outcome_probabilities(second, truth).p, 20000, rng);
    const MleResult fit = mle({first, second}, {c1, c2}, RealVector::Zero(3));
    CHECK(fit.converged);
    CHECK((fit.theta - truth).norm() < 0.05);
}

TEST_CASE("two-step estimation localizes without oracle access") {
    const Chart chart = chart_at_identity(2);
    const StructuredState s = from_design(mub_vectors(2), 2);
    RealVector truth(3);
    truth << 0.15, -0.1, 0.05;
    Rng rng(97);
    const TwoStepResult result = two_step_estimate(s, chart, truth, 30000, rng);
    CHECK(result.converged);
    CHECK((result.estimate - truth).norm() < 0.08);
}

TEST_CASE("experiment reports are self-consistent and seed-stable") {
    ExperimentConfig config;
    config.d = 2;
    config.n = 1;
    config.shots = 400;
    config.trials = 10;
    config.input = "mub";
    config.measurement = "optimal";
    config.strategy = "oracle";
    config.seed = 4242;
    config.threads = 2;

    const MseExperimentReport report = run_mse_experiment(config);
    CHECK(report.seed_used == 4242);
    CHECK(report.converged_trials + report.excluded_trials == config.trials);
    CHECK(report.converged_trials > 0);
    CHECK(report.mse.rows() == 3);
    CHECK(report.mse_trace > 0.0);
    CHECK(report.scaled_trace == doctest::Approx(report.mse_trace * 400.0));
    CHECK(report.bound == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(report.ratio == doctest::Approx(report.scaled_trace / 1.5));
    CHECK(report.trial_records.size() == 10);

    const MseExperimentReport again = run_mse_experiment(config);
    CHECK(again.mse_trace == report.mse_trace);
    for (int t = 0; t < 10; ++t)
        CHECK((again.trial_records[static_cast<std::size_t>(t)].estimate -
               report.trial_records[static_cast<std::size_t>(t)].estimate)
                  .norm() == 0.0);
}

TEST_CASE("entropy seeding records a nonzero seed") {
    ExperimentConfig config;
    config.d = 2;
    config.n = 1;
    config.shots = 100;
    config.trials = 2;
    config.seed = 0;
    const MseExperimentReport report = run_mse_experiment(config);
    CHECK(report.seed_used != 0);
}

TEST_CASE("config json round trip") {
    ExperimentConfig config;
    config.d = 3;
    config.n = 2;
    config.shots = 777;
    config.trials = 12;
    config.input = "sic";
    config.measurement = "random";
    config.strategy = "oracle";
    config.random_bases = 5;
    config.seed = 99;
    config.threads = 3;
    config.theta_true = RealVector::Zero(8);
    config.theta_true[1] = 0.25;

    const ExperimentConfig back = experiment_config_from_json(experiment_config_to_json(config));
    CHECK(back.d == 3);
    CHECK(back.n == 2);
    CHECK(back.shots == 777);
    CHECK(back.trials == 12);
    CHECK(back.input == "sic");
    CHECK(back.measurement == "random");
    CHECK(back.random_bases == 5);
    CHECK(back.seed == 99);
    CHECK(back.threads == 3);
    CHECK((back.theta_true - config.theta_true).norm() == 0.0);
}

TEST_CASE("input state families") {
    Rng rng(7);
    ExperimentConfig config;
    config.d = 2;
    config.n = 2;
    for (const char* family : {"mub", "sic", "product", "basis"}) {
        config.input = family;
        const StructuredState s = build_input_state(config, rng);
        CHECK(s.d == 2);
        CHECK(s.n == 2);
        CHECK(norm_defect(s) < 1e-12);
    }
    config.input = "approx";
    config.approx_m = 12;
    const StructuredState s = build_input_state(config, rng);
    CHECK(s.branches.size() == 24);  // one branch per (basis, column) pair
    CHECK(norm_defect(s) < 1e-12);

    config.input = "unknown";
    CHECK_THROWS_AS(build_input_state(config, rng), ValidationError);
}

TEST_CASE("invalid experiment combinations are rejected") {
    ExperimentConfig config;
    config.d = 2;
    config.n = 1;
    config.shots = 100;
    config.trials = 2;
    config.seed = 1;
    config.strategy = "two_step";
    config.measurement = "random";
    CHECK_THROWS_AS(run_mse_experiment(config), ValidationError);

    config.strategy = "oracle";
    config.measurement = "locc";
    config.input = "product";
    CHECK_THROWS_AS(run_mse_experiment(config), ValidationError);
}
