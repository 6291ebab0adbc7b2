#pragma once

#include "sudest/measurement.hpp"

#include <cstdint>
#include <string>

namespace sudest {

/// Outcome index distributed as p; p must sum to 1 within rounding.
Index sample_outcome(const RealVector& p, Rng& rng);

/// Histogram of `shots` independent outcomes.
std::vector<Index> sample_counts(const RealVector& p, Index shots, Rng& rng);

struct MleOptions {
    int max_iterations = 500;
    double tolerance = 1e-8;
    double radius = chart_radius();
    int polish_steps = 4;
};

struct MleResult {
    RealVector theta;
    double log_likelihood = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Maximum-likelihood estimate over one or more measurement blocks with
/// per-block outcome counts. Simplex search followed by Fisher-scoring
/// polish with the analytic outcome jacobians; the search is confined to
/// the injectivity ball of the chart.
MleResult mle(const std::vector<Povm>& povms, const std::vector<std::vector<Index>>& counts,
              const RealVector& init, const MleOptions& options = {});

struct TwoStepOptions {
    double first_fraction = 0.3;
    MleOptions mle;
};

struct TwoStepResult {
    RealVector stage_one;
    RealVector estimate;
    bool converged = false;
};

/// Adaptive estimation without oracle access to the true point: a fraction of
/// the shots goes to two fixed random bases to localize, the remainder to the
/// saturating measurement built at the stage-one estimate.
TwoStepResult two_step_estimate(const StructuredState& s, const Chart& chart,
                                const RealVector& theta_true, Index shots, Rng& rng,
                                const TwoStepOptions& options = {});

struct ExperimentConfig {
    Index d = 2;
    int n = 1;
    Index shots = 1000;
    int trials = 100;
    std::string input = "mub";            // mub | sic | approx | product | basis
    std::int64_t approx_m = 0;            // 0: derive from (approx_eps, approx_q)
    double approx_eps = 0.5;
    double approx_q = 0.95;
    std::string measurement = "optimal";  // optimal | random | locc
    std::string strategy = "oracle";      // oracle | two_step
    int random_bases = 8;
    RealVector theta_true;                // empty: origin
    std::uint64_t seed = 0;               // 0: entropy-derived, recorded in the report
    int threads = 1;
    Index dense_limit = kDefaultDenseLimit;
};

struct TrialRecord {
    std::uint64_t stream = 0;
    bool converged = false;
    RealVector estimate;
};

struct MseExperimentReport {
    ExperimentConfig config;
    std::uint64_t seed_used = 0;
    int converged_trials = 0;
    int excluded_trials = 0;
    RealMatrix mse;
    double mse_trace = 0.0;
    double scaled_trace = 0.0;  // shots * mse_trace
    double bound = 0.0;         // optimal_tr_inverse_bound(d, n)
    double ratio = 0.0;         // scaled_trace / bound
    double duration_ms = 0.0;
    std::vector<TrialRecord> trial_records;
};

/// Repeated-trial estimation experiment; trials use independent derived
/// streams, so results are reproducible bit-for-bit for a fixed seed
/// regardless of thread count.
MseExperimentReport run_mse_experiment(const ExperimentConfig& config);

nlohmann::json experiment_config_to_json(const ExperimentConfig& config);
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json experiment_report_to_json(const MseExperimentReport& report);

/// Input state named by ExperimentConfig::input. Approx inputs draw their
/// probe set from the given rng.
StructuredState build_input_state(const ExperimentConfig& config, Rng& rng);

}  // namespace sudest
