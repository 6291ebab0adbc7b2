#include "sudest/estimate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

namespace sudest {

Index sample_outcome(const RealVector& p, Rng& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (Index k = 0; k < p.size(); ++k) {
        acc += p[k];
        if (u < acc) return k;
    }
    return p.size() - 1;
}

std::vector<Index> sample_counts(const RealVector& p, Index shots, Rng& rng) {
    std::vector<Index> counts(static_cast<std::size_t>(p.size()), 0);
    for (Index i = 0; i < shots; ++i)
        ++counts[static_cast<std::size_t>(sample_outcome(p, rng))];
    return counts;
}

namespace {

constexpr double kLogFloor = 1e-300;

double block_log_likelihood(const std::vector<Povm>& povms,
                            const std::vector<std::vector<Index>>& counts,
                            const RealVector& theta) {
    double ll = 0.0;
    for (std::size_t b = 0; b < povms.size(); ++b) {
        const OutcomeDistribution dist = outcome_probabilities(povms[b], theta);
        for (Index k = 0; k < dist.p.size(); ++k) {
            const Index c = counts[b][static_cast<std::size_t>(k)];
            if (c == 0) continue;
            ll += static_cast<double>(c) * std::log(std::max(dist.p[k], kLogFloor));
        }
    }
    return ll;
}

// Simplex search minimizing f, standard reflection/expansion/contraction.
RealVector nelder_mead(const std::function<double(const RealVector&)>& f, const RealVector& x0,
                       double step, int max_iterations, double tolerance, int& iterations,
                       bool& converged) {
    const Index dim = x0.size();
    std::vector<RealVector> xs;
    std::vector<double> fs;
    xs.push_back(x0);
    for (Index a = 0; a < dim; ++a) {
        RealVector x = x0;
        x[a] += step;
        xs.push_back(x);
    }
    for (const RealVector& x : xs) fs.push_back(f(x));

    std::vector<std::size_t> order(xs.size());
    converged = false;
    iterations = 0;
    while (iterations < max_iterations) {
        ++iterations;
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[order.size() - 2];

        if (std::abs(fs[worst] - fs[best]) <= tolerance * (1.0 + std::abs(fs[best]))) {
            converged = true;
            break;
        }

        RealVector centroid = RealVector::Zero(dim);
        for (std::size_t i : order)
            if (i != worst) centroid += xs[i];
        centroid /= static_cast<double>(dim);

        const RealVector reflected = centroid + (centroid - xs[worst]);
        const double fr = f(reflected);
        if (fr < fs[best]) {
            const RealVector expanded = centroid + 2.0 * (centroid - xs[worst]);
            const double fe = f(expanded);
            if (fe < fr) {
                xs[worst] = expanded;
                fs[worst] = fe;
            } else {
                xs[worst] = reflected;
                fs[worst] = fr;
            }
            continue;
        }
        if (fr < fs[second]) {
            xs[worst] = reflected;
            fs[worst] = fr;
            continue;
        }
        const RealVector contracted = centroid + 0.5 * (xs[worst] - centroid);
        const double fc = f(contracted);
        if (fc < fs[worst]) {
            xs[worst] = contracted;
            fs[worst] = fc;
            continue;
        }
        for (std::size_t i : order) {
            if (i == best) continue;
            xs[i] = xs[best] + 0.5 * (xs[i] - xs[best]);
            fs[i] = f(xs[i]);
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (fs[i] < fs[best]) best = i;
    return xs[best];
}

}  // namespace

MleResult mle(const std::vector<Povm>& povms, const std::vector<std::vector<Index>>& counts,
              const RealVector& init, const MleOptions& options) {
    if (povms.empty() || povms.size() != counts.size())
        throw ValidationError("mle: povms and counts must be non-empty and aligned");
    for (std::size_t b = 0; b < povms.size(); ++b)
        if (static_cast<Index>(counts[b].size()) != outcome_count(povms[b]))
            throw ValidationError("mle: counts block " + std::to_string(b) +
                                  " does not match the outcome count");

    std::vector<Index> block_shots(povms.size(), 0);
    for (std::size_t b = 0; b < povms.size(); ++b)
        for (Index c : counts[b]) block_shots[b] += c;

    const double radius = options.radius;
    auto objective = [&](const RealVector& theta) {
        const double r = theta.norm();
        if (r > radius) return 1e9 * (1.0 + (r - radius) * (r - radius));
        return -block_log_likelihood(povms, counts, theta);
    };

    MleResult result;
    RealVector start = init;
    if (start.norm() > 0.9 * radius) start *= 0.9 * radius / start.norm();
    result.theta = nelder_mead(objective, start, 0.1, options.max_iterations, options.tolerance,
                               result.iterations, result.converged);

    // Fisher scoring with analytic jacobians tightens the simplex result.
    double current = block_log_likelihood(povms, counts, result.theta);
    for (int step = 0; step < options.polish_steps; ++step) {
        const Index dim = result.theta.size();
        RealVector score = RealVector::Zero(dim);
        RealMatrix info = RealMatrix::Zero(dim, dim);
        for (std::size_t b = 0; b < povms.size(); ++b) {
            const ProbabilityJacobian pj = probabilities_and_jacobian(povms[b], result.theta);
            for (Index k = 0; k < pj.p.size(); ++k) {
                const double p = std::max(pj.p[k], 1e-12);
                const RealVector grad = pj.jacobian.row(k).transpose();
                const Index c = counts[b][static_cast<std::size_t>(k)];
                if (c > 0) score += static_cast<double>(c) / p * grad;
                if (pj.p[k] > 1e-12)
                    info += static_cast<double>(block_shots[b]) / p * grad * grad.transpose();
            }
        }
        Eigen::LDLT<RealMatrix> ldlt(info);
        if (ldlt.info() != Eigen::Success) break;
        RealVector delta = ldlt.solve(score);
        if (!delta.allFinite()) break;
        bool improved = false;
        for (int half = 0; half < 6; ++half) {
            RealVector candidate = result.theta + delta;
            if (candidate.norm() > radius) candidate *= radius / candidate.norm();
            const double value = block_log_likelihood(povms, counts, candidate);
            if (value > current) {
                result.theta = candidate;
                current = value;
                improved = true;
                break;
            }
            delta *= 0.5;
        }
        if (!improved) break;
    }
    result.log_likelihood = current;
    return result;
}

TwoStepResult two_step_estimate(const StructuredState& s, const Chart& chart,
                                const RealVector& theta_true, Index shots, Rng& rng,
                                const TwoStepOptions& options) {
    if (shots < 4) throw ValidationError("two_step_estimate: shots must be at least 4");
    const Index dim = dense_dim(s);
    const Index n1 = std::max<Index>(2, static_cast<Index>(
                                            std::llround(options.first_fraction *
                                                         static_cast<double>(shots))));
    const Index n2 = shots - n1;

    std::vector<Povm> povms;
    std::vector<std::vector<Index>> counts;
    for (int block = 0; block < 2; ++block) {
        const ComplexMatrix basis = haar_unitary(dim, rng);
        Povm povm(basis_povm(s, chart, basis));
        const OutcomeDistribution dist = outcome_probabilities(povm, theta_true);
        const Index block_shots = block == 0 ? n1 / 2 : n1 - n1 / 2;
        counts.push_back(sample_counts(dist.p, block_shots, rng));
        povms.push_back(std::move(povm));
    }

    TwoStepResult result;
    const MleResult stage_one =
        mle(povms, counts, RealVector::Zero(chart.dim()), options.mle);
    result.stage_one = stage_one.theta;

    // Keep the reference point strictly inside the chart so the saturating
    // measurement at the estimate stays well defined.
    RealVector anchor = result.stage_one;
    const double cap = 0.8 * options.mle.radius;
    if (anchor.norm() > cap) anchor *= cap / anchor.norm();

    Povm refined = optimal_povm(s, chart, anchor);
    const OutcomeDistribution dist = outcome_probabilities(refined, theta_true);
    counts.push_back(sample_counts(dist.p, n2, rng));
    povms.push_back(std::move(refined));

    const MleResult final = mle(povms, counts, anchor, options.mle);
    result.estimate = final.theta;
    result.converged = stage_one.converged && final.converged;
    return result;
}

StructuredState build_input_state(const ExperimentConfig& config, Rng& rng) {
    if (config.input == "mub") return from_design(mub_vectors(config.d), config.n);
    if (config.input == "sic") return from_design(sic_vectors(config.d), config.n);
    if (config.input == "approx") {
        std::int64_t m = config.approx_m;
        if (m <= 0) m = chernoff_sample_size(config.d, config.approx_eps, config.approx_q);
        return from_approx_design(sample_approx_design(config.d, m, rng), config.n);
    }
    if (config.input == "product") {
        ComplexVector tau = ComplexVector::Zero(config.d);
        tau[0] = 1.0;
        return product_baseline(tau, config.n);
    }
    if (config.input == "basis")
        return from_basis(ComplexMatrix::Identity(config.d, config.d), config.n);
    throw ValidationError("build_input_state: unknown input kind '" + config.input +
                          "', expected mub|sic|approx|product|basis");
}

namespace {

struct TrialSetup {
    std::vector<Povm> povms;
    std::vector<RealVector> probabilities;  // at the true point, per block
    RealVector branch_weights;              // LOCC only: block selection law
};

void run_trial(const TrialSetup& setup, const ExperimentConfig& config,
               const StructuredState& state, const Chart& chart, const RealVector& truth,
               Rng rng, TrialRecord& record) {
    const MleOptions mle_options;
    if (config.strategy == "two_step") {
        const TwoStepResult two = two_step_estimate(state, chart, truth, config.shots, rng);
        record.converged = two.converged;
        record.estimate = two.estimate;
        return;
    }
    std::vector<std::vector<Index>> counts(setup.povms.size());
    if (setup.branch_weights.size() > 0) {
        for (std::size_t b = 0; b < setup.povms.size(); ++b)
            counts[b].assign(static_cast<std::size_t>(setup.probabilities[b].size()), 0);
        for (Index shot = 0; shot < config.shots; ++shot) {
            const Index b = sample_outcome(setup.branch_weights, rng);
            const Index k = sample_outcome(setup.probabilities[static_cast<std::size_t>(b)], rng);
            ++counts[static_cast<std::size_t>(b)][static_cast<std::size_t>(k)];
        }
    } else {
        const Index per = config.shots / static_cast<Index>(setup.povms.size());
        for (std::size_t b = 0; b < setup.povms.size(); ++b) {
            const Index block_shots =
                b + 1 == setup.povms.size()
                    ? config.shots - per * static_cast<Index>(setup.povms.size() - 1)
                    : per;
            counts[b] = sample_counts(setup.probabilities[b], block_shots, rng);
        }
    }
    const MleResult fit = mle(setup.povms, counts, RealVector::Zero(chart.dim()), mle_options);
    record.converged = fit.converged;
    record.estimate = fit.theta;
}

}  // namespace

MseExperimentReport run_mse_experiment(const ExperimentConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    if (config.trials < 1) throw ValidationError("run_mse_experiment: trials must be positive");
    if (config.shots < 1) throw ValidationError("run_mse_experiment: shots must be positive");

    MseExperimentReport report;
    report.config = config;
    report.seed_used = config.seed != 0 ? config.seed : entropy_seed();

    Rng master(report.seed_used);
    Rng setup_rng = master.derive(0xffff0001ull);
    const StructuredState state = build_input_state(config, setup_rng);
    const Chart chart = chart_at_identity(config.d);
    const RealVector truth = config.theta_true.size() > 0
                                 ? config.theta_true
                                 : RealVector::Zero(chart.dim());
    if (truth.size() != chart.dim())
        throw ValidationError("run_mse_experiment: theta_true has the wrong length");

    TrialSetup setup;
    if (config.strategy == "two_step") {
        if (config.measurement != "optimal")
            throw ValidationError("run_mse_experiment: two_step applies to measurement=optimal");
    } else if (config.measurement == "optimal") {
        setup.povms.push_back(optimal_povm(state, chart, truth));
    } else if (config.measurement == "random") {
        const Index dim = dense_dim(state);
        if (dim > config.dense_limit)
            throw ValidationError("run_mse_experiment: random measurement needs the dense regime, "
                                  "dimension " + std::to_string(dim) + " exceeds the limit " +
                                  std::to_string(config.dense_limit));
        Rng basis_rng = master.derive(0xffff0002ull);
        for (int b = 0; b < config.random_bases; ++b)
            setup.povms.push_back(
                basis_povm(state, chart, haar_unitary(dim, basis_rng), config.dense_limit));
    } else if (config.measurement == "locc") {
        if (config.input != "mub")
            throw ValidationError("run_mse_experiment: the locc protocol is defined on input=mub");
        LoccPlan plan = locc_plan(chart, config.n, truth);
        setup.branch_weights.resize(static_cast<Index>(plan.branches.size()));
        for (std::size_t b = 0; b < plan.branches.size(); ++b) {
            setup.branch_weights[static_cast<Index>(b)] = plan.branches[b].alice_prob;
            setup.povms.push_back(std::move(plan.branches[b].povm));
        }
    } else {
        throw ValidationError("run_mse_experiment: unknown measurement kind '" +
                              config.measurement + "', expected optimal|random|locc");
    }
    for (const Povm& povm : setup.povms)
        setup.probabilities.push_back(outcome_probabilities(povm, truth).p);

    report.trial_records.resize(static_cast<std::size_t>(config.trials));
    const int threads = std::max(1, config.threads);
    auto worker = [&](int first, int last) {
        for (int t = first; t < last; ++t) {
            TrialRecord& record = report.trial_records[static_cast<std::size_t>(t)];
            Rng trial_rng = master.derive(static_cast<std::uint64_t>(t));
            record.stream = trial_rng.seed();
            run_trial(setup, config, state, chart, truth, trial_rng, record);
        }
    };
    if (threads == 1) {
        worker(0, config.trials);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (config.trials + threads - 1) / threads;
        for (int w = 0; w < threads; ++w) {
            const int first = w * chunk;
            const int last = std::min(config.trials, first + chunk);
            if (first >= last) break;
            pool.emplace_back(worker, first, last);
        }
        for (std::thread& th : pool) th.join();
    }

    const Index dim = chart.dim();
    report.mse = RealMatrix::Zero(dim, dim);
    for (const TrialRecord& record : report.trial_records) {
        if (!record.converged) {
            ++report.excluded_trials;
            continue;
        }
        ++report.converged_trials;
        const RealVector err = record.estimate - truth;
        report.mse += err * err.transpose();
    }
    if (report.converged_trials == 0)
        throw ValidationError("run_mse_experiment: no trial converged");
    report.mse /= static_cast<double>(report.converged_trials);
    report.mse_trace = report.mse.trace();
    report.scaled_trace = static_cast<double>(config.shots) * report.mse_trace;
    report.bound = optimal_tr_inverse_bound(config.d, config.n);
    report.ratio = report.scaled_trace / report.bound;
    report.duration_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
    return report;
}

nlohmann::json experiment_config_to_json(const ExperimentConfig& config) {
    nlohmann::json j;
    j["d"] = config.d;
    j["n"] = config.n;
    j["shots"] = config.shots;
    j["trials"] = config.trials;
    j["input"] = config.input;
    j["approx_m"] = config.approx_m;
    j["approx_eps"] = config.approx_eps;
    j["approx_q"] = config.approx_q;
    j["measurement"] = config.measurement;
    j["strategy"] = config.strategy;
    j["random_bases"] = config.random_bases;
    j["theta_true"] = std::vector<double>(config.theta_true.begin(), config.theta_true.end());
    j["seed"] = config.seed;
    j["threads"] = config.threads;
    j["dense_limit"] = config.dense_limit;
    return j;
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
    ExperimentConfig config;
    try {
        if (j.contains("d")) config.d = j.at("d").get<Index>();
        if (j.contains("n")) config.n = j.at("n").get<int>();
        if (j.contains("shots")) config.shots = j.at("shots").get<Index>();
        if (j.contains("trials")) config.trials = j.at("trials").get<int>();
        if (j.contains("input")) config.input = j.at("input").get<std::string>();
        if (j.contains("approx_m")) config.approx_m = j.at("approx_m").get<std::int64_t>();
        if (j.contains("approx_eps")) config.approx_eps = j.at("approx_eps").get<double>();
        if (j.contains("approx_q")) config.approx_q = j.at("approx_q").get<double>();
        if (j.contains("measurement"))
            config.measurement = j.at("measurement").get<std::string>();
        if (j.contains("strategy")) config.strategy = j.at("strategy").get<std::string>();
        if (j.contains("random_bases")) config.random_bases = j.at("random_bases").get<int>();
        if (j.contains("theta_true")) {
            const std::vector<double> v = j.at("theta_true").get<std::vector<double>>();
            config.theta_true = Eigen::Map<const RealVector>(v.data(), static_cast<Index>(v.size()));
        }
        if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("threads")) config.threads = j.at("threads").get<int>();
        if (j.contains("dense_limit")) config.dense_limit = j.at("dense_limit").get<Index>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("experiment_config_from_json: malformed config: ") +
                              e.what());
    }
    return config;
}

nlohmann::json experiment_report_to_json(const MseExperimentReport& report) {
    nlohmann::json j;
    j["config"] = experiment_config_to_json(report.config);
    j["seed_used"] = report.seed_used;
    j["converged_trials"] = report.converged_trials;
    j["excluded_trials"] = report.excluded_trials;
    std::vector<std::vector<double>> mse;
    for (Index r = 0; r < report.mse.rows(); ++r)
        mse.emplace_back(report.mse.row(r).begin(), report.mse.row(r).end());
    j["mse_matrix"] = mse;
    j["mse_trace"] = report.mse_trace;
    j["scaled_trace"] = report.scaled_trace;
    j["bound"] = report.bound;
    j["ratio"] = report.ratio;
    j["duration_ms"] = report.duration_ms;
    nlohmann::json trials = nlohmann::json::array();
    for (const TrialRecord& record : report.trial_records) {
        nlohmann::json jt;
        jt["stream"] = record.stream;
        jt["converged"] = record.converged;
        jt["estimate"] = std::vector<double>(record.estimate.begin(), record.estimate.end());
        trials.push_back(jt);
    }
    j["trials"] = trials;
    return j;
}

}  // namespace sudest
