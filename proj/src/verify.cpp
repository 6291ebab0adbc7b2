#include "sudest/verify.hpp"

#include "sudest/estimate.hpp"
#include "sudest/io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

namespace sudest {

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << x;
    return os.str();
}

double max_abs(const RealMatrix& m) { return m.cwiseAbs().maxCoeff(); }

int resolve_threads(const VerifyOptions& options) {
    if (options.threads > 0) return options.threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return static_cast<int>(std::min(8u, std::max(1u, hw)));
}

StructuredState random_structured_state(Index d, int n, Rng& rng) {
    StructuredState s;
    s.d = d;
    s.n = n;
    const int count = 1 + static_cast<int>(rng.uniform() * 5.0);
    for (int i = 0; i < count; ++i) {
        Branch b;
        b.label = static_cast<Index>(rng.uniform() * 3.0);
        b.coeff = rng.complex_gaussian();
        ComplexVector v(d);
        for (Index j = 0; j < d; ++j) v[j] = rng.complex_gaussian();
        b.vec = v / v.norm();
        s.branches.push_back(std::move(b));
    }
    return normalized(std::move(s));
}

RealVector random_point(Index dim, double scale, Rng& rng) {
    RealVector theta(dim);
    for (Index a = 0; a < dim; ++a) theta[a] = scale * (2.0 * rng.uniform() - 1.0);
    return theta;
}

// Full-space SLD overlap matrix, no branch-pair shortcuts: materialize the
// state and its derivatives and take inner products directly.
ComplexMatrix dense_sld_gram(const StructuredState& s, const Chart& chart,
                             const RealVector& theta) {
    const ComplexMatrix u = unitary_at(chart, theta);
    const std::vector<ComplexMatrix> frame = tangent_at(chart, theta);
    const ComplexVector psi = dense_state(s, u);
    std::vector<ComplexVector> dpsi;
    for (const ComplexMatrix& t : frame)
        dpsi.push_back(Complex(0.0, -1.0) * dense_insertion(s, u, t));
    const Index dim = static_cast<Index>(frame.size());
    ComplexMatrix gram(dim, dim);
    for (Index a = 0; a < dim; ++a)
        for (Index b = 0; b < dim; ++b)
            gram(a, b) = 4.0 * (dpsi[static_cast<std::size_t>(a)].dot(dpsi[static_cast<std::size_t>(b)]) -
                                dpsi[static_cast<std::size_t>(a)].dot(psi) *
                                    psi.dot(dpsi[static_cast<std::size_t>(b)]));
    return gram;
}

// The saturating measurement's effect vectors on the full space.
std::vector<ComplexVector> dense_effects(const FunctionalPovm& fn) {
    const StructuredState& s = fn.state;
    const ComplexMatrix& v = fn.reference;
    const ComplexVector psi0 = dense_state(s, v);
    const Index params = static_cast<Index>(fn.frame0.size());
    const Index r = fn.weight.rows();

    std::vector<ComplexVector> slds;
    for (Index c = 0; c < params; ++c) {
        const ComplexVector tpsi = dense_insertion(s, v, fn.frame0[static_cast<std::size_t>(c)]);
        const double m0 = std::real(psi0.dot(tpsi));
        slds.push_back(Complex(0.0, -2.0) * (tpsi - m0 * psi0));
    }

    std::vector<ComplexVector> b(static_cast<std::size_t>(r + 1),
                                 ComplexVector::Zero(psi0.size()));
    for (Index row = 0; row < r; ++row)
        for (Index c = 0; c < params; ++c)
            b[static_cast<std::size_t>(row)] += fn.weight(row, c) * slds[static_cast<std::size_t>(c)];
    b[static_cast<std::size_t>(r)] = psi0;

    std::vector<ComplexVector> effects(static_cast<std::size_t>(r + 1),
                                       ComplexVector::Zero(psi0.size()));
    for (Index xi = 0; xi <= r; ++xi)
        for (Index chi = 0; chi <= r; ++chi)
            effects[static_cast<std::size_t>(xi)] += fn.mix(xi, chi) * b[static_cast<std::size_t>(chi)];
    return effects;
}

struct DenseEval {
    RealVector p;
    RealMatrix jacobian;
};

// Probabilities and derivatives of the materialized measurement, full-space
// arithmetic only.
DenseEval dense_functional_eval(const FunctionalPovm& fn, const RealVector& theta) {
    const std::vector<ComplexVector> effects = dense_effects(fn);
    const ComplexMatrix u = unitary_at(fn.chart, theta);
    const std::vector<ComplexMatrix> frame = tangent_at(fn.chart, theta);
    const ComplexVector psi = dense_state(fn.state, u);
    std::vector<ComplexVector> dpsi;
    for (const ComplexMatrix& t : frame)
        dpsi.push_back(Complex(0.0, -1.0) * dense_insertion(fn.state, u, t));

    const Index m = static_cast<Index>(effects.size());
    const Index params = static_cast<Index>(frame.size());
    DenseEval eval;
    eval.p.resize(m + 1);
    eval.jacobian = RealMatrix::Zero(m + 1, params);
    double total = 0.0;
    for (Index k = 0; k < m; ++k) {
        const Complex a = effects[static_cast<std::size_t>(k)].dot(psi);
        eval.p[k] = std::norm(a);
        total += eval.p[k];
        for (Index par = 0; par < params; ++par)
            eval.jacobian(k, par) =
                2.0 * std::real(std::conj(a) *
                                effects[static_cast<std::size_t>(k)].dot(
                                    dpsi[static_cast<std::size_t>(par)]));
    }
    eval.p[m] = std::max(0.0, 1.0 - total);
    eval.jacobian.row(m) = -eval.jacobian.topRows(m).colwise().sum();
    return eval;
}

FisherMatrix fisher_from_eval(const RealVector& p, const RealMatrix& jacobian, double floor) {
    const Index params = jacobian.cols();
    FisherMatrix fi = FisherMatrix::Zero(params, params);
    for (Index k = 0; k < p.size(); ++k) {
        if (p[k] <= floor) continue;
        const RealVector grad = jacobian.row(k).transpose();
        fi += grad * grad.transpose() / p[k];
    }
    return fi;
}

StructuredState phase_dressed_design(const VectorSet& set, int n, Rng& rng) {
    StructuredState s = from_design(set, n);
    for (Branch& b : s.branches)
        b.coeff *= std::exp(Complex(0.0, 2.0 * std::numbers::pi * rng.uniform()));
    return s;
}

using CheckFn = std::function<CheckResult(const VerifyOptions&)>;

CheckResult check_optimal_qfi_closed_form(const VerifyOptions&) {
    CheckResult result{"optimal_qfi_closed_form", true, "", 0.0};
    double worst = 0.0;
    for (Index d : {Index(2), Index(3)}) {
        const Chart chart = chart_at_identity(d);
        const RealVector origin = RealVector::Zero(chart.dim());
        for (int n = 1; n <= 8; ++n) {
            const FisherMatrix target = optimal_qfi(d, n);
            for (const char* kind : {"mub", "sic"}) {
                const VectorSet set = kind[0] == 'm' ? mub_vectors(d) : sic_vectors(d);
                const FisherMatrix h = qfi_state(from_design(set, n), chart, origin);
                worst = std::max(worst, (h - target).norm());
            }
        }
    }
    result.pass = worst <= 1e-10;
    result.details = "max Frobenius deviation from 4n(n+d)/(d(d+1))*I over d in {2,3}, n in 1..8, "
                     "mub+sic inputs: " + fmt(worst) + " (tol 1e-10)";
    return result;
}

CheckResult check_bound_value_and_attainment(const VerifyOptions&) {
    CheckResult result{"bound_value_and_attainment", true, "", 0.0};
    double worst_bound = 0.0;
    for (Index d : {Index(2), Index(3)}) {
        const Chart chart = chart_at_identity(d);
        const RealVector origin = RealVector::Zero(chart.dim());
        for (int n = 1; n <= 8; ++n) {
            for (const char* kind : {"mub", "sic"}) {
                const VectorSet set = kind[0] == 'm' ? mub_vectors(d) : sic_vectors(d);
                const FisherMatrix h = qfi_state(from_design(set, n), chart, origin);
                worst_bound = std::max(
                    worst_bound, std::abs(trace_inverse(h) - optimal_tr_inverse_bound(d, n)));
            }
        }
    }
    double worst_fi = 0.0;
    for (Index d : {Index(2), Index(3)}) {
        const Chart chart = chart_at_identity(d);
        const RealVector origin = RealVector::Zero(chart.dim());
        const int n_max = d == 2 ? 3 : 2;
        for (int n = 1; n <= n_max; ++n) {
            const StructuredState s = from_design(mub_vectors(d), n);
            const FisherMatrix h = qfi_state(s, chart, origin);
            const Povm povm = optimal_povm(s, chart, origin);
            const FisherMatrix fi = fisher_information(povm, origin);
            worst_fi = std::max(worst_fi, max_abs(fi - h));
        }
    }
    result.pass = worst_bound <= 1e-10 && worst_fi <= 1e-8;
    result.details = "max |TrH^-1 - d(d+1)^2(d-1)/(4n(n+d))| = " + fmt(worst_bound) +
                     " (tol 1e-10); max |FI - QFI| of the saturating measurement = " +
                     fmt(worst_fi) + " (tol 1e-8)";
    return result;
}

CheckResult check_design_strictness(const VerifyOptions& options) {
    CheckResult result{"design_strictness", true, "", 0.0};
    const Index d = 2;
    const int n = 3;
    const int cases = options.fast ? 50 : 200;
    const Chart chart = chart_at_identity(d);
    const RealVector origin = RealVector::Zero(chart.dim());
    const double bound = optimal_tr_inverse_bound(d, n);
    const ComplexMatrix design_moment =
        2.0 / static_cast<double>(d * (d + 1)) * symmetric_projector(d);

    Rng rng = Rng(options.seed).derive(3);
    int violations = 0;
    int mismatches = 0;
    int tight = 0;
    auto examine = [&](const StructuredState& s) {
        const FisherMatrix h = qfi_state(s, chart, origin);
        const double tr_inv = trace_inverse(h);
        if (!(tr_inv >= bound - 1e-9)) ++violations;
        const bool gap_zero = tr_inv - bound <= 1e-9;
        const bool moment_match = hs_distance(reduced_rho2(s), design_moment) <= 1e-8;
        if (gap_zero != moment_match) ++mismatches;
        if (gap_zero) ++tight;
    };
    for (int c = 0; c < cases; ++c) examine(random_structured_state(d, n, rng));
    examine(from_design(mub_vectors(d), n));
    examine(from_design(sic_vectors(d), n));

    result.pass = violations == 0 && mismatches == 0 && tight >= 2;
    result.details = std::to_string(cases) + " random branch inputs + 2 design inputs (d=2, n=3): " +
                     std::to_string(violations) + " below bound-1e-9, " +
                     std::to_string(mismatches) +
                     " gap/two-copy-moment equivalence mismatches, " + std::to_string(tight) +
                     " tight cases";
    return result;
}

CheckResult check_dense_oracle_equivalence(const VerifyOptions& options) {
    CheckResult result{"dense_oracle_equivalence", true, "", 0.0};
    const Index d = 2;
    Rng rng = Rng(options.seed).derive(4);
    double worst_gram = 0.0, worst_prob = 0.0, worst_fi = 0.0;
    for (int n = 1; n <= 3; ++n) {
        const Chart chart = chart_at_identity(d);
        for (int c = 0; c < 20; ++c) {
            // Gram agreement on arbitrary branch inputs.
            const StructuredState raw = random_structured_state(d, n, rng);
            const RealVector theta = random_point(chart.dim(), 0.5, rng);
            const ComplexMatrix engine_gram = sld_gram(raw, chart, theta);
            const ComplexMatrix dense_gram = dense_sld_gram(raw, chart, theta);
            worst_gram = std::max(worst_gram,
                                  (engine_gram - dense_gram).cwiseAbs().maxCoeff());

            // Probability and Fisher agreement on a saturating measurement.
            const VectorSet set = c % 2 == 0 ? mub_vectors(d) : sic_vectors(d);
            const StructuredState s = phase_dressed_design(set, n, rng);
            const RealVector theta0 = random_point(chart.dim(), 0.5, rng);
            const RealVector eval = theta0 + random_point(chart.dim(), 0.25, rng);
            const Povm povm = optimal_povm(s, chart, theta0);
            const auto& fn = std::get<FunctionalPovm>(povm);

            const ProbabilityJacobian engine = probabilities_and_jacobian(povm, eval);
            const DenseEval dense = dense_functional_eval(fn, eval);
            worst_prob = std::max(worst_prob, (engine.p - dense.p).cwiseAbs().maxCoeff());

            const FisherMatrix fi_engine = fisher_information(povm, eval);
            const FisherMatrix fi_dense = fisher_from_eval(dense.p, dense.jacobian, 1e-12);
            const double scale = std::max(1.0, max_abs(fi_dense));
            worst_fi = std::max(worst_fi, max_abs(fi_engine - fi_dense) / scale);
        }
    }
    result.pass = worst_gram <= 1e-10 && worst_prob <= 1e-10 && worst_fi <= 1e-10;
    result.details = "d=2, n in {1,2,3}, 20 cases each: max SLD-gram deviation " + fmt(worst_gram) +
                     ", max probability deviation " + fmt(worst_prob) +
                     ", max scaled FI deviation " + fmt(worst_fi) + " (tol 1e-10)";
    return result;
}

CheckResult check_mse_scaling(const VerifyOptions& options) {
    CheckResult result{"mse_scaling", true, "", 0.0};
    std::vector<double> ratios, constancy;
    for (int n = 1; n <= 4; ++n) {
        ExperimentConfig config;
        config.d = 2;
        config.n = n;
        config.shots = 5000;
        config.trials = options.fast ? 40 : 200;
        config.input = "mub";
        config.measurement = "optimal";
        config.strategy = "oracle";
        config.seed = options.seed + static_cast<std::uint64_t>(n);
        config.threads = resolve_threads(options);
        const MseExperimentReport report = run_mse_experiment(config);
        ratios.push_back(report.ratio);
        constancy.push_back(report.scaled_trace * n * (n + 2));
    }
    bool window = true;
    for (int n = 1; n <= 3; ++n)
        window = window && ratios[static_cast<std::size_t>(n - 1)] >= 0.85 &&
                 ratios[static_cast<std::size_t>(n - 1)] <= 1.20;
    const double spread = *std::max_element(constancy.begin(), constancy.end()) /
                          *std::min_element(constancy.begin(), constancy.end());
    result.pass = window && spread <= 1.3;
    std::ostringstream os;
    os << "N*TrMSE/bound for n=1..4: ";
    for (double r : ratios) os << fmt(r) << " ";
    os << "(window [0.85,1.20] for n<=3); N*TrMSE*n(n+d) max/min = " << fmt(spread)
       << " (tol 1.3)";
    result.details = os.str();
    return result;
}

CheckResult check_separable_baseline(const VerifyOptions&) {
    CheckResult result{"separable_baseline", true, "", 0.0};
    const Index d = 2;
    const Chart chart = chart_at_identity(d);
    const RealVector origin = RealVector::Zero(chart.dim());
    ComplexVector tau(2);
    tau << std::cos(0.4), std::exp(Complex(0.0, 0.7)) * std::sin(0.4);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    bool all_singular = true;
    for (int n = 1; n <= 8; ++n) {
        const FisherMatrix h = qfi_state(product_baseline(tau, n), chart, origin);
        all_singular = all_singular && std::isinf(trace_inverse(h));
        const double scaled = static_cast<double>(n) * trace_pseudo_inverse(h);
        lo = std::min(lo, scaled);
        hi = std::max(hi, scaled);
    }
    result.pass = lo >= 0.5 && hi <= 2.0;
    result.details = "product probe, d=2, n=1..8: n*Tr(H^+) in [" + fmt(lo) + ", " + fmt(hi) +
                     "] (window [0.5, 2.0]); the probe's own rotation axis stays invisible, so the "
                     "full-parameter TrH^-1 is infinite at every n while the identifiable block "
                     "scales as 1/n, against 1/n^2 for design inputs";
    return result;
}

CheckResult check_random_measurement(const VerifyOptions& options) {
    CheckResult result{"random_measurement", true, "", 0.0};
    const Index d = 2;
    const Chart chart = chart_at_identity(d);
    const RealVector origin = RealVector::Zero(chart.dim());
    Rng rng = Rng(options.seed).derive(7);

    double worst_pair = 0.0;
    for (int n : {1, 2}) {
        const StructuredState s = from_design(mub_vectors(d), n);
        const FisherMatrix h = qfi_state(s, chart, origin);
        const ComplexMatrix y = y_pairing(s, chart, origin);
        const Index dim = dense_dim(s);
        for (int rep = 0; rep < 20; ++rep) {
            const ComplexMatrix basis = haar_unitary(dim, rng);
            const FisherMatrix fi_b =
                fisher_information(Povm(basis_povm(s, chart, basis)), origin);
            const FisherMatrix fi_yb =
                fisher_information(Povm(basis_povm(s, chart, y * basis)), origin);
            worst_pair = std::max(worst_pair, max_abs(fi_b + fi_yb - h));
        }
    }

    const StructuredState s1 = from_design(mub_vectors(d), 1);
    const FisherMatrix h1 = qfi_state(s1, chart, origin);
    const int draws = options.fast ? 1000 : 10000;
    const RandomFiEstimate estimate = average_random_fi(s1, chart, origin, draws, rng);
    const RealMatrix gap = (estimate.mean - 0.5 * h1).cwiseAbs() - 3.0 * estimate.sem;
    const double mean_excess = gap.maxCoeff();
    const double tr_inv = trace_inverse(estimate.mean);
    const double tr_tol = 3.0 * estimate.sem.trace() + 1e-6;

    result.pass = worst_pair <= 1e-8 && mean_excess <= 0.0 && std::abs(tr_inv - 3.0) <= tr_tol;
    result.details = "max |FI(B)+FI(YB)-QFI| over 20 bases, n in {1,2}: " + fmt(worst_pair) +
                     " (tol 1e-8); Haar mean vs QFI/2 at " + std::to_string(draws) +
                     " draws: max(|dev|-3*sem) = " + fmt(mean_excess) +
                     "; Tr FI^-1 = " + fmt(tr_inv) + " vs 3.0 (tol " + fmt(tr_tol) + ")";
    return result;
}

CheckResult check_locc_optimality(const VerifyOptions& options) {
    CheckResult result{"locc_optimality", true, "", 0.0};
    const Index d = 2;
    const Chart chart = chart_at_identity(d);
    const RealVector origin = RealVector::Zero(chart.dim());
    const GeneratorBasis basis = gell_mann_basis(d);
    const std::vector<Basis> mubs = mub_bases(d);

    double worst_avg = 0.0;
    for (int n = 1; n <= 4; ++n) {
        FisherMatrix avg = FisherMatrix::Zero(chart.dim(), chart.dim());
        for (Index b = 0; b < static_cast<Index>(mubs.size()); ++b)
            for (Index k = 0; k < d; ++k)
                avg += locc_conditional_qfi(mubs, b, k, n, basis);
        avg /= static_cast<double>(d * (d + 1));
        worst_avg = std::max(worst_avg, (avg - optimal_qfi(d, n)).cwiseAbs().maxCoeff());
    }

    double worst_plan = 0.0;
    std::vector<double> ratios;
    for (int n : {2, 3}) {
        const LoccPlan plan = locc_plan(chart, n, origin);
        worst_plan = std::max(worst_plan, max_abs(plan.averaged_fi - optimal_qfi(d, n)));
        ExperimentConfig config;
        config.d = 2;
        config.n = n;
        config.shots = 5000;
        config.trials = options.fast ? 40 : 200;
        config.input = "mub";
        config.measurement = "locc";
        config.strategy = "oracle";
        config.seed = options.seed + 80 + static_cast<std::uint64_t>(n);
        config.threads = resolve_threads(options);
        ratios.push_back(run_mse_experiment(config).ratio);
    }
    bool window = true;
    for (double r : ratios) window = window && r >= 0.85 && r <= 1.20;

    result.pass = worst_avg <= 1e-10 && worst_plan <= 1e-8 && window;
    std::ostringstream os;
    os << "averaged conditional QFI vs optimal, n=1..4: max dev " << fmt(worst_avg)
       << " (tol 1e-10); averaged simulated FI dev " << fmt(worst_plan)
       << " (tol 1e-8); end-to-end N*TrMSE/bound at n in {2,3}: ";
    for (double r : ratios) os << fmt(r) << " ";
    os << "(window [0.85,1.20])";
    result.details = os.str();
    return result;
}

CheckResult check_approximate_designs(const VerifyOptions& options) {
    CheckResult result{"approximate_designs", true, "", 0.0};
    const Index d = 2;
    const double eps = 0.5;
    const double q = 0.95;
    // Recompute the sample size from scratch rather than trusting the library.
    const double direct = std::ceil(4.0 * (2.0 + 1.0) * std::log(2.0) / (eps * eps) *
                                    (std::log(2.0 * 3.0) - std::log(1.0 - q)));
    const std::int64_t m = chernoff_sample_size(d, eps, q);
    const bool m_ok = m == 160 && static_cast<std::int64_t>(direct) == 160;

    const int n = 2;
    const int reps = options.fast ? 50 : 200;
    const GeneratorBasis basis = gell_mann_basis(d);
    const FisherMatrix target = optimal_qfi(d, n);
    Rng rng = Rng(options.seed).derive(9);

    // A sampled input's QFI is the mean of its per-basis profiles; anchor
    // that identity against the structured-state engine before trusting the
    // profiles alone in the loop below.
    double anchor_dev = 0.0;
    {
        Rng anchor_rng = rng.derive(9001);
        const std::vector<Basis> bases = sample_approx_design(d, m, anchor_rng);
        FisherMatrix profile_mean = FisherMatrix::Zero(3, 3);
        for (const Basis& bset : bases)
            profile_mean += basis_qfi_profile(basis_matrix(bset), n, basis);
        profile_mean /= static_cast<double>(bases.size());
        const Chart chart = chart_at_identity(d);
        const RealVector origin = RealVector::Zero(chart.dim());
        const FisherMatrix engine = qfi_state(from_approx_design(bases, n), chart, origin);
        anchor_dev = max_abs(engine - profile_mean);
    }

    int violations = 0;
    std::int64_t draws = 0;
    FisherMatrix mean = FisherMatrix::Zero(3, 3);
    RealMatrix m2 = RealMatrix::Zero(3, 3);
    for (int rep = 0; rep < reps; ++rep) {
        Rng rep_rng = rng.derive(static_cast<std::uint64_t>(rep));
        const std::vector<Basis> bases = sample_approx_design(d, m, rep_rng);
        FisherMatrix h = FisherMatrix::Zero(3, 3);
        for (const Basis& bset : bases) {
            const FisherMatrix profile = basis_qfi_profile(basis_matrix(bset), n, basis);
            h += profile;
            ++draws;
            const RealMatrix delta = profile - mean;
            mean += delta / static_cast<double>(draws);
            m2 += delta.cwiseProduct(profile - mean);
        }
        h /= static_cast<double>(m);

        Eigen::SelfAdjointEigenSolver<RealMatrix> low(h - (1.0 - eps) * target);
        Eigen::SelfAdjointEigenSolver<RealMatrix> high((1.0 + eps) * target - h);
        if (low.eigenvalues().minCoeff() < -1e-12 || high.eigenvalues().minCoeff() < -1e-12)
            ++violations;
    }
    const double fraction = static_cast<double>(violations) / reps;
    const RealMatrix sem = (m2 / (static_cast<double>(draws) * (draws - 1.0))).cwiseSqrt();
    const double mean_excess = ((mean - target).cwiseAbs() - 3.0 * sem).maxCoeff();

    result.pass = m_ok && anchor_dev <= 1e-10 && fraction <= 0.05 && mean_excess <= 0.0;
    result.details = "m recomputed = " + std::to_string(m) +
                     " (expect 160); sampled-input QFI vs mean basis profile: dev " +
                     fmt(anchor_dev) + " (tol 1e-10); " + std::to_string(reps) +
                     " repetitions at n=2: violation fraction " + fmt(fraction) +
                     " (tol 0.05); mean profile over " + std::to_string(draws) +
                     " draws vs H0: max(|dev|-3*sem) = " + fmt(mean_excess);
    return result;
}

CheckResult check_injectivity(const VerifyOptions& options) {
    CheckResult result{"injectivity", true, "", 0.0};
    const Index d = 2;
    const int n = 2;
    Rng rng = Rng(options.seed).derive(10);
    Rng approx_rng = rng.derive(1);
    const std::vector<StructuredState> states = {
        from_design(mub_vectors(d), n),
        from_approx_design(sample_approx_design(d, 8, approx_rng), n)};

    double worst_phase = 0.0;
    double best_generic = std::numeric_limits<double>::infinity();
    int generic_count = 0;
    for (const StructuredState& s : states) {
        for (int rep = 0; rep < 10; ++rep) {
            const Complex phase = std::exp(Complex(0.0, 2.0 * std::numbers::pi * rng.uniform()));
            const ComplexMatrix u = phase * ComplexMatrix::Identity(d, d);
            worst_phase = std::max(worst_phase, std::abs(injectivity_margin(s, u)));
        }
        int done = 0;
        while (done < 100) {
            const ComplexMatrix u = haar_unitary(d, rng);
            const double orbit_distance =
                std::sqrt(std::max(0.0, 2.0 * static_cast<double>(d) - 2.0 * std::abs(u.trace())));
            if (orbit_distance < 0.1) continue;
            ++done;
            ++generic_count;
            best_generic = std::min(best_generic, injectivity_margin(s, u));
        }
    }
    result.pass = worst_phase <= 1e-12 && best_generic > 1e-6;
    result.details = "design + approx inputs (d=2, n=2): max |margin| at 10 global phases " +
                     fmt(worst_phase) + " (tol 1e-12); min margin over " +
                     std::to_string(generic_count) + " unitaries at orbit distance >= 0.1: " +
                     fmt(best_generic) + " (must exceed 1e-6)";
    return result;
}

CheckResult check_determinism(const VerifyOptions& options) {
    CheckResult result{"determinism", true, "", 0.0};
    ExperimentConfig config;
    config.d = 2;
    config.n = 1;
    config.shots = 300;
    config.trials = 12;
    config.input = "mub";
    config.measurement = "optimal";
    config.strategy = "oracle";
    config.seed = options.seed + 11;
    config.threads = 1;
    MseExperimentReport first = run_mse_experiment(config);
    config.threads = 4;
    MseExperimentReport second = run_mse_experiment(config);

    nlohmann::json ja = experiment_report_to_json(first);
    nlohmann::json jb = experiment_report_to_json(second);
    ja.erase("duration_ms");
    jb.erase("duration_ms");
    ja["config"].erase("threads");
    jb["config"].erase("threads");
    const bool json_equal = ja.dump() == jb.dump();

    auto render_csv = [&](const MseExperimentReport& report) {
        CsvWriter csv("test", experiment_config_to_json(report.config), report.seed_used);
        csv.header({"trial", "converged", "e0", "e1", "e2"});
        for (std::size_t t = 0; t < report.trial_records.size(); ++t) {
            const TrialRecord& record = report.trial_records[t];
            csv.row({std::to_string(t), record.converged ? "1" : "0",
                     csv_cell(record.estimate[0]), csv_cell(record.estimate[1]),
                     csv_cell(record.estimate[2])});
        }
        return csv.text();
    };
    config.threads = 1;
    const std::string csv_a = render_csv(first);
    const std::string csv_b = render_csv(run_mse_experiment(config));

    result.pass = json_equal && csv_a == csv_b;
    result.details = std::string("same seed, 1 vs 4 threads: reports ") +
                     (json_equal ? "identical" : "DIFFER") +
                     " after dropping wall-clock fields; repeated run CSV bytes " +
                     (csv_a == csv_b ? "identical" : "DIFFER");
    return result;
}

}  // namespace

std::vector<std::string> acceptance_check_names() {
    return {"optimal_qfi_closed_form", "bound_value_and_attainment", "design_strictness",
            "dense_oracle_equivalence", "mse_scaling",              "separable_baseline",
            "random_measurement",      "locc_optimality",           "approximate_designs",
            "injectivity",             "determinism"};
}

std::vector<CheckResult> run_acceptance_checks(const VerifyOptions& options) {
    if (!options.only.empty()) {
        const std::vector<std::string> names = acceptance_check_names();
        if (std::find(names.begin(), names.end(), options.only) == names.end()) {
            std::string known;
            for (const std::string& name : names) known += (known.empty() ? "" : ", ") + name;
            throw ValidationError("unknown check '" + options.only + "' (valid: " + known + ")");
        }
    }
    const std::vector<std::pair<std::string, CheckFn>> checks = {
        {"optimal_qfi_closed_form", check_optimal_qfi_closed_form},
        {"bound_value_and_attainment", check_bound_value_and_attainment},
        {"design_strictness", check_design_strictness},
        {"dense_oracle_equivalence", check_dense_oracle_equivalence},
        {"mse_scaling", check_mse_scaling},
        {"separable_baseline", check_separable_baseline},
        {"random_measurement", check_random_measurement},
        {"locc_optimality", check_locc_optimality},
        {"approximate_designs", check_approximate_designs},
        {"injectivity", check_injectivity},
        {"determinism", check_determinism},
    };
    std::vector<CheckResult> results;
    for (const auto& [name, fn] : checks) {
        if (!options.only.empty() && name != options.only) continue;
        const auto t0 = std::chrono::steady_clock::now();
        CheckResult result;
        try {
            result = fn(options);
        } catch (const std::exception& e) {
            result.name = name;
            result.pass = false;
            result.details = std::string("raised: ") + e.what();
        }
        result.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        results.push_back(std::move(result));
    }
    if (options.inject_failure) {
        CheckResult injected;
        injected.name = "injected_failure";
        injected.pass = false;
        injected.details = "deliberate failure requested via inject_failure";
        results.push_back(std::move(injected));
    }
    return results;
}

}  // namespace sudest
