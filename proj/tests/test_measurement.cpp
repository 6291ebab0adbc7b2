#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sudest/designs.hpp"
#include "sudest/measurement.hpp"

#include <cmath>

using namespace sudest;

TEST_CASE("saturating measurement: uniform weights at the true point") {
    const Chart chart = chart_at_identity(2);
    const RealVector origin = RealVector::Zero(3);
    const StructuredState s = from_design(mub_vectors(2), 1);
    const Povm povm = optimal_povm(s, chart, origin);
    CHECK(outcome_count(povm) == 5);  // r + 1 informative outcomes plus completion

    const OutcomeDistribution dist = outcome_probabilities(povm, origin);
    REQUIRE(dist.p.size() == 5);
    for (Index k = 0; k < 4; ++k) CHECK(dist.p[k] == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(dist.p[4] < 1e-12);
    CHECK(std::abs(dist.p.sum() - 1.0) < 1e-12);
}

TEST_CASE("saturating measurement reaches the QFI away from the origin") {
    Rng rng(53);
    const Chart chart = chart_at_identity(2);
    for (int n : {1, 2, 3}) {
        const StructuredState s = from_design(sic_vectors(2), n);
        RealVector theta0(3);
        for (Index a = 0; a < 3; ++a) theta0[a] = 0.4 * (rng.uniform() - 0.5);
        const Povm povm = optimal_povm(s, chart, theta0);
        const FisherMatrix fi = fisher_information(povm, theta0);
        const FisherMatrix h = qfi_state(s, chart, theta0);
        CHECK((fi - h).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("probabilities follow the jacobian under finite differences") {
    Rng rng(59);
    const Chart chart = chart_at_identity(2);
    const StructuredState s = from_design(mub_vectors(2), 2);
    RealVector theta0(3), eval(3);
    for (Index a = 0; a < 3; ++a) {
        theta0[a] = 0.3 * (rng.uniform() - 0.5);
        eval[a] = theta0[a] + 0.2 * (rng.uniform() - 0.5);
    }
    const Povm povm = optimal_povm(s, chart, theta0);
    const ProbabilityJacobian pj = probabilities_and_jacobian(povm, eval);
    CHECK(std::abs(pj.p.sum() - 1.0) < 1e-10);

    const double h = 1e-6;
    for (Index a = 0; a < 3; ++a) {
        RealVector up = eval, down = eval;
        up[a] += h;
        down[a] -= h;
        const RealVector dp = (outcome_probabilities(povm, up).p -
                               outcome_probabilities(povm, down).p) /
                              (2.0 * h);
        CHECK((dp - pj.jacobian.col(a)).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("probability normalization holds across the chart") {
    Rng rng(61);
    const Chart chart = chart_at_identity(3);
    const StructuredState s = from_design(mub_vectors(3), 2);
    const Povm povm = optimal_povm(s, chart, RealVector::Zero(8));
    for (int rep = 0; rep < 5; ++rep) {
        RealVector theta(8);
        for (Index a = 0; a < 8; ++a) theta[a] = 0.8 * (rng.uniform() - 0.5);
        const OutcomeDistribution dist = outcome_probabilities(povm, theta);
        CHECK(std::abs(dist.p.sum() - 1.0) < 1e-10);
        CHECK(dist.p.minCoeff() >= 0.0);
    }
}

TEST_CASE("singular information requires explicit consent") {
    const Chart chart = chart_at_identity(2);
    const std::vector<Basis> mubs = mub_bases(2);
    const StructuredState cond = bob_conditional(mubs, 2, 0, 2);
    CHECK_THROWS_AS(optimal_povm(cond, chart, RealVector::Zero(3)), ValidationError);

    OptimalPovmOptions options;
    options.allow_singular = true;
    const Povm povm = optimal_povm(cond, chart, RealVector::Zero(3), options);
    const FisherMatrix fi = fisher_information(povm, RealVector::Zero(3));
    const FisherMatrix h = qfi_state(cond, chart, RealVector::Zero(3));
    CHECK((fi - h).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("attainability gate rejects skewed probes") {
    const Chart chart = chart_at_identity(2);
    ComplexVector tau(2);
    tau << 1.0, 0.0;
    const StructuredState s = product_baseline(tau, 2);
    CHECK_THROWS_AS(optimal_povm(s, chart, RealVector::Zero(3)), ValidationError);
}

TEST_CASE("basis measurement probabilities are squared columns") {
    Rng rng(67);
    const Chart chart = chart_at_identity(2);
    const StructuredState s = from_design(mub_vectors(2), 1);
    const Index dim = dense_dim(s);
    const ComplexMatrix basis = haar_unitary(dim, rng);
    const DensePovm povm = basis_povm(s, chart, basis);

    RealVector theta(3);
    theta << 0.1, -0.2, 0.15;
    const OutcomeDistribution dist = outcome_probabilities(Povm(povm), theta);
    const ComplexVector psi = dense_state(s, unitary_at(chart, theta));
    REQUIRE(dist.p.size() == dim);
    for (Index k = 0; k < dim; ++k)
        CHECK(dist.p[k] == doctest::Approx(std::norm(basis.col(k).dot(psi))).epsilon(1e-10));
    CHECK(std::abs(dist.p.sum() - 1.0) < 1e-12);
}

TEST_CASE("paired bases reconstruct the QFI") {
    Rng rng(71);
    const Chart chart = chart_at_identity(2);
    const RealVector origin = RealVector::Zero(3);
    const StructuredState s = from_design(mub_vectors(2), 2);
    const FisherMatrix h = qfi_state(s, chart, origin);
    const ComplexMatrix y = y_pairing(s, chart, origin);
    CHECK((y.adjoint() * y - ComplexMatrix::Identity(y.rows(), y.cols())).norm() < 1e-10);
    for (int rep = 0; rep < 3; ++rep) {
        const ComplexMatrix basis = haar_unitary(dense_dim(s), rng);
        const FisherMatrix fb = fisher_information(Povm(basis_povm(s, chart, basis)), origin);
        const FisherMatrix fyb =
            fisher_information(Povm(basis_povm(s, chart, y * basis)), origin);
        CHECK((fb + fyb - h).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("random-basis average estimate carries errors") {
    Rng rng(73);
    const Chart chart = chart_at_identity(2);
    const StructuredState s = from_design(mub_vectors(2), 1);
    const RandomFiEstimate estimate =
        average_random_fi(s, chart, RealVector::Zero(3), 200, rng);
    CHECK(estimate.draws == 200);
    CHECK(estimate.sem.minCoeff() >= 0.0);
    CHECK(estimate.sem.maxCoeff() > 0.0);
    // Haar mean is QFI/2 = identity here; 200 draws pin it loosely.
    CHECK((estimate.mean - RealMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 0.3);
}

TEST_CASE("locc plan averages to the optimum") {
    const Chart chart = chart_at_identity(2);
    const LoccPlan plan = locc_plan(chart, 2, RealVector::Zero(3));
    CHECK(plan.branches.size() == 6);
    double total = 0.0;
    for (const LoccBranch& branch : plan.branches) {
        CHECK(branch.alice_prob == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
        total += branch.alice_prob;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((plan.averaged_fi - optimal_qfi(2, 2)).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((plan.averaged_conditional_qfi - optimal_qfi(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("locc plan on sampled bases attains that input's own QFI") {
    const Chart chart = chart_at_identity(2);
    const RealVector origin = RealVector::Zero(3);
    Rng rng(29);
    const std::vector<Basis> bases = sample_approx_design(2, 3, rng);
    const FisherMatrix own = qfi_state(from_approx_design(bases, 2), chart, origin);
    const LoccPlan plan = locc_plan_for_bases(bases, 2, chart, origin);
    CHECK(plan.branches.size() == 6);
    for (const LoccBranch& branch : plan.branches)
        CHECK(branch.alice_prob == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK((plan.averaged_conditional_qfi - own).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((plan.averaged_fi - own).cwiseAbs().maxCoeff() < 1e-8);
}
