#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sudest/designs.hpp"
#include "sudest/qfi.hpp"

#include <cmath>

using namespace sudest;

TEST_CASE("design-state QFI hits the closed-form optimum") {
    // d = 2, n = 2 value 16/3 on every diagonal; d = 3, n = 1 value 4/3.
    const Chart c2 = chart_at_identity(2);
    const FisherMatrix h22 = qfi_state(from_design(mub_vectors(2), 2), c2, RealVector::Zero(3));
    CHECK((h22 - (16.0 / 3.0) * RealMatrix::Identity(3, 3)).norm() < 1e-12);

    const Chart c3 = chart_at_identity(3);
    const FisherMatrix h31 = qfi_state(from_design(sic_vectors(3), 1), c3, RealVector::Zero(8));
    CHECK((h31 - (4.0 / 3.0) * RealMatrix::Identity(8, 8)).norm() < 1e-12);

    CHECK((optimal_qfi(2, 2) - h22).norm() < 1e-12);
    CHECK((optimal_qfi(3, 1) - h31).norm() < 1e-12);
}

TEST_CASE("inverse trace against the closed-form bound") {
    CHECK(optimal_tr_inverse_bound(2, 1) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(optimal_tr_inverse_bound(2, 2) == doctest::Approx(0.5625).epsilon(1e-14));
    const Chart chart = chart_at_identity(2);
    const FisherMatrix h = qfi_state(from_design(mub_vectors(2), 2), chart, RealVector::Zero(3));
    CHECK(trace_inverse(h) == doctest::Approx(0.5625).epsilon(1e-12));
}

TEST_CASE("QFI is chart-covariant under the reference point") {
    Rng rng(37);
    const ComplexMatrix r = haar_unitary(2, rng);
    const Chart moved = chart_at(r);
    const StructuredState s = from_design(mub_vectors(2), 2);
    const FisherMatrix h = qfi_state(s, moved, RealVector::Zero(3));
    CHECK((h - optimal_qfi(2, 2)).norm() < 1e-10);
}

TEST_CASE("moment formula matches the engine on random states") {
    Rng rng(41);
    const Chart chart = chart_at_identity(2);
    for (int n : {1, 3}) {
        StructuredState s;
        s.d = 2;
        s.n = n;
        for (int i = 0; i < 3; ++i) {
            ComplexVector v(2);
            v << rng.complex_gaussian(), rng.complex_gaussian();
            s.branches.push_back({i, rng.complex_gaussian(), v.normalized()});
        }
        s = normalized(std::move(s));
        const ComplexMatrix rho1 = reduced_rho1(s);
        const FisherMatrix direct = qfi_state(s, chart, RealVector::Zero(3));
        if (n == 1) {
            const FisherMatrix viam = qfi_from_moments(rho1, nullptr, 1, chart.basis.t);
            CHECK((direct - viam).norm() < 1e-10);
        } else {
            const ComplexMatrix rho2 = reduced_rho2(s);
            const FisherMatrix viam = qfi_from_moments(rho1, &rho2, n, chart.basis.t);
            CHECK((direct - viam).norm() < 1e-10);
        }
    }
}

TEST_CASE("attainability defect separates designs from skewed probes") {
    const Chart chart = chart_at_identity(2);
    const RealVector origin = RealVector::Zero(3);
    CHECK(attainability_defect(from_design(mub_vectors(2), 2), chart, origin) < 1e-12);
    CHECK(attainability_defect(from_design(sic_vectors(2), 3), chart, origin) < 1e-12);

    // Sampled-basis inputs keep rho1 = 1/d, so the defect vanishes too.
    Rng rng(17);
    const StructuredState approx = from_approx_design(sample_approx_design(2, 5, rng), 2);
    CHECK(attainability_defect(approx, chart, origin) < 1e-12);

    ComplexVector tau(2);
    tau << 1.0, 0.0;
    CHECK(attainability_defect(product_baseline(tau, 2), chart, origin) > 0.1);
}

TEST_CASE("basis-flag QFI profile") {
    const GeneratorBasis basis = gell_mann_basis(2);
    const FisherMatrix h = basis_qfi_profile(ComplexMatrix::Identity(2, 2), 2, basis);
    RealMatrix expected = RealMatrix::Zero(3, 3);
    expected.diagonal() << 4.0, 4.0, 8.0;
    CHECK((h - expected).norm() < 1e-12);

    // Profile of a rotated basis is the rotation of the profile.
    Rng rng(43);
    const ComplexMatrix u = haar_unitary(2, rng);
    const FisherMatrix hu = basis_qfi_profile(u, 2, basis);
    CHECK(std::abs(hu.trace() - expected.trace()) < 1e-10);
    CHECK(hu.eigenvalues().real().minCoeff() > 3.9);
}

TEST_CASE("sampled-basis QFI equals the mean of the basis profiles") {
    Rng rng(71);
    for (Index d : {Index(2), Index(3)}) {
        const Chart chart = chart_at_identity(d);
        const RealVector origin = RealVector::Zero(chart.dim());
        const std::vector<Basis> bases = sample_approx_design(d, 3, rng);
        for (int n : {1, 2, 3}) {
            FisherMatrix profile_mean = FisherMatrix::Zero(chart.dim(), chart.dim());
            for (const Basis& bset : bases)
                profile_mean += basis_qfi_profile(basis_matrix(bset), n, chart.basis);
            profile_mean /= static_cast<double>(bases.size());
            const FisherMatrix engine = qfi_state(from_approx_design(bases, n), chart, origin);
            CHECK((engine - profile_mean).norm() < 1e-10);
        }
    }
}

TEST_CASE("locc conditional QFIs are k-independent and average to optimal") {
    const std::vector<Basis> mubs = mub_bases(2);
    const GeneratorBasis basis = gell_mann_basis(2);
    for (int n : {1, 2, 3}) {
        FisherMatrix avg = FisherMatrix::Zero(3, 3);
        for (Index b = 0; b < 3; ++b) {
            const FisherMatrix first = locc_conditional_qfi(mubs, b, 0, n, basis);
            for (Index k = 0; k < 2; ++k) {
                const FisherMatrix hk = locc_conditional_qfi(mubs, b, k, n, basis);
                CHECK((hk - first).norm() < 1e-10);
                avg += hk;
            }
        }
        avg /= 6.0;
        CHECK((avg - optimal_qfi(2, n)).norm() < 1e-10);
    }
}

TEST_CASE("inverse traces on singular information matrices") {
    RealMatrix f = RealMatrix::Zero(3, 3);
    f.diagonal() << 2.0, 0.0, 8.0;
    CHECK(std::isinf(trace_inverse(f)));
    CHECK(trace_pseudo_inverse(f) == doctest::Approx(0.625).epsilon(1e-14));
    CHECK(support_rank(f) == 2);

    RealMatrix g = RealMatrix::Identity(3, 3) * 4.0;
    CHECK(trace_inverse(g) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(support_rank(g) == 3);
}

TEST_CASE("product probes scale as 1/n on their support") {
    const Chart chart = chart_at_identity(2);
    ComplexVector tau(2);
    tau << 1.0, 0.0;
    for (int n : {1, 2, 4, 8}) {
        const FisherMatrix h = qfi_state(product_baseline(tau, n), chart, RealVector::Zero(3));
        CHECK(std::isinf(trace_inverse(h)));
        CHECK(n * trace_pseudo_inverse(h) == doctest::Approx(1.0).epsilon(1e-10));
    }
}
