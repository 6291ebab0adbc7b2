#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sudest/sud.hpp"

#include <cmath>

using namespace sudest;

TEST_CASE("generator basis is orthonormal, Hermitian, traceless") {
    for (Index d : {Index(2), Index(3), Index(4)}) {
        const GeneratorBasis basis = gell_mann_basis(d);
        CHECK(basis.dim() == d * d - 1);
        for (std::size_t a = 0; a < basis.t.size(); ++a) {
            CHECK(hermiticity_defect(basis.t[a]) < 1e-14);
            CHECK(std::abs(basis.t[a].trace()) < 1e-14);
            for (std::size_t b = 0; b < basis.t.size(); ++b) {
                const double expected = a == b ? 1.0 : 0.0;
                CHECK(std::abs((basis.t[a] * basis.t[b]).trace().real() - expected) < 1e-13);
                CHECK(std::abs((basis.t[a] * basis.t[b]).trace().imag()) < 1e-13);
            }
        }
    }
    CHECK_THROWS_AS(gell_mann_basis(1), ValidationError);
}

TEST_CASE("unitary_at matches the closed form for a diagonal generator") {
    const Chart chart = chart_at_identity(2);
    RealVector theta = RealVector::Zero(3);
    theta[2] = 0.3;  // the diagonal generator diag(1,-1)/sqrt(2)
    const ComplexMatrix u = unitary_at(chart, theta);
    const double phi = 0.3 / std::sqrt(2.0);
    CHECK(std::abs(u(0, 0) - std::exp(Complex(0.0, -phi))) < 1e-14);
    CHECK(std::abs(u(1, 1) - std::exp(Complex(0.0, phi))) < 1e-14);
    CHECK(std::abs(u(0, 1)) < 1e-14);
}

TEST_CASE("unitary_at is unitary and anchored at the reference") {
    Rng rng(17);
    const ComplexMatrix r = haar_unitary(3, rng);
    const Chart chart = chart_at(r);
    CHECK((unitary_at(chart, RealVector::Zero(8)) - r).norm() < 1e-14);

    RealVector theta(8);
    for (Index a = 0; a < 8; ++a) theta[a] = 0.4 * (rng.uniform() - 0.5);
    const ComplexMatrix u = unitary_at(chart, theta);
    CHECK((u.adjoint() * u - ComplexMatrix::Identity(3, 3)).norm() < 1e-12);
}

TEST_CASE("chart_at rejects non-unitary references") {
    ComplexMatrix bad = ComplexMatrix::Identity(2, 2);
    bad(0, 0) = 1.5;
    CHECK_THROWS_AS(chart_at(bad), ValidationError);
}

TEST_CASE("tangent frame at the origin is the generator basis") {
    const Chart chart = chart_at_identity(3);
    const std::vector<ComplexMatrix> frame = tangent_at(chart, RealVector::Zero(8));
    REQUIRE(frame.size() == 8);
    for (std::size_t a = 0; a < 8; ++a)
        CHECK((frame[a] - chart.basis.t[a]).norm() == 0.0);
}

TEST_CASE("tangent frame matches finite differences of the chart") {
    // Convention under test: dU/dtheta_a = -i U(theta) ttilde_a(theta).
    Rng rng(23);
    for (Index d : {Index(2), Index(3)}) {
        const Chart chart = chart_at_identity(d);
        RealVector theta(chart.dim());
        for (Index a = 0; a < chart.dim(); ++a) theta[a] = 0.5 * (rng.uniform() - 0.5);
        const ComplexMatrix u = unitary_at(chart, theta);
        const std::vector<ComplexMatrix> frame = tangent_at(chart, theta);
        const double h = 1e-5;
        for (Index a = 0; a < chart.dim(); ++a) {
            RealVector up = theta, down = theta;
            up[a] += h;
            down[a] -= h;
            const ComplexMatrix du = (unitary_at(chart, up) - unitary_at(chart, down)) / (2.0 * h);
            const ComplexMatrix predicted = Complex(0.0, -1.0) * u * frame[static_cast<std::size_t>(a)];
            CHECK((du - predicted).norm() < 1e-8);
            CHECK(hermiticity_defect(frame[static_cast<std::size_t>(a)]) < 1e-12);
            CHECK(std::abs(frame[static_cast<std::size_t>(a)].trace()) < 1e-12);
        }
    }
}

TEST_CASE("chart radius is pi/2") { CHECK(chart_radius() == doctest::Approx(1.5707963267948966)); }
