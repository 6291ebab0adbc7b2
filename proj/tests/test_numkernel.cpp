#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sudest/numkernel.hpp"

#include <cmath>
#include <set>

using namespace sudest;

TEST_CASE("rng streams are deterministic and distinct") {
    Rng a(42), b(42), c(43);
    for (int i = 0; i < 16; ++i) CHECK(a.next_u64() == b.next_u64());
    bool any_diff = false;
    Rng a2(42);
    for (int i = 0; i < 16; ++i) any_diff = any_diff || a2.next_u64() != c.next_u64();
    CHECK(any_diff);

    Rng base(7);
    Rng s0 = base.derive(0);
    Rng s1 = base.derive(1);
    CHECK(base.derive(0).next_u64() == s0.next_u64());
    CHECK(s0.next_u64() != s1.next_u64());
}

TEST_CASE("uniform and gaussian samples have the right first moments") {
    Rng rng(2024);
    const int count = 20000;
    double usum = 0.0, gsum = 0.0, gsq = 0.0;
    for (int i = 0; i < count; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        usum += u;
        const double g = rng.gaussian();
        gsum += g;
        gsq += g * g;
    }
    CHECK(std::abs(usum / count - 0.5) < 0.02);
    CHECK(std::abs(gsum / count) < 0.05);
    CHECK(std::abs(gsq / count - 1.0) < 0.05);
}

TEST_CASE("hermitian_eig reconstructs and rejects") {
    Rng rng(5);
    ComplexMatrix a(3, 3);
    for (Index i = 0; i < 3; ++i)
        for (Index j = 0; j < 3; ++j) a(i, j) = rng.complex_gaussian();
    a = (a + a.adjoint()).eval();
    const HermitianEigen eig = hermitian_eig(a);
    const ComplexMatrix rebuilt =
        eig.vectors * eig.values.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
    CHECK((rebuilt - a).norm() < 1e-12);
    for (Index i = 1; i < eig.values.size(); ++i) CHECK(eig.values[i - 1] <= eig.values[i]);

    ComplexMatrix bad = a;
    bad(0, 1) += Complex(0.0, 1.0);
    CHECK_THROWS_AS(hermitian_eig(bad), ValidationError);
}

TEST_CASE("unitary_exp is exp(-iX)") {
    ComplexMatrix x(2, 2);
    x << 0.01, Complex(0.002, -0.004), Complex(0.002, 0.004), -0.03;
    const ComplexMatrix u = unitary_exp(x);
    const ComplexMatrix series = ComplexMatrix::Identity(2, 2) - Complex(0.0, 1.0) * x -
                                 0.5 * x * x + Complex(0.0, 1.0 / 6.0) * x * x * x +
                                 (1.0 / 24.0) * x * x * x * x;
    CHECK((u - series).norm() < 1e-8);
    CHECK((u.adjoint() * u - ComplexMatrix::Identity(2, 2)).norm() < 1e-13);
}

TEST_CASE("inv_sqrt_spd inverts the square") {
    RealMatrix m(2, 2);
    m << 4.0, 1.0, 1.0, 3.0;
    const RealMatrix w = inv_sqrt_spd(m);
    CHECK((w * m * w - RealMatrix::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("haar_unitary is unitary and seed-stable") {
    Rng rng(11);
    const ComplexMatrix u = haar_unitary(4, rng);
    CHECK((u.adjoint() * u - ComplexMatrix::Identity(4, 4)).norm() < 1e-12);
    Rng rng2(11);
    CHECK((haar_unitary(4, rng2) - u).norm() == 0.0);
}

TEST_CASE("kron dimensions and a known product") {
    ComplexMatrix a(2, 2), b(2, 2);
    a << 1.0, 2.0, 3.0, 4.0;
    b << 0.0, 1.0, 1.0, 0.0;
    const ComplexMatrix k = kron(a, b);
    CHECK(k.rows() == 4);
    CHECK(k(0, 1) == Complex(1.0));
    CHECK(k(0, 0) == Complex(0.0));
    CHECK(k(2, 1) == Complex(3.0));

    ComplexVector x(2), y(2);
    x << 1.0, 2.0;
    y << 3.0, 4.0;
    const ComplexVector kv = kron(x, y);
    CHECK(kv.size() == 4);
    CHECK(kv[1] == Complex(4.0));
    CHECK(kv[2] == Complex(6.0));
}

TEST_CASE("partial_trace recovers tensor factors") {
    Rng rng(3);
    ComplexMatrix ra(2, 2), rb(3, 3);
    for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 2; ++j) ra(i, j) = rng.complex_gaussian();
    for (Index i = 0; i < 3; ++i)
        for (Index j = 0; j < 3; ++j) rb(i, j) = rng.complex_gaussian();
    ra = (ra * ra.adjoint()).eval();
    rb = (rb * rb.adjoint()).eval();
    ra /= ra.trace();
    rb /= rb.trace();

    const ComplexMatrix joint = kron(ra, rb);
    CHECK((partial_trace(joint, {2, 3}, {0}) - ra).norm() < 1e-12);
    CHECK((partial_trace(joint, {2, 3}, {1}) - rb).norm() < 1e-12);
    CHECK((partial_trace(joint, {2, 3}, {0, 1}) - joint).norm() < 1e-12);
}

TEST_CASE("swap and symmetric projector") {
    const Index d = 3;
    const ComplexMatrix s = swap_operator(d);
    Rng rng(9);
    ComplexVector x(d), y(d);
    for (Index i = 0; i < d; ++i) {
        x[i] = rng.complex_gaussian();
        y[i] = rng.complex_gaussian();
    }
    CHECK((s * kron(x, y) - kron(y, x)).norm() < 1e-12);

    const ComplexMatrix p = symmetric_projector(d);
    CHECK((p - 0.5 * (ComplexMatrix::Identity(d * d, d * d) + s)).norm() < 1e-12);
    CHECK((p * p - p).norm() < 1e-12);
    CHECK(std::abs(p.trace().real() - d * (d + 1) / 2.0) < 1e-12);
}

TEST_CASE("ipow integer powers") {
    CHECK(ipow(Complex(0.0), 0) == Complex(1.0));
    CHECK(ipow(Complex(2.0, 1.0), 1) == Complex(2.0, 1.0));
    const Complex g(0.3, -0.8);
    CHECK(std::abs(ipow(g, 7) - std::pow(g, 7)) < 1e-12);
}

TEST_CASE("hermiticity_defect flags asymmetry") {
    ComplexMatrix h(2, 2);
    h << 1.0, Complex(0.0, 1.0), Complex(0.0, -1.0), 2.0;
    CHECK(hermiticity_defect(h) < 1e-15);
    h(0, 1) = Complex(0.0, 1.5);
    CHECK(hermiticity_defect(h) > 0.1);
}
