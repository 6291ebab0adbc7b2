#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sudest/designs.hpp"
#include "sudest/states.hpp"

#include <cmath>

using namespace sudest;

namespace {

StructuredState random_state(Index d, int n, int branches, Rng& rng) {
    StructuredState s;
    s.d = d;
    s.n = n;
    for (int i = 0; i < branches; ++i) {
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

// Full-space insertion operator sum_pos 1 (x) u..(a u)..u acting on the
// branch expansion; the engine's insertion slots sit between bra and ket
// evolution, so a is conjugated into the pre-u slot.
ComplexVector dense_engine_insertion(const StructuredState& s, const ComplexMatrix& u,
                                     const ComplexMatrix& a) {
    return dense_insertion(s, u, u.adjoint() * a * u);
}

}  // namespace

TEST_CASE("design states are normalized with equal branch weights") {
    const StructuredState s = from_design(mub_vectors(2), 3);
    CHECK(s.branches.size() == 6);
    CHECK(norm_defect(s) < 1e-12);
    const StructuredState p = product_baseline(sic_vectors(2).vectors[0], 4);
    CHECK(norm_defect(p) < 1e-12);
}

TEST_CASE("validation rejects malformed states") {
    StructuredState s;
    s.d = 2;
    s.n = 1;
    CHECK_THROWS_AS(validate_state(s), ValidationError);
    ComplexVector v(3);
    v << 1.0, 0.0, 0.0;
    s.branches.push_back({0, Complex(1.0), v});
    CHECK_THROWS_AS(validate_state(s), ValidationError);
    ComplexVector tau(2);
    tau << 2.0, 0.0;
    CHECK_THROWS_AS(product_baseline(tau, 1), ValidationError);
}

TEST_CASE("overlap engine agrees with dense materialization") {
    Rng rng(71);
    for (Index d : {Index(2), Index(3)}) {
        for (int n = 1; n <= 3; ++n) {
            const StructuredState s = random_state(d, n, 4, rng);
            const ComplexMatrix u = haar_unitary(d, rng);
            const ComplexMatrix v = haar_unitary(d, rng);
            ComplexMatrix a(d, d), b(d, d);
            for (Index i = 0; i < d; ++i)
                for (Index j = 0; j < d; ++j) {
                    a(i, j) = rng.complex_gaussian();
                    b(i, j) = rng.complex_gaussian();
                }

            const ComplexVector bra = dense_state(s, v);
            const ComplexVector ket = dense_state(s, u);
            CHECK(std::abs(overlap(s, u, v, {}) - bra.dot(ket)) < 1e-12);

            const Complex one = overlap(s, u, v, {a});
            CHECK(std::abs(one - bra.dot(dense_engine_insertion(s, u, a))) < 1e-11);

            // Two insertions: positions p <= q with a at p, b at q plus the
            // mirrored assignment, which is what nested single insertions of
            // a then b over all ordered pairs produce.
            const Complex two = overlap(s, u, v, {a, b});
            Index copies_dim = 1;
            for (int i = 0; i < n; ++i) copies_dim *= d;
            const Index da = s.ancilla_dim();
            ComplexVector dense_two = ComplexVector::Zero(da * copies_dim);
            for (const Branch& br : s.branches) {
                const ComplexVector w = u * br.vec;
                for (int p = 0; p < n; ++p)
                    for (int q = 0; q < n; ++q) {
                        ComplexVector tensor = ComplexVector::Ones(1);
                        for (int i = 0; i < n; ++i) {
                            ComplexVector factor = w;
                            if (i == p && i == q)
                                factor = a * (b * w);
                            else if (i == p)
                                factor = a * w;
                            else if (i == q)
                                factor = b * w;
                            tensor = kron(tensor, factor);
                        }
                        dense_two.segment(br.label * copies_dim, copies_dim) += br.coeff * tensor;
                    }
            }
            CHECK(std::abs(two - bra.dot(dense_two)) < 1e-10);
        }
    }
}

TEST_CASE("ancilla operator weights cross-label pairs") {
    Rng rng(5);
    const StructuredState s = from_design(mub_vectors(2), 2);
    const ComplexMatrix eye = ComplexMatrix::Identity(2, 2);
    const Index da = s.ancilla_dim();
    ComplexMatrix anc(da, da);
    for (Index i = 0; i < da; ++i)
        for (Index j = 0; j < da; ++j) anc(i, j) = rng.complex_gaussian();

    const ComplexVector psi = dense_state(s, eye);
    Index copies_dim = 1;
    for (int i = 0; i < s.n; ++i) copies_dim *= s.d;
    const ComplexMatrix full = kron(anc, ComplexMatrix::Identity(copies_dim, copies_dim));
    const Complex expected = psi.dot(full * psi);
    CHECK(std::abs(overlap(s, eye, eye, {}, &anc) - expected) < 1e-12);
}

TEST_CASE("reduced moments match dense partial traces") {
    Rng rng(13);
    for (int n : {1, 2, 3}) {
        const StructuredState s = random_state(2, n, 3, rng);
        const ComplexVector psi = dense_state(s, ComplexMatrix::Identity(2, 2));
        const ComplexMatrix rho = psi * psi.adjoint();
        std::vector<Index> dims{s.ancilla_dim()};
        for (int i = 0; i < n; ++i) dims.push_back(2);

        CHECK((reduced_rho1(s) - partial_trace(rho, dims, {1})).norm() < 1e-12);
        if (n == 1) {
            CHECK_THROWS_AS(reduced_rho2(s), ValidationError);
        } else {
            CHECK((reduced_rho2(s) - partial_trace(rho, dims, {1, 2})).norm() < 1e-12);
        }
    }
}

TEST_CASE("design moments hit the symmetric subspace average") {
    for (Index d : {Index(2), Index(3)}) {
        const StructuredState mub = from_design(mub_vectors(d), 2);
        const ComplexMatrix target =
            2.0 / static_cast<double>(d * (d + 1)) * symmetric_projector(d);
        CHECK(hs_distance(reduced_rho2(mub), target) < 1e-12);
        CHECK((reduced_rho1(mub) -
               ComplexMatrix::Identity(d, d) / static_cast<double>(d)).norm() < 1e-12);
    }
}

TEST_CASE("sampled-basis states pin the single-copy moment at 1/d") {
    Rng rng(93);
    for (Index d : {Index(2), Index(3)}) {
        const std::vector<Basis> bases = sample_approx_design(d, 4, rng);
        const StructuredState s = from_approx_design(bases, 2);
        CHECK(s.branches.size() == static_cast<std::size_t>(4 * d));
        CHECK(norm_defect(s) < 1e-12);
        CHECK((reduced_rho1(s) -
               ComplexMatrix::Identity(d, d) / static_cast<double>(d)).norm() < 1e-12);
    }

    // Non-orthonormal columns must be rejected: they would silently break
    // the 1/d moment above.
    Basis skewed;
    skewed.push_back((ComplexVector(2) << 1.0, 0.0).finished());
    skewed.push_back((ComplexVector(2) << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)).finished());
    CHECK_THROWS_AS(from_approx_design({skewed}, 2), ValidationError);
    CHECK_THROWS_AS(from_approx_design({}, 2), ValidationError);
}

TEST_CASE("bob conditional states are normalized across outcomes") {
    const std::vector<Basis> mubs = mub_bases(2);
    for (Index b = 0; b < 3; ++b)
        for (Index k = 0; k < 2; ++k) {
            const StructuredState s = bob_conditional(mubs, b, k, 2);
            CHECK(norm_defect(s) < 1e-12);
        }
    CHECK_THROWS_AS(bob_conditional(mubs, 3, 0, 2), ValidationError);
    CHECK_THROWS_AS(bob_conditional(mubs, 0, 2, 2), ValidationError);
}

TEST_CASE("injectivity margin vanishes exactly on the phase orbit") {
    const StructuredState s = from_design(mub_vectors(2), 2);
    const ComplexMatrix eye = ComplexMatrix::Identity(2, 2);
    CHECK(injectivity_margin(s, eye) < 1e-14);
    const ComplexMatrix phase = std::exp(Complex(0.0, 1.234)) * eye;
    CHECK(injectivity_margin(s, phase) < 1e-14);

    // Closed form for u = exp(-i 0.3 t_z) on the full mub set at n = 2:
    // margin = 1 - (4 cos^2(0.3/sqrt 2) - 1)/3.
    ComplexMatrix u = ComplexMatrix::Zero(2, 2);
    const double phi = 0.3 / std::sqrt(2.0);
    u(0, 0) = std::exp(Complex(0.0, -phi));
    u(1, 1) = std::exp(Complex(0.0, phi));
    const double expected = 1.0 - (4.0 * std::cos(phi) * std::cos(phi) - 1.0) / 3.0;
    CHECK(injectivity_margin(s, u) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("dense regime limit is enforced") {
    const StructuredState s = from_design(mub_vectors(2), 12);
    CHECK(dense_dim(s) == 6 * 4096);
    CHECK_THROWS_AS(dense_state(s, ComplexMatrix::Identity(2, 2)), ValidationError);
    CHECK_THROWS_AS(dense_state(s, ComplexMatrix::Identity(2, 2), 4096), ValidationError);
    // The engine itself has no such limit.
    CHECK(std::abs(overlap(s, ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(2, 2), {}) -
                   Complex(1.0)) < 1e-12);
}

TEST_CASE("json round trip preserves the state") {
    Rng rng(3);
    const StructuredState s = random_state(3, 2, 4, rng);
    const StructuredState back = state_from_json(state_to_json(s));
    const ComplexMatrix u = haar_unitary(3, rng);
    const ComplexMatrix eye = ComplexMatrix::Identity(3, 3);
    CHECK(std::abs(overlap(s, u, eye, {}) - overlap(back, u, eye, {})) < 1e-12);

    nlohmann::json j = state_to_json(s);
    j["branches"][0]["coeff"][0] = 5.0;
    CHECK_THROWS_AS(state_from_json(j), ValidationError);
}
