#pragma once

#include "sudest/numkernel.hpp"

#include <cstdint>

namespace sudest {

using Basis = std::vector<ComplexVector>;

/// Finite set of unit vectors in C^d, candidate spherical 2-design.
struct VectorSet {
    Index d = 0;
    std::vector<ComplexVector> vectors;

    Index size() const { return static_cast<Index>(vectors.size()); }
};

bool is_prime(Index d);

/// d+1 mutually unbiased bases of C^d for prime d. d = 2 uses the Z/X/Y
/// eigenbases; odd primes use the quadratic-phase construction
/// (1/sqrt(d)) w^(m l^2 + k l), which degenerates at d = 2.
std::vector<Basis> mub_bases(Index d);

/// All d(d+1) MUB vectors as one set.
VectorSet mub_vectors(Index d);

/// d^2 equiangular vectors with |<x_i|x_j>|^2 = 1/(d+1). Exact fiducials are
/// implemented for d = 2 (tetrahedron) and d = 3 (Weyl-Heisenberg orbit of
/// (0, 1, -1)/sqrt(2)).
VectorSet sic_vectors(Index d);

struct DesignCertificate {
    double hs_distance = 0.0;
    double tolerance = 0.0;
    bool is_design = false;
};

/// Compares the two-copy frame operator (1/m) sum |v><v|^(x2) against
/// 2 P_sym / (d(d+1)) in Hilbert-Schmidt norm. Rejects non-unit vectors.
DesignCertificate certify_2design(const VectorSet& set, double tolerance = 1e-10);

/// Number of Haar samples sufficient for the empirical two-copy average to
/// sit within relative spectral error eps of the design value with
/// probability at least q.
std::int64_t chernoff_sample_size(Index d, double eps, double q);

/// Columns of an orthonormal basis packed into a d x d matrix.
ComplexMatrix basis_matrix(const Basis& basis);

/// m i.i.d. Haar-random orthonormal bases. Keeping every column of every
/// draw pins the single-copy average at 1/d exactly; only the two-copy
/// average fluctuates around the design value, shrinking as 1/m.
std::vector<Basis> sample_approx_design(Index d, std::int64_t m, Rng& rng);

}  // namespace sudest
