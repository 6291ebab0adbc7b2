#pragma once

#include "sudest/numkernel.hpp"

namespace sudest {

/// Orthonormal traceless Hermitian generators of su(d), tr(t_a t_b) = delta_ab.
/// Ordering: for each pair j < k in lexicographic order the symmetric then the
/// antisymmetric off-diagonal generator, followed by the d-1 diagonal ones.
/// At d = 2 this is (sigma_x, sigma_y, sigma_z)/sqrt(2).
struct GeneratorBasis {
    Index d = 0;
    std::vector<ComplexMatrix> t;

    Index dim() const { return static_cast<Index>(t.size()); }
};

GeneratorBasis gell_mann_basis(Index d);

/// Local exponential coordinates theta -> U0 exp(-i sum_a theta_a t_a).
struct Chart {
    GeneratorBasis basis;
    ComplexMatrix reference;

    Index d() const { return basis.d; }
    Index dim() const { return basis.dim(); }
};

Chart chart_at_identity(Index d);
Chart chart_at(const ComplexMatrix& reference);

ComplexMatrix unitary_at(const Chart& chart, const RealVector& theta);

/// Pushed-forward generator frame t_a(theta) = i U(theta)^dag dU/dtheta_a,
/// Hermitian and traceless; equals the basis exactly at theta = 0.
std::vector<ComplexMatrix> tangent_at(const Chart& chart, const RealVector& theta);

/// Largest coordinate ball on which the chart is injective.
double chart_radius();

}  // namespace sudest
