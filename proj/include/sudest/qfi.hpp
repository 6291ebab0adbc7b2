#pragma once

#include "sudest/states.hpp"
#include "sudest/sud.hpp"

namespace sudest {

/// Symmetric positive semidefinite information matrix over chart coordinates.
using FisherMatrix = RealMatrix;

/// SLD overlap matrix L_ab = <psi|lambda_a lambda_b|psi> at theta. Its real
/// part is the QFI; its imaginary part measures how far the multiparameter
/// quantum bound is from attainable.
ComplexMatrix sld_gram(const StructuredState& s, const Chart& chart, const RealVector& theta);

/// QFI of the pure output family (1_A (x) U(theta)^(x n)) |s>.
FisherMatrix qfi_state(const StructuredState& s, const Chart& chart, const RealVector& theta);

/// QFI from the single- and two-copy input moments; rho2 may be null when
/// n = 1. `frame` is the tangent frame at the evaluation point.
FisherMatrix qfi_from_moments(const ComplexMatrix& rho1, const ComplexMatrix* rho2, int n,
                              const std::vector<ComplexMatrix>& frame);

/// max_ab |Im tr(rho1_out [t_a, t_b])| / 2; zero iff one projective
/// measurement can saturate all coordinates at once.
double attainability_defect(const StructuredState& s, const Chart& chart, const RealVector& theta);

/// 4n(n+d) / (d(d+1)) * identity, the design-input optimum.
FisherMatrix optimal_qfi(Index d, int n);

/// d(d+1)^2(d-1) / (4n(n+d)), the minimal trace of the inverse QFI.
double optimal_tr_inverse_bound(Index d, int n);

/// (4n/d) [delta_ab + (n-1) sum_k <k|t_a'|k><k|t_b'|k>] with t' = u^dag t u,
/// the QFI profile of the basis-flag input built on the columns of u.
FisherMatrix basis_qfi_profile(const ComplexMatrix& u, int n, const GeneratorBasis& basis);

/// Per-outcome QFI of Bob's conditional state for Alice outcome (b, k); the
/// value is the profile of basis b, so it is k-independent. Over MUB outcomes
/// it averages to optimal_qfi; over sampled bases, to the input's own QFI.
FisherMatrix locc_conditional_qfi(const std::vector<Basis>& bases, Index b, Index k, int n,
                                  const GeneratorBasis& basis);

/// Trace of the inverse; +infinity when the matrix is singular at rel_tol.
double trace_inverse(const FisherMatrix& f, double rel_tol = 1e-10);

/// Trace of the Moore-Penrose inverse restricted to the identifiable support.
double trace_pseudo_inverse(const FisherMatrix& f, double rel_tol = 1e-10);

Index support_rank(const FisherMatrix& f, double rel_tol = 1e-10);

}  // namespace sudest
