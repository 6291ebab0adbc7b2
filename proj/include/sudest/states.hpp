#pragma once

#include "sudest/designs.hpp"
#include "sudest/numkernel.hpp"

#include <json.hpp>

#include <optional>

namespace sudest {

/// One branch of a structured input: coeff * |label>_A (x) |vec>^(x n).
struct Branch {
    Index label = 0;
    Complex coeff = 0.0;
    ComplexVector vec;
};

/// Input state |Omega> = sum_i c_i |a_i> (x) |v_i>^(x n) on ancilla (x) n
/// probe copies. All per-copy operations stay polynomial in n by working on
/// branch pairs instead of the d^n-dimensional tensor space.
struct StructuredState {
    Index d = 0;
    int n = 0;
    std::vector<Branch> branches;

    Index ancilla_dim() const;
};

void validate_state(const StructuredState& s);

/// <s| (1_A (x) V^(x n))^dag Ins (1_A (x) U^(x n)) |s>, where Ins distributes
/// the insertion operators over the n copies: {} is the identity, {A} is
/// sum_s A_s, {A, B} is sum_s (A B)_s + sum_{s != r} A_s B_r. An optional
/// ancilla operator replaces the implicit identity on the ancilla factor.
Complex overlap(const StructuredState& s, const ComplexMatrix& u, const ComplexMatrix& v,
                const std::vector<ComplexMatrix>& insertions,
                const ComplexMatrix* ancilla_op = nullptr);

/// |<s|s> - 1|.
double norm_defect(const StructuredState& s);

StructuredState normalized(StructuredState s);

/// Equal-weight superposition over a vector set, one ancilla flag per vector.
StructuredState from_design(const VectorSet& set, int n);

/// (1/sqrt(md)) sum_{b,k} |bk>_A (x) |phi^b_k>^(x n) over m orthonormal
/// bases, one branch per (basis, column) pair. Rejects non-orthonormal bases.
StructuredState from_approx_design(const std::vector<Basis>& bases, int n);

/// (1/sqrt(d)) sum_k |k>_A (x) |u e_k>^(x n) for a basis given by the columns
/// of u.
StructuredState from_basis(const ComplexMatrix& u, int n);

/// Ancilla-free product probe |tau>^(x n).
StructuredState product_baseline(const ComplexVector& tau, int n);

/// Bob's post-selection state in the one-way LOCC protocol, outcome (b, k):
/// (1/sqrt(d)) sum_l w^(-kl) |phi^b_l>^(x n).
StructuredState bob_conditional(const std::vector<Basis>& mubs, Index b, Index k, int n);

/// Single-copy reduced density matrix of the input.
ComplexMatrix reduced_rho1(const StructuredState& s);

/// Two-copy reduced density matrix; requires n >= 2.
ComplexMatrix reduced_rho2(const StructuredState& s);

/// 1 - |<s|(1_A (x) U^(x n))|s>|, the visibility of U on this input.
double injectivity_margin(const StructuredState& s, const ComplexMatrix& u);

inline constexpr Index kDefaultDenseLimit = 4096;

Index dense_dim(const StructuredState& s);

/// (1_A (x) U^(x n)) |s> materialized on C^(dA * d^n). Guarded by the dense
/// regime limit; pass a larger limit explicitly to exceed it.
ComplexVector dense_state(const StructuredState& s, const ComplexMatrix& u,
                          Index dense_limit = kDefaultDenseLimit);

/// (1_A (x) U^(x n)) sum_s A_s |s> with A acting on copy s.
ComplexVector dense_insertion(const StructuredState& s, const ComplexMatrix& u,
                              const ComplexMatrix& a, Index dense_limit = kDefaultDenseLimit);

nlohmann::json state_to_json(const StructuredState& s);
StructuredState state_from_json(const nlohmann::json& j);

}  // namespace sudest
