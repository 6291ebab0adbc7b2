#pragma once

#include "sudest/qfi.hpp"

#include <variant>

namespace sudest {

/// Rank-one projective measurement materialized on the full ancilla (x)
/// copies space. Kept for the dense regime only.
struct DensePovm {
    StructuredState state;
    Chart chart;
    std::vector<ComplexVector> effect_vectors;
    Index dense_limit = kDefaultDenseLimit;
};

/// Measurement spanned by the SLD directions at theta0 plus the state itself:
/// effect xi < rows(mix) is |m_xi><m_xi| with
///   |m_xi> = sum_{a<r} mix(xi,a) [sum_c weight(a,c) lambda_c|psi0>] + mix(xi,r) |psi0>,
/// and the last outcome is the completion 1 - sum_xi |m_xi><m_xi|. All
/// probabilities and derivatives are evaluated through the branch-pair
/// overlap engine, so cost stays polynomial in n.
struct FunctionalPovm {
    StructuredState state;
    Chart chart;
    RealVector theta0;
    ComplexMatrix reference;            // U(theta0)
    std::vector<ComplexMatrix> frame0;  // tangent frame at theta0
    RealVector m0;                      // per-copy first moments at theta0
    RealMatrix weight;                  // r x (d^2 - 1)
    RealMatrix mix;                     // (r + 1) x (r + 1), orthogonal
};

using Povm = std::variant<DensePovm, FunctionalPovm>;

struct OptimalPovmOptions {
    /// Accept rank-deficient QFI and build the measurement on its support.
    bool allow_singular = false;
    double support_rel_tol = 1e-10;
    /// Maximum tolerated attainability defect at theta0.
    double defect_tol = 1e-6;
};

/// Saturating measurement at theta0: the QFI-whitened SLD vectors plus the
/// state, mixed by an orthogonal matrix so that every outcome carries weight
/// 1/(r+1) at the true point. Its Fisher information equals the QFI.
Povm optimal_povm(const StructuredState& s, const Chart& chart, const RealVector& theta0,
                  const OptimalPovmOptions& options = {});

/// Number of outcomes including the completion outcome where present.
Index outcome_count(const Povm& povm);

struct OutcomeDistribution {
    RealVector p;
    double clip = 0.0;  // magnitude of negative rounding clipped to zero
};

OutcomeDistribution outcome_probabilities(const Povm& povm, const RealVector& theta);

struct ProbabilityJacobian {
    RealVector p;
    RealMatrix jacobian;  // outcomes x parameters
    double clip = 0.0;
};

ProbabilityJacobian probabilities_and_jacobian(const Povm& povm, const RealVector& theta);

/// Classical Fisher information of the outcome distribution at theta.
/// Outcomes with probability below floor are excluded.
FisherMatrix fisher_information(const Povm& povm, const RealVector& theta,
                                double floor = 1e-12);

/// Projective measurement along the columns of `basis` on the full space.
DensePovm basis_povm(const StructuredState& s, const Chart& chart, const ComplexMatrix& basis,
                     Index dense_limit = kDefaultDenseLimit);

/// Unitary acting as i on the SLD span at theta and as identity on its
/// orthocomplement; measuring basis B and Y B together reconstructs the QFI.
ComplexMatrix y_pairing(const StructuredState& s, const Chart& chart, const RealVector& theta,
                        Index dense_limit = kDefaultDenseLimit);

struct RandomFiEstimate {
    FisherMatrix mean;
    RealMatrix sem;  // per-entry standard error of the mean
    int draws = 0;
};

/// Monte Carlo average of the Fisher information of Haar-random projective
/// measurements on the full space.
RandomFiEstimate average_random_fi(const StructuredState& s, const Chart& chart,
                                   const RealVector& theta, int draws, Rng& rng,
                                   Index dense_limit = kDefaultDenseLimit);

struct LoccBranch {
    Index b = 0;
    Index k = 0;
    double alice_prob = 0.0;
    StructuredState state;
    Povm povm;
};

/// One-way LOCC protocol on the MUB input: Alice's Fourier-type measurement
/// yields uniform outcomes (b, k); Bob measures the saturating POVM of his
/// conditional state. The per-outcome Fisher informations average to the
/// optimal QFI for n >= 2.
struct LoccPlan {
    std::vector<LoccBranch> branches;
    FisherMatrix averaged_fi;
    FisherMatrix averaged_conditional_qfi;
};

LoccPlan locc_plan(const Chart& chart, int n, const RealVector& theta0);

/// Same protocol on any list of orthonormal bases (e.g. a sampled
/// approximate design): Alice learns the basis flag directly and the column
/// flag through its Fourier transform, all md outcomes uniform; the averaged
/// FI equals the QFI of the corresponding input state.
LoccPlan locc_plan_for_bases(const std::vector<Basis>& bases, int n, const Chart& chart,
                             const RealVector& theta0);

}  // namespace sudest
