#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sudest {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Raised when an input violates a documented precondition. The message names
/// the violated check and the offending magnitude.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Deterministic random stream. Streams derived via derive() are independent
/// of the parent's consumption state, so per-trial results do not depend on
/// scheduling order. Gaussian variates use an explicit Box-Muller transform
/// over 53-bit uniforms; std::normal_distribution is not sequence-stable
/// across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();
    double uniform();   // [0, 1)
    double gaussian();  // standard normal
    Complex complex_gaussian();  // E|z|^2 = 1

    /// Child stream keyed by (this stream's seed, index); stateless in the
    /// parent's position.
    Rng derive(std::uint64_t index) const;

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Entropy-derived nonzero seed for --seed 0 semantics.
std::uint64_t entropy_seed();

struct HermitianEigen {
    RealVector values;        // ascending
    ComplexMatrix vectors;    // columns
};

/// Eigendecomposition of a Hermitian matrix. Rejects inputs whose
/// anti-Hermitian part exceeds 1e-10 relative Frobenius norm.
HermitianEigen hermitian_eig(const ComplexMatrix& a);

/// exp(-i a) for Hermitian a.
ComplexMatrix unitary_exp(const ComplexMatrix& a);

/// m^(-1/2) for symmetric positive definite m; rejects eigenvalues below
/// 1e-12 relative to the largest.
RealMatrix inv_sqrt_spd(const RealMatrix& m);

/// Haar-distributed unitary via Ginibre + QR with the R-diagonal phase fix.
ComplexMatrix haar_unitary(Index d, Rng& rng);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector kron(const ComplexVector& a, const ComplexVector& b);

/// Partial trace over the subsystems not listed in `keep`. `dims` are the
/// tensor factor dimensions of a, left factor slowest; `keep` is strictly
/// increasing.
ComplexMatrix partial_trace(const ComplexMatrix& a, const std::vector<Index>& dims,
                            const std::vector<int>& keep);

double hs_distance(const ComplexMatrix& a, const ComplexMatrix& b);

/// Swap operator on C^d (x) C^d.
ComplexMatrix swap_operator(Index d);

/// Projector onto the symmetric subspace of C^d (x) C^d.
ComplexMatrix symmetric_projector(Index d);

/// Frobenius norm of the anti-Hermitian part relative to max(1, ||a||_F).
double hermiticity_defect(const ComplexMatrix& a);

/// g^e for integer e >= 0 with 0^0 = 1.
Complex ipow(Complex g, int e);

std::string format_magnitude(double x);

}  // namespace sudest
