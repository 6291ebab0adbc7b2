#include "sudest/numkernel.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace sudest {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed), state_(seed) {
    // Warm the state so nearby seeds decorrelate.
    std::uint64_t s = seed;
    state_ = splitmix64(s);
    state_ ^= splitmix64(s);
}

std::uint64_t Rng::next_u64() { return splitmix64(state_); }

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(phi);
    have_spare_ = true;
    return r * std::cos(phi);
}

Complex Rng::complex_gaussian() {
    const double re = gaussian();
    const double im = gaussian();
    return Complex(re, im) / std::sqrt(2.0);
}

Rng Rng::derive(std::uint64_t index) const {
    std::uint64_t x = seed_;
    std::uint64_t a = splitmix64(x);
    x = a ^ (0x9e3779b97f4a7c15ull * (index + 1));
    std::uint64_t b = splitmix64(x);
    return Rng(b);
}

std::uint64_t entropy_seed() {
    std::random_device rd;
    std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    if (s == 0) s = 0x5eed5eed5eed5eedull;
    return s;
}

std::string format_magnitude(double x) {
    std::ostringstream os;
    os.precision(6);
    os << std::scientific << x;
    return os.str();
}

double hermiticity_defect(const ComplexMatrix& a) {
    const double scale = std::max(1.0, a.norm());
    return (a - a.adjoint()).norm() / scale;
}

HermitianEigen hermitian_eig(const ComplexMatrix& a) {
    if (a.rows() != a.cols())
        throw ValidationError("hermitian_eig: matrix is not square (" +
                              std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + ")");
    const double defect = hermiticity_defect(a);
    if (defect > 1e-10)
        throw ValidationError("hermitian_eig: input fails the Hermiticity check, relative defect " +
                              format_magnitude(defect));
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(0.5 * (a + a.adjoint()));
    if (solver.info() != Eigen::Success)
        throw ValidationError("hermitian_eig: eigensolver did not converge");
    return HermitianEigen{solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix unitary_exp(const ComplexMatrix& a) {
    const HermitianEigen eig = hermitian_eig(a);
    ComplexVector phases(eig.values.size());
    for (Index i = 0; i < eig.values.size(); ++i)
        phases[i] = std::exp(Complex(0.0, -eig.values[i]));
    return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

RealMatrix inv_sqrt_spd(const RealMatrix& m) {
    if (m.rows() != m.cols())
        throw ValidationError("inv_sqrt_spd: matrix is not square");
    const double sym = (m - m.transpose()).norm() / std::max(1.0, m.norm());
    if (sym > 1e-10)
        throw ValidationError("inv_sqrt_spd: input fails the symmetry check, relative defect " +
                              format_magnitude(sym));
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(0.5 * (m + m.transpose()));
    const RealVector& ev = solver.eigenvalues();
    const double top = ev[ev.size() - 1];
    if (top <= 0.0 || ev[0] < 1e-12 * top)
        throw ValidationError("inv_sqrt_spd: matrix is numerically singular, eigenvalue ratio " +
                              format_magnitude(top > 0.0 ? ev[0] / top : 0.0));
    RealVector inv = ev.array().rsqrt();
    return solver.eigenvectors() * inv.asDiagonal() * solver.eigenvectors().transpose();
}

ComplexMatrix haar_unitary(Index d, Rng& rng) {
    if (d < 1) throw ValidationError("haar_unitary: dimension must be positive");
    ComplexMatrix z(d, d);
    for (Index j = 0; j < d; ++j)
        for (Index i = 0; i < d; ++i) z(i, j) = rng.complex_gaussian();
    Eigen::HouseholderQR<ComplexMatrix> qr(z);
    ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(d, d);
    const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index j = 0; j < d; ++j) {
        const Complex rjj = r(j, j);
        const double mag = std::abs(rjj);
        const Complex phase = mag > 0.0 ? rjj / mag : Complex(1.0, 0.0);
        q.col(j) *= phase;
    }
    return q;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

ComplexVector kron(const ComplexVector& a, const ComplexVector& b) {
    ComplexVector out(a.size() * b.size());
    for (Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a[i] * b;
    return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& a, const std::vector<Index>& dims,
                            const std::vector<int>& keep) {
    Index total = 1;
    for (Index d : dims) {
        if (d < 1) throw ValidationError("partial_trace: factor dimensions must be positive");
        total *= d;
    }
    if (a.rows() != total || a.cols() != total)
        throw ValidationError("partial_trace: matrix size " + std::to_string(a.rows()) +
                              " does not match factor product " + std::to_string(total));
    for (std::size_t i = 0; i < keep.size(); ++i) {
        if (keep[i] < 0 || keep[i] >= static_cast<int>(dims.size()))
            throw ValidationError("partial_trace: keep index out of range");
        if (i > 0 && keep[i] <= keep[i - 1])
            throw ValidationError("partial_trace: keep indices must be strictly increasing");
    }

    std::vector<int> is_kept(dims.size(), 0);
    for (int k : keep) is_kept[static_cast<std::size_t>(k)] = 1;

    Index kept_dim = 1, traced_dim = 1;
    for (std::size_t i = 0; i < dims.size(); ++i)
        (is_kept[i] ? kept_dim : traced_dim) *= dims[i];

    // Strides of each factor in the full index, left factor slowest.
    std::vector<Index> stride(dims.size());
    Index acc = 1;
    for (std::size_t i = dims.size(); i-- > 0;) {
        stride[i] = acc;
        acc *= dims[i];
    }

    auto embed = [&](Index sub, const std::vector<std::size_t>& factors) {
        Index full = 0;
        for (std::size_t i = factors.size(); i-- > 0;) {
            const Index d = dims[factors[i]];
            full += (sub % d) * stride[factors[i]];
            sub /= d;
        }
        return full;
    };

    std::vector<std::size_t> kept_factors, traced_factors;
    for (std::size_t i = 0; i < dims.size(); ++i)
        (is_kept[i] ? kept_factors : traced_factors).push_back(i);

    ComplexMatrix out = ComplexMatrix::Zero(kept_dim, kept_dim);
    for (Index r = 0; r < kept_dim; ++r) {
        const Index row_base = embed(r, kept_factors);
        for (Index c = 0; c < kept_dim; ++c) {
            const Index col_base = embed(c, kept_factors);
            Complex sum = 0.0;
            for (Index t = 0; t < traced_dim; ++t) {
                const Index off = embed(t, traced_factors);
                sum += a(row_base + off, col_base + off);
            }
            out(r, c) = sum;
        }
    }
    return out;
}

double hs_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw ValidationError("hs_distance: shape mismatch");
    return (a - b).norm();
}

ComplexMatrix swap_operator(Index d) {
    ComplexMatrix w = ComplexMatrix::Zero(d * d, d * d);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) w(i * d + j, j * d + i) = 1.0;
    return w;
}

ComplexMatrix symmetric_projector(Index d) {
    return 0.5 * (ComplexMatrix::Identity(d * d, d * d) + swap_operator(d));
}

Complex ipow(Complex g, int e) {
    Complex out = 1.0;
    for (int i = 0; i < e; ++i) out *= g;
    return out;
}

}  // namespace sudest
