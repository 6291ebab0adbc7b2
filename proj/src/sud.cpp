#include "sudest/sud.hpp"

#include <cmath>
#include <numbers>

namespace sudest {

GeneratorBasis gell_mann_basis(Index d) {
    if (d < 2) throw ValidationError("gell_mann_basis: d must be at least 2");
    GeneratorBasis basis;
    basis.d = d;
    basis.t.reserve(static_cast<std::size_t>(d * d - 1));
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (Index j = 0; j < d; ++j) {
        for (Index k = j + 1; k < d; ++k) {
            ComplexMatrix sym = ComplexMatrix::Zero(d, d);
            sym(j, k) = inv_sqrt2;
            sym(k, j) = inv_sqrt2;
            basis.t.push_back(sym);
            ComplexMatrix anti = ComplexMatrix::Zero(d, d);
            anti(j, k) = Complex(0.0, -inv_sqrt2);
            anti(k, j) = Complex(0.0, inv_sqrt2);
            basis.t.push_back(anti);
        }
    }
    for (Index l = 1; l < d; ++l) {
        ComplexMatrix diag = ComplexMatrix::Zero(d, d);
        const double norm = 1.0 / std::sqrt(static_cast<double>(l * (l + 1)));
        for (Index j = 0; j < l; ++j) diag(j, j) = norm;
        diag(l, l) = -static_cast<double>(l) * norm;
        basis.t.push_back(diag);
    }
    return basis;
}

Chart chart_at_identity(Index d) {
    Chart chart;
    chart.basis = gell_mann_basis(d);
    chart.reference = ComplexMatrix::Identity(d, d);
    return chart;
}

Chart chart_at(const ComplexMatrix& reference) {
    if (reference.rows() != reference.cols())
        throw ValidationError("chart_at: reference must be square");
    const double unit = (reference.adjoint() * reference -
                         ComplexMatrix::Identity(reference.rows(), reference.cols()))
                            .norm();
    if (unit > 1e-10)
        throw ValidationError("chart_at: reference fails the unitarity check, defect " +
                              format_magnitude(unit));
    Chart chart;
    chart.basis = gell_mann_basis(reference.rows());
    chart.reference = reference;
    return chart;
}

double chart_radius() { return std::numbers::pi / 2.0; }

namespace {

ComplexMatrix coordinate_generator(const Chart& chart, const RealVector& theta) {
    if (theta.size() != chart.dim())
        throw ValidationError("unitary_at: theta has " + std::to_string(theta.size()) +
                              " coordinates, chart expects " + std::to_string(chart.dim()));
    ComplexMatrix x = ComplexMatrix::Zero(chart.d(), chart.d());
    for (Index a = 0; a < chart.dim(); ++a) x += theta[a] * chart.basis.t[static_cast<std::size_t>(a)];
    return x;
}

}  // namespace

ComplexMatrix unitary_at(const Chart& chart, const RealVector& theta) {
    return chart.reference * unitary_exp(coordinate_generator(chart, theta));
}

std::vector<ComplexMatrix> tangent_at(const Chart& chart, const RealVector& theta) {
    if (theta.size() != chart.dim())
        throw ValidationError("tangent_at: theta has " + std::to_string(theta.size()) +
                              " coordinates, chart expects " + std::to_string(chart.dim()));
    if (theta.norm() == 0.0) return chart.basis.t;

    // Loewner calculus for d(exp(-iX))/dtheta_a: in the eigenbasis of X the
    // derivative is the Hadamard product with the divided differences of
    // x -> exp(-ix), then t_a(theta) = i U^dag dU.
    const ComplexMatrix x = coordinate_generator(chart, theta);
    const HermitianEigen eig = hermitian_eig(x);
    const Index d = chart.d();

    ComplexMatrix phi(d, d);
    for (Index i = 0; i < d; ++i) {
        for (Index j = 0; j < d; ++j) {
            const double li = eig.values[i];
            const double lj = eig.values[j];
            const double mid = 0.5 * (li + lj);
            const double half = 0.5 * (li - lj);
            const double sinc = half == 0.0 ? 1.0 : std::sin(half) / half;
            phi(i, j) = Complex(0.0, -1.0) * std::exp(Complex(0.0, -mid)) * sinc;
        }
    }

    ComplexVector exp_phases(d);
    for (Index i = 0; i < d; ++i) exp_phases[i] = std::exp(Complex(0.0, eig.values[i]));

    std::vector<ComplexMatrix> frame;
    frame.reserve(chart.basis.t.size());
    for (const ComplexMatrix& t : chart.basis.t) {
        const ComplexMatrix e = eig.vectors.adjoint() * t * eig.vectors;
        const ComplexMatrix du = e.cwiseProduct(phi);
        // i exp(iX) dU in the eigenbasis, mapped back.
        ComplexMatrix g = Complex(0.0, 1.0) * exp_phases.asDiagonal() * du;
        g = eig.vectors * g * eig.vectors.adjoint();
        frame.push_back(0.5 * (g + g.adjoint()));
    }
    return frame;
}

}  // namespace sudest
