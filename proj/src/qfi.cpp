#include "sudest/qfi.hpp"

#include <cmath>
#include <limits>

namespace sudest {

namespace {

void check_normalized(const StructuredState& s, const char* who) {
    const double defect = norm_defect(s);
    if (defect > 1e-8)
        throw ValidationError(std::string(who) + ": state fails the normalization check, defect " +
                              format_magnitude(defect));
}

}  // namespace

ComplexMatrix sld_gram(const StructuredState& s, const Chart& chart, const RealVector& theta) {
    check_normalized(s, "sld_gram");
    if (chart.d() != s.d)
        throw ValidationError("sld_gram: chart dimension does not match the state");
    const std::vector<ComplexMatrix> frame = tangent_at(chart, theta);
    const Index dim = chart.dim();
    const ComplexMatrix eye = ComplexMatrix::Identity(s.d, s.d);

    ComplexVector first(dim);
    for (Index a = 0; a < dim; ++a)
        first[a] = overlap(s, eye, eye, {frame[static_cast<std::size_t>(a)]});

    ComplexMatrix gram(dim, dim);
    for (Index a = 0; a < dim; ++a)
        for (Index b = 0; b < dim; ++b) {
            const Complex second = overlap(
                s, eye, eye, {frame[static_cast<std::size_t>(a)], frame[static_cast<std::size_t>(b)]});
            gram(a, b) = 4.0 * (second - first[a] * first[b]);
        }
    return gram;
}

FisherMatrix qfi_state(const StructuredState& s, const Chart& chart, const RealVector& theta) {
    const ComplexMatrix gram = sld_gram(s, chart, theta);
    FisherMatrix h = gram.real();
    return 0.5 * (h + h.transpose());
}

FisherMatrix qfi_from_moments(const ComplexMatrix& rho1, const ComplexMatrix* rho2, int n,
                              const std::vector<ComplexMatrix>& frame) {
    if (n < 1) throw ValidationError("qfi_from_moments: n must be at least 1");
    if (n > 1 && rho2 == nullptr)
        throw ValidationError("qfi_from_moments: the two-copy moment is required for n > 1");
    const Index dim = static_cast<Index>(frame.size());
    const double nn = static_cast<double>(n);

    RealVector first(dim);
    for (Index a = 0; a < dim; ++a)
        first[a] = std::real((rho1 * frame[static_cast<std::size_t>(a)]).trace());

    FisherMatrix h(dim, dim);
    for (Index a = 0; a < dim; ++a) {
        for (Index b = a; b < dim; ++b) {
            double val = std::real(
                (rho1 * frame[static_cast<std::size_t>(a)] * frame[static_cast<std::size_t>(b)])
                    .trace());
            if (n > 1)
                val += (nn - 1.0) *
                       std::real((*rho2 * kron(frame[static_cast<std::size_t>(a)],
                                               frame[static_cast<std::size_t>(b)]))
                                     .trace());
            val -= nn * first[a] * first[b];
            h(a, b) = 4.0 * nn * val;
            h(b, a) = h(a, b);
        }
    }
    return h;
}

double attainability_defect(const StructuredState& s, const Chart& chart,
                            const RealVector& theta) {
    const ComplexMatrix gram = sld_gram(s, chart, theta);
    // Im L_ab = 2n Im tr(rho1_out [t_a, t_b]); normalize away the 4n scale.
    return gram.imag().cwiseAbs().maxCoeff() / (2.0 * static_cast<double>(s.n));
}

FisherMatrix optimal_qfi(Index d, int n) {
    if (d < 2) throw ValidationError("optimal_qfi: d must be at least 2");
    if (n < 1) throw ValidationError("optimal_qfi: n must be at least 1");
    const double nn = static_cast<double>(n);
    const double dd = static_cast<double>(d);
    const double value = 4.0 * nn * (nn + dd) / (dd * (dd + 1.0));
    return value * FisherMatrix::Identity(d * d - 1, d * d - 1);
}

double optimal_tr_inverse_bound(Index d, int n) {
    if (d < 2) throw ValidationError("optimal_tr_inverse_bound: d must be at least 2");
    if (n < 1) throw ValidationError("optimal_tr_inverse_bound: n must be at least 1");
    const double nn = static_cast<double>(n);
    const double dd = static_cast<double>(d);
    return dd * (dd + 1.0) * (dd + 1.0) * (dd - 1.0) / (4.0 * nn * (nn + dd));
}

FisherMatrix basis_qfi_profile(const ComplexMatrix& u, int n, const GeneratorBasis& basis) {
    if (u.rows() != basis.d || u.cols() != basis.d)
        throw ValidationError("basis_qfi_profile: basis matrix must be d x d");
    if (n < 1) throw ValidationError("basis_qfi_profile: n must be at least 1");
    const Index d = basis.d;
    const Index dim = basis.dim();
    const double nn = static_cast<double>(n);

    // Diagonal matrix elements <k|u^dag t_a u|k>.
    RealMatrix diag(dim, d);
    for (Index a = 0; a < dim; ++a) {
        const ComplexMatrix rotated = u.adjoint() * basis.t[static_cast<std::size_t>(a)] * u;
        for (Index k = 0; k < d; ++k) diag(a, k) = std::real(rotated(k, k));
    }

    FisherMatrix h(dim, dim);
    for (Index a = 0; a < dim; ++a)
        for (Index b = a; b < dim; ++b) {
            double val = a == b ? 1.0 : 0.0;
            val += (nn - 1.0) * diag.row(a).dot(diag.row(b));
            h(a, b) = 4.0 * nn / static_cast<double>(d) * val;
            h(b, a) = h(a, b);
        }
    return h;
}

FisherMatrix locc_conditional_qfi(const std::vector<Basis>& bases, Index b, Index k, int n,
                                  const GeneratorBasis& basis) {
    if (b < 0 || b >= static_cast<Index>(bases.size()))
        throw ValidationError("locc_conditional_qfi: basis index b out of range");
    const Basis& chosen = bases[static_cast<std::size_t>(b)];
    if (k < 0 || k >= static_cast<Index>(chosen.size()))
        throw ValidationError("locc_conditional_qfi: outcome index k out of range");
    return basis_qfi_profile(basis_matrix(chosen), n, basis);
}

namespace {

RealVector symmetric_eigenvalues(const FisherMatrix& f, const char* who) {
    if (f.rows() != f.cols()) throw ValidationError(std::string(who) + ": matrix must be square");
    const double defect = (f - f.transpose()).norm() / std::max(1.0, f.norm());
    if (defect > 1e-8)
        throw ValidationError(std::string(who) + ": matrix fails the symmetry check, defect " +
                              format_magnitude(defect));
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(0.5 * (f + f.transpose()));
    return solver.eigenvalues();
}

}  // namespace

double trace_inverse(const FisherMatrix& f, double rel_tol) {
    const RealVector ev = symmetric_eigenvalues(f, "trace_inverse");
    const double top = ev.cwiseAbs().maxCoeff();
    double total = 0.0;
    for (Index i = 0; i < ev.size(); ++i) {
        if (ev[i] <= rel_tol * std::max(top, 1e-300))
            return std::numeric_limits<double>::infinity();
        total += 1.0 / ev[i];
    }
    return total;
}

double trace_pseudo_inverse(const FisherMatrix& f, double rel_tol) {
    const RealVector ev = symmetric_eigenvalues(f, "trace_pseudo_inverse");
    const double top = ev.cwiseAbs().maxCoeff();
    double total = 0.0;
    for (Index i = 0; i < ev.size(); ++i)
        if (ev[i] > rel_tol * top) total += 1.0 / ev[i];
    return total;
}

Index support_rank(const FisherMatrix& f, double rel_tol) {
    const RealVector ev = symmetric_eigenvalues(f, "support_rank");
    const double top = ev.cwiseAbs().maxCoeff();
    Index rank = 0;
    for (Index i = 0; i < ev.size(); ++i)
        if (ev[i] > rel_tol * top) ++rank;
    return rank;
}

}  // namespace sudest
