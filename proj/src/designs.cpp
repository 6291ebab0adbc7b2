#include "sudest/designs.hpp"

#include <cmath>
#include <numbers>

namespace sudest {

bool is_prime(Index d) {
    if (d < 2) return false;
    for (Index p = 2; p * p <= d; ++p)
        if (d % p == 0) return false;
    return true;
}

std::vector<Basis> mub_bases(Index d) {
    if (!is_prime(d))
        throw ValidationError("mub_bases: d = " + std::to_string(d) +
                              " is not supported, the construction covers prime d only");
    std::vector<Basis> bases;
    bases.reserve(static_cast<std::size_t>(d + 1));

    Basis computational;
    for (Index k = 0; k < d; ++k) {
        ComplexVector e = ComplexVector::Zero(d);
        e[k] = 1.0;
        computational.push_back(e);
    }
    bases.push_back(computational);

    if (d == 2) {
        const double s = 1.0 / std::sqrt(2.0);
        Basis x_basis, y_basis;
        x_basis.push_back((ComplexVector(2) << s, s).finished());
        x_basis.push_back((ComplexVector(2) << s, -s).finished());
        y_basis.push_back((ComplexVector(2) << s, Complex(0.0, s)).finished());
        y_basis.push_back((ComplexVector(2) << s, Complex(0.0, -s)).finished());
        bases.push_back(x_basis);
        bases.push_back(y_basis);
        return bases;
    }

    const double norm = 1.0 / std::sqrt(static_cast<double>(d));
    const double tau = 2.0 * std::numbers::pi / static_cast<double>(d);
    for (Index m = 0; m < d; ++m) {
        Basis basis;
        for (Index k = 0; k < d; ++k) {
            ComplexVector v(d);
            for (Index l = 0; l < d; ++l) {
                const Index phase = (m * l * l + k * l) % d;
                v[l] = norm * std::exp(Complex(0.0, tau * static_cast<double>(phase)));
            }
            basis.push_back(v);
        }
        bases.push_back(basis);
    }
    return bases;
}

VectorSet mub_vectors(Index d) {
    VectorSet set;
    set.d = d;
    for (const Basis& basis : mub_bases(d))
        for (const ComplexVector& v : basis) set.vectors.push_back(v);
    return set;
}

VectorSet sic_vectors(Index d) {
    VectorSet set;
    set.d = d;
    if (d == 2) {
        const double r = 1.0 / std::sqrt(3.0);
        const double bloch[4][3] = {
            {r, r, r}, {r, -r, -r}, {-r, r, -r}, {-r, -r, r}};
        for (const auto& b : bloch) {
            const double z = b[2];
            const double phi = std::atan2(b[1], b[0]);
            ComplexVector v(2);
            v[0] = std::sqrt(0.5 * (1.0 + z));
            v[1] = std::exp(Complex(0.0, phi)) * std::sqrt(0.5 * (1.0 - z));
            set.vectors.push_back(v);
        }
        return set;
    }
    if (d == 3) {
        const double s = 1.0 / std::sqrt(2.0);
        ComplexVector fiducial(3);
        fiducial << 0.0, s, -s;
        const Complex omega = std::exp(Complex(0.0, 2.0 * std::numbers::pi / 3.0));
        for (Index a = 0; a < 3; ++a) {
            for (Index b = 0; b < 3; ++b) {
                ComplexVector v(3);
                for (Index j = 0; j < 3; ++j)
                    v[(j + a) % 3] = ipow(omega, static_cast<int>((b * j) % 3)) * fiducial[j];
                set.vectors.push_back(v);
            }
        }
        return set;
    }
    throw ValidationError("sic_vectors: d = " + std::to_string(d) +
                          " is not supported, exact fiducials are implemented for d in {2, 3}");
}

DesignCertificate certify_2design(const VectorSet& set, double tolerance) {
    if (set.d < 2) throw ValidationError("certify_2design: d must be at least 2");
    if (set.vectors.empty()) throw ValidationError("certify_2design: empty vector set");
    const Index d = set.d;
    ComplexMatrix frame = ComplexMatrix::Zero(d * d, d * d);
    for (const ComplexVector& v : set.vectors) {
        if (v.size() != d)
            throw ValidationError("certify_2design: vector dimension " + std::to_string(v.size()) +
                                  " does not match d = " + std::to_string(d));
        const double norm_defect = std::abs(v.norm() - 1.0);
        if (norm_defect > 1e-12)
            throw ValidationError("certify_2design: vector fails the unit-norm check, defect " +
                                  format_magnitude(norm_defect));
        const ComplexVector vv = kron(v, v);
        frame += vv * vv.adjoint();
    }
    frame /= static_cast<double>(set.vectors.size());
    const ComplexMatrix target =
        2.0 / static_cast<double>(d * (d + 1)) * symmetric_projector(d);
    DesignCertificate cert;
    cert.hs_distance = hs_distance(frame, target);
    cert.tolerance = tolerance;
    cert.is_design = cert.hs_distance <= tolerance;
    return cert;
}

std::int64_t chernoff_sample_size(Index d, double eps, double q) {
    if (d < 2) throw ValidationError("chernoff_sample_size: d must be at least 2");
    if (!(eps > 0.0 && eps <= 1.0))
        throw ValidationError("chernoff_sample_size: eps must lie in (0, 1], got " +
                              format_magnitude(eps));
    if (!(q > 0.0 && q < 1.0))
        throw ValidationError("chernoff_sample_size: q must lie in (0, 1), got " +
                              format_magnitude(q));
    const double dd = static_cast<double>(d);
    const double bound = 4.0 * (dd + 1.0) * std::numbers::ln2 / (eps * eps) *
                         std::log(2.0 * (dd * dd - 1.0) / (1.0 - q));
    return static_cast<std::int64_t>(std::ceil(bound));
}

ComplexMatrix basis_matrix(const Basis& basis) {
    if (basis.empty()) throw ValidationError("basis_matrix: empty basis");
    const Index d = basis.front().size();
    if (static_cast<Index>(basis.size()) != d)
        throw ValidationError("basis_matrix: expected " + std::to_string(d) +
                              " vectors, got " + std::to_string(basis.size()));
    ComplexMatrix u(d, d);
    for (Index k = 0; k < d; ++k) {
        if (basis[static_cast<std::size_t>(k)].size() != d)
            throw ValidationError("basis_matrix: vectors have mixed dimensions");
        u.col(k) = basis[static_cast<std::size_t>(k)];
    }
    return u;
}

std::vector<Basis> sample_approx_design(Index d, std::int64_t m, Rng& rng) {
    if (m < 1) throw ValidationError("sample_approx_design: m must be positive");
    std::vector<Basis> bases;
    bases.reserve(static_cast<std::size_t>(m));
    for (std::int64_t i = 0; i < m; ++i) {
        const ComplexMatrix u = haar_unitary(d, rng);
        Basis basis;
        basis.reserve(static_cast<std::size_t>(d));
        for (Index k = 0; k < d; ++k) basis.push_back(u.col(k));
        bases.push_back(std::move(basis));
    }
    return bases;
}

}  // namespace sudest
