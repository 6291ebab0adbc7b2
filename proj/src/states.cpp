#include "sudest/states.hpp"

#include <cmath>
#include <numbers>

namespace sudest {

Index StructuredState::ancilla_dim() const {
    Index top = 0;
    for (const Branch& b : branches) top = std::max(top, b.label);
    return top + 1;
}

void validate_state(const StructuredState& s) {
    if (s.d < 2) throw ValidationError("state: d must be at least 2");
    if (s.n < 1) throw ValidationError("state: n must be at least 1");
    if (s.branches.empty()) throw ValidationError("state: branch list is empty");
    for (const Branch& b : s.branches) {
        if (b.label < 0) throw ValidationError("state: branch labels must be non-negative");
        if (b.vec.size() != s.d)
            throw ValidationError("state: branch vector dimension " + std::to_string(b.vec.size()) +
                                  " does not match d = " + std::to_string(s.d));
    }
}

Complex overlap(const StructuredState& s, const ComplexMatrix& u, const ComplexMatrix& v,
                const std::vector<ComplexMatrix>& insertions, const ComplexMatrix* ancilla_op) {
    validate_state(s);
    if (u.rows() != s.d || u.cols() != s.d || v.rows() != s.d || v.cols() != s.d)
        throw ValidationError("overlap: channel matrices must be d x d");
    if (insertions.size() > 2)
        throw ValidationError("overlap: at most two insertions are supported, got " +
                              std::to_string(insertions.size()));
    for (const ComplexMatrix& a : insertions)
        if (a.rows() != s.d || a.cols() != s.d)
            throw ValidationError("overlap: insertion operators must be d x d");
    if (ancilla_op && (ancilla_op->rows() < s.ancilla_dim() || ancilla_op->cols() < s.ancilla_dim()))
        throw ValidationError("overlap: ancilla operator is smaller than the ancilla space");

    const ComplexMatrix p = v.adjoint() * u;
    ComplexMatrix b_single, b_pair, b_second;
    if (insertions.size() == 1) {
        b_single = v.adjoint() * insertions[0] * u;
    } else if (insertions.size() == 2) {
        b_single = v.adjoint() * insertions[0] * u;
        b_second = v.adjoint() * insertions[1] * u;
        b_pair = v.adjoint() * insertions[0] * insertions[1] * u;
    }

    const double nn = static_cast<double>(s.n);
    Complex total = 0.0;
    for (const Branch& bj : s.branches) {
        for (const Branch& bi : s.branches) {
            Complex anc;
            if (ancilla_op)
                anc = (*ancilla_op)(bi.label, bj.label);
            else
                anc = bi.label == bj.label ? Complex(1.0) : Complex(0.0);
            if (anc == Complex(0.0)) continue;

            const Complex weight = std::conj(bi.coeff) * bj.coeff * anc;
            const Complex g = bi.vec.dot(p * bj.vec);
            Complex bracket;
            switch (insertions.size()) {
                case 0:
                    bracket = ipow(g, s.n);
                    break;
                case 1:
                    bracket = nn * bi.vec.dot(b_single * bj.vec) * ipow(g, s.n - 1);
                    break;
                default: {
                    bracket = nn * bi.vec.dot(b_pair * bj.vec) * ipow(g, s.n - 1);
                    if (s.n > 1)
                        bracket += nn * (nn - 1.0) * bi.vec.dot(b_single * bj.vec) *
                                   bi.vec.dot(b_second * bj.vec) * ipow(g, s.n - 2);
                    break;
                }
            }
            total += weight * bracket;
        }
    }
    return total;
}

double norm_defect(const StructuredState& s) {
    const ComplexMatrix eye = ComplexMatrix::Identity(s.d, s.d);
    return std::abs(overlap(s, eye, eye, {}) - Complex(1.0));
}

StructuredState normalized(StructuredState s) {
    const ComplexMatrix eye = ComplexMatrix::Identity(s.d, s.d);
    const double norm2 = std::real(overlap(s, eye, eye, {}));
    if (!(norm2 > 0.0))
        throw ValidationError("normalized: state has vanishing norm");
    const double scale = 1.0 / std::sqrt(norm2);
    for (Branch& b : s.branches) b.coeff *= scale;
    return s;
}

StructuredState from_design(const VectorSet& set, int n) {
    if (set.vectors.empty()) throw ValidationError("from_design: empty vector set");
    StructuredState s;
    s.d = set.d;
    s.n = n;
    const double c = 1.0 / std::sqrt(static_cast<double>(set.vectors.size()));
    for (std::size_t i = 0; i < set.vectors.size(); ++i)
        s.branches.push_back({static_cast<Index>(i), Complex(c), set.vectors[i]});
    validate_state(s);
    return s;
}

StructuredState from_approx_design(const std::vector<Basis>& bases, int n) {
    if (bases.empty()) throw ValidationError("from_approx_design: empty basis list");
    VectorSet set;
    set.d = bases.front().empty() ? 0 : bases.front().front().size();
    for (const Basis& basis : bases) {
        const ComplexMatrix u = basis_matrix(basis);
        if (u.rows() != set.d)
            throw ValidationError("from_approx_design: bases have mixed dimensions");
        const double defect =
            (u.adjoint() * u - ComplexMatrix::Identity(set.d, set.d)).norm();
        if (defect > 1e-10)
            throw ValidationError("from_approx_design: basis fails the orthonormality check, "
                                  "defect " + format_magnitude(defect));
        for (const ComplexVector& v : basis) set.vectors.push_back(v);
    }
    return from_design(set, n);
}

StructuredState from_basis(const ComplexMatrix& u, int n) {
    if (u.rows() != u.cols()) throw ValidationError("from_basis: basis matrix must be square");
    VectorSet set;
    set.d = u.rows();
    for (Index k = 0; k < u.cols(); ++k) set.vectors.push_back(u.col(k));
    return from_design(set, n);
}

StructuredState product_baseline(const ComplexVector& tau, int n) {
    const double defect = std::abs(tau.norm() - 1.0);
    if (defect > 1e-12)
        throw ValidationError("product_baseline: probe fails the unit-norm check, defect " +
                              format_magnitude(defect));
    StructuredState s;
    s.d = tau.size();
    s.n = n;
    s.branches.push_back({0, Complex(1.0), tau});
    validate_state(s);
    return s;
}

StructuredState bob_conditional(const std::vector<Basis>& mubs, Index b, Index k, int n) {
    if (mubs.empty()) throw ValidationError("bob_conditional: empty basis list");
    if (b < 0 || b >= static_cast<Index>(mubs.size()))
        throw ValidationError("bob_conditional: basis index b out of range");
    const Basis& basis = mubs[static_cast<std::size_t>(b)];
    const Index d = static_cast<Index>(basis.size());
    if (k < 0 || k >= d) throw ValidationError("bob_conditional: outcome index k out of range");

    StructuredState s;
    s.d = d;
    s.n = n;
    const double c = 1.0 / std::sqrt(static_cast<double>(d));
    const double tau = 2.0 * std::numbers::pi / static_cast<double>(d);
    for (Index l = 0; l < d; ++l) {
        const Complex phase = std::exp(Complex(0.0, -tau * static_cast<double>((k * l) % d)));
        s.branches.push_back({0, c * phase, basis[static_cast<std::size_t>(l)]});
    }
    validate_state(s);
    return s;
}

ComplexMatrix reduced_rho1(const StructuredState& s) {
    validate_state(s);
    ComplexMatrix rho = ComplexMatrix::Zero(s.d, s.d);
    for (const Branch& bj : s.branches)
        for (const Branch& bi : s.branches) {
            if (bi.label != bj.label) continue;
            const Complex g = bj.vec.dot(bi.vec);  // <v_j|v_i>
            rho += bi.coeff * std::conj(bj.coeff) * ipow(g, s.n - 1) * (bi.vec * bj.vec.adjoint());
        }
    return rho;
}

ComplexMatrix reduced_rho2(const StructuredState& s) {
    validate_state(s);
    if (s.n < 2)
        throw ValidationError("reduced_rho2: n = 1 input has no copy pair; "
                              "only the single-copy moment exists");
    ComplexMatrix rho = ComplexMatrix::Zero(s.d * s.d, s.d * s.d);
    for (const Branch& bj : s.branches)
        for (const Branch& bi : s.branches) {
            if (bi.label != bj.label) continue;
            const Complex g = bj.vec.dot(bi.vec);
            const ComplexVector vi = kron(bi.vec, bi.vec);
            const ComplexVector vj = kron(bj.vec, bj.vec);
            rho += bi.coeff * std::conj(bj.coeff) * ipow(g, s.n - 2) * (vi * vj.adjoint());
        }
    return rho;
}

double injectivity_margin(const StructuredState& s, const ComplexMatrix& u) {
    const ComplexMatrix eye = ComplexMatrix::Identity(s.d, s.d);
    return 1.0 - std::abs(overlap(s, u, eye, {}));
}

Index dense_dim(const StructuredState& s) {
    Index dim = s.ancilla_dim();
    for (int i = 0; i < s.n; ++i) dim *= s.d;
    return dim;
}

namespace {

void check_dense_limit(const StructuredState& s, Index dense_limit, const char* who) {
    const Index dim = dense_dim(s);
    if (dim > dense_limit)
        throw ValidationError(std::string(who) + ": dense dimension " + std::to_string(dim) +
                              " exceeds the dense-regime limit " + std::to_string(dense_limit) +
                              "; pass a larger limit explicitly to proceed");
}

}  // namespace

ComplexVector dense_state(const StructuredState& s, const ComplexMatrix& u, Index dense_limit) {
    validate_state(s);
    check_dense_limit(s, dense_limit, "dense_state");
    const Index da = s.ancilla_dim();
    Index copies_dim = 1;
    for (int i = 0; i < s.n; ++i) copies_dim *= s.d;

    ComplexVector out = ComplexVector::Zero(da * copies_dim);
    for (const Branch& b : s.branches) {
        const ComplexVector w = u * b.vec;
        ComplexVector tensor = ComplexVector::Ones(1);
        for (int i = 0; i < s.n; ++i) tensor = kron(tensor, w);
        out.segment(b.label * copies_dim, copies_dim) += b.coeff * tensor;
    }
    return out;
}

ComplexVector dense_insertion(const StructuredState& s, const ComplexMatrix& u,
                              const ComplexMatrix& a, Index dense_limit) {
    validate_state(s);
    check_dense_limit(s, dense_limit, "dense_insertion");
    if (a.rows() != s.d || a.cols() != s.d)
        throw ValidationError("dense_insertion: operator must be d x d");
    const Index da = s.ancilla_dim();
    Index copies_dim = 1;
    for (int i = 0; i < s.n; ++i) copies_dim *= s.d;

    ComplexVector out = ComplexVector::Zero(da * copies_dim);
    for (const Branch& b : s.branches) {
        const ComplexVector w = u * b.vec;
        const ComplexVector wa = u * (a * b.vec);
        for (int pos = 0; pos < s.n; ++pos) {
            ComplexVector tensor = ComplexVector::Ones(1);
            for (int i = 0; i < s.n; ++i) tensor = kron(tensor, i == pos ? wa : w);
            out.segment(b.label * copies_dim, copies_dim) += b.coeff * tensor;
        }
    }
    return out;
}

nlohmann::json state_to_json(const StructuredState& s) {
    nlohmann::json j;
    j["d"] = s.d;
    j["n"] = s.n;
    nlohmann::json branches = nlohmann::json::array();
    for (const Branch& b : s.branches) {
        nlohmann::json jb;
        jb["label"] = b.label;
        jb["coeff"] = {b.coeff.real(), b.coeff.imag()};
        nlohmann::json vec = nlohmann::json::array();
        for (Index i = 0; i < b.vec.size(); ++i)
            vec.push_back({b.vec[i].real(), b.vec[i].imag()});
        jb["vec"] = vec;
        branches.push_back(jb);
    }
    j["branches"] = branches;
    return j;
}

StructuredState state_from_json(const nlohmann::json& j) {
    StructuredState s;
    try {
        s.d = j.at("d").get<Index>();
        s.n = j.at("n").get<int>();
        for (const nlohmann::json& jb : j.at("branches")) {
            Branch b;
            b.label = jb.at("label").get<Index>();
            const auto& c = jb.at("coeff");
            b.coeff = Complex(c.at(0).get<double>(), c.at(1).get<double>());
            const auto& vec = jb.at("vec");
            b.vec.resize(static_cast<Index>(vec.size()));
            for (std::size_t i = 0; i < vec.size(); ++i)
                b.vec[static_cast<Index>(i)] =
                    Complex(vec[i].at(0).get<double>(), vec[i].at(1).get<double>());
            s.branches.push_back(std::move(b));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("state_from_json: malformed state document: ") + e.what());
    }
    validate_state(s);
    const double defect = norm_defect(s);
    if (defect > 1e-8)
        throw ValidationError("state_from_json: state fails the normalization check, defect " +
                              format_magnitude(defect));
    return s;
}

}  // namespace sudest
