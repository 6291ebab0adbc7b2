#include "sudest/measurement.hpp"

#include <cmath>

namespace sudest {

namespace {

RealMatrix householder_to_uniform(Index size) {
    // Orthogonal matrix sending e_{size-1} to the flat vector, so every row
    // picks up the same weight on the last column.
    RealVector flat = RealVector::Constant(size, 1.0 / std::sqrt(static_cast<double>(size)));
    RealVector w = -flat;
    w[size - 1] += 1.0;  // e_last - flat
    const double norm2 = w.squaredNorm();
    if (norm2 < 1e-30) return RealMatrix::Identity(size, size);
    return RealMatrix::Identity(size, size) - (2.0 / norm2) * (w * w.transpose());
}

}  // namespace

Povm optimal_povm(const StructuredState& s, const Chart& chart, const RealVector& theta0,
                  const OptimalPovmOptions& options) {
    if (chart.d() != s.d)
        throw ValidationError("optimal_povm: chart dimension does not match the state");
    const ComplexMatrix gram = sld_gram(s, chart, theta0);
    const double defect = gram.imag().cwiseAbs().maxCoeff() / (2.0 * static_cast<double>(s.n));
    if (defect > options.defect_tol)
        throw ValidationError("optimal_povm: state fails the attainability check at theta0, "
                              "defect " + format_magnitude(defect));

    FisherMatrix h = gram.real();
    h = 0.5 * (h + h.transpose());
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(h);
    const RealVector& ev = solver.eigenvalues();
    const double top = ev.cwiseAbs().maxCoeff();
    const double cut = options.support_rel_tol * std::max(top, 1e-300);

    std::vector<Index> support;
    for (Index i = 0; i < ev.size(); ++i)
        if (ev[i] > cut) support.push_back(i);
    const Index r = static_cast<Index>(support.size());
    if (r == 0)
        throw ValidationError("optimal_povm: QFI vanishes at theta0, no direction is identifiable");
    if (r < ev.size() && !options.allow_singular)
        throw ValidationError("optimal_povm: QFI is singular at theta0 (rank " + std::to_string(r) +
                              " of " + std::to_string(ev.size()) +
                              "); set allow_singular to build on the support");

    FunctionalPovm povm;
    povm.state = s;
    povm.chart = chart;
    povm.theta0 = theta0;
    povm.reference = unitary_at(chart, theta0);
    povm.frame0 = tangent_at(chart, theta0);

    const Index dim = chart.dim();
    const ComplexMatrix eye = ComplexMatrix::Identity(s.d, s.d);
    povm.m0.resize(dim);
    for (Index a = 0; a < dim; ++a)
        povm.m0[a] = std::real(overlap(s, eye, eye, {povm.frame0[static_cast<std::size_t>(a)]}));

    povm.weight.resize(r, dim);
    for (Index row = 0; row < r; ++row)
        povm.weight.row(row) =
            solver.eigenvectors().col(support[static_cast<std::size_t>(row)]).transpose() /
            std::sqrt(ev[support[static_cast<std::size_t>(row)]]);

    povm.mix = householder_to_uniform(r + 1);
    return Povm(std::move(povm));
}

Index outcome_count(const Povm& povm) {
    if (const auto* dense = std::get_if<DensePovm>(&povm))
        return static_cast<Index>(dense->effect_vectors.size());
    const auto& fn = std::get<FunctionalPovm>(povm);
    return fn.mix.rows() + 1;  // completion outcome
}

namespace {

struct FunctionalAmplitudes {
    ComplexVector z;        // per effect
    ComplexMatrix dz;       // effects x parameters, empty unless requested
};

// Amplitudes z_xi = <m_xi|psi(theta)> and their theta-derivatives, computed
// through the overlap engine.
FunctionalAmplitudes functional_amplitudes(const FunctionalPovm& povm, const RealVector& theta,
                                           bool with_jacobian) {
    const StructuredState& s = povm.state;
    const Chart& chart = povm.chart;
    const Index dim = chart.dim();
    const Index r = povm.weight.rows();

    const ComplexMatrix u = unitary_at(chart, theta);
    const ComplexMatrix& v = povm.reference;

    std::vector<ComplexMatrix> bra_ops(static_cast<std::size_t>(dim));
    for (Index a = 0; a < dim; ++a)
        bra_ops[static_cast<std::size_t>(a)] =
            v * povm.frame0[static_cast<std::size_t>(a)] * v.adjoint();

    const Complex base = overlap(s, u, v, {});
    ComplexVector sld_amp(dim);
    for (Index a = 0; a < dim; ++a) {
        const Complex ov = overlap(s, u, v, {bra_ops[static_cast<std::size_t>(a)]});
        sld_amp[a] = Complex(0.0, 2.0) * (ov - povm.m0[a] * base);
    }

    ComplexVector beta(r + 1);
    beta.head(r) = povm.weight.cast<Complex>() * sld_amp;
    beta[r] = base;

    FunctionalAmplitudes out;
    out.z = povm.mix.cast<Complex>() * beta;

    if (with_jacobian) {
        const std::vector<ComplexMatrix> frame = tangent_at(chart, theta);
        ComplexMatrix dbeta(r + 1, dim);
        for (Index p = 0; p < dim; ++p) {
            const ComplexMatrix ket_op =
                u * frame[static_cast<std::size_t>(p)] * u.adjoint();
            const Complex dbase = Complex(0.0, -1.0) * overlap(s, u, v, {ket_op});
            ComplexVector dsld(dim);
            for (Index a = 0; a < dim; ++a) {
                const Complex dov = Complex(0.0, -1.0) *
                                    overlap(s, u, v, {bra_ops[static_cast<std::size_t>(a)], ket_op});
                dsld[a] = Complex(0.0, 2.0) * (dov - povm.m0[a] * dbase);
            }
            dbeta.col(p).head(r) = povm.weight.cast<Complex>() * dsld;
            dbeta(r, p) = dbase;
        }
        out.dz = povm.mix.cast<Complex>() * dbeta;
    }
    return out;
}

struct DenseAmplitudes {
    ComplexVector psi;
    std::vector<ComplexVector> dpsi;
};

DenseAmplitudes dense_amplitudes(const DensePovm& povm, const RealVector& theta,
                                 bool with_jacobian) {
    const ComplexMatrix u = unitary_at(povm.chart, theta);
    DenseAmplitudes out;
    out.psi = dense_state(povm.state, u, povm.dense_limit);
    if (with_jacobian) {
        const std::vector<ComplexMatrix> frame = tangent_at(povm.chart, theta);
        for (const ComplexMatrix& t : frame)
            out.dpsi.push_back(Complex(0.0, -1.0) *
                               dense_insertion(povm.state, u, t, povm.dense_limit));
    }
    return out;
}

}  // namespace

OutcomeDistribution outcome_probabilities(const Povm& povm, const RealVector& theta) {
    OutcomeDistribution dist;
    if (const auto* dense = std::get_if<DensePovm>(&povm)) {
        const DenseAmplitudes amp = dense_amplitudes(*dense, theta, false);
        const Index m = static_cast<Index>(dense->effect_vectors.size());
        dist.p.resize(m);
        for (Index k = 0; k < m; ++k)
            dist.p[k] = std::norm(dense->effect_vectors[static_cast<std::size_t>(k)].dot(amp.psi));
        return dist;
    }
    const auto& fn = std::get<FunctionalPovm>(povm);
    const FunctionalAmplitudes amp = functional_amplitudes(fn, theta, false);
    const Index m = amp.z.size();
    dist.p.resize(m + 1);
    double total = 0.0;
    for (Index k = 0; k < m; ++k) {
        dist.p[k] = std::norm(amp.z[k]);
        total += dist.p[k];
    }
    double rest = 1.0 - total;
    if (rest < 0.0) {
        dist.clip = -rest;
        rest = 0.0;
    }
    dist.p[m] = rest;
    return dist;
}

ProbabilityJacobian probabilities_and_jacobian(const Povm& povm, const RealVector& theta) {
    ProbabilityJacobian out;
    if (const auto* dense = std::get_if<DensePovm>(&povm)) {
        const DenseAmplitudes amp = dense_amplitudes(*dense, theta, true);
        const Index m = static_cast<Index>(dense->effect_vectors.size());
        const Index dim = static_cast<Index>(amp.dpsi.size());
        out.p.resize(m);
        out.jacobian.resize(m, dim);
        for (Index k = 0; k < m; ++k) {
            const ComplexVector& e = dense->effect_vectors[static_cast<std::size_t>(k)];
            const Complex a = e.dot(amp.psi);
            out.p[k] = std::norm(a);
            for (Index p = 0; p < dim; ++p)
                out.jacobian(k, p) =
                    2.0 * std::real(std::conj(a) * e.dot(amp.dpsi[static_cast<std::size_t>(p)]));
        }
        return out;
    }
    const auto& fn = std::get<FunctionalPovm>(povm);
    const FunctionalAmplitudes amp = functional_amplitudes(fn, theta, true);
    const Index m = amp.z.size();
    const Index dim = amp.dz.cols();
    out.p.resize(m + 1);
    out.jacobian.resize(m + 1, dim);
    double total = 0.0;
    for (Index k = 0; k < m; ++k) {
        out.p[k] = std::norm(amp.z[k]);
        total += out.p[k];
        for (Index p = 0; p < dim; ++p)
            out.jacobian(k, p) = 2.0 * std::real(std::conj(amp.z[k]) * amp.dz(k, p));
    }
    double rest = 1.0 - total;
    if (rest < 0.0) {
        out.clip = -rest;
        rest = 0.0;
    }
    out.p[m] = rest;
    out.jacobian.row(m) = -out.jacobian.topRows(m).colwise().sum();
    return out;
}

FisherMatrix fisher_information(const Povm& povm, const RealVector& theta, double floor) {
    const ProbabilityJacobian pj = probabilities_and_jacobian(povm, theta);
    const Index dim = pj.jacobian.cols();
    FisherMatrix fi = FisherMatrix::Zero(dim, dim);
    for (Index k = 0; k < pj.p.size(); ++k) {
        if (pj.p[k] <= floor) continue;
        const RealVector grad = pj.jacobian.row(k).transpose();
        fi += grad * grad.transpose() / pj.p[k];
    }
    return fi;
}

DensePovm basis_povm(const StructuredState& s, const Chart& chart, const ComplexMatrix& basis,
                     Index dense_limit) {
    const Index dim = dense_dim(s);
    if (dim > dense_limit)
        throw ValidationError("basis_povm: dense dimension " + std::to_string(dim) +
                              " exceeds the dense-regime limit " + std::to_string(dense_limit) +
                              "; pass a larger limit explicitly to proceed");
    if (basis.rows() != dim || basis.cols() != dim)
        throw ValidationError("basis_povm: basis must act on the full space, expected dimension " +
                              std::to_string(dim));
    const double unit =
        (basis.adjoint() * basis - ComplexMatrix::Identity(dim, dim)).norm();
    if (unit > 1e-10)
        throw ValidationError("basis_povm: basis fails the unitarity check, defect " +
                              format_magnitude(unit));
    DensePovm povm;
    povm.state = s;
    povm.chart = chart;
    povm.dense_limit = dense_limit;
    for (Index k = 0; k < dim; ++k) povm.effect_vectors.push_back(basis.col(k));
    return povm;
}

ComplexMatrix y_pairing(const StructuredState& s, const Chart& chart, const RealVector& theta,
                        Index dense_limit) {
    const ComplexMatrix u = unitary_at(chart, theta);
    const ComplexVector psi = dense_state(s, u, dense_limit);
    const std::vector<ComplexMatrix> frame = tangent_at(chart, theta);
    const Index dim = psi.size();
    const Index params = chart.dim();

    ComplexMatrix slds(dim, params);
    const ComplexMatrix eye = ComplexMatrix::Identity(s.d, s.d);
    for (Index a = 0; a < params; ++a) {
        const double m = std::real(overlap(s, eye, eye, {frame[static_cast<std::size_t>(a)]}));
        slds.col(a) = Complex(0.0, -2.0) *
                      (dense_insertion(s, u, frame[static_cast<std::size_t>(a)], dense_limit) -
                       m * psi);
    }

    Eigen::ColPivHouseholderQR<ComplexMatrix> qr(slds);
    qr.setThreshold(1e-10);
    const Index rank = qr.rank();
    const ComplexMatrix q =
        ComplexMatrix(qr.householderQ() * ComplexMatrix::Identity(dim, rank));
    const ComplexMatrix proj = q * q.adjoint();
    return ComplexMatrix::Identity(dim, dim) + (Complex(0.0, 1.0) - Complex(1.0)) * proj;
}

RandomFiEstimate average_random_fi(const StructuredState& s, const Chart& chart,
                                   const RealVector& theta, int draws, Rng& rng,
                                   Index dense_limit) {
    if (draws < 2) throw ValidationError("average_random_fi: draws must be at least 2");
    const Index dim = dense_dim(s);
    if (dim > dense_limit)
        throw ValidationError("average_random_fi: dense dimension " + std::to_string(dim) +
                              " exceeds the dense-regime limit " + std::to_string(dense_limit));
    const Index params = chart.dim();
    FisherMatrix mean = FisherMatrix::Zero(params, params);
    RealMatrix m2 = RealMatrix::Zero(params, params);
    for (int g = 0; g < draws; ++g) {
        const ComplexMatrix basis = haar_unitary(dim, rng);
        const FisherMatrix fi =
            fisher_information(Povm(basis_povm(s, chart, basis, dense_limit)), theta);
        const RealMatrix delta = fi - mean;
        mean += delta / static_cast<double>(g + 1);
        m2 += delta.cwiseProduct(fi - mean);
    }
    RandomFiEstimate est;
    est.mean = mean;
    est.sem = (m2 / (static_cast<double>(draws) * (draws - 1.0))).cwiseSqrt();
    est.draws = draws;
    return est;
}

LoccPlan locc_plan(const Chart& chart, int n, const RealVector& theta0) {
    return locc_plan_for_bases(mub_bases(chart.d()), n, chart, theta0);
}

LoccPlan locc_plan_for_bases(const std::vector<Basis>& bases, int n, const Chart& chart,
                             const RealVector& theta0) {
    if (bases.empty()) throw ValidationError("locc_plan_for_bases: empty basis list");
    const Index d = chart.d();
    LoccPlan plan;
    const Index params = chart.dim();
    plan.averaged_fi = FisherMatrix::Zero(params, params);
    plan.averaged_conditional_qfi = FisherMatrix::Zero(params, params);
    const double prob = 1.0 / static_cast<double>(static_cast<Index>(bases.size()) * d);

    OptimalPovmOptions options;
    options.allow_singular = true;

    for (Index b = 0; b < static_cast<Index>(bases.size()); ++b) {
        for (Index k = 0; k < d; ++k) {
            LoccBranch branch;
            branch.b = b;
            branch.k = k;
            branch.alice_prob = prob;
            branch.state = bob_conditional(bases, b, k, n);
            branch.povm = optimal_povm(branch.state, chart, theta0, options);
            plan.averaged_fi += prob * fisher_information(branch.povm, theta0);
            plan.averaged_conditional_qfi +=
                prob * locc_conditional_qfi(bases, b, k, n, chart.basis);
            plan.branches.push_back(std::move(branch));
        }
    }
    return plan;
}

}  // namespace sudest
