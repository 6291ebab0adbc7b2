#include "sudest/designs.hpp"
#include "sudest/estimate.hpp"
#include "sudest/qfi.hpp"
#include "sudest/version.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace sudest;

namespace {

VectorSet set_from_vectors(const std::vector<ComplexVector>& vectors) {
    if (vectors.empty()) throw ValidationError("empty vector set");
    VectorSet set;
    set.d = vectors.front().size();
    set.vectors = vectors;
    return set;
}

}  // namespace

PYBIND11_MODULE(_sudest, m) {
    m.doc() = "Optimal estimation of SU(d) unitary channels from parallel uses";
    m.attr("__version__") = kVersion;

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);

    py::class_<Chart>(m, "Chart")
        .def_property_readonly("d", &Chart::d)
        .def_property_readonly("dim", &Chart::dim)
        .def("__repr__", [](const Chart& c) {
            return "Chart(d=" + std::to_string(c.d()) + ", dim=" + std::to_string(c.dim()) + ")";
        });

    py::class_<StructuredState>(m, "StructuredState")
        .def_readonly("d", &StructuredState::d)
        .def_readonly("n", &StructuredState::n)
        .def_property_readonly(
            "branch_count",
            [](const StructuredState& s) { return static_cast<Index>(s.branches.size()); })
        .def("__repr__", [](const StructuredState& s) {
            return "StructuredState(d=" + std::to_string(s.d) + ", n=" + std::to_string(s.n) +
                   ", branches=" + std::to_string(s.branches.size()) + ")";
        });

    py::class_<DensePovm>(m, "DensePovm");
    py::class_<FunctionalPovm>(m, "FunctionalPovm")
        .def_property_readonly("outcomes",
                               [](const FunctionalPovm& f) { return f.mix.rows() + 1; });

    m.def("gell_mann", [](Index d) { return gell_mann_basis(d).t; }, py::arg("d"),
          "Orthonormal traceless Hermitian generator basis of su(d)");
    m.def("chart_at_identity", &chart_at_identity, py::arg("d"));
    m.def("chart_at", &chart_at, py::arg("reference"));
    m.def("unitary_at", &unitary_at, py::arg("chart"), py::arg("theta"));
    m.def("chart_radius", &chart_radius);
    m.def("haar_unitary",
          [](Index d, std::uint64_t seed) {
              Rng rng(seed);
              return haar_unitary(d, rng);
          },
          py::arg("d"), py::arg("seed"));

    m.def("mub_bases", &mub_bases, py::arg("d"));
    m.def("mub_vectors", [](Index d) { return mub_vectors(d).vectors; }, py::arg("d"));
    m.def("sic_vectors", [](Index d) { return sic_vectors(d).vectors; }, py::arg("d"));
    m.def("certify_2design",
          [](const std::vector<ComplexVector>& vectors, double tolerance) {
              const DesignCertificate cert = certify_2design(set_from_vectors(vectors), tolerance);
              py::dict out;
              out["hs_distance"] = cert.hs_distance;
              out["tolerance"] = cert.tolerance;
              out["is_design"] = cert.is_design;
              return out;
          },
          py::arg("vectors"), py::arg("tolerance") = 1e-10);
    m.def("chernoff_sample_size", &chernoff_sample_size, py::arg("d"), py::arg("eps"),
          py::arg("q"));
    m.def("sample_approx_design",
          [](Index d, std::int64_t count, std::uint64_t seed) {
              Rng rng(seed);
              std::vector<ComplexMatrix> out;
              for (const Basis& basis : sample_approx_design(d, count, rng))
                  out.push_back(basis_matrix(basis));
              return out;
          },
          py::arg("d"), py::arg("count"), py::arg("seed"));

    m.def("state_from_mub", [](Index d, int n) { return from_design(mub_vectors(d), n); },
          py::arg("d"), py::arg("n"));
    m.def("state_from_sic", [](Index d, int n) { return from_design(sic_vectors(d), n); },
          py::arg("d"), py::arg("n"));
    m.def("state_from_vectors",
          [](const std::vector<ComplexVector>& vectors, int n) {
              return from_design(set_from_vectors(vectors), n);
          },
          py::arg("vectors"), py::arg("n"));
    m.def("state_from_approx",
          [](Index d, std::int64_t count, int n, std::uint64_t seed) {
              Rng rng(seed);
              return from_approx_design(sample_approx_design(d, count, rng), n);
          },
          py::arg("d"), py::arg("count"), py::arg("n"), py::arg("seed"));
    m.def("state_from_product", &product_baseline, py::arg("tau"), py::arg("n"));
    m.def("state_from_basis", &from_basis, py::arg("u"), py::arg("n"));
    m.def("reduced_rho1", &reduced_rho1, py::arg("state"));
    m.def("reduced_rho2", &reduced_rho2, py::arg("state"));
    m.def("dense_state", &dense_state, py::arg("state"), py::arg("u"),
          py::arg("dense_limit") = kDefaultDenseLimit);
    m.def("injectivity_margin", &injectivity_margin, py::arg("state"), py::arg("u"));

    m.def("qfi", &qfi_state, py::arg("state"), py::arg("chart"), py::arg("theta"));
    m.def("sld_gram", &sld_gram, py::arg("state"), py::arg("chart"), py::arg("theta"));
    m.def("attainability_defect", &attainability_defect, py::arg("state"), py::arg("chart"),
          py::arg("theta"));
    m.def("optimal_qfi", &optimal_qfi, py::arg("d"), py::arg("n"));
    m.def("optimal_tr_inverse_bound", &optimal_tr_inverse_bound, py::arg("d"), py::arg("n"));
    m.def("trace_inverse", &trace_inverse, py::arg("f"), py::arg("rel_tol") = 1e-10);
    m.def("trace_pseudo_inverse", &trace_pseudo_inverse, py::arg("f"),
          py::arg("rel_tol") = 1e-10);
    m.def("basis_qfi_profile",
          [](const ComplexMatrix& u, int n) {
              return basis_qfi_profile(u, n, gell_mann_basis(u.rows()));
          },
          py::arg("u"), py::arg("n"));

    m.def("optimal_povm",
          [](const StructuredState& s, const Chart& chart, const RealVector& theta0,
             bool allow_singular) {
              OptimalPovmOptions options;
              options.allow_singular = allow_singular;
              return optimal_povm(s, chart, theta0, options);
          },
          py::arg("state"), py::arg("chart"), py::arg("theta0"),
          py::arg("allow_singular") = false);
    m.def("outcome_probabilities",
          [](const Povm& povm, const RealVector& theta) {
              return outcome_probabilities(povm, theta).p;
          },
          py::arg("povm"), py::arg("theta"));
    m.def("fisher_information", &fisher_information, py::arg("povm"), py::arg("theta"),
          py::arg("floor") = 1e-12);
    m.def("basis_povm", &basis_povm, py::arg("state"), py::arg("chart"), py::arg("basis"),
          py::arg("dense_limit") = kDefaultDenseLimit);
    m.def("y_pairing", &y_pairing, py::arg("state"), py::arg("chart"), py::arg("theta"),
          py::arg("dense_limit") = kDefaultDenseLimit);
    m.def("average_random_fi",
          [](const StructuredState& s, const Chart& chart, const RealVector& theta, int draws,
             std::uint64_t seed) {
              Rng rng(seed);
              const RandomFiEstimate estimate = average_random_fi(s, chart, theta, draws, rng);
              return py::make_tuple(estimate.mean, estimate.sem, estimate.draws);
          },
          py::arg("state"), py::arg("chart"), py::arg("theta"), py::arg("draws"),
          py::arg("seed"));
    m.def("locc_average_fi",
          [](const Chart& chart, int n, const RealVector& theta0) {
              return locc_plan(chart, n, theta0).averaged_fi;
          },
          py::arg("chart"), py::arg("n"), py::arg("theta0"));

    m.def("run_experiment_json",
          [](const std::string& config_json) {
              const ExperimentConfig config =
                  experiment_config_from_json(nlohmann::json::parse(config_json));
              return experiment_report_to_json(run_mse_experiment(config)).dump();
          },
          py::arg("config_json"),
          "Run a repeated-trial MSE experiment from a JSON config string; returns the JSON "
          "report");
}
