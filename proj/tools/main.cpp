#include "sudest/designs.hpp"
#include "sudest/estimate.hpp"
#include "sudest/io.hpp"
#include "sudest/qfi.hpp"
#include "sudest/verify.hpp"
#include "sudest/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using nlohmann::json;
using namespace sudest;

class Stopwatch {
public:
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    json j;
    in >> j;
    return j;
}

// Flag > config file > default: a bound value is replaced from the file only
// when its option was not passed on the command line.
class ConfigLayer {
public:
    ConfigLayer() = default;
    explicit ConfigLayer(json j) : j_(std::move(j)) {}

    template <typename T>
    void apply(const CLI::Option* opt, const char* key, T& value) const {
        if (opt != nullptr && opt->count() > 0) return;
        if (j_.contains(key)) value = j_.at(key).get<T>();
    }

private:
    json j_ = json::object();
};

json vector_to_json(const ComplexVector& v) {
    json rows = json::array();
    for (Index i = 0; i < v.size(); ++i) rows.push_back({v[i].real(), v[i].imag()});
    return rows;
}

json vector_set_to_json(const VectorSet& set) {
    json j;
    j["d"] = set.d;
    json vectors = json::array();
    for (const ComplexVector& v : set.vectors) vectors.push_back(vector_to_json(v));
    j["vectors"] = vectors;
    return j;
}

ComplexVector vector_from_json(const json& row) {
    ComplexVector v(static_cast<Index>(row.size()));
    for (Index i = 0; i < v.size(); ++i) {
        const json& pair = row.at(static_cast<std::size_t>(i));
        if (!pair.is_array() || pair.size() != 2)
            throw ValidationError("vector entries must be [re, im] pairs");
        v[i] = Complex(pair.at(0).get<double>(), pair.at(1).get<double>());
    }
    return v;
}

VectorSet vector_set_from_json(const json& j) {
    // Accept bare arrays, {"vectors": ...} payloads, and `design build`
    // reports (which nest the payload under "design").
    const json& root = (j.is_object() && !j.contains("vectors") && j.contains("design"))
                           ? j.at("design")
                           : j;
    const json& rows = root.is_array() ? root : root.at("vectors");
    if (!rows.is_array() || rows.empty()) throw ValidationError("no vectors found");
    VectorSet set;
    for (const json& row : rows) set.vectors.push_back(vector_from_json(row));
    set.d = set.vectors.front().size();
    for (const ComplexVector& v : set.vectors)
        if (v.size() != set.d) throw ValidationError("vectors have mixed dimensions");
    return set;
}

json matrix_to_json(const RealMatrix& m) {
    json rows = json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

void echo_config(const json& config) { std::cout << "resolved config: " << config.dump() << "\n"; }

std::string format_matrix(const RealMatrix& m) {
    std::ostringstream os;
    os.precision(6);
    for (Index r = 0; r < m.rows(); ++r) {
        os << "    [";
        for (Index c = 0; c < m.cols(); ++c) os << (c ? ", " : " ") << m(r, c);
        os << " ]\n";
    }
    return os.str();
}

void emit_json(const json& j, const std::string& out_file) {
    if (out_file.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        write_text_file(out_file, j.dump(2) + "\n");
        std::cout << "wrote " << out_file << "\n";
    }
}

std::uint64_t resolve_seed(std::uint64_t flag_seed) {
    return flag_seed != 0 ? flag_seed : entropy_seed();
}

int cmd_design_build(const std::string& kind, Index d, const std::string& out_file) {
    Stopwatch watch;
    json config{{"command", "design build"}, {"kind", kind}, {"d", d}};
    echo_config(config);

    json body;
    VectorSet set;
    try {
        if (kind == "mub") {
            const std::vector<Basis> bases = mub_bases(d);
            json bases_json = json::array();
            for (const Basis& basis : bases) {
                json rows = json::array();
                for (const ComplexVector& v : basis) rows.push_back(vector_to_json(v));
                bases_json.push_back(rows);
            }
            body["bases"] = bases_json;
            set = mub_vectors(d);
        } else if (kind == "sic") {
            set = sic_vectors(d);
        } else {
            throw ValidationError("unknown design kind '" + kind + "' (expected mub or sic)");
        }
    } catch (const ValidationError& e) {
        throw ValidationError(std::string(e.what()) +
                              "; `sudest approx` samples an approximate design for any d");
    }
    const DesignCertificate cert = certify_2design(set);

    json report = report_envelope(config, 0, watch.ms());
    report["design"] = vector_set_to_json(set);
    if (body.contains("bases")) report["bases"] = body["bases"];
    report["certificate"] = {{"hs_distance", cert.hs_distance},
                             {"tolerance", cert.tolerance},
                             {"is_design", cert.is_design}};
    emit_json(report, out_file);
    std::cout << (cert.is_design ? "certified 2-design" : "NOT a 2-design")
              << " (hs distance " << cert.hs_distance << ")\n";
    return cert.is_design ? 0 : 1;
}

int cmd_design_check(const std::string& file, const std::string& out_file) {
    Stopwatch watch;
    json config{{"command", "design check"}, {"file", file}};
    echo_config(config);

    const VectorSet set = vector_set_from_json(load_json_file(file));
    const DesignCertificate cert = certify_2design(set);
    json report = report_envelope(config, 0, watch.ms());
    report["d"] = set.d;
    report["size"] = set.size();
    report["certificate"] = {{"hs_distance", cert.hs_distance},
                             {"tolerance", cert.tolerance},
                             {"is_design", cert.is_design}};
    emit_json(report, out_file);
    std::cout << (cert.is_design ? "certified 2-design" : "NOT a 2-design")
              << " (hs distance " << cert.hs_distance << ")\n";
    return cert.is_design ? 0 : 1;
}

struct QfiArgs {
    ExperimentConfig config;
    bool as_json = false;
    std::string out_file;
};

int cmd_qfi(QfiArgs args) {
    Stopwatch watch;
    const std::uint64_t seed = resolve_seed(args.config.seed);
    json config = experiment_config_to_json(args.config);
    config["command"] = "qfi";
    echo_config(config);

    Rng rng(seed);
    const StructuredState s = build_input_state(args.config, rng);
    const Chart chart = chart_at_identity(args.config.d);
    const RealVector origin = RealVector::Zero(chart.dim());
    const FisherMatrix h = qfi_state(s, chart, origin);
    const double defect = attainability_defect(s, chart, origin);
    const double tr_inv = trace_inverse(h);
    const double tr_pinv = trace_pseudo_inverse(h);
    const double bound = optimal_tr_inverse_bound(args.config.d, args.config.n);

    json report = report_envelope(config, seed, watch.ms());
    report["qfi"] = matrix_to_json(h);
    report["trace_inverse"] = std::isinf(tr_inv) ? json("inf") : json(tr_inv);
    report["trace_pseudo_inverse"] = tr_pinv;
    report["support_rank"] = support_rank(h);
    report["optimal_bound"] = bound;
    report["attainability_defect"] = defect;

    if (args.as_json || !args.out_file.empty()) {
        emit_json(report, args.out_file);
    }
    std::cout << "input               : " << args.config.input << " (d = " << args.config.d
              << ", n = " << args.config.n << ")\n";
    std::cout << "QFI matrix          :\n" << format_matrix(h);
    std::cout << "Tr QFI^-1           : ";
    if (std::isinf(tr_inv))
        std::cout << "inf (singular; support value " << tr_pinv << ")\n";
    else
        std::cout << tr_inv << "\n";
    std::cout << "optimal bound       : " << bound << "\n";
    std::cout << "attainability defect: " << defect << "\n";
    return 0;
}

struct ApproxArgs {
    Index d = 2;
    int n = 2;
    double eps = 0.5;
    double q = 0.95;
    int repeats = 200;
    std::uint64_t seed = 0;
    std::string out_dir;
    std::string prefix = "approx";
};

int cmd_approx(ApproxArgs args) {
    Stopwatch watch;
    const std::uint64_t seed = resolve_seed(args.seed);
    json config{{"command", "approx"}, {"d", args.d},       {"n", args.n},
                {"eps", args.eps},     {"q", args.q},       {"repeats", args.repeats},
                {"seed", seed},        {"prefix", args.prefix}};
    echo_config(config);

    const std::int64_t m = chernoff_sample_size(args.d, args.eps, args.q);
    std::cout << "sample size m = " << m << " per repeat\n";

    const GeneratorBasis basis = gell_mann_basis(args.d);
    const Index dim = static_cast<Index>(basis.t.size());
    const double h0 = 4.0 * args.n * (args.n + static_cast<double>(args.d)) /
                      static_cast<double>(args.d * (args.d + 1));
    Rng rng(seed);

    CsvWriter csv(kVersion, config, seed);
    csv.header({"repeat", "m", "eps", "lambda_min_ratio", "lambda_max_ratio", "violated"});
    std::vector<double> ratios;
    int violations = 0;
    for (int rep = 0; rep < args.repeats; ++rep) {
        Rng rep_rng = rng.derive(static_cast<std::uint64_t>(rep));
        const std::vector<Basis> bases = sample_approx_design(args.d, m, rep_rng);
        FisherMatrix h = FisherMatrix::Zero(dim, dim);
        for (const Basis& bset : bases) h += basis_qfi_profile(basis_matrix(bset), args.n, basis);
        h /= static_cast<double>(m);
        Eigen::SelfAdjointEigenSolver<RealMatrix> eig(h);
        const double lo = eig.eigenvalues().minCoeff() / h0;
        const double hi = eig.eigenvalues().maxCoeff() / h0;
        for (Index i = 0; i < eig.eigenvalues().size(); ++i)
            ratios.push_back(eig.eigenvalues()[i] / h0);
        const bool violated = lo < 1.0 - args.eps || hi > 1.0 + args.eps;
        if (violated) ++violations;
        csv.row({csv_cell(static_cast<std::int64_t>(rep)), csv_cell(m), csv_cell(args.eps),
                 csv_cell(lo), csv_cell(hi), violated ? "1" : "0"});
    }
    const double fraction = static_cast<double>(violations) / args.repeats;

    const auto dir = resolve_output_dir(args.out_dir);
    const auto csv_path = dir / (args.prefix + ".csv");
    const auto svg_path = dir / (args.prefix + ".svg");
    const auto json_path = dir / (args.prefix + ".json");
    csv.write(csv_path);
    write_text_file(svg_path,
                    svg_histogram("QFI eigenvalue ratios over " + std::to_string(args.repeats) +
                                      " repeats (m = " + std::to_string(m) + ")",
                                  "eigenvalue / optimal", ratios, 40, 1.0));
    json report = report_envelope(config, seed, watch.ms());
    report["m"] = m;
    report["violation_fraction"] = fraction;
    report["violations"] = violations;
    report["target_fraction"] = 1.0 - args.q;
    write_text_file(json_path, report.dump(2) + "\n");

    std::cout << "violation fraction " << fraction << " (target <= " << 1.0 - args.q << ")\n";
    std::cout << "wrote " << csv_path.string() << ", " << svg_path.string() << ", "
              << json_path.string() << "\n";
    return 0;
}

struct SimulateArgs {
    ExperimentConfig config;
    std::vector<int> ns;
    std::string out_dir;
    std::string prefix = "simulate";
};

int cmd_simulate(SimulateArgs args) {
    Stopwatch watch;
    if (args.ns.empty()) args.ns = {1, 2, 3, 4};
    // `--strategy locc` is shorthand for the LOCC measurement with the
    // oracle-anchored estimator.
    if (args.config.strategy == "locc") {
        args.config.strategy = "oracle";
        args.config.measurement = "locc";
    }
    const std::uint64_t seed = resolve_seed(args.config.seed);
    json config = experiment_config_to_json(args.config);
    config["command"] = "simulate";
    config["seed"] = seed;
    config["n_values"] = args.ns;
    config["prefix"] = args.prefix;
    echo_config(config);

    CsvWriter csv(kVersion, config, seed);
    csv.header({"d", "n", "shots", "trials", "converged", "excluded", "mse_trace",
                "scaled_trace", "bound", "ratio", "constancy"});
    SvgSeries series;
    series.name = "N TrMSE n(n+d)";
    json runs = json::array();
    for (int n : args.ns) {
        ExperimentConfig run_config = args.config;
        run_config.n = n;
        run_config.seed = seed + static_cast<std::uint64_t>(n);
        const MseExperimentReport report = run_mse_experiment(run_config);
        const double constancy =
            report.scaled_trace * n * (n + static_cast<double>(args.config.d));
        csv.row({csv_cell(args.config.d), csv_cell(static_cast<std::int64_t>(n)),
                 csv_cell(args.config.shots), csv_cell(static_cast<std::int64_t>(report.config.trials)),
                 csv_cell(static_cast<std::int64_t>(report.converged_trials)),
                 csv_cell(static_cast<std::int64_t>(report.excluded_trials)),
                 csv_cell(report.mse_trace), csv_cell(report.scaled_trace),
                 csv_cell(report.bound), csv_cell(report.ratio), csv_cell(constancy)});
        series.x.push_back(n);
        series.y.push_back(constancy);
        runs.push_back(experiment_report_to_json(report));
        std::cout << "n = " << n << ": N*TrMSE = " << report.scaled_trace << ", bound "
                  << report.bound << ", ratio " << report.ratio << ", constancy " << constancy
                  << " (" << report.converged_trials << "/" << report.config.trials
                  << " trials converged)\n";
    }

    const auto dir = resolve_output_dir(args.out_dir);
    const auto csv_path = dir / (args.prefix + ".csv");
    const auto svg_path = dir / (args.prefix + ".svg");
    const auto json_path = dir / (args.prefix + ".json");
    csv.write(csv_path);
    write_text_file(svg_path, svg_line_chart("Scaled estimation error vs copies", "n",
                                             "N TrMSE n(n+d)", {series}));
    json report = report_envelope(config, seed, watch.ms());
    report["runs"] = runs;
    write_text_file(json_path, report.dump(2) + "\n");
    std::cout << "wrote " << csv_path.string() << ", " << svg_path.string() << ", "
              << json_path.string() << "\n";
    return 0;
}

struct VerifyArgs {
    VerifyOptions options;
    bool as_json = false;
    std::string out_file;
};

int cmd_verify(VerifyArgs args) {
    Stopwatch watch;
    json config{{"command", "verify"},
                {"seed", args.options.seed},
                {"fast", args.options.fast},
                {"inject_failure", args.options.inject_failure},
                {"threads", args.options.threads},
                {"only", args.options.only}};
    echo_config(config);

    const std::vector<CheckResult> results = run_acceptance_checks(args.options);
    int failed = 0;
    for (const CheckResult& result : results) {
        if (!result.pass) ++failed;
        std::ostringstream line;
        line.precision(1);
        line << (result.pass ? "PASS " : "FAIL ") << result.name << " (" << std::fixed
             << result.seconds << "s): " << result.details;
        std::cout << line.str() << "\n";
    }
    std::cout << results.size() - failed << "/" << results.size() << " checks passed\n";

    if (args.as_json || !args.out_file.empty()) {
        json checks = json::array();
        for (const CheckResult& result : results)
            checks.push_back({{"name", result.name},
                              {"pass", result.pass},
                              {"details", result.details},
                              {"seconds", result.seconds}});
        json report = report_envelope(config, args.options.seed, watch.ms());
        report["checks"] = checks;
        report["passed"] = failed == 0;
        emit_json(report, args.out_file);
    }
    return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal estimation of SU(d) unitary channels from parallel uses"};
    app.set_version_flag("--version", sudest::kVersion);
    app.require_subcommand(1);

    std::string config_file;
    app.add_option("--config", config_file, "JSON config file (flags take precedence)")
        ->expected(1);

    // design
    auto* design = app.add_subcommand("design", "Build or certify 2-design vector sets");
    design->require_subcommand(1);
    auto* build = design->add_subcommand("build", "Construct a named design and certify it");
    std::string build_kind = "mub";
    sudest::Index build_d = 2;
    std::string build_out;
    auto* build_kind_opt = build->add_option("--kind", build_kind, "mub | sic");
    auto* build_d_opt = build->add_option("--d", build_d, "Hilbert space dimension");
    build->add_option("--out", build_out, "Write the JSON report to this file");
    auto* check = design->add_subcommand("check", "Certify vectors loaded from JSON");
    std::string check_file;
    std::string check_out;
    check->add_option("--file", check_file, "JSON file with vectors as [re, im] rows")
        ->required();
    check->add_option("--out", check_out, "Write the JSON report to this file");

    // qfi
    auto* qfi = app.add_subcommand("qfi", "QFI, its inverse trace, bound, attainability");
    QfiArgs qfi_args;
    auto* qfi_d = qfi->add_option("--d", qfi_args.config.d, "Hilbert space dimension");
    auto* qfi_n = qfi->add_option("--n", qfi_args.config.n, "Parallel uses");
    auto* qfi_state = qfi->add_option("--state", qfi_args.config.input,
                                      "mub | sic | approx | product | basis");
    auto* qfi_m = qfi->add_option("--approx-m", qfi_args.config.approx_m,
                                  "Sampled-basis count for approx inputs (0 = derive)");
    auto* qfi_seed = qfi->add_option("--seed", qfi_args.config.seed, "0 = entropy");
    qfi->add_flag("--json", qfi_args.as_json, "Print the JSON report");
    qfi->add_option("--out", qfi_args.out_file, "Write the JSON report to this file");

    // approx
    auto* approx = app.add_subcommand("approx", "Concentration of sampled approximate designs");
    ApproxArgs approx_args;
    auto* approx_d = approx->add_option("--d", approx_args.d, "Hilbert space dimension");
    auto* approx_n = approx->add_option("--n", approx_args.n, "Parallel uses for the QFI");
    auto* approx_eps = approx->add_option("--eps", approx_args.eps, "Relative spectral error");
    auto* approx_q = approx->add_option("--q", approx_args.q, "Success probability");
    auto* approx_reps = approx->add_option("--repeats", approx_args.repeats, "Repetitions");
    auto* approx_seed = approx->add_option("--seed", approx_args.seed, "0 = entropy");
    auto* approx_dir = approx->add_option("--out-dir", approx_args.out_dir,
                                          "Output directory (default: SUDEST_OUT_DIR or .)");
    approx->add_option("--prefix", approx_args.prefix, "Output file prefix");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Repeated-trial MSE experiments");
    SimulateArgs sim_args;
    auto* sim_d = simulate->add_option("--d", sim_args.config.d, "Hilbert space dimension");
    auto* sim_n = simulate->add_option("--n", sim_args.ns, "Copy counts (default 1 2 3 4)");
    auto* sim_shots = simulate->add_option("--shots", sim_args.config.shots, "Shots per trial");
    auto* sim_trials = simulate->add_option("--trials", sim_args.config.trials, "Trials");
    auto* sim_input = simulate->add_option("--input", sim_args.config.input,
                                           "mub | sic | approx | product | basis");
    auto* sim_meas = simulate->add_option("--measurement", sim_args.config.measurement,
                                          "optimal | random | locc");
    auto* sim_strategy = simulate->add_option("--strategy", sim_args.config.strategy,
                                              "oracle | two_step | locc");
    auto* sim_bases = simulate->add_option("--random-bases", sim_args.config.random_bases,
                                           "Bases per trial for --measurement random");
    auto* sim_m = simulate->add_option("--approx-m", sim_args.config.approx_m,
                                       "Sampled-basis count for approx inputs (0 = derive)");
    std::vector<double> sim_theta;
    auto* sim_theta_opt = simulate->add_option("--theta", sim_theta,
                                               "True parameter values (default: origin)");
    auto* sim_seed = simulate->add_option("--seed", sim_args.config.seed, "0 = entropy");
    auto* sim_threads = simulate->add_option("--threads", sim_args.config.threads,
                                             "Worker threads (0 = hardware)");
    auto* sim_dir = simulate->add_option("--out-dir", sim_args.out_dir,
                                         "Output directory (default: SUDEST_OUT_DIR or .)");
    simulate->add_option("--prefix", sim_args.prefix, "Output file prefix");

    // verify
    auto* verify = app.add_subcommand("verify", "Run the acceptance identity suite");
    VerifyArgs verify_args;
    auto* verify_seed = verify->add_option("--seed", verify_args.options.seed, "Master seed");
    verify->add_flag("--fast", verify_args.options.fast, "Reduced Monte Carlo budgets");
    verify->add_flag("--inject-failure", verify_args.options.inject_failure,
                     "Test hook: append a failing check");
    auto* verify_threads = verify->add_option("--threads", verify_args.options.threads,
                                              "Worker threads (0 = hardware)");
    verify->add_option("--only", verify_args.options.only, "Run a single check by name");
    verify->add_flag("--json", verify_args.as_json, "Print the JSON report");
    verify->add_option("--out", verify_args.out_file, "Write the JSON report to this file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        ConfigLayer layer;
        if (!config_file.empty()) layer = ConfigLayer(load_json_file(config_file));

        if (build->parsed()) {
            layer.apply(build_kind_opt, "kind", build_kind);
            layer.apply(build_d_opt, "d", build_d);
            return cmd_design_build(build_kind, build_d, build_out);
        }
        if (check->parsed()) return cmd_design_check(check_file, check_out);
        if (qfi->parsed()) {
            layer.apply(qfi_d, "d", qfi_args.config.d);
            layer.apply(qfi_n, "n", qfi_args.config.n);
            layer.apply(qfi_state, "input", qfi_args.config.input);
            layer.apply(qfi_m, "approx_m", qfi_args.config.approx_m);
            layer.apply(qfi_seed, "seed", qfi_args.config.seed);
            return cmd_qfi(std::move(qfi_args));
        }
        if (approx->parsed()) {
            layer.apply(approx_d, "d", approx_args.d);
            layer.apply(approx_n, "n", approx_args.n);
            layer.apply(approx_eps, "eps", approx_args.eps);
            layer.apply(approx_q, "q", approx_args.q);
            layer.apply(approx_reps, "repeats", approx_args.repeats);
            layer.apply(approx_seed, "seed", approx_args.seed);
            layer.apply(approx_dir, "out_dir", approx_args.out_dir);
            return cmd_approx(std::move(approx_args));
        }
        if (simulate->parsed()) {
            layer.apply(sim_d, "d", sim_args.config.d);
            layer.apply(sim_n, "n_values", sim_args.ns);
            layer.apply(sim_shots, "shots", sim_args.config.shots);
            layer.apply(sim_trials, "trials", sim_args.config.trials);
            layer.apply(sim_input, "input", sim_args.config.input);
            layer.apply(sim_meas, "measurement", sim_args.config.measurement);
            layer.apply(sim_strategy, "strategy", sim_args.config.strategy);
            layer.apply(sim_bases, "random_bases", sim_args.config.random_bases);
            layer.apply(sim_m, "approx_m", sim_args.config.approx_m);
            layer.apply(sim_seed, "seed", sim_args.config.seed);
            layer.apply(sim_threads, "threads", sim_args.config.threads);
            layer.apply(sim_dir, "out_dir", sim_args.out_dir);
            std::vector<double> theta = sim_theta;
            layer.apply(sim_theta_opt, "theta_true", theta);
            if (!theta.empty()) {
                sim_args.config.theta_true =
                    Eigen::Map<const RealVector>(theta.data(), static_cast<Index>(theta.size()));
            }
            return cmd_simulate(std::move(sim_args));
        }
        if (verify->parsed()) {
            layer.apply(verify_seed, "seed", verify_args.options.seed);
            layer.apply(verify_threads, "threads", verify_args.options.threads);
            return cmd_verify(std::move(verify_args));
        }
    } catch (const sudest::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
