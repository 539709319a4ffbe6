#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "sketchrec/errors.hpp"
#include "sketchrec/fista.hpp"
#include "sketchrec/harness.hpp"
#include "sketchrec/matrix_io.hpp"
#include "sketchrec/omp.hpp"
#include "sketchrec/sensing.hpp"

namespace sketchrec::cli {
namespace {

namespace fs = std::filesystem;

constexpr std::uint64_t kDefaultSeed = 1;
constexpr const char* kSeedEnv = "SKETCHREC_SEED";

// Raised for bad flag values that CLI11 cannot catch by itself.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::uint64_t parse_seed_text(const std::string& text, const std::string& origin) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        throw UsageError(origin + ": not an unsigned integer: '" + text + "'");
    }
    return v;
}

// --seed, then $SKETCHREC_SEED, then `fallback`.
std::uint64_t resolve_seed(const CLI::Option* flag, std::uint64_t flag_value, std::uint64_t fallback) {
    if (flag->count() > 0) return flag_value;
    if (const char* env = std::getenv(kSeedEnv); env != nullptr && *env != '\0') {
        return parse_seed_text(env, kSeedEnv);
    }
    return fallback;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot open " + path.string() + " for writing");
    f << text;
    if (!f) throw Error("write failed: " + path.string());
}

EnsembleKind ensemble_arg(const std::string& name) {
    const auto kind = parse_ensemble(name);
    if (!kind) throw UsageError("unknown ensemble '" + name + "' (gaussian, dct, binary, identity)");
    return *kind;
}

void check_format(const std::string& format) {
    if (format != "csv" && format != "json") throw UsageError("--format must be csv or json");
}

// ---- gen -------------------------------------------------------------------

struct GenArgs {
    std::size_t n = 40, m = 20, l = 20, k = 2;
    double sigma_v2 = 0.01;
    std::string ensemble_a = "gaussian", ensemble_b = "gaussian";
    std::uint64_t seed = kDefaultSeed;
    CLI::Option* seed_opt = nullptr;
    std::string dir = ".";
};

int cmd_gen(GenArgs& g, std::ostream& out) {
    const std::uint64_t seed = resolve_seed(g.seed_opt, g.seed, kDefaultSeed);
    if (g.k < 1 || g.k > g.n) throw UsageError("--k must lie in [1, n]");
    if (!(g.sigma_v2 >= 0.0)) throw UsageError("--sigma-v2 must be nonnegative");
    Rng rng(seed);
    const DenseMatrix a = gen_ensemble(ensemble_arg(g.ensemble_a), g.m, g.n, rng);
    const DenseMatrix b = gen_ensemble(ensemble_arg(g.ensemble_b), g.l, g.n, rng);
    const DenseMatrix x = gen_sparse_signal(g.n, g.k, rng).to_dense();
    const DenseMatrix y = apply_model(a, x, b, std::sqrt(g.sigma_v2), rng);

    const fs::path dir(g.dir);
    fs::create_directories(dir);
    write_matrix_csv(dir / "A.csv", a);
    write_matrix_csv(dir / "B.csv", b);
    write_matrix_csv(dir / "X.csv", x);
    write_matrix_csv(dir / "Y.csv", y);
    out << "seed=" << seed << " n=" << g.n << " m=" << g.m << " l=" << g.l << " k=" << g.k
        << " sigma_v2=" << format_double(g.sigma_v2) << "\n";
    out << "wrote " << (dir / "A.csv").string() << ", B.csv, X.csv, Y.csv\n";
    return kSuccess;
}

// ---- recover ---------------------------------------------------------------

struct RecoverArgs {
    std::string y_path, a_path, b_path, output;
    std::string solver = "fista";
    std::size_t d = 0;
    std::optional<double> lambda_init, lambda_bar;
    double beta = kDefaultBeta;
    std::size_t max_iters = 10000;
    double rel_tol = 1e-8;
    double residual_tol = 1e-6;
    std::uint64_t seed = kDefaultSeed;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* d_opt = nullptr;
};

void check_shapes(const RecoverArgs& r, const DenseMatrix& y, const DenseMatrix& a, const DenseMatrix& b) {
    auto dims = [](const DenseMatrix& m) { return std::to_string(m.rows()) + "x" + std::to_string(m.cols()); };
    if (a.cols() != b.cols()) {
        throw InvalidDimension(r.b_path + ": B is " + dims(b) + " but A (" + r.a_path + ") is " + dims(a) +
                               "; column counts must match");
    }
    if (y.rows() != a.rows()) {
        throw InvalidDimension(r.y_path + ": Y is " + dims(y) + " but A (" + r.a_path + ") has " +
                               std::to_string(a.rows()) + " rows");
    }
    if (y.cols() != b.rows()) {
        throw InvalidDimension(r.y_path + ": Y is " + dims(y) + " but B (" + r.b_path + ") has " +
                               std::to_string(b.rows()) + " rows");
    }
}

int cmd_recover(RecoverArgs& r, std::ostream& out) {
    const std::uint64_t seed = resolve_seed(r.seed_opt, r.seed, kDefaultSeed);
    const DenseMatrix y = read_matrix_csv(r.y_path);
    const DenseMatrix a = read_matrix_csv(r.a_path);
    const DenseMatrix b = read_matrix_csv(r.b_path);
    check_shapes(r, y, a, b);

    out << "seed=" << seed << " solver=" << r.solver << "\n";
    DenseMatrix x_hat;
    if (r.solver == "fista") {
        FistaConfig cfg = default_fista_config(y, a, b, kDefaultLambdaInitRatio, kDefaultLambdaBarRatio, r.beta);
        if (r.lambda_init) cfg.lambda_init = *r.lambda_init;
        cfg.lambda_bar = r.lambda_bar ? *r.lambda_bar : cfg.lambda_init * kDefaultLambdaBarRatio;
        cfg.max_iters = r.max_iters;
        cfg.rel_tol = r.rel_tol;
        cfg.record_history = false;
        const auto res = run_fista(y, a, b, cfg);
        x_hat = res.x_hat;
        out << "iterations=" << res.iters_used << " converged=" << (res.converged ? "true" : "false")
            << " objective=" << format_double(objective(x_hat, y, a, b, cfg.lambda_bar)) << "\n";
    } else if (r.solver == "omp") {
        if (r.d_opt->count() == 0) throw UsageError("--d is required for the omp solver");
        const auto res = run_omp(y, a, b, r.d, OmpOptions{r.residual_tol});
        x_hat = res.x_hat.to_dense();
        out << "iterations=" << res.iters << " residual_norm=" << format_double(res.residual_norm) << "\n";
    } else {
        throw UsageError("--solver must be fista or omp");
    }
    write_matrix_csv(r.output, x_hat);
    out << "wrote " << r.output << "\n";
    return kSuccess;
}

// ---- sweep -----------------------------------------------------------------

struct SweepArgs {
    std::string preset_name;
    std::string config_path;
    std::vector<std::string> sets;
    std::size_t trials = 0;
    CLI::Option* trials_opt = nullptr;
    std::uint64_t seed = kDefaultSeed;
    CLI::Option* seed_opt = nullptr;
    std::size_t jobs = 0;
    std::string output;
    std::string format = "csv";
    bool timing = false;
};

std::vector<ExperimentConfig> resolve_sweep(const SweepArgs& s) {
    std::vector<ExperimentConfig> series;
    if (!s.preset_name.empty()) {
        series = preset(s.preset_name);
    } else {
        ExperimentConfig base;
        base.m_values = default_ml_grid();
        series.push_back(base);
    }
    std::string config_text;
    if (!s.config_path.empty()) {
        std::ifstream f(s.config_path, std::ios::binary);
        if (!f) throw InvalidConfig("cannot open config file " + s.config_path);
        std::ostringstream ss;
        ss << f.rdbuf();
        config_text = ss.str();
    }
    for (auto& cfg : series) {
        if (!config_text.empty()) {
            try {
                cfg = parse_config_text(config_text, cfg);
            } catch (const InvalidConfig& e) {
                throw InvalidConfig(s.config_path + ": " + e.what());
            }
        }
        for (const auto& kv : s.sets) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw InvalidConfig("--set expects key=value, got '" + kv + "'");
            apply_setting(cfg, std::string_view(kv).substr(0, eq), std::string_view(kv).substr(eq + 1));
        }
        if (s.trials_opt->count() > 0) cfg.trials = s.trials;
        cfg.seed = resolve_seed(s.seed_opt, s.seed, cfg.seed);
        cfg.validate();
    }
    return series;
}

int cmd_sweep(SweepArgs& s, std::ostream& out, std::ostream& err) {
    check_format(s.format);
    const auto series = resolve_sweep(s);
    SweepOptions opts;
    opts.jobs = s.jobs ? s.jobs : std::max(1u, std::thread::hardware_concurrency());
    opts.record_runtime = s.timing;

    std::vector<ResultRow> rows;
    std::size_t failures = 0;
    for (const auto& cfg : series) {
        err << "running " << cfg.name << " (" << cfg.points().size() << " points x " << cfg.trials
            << " trials, seed=" << cfg.seed << ")\n";
        for (auto& row : run_sweep(cfg, opts)) {
            failures += row.failures;
            rows.push_back(row);
        }
    }

    const std::string body = s.format == "csv" ? results_to_csv(rows) : results_to_json(rows).dump(2) + "\n";
    if (s.output.empty()) {
        out << body;
    } else {
        write_text(s.output, body);
        nlohmann::json sidecar = nlohmann::json::array();
        for (const auto& cfg : series) sidecar.push_back(config_to_json(cfg));
        write_text(s.output + ".config.json", sidecar.dump(2) + "\n");
        out << "seed=" << series.front().seed << " rows=" << rows.size() << " failed_trials=" << failures
            << "\nwrote " << s.output << " and " << s.output << ".config.json\n";
    }
    return kSuccess;
}

// ---- bench -----------------------------------------------------------------

struct BenchArgs {
    std::vector<std::size_t> n_values{20, 40, 60};
    std::size_t iters = 1000;
    std::size_t repeats = 3;
    std::uint64_t seed = kDefaultSeed;
    CLI::Option* seed_opt = nullptr;
    std::string output;
    std::string format = "csv";
};

int cmd_bench(BenchArgs& b, std::ostream& out) {
    check_format(b.format);
    if (b.iters < 1) throw UsageError("--iters must be at least 1");
    if (b.repeats < 1) throw UsageError("--repeats must be at least 1");
    TimingOptions opts;
    opts.repeats = b.repeats;
    opts.seed = resolve_seed(b.seed_opt, b.seed, kDefaultSeed);
    const auto rows = run_timing(b.n_values, b.iters, opts);
    const std::string body = b.format == "csv" ? timing_to_csv(rows) : timing_to_json(rows).dump(2) + "\n";
    if (b.output.empty()) {
        out << body;
    } else {
        write_text(b.output, body);
        out << "seed=" << opts.seed << "\n";
        for (const auto& r : rows) {
            out << "n=" << r.n << " matrix_s=" << format_double(r.matrix_s);
            if (r.vector_s) out << " vector_s=" << format_double(*r.vector_s) << " speedup=" << *r.speedup();
            else out << " vector_s=capacity";
            out << "\n";
        }
        out << "wrote " << b.output << "\n";
    }
    return kSuccess;
}

// ---- verify ----------------------------------------------------------------

struct VerifyArgs {
    EquivalenceOptions eq;
    CLI::Option* seed_opt = nullptr;
};

int cmd_verify(VerifyArgs& v, std::ostream& out) {
    v.eq.seed = resolve_seed(v.seed_opt, v.eq.seed, kDefaultSeed);
    v.eq.omp_budget = std::min<std::size_t>(4, v.eq.m * v.eq.l);
    const auto report = check_equivalence(v.eq);
    out << "seed=" << v.eq.seed << " n=" << v.eq.n << " m=" << v.eq.m << " l=" << v.eq.l
        << " iters=" << v.eq.fista_iters << (v.eq.perturb_lambda ? " perturb_lambda=true" : "") << "\n";
    out << "fista max_iterate_diff=" << report.max_iterate_diff << "\n";
    out << "omp steps=" << report.omp_steps << " selections_identical=" << (report.omp_selection_identical ? "true" : "false")
        << " max_coeff_diff=" << report.max_coeff_diff << "\n";
    out << (report.passed() ? "PASS" : "FAIL") << "\n";
    return report.passed() ? kSuccess : kFailure;
}

// Usage and input problems are 2; solver and numerical failures are 1.
int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const UsageError*>(&e) || dynamic_cast<const InvalidConfig*>(&e) ||
        dynamic_cast<const InvalidDimension*>(&e) || dynamic_cast<const InvalidSparsity*>(&e) ||
        dynamic_cast<const InvalidThreshold*>(&e) || dynamic_cast<const ParseError*>(&e) ||
        dynamic_cast<const CapacityError*>(&e) || dynamic_cast<const fs::filesystem_error*>(&e)) {
        return kUsage;
    }
    return kFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sparse recovery from two-sided sketches Y = A X B^T + V"};
    app.require_subcommand(1);
    app.footer(std::string("Seed: --seed, else $") + kSeedEnv + ", else 1. Exit codes: 0 ok, 1 failure, 2 usage.");

    GenArgs g;
    auto* gen = app.add_subcommand("gen", "Generate A, B, X and Y as CSV files");
    gen->add_option("--n", g.n, "Signal dimension N")->capture_default_str();
    gen->add_option("--m", g.m, "Rows of A")->capture_default_str();
    gen->add_option("--l", g.l, "Rows of B")->capture_default_str();
    gen->add_option("--k", g.k, "Nonzeros per column of X")->capture_default_str();
    gen->add_option("--sigma-v2", g.sigma_v2, "Noise variance")->capture_default_str();
    gen->add_option("--ensemble-a", g.ensemble_a, "gaussian|dct|binary|identity")->capture_default_str();
    gen->add_option("--ensemble-b", g.ensemble_b, "gaussian|dct|binary|identity")->capture_default_str();
    g.seed_opt = gen->add_option("--seed", g.seed, "RNG seed");
    gen->add_option("--output-dir", g.dir, "Directory for the CSV files")->capture_default_str();

    RecoverArgs r;
    auto* recover = app.add_subcommand("recover", "Recover X from Y, A, B CSV files");
    recover->add_option("--y", r.y_path, "Sketch Y (M x L)")->required();
    recover->add_option("--a", r.a_path, "Left operator A (M x N)")->required();
    recover->add_option("--b", r.b_path, "Right operator B (L x N)")->required();
    recover->add_option("--solver", r.solver, "fista|omp")->capture_default_str();
    r.d_opt = recover->add_option("--d", r.d, "OMP sparsity budget");
    recover->add_option("--lambda-init", r.lambda_init, "FISTA initial lambda (default 0.99 max|A^T Y B|)");
    recover->add_option("--lambda-bar", r.lambda_bar, "FISTA final lambda (default 1e-4 lambda-init)");
    recover->add_option("--beta", r.beta, "FISTA lambda decay")->capture_default_str();
    recover->add_option("--max-iters", r.max_iters, "FISTA iteration cap")->capture_default_str();
    recover->add_option("--rel-tol", r.rel_tol, "FISTA relative change tolerance")->capture_default_str();
    recover->add_option("--residual-tol", r.residual_tol, "OMP relative residual stop")->capture_default_str();
    r.seed_opt = recover->add_option("--seed", r.seed, "Seed (recorded in the output)");
    recover->add_option("--output", r.output, "Where to write X_hat")->required();

    SweepArgs s;
    auto* sweep = app.add_subcommand("sweep", "Run a Monte-Carlo sweep from a preset or config file");
    std::string preset_help = "Preset name (";
    for (const auto& p : preset_names()) preset_help += p + (p == preset_names().back() ? ")" : ", ");
    sweep->add_option("preset", s.preset_name, preset_help);
    sweep->add_option("--config", s.config_path, "key=value config file, applied over the preset");
    sweep->add_option("--set", s.sets, "Override one key=value (repeatable, applied last)");
    s.trials_opt = sweep->add_option("--trials", s.trials, "Trials per grid point");
    s.seed_opt = sweep->add_option("--seed", s.seed, "Base seed");
    sweep->add_option("--jobs", s.jobs, "Worker threads (default: core count)");
    sweep->add_option("--output", s.output, "Output file (default stdout); a .config.json sidecar is written next to it");
    sweep->add_option("--format", s.format, "csv|json")->capture_default_str();
    sweep->add_flag("--timing", s.timing, "Record wall-clock runtime (output no longer byte-reproducible)");

    BenchArgs b;
    auto* bench = app.add_subcommand("bench", "Time matrix vs vector FISTA");
    bench->add_option("--n-values", b.n_values, "Even N >= 20")->delimiter(',')->capture_default_str();
    bench->add_option("--iters", b.iters, "Iterations per run")->capture_default_str();
    bench->add_option("--repeats", b.repeats, "Best-of repeats")->capture_default_str();
    b.seed_opt = bench->add_option("--seed", b.seed, "RNG seed");
    bench->add_option("--output", b.output, "Output file (default stdout)");
    bench->add_option("--format", b.format, "csv|json")->capture_default_str();

    VerifyArgs v;
    auto* verify = app.add_subcommand("verify", "Check matrix-form solvers against the Kronecker oracle");
    verify->add_option("--n", v.eq.n, "N (at most 12)")->capture_default_str();
    verify->add_option("--m", v.eq.m, "Rows of A")->capture_default_str();
    verify->add_option("--l", v.eq.l, "Rows of B")->capture_default_str();
    verify->add_option("--iters", v.eq.fista_iters, "FISTA iterations compared")->capture_default_str();
    v.seed_opt = verify->add_option("--seed", v.eq.seed, "RNG seed");
    verify->add_flag("--perturb-lambda", v.eq.perturb_lambda, "Negative control: skew one side's lambda schedule");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsage;
    }

    try {
        if (gen->parsed()) return cmd_gen(g, out);
        if (recover->parsed()) return cmd_recover(r, out);
        if (sweep->parsed()) return cmd_sweep(s, out, err);
        if (bench->parsed()) return cmd_bench(b, out);
        if (verify->parsed()) return cmd_verify(v, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
    return kUsage;
}

}  // namespace sketchrec::cli
