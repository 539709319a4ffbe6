#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sketchrec/sensing.hpp"
#include "sketchrec/types.hpp"

namespace sketchrec {

enum class SolverKind { FistaMatrix, FistaVector, OmpMatrix, OmpVector };

std::string_view to_string(SolverKind kind) noexcept;
std::optional<SolverKind> parse_solver(std::string_view name) noexcept;

/// FISTA hyperparameters as ratios of the data-driven defaults, so a sweep
/// can carry one schedule across problem instances.
struct FistaSchedule {
    double lambda_init_ratio = 0.99;
    double lambda_bar_ratio = 1e-4;
    double beta = 0.97;
    std::size_t max_iters = 10000;
    double rel_tol = 1e-8;
};

/// Declarative description of one sweep series.
struct ExperimentConfig {
    std::string name = "custom";
    std::size_t n = 40;
    std::vector<std::size_t> m_values;
    std::vector<std::size_t> l_values;
    /// true: points are (m, m) for m in m_values; false: m_values x l_values.
    bool lock_ml = true;
    std::size_t k = 2;
    double sigma_v2 = 0.01;
    std::size_t trials = 50;
    EnsembleKind ensemble_a = EnsembleKind::GaussianOrthonormalRows;
    EnsembleKind ensemble_b = EnsembleKind::GaussianOrthonormalRows;
    SolverKind solver = SolverKind::FistaMatrix;
    FistaSchedule fista;
    /// OMP budget; 0 means the true sparsity k * n.
    std::size_t omp_budget = 0;
    double omp_residual_tol = 1e-6;
    std::uint64_t seed = 1;

    std::vector<std::pair<std::size_t, std::size_t>> points() const;
    std::size_t effective_omp_budget() const noexcept { return omp_budget ? omp_budget : k * n; }

    /// Throws InvalidConfig on trials = 0, M or L outside [1, n], k outside
    /// [1, n], negative noise, or an empty grid.
    void validate() const;
};

/// One averaged measurement line.
struct ResultRow {
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t l = 0;
    std::size_t k = 0;
    double sigma_v2 = 0.0;
    EnsembleKind ensemble_a = EnsembleKind::GaussianOrthonormalRows;
    EnsembleKind ensemble_b = EnsembleKind::GaussianOrthonormalRows;
    SolverKind solver = SolverKind::FistaMatrix;
    std::size_t trials = 0;
    std::size_t failures = 0;
    double mean_nre = 0.0;
    double mean_support_frac = 0.0;
    double mean_runtime_s = 0.0;
    std::uint64_t seed = 0;
};

/// ||X - X_hat||_F / ||X||_F. Throws UndefinedMetric for X = 0.
double normalized_error(const DenseMatrix& truth, const DenseMatrix& estimate);

/// |support(truth) intersect support(estimate)| / |support(truth)|.
/// Throws UndefinedMetric for an empty true support.
double support_fraction(const SparseSignal& truth, const SparseSignal& estimate);

/// The |truth support| largest-magnitude entries of a dense estimate, as the
/// estimated support for solvers that do not return one.
SparseSignal top_entries(const DenseMatrix& estimate, std::size_t count);

struct SweepOptions {
    std::size_t jobs = 1;
    /// When false the runtime column is written as 0, making output
    /// byte-reproducible.
    bool record_runtime = true;
};

struct TrialOutcome {
    bool failed = false;
    std::string error;
    double nre = 0.0;
    double support_frac = 0.0;
    double runtime_s = 0.0;
};

/// One seeded trial at (m, l): fresh A, B, X and noise from `rng`, then solve.
TrialOutcome run_trial(const ExperimentConfig& cfg, std::size_t m, std::size_t l, Rng& rng);

/// Runs every grid point. Trial t at point p uses Rng::for_stream(seed, p, t),
/// so the result does not depend on `jobs`. Failed trials are counted and
/// excluded from the means.
std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg, const SweepOptions& opts = {});

/// Matrix-vs-vector FISTA wall time at one N.
struct TimingRow {
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t l = 0;
    std::size_t k = 0;
    std::size_t iters = 0;
    double matrix_s = 0.0;
    /// Unset when the vector path hit the Kronecker capacity cap.
    std::optional<double> vector_s;
    double max_abs_diff = 0.0;
    std::uint64_t seed = 0;

    std::optional<double> speedup() const {
        if (!vector_s) return std::nullopt;
        return *vector_s / matrix_s;
    }
};

struct TimingOptions {
    std::size_t repeats = 3;  // best-of
    std::uint64_t seed = 1;
    double sigma_v2 = 0.01;
    std::size_t kron_cap = 200'000'000;
};

/// Times run_fista and run_fista_vector on one Gaussian instance per N with
/// K = ceil(N / 20), M = L = N / 2, exactly `iters` iterations each and the
/// same lambda schedule and step constant. Requires even N >= 20, iters >= 1.
std::vector<TimingRow> run_timing(const std::vector<std::size_t>& n_values, std::size_t iters,
                                  const TimingOptions& opts = {});

/// Matrix-vs-vector equivalence on one seeded Gaussian instance.
struct EquivalenceOptions {
    std::size_t n = 8;
    std::size_t m = 4;
    std::size_t l = 4;
    std::uint64_t seed = 1;
    std::size_t fista_iters = 200;
    std::size_t omp_budget = 4;
    /// Negative control: scale the vector side's lambda schedule by 1.05.
    bool perturb_lambda = false;
};

/// Largest N the equivalence check accepts (explicit Kronecker size).
inline constexpr std::size_t kMaxEquivalenceN = 12;

struct EquivalenceReport {
    double max_iterate_diff = 0.0;
    bool omp_selection_identical = false;
    double max_coeff_diff = 0.0;
    std::size_t omp_steps = 0;

    static constexpr double kTolerance = 1e-8;
    bool passed() const {
        return max_iterate_diff < kTolerance && omp_selection_identical && max_coeff_diff < kTolerance;
    }
};

/// Compares every FISTA iterate (matrix vs vector form, same schedule and
/// step constant) and the OMP selection sequence and coefficients.
/// Throws CapacityError for n > kMaxEquivalenceN.
EquivalenceReport check_equivalence(const EquivalenceOptions& opts);

// Result persistence. CSV: LF endings, '.' decimal, fixed header.
inline constexpr std::string_view kResultCsvHeader =
    "n,m,l,k,sigma_v2,ensemble_a,ensemble_b,solver,trials,failures,mean_nre,mean_support_frac,mean_runtime_s,seed";
inline constexpr std::string_view kTimingCsvHeader = "n,m,l,k,iters,matrix_s,vector_s,speedup,max_abs_diff,seed";

std::string results_to_csv(const std::vector<ResultRow>& rows);
nlohmann::json results_to_json(const std::vector<ResultRow>& rows);
std::string timing_to_csv(const std::vector<TimingRow>& rows);
nlohmann::json timing_to_json(const std::vector<TimingRow>& rows);

// Presets and config files.

/// Named sweep presets: "fig1", "fig2", "fig3". Each is a list of series.
std::vector<std::string> preset_names();
/// Throws InvalidConfig for an unknown name.
std::vector<ExperimentConfig> preset(std::string_view name);

/// Grid shared by the presets: M = L in {8, 12, ..., 40} at N = 40.
std::vector<std::size_t> default_ml_grid();

/// Applies one key=value setting (keys are ExperimentConfig field names).
/// Throws InvalidConfig for unknown keys or unparsable values.
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// Flat key=value text; '#' starts a comment, blank lines ignored.
ExperimentConfig parse_config_text(std::string_view text, ExperimentConfig base = {});

nlohmann::json config_to_json(const ExperimentConfig& cfg);

}  // namespace sketchrec
