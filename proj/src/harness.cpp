#include "sketchrec/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>
#include <thread>

#include "sketchrec/errors.hpp"
#include "sketchrec/fista.hpp"
#include "sketchrec/kron_oracle.hpp"
#include "sketchrec/matrix_io.hpp"
#include "sketchrec/omp.hpp"

namespace sketchrec {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

FistaConfig trial_fista_config(const ExperimentConfig& cfg, const DenseMatrix& y, const DenseMatrix& a,
                               const DenseMatrix& b) {
    FistaConfig fc = default_fista_config(y, a, b, cfg.fista.lambda_init_ratio, cfg.fista.lambda_bar_ratio,
                                          cfg.fista.beta);
    fc.max_iters = cfg.fista.max_iters;
    fc.rel_tol = cfg.fista.rel_tol;
    fc.record_history = false;
    return fc;
}

}  // namespace

std::string_view to_string(SolverKind kind) noexcept {
    switch (kind) {
        case SolverKind::FistaMatrix: return "fista_matrix";
        case SolverKind::FistaVector: return "fista_vector";
        case SolverKind::OmpMatrix: return "omp_matrix";
        case SolverKind::OmpVector: return "omp_vector";
    }
    return "unknown";
}

std::optional<SolverKind> parse_solver(std::string_view name) noexcept {
    if (name == "fista_matrix") return SolverKind::FistaMatrix;
    if (name == "fista_vector") return SolverKind::FistaVector;
    if (name == "omp_matrix") return SolverKind::OmpMatrix;
    if (name == "omp_vector") return SolverKind::OmpVector;
    return std::nullopt;
}

double normalized_error(const DenseMatrix& truth, const DenseMatrix& estimate) {
    if (truth.rows() != estimate.rows() || truth.cols() != estimate.cols()) {
        throw InvalidDimension("normalized_error: shape mismatch");
    }
    const double denom = truth.norm();
    if (denom == 0.0) throw UndefinedMetric("normalized error of a zero signal");
    return (truth - estimate).norm() / denom;
}

double support_fraction(const SparseSignal& truth, const SparseSignal& estimate) {
    if (truth.n != estimate.n) throw InvalidDimension("support_fraction: dimension mismatch");
    if (truth.support.empty()) throw UndefinedMetric("support fraction of an empty support");
    const std::set<IndexPair> found(estimate.support.begin(), estimate.support.end());
    std::size_t hits = 0;
    for (const auto& p : truth.support) hits += found.count(p);
    return static_cast<double>(hits) / static_cast<double>(truth.support.size());
}

SparseSignal top_entries(const DenseMatrix& estimate, std::size_t count) {
    SparseSignal all = SparseSignal::from_dense(estimate);
    std::vector<std::size_t> order(all.support.size());
    for (std::size_t m = 0; m < order.size(); ++m) order[m] = m;
    // Stable on equal magnitudes so the pick is deterministic.
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t l, std::size_t r) { return std::abs(all.values[l]) > std::abs(all.values[r]); });
    order.resize(std::min(count, order.size()));
    std::sort(order.begin(), order.end());
    SparseSignal out;
    out.n = all.n;
    for (const std::size_t m : order) {
        out.support.push_back(all.support[m]);
        out.values.push_back(all.values[m]);
    }
    return out;
}

TrialOutcome run_trial(const ExperimentConfig& cfg, std::size_t m, std::size_t l, Rng& rng) {
    TrialOutcome out;
    try {
        const DenseMatrix a = gen_ensemble(cfg.ensemble_a, m, cfg.n, rng);
        const DenseMatrix b = gen_ensemble(cfg.ensemble_b, l, cfg.n, rng);
        const SparseSignal truth = gen_sparse_signal(cfg.n, cfg.k, rng);
        const DenseMatrix x = truth.to_dense();
        const DenseMatrix y = apply_model(a, x, b, std::sqrt(cfg.sigma_v2), rng);

        DenseMatrix x_hat;
        SparseSignal support_estimate;
        const auto start = Clock::now();
        switch (cfg.solver) {
            case SolverKind::FistaMatrix: {
                x_hat = run_fista(y, a, b, trial_fista_config(cfg, y, a, b)).x_hat;
                break;
            }
            case SolverKind::FistaVector: {
                const auto sys = VectorizedSystem::build(y, a, b);
                const auto res = run_fista_vector(sys, trial_fista_config(cfg, y, a, b));
                x_hat = devectorize(res.x_hat, cfg.n, cfg.n);
                break;
            }
            case SolverKind::OmpMatrix: {
                const std::size_t budget = std::min(cfg.effective_omp_budget(), m * l);
                auto res = run_omp(y, a, b, budget, OmpOptions{cfg.omp_residual_tol});
                x_hat = res.x_hat.to_dense();
                support_estimate = std::move(res.x_hat);
                break;
            }
            case SolverKind::OmpVector: {
                const std::size_t budget = std::min(cfg.effective_omp_budget(), m * l);
                const auto sys = VectorizedSystem::build(y, a, b);
                const auto res = run_omp_vector(sys, budget, OmpOptions{cfg.omp_residual_tol});
                support_estimate.n = cfg.n;
                x_hat = DenseMatrix::Zero(static_cast<Eigen::Index>(cfg.n), static_cast<Eigen::Index>(cfg.n));
                for (std::size_t s = 0; s < res.support.size(); ++s) {
                    const IndexPair p = column_to_pair(res.support[s], cfg.n);
                    support_estimate.support.push_back(p);
                    support_estimate.values.push_back(res.coeffs(static_cast<Eigen::Index>(s)));
                    x_hat(static_cast<Eigen::Index>(p.i), static_cast<Eigen::Index>(p.j)) =
                        res.coeffs(static_cast<Eigen::Index>(s));
                }
                break;
            }
        }
        out.runtime_s = seconds_since(start);

        if (cfg.solver == SolverKind::FistaMatrix || cfg.solver == SolverKind::FistaVector) {
            support_estimate = top_entries(x_hat, truth.nnz());
        }
        out.nre = normalized_error(x, x_hat);
        out.support_frac = support_fraction(truth, support_estimate);
    } catch (const std::exception& e) {
        out.failed = true;
        out.error = e.what();
    }
    return out;
}

std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg, const SweepOptions& opts) {
    cfg.validate();
    const auto points = cfg.points();
    const std::size_t total = points.size() * cfg.trials;
    std::vector<TrialOutcome> outcomes(total);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t task = next++; task < total; task = next++) {
            const std::size_t p = task / cfg.trials;
            const std::size_t t = task % cfg.trials;
            Rng rng = Rng::for_stream(cfg.seed, p, t);
            outcomes[task] = run_trial(cfg, points[p].first, points[p].second, rng);
        }
    };
    const std::size_t jobs = std::max<std::size_t>(1, std::min(opts.jobs, total));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(jobs);
        for (std::size_t w = 0; w < jobs; ++w) pool.emplace_back(worker);
    }

    std::vector<ResultRow> rows;
    rows.reserve(points.size());
    for (std::size_t p = 0; p < points.size(); ++p) {
        ResultRow row;
        row.n = cfg.n;
        row.m = points[p].first;
        row.l = points[p].second;
        row.k = cfg.k;
        row.sigma_v2 = cfg.sigma_v2;
        row.ensemble_a = cfg.ensemble_a;
        row.ensemble_b = cfg.ensemble_b;
        row.solver = cfg.solver;
        row.trials = cfg.trials;
        row.seed = cfg.seed;
        double nre = 0.0, frac = 0.0, runtime = 0.0;
        std::size_t ok = 0;
        for (std::size_t t = 0; t < cfg.trials; ++t) {
            const auto& o = outcomes[p * cfg.trials + t];
            if (o.failed) {
                ++row.failures;
                continue;
            }
            ++ok;
            nre += o.nre;
            frac += o.support_frac;
            runtime += o.runtime_s;
        }
        const double nan = std::numeric_limits<double>::quiet_NaN();
        row.mean_nre = ok ? nre / static_cast<double>(ok) : nan;
        row.mean_support_frac = ok ? frac / static_cast<double>(ok) : nan;
        row.mean_runtime_s = !opts.record_runtime ? 0.0 : ok ? runtime / static_cast<double>(ok) : nan;
        rows.push_back(row);
    }
    return rows;
}

std::vector<TimingRow> run_timing(const std::vector<std::size_t>& n_values, std::size_t iters,
                                  const TimingOptions& opts) {
    if (iters < 1) throw InvalidConfig("timing: iters must be at least 1");
    if (n_values.empty()) throw InvalidConfig("timing: no N values");
    for (const std::size_t n : n_values) {
        if (n < 20 || n % 2 != 0) throw InvalidConfig("timing: N must be even and >= 20, got " + std::to_string(n));
    }
    const std::size_t repeats = std::max<std::size_t>(1, opts.repeats);

    std::vector<TimingRow> rows;
    for (const std::size_t n : n_values) {
        TimingRow row;
        row.n = n;
        row.m = row.l = n / 2;
        row.k = (n + 19) / 20;
        row.iters = iters;
        row.seed = opts.seed;

        Rng rng = Rng::for_stream(opts.seed, n, 0);
        const DenseMatrix a = gen_gaussian(row.m, n, rng);
        const DenseMatrix b = gen_gaussian(row.l, n, rng);
        const DenseMatrix x = gen_sparse_signal(n, row.k, rng).to_dense();
        const DenseMatrix y = apply_model(a, x, b, std::sqrt(opts.sigma_v2), rng);

        FistaConfig fc = default_fista_config(y, a, b);
        fc.max_iters = iters;
        fc.rel_tol = 0.0;
        fc.record_history = false;
        fc.lipschitz = lipschitz(a, b).value;

        DenseMatrix matrix_hat;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < repeats; ++r) {
            const auto start = Clock::now();
            auto res = run_fista(y, a, b, fc);
            best = std::min(best, seconds_since(start));
            matrix_hat = std::move(res.x_hat);
        }
        row.matrix_s = best;

        try {
            const auto sys = VectorizedSystem::build(y, a, b, opts.kron_cap);
            Vector vector_hat;
            best = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < repeats; ++r) {
                const auto start = Clock::now();
                auto res = run_fista_vector(sys, fc);
                best = std::min(best, seconds_since(start));
                vector_hat = std::move(res.x_hat);
            }
            row.vector_s = best;
            row.max_abs_diff = (vectorize(matrix_hat) - vector_hat).cwiseAbs().maxCoeff();
        } catch (const CapacityError&) {
            row.vector_s.reset();
        }
        rows.push_back(row);
    }
    return rows;
}

std::string results_to_csv(const std::vector<ResultRow>& rows) {
    std::string out(kResultCsvHeader);
    out += '\n';
    for (const auto& r : rows) {
        out += std::to_string(r.n) + ',' + std::to_string(r.m) + ',' + std::to_string(r.l) + ',' +
               std::to_string(r.k) + ',' + format_double(r.sigma_v2) + ',' + std::string(to_string(r.ensemble_a)) +
               ',' + std::string(to_string(r.ensemble_b)) + ',' + std::string(to_string(r.solver)) + ',' +
               std::to_string(r.trials) + ',' + std::to_string(r.failures) + ',' + format_double(r.mean_nre) + ',' +
               format_double(r.mean_support_frac) + ',' + format_double(r.mean_runtime_s) + ',' +
               std::to_string(r.seed) + '\n';
    }
    return out;
}

namespace {

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

nlohmann::json results_to_json(const std::vector<ResultRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
        arr.push_back({{"n", r.n},
                       {"m", r.m},
                       {"l", r.l},
                       {"k", r.k},
                       {"sigma_v2", r.sigma_v2},
                       {"ensemble_a", to_string(r.ensemble_a)},
                       {"ensemble_b", to_string(r.ensemble_b)},
                       {"solver", to_string(r.solver)},
                       {"trials", r.trials},
                       {"failures", r.failures},
                       {"mean_nre", number_or_null(r.mean_nre)},
                       {"mean_support_frac", number_or_null(r.mean_support_frac)},
                       {"mean_runtime_s", number_or_null(r.mean_runtime_s)},
                       {"seed", r.seed}});
    }
    return arr;
}

std::string timing_to_csv(const std::vector<TimingRow>& rows) {
    std::string out(kTimingCsvHeader);
    out += '\n';
    for (const auto& r : rows) {
        const auto speedup = r.speedup();
        out += std::to_string(r.n) + ',' + std::to_string(r.m) + ',' + std::to_string(r.l) + ',' +
               std::to_string(r.k) + ',' + std::to_string(r.iters) + ',' + format_double(r.matrix_s) + ',' +
               (r.vector_s ? format_double(*r.vector_s) : std::string()) + ',' +
               (speedup ? format_double(*speedup) : std::string()) + ',' + format_double(r.max_abs_diff) + ',' +
               std::to_string(r.seed) + '\n';
    }
    return out;
}

nlohmann::json timing_to_json(const std::vector<TimingRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
        const auto speedup = r.speedup();
        arr.push_back({{"n", r.n},
                       {"m", r.m},
                       {"l", r.l},
                       {"k", r.k},
                       {"iters", r.iters},
                       {"matrix_s", r.matrix_s},
                       {"vector_s", r.vector_s ? nlohmann::json(*r.vector_s) : nlohmann::json(nullptr)},
                       {"speedup", speedup ? nlohmann::json(*speedup) : nlohmann::json(nullptr)},
                       {"max_abs_diff", r.max_abs_diff},
                       {"seed", r.seed}});
    }
    return arr;
}

}  // namespace sketchrec

namespace sketchrec {

EquivalenceReport check_equivalence(const EquivalenceOptions& opts) {
    if (opts.n > kMaxEquivalenceN) {
        throw CapacityError("equivalence check supports n <= " + std::to_string(kMaxEquivalenceN) + ", got " +
                            std::to_string(opts.n));
    }
    if (opts.fista_iters < 1) throw InvalidConfig("fista_iters must be at least 1");
    Rng rng(opts.seed);
    const DenseMatrix a = gen_gaussian(opts.m, opts.n, rng);
    const DenseMatrix b = gen_gaussian(opts.l, opts.n, rng);
    const DenseMatrix x = gen_sparse_signal(opts.n, 1, rng).to_dense();
    const DenseMatrix y = apply_model(a, x, b, 0.1, rng);
    const auto sys = VectorizedSystem::build(y, a, b);

    FistaConfig fc = default_fista_config(y, a, b);
    fc.max_iters = opts.fista_iters;
    fc.rel_tol = 0.0;
    fc.record_history = false;
    fc.lipschitz = lipschitz(a, b).value;

    std::vector<Vector> matrix_iterates;
    run_fista(y, a, b, fc, [&](const FistaState& s) { matrix_iterates.push_back(vectorize(s.x_curr)); });

    FistaConfig vc = fc;
    if (opts.perturb_lambda) {
        vc.lambda_init *= 1.05;
        vc.lambda_bar *= 1.05;
    }
    EquivalenceReport report;
    std::size_t k = 0;
    run_fista_vector(sys, vc, [&](const VectorFistaState& s) {
        const double diff = (s.x_curr - matrix_iterates.at(k++)).cwiseAbs().maxCoeff();
        report.max_iterate_diff = std::max(report.max_iterate_diff, diff);
    });
    if (k != matrix_iterates.size()) report.max_iterate_diff = std::numeric_limits<double>::infinity();

    const std::size_t budget = std::min(opts.omp_budget, opts.m * opts.l);
    const auto mat = run_omp(y, a, b, budget);
    const auto vec = run_omp_vector(sys, budget);
    report.omp_steps = mat.support.size();
    report.omp_selection_identical = mat.support.size() == vec.support.size();
    for (std::size_t s = 0; report.omp_selection_identical && s < mat.support.size(); ++s) {
        report.omp_selection_identical = pair_to_column(mat.support[s], opts.n) == vec.support[s];
        report.max_coeff_diff = std::max(report.max_coeff_diff, std::abs(mat.coeffs(static_cast<Eigen::Index>(s)) -
                                                                         vec.coeffs(static_cast<Eigen::Index>(s))));
    }
    return report;
}

}  // namespace sketchrec
