#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "sketchrec/types.hpp"

namespace sketchrec {

/// Continuation schedule and stopping rule for FISTA.
///
/// lambda_k starts at lambda_init and decays geometrically by beta down to
/// lambda_bar. Iteration stops when the relative iterate change drops below
/// rel_tol or after max_iters steps; rel_tol = 0 disables the change test.
struct FistaConfig {
    double lambda_init = 1.0;
    double beta = 0.97;
    double lambda_bar = 1e-4;
    std::size_t max_iters = 10000;
    double rel_tol = 1e-8;
    /// Step constant override. Unset: computed from the operator.
    std::optional<double> lipschitz;
    /// Record the objective (with lambda_bar) after every step.
    bool record_history = true;

    /// Throws InvalidConfig unless 0 < beta < 1, 0 < lambda_bar <= lambda_init,
    /// max_iters >= 1, rel_tol >= 0 and any override is positive.
    void validate() const;
};

inline constexpr double kDefaultLambdaInitRatio = 0.99;
inline constexpr double kDefaultLambdaBarRatio = 1e-4;
inline constexpr double kDefaultBeta = 0.97;

/// Defaults tied to the data: lambda_init = 0.99 * max|A^T Y B|, the largest
/// value for which the first step is nonzero, and lambda_bar = 1e-4 * lambda_init.
/// Falls back to lambda_init = 1 when A^T Y B vanishes.
FistaConfig default_fista_config(const DenseMatrix& y, const DenseMatrix& a, const DenseMatrix& b,
                                 double lambda_init_ratio = kDefaultLambdaInitRatio,
                                 double lambda_bar_ratio = kDefaultLambdaBarRatio, double beta = kDefaultBeta);

/// Gradient Lipschitz constant of F(X) = 1/2 ||Y - A X B^T||_F^2.
struct LipschitzConstant {
    double value = 1.0;
};

/// Iterate pair and scalars carried between FISTA steps. `iter` is k, starting
/// at 1 with X^0 = X^1 = 0 and t_0 = t_1 = 1.
struct FistaState {
    DenseMatrix x_curr;
    DenseMatrix x_prev;
    double t_curr = 1.0;
    double t_prev = 1.0;
    double lambda_k = 1.0;
    std::size_t iter = 1;

    static FistaState initial(Eigen::Index rows, Eigen::Index cols, double lambda_init);
};

/// Momentum and continuation updates shared by the matrix solver and the
/// vector oracle, so both follow one schedule.
namespace schedule {

inline double next_t(double t) { return (1.0 + std::sqrt(4.0 * t * t + 1.0)) / 2.0; }

inline double momentum_weight(double t_prev, double t_curr) { return (t_prev - 1.0) / t_curr; }

inline double next_lambda(double lambda, const FistaConfig& cfg) {
    return std::max(cfg.beta * lambda, cfg.lambda_bar);
}

inline double relative_change(double diff_norm, double prev_norm) { return diff_norm / std::max(1.0, prev_norm); }

}  // namespace schedule

/// Entrywise sgn(w) * max(|w| - a, 0). Throws InvalidThreshold for a < 0.
DenseMatrix soft_threshold(const DenseMatrix& w, double a);

/// (sigma_max(A) sigma_max(B))^2 via power iteration on A^T A and B^T B.
/// Throws DegenerateOperator if either matrix is zero.
LipschitzConstant lipschitz(const DenseMatrix& a, const DenseMatrix& b);

/// A^T (A Z B^T - Y) B, the gradient of F at Z.
DenseMatrix gradient(const DenseMatrix& z, const DenseMatrix& y, const DenseMatrix& a, const DenseMatrix& b);

/// 1/2 ||Y - A X B^T||_F^2 + lambda ||X||_1.
double objective(const DenseMatrix& x, const DenseMatrix& y, const DenseMatrix& a, const DenseMatrix& b,
                 double lambda);

/// One accelerated proximal-gradient step. The gradient is applied as
/// two-sided products; B (x) A is never formed. Throws NumericalDivergence
/// if the step produces a non-finite value.
FistaState fista_step(FistaState state, const DenseMatrix& y, const DenseMatrix& a, const DenseMatrix& b,
                      LipschitzConstant lf, const FistaConfig& cfg);

struct FistaResult {
    DenseMatrix x_hat;
    std::size_t iters_used = 0;
    std::vector<double> history;
    bool converged = false;
    double lipschitz = 0.0;
};

/// Called after every step with the updated state.
using FistaObserver = std::function<void(const FistaState&)>;

/// Runs fista_step from the zero start until the relative change test passes
/// or max_iters steps have been taken.
FistaResult run_fista(const DenseMatrix& y, const DenseMatrix& a, const DenseMatrix& b, const FistaConfig& cfg,
                      const FistaObserver& observer = {});

}  // namespace sketchrec
