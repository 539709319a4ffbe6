#include "sketchrec/fista.hpp"

#include <string>

#include "sketchrec/errors.hpp"
#include "sketchrec/linalg.hpp"

namespace sketchrec {
namespace {

void check_problem(const DenseMatrix& y, const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.cols() || y.rows() != a.rows() || y.cols() != b.rows() || a.size() == 0 || b.size() == 0) {
        throw InvalidDimension("FISTA: Y is " + std::to_string(y.rows()) + "x" + std::to_string(y.cols()) + ", A is " +
                               std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + ", B is " +
                               std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
}

}  // namespace

void FistaConfig::validate() const {
    if (!(beta > 0.0 && beta < 1.0)) throw InvalidConfig("beta must lie in (0, 1)");
    if (!(lambda_bar > 0.0)) throw InvalidConfig("lambda_bar must be positive");
    if (!(lambda_init >= lambda_bar)) throw InvalidConfig("lambda_init must be >= lambda_bar");
    if (!std::isfinite(lambda_init)) throw InvalidConfig("lambda_init must be finite");
    if (max_iters < 1) throw InvalidConfig("max_iters must be at least 1");
    if (!(rel_tol >= 0.0)) throw InvalidConfig("rel_tol must be nonnegative");
    if (lipschitz && !(*lipschitz > 0.0 && std::isfinite(*lipschitz))) {
        throw InvalidConfig("lipschitz override must be positive");
    }
}

FistaConfig default_fista_config(const DenseMatrix& y, const DenseMatrix& a, const DenseMatrix& b,
                                 double lambda_init_ratio, double lambda_bar_ratio, double beta) {
    check_problem(y, a, b);
    const double corr = (a.transpose() * y * b).cwiseAbs().maxCoeff();
    FistaConfig cfg;
    cfg.beta = beta;
    cfg.lambda_init = corr > 0.0 ? lambda_init_ratio * corr : 1.0;
    cfg.lambda_bar = lambda_bar_ratio * cfg.lambda_init;
    return cfg;
}

FistaState FistaState::initial(Eigen::Index rows, Eigen::Index cols, double lambda_init) {
    FistaState s;
    s.x_curr = DenseMatrix::Zero(rows, cols);
    s.x_prev = DenseMatrix::Zero(rows, cols);
    s.lambda_k = lambda_init;
    return s;
}

DenseMatrix soft_threshold(const DenseMatrix& w, double a) {
    if (!(a >= 0.0)) throw InvalidThreshold("soft threshold must be nonnegative");
    return w.unaryExpr([a](double v) {
        const double shrunk = std::abs(v) - a;
        if (shrunk <= 0.0) return 0.0;
        return v > 0.0 ? shrunk : -shrunk;
    });
}

LipschitzConstant lipschitz(const DenseMatrix& a, const DenseMatrix& b) {
    const double sa = largest_gram_eigenvalue(a);
    const double sb = largest_gram_eigenvalue(b);
    return {sa * sb};
}

DenseMatrix gradient(const DenseMatrix& z, const DenseMatrix& y, const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix az = a * z;
    DenseMatrix resid = az * b.transpose();
    resid -= y;
    DenseMatrix atr = a.transpose() * resid;
    return atr * b;
}

double objective(const DenseMatrix& x, const DenseMatrix& y, const DenseMatrix& a, const DenseMatrix& b,
                 double lambda) {
    const DenseMatrix resid = y - a * x * b.transpose();
    return 0.5 * resid.squaredNorm() + lambda * x.cwiseAbs().sum();
}

FistaState fista_step(FistaState state, const DenseMatrix& y, const DenseMatrix& a, const DenseMatrix& b,
                      LipschitzConstant lf, const FistaConfig& cfg) {
    if (!(lf.value > 0.0)) throw InvalidConfig("Lipschitz constant must be positive");

    const double w = schedule::momentum_weight(state.t_prev, state.t_curr);
    DenseMatrix z = state.x_curr + w * (state.x_curr - state.x_prev);

    DenseMatrix u = gradient(z, y, a, b);
    u *= -1.0 / lf.value;
    u += z;
    if (!u.allFinite()) throw NumericalDivergence(state.iter, "non-finite gradient step");

    state.x_prev = std::move(state.x_curr);
    state.x_curr = soft_threshold(u, state.lambda_k / lf.value);
    state.t_prev = state.t_curr;
    state.t_curr = schedule::next_t(state.t_curr);
    state.lambda_k = schedule::next_lambda(state.lambda_k, cfg);
    ++state.iter;
    return state;
}

FistaResult run_fista(const DenseMatrix& y, const DenseMatrix& a, const DenseMatrix& b, const FistaConfig& cfg,
                      const FistaObserver& observer) {
    check_problem(y, a, b);
    cfg.validate();
    const LipschitzConstant lf = cfg.lipschitz ? LipschitzConstant{*cfg.lipschitz} : lipschitz(a, b);

    FistaResult result;
    result.lipschitz = lf.value;
    FistaState state = FistaState::initial(a.cols(), b.cols(), cfg.lambda_init);
    if (cfg.record_history) result.history.reserve(std::min<std::size_t>(cfg.max_iters, 100000));

    for (std::size_t step = 0; step < cfg.max_iters; ++step) {
        state = fista_step(std::move(state), y, a, b, lf, cfg);
        ++result.iters_used;
        if (cfg.record_history) result.history.push_back(objective(state.x_curr, y, a, b, cfg.lambda_bar));
        if (observer) observer(state);

        const double change = schedule::relative_change((state.x_curr - state.x_prev).norm(), state.x_prev.norm());
        if (change < cfg.rel_tol) {
            result.converged = true;
            break;
        }
    }
    result.x_hat = std::move(state.x_curr);
    return result;
}

}  // namespace sketchrec
