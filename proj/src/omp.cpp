#include "sketchrec/omp.hpp"

#include <algorithm>
#include <string>

#include "sketchrec/errors.hpp"

namespace sketchrec {
namespace {

Eigen::Index idx(std::size_t v) { return static_cast<Eigen::Index>(v); }

void check_problem(const DenseMatrix& y, const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.cols() || y.rows() != a.rows() || y.cols() != b.rows() || a.size() == 0 || b.size() == 0) {
        throw InvalidDimension("OMP: Y is " + std::to_string(y.rows()) + "x" + std::to_string(y.cols()) + ", A is " +
                               std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + ", B is " +
                               std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
}

std::string pair_text(const IndexPair& p) {
    return "(" + std::to_string(p.i) + ", " + std::to_string(p.j) + ")";
}

}  // namespace

OmpState OmpState::initial(const DenseMatrix& y) {
    OmpState s;
    s.residual = y;
    return s;
}

IndexPair select_atom(const DenseMatrix& a, const DenseMatrix& b, const DenseMatrix& r) {
    if (r.rows() != a.rows() || r.cols() != b.rows()) throw InvalidDimension("select_atom: residual shape mismatch");
    if (r.size() == 0 || r.cwiseAbs().maxCoeff() == 0.0) throw ZeroResidual("select_atom called with zero residual");

    const DenseMatrix atr = a.transpose() * r;
    const DenseMatrix corr = atr * b;

    // Row-major scan with strict improvement keeps the lexicographically
    // smallest (i, j) among equal magnitudes.
    IndexPair best;
    double best_mag = -1.0;
    for (Eigen::Index i = 0; i < corr.rows(); ++i) {
        for (Eigen::Index j = 0; j < corr.cols(); ++j) {
            const double mag = std::abs(corr(i, j));
            if (mag > best_mag) {
                best_mag = mag;
                best = {static_cast<std::size_t>(i), static_cast<std::size_t>(j)};
            }
        }
    }
    return best;
}

Vector solve_coeffs(OmpState& state, const DenseMatrix& a, const DenseMatrix& b, const DenseMatrix& y) {
    check_problem(y, a, b);
    if (state.selected.empty()) throw InvalidSparsity("solve_coeffs: no atoms selected");
    const auto n = static_cast<std::size_t>(a.cols());

    for (std::size_t t = state.gram.order(); t < state.selected.size(); ++t) {
        const IndexPair p = state.selected[t];
        if (p.i >= n || p.j >= n) throw InvalidDimension("solve_coeffs: atom " + pair_text(p) + " out of range");
        const auto ai = a.col(idx(p.i));
        const auto bj = b.col(idx(p.j));

        Vector cross(idx(t));
        for (std::size_t m = 0; m < t; ++m) {
            const IndexPair q = state.selected[m];
            if (q == p) throw DegenerateAtom("atom " + pair_text(p) + " selected twice");
            cross(idx(m)) = a.col(idx(q.i)).dot(ai) * b.col(idx(q.j)).dot(bj);
        }
        state.gram.append(cross, ai.squaredNorm() * bj.squaredNorm());
        state.rhs.conservativeResize(idx(t + 1));
        state.rhs(idx(t)) = ai.dot(y * bj);
    }
    state.coeffs = state.gram.solve(state.rhs);
    return state.coeffs;
}

DenseMatrix update_residual(const DenseMatrix& y, const DenseMatrix& a, const DenseMatrix& b, const OmpState& state) {
    check_problem(y, a, b);
    if (static_cast<std::size_t>(state.coeffs.size()) != state.selected.size()) {
        throw InvalidDimension("update_residual: coefficient count does not match selection");
    }
    DenseMatrix r = y;
    for (std::size_t m = 0; m < state.selected.size(); ++m) {
        const IndexPair p = state.selected[m];
        r.noalias() -= state.coeffs(idx(m)) * a.col(idx(p.i)) * b.col(idx(p.j)).transpose();
    }
    return r;
}

OmpResult run_omp(const DenseMatrix& y, const DenseMatrix& a, const DenseMatrix& b, std::size_t sparsity,
                  const OmpOptions& opts, const OmpObserver& observer) {
    check_problem(y, a, b);
    const auto n = static_cast<std::size_t>(a.cols());
    const auto measurements = static_cast<std::size_t>(y.size());
    const std::size_t limit = std::min(measurements, n * n);
    if (sparsity < 1 || sparsity > limit) {
        throw InvalidSparsity("OMP sparsity budget " + std::to_string(sparsity) + " outside [1, " +
                              std::to_string(limit) + "]");
    }

    OmpState state = OmpState::initial(y);
    const double y_norm = y.norm();
    double r_norm = y_norm;
    OmpResult result;

    for (std::size_t t = 0; t < sparsity; ++t) {
        if (r_norm == 0.0 || r_norm <= opts.residual_tol * y_norm) break;
        state.selected.push_back(select_atom(a, b, state.residual));
        solve_coeffs(state, a, b, y);
        state.residual = update_residual(y, a, b, state);
        r_norm = state.residual.norm();
        ++result.iters;
        if (observer) observer(state);
    }

    result.support = state.selected;
    result.coeffs = state.coeffs;
    result.residual_norm = r_norm;
    result.x_hat.n = n;
    for (std::size_t m = 0; m < state.selected.size(); ++m) {
        if (state.coeffs(idx(m)) == 0.0) continue;
        result.x_hat.support.push_back(state.selected[m]);
        result.x_hat.values.push_back(state.coeffs(idx(m)));
    }
    return result;
}

}  // namespace sketchrec
