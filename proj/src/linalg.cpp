#include "sketchrec/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sketchrec/errors.hpp"
#include "sketchrec/rng.hpp"

namespace sketchrec {

DenseMatrix SparseSignal::to_dense() const {
    DenseMatrix x = DenseMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t m = 0; m < support.size(); ++m) {
        x(static_cast<Eigen::Index>(support[m].i), static_cast<Eigen::Index>(support[m].j)) = values[m];
    }
    return x;
}

SparseSignal SparseSignal::from_dense(const DenseMatrix& x) {
    if (x.rows() != x.cols()) throw InvalidDimension("sparse signal must be square");
    SparseSignal s;
    s.n = static_cast<std::size_t>(x.rows());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            if (x(i, j) != 0.0) {
                s.support.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j)});
                s.values.push_back(x(i, j));
            }
        }
    }
    return s;
}

bool all_finite(const DenseMatrix& m) noexcept { return m.allFinite(); }

double largest_gram_eigenvalue(const DenseMatrix& m, const PowerIterationOptions& opts) {
    if (m.size() == 0 || m.cwiseAbs().maxCoeff() == 0.0) {
        throw DegenerateOperator("power iteration on a zero matrix");
    }
    Rng rng(opts.seed);
    Vector v(m.cols());
    for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = rng.normal();
    v.normalize();

    double estimate = 0.0;
    for (std::size_t it = 0; it < opts.max_iters; ++it) {
        const Vector mv = m * v;
        const double rayleigh = mv.squaredNorm();
        Vector w = m.transpose() * mv;
        const double norm = w.norm();
        if (norm == 0.0) {
            // Start vector fell in the null space; restart from a fresh draw.
            for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = rng.normal();
            v.normalize();
            continue;
        }
        v = w / norm;
        if (it > 0 && std::abs(rayleigh - estimate) <= opts.rel_tol * rayleigh) {
            estimate = rayleigh;
            break;
        }
        estimate = rayleigh;
    }
    // One more Rayleigh quotient with the final vector.
    return std::max(estimate, (m * v).squaredNorm());
}

void GramFactor::append(const Vector& cross, double diag) {
    const Eigen::Index t = lower_.rows();
    if (cross.size() != t) {
        throw InvalidDimension("gram border has " + std::to_string(cross.size()) + " entries, expected " +
                               std::to_string(t));
    }
    if (!(diag > 0.0)) throw DegenerateAtom("atom has zero norm");

    Vector w = cross;
    if (t > 0) lower_.triangularView<Eigen::Lower>().solveInPlace(w);
    const double schur = diag - w.squaredNorm();
    if (!(schur > kPivotThreshold * diag)) {
        throw DegenerateAtom("selected atoms are linearly dependent (relative pivot " +
                             std::to_string(schur / diag) + ")");
    }
    lower_.conservativeResize(t + 1, t + 1);
    lower_.row(t).head(t) = w.transpose();
    lower_.col(t).head(t).setZero();
    lower_(t, t) = std::sqrt(schur);
}

Vector GramFactor::solve(const Vector& rhs) const {
    if (rhs.size() != lower_.rows()) throw InvalidDimension("gram solve: right-hand side length mismatch");
    Vector x = rhs;
    if (x.size() == 0) return x;
    lower_.triangularView<Eigen::Lower>().solveInPlace(x);
    lower_.transpose().triangularView<Eigen::Upper>().solveInPlace(x);
    return x;
}

}  // namespace sketchrec
