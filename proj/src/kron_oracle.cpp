#include "sketchrec/kron_oracle.hpp"

#include <limits>
#include <string>

#include "sketchrec/errors.hpp"
#include "sketchrec/linalg.hpp"

namespace sketchrec {
namespace {

Eigen::Index idx(std::size_t v) { return static_cast<Eigen::Index>(v); }

}  // namespace

DenseMatrix kron(const DenseMatrix& b, const DenseMatrix& a, std::size_t cap) {
    if (a.size() == 0 || b.size() == 0) throw InvalidDimension("kron: empty operand");
    const long double entries = static_cast<long double>(a.size()) * static_cast<long double>(b.size());
    if (entries > static_cast<long double>(cap)) {
        throw CapacityError("explicit Kronecker product would hold " + std::to_string(static_cast<double>(entries)) +
                            " entries, above the cap of " + std::to_string(cap));
    }
    const Eigen::Index ar = a.rows();
    const Eigen::Index ac = a.cols();
    DenseMatrix out(b.rows() * ar, b.cols() * ac);
    for (Eigen::Index q = 0; q < b.cols(); ++q) {
        for (Eigen::Index p = 0; p < b.rows(); ++p) out.block(p * ar, q * ac, ar, ac) = b(p, q) * a;
    }
    return out;
}

Vector vectorize(const DenseMatrix& x) { return Eigen::Map<const Vector>(x.data(), x.size()); }

DenseMatrix devectorize(const Vector& x, std::size_t rows, std::size_t cols) {
    if (static_cast<std::size_t>(x.size()) != rows * cols) {
        throw InvalidDimension("devectorize: length " + std::to_string(x.size()) + " is not " +
                               std::to_string(rows) + "x" + std::to_string(cols));
    }
    return Eigen::Map<const DenseMatrix>(x.data(), idx(rows), idx(cols));
}

VectorizedSystem VectorizedSystem::build(const DenseMatrix& y, const DenseMatrix& a, const DenseMatrix& b,
                                         std::size_t cap) {
    if (a.cols() != b.cols() || y.rows() != a.rows() || y.cols() != b.rows()) {
        throw InvalidDimension("vectorized system: inconsistent Y, A, B shapes");
    }
    VectorizedSystem sys;
    sys.c = kron(b, a, cap);
    sys.y = vectorize(y);
    sys.n = static_cast<std::size_t>(a.cols());
    return sys;
}

double vector_lipschitz(const DenseMatrix& c) { return largest_gram_eigenvalue(c); }

VectorFistaResult run_fista_vector(const VectorizedSystem& sys, const FistaConfig& cfg,
                                   const VectorFistaObserver& observer) {
    cfg.validate();
    if (sys.c.rows() != sys.y.size() || static_cast<std::size_t>(sys.c.cols()) != sys.n * sys.n) {
        throw InvalidDimension("run_fista_vector: system shape mismatch");
    }
    const double lf = cfg.lipschitz ? *cfg.lipschitz : vector_lipschitz(sys.c);
    const Eigen::Index dim = sys.c.cols();

    VectorFistaResult result;
    result.lipschitz = lf;
    VectorFistaState s;
    s.x_curr = Vector::Zero(dim);
    s.x_prev = Vector::Zero(dim);
    s.lambda_k = cfg.lambda_init;

    Vector z(dim);
    Vector u(dim);
    Vector resid(sys.c.rows());
    for (std::size_t step = 0; step < cfg.max_iters; ++step) {
        const double w = schedule::momentum_weight(s.t_prev, s.t_curr);
        z = s.x_curr + w * (s.x_curr - s.x_prev);
        resid.noalias() = sys.c * z;
        resid -= sys.y;
        u.noalias() = sys.c.transpose() * resid;
        u = z - u / lf;
        if (!u.allFinite()) throw NumericalDivergence(s.iter, "non-finite gradient step (vector form)");

        s.x_prev.swap(s.x_curr);
        s.x_curr = soft_threshold(u, s.lambda_k / lf);
        s.t_prev = s.t_curr;
        s.t_curr = schedule::next_t(s.t_curr);
        s.lambda_k = schedule::next_lambda(s.lambda_k, cfg);
        ++s.iter;
        ++result.iters_used;

        if (cfg.record_history) {
            const Vector r = sys.y - sys.c * s.x_curr;
            result.history.push_back(0.5 * r.squaredNorm() + cfg.lambda_bar * s.x_curr.cwiseAbs().sum());
        }
        if (observer) observer(s);

        if (schedule::relative_change((s.x_curr - s.x_prev).norm(), s.x_prev.norm()) < cfg.rel_tol) {
            result.converged = true;
            break;
        }
    }
    result.x_hat = std::move(s.x_curr);
    return result;
}

VectorOmpResult run_omp_vector(const VectorizedSystem& sys, std::size_t sparsity, const OmpOptions& opts) {
    const std::size_t n = sys.n;
    const std::size_t limit = std::min(static_cast<std::size_t>(sys.y.size()), n * n);
    if (sparsity > limit) {
        throw InvalidSparsity("vector OMP budget " + std::to_string(sparsity) + " exceeds " + std::to_string(limit));
    }

    VectorOmpResult result;
    GramFactor gram;
    Vector rhs;
    Vector r = sys.y;
    const double y_norm = sys.y.norm();
    double r_norm = y_norm;

    for (std::size_t t = 0; t < sparsity; ++t) {
        if (r_norm == 0.0 || r_norm <= opts.residual_tol * y_norm) break;

        const Vector corr = sys.c.transpose() * r;
        std::size_t best = 0;
        double best_mag = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const std::size_t col = pair_to_column({i, j}, n);
                const double mag = std::abs(corr(idx(col)));
                if (mag > best_mag) {
                    best_mag = mag;
                    best = col;
                }
            }
        }

        const auto atom = sys.c.col(idx(best));
        Vector cross(idx(t));
        for (std::size_t m = 0; m < t; ++m) {
            if (result.support[m] == best) {
                throw DegenerateAtom("column " + std::to_string(best) + " selected twice");
            }
            cross(idx(m)) = sys.c.col(idx(result.support[m])).dot(atom);
        }
        gram.append(cross, atom.squaredNorm());
        rhs.conservativeResize(idx(t + 1));
        rhs(idx(t)) = atom.dot(sys.y);
        result.support.push_back(best);

        result.coeffs = gram.solve(rhs);
        r = sys.y;
        for (std::size_t m = 0; m <= t; ++m) r -= result.coeffs(idx(m)) * sys.c.col(idx(result.support[m]));
        r_norm = r.norm();
    }
    result.residual_norm = r_norm;
    return result;
}

}  // namespace sketchrec
