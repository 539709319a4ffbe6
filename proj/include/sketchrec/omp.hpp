#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "sketchrec/linalg.hpp"
#include "sketchrec/types.hpp"

namespace sketchrec {

/// Greedy state for OMP over rank-one atoms a_i b_j^T.
///
/// `gram` factors D_t, (D_t)_{m,r} = (a_{i_m}^T a_{i_r}) (b_{j_m}^T b_{j_r}),
/// and `rhs` holds d_t(m) = a_{i_m}^T Y b_{j_m}. Both cover the first
/// gram.order() entries of `selected`.
struct OmpState {
    DenseMatrix residual;
    std::vector<IndexPair> selected;
    Vector coeffs;
    GramFactor gram;
    Vector rhs;

    /// R_0 = Y, nothing selected.
    static OmpState initial(const DenseMatrix& y);
};

struct OmpOptions {
    /// Stop early once ||R||_F <= residual_tol * ||Y||_F. Zero disables the
    /// relative test; an exactly zero residual still stops.
    double residual_tol = 1e-6;
};

/// argmax over (i, j) of |(A^T R B)_{ij}|, ties to the smallest (i, j).
/// Throws ZeroResidual when R is identically zero.
IndexPair select_atom(const DenseMatrix& a, const DenseMatrix& b, const DenseMatrix& r);

/// Least-squares coefficients over state.selected. Atoms not yet in the
/// factor are appended one bordered row at a time, then D_t x = d_t is
/// solved with two triangular solves. Throws DegenerateAtom on a repeated or
/// numerically dependent atom.
Vector solve_coeffs(OmpState& state, const DenseMatrix& a, const DenseMatrix& b, const DenseMatrix& y);

/// Y - sum_m coeffs(m) a_{i_m} b_{j_m}^T.
DenseMatrix update_residual(const DenseMatrix& y, const DenseMatrix& a, const DenseMatrix& b, const OmpState& state);

struct OmpResult {
    std::vector<IndexPair> support;  // selection order
    Vector coeffs;
    SparseSignal x_hat;
    double residual_norm = 0.0;
    std::size_t iters = 0;
};

using OmpObserver = std::function<void(const OmpState&)>;

/// Runs `sparsity` OMP iterations (fewer on early exit). Requires
/// 1 <= sparsity <= min(M L, N^2), otherwise InvalidSparsity.
OmpResult run_omp(const DenseMatrix& y, const DenseMatrix& a, const DenseMatrix& b, std::size_t sparsity,
                  const OmpOptions& opts = {}, const OmpObserver& observer = {});

}  // namespace sketchrec
