#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "sketchrec/fista.hpp"
#include "sketchrec/omp.hpp"
#include "sketchrec/types.hpp"

// Explicit-Kronecker reference solvers. They exist to check the matrix-form
// solvers and to time the vector formulation; they are desk-scale only.

namespace sketchrec {

/// Largest explicit Kronecker product (entries) the oracle will build.
inline constexpr std::size_t kDefaultKronCap = 200'000'000;

/// Standard Kronecker product: block (p, q) of the result is B(p, q) * A.
/// Throws CapacityError when rows(B) rows(A) cols(B) cols(A) exceeds `cap`.
DenseMatrix kron(const DenseMatrix& b, const DenseMatrix& a, std::size_t cap = kDefaultKronCap);

/// Column-stacking vec(X).
Vector vectorize(const DenseMatrix& x);
DenseMatrix devectorize(const Vector& x, std::size_t rows, std::size_t cols);

/// Column index of atom (i, j) in B (x) A, and back: c = i + j N.
inline std::size_t pair_to_column(IndexPair p, std::size_t n) noexcept { return p.i + p.j * n; }
inline IndexPair column_to_pair(std::size_t c, std::size_t n) noexcept { return {c % n, c / n}; }

/// y = vec(Y), C = B (x) A.
struct VectorizedSystem {
    Vector y;
    DenseMatrix c;
    std::size_t n = 0;

    static VectorizedSystem build(const DenseMatrix& y, const DenseMatrix& a, const DenseMatrix& b,
                                  std::size_t cap = kDefaultKronCap);
};

/// Vector-form FISTA state; iterates are N^2-vectors.
struct VectorFistaState {
    Vector x_curr;
    Vector x_prev;
    double t_curr = 1.0;
    double t_prev = 1.0;
    double lambda_k = 1.0;
    std::size_t iter = 1;
};

struct VectorFistaResult {
    Vector x_hat;
    std::size_t iters_used = 0;
    std::vector<double> history;
    bool converged = false;
    double lipschitz = 0.0;
};

using VectorFistaObserver = std::function<void(const VectorFistaState&)>;

/// sigma_max(C)^2 by power iteration on C^T C.
double vector_lipschitz(const DenseMatrix& c);

/// u = z - (1/L) C^T (C z - y), then soft thresholding; same schedule and
/// stopping rule as run_fista.
VectorFistaResult run_fista_vector(const VectorizedSystem& sys, const FistaConfig& cfg,
                                   const VectorFistaObserver& observer = {});

struct VectorOmpResult {
    std::vector<std::size_t> support;  // columns of C, selection order
    Vector coeffs;
    double residual_norm = 0.0;
};

/// Textbook OMP on (y, C). Ties in |C^T r| go to the smallest (i, j) under
/// column_to_pair. sparsity = 0 returns an empty estimate.
VectorOmpResult run_omp_vector(const VectorizedSystem& sys, std::size_t sparsity, const OmpOptions& opts = {});

}  // namespace sketchrec
