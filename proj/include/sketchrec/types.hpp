#pragma once

#include <compare>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace sketchrec {

/// Dense real matrix carrying Y, A, B, X and every solver iterate.
using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Location (i, j) of X, equivalently the atom a_i b_j^T.
struct IndexPair {
    std::size_t i = 0;
    std::size_t j = 0;

    friend auto operator<=>(const IndexPair&, const IndexPair&) = default;
};

/// Sparse N x N ground truth (or estimate) stored as support plus values.
struct SparseSignal {
    std::size_t n = 0;
    std::vector<IndexPair> support;
    std::vector<double> values;

    DenseMatrix to_dense() const;
    std::size_t nnz() const noexcept { return support.size(); }

    /// Collects the nonzero entries of a square matrix in column-major order.
    static SparseSignal from_dense(const DenseMatrix& x);
};

bool all_finite(const DenseMatrix& m) noexcept;

}  // namespace sketchrec
