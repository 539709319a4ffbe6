#pragma once

#include <cstddef>
#include <cstdint>

#include "sketchrec/types.hpp"

namespace sketchrec {

struct PowerIterationOptions {
    std::size_t max_iters = 1000;
    double rel_tol = 1e-8;
    std::uint64_t seed = 0x5EED5EEDULL;
};

/// Largest eigenvalue of the Gram matrix M^T M, i.e. sigma_max(M)^2, by
/// power iteration with a seeded start vector. Never forms M^T M.
/// Throws DegenerateOperator when M is all zeros.
double largest_gram_eigenvalue(const DenseMatrix& m, const PowerIterationOptions& opts = {});

/// Lower-triangular Cholesky factor of a Gram matrix grown one bordered
/// row at a time. Shared by the matrix and vector OMP refits.
class GramFactor {
public:
    /// Relative Schur-complement pivot (new pivot / diagonal entry) below which
    /// an appended atom is considered linearly dependent on earlier ones.
    static constexpr double kPivotThreshold = 1e-12;

    /// Borders the factor with a new atom. `cross` holds the inner products of
    /// the new atom with every existing atom, `diag` its squared norm.
    /// Throws DegenerateAtom when the pivot falls below threshold.
    void append(const Vector& cross, double diag);

    /// Solves (L L^T) x = rhs.
    Vector solve(const Vector& rhs) const;

    std::size_t order() const noexcept { return static_cast<std::size_t>(lower_.rows()); }
    const DenseMatrix& lower() const noexcept { return lower_; }

    /// L L^T, for checks.
    DenseMatrix reconstruct() const { return lower_ * lower_.transpose(); }

private:
    DenseMatrix lower_;
};

}  // namespace sketchrec
