#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "sketchrec/rng.hpp"
#include "sketchrec/types.hpp"

namespace sketchrec {

/// Measurement ensembles. Identity is a debug ensemble (square only) used
/// to build trivially invertible sketches.
enum class EnsembleKind { GaussianOrthonormalRows, DctRandomRows, Binary, Identity };

std::string_view to_string(EnsembleKind kind) noexcept;
std::optional<EnsembleKind> parse_ensemble(std::string_view name) noexcept;

/// Gaussian draw with orthonormalized rows: QR of the transposed
/// cols x rows draw, signs fixed so R has a positive diagonal.
DenseMatrix gen_gaussian(std::size_t rows, std::size_t cols, Rng& rng);

/// Orthonormal DCT-II matrix of order n, entry (k, j) = c_k cos(pi (2j + 1) k / 2n).
DenseMatrix dct_matrix(std::size_t n);

/// `rows` distinct rows of the cols x cols orthonormal DCT-II matrix,
/// chosen uniformly without replacement, in draw order.
DenseMatrix gen_dct_rows(std::size_t rows, std::size_t cols, Rng& rng);

/// Entries i.i.d. 1/cols or 0 with equal probability.
DenseMatrix gen_binary(std::size_t rows, std::size_t cols, Rng& rng);

DenseMatrix gen_ensemble(EnsembleKind kind, std::size_t rows, std::size_t cols, Rng& rng);

/// N x N signal with exactly k nonzeros per column at uniform locations.
/// Values have a fair random sign and magnitude uniform on [200, 250].
SparseSignal gen_sparse_signal(std::size_t n, std::size_t k, Rng& rng);

inline constexpr double kSignalMagnitudeLow = 200.0;
inline constexpr double kSignalMagnitudeHigh = 250.0;

/// Y = A X B^T + V with V i.i.d. Normal(0, sigma_v^2). sigma_v = 0 draws nothing.
DenseMatrix apply_model(const DenseMatrix& a, const DenseMatrix& x, const DenseMatrix& b, double sigma_v, Rng& rng);

}  // namespace sketchrec
