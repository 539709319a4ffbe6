#include "sketchrec/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "sketchrec/errors.hpp"

namespace sketchrec {
namespace {

void require_positive(std::size_t rows, std::size_t cols, const char* what) {
    if (rows == 0 || cols == 0) throw InvalidDimension(std::string(what) + ": dimensions must be positive");
}

void require_wide(std::size_t rows, std::size_t cols, const char* what) {
    require_positive(rows, cols, what);
    if (rows > cols) {
        throw InvalidDimension(std::string(what) + ": " + std::to_string(rows) + " rows exceed " +
                               std::to_string(cols) + " columns, rows cannot be orthonormal");
    }
}

Eigen::Index idx(std::size_t v) { return static_cast<Eigen::Index>(v); }

}  // namespace

std::string_view to_string(EnsembleKind kind) noexcept {
    switch (kind) {
        case EnsembleKind::GaussianOrthonormalRows: return "gaussian";
        case EnsembleKind::DctRandomRows: return "dct";
        case EnsembleKind::Binary: return "binary";
        case EnsembleKind::Identity: return "identity";
    }
    return "unknown";
}

std::optional<EnsembleKind> parse_ensemble(std::string_view name) noexcept {
    if (name == "gaussian") return EnsembleKind::GaussianOrthonormalRows;
    if (name == "dct") return EnsembleKind::DctRandomRows;
    if (name == "binary") return EnsembleKind::Binary;
    if (name == "identity") return EnsembleKind::Identity;
    return std::nullopt;
}

DenseMatrix gen_gaussian(std::size_t rows, std::size_t cols, Rng& rng) {
    require_wide(rows, cols, "gen_gaussian");
    DenseMatrix draw(idx(cols), idx(rows));
    for (Eigen::Index c = 0; c < draw.cols(); ++c) {
        for (Eigen::Index r = 0; r < draw.rows(); ++r) draw(r, c) = rng.normal();
    }
    Eigen::HouseholderQR<DenseMatrix> qr(draw);
    DenseMatrix q = qr.householderQ() * DenseMatrix::Identity(idx(cols), idx(rows));
    const auto& packed = qr.matrixQR();
    for (Eigen::Index k = 0; k < q.cols(); ++k) {
        if (packed(k, k) < 0.0) q.col(k) = -q.col(k);
    }
    return q.transpose();
}

DenseMatrix dct_matrix(std::size_t n) {
    require_positive(n, n, "dct_matrix");
    DenseMatrix d(idx(n), idx(n));
    const double nn = static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double scale = k == 0 ? std::sqrt(1.0 / nn) : std::sqrt(2.0 / nn);
        for (std::size_t j = 0; j < n; ++j) {
            d(idx(k), idx(j)) =
                scale * std::cos(std::numbers::pi * (2.0 * static_cast<double>(j) + 1.0) * static_cast<double>(k) /
                                 (2.0 * nn));
        }
    }
    return d;
}

DenseMatrix gen_dct_rows(std::size_t rows, std::size_t cols, Rng& rng) {
    require_wide(rows, cols, "gen_dct_rows");
    const DenseMatrix full = dct_matrix(cols);
    // Partial Fisher-Yates: the first `rows` slots are a uniform subset in uniform order.
    std::vector<std::size_t> order(cols);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t pick = r + static_cast<std::size_t>(rng.below(cols - r));
        std::swap(order[r], order[pick]);
    }
    DenseMatrix out(idx(rows), idx(cols));
    for (std::size_t r = 0; r < rows; ++r) out.row(idx(r)) = full.row(idx(order[r]));
    return out;
}

DenseMatrix gen_binary(std::size_t rows, std::size_t cols, Rng& rng) {
    require_positive(rows, cols, "gen_binary");
    const double level = 1.0 / static_cast<double>(cols);
    DenseMatrix out(idx(rows), idx(cols));
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
        for (Eigen::Index c = 0; c < out.cols(); ++c) out(r, c) = rng.coin() ? level : 0.0;
    }
    return out;
}

DenseMatrix gen_ensemble(EnsembleKind kind, std::size_t rows, std::size_t cols, Rng& rng) {
    switch (kind) {
        case EnsembleKind::GaussianOrthonormalRows: return gen_gaussian(rows, cols, rng);
        case EnsembleKind::DctRandomRows: return gen_dct_rows(rows, cols, rng);
        case EnsembleKind::Binary: return gen_binary(rows, cols, rng);
        case EnsembleKind::Identity:
            if (rows != cols) throw InvalidDimension("identity ensemble requires a square matrix");
            require_positive(rows, cols, "identity ensemble");
            return DenseMatrix::Identity(idx(rows), idx(cols));
    }
    throw InvalidConfig("unknown ensemble");
}

SparseSignal gen_sparse_signal(std::size_t n, std::size_t k, Rng& rng) {
    if (n == 0) throw InvalidDimension("gen_sparse_signal: n must be positive");
    if (k == 0 || k > n) {
        throw InvalidSparsity("gen_sparse_signal: column sparsity " + std::to_string(k) + " outside [1, " +
                              std::to_string(n) + "]");
    }
    SparseSignal s;
    s.n = n;
    s.support.reserve(n * k);
    s.values.reserve(n * k);
    std::vector<std::size_t> rows(n);
    std::vector<std::size_t> picked(k);
    for (std::size_t col = 0; col < n; ++col) {
        std::iota(rows.begin(), rows.end(), std::size_t{0});
        for (std::size_t r = 0; r < k; ++r) {
            const std::size_t pick = r + static_cast<std::size_t>(rng.below(n - r));
            std::swap(rows[r], rows[pick]);
        }
        std::copy_n(rows.begin(), k, picked.begin());
        std::sort(picked.begin(), picked.end());
        for (const std::size_t row : picked) {
            const double magnitude = rng.uniform(kSignalMagnitudeLow, kSignalMagnitudeHigh);
            s.support.push_back({row, col});
            s.values.push_back(rng.coin() ? magnitude : -magnitude);
        }
    }
    return s;
}

DenseMatrix apply_model(const DenseMatrix& a, const DenseMatrix& x, const DenseMatrix& b, double sigma_v, Rng& rng) {
    if (x.rows() != x.cols() || a.cols() != x.rows() || b.cols() != x.cols()) {
        throw InvalidDimension("apply_model: A is " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                               ", X is " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()) + ", B is " +
                               std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
    if (!(sigma_v >= 0.0) || !std::isfinite(sigma_v)) throw InvalidConfig("apply_model: sigma_v must be >= 0");
    DenseMatrix y = a * x * b.transpose();
    if (sigma_v > 0.0) {
        for (Eigen::Index c = 0; c < y.cols(); ++c) {
            for (Eigen::Index r = 0; r < y.rows(); ++r) y(r, c) += sigma_v * rng.normal();
        }
    }
    return y;
}

}  // namespace sketchrec
