#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library, so a library bug cannot hide behind its own oracle.

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint32_t seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = dist(gen);
    return m;
}

// A X B^T by explicit loops.
inline Eigen::MatrixXd triple_product(const Eigen::MatrixXd& a, const Eigen::MatrixXd& x, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(a.rows(), b.rows());
    for (Eigen::Index r = 0; r < a.rows(); ++r)
        for (Eigen::Index c = 0; c < b.rows(); ++c) {
            double acc = 0.0;
            for (Eigen::Index p = 0; p < x.rows(); ++p)
                for (Eigen::Index q = 0; q < x.cols(); ++q) acc += a(r, p) * x(p, q) * b(c, q);
            out(r, c) = acc;
        }
    return out;
}

inline double shrink(double w, double a) {
    if (w > a) return w - a;
    if (w < -a) return w + a;
    return 0.0;
}

// Kronecker product by index arithmetic rather than blocks.
inline Eigen::MatrixXd kron_entries(const Eigen::MatrixXd& b, const Eigen::MatrixXd& a) {
    Eigen::MatrixXd c(b.rows() * a.rows(), b.cols() * a.cols());
    for (Eigen::Index r = 0; r < c.rows(); ++r)
        for (Eigen::Index s = 0; s < c.cols(); ++s)
            c(r, s) = b(r / a.rows(), s / a.cols()) * a(r % a.rows(), s % a.cols());
    return c;
}

inline double sigma_max(const Eigen::MatrixXd& m) {
    return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
}

// Gaussian elimination with partial pivoting.
inline Eigen::VectorXd gauss_solve(Eigen::MatrixXd m, Eigen::VectorXd rhs) {
    const Eigen::Index n = m.rows();
    for (Eigen::Index col = 0; col < n; ++col) {
        Eigen::Index piv = col;
        for (Eigen::Index r = col + 1; r < n; ++r)
            if (std::abs(m(r, col)) > std::abs(m(piv, col))) piv = r;
        m.row(col).swap(m.row(piv));
        std::swap(rhs(col), rhs(piv));
        for (Eigen::Index r = col + 1; r < n; ++r) {
            const double f = m(r, col) / m(col, col);
            m.row(r) -= f * m.row(col);
            rhs(r) -= f * rhs(col);
        }
    }
    Eigen::VectorXd x(n);
    for (Eigen::Index r = n - 1; r >= 0; --r) {
        double acc = rhs(r);
        for (Eigen::Index c = r + 1; c < n; ++c) acc -= m(r, c) * x(c);
        x(r) = acc / m(r, r);
    }
    return x;
}

// Orthonormal DCT-II entry straight from the definition.
inline double dct_entry(int k, int j, int n) {
    const double pi = std::acos(-1.0);
    const double c = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
    return c * std::cos(pi * (2 * j + 1) * k / (2.0 * n));
}

// Least-squares slope of log(t) against log(n).
inline double loglog_slope(const std::vector<double>& n, const std::vector<double>& t) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(n.size());
    for (std::size_t i = 0; i < n.size(); ++i) {
        const double x = std::log(n[i]), y = std::log(t[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace oracle
