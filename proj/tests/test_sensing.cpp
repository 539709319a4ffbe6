#include <gtest/gtest.h>

#include <set>

#include "oracles.hpp"
#include "sketchrec/errors.hpp"
#include "sketchrec/linalg.hpp"
#include "sketchrec/rng.hpp"
#include "sketchrec/sensing.hpp"

using namespace sketchrec;

namespace {

double orthonormality_error(const DenseMatrix& g) {
    const DenseMatrix gram = g * g.transpose();
    return (gram - DenseMatrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

}  // namespace

TEST(Rng, SameSeedSameStream) {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, KnownEngineOutput) {
    // mt19937_64 is pinned by the standard: the 10000th draw from the default seed.
    Rng rng(5489u);
    for (int i = 0; i < 9999; ++i) rng.next_u64();
    EXPECT_EQ(rng.next_u64(), 9981545732273789042ULL);
}

TEST(Rng, StreamsDiffer) {
    Rng a = Rng::for_stream(1, 0, 0), b = Rng::for_stream(1, 0, 1), c = Rng::for_stream(1, 1, 0);
    const auto x = a.next_u64(), y = b.next_u64(), z = c.next_u64();
    EXPECT_NE(x, y);
    EXPECT_NE(x, z);
    EXPECT_NE(y, z);
}

TEST(Rng, UniformAndBelowRanges) {
    Rng rng(3);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 70000; ++i) {
        const double u = rng.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        const auto b = rng.below(7);
        ASSERT_LT(b, 7u);
        ++counts[b];
    }
    for (int c : counts) EXPECT_NEAR(c, 10000, 500);
}

TEST(Rng, NormalMoments) {
    Rng rng(11);
    double s = 0, s2 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        s += z;
        s2 += z * z;
    }
    EXPECT_NEAR(s / n, 0.0, 0.01);
    EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(GenGaussian, OneByOneIsUnitSign) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        Rng rng(seed);
        const auto g = gen_gaussian(1, 1, rng);
        EXPECT_DOUBLE_EQ(std::abs(g(0, 0)), 1.0);
    }
}

TEST(GenGaussian, OrthonormalRows) {
    Rng rng(7);
    EXPECT_LT(orthonormality_error(gen_gaussian(3, 8, rng)), 1e-10);
    for (std::size_t rows : {1u, 5u, 20u, 40u}) {
        Rng r2(rows);
        EXPECT_LT(orthonormality_error(gen_gaussian(rows, 40, r2)), 1e-10) << rows;
    }
}

TEST(GenGaussian, SpectralNormIsOne) {
    Rng rng(1);
    const auto g = gen_gaussian(4, 8, rng);
    // Power iteration on G G^T, done here by hand.
    Vector v = Vector::Ones(4);
    double lambda = 0;
    for (int i = 0; i < 500; ++i) {
        Vector w = g * (g.transpose() * v);
        lambda = w.norm() / v.norm();
        v = w / w.norm();
    }
    EXPECT_NEAR(std::sqrt(lambda), 1.0, 1e-10);
    EXPECT_NEAR(oracle::sigma_max(g), 1.0, 1e-10);
}

TEST(GenGaussian, RowsExceedColsRejected) {
    Rng rng(1);
    EXPECT_THROW(gen_gaussian(5, 4, rng), InvalidDimension);
}

TEST(GenDct, OneByOne) {
    Rng rng(9);
    const auto d = gen_dct_rows(1, 1, rng);
    EXPECT_DOUBLE_EQ(d(0, 0), 1.0);
}

TEST(GenDct, TwoRowsOrthonormal) {
    for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
        Rng rng(seed);
        const auto d = gen_dct_rows(2, 4, rng);
        EXPECT_NEAR(d.row(0).norm(), 1.0, 1e-12);
        EXPECT_NEAR(d.row(1).norm(), 1.0, 1e-12);
        EXPECT_NEAR(d.row(0).dot(d.row(1)), 0.0, 1e-12);
    }
}

TEST(GenDct, FourByFourIsRowPermutation) {
    DenseMatrix full(4, 4);
    for (int k = 0; k < 4; ++k)
        for (int j = 0; j < 4; ++j) full(k, j) = oracle::dct_entry(k, j, 4);
    for (std::uint64_t seed : {1u, 5u, 17u}) {
        Rng rng(seed);
        const auto d = gen_dct_rows(4, 4, rng);
        std::set<int> used;
        for (int r = 0; r < 4; ++r) {
            int match = -1;
            for (int k = 0; k < 4; ++k)
                if ((d.row(r) - full.row(k)).cwiseAbs().maxCoeff() < 1e-14) match = k;
            ASSERT_GE(match, 0) << "row " << r << " is not a DCT-II row";
            used.insert(match);
        }
        EXPECT_EQ(used.size(), 4u);
    }
}

TEST(GenDct, FullMatrixMatchesDefinition) {
    const auto d = dct_matrix(40);
    for (int k = 0; k < 40; ++k)
        for (int j = 0; j < 40; ++j) ASSERT_NEAR(d(k, j), oracle::dct_entry(k, j, 40), 1e-14);
    EXPECT_LT(orthonormality_error(d), 1e-10);
}

TEST(GenDct, RowsAreDistinctAndOrthonormal) {
    Rng rng(2);
    const auto d = gen_dct_rows(30, 40, rng);
    EXPECT_LT(orthonormality_error(d), 1e-10);
}

TEST(GenDct, RowsExceedColsRejected) {
    Rng rng(1);
    EXPECT_THROW(gen_dct_rows(5, 4, rng), InvalidDimension);
}

TEST(GenBinary, EntriesInAlphabet) {
    Rng rng(1);
    const auto b = gen_binary(1, 4, rng);
    for (Eigen::Index j = 0; j < 4; ++j) EXPECT_TRUE(b(0, j) == 0.0 || b(0, j) == 0.25);
    const auto big = gen_binary(20, 40, rng);
    for (Eigen::Index i = 0; i < big.size(); ++i) {
        const double e = big.data()[i];
        ASSERT_TRUE(e == 0.0 || e == 1.0 / 40.0);
    }
}

TEST(GenBinary, HalfTheEntriesAreNonzero) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        Rng rng(seed);
        const auto b = gen_binary(100, 100, rng);
        const double frac = static_cast<double>((b.array() != 0.0).count()) / 10000.0;
        EXPECT_GE(frac, 0.45);
        EXPECT_LE(frac, 0.55);
    }
}

TEST(Ensemble, NamesRoundTrip) {
    for (auto k : {EnsembleKind::GaussianOrthonormalRows, EnsembleKind::DctRandomRows, EnsembleKind::Binary,
                   EnsembleKind::Identity}) {
        EXPECT_EQ(parse_ensemble(to_string(k)), k);
    }
    EXPECT_FALSE(parse_ensemble("bernoulli"));
}

TEST(Ensemble, IdentityIsSquareOnly) {
    Rng rng(1);
    EXPECT_TRUE(gen_ensemble(EnsembleKind::Identity, 5, 5, rng).isIdentity());
    EXPECT_THROW(gen_ensemble(EnsembleKind::Identity, 4, 5, rng), InvalidDimension);
}

TEST(SparseSignal, FullDensityWhenKEqualsN) {
    Rng rng(4);
    const auto s = gen_sparse_signal(4, 4, rng);
    const auto x = s.to_dense();
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double m = std::abs(x.data()[i]);
        EXPECT_GE(m, 200.0);
        EXPECT_LE(m, 250.0);
    }
}

TEST(SparseSignal, ExactlyKPerColumn) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        Rng rng(seed);
        const auto s = gen_sparse_signal(40, 2, rng);
        EXPECT_EQ(s.nnz(), 80u);
        const auto x = s.to_dense();
        for (Eigen::Index j = 0; j < 40; ++j) EXPECT_EQ((x.col(j).array() != 0.0).count(), 2);
        std::set<IndexPair> distinct(s.support.begin(), s.support.end());
        EXPECT_EQ(distinct.size(), s.support.size());
        for (const auto& p : s.support) {
            EXPECT_LT(p.i, 40u);
            EXPECT_LT(p.j, 40u);
        }
    }
}

TEST(SparseSignal, ValuesSymmetricAndInRange) {
    // 10^4 draws of a 40x40, K = 2 signal. Under a fair sign the positive
    // count is Binomial(8e5, 1/2): sd ~ 447, so 3000 is > 6 sd.
    Rng rng(123);
    long positives = 0, total = 0;
    double sum = 0.0;
    std::vector<long> bins(5, 0);
    for (int draw = 0; draw < 10000; ++draw) {
        const auto s = gen_sparse_signal(40, 2, rng);
        for (double v : s.values) {
            const double m = std::abs(v);
            ASSERT_GE(m, 200.0);
            ASSERT_LE(m, 250.0);
            positives += v > 0;
            sum += v;
            ++bins[std::min<long>(4, static_cast<long>((m - 200.0) / 10.0))];
            ++total;
        }
    }
    EXPECT_NEAR(static_cast<double>(positives), total / 2.0, 3000.0);
    EXPECT_NEAR(sum / static_cast<double>(total), 0.0, 1.0);
    for (long b : bins) EXPECT_NEAR(static_cast<double>(b), total / 5.0, 2500.0);
}

TEST(SparseSignal, InvalidSparsity) {
    Rng rng(1);
    EXPECT_THROW(gen_sparse_signal(4, 5, rng), InvalidSparsity);
    EXPECT_THROW(gen_sparse_signal(4, 0, rng), InvalidSparsity);
}

TEST(SparseSignal, DenseRoundTrip) {
    Rng rng(8);
    const auto s = gen_sparse_signal(10, 3, rng);
    const auto back = SparseSignal::from_dense(s.to_dense());
    EXPECT_EQ(back.to_dense(), s.to_dense());
    EXPECT_EQ(back.nnz(), s.nnz());
}

TEST(ApplyModel, IdentitySensingReturnsX) {
    Rng rng(1);
    const auto x = gen_sparse_signal(6, 2, rng).to_dense();
    const DenseMatrix i6 = DenseMatrix::Identity(6, 6);
    EXPECT_EQ(apply_model(i6, x, i6, 0.0, rng), x);
}

TEST(ApplyModel, ZeroSignalZeroNoise) {
    Rng rng(1);
    const auto a = gen_gaussian(3, 6, rng);
    const auto b = gen_gaussian(4, 6, rng);
    EXPECT_TRUE(apply_model(a, DenseMatrix::Zero(6, 6), b, 0.0, rng).isZero(0.0));
}

TEST(ApplyModel, MatchesTripleLoop) {
    const auto a = oracle::random_matrix(4, 8, 1);
    const auto x = oracle::random_matrix(8, 8, 2);
    const auto b = oracle::random_matrix(6, 8, 3);
    Rng rng(1);
    const auto y = apply_model(a, x, b, 0.0, rng);
    EXPECT_LT((y - oracle::triple_product(a, x, b)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ApplyModel, LinearInX) {
    const auto a = oracle::random_matrix(5, 9, 4);
    const auto b = oracle::random_matrix(7, 9, 5);
    const auto x1 = oracle::random_matrix(9, 9, 6);
    const auto x2 = oracle::random_matrix(9, 9, 7);
    Rng rng(1);
    const auto lhs = apply_model(a, x1 + x2, b, 0.0, rng);
    const DenseMatrix rhs = apply_model(a, x1, b, 0.0, rng) + apply_model(a, x2, b, 0.0, rng);
    EXPECT_LT((lhs - rhs).norm(), 1e-10 * lhs.norm());
}

TEST(ApplyModel, NoiseVariance) {
    Rng rng(9);
    const DenseMatrix i = DenseMatrix::Identity(200, 200);
    const auto y = apply_model(i, DenseMatrix::Zero(200, 200), i, 0.1, rng);
    const double var = y.squaredNorm() / static_cast<double>(y.size());
    EXPECT_NEAR(var, 0.01, 0.0005);
    EXPECT_NEAR(y.mean(), 0.0, 0.0025);  // 5 standard errors
}

TEST(ApplyModel, DimensionMismatch) {
    Rng rng(1);
    EXPECT_THROW(apply_model(DenseMatrix::Ones(3, 5), DenseMatrix::Ones(6, 6), DenseMatrix::Ones(3, 6), 0.0, rng),
                 InvalidDimension);
    EXPECT_THROW(apply_model(DenseMatrix::Ones(3, 6), DenseMatrix::Ones(6, 6), DenseMatrix::Ones(3, 5), 0.0, rng),
                 InvalidDimension);
}

TEST(Reproducibility, SameSeedBitIdentical) {
    for (auto kind : {EnsembleKind::GaussianOrthonormalRows, EnsembleKind::DctRandomRows, EnsembleKind::Binary}) {
        Rng r1(77), r2(77);
        EXPECT_EQ(gen_ensemble(kind, 12, 20, r1), gen_ensemble(kind, 12, 20, r2));
    }
    Rng r1(5), r2(5);
    const auto a1 = gen_sparse_signal(20, 3, r1).to_dense();
    const auto a2 = gen_sparse_signal(20, 3, r2).to_dense();
    EXPECT_EQ(a1, a2);
    EXPECT_EQ(apply_model(a1, a1, a1, 0.1, r1), apply_model(a2, a2, a2, 0.1, r2));
}
