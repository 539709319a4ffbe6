#include <gtest/gtest.h>

#include <chrono>

#include "oracles.hpp"
#include "sketchrec/fista.hpp"
#include "sketchrec/omp.hpp"
#include "sketchrec/rng.hpp"
#include "sketchrec/sensing.hpp"

using namespace sketchrec;

namespace {

// Best-of-5 seconds per call of `body`, each sample averaging `reps` calls.
template <typename F>
double seconds_per_call(F&& body, int reps) {
    double best = 1e300;
    for (int s = 0; s < 5; ++s) {
        const auto start = std::chrono::steady_clock::now();
        for (int r = 0; r < reps; ++r) body();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / reps);
    }
    return best;
}

}  // namespace

TEST(Scaling, FistaStepIsCubic) {
    std::vector<double> ns, ts;
    for (std::size_t n : {32u, 64u, 128u, 256u}) {
        Rng rng(n);
        const auto a = gen_gaussian(n / 2, n, rng);
        const auto b = gen_gaussian(n / 2, n, rng);
        const auto y = apply_model(a, gen_sparse_signal(n, 2, rng).to_dense(), b, 0.1, rng);
        const auto cfg = default_fista_config(y, a, b);
        auto st = FistaState::initial(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n), cfg.lambda_init);
        const int reps = static_cast<int>(std::max<std::size_t>(2, (1u << 22) / (n * n * n)));
        ns.push_back(static_cast<double>(n));
        ts.push_back(seconds_per_call([&] { st = fista_step(std::move(st), y, a, b, {1.0}, cfg); }, reps));
    }
    const double slope = oracle::loglog_slope(ns, ts);
    RecordProperty("slope", std::to_string(slope));
    EXPECT_GE(slope, 2.5);
    EXPECT_LE(slope, 3.5);
}

TEST(Scaling, SelectAtomIsCubic) {
    std::vector<double> ns, ts;
    for (std::size_t n : {32u, 64u, 128u, 256u}) {
        Rng rng(n);
        const auto a = gen_gaussian(n / 2, n, rng);
        const auto b = gen_gaussian(n / 2, n, rng);
        const auto r = apply_model(a, gen_sparse_signal(n, 2, rng).to_dense(), b, 0.1, rng);
        const int reps = static_cast<int>(std::max<std::size_t>(2, (1u << 22) / (n * n * n)));
        IndexPair sink{};
        ns.push_back(static_cast<double>(n));
        ts.push_back(seconds_per_call([&] { sink = select_atom(a, b, r); }, reps));
        ASSERT_LT(sink.i, n);
    }
    const double slope = oracle::loglog_slope(ns, ts);
    RecordProperty("slope", std::to_string(slope));
    EXPECT_GE(slope, 2.5);
    EXPECT_LE(slope, 3.5);
}
