#include "polysimp/multiresolution.hpp"

#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "polysimp/dp.hpp"
#include "polysimp/errors.hpp"
#include "polysimp/geometry.hpp"

using polysimp::Approximation;
using polysimp::DpStats;
using polysimp::extract_level;
using polysimp::Index;
using polysimp::level_schedule;
using polysimp::LevelSchedule;
using polysimp::mr_simplify;
using polysimp::Point;
using polysimp::Polyline;
using polysimp::Pyramid;

namespace mp = boost::multiprecision;

namespace {

Polyline zigzag5() {
    return Polyline({{0, 0}, {1, 1}, {2, 0}, {3, 1}, {4, 0}});
}

// Random-walk curve: x strictly increasing, y a bounded walk. Closer in
// character to map data than white noise, and free of duplicate points.
Polyline walk_curve(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> step(-1.0, 1.0);
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(n));
    double y = 0.0;
    for (int i = 0; i < n; ++i) {
        pts.push_back({static_cast<double>(i), y});
        y += step(rng);
    }
    return Polyline(std::move(pts));
}

// Exact sandwich check by direct powering: N*rho^j >= K evaluated as
// N*m^j >= K*2^(s*j) with rho = m/2^s read off the double bit pattern.
// Independent of the incremental comparison inside level_schedule.
bool n_rho_pow_at_least_k(Index n, Index k, double rho, Index j) {
    int exp2 = 0;
    const double frac = std::frexp(rho, &exp2);
    auto m = static_cast<std::int64_t>(std::ldexp(frac, 53));
    int s = 53 - exp2;
    while ((m & 1) == 0) {
        m >>= 1;
        --s;
    }
    const mp::cpp_int lhs = mp::cpp_int(n) * mp::pow(mp::cpp_int(m), static_cast<unsigned>(j));
    const mp::cpp_int rhs = mp::cpp_int(k)
                            << (static_cast<unsigned>(s) * static_cast<unsigned>(j));
    return lhs >= rhs;
}

double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const auto n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double lx = std::log(xs[i]);
        const double ly = std::log(ys[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

// --- Schedule ---

TEST(ScheduleTest, PowerOfTwoPinnedExample) {
    const LevelSchedule s = level_schedule(4096, 10, 0.5);
    const std::vector<Index> expected{4096, 2048, 1024, 512, 256, 128, 64, 32, 16, 10};
    EXPECT_EQ(s.levels, expected);
    EXPECT_EQ(s.r, 8);
    EXPECT_FALSE(s.truncated);
}

TEST(ScheduleTest, SmallPinnedExample) {
    const LevelSchedule s = level_schedule(8, 3, 0.5);
    EXPECT_EQ(s.levels, (std::vector<Index>{8, 4, 3}));
    EXPECT_EQ(s.r, 1);
    EXPECT_FALSE(s.truncated);
}

TEST(ScheduleTest, OneBelowFullBudgetIsSingleStep) {
    const LevelSchedule s = level_schedule(16, 15, 0.5);
    EXPECT_EQ(s.levels, (std::vector<Index>{16, 15}));
    EXPECT_EQ(s.r, 0);
    EXPECT_FALSE(s.truncated);
}

TEST(ScheduleTest, TruncatesWhenRoundingLandsOnK) {
    // N*rho^1 = 2 = K, so r = 1, but the j=1 level would equal K itself and
    // is folded into the final step.
    const LevelSchedule s = level_schedule(4, 2, 0.5);
    EXPECT_EQ(s.levels, (std::vector<Index>{4, 2}));
    EXPECT_EQ(s.r, 1);
    EXPECT_TRUE(s.truncated);
}

TEST(ScheduleTest, StrictDecreaseRepairNearOne) {
    // rho = 0.9: 2*rho rounds to 2, colliding with K_0; the repair and the
    // K floor leave only the final step while r keeps its exact value 6.
    const LevelSchedule s = level_schedule(2, 1, 0.9);
    EXPECT_EQ(s.levels, (std::vector<Index>{2, 1}));
    EXPECT_EQ(s.r, 6);
    EXPECT_TRUE(s.truncated);
}

TEST(ScheduleTest, RejectsBadParameters) {
    EXPECT_THROW(level_schedule(100, 10, 0.0), polysimp::BadRho);
    EXPECT_THROW(level_schedule(100, 10, 1.0), polysimp::BadRho);
    EXPECT_THROW(level_schedule(100, 10, -0.5), polysimp::BadRho);
    EXPECT_THROW(level_schedule(100, 10, 1.5), polysimp::BadRho);
    EXPECT_THROW(level_schedule(100, 10, std::nan("")), polysimp::BadRho);
    EXPECT_THROW(level_schedule(100, 0, 0.5), polysimp::KOutOfRange);
    EXPECT_THROW(level_schedule(100, 100, 0.5), polysimp::KOutOfRange);
    EXPECT_THROW(level_schedule(100, 101, 0.5), polysimp::KOutOfRange);
}

TEST(ScheduleTest, RejectsPathologicallySlowRho) {
    const double nearly_one = 1.0 - std::ldexp(1.0, -40);
    EXPECT_THROW(level_schedule(2, 1, nearly_one), polysimp::BadRho);
}

TEST(ScheduleTest, SandwichHoldsExactlyOnRandomTriples) {
    std::mt19937_64 rng(20240615);
    std::uniform_real_distribution<double> rho_dist(0.05, 0.9);
    for (int trial = 0; trial < 10000; ++trial) {
        const Index n = 2 + static_cast<Index>(rng() % 4095);
        const Index k = 1 + static_cast<Index>(rng() % static_cast<unsigned>(n - 1));
        const double rho = rho_dist(rng);
        const LevelSchedule s = level_schedule(n, k, rho);

        ASSERT_TRUE(n_rho_pow_at_least_k(n, k, rho, s.r))
            << "n=" << n << " k=" << k << " rho=" << rho;
        ASSERT_FALSE(n_rho_pow_at_least_k(n, k, rho, s.r + 1))
            << "n=" << n << " k=" << k << " rho=" << rho;

        ASSERT_EQ(s.levels.front(), n);
        ASSERT_EQ(s.levels.back(), k);
        for (std::size_t t = 0; t + 1 < s.levels.size(); ++t) {
            ASSERT_GT(s.levels[t], s.levels[t + 1]);
        }
        if (!s.truncated) {
            ASSERT_EQ(s.levels.size(), static_cast<std::size_t>(s.r) + 2);
        }
    }
}

// --- Pyramid construction ---

TEST(MrTest, ZigzagPinnedPyramid) {
    const Pyramid p = mr_simplify(zigzag5(), 2, 0.5, 4);
    EXPECT_EQ(p.schedule.levels, (std::vector<Index>{4, 2}));
    ASSERT_EQ(p.level_count(), 1);
    EXPECT_EQ(p.resolved[0], (std::vector<Index>{0, 1, 4}));
    EXPECT_DOUBLE_EQ(p.errors[0], 0.8);
}

TEST(MrTest, IdentityBudgetGivesSingleZeroErrorLevel) {
    std::mt19937_64 rng(1);
    const Polyline c = walk_curve(rng, 33);
    const Pyramid p = mr_simplify(c, 32, 0.5, 4);
    ASSERT_EQ(p.level_count(), 1);
    EXPECT_EQ(p.errors[0], 0.0);
    EXPECT_EQ(p.resolved[0].size(), 33u);
}

TEST(MrTest, RejectsKOutOfRange) {
    EXPECT_THROW(mr_simplify(zigzag5(), 0, 0.5, 4), polysimp::KOutOfRange);
    EXPECT_THROW(mr_simplify(zigzag5(), 5, 0.5, 4), polysimp::KOutOfRange);
}

TEST(MrTest, RejectsBadRhoEvenForIdentityBudget) {
    EXPECT_THROW(mr_simplify(zigzag5(), 4, 1.5, 4), polysimp::BadRho);
}

TEST(MrTest, FinalLevelHasExactlyKSegments) {
    std::mt19937_64 rng(2);
    const Polyline c = walk_curve(rng, 300);
    for (Index k : {1, 7, 50, 299}) {
        const Pyramid p = mr_simplify(c, k, 0.5, 4);
        EXPECT_EQ(static_cast<Index>(p.resolved.back().size()) - 1, k);
    }
}

TEST(MrTest, LevelsAreNestedExactly) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 8; ++trial) {
        const Polyline c = walk_curve(rng, 500 + static_cast<int>(rng() % 500));
        const Pyramid p = mr_simplify(c, 10, 0.5, 4);
        ASSERT_GE(p.level_count(), 2);
        for (Index t = 1; t < p.level_count(); ++t) {
            const auto& coarse = p.resolved[static_cast<std::size_t>(t)];
            const auto& fine = p.resolved[static_cast<std::size_t>(t - 1)];
            EXPECT_TRUE(std::includes(fine.begin(), fine.end(), coarse.begin(), coarse.end()))
                << "level " << t;
        }
    }
}

TEST(MrTest, PerLevelErrorsNondecreasingFineToCoarse) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 8; ++trial) {
        const Polyline c = walk_curve(rng, 800);
        const Pyramid p = mr_simplify(c, 8, 0.5, 4);
        for (Index t = 1; t < p.level_count(); ++t) {
            EXPECT_GE(p.errors[static_cast<std::size_t>(t)],
                      p.errors[static_cast<std::size_t>(t - 1)])
                << "level " << t;
        }
    }
}

TEST(MrTest, NeverBeatsFsdp) {
    std::mt19937_64 rng(5);
    const Polyline c = walk_curve(rng, 1024);
    const Approximation opt = polysimp::fsdp_simplify(c, 16);
    const Pyramid p = mr_simplify(c, 16, 0.5, 4);
    EXPECT_GE(p.errors.back(), opt.error);
}

TEST(MrTest, InternalLevelErrorIsOverPreviousLevel) {
    // The stored Approximation at each level indexes the previous level's
    // vertex sequence, so its breakpoint count, not its indices, must match
    // the resolved view.
    std::mt19937_64 rng(6);
    const Polyline c = walk_curve(rng, 257);
    const Pyramid p = mr_simplify(c, 16, 0.5, 4);
    for (Index t = 0; t < p.level_count(); ++t) {
        const auto& level = p.levels[static_cast<std::size_t>(t)];
        const auto& resolved = p.resolved[static_cast<std::size_t>(t)];
        ASSERT_EQ(level.breakpoints.size(), resolved.size());
        const Index prev_size =
            t == 0 ? c.size() : static_cast<Index>(p.resolved[static_cast<std::size_t>(t - 1)].size());
        EXPECT_EQ(level.source_len, prev_size);
        EXPECT_EQ(level.breakpoints.back(), prev_size - 1);
    }
}

TEST(MrTest, StateVisitsGrowLinearly) {
    std::mt19937_64 rng(7);
    std::vector<double> ns;
    std::vector<double> visits;
    for (int e = 10; e <= 16; ++e) {
        const int n = (1 << e) + 1;
        const Polyline c = walk_curve(rng, n);
        DpStats stats;
        mr_simplify(c, 10, 0.5, 4, &stats);
        ns.push_back(static_cast<double>(n));
        visits.push_back(static_cast<double>(stats.states));
    }
    const double slope = loglog_slope(ns, visits);
    EXPECT_GE(slope, 0.85) << "state-visit growth too slow to be linear";
    EXPECT_LE(slope, 1.15) << "state-visit growth superlinear";
}

TEST(MrTest, TruncatedScheduleStillSimplifies) {
    Polyline tiny({{0, 0}, {1, 1}, {2, 0}});
    const Pyramid p = mr_simplify(tiny, 1, 0.9, 4);
    EXPECT_EQ(p.schedule.levels, (std::vector<Index>{2, 1}));
    EXPECT_TRUE(p.schedule.truncated);
    EXPECT_EQ(p.resolved.back(), (std::vector<Index>{0, 2}));
}

// --- extract_level ---

TEST(ExtractLevelTest, EndsAndBounds) {
    std::mt19937_64 rng(8);
    const Polyline c = walk_curve(rng, 200);
    const Pyramid p = mr_simplify(c, 10, 0.5, 4);

    const Approximation base = extract_level(p, 0);
    EXPECT_EQ(base.segments(), 199);
    EXPECT_EQ(base.error, 0.0);

    const Approximation last = extract_level(p, p.level_count());
    EXPECT_EQ(last.segments(), 10);
    EXPECT_EQ(last.breakpoints, p.resolved.back());
    EXPECT_EQ(last.error, p.errors.back());

    EXPECT_THROW(extract_level(p, -1), polysimp::LevelOutOfRange);
    EXPECT_THROW(extract_level(p, p.level_count() + 1), polysimp::LevelOutOfRange);
}

TEST(ExtractLevelTest, MiddleLevelMatchesResolved) {
    const Pyramid p = mr_simplify(zigzag5(), 2, 0.5, 4);
    const Approximation mid = extract_level(p, 1);
    EXPECT_EQ(mid.breakpoints, (std::vector<Index>{0, 1, 4}));
    EXPECT_DOUBLE_EQ(mid.error, 0.8);
}
