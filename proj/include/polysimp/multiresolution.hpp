#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cassert>
#include <cmath>
#include <utility>
#include <vector>

#include "polysimp/dp.hpp"
#include "polysimp/errors.hpp"
#include "polysimp/geometry.hpp"

namespace polysimp {

/// Geometric decimation schedule. `r` is the exact level count defined by
/// the sandwich N*rho^(r+1) < K <= N*rho^r, evaluated in exact rational
/// arithmetic (rho is decomposed as the dyadic rational m/2^s it stores as
/// a double, so no floating-point rounding can move the boundary).
///
/// `levels` holds [N, K_1, ..., K] where K_j = round-half-up(rho^j * N)
/// with a strict-decrease repair (a rounding collision decrements by 1).
/// Levels that would not stay above K are dropped and `truncated` is set;
/// `levels` then has fewer than r intermediate entries but is still
/// strictly decreasing and still ends exactly at K.
struct LevelSchedule {
    Index n_segments = 0;
    Index k = 0;
    double rho = 0.0;
    Index r = 0;
    bool truncated = false;
    std::vector<Index> levels;
};

namespace detail {

/// Schedules longer than this are rejected: rho so close to 1 that the
/// geometric decrease stalls for tens of thousands of levels is out of the
/// tool's working range, and the exact arithmetic would crawl through
/// astronomically wide integers.
inline constexpr Index kMaxScheduleLevels = 10000;

struct DyadicRho {
    std::int64_t m = 0;  // odd numerator
    int s = 0;           // rho = m / 2^s exactly
};

inline DyadicRho decompose_rho(double rho) {
    if (!(rho > 0.0) || !(rho < 1.0)) {
        throw BadRho("rho must lie strictly between 0 and 1");
    }
    int exp2 = 0;
    const double frac = std::frexp(rho, &exp2);  // rho = frac * 2^exp2
    auto m = static_cast<std::int64_t>(std::ldexp(frac, 53));
    int s = 53 - exp2;
    while ((m & 1) == 0) {
        m >>= 1;
        --s;
    }
    return {m, s};
}

}  // namespace detail

/// Number of levels and per-level segment targets for decimating N segments
/// down to K by the factor rho. See LevelSchedule for the exact semantics.
inline LevelSchedule level_schedule(Index n_segments, Index k, double rho) {
    if (k < 1 || k >= n_segments) {
        throw KOutOfRange("K must be in [1, N-1] segment counts");
    }
    const detail::DyadicRho d = detail::decompose_rho(rho);
    namespace mp = boost::multiprecision;

    // r = max { j : N * m^j >= K * 2^(s*j) }, advanced incrementally.
    mp::cpp_int lhs = n_segments;
    mp::cpp_int rhs = k;
    Index r = 0;
    for (;;) {
        lhs *= d.m;
        rhs <<= d.s;
        if (lhs < rhs) break;
        if (++r > detail::kMaxScheduleLevels) {
            throw BadRho("rho is too close to 1: schedule exceeds 10000 levels");
        }
    }

    LevelSchedule out;
    out.n_segments = n_segments;
    out.k = k;
    out.rho = rho;
    out.r = r;
    out.levels.push_back(n_segments);

    mp::cpp_int pow = n_segments;  // N * m^j
    Index prev = n_segments;
    for (Index j = 1; j <= r; ++j) {
        pow *= d.m;
        // round-half-up(p / 2^(s*j)) without leaving integer arithmetic
        const unsigned shift = static_cast<unsigned>(d.s) * static_cast<unsigned>(j);
        const mp::cpp_int rounded = ((pow << 1) + (mp::cpp_int(1) << shift)) >> (shift + 1);
        Index kj = rounded.convert_to<Index>();
        if (kj >= prev) kj = prev - 1;
        if (kj <= k) {
            out.truncated = true;
            break;
        }
        out.levels.push_back(kj);
        prev = kj;
    }
    out.levels.push_back(k);
    return out;
}

/// Full multiresolution decomposition: the schedule plus, per level, the
/// corridor-DP result over the previous level's vertices, the breakpoints
/// resolved back to original-curve indices, and the error measured against
/// the original curve. `levels`, `resolved` and `errors` are aligned and
/// cover every schedule entry after the first (level 0 is the curve itself).
struct Pyramid {
    Polyline original;
    LevelSchedule schedule;
    std::vector<Approximation> levels;
    std::vector<std::vector<Index>> resolved;
    std::vector<double> errors;

    Pyramid(Polyline orig, LevelSchedule sched)
        : original(std::move(orig)), schedule(std::move(sched)) {}

    Index level_count() const { return static_cast<Index>(levels.size()); }
};

/// Chain the corridor DP down the schedule: each level simplifies the
/// polyline formed by the previous level's retained vertices, so the levels
/// are nested by construction and the total work stays linear in N for
/// fixed rho and beta. K may equal the curve's segment count, in which case
/// the pyramid holds the single identity level.
inline Pyramid mr_simplify(const Polyline& curve, Index K, double rho, Index beta,
                           DpStats* stats = nullptr) {
    const Index n_seg = curve.segments();
    if (K < 1 || K > n_seg) {
        throw KOutOfRange("K must be in [1, N] segment counts");
    }

    LevelSchedule schedule;
    if (K == n_seg) {
        // Identity target: one degenerate DP pass, no decimation to schedule.
        schedule.n_segments = n_seg;
        schedule.k = K;
        schedule.rho = rho;
        schedule.r = 0;
        schedule.levels = {n_seg, K};
        (void)detail::decompose_rho(rho);  // still validate the parameter
    } else {
        schedule = level_schedule(n_seg, K, rho);
    }

    Pyramid pyramid(curve, std::move(schedule));
    const MomentTable original_moments = build_moments(pyramid.original);

    Polyline level_curve = pyramid.original;
    std::vector<Index> level_to_original;  // resolved indices of level_curve
    for (Index i = 0; i < pyramid.original.size(); ++i) level_to_original.push_back(i);

    const auto& targets = pyramid.schedule.levels;
    for (std::size_t t = 1; t < targets.size(); ++t) {
        Approximation approx = rsdp_simplify(level_curve, targets[t], beta, stats);

        std::vector<Index> resolved;
        resolved.reserve(approx.breakpoints.size());
        std::vector<Point> pts;
        pts.reserve(approx.breakpoints.size());
        for (Index b : approx.breakpoints) {
            resolved.push_back(level_to_original[static_cast<std::size_t>(b)]);
            pts.push_back(level_curve[b]);
        }

        pyramid.errors.push_back(
            breakpoints_error(original_moments, pyramid.original, resolved));
        pyramid.levels.push_back(std::move(approx));
        pyramid.resolved.push_back(resolved);

        level_curve = Polyline::unchecked(std::move(pts));
        level_to_original = std::move(resolved);
    }
    return pyramid;
}

/// View of one pyramid level as an approximation of the original curve.
/// j = 0 is the original itself; j = level_count() is the final K-segment
/// result. (j counts schedule entries, so both ends are inclusive.)
inline Approximation extract_level(const Pyramid& pyramid, Index j) {
    if (j < 0 || j > pyramid.level_count()) {
        throw LevelOutOfRange("level ordinal outside the pyramid");
    }
    Approximation out;
    out.source_len = pyramid.original.size();
    if (j == 0) {
        for (Index i = 0; i < pyramid.original.size(); ++i) out.breakpoints.push_back(i);
        out.error = 0.0;
        return out;
    }
    const auto t = static_cast<std::size_t>(j - 1);
    out.breakpoints = pyramid.resolved[t];
    out.error = pyramid.errors[t];
    return out;
}

}  // namespace polysimp
