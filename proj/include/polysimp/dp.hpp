#pragma once

#include <cassert>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "polysimp/errors.hpp"
#include "polysimp/geometry.hpp"

namespace polysimp {

/// Work counters for the DP engines. `states` is the number of (ordinal,
/// vertex) cells evaluated; `transitions` the number of predecessor
/// candidates scanned. Accumulates across calls when reused, which lets a
/// multiresolution driver total the work of all its levels.
struct DpStats {
    std::uint64_t states = 0;
    std::uint64_t transitions = 0;
};

/// Admissible-state band of half-width `beta` (in segment-ordinal units)
/// around the diagonal k = n*K/(N-1) of the DP grid. beta >= K admits every
/// state. The test is carried out in exact integer arithmetic:
///   |k - n*K/(N-1)| <= beta  <=>  |k*(N-1) - n*K| <= beta*(N-1).
struct Corridor {
    Index beta = 0;
    Index N = 0;  // vertex count
    Index K = 0;  // target segments

    bool admissible(Index k, Index n) const {
        const std::int64_t lhs = static_cast<std::int64_t>(k) * (N - 1) -
                                 static_cast<std::int64_t>(n) * K;
        const std::int64_t rhs = static_cast<std::int64_t>(beta) * (N - 1);
        return (lhs < 0 ? -lhs : lhs) <= rhs;
    }
};

namespace detail {

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    assert(b > 0);
    std::int64_t q = a / b;
    if (a % b != 0 && a < 0) --q;
    return q;
}

inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
    assert(b > 0);
    std::int64_t q = a / b;
    if (a % b != 0 && a > 0) ++q;
    return q;
}

/// Shared DP core. cost(k, n) = min over admissible m < n of
/// cost(k-1, m) + e(m, n), with ties broken toward the smallest m by an
/// ascending scan that only accepts strict improvements. A band half-width
/// beta >= K leaves every clamp inactive, so the full search is the exact
/// same instruction sequence and the two engines agree bitwise.
inline Approximation run_dp(const Polyline& curve, Index K, Index beta, DpStats* stats) {
    const Index N = curve.size();
    if (K < 1 || K > N - 1) {
        throw KOutOfRange("K must be in [1, N-1]");
    }
    const bool banded = beta < K;
    const MomentTable table = build_moments(curve);
    const SegmentErrorEval err(table, curve);
    const double inf = std::numeric_limits<double>::infinity();

    // Row ranges up front: the parent store covers only in-range cells, so
    // it stays O(beta*N) for corridor runs instead of a dense K*N table.
    std::vector<Index> row_lo(static_cast<std::size_t>(K) + 1, 0);
    std::vector<Index> row_hi(static_cast<std::size_t>(K) + 1, 0);
    std::vector<std::size_t> row_off(static_cast<std::size_t>(K) + 2, 0);
    for (Index k = 1; k <= K; ++k) {
        Index lo = k;
        Index hi = N - 1 - (K - k);
        if (banded) {
            const std::int64_t band_lo =
                ceil_div(static_cast<std::int64_t>(k - beta) * (N - 1), K);
            const std::int64_t band_hi =
                floor_div(static_cast<std::int64_t>(k + beta) * (N - 1), K);
            if (band_lo > lo) lo = static_cast<Index>(band_lo);
            if (band_hi < hi) hi = static_cast<Index>(band_hi);
        }
        assert(lo <= hi);
        row_lo[static_cast<std::size_t>(k)] = lo;
        row_hi[static_cast<std::size_t>(k)] = hi;
        row_off[static_cast<std::size_t>(k) + 1] =
            row_off[static_cast<std::size_t>(k)] + static_cast<std::size_t>(hi - lo + 1);
    }
    std::vector<Index> parent(row_off[static_cast<std::size_t>(K) + 1], -1);

    std::vector<double> prev(static_cast<std::size_t>(N), inf);
    std::vector<double> cur(static_cast<std::size_t>(N), inf);
    prev[0] = 0.0;
    Index prev_lo = 0;
    Index prev_hi = 0;  // only (0, 0) has finite cost at ordinal 0
    std::uint64_t states = 0;
    std::uint64_t transitions = 0;

    for (Index k = 1; k <= K; ++k) {
        const Index lo = row_lo[static_cast<std::size_t>(k)];
        const Index hi = row_hi[static_cast<std::size_t>(k)];
        Index* parent_row = parent.data() + row_off[static_cast<std::size_t>(k)] - lo;
        for (Index n = lo; n <= hi; ++n) {
            ++states;
            const Index m_lo = prev_lo;
            const Index m_hi = prev_hi < n - 1 ? prev_hi : n - 1;
            double best = inf;
            Index best_m = -1;
            for (Index m = m_lo; m <= m_hi; ++m) {
                const double cand = prev[m] + err(m, n);
                if (cand < best) {
                    best = cand;
                    best_m = m;
                }
            }
            if (m_hi >= m_lo) transitions += static_cast<std::uint64_t>(m_hi - m_lo + 1);
            cur[n] = best;
            parent_row[n] = best_m;
        }

        // Stale cells in the swapped-out row are never read: predecessor
        // scans stay inside [prev_lo, prev_hi], the span just written.
        std::swap(prev, cur);
        prev_lo = lo;
        prev_hi = hi;
    }

    if (stats != nullptr) {
        stats->states += states;
        stats->transitions += transitions;
    }

    Approximation out;
    out.source_len = N;
    out.error = prev[N - 1];
    if (!(out.error < inf)) {
        // The band always contains the grid diagonal, so this can only mean
        // a violated precondition (e.g. beta < 1).
        throw std::logic_error("DP found no feasible path; check beta >= 1");
    }
    out.breakpoints.assign(static_cast<std::size_t>(K) + 1, -1);
    Index n = N - 1;
    for (Index k = K; k >= 1; --k) {
        out.breakpoints[static_cast<std::size_t>(k)] = n;
        n = parent[row_off[static_cast<std::size_t>(k)] +
                   static_cast<std::size_t>(n - row_lo[static_cast<std::size_t>(k)])];
        assert(n >= 0);
    }
    assert(n == 0);
    out.breakpoints[0] = 0;
    return out;
}

}  // namespace detail

/// Optimal K-segment approximation by full-search dynamic programming.
/// O(K*N^2) time, O(K*N) parent memory. Ties at every state resolve to the
/// smallest predecessor index, so the output is deterministic.
inline Approximation fsdp_simplify(const Polyline& curve, Index K, DpStats* stats = nullptr) {
    return detail::run_dp(curve, K, /*beta=*/curve.size(), stats);
}

/// Corridor-restricted DP: states limited to the Corridor band, predecessors
/// to states admissible at the previous ordinal. O(N^2/K) transitions for
/// fixed beta. Error is >= the FSDP optimum; output is identical to FSDP
/// whenever beta >= K. The band always contains the grid diagonal, so a
/// solution exists for every valid (K, beta).
inline Approximation rsdp_simplify(const Polyline& curve, Index K, Index beta,
                                   DpStats* stats = nullptr) {
    assert(beta >= 1);
    return detail::run_dp(curve, K, beta, stats);
}

/// Exhaustive minimum over all C(N-2, K-1) breakpoint subsets. Test oracle;
/// guarded against combinatorial blowup. Among ties returns the
/// lexicographically smallest breakpoint sequence.
inline Approximation brute_force_optimum(const Polyline& curve, Index K) {
    const Index N = curve.size();
    if (K < 1 || K > N - 1) {
        throw KOutOfRange("K must be in [1, N-1]");
    }
    if (N > 24 || K > 8) {
        throw InstanceTooLarge("brute force limited to N <= 24 and K <= 8");
    }
    const MomentTable table = build_moments(curve);
    const detail::SegmentErrorEval err(table, curve);

    // Interior breakpoint combination, advanced in lexicographic order.
    std::vector<Index> pick(static_cast<std::size_t>(K) - 1);
    for (Index t = 0; t < K - 1; ++t) pick[static_cast<std::size_t>(t)] = t + 1;

    Approximation best;
    best.source_len = N;
    best.error = std::numeric_limits<double>::infinity();
    for (;;) {
        double total = 0.0;
        Index last = 0;
        for (Index b : pick) {
            total += err(last, b);
            last = b;
        }
        total += err(last, N - 1);
        if (total < best.error) {
            best.error = total;
            best.breakpoints.clear();
            best.breakpoints.push_back(0);
            best.breakpoints.insert(best.breakpoints.end(), pick.begin(), pick.end());
            best.breakpoints.push_back(N - 1);
        }

        // next combination of K-1 values from {1, ..., N-2}
        int t = static_cast<int>(pick.size()) - 1;
        while (t >= 0 && pick[static_cast<std::size_t>(t)] ==
                             N - 2 - (static_cast<Index>(pick.size()) - 1 - t)) {
            --t;
        }
        if (t < 0) break;
        ++pick[static_cast<std::size_t>(t)];
        for (std::size_t s = static_cast<std::size_t>(t) + 1; s < pick.size(); ++s) {
            pick[s] = pick[s - 1] + 1;
        }
    }
    return best;
}

/// Optimal error for every budget k = 1..K from one full-search sweep,
/// returned as profile[k] (profile[0] is unused and left infinite). Row k
/// of the cost table already ends in the budget-k optimum, so pricing all
/// budgets costs the same O(K*N^2) as a single fsdp_simplify at K and each
/// profile[k] matches fsdp_simplify(curve, k).error bit for bit: the scan
/// over predecessors [k-1, n-1] is the same ascending strict-< loop, and
/// the states the full run prunes as unable to reach the final vertex are
/// computed here but never read by any later row.
inline std::vector<double> fsdp_error_profile(const Polyline& curve, Index K,
                                              DpStats* stats = nullptr) {
    const Index N = curve.size();
    if (K < 1 || K > N - 1) {
        throw KOutOfRange("K must be in [1, N-1]");
    }
    const MomentTable table = build_moments(curve);
    const detail::SegmentErrorEval err(table, curve);
    const double inf = std::numeric_limits<double>::infinity();

    std::vector<double> prev(static_cast<std::size_t>(N), inf);
    std::vector<double> cur(static_cast<std::size_t>(N), inf);
    std::vector<double> profile(static_cast<std::size_t>(K) + 1, inf);

    DpStats local;
    for (Index n = 1; n < N; ++n) {
        prev[static_cast<std::size_t>(n)] = err(0, n);
    }
    local.states += static_cast<std::uint64_t>(N - 1);
    profile[1] = prev[static_cast<std::size_t>(N - 1)];

    for (Index k = 2; k <= K; ++k) {
        for (Index n = k; n < N; ++n) {
            double best = inf;
            for (Index m = k - 1; m < n; ++m) {
                const double c = prev[static_cast<std::size_t>(m)] + err(m, n);
                if (c < best) best = c;
            }
            cur[static_cast<std::size_t>(n)] = best;
            local.states += 1;
            local.transitions += static_cast<std::uint64_t>(n - (k - 1));
        }
        profile[static_cast<std::size_t>(k)] = cur[static_cast<std::size_t>(N - 1)];
        std::swap(prev, cur);
    }
    if (stats != nullptr) {
        stats->states += local.states;
        stats->transitions += local.transitions;
    }
    return profile;
}

}  // namespace polysimp
