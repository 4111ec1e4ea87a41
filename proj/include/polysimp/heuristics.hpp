#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <queue>
#include <vector>

#include "polysimp/errors.hpp"
#include "polysimp/geometry.hpp"

namespace polysimp {

namespace detail {

/// Squared perpendicular distance of p to the infinite line through a and b,
/// or squared Euclidean distance to a when the chord degenerates. Shared by
/// both heuristics (and their test oracles) so cost ties reproduce exactly.
inline double point_line_dist2(const Point& p, const Point& a, const Point& b) {
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    const double px = p.x - a.x;
    const double py = p.y - a.y;
    if (len2 == 0.0) {
        return px * px + py * py;
    }
    const double cross = px * dy - py * dx;
    return cross * cross / len2;
}

}  // namespace detail

/// Pending split candidate: the interior vertex of segment (i, j) that lies
/// farthest from the segment's chord.
struct SplitQueueEntry {
    Index i = 0;
    Index j = 0;
    Index farthest = 0;
    double deviation = 0.0;  // perpendicular distance, map units
};

/// Lazily invalidated merge candidate. Valid only while `generation` matches
/// the vertex's current stamp; cost is the error of the segment that would
/// replace the vertex's two adjacent segments, measured over the current
/// chain (whose sole interior vertex between the neighbors is the vertex
/// itself).
struct MergeHeapEntry {
    Index vertex = 0;
    double cost = 0.0;
    std::uint32_t generation = 0;
};

namespace detail {

inline SplitQueueEntry scan_segment(const Polyline& curve, Index i, Index j) {
    assert(j - i >= 2);
    const Point& a = curve[i];
    const Point& b = curve[j];
    Index farthest = -1;
    double best2 = -1.0;
    for (Index k = i + 1; k < j; ++k) {
        const double d2 = point_line_dist2(curve[k], a, b);
        if (d2 > best2) {
            best2 = d2;
            farthest = k;
        }
    }
    return {i, j, farthest, std::sqrt(best2)};
}

struct SplitPriority {
    // max-heap: larger deviation first, then smaller left endpoint
    bool operator()(const SplitQueueEntry& a, const SplitQueueEntry& b) const {
        if (a.deviation != b.deviation) return a.deviation < b.deviation;
        return a.i > b.i;
    }
};

struct MergePriority {
    // min-heap: smaller cost first, then smaller vertex index
    bool operator()(const MergeHeapEntry& a, const MergeHeapEntry& b) const {
        if (a.cost != b.cost) return a.cost > b.cost;
        return a.vertex > b.vertex;
    }
};

}  // namespace detail

/// Douglas-Peucker driven to exactly K segments: repeatedly split the
/// segment whose farthest interior vertex deviates most from its chord.
/// O(K*N) scanning plus O(K log K) queue traffic. Deterministic: deviation
/// ties inside a segment keep the smallest vertex index, equal-priority
/// segments split the one with the smaller left endpoint first.
inline Approximation split_simplify(const Polyline& curve, Index K) {
    const Index N = curve.size();
    if (K < 1 || K > N - 1) {
        throw KOutOfRange("K must be in [1, N-1]");
    }

    std::priority_queue<SplitQueueEntry, std::vector<SplitQueueEntry>, detail::SplitPriority>
        queue;
    std::vector<Index> breakpoints{0, N - 1};
    if (N > 2) queue.push(detail::scan_segment(curve, 0, N - 1));

    for (Index segments = 1; segments < K; ++segments) {
        // While fewer than K <= N-1 segments exist, some segment still has
        // an interior vertex, so the queue cannot be empty here.
        assert(!queue.empty());
        const SplitQueueEntry top = queue.top();
        queue.pop();
        breakpoints.push_back(top.farthest);
        if (top.farthest - top.i >= 2) queue.push(detail::scan_segment(curve, top.i, top.farthest));
        if (top.j - top.farthest >= 2) queue.push(detail::scan_segment(curve, top.farthest, top.j));
    }

    std::sort(breakpoints.begin(), breakpoints.end());
    const MomentTable table = build_moments(curve);
    Approximation out;
    out.source_len = N;
    out.breakpoints = std::move(breakpoints);
    out.error = breakpoints_error(table, curve, out.breakpoints);
    return out;
}

/// Iterative lowest-cost vertex elimination: repeatedly delete the interior
/// vertex whose removal (merging its two adjacent segments) costs least,
/// until K segments remain. Lazy heap with generation stamps, O(N log N).
/// The returned error is re-measured against the input curve.
inline Approximation merge_simplify(const Polyline& curve, Index K) {
    const Index N = curve.size();
    if (K < 1 || K > N - 1) {
        throw KOutOfRange("K must be in [1, N-1]");
    }

    std::vector<Index> prev(static_cast<std::size_t>(N));
    std::vector<Index> next(static_cast<std::size_t>(N));
    std::vector<std::uint32_t> gen(static_cast<std::size_t>(N), 0);
    std::vector<char> alive(static_cast<std::size_t>(N), 1);
    for (Index v = 0; v < N; ++v) {
        prev[static_cast<std::size_t>(v)] = v - 1;
        next[static_cast<std::size_t>(v)] = v + 1;
    }

    const auto merge_cost = [&](Index v) {
        return detail::point_line_dist2(curve[v], curve[prev[static_cast<std::size_t>(v)]],
                                        curve[next[static_cast<std::size_t>(v)]]);
    };

    std::priority_queue<MergeHeapEntry, std::vector<MergeHeapEntry>, detail::MergePriority> heap;
    for (Index v = 1; v < N - 1; ++v) {
        heap.push({v, merge_cost(v), 0});
    }

    for (Index segments = N - 1; segments > K;) {
        assert(!heap.empty());
        const MergeHeapEntry top = heap.top();
        heap.pop();
        const auto v = static_cast<std::size_t>(top.vertex);
        if (!alive[v] || top.generation != gen[v]) continue;  // stale

        alive[v] = 0;
        const Index p = prev[v];
        const Index q = next[v];
        next[static_cast<std::size_t>(p)] = q;
        prev[static_cast<std::size_t>(q)] = p;
        --segments;
        for (Index u : {p, q}) {
            if (u > 0 && u < N - 1) {
                const auto s = static_cast<std::size_t>(u);
                ++gen[s];
                heap.push({u, merge_cost(u), gen[s]});
            }
        }
    }

    Approximation out;
    out.source_len = N;
    out.breakpoints.reserve(static_cast<std::size_t>(K) + 1);
    for (Index v = 0; v != N; v = next[static_cast<std::size_t>(v)]) {
        out.breakpoints.push_back(v);
        if (v == N - 1) break;
    }
    const MomentTable table = build_moments(curve);
    out.error = breakpoints_error(table, curve, out.breakpoints);
    return out;
}

}  // namespace polysimp
