#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "polysimp/errors.hpp"

namespace polysimp {

/// Vertex index into a polyline.
using Index = std::int32_t;

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

/// Open polygonal chain of at least two vertices.
///
/// Consecutive duplicate points are removed at construction; non-finite
/// coordinates are rejected. Closed contours must be supplied with the
/// repeated endpoint removed and are simplified as open curves.
class Polyline {
public:
    explicit Polyline(std::vector<Point> points) : points_(std::move(points)) {
        for (const Point& p : points_) {
            if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
                throw BadPolyline("polyline contains a non-finite coordinate");
            }
        }
        auto last = std::unique(points_.begin(), points_.end());
        points_.erase(last, points_.end());
        if (points_.size() < 2) {
            throw BadPolyline("polyline needs at least two distinct points");
        }
    }

    /// Wraps a vertex sequence without removing consecutive duplicates.
    /// Pyramid levels are subsequences of an already deduplicated curve and
    /// may bring non-adjacent equal points next to each other; the error
    /// metric handles the resulting zero-length chords explicitly.
    static Polyline unchecked(std::vector<Point> points) {
        assert(points.size() >= 2);
        return Polyline(std::move(points), unchecked_tag{});
    }

    Index size() const { return static_cast<Index>(points_.size()); }
    Index segments() const { return size() - 1; }

    const Point& operator[](Index i) const { return points_[static_cast<std::size_t>(i)]; }
    std::span<const Point> points() const { return points_; }

    friend bool operator==(const Polyline&, const Polyline&) = default;

private:
    struct unchecked_tag {};
    Polyline(std::vector<Point> points, unchecked_tag) : points_(std::move(points)) {}

    std::vector<Point> points_;
};

/// Prefix sums of x, y, x^2, y^2 and x*y over vertex index.
/// Entry k covers vertices [0, k), so entry 0 is 0 and the table has N+1
/// entries for an N-vertex curve. Enables O(1) per-segment error queries.
struct MomentTable {
    std::vector<double> sx;
    std::vector<double> sy;
    std::vector<double> sxx;
    std::vector<double> syy;
    std::vector<double> sxy;

    std::size_t size() const { return sx.size(); }
};

inline MomentTable build_moments(const Polyline& curve) {
    const std::size_t n = static_cast<std::size_t>(curve.size());
    MomentTable t;
    t.sx.resize(n + 1);
    t.sy.resize(n + 1);
    t.sxx.resize(n + 1);
    t.syy.resize(n + 1);
    t.sxy.resize(n + 1);
    t.sx[0] = t.sy[0] = t.sxx[0] = t.syy[0] = t.sxy[0] = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const Point& p = curve[static_cast<Index>(k)];
        t.sx[k + 1] = t.sx[k] + p.x;
        t.sy[k + 1] = t.sy[k] + p.y;
        t.sxx[k + 1] = t.sxx[k] + p.x * p.x;
        t.syy[k + 1] = t.syy[k] + p.y * p.y;
        t.sxy[k + 1] = t.sxy[k] + p.x * p.y;
    }
    return t;
}

namespace detail {

/// Raw-pointer view over one curve's points and moments. The DP engines
/// evaluate millions of segment errors; binding the pointers once keeps
/// the inner loops free of vector indirection.
class SegmentErrorEval {
public:
    SegmentErrorEval(const MomentTable& t, const Polyline& c)
        : pts_(c.points().data()),
          sx_(t.sx.data()),
          sy_(t.sy.data()),
          sxx_(t.sxx.data()),
          syy_(t.syy.data()),
          sxy_(t.sxy.data()) {
        assert(t.size() == static_cast<std::size_t>(c.size()) + 1);
    }

    /// Sum of squared perpendicular distances of vertices strictly between
    /// i and j to the infinite line through vertices i and j. Falls back to
    /// squared Euclidean distance to vertex i when the chord degenerates.
    double operator()(Index i, Index j) const {
        assert(0 <= i && i < j);
        if (j == i + 1) return 0.0;
        const Point a = pts_[i];
        const Point b = pts_[j];
        const double dx = b.x - a.x;
        const double dy = b.y - a.y;
        const double len2 = dx * dx + dy * dy;

        const std::size_t lo = static_cast<std::size_t>(i) + 1;
        const std::size_t hi = static_cast<std::size_t>(j);
        const double cnt = static_cast<double>(hi - lo);
        const double mx = sx_[hi] - sx_[lo];
        const double my = sy_[hi] - sy_[lo];
        const double mxx = sxx_[hi] - sxx_[lo];
        const double myy = syy_[hi] - syy_[lo];
        const double mxy = sxy_[hi] - sxy_[lo];

        if (len2 == 0.0) {
            const double sum = mxx - 2.0 * a.x * mx + cnt * a.x * a.x +
                               myy - 2.0 * a.y * my + cnt * a.y * a.y;
            return sum > 0.0 ? sum : 0.0;
        }

        // Squared distance of p to the line is (u*px + v*py + w)^2 / len2
        // with (u, v, w) below; the quadratic expands over the moments.
        const double u = dy;
        const double v = -dx;
        const double w = a.y * dx - a.x * dy;
        const double sum = u * u * mxx + v * v * myy + w * w * cnt +
                           2.0 * (u * v * mxy + u * w * mx + v * w * my);
        return sum > 0.0 ? sum / len2 : 0.0;
    }

private:
    const Point* pts_;
    const double* sx_;
    const double* sy_;
    const double* sxx_;
    const double* syy_;
    const double* sxy_;
};

}  // namespace detail

/// L2 error of the single segment (i, j): sum over interior vertices of the
/// squared perpendicular distance to the infinite line through i and j.
/// O(1) after build_moments. Indices out of range are a caller bug.
inline double segment_error(const MomentTable& table, const Polyline& curve, Index i, Index j) {
    assert(0 <= i && i < j && j < curve.size());
    return detail::SegmentErrorEval(table, curve)(i, j);
}

/// A strictly increasing breakpoint subsequence of a source polyline plus
/// the L2 error of the piecewise-linear approximation it induces.
struct Approximation {
    Index source_len = 0;
    std::vector<Index> breakpoints;
    double error = 0.0;

    Index segments() const { return static_cast<Index>(breakpoints.size()) - 1; }
};

/// Sum of per-segment errors of `breakpoints` measured on `curve`.
/// Breakpoints must be strictly increasing and span [0, N-1].
inline double breakpoints_error(const MomentTable& table, const Polyline& curve,
                                std::span<const Index> breakpoints) {
    assert(breakpoints.size() >= 2);
    assert(breakpoints.front() == 0 && breakpoints.back() == curve.size() - 1);
    detail::SegmentErrorEval err(table, curve);
    double total = 0.0;
    for (std::size_t t = 0; t + 1 < breakpoints.size(); ++t) {
        assert(breakpoints[t] < breakpoints[t + 1]);
        total += err(breakpoints[t], breakpoints[t + 1]);
    }
    return total;
}

/// Error of an approximation given by its retained points, measured against
/// the original curve. Every approximation vertex must occur in the original
/// (the nested case); retained vertices are matched in order and the error is
/// the sum of segment errors between consecutive matched indices.
inline double curve_error(const Polyline& original, std::span<const Point> approx_points) {
    if (approx_points.size() < 2) {
        throw VertexNotInOriginal("approximation needs at least two vertices");
    }
    const Index n = original.size();
    if (!(approx_points.front() == original[0]) || !(approx_points.back() == original[n - 1])) {
        throw VertexNotInOriginal("approximation endpoints do not match the curve endpoints");
    }
    std::vector<Index> matched;
    matched.reserve(approx_points.size());
    Index at = 0;
    for (const Point& p : approx_points) {
        while (at < n && !(original[at] == p)) ++at;
        if (at == n) {
            throw VertexNotInOriginal("approximation vertex is not a curve vertex");
        }
        matched.push_back(at);
        ++at;
    }
    const MomentTable table = build_moments(original);
    return breakpoints_error(table, original, matched);
}

}  // namespace polysimp
