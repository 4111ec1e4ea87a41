#pragma once

#include <json.hpp>

#include <algorithm>
#include <cassert>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "polysimp/dp.hpp"
#include "polysimp/errors.hpp"
#include "polysimp/geometry.hpp"
#include "polysimp/heuristics.hpp"
#include "polysimp/multiresolution.hpp"

namespace polysimp {

enum class Algorithm { fsdp, rsdp, split, merge, mr };

inline constexpr const char* algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::fsdp: return "fsdp";
        case Algorithm::rsdp: return "rsdp";
        case Algorithm::split: return "split";
        case Algorithm::merge: return "merge";
        case Algorithm::mr: return "mr";
    }
    return "?";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view name) {
    for (Algorithm a : {Algorithm::fsdp, Algorithm::rsdp, Algorithm::split, Algorithm::merge,
                        Algorithm::mr}) {
        if (name == algorithm_name(a)) return a;
    }
    return std::nullopt;
}

/// One simplification through a uniform interface. For MR the final level is
/// returned as an approximation of the original curve.
inline Approximation run_algorithm(const Polyline& curve, Index k, Algorithm algo,
                                   double rho = 0.5, Index beta = 4,
                                   DpStats* stats = nullptr) {
    switch (algo) {
        case Algorithm::fsdp: return fsdp_simplify(curve, k, stats);
        case Algorithm::rsdp: return rsdp_simplify(curve, k, beta, stats);
        case Algorithm::split: return split_simplify(curve, k);
        case Algorithm::merge: return merge_simplify(curve, k);
        case Algorithm::mr: {
            const Pyramid p = mr_simplify(curve, k, rho, beta, stats);
            return extract_level(p, p.level_count());
        }
    }
    throw UsageError("unknown algorithm");
}

/// F = 100 * E_min / E: the optimal error as a percentage of a candidate's
/// error. 100 means the candidate is optimal. By convention 100 when both
/// errors are exactly zero (the curve is exactly representable).
inline double fidelity(double e_min, double e) {
    if (e_min < 0.0 || e < 0.0) {
        throw NegativeError("errors must be nonnegative");
    }
    if (e == 0.0) {
        if (e_min == 0.0) return 100.0;
        throw ZeroDenominator("candidate error is zero but reference is positive");
    }
    return 100.0 * e_min / e;
}

struct FidelityReport {
    double e_min = 0.0;
    double e = 0.0;
    double f = 0.0;
};

inline FidelityReport make_fidelity_report(double e_min, double e) {
    return {e_min, e, fidelity(e_min, e)};
}

/// Deterministic fractal coastline by midpoint displacement: x spans
/// [0, 1024] uniformly, y starts flat and each subdivision level adds a
/// uniform displacement scaled by 256 * 2^(-h * depth). Lower roughness h
/// decays slower, giving a more jagged curve. Uniform values are built
/// directly from mt19937_64 output bits so results do not depend on any
/// library's distribution implementation.
inline Polyline generate_coastline(std::uint64_t seed, Index n, double h) {
    if (!(h > 0.0) || !(h < 1.0)) {
        throw BadRoughness("roughness h must lie strictly between 0 and 1");
    }
    if (n < 2) {
        throw BadPolyline("coastline needs at least two points");
    }
    std::mt19937_64 rng(seed);
    const auto uniform_pm1 = [&rng]() {
        // 53 random bits -> [0,1), affinely mapped to [-1,1)
        const double u = static_cast<double>(rng() >> 11) * 0x1p-53;
        return 2.0 * u - 1.0;
    };

    std::vector<double> y(static_cast<std::size_t>(n), 0.0);
    const double decay = std::exp2(-h);

    struct Span {
        Index lo, hi;
    };
    // Breadth-first over spans: all midpoints of one depth share one
    // amplitude, and the fixed traversal order pins the RNG consumption.
    std::vector<Span> frontier{{0, n - 1}};
    double amp = 256.0 * decay;
    while (!frontier.empty()) {
        std::vector<Span> next;
        next.reserve(frontier.size() * 2);
        for (const Span s : frontier) {
            if (s.hi - s.lo < 2) continue;
            const Index mid = s.lo + (s.hi - s.lo) / 2;
            y[static_cast<std::size_t>(mid)] =
                0.5 * (y[static_cast<std::size_t>(s.lo)] + y[static_cast<std::size_t>(s.hi)]) +
                amp * uniform_pm1();
            next.push_back({s.lo, mid});
            next.push_back({mid, s.hi});
        }
        frontier = std::move(next);
        amp *= decay;
    }

    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(n));
    const double dx = 1024.0 / static_cast<double>(n - 1);
    for (Index i = 0; i < n; ++i) {
        pts.push_back({static_cast<double>(i) * dx, y[static_cast<std::size_t>(i)]});
    }
    return Polyline(std::move(pts));
}

/// One benchmark measurement. rho and beta are set only where the algorithm
/// consumes them; fidelity is absent for timing runs and for the FSDP
/// reference itself outside fidelity sweeps.
struct BenchRecord {
    Algorithm algorithm = Algorithm::fsdp;
    Index n = 0;
    Index k = 0;
    std::optional<double> rho;
    std::optional<Index> beta;
    double runtime_us = 0.0;
    double error = 0.0;
    std::optional<double> fidelity;
    int repetitions = 1;
};

struct SweepParams {
    std::vector<Algorithm> algorithms;
    double rho = 0.5;
    Index beta = 4;
    std::uint64_t seed = 1;  // corpus seed for generated curves
    double h = 0.6;          // coastline roughness for generated curves
};

namespace detail {

template <typename F>
double timed_us(F&& body) {
    const auto t0 = std::chrono::steady_clock::now();
    body();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::micro>(t1 - t0).count();
}

inline double median(std::vector<double> v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        const auto lower = std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
        m = 0.5 * (*lower + m);
    }
    return m;
}

inline void fill_params(BenchRecord& rec, Algorithm algo, const SweepParams& params) {
    if (algo == Algorithm::mr) rec.rho = params.rho;
    if (algo == Algorithm::mr || algo == Algorithm::rsdp) rec.beta = params.beta;
}

}  // namespace detail

/// For each (curve, K): one FSDP run pins E_min, then every requested
/// algorithm is measured against it. The FSDP record itself carries
/// fidelity 100 by definition rather than re-dividing its own error.
inline std::vector<BenchRecord> run_fidelity_sweep(const std::vector<Polyline>& corpus,
                                                   const std::vector<Index>& ks,
                                                   const SweepParams& params) {
    if (corpus.empty()) {
        throw UsageError("fidelity sweep needs a nonempty corpus");
    }
    std::vector<BenchRecord> records;
    for (const Polyline& curve : corpus) {
        for (const Index k : ks) {
            Approximation reference;
            const double ref_us = detail::timed_us([&] { reference = fsdp_simplify(curve, k); });
            for (const Algorithm algo : params.algorithms) {
                BenchRecord rec;
                rec.algorithm = algo;
                rec.n = curve.size();
                rec.k = k;
                rec.repetitions = 1;
                detail::fill_params(rec, algo, params);
                if (algo == Algorithm::fsdp) {
                    rec.runtime_us = ref_us;
                    rec.error = reference.error;
                    rec.fidelity = 100.0;
                } else {
                    Approximation approx;
                    rec.runtime_us = detail::timed_us(
                        [&] { approx = run_algorithm(curve, k, algo, params.rho, params.beta); });
                    rec.error = approx.error;
                    rec.fidelity = fidelity(reference.error, approx.error);
                }
                records.push_back(std::move(rec));
            }
        }
    }
    return records;
}

/// Runtime sweep over curve sizes at fixed K on generated coastlines
/// (curve seed = params.seed + N, so every N gets a distinct deterministic
/// curve). runtime_us is the median of `repetitions` runs on a monotonic
/// clock; moment precomputation happens inside each run and is part of the
/// measured cost. Fidelity is not measured here.
inline std::vector<BenchRecord> run_timing_sweep(const std::vector<Index>& ns, Index k,
                                                 const SweepParams& params, int repetitions) {
    if (repetitions < 5) {
        throw UsageError("timing sweeps need at least 5 repetitions");
    }
    std::vector<BenchRecord> records;
    for (const Algorithm algo : params.algorithms) {
        for (const Index n : ns) {
            const Polyline curve =
                generate_coastline(params.seed + static_cast<std::uint64_t>(n), n, params.h);
            std::vector<double> samples;
            samples.reserve(static_cast<std::size_t>(repetitions));
            Approximation result;
            for (int rep = 0; rep < repetitions; ++rep) {
                samples.push_back(detail::timed_us(
                    [&] { result = run_algorithm(curve, k, algo, params.rho, params.beta); }));
            }
            BenchRecord rec;
            rec.algorithm = algo;
            rec.n = n;
            rec.k = k;
            rec.repetitions = repetitions;
            detail::fill_params(rec, algo, params);
            rec.runtime_us = detail::median(std::move(samples));
            rec.error = result.error;
            records.push_back(std::move(rec));
        }
    }
    std::sort(records.begin(), records.end(), [](const BenchRecord& a, const BenchRecord& b) {
        if (a.algorithm != b.algorithm) return a.algorithm < b.algorithm;
        return a.n < b.n;
    });
    return records;
}

/// Least-squares slope of log(y) against log(x). Needs at least four
/// distinct x values to be meaningful for a complexity fit.
inline double fit_loglog_slope(std::span<const double> xs, std::span<const double> ys) {
    assert(xs.size() == ys.size());
    std::vector<double> distinct(xs.begin(), xs.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 4) {
        throw TooFewPoints("slope fit needs at least 4 distinct sizes");
    }
    const auto count = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double lx = std::log(xs[i]);
        const double ly = std::log(ys[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

/// Slope of log(runtime_us) vs log(N) over one algorithm's records.
inline double fit_loglog_slope(std::span<const BenchRecord> records) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (const BenchRecord& r : records) {
        xs.push_back(static_cast<double>(r.n));
        ys.push_back(r.runtime_us);
    }
    return fit_loglog_slope(xs, ys);
}

namespace detail {

inline void append_shortest(std::string& out, double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    out.append(buf, res.ptr);
}

inline void append_shortest(std::string& out, std::int64_t value) {
    char buf[24];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    out.append(buf, res.ptr);
}

}  // namespace detail

/// CSV export with the stable header
/// `algorithm,N,K,rho,beta,runtime_us,error,fidelity`; absent optionals
/// serialize as empty cells. Numbers use shortest round-trip decimals.
inline std::string to_csv(std::span<const BenchRecord> records) {
    std::string out = "algorithm,N,K,rho,beta,runtime_us,error,fidelity\n";
    for (const BenchRecord& r : records) {
        out += algorithm_name(r.algorithm);
        out += ',';
        detail::append_shortest(out, static_cast<std::int64_t>(r.n));
        out += ',';
        detail::append_shortest(out, static_cast<std::int64_t>(r.k));
        out += ',';
        if (r.rho) detail::append_shortest(out, *r.rho);
        out += ',';
        if (r.beta) detail::append_shortest(out, static_cast<std::int64_t>(*r.beta));
        out += ',';
        detail::append_shortest(out, r.runtime_us);
        out += ',';
        detail::append_shortest(out, r.error);
        out += ',';
        if (r.fidelity) detail::append_shortest(out, *r.fidelity);
        out += '\n';
    }
    return out;
}

/// JSON array export mirroring the CSV schema; absent optionals are omitted
/// rather than null, and the repetition count rides along so records are self-describing.
inline nlohmann::ordered_json to_json(std::span<const BenchRecord> records) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const BenchRecord& r : records) {
        nlohmann::ordered_json obj;
        obj["algorithm"] = algorithm_name(r.algorithm);
        obj["N"] = r.n;
        obj["K"] = r.k;
        if (r.rho) obj["rho"] = *r.rho;
        if (r.beta) obj["beta"] = *r.beta;
        obj["runtime_us"] = r.runtime_us;
        obj["error"] = r.error;
        if (r.fidelity) obj["fidelity"] = *r.fidelity;
        obj["repetitions"] = r.repetitions;
        arr.push_back(std::move(obj));
    }
    return arr;
}

}  // namespace polysimp
