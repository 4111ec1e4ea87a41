#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "polysimp/dp.hpp"
#include "polysimp/errors.hpp"
#include "polysimp/evaluation.hpp"
#include "polysimp/geometry.hpp"
#include "polysimp/io.hpp"
#include "polysimp/multiresolution.hpp"

namespace polysimp {

enum class Command { simplify, fidelity, bench, gen, help };
enum class OutputFormat { csv, json };

struct RunConfig {
    Command command = Command::help;
    Algorithm algo = Algorithm::fsdp;   // simplify, fidelity
    std::vector<Algorithm> algos;       // bench
    std::string input;
    std::string output;                 // empty means stdout
    Index k = 1;
    double rho = 0.5;
    Index beta = 4;
    OutputFormat format = OutputFormat::csv;
    std::uint64_t seed = 1;
    std::vector<Index> ns;              // bench sizes, or the single gen size
    int reps = 7;
    double h = 0.6;
    std::string help_text;              // filled when command == help
};

namespace detail {

inline Index parse_size_token(std::string_view tok) {
    Index value = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size() || value < 1) {
        throw UsageError("bad size `" + std::string(tok) + "` in --n");
    }
    return value;
}

}  // namespace detail

/// Expands the --n grammar into an explicit size list:
///   `4096`            a single size
///   `64,100,128`      a comma list
///   `1024:65536:x2`   geometric, multiply by 2 until stop is passed
///   `10:50:+10`       arithmetic, add 10 until stop is passed
inline std::vector<Index> parse_range(std::string_view text) {
    std::vector<Index> out;
    if (text.find(':') != std::string_view::npos) {
        std::vector<std::string_view> parts;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const std::size_t next = std::min(text.find(':', pos), text.size());
            parts.push_back(text.substr(pos, next - pos));
            pos = next + 1;
        }
        if (parts.size() != 3 || parts[2].size() < 2) {
            throw UsageError("range must look like start:stop:x2 or start:stop:+10");
        }
        const std::int64_t start = detail::parse_size_token(parts[0]);
        const std::int64_t stop = detail::parse_size_token(parts[1]);
        const char mode = parts[2].front();
        const std::int64_t step = detail::parse_size_token(parts[2].substr(1));
        if (start > stop) {
            throw UsageError("range start exceeds stop");
        }
        if (mode == 'x' && step < 2) {
            throw UsageError("range factor must be at least 2");
        }
        if (mode != 'x' && mode != '+') {
            throw UsageError("range step must start with `x` or `+`");
        }
        for (std::int64_t v = start; v <= stop; v = (mode == 'x') ? v * step : v + step) {
            out.push_back(static_cast<Index>(v));
        }
        return out;
    }
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t next = std::min(text.find(',', pos), text.size());
        out.push_back(detail::parse_size_token(text.substr(pos, next - pos)));
        pos = next + 1;
    }
    return out;
}

namespace detail {

inline std::vector<Algorithm> parse_algorithm_list(const std::string& text) {
    std::vector<Algorithm> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t next = std::min(text.find(',', pos), text.size());
        const std::string name = text.substr(pos, next - pos);
        pos = next + 1;
        const auto algo = parse_algorithm(name);
        if (!algo) {
            throw UsageError("unknown algorithm `" + name + "`");
        }
        out.push_back(*algo);
    }
    return out;
}

}  // namespace detail

inline RunConfig parse_args(std::vector<std::string> args) {
    RunConfig cfg;
    std::string algo_str;
    std::string algos_str;
    std::string n_str;
    std::string format_str = "csv";

    const CLI::Validator open_unit(
        [](std::string& s) -> std::string {
            double v = 0.0;
            const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
            if (res.ec != std::errc{} || res.ptr != s.data() + s.size() ||
                !(v > 0.0 && v < 1.0)) {
                return "must lie strictly between 0 and 1";
            }
            return {};
        },
        "FLOAT in (0,1)");
    const auto algo_member = CLI::IsMember({"fsdp", "rsdp", "split", "merge", "mr"});
    const auto format_member = CLI::IsMember({"csv", "json"});

    CLI::App app{"polygonal curve simplification toolkit"};
    app.require_subcommand(1);

    CLI::App* simplify = app.add_subcommand(
        "simplify", "reduce a curve to K segments and report retained vertices");
    CLI::App* fidelity = app.add_subcommand(
        "fidelity", "score one algorithm's output against the optimal error");
    for (CLI::App* sub : {simplify, fidelity}) {
        sub->add_option("--algo", algo_str, "algorithm to run")
            ->required()
            ->check(algo_member);
        sub->add_option("--k", cfg.k, "segment budget")->required();
        sub->add_option("--rho", cfg.rho, "per-level reduction ratio for mr")
            ->check(open_unit);
        sub->add_option("--beta", cfg.beta, "corridor half-width for rsdp and mr")
            ->check(CLI::PositiveNumber);
        sub->add_option("--in", cfg.input, "input polyline file")->required();
        sub->add_option("--out", cfg.output, "output path (stdout when omitted)");
        sub->add_option("--format", format_str, "output format")->check(format_member);
    }

    CLI::App* bench = app.add_subcommand(
        "bench", "time algorithms over generated coastlines of several sizes");
    bench->add_option("--algos", algos_str, "comma list of algorithms")->required();
    bench->add_option("--k", cfg.k, "segment budget")->required();
    bench->add_option("--n", n_str, "curve sizes, e.g. 1024:65536:x2")->required();
    bench->add_option("--rho", cfg.rho, "per-level reduction ratio for mr")
        ->check(open_unit);
    bench->add_option("--beta", cfg.beta, "corridor half-width for rsdp and mr")
        ->check(CLI::PositiveNumber);
    bench->add_option("--seed", cfg.seed, "base seed for generated curves");
    bench->add_option("--reps", cfg.reps, "timing repetitions per cell (at least 5)");
    bench->add_option("--roughness", cfg.h, "coastline roughness")->check(open_unit);
    bench->add_option("--format", format_str, "output format")->check(format_member);
    bench->add_option("--out", cfg.output, "output path (stdout when omitted)");

    CLI::App* gen = app.add_subcommand("gen", "write a deterministic fractal coastline");
    gen->add_option("--n", n_str, "vertex count")->required();
    gen->add_option("--seed", cfg.seed, "generator seed");
    gen->add_option("--roughness", cfg.h, "coastline roughness")->check(open_unit);
    gen->add_option("--out", cfg.output, "output path (stdout when omitted)");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp&) {
        cfg.command = Command::help;
        cfg.help_text = app.help();
        return cfg;
    } catch (const CLI::CallForAllHelp&) {
        cfg.command = Command::help;
        cfg.help_text = app.help("", CLI::AppFormatMode::All);
        return cfg;
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    if (simplify->parsed()) cfg.command = Command::simplify;
    if (fidelity->parsed()) cfg.command = Command::fidelity;
    if (bench->parsed()) cfg.command = Command::bench;
    if (gen->parsed()) cfg.command = Command::gen;

    if (!algo_str.empty()) cfg.algo = *parse_algorithm(algo_str);
    if (bench->parsed()) cfg.algos = detail::parse_algorithm_list(algos_str);
    if (!n_str.empty()) cfg.ns = parse_range(n_str);
    cfg.format = (format_str == "json") ? OutputFormat::json : OutputFormat::csv;
    return cfg;
}

namespace detail {

inline void emit(const std::string& out_path, std::string_view content) {
    if (out_path.empty()) {
        std::fwrite(content.data(), 1, content.size(), stdout);
    } else {
        atomic_write(out_path, content);
    }
}

// A file that does not parse is a bad input file, not an algorithm failure,
// so fold it into the I/O exit code.
inline Polyline load_curve(const std::string& path) {
    try {
        return read_polyline(path);
    } catch (const BadPolyline& e) {
        throw IoError(path + ": " + e.what());
    }
}

inline nlohmann::ordered_json pyramid_to_json(const Pyramid& pyramid) {
    nlohmann::ordered_json out;
    out["schedule"] = pyramid.schedule.levels;
    out["r"] = pyramid.schedule.r;
    out["truncated"] = pyramid.schedule.truncated;
    auto levels = nlohmann::ordered_json::array();
    for (Index j = 0; j < pyramid.level_count(); ++j) {
        const auto t = static_cast<std::size_t>(j);
        nlohmann::ordered_json level;
        level["segments"] = pyramid.resolved[t].size() - 1;
        level["resolved"] = pyramid.resolved[t];
        level["error"] = pyramid.errors[t];
        levels.push_back(std::move(level));
    }
    out["levels"] = std::move(levels);
    return out;
}

inline nlohmann::ordered_json simplify_sidecar(const RunConfig& cfg, const Polyline& curve,
                                               const Approximation& approx,
                                               const Pyramid* pyramid) {
    nlohmann::ordered_json doc;
    doc["algorithm"] = algorithm_name(cfg.algo);
    doc["N"] = curve.size();
    doc["K"] = cfg.k;
    if (cfg.algo == Algorithm::mr) doc["rho"] = cfg.rho;
    if (cfg.algo == Algorithm::mr || cfg.algo == Algorithm::rsdp) doc["beta"] = cfg.beta;
    doc["error"] = approx.error;
    doc["breakpoints"] = approx.breakpoints;
    if (pyramid != nullptr) doc["pyramid"] = pyramid_to_json(*pyramid);
    return doc;
}

inline int run_simplify(const RunConfig& cfg) {
    const Polyline curve = load_curve(cfg.input);
    Approximation approx;
    std::optional<Pyramid> pyramid;
    if (cfg.algo == Algorithm::mr) {
        pyramid = mr_simplify(curve, cfg.k, cfg.rho, cfg.beta);
        approx = extract_level(*pyramid, pyramid->level_count());
    } else {
        approx = run_algorithm(curve, cfg.k, cfg.algo, cfg.rho, cfg.beta);
    }

    const nlohmann::ordered_json sidecar =
        simplify_sidecar(cfg, curve, approx, pyramid ? &*pyramid : nullptr);
    std::string indices;
    for (std::size_t i = 0; i < approx.breakpoints.size(); ++i) {
        if (i > 0) indices += ',';
        append_shortest(indices, static_cast<std::int64_t>(approx.breakpoints[i]));
    }
    indices += '\n';

    if (cfg.format == OutputFormat::json) {
        emit(cfg.output, sidecar.dump(2) + "\n");
        return 0;
    }
    // CSV keeps the index list as the primary artifact and parks everything
    // else (error, parameters, pyramid levels) in a .json sidecar.
    if (cfg.output.empty()) {
        emit("", indices);
        emit("", sidecar.dump(2) + "\n");
    } else {
        emit(cfg.output, indices);
        emit(cfg.output + ".json", sidecar.dump(2) + "\n");
    }
    return 0;
}

inline int run_fidelity(const RunConfig& cfg) {
    const Polyline curve = load_curve(cfg.input);
    const Approximation best = fsdp_simplify(curve, cfg.k);
    const Approximation approx = run_algorithm(curve, cfg.k, cfg.algo, cfg.rho, cfg.beta);
    const FidelityReport report = make_fidelity_report(best.error, approx.error);

    if (cfg.format == OutputFormat::csv) {
        std::string out = "algorithm,N,K,e_min,e,fidelity\n";
        out += algorithm_name(cfg.algo);
        out += ',';
        append_shortest(out, static_cast<std::int64_t>(curve.size()));
        out += ',';
        append_shortest(out, static_cast<std::int64_t>(cfg.k));
        out += ',';
        append_shortest(out, report.e_min);
        out += ',';
        append_shortest(out, report.e);
        out += ',';
        append_shortest(out, report.f);
        out += '\n';
        emit(cfg.output, out);
        return 0;
    }
    nlohmann::ordered_json doc;
    doc["algorithm"] = algorithm_name(cfg.algo);
    doc["N"] = curve.size();
    doc["K"] = cfg.k;
    if (cfg.algo == Algorithm::mr) doc["rho"] = cfg.rho;
    if (cfg.algo == Algorithm::mr || cfg.algo == Algorithm::rsdp) doc["beta"] = cfg.beta;
    doc["e_min"] = report.e_min;
    doc["e"] = report.e;
    doc["fidelity"] = report.f;
    emit(cfg.output, doc.dump(2) + "\n");
    return 0;
}

inline int run_bench(const RunConfig& cfg) {
    SweepParams params;
    params.algorithms = cfg.algos;
    params.rho = cfg.rho;
    params.beta = cfg.beta;
    params.seed = cfg.seed;
    params.h = cfg.h;
    const std::vector<BenchRecord> records =
        run_timing_sweep(cfg.ns, cfg.k, params, cfg.reps);
    if (cfg.format == OutputFormat::json) {
        emit(cfg.output, to_json(records).dump(2) + "\n");
    } else {
        emit(cfg.output, to_csv(records));
    }
    return 0;
}

inline int run_gen(const RunConfig& cfg) {
    if (cfg.ns.size() != 1) {
        throw UsageError("gen takes a single --n value");
    }
    const Polyline curve = generate_coastline(cfg.seed, cfg.ns.front(), cfg.h);
    emit(cfg.output, polyline_to_text(curve));
    return 0;
}

}  // namespace detail

inline int run(const RunConfig& cfg) {
    switch (cfg.command) {
        case Command::simplify: return detail::run_simplify(cfg);
        case Command::fidelity: return detail::run_fidelity(cfg);
        case Command::bench: return detail::run_bench(cfg);
        case Command::gen: return detail::run_gen(cfg);
        case Command::help: std::fputs(cfg.help_text.c_str(), stdout); return 0;
    }
    return 1;
}

/// Full command pipeline with the documented exit codes: 0 success,
/// 1 usage, 2 file I/O, 3 algorithm failure. One diagnostic line on stderr.
inline int cli_main(std::vector<std::string> args) {
    RunConfig cfg;
    try {
        cfg = parse_args(std::move(args));
    } catch (const UsageError& e) {
        std::fprintf(stderr, "polysimp: %s\n", e.what());
        return 1;
    }
    try {
        return run(cfg);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "polysimp: %s\n", e.what());
        return 1;
    } catch (const IoError& e) {
        std::fprintf(stderr, "polysimp: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "polysimp: %s\n", e.what());
        return 3;
    }
}

}  // namespace polysimp
