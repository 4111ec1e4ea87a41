#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "polysimp/errors.hpp"
#include "polysimp/geometry.hpp"

namespace polysimp {

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

inline double parse_coordinate(std::string_view token, std::size_t line_no) {
    token = trim(token);
    double value = 0.0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (res.ec != std::errc{} || res.ptr != token.data() + token.size() || token.empty()) {
        throw BadPolyline("line " + std::to_string(line_no) + ": malformed coordinate");
    }
    return value;
}

}  // namespace detail

/// Parses `x,y` decimal text, one point per line. Blank lines and lines
/// whose first non-space character is `#` are ignored. The resulting
/// polyline is validated and deduplicated by the Polyline constructor.
inline Polyline parse_polyline_text(std::string_view text) {
    std::vector<Point> pts;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        const std::string_view line = detail::trim(text.substr(pos, eol - pos));
        pos = eol + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string_view::npos ||
            line.find(',', comma + 1) != std::string_view::npos) {
            throw BadPolyline("line " + std::to_string(line_no) +
                              ": expected exactly one comma in `x,y`");
        }
        pts.push_back({detail::parse_coordinate(line.substr(0, comma), line_no),
                       detail::parse_coordinate(line.substr(comma + 1), line_no)});
    }
    return Polyline(std::move(pts));
}

/// Shortest-round-trip `x,y` lines; reading the text back reproduces every
/// coordinate bit for bit.
inline std::string polyline_to_text(const Polyline& curve) {
    std::string out;
    char buf[32];
    for (const Point& p : curve.points()) {
        auto res = std::to_chars(buf, buf + sizeof(buf), p.x);
        out.append(buf, res.ptr);
        out += ',';
        res = std::to_chars(buf, buf + sizeof(buf), p.y);
        out.append(buf, res.ptr);
        out += '\n';
    }
    return out;
}

inline Polyline read_polyline(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) {
        throw IoError("failed reading " + path.string());
    }
    return parse_polyline_text(buffer.str());
}

/// Writes via a sibling temp file and an atomic rename, so readers never
/// observe a partially written result.
inline void atomic_write(const std::filesystem::path& path, std::string_view content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot create " + tmp.string());
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::error_code ignore;
            std::filesystem::remove(tmp, ignore);
            throw IoError("failed writing " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::error_code ignore;
        std::filesystem::remove(tmp, ignore);
        throw IoError("cannot move " + tmp.string() + " into place: " + ec.message());
    }
}

inline void write_polyline(const std::filesystem::path& path, const Polyline& curve) {
    atomic_write(path, polyline_to_text(curve));
}

}  // namespace polysimp
