#pragma once

#include <charconv>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "point.hpp"

namespace sparsesplit {

// Comment lines placed before the data; stored without the leading "# ".
struct DatasetHeader {
    std::vector<std::string> lines;
};

namespace detail {

inline std::string_view next_token(std::string_view line, std::size_t& pos) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    const std::size_t beg = pos;
    while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t') ++pos;
    return line.substr(beg, pos - beg);
}

} // namespace detail

// One data line: a label token ("1"/"+1" positive, "0"/"-1" negative)
// followed by index:value tokens with 1-based strictly increasing indices.
// Nonzero values binarize to 1, zero values are dropped; in-memory ids are
// 0-based. Malformed input throws std::runtime_error.
inline SparsePoint parse_point(std::string_view line) {
    const auto fail = [](const std::string& why) {
        throw std::runtime_error("parse_point: " + why);
    };
    std::size_t pos = 0;
    std::string_view tok = detail::next_token(line, pos);
    SparsePoint p;
    if (tok == "1" || tok == "+1") p.label = 1;
    else if (tok == "0" || tok == "-1") p.label = 0;
    else fail("bad label token '" + std::string(tok) + "'");
    std::uint64_t prev_idx = 0;
    for (tok = detail::next_token(line, pos); !tok.empty();
         tok = detail::next_token(line, pos)) {
        const std::size_t colon = tok.find(':');
        if (colon == std::string_view::npos || colon == 0 || colon + 1 == tok.size())
            fail("malformed token '" + std::string(tok) + "'");
        std::uint64_t idx = 0;
        auto [ip, iec] = std::from_chars(tok.data(), tok.data() + colon, idx);
        if (iec != std::errc{} || ip != tok.data() + colon)
            fail("bad feature index in '" + std::string(tok) + "'");
        if (idx == 0) fail("feature indices are 1-based");
        if (idx <= prev_idx)
            fail("indices must be strictly increasing at '" + std::string(tok) + "'");
        prev_idx = idx;
        double val = 0.0;
        auto [vp, vec] =
            std::from_chars(tok.data() + colon + 1, tok.data() + tok.size(), val);
        if (vec != std::errc{} || vp != tok.data() + tok.size())
            fail("bad feature value in '" + std::string(tok) + "'");
        if (val != 0.0) p.ones.push_back(idx - 1);
    }
    return p;
}

// Streams points to `fn(SparsePoint&&)` without materializing the dataset.
// Blank lines and '#' comments are skipped; parse errors are rethrown with
// the 1-based line number. Optional '\r' line endings are tolerated.
template <class Fn>
void for_each_point(std::istream& in, Fn&& fn) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t i = 0;
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        if (i == line.size() || line[i] == '#') continue;
        try {
            fn(parse_point(std::string_view(line)));
        } catch (const std::exception& e) {
            throw std::runtime_error("line " + std::to_string(lineno) + ": " +
                                     e.what());
        }
    }
}

inline std::vector<SparsePoint> read_dataset(std::istream& in) {
    std::vector<SparsePoint> out;
    for_each_point(in, [&](SparsePoint&& p) { out.push_back(std::move(p)); });
    return out;
}

inline void write_point(std::ostream& os, const SparsePoint& p) {
    os << p.label;
    for (FeatureId j : p.ones) os << ' ' << (j + 1) << ":1";
    os << '\n';
}

inline void write_dataset(std::ostream& os, std::span<const SparsePoint> points,
                          const DatasetHeader& header = {}) {
    for (const std::string& line : header.lines) os << "# " << line << '\n';
    for (const SparsePoint& p : points) write_point(os, p);
}

} // namespace sparsesplit
