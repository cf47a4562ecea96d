#pragma once

// Text model file:
//   pagesort-mlp v1
//   5 5 3
//   w_ih rows, b_h, w_ho rows, b_o   (17 significant digits)

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pagesort/error.hpp"
#include "pagesort/html.hpp"
#include "pagesort/mlp.hpp"

namespace pagesort {

inline constexpr std::string_view kModelHeader = "pagesort-mlp v1";

inline std::string format_model(const Network& net) {
    std::string out(kModelHeader);
    out += "\n5 5 3\n";
    auto row = [&](const auto& values) {
        bool first = true;
        char buf[40];
        for (double v : values) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            if (!first) out += ' ';
            out += buf;
            first = false;
        }
        out += '\n';
    };
    for (const auto& r : net.w_ih) row(r);
    row(net.b_h);
    for (const auto& r : net.w_ho) row(r);
    row(net.b_o);
    return out;
}

inline Network parse_model(std::string_view text, const std::string& source = "<model>") {
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    auto next_line = [&]() -> std::string {
        if (!std::getline(in, line)) {
            throw ParseError(source, lineno + 1, "unexpected end of model file");
        }
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
    };

    const auto header = next_line();
    if (html::trim(header) != kModelHeader) {
        throw ParseError(source, lineno,
                         "unsupported model version '" + header + "', expected '" +
                             std::string(kModelHeader) + "'");
    }
    const auto dims = next_line();
    {
        std::istringstream ds(dims);
        long a = 0, b = 0, c = 0;
        std::string extra;
        if (!(ds >> a >> b >> c) || (ds >> extra) || a != 5 || b != 5 || c != 3) {
            throw ParseError(source, lineno,
                             "architecture mismatch: got '" + dims + "', expected '5 5 3'");
        }
    }
    auto read_row = [&](auto& dest) {
        const auto text_row = next_line();
        std::string_view rest = text_row;
        std::size_t n = 0;
        while (true) {
            rest = html::trim(rest);
            if (rest.empty()) break;
            auto end = rest.find_first_of(" \t");
            const auto tok = rest.substr(0, end);
            if (n == dest.size()) {
                throw ParseError(source, lineno,
                                 "too many values (expected " + std::to_string(dest.size()) + ")");
            }
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc{} || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
                throw ParseError(source, lineno, "bad number '" + std::string(tok) + "'");
            }
            dest[n++] = v;
            if (end == std::string_view::npos) break;
            rest.remove_prefix(end);
        }
        if (n != dest.size()) {
            throw ParseError(source, lineno,
                             "expected " + std::to_string(dest.size()) + " values, got " +
                                 std::to_string(n));
        }
    };
    Network net;
    for (auto& r : net.w_ih) read_row(r);
    read_row(net.b_h);
    for (auto& r : net.w_ho) read_row(r);
    read_row(net.b_o);
    while (std::getline(in, line)) {
        ++lineno;
        if (!html::trim(line).empty()) throw ParseError(source, lineno, "trailing data");
    }
    return net;
}

inline void save_model(const Network& net, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write model file '" + path + "'");
    out << format_model(net);
    if (!out) throw IoError("write failed for model file '" + path + "'");
}

inline Network load_model(const std::string& path) {
    if (!std::filesystem::exists(path)) throw IoError("model file not found: '" + path + "'");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str(), path);
}

}  // namespace pagesort
