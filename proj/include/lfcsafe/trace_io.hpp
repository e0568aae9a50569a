#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lfcsafe/scenario.hpp"

namespace lfcsafe {

/// Fixed CSV schema; one row per TraceRecord, floats with 9 significant digits.
inline constexpr const char* trace_header =
    "t,x_dp_g,x_dp_m,x_d_omega,x_d_omega_hat,x_omega_dot_hat,"
    "xhat_dp_g,xhat_dp_m,xhat_d_omega,xhat_d_omega_hat,xhat_omega_dot_hat,"
    "dp_c_legit,dp_c_attacked,dp_c_star,dp_l,h_omega,h_nu,"
    "scc_modified,alarm,relay_of,relay_uf,relay_rocof,trip_events";

inline constexpr int trace_columns = 23;

namespace detail {

inline void append_g9(std::string& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    out += buf;
}

}  // namespace detail

inline std::string format_trace_row(const TraceRecord& r) {
    std::string row;
    row.reserve(256);
    detail::append_g9(row, r.t);
    for (int i = 0; i < 5; ++i) {
        row += ',';
        detail::append_g9(row, r.x(i));
    }
    for (int i = 0; i < 5; ++i) {
        row += ',';
        detail::append_g9(row, r.x_hat(i));
    }
    for (double v : {r.dp_c_legit, r.dp_c_attacked, r.dp_c_star, r.dp_l, r.h_omega, r.h_nu}) {
        row += ',';
        detail::append_g9(row, v);
    }
    row += r.scc_modified ? ",1" : ",0";
    row += r.alarm ? ",1" : ",0";
    row += ',';
    row += std::to_string(r.relay_of);
    row += ',';
    row += std::to_string(r.relay_uf);
    row += ',';
    row += std::to_string(r.relay_rocof);
    row += ',';
    for (std::size_t i = 0; i < r.trip_events.size(); ++i) {
        if (i) row += ';';
        row += to_string(r.trip_events[i].element);
        row += '@';
        detail::append_g9(row, r.trip_events[i].time);
    }
    return row;
}

inline void write_trace(const std::vector<TraceRecord>& trace, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write trace file: " + path);
    out << trace_header << '\n';
    for (const auto& r : trace) out << format_trace_row(r) << '\n';
}

namespace detail {

inline std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

inline double parse_trace_double(std::string_view v, int row) {
    const std::string buf(v);
    char* end = nullptr;
    const double x = std::strtod(buf.c_str(), &end);
    if (buf.empty() || end != buf.c_str() + buf.size())
        throw std::runtime_error("trace row " + std::to_string(row) + ": bad number '" + buf +
                                 "'");
    return x;
}

inline RelayElement parse_element(std::string_view name, int row) {
    if (name == "OF") return RelayElement::over_frequency;
    if (name == "UF") return RelayElement::under_frequency;
    if (name == "ROCOF") return RelayElement::rocof;
    throw std::runtime_error("trace row " + std::to_string(row) + ": unknown relay element '" +
                             std::string(name) + "'");
}

}  // namespace detail

inline std::vector<TraceRecord> read_trace(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open trace file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty trace file: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != trace_header)
        throw std::runtime_error("trace header does not match the expected schema: " + path);

    std::vector<TraceRecord> trace;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cols = detail::split(line, ',');
        if (std::ssize(cols) != trace_columns)
            throw std::runtime_error("trace row " + std::to_string(row) + ": expected " +
                                     std::to_string(trace_columns) + " columns, got " +
                                     std::to_string(cols.size()));
        TraceRecord r;
        r.t = detail::parse_trace_double(cols[0], row);
        for (int i = 0; i < 5; ++i) r.x(i) = detail::parse_trace_double(cols[1 + i], row);
        for (int i = 0; i < 5; ++i) r.x_hat(i) = detail::parse_trace_double(cols[6 + i], row);
        r.dp_c_legit = detail::parse_trace_double(cols[11], row);
        r.dp_c_attacked = detail::parse_trace_double(cols[12], row);
        r.dp_c_star = detail::parse_trace_double(cols[13], row);
        r.dp_l = detail::parse_trace_double(cols[14], row);
        r.h_omega = detail::parse_trace_double(cols[15], row);
        r.h_nu = detail::parse_trace_double(cols[16], row);
        r.scc_modified = cols[17] == "1";
        r.alarm = cols[18] == "1";
        r.relay_of = static_cast<int>(detail::parse_trace_double(cols[19], row));
        r.relay_uf = static_cast<int>(detail::parse_trace_double(cols[20], row));
        r.relay_rocof = static_cast<int>(detail::parse_trace_double(cols[21], row));
        if (!cols[22].empty()) {
            for (const auto ev : detail::split(cols[22], ';')) {
                const auto at = ev.find('@');
                if (at == std::string_view::npos)
                    throw std::runtime_error("trace row " + std::to_string(row) +
                                             ": bad trip event '" + std::string(ev) + "'");
                TripEvent e;
                e.element = detail::parse_element(ev.substr(0, at), row);
                e.time = detail::parse_trace_double(ev.substr(at + 1), row);
                r.trip_events.push_back(e);
            }
        }
        trace.push_back(std::move(r));
    }
    return trace;
}

}  // namespace lfcsafe
