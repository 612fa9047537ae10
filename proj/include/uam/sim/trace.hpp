#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "uam/core.hpp"
#include "uam/errors.hpp"

namespace uam::sim {

/// One logged step. The first block of columns is the stable public set;
/// the remaining diagnostics (reference derivatives, applied lumped force,
/// effective input/mass, baseline PD terms) extend it without reordering.
struct TraceRow {
    double t = 0.;
    Vec3 p, v, p_d, e1, e2, r, U, U_c, mu, f_hat, F_m, F_c, F_d;
    std::vector<double> layer_norms;   // |Vhat_i|_F per layer
    Vec3 pd_dot, pd_ddot, F, U_eff, pd_p, pd_d;
    double m_eff = 0.;

    TraceRow() {
        p = v = p_d = e1 = e2 = r = U = U_c = mu = f_hat = F_m = F_c = F_d = Vec3::Zero();
        pd_dot = pd_ddot = F = U_eff = pd_p = pd_d = Vec3::Zero();
    }
};

struct SimTrace {
    std::string scenario;
    std::string controller;
    std::string status = "ok";   // "ok" | "diverged"
    double dt = 0.;
    std::uint64_t seed = 0;
    int layer_count = 0;
    std::vector<TraceRow> rows;

    static std::vector<std::string> column_names(int layers) {
        std::vector<std::string> names{"t"};
        const auto add3 = [&](const std::string& base) {
            names.push_back(base + "_x");
            names.push_back(base + "_y");
            names.push_back(base + "_z");
        };
        for (const char* base : {"p", "v", "pd", "e1", "e2", "r", "U", "Uc", "mu", "fdhat",
                                 "Fm", "Fc", "Fd"})
            add3(base);
        for (int i = 0; i < layers; ++i) names.push_back("Vhat" + std::to_string(i) + "_fro");
        for (const char* base : {"pddot", "pdddot", "F", "Ueff", "pdp", "pdd"}) add3(base);
        names.push_back("m_eff");
        return names;
    }

    std::vector<double> row_values(const TraceRow& r) const {
        std::vector<double> v;
        v.reserve(59 + layer_count);
        v.push_back(r.t);
        const auto add = [&](const Vec3& x) {
            v.push_back(x.x());
            v.push_back(x.y());
            v.push_back(x.z());
        };
        add(r.p); add(r.v); add(r.p_d); add(r.e1); add(r.e2); add(r.r);
        add(r.U); add(r.U_c); add(r.mu); add(r.f_hat); add(r.F_m); add(r.F_c); add(r.F_d);
        for (double n : r.layer_norms) v.push_back(n);
        add(r.pd_dot); add(r.pd_ddot); add(r.F); add(r.U_eff); add(r.pd_p); add(r.pd_d);
        v.push_back(r.m_eff);
        return v;
    }
};

namespace detail {

inline std::string fmt17(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// RFC-4180 quoting; our headers and numbers never need it, but imported
// traces should survive a round trip regardless.
inline std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace detail

inline void export_csv(const SimTrace& trace, std::ostream& out) {
    const auto names = SimTrace::column_names(trace.layer_count);
    for (size_t i = 0; i < names.size(); ++i)
        out << detail::csv_quote(names[i]) << (i + 1 < names.size() ? "," : "\r\n");
    for (const auto& row : trace.rows) {
        const auto vals = trace.row_values(row);
        for (size_t i = 0; i < vals.size(); ++i)
            out << detail::fmt17(vals[i]) << (i + 1 < vals.size() ? "," : "\r\n");
    }
}

inline std::string export_csv_string(const SimTrace& trace) {
    std::ostringstream os;
    export_csv(trace, os);
    return os.str();
}

inline void save_csv(const SimTrace& trace, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write trace file " + path + ": " + std::strerror(errno));
    export_csv(trace, out);
    if (!out) throw std::runtime_error("write failure on " + path);
}

/// Reads a CSV produced by export_csv. The layer count is recovered from
/// the header; all floats round-trip exactly through the %.17g format.
inline SimTrace import_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("trace import: empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = detail::split_csv_line(line);
    int layers = 0;
    for (const auto& h : header)
        if (h.rfind("Vhat", 0) == 0) ++layers;
    const auto expected = SimTrace::column_names(layers);
    if (header != expected) throw std::runtime_error("trace import: unexpected column layout");

    SimTrace trace;
    trace.layer_count = layers;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = detail::split_csv_line(line);
        if (cells.size() != header.size())
            throw std::runtime_error("trace import: ragged row");
        std::vector<double> vals(cells.size());
        for (size_t i = 0; i < cells.size(); ++i) vals[i] = std::stod(cells[i]);

        TraceRow r;
        size_t k = 0;
        const auto get3 = [&](Vec3& v) {
            v.x() = vals[k++];
            v.y() = vals[k++];
            v.z() = vals[k++];
        };
        r.t = vals[k++];
        get3(r.p); get3(r.v); get3(r.p_d); get3(r.e1); get3(r.e2); get3(r.r);
        get3(r.U); get3(r.U_c); get3(r.mu); get3(r.f_hat); get3(r.F_m); get3(r.F_c); get3(r.F_d);
        r.layer_norms.resize(layers);
        for (int i = 0; i < layers; ++i) r.layer_norms[i] = vals[k++];
        get3(r.pd_dot); get3(r.pd_ddot); get3(r.F); get3(r.U_eff); get3(r.pd_p); get3(r.pd_d);
        r.m_eff = vals[k++];
        trace.rows.push_back(std::move(r));
    }
    return trace;
}

inline SimTrace load_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read trace file " + path + ": " + std::strerror(errno));
    return import_csv(in);
}

/// Adapter for the open-loop residual diagnostic on a logged row.
inline Vec3 row_open_loop_residual(const TraceRow& row, const Vec3& friction_coeffs, double k1,
                                   double k2) {
    OpenLoopSample s;
    s.mass = row.m_eff;
    s.friction_coeffs = friction_coeffs;
    s.k1 = k1;
    s.k2 = k2;
    s.e1 = row.e1;
    s.e2 = row.e2;
    s.r = row.r;
    s.v = row.v;
    s.v_d = row.pd_dot;
    s.a_d = row.pd_ddot;
    s.F = row.F;
    s.U = row.U_eff;
    return open_loop_residual(s);
}

}  // namespace uam::sim
