#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>

#include "uam/sim/trace.hpp"

namespace uam::sim {

struct AxisMetrics {
    std::array<double, 3> max_abs{0., 0., 0.};
    std::array<double, 3> mean_abs{0., 0., 0.};
};

/// Per-axis tracking-error statistics over the steady window, plus the
/// percentage reduction of the adaptive controller against the baseline,
/// laid out like the experiment error tables.
struct MetricsReport {
    AxisMetrics dnn_rise;
    AxisMetrics baseline;
    std::array<double, 3> max_reduction_pct{0., 0., 0.};
    std::array<double, 3> mean_reduction_pct{0., 0., 0.};
    std::array<bool, 3> max_reduction_defined{false, false, false};
    std::array<bool, 3> mean_reduction_defined{false, false, false};
    double warmup = 0.;
    size_t window_samples = 0;

    std::string table() const {
        const auto line = [](const char* label, const std::array<double, 3>& v) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "  %-10s %10.4f %10.4f %10.4f\n", label, v[0], v[1],
                          v[2]);
            return std::string(buf);
        };
        const auto pct = [](const std::array<double, 3>& v, const std::array<bool, 3>& def) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "  %-10s %9.2f%% %9.2f%% %9.2f%%\n", "Reduced",
                          def[0] ? v[0] : std::nan(""), def[1] ? v[1] : std::nan(""),
                          def[2] ? v[2] : std::nan(""));
            return std::string(buf);
        };
        std::ostringstream os;
        os << "                    x          y          z\n";
        os << "Max |e1| (m)\n"
           << line("DNN-RISE", dnn_rise.max_abs) << line("Baseline", baseline.max_abs)
           << pct(max_reduction_pct, max_reduction_defined);
        os << "Mean |e1| (m)\n"
           << line("DNN-RISE", dnn_rise.mean_abs) << line("Baseline", baseline.mean_abs)
           << pct(mean_reduction_pct, mean_reduction_defined);
        return os.str();
    }
};

namespace detail {

inline AxisMetrics axis_metrics(const SimTrace& trace, double warmup, size_t& counted) {
    AxisMetrics m;
    std::array<double, 3> sum{0., 0., 0.};
    counted = 0;
    for (const auto& row : trace.rows) {
        if (row.t < warmup) continue;
        ++counted;
        for (int i = 0; i < 3; ++i) {
            const double a = std::abs(row.e1[i]);
            m.max_abs[i] = std::max(m.max_abs[i], a);
            sum[i] += a;
        }
    }
    if (counted == 0) throw std::invalid_argument("metrics: steady window contains no samples");
    for (int i = 0; i < 3; ++i) m.mean_abs[i] = sum[i] / static_cast<double>(counted);
    return m;
}

}  // namespace detail

/// Compares two traces of the same scenario on the same grid.
inline MetricsReport compute_metrics(const SimTrace& dnn, const SimTrace& base,
                                     double warmup = 10.) {
    if (dnn.rows.size() != base.rows.size())
        throw std::invalid_argument("metrics: traces have different lengths");
    if (!dnn.scenario.empty() && !base.scenario.empty() && dnn.scenario != base.scenario)
        throw std::invalid_argument("metrics: traces come from different scenarios");
    for (size_t i = 0; i < dnn.rows.size(); ++i)
        if (dnn.rows[i].t != base.rows[i].t)
            throw std::invalid_argument("metrics: traces are not on the same time grid");

    MetricsReport rep;
    rep.warmup = warmup;
    size_t na = 0, nb = 0;
    rep.dnn_rise = detail::axis_metrics(dnn, warmup, na);
    rep.baseline = detail::axis_metrics(base, warmup, nb);
    rep.window_samples = na;
    for (int i = 0; i < 3; ++i) {
        if (rep.baseline.max_abs[i] > 0.) {
            rep.max_reduction_defined[i] = true;
            rep.max_reduction_pct[i] = 100. * (1. - rep.dnn_rise.max_abs[i] / rep.baseline.max_abs[i]);
        }
        if (rep.baseline.mean_abs[i] > 0.) {
            rep.mean_reduction_defined[i] = true;
            rep.mean_reduction_pct[i] =
                100. * (1. - rep.dnn_rise.mean_abs[i] / rep.baseline.mean_abs[i]);
        }
    }
    return rep;
}

}  // namespace uam::sim
