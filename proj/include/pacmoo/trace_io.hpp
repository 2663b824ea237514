#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pacmoo/driver.hpp"

namespace pacmoo {

/// Column names of a trace CSV, in order.
std::vector<std::string> trace_header(const RunTrace& trace);

/// One row per record, floats with 17 significant digits. elapsed_ms is written as 0 unless
/// include_wallclock is set, so reruns produce byte-identical files.
void write_trace_csv(std::ostream& out, const RunTrace& trace, bool include_wallclock = false);

/// Per-iteration median and quartiles of phv and best_f over the given traces (one per seed).
/// Traces must share length and objective count; NaN entries are ignored.
void write_summary_csv(std::ostream& out, const std::vector<RunTrace>& traces);

/// Linear-interpolation quantile of finite values; NaN when none are finite.
double quantile(std::vector<double> values, double q);

/// "%.17g" formatting.
std::string format_double(double v);

}  // namespace pacmoo
