#include "pacmoo/trace_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace pacmoo {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> trace_header(const RunTrace& trace) {
  std::vector<std::string> h{"iter", "mode"};
  for (Index i = 0; i < trace.dim; ++i) h.push_back("x_" + std::to_string(i));
  for (int i = 0; i < trace.num_objectives; ++i) h.push_back("yf_" + std::to_string(i));
  for (int i = 0; i < trace.num_constraints; ++i) h.push_back("yc_" + std::to_string(i));
  h.push_back("feasible");
  h.push_back("phv");
  for (int i = 0; i < trace.num_objectives; ++i) h.push_back("best_f" + std::to_string(i));
  h.push_back("elapsed_ms");
  return h;
}

namespace {

void write_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    out << cells[i];
  }
  out << '\n';
}

}  // namespace

void write_trace_csv(std::ostream& out, const RunTrace& trace, bool include_wallclock) {
  write_row(out, trace_header(trace));
  std::vector<std::string> row;
  for (const auto& r : trace.records) {
    row.clear();
    row.push_back(std::to_string(r.iteration));
    row.emplace_back(to_string(r.mode));
    for (Index i = 0; i < r.x.size(); ++i) row.push_back(format_double(r.x[i]));
    for (Index i = 0; i < r.y.size(); ++i) row.push_back(format_double(r.y[i]));
    row.push_back(r.feasible ? "1" : "0");
    row.push_back(format_double(r.phv));
    for (Index i = 0; i < r.best_objectives.size(); ++i) {
      row.push_back(format_double(r.best_objectives[i]));
    }
    row.push_back(format_double(include_wallclock ? r.elapsed_ms : 0.0));
    write_row(out, row);
  }
}

double quantile(std::vector<double> values, double q) {
  std::erase_if(values, [](double v) { return !std::isfinite(v); });
  if (values.empty()) return std::nan("");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

void write_summary_csv(std::ostream& out, const std::vector<RunTrace>& traces) {
  if (traces.empty()) throw UsageError("write_summary_csv: no traces");
  const std::size_t n = traces.front().records.size();
  const int k = traces.front().num_objectives;
  for (const auto& t : traces) {
    if (t.records.size() != n || t.num_objectives != k) {
      throw UsageError("write_summary_csv: traces differ in shape");
    }
  }

  std::vector<std::string> header{"iter", "n_seeds", "phv_median", "phv_q25", "phv_q75"};
  for (int j = 0; j < k; ++j) {
    const std::string base = "best_f" + std::to_string(j);
    header.push_back(base + "_median");
    header.push_back(base + "_q25");
    header.push_back(base + "_q75");
  }
  write_row(out, header);

  auto stats = [](std::vector<std::string>& row, const std::vector<double>& v) {
    row.push_back(format_double(quantile(v, 0.5)));
    row.push_back(format_double(quantile(v, 0.25)));
    row.push_back(format_double(quantile(v, 0.75)));
  };
  std::vector<double> column(traces.size());
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> row{std::to_string(i), std::to_string(traces.size())};
    for (std::size_t s = 0; s < traces.size(); ++s) column[s] = traces[s].records[i].phv;
    stats(row, column);
    for (int j = 0; j < k; ++j) {
      for (std::size_t s = 0; s < traces.size(); ++s) {
        column[s] = traces[s].records[i].best_objectives[j];
      }
      stats(row, column);
    }
    write_row(out, row);
  }
}

}  // namespace pacmoo
