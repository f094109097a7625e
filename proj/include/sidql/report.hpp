#pragma once

#include "sidql/dataset.hpp"
#include "sidql/error.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

namespace sidql {

/// One evaluated (window, method, W) combination.
struct ReportRow {
  std::string sequence_id;
  std::string method;
  std::size_t keyframes = 0;
  double mean_angle_error = 0.0;  // Q(S, K), radians
  double root_rmse = 0.0;
  double decision_seconds = 0.0;
  std::string keyframe_list;  // space separated
};

struct ReportCell {
  std::string method;
  std::size_t keyframes = 0;
  std::size_t windows = 0;
  double mean_angle_error = 0.0;
  double root_rmse = 0.0;
  double decision_seconds = 0.0;
};

struct RunReport {
  std::vector<ReportRow> rows;
  std::vector<std::string> degenerate;  // windows left out, Q with end frames only is 0
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string manifest_hash;

  /// Rows in canonical order: sequence id, method, W.
  void sort() {
    std::sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
      return std::tie(a.sequence_id, a.method, a.keyframes) < std::tie(b.sequence_id, b.method, b.keyframes);
    });
    std::sort(degenerate.begin(), degenerate.end());
  }

  /// Means per method and W, methods in first-seen order of `method_order`.
  std::vector<ReportCell> table(const std::vector<std::string>& method_order = {}) const {
    std::map<std::pair<std::string, std::size_t>, ReportCell> cells;
    for (const auto& r : rows) {
      auto& c = cells[{r.method, r.keyframes}];
      c.method = r.method;
      c.keyframes = r.keyframes;
      ++c.windows;
      c.mean_angle_error += r.mean_angle_error;
      c.root_rmse += r.root_rmse;
      c.decision_seconds += r.decision_seconds;
    }
    std::vector<ReportCell> out;
    for (auto& [key, c] : cells) {
      const double n = static_cast<double>(c.windows);
      c.mean_angle_error /= n;
      c.root_rmse /= n;
      c.decision_seconds /= n;
      out.push_back(c);
    }
    auto rank = [&](const std::string& m) {
      auto it = std::find(method_order.begin(), method_order.end(), m);
      return it == method_order.end() ? method_order.size() : static_cast<std::size_t>(it - method_order.begin());
    };
    std::stable_sort(out.begin(), out.end(), [&](const ReportCell& a, const ReportCell& b) {
      return std::make_tuple(rank(a.method), a.method, a.keyframes) < std::make_tuple(rank(b.method), b.method, b.keyframes);
    });
    return out;
  }
};

namespace detail {

inline std::string fixed12(double v) {
  std::ostringstream s;
  s << std::setprecision(12) << v;
  return s.str();
}

// Enough digits to read the same double back.
inline std::string exact(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

}  // namespace detail

/// report.csv: header, one row per (window, method, W) at round-trip
/// precision, then '#' footer lines with the fingerprint and the excluded
/// windows.
inline void write_report_csv(std::ostream& out, const RunReport& r) {
  out << "sequence_id,method,keyframes,mean_angle_error,root_rmse,decision_seconds,keyframe_indices\n";
  for (const auto& row : r.rows)
    out << row.sequence_id << ',' << row.method << ',' << row.keyframes << ',' << detail::exact(row.mean_angle_error) << ','
        << detail::exact(row.root_rmse) << ',' << detail::exact(row.decision_seconds) << ',' << row.keyframe_list << "\n";
  out << "# seed " << r.seed << "\n";
  out << "# config_hash " << (r.config_hash.empty() ? "-" : r.config_hash) << "\n";
  out << "# manifest_hash " << r.manifest_hash << "\n";
  out << "# degenerate_windows " << r.degenerate.size();
  for (const auto& d : r.degenerate) out << ' ' << d;
  out << "\n";
}

/// summary.csv: the method x W table.
inline void write_summary_csv(std::ostream& out, const RunReport& r, const std::vector<std::string>& method_order = {}) {
  out << "method,keyframes,windows,mean_angle_error,root_rmse,mean_decision_seconds\n";
  for (const auto& c : r.table(method_order))
    out << c.method << ',' << c.keyframes << ',' << c.windows << ',' << detail::fixed12(c.mean_angle_error) << ','
        << detail::fixed12(c.root_rmse) << ',' << detail::fixed12(c.decision_seconds) << "\n";
}

}  // namespace sidql
