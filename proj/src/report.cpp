#include "msv/report.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

namespace msv {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  return fmt::format("{:.10g}", value);
}

std::string grid_report_tsv(const GridReport& report) {
  std::ostringstream out;
  out << "delta\tMMSSE\tLogL\tH\tH_positive\tstatus\n";
  for (const auto& row : report.rows) {
    out << format_number(row.delta) << '\t';
    if (row.ok) {
      out << format_number(row.mmsse) << '\t' << format_number(row.logl) << '\t'
          << format_number(row.mean_h) << '\t' << row.positive_h << "\tok\n";
    } else {
      out << "nan\tnan\tnan\t0\tfailed\n";
    }
  }
  return out.str();
}

nlohmann::json grid_report_json(const GridReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : report.rows) {
    nlohmann::json r;
    r["delta"] = row.delta;
    r["status"] = row.ok ? "ok" : "failed";
    if (row.ok) {
      r["mmsse"] = row.mmsse;
      r["msse"] = std::vector<double>(row.run->msse.data(), row.run->msse.data() + row.run->msse.size());
      r["logl"] = row.logl;
      r["mean_h"] = std::isnan(row.mean_h) ? nlohmann::json() : nlohmann::json(row.mean_h);
      r["mean_h_y"] = std::isnan(row.mean_h_y) ? nlohmann::json() : nlohmann::json(row.mean_h_y);
      r["positive_h"] = row.positive_h;
      r["n_obs"] = row.run->u.size();
      r["flat_days"] = row.run->flat_days;
    } else {
      r["error"] = row.error;
    }
    rows.push_back(std::move(r));
  }
  return {{"baseline", report.baseline}, {"rows", std::move(rows)}};
}

std::vector<double> volatility_correlation_row(const Matrix& m) {
  const Eigen::Index p = m.rows();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(p + p * (p - 1) / 2));
  for (Eigen::Index i = 0; i < p; ++i) out.push_back(std::sqrt(m(i, i)));
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) {
      const double rho = m(i, j) / std::sqrt(m(i, i) * m(j, j));
      out.push_back(std::clamp(rho, -1.0, 1.0));
    }
  }
  return out;
}

std::vector<std::string> volatility_correlation_header(const std::vector<std::string>& labels) {
  std::vector<std::string> out;
  for (const auto& l : labels) out.push_back("sigma_" + l);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t j = i + 1; j < labels.size(); ++j) out.push_back("rho_" + labels[i] + "_" + labels[j]);
  }
  return out;
}

void write_series_csv(std::ostream& out, const std::string& time_header,
                      const std::vector<std::string>& times,
                      const std::vector<std::string>& labels,
                      const std::vector<Matrix>& posterior_means) {
  out << time_header;
  for (const auto& h : volatility_correlation_header(labels)) out << ',' << h;
  out << '\n';
  for (std::size_t t = 0; t < posterior_means.size(); ++t) {
    out << times[t];
    for (double v : volatility_correlation_row(posterior_means[t])) out << ',' << format_number(v);
    out << '\n';
  }
}

void write_bayes_factor_csv(std::ostream& out, const std::string& time_header,
                            const std::vector<std::string>& times, const GridReport& report) {
  std::vector<const GridRow*> columns;
  for (const auto& row : report.rows) {
    if (row.ok && row.delta != report.baseline && row.h.size() == times.size()) columns.push_back(&row);
  }
  out << time_header;
  for (const auto* row : columns) out << ",H_" << format_number(row->delta);
  out << '\n';
  for (std::size_t t = 0; t < times.size(); ++t) {
    out << times[t];
    for (const auto* row : columns) out << ',' << format_number(row->h.values()[t]);
    out << '\n';
  }
}

}  // namespace msv
