#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "msv/diagnostics.hpp"

namespace msv {

/// 10 significant digits; NaN prints as "nan".
std::string format_number(double value);

/// Tab-separated table: delta, MMSSE, LogL, H, plus status columns.
std::string grid_report_tsv(const GridReport& report);

nlohmann::json grid_report_json(const GridReport& report);

/// σ_ii = √m_ii for each i, then ρ_ij = m_ij / √(m_ii m_jj) for i < j.
std::vector<double> volatility_correlation_row(const Matrix& posterior_mean);

/// Header matching volatility_correlation_row: sigma_<i>, then rho_<i>_<j>.
std::vector<std::string> volatility_correlation_header(const std::vector<std::string>& labels);

/// One CSV row per observation: time, volatilities, correlations.
void write_series_csv(std::ostream& out, const std::string& time_header,
                      const std::vector<std::string>& times,
                      const std::vector<std::string>& labels,
                      const std::vector<Matrix>& posterior_means);

/// One CSV row per observation: time, H_t for every non-baseline δ.
void write_bayes_factor_csv(std::ostream& out, const std::string& time_header,
                            const std::vector<std::string>& times, const GridReport& report);

}  // namespace msv
