#include "msv/diagnostics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>

#include <fmt/format.h>

#include "msv/errors.hpp"

namespace msv {

void MsseAccumulator::update(const Eigen::Ref<const Vector>& u_star) {
  if (u_star.size() != sums_.size()) {
    throw DimensionMismatch(fmt::format("MSSE: expected {} components, got {}", sums_.size(),
                                        u_star.size()));
  }
  sums_ += u_star.cwiseAbs2();
  ++count_;
}

Vector MsseAccumulator::msse() const {
  if (count_ == 0) return Vector::Zero(sums_.size());
  return sums_ / static_cast<double>(count_);
}

double MsseAccumulator::mean() const { return sums_.size() == 0 ? 0.0 : msse().mean(); }

namespace {

Matrix lower_cholesky(const SymPosDef& a, const char* what) {
  Eigen::LLT<Matrix> llt(a.matrix());
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite(fmt::format("{}: not positive definite", what));
  return llt.matrixL();
}

// I - k⁻¹ R' Σ_t⁻¹ R with R = U⁻¹ = upper root of Σ_{t-1}; equal to
// I - k⁻¹ W'W for W = C⁻¹ R where C is the lower factor of Σ_t.
Matrix transition_from_factors(double k, const Matrix& prev_lower, const Matrix& curr_lower) {
  const Eigen::Index p = prev_lower.rows();
  if (curr_lower.rows() != p) throw DimensionMismatch("transition_matrix: dimension mismatch");
  const Matrix R = upper_root_from_lower(prev_lower);
  const Matrix W = curr_lower.triangularView<Eigen::Lower>().solve(R);
  return Matrix::Identity(p, p) - (W.transpose() * W) / k;
}

// `rank_one_q`, when given, is q = y'S_{t-1}⁻¹y for plug-in means taken from
// the exact recursion; the single eigenvalue is then q/(k⁻¹+q), which avoids
// the cancellation in I - k⁻¹W'W for small returns.
LoglikParts parts_from_factors(const ModelConfig& cfg, const Matrix& prev_lower,
                               const Matrix& curr_lower, const Eigen::Ref<const Vector>& y,
                               std::optional<FlatDayPolicy> policy, bool& flat,
                               std::optional<double> rank_one_q = std::nullopt) {
  if (y.size() != curr_lower.rows()) throw DimensionMismatch("loglik: dimension mismatch");
  flat = false;
  double tol = 0.0;
  std::vector<double> eigenvalues;
  if (rank_one_q) {
    const double value = *rank_one_q / (1.0 / cfg.k + *rank_one_q);
    tol = default_eigen_tolerance(Matrix::Constant(1, 1, value));
    if (value > tol) eigenvalues.push_back(value);
  } else {
    const Matrix M = transition_from_factors(cfg.k, prev_lower, curr_lower);
    tol = default_eigen_tolerance(M);
    eigenvalues = positive_eigenvalues(M, tol);
  }

  double log_det_L = 0.0;
  if (eigenvalues.empty()) {
    if (!policy) {
      throw SingularityError(
          "loglik: transition matrix has no positive eigenvalue (zero return?)");
    }
    flat = true;
    log_det_L = *policy == FlatDayPolicy::floor ? std::log(tol) : 0.0;
  } else {
    for (double v : eigenvalues) log_det_L += std::log(v);
  }

  const double quadratic = curr_lower.triangularView<Eigen::Lower>().solve(y).squaredNorm();
  return {quadratic, 2.0 * prev_lower.diagonal().array().log().sum(), log_det_L,
          2.0 * curr_lower.diagonal().array().log().sum()};
}

}  // namespace

Matrix transition_matrix(const ModelConfig& cfg, const SymPosDef& sigma_prev,
                         const SymPosDef& sigma_curr) {
  return transition_from_factors(cfg.k, lower_cholesky(sigma_prev, "transition_matrix"),
                                 lower_cholesky(sigma_curr, "transition_matrix"));
}

LoglikParts loglik_parts(const ModelConfig& cfg, const SymPosDef& sigma_prev,
                         const SymPosDef& sigma_curr, const Eigen::Ref<const Vector>& y) {
  bool flat = false;
  return parts_from_factors(cfg, lower_cholesky(sigma_prev, "loglik"),
                            lower_cholesky(sigma_curr, "loglik"), y, std::nullopt, flat);
}

double combine_loglik_parts(const ModelConfig& cfg, const LoglikParts& parts) {
  const double d = cfg.delta;
  const double prev_coef = (2.0 * d - 1.0) / (2.0 * (1.0 - d));
  const double curr_coef = (3.0 * d - 2.0) / (2.0 * (1.0 - d));
  return -0.5 * parts.quadratic + prev_coef * parts.log_det_prev -
         0.5 * cfg.p * parts.log_det_L - curr_coef * parts.log_det_curr;
}

double loglik_term(const ModelConfig& cfg, const SymPosDef& sigma_prev,
                   const SymPosDef& sigma_curr, const Eigen::Ref<const Vector>& y) {
  return combine_loglik_parts(cfg, loglik_parts(cfg, sigma_prev, sigma_curr, y));
}

double loglik_constant(const ModelConfig& cfg, std::size_t N) {
  if (N == 0) return 0.0;
  const double d = cfg.delta;
  const double p = cfg.p;
  const double big_n = static_cast<double>(N);
  const double upper_arg = (d * (1.0 - p) + p) / (2.0 * (1.0 - d));
  const double lower_arg = (d * (2.0 - p) + p - 1.0) / (2.0 * (1.0 - d));
  const double gamma_ratio = log_multigamma(cfg.p, upper_arg) - log_multigamma(cfg.p, lower_arg);
  return -0.5 * big_n * p * std::log(std::numbers::pi) -
         0.5 * big_n * std::log(2.0 * std::numbers::pi) -
         big_n * p * (2.0 * d - 1.0) / (2.0 * (1.0 - d)) * std::log(cfg.k) +
         big_n * gamma_ratio;
}

SymPosDef initial_plugin_mean(const ModelConfig& cfg) {
  // 1/(n-2) == (1-δ)/(2δ-1)
  return cfg.S0.scaled(cfg.posterior_coefficient());
}

LikelihoodAccumulator::LikelihoodAccumulator(const ModelConfig& cfg, FlatDayPolicy policy)
    : cfg_(cfg), policy_(policy) {}

double LikelihoodAccumulator::add(const SymPosDef& sigma_prev, const SymPosDef& sigma_curr,
                                  const Eigen::Ref<const Vector>& y) {
  return add_factors(lower_cholesky(sigma_prev, "loglik"), lower_cholesky(sigma_curr, "loglik"), y);
}

double LikelihoodAccumulator::add_factors(const Matrix& prev_lower, const Matrix& curr_lower,
                                          const Eigen::Ref<const Vector>& y) {
  return add_parts(prev_lower, curr_lower, y, std::nullopt);
}

double LikelihoodAccumulator::add_recursive(const Matrix& prev_lower, const Matrix& curr_lower,
                                            const Eigen::Ref<const Vector>& y, double q) {
  return add_parts(prev_lower, curr_lower, y, q);
}

double LikelihoodAccumulator::add_parts(const Matrix& prev_lower, const Matrix& curr_lower,
                                        const Eigen::Ref<const Vector>& y,
                                        std::optional<double> q) {
  bool flat = false;
  const LoglikParts parts = parts_from_factors(cfg_, prev_lower, curr_lower, y, policy_, flat, q);
  if (flat) ++flat_days_;
  sum_quadratic_ += parts.quadratic;
  sum_log_det_prev_ += parts.log_det_prev;
  sum_log_det_L_ += parts.log_det_L;
  sum_log_det_curr_ += parts.log_det_curr;
  const double term = combine_loglik_parts(cfg_, parts);
  terms_.push_back(term);
  return term;
}

double LikelihoodAccumulator::constant() const { return loglik_constant(cfg_, terms_.size()); }

double LikelihoodAccumulator::total() const {
  return constant() + std::accumulate(terms_.begin(), terms_.end(), 0.0);
}

double bayes_factor(const Eigen::Ref<const Vector>& u1, double n1,
                    const Eigen::Ref<const Vector>& u2, double n2) {
  if (u1.size() != u2.size()) throw DimensionMismatch("bayes_factor: dimension mismatch");
  return student_t_logpdf(u1, n1) - student_t_logpdf(u2, n2);
}

double BayesFactorSeries::mean() const {
  if (values_.empty()) return 0.0;
  return std::accumulate(values_.begin(), values_.end(), 0.0) /
         static_cast<double>(values_.size());
}

std::size_t BayesFactorSeries::positive_count() const {
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(), [](double h) { return h > 0.0; }));
}

SymPosDef default_prior_scale(const Matrix& returns, std::size_t window, double delta) {
  const Eigen::Index p = returns.cols();
  if (p == 0) throw DimensionMismatch("default_prior_scale: no columns");
  const Eigen::Index rows =
      std::min<Eigen::Index>(static_cast<Eigen::Index>(window), returns.rows());
  double v = 1.0;
  if (rows > 0) {
    const double mean_square = returns.topRows(rows).squaredNorm() / static_cast<double>(rows * p);
    if (mean_square > 0.0 && std::isfinite(mean_square)) v = mean_square;
  }
  if (!(delta > 2.0 / 3.0 && delta < 1.0)) {
    throw DomainError(fmt::format("discount factor must lie in (2/3, 1), got {:g}", delta));
  }
  const double n = 1.0 / (1.0 - delta);
  return trust_spd(Matrix::Identity(p, p) * ((n - 2.0) * v));
}

ModelRun evaluate_model(const Matrix& returns, double delta, const EvalOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const int p = static_cast<int>(returns.cols());
  const SymPosDef S0 = options.prior_scale ? *options.prior_scale
                                           : default_prior_scale(returns, options.prior_window,
                                                                 delta);
  const ModelConfig cfg = make_config(p, delta, S0);
  const auto N = static_cast<std::size_t>(returns.rows());

  ModelRun run;
  run.delta = delta;
  run.u.reserve(N);
  run.u_logdensity.reserve(N);
  run.y_logdensity.reserve(N);
  if (options.record_posterior_means) run.posterior_means.reserve(N);

  MsseAccumulator msse(p);
  LikelihoodAccumulator likelihood(cfg, options.flat_day);
  FilterState state = FilterState::initial(cfg);
  // Plug-in means are c·S_t, so their lower factors are √c·L_t.
  const double root_c = std::sqrt(cfg.posterior_coefficient());
  Matrix prev_factor = root_c * state.factor;  // factor of initial_plugin_mean(cfg)

  for (std::size_t t = 0; t < N; ++t) {
    const Vector y = returns.row(static_cast<Eigen::Index>(t)).transpose();
    auto [next, out] = step(cfg, state, y);
    state = std::move(next);
    Matrix curr_factor = root_c * state.factor;

    msse.update(out.u_star);
    likelihood.add_recursive(prev_factor, curr_factor, y, out.q);
    run.u.push_back(std::move(out.u));
    run.u_logdensity.push_back(out.u_logdensity);
    run.y_logdensity.push_back(out.predictive_logdensity);
    if (options.record_posterior_means) {
      Matrix recorded = posterior_mean(cfg, state).matrix();
      if (options.approximate_scale) {
        Matrix approx = cfg.posterior_coefficient() * approximate_scale(cfg, state);
        if (Eigen::LLT<Matrix>(approx).info() == Eigen::Success) recorded = std::move(approx);
      }
      run.posterior_means.push_back(std::move(recorded));
    }
    prev_factor = std::move(curr_factor);
  }

  if (!std::isfinite(likelihood.total()) || !msse.msse().allFinite()) {
    throw NonFiniteResult(fmt::format("delta {:g}: non-finite log-likelihood or MSSE", delta));
  }
  run.msse = msse.msse();
  run.mmsse = msse.mean();
  run.loglik_constant = likelihood.constant();
  run.loglik_terms = likelihood.terms();
  run.logl = likelihood.total();
  run.flat_days = likelihood.flat_days();
  run.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

const GridRow* GridReport::find(double delta) const {
  for (const auto& row : rows) {
    if (std::abs(row.delta - delta) < 1e-12) return &row;
  }
  return nullptr;
}

GridReport grid_search(const Matrix& returns, std::vector<double> deltas, double baseline,
                       const EvalOptions& options) {
  if (deltas.empty()) throw DomainError("grid_search: empty discount-factor grid");
  for (double d : deltas) {
    if (!(d > 2.0 / 3.0 && d < 1.0)) {
      throw DomainError(fmt::format("grid_search: discount factor {:g} outside (2/3, 1)", d));
    }
  }
  std::sort(deltas.begin(), deltas.end());
  deltas.erase(std::unique(deltas.begin(), deltas.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               deltas.end());
  const auto base_it = std::find_if(deltas.begin(), deltas.end(),
                                    [&](double d) { return std::abs(d - baseline) < 1e-12; });
  if (base_it == deltas.end()) {
    throw DomainError(fmt::format("grid_search: baseline {:g} is not in the grid", baseline));
  }

  GridReport report;
  report.baseline = *base_it;
  for (double d : deltas) {
    GridRow row;
    row.delta = d;
    try {
      row.run = evaluate_model(returns, d, options);
      row.ok = true;
      row.mmsse = row.run->mmsse;
      row.logl = row.run->logl;
    } catch (const Error& e) {
      row.ok = false;
      row.error = e.what();
    }
    report.rows.push_back(std::move(row));
  }

  const GridRow* base = report.find(report.baseline);
  const double base_df = base->delta / (1.0 - base->delta);
  for (auto& row : report.rows) {
    if (!row.ok) continue;
    if (!base->ok) {
      row.mean_h = row.mean_h_y = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    const ModelRun& mine = *row.run;
    const ModelRun& theirs = *base->run;
    const double my_df = row.delta / (1.0 - row.delta);
    BayesFactorSeries h;
    double sum_y = 0.0;
    for (std::size_t t = 0; t < mine.u.size(); ++t) {
      h.push_back(&row == base ? 0.0 : bayes_factor(mine.u[t], my_df, theirs.u[t], base_df));
      sum_y += mine.y_logdensity[t] - theirs.y_logdensity[t];
    }
    row.mean_h = h.mean();
    row.mean_h_y = mine.u.empty() ? 0.0 : sum_y / static_cast<double>(mine.u.size());
    row.positive_h = h.positive_count();
    row.h = std::move(h);
  }
  return report;
}

}  // namespace msv
