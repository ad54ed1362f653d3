#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "msv/filter.hpp"
#include "msv/matstat.hpp"

namespace msv {

/// How a step whose transition matrix has no positive eigenvalue (a zero
/// return) enters the log-likelihood.
enum class FlatDayPolicy {
  skip,   // drop that step's log|L_t| contribution
  floor,  // clamp the eigenvalue at the eigen tolerance
};

/// Running mean of squared standardized forecast errors, per component.
class MsseAccumulator {
 public:
  explicit MsseAccumulator(Eigen::Index dim) : sums_(Vector::Zero(dim)) {}

  void update(const Eigen::Ref<const Vector>& u_star);

  std::size_t count() const { return count_; }
  const Vector& sums() const { return sums_; }
  /// sums / count; zero vector before the first update.
  Vector msse() const;
  /// Mean of msse() over components.
  double mean() const;

 private:
  std::size_t count_ = 0;
  Vector sums_;
};

/// I - k⁻¹ (U')⁻¹ Σ_t⁻¹ U⁻¹ with U = chol_upper(Σ_{t-1}⁻¹). Its positive
/// eigenvalues form L_t in the transition density of Σ_t given Σ_{t-1}.
Matrix transition_matrix(const ModelConfig& cfg, const SymPosDef& sigma_prev,
                         const SymPosDef& sigma_curr);

/// The four data-dependent pieces of one log-likelihood summand.
struct LoglikParts {
  double quadratic;     // y' Σ_t⁻¹ y
  double log_det_prev;  // log |Σ_{t-1}|
  double log_det_L;     // log |L_t|
  double log_det_curr;  // log |Σ_t|
};

/// Throws SingularityError if the transition matrix has no positive
/// eigenvalue above tolerance.
LoglikParts loglik_parts(const ModelConfig& cfg, const SymPosDef& sigma_prev,
                         const SymPosDef& sigma_curr, const Eigen::Ref<const Vector>& y);

/// Combines parts into the time-t summand
///   -½ y'Σ_t⁻¹y + (2δ-1)/(2(1-δ)) log|Σ_{t-1}| - (p/2) log|L_t| - (3δ-2)/(2(1-δ)) log|Σ_t|.
double combine_loglik_parts(const ModelConfig& cfg, const LoglikParts& parts);

/// Time-t log-likelihood summand at the given plug-in volatilities.
double loglik_term(const ModelConfig& cfg, const SymPosDef& sigma_prev,
                   const SymPosDef& sigma_curr, const Eigen::Ref<const Vector>& y);

/// Additive constant of the log-likelihood over N observations:
///   -(Np/2) log π - (N/2) log 2π - (Np(2δ-1)/(2(1-δ))) log k
///   + N [log Γ_p((δ(1-p)+p)/(2(1-δ))) - log Γ_p((δ(2-p)+p-1)/(2(1-δ)))]
double loglik_constant(const ModelConfig& cfg, std::size_t N);

/// Plug-in value for Σ_0: the prior mean S0/(n-2).
SymPosDef initial_plugin_mean(const ModelConfig& cfg);

class LikelihoodAccumulator {
 public:
  LikelihoodAccumulator(const ModelConfig& cfg, FlatDayPolicy policy);

  /// Adds the summand for one observation and returns it.
  double add(const SymPosDef& sigma_prev, const SymPosDef& sigma_curr,
             const Eigen::Ref<const Vector>& y);

  /// Same, from lower Cholesky factors of the two plug-in matrices.
  double add_factors(const Matrix& prev_lower, const Matrix& curr_lower,
                     const Eigen::Ref<const Vector>& y);

  /// For plug-in means c·S_{t-1}, c·S_t from the exact recursion, with
  /// q = y'S_{t-1}⁻¹y. Uses |L_t| = q/(k⁻¹+q) in place of the eigensolver.
  double add_recursive(const Matrix& prev_lower, const Matrix& curr_lower,
                       const Eigen::Ref<const Vector>& y, double q);

  std::size_t count() const { return terms_.size(); }
  std::size_t flat_days() const { return flat_days_; }
  double constant() const;
  /// constant() + Σ summands.
  double total() const;
  /// Per-step summands in time order.
  const std::vector<double>& terms() const { return terms_; }

  double sum_quadratic() const { return sum_quadratic_; }
  double sum_log_det_prev() const { return sum_log_det_prev_; }
  double sum_log_det_L() const { return sum_log_det_L_; }
  double sum_log_det_curr() const { return sum_log_det_curr_; }

 private:
  double add_parts(const Matrix& prev_lower, const Matrix& curr_lower,
                   const Eigen::Ref<const Vector>& y, std::optional<double> q);

  ModelConfig cfg_;
  FlatDayPolicy policy_;
  std::vector<double> terms_;
  std::size_t flat_days_ = 0;
  double sum_quadratic_ = 0.0;
  double sum_log_det_prev_ = 0.0;
  double sum_log_det_L_ = 0.0;
  double sum_log_det_curr_ = 0.0;
};

/// Log Bayes factor of model 1 against model 2 for one standardized error:
/// student_t_logpdf(u1, n1) - student_t_logpdf(u2, n2). Positive favours
/// model 1.
double bayes_factor(const Eigen::Ref<const Vector>& u1, double n1,
                    const Eigen::Ref<const Vector>& u2, double n2);

class BayesFactorSeries {
 public:
  BayesFactorSeries() = default;
  explicit BayesFactorSeries(std::vector<double> values) : values_(std::move(values)) {}

  void push_back(double h) { values_.push_back(h); }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double mean() const;
  std::size_t positive_count() const;

 private:
  std::vector<double> values_;
};

struct EvalOptions {
  std::size_t prior_window = 30;
  FlatDayPolicy flat_day = FlatDayPolicy::floor;
  /// Keep E(Σ_t | y^t) for every t (needed for the volatility series).
  bool record_posterior_means = false;
  /// Record (1-δ)/(2δ-1) · (S_t - k^{-t} S0) instead, once that matrix is
  /// positive definite. Affects only the recorded means.
  bool approximate_scale = false;
  /// Overrides the data-driven prior scale when set.
  std::optional<SymPosDef> prior_scale;
};

/// Prior scale from the first `window` returns: S0 = (n-2) v I where v is the
/// mean over components of the mean squared return, so E(Σ_0) = v I. A zero
/// window (or all-zero burn-in) gives v = 1.
SymPosDef default_prior_scale(const Matrix& returns, std::size_t window, double delta);

/// Everything one filter pass over the data produces for a single δ.
struct ModelRun {
  double delta = 0.0;
  Vector msse;
  double mmsse = 0.0;
  double logl = 0.0;
  double loglik_constant = 0.0;
  std::vector<double> loglik_terms;     // per-step summands
  std::vector<Vector> u;                 // u_t, t = 1..N
  std::vector<double> u_logdensity;      // Student-t log density of u_t
  std::vector<double> y_logdensity;      // log p(y_t | y^{t-1})
  std::vector<Matrix> posterior_means;   // E(Σ_t | y^t), if recorded
  std::size_t flat_days = 0;
  double seconds = 0.0;
};

/// Filter, likelihood and MSSE for one δ over an N×p matrix of returns.
ModelRun evaluate_model(const Matrix& returns, double delta, const EvalOptions& options);

struct GridRow {
  double delta = 0.0;
  bool ok = false;
  std::string error;
  double mmsse = 0.0;
  double logl = 0.0;
  double mean_h = 0.0;    // u-scale Bayes factor vs baseline
  double mean_h_y = 0.0;  // y-scale (predictive density) Bayes factor vs baseline
  std::size_t positive_h = 0;
  BayesFactorSeries h;
  std::optional<ModelRun> run;
};

struct GridReport {
  double baseline = 0.95;
  std::vector<GridRow> rows;  // ascending δ

  const GridRow* find(double delta) const;
};

/// Evaluates every δ (deduplicated, ascending) and compares each against the
/// baseline. A failing δ is reported in its row and never aborts the grid.
/// Throws DomainError for an empty grid, δ outside (2/3, 1) or a baseline
/// missing from the grid.
GridReport grid_search(const Matrix& returns, std::vector<double> deltas, double baseline,
                       const EvalOptions& options);

}  // namespace msv
