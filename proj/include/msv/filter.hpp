#pragma once

#include <cstddef>
#include <optional>
#include <utility>

#include "msv/matstat.hpp"

namespace msv {

/// Decay constant that keeps E(Σ⁻¹) unchanged across the volatility
/// evolution:  k = (δ(1-p) + p) / (δ(2-p) + p - 1).
/// Requires 2/3 < δ < 1 and p >= 1.
double compute_k(double delta, int p);

/// Fixed model constants for one discount factor.
///
///   n = 1/(1-δ)          posterior degrees-of-freedom parameter
///   m = δ/(1-δ) + p - 1  first parameter of the singular beta innovation
///   k                    see compute_k
///
/// The posterior of Σ_t is IW_p(n + 2p, S_t), so Σ_t⁻¹ | y^t ~ W_p(n+p-1, S_t⁻¹).
struct ModelConfig {
  int p;
  double delta;
  double k;
  double n;
  double m;
  SymPosDef S0;

  /// Degrees of freedom of the one-step forecast Student t, δ/(1-δ).
  double forecast_df() const { return delta / (1.0 - delta); }
  /// (1-δ)/(2δ-1): E(Σ_t | y^t) = posterior_coefficient · S_t.
  double posterior_coefficient() const { return (1.0 - delta) / (2.0 * delta - 1.0); }
  /// (1-δ)/(k(3δ-2)): E(Σ_{t+1} | y^t) = forecast_coefficient · S_t.
  double forecast_coefficient() const { return (1.0 - delta) / (k * (3.0 * delta - 2.0)); }
};

/// Throws DomainError unless p >= 1, 2/3 < δ < 1 and S0 is p×p.
ModelConfig make_config(int p, double delta, const SymPosDef& S0);

/// Posterior state after t observations. `factor` caches the lower Cholesky
/// factor of S (S = L L'); it is updated by rank-one updates and rebuilt from
/// scratch every kRefreshInterval steps.
struct FilterState {
  static constexpr std::size_t kRefreshInterval = 500;

  std::size_t t = 0;
  SymPosDef S;
  Matrix factor;
  /// k^{-t}: weight of S0 inside S_t.
  double prior_weight = 1.0;

  static FilterState initial(const ModelConfig& cfg);
};

/// One-step forecast quantities for y_{t+1}, all computed from the time-t
/// scale S_t (before the update).
struct StepOutput {
  SymPosDef forecast_scale;  // Var(y_{t+1} | y^t) = (1-δ) S_t / ((3δ-2) k)
  Vector u_star;             // forecast_scale^{-1/2} y
  Vector u;                  // √k S_t^{-1/2} y, ~ t_p(δ/(1-δ), 0, I)
  double u_logdensity;       // Student-t log density of u
  double predictive_logdensity;  // log p(y_{t+1} | y^t): u density plus Jacobian
  double q;                  // y' S_t⁻¹ y
};

/// Forecast y, then update S_{t+1} = k⁻¹ S_t + y y'. Pure: returns the new
/// state together with the forecast made from the old one.
std::pair<FilterState, StepOutput> step(const ModelConfig& cfg, const FilterState& state,
                                        const Eigen::Ref<const Vector>& y);

/// E(Σ_t | y^t) = (1-δ)/(2δ-1) · S_t.
SymPosDef posterior_mean(const ModelConfig& cfg, const FilterState& state);

/// E(Σ_{t+1} | y^t) = (1-δ)/(k(3δ-2)) · S_t.
SymPosDef prior_mean_next(const ModelConfig& cfg, const FilterState& state);

/// Returns (tr E(Σ_t⁻¹ | y^t), tr E(Σ_{t+1}⁻¹ | y^t)) =
/// ((n+p-1) tr S_t⁻¹, (δn+p-1) k tr S_t⁻¹). With the configured k the pair
/// is equal; passing another k (e.g. 1/δ) exposes the resulting drift.
std::pair<double, double> expectation_invariance_check(const ModelConfig& cfg,
                                                       const FilterState& state,
                                                       std::optional<double> k = std::nullopt);

/// S_t with the prior contribution k^{-t} S0 removed, i.e. Σ_j k^{j-t} y_j y_j'.
/// Singular until p linearly independent returns have been seen.
Matrix approximate_scale(const ModelConfig& cfg, const FilterState& state);

}  // namespace msv
