#include "msv/filter.hpp"

#include <cmath>

#include <fmt/format.h>

#include "msv/errors.hpp"

namespace msv {
namespace {

void check_delta(double delta) {
  if (!(delta > 2.0 / 3.0 && delta < 1.0)) {
    throw DomainError(fmt::format("discount factor must lie in (2/3, 1), got {:g}", delta));
  }
}

Matrix lower_factor(const Matrix& s) {
  Eigen::LLT<Matrix> llt(s);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("filter: scale lost definiteness");
  return llt.matrixL();
}

}  // namespace

double compute_k(double delta, int p) {
  check_delta(delta);
  if (p < 1) throw DomainError(fmt::format("dimension must be >= 1, got {}", p));
  return (delta * (1.0 - p) + p) / (delta * (2.0 - p) + p - 1.0);
}

ModelConfig make_config(int p, double delta, const SymPosDef& S0) {
  const double k = compute_k(delta, p);
  if (S0.dim() != p) {
    throw DomainError(fmt::format("prior scale is {}x{}, expected {}x{}", S0.dim(), S0.dim(), p, p));
  }
  const double n = 1.0 / (1.0 - delta);
  const double m = delta / (1.0 - delta) + p - 1.0;
  return ModelConfig{p, delta, k, n, m, S0};
}

FilterState FilterState::initial(const ModelConfig& cfg) {
  return FilterState{0, cfg.S0, lower_factor(cfg.S0.matrix()), 1.0};
}

std::pair<FilterState, StepOutput> step(const ModelConfig& cfg, const FilterState& state,
                                        const Eigen::Ref<const Vector>& y) {
  if (y.size() != state.S.dim()) {
    throw DimensionMismatch(
        fmt::format("step: observation has {} entries, state is {}-dimensional", y.size(),
                    state.S.dim()));
  }
  if (!y.allFinite()) throw DomainError("step: non-finite observation");

  const Matrix& S = state.S.matrix();
  // S^{-1/2} y (symmetric root) = O L⁻¹ y with O the polar factor of L.
  const Vector solved = state.factor.triangularView<Eigen::Lower>().solve(y);
  const Vector whitened = polar_orthogonal(state.factor) * solved;

  const double sqrt_k = std::sqrt(cfg.k);
  const double forecast_coef = cfg.forecast_coefficient();
  const Vector u = sqrt_k * whitened;
  const Vector u_star = whitened / std::sqrt(forecast_coef);

  const double half_log_det_s = state.factor.diagonal().array().log().sum();
  const double u_logdensity = student_t_logpdf(u, cfg.forecast_df());
  const double predictive = u_logdensity + 0.5 * cfg.p * std::log(cfg.k) - half_log_det_s;
  const double q = solved.squaredNorm();

  StepOutput out{state.S.scaled(forecast_coef), u_star, u, u_logdensity, predictive, q};

  // S' = k⁻¹ S + y y' is exactly symmetric in floating point.
  const double inv_k = 1.0 / cfg.k;
  Matrix next = inv_k * S + y * y.transpose();
  if (!next.allFinite()) {
    throw NonFiniteResult(fmt::format("step {}: scale matrix overflowed", state.t + 1));
  }
  const std::size_t t_next = state.t + 1;
  Matrix next_factor;
  next_factor = std::sqrt(inv_k) * state.factor;
  cholesky_rank1_update(next_factor, y);
  if (t_next % FilterState::kRefreshInterval == 0) {
    // Re-derive from the explicit S; keep the updated factor if S has become
    // too graded to factor directly.
    Eigen::LLT<Matrix> fresh(next);
    if (fresh.info() == Eigen::Success) {
      Matrix L = fresh.matrixL();
      if (L.allFinite()) next_factor = std::move(L);
    }
  }
  FilterState next_state{t_next, trust_spd(std::move(next)), std::move(next_factor),
                         state.prior_weight * inv_k};
  return {std::move(next_state), std::move(out)};
}

SymPosDef posterior_mean(const ModelConfig& cfg, const FilterState& state) {
  return state.S.scaled(cfg.posterior_coefficient());
}

SymPosDef prior_mean_next(const ModelConfig& cfg, const FilterState& state) {
  return state.S.scaled(cfg.forecast_coefficient());
}

std::pair<double, double> expectation_invariance_check(const ModelConfig& cfg,
                                                       const FilterState& state,
                                                       std::optional<double> k) {
  const double trace_inv = inverse(state.S).matrix().trace();
  const double decay = k.value_or(cfg.k);
  const double p = cfg.p;
  return {(cfg.n + p - 1.0) * trace_inv, (cfg.delta * cfg.n + p - 1.0) * decay * trace_inv};
}

Matrix approximate_scale(const ModelConfig& cfg, const FilterState& state) {
  return state.S.matrix() - state.prior_weight * cfg.S0.matrix();
}

}  // namespace msv
