#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "msv/matstat.hpp"
#include "msv/rng.hpp"

namespace msv {

struct SimConfig {
  int p;
  double delta;
  std::size_t N;
  SymPosDef S0;
  std::uint64_t seed;
};

/// Ground truth: Σ_1..Σ_N and the returns y_1..y_N (row t-1 of `returns`).
struct SimPath {
  std::vector<Matrix> sigmas;
  Matrix returns;
};

/// Draw from the singular matrix beta B_p(m/2, 1/2): with A ~ W_p(m, I) and
/// x ~ N_p(0, I), U = chol_upper(A + xx') and B = (U')⁻¹ A U⁻¹. I - B has
/// rank one.
Matrix sample_singular_beta(double m, int p, Rng& rng);

/// k U' B U with U = chol_upper(prev_precision).
SymPosDef evolve_precision(const SymPosDef& prev_precision, const Matrix& B, double k);

/// Σ_0⁻¹ ~ W_p(n+p-1, S0⁻¹), then for t = 1..N: Σ_t⁻¹ evolves through a
/// fresh singular beta draw and y_t = Σ_t^{1/2} ε_t (symmetric root).
SimPath simulate_path(const SimConfig& cfg);

}  // namespace msv
