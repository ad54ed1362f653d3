#include "msv/simulator.hpp"

#include <cmath>

#include <fmt/format.h>

#include "msv/errors.hpp"
#include "msv/filter.hpp"

namespace msv {

Matrix sample_singular_beta(double m, int p, Rng& rng) {
  if (p < 1) throw DomainError("sample_singular_beta: p must be >= 1");
  if (!(m > p - 1.0)) {
    throw DomainError(fmt::format("sample_singular_beta: m = {:g} must exceed p-1 = {}", m, p - 1));
  }
  const SymPosDef A = wishart_sample(m, SymPosDef::identity(p), rng);
  const Vector x = standard_normal_vector(p, rng);
  const Matrix total = A.matrix() + x * x.transpose();
  const UpperCholesky U = chol_upper(total);
  // B = (U')⁻¹ A U⁻¹, computed as V' A V with V = U⁻¹.
  const Matrix V = U.upper().triangularView<Eigen::Upper>().solve(Matrix::Identity(p, p));
  const Matrix B = V.transpose() * A.matrix() * V;
  return 0.5 * (B + B.transpose());
}

SymPosDef evolve_precision(const SymPosDef& prev_precision, const Matrix& B, double k) {
  if (B.rows() != prev_precision.dim() || B.cols() != prev_precision.dim()) {
    throw DimensionMismatch("evolve_precision: dimension mismatch");
  }
  const UpperCholesky U = chol_upper(prev_precision);
  const Matrix next = k * (U.upper().transpose() * B * U.upper());
  return SymPosDef(0.5 * (next + next.transpose()));
}

namespace {

// Upper factor R (positive diagonal) with R'R = X'X, via Householder QR.
Matrix qr_upper(const Matrix& X) {
  Eigen::HouseholderQR<Matrix> qr(X);
  Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < R.rows(); ++i) {
    if (R(i, i) < 0.0) R.row(i) *= -1.0;
  }
  return R;
}

}  // namespace

SimPath simulate_path(const SimConfig& cfg) {
  const ModelConfig model = make_config(cfg.p, cfg.delta, cfg.S0);
  Rng rng(cfg.seed);
  const Eigen::Index p = cfg.p;

  SimPath path;
  path.returns = Matrix::Zero(static_cast<Eigen::Index>(cfg.N), p);
  path.sigmas.reserve(cfg.N);

  // The precision is carried as its upper Cholesky factor U_t. The update
  // U_{t+1} = chol_upper(k U_t' B U_t) is taken as the R factor of
  // √k V U_t with B = V'V, which avoids forming the (increasingly graded)
  // precision explicitly.
  const SymPosDef initial = wishart_sample(model.n + cfg.p - 1.0, inverse(cfg.S0), rng);
  Matrix U = chol_upper(initial).upper();
  const double sqrt_k = std::sqrt(model.k);
  for (std::size_t t = 0; t < cfg.N; ++t) {
    const Matrix B = sample_singular_beta(model.m, cfg.p, rng);
    const Matrix V = chol_upper(B).upper();
    U = qr_upper(sqrt_k * V * U);
    // With U = Q K (polar), Σ_t^{1/2} = U⁻¹ Q, so y = U⁻¹ (Q ε).
    const Vector eps = standard_normal_vector(p, rng);
    const Vector rotated = polar_orthogonal(U) * eps;
    path.returns.row(static_cast<Eigen::Index>(t)) =
        U.triangularView<Eigen::Upper>().solve(rotated).transpose();
    const Matrix U_inv = U.triangularView<Eigen::Upper>().solve(Matrix::Identity(p, p));
    path.sigmas.push_back(U_inv * U_inv.transpose());
  }
  return path;
}

}  // namespace msv
