#include "msv/matstat.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <fmt/format.h>

#include "msv/errors.hpp"

namespace msv {
namespace {

constexpr double kSymmetryTolerance = 1e-10;

Eigen::LLT<Matrix> checked_llt(const Matrix& a, const char* what) {
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite(fmt::format("{}: matrix is not positive definite", what));
  }
  // Eigen's LLT reports NumericalIssue only for a non-positive pivot; also
  // reject non-finite factors.
  if (!llt.matrixL().toDenseMatrix().allFinite()) {
    throw NotPositiveDefinite(fmt::format("{}: non-finite Cholesky factor", what));
  }
  return llt;
}

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

SymPosDef::SymPosDef(const Matrix& entries) {
  if (entries.rows() == 0 || entries.rows() != entries.cols()) {
    throw DimensionMismatch(fmt::format("SymPosDef: expected a non-empty square matrix, got {}x{}",
                                        entries.rows(), entries.cols()));
  }
  if (!entries.allFinite()) {
    throw NotPositiveDefinite("SymPosDef: non-finite entries");
  }
  const double asymmetry = (entries - entries.transpose()).cwiseAbs().maxCoeff();
  if (asymmetry > kSymmetryTolerance) {
    throw DomainError(fmt::format("SymPosDef: matrix is not symmetric (max |A - A'| = {:g})",
                                  asymmetry));
  }
  entries_ = symmetrized(entries);
  checked_llt(entries_, "SymPosDef");
}

SymPosDef SymPosDef::identity(Eigen::Index dim) {
  return SymPosDef(Matrix::Identity(dim, dim), Trusted{});
}

SymPosDef SymPosDef::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw DomainError(fmt::format("SymPosDef::scaled: factor must be positive, got {:g}", factor));
  }
  return SymPosDef(factor * entries_, Trusted{});
}

SymPosDef trust_spd(Matrix entries) { return SymPosDef(std::move(entries), SymPosDef::Trusted{}); }

EigenSpectrum symmetric_eigen(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrized(m));
  if (solver.info() != Eigen::Success) {
    throw SingularityError("symmetric_eigen: eigensolver did not converge");
  }
  // Eigen returns ascending order.
  return {solver.eigenvalues().reverse(), solver.eigenvectors().rowwise().reverse()};
}

UpperCholesky chol_upper(const Matrix& a) {
  auto llt = checked_llt(a, "chol_upper");
  return UpperCholesky(llt.matrixU());
}

UpperCholesky chol_upper(const SymPosDef& a) { return chol_upper(a.matrix()); }

SymPosDef sym_inv_sqrt(const SymPosDef& a) {
  const auto spectrum = symmetric_eigen(a.matrix());
  if (spectrum.values.minCoeff() <= 0.0) {
    throw NotPositiveDefinite("sym_inv_sqrt: non-positive eigenvalue");
  }
  const Vector scale = spectrum.values.cwiseSqrt().cwiseInverse();
  return trust_spd(symmetrized(spectrum.vectors * scale.asDiagonal() *
                               spectrum.vectors.transpose()));
}

SymPosDef sym_sqrt(const SymPosDef& a) {
  const auto spectrum = symmetric_eigen(a.matrix());
  if (spectrum.values.minCoeff() <= 0.0) {
    throw NotPositiveDefinite("sym_sqrt: non-positive eigenvalue");
  }
  const Vector scale = spectrum.values.cwiseSqrt();
  return trust_spd(symmetrized(spectrum.vectors * scale.asDiagonal() *
                               spectrum.vectors.transpose()));
}

void cholesky_rank1_update(Matrix& lower, Vector x) {
  const Eigen::Index p = lower.rows();
  for (Eigen::Index j = 0; j < p; ++j) {
    const double ljj = lower(j, j);
    const double r = std::hypot(ljj, x[j]);
    const double c = r / ljj;
    const double s = x[j] / ljj;
    lower(j, j) = r;
    for (Eigen::Index i = j + 1; i < p; ++i) {
      lower(i, j) = (lower(i, j) + s * x[i]) / c;
      x[i] = c * x[i] - s * lower(i, j);
    }
  }
}

Matrix polar_orthogonal(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

Matrix upper_root_from_lower(const Matrix& lower) {
  // QR of J L' J = Q̂ R̂ gives L = (J R̂' J)(J Q̂' J) with J R̂' J upper.
  const Eigen::Index p = lower.rows();
  const Matrix flipped = lower.transpose().colwise().reverse().rowwise().reverse();
  Eigen::HouseholderQR<Matrix> qr(flipped);
  const Matrix r_hat = qr.matrixQR().triangularView<Eigen::Upper>();
  Matrix upper = r_hat.transpose().colwise().reverse().rowwise().reverse();
  for (Eigen::Index j = 0; j < p; ++j) {
    if (upper(j, j) < 0.0) upper.col(j) *= -1.0;
  }
  return upper;
}

SymPosDef inverse(const SymPosDef& a) {
  auto llt = checked_llt(a.matrix(), "inverse");
  Matrix inv = llt.solve(Matrix::Identity(a.dim(), a.dim()));
  return trust_spd(symmetrized(inv));
}

double log_det(const Matrix& a) {
  auto llt = checked_llt(a, "log_det");
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

double log_det(const SymPosDef& a) { return log_det(a.matrix()); }

double log_multigamma(int p, double a) {
  if (p < 1) throw DomainError(fmt::format("log_multigamma: p must be >= 1, got {}", p));
  if (!(a > 0.5 * (p - 1))) {
    throw DomainError(
        fmt::format("log_multigamma: argument {:g} must exceed (p-1)/2 = {:g}", a, 0.5 * (p - 1)));
  }
  double result = 0.25 * p * (p - 1) * std::log(std::numbers::pi);
  for (int j = 1; j <= p; ++j) result += std::lgamma(a - 0.5 * (j - 1));
  return result;
}

double student_t_logpdf(const Eigen::Ref<const Vector>& u, double df) {
  if (!(df > 0.0)) throw DomainError(fmt::format("student_t_logpdf: df must be > 0, got {:g}", df));
  const double p = static_cast<double>(u.size());
  const double half = 0.5 * (df + p);
  return std::lgamma(half) - std::lgamma(0.5 * df) - 0.5 * p * std::log(std::numbers::pi) -
         half * std::log1p(u.squaredNorm());
}

double default_eigen_tolerance(const Matrix& m) {
  const double norm = m.size() == 0 ? 0.0 : symmetrized(m).operatorNorm();
  return 1e-10 * std::max(1.0, norm);
}

std::vector<double> positive_eigenvalues(const Matrix& m, std::optional<double> tol) {
  if (m.size() == 0) return {};
  const double threshold = tol.value_or(default_eigen_tolerance(m));
  const auto spectrum = symmetric_eigen(m);
  std::vector<double> out;
  for (Eigen::Index i = 0; i < spectrum.values.size(); ++i) {
    if (spectrum.values[i] > threshold) out.push_back(spectrum.values[i]);
  }
  return out;
}

Vector standard_normal_vector(Eigen::Index dim, Rng& rng) {
  Vector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = standard_normal(rng);
  return v;
}

SymPosDef wishart_sample(double df, const SymPosDef& scale, Rng& rng) {
  const Eigen::Index p = scale.dim();
  if (!(df > static_cast<double>(p - 1))) {
    throw DomainError(fmt::format("wishart_sample: df {:g} must exceed p-1 = {}", df, p - 1));
  }
  Matrix bartlett = Matrix::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    bartlett(i, i) = std::sqrt(chi_squared(rng, df - static_cast<double>(i)));
    for (Eigen::Index j = 0; j < i; ++j) bartlett(i, j) = standard_normal(rng);
  }
  const Matrix lower = checked_llt(scale.matrix(), "wishart_sample").matrixL();
  const Matrix factor = lower * bartlett;
  return SymPosDef(symmetrized(factor * factor.transpose()));
}

}  // namespace msv
