#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "msv/rng.hpp"

namespace msv {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Symmetric positive-definite matrix. Construction verifies symmetry to an
/// absolute 1e-10 and positive definiteness through a Cholesky attempt;
/// the stored matrix is the exactly symmetrized input.
class SymPosDef {
 public:
  explicit SymPosDef(const Matrix& entries);

  static SymPosDef identity(Eigen::Index dim);

  Eigen::Index dim() const { return entries_.rows(); }
  const Matrix& matrix() const { return entries_; }

  SymPosDef scaled(double factor) const;

 private:
  struct Trusted {};
  SymPosDef(Matrix entries, Trusted) : entries_(std::move(entries)) {}
  friend SymPosDef trust_spd(Matrix entries);

  Matrix entries_;
};

/// Wraps a matrix already known to be SPD (e.g. a positive multiple of one)
/// without re-running the Cholesky check.
SymPosDef trust_spd(Matrix entries);

/// Upper-triangular U with positive diagonal such that U'U equals the
/// factored matrix.
class UpperCholesky {
 public:
  explicit UpperCholesky(Matrix upper) : upper_(std::move(upper)) {}

  Eigen::Index dim() const { return upper_.rows(); }
  const Matrix& upper() const { return upper_; }
  Matrix reconstruct() const { return upper_.transpose() * upper_; }

 private:
  Matrix upper_;
};

struct EigenSpectrum {
  Vector values;   // descending
  Matrix vectors;  // columns match `values`
};

/// Spectral decomposition of (M + M')/2.
EigenSpectrum symmetric_eigen(const Matrix& m);

UpperCholesky chol_upper(const SymPosDef& a);
UpperCholesky chol_upper(const Matrix& a);

/// Symmetric (spectral) inverse square root B with B A B = I.
SymPosDef sym_inv_sqrt(const SymPosDef& a);

/// Symmetric (spectral) square root.
SymPosDef sym_sqrt(const SymPosDef& a);

/// In-place update of a lower Cholesky factor: L L' <- L L' + x x'.
void cholesky_rank1_update(Matrix& lower, Vector x);

/// Orthogonal factor O of the polar decomposition M = O H (H symmetric PSD).
/// For a lower Cholesky factor L of S, O L⁻¹ y = S^{-1/2} y with the
/// symmetric root, without forming S.
Matrix polar_orthogonal(const Matrix& m);

/// Upper-triangular R with positive diagonal and R R' = L L', obtained from
/// an RQ decomposition of the lower factor L. R⁻¹ is the upper Cholesky
/// factor of (L L')⁻¹.
Matrix upper_root_from_lower(const Matrix& lower);

SymPosDef inverse(const SymPosDef& a);

double log_det(const SymPosDef& a);
double log_det(const Matrix& a);

/// log Γ_p(a) = p(p-1)/4 log π + Σ_{j=1..p} log Γ(a - (j-1)/2).
double log_multigamma(int p, double a);

/// Log density of the p-variate Student t with `df` degrees of freedom, zero
/// location and identity scale, in the parameterization where the variance
/// is I/(df - 2):
///
///   log Γ((df+p)/2) - log Γ(df/2) - (p/2) log π - ((df+p)/2) log(1 + u'u)
///
/// This integrates to one; the degrees of freedom do not rescale u'u.
double student_t_logpdf(const Eigen::Ref<const Vector>& u, double df);

/// Eigenvalues of (M + M')/2 strictly above `tol`, in descending order.
/// Default tolerance is 1e-10 · max(1, ‖M‖₂).
std::vector<double> positive_eigenvalues(const Matrix& m,
                                         std::optional<double> tol = std::nullopt);

double default_eigen_tolerance(const Matrix& m);

/// One draw from W_p(df, scale) via the Bartlett decomposition.
SymPosDef wishart_sample(double df, const SymPosDef& scale, Rng& rng);

/// Vector of i.i.d. N(0, 1) draws.
Vector standard_normal_vector(Eigen::Index dim, Rng& rng);

}  // namespace msv
