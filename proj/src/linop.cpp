#include "regdp/linop.hpp"

#include <Eigen/SVD>

namespace regdp {
namespace linop {

namespace {

void require_finite(const Matrix& A) {
  if (!A.allFinite()) throw InvalidValue("operator has non-finite entries");
}

void require_finite(const Vector& x) {
  if (!x.allFinite()) throw InvalidValue("vector has non-finite entries");
}

void require_nonneg_tol(double tol) {
  if (!(tol >= 0.0) || !std::isfinite(tol)) {
    throw InvalidValue("tolerance must be finite and nonnegative");
  }
}

// Orthonormal complement of the span of the (orthonormal) columns of V,
// taken from the trailing columns of a full Householder Q.
std::vector<Vector> span_complement(const Matrix& V) {
  std::vector<Vector> out;
  const Eigen::Index n = V.rows(), r = V.cols();
  if (n <= r) return out;
  Eigen::HouseholderQR<Matrix> qr(V);
  Matrix Q = qr.householderQ();
  out.reserve(static_cast<std::size_t>(n - r));
  for (Eigen::Index k = r; k < n; ++k) out.push_back(Q.col(k));
  return out;
}

std::vector<Vector> null_basis_impl(const Vector& sigma, const Matrix& vectors, double tol) {
  require_nonneg_tol(tol);
  std::vector<Vector> basis;
  for (Eigen::Index j = 0; j < sigma.size(); ++j) {
    if (sigma[j] <= tol) basis.push_back(vectors.col(j));
  }
  for (auto& v : span_complement(vectors)) basis.push_back(std::move(v));
  return basis;
}

}  // namespace

Vector apply(const Matrix& A, const Vector& x, ApplyMode mode) {
  require_finite(A);
  require_finite(x);
  const Eigen::Index need = mode == ApplyMode::Forward ? A.cols() : A.rows();
  if (x.size() != need) {
    throw DimensionMismatch("apply: operand has length " + std::to_string(x.size()) +
                            ", operator wants " + std::to_string(need));
  }
  return mode == ApplyMode::Forward ? Vector(A * x) : Vector(A.transpose() * x);
}

SingularSystem decompose(const Matrix& A) {
  if (A.rows() < 1 || A.cols() < 1) throw DimensionMismatch("decompose: empty operator");
  require_finite(A);

  SingularSystem S;
  // Jacobi is the accuracy workhorse at small sizes; divide-and-conquer
  // takes over where Jacobi's O(n^3) sweeps start to hurt. Both are
  // deterministic for a fixed input, which the callers rely on.
  if (std::min(A.rows(), A.cols()) < 64) {
    Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) throw ConvergenceFailure("decompose: SVD did not converge");
    S.sigma = svd.singularValues();
    S.left = svd.matrixU();
    S.right = svd.matrixV();
  } else {
    Eigen::BDCSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) throw ConvergenceFailure("decompose: SVD did not converge");
    S.sigma = svd.singularValues();
    S.left = svd.matrixU();
    S.right = svd.matrixV();
  }
  return S;
}

double default_null_tol(const SingularSystem& S) { return 1e-10 * S.max_sigma(); }

std::vector<Vector> nullspace_basis(const SingularSystem& S, double tol) {
  return null_basis_impl(S.sigma, S.right, tol);
}

std::vector<Vector> left_nullspace_basis(const SingularSystem& S, double tol) {
  return null_basis_impl(S.sigma, S.left, tol);
}

Vector project_range_closure(const SingularSystem& S, const Vector& f, double tol) {
  require_nonneg_tol(tol);
  require_finite(f);
  if (f.size() != S.rows()) throw DimensionMismatch("project_range_closure: length mismatch");
  Vector g = Vector::Zero(f.size());
  for (Eigen::Index j = 0; j < S.sigma.size(); ++j) {
    if (S.sigma[j] > tol) g += S.left.col(j) * S.left.col(j).dot(f);
  }
  return g;
}

Vector min_norm_solution(const SingularSystem& S, const Vector& f, double tol) {
  require_nonneg_tol(tol);
  require_finite(f);
  if (f.size() != S.rows()) throw DimensionMismatch("min_norm_solution: length mismatch");

  const Vector g = project_range_closure(S, f, tol);
  if ((f - g).norm() > tol * f.norm()) {
    throw NotInRange("min_norm_solution: data is not in the range closure at this tolerance");
  }
  Vector y = Vector::Zero(S.cols());
  for (Eigen::Index j = 0; j < S.sigma.size(); ++j) {
    if (S.sigma[j] > tol) y += S.right.col(j) * (S.left.col(j).dot(f) / S.sigma[j]);
  }
  return y;
}

Matrix reconstruct(const SingularSystem& S) {
  return S.left * S.sigma.asDiagonal() * S.right.transpose();
}

}  // namespace linop
}  // namespace regdp
