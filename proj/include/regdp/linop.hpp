#pragma once

#include <Eigen/Dense>
#include <vector>

#include "regdp/errors.hpp"

namespace regdp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

namespace linop {

enum class ApplyMode { Forward, Adjoint };

/// Thin singular value decomposition A = U diag(sigma) V^T with
/// sigma sorted descending and orthonormal columns in U (left) and V (right).
struct SingularSystem {
  Vector sigma;  // size r = min(rows, cols), nonnegative, descending
  Matrix left;   // rows x r
  Matrix right;  // cols x r

  Eigen::Index rows() const { return left.rows(); }
  Eigen::Index cols() const { return right.rows(); }
  Eigen::Index rank_bound() const { return sigma.size(); }
  double max_sigma() const { return sigma.size() > 0 ? sigma[0] : 0.0; }
};

/// Matrix-vector action. Forward computes A x, Adjoint computes A^T x.
Vector apply(const Matrix& A, const Vector& x, ApplyMode mode = ApplyMode::Forward);

/// Deterministic dense SVD. Throws ConvergenceFailure if the backend fails,
/// InvalidValue on non-finite entries.
SingularSystem decompose(const Matrix& A);

/// Default cutoff separating "numerically zero" singular values: 1e-10 * sigma_max.
double default_null_tol(const SingularSystem& S);

/// Orthonormal basis of the numerical null space: right singular vectors with
/// sigma_j <= tol, plus the orthogonal complement of the right-vector span
/// when cols > rank_bound. Deterministic ordering.
std::vector<Vector> nullspace_basis(const SingularSystem& S, double tol);

/// Same construction on the left vectors: basis of the numerical null space
/// of the adjoint (equivalently of Q = A A^T).
std::vector<Vector> left_nullspace_basis(const SingularSystem& S, double tol);

/// Orthogonal projection of f onto the closure of the range,
/// i.e. onto span{ u_j : sigma_j > tol }.
Vector project_range_closure(const SingularSystem& S, const Vector& f, double tol);

/// Minimum-norm solution of A y = f for data in the range at tolerance tol.
/// Throws NotInRange when || f - project_range_closure(f) || > tol * || f ||.
Vector min_norm_solution(const SingularSystem& S, const Vector& f, double tol);

/// Multiply the factors back together (mainly for verification).
Matrix reconstruct(const SingularSystem& S);

}  // namespace linop
}  // namespace regdp
