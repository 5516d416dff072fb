#pragma once

#include "bgc/green.hpp"

#include <Eigen/Core>
#include <Eigen/Cholesky>

#include <span>

namespace bgc {

/// Linear-reproduction constraints A Phi = (eta, 1) for one cage. A is shared by
/// all query points; its Gram matrix A A^T is factorized once.
class ConstraintSystem {
 public:
  ConstraintSystem(Eigen::MatrixXd a, int rank);

  const Eigen::MatrixXd& matrix() const noexcept { return a_; }
  int rank() const noexcept { return rank_; }
  double gram_condition() const noexcept { return condition_; }

  /// Min-norm correction of `raw` onto { Phi : A Phi = q }.
  Eigen::VectorXd project(const Eigen::Vector4d& q, const Eigen::VectorXd& raw) const;
  void project_in_place(const Eigen::Vector4d& q, std::span<double> row) const;
  Eigen::Vector4d residual(const Eigen::Vector4d& q, std::span<const double> row) const;

 private:
  Eigen::MatrixXd a_;
  Eigen::LDLT<Eigen::Matrix4d> gram_;
  int rank_;
  double condition_;
};

/// Rank of the position block [b; 1] of A. Four or more non-coplanar control
/// points make it 4, which alone forces full row rank.
int position_rank(const Cage& cage);

/// Builds A for the given variant. Throws Error(numeric) when the position block
/// has rank < 4 (cage lies in a plane) or A A^T has condition number > 1e14.
ConstraintSystem constraint_matrix(const Cage& cage, NeumannVariant variant);

Eigen::VectorXd project_row(const ConstraintSystem& system, const Vec3& eta,
                            const Eigen::VectorXd& raw);

/// Projects every row of `table` in place and marks it projected.
void project_table(const ConstraintSystem& system, std::span<const Vec3> vertices,
                   CoordinateTable& table);

}  // namespace bgc
