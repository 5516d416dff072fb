#include "bgc/reproduction.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <sstream>

namespace bgc {
namespace {

constexpr double kMaxCondition = 1e14;

}  // namespace

ConstraintSystem::ConstraintSystem(Eigen::MatrixXd a, int rank) : a_(std::move(a)), rank_(rank) {
  const Eigen::Matrix4d gram = a_ * a_.transpose();
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eigen(gram, Eigen::EigenvaluesOnly);
  const double lo = eigen.eigenvalues().minCoeff();
  const double hi = eigen.eigenvalues().maxCoeff();
  condition_ = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (!(condition_ <= kMaxCondition)) {
    std::ostringstream msg;
    msg << "constraint Gram matrix is numerically singular (condition " << condition_
        << "); recenter or rescale the cage";
    throw Error(ErrorCategory::numeric, msg.str());
  }
  gram_.compute(gram);
}

Eigen::VectorXd ConstraintSystem::project(const Eigen::Vector4d& q, const Eigen::VectorXd& raw) const {
  Eigen::VectorXd out = raw;
  project_in_place(q, {out.data(), static_cast<std::size_t>(out.size())});
  return out;
}

void ConstraintSystem::project_in_place(const Eigen::Vector4d& q, std::span<double> row) const {
  if (static_cast<Eigen::Index>(row.size()) != a_.cols())
    throw Error(ErrorCategory::mismatch, "coordinate row does not match the constraint matrix");
  Eigen::Map<Eigen::VectorXd> phi(row.data(), static_cast<Eigen::Index>(row.size()));
  // One refinement pass recovers the digits lost to the Gram solve.
  for (int pass = 0; pass < 2; ++pass) {
    const Eigen::Vector4d r = q - a_ * phi;
    phi.noalias() += a_.transpose() * gram_.solve(r);
  }
}

Eigen::Vector4d ConstraintSystem::residual(const Eigen::Vector4d& q, std::span<const double> row) const {
  const Eigen::Map<const Eigen::VectorXd> phi(row.data(), static_cast<Eigen::Index>(row.size()));
  return a_ * phi - q;
}

int position_rank(const Cage& cage) {
  const std::vector<Vec3> points = stacked_control_points(cage);
  const Vec3 center = cage.centroid();
  const double scale = cage.diameter() > 0.0 ? cage.diameter() : 1.0;
  Eigen::MatrixXd block(4, static_cast<Eigen::Index>(points.size()));
  for (std::size_t c = 0; c < points.size(); ++c) {
    block.col(static_cast<Eigen::Index>(c)).head<3>() = (points[c] - center) / scale;
    block(3, static_cast<Eigen::Index>(c)) = 1.0;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(block);
  lu.setThreshold(1e-10);
  return static_cast<int>(lu.rank());
}

ConstraintSystem constraint_matrix(const Cage& cage, NeumannVariant variant) {
  const int position = position_rank(cage);
  if (position < 4) {
    std::ostringstream msg;
    msg << "cage control points span rank " << position << " < 4 (planar or degenerate cage)";
    throw Error(ErrorCategory::numeric, msg.str());
  }
  const CoordinateLayout layout = make_layout(cage, variant);
  const std::vector<Vec3> points = stacked_control_points(cage);
  const std::vector<Vec3> neumann = neumann_vectors(cage, variant);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, static_cast<Eigen::Index>(layout.row_size()));
  for (std::size_t c = 0; c < points.size(); ++c) {
    a.col(static_cast<Eigen::Index>(c)).head<3>() = points[c];
    a(3, static_cast<Eigen::Index>(c)) = 1.0;
  }
  for (std::size_t c = 0; c < neumann.size(); ++c)
    a.col(static_cast<Eigen::Index>(layout.phi_count + c)).head<3>() = neumann[c];
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  lu.setThreshold(1e-12);
  const int rank = static_cast<int>(lu.rank());
  return ConstraintSystem(std::move(a), rank);
}

Eigen::VectorXd project_row(const ConstraintSystem& system, const Vec3& eta, const Eigen::VectorXd& raw) {
  const Eigen::Vector4d q(eta.x(), eta.y(), eta.z(), 1.0);
  return system.project(q, raw);
}

void project_table(const ConstraintSystem& system, std::span<const Vec3> vertices, CoordinateTable& table) {
  if (vertices.size() != table.vertex_count)
    throw Error(ErrorCategory::mismatch, "vertex count does not match the coordinate table");
  for (std::size_t v = 0; v < table.vertex_count; ++v) {
    const Eigen::Vector4d q(vertices[v].x(), vertices[v].y(), vertices[v].z(), 1.0);
    system.project_in_place(q, table.row(v));
  }
  table.projected = true;
}

}  // namespace bgc
