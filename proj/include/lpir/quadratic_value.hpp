#pragma once

#include <Eigen/Dense>

#include "lpir/errors.hpp"

namespace lpir {

/**
 * Parametric cost J(x, theta) = x' P x + b with theta = (P, b).
 *
 * The admissible set is { (P, b) : P symmetric positive semidefinite }.
 * Parameters are flattened as the upper-triangular entries of P in
 * row-major order followed by b, matching the regression features
 * x_i^2 (diagonal) and 2 x_i x_j (i < j).
 */
template <typename Scalar>
class BasicQuadraticValue {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  BasicQuadraticValue() = default;
  BasicQuadraticValue(Matrix P, Scalar offset) : P_(std::move(P)), b_(offset) {
    if (P_.rows() != P_.cols()) throw ParameterError("quadratic form must be square");
  }

  static BasicQuadraticValue zero(Eigen::Index dim) { return {Matrix::Zero(dim, dim), Scalar(0)}; }

  Eigen::Index dimension() const { return P_.rows(); }
  const Matrix& P() const { return P_; }
  Scalar offset() const { return b_; }

  template <typename Derived>
  Scalar operator()(const Eigen::MatrixBase<Derived>& x) const {
    return x.dot(P_ * x) + b_;
  }

  Scalar min_eigenvalue() const {
    if (P_.size() == 0) return Scalar(0);
    return Eigen::SelfAdjointEigenSolver<Matrix>(symmetric_part(), Eigen::EigenvaluesOnly).eigenvalues()(0);
  }

  Matrix symmetric_part() const { return Scalar(0.5) * (P_ + P_.transpose()); }

  bool is_symmetric(Scalar tol = Scalar(1e-12)) const {
    return P_.size() == 0 || (P_ - P_.transpose()).cwiseAbs().maxCoeff() <= tol;
  }

  bool is_admissible(Scalar tol = Scalar(1e-10)) const { return is_symmetric() && min_eigenvalue() >= -tol; }

  static Eigen::Index parameter_count(Eigen::Index dim) { return dim * (dim + 1) / 2 + 1; }

  /// Regression features of x: x_i^2, 2 x_i x_j (i < j), 1.
  template <typename Derived>
  static Vector features(const Eigen::MatrixBase<Derived>& x) {
    const Eigen::Index n = x.size();
    Vector phi(parameter_count(n));
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i; j < n; ++j) phi(k++) = (i == j ? Scalar(1) : Scalar(2)) * x(i) * x(j);
    }
    phi(k) = Scalar(1);
    return phi;
  }

  Vector parameters() const {
    const Eigen::Index n = dimension();
    Vector theta(parameter_count(n));
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i; j < n; ++j) theta(k++) = P_(i, j);
    }
    theta(k) = b_;
    return theta;
  }

  static BasicQuadraticValue from_parameters(Eigen::Index dim, const Vector& theta) {
    if (theta.size() != parameter_count(dim)) throw ParameterError("parameter vector has the wrong length");
    Matrix P(dim, dim);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < dim; ++i) {
      for (Eigen::Index j = i; j < dim; ++j) {
        P(i, j) = theta(k);
        P(j, i) = theta(k);
        ++k;
      }
    }
    return {std::move(P), theta(k)};
  }

  /// Eigenvalue clipping at zero: the Frobenius-nearest PSD matrix.
  BasicQuadraticValue projected() const {
    if (P_.size() == 0) return *this;
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetric_part());
    const Vector clipped = eig.eigenvalues().cwiseMax(Scalar(0));
    Matrix P = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
    P = Scalar(0.5) * (P + P.transpose()).eval();
    return {std::move(P), b_};
  }

 private:
  Matrix P_;
  Scalar b_ = Scalar(0);
};

using QuadraticValue = BasicQuadraticValue<double>;

}  // namespace lpir
