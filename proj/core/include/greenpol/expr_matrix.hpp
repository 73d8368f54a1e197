#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "greenpol/expr.hpp"

namespace greenpol {

// Dense matrix with Expr entries. Small (ranks <= 4 in practice), so the
// arithmetic is plain loops; constant folding in Expr keeps products with
// structural zeros from growing.
class ExprMat {
public:
  ExprMat() = default;
  ExprMat(int rows, int cols) : rows_(rows), cols_(cols), e_(static_cast<std::size_t>(rows * cols)) {}

  static ExprMat zero(int rows, int cols) { return ExprMat(rows, cols); }
  static ExprMat identity(int n);
  static ExprMat constant(const Eigen::MatrixXd& m);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Expr& at(int i, int j) { return e_[static_cast<std::size_t>(i * cols_ + j)]; }
  const Expr& at(int i, int j) const { return e_[static_cast<std::size_t>(i * cols_ + j)]; }

  bool is_zero() const;  // all entries are the literal 0

  ExprMat transpose() const;
  ExprMat diff(int index) const;  // entrywise partial derivative
  Eigen::MatrixXd eval(std::span<const double> x) const;

  friend ExprMat operator+(const ExprMat& a, const ExprMat& b);
  friend ExprMat operator-(const ExprMat& a, const ExprMat& b);
  friend ExprMat operator*(const ExprMat& a, const ExprMat& b);  // matrix product
  ExprMat operator-() const;
  ExprMat scaled(const Expr& s) const;
  ExprMat scaled(double s) const;

private:
  int rows_ = 0, cols_ = 0;
  std::vector<Expr> e_;
};

// Inverse by adjugate over Expr entries (n <= 4). The determinant is
// returned so callers can reject near-singular sample points.
struct ExprMatInverse {
  ExprMat inverse;
  Expr det;
};
ExprMatInverse invert_exprmat(const ExprMat& m);
Expr det_exprmat(const ExprMat& m);

// Complex matrix of Exprs, stored as real and imaginary parts.
struct CoefMat {
  ExprMat re, im;

  CoefMat() = default;
  CoefMat(int rows, int cols) : re(rows, cols), im(rows, cols) {}
  explicit CoefMat(ExprMat real) : re(std::move(real)), im(re.rows(), re.cols()) {}
  CoefMat(ExprMat real, ExprMat imag) : re(std::move(real)), im(std::move(imag)) {}

  int rows() const { return re.rows(); }
  int cols() const { return re.cols(); }
  bool is_zero() const { return re.is_zero() && im.is_zero(); }

  CoefMat transpose() const;
  CoefMat diff(int index) const;
  Eigen::MatrixXcd eval(std::span<const double> x) const;

  friend CoefMat operator+(const CoefMat& a, const CoefMat& b);
  friend CoefMat operator-(const CoefMat& a, const CoefMat& b);
  friend CoefMat operator*(const CoefMat& a, const CoefMat& b);
  CoefMat scaled(std::complex<double> s) const;
  CoefMat scaled(const Expr& s) const;
};

// Multi-index over chart coordinates, fixed length = chart dimension.
using MultiIndex = std::vector<int>;

int mi_order(const MultiIndex& a);
bool mi_leq(const MultiIndex& a, const MultiIndex& b);          // a <= b componentwise
MultiIndex mi_sub(const MultiIndex& a, const MultiIndex& b);    // a - b
MultiIndex mi_add(const MultiIndex& a, const MultiIndex& b);
double mi_binomial(const MultiIndex& upper, const MultiIndex& lower);
double mi_factorial(const MultiIndex& a);
// All multi-indices of length dim with |alpha| == order, lexicographic.
std::vector<MultiIndex> multi_indices_of_order(int dim, int order);

}  // namespace greenpol
