#include "greenpol/expr_matrix.hpp"

#include <stdexcept>

namespace greenpol {

ExprMat ExprMat::identity(int n) {
  ExprMat m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = Expr::number(1.0);
  return m;
}

ExprMat ExprMat::constant(const Eigen::MatrixXd& src) {
  ExprMat m(static_cast<int>(src.rows()), static_cast<int>(src.cols()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) m.at(i, j) = Expr::number(src(i, j));
  return m;
}

bool ExprMat::is_zero() const {
  for (const auto& e : e_)
    if (!e.is_number(0.0)) return false;
  return true;
}

ExprMat ExprMat::transpose() const {
  ExprMat m(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) m.at(j, i) = at(i, j);
  return m;
}

ExprMat ExprMat::diff(int index) const {
  ExprMat m(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) m.at(i, j) = greenpol::diff(at(i, j), index);
  return m;
}

Eigen::MatrixXd ExprMat::eval(std::span<const double> x) const {
  Eigen::MatrixXd m(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) m(i, j) = greenpol::eval(at(i, j), x);
  return m;
}

ExprMat operator+(const ExprMat& a, const ExprMat& b) {
  ExprMat m(a.rows_, a.cols_);
  for (std::size_t i = 0; i < m.e_.size(); ++i) m.e_[i] = a.e_[i] + b.e_[i];
  return m;
}

ExprMat operator-(const ExprMat& a, const ExprMat& b) {
  ExprMat m(a.rows_, a.cols_);
  for (std::size_t i = 0; i < m.e_.size(); ++i) m.e_[i] = a.e_[i] - b.e_[i];
  return m;
}

ExprMat operator*(const ExprMat& a, const ExprMat& b) {
  ExprMat m(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j) {
      Expr s;
      for (int k = 0; k < a.cols(); ++k) s = s + a.at(i, k) * b.at(k, j);
      m.at(i, j) = s;
    }
  return m;
}

ExprMat ExprMat::operator-() const {
  ExprMat m(rows_, cols_);
  for (std::size_t i = 0; i < e_.size(); ++i) m.e_[i] = -e_[i];
  return m;
}

ExprMat ExprMat::scaled(const Expr& s) const {
  ExprMat m(rows_, cols_);
  for (std::size_t i = 0; i < e_.size(); ++i) m.e_[i] = s * e_[i];
  return m;
}

ExprMat ExprMat::scaled(double s) const { return scaled(Expr::number(s)); }

namespace {

// Determinant by cofactor expansion along the first row.
Expr det_rec(const ExprMat& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  if (rows.size() == 1) return m.at(rows[0], cols[0]);
  Expr d;
  std::vector<int> sub_rows(rows.begin() + 1, rows.end());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    std::vector<int> sub_cols;
    for (std::size_t k = 0; k < cols.size(); ++k)
      if (k != j) sub_cols.push_back(cols[k]);
    Expr minor = det_rec(m, sub_rows, sub_cols);
    Expr term = m.at(rows[0], cols[j]) * minor;
    d = (j % 2 == 0) ? d + term : d - term;
  }
  return d;
}

}  // namespace

Expr det_exprmat(const ExprMat& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("determinant of a non-square matrix");
  std::vector<int> idx(static_cast<std::size_t>(m.rows()));
  for (int i = 0; i < m.rows(); ++i) idx[static_cast<std::size_t>(i)] = i;
  return det_rec(m, idx, idx);
}

ExprMatInverse invert_exprmat(const ExprMat& m) {
  int n = m.rows();
  if (n != m.cols()) throw std::invalid_argument("inverse of a non-square matrix");
  Expr det = det_exprmat(m);
  ExprMat inv(n, n);
  if (n == 1) {
    inv.at(0, 0) = Expr::number(1.0) / m.at(0, 0);
    return {inv, det};
  }
  std::vector<int> all(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      std::vector<int> rows, cols;
      for (int k = 0; k < n; ++k) {
        if (k != j) rows.push_back(k);
        if (k != i) cols.push_back(k);
      }
      Expr cof = det_rec(m, rows, cols);
      if ((i + j) % 2 == 1) cof = -cof;
      inv.at(i, j) = cof / det;
    }
  return {inv, det};
}

CoefMat CoefMat::transpose() const { return {re.transpose(), im.transpose()}; }

CoefMat CoefMat::diff(int index) const { return {re.diff(index), im.diff(index)}; }

Eigen::MatrixXcd CoefMat::eval(std::span<const double> x) const {
  Eigen::MatrixXcd m(rows(), cols());
  Eigen::MatrixXd r = re.eval(x), i = im.eval(x);
  m.real() = r;
  m.imag() = i;
  return m;
}

CoefMat operator+(const CoefMat& a, const CoefMat& b) { return {a.re + b.re, a.im + b.im}; }
CoefMat operator-(const CoefMat& a, const CoefMat& b) { return {a.re - b.re, a.im - b.im}; }

CoefMat operator*(const CoefMat& a, const CoefMat& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

CoefMat CoefMat::scaled(std::complex<double> s) const {
  return {re.scaled(s.real()) - im.scaled(s.imag()), re.scaled(s.imag()) + im.scaled(s.real())};
}

CoefMat CoefMat::scaled(const Expr& s) const { return {re.scaled(s), im.scaled(s)}; }

int mi_order(const MultiIndex& a) {
  int n = 0;
  for (int v : a) n += v;
  return n;
}

bool mi_leq(const MultiIndex& a, const MultiIndex& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

MultiIndex mi_sub(const MultiIndex& a, const MultiIndex& b) {
  MultiIndex r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

MultiIndex mi_add(const MultiIndex& a, const MultiIndex& b) {
  MultiIndex r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

namespace {
double binom1(int n, int k) {
  double v = 1.0;
  for (int i = 0; i < k; ++i) v = v * static_cast<double>(n - i) / static_cast<double>(i + 1);
  return v;
}
}  // namespace

double mi_binomial(const MultiIndex& upper, const MultiIndex& lower) {
  double v = 1.0;
  for (std::size_t i = 0; i < upper.size(); ++i) v *= binom1(upper[i], lower[i]);
  return v;
}

double mi_factorial(const MultiIndex& a) {
  double v = 1.0;
  for (int n : a)
    for (int i = 2; i <= n; ++i) v *= static_cast<double>(i);
  return v;
}

std::vector<MultiIndex> multi_indices_of_order(int dim, int order) {
  std::vector<MultiIndex> out;
  MultiIndex cur(static_cast<std::size_t>(dim), 0);
  // Recursive enumeration in lexicographic order.
  auto rec = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == dim - 1) {
      cur[static_cast<std::size_t>(pos)] = remaining;
      out.push_back(cur);
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      cur[static_cast<std::size_t>(pos)] = v;
      self(self, pos + 1, remaining - v);
    }
  };
  if (dim > 0) rec(rec, 0, order);
  return out;
}

}  // namespace greenpol
