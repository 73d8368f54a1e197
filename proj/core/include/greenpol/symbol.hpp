#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <vector>

#include "greenpol/expr_matrix.hpp"

namespace greenpol {

// Polynomial (differential-operator) matrix symbol in a fixed chart and
// frame, stored in the (i xi)^alpha convention: the operator
// sum_alpha A_alpha(x) d^alpha has symbol a(x,xi) = sum_alpha A_alpha(x)
// (i xi)^alpha, so the stored tables carry the operator coefficients and
// the powers of i are implicit in the grading.
class PolySymbol {
public:
  PolySymbol() = default;
  PolySymbol(int dim, int rows, int cols, int order)
      : dim_(dim), rows_(rows), cols_(cols), order_(order) {}

  static PolySymbol identity(int dim, int rank) {
    PolySymbol s(dim, rank, rank, 0);
    s.add_term(MultiIndex(static_cast<std::size_t>(dim), 0), CoefMat(ExprMat::identity(rank)));
    return s;
  }

  int dim() const { return dim_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int order() const { return order_; }
  const std::map<MultiIndex, CoefMat>& terms() const { return terms_; }

  // Accumulates; drops exact-zero tables so sliced symbols stay sparse.
  void add_term(const MultiIndex& alpha, const CoefMat& coef);
  void add_real_term(const MultiIndex& alpha, const ExprMat& coef) { add_term(alpha, CoefMat(coef)); }

  // a(x, xi) = sum_alpha A_alpha(x) i^|alpha| xi^alpha.
  Eigen::MatrixXcd evaluate(const Eigen::VectorXd& x, const Eigen::VectorXd& xi) const;

  // Terms with |alpha| == degree, as a symbol of the same declared order.
  PolySymbol degree_slice(int degree) const;
  // Terms with |alpha| >= degree.
  PolySymbol truncate_below(int degree) const;

  // d a / d xi_mu, one degree lower; used by the frame-change law.
  Eigen::MatrixXcd evaluate_xi_derivative(const Eigen::VectorXd& x, const Eigen::VectorXd& xi,
                                          int mu) const;

private:
  int dim_ = 0, rows_ = 0, cols_ = 0, order_ = 0;
  std::map<MultiIndex, CoefMat> terms_;
};

// Homogeneous layers a_m, a_{m-1}, ... (layers[j] has degree order-j).
struct GradedSymbol {
  int order = 0;
  std::vector<PolySymbol> layers;
};

// Degree-m homogeneous part (m = declared order).
PolySymbol principal(const PolySymbol& a);

// Refined principal symbol a + (i/2) d^2 a / dx^mu dxi_mu, truncated to
// the top two degrees. In the (i xi)^alpha table convention the correction
// is (a^r)_beta = A_beta - 1/2 sum_mu (beta_mu + 1) d_mu A_{beta+e_mu}.
GradedSymbol refined_principal(const PolySymbol& a);

// Degree-(m-1) part of the refined principal symbol minus the principal.
PolySymbol subprincipal(const PolySymbol& a);

// Symbol of the operator composition Op(a) Op(a'):
// b = sum_alpha ((-i)^|alpha| / alpha!) (d_xi^alpha a)(d_x^alpha a'),
// exact for polynomial symbols; terms of degree < drop_below are removed.
PolySymbol compose(const PolySymbol& a, const PolySymbol& a2, int drop_below = 0);

// Principal symbol of the formal dual: (dual a)(x,xi) = a(x,-xi)^T,
// applied per homogeneous layer.
PolySymbol dual_symbol(const PolySymbol& a);

// Entrywise d/dx^mu of the coefficient tables.
PolySymbol x_derivative(const PolySymbol& a, int mu);

// Transforms connection 1-form matrices under the frame change
// e = e' M: Gamma'_mu = (M Gamma_mu - d_mu M) M^{-1}.
std::vector<ExprMat> connection_frame_change(const std::vector<ExprMat>& gamma, const ExprMat& M,
                                             const ExprMat& M_inverse);

struct FrameChangeResult {
  PolySymbol transformed;  // M a M^{-1} via the composition rule
  double max_residual = 0.0;
  int samples = 0;
};

// Changes frame by an invertible matrix M of Exprs (new frame e' = e M^{-1})
// for a symbol with scalar principal part, and verifies the section
// transformation law of a^r + i Gamma_{X_b} on seeded samples
// (20 points, |xi| in [0.5, 5]). `connection` holds the 1-forms of the
// verification connection in the old frame; zero forms when omitted.
FrameChangeResult frame_change_refined(const PolySymbol& a, const ExprMat& M, std::uint64_t seed,
                                       const std::vector<ExprMat>* connection = nullptr);

}  // namespace greenpol
