#include "greenpol/symbol.hpp"

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>

namespace greenpol {

namespace {

// i^n for n >= 0.
std::complex<double> i_pow(int n) {
  switch (((n % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

double xi_power(const Eigen::VectorXd& xi, const MultiIndex& alpha) {
  double v = 1.0;
  for (std::size_t i = 0; i < alpha.size(); ++i)
    for (int j = 0; j < alpha[i]; ++j) v *= xi[static_cast<Eigen::Index>(i)];
  return v;
}

}  // namespace

void PolySymbol::add_term(const MultiIndex& alpha, const CoefMat& coef) {
  if (static_cast<int>(alpha.size()) != dim_)
    throw std::invalid_argument("multi-index length does not match chart dimension");
  if (mi_order(alpha) > order_)
    throw std::invalid_argument("term degree exceeds the declared symbol order");
  if (coef.rows() != rows_ || coef.cols() != cols_)
    throw std::invalid_argument("coefficient matrix has wrong shape");
  auto it = terms_.find(alpha);
  if (it == terms_.end()) {
    if (!coef.is_zero()) terms_.emplace(alpha, coef);
  } else {
    it->second = it->second + coef;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

Eigen::MatrixXcd PolySymbol::evaluate(const Eigen::VectorXd& x, const Eigen::VectorXd& xi) const {
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(rows_, cols_);
  std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
  for (const auto& [alpha, coef] : terms_)
    acc += coef.eval(xs) * (i_pow(mi_order(alpha)) * xi_power(xi, alpha));
  return acc;
}

Eigen::MatrixXcd PolySymbol::evaluate_xi_derivative(const Eigen::VectorXd& x,
                                                    const Eigen::VectorXd& xi, int mu) const {
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(rows_, cols_);
  std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
  for (const auto& [alpha, coef] : terms_) {
    int a_mu = alpha[static_cast<std::size_t>(mu)];
    if (a_mu == 0) continue;
    MultiIndex beta = alpha;
    --beta[static_cast<std::size_t>(mu)];
    acc += coef.eval(xs) * (i_pow(mi_order(alpha)) * (static_cast<double>(a_mu) * xi_power(xi, beta)));
  }
  return acc;
}

PolySymbol PolySymbol::degree_slice(int degree) const {
  PolySymbol out(dim_, rows_, cols_, order_);
  for (const auto& [alpha, coef] : terms_)
    if (mi_order(alpha) == degree) out.add_term(alpha, coef);
  return out;
}

PolySymbol PolySymbol::truncate_below(int degree) const {
  PolySymbol out(dim_, rows_, cols_, order_);
  for (const auto& [alpha, coef] : terms_)
    if (mi_order(alpha) >= degree) out.add_term(alpha, coef);
  return out;
}

PolySymbol principal(const PolySymbol& a) { return a.degree_slice(a.order()); }

GradedSymbol refined_principal(const PolySymbol& a) {
  int m = a.order();
  GradedSymbol out;
  out.order = m;
  out.layers.assign(2, PolySymbol(a.dim(), a.rows(), a.cols(), m));

  for (const auto& [alpha, coef] : a.terms()) {
    int deg = mi_order(alpha);
    if (deg == m)
      out.layers[0].add_term(alpha, coef);
    else if (deg == m - 1)
      out.layers[1].add_term(alpha, coef);
  }
  // Correction -1/2 (beta_mu + 1) d_mu A_{beta+e_mu} lands one degree below
  // each source term; only degree-m sources contribute to the kept layers.
  for (const auto& [alpha, coef] : a.terms()) {
    if (mi_order(alpha) != m) continue;
    for (int mu = 0; mu < a.dim(); ++mu) {
      if (alpha[static_cast<std::size_t>(mu)] == 0) continue;
      MultiIndex beta = alpha;
      --beta[static_cast<std::size_t>(mu)];
      double mult = static_cast<double>(beta[static_cast<std::size_t>(mu)] + 1);
      out.layers[1].add_term(beta, coef.diff(mu).scaled(std::complex<double>(-0.5 * mult, 0.0)));
    }
  }
  return out;
}

PolySymbol subprincipal(const PolySymbol& a) { return refined_principal(a).layers[1]; }

PolySymbol compose(const PolySymbol& a, const PolySymbol& b, int drop_below) {
  if (a.dim() != b.dim()) throw std::invalid_argument("compose: chart dimension mismatch");
  if (a.cols() != b.rows()) throw std::invalid_argument("compose: rank mismatch");
  PolySymbol out(a.dim(), a.rows(), b.cols(), a.order() + b.order());

  for (const auto& [beta, A] : a.terms()) {
    // Enumerate xi-derivative multi-indices alpha <= beta; higher alpha
    // annihilates the (i xi)^beta term.
    std::vector<MultiIndex> alphas;
    MultiIndex cur(beta.size(), 0);
    auto rec = [&](auto&& self, std::size_t pos) -> void {
      if (pos == beta.size()) {
        alphas.push_back(cur);
        return;
      }
      for (int v = 0; v <= beta[pos]; ++v) {
        cur[pos] = v;
        self(self, pos + 1);
      }
    };
    rec(rec, 0);

    for (const auto& alpha : alphas) {
      int na = mi_order(alpha);
      // d_xi^alpha (i xi)^beta = i^|alpha| beta!/(beta-alpha)! (i xi)^(beta-alpha)
      double falling = mi_binomial(beta, alpha) * mi_factorial(alpha);
      // (-i)^|alpha| = conj(i^|alpha|)
      std::complex<double> scale =
          std::conj(i_pow(na)) * i_pow(na) * falling / mi_factorial(alpha);
      MultiIndex rest = mi_sub(beta, alpha);
      for (const auto& [gamma, B] : b.terms()) {
        MultiIndex delta = mi_add(rest, gamma);
        if (mi_order(delta) < drop_below) continue;
        CoefMat dB = B;
        for (std::size_t mu = 0; mu < alpha.size(); ++mu)
          for (int j = 0; j < alpha[mu]; ++j) dB = dB.diff(static_cast<int>(mu));
        out.add_term(delta, (A * dB).scaled(scale));
      }
    }
  }
  return out;
}

PolySymbol dual_symbol(const PolySymbol& a) {
  PolySymbol out(a.dim(), a.cols(), a.rows(), a.order());
  for (const auto& [alpha, coef] : a.terms()) {
    double sign = (mi_order(alpha) % 2 == 0) ? 1.0 : -1.0;
    out.add_term(alpha, coef.transpose().scaled(std::complex<double>(sign, 0.0)));
  }
  return out;
}

PolySymbol x_derivative(const PolySymbol& a, int mu) {
  PolySymbol out(a.dim(), a.rows(), a.cols(), a.order());
  for (const auto& [alpha, coef] : a.terms()) out.add_term(alpha, coef.diff(mu));
  return out;
}

std::vector<ExprMat> connection_frame_change(const std::vector<ExprMat>& gamma, const ExprMat& M,
                                             const ExprMat& M_inverse) {
  std::vector<ExprMat> out;
  out.reserve(gamma.size());
  for (std::size_t mu = 0; mu < gamma.size(); ++mu)
    out.push_back((M * gamma[mu] - M.diff(static_cast<int>(mu))) * M_inverse);
  return out;
}

namespace {

// Scalar principal part b of a = b id, as the (0,0) entry of the top layer;
// throws if the top layer is not a multiple of the identity at a probe point.
void check_scalar_principal(const PolySymbol& a, const PolySymbol& top) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("frame change requires a square (endomorphism) symbol");
  Eigen::VectorXd x = Eigen::VectorXd::Constant(a.dim(), 0.1);
  Eigen::VectorXd xi = Eigen::VectorXd::LinSpaced(a.dim(), 1.0, 2.0);
  Eigen::MatrixXcd p = top.evaluate(x, xi);
  Eigen::MatrixXcd dev = p - p(0, 0) * Eigen::MatrixXcd::Identity(a.rows(), a.cols());
  if (dev.norm() > 1e-9 * (1.0 + p.norm()))
    throw std::invalid_argument("frame change requires a scalar principal part");
}

}  // namespace

FrameChangeResult frame_change_refined(const PolySymbol& a, const ExprMat& M, std::uint64_t seed,
                                       const std::vector<ExprMat>* connection) {
  int dim = a.dim();
  int r = a.rows();
  PolySymbol top = principal(a);
  check_scalar_principal(a, top);

  auto Minv_full = invert_exprmat(M);
  const ExprMat& Minv = Minv_full.inverse;

  PolySymbol m_sym(dim, r, r, 0), minv_sym(dim, r, r, 0);
  MultiIndex zero(static_cast<std::size_t>(dim), 0);
  m_sym.add_real_term(zero, M);
  minv_sym.add_real_term(zero, Minv);
  PolySymbol transformed = compose(m_sym, compose(a, minv_sym));

  // Verification connection: zero forms in the old frame unless supplied.
  std::vector<ExprMat> gamma;
  if (connection) {
    gamma = *connection;
  } else {
    gamma.assign(static_cast<std::size_t>(dim), ExprMat::zero(r, r));
  }
  std::vector<ExprMat> gamma_new = connection_frame_change(gamma, M, Minv);

  GradedSymbol ar = refined_principal(a);
  GradedSymbol ar_new = refined_principal(transformed);
  int m_ord = a.order();

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(-1.0, 1.0);
  std::uniform_real_distribution<double> unorm(0.5, 5.0);

  FrameChangeResult result;
  result.samples = 20;
  for (int s = 0; s < result.samples; ++s) {
    Eigen::VectorXd x(dim), xi(dim);
    for (int i = 0; i < dim; ++i) x[i] = ux(rng);
    for (int i = 0; i < dim; ++i) xi[i] = ux(rng);
    if (xi.norm() == 0.0) xi[0] = 1.0;
    xi *= unorm(rng) / xi.norm();
    std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
    if (std::abs(eval(Minv_full.det, xs)) <= 1e-12)
      throw std::invalid_argument("frame-change matrix is singular at a sample point");

    // pi_* X_b component: db/dxi_mu from the scalar top layer.
    Eigen::VectorXcd xq(dim);
    for (int mu = 0; mu < dim; ++mu) {
      Eigen::MatrixXcd d = top.evaluate_xi_derivative(x, xi, mu);
      xq[mu] = d.trace() / static_cast<double>(r);
    }

    auto refined_value = [&](const GradedSymbol& g) -> Eigen::MatrixXcd {
      return g.layers[0].evaluate(x, xi) + g.layers[1].evaluate(x, xi);
    };
    std::complex<double> im(0.0, 1.0);
    Eigen::MatrixXcd gamma_term = Eigen::MatrixXcd::Zero(r, r);
    Eigen::MatrixXcd gamma_term_new = Eigen::MatrixXcd::Zero(r, r);
    for (int mu = 0; mu < dim; ++mu) {
      gamma_term += xq[mu] * gamma[static_cast<std::size_t>(mu)].eval(xs);
      gamma_term_new += xq[mu] * gamma_new[static_cast<std::size_t>(mu)].eval(xs);
    }
    Eigen::MatrixXcd Mval = M.eval(xs);
    Eigen::MatrixXcd lhs = Mval * (refined_value(ar) + im * gamma_term);
    Eigen::MatrixXcd rhs = (refined_value(ar_new) + im * gamma_term_new) * Mval;

    double scale = 1.0 + lhs.norm() + rhs.norm();
    double resid = (lhs - rhs).norm() / scale;
    result.max_residual = std::max(result.max_residual, resid);
    (void)m_ord;
  }
  result.transformed = std::move(transformed);
  return result;
}

}  // namespace greenpol
