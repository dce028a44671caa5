#pragma once

#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gcgeo/algebroid.hpp"
#include "gcgeo/calculus.hpp"
#include "gcgeo/linalg.hpp"
#include "gcgeo/report.hpp"

namespace gcgeo {

// Section v + xi of T(+)T* over an ordinary chart: the vector part is stored
// by components on the body generators, the form part as a one-form.
struct GeneralizedSection {
  VectorForm vec;
  GradedElement form;

  explicit GeneralizedSection(const CartanChart& cc)
      : vec(cc), form(GradedElement::zero(cc.chart)) {}
  GeneralizedSection(VectorForm v, GradedElement f) : vec(std::move(v)), form(std::move(f)) {
    require_same_chart(vec.cartan().chart, form.chart());
  }

  const CartanChart& cartan() const { return vec.cartan(); }

  bool operator==(const GeneralizedSection& o) const {
    return vec == o.vec && form == o.form;
  }
  GeneralizedSection& operator+=(const GeneralizedSection& o) {
    vec += o.vec;
    form += o.form;
    return *this;
  }
  friend GeneralizedSection operator+(GeneralizedSection a, const GeneralizedSection& b) {
    return a += b;
  }
  GeneralizedSection& operator*=(const Rational& s) {
    vec *= s;
    form *= s;
    return *this;
  }
  friend GeneralizedSection operator*(const Rational& s, GeneralizedSection a) { return a *= s; }
  friend GeneralizedSection operator-(GeneralizedSection a, GeneralizedSection b) {
    return a += b *= Rational(-1);
  }

  bool is_zero() const { return vec.is_zero() && form.is_zero(); }
};

inline GeneralizedSection coordinate_vector(const CartanChart& cc, int i) {
  GeneralizedSection s(cc);
  s.vec.set(cc.body.at(i), GradedElement::constant(cc.chart, 1));
  return s;
}

inline GeneralizedSection coordinate_form(const CartanChart& cc, int i) {
  GeneralizedSection s(cc);
  s.form = GradedElement::generator(cc.chart, cc.dsym.at(i));
  return s;
}

// <v+xi, w+eta> = (xi(w) + eta(v)) / 2.
inline GradedElement pairing(const GeneralizedSection& a, const GeneralizedSection& b) {
  GradedElement out = a.vec.contraction()(b.form) + b.vec.contraction()(a.form);
  return out / Rational(2);
}

namespace detail {

inline void require_closed_three_form(const CartanChart& cc, const GradedElement& H) {
  if (H.is_zero()) return;
  require_same_chart(cc.chart, H.chart());
  if (H != H.component(0, 3)) throw std::invalid_argument("twist must be a three-form");
  if (!exterior_d(cc)(H).is_zero()) throw std::invalid_argument("twist form is not closed");
}

}  // namespace detail

// Dorfman bracket (v+xi) o (w+eta) = [v,w] + L_v eta - i_w d xi + i_v i_w H.
inline GeneralizedSection dorfman(const GeneralizedSection& a, const GeneralizedSection& b,
                                  const GradedElement& H) {
  const CartanChart& cc = a.cartan();
  require_same_chart(cc.chart, b.cartan().chart);
  detail::require_closed_three_form(cc, H);
  Derivation d = exterior_d(cc);
  GeneralizedSection out(cc);
  out.vec = differential_bracket(a.vec, b.vec, d);
  out.form = a.vec.lie(d)(b.form) - b.vec.contraction()(d(a.form));
  if (!H.is_zero()) out.form += a.vec.contraction()(b.vec.contraction()(H));
  return out;
}

inline GeneralizedSection dorfman(const GeneralizedSection& a, const GeneralizedSection& b) {
  return dorfman(a, b, GradedElement::zero(a.cartan().chart));
}

// Antisymmetrization of the Dorfman bracket.
inline GeneralizedSection courant(const GeneralizedSection& a, const GeneralizedSection& b,
                                  const GradedElement& H) {
  return Rational(1, 2) * (dorfman(a, b, H) - dorfman(b, a, H));
}

inline GeneralizedSection courant(const GeneralizedSection& a, const GeneralizedSection& b) {
  return courant(a, b, GradedElement::zero(a.cartan().chart));
}

// Endomorphism of T(+)T* in block form (-I, P; Q, tI) with P and Q
// antisymmetric, plus an optional closed twist three-form used by the
// bracket in the integrability test.
class GCStructure {
 public:
  GCStructure(CartanChart cc, SymbolicMatrix blockI, SymbolicMatrix blockP,
              SymbolicMatrix blockQ)
      : cc_(std::move(cc)),
        i_(std::move(blockI)),
        p_(std::move(blockP)),
        q_(std::move(blockQ)),
        twist_(GradedElement::zero(cc_.chart)) {
    int n = dim();
    for (const SymbolicMatrix* m : {&i_, &p_, &q_}) {
      require_same_chart(cc_.chart, m->chart);
      if (m->rows != n || m->cols != n) throw std::invalid_argument("block shape mismatch");
      for (const auto& e : m->a)
        if (!e.is_zero() && e.bidegree() != std::pair{0, 0})
          throw std::invalid_argument("block entries must be functions");
    }
    for (const SymbolicMatrix* m : {&p_, &q_})
      if (!(*m + m->transpose()).is_zero())
        throw std::invalid_argument("P and Q blocks must be antisymmetric");
  }

  const CartanChart& cartan() const { return cc_; }
  int dim() const { return static_cast<int>(cc_.body.size()); }
  const SymbolicMatrix& block_i() const { return i_; }
  const SymbolicMatrix& block_p() const { return p_; }
  const SymbolicMatrix& block_q() const { return q_; }
  const GradedElement& twist() const { return twist_; }

  GCStructure& set_twist(GradedElement H) {
    detail::require_closed_three_form(cc_, H);
    twist_ = std::move(H);
    return *this;
  }

  // The full 2n x 2n matrix acting on columns (v; xi).
  SymbolicMatrix matrix() const {
    int n = dim();
    SymbolicMatrix m(cc_.chart, 2 * n, 2 * n);
    m.paste(0, 0, -i_);
    m.paste(0, n, p_);
    m.paste(n, 0, q_);
    m.paste(n, n, i_.transpose());
    return m;
  }

  GeneralizedSection apply(const GeneralizedSection& s) const {
    require_same_chart(cc_.chart, s.cartan().chart);
    int n = dim();
    std::vector<GradedElement> in;
    for (int j = 0; j < n; ++j) in.push_back(s.vec.component(cc_.body[j]));
    for (int j = 0; j < n; ++j) in.push_back(s.form.derive_left(cc_.dsym[j]));
    GeneralizedSection out(cc_);
    for (int i = 0; i < n; ++i) {
      GradedElement v = GradedElement::zero(cc_.chart);
      GradedElement xi = GradedElement::zero(cc_.chart);
      for (int j = 0; j < n; ++j) {
        v += -i_.at(i, j) * in[j] + p_.at(i, j) * in[n + j];
        xi += q_.at(i, j) * in[j] + i_.at(j, i) * in[n + j];
      }
      out.vec.set(cc_.body[i], v);
      out.form += xi * GradedElement::generator(cc_.chart, cc_.dsym[i]);
    }
    return out;
  }

 private:
  CartanChart cc_;
  SymbolicMatrix i_, p_, q_;
  GradedElement twist_;
};

namespace detail {

inline std::string first_nonzero_entry(const SymbolicMatrix& m) {
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j)
      if (!m.at(i, j).is_zero()) {
        std::ostringstream os;
        os << "entry (" << i << "," << j << ") = " << m.at(i, j).to_string();
        return os.str();
      }
  return {};
}

}  // namespace detail

// The three defining conditions: J^2 = -1, pairing preservation, and the
// Courant-Nijenhuis tensor on the coordinate sections.  Nothing throws;
// failures land in the report together with a sample residual.
inline Report gc_check(const GCStructure& J) {
  Report rep("generalized complex check");
  const CartanChart& cc = J.cartan();
  int n = J.dim();
  SymbolicMatrix big = J.matrix();

  SymbolicMatrix sq = big * big + SymbolicMatrix::identity(cc.chart, 2 * n);
  rep.add("squares to minus one", sq.is_zero(), detail::first_nonzero_entry(sq));

  SymbolicMatrix pair(cc.chart, 2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    pair.at(i, n + i) = GradedElement::constant(cc.chart, Rational(1, 2));
    pair.at(n + i, i) = GradedElement::constant(cc.chart, Rational(1, 2));
  }
  SymbolicMatrix presid = big.transpose() * pair * big - pair;
  rep.add("preserves the pairing", presid.is_zero(), detail::first_nonzero_entry(presid));

  std::vector<GeneralizedSection> frame;
  for (int i = 0; i < n; ++i) frame.push_back(coordinate_vector(cc, i));
  for (int i = 0; i < n; ++i) frame.push_back(coordinate_form(cc, i));
  const GradedElement& H = J.twist();
  int bad = 0;
  std::string sample;
  for (const auto& u : frame)
    for (const auto& v : frame) {
      GeneralizedSection ju = J.apply(u);
      GeneralizedSection jv = J.apply(v);
      GeneralizedSection nij = dorfman(ju, jv, H) - J.apply(dorfman(ju, v, H)) -
                               J.apply(dorfman(u, jv, H)) - dorfman(u, v, H);
      if (!nij.is_zero()) {
        ++bad;
        if (sample.empty())
          sample = nij.form.is_zero() ? nij.vec.components().begin()->second.to_string()
                                      : nij.form.to_string();
      }
    }
  rep.add("integrable", bad == 0,
          bad == 0 ? std::string{}
                   : std::to_string(bad) + " section pairs fail, e.g. residual " + sample);
  return rep;
}

inline GCStructure from_symplectic(const CartanChart& cc, const QMat& omega) {
  int n = static_cast<int>(cc.body.size());
  if (omega.rows != n || omega.cols != n) throw std::invalid_argument("shape mismatch");
  if (!(omega + omega.transpose()).is_zero())
    throw std::invalid_argument("form must be antisymmetric");
  auto inv = inverse(omega);
  if (!inv) throw std::domain_error("form is degenerate");
  return GCStructure(cc, SymbolicMatrix(cc.chart, n, n), SymbolicMatrix::constant(cc.chart, *inv),
                     SymbolicMatrix::constant(cc.chart, -omega));
}

inline GCStructure from_complex(const CartanChart& cc, const QMat& I0) {
  int n = static_cast<int>(cc.body.size());
  if (I0.rows != n || I0.cols != n) throw std::invalid_argument("shape mismatch");
  if (!(I0 * I0 + QMat::identity(n)).is_zero())
    throw std::domain_error("matrix does not square to minus one");
  return GCStructure(cc, SymbolicMatrix::constant(cc.chart, I0), SymbolicMatrix(cc.chart, n, n),
                     SymbolicMatrix(cc.chart, n, n));
}

// The bivector block as a multivector field, with its Jacobi residual.
struct PoissonPart {
  MultivectorChart mc;
  GradedElement bivector;
  Report report;
};

inline PoissonPart poisson_of(const GCStructure& J) {
  const CartanChart& cc = J.cartan();
  std::vector<std::string> names;
  for (int g : cc.body) names.push_back(cc.chart->gen(g).name);
  MultivectorChart mc = make_multivector_chart(names);

  // Body generators keep their names, d-symbols cannot occur in the blocks.
  std::vector<GradedElement> im(cc.chart->size(), GradedElement::zero(mc.chart));
  for (int g : cc.body) im[g] = GradedElement::generator(mc.chart, cc.chart->gen(g).name);

  int n = J.dim();
  GradedElement P = GradedElement::zero(mc.chart);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      P += J.block_p().at(i, j).substituted(im) *
           GradedElement::generator(mc.chart, mc.duals[i]) *
           GradedElement::generator(mc.chart, mc.duals[j]);

  GradedElement resid = schouten(mc, P, P);
  Report rep("poisson decomposition");
  rep.add("bivector satisfies the Jacobi identity", resid.is_zero(),
          resid.is_zero() ? std::string{} : "[P,P] = " + resid.to_string());
  return {std::move(mc), std::move(P), std::move(rep)};
}

// Generalized submanifold: affine S together with a constant two-form on S,
// written in the coordinates of the chosen tangent basis.
struct GeneralizedSubmanifold {
  AffineSubspace space;
  QMat two_form;
};

namespace detail {

inline std::optional<Rational> constant_value(const GradedElement& e) {
  Rational out(0);
  for (const auto& [t, c] : e.terms()) {
    for (auto x : t.exps)
      if (x != 0) return std::nullopt;
    if (t.odd != 0) return std::nullopt;
    out = c;
  }
  return out;
}

inline std::string complex_column(const CMat& m, int j) {
  std::string out = "(";
  for (int i = 0; i < m.rows; ++i) {
    if (i) out += ", ";
    out += to_display(m.at(i, j));
  }
  return out + ")";
}

}  // namespace detail

// tau_S^F = { v + xi : v in TS, xi|_TS = i_v F }, checked for J-invariance.
// On success the (-i)-eigenspace generators L with tau (x) C = L (+) conj(L)
// are listed in the report notes.
inline Report tau_stability(const GCStructure& J, const GeneralizedSubmanifold& sub) {
  const CartanChart& cc = J.cartan();
  int n = J.dim();
  const QMat& V = sub.space.basis;
  const QMat& F = sub.two_form;
  int m = V.cols;
  if (V.rows != n || sub.space.offset.rows != n)
    throw std::invalid_argument("subspace lives in the wrong chart");
  if (F.rows != m || F.cols != m || !(F + F.transpose()).is_zero())
    throw std::invalid_argument("two-form must be antisymmetric on S");
  if (rank(V) != m) throw std::invalid_argument("tangent basis is dependent");

  Report rep("generalized tangent bundle stability");

  // J must not vary along S: restrict every block entry and demand a constant.
  std::vector<int> coord_gens(cc.body.begin(), cc.body.end());
  AffineRestriction R = affine_restriction(cc.chart, coord_gens, sub.space);
  SymbolicMatrix big = J.matrix();
  QMat J0(2 * n, 2 * n);
  bool constant = true;
  for (int i = 0; i < 2 * n && constant; ++i)
    for (int j = 0; j < 2 * n && constant; ++j) {
      auto c = detail::constant_value(big.at(i, j).substituted(R.images));
      if (!c)
        constant = false;
      else
        J0.at(i, j) = *c;
    }
  rep.add("structure constant along the subspace", constant);
  if (!constant) return rep;

  // Basis of tau: tangent columns with a compatible form part, then the
  // annihilator of TS in pure form directions.
  QMat B(2 * n, n);
  QMat Vt = V.transpose();
  for (int l = 0; l < m; ++l) {
    QMat rhs(m, 1);
    for (int k = 0; k < m; ++k) rhs.at(k, 0) = F.at(l, k);
    auto xi = solve(Vt, rhs);
    if (!xi) throw std::logic_error("restriction of the two-form is inconsistent");
    for (int i = 0; i < n; ++i) {
      B.at(i, l) = V.at(i, l);
      B.at(n + i, l) = xi->at(i, 0);
    }
  }
  QMat ann = kernel_basis(Vt);
  for (int a = 0; a < ann.cols; ++a)
    for (int i = 0; i < n; ++i) B.at(n + i, m + a) = ann.at(i, a);

  bool stable = rank(hstack(B, J0 * B)) == n;
  rep.add("stable under the structure", stable);
  if (!stable) return rep;

  // Complexify and intersect with the (-i)-eigenspace.
  CMat Bc = complexify(B);
  CMat Jc = complexify(J0);
  CMat shifted = Jc + GaussianRational::unit() * CMat::identity(2 * n);
  CMat eig = kernel_basis(shifted);
  CMat L = span_intersection(Bc, eig);
  bool split = 2 * L.cols == n && rank(hstack(L, conj(L))) == n;
  rep.add("splits into conjugate algebroid halves", split);
  for (int j = 0; j < L.cols; ++j)
    rep.note("L" + std::to_string(j + 1), detail::complex_column(L, j));
  return rep;
}

}  // namespace gcgeo
