#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gcgeo/calculus.hpp"
#include "gcgeo/linalg.hpp"
#include "gcgeo/report.hpp"

namespace gcgeo {

// Matrix with polynomial entries on a chart.
struct SymbolicMatrix {
  ChartPtr chart;
  int rows = 0;
  int cols = 0;
  std::vector<GradedElement> a;

  SymbolicMatrix() = default;
  SymbolicMatrix(ChartPtr c, int r, int cl)
      : chart(std::move(c)), rows(r), cols(cl),
        a(static_cast<std::size_t>(r) * cl, GradedElement::zero(chart)) {}

  static SymbolicMatrix constant(const ChartPtr& c, const QMat& m) {
    SymbolicMatrix s(c, m.rows, m.cols);
    for (int i = 0; i < m.rows; ++i)
      for (int j = 0; j < m.cols; ++j) s.at(i, j) = GradedElement::constant(c, m.at(i, j));
    return s;
  }

  GradedElement& at(int i, int j) { return a.at(static_cast<std::size_t>(i) * cols + j); }
  const GradedElement& at(int i, int j) const {
    return a.at(static_cast<std::size_t>(i) * cols + j);
  }

  bool is_zero() const {
    for (const auto& e : a)
      if (!e.is_zero()) return false;
    return true;
  }

  QMat evaluate(const std::vector<Rational>& point) const {
    QMat m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m.at(i, j) = at(i, j).evaluate(point);
    return m;
  }

  static SymbolicMatrix identity(const ChartPtr& c, int n) {
    return constant(c, QMat::identity(n));
  }

  SymbolicMatrix transpose() const {
    SymbolicMatrix t(chart, cols, rows);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) t.at(j, i) = at(i, j);
    return t;
  }

  SymbolicMatrix operator-() const {
    SymbolicMatrix m = *this;
    for (auto& e : m.a) e = -e;
    return m;
  }
  friend SymbolicMatrix operator+(SymbolicMatrix x, const SymbolicMatrix& y) {
    if (x.rows != y.rows || x.cols != y.cols) throw std::invalid_argument("shape mismatch");
    for (std::size_t k = 0; k < x.a.size(); ++k) x.a[k] += y.a[k];
    return x;
  }
  friend SymbolicMatrix operator-(const SymbolicMatrix& x, const SymbolicMatrix& y) {
    return x + (-y);
  }
  friend SymbolicMatrix operator*(const SymbolicMatrix& x, const SymbolicMatrix& y) {
    if (x.cols != y.rows) throw std::invalid_argument("shape mismatch");
    SymbolicMatrix m(x.chart, x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
      for (int k = 0; k < x.cols; ++k) {
        if (x.at(i, k).is_zero()) continue;
        for (int j = 0; j < y.cols; ++j) m.at(i, j) += x.at(i, k) * y.at(k, j);
      }
    return m;
  }
  void paste(int i0, int j0, const SymbolicMatrix& m) {
    for (int i = 0; i < m.rows; ++i)
      for (int j = 0; j < m.cols; ++j) at(i0 + i, j0 + j) = m.at(i, j);
  }
  bool operator==(const SymbolicMatrix& o) const {
    return rows == o.rows && cols == o.cols && a == o.a;
  }
};

// Lie algebroid over an affine chart, presented by a frame: anchor rows
// rho(e_a) = sum_i anchor(a,i) d/dx^i and brackets [e_i,e_j] = c^k_{ij} e_k.
class LieAlgebroid {
 public:
  LieAlgebroid(ChartPtr base, std::vector<std::string> frame)
      : base_(std::move(base)), frame_(std::move(frame)),
        anchor_(base_, static_cast<int>(frame_.size()), base_->size()) {
    for (const auto& g : base_->gens())
      if (g.degree() != 0)
        throw std::invalid_argument("algebroid base must be an ordinary chart");
    c_.assign(static_cast<std::size_t>(rank()) * rank() * rank(),
              GradedElement::zero(base_));
  }

  const ChartPtr& base() const { return base_; }
  int rank() const { return static_cast<int>(frame_.size()); }
  int dim() const { return base_->size(); }
  const std::vector<std::string>& frame() const { return frame_; }
  const SymbolicMatrix& anchor_matrix() const { return anchor_; }

  void set_anchor(int a, int i, GradedElement f) { anchor_.at(a, i) = std::move(f); }
  const GradedElement& anchor(int a, int i) const { return anchor_.at(a, i); }

  void set_bracket(int i, int j, int k, const GradedElement& f) {
    if (i == j && !f.is_zero())
      throw std::invalid_argument("bracket of a frame section with itself");
    c_mut(i, j, k) = f;
    c_mut(j, i, k) = -f;
  }
  const GradedElement& c(int i, int j, int k) const {
    return c_.at((static_cast<std::size_t>(i) * rank() + j) * rank() + k);
  }

  // rho(e_a) applied to a function, on any chart containing the base coords.
  GradedElement anchor_derive(int a, const GradedElement& f) const {
    const ChartPtr& W = f.chart();
    GradedElement out = GradedElement::zero(W);
    for (int i = 0; i < dim(); ++i) {
      int xi = W->index(base_->gen(i).name);
      out += anchor(a, i).embedded(W) * f.derive_left(xi);
    }
    return out;
  }

 private:
  GradedElement& c_mut(int i, int j, int k) {
    return c_.at((static_cast<std::size_t>(i) * rank() + j) * rank() + k);
  }

  ChartPtr base_;
  std::vector<std::string> frame_;
  SymbolicMatrix anchor_;
  std::vector<GradedElement> c_;
};

inline LieAlgebroid tangent_algebroid(const ChartPtr& base) {
  std::vector<std::string> frame;
  for (const auto& g : base->gens()) frame.push_back("e_" + g.name);
  LieAlgebroid A(base, frame);
  for (int i = 0; i < base->size(); ++i)
    A.set_anchor(i, i, GradedElement::constant(base, 1));
  return A;
}

inline LieAlgebroid abelian_algebroid(const ChartPtr& base, int rank) {
  std::vector<std::string> frame;
  for (int a = 1; a <= rank; ++a) frame.push_back("e" + std::to_string(a));
  return LieAlgebroid(base, frame);
}

// Bracket of general sections s = sum_a f[a] e_a, t = sum_b g[b] e_b with
// coefficients on a chart extending the base:
//   [s,t]^k = f^a g^b c^k_{ab} + rho(s)(g^k) - rho(t)(f^k).
inline std::vector<GradedElement> bracket_sections(const LieAlgebroid& A,
                                                   const std::vector<GradedElement>& f,
                                                   const std::vector<GradedElement>& g) {
  int r = A.rank();
  if (static_cast<int>(f.size()) != r || static_cast<int>(g.size()) != r)
    throw std::invalid_argument("section size mismatch");
  const ChartPtr& W = f.at(0).chart();
  std::vector<GradedElement> out(r, GradedElement::zero(W));
  for (int k = 0; k < r; ++k) {
    for (int a = 0; a < r; ++a)
      for (int b = 0; b < r; ++b) {
        const auto& cab = A.c(a, b, k);
        if (!cab.is_zero()) out[k] += f[a] * g[b] * cab.embedded(W);
      }
    for (int a = 0; a < r; ++a) {
      out[k] += f[a] * A.anchor_derive(a, g[k]);
      out[k] -= g[a] * A.anchor_derive(a, f[k]);
    }
  }
  return out;
}

namespace detail {

inline std::string fresh_name(const ChartPtr& chart, const std::string& stem) {
  if (chart->find(stem) < 0) return stem;
  for (int n = 0;; ++n) {
    std::string candidate = stem + "_" + std::to_string(n);
    if (chart->find(candidate) < 0) return candidate;
  }
}

// Affine function with fresh symbolic coefficients appended to the chart.
struct SymbolicAffine {
  ChartPtr chart;
  GradedElement value;
};

inline SymbolicAffine symbolic_affine(const ChartPtr& base, const ChartPtr& onto,
                                      const std::string& stem) {
  std::vector<Generator> extra;
  for (int i = 0; i <= base->size(); ++i)
    extra.push_back({fresh_name(onto, stem + std::to_string(i)), 0, 0});
  ChartPtr W = onto->extended(extra);
  GradedElement f = GradedElement::generator(W, extra[0].name);
  for (int i = 0; i < base->size(); ++i)
    f += GradedElement::generator(W, extra[i + 1].name) *
         GradedElement::generator(W, base->gen(i).name);
  return {W, f};
}

}  // namespace detail

// Anchor compatibility, Leibniz rule, and the Jacobi identity, checked
// symbolically: frame sections carry affine coefficient functions with
// fresh symbolic coefficients, so derivative terms cannot cancel by accident.
inline Report check_axioms(const LieAlgebroid& A) {
  Report rep("algebroid axioms");
  int r = A.rank();
  const ChartPtr& B = A.base();

  bool ok = true;
  std::string detail;
  for (int i = 0; i < r && ok; ++i)
    for (int j = 0; j < r && ok; ++j)
      for (int m = 0; m < r && ok; ++m)
        if (!(A.c(i, j, m) + A.c(j, i, m)).is_zero()) {
          ok = false;
          detail = "c[" + std::to_string(i) + "][" + std::to_string(j) + "] not antisymmetric";
        }
  rep.add("bracket antisymmetry", ok, detail);

  // rho([e_i,e_j]) = [rho e_i, rho e_j] as vector fields
  ok = true;
  detail.clear();
  for (int i = 0; i < r; ++i)
    for (int j = i + 1; j < r; ++j)
      for (int m = 0; m < A.dim(); ++m) {
        GradedElement res = GradedElement::zero(B);
        for (int k = 0; k < r; ++k) res += A.c(i, j, k) * A.anchor(k, m);
        res -= A.anchor_derive(i, A.anchor(j, m).embedded(B));
        res += A.anchor_derive(j, A.anchor(i, m).embedded(B));
        if (!res.is_zero() && ok) {
          ok = false;
          detail = "residual at frames (" + std::to_string(i) + "," + std::to_string(j) +
                   ") component " + std::to_string(m) + ": " + res.to_string();
        }
      }
  rep.add("anchor is a bracket morphism", ok, detail);

  // [e_i, f e_j] = f [e_i, e_j] + rho(e_i)(f) e_j with symbolic affine f
  ok = true;
  detail.clear();
  {
    auto [W, f] = detail::symbolic_affine(B, B, "u");
    for (int i = 0; i < r && ok; ++i)
      for (int j = 0; j < r && ok; ++j) {
        std::vector<GradedElement> ei(r, GradedElement::zero(W)),
            fej(r, GradedElement::zero(W));
        ei[i] = GradedElement::constant(W, 1);
        fej[j] = f;
        auto lhs = bracket_sections(A, ei, fej);
        for (int k = 0; k < r; ++k) {
          GradedElement rhs = f * A.c(i, j, k).embedded(W);
          if (k == j) rhs += A.anchor_derive(i, f);
          if (!(lhs[k] - rhs).is_zero()) {
            ok = false;
            detail = "residual at (" + std::to_string(i) + "," + std::to_string(j) + ")";
          }
        }
      }
  }
  rep.add("Leibniz rule", ok, detail);

  // Jacobi identity on sections f e_i, g e_j, h e_k
  ok = true;
  detail.clear();
  {
    auto s1 = detail::symbolic_affine(B, B, "u");
    auto s2 = detail::symbolic_affine(B, s1.chart, "v");
    auto s3 = detail::symbolic_affine(B, s2.chart, "w");
    ChartPtr W = s3.chart;
    GradedElement f = s1.value.embedded(W), g = s2.value.embedded(W), h = s3.value;
    for (int i = 0; i < r && ok; ++i)
      for (int j = i; j < r && ok; ++j)
        for (int k = j; k < r && ok; ++k) {
          std::vector<GradedElement> si(r, GradedElement::zero(W)),
              sj(r, GradedElement::zero(W)), sk(r, GradedElement::zero(W));
          si[i] = f;
          sj[j] = g;
          sk[k] = h;
          auto t1 = bracket_sections(A, si, bracket_sections(A, sj, sk));
          auto t2 = bracket_sections(A, sj, bracket_sections(A, sk, si));
          auto t3 = bracket_sections(A, sk, bracket_sections(A, si, sj));
          for (int m = 0; m < r; ++m)
            if (!(t1[m] + t2[m] + t3[m]).is_zero()) {
              ok = false;
              detail = "Jacobiator at frames (" + std::to_string(i) + "," +
                       std::to_string(j) + "," + std::to_string(k) + ") component " +
                       std::to_string(m) + ": " +
                       (t1[m] + t2[m] + t3[m]).to_string();
              break;
            }
        }
  }
  rep.add("Jacobi identity", ok, detail);
  return rep;
}

// --- Poisson structures -----------------------------------------------------

// Component functions P^{ab} of a bivector on a multivector chart.
inline SymbolicMatrix bivector_components(const MultivectorChart& mc,
                                          const GradedElement& P) {
  int n = static_cast<int>(mc.coords.size());
  SymbolicMatrix out(mc.chart, n, n);
  for (int a = 0; a < n; ++a) {
    GradedElement qa = P.derive_left(mc.duals[a]);
    for (int b = 0; b < n; ++b) out.at(a, b) = qa.derive_left(mc.duals[b]);
  }
  return out;
}

inline bool is_poisson(const MultivectorChart& mc, const GradedElement& P) {
  return schouten(mc, P, P).is_zero();
}

inline ChartPtr coordinate_chart(const MultivectorChart& mc) {
  std::vector<Generator> gens;
  for (int i : mc.coords) gens.push_back(mc.chart->gen(i));
  return Chart::make(std::move(gens));
}

// Algebroid on the coordinate one-form frame of a Poisson bivector:
// anchor rho(dx^a) = iota^L_{dx^a} P (so rho^j_a = P^{aj}) and
// [dx^a, dx^b] = d(P^{ab}), i.e. c^k_{ab} = d/dx^k P^{ab}.
inline LieAlgebroid poisson_algebroid(const MultivectorChart& mc, const GradedElement& P) {
  if (!is_poisson(mc, P))
    throw std::domain_error("bivector does not satisfy the Jacobi identity");
  ChartPtr base = coordinate_chart(mc);
  int n = base->size();
  std::vector<GradedElement> to_base;
  for (const auto& g : mc.chart->gens())
    to_base.push_back(g.odd() ? GradedElement::zero(base)
                              : GradedElement::generator(base, g.name));
  auto restrict = [&](const GradedElement& f) { return f.substituted(to_base); };

  std::vector<std::string> frame;
  for (const auto& g : base->gens()) frame.push_back("d" + g.name);
  LieAlgebroid A(base, frame);

  SymbolicMatrix comp = bivector_components(mc, P);
  for (int a = 0; a < n; ++a)
    for (int j = 0; j < n; ++j) A.set_anchor(a, j, restrict(comp.at(a, j)));
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      GradedElement pab = restrict(comp.at(a, b));
      for (int k = 0; k < n; ++k) A.set_bracket(a, b, k, pab.derive_left(k));
    }
  return A;
}

// --- Affine subspaces and conormal algebroids -------------------------------

struct AffineSubspace {
  QMat basis;   // n x m, columns span the tangent directions
  QMat offset;  // n x 1
};

// Substitution x = offset + basis * t onto a fresh chart with coordinates
// t^j; generators other than the listed coordinates are sent to zero.
struct AffineRestriction {
  ChartPtr tchart;
  std::vector<GradedElement> images;  // per generator of the ambient chart
};

inline AffineRestriction affine_restriction(const ChartPtr& ambient,
                                            const std::vector<int>& coord_gens,
                                            const AffineSubspace& S) {
  int m = S.basis.cols;
  std::vector<Generator> tg;
  for (int j = 1; j <= m; ++j) tg.push_back({"t" + std::to_string(j), 0, 0});
  AffineRestriction R;
  R.tchart = Chart::make(std::move(tg));
  R.images.assign(ambient->size(), GradedElement::zero(R.tchart));
  for (std::size_t i = 0; i < coord_gens.size(); ++i) {
    GradedElement img = GradedElement::constant(R.tchart, S.offset.at(static_cast<int>(i), 0));
    for (int j = 0; j < m; ++j)
      img += GradedElement::constant(R.tchart, S.basis.at(static_cast<int>(i), j)) *
             GradedElement::generator(R.tchart, j);
    R.images[coord_gens[i]] = std::move(img);
  }
  return R;
}

// Writes a symbolic vector as a combination of constant basis columns;
// fails when some coefficient vector leaves the span.
inline std::optional<std::vector<GradedElement>> in_constant_span(
    const std::vector<GradedElement>& u, const QMat& B) {
  if (static_cast<int>(u.size()) != B.rows || u.empty())
    throw std::invalid_argument("shape mismatch");
  ChartPtr W = u.front().chart();
  std::map<Term, QMat> per_term;
  for (int i = 0; i < B.rows; ++i)
    for (const auto& [t, c] : u[i].terms()) {
      auto [it, fresh] = per_term.try_emplace(t, QMat::zero(B.rows, 1));
      it->second.at(i, 0) = c;
    }
  std::vector<GradedElement> out(B.cols, GradedElement::zero(W));
  for (const auto& [t, vec] : per_term) {
    auto x = solve(B, vec);
    if (!x) return std::nullopt;
    for (int j = 0; j < B.cols; ++j) {
      GradedElement mono(W);
      mono.add_term(t, x->at(j, 0));
      out[j] += mono;
    }
  }
  return out;
}

// rho(w) restricted to S, for every conormal basis covector w; nullopt entry
// marks a direction leaving TS.
inline bool is_coisotropic(const MultivectorChart& mc, const GradedElement& P,
                           const AffineSubspace& S) {
  ChartPtr base = coordinate_chart(mc);
  int n = base->size();
  if (S.basis.rows != n || S.offset.rows != n)
    throw std::invalid_argument("subspace dimension mismatch");
  SymbolicMatrix comp = bivector_components(mc, P);
  QMat W = kernel_basis(S.basis.transpose());
  AffineRestriction R = affine_restriction(mc.chart, mc.coords, S);
  for (int w = 0; w < W.cols; ++w) {
    std::vector<GradedElement> u;
    for (int j = 0; j < n; ++j) {
      GradedElement uj = GradedElement::zero(mc.chart);
      for (int a = 0; a < n; ++a)
        uj += GradedElement::constant(mc.chart, W.at(a, w)) * comp.at(a, j);
      u.push_back(uj.substituted(R.images));
    }
    if (!in_constant_span(u, S.basis)) return false;
  }
  return true;
}

// Conormal algebroid of a coisotropic affine subspace: frame = basis of
// Ann(TS), anchor = rho|_S written in the tangent basis, bracket from
// [w1, w2] = d(w1^T P w2) restricted to S.
inline LieAlgebroid conormal_algebroid(const MultivectorChart& mc, const GradedElement& P,
                                       const AffineSubspace& S) {
  if (!is_coisotropic(mc, P, S))
    throw std::domain_error("subspace is not coisotropic for this bivector");
  ChartPtr base = coordinate_chart(mc);
  int n = base->size();
  SymbolicMatrix comp = bivector_components(mc, P);
  QMat W = kernel_basis(S.basis.transpose());
  AffineRestriction R = affine_restriction(mc.chart, mc.coords, S);

  std::vector<std::string> frame;
  for (int w = 1; w <= W.cols; ++w) frame.push_back("w" + std::to_string(w));
  LieAlgebroid A(R.tchart, frame);

  for (int w = 0; w < W.cols; ++w) {
    std::vector<GradedElement> u;
    for (int j = 0; j < n; ++j) {
      GradedElement uj = GradedElement::zero(mc.chart);
      for (int a = 0; a < n; ++a)
        uj += GradedElement::constant(mc.chart, W.at(a, w)) * comp.at(a, j);
      u.push_back(uj.substituted(R.images));
    }
    auto rho = in_constant_span(u, S.basis);
    for (int j = 0; j < S.basis.cols; ++j) A.set_anchor(w, j, (*rho)[j]);
  }

  for (int alpha = 0; alpha < W.cols; ++alpha)
    for (int beta = alpha + 1; beta < W.cols; ++beta) {
      GradedElement h = GradedElement::zero(mc.chart);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          h += GradedElement::constant(mc.chart, W.at(a, alpha) * W.at(b, beta)) *
               comp.at(a, b);
      std::vector<GradedElement> grad;
      for (int k = 0; k < n; ++k)
        grad.push_back(h.derive_left(mc.coords[k]).substituted(R.images));
      auto coeffs = in_constant_span(grad, W);
      if (!coeffs)
        throw std::logic_error("conormal bracket left the conormal span");
      for (int g = 0; g < W.cols; ++g) A.set_bracket(alpha, beta, g, (*coeffs)[g]);
    }
  return A;
}

// --- Chevalley–Eilenberg ----------------------------------------------------

struct CEModel {
  ChartPtr chart;
  std::vector<int> coords;
  std::vector<int> fibers;
};

inline CEModel ce_model(const LieAlgebroid& A) {
  std::vector<Generator> gens = A.base()->gens();
  for (int a = 1; a <= A.rank(); ++a) gens.push_back({"xi" + std::to_string(a), 1, 0});
  CEModel m;
  m.chart = Chart::make(std::move(gens));
  for (int i = 0; i < A.dim(); ++i) m.coords.push_back(i);
  for (int a = 0; a < A.rank(); ++a) m.fibers.push_back(A.dim() + a);
  return m;
}

// delta = xi^a rho^i_a d/dx^i - 1/2 xi^a xi^b c^k_{ab} d/dxi^k
inline Derivation ce_derivation(const LieAlgebroid& A, const CEModel& m) {
  Derivation delta(m.chart, 1);
  for (int i = 0; i < A.dim(); ++i) {
    GradedElement v = GradedElement::zero(m.chart);
    for (int a = 0; a < A.rank(); ++a)
      v += GradedElement::generator(m.chart, m.fibers[a]) *
           A.anchor(a, i).embedded(m.chart);
    delta.set(m.coords[i], v);
  }
  for (int k = 0; k < A.rank(); ++k) {
    GradedElement v = GradedElement::zero(m.chart);
    for (int a = 0; a < A.rank(); ++a)
      for (int b = 0; b < A.rank(); ++b)
        v += GradedElement::generator(m.chart, m.fibers[a]) *
             GradedElement::generator(m.chart, m.fibers[b]) *
             A.c(a, b, k).embedded(m.chart);
    delta.set(m.fibers[k], v * rat(-1, 2));
  }
  return delta;
}

inline Derivation ce_derivation(const LieAlgebroid& A) { return ce_derivation(A, ce_model(A)); }

}  // namespace gcgeo
