#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gcgeo/algebroid.hpp"
#include "gcgeo/complexes.hpp"
#include "gcgeo/report.hpp"
#include "gcgeo/rng.hpp"

namespace gcgeo {

// --- Complexes with function entries ----------------------------------------

// Bounded cochain complex whose differentials have polynomial entries over an
// ordinary chart; evaluating at a point yields a LinearComplex over Q.
struct SymbolicComplex {
  ChartPtr base;
  std::map<int, int> dims;
  std::map<int, SymbolicMatrix> diffs;

  int dim(int k) const {
    auto it = dims.find(k);
    return it == dims.end() ? 0 : it->second;
  }

  SymbolicComplex& set_dim(int k, int n) {
    if (n < 0) throw std::invalid_argument("negative dimension");
    if (n == 0)
      dims.erase(k);
    else
      dims[k] = n;
    return *this;
  }
  SymbolicComplex& set_diff(int k, SymbolicMatrix m) {
    if (m.rows != dim(k + 1) || m.cols != dim(k))
      throw std::invalid_argument("differential shape mismatch");
    diffs.insert_or_assign(k, std::move(m));
    return *this;
  }

  int min_degree() const { return dims.empty() ? 0 : dims.begin()->first; }
  int max_degree() const { return dims.empty() ? 0 : dims.rbegin()->first; }
};

struct SymbolicChainMap {
  SymbolicComplex source;
  SymbolicComplex target;
  std::map<int, SymbolicMatrix> comps;

  SymbolicChainMap& set_comp(int k, SymbolicMatrix m) {
    if (m.rows != target.dim(k) || m.cols != source.dim(k))
      throw std::invalid_argument("component shape mismatch");
    comps.insert_or_assign(k, std::move(m));
    return *this;
  }
};

namespace detail {

inline QMat evaluated(const SymbolicMatrix& m, const std::vector<Rational>& point) {
  QMat out(m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) out.at(i, j) = m.at(i, j).evaluate(point);
  return out;
}

inline int polynomial_degree(const GradedElement& e) {
  int deg = 0;
  for (const auto& [t, c] : e.terms()) {
    int d = 0;
    for (int x : t.exps) d += x;
    if (d > deg) deg = d;
  }
  return deg;
}

inline int entry_degree_bound(const SymbolicMatrix& m) {
  int deg = 0;
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) {
      int d = polynomial_degree(m.at(i, j));
      if (d > deg) deg = d;
    }
  return deg;
}

}  // namespace detail

inline LinearComplex<Rational> evaluated(const SymbolicComplex& C,
                                         const std::vector<Rational>& point) {
  LinearComplex<Rational> out;
  for (const auto& [k, n] : C.dims) out.set_dim(k, n);
  for (const auto& [k, m] : C.diffs) out.set_diff(k, detail::evaluated(m, point));
  return out;
}

inline ChainMap<Rational> evaluated(const SymbolicChainMap& f,
                                    const std::vector<Rational>& point) {
  ChainMap<Rational> out{evaluated(f.source, point), evaluated(f.target, point), {}};
  for (const auto& [k, m] : f.comps) out.set_comp(k, detail::evaluated(m, point));
  return out;
}

// --- Fiberwise certification -------------------------------------------------

// Deterministic pseudo-random rational sample points for a chart.
struct SampleScheme {
  std::uint64_t seed = 1;
  int samples = 5;
  bool constant_rank = true;  // caller asserts the relevant ranks do not jump
};

inline std::vector<Rational> sample_point(const ChartPtr& base, Rng& rng) {
  std::vector<Rational> p;
  for (int i = 0; i < base->even_count(); ++i) p.push_back(rng.rational(-9, 9, 4));
  return p;
}

// Evaluates the map at sampled points of the base and certifies that every
// fiber is a quasi-isomorphism.  Sound on the locus where the ranks of the
// differentials and of the map are constant; the entry degree bound is
// recorded so verdict stability under extra samples can be judged.
inline Report certify_quasi_iso(std::string title, const SymbolicChainMap& f,
                                const SampleScheme& scheme = {}) {
  Report rep(std::move(title));
  int degree_bound = 0;
  for (const auto& [k, m] : f.source.diffs) degree_bound = std::max(degree_bound, detail::entry_degree_bound(m));
  for (const auto& [k, m] : f.target.diffs) degree_bound = std::max(degree_bound, detail::entry_degree_bound(m));
  for (const auto& [k, m] : f.comps) degree_bound = std::max(degree_bound, detail::entry_degree_bound(m));

  Rng rng(scheme.seed);
  bool chain = true, qi = true;
  std::string chain_detail, qi_detail;
  for (int s = 0; s < scheme.samples; ++s) {
    std::vector<Rational> p = sample_point(f.source.base, rng);
    ChainMap<Rational> fp = evaluated(f, p);
    try {
      fp.check();
    } catch (const std::logic_error& err) {
      if (chain) chain_detail = "sample " + std::to_string(s) + ": " + err.what();
      chain = false;
      continue;
    }
    if (!quasi_iso(fp)) {
      if (qi) qi_detail = "cone has cohomology at sample " + std::to_string(s);
      qi = false;
    }
  }
  rep.add("chain map at every sample", chain, chain_detail);
  rep.add("quasi-isomorphism at every sample", chain && qi, qi_detail);
  rep.note("samples", std::to_string(scheme.samples));
  rep.note("seed", std::to_string(scheme.seed));
  rep.note("entry degree bound", std::to_string(degree_bound));
  rep.note("ranks declared constant", scheme.constant_rank ? "yes" : "no");
  return rep;
}

// --- Tangent complex of a quotient model -------------------------------------

// E^{-1} = A --anchor--> E^0 = T_X, the two-term tangent of [X/A].
struct TwoTermComplex {
  ChartPtr base;
  int rank_m1 = 0;
  int rank_0 = 0;
  SymbolicMatrix d;  // rank_0 x rank_m1

  TwoTermComplex(ChartPtr b, int rm1, int r0)
      : base(std::move(b)), rank_m1(rm1), rank_0(r0), d(base, r0, rm1) {}
};

inline TwoTermComplex tangent_complex(const LieAlgebroid& A) {
  TwoTermComplex T(A.base(), A.rank(), A.dim());
  for (int i = 0; i < A.dim(); ++i)
    for (int a = 0; a < A.rank(); ++a) T.d.at(i, a) = A.anchor(a, i);
  return T;
}

inline SymbolicComplex to_complex(const TwoTermComplex& T) {
  SymbolicComplex C;
  C.base = T.base;
  C.set_dim(-1, T.rank_m1).set_dim(0, T.rank_0);
  if (T.rank_m1 > 0 && T.rank_0 > 0) C.set_diff(-1, T.d);
  return C;
}

// --- The canonical one-shifted pairing ---------------------------------------

// Chart of [X/A] together with both differentials of its form bicomplex:
// base coordinates x, odd fiber coordinates xi, their de Rham partners, the
// de Rham differential d and the internal differential extended by
// delta(dg) = -d(delta g) so that the two anticommute.
struct QuotientFormModel {
  ChartPtr W;
  std::vector<int> x, xi, dx, dxi;
  Derivation d;
  Derivation delta;
};

inline QuotientFormModel quotient_form_model(const LieAlgebroid& A) {
  int n = A.dim(), r = A.rank();
  std::vector<Generator> gens;
  for (const auto& g : A.base()->gens()) gens.push_back(g);
  for (int a = 1; a <= r; ++a) gens.push_back({"xi" + std::to_string(a), 1, 0});
  for (const auto& g : A.base()->gens()) gens.push_back({"d" + g.name, 0, 1});
  for (int a = 1; a <= r; ++a) gens.push_back({"dxi" + std::to_string(a), 1, 1});
  ChartPtr W = Chart::make(std::move(gens));

  QuotientFormModel M{W, {}, {}, {}, {}, Derivation(W, 1), Derivation(W, 1)};
  for (int i = 0; i < n; ++i) M.x.push_back(i);
  for (int a = 0; a < r; ++a) M.xi.push_back(n + a);
  for (int i = 0; i < n; ++i) M.dx.push_back(n + r + i);
  for (int a = 0; a < r; ++a) M.dxi.push_back(2 * n + r + a);

  for (int i = 0; i < n; ++i) M.d.set(M.x[i], GradedElement::generator(W, M.dx[i]));
  for (int a = 0; a < r; ++a) M.d.set(M.xi[a], GradedElement::generator(W, M.dxi[a]));

  for (int i = 0; i < n; ++i) {
    GradedElement v = GradedElement::zero(W);
    for (int a = 0; a < r; ++a)
      v += GradedElement::generator(W, M.xi[a]) * A.anchor(a, i).embedded(W);
    M.delta.set(M.x[i], v);
  }
  for (int k = 0; k < r; ++k) {
    GradedElement v = GradedElement::zero(W);
    for (int a = 0; a < r; ++a)
      for (int b = 0; b < r; ++b)
        v += GradedElement::generator(W, M.xi[a]) * GradedElement::generator(W, M.xi[b]) *
             A.c(a, b, k).embedded(W);
    M.delta.set(M.xi[k], v * rat(-1, 2));
  }
  for (int i = 0; i < n; ++i) M.delta.set(M.dx[i], -M.d(M.delta.value(M.x[i])));
  for (int a = 0; a < r; ++a) M.delta.set(M.dxi[a], -M.d(M.delta.value(M.xi[a])));
  return M;
}

// omega_0 = sigma_{ia} dxi^a dx^i for a pairing symbol sigma : A -> T^v_X.
inline GradedElement pairing_form(const QuotientFormModel& M, const SymbolicMatrix& symbol) {
  GradedElement out = GradedElement::zero(M.W);
  for (int i = 0; i < static_cast<int>(M.dx.size()); ++i)
    for (int a = 0; a < static_cast<int>(M.dxi.size()); ++a) {
      const GradedElement& s = symbol.at(i, a);
      if (s.is_zero()) continue;
      out += s.embedded(M.W) * GradedElement::generator(M.W, M.dxi[a]) *
             GradedElement::generator(M.W, M.dx[i]);
    }
  return out;
}

// A pairing datum for the two-term tangent: the degree-(-1) block sends
// E^{-1} into (E^0)^v, the degree-0 block is forced to be minus its
// transpose.  Closure of the corresponding form is recorded at construction.
struct ShiftedTwoForm {
  int shift;
  SymbolicMatrix symbol;  // rank_0 x rank_m1
  Report closure;

  ShiftedTwoForm(int n, SymbolicMatrix s) : shift(n), symbol(std::move(s)), closure("closure") {}
};

namespace detail {

inline bool poisson_shaped(const LieAlgebroid& A) {
  if (A.rank() != A.dim()) return false;
  int n = A.dim();
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < n; ++i)
      if (!(A.anchor(a, i) + A.anchor(i, a)).is_zero()) return false;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int k = 0; k < n; ++k)
        if (!(A.c(a, b, k) - A.anchor(a, b).derive_left(k)).is_zero()) return false;
  return true;
}

}  // namespace detail

// The tautological pairing on [X/T^v_X] for a Poisson structure: symbol the
// identity A = T^v_X, higher terms zero.  Closure holds in the form model
// exactly because the anchor and brackets come from a Poisson bivector.
inline ShiftedTwoForm canonical_one_shifted(const LieAlgebroid& A) {
  if (!detail::poisson_shaped(A))
    throw std::domain_error("algebroid is not a Poisson quotient model");
  ShiftedTwoForm omega(1, SymbolicMatrix::identity(A.base(), A.dim()));
  QuotientFormModel M = quotient_form_model(A);
  GradedElement w0 = pairing_form(M, omega.symbol);
  omega.closure.add("de Rham differential kills the pairing form", M.d(w0).is_zero());
  omega.closure.add("internal differential kills the pairing form", M.delta(w0).is_zero());
  return omega;
}

// --- Nondegeneracy of the pairing --------------------------------------------

// T^v[shift] of a two-term complex, together with the flat map
// (sigma, -sigma^T) induced by the pairing datum.
inline SymbolicChainMap flat_map(const ShiftedTwoForm& omega, const TwoTermComplex& T) {
  if (omega.shift != 1) throw std::invalid_argument("two-term flat map needs shift 1");
  if (omega.symbol.rows != T.rank_0 || omega.symbol.cols != T.rank_m1)
    throw std::invalid_argument("pairing symbol shape mismatch");
  SymbolicComplex dual;
  dual.base = T.base;
  dual.set_dim(-1, T.rank_0).set_dim(0, T.rank_m1);
  if (T.rank_0 > 0 && T.rank_m1 > 0) dual.set_diff(-1, T.d.transpose());
  SymbolicChainMap f{to_complex(T), dual, {}};
  f.set_comp(-1, omega.symbol);
  f.set_comp(0, -omega.symbol.transpose());
  return f;
}

inline Report check_nondegenerate(const ShiftedTwoForm& omega, const TwoTermComplex& T,
                                  const SampleScheme& scheme = {}) {
  SymbolicChainMap f = flat_map(omega, T);
  Report rep("nondegeneracy");
  SymbolicMatrix lhs = T.d.transpose() * omega.symbol;
  SymbolicMatrix rhs = -(omega.symbol.transpose() * T.d);
  rep.add("flat map commutes with the differentials", lhs == rhs);
  rep.absorb(certify_quasi_iso("fiberwise", f, scheme));
  return rep;
}

// --- The atlas as a Lagrangian ------------------------------------------------

// Relative tangent of X -> [X/A]: T_X (+) A --(1, -anchor)--> T_X in
// degrees 0 and 1.
inline SymbolicComplex relative_tangent(const LieAlgebroid& A) {
  int n = A.dim(), r = A.rank();
  SymbolicComplex C;
  C.base = A.base();
  C.set_dim(0, n + r).set_dim(1, n);
  SymbolicMatrix d(A.base(), n, n + r);
  d.paste(0, 0, SymbolicMatrix::identity(A.base(), n));
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < r; ++a) d.at(i, n + a) = -A.anchor(a, i);
  C.set_diff(0, std::move(d));
  return C;
}

// With vanishing isotropic structure the comparison map is the canonical
// null-homotopy of the composite followed by the pairing: zero on the
// tangent directions and the symbol on the fiber directions.
inline SymbolicChainMap atlas_comparison_map(const LieAlgebroid& A, const ShiftedTwoForm& omega) {
  if (omega.symbol.rows != A.dim() || omega.symbol.cols != A.rank())
    throw std::invalid_argument("pairing symbol shape mismatch");
  SymbolicComplex target;
  target.base = A.base();
  target.set_dim(0, A.dim());
  SymbolicChainMap f{relative_tangent(A), target, {}};
  SymbolicMatrix c(A.base(), A.dim(), A.dim() + A.rank());
  c.paste(0, A.dim(), omega.symbol);
  f.set_comp(0, std::move(c));
  return f;
}

inline Report check_lagrangian(const LieAlgebroid& A, const ShiftedTwoForm& omega,
                               const SampleScheme& scheme = {}) {
  Report rep("atlas Lagrangian");
  QuotientFormModel M = quotient_form_model(A);
  GradedElement w0 = pairing_form(M, omega.symbol);
  std::vector<GradedElement> to_atlas;
  for (int g = 0; g < M.W->size(); ++g) to_atlas.push_back(GradedElement::generator(M.W, g));
  for (int a : M.xi) to_atlas[a] = GradedElement::zero(M.W);
  for (int a : M.dxi) to_atlas[a] = GradedElement::zero(M.W);
  rep.add("pullback of the pairing form vanishes", w0.substituted(to_atlas).is_zero());
  rep.absorb(certify_quasi_iso("comparison", atlas_comparison_map(A, omega), scheme));
  return rep;
}

// --- Constant linear models ---------------------------------------------------

// An n-shifted symplectic structure on a complex of vector spaces: pairing
// blocks omega(v, w) = (block(k) v)^T w for v of degree k, w of degree -n-k.
struct LinearSymplectic {
  int shift = 0;
  LinearComplex<Rational> tangent;
  std::map<int, QMat> blocks;

  QMat block(int k) const {
    auto it = blocks.find(k);
    if (it != blocks.end()) return it->second;
    return QMat(tangent.dim(-shift - k), tangent.dim(k));
  }

  LinearSymplectic& set_block(int k, QMat m) {
    if (m.rows != tangent.dim(-shift - k) || m.cols != tangent.dim(k))
      throw std::invalid_argument("pairing block shape mismatch");
    blocks.insert_or_assign(k, std::move(m));
    return *this;
  }

  ChainMap<Rational> flat() const {
    ChainMap<Rational> f{tangent, shifted(dualized(tangent), shift), {}};
    for (int k = tangent.min_degree(); k <= tangent.max_degree(); ++k) f.set_comp(k, block(k));
    return f;
  }
};

inline Report check_symplectic_linear(const LinearSymplectic& S) {
  Report rep("linear symplectic model");
  ChainMap<Rational> f = S.flat();
  bool chain = true;
  std::string detail;
  try {
    f.check();
  } catch (const std::logic_error& err) {
    chain = false;
    detail = err.what();
  }
  rep.add("pairing is closed", chain, detail);
  bool anti = true;
  for (int k = S.tangent.min_degree(); k <= S.tangent.max_degree(); ++k) {
    int K = -S.shift - k;
    Rational sign = (k % 2 != 0) && (K % 2 != 0) ? -1 : 1;
    if (!(S.block(k).transpose() == Rational(-1) * sign * S.block(K))) anti = false;
  }
  rep.add("pairing is graded antisymmetric", anti);
  rep.add("flat map is a quasi-isomorphism", chain && quasi_iso(f));
  return rep;
}

// A map into an n-shifted symplectic model together with an isotropic
// homotopy: gamma(l, m) = (homotopy block at k applied to l)^T m pairs
// degree k against degree 1-n-k.
struct LinearLagrangian {
  LinearComplex<Rational> tangent;
  ChainMap<Rational> into;
  std::map<int, QMat> homotopy;
};

namespace detail {

inline QMat iso_block(const LinearLagrangian& L, int shift, int k) {
  int rows = L.tangent.dim(1 - shift - k), cols = L.tangent.dim(k);
  auto it = L.homotopy.find(k);
  if (it == L.homotopy.end()) return QMat(rows, cols);
  if (it->second.rows != rows || it->second.cols != cols)
    throw std::invalid_argument("isotropic homotopy block shape mismatch");
  return it->second;
}

}  // namespace detail

// gamma-flat on the derived fiber of the inclusion: on (l, t) it sends the
// ambient pairing contracted with t minus the homotopy applied to l, landing
// in L^v[n-1].
inline ChainMap<Rational> lagrangian_comparison_map(const LinearSymplectic& S,
                                                    const LinearLagrangian& L) {
  int n = S.shift;
  LinearComplex<Rational> fib = mapping_fiber(L.into);
  LinearComplex<Rational> target = shifted(dualized(L.tangent), n - 1);
  ChainMap<Rational> out{fib, target, {}};
  for (int k = fib.min_degree(); k <= fib.max_degree(); ++k) {
    QMat m(target.dim(k), fib.dim(k));
    m.paste(0, 0, Rational(-1) * detail::iso_block(L, n, k));
    m.paste(0, L.tangent.dim(k), L.into.comp(1 - n - k).transpose() * S.block(k - 1));
    out.set_comp(k, std::move(m));
  }
  return out;
}

inline Report check_lagrangian_linear(const LinearSymplectic& S, const LinearLagrangian& L) {
  if (!(L.into.source == L.tangent) || !(L.into.target == S.tangent))
    throw std::invalid_argument("Lagrangian endpoints do not match the ambient model");
  Report rep("linear Lagrangian");
  bool chain = true;
  std::string detail_msg;
  try {
    L.into.check();
  } catch (const std::logic_error& err) {
    chain = false;
    detail_msg = err.what();
  }
  rep.add("inclusion is a chain map", chain, detail_msg);

  int n = S.shift;
  bool iso = true;
  for (int k = L.tangent.min_degree() - 1; k <= L.tangent.max_degree() + 1; ++k) {
    QMat lhs = detail::iso_block(L, n, k + 1) * L.tangent.diff(k);
    QMat second = L.tangent.diff(-n - k).transpose() * detail::iso_block(L, n, k);
    lhs = lhs + (k % 2 != 0 ? Rational(-1) : Rational(1)) * second;
    QMat rhs = L.into.comp(-n - k).transpose() * S.block(k) * L.into.comp(k);
    if (!(lhs == rhs)) iso = false;
  }
  rep.add("isotropy residual vanishes", iso);

  bool anti = true;
  for (int k = L.tangent.min_degree(); k <= L.tangent.max_degree(); ++k) {
    int K = 1 - n - k;
    Rational sign = (k % 2 != 0) && (K % 2 != 0) ? -1 : 1;
    if (!(detail::iso_block(L, n, k).transpose() ==
          Rational(-1) * sign * detail::iso_block(L, n, K)))
      anti = false;
  }
  rep.add("homotopy is graded antisymmetric", anti);

  bool cmp_chain = chain && iso;
  ChainMap<Rational> cmp = lagrangian_comparison_map(S, L);
  if (cmp_chain) {
    try {
      cmp.check();
    } catch (const std::logic_error& err) {
      cmp_chain = false;
      detail_msg = err.what();
    }
  }
  rep.add("comparison map is a chain map", cmp_chain, cmp_chain ? "" : detail_msg);
  rep.add("comparison map is a quasi-isomorphism", cmp_chain && quasi_iso(cmp));
  return rep;
}

// --- Derived Lagrangian intersections ------------------------------------------

struct LagrangianIntersection {
  LinearSymplectic inherited;  // on the derived fiber, shift n-1
  Report report;
};

// Derived fiber of two Lagrangians: mapping fiber of [j1 | -j2] with pairing
//   Omega((l1,l2,t),(m1,m2,s)) = gamma1(l1,m1) - gamma2(l2,m2)
//       - 1/2 omega(t, j1 m1 + j2 m2) - 1/2 (-1)^{|l|} omega(j1 l1 + j2 l2, s).
inline LagrangianIntersection lagrangian_intersection(const LinearSymplectic& S,
                                                      const LinearLagrangian& L1,
                                                      const LinearLagrangian& L2) {
  Report r1 = check_lagrangian_linear(S, L1);
  Report r2 = check_lagrangian_linear(S, L2);
  if (!r1.pass() || !r2.pass())
    throw std::domain_error(std::string("input is not certified Lagrangian: ") +
                            (!r1.pass() ? "first" : "second"));

  int n = S.shift;
  ChainMap<Rational> u = difference_map(L1.into, L2.into);
  LinearComplex<Rational> TF = mapping_fiber(u);

  LinearSymplectic inherited;
  inherited.shift = n - 1;
  inherited.tangent = TF;
  Rational half(1, 2);
  for (int k = TF.min_degree(); k <= TF.max_degree(); ++k) {
    int K = 1 - n - k;
    if (TF.dim(K) == 0 || TF.dim(k) == 0) continue;
    QMat B(TF.dim(K), TF.dim(k));
    int rl1 = L1.tangent.dim(K), rl2 = L2.tangent.dim(K);
    int cl1 = L1.tangent.dim(k), cl2 = L2.tangent.dim(k);
    B.paste(0, 0, detail::iso_block(L1, n, k));
    B.paste(rl1, cl1, Rational(-1) * detail::iso_block(L2, n, k));
    QMat f_prev = S.block(k - 1);
    B.paste(0, cl1 + cl2, -half * (L1.into.comp(K).transpose() * f_prev));
    B.paste(rl1, cl1 + cl2, -half * (L2.into.comp(K).transpose() * f_prev));
    Rational sgn = k % 2 != 0 ? Rational(-1) : Rational(1);
    B.paste(rl1 + rl2, 0, -half * sgn * (S.block(k) * L1.into.comp(k)));
    B.paste(rl1 + rl2, cl1, -half * sgn * (S.block(k) * L2.into.comp(k)));
    inherited.set_block(k, std::move(B));
  }

  LagrangianIntersection out{std::move(inherited), Report("derived intersection")};
  out.report.absorb(check_symplectic_linear(out.inherited));
  bool nondeg = true;
  std::string dims;
  for (int k = TF.min_degree(); k <= TF.max_degree(); ++k) {
    int hk = cohomology_dim(TF, k);
    if (!dims.empty()) dims += ", ";
    dims += "h^" + std::to_string(k) + " = " + std::to_string(hk);
    int K = 1 - n - k;
    QMat Rk = cohomology_basis(TF, k);
    QMat RK = cohomology_basis(TF, K);
    if (Rk.cols != RK.cols) nondeg = false;
    QMat G = RK.transpose() * out.inherited.block(k) * Rk;
    if (rank(G) != Rk.cols) nondeg = false;
  }
  out.report.add("pairing nondegenerate on cohomology", nondeg);
  out.report.note("fiber cohomology", dims.empty() ? "zero" : dims);
  return out;
}

// --- The intersection exact triangle --------------------------------------------

// Linear model of two maps Y_i -> X over a common quotient presentation: each
// Y_i maps to a thickening with tangent TYs_i, X carries an atlas map q into
// the quotient tangent TXs, and the squares commute.
struct StackSquare {
  ChainMap<Rational> q;             // TX -> TXs
  ChainMap<Rational> a1, a2;        // TY_i -> TX
  ChainMap<Rational> b1, b2;        // TY_i -> TYs_i
  ChainMap<Rational> c1, c2;        // TYs_i -> TXs
};

struct TriangleModel {
  ChainMap<Rational> u, v, phi;     // TF = fiber(u), TFs = fiber(v), phi between them
  LinearComplex<Rational> TF, TFs, TFF, TXX;
  ChainMap<Rational> psi1, psi2;    // TY_i -> Z_i
  LinearComplex<Rational> Z1, Z2, C1, C2;
  ChainMap<Rational> alpha, beta;
};

namespace detail {

inline bool same_map(const ChainMap<Rational>& f, const ChainMap<Rational>& g) {
  if (!(f.source == g.source) || !(f.target == g.target)) return false;
  int lo = std::min(f.source.min_degree(), f.target.min_degree());
  int hi = std::max(f.source.max_degree(), f.target.max_degree());
  for (int k = lo; k <= hi; ++k)
    if (!(f.comp(k) == g.comp(k))) return false;
  return true;
}

}  // namespace detail

inline TriangleModel assemble_triangle(const StackSquare& D) {
  const LinearComplex<Rational>&TX = D.q.source, &TXs = D.q.target;
  if (!(D.a1.target == TX) || !(D.a2.target == TX) || !(D.c1.target == TXs) ||
      !(D.c2.target == TXs) || !(D.b1.source == D.a1.source) || !(D.b2.source == D.a2.source) ||
      !(D.b1.target == D.c1.source) || !(D.b2.target == D.c2.source))
    throw std::invalid_argument("diagram endpoints do not line up");
  for (const ChainMap<Rational>* f : {&D.q, &D.a1, &D.a2, &D.b1, &D.b2, &D.c1, &D.c2}) f->check();
  if (!detail::same_map(compose(D.q, D.a1), compose(D.c1, D.b1)) ||
      !detail::same_map(compose(D.q, D.a2), compose(D.c2, D.b2)))
    throw std::invalid_argument("input diagram does not commute");

  TriangleModel M;
  M.u = difference_map(D.a1, D.a2);
  M.v = difference_map(D.c1, D.c2);
  M.TF = mapping_fiber(M.u);
  M.TFs = mapping_fiber(M.v);
  M.phi = induced_fiber_map(M.u, M.v, direct_sum(D.b1, D.b2), D.q);
  M.TFF = mapping_fiber(M.phi);
  M.TXX = mapping_fiber(D.q);

  ChainMap<Rational> w1 = difference_map(D.c1, D.q);
  ChainMap<Rational> w2 = difference_map(D.c2, D.q);
  M.Z1 = mapping_fiber(w1);
  M.Z2 = mapping_fiber(w2);

  const auto make_psi = [&](const ChainMap<Rational>& a, const ChainMap<Rational>& b,
                            const LinearComplex<Rational>& Z, const LinearComplex<Rational>& TYs) {
    ChainMap<Rational> psi{a.source, Z, {}};
    for (int k = psi.source.min_degree(); k <= psi.source.max_degree(); ++k) {
      QMat m(Z.dim(k), psi.source.dim(k));
      m.paste(0, 0, b.comp(k));
      m.paste(TYs.dim(k), 0, a.comp(k));
      psi.set_comp(k, std::move(m));
    }
    return psi;
  };
  M.psi1 = make_psi(D.a1, D.b1, M.Z1, D.c1.source);
  M.psi2 = make_psi(D.a2, D.b2, M.Z2, D.c2.source);
  M.C1 = mapping_fiber(M.psi1);
  M.C2 = mapping_fiber(M.psi2);

  // alpha_i : T_{X/Xs}[-1] -> C_i, (x, xi) |-> (0; 0, x, -xi).
  LinearComplex<Rational> sTXX = shifted(M.TXX, -1);
  const auto make_alpha = [&](const LinearComplex<Rational>& C, const LinearComplex<Rational>& TY,
                              const LinearComplex<Rational>& TYs) {
    ChainMap<Rational> al{sTXX, C, {}};
    for (int k = sTXX.min_degree(); k <= sTXX.max_degree(); ++k) {
      QMat m(C.dim(k), sTXX.dim(k));
      int row_x = TY.dim(k) + TYs.dim(k - 1);
      m.paste(row_x, 0, QMat::identity(TX.dim(k - 1)));
      int row_xi = row_x + TX.dim(k - 1);
      m.paste(row_xi, TX.dim(k - 1), Rational(-1) * QMat::identity(TXs.dim(k - 2)));
      al.set_comp(k, std::move(m));
    }
    return al;
  };
  ChainMap<Rational> al1 = make_alpha(M.C1, D.a1.source, D.c1.source);
  ChainMap<Rational> al2 = make_alpha(M.C2, D.a2.source, D.c2.source);
  M.alpha = ChainMap<Rational>{sTXX, direct_sum(M.C1, M.C2), {}};
  for (int k = sTXX.min_degree(); k <= sTXX.max_degree(); ++k) {
    QMat m(M.alpha.target.dim(k), sTXX.dim(k));
    m.paste(0, 0, al1.comp(k));
    m.paste(M.C1.dim(k), 0, al2.comp(k));
    M.alpha.set_comp(k, std::move(m));
  }

  // beta_1(y; eta, chi, zeta) = (y, 0, chi; eta, 0, zeta) and
  // beta_2(y; eta, chi, zeta) = (0, y, -chi; 0, eta, -zeta).
  const auto make_beta = [&](const LinearComplex<Rational>& C, const LinearComplex<Rational>& TY,
                             const LinearComplex<Rational>& TYs, int which) {
    Rational s = which == 0 ? Rational(1) : Rational(-1);
    ChainMap<Rational> be{C, M.TFF, {}};
    const LinearComplex<Rational>&TY1 = D.a1.source, &TY2 = D.a2.source;
    const LinearComplex<Rational>&TYs1 = D.c1.source, &TYs2 = D.c2.source;
    for (int k = C.min_degree(); k <= C.max_degree(); ++k) {
      QMat m(M.TFF.dim(k), C.dim(k));
      int cy = 0, ceta = TY.dim(k), cchi = ceta + TYs.dim(k - 1), czeta = cchi + TX.dim(k - 1);
      int ry = which == 0 ? 0 : TY1.dim(k);
      int rx = TY1.dim(k) + TY2.dim(k);
      int reta = rx + TX.dim(k - 1) + (which == 0 ? 0 : TYs1.dim(k - 1));
      int rxi = rx + TX.dim(k - 1) + TYs1.dim(k - 1) + TYs2.dim(k - 1);
      m.paste(ry, cy, QMat::identity(TY.dim(k)));
      m.paste(rx, cchi, s * QMat::identity(TX.dim(k - 1)));
      m.paste(reta, ceta, QMat::identity(TYs.dim(k - 1)));
      m.paste(rxi, czeta, s * QMat::identity(TXs.dim(k - 2)));
      be.set_comp(k, std::move(m));
    }
    return be;
  };
  ChainMap<Rational> be1 = make_beta(M.C1, D.a1.source, D.c1.source, 0);
  ChainMap<Rational> be2 = make_beta(M.C2, D.a2.source, D.c2.source, 1);
  M.beta = ChainMap<Rational>{M.alpha.target, M.TFF, {}};
  for (int k = M.beta.source.min_degree(); k <= M.beta.source.max_degree(); ++k) {
    QMat m(M.TFF.dim(k), M.beta.source.dim(k));
    m.paste(0, 0, be1.comp(k));
    m.paste(0, M.C1.dim(k), be2.comp(k));
    M.beta.set_comp(k, std::move(m));
  }
  return M;
}

// Certifies that the relative tangent sequence assembled from the diagram is
// a distinguished triangle: both maps commute with the differentials, the
// composite vanishes, and the induced map from the cone of the first map is
// a quasi-isomorphism.
inline Report exact_triangle_check(const StackSquare& D) {
  TriangleModel M = assemble_triangle(D);
  Report rep("intersection triangle");
  bool chain = true;
  std::string detail_msg;
  for (const auto* f : {&M.alpha, &M.beta}) {
    try {
      f->check();
    } catch (const std::logic_error& err) {
      chain = false;
      detail_msg = err.what();
    }
  }
  rep.add("triangle maps are chain maps", chain, detail_msg);

  ChainMap<Rational> comp = compose(M.beta, M.alpha);
  bool zero = true;
  for (const auto& [k, m] : comp.comps)
    if (!m.is_zero()) zero = false;
  rep.add("triangle composite vanishes", zero);

  LinearComplex<Rational> cn = cone(M.alpha);
  ChainMap<Rational> tau{cn, M.TFF, {}};
  for (int k = cn.min_degree(); k <= cn.max_degree(); ++k) {
    QMat m(M.TFF.dim(k), cn.dim(k));
    m.paste(0, M.alpha.source.dim(k + 1), M.beta.comp(k));
    tau.set_comp(k, std::move(m));
  }
  bool tau_ok = chain && zero;
  if (tau_ok) {
    try {
      tau.check();
    } catch (const std::logic_error&) {
      tau_ok = false;
    }
  }
  rep.add("cone comparison is a quasi-isomorphism", tau_ok && quasi_iso(tau));
  return rep;
}

// --- Coisotropic intersections ---------------------------------------------------

struct CoisotropicIntersectionData {
  StackSquare diagram;
  LinearSymplectic ambient;            // one-shifted, on the target of q
  std::map<int, QMat> gamma_q;         // Lagrangian homotopy for q
  std::map<int, QMat> gamma_c1, gamma_c2;  // Lagrangian homotopies for c_i
  std::map<int, QMat> h1, h2;          // homotopies for TY_i -> Z_i
};

// gamma_F((y1,y2,x'),(z1,z2,w')) = h1(y1,z1) - h2(y2,z2)
//     + 1/2 gamma_q(x', a1 z1 + a2 z2) + 1/2 (-1)^{|y|} gamma_q(a1 y1 + a2 y2, w').
inline Report coisotropic_intersection_check(const CoisotropicIntersectionData& data) {
  const StackSquare& D = data.diagram;
  TriangleModel M = assemble_triangle(D);
  if (!(data.ambient.tangent == D.q.target))
    throw std::invalid_argument("ambient model does not live on the quotient tangent");
  if (data.ambient.shift != 1)
    throw std::invalid_argument("ambient model must be one-shifted");

  LinearLagrangian Lq{D.q.source, D.q, data.gamma_q};
  LinearLagrangian Lc1{D.c1.source, D.c1, data.gamma_c1};
  LinearLagrangian Lc2{D.c2.source, D.c2, data.gamma_c2};
  Report amb = check_symplectic_linear(data.ambient);
  if (!amb.pass()) throw std::domain_error("ambient pairing is not certified symplectic");
  for (const auto& [L, name] : {std::pair<const LinearLagrangian*, const char*>{&Lq, "atlas map"},
                                {&Lc1, "first thickening"},
                                {&Lc2, "second thickening"}}) {
    if (!check_lagrangian_linear(data.ambient, *L).pass())
      throw std::domain_error(std::string("hypothesis not certified: ") + name +
                              " is not Lagrangian");
  }

  LagrangianIntersection Z1 = lagrangian_intersection(data.ambient, Lc1, Lq);
  LagrangianIntersection Z2 = lagrangian_intersection(data.ambient, Lc2, Lq);
  if (!(Z1.inherited.tangent == M.Z1) || !(Z2.inherited.tangent == M.Z2))
    throw std::logic_error("fiber models diverged");

  LinearLagrangian LY1{D.a1.source, M.psi1, data.h1};
  LinearLagrangian LY2{D.a2.source, M.psi2, data.h2};
  Report ry1 = check_lagrangian_linear(Z1.inherited, LY1);
  Report ry2 = check_lagrangian_linear(Z2.inherited, LY2);
  if (!ry1.pass() || !ry2.pass())
    throw std::domain_error(std::string("hypothesis not certified: ") +
                            (!ry1.pass() ? "first" : "second") +
                            " leg is not Lagrangian over its thickening");

  LagrangianIntersection FF = lagrangian_intersection(data.ambient, Lc1, Lc2);
  if (!(FF.inherited.tangent == M.TFs)) throw std::logic_error("fiber models diverged");

  const LinearComplex<Rational>&TY1 = D.a1.source, &TY2 = D.a2.source, &TX = D.q.source;
  std::map<int, QMat> gamma_F;
  Rational half(1, 2);
  const auto gq = [&](int k) {
    auto it = data.gamma_q.find(k);
    if (it != data.gamma_q.end()) return it->second;
    return QMat(TX.dim(-k), TX.dim(k));
  };
  for (int k = M.TF.min_degree(); k <= M.TF.max_degree(); ++k) {
    int K = 1 - k;
    if (M.TF.dim(k) == 0 || M.TF.dim(K) == 0) continue;
    QMat G(M.TF.dim(K), M.TF.dim(k));
    int rz1 = TY1.dim(K), rz2 = TY2.dim(K);
    int cy1 = TY1.dim(k), cy2 = TY2.dim(k);
    G.paste(0, 0, detail::iso_block(LY1, 0, k));
    G.paste(rz1, cy1, Rational(-1) * detail::iso_block(LY2, 0, k));
    G.paste(0, cy1 + cy2, half * (D.a1.comp(K).transpose() * gq(k - 1)));
    G.paste(rz1, cy1 + cy2, half * (D.a2.comp(K).transpose() * gq(k - 1)));
    Rational sgn = k % 2 != 0 ? Rational(-1) : Rational(1);
    G.paste(rz1 + rz2, 0, half * sgn * (gq(k) * D.a1.comp(k)));
    G.paste(rz1 + rz2, cy1, half * sgn * (gq(k) * D.a2.comp(k)));
    gamma_F.insert_or_assign(k, std::move(G));
  }
  LinearLagrangian LF{M.TF, M.phi, gamma_F};
  Report rf = check_lagrangian_linear(FF.inherited, LF);

  Report rep("coisotropic intersection");
  rep.add("left vertical comparison is a quasi-isomorphism",
          check_lagrangian_linear(data.ambient, Lq).pass());
  rep.add("middle vertical comparison is a quasi-isomorphism", ry1.pass() && ry2.pass());
  rep.absorb(exact_triangle_check(D));

  // Rotated cotangent row: dual of TX[-1] -> TF -> TY1 (+) TY2.
  LinearComplex<Rational> sTX = shifted(TX, -1);
  ChainMap<Rational> alpha_p{sTX, M.TF, {}};
  for (int k = sTX.min_degree(); k <= sTX.max_degree(); ++k) {
    QMat m(M.TF.dim(k), sTX.dim(k));
    m.paste(TY1.dim(k) + TY2.dim(k), 0, Rational(-1) * QMat::identity(TX.dim(k - 1)));
    alpha_p.set_comp(k, std::move(m));
  }
  ChainMap<Rational> iota{M.TF, M.u.source, {}};
  for (int k = M.TF.min_degree(); k <= M.TF.max_degree(); ++k) {
    QMat m(M.u.source.dim(k), M.TF.dim(k));
    m.paste(0, 0, QMat::identity(M.u.source.dim(k)));
    iota.set_comp(k, std::move(m));
  }
  ChainMap<Rational> di = dual_map(iota), da = dual_map(alpha_p);
  bool dual_row = true;
  try {
    di.check();
    da.check();
  } catch (const std::logic_error&) {
    dual_row = false;
  }
  if (dual_row) {
    LinearComplex<Rational> cn = cone(di);
    ChainMap<Rational> tau{cn, da.target, {}};
    for (int k = cn.min_degree(); k <= cn.max_degree(); ++k) {
      QMat m(da.target.dim(k), cn.dim(k));
      m.paste(0, di.source.dim(k + 1), da.comp(k));
      tau.set_comp(k, std::move(m));
    }
    try {
      tau.check();
      dual_row = quasi_iso(tau);
    } catch (const std::logic_error&) {
      dual_row = false;
    }
  }
  rep.add("cotangent row is distinguished", dual_row);

  rep.absorb(rf);
  std::string dims;
  for (int k = M.TFF.min_degree(); k <= M.TFF.max_degree(); ++k) {
    int h = cohomology_dim(M.TFF, k);
    if (h == 0) continue;
    if (!dims.empty()) dims += ", ";
    dims += "h^" + std::to_string(k) + " = " + std::to_string(h);
  }
  rep.note("relative fiber cohomology", dims.empty() ? "zero" : dims);
  rep.note("certification", "rows and outer columns support the comparison; it is also checked directly");
  return rep;
}

}  // namespace gcgeo
