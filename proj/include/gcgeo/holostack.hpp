#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gcgeo/algebroid.hpp"
#include "gcgeo/calculus.hpp"
#include "gcgeo/complexes.hpp"
#include "gcgeo/conventions.hpp"
#include "gcgeo/derivation.hpp"
#include "gcgeo/gencomplex.hpp"
#include "gcgeo/report.hpp"
#include "gcgeo/stacky.hpp"

namespace gcgeo {

// --- Vector-valued forms on the quotient chart -------------------------------

// A form with values in the tangent directions of the quotient chart: the
// component at a body generator v is the coefficient of the outgoing
// direction d/dv, a homogeneous element of bidegree (coh + coh_v, form).
// Components at shifted generators may sit in lower weight than the form
// itself, which is what lets a single tower entry lower or raise weight.
struct VectorValuedForm {
  int form = 1;
  int coh = 0;
  std::map<int, GradedElement> comps;

  bool is_zero() const {
    for (const auto& [v, val] : comps)
      if (!val.is_zero()) return false;
    return true;
  }
};

namespace detail {

// The exterior symbol paired with a body generator of the quotient chart.
inline int exterior_partner(const QuotientFormModel& M, int body) {
  for (std::size_t i = 0; i < M.x.size(); ++i)
    if (M.x[i] == body) return M.dx[i];
  for (std::size_t a = 0; a < M.xi.size(); ++a)
    if (M.xi[a] == body) return M.dxi[a];
  throw std::out_of_range("not a body generator of the quotient chart");
}

inline std::vector<int> body_generators(const QuotientFormModel& M) {
  std::vector<int> out = M.x;
  out.insert(out.end(), M.xi.begin(), M.xi.end());
  return out;
}

inline void validate_component(const QuotientFormModel& M, const VectorValuedForm& K,
                               int body, const GradedElement& value) {
  exterior_partner(M, body);
  if (value.chart() != M.W)
    throw std::invalid_argument("component lives on the wrong chart");
  if (value.is_zero()) return;
  auto bd = value.bidegree();
  const Generator& g = M.W->gen(body);
  if (!bd || bd->first != K.coh + g.coh || bd->second != K.form)
    throw std::invalid_argument("component bidegree mismatch");
}

}  // namespace detail

inline void set_component(const QuotientFormModel& M, VectorValuedForm& K, int body,
                          GradedElement value) {
  detail::validate_component(M, K, body, value);
  if (value.is_zero())
    K.comps.erase(body);
  else
    K.comps[body] = std::move(value);
}

inline GradedElement component(const QuotientFormModel& M, const VectorValuedForm& K,
                               int body) {
  auto it = K.comps.find(body);
  return it == K.comps.end() ? GradedElement::zero(M.W) : it->second;
}

// Insertion operator of a form: kills body generators and replaces the
// exterior symbol of v by the component at v.
inline Derivation insertion(const QuotientFormModel& M, const VectorValuedForm& K) {
  Derivation D(M.W, K.form + K.coh - 1);
  for (const auto& [v, val] : K.comps) D.set(detail::exterior_partner(M, v), val);
  return D;
}

// Lie derivative along a form, as the graded commutator of its insertion
// operator with the de Rham differential.
inline Derivation lie_derivative(const QuotientFormModel& M, const VectorValuedForm& K) {
  return commutator(insertion(M, K), M.d);
}

// The identity in bidegree (1, 0): every body generator goes to its symbol.
inline VectorValuedForm identity_form(const QuotientFormModel& M) {
  VectorValuedForm out{1, 0, {}};
  for (int v : detail::body_generators(M))
    out.comps[v] = GradedElement::generator(M.W, detail::exterior_partner(M, v));
  return out;
}

// Internal differential of a form, read off the graded commutator of the
// internal differential with the insertion operator.  The commutator kills
// body generators, so its values on the exterior symbols carry everything.
inline VectorValuedForm delta_action(const QuotientFormModel& M, const VectorValuedForm& K) {
  VectorValuedForm out{K.form, K.coh + 1, {}};
  Derivation D = commutator(M.delta, insertion(M, K));
  for (int v : detail::body_generators(M)) {
    GradedElement val = D.value(detail::exterior_partner(M, v));
    if (!val.is_zero()) out.comps[v] = std::move(val);
  }
  return out;
}

// Algebraic bracket: insert one form into the coefficients of the other,
// with the sign ruled by the total degrees form + coh of the two sides.
inline VectorValuedForm nijenhuis_richardson(const QuotientFormModel& M,
                                             const VectorValuedForm& K,
                                             const VectorValuedForm& L) {
  VectorValuedForm out{K.form + L.form - 1, K.coh + L.coh, {}};
  Derivation iK = insertion(M, K);
  Derivation iL = insertion(M, L);
  bool odd = (K.form + K.coh) % 2 != 0 && (L.form + L.coh) % 2 != 0;
  for (int v : detail::body_generators(M)) {
    GradedElement val = iK(component(M, L, v));
    GradedElement swap = iL(component(M, K, v));
    val = odd ? val + swap : val - swap;
    if (!val.is_zero()) out.comps[v] = std::move(val);
  }
  return out;
}

// Differential bracket: the commutator of the two Lie derivatives is again a
// Lie derivative, and its values on body generators recover the bracket.
inline VectorValuedForm frolicher_nijenhuis(const QuotientFormModel& M,
                                            const VectorValuedForm& K,
                                            const VectorValuedForm& L) {
  VectorValuedForm out{K.form + L.form, K.coh + L.coh, {}};
  Derivation D = commutator(lie_derivative(M, K), lie_derivative(M, L));
  for (int v : detail::body_generators(M)) {
    GradedElement val = D.value(v);
    if (!val.is_zero()) out.comps[v] = std::move(val);
  }
  return out;
}

// Finite sum of homogeneous forms keyed by bidegree (form, coh).
struct FormSum {
  std::map<std::pair<int, int>, VectorValuedForm> parts;

  void add(VectorValuedForm k, const Rational& scale = rat(1)) {
    if (scale == 0) return;
    auto key = std::make_pair(k.form, k.coh);
    auto it = parts.find(key);
    if (it == parts.end()) it = parts.emplace(key, VectorValuedForm{k.form, k.coh, {}}).first;
    VectorValuedForm& dst = it->second;
    for (auto& [v, val] : k.comps) {
      if (val.is_zero()) continue;
      if (scale != 1) val *= scale;
      auto jt = dst.comps.find(v);
      if (jt == dst.comps.end()) {
        dst.comps.emplace(v, std::move(val));
      } else {
        jt->second += val;
        if (jt->second.is_zero()) dst.comps.erase(jt);
      }
    }
    if (dst.comps.empty()) parts.erase(it);
  }

  bool is_zero() const { return parts.empty(); }

  std::string describe() const {
    std::string out;
    for (const auto& [key, part] : parts) {
      if (part.is_zero()) continue;
      if (!out.empty()) out += ", ";
      out += "(form " + std::to_string(key.first) + ", coh " + std::to_string(key.second) + ")";
    }
    return out.empty() ? "zero" : out;
  }
};

// --- Structure towers ---------------------------------------------------------

// Two towers of vector-valued forms on the quotient model of an algebroid:
// endomorphism-type entries of bidegree (p, 1-p) and homotopy-type entries of
// bidegree (p, -p), indexed by their form degree p >= 1.
struct HHStructure {
  LieAlgebroid algebroid;
  QuotientFormModel model;
  std::map<int, VectorValuedForm> endo;
  std::map<int, VectorValuedForm> homotopy;
};

inline HHStructure hh_structure(LieAlgebroid A) {
  QuotientFormModel M = quotient_form_model(A);
  return {std::move(A), std::move(M), {}, {}};
}

namespace detail {

inline void validate_tower_entry(const QuotientFormModel& M, const VectorValuedForm& K) {
  for (const auto& [v, val] : K.comps) validate_component(M, K, v, val);
}

}  // namespace detail

inline void set_endo(HHStructure& h, int p, VectorValuedForm K) {
  if (p < 1) throw std::invalid_argument("tower index must be positive");
  if (K.form != p || K.coh != 1 - p)
    throw std::invalid_argument("endomorphism tower entry must have bidegree (p, 1-p)");
  detail::validate_tower_entry(h.model, K);
  if (K.is_zero())
    h.endo.erase(p);
  else
    h.endo[p] = std::move(K);
}

inline void set_homotopy(HHStructure& h, int p, VectorValuedForm K) {
  if (p < 1) throw std::invalid_argument("tower index must be positive");
  if (K.form != p || K.coh != -p)
    throw std::invalid_argument("homotopy tower entry must have bidegree (p, -p)");
  detail::validate_tower_entry(h.model, K);
  if (K.is_zero())
    h.homotopy.erase(p);
  else
    h.homotopy[p] = std::move(K);
}

// Tower entry of endomorphism shape: a tangent block and a coframe block,
// with function entries over any chart that embeds into the quotient chart.
inline VectorValuedForm endomorphism_form(const QuotientFormModel& M, const SymbolicMatrix& a,
                                          const SymbolicMatrix& b) {
  int n = static_cast<int>(M.x.size()), r = static_cast<int>(M.xi.size());
  if (a.rows != n || a.cols != n || b.rows != r || b.cols != r)
    throw std::invalid_argument("block shape mismatch");
  VectorValuedForm out{1, 0, {}};
  for (int i = 0; i < n; ++i) {
    GradedElement val = GradedElement::zero(M.W);
    for (int j = 0; j < n; ++j)
      val += a.at(i, j).embedded(M.W) * GradedElement::generator(M.W, M.dx[j]);
    set_component(M, out, M.x[i], std::move(val));
  }
  for (int p = 0; p < r; ++p) {
    GradedElement val = GradedElement::zero(M.W);
    for (int q = 0; q < r; ++q)
      val += b.at(p, q).embedded(M.W) * GradedElement::generator(M.W, M.dxi[q]);
    set_component(M, out, M.xi[p], std::move(val));
  }
  return out;
}

// Tower entry lowering tangent directions into the shifted frame directions.
inline VectorValuedForm lowering_form(const QuotientFormModel& M, const SymbolicMatrix& q) {
  int n = static_cast<int>(M.x.size()), r = static_cast<int>(M.xi.size());
  if (q.rows != r || q.cols != n) throw std::invalid_argument("block shape mismatch");
  VectorValuedForm out{1, -1, {}};
  for (int a = 0; a < r; ++a) {
    GradedElement val = GradedElement::zero(M.W);
    for (int i = 0; i < n; ++i)
      val += q.at(a, i).embedded(M.W) * GradedElement::generator(M.W, M.dx[i]);
    set_component(M, out, M.xi[a], std::move(val));
  }
  return out;
}

// Residuals of the three structure equations, kept per bidegree so a failure
// names the components that carry it.
struct HHSResiduals {
  FormSum commutation;
  FormSum integrability;
  FormSum square;
};

inline HHSResiduals hh_residuals(const HHStructure& h, const Conventions& conv = {}) {
  validate(conv);
  const QuotientFormModel& M = h.model;
  HHSResiduals R;
  for (const auto& [p, K] : h.endo)
    for (const auto& [q, L] : h.homotopy) R.commutation.add(nijenhuis_richardson(M, K, L));
  for (const auto& [p, K] : h.endo) {
    R.integrability.add(delta_action(M, K));
    for (const auto& [q, L] : h.endo)
      R.integrability.add(frolicher_nijenhuis(M, K, L), rat(1, 2));
  }
  for (const auto& [q, L] : h.homotopy) {
    R.square.add(delta_action(M, L));
    if (conv.twisted_square_differential)
      for (const auto& [p, K] : h.endo) R.square.add(frolicher_nijenhuis(M, K, L));
  }
  for (const auto& [p, K] : h.endo)
    for (const auto& [q, L] : h.endo) R.square.add(nijenhuis_richardson(M, K, L), rat(1, 2));
  R.square.add(identity_form(M), -conv.square_rhs);
  return R;
}

inline Report check_hhs(const HHStructure& h, const Conventions& conv = {}) {
  validate(conv);
  if (!check_axioms(h.algebroid).pass())
    throw std::domain_error("algebroid fails its axioms");
  HHSResiduals R = hh_residuals(h, conv);
  Report rep("homotopy holomorphic structure");
  bool carrier = !h.model.x.empty() || !h.model.xi.empty();

  bool comm = R.commutation.is_zero();
  rep.add("commutation residual vanishes", comm, comm ? "" : "nonzero at " + R.commutation.describe());
  bool integ = R.integrability.is_zero();
  rep.add("integrability residual vanishes", integ,
          integ ? "" : "nonzero at " + R.integrability.describe());
  bool degenerate = !carrier && conv.square_rhs != 0;
  bool sq = R.square.is_zero() && !degenerate;
  rep.add("square residual vanishes", sq,
          degenerate ? "the prescribed identity multiple has no carrier on a chart without generators"
                     : (sq ? "" : "nonzero at " + R.square.describe()));
  rep.note("square right-hand side", rational_string(conv.square_rhs) + " times the identity");
  rep.note("square differential", conv.twisted_square_differential
                                      ? "internal differential twisted by the endomorphism tower"
                                      : "internal differential");
  return rep;
}

// --- Structures induced from generalized complex ones -------------------------

struct InducedHHS {
  HHStructure structure;
  Report report;
};

namespace detail {

inline std::vector<std::vector<int>> monomial_exponents(int vars, int degree_bound) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(vars), 0);
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == vars) {
      out.push_back(cur);
      return;
    }
    for (int e = 0; e <= left; ++e) {
      cur[static_cast<std::size_t>(pos)] = e;
      self(self, pos + 1, left - e);
    }
    cur[static_cast<std::size_t>(pos)] = 0;
  };
  rec(rec, 0, degree_bound);
  return out;
}

}  // namespace detail

// Builds the towers of a generalized complex structure: the diagonal blocks
// give the endomorphism entry, the lower block the homotopy entry, and the
// two-form corrector is obtained by solving the weight-zero part of the
// integrability equation for polynomial coefficients of bounded degree.
// Components the solve cannot reach are reported rather than hidden.
inline InducedHHS hhs_from_gc(const GCStructure& J, const Conventions& conv = {}) {
  validate(conv);
  if (!gc_check(J).pass())
    throw std::domain_error("input fails the generalized complex check");

  const CartanChart& cc = J.cartan();
  int n = J.dim();
  std::vector<std::string> names;
  for (int idx : cc.body) {
    const Generator& g = cc.chart->gen(idx);
    if (g.coh != 0 || g.form != 0)
      throw std::domain_error("chart body must be an ordinary manifold chart");
    names.push_back(g.name);
  }
  MultivectorChart mc = make_multivector_chart(names);
  std::vector<GradedElement> to_mc;
  for (const auto& g : cc.chart->gens())
    to_mc.push_back(g.coh == 0 && g.form == 0 ? GradedElement::generator(mc.chart, g.name)
                                              : GradedElement::zero(mc.chart));
  GradedElement biv = GradedElement::zero(mc.chart);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const GradedElement& pij = J.block_p().at(i, j);
      if (pij.is_zero()) continue;
      biv += pij.substituted(to_mc) * GradedElement::generator(mc.chart, mc.duals[i]) *
             GradedElement::generator(mc.chart, mc.duals[j]);
    }

  HHStructure h = hh_structure(poisson_algebroid(mc, biv));
  const QuotientFormModel& M = h.model;
  SymbolicMatrix diag = J.block_i();
  SymbolicMatrix codiag = diag.transpose();
  if (conv.diagonal_sign == -1) {
    diag = -diag;
    codiag = -codiag;
  }
  set_endo(h, 1, endomorphism_form(M, diag, codiag));
  set_homotopy(h, 1, lowering_form(M, J.block_q()));

  Report rep("induced structure");
  HHSResiduals before = hh_residuals(h, conv);
  const auto& parts = before.integrability.parts;

  bool linear_ok = parts.find({1, 1}) == parts.end();
  rep.add("diagonal blocks are compatible with the internal differential", linear_ok,
          linear_ok ? "" : "nonzero residual in bidegree (form 1, coh 1)");

  auto it = parts.find({2, 0});
  if (it == parts.end()) {
    rep.add("two-form corrector solve", true, "zero corrector suffices");
    rep.note("corrector", "zero");
  } else {
    const VectorValuedForm& target = it->second;
    int r = static_cast<int>(M.xi.size());
    int bound = 0;
    for (const auto& [v, val] : target.comps)
      bound = std::max(bound, detail::polynomial_degree(val));
    ++bound;

    // candidate correctors: a monomial times a two-form symbol at a shifted
    // generator; components at base generators would need negative weight
    std::vector<VectorValuedForm> basis;
    for (int a = 0; a < r; ++a)
      for (const auto& exps : detail::monomial_exponents(n, bound))
        for (int i = 0; i < n; ++i)
          for (int j = i + 1; j < n; ++j) {
            GradedElement m = GradedElement::constant(M.W, rat(1));
            for (int k = 0; k < n; ++k)
              for (int e = 0; e < exps[static_cast<std::size_t>(k)]; ++e)
                m = m * GradedElement::generator(M.W, M.x[k]);
            VectorValuedForm E{2, -1, {}};
            E.comps[M.xi[a]] = m * GradedElement::generator(M.W, M.dx[i]) *
                               GradedElement::generator(M.W, M.dx[j]);
            basis.push_back(std::move(E));
          }

    std::map<std::pair<int, Term>, int> row;
    auto index_rows = [&](const VectorValuedForm& K) {
      for (const auto& [v, val] : K.comps)
        for (const auto& [t, c] : val.terms()) row.emplace(std::make_pair(v, t), static_cast<int>(row.size()));
    };
    std::vector<VectorValuedForm> columns;
    columns.reserve(basis.size());
    for (const auto& E : basis) {
      columns.push_back(delta_action(M, E));
      index_rows(columns.back());
    }
    index_rows(target);

    QMat lin(static_cast<int>(row.size()), static_cast<int>(basis.size()));
    QMat rhs(static_cast<int>(row.size()), 1);
    for (std::size_t k = 0; k < columns.size(); ++k)
      for (const auto& [v, val] : columns[k].comps)
        for (const auto& [t, c] : val.terms())
          lin.at(row.at({v, t}), static_cast<int>(k)) = c;
    for (const auto& [v, val] : target.comps)
      for (const auto& [t, c] : val.terms()) rhs.at(row.at({v, t}), 0) = -c;

    auto sol = solve(lin, rhs);
    if (sol) {
      FormSum acc;
      for (std::size_t k = 0; k < basis.size(); ++k) acc.add(basis[k], sol->at(static_cast<int>(k), 0));
      VectorValuedForm corrector{2, -1, {}};
      if (auto part = acc.parts.find({2, -1}); part != acc.parts.end()) corrector = part->second;
      set_endo(h, 2, corrector);
      rep.add("two-form corrector solve", true, "");
      rep.note("corrector", corrector.is_zero() ? "zero" : "nonzero");
      rep.note("corrector coefficient degree bound", std::to_string(bound));
    } else {
      rep.add("two-form corrector solve", false,
              "no polynomial corrector with coefficient degree up to " + std::to_string(bound));
      rep.note("corrector", "none");
    }
  }

  HHSResiduals after = hh_residuals(h, conv);
  bool settled = after.integrability.is_zero();
  rep.add("integrability residual vanishes after correction", settled,
          settled ? "" : "nonzero at " + after.integrability.describe());
  return {std::move(h), std::move(rep)};
}

// --- Foliation candidates ------------------------------------------------------

// A two-term frame with complex-rational coefficients mapped to the tangent
// complex: constant anchors per degree, a homotopy witnessing the square
// identity, and constant structure brackets on the degree-zero frame.
struct FoliationCandidate {
  int rank_m1 = 0;
  int rank_0 = 0;
  CMat d;
  CMat rho_m1;
  CMat rho_0;
  CMat gamma;
  std::vector<GaussianRational> c;

  FoliationCandidate(int rm1, int r0, int dim, int rank)
      : rank_m1(rm1),
        rank_0(r0),
        d(r0, rm1),
        rho_m1(rank, rm1),
        rho_0(dim, r0),
        gamma(rank, r0),
        c(static_cast<std::size_t>(r0) * r0 * r0) {}

  const GaussianRational& bracket(int a, int b, int k) const {
    return c.at((static_cast<std::size_t>(a) * rank_0 + b) * rank_0 + k);
  }
  FoliationCandidate& set_bracket(int a, int b, int k, const GaussianRational& v) {
    c.at((static_cast<std::size_t>(a) * rank_0 + b) * rank_0 + k) = v;
    c.at((static_cast<std::size_t>(b) * rank_0 + a) * rank_0 + k) = -v;
    return *this;
  }
};

namespace detail {

inline QMat real_part(const CMat& m) {
  QMat out(m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) out.at(i, j) = m.at(i, j).re;
  return out;
}

inline QMat imag_part(const CMat& m) {
  QMat out(m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) out.at(i, j) = m.at(i, j).im;
  return out;
}

}  // namespace detail

// Checks a candidate against the structure: the frame brackets close, the
// anchor is a chain map, the doubled anchor (the frame next to its conjugate)
// is a quasi-isomorphism onto the tangent complex at sample points, and the
// endomorphism tower acts on the anchor as multiplication by -i up to the
// boundary of the homotopy.  The last condition is checked symbolically
// through real and imaginary parts.
inline Report check_foliation(const FoliationCandidate& F, const HHStructure& h,
                              const SampleScheme& scheme = {}) {
  const QuotientFormModel& M = h.model;
  const LieAlgebroid& A = h.algebroid;
  int n = A.dim(), r = A.rank();
  if (F.d.rows != F.rank_0 || F.d.cols != F.rank_m1 || F.rho_m1.rows != r ||
      F.rho_m1.cols != F.rank_m1 || F.rho_0.rows != n || F.rho_0.cols != F.rank_0 ||
      F.gamma.rows != r || F.gamma.cols != F.rank_0)
    throw std::invalid_argument("candidate shapes do not match the algebroid");

  Report rep("anti-holomorphic foliation");

  bool frames = true;
  for (int a = 0; a < F.rank_0 && frames; ++a)
    for (int b = 0; b < F.rank_0 && frames; ++b)
      for (int k = 0; k < F.rank_0 && frames; ++k)
        frames = F.bracket(a, b, k) == -F.bracket(b, a, k);
  for (int a = 0; a < F.rank_0 && frames; ++a)
    for (int b = 0; b < F.rank_0 && frames; ++b)
      for (int e = 0; e < F.rank_0 && frames; ++e)
        for (int l = 0; l < F.rank_0 && frames; ++l) {
          GaussianRational s(0);
          for (int m = 0; m < F.rank_0; ++m)
            s += F.bracket(a, b, m) * F.bracket(m, e, l) +
                 F.bracket(b, e, m) * F.bracket(m, a, l) +
                 F.bracket(e, a, m) * F.bracket(m, b, l);
          frames = s == GaussianRational(0);
        }
  for (int a = 0; a < F.rank_0 && frames; ++a)
    for (int b = 0; b < F.rank_0 && frames; ++b)
      for (int i = 0; i < n && frames; ++i) {
        GaussianRational s(0);
        for (int k = 0; k < F.rank_0; ++k) s += F.bracket(a, b, k) * F.rho_0.at(i, k);
        frames = s == GaussianRational(0);
      }
  rep.add("frame brackets close", frames);

  TwoTermComplex T = tangent_complex(A);
  auto base_const = [&](const QMat& m) { return SymbolicMatrix::constant(A.base(), m); };
  CMat rd = F.rho_0 * F.d;
  bool chain = (T.d * base_const(detail::real_part(F.rho_m1)) - base_const(detail::real_part(rd)))
                   .is_zero() &&
               (T.d * base_const(detail::imag_part(F.rho_m1)) - base_const(detail::imag_part(rd)))
                   .is_zero();
  rep.add("anchor is a chain map", chain);

  bool qi_all = chain;
  std::string why = chain ? "" : "the anchor components do not commute with the differentials";
  Rng rng(scheme.seed);
  for (int s = 0; qi_all && s < scheme.samples; ++s) {
    std::vector<Rational> pt = sample_point(A.base(), rng);
    LinearComplex<GaussianRational> tc;
    tc.set_dim(-1, r).set_dim(0, n);
    CMat D = complexify(T.d.evaluate(pt));
    if (!D.is_zero()) tc.set_diff(-1, D);
    LinearComplex<GaussianRational> dbl;
    dbl.set_dim(-1, 2 * F.rank_m1).set_dim(0, 2 * F.rank_0);
    if (F.rank_m1 > 0 && F.rank_0 > 0) {
      CMat dd(2 * F.rank_0, 2 * F.rank_m1);
      dd.paste(0, 0, F.d);
      dd.paste(F.rank_0, F.rank_m1, conj(F.d));
      if (!dd.is_zero()) dbl.set_diff(-1, dd);
    }
    ChainMap<GaussianRational> f{std::move(dbl), std::move(tc), {}};
    f.set_comp(-1, hstack(F.rho_m1, conj(F.rho_m1)));
    f.set_comp(0, hstack(F.rho_0, conj(F.rho_0)));
    if (!quasi_iso(f)) {
      qi_all = false;
      why = "sample " + std::to_string(s) + ": comparison fails on cohomology";
    }
  }
  rep.add("doubled anchor is a quasi-isomorphism at every sample", qi_all, why);

  SymbolicMatrix tangent_block(M.W, n, n);
  SymbolicMatrix frame_block(M.W, r, r);
  bool linear = true;
  if (auto it = h.endo.find(1); it != h.endo.end()) {
    for (int i = 0; i < n; ++i) {
      GradedElement comp = component(M, it->second, M.x[i]);
      GradedElement rest = comp;
      for (int j = 0; j < n; ++j) {
        tangent_block.at(i, j) = comp.derive_left(M.dx[j]);
        rest -= tangent_block.at(i, j) * GradedElement::generator(M.W, M.dx[j]);
      }
      linear = linear && rest.is_zero();
    }
    for (int p = 0; p < r; ++p) {
      GradedElement comp = component(M, it->second, M.xi[p]);
      GradedElement rest = comp;
      for (int q = 0; q < r; ++q) {
        frame_block.at(p, q) = comp.derive_left(M.dxi[q]);
        rest -= frame_block.at(p, q) * GradedElement::generator(M.W, M.dxi[q]);
      }
      linear = linear && rest.is_zero();
    }
  }

  SymbolicMatrix anchor_w(M.W, n, r);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < r; ++a) anchor_w.at(i, a) = T.d.at(i, a).embedded(M.W);
  auto model_const = [&](const QMat& m) { return SymbolicMatrix::constant(M.W, m); };
  CMat gd = F.gamma * F.d;
  SymbolicMatrix r0_re = tangent_block * model_const(detail::real_part(F.rho_0)) -
                         model_const(detail::imag_part(F.rho_0)) -
                         anchor_w * model_const(detail::real_part(F.gamma));
  SymbolicMatrix r0_im = tangent_block * model_const(detail::imag_part(F.rho_0)) +
                         model_const(detail::real_part(F.rho_0)) -
                         anchor_w * model_const(detail::imag_part(F.gamma));
  SymbolicMatrix r1_re = frame_block * model_const(detail::real_part(F.rho_m1)) -
                         model_const(detail::imag_part(F.rho_m1)) -
                         model_const(detail::real_part(gd));
  SymbolicMatrix r1_im = frame_block * model_const(detail::imag_part(F.rho_m1)) +
                         model_const(detail::real_part(F.rho_m1)) -
                         model_const(detail::imag_part(gd));
  bool square =
      linear && r0_re.is_zero() && r0_im.is_zero() && r1_re.is_zero() && r1_im.is_zero();
  rep.add("square commutes up to the boundary of the homotopy", square,
          linear ? "" : "endomorphism entry has components outside the linear model");
  rep.note("samples", std::to_string(scheme.samples));
  rep.note("seed", std::to_string(scheme.seed));
  return rep;
}

}  // namespace gcgeo
