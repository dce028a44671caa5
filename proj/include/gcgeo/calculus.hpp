#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gcgeo/derivation.hpp"

namespace gcgeo {

// Chart of a graded manifold together with its de Rham companions: every
// body generator z of bidegree (c,f) gets a symbol dz of bidegree (c,f+1).
// Body generators come first, then their d-symbols in the same order.
struct CartanChart {
  ChartPtr chart;
  std::vector<int> body;
  std::vector<int> dsym;

  int d_of(int gen) const {
    for (std::size_t k = 0; k < body.size(); ++k)
      if (body[k] == gen) return dsym[k];
    throw std::out_of_range("not a body generator");
  }
  int body_of(int dgen) const {
    for (std::size_t k = 0; k < dsym.size(); ++k)
      if (dsym[k] == dgen) return body[k];
    throw std::out_of_range("not a d-symbol");
  }
};

inline CartanChart make_cartan_chart(const std::vector<Generator>& body) {
  std::vector<Generator> gens = body;
  for (const auto& g : body) gens.push_back({"d" + g.name, g.coh, g.form + 1});
  CartanChart cc;
  cc.chart = Chart::make(std::move(gens));
  for (int i = 0; i < static_cast<int>(body.size()); ++i) {
    cc.body.push_back(i);
    cc.dsym.push_back(i + static_cast<int>(body.size()));
  }
  return cc;
}

// De Rham differential: z -> dz, dz -> 0.
inline Derivation exterior_d(const CartanChart& cc) {
  Derivation d(cc.chart, 1);
  for (std::size_t k = 0; k < cc.body.size(); ++k)
    d.set(cc.body[k], GradedElement::generator(cc.chart, cc.dsym[k]));
  return d;
}

// Vector-valued form sum_g comp[g] (x) d/dz^g.  The total degree of the
// component minus the degree of its generator is the same for every g; that
// shared value is the form's degree and fixes every bracket sign below.
class VectorForm {
 public:
  explicit VectorForm(CartanChart cc) : cc_(std::move(cc)) {}

  const CartanChart& cartan() const { return cc_; }
  const std::map<int, GradedElement>& components() const { return comp_; }
  bool is_zero() const { return comp_.empty(); }

  VectorForm& set(int body_gen, GradedElement coeff) {
    require_same_chart(cc_.chart, coeff.chart());
    cc_.d_of(body_gen);  // validates
    if (coeff.is_zero())
      comp_.erase(body_gen);
    else
      comp_[body_gen] = std::move(coeff);
    return *this;
  }
  VectorForm& set(std::string_view name, GradedElement coeff) {
    return set(cc_.chart->index(name), std::move(coeff));
  }

  GradedElement component(int body_gen) const {
    auto it = comp_.find(body_gen);
    return it == comp_.end() ? GradedElement::zero(cc_.chart) : it->second;
  }
  GradedElement component(std::string_view name) const {
    return component(cc_.chart->index(name));
  }

  int degree() const {
    std::optional<int> deg;
    for (const auto& [gen, coeff] : comp_) {
      for (const auto& [t, c] : coeff.terms()) {
        auto [coh, form] = coeff.term_bidegree(t);
        int d = coh + form - cc_.chart->gen(gen).degree();
        if (deg && *deg != d) throw std::logic_error("vector form of mixed degree");
        deg = d;
      }
    }
    return deg.value_or(0);
  }

  // The algebraic derivation: functions -> 0, dz^g -> comp[g].
  Derivation contraction() const {
    Derivation out(cc_.chart, degree() - 1);
    for (const auto& [gen, coeff] : comp_) out.set(cc_.d_of(gen), coeff);
    return out;
  }

  Derivation lie(const Derivation& d) const { return commutator(contraction(), d); }

  bool operator==(const VectorForm& other) const {
    return cc_.chart->same(*other.cc_.chart) && comp_ == other.comp_;
  }

  VectorForm& operator+=(const VectorForm& other) {
    require_same_chart(cc_.chart, other.cc_.chart);
    for (const auto& [gen, coeff] : other.comp_) set(gen, component(gen) + coeff);
    return *this;
  }
  friend VectorForm operator+(VectorForm a, const VectorForm& b) { return a += b; }
  friend VectorForm operator-(VectorForm a, VectorForm b) { return a += b *= Rational(-1); }
  VectorForm& operator*=(const Rational& s) {
    if (s == 0) {
      comp_.clear();
    } else {
      for (auto& [gen, coeff] : comp_) coeff *= s;
    }
    return *this;
  }
  friend VectorForm operator*(VectorForm k, const Rational& s) { return k *= s; }
  friend VectorForm operator*(const Rational& s, VectorForm k) { return k *= s; }

 private:
  CartanChart cc_;
  std::map<int, GradedElement> comp_;
};

// dz^g (x) d/dz^g over every body generator; acts as the identity on vectors.
inline VectorForm identity_form(const CartanChart& cc) {
  VectorForm id(cc);
  for (std::size_t k = 0; k < cc.body.size(); ++k)
    id.set(cc.body[k], GradedElement::generator(cc.chart, cc.dsym[k]));
  return id;
}

// Insertion of K into the form slots of L, component-wise.
inline VectorForm insert(const VectorForm& K, const VectorForm& L) {
  Derivation iota = K.contraction();
  VectorForm out(L.cartan());
  for (const auto& [gen, coeff] : L.components()) out.set(gen, iota(coeff));
  return out;
}

// Algebraic bracket, graded by total degree: [K,L] = i_K L - (-1)^{|K||L|} i_L K.
inline VectorForm algebraic_bracket(const VectorForm& K, const VectorForm& L) {
  int sign = (K.degree() % 2 != 0) && (L.degree() % 2 != 0) ? -1 : 1;
  return insert(K, L) - Rational(sign) * insert(L, K);
}

// Differential bracket extracted from [L_K, L_L] = L_{[K,L]}; for vector
// fields this is the Lie bracket, for one-forms it yields torsion terms.
inline VectorForm differential_bracket(const VectorForm& K, const VectorForm& L,
                                       const Derivation& d) {
  Derivation c = commutator(K.lie(d), L.lie(d));
  VectorForm out(K.cartan());
  for (int gen : K.cartan().body) out.set(gen, c.value(gen));
  return out;
}

// Coordinates x^i paired with odd symbols for d/dx^i; multivector fields are
// polynomials in those symbols.
struct MultivectorChart {
  ChartPtr chart;
  std::vector<int> coords;
  std::vector<int> duals;
};

inline MultivectorChart make_multivector_chart(const std::vector<std::string>& names) {
  std::vector<Generator> gens;
  for (const auto& n : names) gens.push_back({n, 0, 0});
  for (const auto& n : names) gens.push_back({"D" + n, 1, 0});
  MultivectorChart mc;
  mc.chart = Chart::make(std::move(gens));
  for (int i = 0; i < static_cast<int>(names.size()); ++i) {
    mc.coords.push_back(i);
    mc.duals.push_back(i + static_cast<int>(names.size()));
  }
  return mc;
}

// Schouten bracket on multivector fields.  On vector fields it is the Lie
// bracket; on a bivector P the value [P,P] is twice the Jacobi obstruction.
inline GradedElement schouten(const MultivectorChart& mc, const GradedElement& F,
                              const GradedElement& G) {
  GradedElement out = GradedElement::zero(mc.chart);
  for (std::size_t i = 0; i < mc.coords.size(); ++i) {
    out += F.derive_right(mc.duals[i]) * G.derive_left(mc.coords[i]);
    out -= F.derive_right(mc.coords[i]) * G.derive_left(mc.duals[i]);
  }
  return out;
}

}  // namespace gcgeo
