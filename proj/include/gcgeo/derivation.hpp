#pragma once

#include <map>
#include <stdexcept>
#include <utility>

#include "gcgeo/graded.hpp"

namespace gcgeo {

namespace detail {

inline bool homogeneous_of_degree(const GradedElement& e, int degree) {
  for (const auto& [t, c] : e.terms()) {
    auto [coh, form] = e.term_bidegree(t);
    if (coh + form != degree) return false;
  }
  return true;
}

}  // namespace detail

// Graded left derivation of the chart algebra, determined by its values on
// generators: D(f) = sum_g D(g) * d^L_g f.  Values are kept homogeneous so
// the derivation has a definite total degree.
class Derivation {
 public:
  Derivation(ChartPtr chart, int degree) : chart_(std::move(chart)), degree_(degree) {}

  const ChartPtr& chart() const { return chart_; }
  int degree() const { return degree_; }
  bool odd() const { return degree_ % 2 != 0; }

  Derivation& set(int gen, GradedElement value) {
    require_same_chart(chart_, value.chart());
    if (!detail::homogeneous_of_degree(value, degree_ + chart_->gen(gen).degree()))
      throw std::invalid_argument("derivation value for '" + chart_->gen(gen).name +
                                  "' has the wrong degree");
    if (value.is_zero())
      values_.erase(gen);
    else
      values_[gen] = std::move(value);
    return *this;
  }

  Derivation& set(std::string_view gen, GradedElement value) {
    return set(chart_->index(gen), std::move(value));
  }

  GradedElement value(int gen) const {
    auto it = values_.find(gen);
    return it == values_.end() ? GradedElement::zero(chart_) : it->second;
  }
  GradedElement value(std::string_view gen) const { return value(chart_->index(gen)); }

  const std::map<int, GradedElement>& values() const { return values_; }
  bool is_zero() const { return values_.empty(); }

  GradedElement operator()(const GradedElement& f) const {
    require_same_chart(chart_, f.chart());
    GradedElement out = GradedElement::zero(chart_);
    for (const auto& [gen, coeff] : values_) out += coeff * f.derive_left(gen);
    return out;
  }

  Derivation& operator+=(const Derivation& other) {
    require_same_chart(chart_, other.chart_);
    if (degree_ != other.degree_) throw std::invalid_argument("derivation degree mismatch");
    for (const auto& [gen, coeff] : other.values_) set(gen, value(gen) + coeff);
    return *this;
  }
  friend Derivation operator+(Derivation a, const Derivation& b) { return a += b; }
  friend Derivation operator-(Derivation a, Derivation b) { return a += b *= Rational(-1); }

  Derivation& operator*=(const Rational& s) {
    if (s == 0) {
      values_.clear();
    } else {
      for (auto& [gen, coeff] : values_) coeff *= s;
    }
    return *this;
  }
  friend Derivation operator*(Derivation d, const Rational& s) { return d *= s; }
  friend Derivation operator*(const Rational& s, Derivation d) { return d *= s; }

  // Graded commutator [a, b] = a b - (-1)^{|a||b|} b a, itself a derivation.
  friend Derivation commutator(const Derivation& a, const Derivation& b) {
    require_same_chart(a.chart_, b.chart_);
    Derivation out(a.chart_, a.degree_ + b.degree_);
    int sign = (a.degree_ % 2 != 0) && (b.degree_ % 2 != 0) ? -1 : 1;
    for (int gen = 0; gen < a.chart_->size(); ++gen) {
      GradedElement v = a(b.value(gen)) - Rational(sign) * b(a.value(gen));
      out.set(gen, std::move(v));
    }
    return out;
  }

 private:
  ChartPtr chart_;
  int degree_;
  std::map<int, GradedElement> values_;
};

}  // namespace gcgeo
