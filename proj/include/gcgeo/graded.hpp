#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gcgeo/chart.hpp"
#include "gcgeo/rational.hpp"

namespace gcgeo {

// One monomial: exponents over the even generators plus a bitmask over the
// odd ones.  Map ordering on (exps, odd) gives a canonical term order.
struct Term {
  std::vector<std::uint16_t> exps;
  std::uint64_t odd = 0;

  auto operator<=>(const Term&) const = default;
};

namespace detail {

// Sign of sorting the concatenation (odd part a)(odd part b) by bit index.
inline int koszul_sign(std::uint64_t a, std::uint64_t b) {
  int inversions = 0;
  for (std::uint64_t rest = b; rest != 0; rest &= rest - 1) {
    int j = std::countr_zero(rest);
    std::uint64_t above = j >= 63 ? 0 : a >> (j + 1);
    inversions += std::popcount(above);
  }
  return inversions % 2 == 0 ? 1 : -1;
}

inline std::uint64_t bits_below(int j) { return (std::uint64_t{1} << j) - 1; }
inline std::uint64_t bits_above(std::uint64_t mask, int j) {
  return j >= 63 ? 0 : mask >> (j + 1);
}

}  // namespace detail

// Element of the free graded-commutative algebra on a chart, with exact
// rational coefficients.  Zero coefficients are never stored, so equality
// is plain map comparison.
class GradedElement {
 public:
  GradedElement() = default;
  explicit GradedElement(ChartPtr chart) : chart_(std::move(chart)) {}

  static GradedElement zero(ChartPtr chart) { return GradedElement(std::move(chart)); }

  static GradedElement constant(ChartPtr chart, const Rational& c) {
    GradedElement e(std::move(chart));
    if (c != 0) e.terms_.emplace(Term{std::vector<std::uint16_t>(e.chart_->even_count(), 0), 0}, c);
    return e;
  }

  static GradedElement generator(ChartPtr chart, int i) {
    GradedElement e(chart);
    Term t{std::vector<std::uint16_t>(chart->even_count(), 0), 0};
    if (chart->gen(i).odd())
      t.odd = std::uint64_t{1} << chart->slot(i);
    else
      t.exps[chart->slot(i)] = 1;
    e.terms_.emplace(std::move(t), Rational(1));
    return e;
  }

  static GradedElement generator(const ChartPtr& chart, std::string_view name) {
    return generator(chart, chart->index(name));
  }

  const ChartPtr& chart() const { return chart_; }
  const std::map<Term, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  bool operator==(const GradedElement& other) const {
    return chart_->same(*other.chart_) && terms_ == other.terms_;
  }
  bool operator!=(const GradedElement& other) const { return !(*this == other); }

  GradedElement operator-() const {
    GradedElement out(chart_);
    for (const auto& [t, c] : terms_) out.terms_.emplace(t, -c);
    return out;
  }

  GradedElement& operator+=(const GradedElement& other) {
    require_same_chart(chart_, other.chart_);
    for (const auto& [t, c] : other.terms_) add_term(t, c);
    return *this;
  }
  GradedElement& operator-=(const GradedElement& other) {
    require_same_chart(chart_, other.chart_);
    for (const auto& [t, c] : other.terms_) add_term(t, -c);
    return *this;
  }
  friend GradedElement operator+(GradedElement a, const GradedElement& b) { return a += b; }
  friend GradedElement operator-(GradedElement a, const GradedElement& b) { return a -= b; }

  GradedElement& operator*=(const Rational& s) {
    if (s == 0) {
      terms_.clear();
    } else {
      for (auto& [t, c] : terms_) c *= s;
    }
    return *this;
  }
  friend GradedElement operator*(GradedElement a, const Rational& s) { return a *= s; }
  friend GradedElement operator*(const Rational& s, GradedElement a) { return a *= s; }
  GradedElement operator/(const Rational& s) const {
    if (s == 0) throw std::domain_error("division by zero");
    GradedElement out = *this;
    return out *= Rational(denominator(s), numerator(s));
  }

  friend GradedElement operator*(const GradedElement& a, const GradedElement& b) {
    require_same_chart(a.chart_, b.chart_);
    GradedElement out(a.chart_);
    for (const auto& [ta, ca] : a.terms_) {
      for (const auto& [tb, cb] : b.terms_) {
        if (ta.odd & tb.odd) continue;  // repeated odd generator
        Term t{ta.exps, ta.odd | tb.odd};
        for (std::size_t s = 0; s < t.exps.size(); ++s) {
          unsigned sum = unsigned(t.exps[s]) + unsigned(tb.exps[s]);
          if (sum > 0xFFFF) throw std::overflow_error("exponent overflow");
          t.exps[s] = static_cast<std::uint16_t>(sum);
        }
        Rational c = ca * cb;
        if (detail::koszul_sign(ta.odd, tb.odd) < 0) c = -c;
        out.add_term(std::move(t), c);
      }
    }
    return out;
  }

  GradedElement pow(unsigned n) const {
    GradedElement out = constant(chart_, 1);
    GradedElement base = *this;
    for (; n; n >>= 1) {
      if (n & 1) out = out * base;
      if (n > 1) base = base * base;
    }
    return out;
  }

  // Left derivative with respect to generator i: d/dg applied from the left,
  // so for odd g the sign counts odd factors standing before g.
  GradedElement derive_left(int i) const {
    GradedElement out(chart_);
    const bool odd = chart_->gen(i).odd();
    const int slot = chart_->slot(i);
    for (const auto& [t, c] : terms_) {
      if (odd) {
        std::uint64_t bit = std::uint64_t{1} << slot;
        if (!(t.odd & bit)) continue;
        Term r{t.exps, t.odd & ~bit};
        int sign = std::popcount(t.odd & detail::bits_below(slot)) % 2 ? -1 : 1;
        out.add_term(std::move(r), sign < 0 ? -c : c);
      } else {
        if (t.exps[slot] == 0) continue;
        Term r = t;
        r.exps[slot] -= 1;
        out.add_term(std::move(r), c * t.exps[slot]);
      }
    }
    return out;
  }

  // Right derivative: for odd g the sign counts odd factors after g.
  GradedElement derive_right(int i) const {
    GradedElement out(chart_);
    const bool odd = chart_->gen(i).odd();
    const int slot = chart_->slot(i);
    for (const auto& [t, c] : terms_) {
      if (odd) {
        std::uint64_t bit = std::uint64_t{1} << slot;
        if (!(t.odd & bit)) continue;
        Term r{t.exps, t.odd & ~bit};
        int sign = std::popcount(detail::bits_above(t.odd, slot)) % 2 ? -1 : 1;
        out.add_term(std::move(r), sign < 0 ? -c : c);
      } else {
        if (t.exps[slot] == 0) continue;
        Term r = t;
        r.exps[slot] -= 1;
        out.add_term(std::move(r), c * t.exps[slot]);
      }
    }
    return out;
  }

  // Algebra map determined by one image per generator, all on a common
  // target chart.  Images must match the parity of their generator.
  GradedElement substituted(const std::vector<GradedElement>& images) const {
    if (static_cast<int>(images.size()) != chart_->size())
      throw std::invalid_argument("one image per generator required");
    if (images.empty()) return *this;
    ChartPtr target = images.front().chart();
    for (int i = 0; i < chart_->size(); ++i) {
      require_same_chart(target, images[i].chart());
      if (images[i].is_zero()) continue;  // zero has every parity
      auto parity = images[i].parity();
      if (parity && *parity != (chart_->gen(i).odd() ? 1 : 0))
        throw std::invalid_argument("substitution image has wrong parity for '" +
                                    chart_->gen(i).name + "'");
    }
    GradedElement out(target);
    for (const auto& [t, c] : terms_) {
      GradedElement prod = constant(target, c);
      for (int s = 0; s < chart_->even_count(); ++s)
        if (t.exps[s]) prod = prod * images[chart_->even_gen(s)].pow(t.exps[s]);
      for (std::uint64_t rest = t.odd; rest != 0; rest &= rest - 1)
        prod = prod * images[chart_->odd_gen(std::countr_zero(rest))];
      out += prod;
    }
    return out;
  }

  // Embeds into a chart that contains every generator of this one by name.
  GradedElement embedded(const ChartPtr& target) const {
    std::vector<GradedElement> images;
    images.reserve(chart_->size());
    for (const auto& g : chart_->gens()) images.push_back(generator(target, g.name));
    return substituted(images);
  }

  // Value at a rational point, indexed by even slot.  Defined only for
  // elements of the even polynomial subring.
  Rational evaluate(const std::vector<Rational>& point) const {
    if (static_cast<int>(point.size()) != chart_->even_count())
      throw std::invalid_argument("point must assign every even generator");
    Rational value = 0;
    for (const auto& [t, c] : terms_) {
      if (t.odd) throw std::invalid_argument("cannot evaluate an odd monomial");
      Rational m = c;
      for (std::size_t s = 0; s < t.exps.size(); ++s)
        for (int k = 0; k < t.exps[s]; ++k) m *= point[s];
      value += m;
    }
    return value;
  }

  std::pair<int, int> term_bidegree(const Term& t) const {
    int coh = 0, form = 0;
    for (int s = 0; s < chart_->even_count(); ++s) {
      const auto& g = chart_->gen(chart_->even_gen(s));
      coh += t.exps[s] * g.coh;
      form += t.exps[s] * g.form;
    }
    for (std::uint64_t rest = t.odd; rest != 0; rest &= rest - 1) {
      const auto& g = chart_->gen(chart_->odd_gen(std::countr_zero(rest)));
      coh += g.coh;
      form += g.form;
    }
    return {coh, form};
  }

  // Bidegree when every term agrees, nullopt otherwise (also for zero).
  std::optional<std::pair<int, int>> bidegree() const {
    std::optional<std::pair<int, int>> deg;
    for (const auto& [t, c] : terms_) {
      auto d = term_bidegree(t);
      if (deg && *deg != d) return std::nullopt;
      deg = d;
    }
    return deg;
  }

  // Total degree; zero reports 0, mixed-degree elements throw.
  int degree() const {
    std::optional<int> deg;
    for (const auto& [t, c] : terms_) {
      auto [coh, form] = term_bidegree(t);
      if (deg && *deg != coh + form) throw std::logic_error("inhomogeneous element");
      deg = coh + form;
    }
    return deg.value_or(0);
  }

  // 0 for even, 1 for odd, nullopt for mixed parity; zero reports even.
  std::optional<int> parity() const {
    if (terms_.empty()) return 0;
    int p = std::popcount(terms_.begin()->first.odd) % 2;
    for (const auto& [t, c] : terms_)
      if (std::popcount(t.odd) % 2 != p) return std::nullopt;
    return p;
  }

  // Terms of one bidegree only.
  GradedElement component(int coh, int form) const {
    GradedElement out(chart_);
    for (const auto& [t, c] : terms_)
      if (term_bidegree(t) == std::pair{coh, form}) out.terms_.emplace(t, c);
    return out;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [t, c] : terms_) {
      std::string mono;
      for (int i = 0; i < chart_->size(); ++i) {
        const auto& g = chart_->gen(i);
        int e = g.odd() ? ((t.odd >> chart_->slot(i)) & 1 ? 1 : 0) : t.exps[chart_->slot(i)];
        if (e == 0) continue;
        if (!mono.empty()) mono += '*';
        mono += g.name;
        if (e > 1) mono += '^' + std::to_string(e);
      }
      Rational a = c < 0 ? Rational(-c) : c;
      std::string piece;
      if (mono.empty())
        piece = a.str();
      else if (a == 1)
        piece = mono;
      else
        piece = a.str() + '*' + mono;
      if (out.empty())
        out = (c < 0 ? "-" : "") + piece;
      else
        out += (c < 0 ? " - " : " + ") + piece;
    }
    return out;
  }

  void add_term(Term t, const Rational& c) {
    if (c == 0) return;
    auto [it, fresh] = terms_.try_emplace(std::move(t), c);
    if (!fresh) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

 private:
  ChartPtr chart_;
  std::map<Term, Rational> terms_;
};

}  // namespace gcgeo
