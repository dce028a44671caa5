#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gcgeo/linalg.hpp"
#include "gcgeo/rational.hpp"
#include "gcgeo/report.hpp"

namespace gcgeo {

// Flat symplectic torus R^2n/Z^2n with a constant rational form.
struct SymplecticTorus {
  QMat omega;
  std::vector<std::string> names;

  SymplecticTorus(QMat w, std::vector<std::string> nm)
      : omega(std::move(w)), names(std::move(nm)) {
    if (omega.rows != omega.cols || omega.rows % 2 != 0)
      throw std::invalid_argument("form must be square of even dimension");
    if (!(omega + omega.transpose()).is_zero())
      throw std::invalid_argument("form must be antisymmetric");
    if (!inverse(omega)) throw std::invalid_argument("form must be invertible");
    if (static_cast<int>(names.size()) != omega.rows)
      throw std::invalid_argument("one name per coordinate");
  }

  int dim() const { return omega.rows; }
};

// Linear brane data: an integral tangent basis for the subtorus, a rational
// offset, and the curvature normalized by 2(pi)i and written in that basis so
// every entry stays rational.
struct CoisotropicBrane {
  QMat directions;
  std::vector<Rational> offset;
  QMat curvature;
};

namespace detail {

inline bool is_integral(const Rational& r) { return denominator(r) == 1; }

inline void validate_brane(const SymplecticTorus& T, const CoisotropicBrane& b) {
  int n = T.dim(), k = b.directions.cols;
  if (b.directions.rows != n || static_cast<int>(b.offset.size()) != n ||
      b.curvature.rows != k || b.curvature.cols != k)
    throw std::invalid_argument("brane shapes do not match the torus");
  for (const auto& v : b.directions.a)
    if (!is_integral(v)) throw std::invalid_argument("subtorus basis must be integral");
  if (rank(b.directions) != k)
    throw std::invalid_argument("subtorus basis must be independent");
  if (!(b.curvature + b.curvature.transpose()).is_zero())
    throw std::invalid_argument("curvature must be antisymmetric");
}

// identity columns completing src to a basis of its ambient space
inline QMat complement(const QMat& src) {
  int k = src.rows;
  QMat acc = src;
  QMat out(k, 0);
  int r = rank(acc);
  for (int i = 0; i < k && r < k; ++i) {
    QMat e(k, 1);
    e.at(i, 0) = rat(1);
    QMat widened = hstack(acc, e);
    int rw = rank(widened);
    if (rw > r) {
      acc = std::move(widened);
      r = rw;
      out = hstack(out, e);
    }
  }
  return out;
}

inline QMat integral_primitive(QMat col) {
  BigInt l = 1;
  for (const auto& v : col.a) l = lcm(l, denominator(v));
  for (auto& v : col.a) v *= Rational(l);
  BigInt g = 0;
  for (const auto& v : col.a) g = gcd(g, numerator(v));
  if (g != 0)
    for (auto& v : col.a) v /= Rational(g);
  for (const auto& v : col.a) {
    if (v == 0) continue;
    if (v < 0)
      for (auto& w : col.a) w = -w;
    break;
  }
  return col;
}

}  // namespace detail

// Checks the brane conditions: the subtorus is coisotropic, the curvature
// kills the characteristic directions, and the reduced curvature against the
// reduced form is a complex structure on the transverse space.
inline Report is_coisotropic_brane(const SymplecticTorus& T, const CoisotropicBrane& b) {
  detail::validate_brane(T, b);
  Report rep("coisotropic brane");
  const QMat& B = b.directions;

  QMat perp = kernel_basis(B.transpose() * T.omega);
  int rb = rank(B);
  bool coiso = true;
  for (int j = 0; j < perp.cols && coiso; ++j)
    coiso = rank(hstack(B, perp.col(j))) == rb;
  rep.add("tangent directions are coisotropic", coiso,
          coiso ? "" : "the symplectic orthogonal leaves the subtorus");

  QMat g = B.transpose() * T.omega * B;
  QMat chars = kernel_basis(g);
  bool flat = (b.curvature * chars).is_zero();
  rep.add("curvature vanishes on the characteristic directions", flat);

  QMat c = detail::complement(chars);
  auto reduced = inverse(c.transpose() * g * c);
  bool transverse = false;
  if (reduced) {
    QMat k = *reduced * (c.transpose() * b.curvature * c);
    transverse = k * k == -QMat::identity(k.rows);
  }
  rep.add("transverse structure squares to minus one", transverse,
          reduced ? "" : "reduced form is degenerate");
  rep.note("characteristic rank", std::to_string(chars.cols));
  rep.note("transverse dimension", std::to_string(c.cols));
  return rep;
}

// Doubled torus T x T^dual carrying the split form (1/2)w (+) -(1/2)w^{-1}
// and the complex structure (v, xi) -> (w^{-1} xi, -w v).
struct DoubledTorus {
  SymplecticTorus base;
  QMat form;
  QMat complex_structure;

  explicit DoubledTorus(SymplecticTorus t) : base(std::move(t)) {
    int n = base.dim();
    QMat winv = *inverse(base.omega);
    form = QMat(2 * n, 2 * n);
    form.paste(0, 0, rat(1, 2) * base.omega);
    form.paste(n, n, rat(-1, 2) * winv);
    complex_structure = QMat(2 * n, 2 * n);
    complex_structure.paste(0, n, winv);
    complex_structure.paste(n, 0, -base.omega);
  }

  int dim() const { return 2 * base.dim(); }

  std::vector<std::string> names() const {
    std::vector<std::string> out = base.names;
    for (const auto& nm : base.names) out.push_back(nm + "^");
    return out;
  }
};

inline Report doubled_check(const DoubledTorus& D) {
  Report rep("doubled torus");
  const QMat& j = D.complex_structure;
  rep.add("complex structure squares to minus one", j * j == -QMat::identity(D.dim()));
  bool compat = j.transpose() * D.form * j == D.form;
  rep.note("form preserved by the complex structure", compat ? "yes" : "no");
  return rep;
}

// Affine subtorus given by an integral tangent basis and an offset.
struct LinearSubtorus {
  QMat directions;
  std::vector<Rational> offset;
};

// Lift of a brane to the doubled torus: over the subtorus, the dual
// coordinates restricted to the tangent directions equal minus the curvature
// applied to the base point, and they are free on the annihilator.
inline LinearSubtorus lift(const SymplecticTorus& T, const CoisotropicBrane& b) {
  if (!is_coisotropic_brane(T, b).pass())
    throw std::domain_error("brane fails the coisotropic check");
  int n = T.dim(), k = b.directions.cols;
  QMat bt = b.directions.transpose();

  QMat duals = *solve(bt, -b.curvature.transpose());
  QMat ann = kernel_basis(bt);
  LinearSubtorus out;
  out.directions = QMat(2 * n, k + ann.cols);
  out.directions.paste(0, 0, b.directions);
  out.directions.paste(n, 0, duals);
  for (int j = 0; j < ann.cols; ++j)
    out.directions.paste(n, k + j, detail::integral_primitive(ann.col(j)));
  for (const auto& v : out.directions.a)
    if (!detail::is_integral(v))
      throw std::domain_error("the lift does not descend to the doubled torus");
  out.offset = b.offset;
  out.offset.resize(static_cast<std::size_t>(2 * n), rat(0));
  return out;
}

// Lift equations for a brane filling the torus, one per dual coordinate.
inline std::vector<std::string> lift_equations(const SymplecticTorus& T,
                                               const CoisotropicBrane& b) {
  int n = T.dim();
  if (b.directions.cols != n) throw std::invalid_argument("equations need a filling brane");
  LinearSubtorus L = lift(T, b);
  QMat graph = L.directions.block(n, 0, n, n) * *inverse(b.directions);
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) {
    std::string rhs;
    for (int j = 0; j < n; ++j) {
      const Rational& c = graph.at(i, j);
      if (c == 0) continue;
      if (!rhs.empty()) rhs += c > 0 ? " + " : " - ";
      else if (c < 0) rhs += "-";
      Rational mag = abs(c);
      if (mag != 1) rhs += rational_string(mag) + "*";
      rhs += T.names[static_cast<std::size_t>(j)];
    }
    if (rhs.empty()) rhs = "0";
    out.push_back(T.names[static_cast<std::size_t>(i)] + "^ = " + rhs);
  }
  return out;
}

inline bool is_lagrangian_in_double(const LinearSubtorus& L, const DoubledTorus& D) {
  if (L.directions.rows != D.dim()) throw std::invalid_argument("ambient dimension mismatch");
  if (rank(L.directions) != D.dim() / 2) return false;
  return (L.directions.transpose() * D.form * L.directions).is_zero();
}

inline bool is_complex_in_double(const LinearSubtorus& L, const DoubledTorus& D) {
  if (L.directions.rows != D.dim()) throw std::invalid_argument("ambient dimension mismatch");
  QMat moved = D.complex_structure * L.directions;
  return rank(hstack(L.directions, moved)) == rank(L.directions);
}

}  // namespace gcgeo
