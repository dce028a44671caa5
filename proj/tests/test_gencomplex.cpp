#include <catch2/catch_amalgamated.hpp>

#include "gcgeo/gencomplex.hpp"

using namespace gcgeo;

namespace {

CartanChart plane() {
  return make_cartan_chart({{"x", 0, 0}, {"y", 0, 0}});
}

CartanChart space() {
  return make_cartan_chart({{"x", 0, 0}, {"y", 0, 0}, {"z", 0, 0}});
}

CartanChart phase_plane() {
  return make_cartan_chart({{"r1", 0, 0}, {"th1", 0, 0}, {"r2", 0, 0}, {"th2", 0, 0}});
}

GradedElement g(const CartanChart& cc, std::string_view name) {
  return GradedElement::generator(cc.chart, name);
}

// Standard symplectic matrix dr1^dth1 + dr2^dth2 on the phase plane.
QMat standard_omega() {
  QMat w(4, 4);
  w.at(0, 1) = 1;
  w.at(1, 0) = -1;
  w.at(2, 3) = 1;
  w.at(3, 2) = -1;
  return w;
}

}  // namespace

TEST_CASE("dorfman bracket on coordinate sections") {
  CartanChart cc = space();
  GeneralizedSection dx = coordinate_vector(cc, 0);
  GeneralizedSection dy = coordinate_vector(cc, 1);

  CHECK(dorfman(dx, dy).is_zero());

  GeneralizedSection b(cc);
  b.form = g(cc, "x") * g(cc, "dy");
  GeneralizedSection out = dorfman(dx, b);
  CHECK(out.vec.is_zero());
  CHECK(out.form == g(cc, "dy"));
}

TEST_CASE("twist contributes the double contraction") {
  CartanChart cc = space();
  GradedElement H = g(cc, "dx") * g(cc, "dy") * g(cc, "dz");
  GeneralizedSection dx = coordinate_vector(cc, 0);
  GeneralizedSection dy = coordinate_vector(cc, 1);

  GeneralizedSection out = dorfman(dx, dy, H);
  CHECK(out.vec.is_zero());
  CHECK(out.form == -g(cc, "dz"));
}

TEST_CASE("non-closed twist is rejected") {
  CartanChart cc = phase_plane();
  GradedElement H = g(cc, "th1") * g(cc, "dr1") * g(cc, "dr2") * g(cc, "dth2");
  GeneralizedSection a = coordinate_vector(cc, 0);
  CHECK_THROWS_AS(dorfman(a, a, H), std::invalid_argument);

  GradedElement wrong_degree = g(cc, "dr1") * g(cc, "dth1");
  CHECK_THROWS_AS(dorfman(a, a, wrong_degree), std::invalid_argument);
}

TEST_CASE("dorfman leibniz identity on polynomial sections") {
  CartanChart cc = space();
  GradedElement x = g(cc, "x"), y = g(cc, "y"), z = g(cc, "z");

  GeneralizedSection a(cc), b(cc), c(cc);
  a.vec.set("y", x * x);
  a.form = y * g(cc, "dz");
  b.vec.set("z", y * y);
  b.form = x * g(cc, "dx");
  c.vec.set("x", z);
  c.form = (x + y) * g(cc, "dy");

  GradedElement H = g(cc, "dx") * g(cc, "dy") * g(cc, "dz");
  GeneralizedSection lhs = dorfman(a, dorfman(b, c, H), H);
  GeneralizedSection rhs = dorfman(dorfman(a, b, H), c, H) + dorfman(b, dorfman(a, c, H), H);
  CHECK(lhs == rhs);
}

TEST_CASE("courant bracket is the antisymmetrization") {
  CartanChart cc = space();
  GeneralizedSection a(cc), b(cc);
  a.vec.set("x", g(cc, "y"));
  a.form = g(cc, "x") * g(cc, "dy");
  b.vec.set("y", g(cc, "x") * g(cc, "x"));
  b.form = g(cc, "z") * g(cc, "dz");

  CHECK(courant(a, b) + courant(b, a) == GeneralizedSection(cc));

  // The symmetric part of the Dorfman bracket is exact.
  Derivation d = exterior_d(cc);
  GeneralizedSection self = dorfman(a, a);
  CHECK(self.vec.is_zero());
  CHECK(self.form == d(pairing(a, a)));
}

TEST_CASE("symplectic structure passes all three checks") {
  CartanChart cc = phase_plane();
  GCStructure J = from_symplectic(cc, standard_omega());

  QMat winv = *inverse(standard_omega());
  CHECK(J.block_i().is_zero());
  CHECK(J.block_p() == SymbolicMatrix::constant(cc.chart, winv));
  CHECK(J.block_q() == SymbolicMatrix::constant(cc.chart, -standard_omega()));

  Report rep = gc_check(J);
  REQUIRE(rep.items.size() == 3);
  CHECK(rep.items[0].pass);
  CHECK(rep.items[1].pass);
  CHECK(rep.items[2].pass);
}

TEST_CASE("random invertible antisymmetric forms define structures") {
  CartanChart cc = phase_plane();
  std::vector<QMat> forms;
  for (int s = 1; s <= 3; ++s) {
    QMat w(4, 4);
    w.at(0, 1) = s;
    w.at(0, 2) = Rational(1, s + 1);
    w.at(0, 3) = -s;
    w.at(1, 2) = 2 * s + 1;
    w.at(1, 3) = Rational(s, 3);
    w.at(2, 3) = -1;
    w = w - w.transpose();
    forms.push_back(w);
  }
  for (const QMat& w : forms) {
    REQUIRE(inverse(w));
    CHECK(gc_check(from_symplectic(cc, w)).pass());
  }
}

TEST_CASE("constant complex structures pass") {
  CartanChart cc = plane();
  QMat I0(2, 2);
  I0.at(0, 1) = -1;
  I0.at(1, 0) = 1;
  CHECK(gc_check(from_complex(cc, I0)).pass());

  // A conjugated square root of minus one.
  QMat I1(2, 2);
  I1.at(0, 0) = 1;
  I1.at(0, 1) = -2;
  I1.at(1, 0) = 1;
  I1.at(1, 1) = -1;
  CHECK(gc_check(from_complex(cc, I1)).pass());

  CHECK_THROWS_AS(from_complex(cc, QMat::identity(2)), std::domain_error);
}

TEST_CASE("degenerate form fails to square") {
  CartanChart cc = plane();
  CHECK_THROWS_AS(from_symplectic(cc, QMat(2, 2)), std::domain_error);

  // Built by hand: zero Q block and invertible P cannot square to minus one.
  QMat p(2, 2);
  p.at(0, 1) = 1;
  p.at(1, 0) = -1;
  GCStructure J(cc, SymbolicMatrix(cc.chart, 2, 2), SymbolicMatrix::constant(cc.chart, p),
                SymbolicMatrix(cc.chart, 2, 2));
  Report rep = gc_check(J);
  CHECK_FALSE(rep.items[0].pass);
}

TEST_CASE("shear of a symplectic structure detects its twist") {
  CartanChart cc = phase_plane();
  GradedElement r1 = g(cc, "r1");

  // Conjugate J_omega by the shear (v, xi) -> (v, xi + i_v B) with
  // B = r1 dr2^dth2; the result squares and pairs but is only integrable
  // against the bracket twisted by dB.
  SymbolicMatrix E = SymbolicMatrix::identity(cc.chart, 8);
  SymbolicMatrix Einv = E;
  E.at(6, 3) = -r1;
  E.at(7, 2) = r1;
  Einv.at(6, 3) = r1;
  Einv.at(7, 2) = -r1;

  SymbolicMatrix M = E * from_symplectic(cc, standard_omega()).matrix() * Einv;
  SymbolicMatrix bi(cc.chart, 4, 4), bp(cc.chart, 4, 4), bq(cc.chart, 4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      bi.at(i, j) = -M.at(i, j);
      bp.at(i, j) = M.at(i, 4 + j);
      bq.at(i, j) = M.at(4 + i, j);
    }
  CHECK(bi.at(2, 2) == -r1);
  CHECK(bi.at(3, 3) == -r1);
  CHECK(bq.at(2, 3) == -GradedElement::constant(cc.chart, 1) - r1 * r1);

  GCStructure J(cc, bi, bp, bq);
  Report untwisted = gc_check(J);
  CHECK(untwisted.items[0].pass);
  CHECK(untwisted.items[1].pass);
  CHECK_FALSE(untwisted.items[2].pass);

  J.set_twist(g(cc, "dr1") * g(cc, "dr2") * g(cc, "dth2"));
  CHECK(gc_check(J).pass());
}

TEST_CASE("pairing is preserved on polynomial sections") {
  CartanChart cc = phase_plane();
  GCStructure J = from_symplectic(cc, standard_omega());
  GeneralizedSection a(cc), b(cc);
  a.vec.set("r1", g(cc, "th1"));
  a.form = g(cc, "r2") * g(cc, "dth2");
  b.vec.set("th2", g(cc, "r1") * g(cc, "r1"));
  b.form = g(cc, "dr1");
  CHECK(pairing(J.apply(a), J.apply(b)) == pairing(a, b));
}

TEST_CASE("poisson block of a symplectic structure") {
  CartanChart cc = phase_plane();
  PoissonPart pp = poisson_of(from_symplectic(cc, standard_omega()));
  CHECK(pp.report.pass());

  GradedElement expected = GradedElement::zero(pp.mc.chart);
  expected -= GradedElement::generator(pp.mc.chart, "Dr1") *
              GradedElement::generator(pp.mc.chart, "Dth1");
  expected -= GradedElement::generator(pp.mc.chart, "Dr2") *
              GradedElement::generator(pp.mc.chart, "Dth2");
  CHECK(pp.bivector == expected);
  CHECK(is_poisson(pp.mc, pp.bivector));
}

TEST_CASE("complex structure has zero poisson block") {
  CartanChart cc = plane();
  QMat I0(2, 2);
  I0.at(0, 1) = -1;
  I0.at(1, 0) = 1;
  PoissonPart pp = poisson_of(from_complex(cc, I0));
  CHECK(pp.report.pass());
  CHECK(pp.bivector.is_zero());
}

TEST_CASE("non-poisson block is reported with its residual") {
  CartanChart cc = space();
  SymbolicMatrix p(cc.chart, 3, 3);
  p.at(0, 1) = g(cc, "y");
  p.at(1, 0) = -g(cc, "y");
  p.at(1, 2) = GradedElement::constant(cc.chart, 1);
  p.at(2, 1) = GradedElement::constant(cc.chart, -1);
  GCStructure J(cc, SymbolicMatrix(cc.chart, 3, 3), p, SymbolicMatrix(cc.chart, 3, 3));

  PoissonPart pp = poisson_of(J);
  CHECK_FALSE(pp.report.pass());
  GradedElement resid = schouten(pp.mc, pp.bivector, pp.bivector);
  GradedElement expected = Rational(-2) * GradedElement::generator(pp.mc.chart, "Dx") *
                           GradedElement::generator(pp.mc.chart, "Dy") *
                           GradedElement::generator(pp.mc.chart, "Dz");
  CHECK(resid == expected);

  // The same defect shows up as a failed integrability check.
  CHECK_FALSE(gc_check(J).items[2].pass);
}

TEST_CASE("space filling submanifold is stable for a complex structure") {
  CartanChart cc = plane();
  QMat I0(2, 2);
  I0.at(0, 1) = -1;
  I0.at(1, 0) = 1;
  GCStructure J = from_complex(cc, I0);

  GeneralizedSubmanifold sub{{QMat::identity(2), QMat(2, 1)}, QMat(2, 2)};
  Report rep = tau_stability(J, sub);
  CHECK(rep.pass());
  REQUIRE(rep.notes.size() == 1);  // one complex generator spans L
}

TEST_CASE("lagrangian subspace is stable for the symplectic structure") {
  CartanChart cc = phase_plane();
  GCStructure J = from_symplectic(cc, standard_omega());

  QMat basis(4, 2);
  basis.at(0, 0) = 1;  // the r1 axis
  basis.at(2, 1) = 1;  // the r2 axis
  GeneralizedSubmanifold sub{{basis, QMat(4, 1)}, QMat(2, 2)};
  Report rep = tau_stability(J, sub);
  CHECK(rep.pass());
  CHECK(rep.notes.size() == 2);
}

TEST_CASE("non coisotropic line is unstable") {
  CartanChart cc = phase_plane();
  GCStructure J = from_symplectic(cc, standard_omega());

  QMat basis(4, 1);
  basis.at(0, 0) = 1;
  basis.at(1, 0) = 2;
  basis.at(3, 0) = -1;
  GeneralizedSubmanifold sub{{basis, QMat(4, 1)}, QMat(1, 1)};
  Report rep = tau_stability(J, sub);
  CHECK_FALSE(rep.pass());
  CHECK(rep.items[0].pass);        // constant along the line
  CHECK_FALSE(rep.items[1].pass);  // but not stable
}

TEST_CASE("stability validates its input") {
  CartanChart cc = plane();
  QMat I0(2, 2);
  I0.at(0, 1) = -1;
  I0.at(1, 0) = 1;
  GCStructure J = from_complex(cc, I0);

  QMat dependent(2, 2);
  dependent.at(0, 0) = 1;
  dependent.at(0, 1) = 2;
  CHECK_THROWS_AS(tau_stability(J, {{dependent, QMat(2, 1)}, QMat(2, 2)}),
                  std::invalid_argument);

  QMat skew(1, 1);
  skew.at(0, 0) = 1;
  QMat line(2, 1);
  line.at(0, 0) = 1;
  CHECK_THROWS_AS(tau_stability(J, {{line, QMat(2, 1)}, skew}), std::invalid_argument);
}

TEST_CASE("stability requires the structure constant along the subspace") {
  CartanChart cc = phase_plane();
  GradedElement r1 = g(cc, "r1");
  SymbolicMatrix p(cc.chart, 4, 4);
  p.at(0, 1) = GradedElement::constant(cc.chart, 1) + r1 * r1;
  p.at(1, 0) = -p.at(0, 1);
  p.at(2, 3) = GradedElement::constant(cc.chart, 1);
  p.at(3, 2) = GradedElement::constant(cc.chart, -1);
  GCStructure J(cc, SymbolicMatrix(cc.chart, 4, 4), p, SymbolicMatrix(cc.chart, 4, 4));

  QMat line(4, 1);
  line.at(0, 0) = 1;
  Report rep = tau_stability(J, {{line, QMat(4, 1)}, QMat(1, 1)});
  CHECK_FALSE(rep.items[0].pass);
}
