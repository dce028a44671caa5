#include <catch2/catch_amalgamated.hpp>

#include <stdexcept>
#include <string>
#include <vector>

#include "gcgeo/rng.hpp"
#include "gcgeo/tori.hpp"

using namespace gcgeo;
using Catch::Matchers::ContainsSubstring;

namespace {

QMat qmat(int r, int c, std::initializer_list<long long> entries) {
  QMat m(r, c);
  auto it = entries.begin();
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m.at(i, j) = rat(*it++);
  return m;
}

const CheckItem& find_item(const Report& rep, std::string_view name) {
  for (const auto& item : rep.items)
    if (item.name == name) return item;
  throw std::runtime_error("no check item named " + std::string(name));
}

const std::string& find_note(const Report& rep, std::string_view key) {
  for (const auto& [k, v] : rep.notes)
    if (k == key) return v;
  throw std::runtime_error("no note named " + std::string(key));
}

// dr1^dth1 + dr2^dth2 in coordinates (r1, th1, r2, th2)
SymplecticTorus four_torus() {
  return {qmat(4, 4, {0, 1, 0, 0, -1, 0, 0, 0, 0, 0, 0, 1, 0, 0, -1, 0}),
          {"r1", "th1", "r2", "th2"}};
}

// dr1^dth2 - dr2^dth1, the normalized curvature of the worked connection
QMat worked_curvature() {
  return qmat(4, 4, {0, 0, 0, 1, 0, 0, 1, 0, 0, -1, 0, 0, -1, 0, 0, 0});
}

CoisotropicBrane filling_brane(const QMat& curvature) {
  return {QMat::identity(4), std::vector<Rational>(4, rat(0)), curvature};
}

bool all_integral(const QMat& m) {
  for (const auto& v : m.a)
    if (denominator(v) != 1) return false;
  return true;
}

QMat random_unimodular(Rng& rng, int n) {
  QMat s = QMat::identity(n);
  for (int t = 0; t < 4 * n; ++t) {
    int i = static_cast<int>(rng.int_in(0, n - 1));
    int j = static_cast<int>(rng.int_in(0, n - 1));
    if (i == j) continue;
    Rational c = rat(rng.int_in(-2, 2));
    for (int col = 0; col < n; ++col) s.at(i, col) += c * s.at(j, col);
  }
  return s;
}

}  // namespace

TEST_CASE("the worked four-torus brane") {
  SymplecticTorus T = four_torus();
  CoisotropicBrane b = filling_brane(worked_curvature());

  Report rep = is_coisotropic_brane(T, b);
  CHECK(rep.pass());
  CHECK(find_note(rep, "characteristic rank") == "0");
  CHECK(find_note(rep, "transverse dimension") == "4");

  // the transverse structure is a complex structure on the whole torus
  QMat k = *inverse(T.omega) * b.curvature;
  CHECK(k * k == -QMat::identity(4));
}

TEST_CASE("lagrangian subtorus with flat connection") {
  SymplecticTorus T = four_torus();
  CoisotropicBrane b{qmat(4, 2, {1, 0, 0, 0, 0, 1, 0, 0}), std::vector<Rational>(4, rat(0)),
                     QMat(2, 2)};

  Report rep = is_coisotropic_brane(T, b);
  CHECK(rep.pass());
  CHECK(find_note(rep, "characteristic rank") == "2");
  CHECK(find_note(rep, "transverse dimension") == "0");

  // the lift is the subtorus times the annihilator
  LinearSubtorus L = lift(T, b);
  CHECK(L.directions.cols == 4);
  CHECK(L.directions.block(4, 0, 4, 2).is_zero());
  CHECK(L.directions.block(0, 2, 4, 2).is_zero());
  QMat ann = L.directions.block(4, 2, 4, 2);
  CHECK(rank(ann) == 2);
  for (int j = 0; j < 2; ++j) {
    CHECK(ann.at(0, j) == 0);
    CHECK(ann.at(2, j) == 0);
  }

  DoubledTorus D(four_torus());
  CHECK(is_lagrangian_in_double(L, D));
  // regression value, computed rather than quoted
  CHECK(is_complex_in_double(L, D));
}

TEST_CASE("curvature with the wrong pairing fails") {
  SymplecticTorus T = four_torus();
  CoisotropicBrane b =
      filling_brane(qmat(4, 4, {0, 1, 0, 0, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}));
  Report rep = is_coisotropic_brane(T, b);
  CHECK(find_item(rep, "tangent directions are coisotropic").pass);
  CHECK(find_item(rep, "curvature vanishes on the characteristic directions").pass);
  CHECK_FALSE(find_item(rep, "transverse structure squares to minus one").pass);
  CHECK_THROWS_AS(lift(T, b), std::domain_error);
}

TEST_CASE("a filling brane needs curvature") {
  SymplecticTorus T = four_torus();
  CoisotropicBrane b = filling_brane(QMat(4, 4));
  CHECK_FALSE(is_coisotropic_brane(T, b).pass());
  CHECK_THROWS_AS(lift(T, b), std::domain_error);

  // in dimension two no filling brane exists at all
  SymplecticTorus T2{qmat(2, 2, {0, 1, -1, 0}), {"r", "th"}};
  CoisotropicBrane b2{QMat::identity(2), {rat(0), rat(0)}, qmat(2, 2, {0, 2, -2, 0})};
  Report rep = is_coisotropic_brane(T2, b2);
  CHECK(find_item(rep, "tangent directions are coisotropic").pass);
  CHECK_FALSE(find_item(rep, "transverse structure squares to minus one").pass);
}

TEST_CASE("the worked lift equations") {
  SymplecticTorus T = four_torus();
  CoisotropicBrane b = filling_brane(worked_curvature());

  LinearSubtorus L = lift(T, b);
  CHECK(L.directions.block(0, 0, 4, 4) == QMat::identity(4));
  CHECK(L.directions.block(4, 0, 4, 4) == worked_curvature());
  CHECK(L.offset == std::vector<Rational>(8, rat(0)));

  CHECK(lift_equations(T, b) ==
        std::vector<std::string>{"r1^ = th2", "th1^ = r2", "r2^ = -th1", "th2^ = -r1"});

  DoubledTorus D(four_torus());
  CHECK(is_lagrangian_in_double(L, D));
  CHECK(is_complex_in_double(L, D));

  Report dc = doubled_check(D);
  CHECK(dc.pass());
  CHECK(find_note(dc, "form preserved by the complex structure") == "yes");
}

TEST_CASE("subtori of the double that are not lifts") {
  DoubledTorus D(four_torus());

  // the zero section carries half the form
  LinearSubtorus zero_section{QMat(8, 4), std::vector<Rational>(8, rat(0))};
  zero_section.directions.paste(0, 0, QMat::identity(4));
  CHECK_FALSE(is_lagrangian_in_double(zero_section, D));
  CHECK_FALSE(is_complex_in_double(zero_section, D));

  // graphs of maps unrelated to the form are not lagrangian
  Rng rng(7);
  for (int t = 0; t < 3; ++t) {
    QMat r(4, 4);
    for (auto& v : r.a) v = rat(rng.int_in(-3, 3));
    LinearSubtorus graph{QMat(8, 4), std::vector<Rational>(8, rat(0))};
    graph.directions.paste(0, 0, QMat::identity(4));
    graph.directions.paste(4, 0, r);
    CHECK_FALSE(is_lagrangian_in_double(graph, D));
  }

  // wrong dimension is rejected by count, wrong ambient by shape
  LinearSubtorus thin{QMat(8, 2), std::vector<Rational>(8, rat(0))};
  thin.directions.paste(0, 0, qmat(2, 2, {1, 0, 0, 1}));
  CHECK_FALSE(is_lagrangian_in_double(thin, D));
  LinearSubtorus off{QMat(6, 3), std::vector<Rational>(6, rat(0))};
  CHECK_THROWS_AS(is_lagrangian_in_double(off, D), std::invalid_argument);
}

TEST_CASE("random branes lift to lagrangians") {
  SymplecticTorus T = four_torus();
  QMat f = worked_curvature();
  Rng rng(2026);
  int filling = 0, flat = 0, lines = 0;

  for (int t = 0; t < 10; ++t) {
    QMat s = random_unimodular(rng, 4);
    SymplecticTorus Ts{s.transpose() * T.omega * s, T.names};
    DoubledTorus Ds{SymplecticTorus{Ts.omega, Ts.names}};

    CoisotropicBrane full{QMat::identity(4), {}, s.transpose() * f * s};
    for (int i = 0; i < 4; ++i) full.offset.push_back(rng.rational(-2, 2));
    REQUIRE(is_coisotropic_brane(Ts, full).pass());
    LinearSubtorus L = lift(Ts, full);
    CHECK(rank(L.directions) == 4);
    CHECK(all_integral(L.directions));
    CHECK(is_lagrangian_in_double(L, Ds));
    CHECK(is_complex_in_double(L, Ds));
    ++filling;

    QMat w0(4, 2);
    w0.at(0, 0) = rat(1);
    w0.at(2, 1) = rat(1);
    CoisotropicBrane lag{*inverse(s) * w0, std::vector<Rational>(4, rat(0)), QMat(2, 2)};
    REQUIRE(is_coisotropic_brane(Ts, lag).pass());
    LinearSubtorus M = lift(Ts, lag);
    CHECK(rank(M.directions) == 4);
    CHECK(all_integral(M.directions));
    CHECK(is_lagrangian_in_double(M, Ds));
    ++flat;
  }

  for (int t = 0; t < 10; ++t) {
    long long scale = rng.int_in(1, 3);
    SymplecticTorus T2{rat(scale) * qmat(2, 2, {0, 1, -1, 0}), {"r", "th"}};
    QMat v(2, 1);
    v.at(0, 0) = rat(rng.int_in(-3, 3));
    v.at(1, 0) = rat(rng.int_in(1, 3));
    CoisotropicBrane line{v, {rat(0), rat(0)}, QMat(1, 1)};
    REQUIRE(is_coisotropic_brane(T2, line).pass());
    LinearSubtorus L = lift(T2, line);
    DoubledTorus D2{SymplecticTorus{T2.omega, T2.names}};
    CHECK(rank(L.directions) == 2);
    CHECK(all_integral(L.directions));
    CHECK(is_lagrangian_in_double(L, D2));
    ++lines;
  }

  CHECK(filling + flat + lines >= 20);
}

TEST_CASE("malformed tori and branes are rejected") {
  CHECK_THROWS_WITH(SymplecticTorus(QMat(3, 3), {"a", "b", "c"}),
                    ContainsSubstring("even dimension"));
  CHECK_THROWS_WITH(SymplecticTorus(QMat::identity(2), {"a", "b"}),
                    ContainsSubstring("antisymmetric"));
  CHECK_THROWS_WITH(SymplecticTorus(QMat(2, 2), {"a", "b"}), ContainsSubstring("invertible"));
  CHECK_THROWS_WITH(SymplecticTorus(qmat(2, 2, {0, 1, -1, 0}), {"a"}),
                    ContainsSubstring("name"));

  SymplecticTorus T = four_torus();
  CoisotropicBrane fractional = filling_brane(worked_curvature());
  fractional.directions.at(0, 0) = rat(1, 2);
  CHECK_THROWS_WITH(is_coisotropic_brane(T, fractional), ContainsSubstring("integral"));

  CoisotropicBrane dependent{qmat(4, 2, {1, 2, 0, 0, 0, 0, 0, 0}),
                             std::vector<Rational>(4, rat(0)), QMat(2, 2)};
  CHECK_THROWS_WITH(is_coisotropic_brane(T, dependent), ContainsSubstring("independent"));

  CoisotropicBrane lopsided = filling_brane(QMat::identity(4));
  CHECK_THROWS_WITH(is_coisotropic_brane(T, lopsided), ContainsSubstring("antisymmetric"));

  CoisotropicBrane misfit = filling_brane(worked_curvature());
  misfit.offset.pop_back();
  CHECK_THROWS_WITH(is_coisotropic_brane(T, misfit), ContainsSubstring("shapes"));
}
