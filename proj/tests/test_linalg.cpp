#include <catch2/catch_amalgamated.hpp>

#include "gcgeo/linalg.hpp"

using namespace gcgeo;

namespace {

QMat qmat(int r, int c, std::initializer_list<long long> entries) {
  QMat m(r, c);
  auto it = entries.begin();
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m.at(i, j) = rat(*it++);
  return m;
}

}  // namespace

TEST_CASE("rref, rank and kernel over the rationals") {
  auto m = qmat(3, 4, {1, 2, 3, 4, 2, 4, 6, 8, 1, 0, 1, 0});
  CHECK(rank(m) == 2);
  auto k = kernel_basis(m);
  CHECK(k.cols == 2);
  CHECK((m * k).is_zero());
  CHECK(rank(k) == 2);
}

TEST_CASE("solve and inverse") {
  auto A = qmat(2, 2, {1, 2, 3, 5});
  auto b = qmat(2, 1, {1, 2});
  auto x = solve(A, b);
  REQUIRE(x.has_value());
  CHECK(A * *x == b);
  auto Ainv = inverse(A);
  REQUIRE(Ainv.has_value());
  CHECK(*Ainv * A == QMat::identity(2));
  CHECK(Ainv->at(0, 0) == rat(-5));

  auto singular = qmat(2, 2, {1, 2, 2, 4});
  CHECK_FALSE(inverse(singular).has_value());
  CHECK_FALSE(solve(singular, qmat(2, 1, {1, 0})).has_value());
  auto consistent = solve(singular, qmat(2, 1, {1, 2}));
  REQUIRE(consistent.has_value());
  CHECK(singular * *consistent == qmat(2, 1, {1, 2}));
}

TEST_CASE("span comparisons") {
  auto x = qmat(3, 2, {1, 0, 0, 1, 0, 0});
  auto y = qmat(3, 1, {2, 3, 0});
  auto z = qmat(3, 1, {0, 0, 1});
  CHECK(span_contains(x, y));
  CHECK_FALSE(span_contains(x, z));
  CHECK(same_span(x, hstack(y, qmat(3, 1, {1, 1, 0}))));
}

TEST_CASE("complex arithmetic and rank over Q(i)") {
  GaussianRational i = GaussianRational::unit();
  GaussianRational one(1);
  CHECK((one + i) / (one - i) == i);
  CHECK(i * i == GaussianRational(-1));
  CHECK(to_display(GaussianRational(rat(1, 2), rat(-1))) == "1/2-i");
  CHECK(to_display(i) == "i");

  CMat m(2, 2);
  m.at(0, 0) = one;
  m.at(0, 1) = i;
  m.at(1, 0) = i;
  m.at(1, 1) = GaussianRational(-1);
  CHECK(rank(m) == 1);  // second row is i times the first
  auto k = kernel_basis(m);
  CHECK(k.cols == 1);
  CHECK((m * k).is_zero());

  CMat c = complexify(qmat(2, 2, {0, -1, 1, 0}));
  CMat ci = i * c;
  CHECK(conj(ci) == (-i) * c);
  auto cinv = inverse(c);
  REQUIRE(cinv.has_value());
  CHECK(*cinv == -c);
}

TEST_CASE("block surgery") {
  auto m = qmat(2, 3, {1, 2, 3, 4, 5, 6});
  CHECK(m.block(0, 1, 2, 2) == qmat(2, 2, {2, 3, 5, 6}));
  CHECK(vstack(m, QMat::zero(1, 3)).rows == 3);
  auto t = m.transpose();
  CHECK(t.at(2, 1) == rat(6));
  QMat big = QMat::zero(3, 3);
  big.paste(1, 1, qmat(2, 2, {1, 2, 3, 4}));
  CHECK(big.at(2, 2) == rat(4));
  CHECK(big.at(0, 0) == rat(0));
}
