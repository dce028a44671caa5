#include <catch2/catch_amalgamated.hpp>

#include "gcgeo/graded.hpp"

using namespace gcgeo;

namespace {

ChartPtr odd_chart(int n) {
  std::vector<Generator> gens;
  for (int i = 1; i <= n; ++i) gens.push_back({"xi" + std::to_string(i), 1, 0});
  return Chart::make(gens);
}

}  // namespace

TEST_CASE("rational parsing and printing") {
  CHECK(parse_rational("-3/6") == rat(-1, 2));
  CHECK(parse_rational("4/2") == rat(2));
  CHECK(parse_rational("0/5") == 0);
  CHECK(rational_string(rat(-1, 2)) == "-1/2");
  CHECK(rational_string(rat(7)) == "7");
  CHECK_THROWS(parse_rational("1/0"));
  CHECK_THROWS(parse_rational("x"));
  CHECK_THROWS(parse_rational(""));
}

TEST_CASE("odd generators anticommute and square to zero") {
  auto C = odd_chart(2);
  auto xi1 = GradedElement::generator(C, "xi1");
  auto xi2 = GradedElement::generator(C, "xi2");
  CHECK(xi2 * xi1 == -(xi1 * xi2));
  CHECK((xi1 * xi1).is_zero());
  CHECK((xi1 * xi2) * (xi1 * xi2) == GradedElement::zero(C));
}

TEST_CASE("left and right derivatives on a two-form") {
  auto C = odd_chart(2);
  auto xi1 = GradedElement::generator(C, "xi1");
  auto xi2 = GradedElement::generator(C, "xi2");
  auto w = xi1 * xi2;
  CHECK(w.derive_left(C->index("xi1")) == xi2);
  CHECK(w.derive_left(C->index("xi2")) == -xi1);
  CHECK(w.derive_right(C->index("xi1")) == -xi2);
  CHECK(w.derive_right(C->index("xi2")) == xi1);
}

TEST_CASE("left derivative satisfies the graded Leibniz rule") {
  auto C = odd_chart(3);
  auto xi1 = GradedElement::generator(C, "xi1");
  auto xi2 = GradedElement::generator(C, "xi2");
  auto xi3 = GradedElement::generator(C, "xi3");
  int j = C->index("xi3");
  auto f = xi1;
  auto g = xi2 * xi3;
  auto lhs = (f * g).derive_left(j);
  auto rhs = f.derive_left(j) * g - f * g.derive_left(j);  // |f| odd
  CHECK(lhs == rhs);
  CHECK(lhs == xi1 * xi2);
}

TEST_CASE("substitution is a graded algebra map") {
  auto C = odd_chart(2);
  auto xi1 = GradedElement::generator(C, "xi1");
  auto xi2 = GradedElement::generator(C, "xi2");
  // xi1 -> xi1 + xi2, xi2 -> xi2 kills nothing: the image is again xi1*xi2.
  auto image = (xi1 * xi2).substituted({xi1 + xi2, xi2});
  CHECK(image == xi1 * xi2);
  // xi1 -> xi2 makes the product vanish.
  CHECK((xi1 * xi2).substituted({xi2, xi2}).is_zero());
}

TEST_CASE("substitution rejects parity mismatches") {
  auto C = Chart::make({{"x", 0, 0}, {"xi", 1, 0}});
  auto x = GradedElement::generator(C, "x");
  auto xi = GradedElement::generator(C, "xi");
  CHECK_THROWS(x.substituted({xi, xi}));
  CHECK_NOTHROW(x.substituted({x * x, xi}));
}

TEST_CASE("even polynomial arithmetic") {
  auto C = Chart::make({{"x", 0, 0}, {"y", 0, 0}});
  auto x = GradedElement::generator(C, "x");
  auto y = GradedElement::generator(C, "y");
  CHECK((x + y).pow(2) == x * x + rat(2) * x * y + y * y);
  CHECK((x * x * x).derive_left(0) == rat(3) * x * x);
  auto f = x * x + y / rat(2);
  CHECK(f.evaluate({rat(2), rat(3)}) == rat(11, 2));
  CHECK_THROWS(x.evaluate({rat(1)}));
}

TEST_CASE("one-form symbols of even total degree commute") {
  auto C = Chart::make({{"dxi1", 1, 1}, {"dxi2", 1, 1}});
  auto a = GradedElement::generator(C, "dxi1");
  auto b = GradedElement::generator(C, "dxi2");
  CHECK(a * b == b * a);
  CHECK_FALSE((a * a).is_zero());
  CHECK(a.degree() == 2);
  CHECK(a.parity() == 0);
}

TEST_CASE("degree and parity bookkeeping") {
  auto C = Chart::make({{"x", 0, 0}, {"xi", 1, 0}, {"dx", 0, 1}, {"dxi", 1, 1}});
  auto x = GradedElement::generator(C, "x");
  auto xi = GradedElement::generator(C, "xi");
  auto dx = GradedElement::generator(C, "dx");
  auto dxi = GradedElement::generator(C, "dxi");
  CHECK(dx.degree() == 1);
  CHECK(xi.degree() == 1);
  CHECK(dxi.degree() == 2);
  CHECK((x * dxi).bidegree() == std::pair{1, 1});
  CHECK((xi * dx).bidegree() == std::pair{1, 1});
  CHECK((xi + dx).bidegree() == std::nullopt);
  CHECK((xi + dx).degree() == 1);
  CHECK((x + dxi).parity() == 0);
  CHECK((x + xi).parity() == std::nullopt);
  CHECK((x * dxi + xi * dx).component(1, 1) == x * dxi + xi * dx);
  CHECK((x + x * dxi).component(0, 0) == x);
}

TEST_CASE("graded commutativity holds for homogeneous elements") {
  auto C = Chart::make({{"x", 0, 0}, {"xi1", 1, 0}, {"xi2", 1, 0}, {"dx", 0, 1}});
  auto x = GradedElement::generator(C, "x");
  auto xi1 = GradedElement::generator(C, "xi1");
  auto xi2 = GradedElement::generator(C, "xi2");
  auto dx = GradedElement::generator(C, "dx");
  std::vector<GradedElement> odd = {xi1, x * xi2 + xi1, dx, xi1 * xi2 * dx + xi2};
  std::vector<GradedElement> even = {x + GradedElement::constant(C, rat(1)), xi1 * xi2,
                                     xi2 * dx * x};
  for (const auto& a : odd)
    for (const auto& b : odd) CHECK(a * b == -(b * a));
  for (const auto& a : even)
    for (const auto& b : odd) CHECK(a * b == b * a);
  for (const auto& a : even)
    for (const auto& b : even) CHECK(a * b == b * a);
}

TEST_CASE("multiplication is associative across parities") {
  auto C = Chart::make({{"x", 0, 0}, {"xi1", 1, 0}, {"xi2", 1, 0}, {"xi3", 1, 0}});
  auto x = GradedElement::generator(C, "x");
  auto xi1 = GradedElement::generator(C, "xi1");
  auto xi2 = GradedElement::generator(C, "xi2");
  auto xi3 = GradedElement::generator(C, "xi3");
  std::vector<GradedElement> pool = {x + xi1 * xi2, xi1 + xi3, xi2 * xi3 + x * x,
                                     xi1 * xi2 * xi3};
  for (const auto& a : pool)
    for (const auto& b : pool)
      for (const auto& c : pool) CHECK((a * b) * c == a * (b * c));
}

TEST_CASE("charts embed by generator name") {
  auto small = Chart::make({{"x", 0, 0}, {"xi", 1, 0}});
  auto big = small->extended({{"y", 0, 0}, {"eta", 1, 0}});
  auto x = GradedElement::generator(small, "x");
  auto xi = GradedElement::generator(small, "xi");
  auto lifted = (x * xi).embedded(big);
  CHECK(lifted == GradedElement::generator(big, "x") * GradedElement::generator(big, "xi"));
  CHECK(big->slot(big->index("x")) == small->slot(small->index("x")));
}

TEST_CASE("chart validation") {
  CHECK_THROWS(Chart::make({{"x", 0, 0}, {"x", 1, 0}}));
  auto A = Chart::make({{"x", 0, 0}});
  auto B = Chart::make({{"y", 0, 0}});
  auto xa = GradedElement::generator(A, "x");
  auto yb = GradedElement::generator(B, "y");
  CHECK_THROWS(xa + yb);
  CHECK_THROWS(xa * yb);
}

TEST_CASE("printing is deterministic and readable") {
  auto C = Chart::make({{"x", 0, 0}, {"xi", 1, 0}});
  auto x = GradedElement::generator(C, "x");
  auto xi = GradedElement::generator(C, "xi");
  CHECK(GradedElement::zero(C).to_string() == "0");
  CHECK((x * x - xi / rat(2)).to_string() == "-1/2*xi + x^2");
  CHECK((GradedElement::constant(C, rat(1)) + x).to_string() == "1 + x");
}
