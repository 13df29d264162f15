#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <cstring>
#include <stdexcept>

#include "apstrip/core.hpp"

using namespace apstrip;

namespace {

const double kSqrtPi = 1.7724538509055160273;

StripFunction gaussian_bump() {
  // e^{-4 z^2}; |.| on the real axis is e^{-4 x^2} with mass sqrt(pi)/2.
  return StripFunction(Strip::whole_plane(), [](ComplexPoint z) {
    Complex zz = z.value();
    return std::exp(-4.0 * zz * zz);
  });
}

StripFunction theta_comb() {
  // sum_n e^{-4(z-n)^2}, window |x-n| <= 10.
  return StripFunction(Strip::whole_plane(), [](ComplexPoint z) {
    auto lo = static_cast<long long>(std::ceil(z.x - 10.0));
    auto hi = static_cast<long long>(std::floor(z.x + 10.0));
    Complex acc = 0.0;
    for (long long n = lo; n <= hi; ++n) {
      Complex d = z.value() - static_cast<double>(n);
      acc += std::exp(-4.0 * d * d);
    }
    return acc;
  });
}

// Independent reference: midpoint rule at h = 1e-4, plain double loop.
double midpoint_reference(double half_width) {
  const double h = 1e-4;
  auto n = static_cast<long long>(std::llround(2.0 * half_width / h));
  double acc = 0.0;
  for (long long i = 0; i < n; ++i) {
    double t = -half_width + (static_cast<double>(i) + 0.5) * h;
    acc += std::exp(-4.0 * t * t);
  }
  return acc * h;
}

bool bits_equal(double a, double b) {
  return std::memcmp(&a, &b, sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("strip validation and substrips") {
  Strip s(-1.0, 2.0);
  CHECK(s.contains_y(0.0));
  CHECK(s.contains_y(2.0));
  CHECK_FALSE(s.contains_y(2.5));
  CHECK(s.is_closed());

  Strip sub = s.closed_substrip(-1.0, 1.0);
  CHECK(sub.y_min() == -1.0);
  CHECK_THROWS_AS(s.closed_substrip(-2.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(s.closed_substrip(1.0, 0.5), std::invalid_argument);

  Strip open = Strip::whole_plane();
  CHECK_FALSE(open.is_closed());
  CHECK_NOTHROW(open.closed_substrip(-100.0, 100.0));

  CHECK_THROWS_AS(Strip(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("strip function evaluation, shift, modulation") {
  StripFunction f = gaussian_bump();

  SUBCASE("shift then evaluate equals evaluate at shifted point, bit-exact") {
    StripFunction g = f.shifted(0.7);
    for (double x : {-2.0, 0.3, 5.1}) {
      Complex a = g(x, 0.25);
      Complex b = f(x + 0.7, 0.25);
      CHECK(bits_equal(a.real(), b.real()));
      CHECK(bits_equal(a.imag(), b.imag()));
    }
  }

  SUBCASE("modulation multiplies by a unit phase on the real axis") {
    StripFunction g = f.modulated(2.0);
    Complex a = g(1.3, 0.0);
    Complex expect = f(1.3, 0.0) * std::exp(Complex(0.0, 2.6));
    CHECK(std::abs(a - expect) < 1e-15);
  }

  SUBCASE("evaluation outside the domain strip throws") {
    StripFunction g(Strip(-1.0, 1.0), [](ComplexPoint z) { return Complex(z.x, 0); });
    CHECK_THROWS_AS(g(0.0, 1.5), std::domain_error);
  }

  SUBCASE("determinism: repeated evaluation is bit-identical") {
    Complex a = f(0.123456, 0.7);
    Complex b = f(0.123456, 0.7);
    CHECK(bits_equal(a.real(), b.real()));
    CHECK(bits_equal(a.imag(), b.imag()));
  }
}

TEST_CASE("window integral basics") {
  QuadratureSpec quad;

  SUBCASE("zero function integrates to zero") {
    CHECK(window_integral(constant_function(0.0), {0, 0}, 3.0, 2.0, quad) == 0.0);
  }

  SUBCASE("constant one, T = 2, p = 3 gives the window length") {
    double v = window_integral(constant_function(1.0), {0, 0}, 2.0, 3.0, quad);
    CHECK(v == doctest::Approx(4.0).epsilon(1e-13));
  }

  SUBCASE("gaussian mass over [-5, 5]") {
    double oracle = midpoint_reference(5.0);
    CHECK(oracle == doctest::Approx(kSqrtPi / 2.0).epsilon(1e-8));
    double v = window_integral(gaussian_bump(), {0, 0}, 5.0, 1.0, quad);
    CHECK(v == doctest::Approx(oracle).epsilon(1e-8));
    CHECK(v == doctest::Approx(0.88622692545275801).epsilon(1e-9));
  }

  SUBCASE("all three rules agree on a smooth integrand") {
    for (QuadratureRule rule :
         {QuadratureRule::kMidpoint, QuadratureRule::kTrapezoid, QuadratureRule::kSimpson}) {
      QuadratureSpec q{0.005, rule, true};
      double v = window_integral(gaussian_bump(), {0, 0}, 5.0, 1.0, q);
      CHECK(v == doctest::Approx(kSqrtPi / 2.0).epsilon(1e-6));
    }
  }

  SUBCASE("simpson is exact for a cubic integrand") {
    StripFunction cubic(Strip::whole_plane(),
                        [](ComplexPoint z) { return Complex(z.x * z.x * z.x + z.x * z.x + 1.0, 0.0); });
    // integral of x^3 + x^2 + 1 over [-1, 1] = 8/3; integrand stays positive there.
    double v = window_integral(cubic, {0, 0}, 1.0, 1.0, quad);
    CHECK(v == doctest::Approx(8.0 / 3.0).epsilon(1e-13));
  }
}

TEST_CASE("window weights and node lattice") {
  QuadratureSpec quad;

  SUBCASE("normalized weights sum to the window length") {
    for (double T : {0.5, 1.5, 3.0, 10.5, 729.0}) {
      for (QuadratureRule rule :
           {QuadratureRule::kMidpoint, QuadratureRule::kTrapezoid, QuadratureRule::kSimpson}) {
        QuadratureSpec q{0.02, rule, true};
        WindowNodes nodes = make_window(0.0, T, q);
        KahanSum total;
        for (double w : nodes.w) total.add(w);
        CHECK(std::abs(total.value() - 2.0 * T) <= 1e-12 * 2.0 * T);
        for (double w : nodes.w) CHECK(w > 0.0);
      }
    }
  }

  SUBCASE("overlapping lattice-aligned windows share node positions bit-exactly") {
    WindowNodes unit = make_window(0.5, 0.5, quad);      // [0, 1]
    WindowNodes wide = make_window(0.0, 1.5, quad);      // [-1.5, 1.5]
    REQUIRE(unit.x.size() == 51);
    REQUIRE(wide.x.size() == 151);
    // unit node i sits at wide node i + 75.
    for (std::size_t i = 0; i < unit.x.size(); ++i)
      CHECK(bits_equal(unit.x[i], wide.x[i + 75]));
  }

  SUBCASE("off-lattice centers still cover the right window") {
    WindowNodes nodes = make_window(0.007, 1.0, quad);
    CHECK(nodes.x.front() == doctest::Approx(-0.993).epsilon(1e-12));
    CHECK(nodes.x.back() == doctest::Approx(1.007).epsilon(1e-12));
  }
}

TEST_CASE("discrete power mean inequality on shared nodes") {
  QuadratureSpec quad;
  StripFunction f = theta_comb();
  double T = 3.0;
  double prev = -1.0;
  for (double p : {1.0, 2.0, 4.0}) {
    double v = window_integral(f, {0.35, 0.0}, T, p, quad);
    double mean = std::pow(v / (2.0 * T), 1.0 / p);
    if (prev >= 0.0) CHECK(prev <= mean + 1e-9);
    prev = mean;
  }
}

TEST_CASE("window integral monotone in T for nonnegative integrands") {
  QuadratureSpec quad;
  StripFunction f = gaussian_bump();
  double a = window_integral(f, {0, 0}, 1.0, 1.0, quad);
  double b = window_integral(f, {0, 0}, 2.0, 1.0, quad);
  double c = window_integral(f, {0, 0}, 5.0, 1.0, quad);
  CHECK(a <= b + 1e-12);
  CHECK(b <= c + 1e-12);
}

TEST_CASE("window integral reports non-finite nodes") {
  QuadratureSpec quad;
  StripFunction bad(Strip::whole_plane(), [](ComplexPoint z) {
    return z.x > 0.5 ? Complex(std::numeric_limits<double>::infinity(), 0) : Complex(1, 0);
  });
  CHECK_THROWS_AS(window_integral(bad, {0, 0}, 1.0, 1.0, quad), std::runtime_error);
}

TEST_CASE("grid sup") {
  SUBCASE("constant") {
    double v = grid_sup(constant_function(Complex(3, 4)), Strip(-1, 1), 0, 1, 0.5, 0.5);
    CHECK(v == doctest::Approx(5.0).epsilon(1e-15));
  }

  SUBCASE("unit modulus of e^{iz} on the real line") {
    StripFunction f(Strip::whole_plane(),
                    [](ComplexPoint z) { return std::exp(Complex(0, 1) * z.value()); });
    double v = grid_sup(f, Strip::line(0.0), 0.0, 6.283, 1e-3, 1.0);
    CHECK(std::abs(v - 1.0) < 1e-12);
  }

  SUBCASE("lattice comb max on [0, 1]") {
    StripFunction f = theta_comb();
    double v = grid_sup(f, Strip::line(0.0), 0.0, 1.0, 1e-3, 1.0);
    CHECK(v >= 1.0);
    CHECK(v <= 1.04);
    // Independent dense scan at step 1e-5 dominates the coarser grid.
    double dense = 0.0;
    for (int i = 0; i <= 100000; ++i) {
      double x = static_cast<double>(i) * 1e-5;
      dense = std::max(dense, std::abs(f(x, 0.0)));
    }
    CHECK(v <= dense + 1e-12);
    CHECK(dense <= 1.04);
  }

  SUBCASE("halving the step never decreases the result") {
    StripFunction f = theta_comb();
    double coarse = grid_sup(f, Strip::line(0.0), 0.0, 1.0, 0.2, 1.0);
    double fine = grid_sup(f, Strip::line(0.0), 0.0, 1.0, 0.1, 1.0);
    double finer = grid_sup(f, Strip::line(0.0), 0.0, 1.0, 0.05, 1.0);
    CHECK(coarse <= fine + 1e-15);
    CHECK(fine <= finer + 1e-15);
  }

  SUBCASE("golden-section refinement never decreases the result") {
    StripFunction f = theta_comb();
    double plain = grid_sup(f, Strip::line(0.0), 0.3, 0.7, 0.05, 1.0, false);
    double refined = grid_sup(f, Strip::line(0.0), 0.3, 0.7, 0.05, 1.0, true);
    CHECK(refined >= plain);
  }

  SUBCASE("empty or invalid grids are rejected") {
    CHECK_THROWS_AS(grid_sup(constant_function(1.0), Strip(-1, 1), 1.0, 0.0, 0.1, 0.5),
                    std::invalid_argument);
    CHECK_THROWS_AS(grid_sup(constant_function(1.0), Strip::whole_plane(), 0, 1, 0.1, 0.5),
                    std::invalid_argument);
  }
}

TEST_CASE("kahan summation matches long double accumulation") {
  KahanSum acc;
  long double ref = 0.0L;
  double x = 0.123456789;
  for (int i = 0; i < 200000; ++i) {
    double term = std::sin(x * i) * 1e-3 + 1.0;
    acc.add(term);
    ref += term;
  }
  CHECK(std::abs(acc.value() - static_cast<double>(ref)) <
        1e-12 * std::abs(static_cast<double>(ref)));
}

TEST_CASE("arithmetic grid endpoints") {
  auto g = arithmetic_grid(0.0, 1.0, 0.1);
  REQUIRE(g.size() == 11);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(arithmetic_grid(0.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("window ladder values") {
  WindowLadder ladder;
  auto v = ladder.values();
  REQUIRE(v.size() == 6);
  CHECK(v[0] == 3.0);
  CHECK(v[5] == 729.0);
  CHECK_THROWS_AS((WindowLadder{0.0, 3.0, 6}).values(), std::invalid_argument);
}

TEST_CASE("window integral is deterministic") {
  QuadratureSpec quad;
  StripFunction f = theta_comb();
  double a = window_integral(f, {0.25, 0.1}, 3.0, 2.0, quad);
  double b = window_integral(f, {0.25, 0.1}, 3.0, 2.0, quad);
  CHECK(bits_equal(a, b));
}

TEST_CASE("format_double round-trips bit-exactly") {
  for (double v : {0.1, 1.0 / 3.0, 1e-17, 12345.678901234567, -0.0, 729.0}) {
    std::string s = format_double(v);
    double back = std::strtod(s.c_str(), nullptr);
    CHECK(bits_equal(back, v));
  }
}
