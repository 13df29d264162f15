#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "apstrip/bochner_fejer.hpp"
#include "apstrip/metrics.hpp"
#include "apstrip/separators.hpp"
#include "test_rng.hpp"

using namespace apstrip;

namespace {

// Classical closed form of the one-dimensional triangular-weight kernel,
// valid away from multiples of 2 pi.
double fejer_closed_form(int n, double t) {
  double s = std::sin(0.5 * t);
  double top = std::sin(0.5 * (n + 1) * t);
  return top * top / ((n + 1) * s * s);
}

}  // namespace

TEST_CASE("single element basis, degree 1: frozen weight table") {
  AveragingKernel k = build_kernel(RationalBasis({1.0}), {1});
  REQUIRE(k.size() == 3);
  CHECK(k.entries()[0].tuple == std::vector<int>{-1});
  CHECK(k.entries()[0].frequency == -1.0);
  CHECK(k.entries()[0].weight == 0.5);
  CHECK(k.entries()[1].frequency == 0.0);
  CHECK(k.entries()[1].weight == 1.0);
  CHECK(k.entries()[2].frequency == 1.0);
  CHECK(k.entries()[2].weight == 0.5);
  CHECK(k.weight_at(1.0) == 0.5);
  CHECK(k.weight_at(0.0) == 1.0);
  CHECK(k.weight_at(0.5) == 0.0);
}

TEST_CASE("single element basis, degree 2: frozen weight table") {
  AveragingKernel k = build_kernel(RationalBasis({1.0}), {2});
  REQUIRE(k.size() == 5);
  const double expected[] = {1.0 / 3.0, 2.0 / 3.0, 1.0, 2.0 / 3.0, 1.0 / 3.0};
  for (int i = 0; i < 5; ++i) {
    CHECK(k.entries()[i].frequency == doctest::Approx(i - 2.0).epsilon(1e-15));
    CHECK(k.entries()[i].weight == doctest::Approx(expected[i]).epsilon(1e-15));
  }
}

TEST_CASE("kernel eval matches the closed form and the endpoint values") {
  AveragingKernel k1 = build_kernel(RationalBasis({1.0}), {1});
  // 0.5 e^{it} + 1 + 0.5 e^{-it} = 1 + cos t
  CHECK(k1.eval(0.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(k1.eval(3.14159265358979323846) == doctest::Approx(0.0).epsilon(1e-12));

  for (int n : {1, 2, 5}) {
    AveragingKernel k = build_kernel(RationalBasis({1.0}), {n});
    for (double t = -9.7; t <= 9.7; t += 0.37) {
      if (std::abs(std::sin(0.5 * t)) < 1e-3) continue;
      CHECK(k.eval(t) == doctest::Approx(fejer_closed_form(n, t)).epsilon(1e-10));
    }
  }
}

TEST_CASE("product kernel: size, peak value, positivity, symmetry") {
  RationalBasis basis({1.0, std::sqrt(2.0)});
  AveragingKernel k = build_kernel(basis, {2, 3});
  CHECK(k.size() == 5u * 7u);

  // All weights in (0, 1], the zero tuple carries weight exactly 1.
  for (const KernelEntry& e : k.entries()) {
    CHECK(e.weight > 0.0);
    CHECK(e.weight <= 1.0);
    CHECK(k.weight_at(-e.frequency) == doctest::Approx(e.weight).epsilon(1e-15));
  }
  CHECK(k.weight_for_tuple({0, 0}) == 1.0);
  CHECK(k.weight_at(0.0) == 1.0);

  // At the origin the kernel peaks at prod_j (N_j + 1).
  CHECK(k.eval(0.0) == doctest::Approx(12.0).epsilon(1e-13));
  // The product of Fejer kernels is nonnegative everywhere.
  double min_seen = 1e300;
  for (double t : arithmetic_grid(-20.0, 20.0, 0.05)) {
    double v = k.eval(t);
    CHECK(v >= -1e-9);
    min_seen = std::min(min_seen, v);
  }
  CHECK(min_seen < 0.05);  // the scan actually reaches near-zero valleys
}

TEST_CASE("weight at a fixed tuple rises to 1 as the degree grows") {
  RationalBasis basis({1.0, std::sqrt(2.0)});
  double prev = 0.0;
  for (int n : {2, 5, 11, 40}) {
    AveragingKernel k = build_kernel(basis, {n, n});
    double w = k.weight_for_tuple({1, 1});
    double expected = (1.0 - 1.0 / (n + 1.0)) * (1.0 - 1.0 / (n + 1.0));
    CHECK(w == doctest::Approx(expected).epsilon(1e-15));
    CHECK(w > prev);
    prev = w;
  }
  CHECK(prev > 0.95);
}

TEST_CASE("weight_for_tuple handles out-of-range tuples and wrong arity") {
  AveragingKernel k = build_kernel(RationalBasis({1.0, std::sqrt(2.0)}), {1, 2});
  CHECK(k.weight_for_tuple({2, 0}) == 0.0);
  CHECK(k.weight_for_tuple({0, -3}) == 0.0);
  CHECK(k.weight_for_tuple({1, -2}) == doctest::Approx(0.5 / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS((void)k.weight_for_tuple({1}), std::invalid_argument);
}

TEST_CASE("rational dependence is rejected, irrational ratios pass") {
  CHECK_NOTHROW(RationalBasis({1.0, std::sqrt(2.0)}));
  CHECK_NOTHROW(RationalBasis({1.0, std::sqrt(2.0), std::sqrt(3.0)}));
  CHECK_THROWS_AS(RationalBasis({1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(RationalBasis({1.0, 41.0 / 29.0}), std::invalid_argument);
  CHECK_THROWS_AS(RationalBasis({3.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(RationalBasis({1.0, 1.0 + 5e-10}), std::invalid_argument);
  // 41/29 is only excluded while the denominator cap reaches it.
  CHECK_NOTHROW(RationalBasis({1.0, 41.0 / 29.0}, 20));
  CHECK_THROWS_AS(RationalBasis({}), std::invalid_argument);
  CHECK_THROWS_AS(RationalBasis({1.0, -2.5}), std::invalid_argument);
  CHECK_THROWS_AS(RationalBasis({0.0}), std::invalid_argument);
}

TEST_CASE("kernel frequencies are pairwise separated") {
  AveragingKernel k = build_kernel(RationalBasis({1.0, std::sqrt(2.0)}), {3, 3});
  std::vector<double> freqs;
  for (const KernelEntry& e : k.entries()) freqs.push_back(e.frequency);
  std::sort(freqs.begin(), freqs.end());
  for (std::size_t i = 1; i < freqs.size(); ++i) CHECK(freqs[i] - freqs[i - 1] > 1e-9);
}

TEST_CASE("build_kernel guards degrees and table size") {
  RationalBasis basis({1.0, std::sqrt(2.0)});
  CHECK_THROWS_AS(build_kernel(basis, {0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(build_kernel(basis, {1}), std::invalid_argument);
  CHECK_THROWS_AS(build_kernel(basis, {2000, 2000}), std::invalid_argument);
}

TEST_CASE("eval rejects an asymmetric entry table") {
  std::vector<KernelEntry> entries = {{{1}, 1.0, 0.5}};
  AveragingKernel k(RationalBasis({1.0}), {1}, std::move(entries));
  CHECK_THROWS_AS((void)k.eval(1.0), std::runtime_error);
}

TEST_CASE("exact convolution scales each coefficient by the kernel weight") {
  double r2 = std::sqrt(2.0);
  AveragingKernel k = build_kernel(RationalBasis({1.0, r2}), {2, 2});
  Strip strip(-1.0, 1.0);
  ExpSum s(strip, {{0.0, CoefficientProfile::constant({0.4, 0.0})},
                   {0.37, CoefficientProfile::constant({1.0, -1.0})},
                   {1.0, CoefficientProfile::polynomial({{0.0, 0.3}, {1.0, 0.0}})},
                   {r2, CoefficientProfile::exponential({0.2, 0.0}, {0.5, 0.0})},
                   {1.0 + r2, CoefficientProfile::constant({0.0, 2.0})}});
  ExpSum c = convolve_exact(s, k);

  // 0.37 is not in the kernel support, everything else survives scaled.
  REQUIRE(c.terms().size() == 4);
  TestRng rng(0x9e3779b97f4a7c15ull);
  for (const auto& term : c.terms()) {
    double w = k.weight_at(term.lambda);
    CoefficientProfile original = fourier_coefficient(s, term.lambda);
    for (int i = 0; i < 25; ++i) {
      double y = rng.uniform(-1.0, 1.0);
      CHECK(std::abs(term.coeff(y) - w * original(y)) <= 1e-15 * (1.0 + std::abs(original(y))));
    }
  }
  CHECK(k.weight_at(1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(k.weight_at(1.0 + r2) == doctest::Approx(4.0 / 9.0).epsilon(1e-15));
}

TEST_CASE("windowed coefficient estimates land within the leakage budget") {
  double r2 = std::sqrt(2.0);
  AveragingKernel k = build_kernel(RationalBasis({1.0, r2}), {2, 2});
  Strip strip(-0.5, 0.5);
  ExpSum s(strip, {{0.0, CoefficientProfile::constant({0.4, 0.0})},
                   {1.0, CoefficientProfile::constant({0.0, 0.25})},
                   {r2, CoefficientProfile::constant({0.3, 0.0})},
                   {1.0 + r2, CoefficientProfile::constant({-0.2, 0.1})}});
  WindowLadder ladder;  // last rung T = 729
  QuadratureSpec quad;
  ExpSum approx = bf_approximate(s.as_function(), k, {0.0}, ladder, quad);
  ExpSum exact = convolve_exact(s, k);

  REQUIRE(approx.terms().size() == k.size());
  double t_last = ladder.values().back();
  for (const auto& term : approx.terms()) {
    // Foreign frequencies bleed at most |c_n| / |lambda_n - lambda| per unit
    // of half-length; Simpson on e^{i mu t} adds O(h^4 mu^4).
    KahanSum budget;
    for (const auto& src : s.terms()) {
      double gap = std::abs(src.lambda - term.lambda);
      if (gap <= 1e-9) continue;
      budget.add(std::abs(src.coeff(0.0)) / gap);
    }
    double leak = 2.0 * budget.value() / (2.0 * t_last) + 1e-5;
    Complex expected = fourier_coefficient(exact, term.lambda)(0.0);
    CHECK(std::abs(term.coeff(0.0) - expected) <= leak);
  }
}

TEST_CASE("polynomial coefficient profiles are recovered through the fit") {
  AveragingKernel k = build_kernel(RationalBasis({1.0}), {1});
  Strip strip(-0.5, 0.5);
  ExpSum s(strip, {{0.0, CoefficientProfile::constant({0.7, 0.0})},
                   {1.0, CoefficientProfile::polynomial({{1.0, 0.0}, {0.0, 2.0}})}});
  ApproximateOptions options;
  options.family = ProfileFitFamily::kPolynomial;
  options.polynomial_degree = 1;
  ExpSum approx = bf_approximate(s.as_function(), k, {-0.5, 0.0, 0.5}, WindowLadder{},
                                 QuadratureSpec{}, options);
  CoefficientProfile at_one = fourier_coefficient(approx, 1.0);
  for (double y : {-0.5, -0.1, 0.3}) {
    Complex expected = 0.5 * Complex(1.0, 2.0 * y);
    CHECK(std::abs(at_one(y) - expected) <= 2e-3);
  }
}

TEST_CASE("exponential coefficient profiles are recovered through the fit") {
  AveragingKernel k = build_kernel(RationalBasis({1.0}), {1});
  Strip strip(-0.5, 0.5);
  Complex mu(0.2, 0.1);
  ExpSum s(strip, {{1.0, CoefficientProfile::exponential({0.3, 0.0}, mu)}});
  ApproximateOptions options;
  options.family = ProfileFitFamily::kExponential;
  ExpSum approx = bf_approximate(s.as_function(), k, {-0.4, -0.2, 0.0, 0.2, 0.4},
                                 WindowLadder{}, QuadratureSpec{}, options);
  CoefficientProfile at_one = fourier_coefficient(approx, 1.0);
  Complex expected = 0.5 * 0.3 * std::exp(mu * 0.37);
  CHECK(std::abs(at_one(0.37) - expected) <= 1e-8);
}

TEST_CASE("a coefficient outside the requested family is rejected") {
  AveragingKernel k = build_kernel(RationalBasis({1.0}), {1});
  Strip strip(-1.0, 1.0);
  // c(y) = y^2 cannot be matched by a constant across three heights.
  ExpSum s(strip, {{0.0, CoefficientProfile::polynomial({{0.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}})}});
  ApproximateOptions options;  // constant family
  CHECK_THROWS_AS(bf_approximate(s.as_function(), k, {-1.0, 0.0, 1.0}, WindowLadder{},
                                 QuadratureSpec{}, options),
                  std::runtime_error);
}

TEST_CASE("kernel csv layout") {
  AveragingKernel k = build_kernel(RationalBasis({1.0, std::sqrt(2.0)}), {1, 1});
  std::ostringstream os;
  k.write_csv(os);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "tuple,lambda,weight");
  std::getline(in, line);
  CHECK(line.substr(0, 6) == "-1;-1,");
  CHECK(line.substr(line.rfind(',') + 1) == "0.25");
  int rows = 1;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 9);
}

TEST_CASE("convolution contracts uniform and windowed estimates") {
  double r2 = std::sqrt(2.0);
  AveragingKernel k = build_kernel(RationalBasis({1.0, r2}), {2, 2});
  Strip line = Strip::line(0.0);
  StripFunction zero = constant_function(0.0);
  QuadratureSpec quad;
  ShiftGrid wide{0.0, 50.0, 0.05, 0.0};

  std::vector<ExpSum> sums;
  sums.emplace_back(Strip::whole_plane(),
                    std::vector<ExpSum::Term>{{0.0, CoefficientProfile::constant({0.3, 0.1})},
                                              {1.0, CoefficientProfile::constant({0.8, -0.2})},
                                              {r2, CoefficientProfile::constant({-0.5, 0.4})}});
  sums.emplace_back(Strip::whole_plane(),
                    std::vector<ExpSum::Term>{{1.0, CoefficientProfile::constant({1.0, 0.0})},
                                              {2.0, CoefficientProfile::constant({0.0, 1.0})},
                                              {1.0 + r2, CoefficientProfile::constant({0.6, 0.0})}});
  sums.emplace_back(Strip::whole_plane(),
                    std::vector<ExpSum::Term>{{-1.0, CoefficientProfile::constant({0.2, 0.7})},
                                              {2.0 * r2, CoefficientProfile::constant({0.9, 0.1})}});

  for (const ExpSum& s : sums) {
    ExpSum conv = convolve_exact(s, k);
    double us = uniform_distance(s.as_function(), zero, line, wide);
    double uc = uniform_distance(conv.as_function(), zero, line, wide);
    CHECK(uc <= us + 1e-9);

    MetricEstimate ws =
        weyl_distance(s.as_function(), zero, 1.0, line, ShiftGrid{}, WindowLadder{}, quad);
    MetricEstimate wc =
        weyl_distance(conv.as_function(), zero, 1.0, line, ShiftGrid{}, WindowLadder{}, quad);
    REQUIRE(ws.rungs.size() == wc.rungs.size());
    for (std::size_t r = 0; r < ws.rungs.size(); ++r)
      CHECK(wc.rungs[r].value <= ws.rungs[r].value + 1e-9);
  }
}

TEST_CASE("separator approximants close in as kernel degrees grow") {
  SeparatorSpec spec;
  StripFunction f = separator_function(spec);
  Strip line = Strip::line(0.0);
  QuadratureSpec quad;
  double beta = 2.0 * std::numbers::pi / 9.0;

  std::vector<MetricEstimate> estimates;
  for (int deg : {2, 6, 18}) {
    AveragingKernel k = build_kernel(RationalBasis({beta}), {deg});
    ExpSum approx = bf_approximate(f, k, {0.0}, WindowLadder{}, quad);
    estimates.push_back(
        weyl_distance(f, approx.as_function(), 1.0, line, ShiftGrid{}, WindowLadder{}, quad));
  }
  for (std::size_t i = 1; i < estimates.size(); ++i) {
    // Each rung shrinks, and the limit surrogate drops by a clear factor.
    for (std::size_t r = 0; r < estimates[i].rungs.size(); ++r)
      CHECK(estimates[i].rungs[r].value <= estimates[i - 1].rungs[r].value + 1e-9);
    CHECK(estimates[i].surrogate < 0.75 * estimates[i - 1].surrogate);
  }
  CHECK(estimates.back().surrogate < 0.15);
}
