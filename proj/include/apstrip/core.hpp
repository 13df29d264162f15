#ifndef APSTRIP_CORE_HPP
#define APSTRIP_CORE_HPP

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace apstrip {

using Complex = std::complex<double>;

// Point z = x + iy of a horizontal strip, kept as separate coordinates so the
// horizontal (almost-period) direction stays explicit.
struct ComplexPoint {
  double x = 0.0;
  double y = 0.0;
  Complex value() const { return Complex(x, y); }
};

// Horizontal strip { x + iy : y_min <= y <= y_max }.  Infinite bounds are
// allowed and mean the strip is open on that side; finite bounds are closed.
class Strip {
 public:
  Strip(double y_min, double y_max);
  static Strip whole_plane();
  static Strip line(double y) { return Strip(y, y); }

  double y_min() const { return y_min_; }
  double y_max() const { return y_max_; }
  bool contains_y(double y) const { return y >= y_min_ && y <= y_max_; }
  bool is_closed() const;

  // Closed substrip [alpha, beta]; must sit inside the strip and strictly
  // inside any open (infinite) side.
  Strip closed_substrip(double alpha, double beta) const;

  static Strip intersect(const Strip& a, const Strip& b);

 private:
  double y_min_;
  double y_max_;
};

// A function on a strip, evaluated pointwise.  Evaluators must be
// deterministic: identical points give bit-identical values.
class StripFunction {
 public:
  using Evaluator = std::function<Complex(ComplexPoint)>;

  StripFunction(Strip domain, Evaluator eval);

  Complex operator()(ComplexPoint z) const;
  Complex operator()(double x, double y) const { return (*this)(ComplexPoint{x, y}); }
  const Strip& domain() const { return domain_; }

  StripFunction shifted(double tau) const;      // z -> f(z + tau)
  StripFunction modulated(double lambda) const; // z -> f(z) e^{i lambda x}
  StripFunction scaled(Complex c) const;        // z -> c f(z)

 private:
  Strip domain_;
  Evaluator eval_;
};

StripFunction operator+(const StripFunction& f, const StripFunction& g);
StripFunction operator-(const StripFunction& f, const StripFunction& g);
StripFunction constant_function(Complex c);

enum class QuadratureRule { kMidpoint, kTrapezoid, kSimpson };

// Composite quadrature on horizontal windows.  `normalized` rescales the
// weights so they sum to the window length exactly (kills rounding drift and
// makes discrete power means comparable across p).
struct QuadratureSpec {
  double h = 0.02;
  QuadratureRule rule = QuadratureRule::kSimpson;
  bool normalized = true;
};

// Geometric ladder of window half-widths T_k = t0 * growth^k, k = 0..rungs-1.
// Finite stand-in for the T -> infinity limits; see metrics.hpp for how the
// last rung / upper half are used as limit surrogates.
struct WindowLadder {
  double t0 = 3.0;
  double growth = 3.0;
  int rungs = 6;

  std::vector<double> values() const;
};

// Nodes and weights for one window [center - T, center + T].  When the
// window is commensurable with the node spacing, nodes snap to the global
// lattice k*h so that overlapping windows share nodes bit-exactly.
struct WindowNodes {
  std::vector<double> x;
  std::vector<double> w;    // sum = 2T when normalized
  double spacing = 0.0;
};

WindowNodes make_window(double center_x, double half_width, const QuadratureSpec& quad);

// integral over [center.x - T, center.x + T] of |f(t + i center.y)|^p dt.
// Fixed ascending node order with compensated summation; throws
// std::runtime_error naming the node if f evaluates non-finite.
double window_integral(const StripFunction& f, ComplexPoint center, double half_width,
                       double p, const QuadratureSpec& quad);

// (1 / 2T) * integral of f(t + iy) over [center_x - T, center_x + T], complex.
Complex window_mean(const StripFunction& f, double center_x, double y, double half_width,
                    const QuadratureSpec& quad);

// Sampled sup of |f| over the rectangle [x_lo, x_hi] x [y_min, y_max]; always
// a lower bound for the true sup.  `refine` runs one golden-section pass in x
// around the best node (never decreases the result).
double grid_sup(const StripFunction& f, const Strip& strip, double x_lo, double x_hi,
                double x_step, double y_step, bool refine = false);

// Compensated (Kahan) accumulator; used everywhere a reduction must be
// deterministic and order-fixed.
class KahanSum {
 public:
  void add(double term);
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Arithmetic grid lo, lo+step, ..., through hi (inclusive within 1e-9*step).
std::vector<double> arithmetic_grid(double lo, double hi, double step);

// Runs fn(i) for i in [0, n) on up to APSTRIP_THREADS workers (default: all
// cores).  Results must not depend on the partition; callers only use this
// for element-wise fills of disjoint slots.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// Shortest round-trip decimal formatting; the only way doubles enter CSV.
std::string format_double(double v);

double raise_to(double base, double p);   // |.|^p with fast paths for small integer p

}  // namespace apstrip

#endif  // APSTRIP_CORE_HPP
