#include "apstrip/core.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace apstrip {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void fail_arg(const std::string& msg) { throw std::invalid_argument(msg); }

}  // namespace

Strip::Strip(double y_min, double y_max) : y_min_(y_min), y_max_(y_max) {
  if (std::isnan(y_min) || std::isnan(y_max) || y_min > y_max)
    fail_arg("strip requires y_min <= y_max");
}

Strip Strip::whole_plane() { return Strip(-kInf, kInf); }

bool Strip::is_closed() const { return std::isfinite(y_min_) && std::isfinite(y_max_); }

Strip Strip::closed_substrip(double alpha, double beta) const {
  if (!(alpha <= beta)) fail_arg("substrip requires alpha <= beta");
  if (!std::isfinite(alpha) || !std::isfinite(beta))
    fail_arg("substrip bounds must be finite");
  bool ok_low = std::isfinite(y_min_) ? alpha >= y_min_ : alpha > y_min_;
  bool ok_high = std::isfinite(y_max_) ? beta <= y_max_ : beta < y_max_;
  if (!ok_low || !ok_high) fail_arg("substrip must lie inside the strip");
  return Strip(alpha, beta);
}

Strip Strip::intersect(const Strip& a, const Strip& b) {
  double lo = std::max(a.y_min_, b.y_min_);
  double hi = std::min(a.y_max_, b.y_max_);
  if (lo > hi) fail_arg("strips do not intersect");
  return Strip(lo, hi);
}

StripFunction::StripFunction(Strip domain, Evaluator eval)
    : domain_(domain), eval_(std::move(eval)) {
  if (!eval_) fail_arg("strip function requires an evaluator");
}

Complex StripFunction::operator()(ComplexPoint z) const {
  if (!domain_.contains_y(z.y)) {
    std::ostringstream os;
    os << "point y=" << z.y << " outside strip [" << domain_.y_min() << ", "
       << domain_.y_max() << "]";
    throw std::domain_error(os.str());
  }
  return eval_(z);
}

StripFunction StripFunction::shifted(double tau) const {
  Evaluator base = eval_;
  return StripFunction(domain_, [base, tau](ComplexPoint z) {
    return base(ComplexPoint{z.x + tau, z.y});
  });
}

StripFunction StripFunction::modulated(double lambda) const {
  Evaluator base = eval_;
  return StripFunction(domain_, [base, lambda](ComplexPoint z) {
    return base(z) * std::exp(Complex(0.0, lambda * z.x));
  });
}

StripFunction StripFunction::scaled(Complex c) const {
  Evaluator base = eval_;
  return StripFunction(domain_, [base, c](ComplexPoint z) { return c * base(z); });
}

StripFunction operator+(const StripFunction& f, const StripFunction& g) {
  Strip dom = Strip::intersect(f.domain(), g.domain());
  return StripFunction(dom, [f, g](ComplexPoint z) { return f(z) + g(z); });
}

StripFunction operator-(const StripFunction& f, const StripFunction& g) {
  Strip dom = Strip::intersect(f.domain(), g.domain());
  return StripFunction(dom, [f, g](ComplexPoint z) { return f(z) - g(z); });
}

StripFunction constant_function(Complex c) {
  return StripFunction(Strip::whole_plane(), [c](ComplexPoint) { return c; });
}

void KahanSum::add(double term) {
  double t = term - comp_;
  double s = sum_ + t;
  comp_ = (s - sum_) - t;
  sum_ = s;
}

std::vector<double> WindowLadder::values() const {
  if (!(t0 > 0.0) || !(growth > 1.0) || rungs < 1)
    fail_arg("ladder requires t0 > 0, growth > 1, rungs >= 1");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(rungs));
  double t = t0;
  for (int k = 0; k < rungs; ++k) {
    out.push_back(t);
    t *= growth;
  }
  return out;
}

WindowNodes make_window(double center_x, double half_width, const QuadratureSpec& quad) {
  if (!(half_width > 0.0)) fail_arg("window half-width must be positive");
  if (!(quad.h > 0.0)) fail_arg("quadrature spacing must be positive");
  double length = 2.0 * half_width;
  auto subintervals = static_cast<std::size_t>(std::ceil(length / quad.h - 1e-9));
  if (subintervals < 1) subintervals = 1;
  if (quad.rule == QuadratureRule::kSimpson && subintervals % 2 != 0) ++subintervals;
  double spacing = length / static_cast<double>(subintervals);

  WindowNodes out;
  out.spacing = spacing;

  // Snap to the global lattice k*spacing whenever the center sits on it, so
  // that overlapping windows of equal spacing share node values bit-exactly.
  double ratio = center_x / spacing;
  double snapped = std::round(ratio);
  bool on_lattice = std::abs(ratio - snapped) <= 1e-9 * (1.0 + std::abs(ratio));

  if (quad.rule == QuadratureRule::kMidpoint) {
    out.x.resize(subintervals);
    out.w.assign(subintervals, spacing);
    if (on_lattice) {
      double base = snapped - static_cast<double>(subintervals) / 2.0;
      for (std::size_t i = 0; i < subintervals; ++i)
        out.x[i] = (base + static_cast<double>(i) + 0.5) * spacing;
    } else {
      double left = center_x - half_width;
      for (std::size_t i = 0; i < subintervals; ++i)
        out.x[i] = left + (static_cast<double>(i) + 0.5) * spacing;
    }
  } else {
    std::size_t count = subintervals + 1;
    out.x.resize(count);
    out.w.resize(count);
    if (on_lattice) {
      double base = snapped - static_cast<double>(subintervals) / 2.0;
      for (std::size_t i = 0; i < count; ++i)
        out.x[i] = (base + static_cast<double>(i)) * spacing;
    } else {
      double left = center_x - half_width;
      for (std::size_t i = 0; i < count; ++i)
        out.x[i] = left + static_cast<double>(i) * spacing;
    }
    if (quad.rule == QuadratureRule::kTrapezoid) {
      for (std::size_t i = 0; i < count; ++i) out.w[i] = spacing;
      out.w.front() = 0.5 * spacing;
      out.w.back() = 0.5 * spacing;
    } else {
      double third = spacing / 3.0;
      for (std::size_t i = 0; i < count; ++i)
        out.w[i] = (i % 2 == 1) ? 4.0 * third : 2.0 * third;
      out.w.front() = third;
      out.w.back() = third;
    }
  }

  if (quad.normalized) {
    KahanSum total;
    for (double w : out.w) total.add(w);
    double scale = length / total.value();
    for (double& w : out.w) w *= scale;
  }
  return out;
}

double raise_to(double v, double p) {
  if (p == 1.0) return v;
  if (p == 2.0) return v * v;
  if (p == 3.0) return v * v * v;
  if (p == 4.0) return (v * v) * (v * v);
  return std::pow(v, p);
}

namespace {

[[noreturn]] void fail_nonfinite(double x, double y) {
  std::ostringstream os;
  os << "non-finite evaluation at node x=" << x << ", y=" << y;
  throw std::runtime_error(os.str());
}

}  // namespace

double window_integral(const StripFunction& f, ComplexPoint center, double half_width,
                       double p, const QuadratureSpec& quad) {
  if (!(p >= 1.0)) fail_arg("window integral requires p >= 1");
  WindowNodes nodes = make_window(center.x, half_width, quad);
  KahanSum acc;
  for (std::size_t i = 0; i < nodes.x.size(); ++i) {
    double a = std::abs(f(nodes.x[i], center.y));
    if (!std::isfinite(a)) fail_nonfinite(nodes.x[i], center.y);
    acc.add(nodes.w[i] * raise_to(a, p));
  }
  return acc.value();
}

Complex window_mean(const StripFunction& f, double center_x, double y, double half_width,
                    const QuadratureSpec& quad) {
  WindowNodes nodes = make_window(center_x, half_width, quad);
  KahanSum re, im;
  for (std::size_t i = 0; i < nodes.x.size(); ++i) {
    Complex v = f(nodes.x[i], y);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      fail_nonfinite(nodes.x[i], y);
    re.add(nodes.w[i] * v.real());
    im.add(nodes.w[i] * v.imag());
  }
  double length = 2.0 * half_width;
  return Complex(re.value() / length, im.value() / length);
}

std::vector<double> arithmetic_grid(double lo, double hi, double step) {
  if (!(step > 0.0)) fail_arg("grid step must be positive");
  if (hi < lo) fail_arg("grid requires hi >= lo");
  auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(lo + static_cast<double>(i) * step);
  return out;
}

double grid_sup(const StripFunction& f, const Strip& strip, double x_lo, double x_hi,
                double x_step, double y_step, bool refine) {
  if (!strip.is_closed()) fail_arg("grid sup requires a closed strip");
  std::vector<double> ys = strip.y_min() == strip.y_max()
                               ? std::vector<double>{strip.y_min()}
                               : arithmetic_grid(strip.y_min(), strip.y_max(), y_step);
  std::vector<double> xs = arithmetic_grid(x_lo, x_hi, x_step);
  if (xs.empty() || ys.empty()) fail_arg("grid sup requires a nonempty grid");

  double best = -1.0;
  double best_x = xs.front(), best_y = ys.front();
  for (double y : ys) {
    for (double x : xs) {
      double a = std::abs(f(x, y));
      if (!std::isfinite(a)) fail_nonfinite(x, y);
      if (a > best) {
        best = a;
        best_x = x;
        best_y = y;
      }
    }
  }

  if (refine) {
    // One golden-section pass on [best_x - step, best_x + step].
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = std::max(x_lo, best_x - x_step);
    double b = std::min(x_hi, best_x + x_step);
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    for (int it = 0; it < 40 && (b - a) > 1e-14; ++it) {
      double fc = std::abs(f(c, best_y));
      double fd = std::abs(f(d, best_y));
      if (fc > fd) {
        b = d;
      } else {
        a = c;
      }
      c = b - gr * (b - a);
      d = a + gr * (b - a);
      best = std::max(best, std::max(fc, fd));
    }
  }
  return best;
}

namespace {

std::size_t thread_budget() {
  static std::size_t budget = [] {
    unsigned hw = std::thread::hardware_concurrency();
    std::size_t n = hw == 0 ? 1 : hw;
    if (const char* env = std::getenv("APSTRIP_THREADS")) {
      char* end = nullptr;
      long v = std::strtol(env, &end, 10);
      if (end != env && v >= 1) n = std::min<std::size_t>(n, static_cast<std::size_t>(v));
    }
    return n;
  }();
  return budget;
}

}  // namespace

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  std::size_t workers = std::min(thread_budget(), n);
  if (workers <= 1 || n < 4096) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  const std::size_t chunk = 1024;
  auto worker = [&] {
    for (;;) {
      std::size_t begin = next.fetch_add(chunk);
      if (begin >= n) return;
      std::size_t end = std::min(begin + chunk, n);
      for (std::size_t i = begin; i < end; ++i) fn(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace apstrip
