#include "apstrip/separators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace apstrip {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;

double pow3(int e) { return std::pow(3.0, e); }

// Mathematical residue of n mod 3, in {0, 1, 2}.
int mod3(long long n) { return static_cast<int>(((n % 3) + 3) % 3); }

}  // namespace

bool is_in_I(long long n) {
  if (n == 0) return false;
  while (n % 3 == 0) n /= 3;
  return mod3(n) == 1;
}

int ternary_level(long long n) {
  if (n == 0) throw std::invalid_argument("0 has no ternary level");
  int l = 1;
  while (n % 3 == 0) {
    n /= 3;
    ++l;
  }
  return l;
}

ProgressionIq progression_for_shift(long long q) {
  if (q == 0) throw std::invalid_argument("shift must be nonzero");
  long long scale = 1;  // 3^{r-1}
  long long core = q;
  while (core % 3 == 0) {
    core /= 3;
    scale *= 3;
  }
  ProgressionIq prog;
  prog.q = q;
  if (mod3(core) == 1) {
    // q = 3^{r-1}(3m+1): members 3^{r-1}(3j+1) shift onto 3^{r-1}(3(m+j+1)-1).
    prog.start = scale;
    prog.difference = 3 * scale;
  } else {
    // q = 3^{r-1}(3m-1): members 3^{r-1}(3(3j-m-1)+1) shift onto 3^r(3j-1).
    long long m = (core + 1) / 3;
    prog.start = scale * (3 * (-m - 1) + 1);
    prog.difference = 9 * scale;
  }
  return prog;
}

const char* separator_variant_name(SeparatorVariant v) {
  switch (v) {
    case SeparatorVariant::kT2: return "T2";
    case SeparatorVariant::kT3: return "T3";
    case SeparatorVariant::kT4: return "T4";
  }
  return "?";
}

void SeparatorSpec::validate() const {
  if (l_max < 1) throw std::invalid_argument("l_max must be >= 1");
  if (!(window >= 6.0)) throw std::invalid_argument("window must be >= 6");
  if (variant == SeparatorVariant::kT4 && !(p0 > 0.0))
    throw std::invalid_argument("p0 must be positive");
}

namespace {

Complex bump(double dx, double y) {
  // e^{-4((dx) + iy)^2} = e^{-4 dx^2 + 4 y^2} e^{-8 i dx y}
  return std::exp(Complex(-4.0 * (dx * dx - y * y), -8.0 * dx * y));
}

double level_weight(const SeparatorSpec& spec, int l) {
  switch (spec.variant) {
    case SeparatorVariant::kT2:
      return 1.0;
    case SeparatorVariant::kT3:
      return l <= spec.l_max ? static_cast<double>(l) : 0.0;
    case SeparatorVariant::kT4:
      return l <= spec.l_max ? std::pow(3.0, l / spec.p0) : 0.0;
  }
  return 0.0;
}

// Sum over member centers in [x - W, x + W] whose level passes `keep`.
template <typename LevelFilter>
Complex center_sum(const SeparatorSpec& spec, ComplexPoint z, LevelFilter keep) {
  KahanSum re, im;
  auto lo = static_cast<long long>(std::ceil(z.x - spec.window));
  auto hi = static_cast<long long>(std::floor(z.x + spec.window));
  for (long long n = lo; n <= hi; ++n) {
    if (n == 0 || !is_in_I(n)) continue;
    int l = ternary_level(n);
    if (!keep(l)) continue;
    double w = level_weight(spec, l);
    if (w == 0.0) continue;
    Complex b = bump(z.x - static_cast<double>(n), z.y);
    re.add(w * b.real());
    im.add(w * b.imag());
  }
  return {re.value(), im.value()};
}

}  // namespace

Complex phi_l(ComplexPoint z, int l, double window) {
  if (l < 1) throw std::invalid_argument("level must be >= 1");
  if (!(window >= 6.0)) throw std::invalid_argument("window must be >= 6");
  double s = pow3(l - 1);
  // centers s(3k+1) with |x - s(3k+1)| <= window
  auto k_lo = static_cast<long long>(std::ceil(((z.x - window) / s - 1.0) / 3.0));
  auto k_hi = static_cast<long long>(std::floor(((z.x + window) / s - 1.0) / 3.0));
  KahanSum re, im;
  for (long long k = k_lo; k <= k_hi; ++k) {
    Complex b = bump(z.x - s * (3.0 * static_cast<double>(k) + 1.0), z.y);
    re.add(b.real());
    im.add(b.imag());
  }
  return {re.value(), im.value()};
}

Complex separator_eval(const SeparatorSpec& spec, ComplexPoint z) {
  spec.validate();
  return center_sum(spec, z, [](int) { return true; });
}

StripFunction separator_function(const SeparatorSpec& spec) {
  spec.validate();
  return StripFunction(Strip::whole_plane(), [spec](ComplexPoint z) {
    return center_sum(spec, z, [](int) { return true; });
  });
}

StripFunction partial_sum(const SeparatorSpec& spec, int m) {
  spec.validate();
  if (m < 1) throw std::invalid_argument("partial sum needs m >= 1");
  if (spec.variant != SeparatorVariant::kT2 && m > spec.l_max)
    throw std::invalid_argument("partial sum level exceeds l_max");
  return StripFunction(Strip::whole_plane(), [spec, m](ComplexPoint z) {
    return center_sum(spec, z, [m](int l) { return l <= m; });
  });
}

IntegerScanBounds lemma1_bounds(long long r) {
  if (r < 10) throw std::invalid_argument("scan radius must be >= 10");
  SeparatorSpec spec;  // T2
  IntegerScanBounds out;
  out.sup_nonmembers = 0.0;
  out.inf_members = 1e300;
  for (long long n = -r; n <= r; ++n) {
    double v = separator_eval(spec, {static_cast<double>(n), 0.0}).real();
    if (is_in_I(n))
      out.inf_members = std::min(out.inf_members, v);
    else
      out.sup_nonmembers = std::max(out.sup_nonmembers, v);
  }
  return out;
}

double t2_lipschitz_bound() {
  static const double cached = [] {
    // The derivative majorant sum_n 8|x-n| e^{-4(x-n)^2} has period 1.
    double best = 0.0;
    for (long long i = 0; i <= 100000; ++i) {
      double x = static_cast<double>(i) * 1e-5;
      KahanSum acc;
      for (long long n = -8; n <= 9; ++n) {
        double d = x - static_cast<double>(n);
        acc.add(8.0 * std::abs(d) * std::exp(-4.0 * d * d));
      }
      best = std::max(best, acc.value());
    }
    return best;
  }();
  return cached;
}

DiscrepancyReport discrepancy_search(double tau, double a) {
  if (!(std::abs(tau) >= 1.0)) throw std::invalid_argument("|tau| must be >= 1");

  double lip = t2_lipschitz_bound();
  double gap = 1.0 - kSqrtPi / 2.0;
  int n_index = static_cast<int>(std::floor(lip / (0.5 * gap))) + 1;
  while (!(lip / n_index < 0.5 * gap)) ++n_index;

  DiscrepancyReport report;
  report.tau = tau;
  report.n = n_index;
  report.gamma = gap / (2.0 * n_index);

  // Two of the N+1 fractional parts of 0, tau, ..., N tau collide to 1/N.
  bool found = false;
  for (int hi = 1; hi <= n_index && !found; ++hi) {
    for (int lo = 0; lo < hi && !found; ++lo) {
      double f_hi = hi * tau - std::floor(hi * tau);
      double f_lo = lo * tau - std::floor(lo * tau);
      if (std::abs(f_hi - f_lo) <= 1.0 / n_index) {
        report.m = hi - lo;
        report.q = static_cast<long long>(std::floor(hi * tau)) -
                   static_cast<long long>(std::floor(lo * tau));
        found = true;
      }
    }
  }
  if (!found) throw std::runtime_error("pigeonhole pair not found");
  if (report.q == 0) throw std::runtime_error("pigeonhole produced a zero shift");

  ProgressionIq prog = progression_for_shift(report.q);
  double ell = static_cast<double>(prog.difference);
  // The unique progression element in [a, a + L).
  auto j = static_cast<long long>(std::ceil((a - static_cast<double>(prog.start)) / ell));
  long long member = prog.element(j);
  while (static_cast<double>(member) < a) member += prog.difference;
  while (static_cast<double>(member) - ell >= a) member -= prog.difference;

  SeparatorSpec spec;  // T2
  auto f = [&spec](double x) { return separator_eval(spec, {x, 0.0}).real(); };
  for (long long k = 0; k <= report.m; ++k) {
    double x = static_cast<double>(member) + static_cast<double>(k) * tau;
    double delta = std::abs(f(x + tau) - f(x));
    if (delta > report.gamma) {
      report.x = x;
      report.delta_f = delta;
      return report;
    }
  }
  throw std::runtime_error("no discrepancy witness in the guaranteed window");
}

std::string discrepancy_csv(const DiscrepancyReport& report) {
  std::ostringstream os;
  os << "tau,N,gamma,M,q,x,delta_f\n";
  os << format_double(report.tau) << ',' << report.n << ',' << format_double(report.gamma)
     << ',' << report.m << ',' << report.q << ',' << format_double(report.x) << ','
     << format_double(report.delta_f) << '\n';
  return os.str();
}

nlohmann::json discrepancy_json(const DiscrepancyReport& report) {
  return nlohmann::json{{"tau", report.tau}, {"N", report.n},
                        {"gamma", report.gamma}, {"M", report.m},
                        {"q", report.q},        {"x", report.x},
                        {"delta_f", report.delta_f}};
}

PowerSumCheck lemma4_check(double x, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("power must be >= 1");
  KahanSum acc;
  auto n_lo = static_cast<long long>(std::ceil((x - 8.0) / 3.0));
  auto n_hi = static_cast<long long>(std::floor((x + 8.0) / 3.0));
  for (long long n = n_lo; n <= n_hi; ++n) {
    double d = x - 3.0 * static_cast<double>(n);
    acc.add(std::exp(-4.0 * d * d));
  }
  PowerSumCheck out;
  out.lhs = std::pow(acc.value(), p);
  out.rhs = std::pow(2.0, p - 1.0) * acc.value();
  out.ok = out.lhs <= out.rhs + 1e-12;
  return out;
}

double gaussian_power_window(double p, double half_width) {
  if (!(p > 0.0) || !(half_width > 0.0))
    throw std::invalid_argument("power and half-width must be positive");
  // integral_{-a}^{a} e^{-4pt^2} dt = sqrt(pi/(4p)) erf(2 sqrt(p) a)
  double s = std::sqrt(p);
  return kSqrtPi / (2.0 * s) * std::erf(2.0 * s * half_width);
}

double t2_weyl_rate_bound(int m, double h) {
  if (m < 1) throw std::invalid_argument("partial-sum level must be >= 1");
  return 1.5 * kSqrtPi * std::pow(3.0, -m) * std::exp(4.0 * h * h);
}

double t2_weyl_rate_bound_finite(int m, double h, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("window half-length must be positive");
  return t2_weyl_rate_bound(m, h) + kSqrtPi * std::exp(4.0 * h * h) / (2.0 * t);
}

double t3_tail_bound(int m, double p) {
  if (m < 1 || !(p >= 1.0)) throw std::invalid_argument("need m >= 1 and p >= 1");
  KahanSum acc;
  for (int l = m + 1; l <= 2000; ++l) {
    double term = std::pow(l, 2.0 * p) * std::pow(3.0, -l);
    acc.add(term);
    if (term < 1e-15 * acc.value()) break;
  }
  return std::pow(2.0, p - 1.0) * 9.0 * kSqrtPi * acc.value();
}

double t3_window_bound(int l, double p, double t0) {
  if (l < 1) throw std::invalid_argument("level must be >= 1");
  return std::pow(l, p) * gaussian_power_window(p, t0);
}

double t4_window_bound(int l, double p, double p0) {
  if (l < 1 || !(p0 > 0.0)) throw std::invalid_argument("need l >= 1 and p0 > 0");
  return std::pow(3.0, l * p / p0) * gaussian_power_window(p, 0.5);
}

std::vector<WindowedNormRow> windowed_norm_at_centers(const SeparatorSpec& spec, int l,
                                                      long long n_lo, long long n_hi,
                                                      double p, double t0,
                                                      const QuadratureSpec& quad) {
  spec.validate();
  if (l < 1) throw std::invalid_argument("level must be >= 1");
  if (spec.variant != SeparatorVariant::kT2 && l > spec.l_max)
    throw std::invalid_argument("level exceeds l_max");
  if (n_lo > n_hi) throw std::invalid_argument("empty center range");
  if (!(p >= 1.0) || !(t0 > 0.0))
    throw std::invalid_argument("need p >= 1 and T0 > 0");

  StripFunction f = separator_function(spec);
  std::vector<WindowedNormRow> rows;
  rows.reserve(static_cast<std::size_t>(n_hi - n_lo + 1));
  for (long long n = n_lo; n <= n_hi; ++n) {
    WindowedNormRow row;
    row.variant = spec.variant;
    row.l = l;
    row.n = n;
    row.p = p;
    row.t0 = t0;
    double center = pow3(l) * static_cast<double>(n) + pow3(l - 1);
    row.value = window_integral(f, {center, 0.0}, t0, p, quad);
    switch (spec.variant) {
      case SeparatorVariant::kT2:
        row.bound = gaussian_power_window(p, t0);
        break;
      case SeparatorVariant::kT3:
        row.bound = t3_window_bound(l, p, t0);
        break;
      case SeparatorVariant::kT4:
        row.bound = t4_window_bound(l, p, spec.p0);
        break;
    }
    rows.push_back(row);
  }
  return rows;
}

std::string windowed_norm_csv(const std::vector<WindowedNormRow>& rows) {
  std::ostringstream os;
  os << "variant,l,n,p,T0,value,bound\n";
  for (const WindowedNormRow& r : rows) {
    os << separator_variant_name(r.variant) << ',' << r.l << ',' << r.n << ','
       << format_double(r.p) << ',' << format_double(r.t0) << ','
       << format_double(r.value) << ',' << format_double(r.bound) << '\n';
  }
  return os.str();
}

nlohmann::json windowed_norm_json(const std::vector<WindowedNormRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const WindowedNormRow& r : rows) {
    arr.push_back({{"variant", separator_variant_name(r.variant)},
                   {"l", r.l},
                   {"n", r.n},
                   {"p", r.p},
                   {"T0", r.t0},
                   {"value", r.value},
                   {"bound", r.bound}});
  }
  return arr;
}

}  // namespace apstrip
