#include "apstrip/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace apstrip {

const char* metric_kind_name(MetricKind kind) {
  switch (kind) {
    case MetricKind::kUniform: return "uniform";
    case MetricKind::kStepanov: return "stepanov";
    case MetricKind::kWeyl: return "weyl";
    case MetricKind::kBesicovitch: return "besicovitch";
  }
  return "unknown";
}

std::vector<double> ShiftGrid::x_values() const { return arithmetic_grid(x_min, x_max, x_step); }

std::vector<double> ShiftGrid::y_values(const Strip& substrip) const {
  if (!substrip.is_closed())
    throw std::invalid_argument("metric substrip must have finite bounds");
  double alpha = substrip.y_min(), beta = substrip.y_max();
  if (alpha == beta) return {alpha};
  double step = y_step > 0.0 ? y_step : (beta - alpha) / 8.0;
  return arithmetic_grid(alpha, beta, step);
}

namespace {

struct SweepOutcome {
  double max_integral = 0.0;  // max over window centers of sum w |f-g|^p
  double node_sup = 0.0;      // max |f-g| over all touched nodes
};

// Windowed p-integrals of |f - g| at fixed height y for many window centers
// of equal half-width.  When every center sits on the lattice of the node
// spacing, values are computed once per lattice point and reused; per-window
// summation stays the fixed ascending compensated order either way, so both
// paths agree bit-for-bit with window_integral on the same window.
SweepOutcome sweep_windows(const StripFunction& f, const StripFunction& g, double p,
                           double y, double half_width,
                           const std::vector<double>& centers,
                           const QuadratureSpec& quad) {
  if (centers.empty()) throw std::invalid_argument("window sweep needs centers");
  WindowNodes probe = make_window(centers.front(), half_width, quad);
  const double spacing = probe.spacing;
  const std::size_t count = probe.x.size();
  const std::vector<double>& weights = probe.w;

  // The shared-lattice path needs endpoint nodes on integer multiples of the
  // spacing: rules with endpoint nodes, an even subinterval count, and every
  // center on the lattice.
  bool lattice = quad.rule != QuadratureRule::kMidpoint && (count - 1) % 2 == 0;
  std::vector<long long> bases(centers.size());
  if (lattice) {
    for (std::size_t i = 0; i < centers.size(); ++i) {
      double ratio = centers[i] / spacing;
      double snapped = std::round(ratio);
      if (std::abs(ratio - snapped) > 1e-9 * (1.0 + std::abs(ratio))) {
        lattice = false;
        break;
      }
      bases[i] = static_cast<long long>(snapped) -
                 static_cast<long long>((count - 1) / 2);
    }
  }

  SweepOutcome out;
  auto eval_abs = [&](double x) {
    double a = std::abs(f(x, y) - g(x, y));
    if (!std::isfinite(a)) {
      std::ostringstream os;
      os << "non-finite evaluation at node x=" << x << ", y=" << y;
      throw std::runtime_error(os.str());
    }
    return a;
  };

  if (lattice) {
    long long k_min = *std::min_element(bases.begin(), bases.end());
    long long k_max = *std::max_element(bases.begin(), bases.end()) +
                      static_cast<long long>(count) - 1;
    std::vector<double> values(static_cast<std::size_t>(k_max - k_min + 1));
    parallel_for(values.size(), [&](std::size_t i) {
      double x = static_cast<double>(k_min + static_cast<long long>(i)) * spacing;
      values[i] = eval_abs(x);
    });
    for (double v : values) out.node_sup = std::max(out.node_sup, v);
    std::vector<double> integrals(centers.size());
    parallel_for(centers.size(), [&](std::size_t c) {
      std::size_t offset = static_cast<std::size_t>(bases[c] - k_min);
      KahanSum acc;
      for (std::size_t i = 0; i < count; ++i)
        acc.add(weights[i] * raise_to(values[offset + i], p));
      integrals[c] = acc.value();
    });
    for (double v : integrals) out.max_integral = std::max(out.max_integral, v);
    return out;
  }

  // Midpoint nodes sit between lattice points; fall back to direct windows
  // for it and for incommensurable centers.
  std::vector<double> integrals(centers.size());
  std::vector<double> sups(centers.size());
  parallel_for(centers.size(), [&](std::size_t c) {
    WindowNodes nodes = make_window(centers[c], half_width, quad);
    KahanSum acc;
    double sup = 0.0;
    for (std::size_t i = 0; i < nodes.x.size(); ++i) {
      double a = eval_abs(nodes.x[i]);
      sup = std::max(sup, a);
      acc.add(nodes.w[i] * raise_to(a, p));
    }
    integrals[c] = acc.value();
    sups[c] = sup;
  });
  for (std::size_t c = 0; c < centers.size(); ++c) {
    out.max_integral = std::max(out.max_integral, integrals[c]);
    out.node_sup = std::max(out.node_sup, sups[c]);
  }
  return out;
}

void check_p(double p) {
  if (!(p >= 1.0) || !std::isfinite(p))
    throw std::invalid_argument("metric exponent requires 1 <= p < infinity");
}

MetricEstimate ladder_estimate(MetricKind kind, const StripFunction& f,
                               const StripFunction& g, double p, const Strip& substrip,
                               const std::vector<double>& centers,
                               const std::vector<double>& ys, const WindowLadder& ladder,
                               const QuadratureSpec& quad) {
  MetricEstimate est;
  est.kind = kind;
  est.p = p;
  est.alpha = substrip.y_min();
  est.beta = substrip.y_max();
  for (double t : ladder.values()) {
    double max_integral = 0.0;
    for (double y : ys) {
      SweepOutcome sw = sweep_windows(f, g, p, y, t, centers, quad);
      max_integral = std::max(max_integral, sw.max_integral);
      est.node_sup = std::max(est.node_sup, sw.node_sup);
    }
    est.rungs.push_back({t, std::pow(max_integral / (2.0 * t), 1.0 / p)});
  }
  std::size_t half = est.rungs.size() / 2;
  est.surrogate = 0.0;
  for (std::size_t i = half; i < est.rungs.size(); ++i)
    est.surrogate = std::max(est.surrogate, est.rungs[i].value);
  return est;
}

}  // namespace

double uniform_distance(const StripFunction& f, const StripFunction& g,
                        const Strip& substrip, const ShiftGrid& grid) {
  StripFunction diff = f - g;
  std::vector<double> ys = grid.y_values(substrip);
  double step = ys.size() > 1 ? ys[1] - ys[0] : 1.0;
  return grid_sup(diff, substrip, grid.x_min, grid.x_max, grid.x_step, step);
}

double stepanov_distance(const StripFunction& f, const StripFunction& g, double p,
                         const Strip& substrip, const ShiftGrid& grid,
                         const QuadratureSpec& quad) {
  check_p(p);
  std::vector<double> shifts = grid.x_values();
  std::vector<double> centers(shifts.size());
  for (std::size_t i = 0; i < shifts.size(); ++i) centers[i] = shifts[i] + 0.5;
  double best = 0.0;
  for (double y : grid.y_values(substrip)) {
    SweepOutcome sw = sweep_windows(f, g, p, y, 0.5, centers, quad);
    best = std::max(best, sw.max_integral);
  }
  return std::pow(best, 1.0 / p);
}

MetricEstimate weyl_distance(const StripFunction& f, const StripFunction& g, double p,
                             const Strip& substrip, const ShiftGrid& grid,
                             const WindowLadder& ladder, const QuadratureSpec& quad) {
  check_p(p);
  return ladder_estimate(MetricKind::kWeyl, f, g, p, substrip, grid.x_values(),
                         grid.y_values(substrip), ladder, quad);
}

MetricEstimate besicovitch_distance(const StripFunction& f, const StripFunction& g,
                                    double p, const Strip& substrip,
                                    const WindowLadder& ladder, const QuadratureSpec& quad,
                                    double y_step) {
  check_p(p);
  ShiftGrid grid;
  grid.y_step = y_step;
  return ladder_estimate(MetricKind::kBesicovitch, f, g, p, substrip, {0.0},
                         grid.y_values(substrip), ladder, quad);
}

MeanValueEstimate mean_value(const StripFunction& f, double y, const WindowLadder& ladder,
                             const QuadratureSpec& quad,
                             std::vector<double> residual_shifts) {
  MeanValueEstimate est;
  est.y = y;
  for (double t : ladder.values())
    est.rungs.emplace_back(t, window_mean(f, 0.0, y, t, quad));
  est.surrogate = est.rungs.back().second;

  if (residual_shifts.empty()) residual_shifts = arithmetic_grid(0.0, 9.0, 1.0);
  double t_last = est.rungs.back().first;
  for (double s : residual_shifts) {
    Complex m = window_mean(f, s, y, t_last, quad);
    est.shift_residual = std::max(est.shift_residual, std::abs(m - est.surrogate));
  }
  return est;
}

double interior_sup_bound(double c_bound, double t0, double r) {
  if (!(c_bound > 0.0) || !(t0 > 0.0) || !(r > 0.0))
    throw std::invalid_argument("interior bound requires positive C, T0, r");
  const double pi = 3.14159265358979323846;
  return 2.0 * t0 * c_bound / (pi * r * r);
}

std::string metric_csv(const MetricEstimate& est) {
  std::ostringstream os;
  os << "kind,p,alpha,beta,T,value\n";
  for (const MetricRung& r : est.rungs) {
    os << metric_kind_name(est.kind) << ',' << format_double(est.p) << ','
       << format_double(est.alpha) << ',' << format_double(est.beta) << ','
       << format_double(r.t) << ',' << format_double(r.value) << '\n';
  }
  return os.str();
}

nlohmann::json metric_json(const MetricEstimate& est) {
  nlohmann::json rungs = nlohmann::json::array();
  for (const MetricRung& r : est.rungs) rungs.push_back({{"T", r.t}, {"value", r.value}});
  return nlohmann::json{{"kind", metric_kind_name(est.kind)},
                        {"p", est.p},
                        {"alpha", est.alpha},
                        {"beta", est.beta},
                        {"rungs", rungs},
                        {"limsup_surrogate", est.surrogate},
                        {"node_sup", est.node_sup}};
}

}  // namespace apstrip
