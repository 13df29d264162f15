#ifndef APSTRIP_METRICS_HPP
#define APSTRIP_METRICS_HPP

#include <utility>
#include <vector>

#include "apstrip/core.hpp"
#include "json.hpp"

namespace apstrip {

enum class MetricKind { kUniform, kStepanov, kWeyl, kBesicovitch };

const char* metric_kind_name(MetricKind kind);

// Shift/sample grid for the sup over the substrip: x-shifts are an
// arithmetic grid, y runs over [alpha, beta] at y_step.  y_step = 0 means
// the default (beta - alpha) / 8 (a single sample on a line).
struct ShiftGrid {
  double x_min = 0.0;
  double x_max = 3.0;
  double x_step = 0.1;
  double y_step = 0.0;

  std::vector<double> x_values() const;
  std::vector<double> y_values(const Strip& substrip) const;
};

struct MetricRung {
  double t;
  double value;
};

// Finite-ladder estimate of a limsup-type metric.  Rung values are honest
// finite-T quantities; `surrogate` (max over the upper half of the ladder)
// is the stand-in for the T -> infinity limsup and is labeled as such in
// all outputs.  `node_sup` is the max of |f - g| over every quadrature node
// the estimate touched: the uniform distance restricted to shared nodes.
struct MetricEstimate {
  MetricKind kind = MetricKind::kWeyl;
  double p = 1.0;
  double alpha = 0.0;
  double beta = 0.0;
  std::vector<MetricRung> rungs;
  double surrogate = 0.0;
  double node_sup = 0.0;
};

// Sampled sup of |f - g| over the substrip; lower bound of the true sup.
double uniform_distance(const StripFunction& f, const StripFunction& g,
                        const Strip& substrip, const ShiftGrid& grid);

// sup over grid points z of (integral_0^1 |f(z+t) - g(z+t)|^p dt)^{1/p}.
double stepanov_distance(const StripFunction& f, const StripFunction& g, double p,
                         const Strip& substrip, const ShiftGrid& grid,
                         const QuadratureSpec& quad);

// Rung value at T: sup over grid points z of ((1/2T) integral_{-T}^{T}
// |f(z+t) - g(z+t)|^p dt)^{1/p}.
MetricEstimate weyl_distance(const StripFunction& f, const StripFunction& g, double p,
                             const Strip& substrip, const ShiftGrid& grid,
                             const WindowLadder& ladder, const QuadratureSpec& quad);

// Same windows but centered at x = 0 and sup over y samples only.
MetricEstimate besicovitch_distance(const StripFunction& f, const StripFunction& g,
                                    double p, const Strip& substrip,
                                    const WindowLadder& ladder, const QuadratureSpec& quad,
                                    double y_step = 0.0);

// Mean of f(t + iy) over symmetric windows along the ladder.  The surrogate
// is the last rung; shift_residual is the max over an x-shift grid of the
// distance between the shifted last-rung mean and the surrogate (how far the
// window average still depends on where the window sits).
struct MeanValueEstimate {
  double y = 0.0;
  std::vector<std::pair<double, Complex>> rungs;
  Complex surrogate;
  double shift_residual = 0.0;
};

MeanValueEstimate mean_value(const StripFunction& f, double y, const WindowLadder& ladder,
                             const QuadratureSpec& quad,
                             std::vector<double> residual_shifts = {});

// Interior bound 2*T0*C / (pi r^2) for |f| on a substrip, where C bounds the
// windowed integral sup_z integral_{-T0}^{T0} |f(z+u)| du on a wider substrip
// and r is the mollifier radius.  All arguments must be positive.
double interior_sup_bound(double c_bound, double t0, double r);

// One CSV row per rung, columns (kind, p, alpha, beta, T, value).
std::string metric_csv(const MetricEstimate& est);
nlohmann::json metric_json(const MetricEstimate& est);

}  // namespace apstrip

#endif  // APSTRIP_METRICS_HPP
