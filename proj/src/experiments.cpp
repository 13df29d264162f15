#include "apstrip/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "apstrip/bochner_fejer.hpp"
#include "apstrip/core.hpp"
#include "apstrip/exp_sum.hpp"
#include "apstrip/metrics.hpp"
#include "apstrip/separators.hpp"

namespace apstrip {
namespace {

constexpr const char* kVersion = "0.1.0";

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Fixed-stream integer scrambler: every "randomized" experiment draws from
// this with a constant seed, so reruns are bit-identical.
struct Splitmix {
  std::uint64_t state;
  explicit Splitmix(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(next() >> 11) * 0x1.0p-53);
  }
  int pick(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }
};

enum class ParamType { kInt, kReal, kString };

struct ParamSpec {
  const char* key;
  ParamType type;
  const char* fallback;
  double lo;
  double hi;
};

struct Schema {
  const char* id;
  const char* summary;
  std::vector<ParamSpec> params;
};

const std::vector<Schema>& schemas() {
  static const std::vector<Schema> table = {
      {"metrics-ordering",
       "metric chain, p-monotonicity, Stepanov bridge, and the Gaussian Weyl-null example",
       {{"pairs", ParamType::kInt, "20", 1, 200}}},
      {"kernel-properties",
       "averaging-kernel coefficient table, positivity scan, and degree monotonicity",
       {{"degree", ParamType::kInt, "8", 1, 12},
        {"scan_range", ParamType::kReal, "100", 1, 1000},
        {"scan_step", ParamType::kReal, "0.01", 1e-4, 1}}},
      {"theorem1-approx",
       "exact convolution against windowed coefficient estimates on random sums",
       {{"count", ParamType::kInt, "100", 1, 1000}}},
      {"lemma1",
       "integer scan bounds for the separating function",
       {{"R", ParamType::kInt, "100", 10, 100000}}},
      {"lemma2",
       "shifted-progression membership invariants",
       {{"q_range", ParamType::kInt, "50", 1, 1000},
        {"j_range", ParamType::kInt, "200", 1, 100000}}},
      {"lemma3",
       "shift discrepancy witness search",
       {{"tau", ParamType::kReal, "1.0", -1e6, 1e6},
        {"a", ParamType::kReal, "0.0", -1e9, 1e9}}},
      {"lemma4",
       "power-sum inequality sweep",
       {{"x_max", ParamType::kReal, "3.0", 0.1, 100},
        {"x_step", ParamType::kReal, "0.001", 1e-6, 1}}},
      {"theorem2-rate",
       "decay of the Weyl-1 distance to periodic partial sums",
       {{"m", ParamType::kInt, "3", 1, 5},
        {"H", ParamType::kReal, "0.0", 0, 1}}},
      {"theorem3-separation",
       "windowed norm growth against bounded Besicovitch rungs",
       {{"p", ParamType::kReal, "2.0", 1, 8},
        {"T0", ParamType::kReal, "0.5", 1e-3, 10},
        {"l_min", ParamType::kInt, "2", 1, 12},
        {"l_max", ParamType::kInt, "6", 1, 12},
        {"n_lo", ParamType::kInt, "0", -1000, 1000},
        {"n_hi", ParamType::kInt, "2", -1000, 1000}}},
      {"theorem4-separation",
       "windowed mean slope against capped p-rungs",
       {{"p", ParamType::kReal, "1.0", 1, 8},
        {"p'", ParamType::kReal, "2.0", 1, 8},
        {"p0", ParamType::kReal, "1.5", 1e-3, 8},
        {"T0", ParamType::kReal, "0.5", 1e-3, 10},
        {"l_min", ParamType::kInt, "2", 1, 12},
        {"l_max", ParamType::kInt, "7", 1, 12}}},
      {"mean-value",
       "window means of the separating function and of exponential sums",
       {{"rungs", ParamType::kInt, "8", 1, 9},
        {"y", ParamType::kReal, "0.0", -1, 1}}},
  };
  return table;
}

const Schema& schema_for(const std::string& id) {
  for (const Schema& s : schemas())
    if (id == s.id) return s;
  throw std::invalid_argument("unknown experiment id '" + id + "'");
}

const ParamSpec* param_spec(const Schema& schema, const std::string& key) {
  if (key == "out") {
    static const ParamSpec out{"out", ParamType::kString, ".", 0, 0};
    return &out;
  }
  for (const ParamSpec& p : schema.params)
    if (key == p.key) return &p;
  return nullptr;
}

long long parse_int_value(const std::string& key, const std::string& value) {
  const char* begin = value.c_str();
  char* end = nullptr;
  long long v = std::strtoll(begin, &end, 10);
  if (end == begin || *end != '\0')
    throw std::invalid_argument("key '" + key + "' expects an integer, got '" + value + "'");
  return v;
}

double parse_real_value(const std::string& key, const std::string& value) {
  const char* begin = value.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v))
    throw std::invalid_argument("key '" + key + "' expects a finite number, got '" + value + "'");
  return v;
}

void check_value(const ParamSpec& spec, const std::string& value) {
  if (spec.type == ParamType::kString) return;
  double v = spec.type == ParamType::kInt
                 ? static_cast<double>(parse_int_value(spec.key, value))
                 : parse_real_value(spec.key, value);
  if (v < spec.lo || v > spec.hi) {
    std::ostringstream os;
    os << "key '" << spec.key << "' out of range: expected a value in [" << spec.lo << ", "
       << spec.hi << "], got " << value;
    throw std::invalid_argument(os.str());
  }
}

void cross_validate(const ExperimentConfig& cfg) {
  if (cfg.experiment == "lemma3") {
    if (std::abs(cfg.get_real("tau")) < 1.0)
      throw std::invalid_argument("key 'tau' out of range: |tau| must be at least 1");
  } else if (cfg.experiment == "theorem3-separation") {
    if (cfg.get_int("l_max") < cfg.get_int("l_min"))
      throw std::invalid_argument("key 'l_max' must be at least l_min");
    if (cfg.get_int("n_hi") < cfg.get_int("n_lo"))
      throw std::invalid_argument("key 'n_hi' must be at least n_lo");
  } else if (cfg.experiment == "theorem4-separation") {
    double p = cfg.get_real("p");
    double pp = cfg.get_real("p'");
    double p0 = cfg.get_real("p0");
    if (pp <= p) throw std::invalid_argument("key 'p'': p' must exceed p");
    if (p0 <= p || p0 >= pp)
      throw std::invalid_argument("key 'p0' must lie strictly between p and p'");
    if (cfg.get_int("l_max") < cfg.get_int("l_min"))
      throw std::invalid_argument("key 'l_max' must be at least l_min");
  }
}

std::string fmt(double v) { return format_double(v); }
std::string fmt(long long v) { return std::to_string(v); }
std::string fmt(int v) { return std::to_string(v); }

const char* mark(bool ok) { return ok ? "1" : "0"; }

StripFunction zero_function() { return constant_function(Complex(0.0, 0.0)); }

// ---------------------------------------------------------------------------
// lemma1: integer scan of the separating function

ResultTable run_lemma1(const ExperimentConfig& cfg) {
  ResultTable t;
  t.columns = {"quantity", "value", "bound", "ok"};
  long long r = cfg.get_int("R");
  IntegerScanBounds b = lemma1_bounds(r);

  double sup_cap = std::sqrt(std::numbers::pi) / 2.0 + 1e-6;
  double inf_floor = 1.0 - 1e-9;
  bool sup_ok = b.sup_nonmembers <= sup_cap;
  bool inf_ok = b.inf_members >= inf_floor;
  t.rows.push_back({"sup_nonmembers", fmt(b.sup_nonmembers), fmt(sup_cap), mark(sup_ok)});
  t.rows.push_back({"inf_members", fmt(b.inf_members), fmt(inf_floor), mark(inf_ok)});
  if (!sup_ok)
    t.violations.push_back("sup over nonmembers " + fmt(b.sup_nonmembers) +
                           " exceeds sqrt(pi)/2 + 1e-6 = " + fmt(sup_cap));
  if (!inf_ok)
    t.violations.push_back("inf over members " + fmt(b.inf_members) +
                           " falls below 1 - 1e-9");
  return t;
}

// ---------------------------------------------------------------------------
// lemma2: progression membership invariants

ResultTable run_lemma2(const ExperimentConfig& cfg) {
  ResultTable t;
  t.columns = {"q", "start", "difference", "checked", "member_failures", "shift_failures"};
  long long q_range = cfg.get_int("q_range");
  long long j_range = cfg.get_int("j_range");

  for (long long q = -q_range; q <= q_range; ++q) {
    if (q == 0) continue;
    ProgressionIq prog = progression_for_shift(q);
    long long member_bad = 0;
    long long shift_bad = 0;
    for (long long j = -j_range; j <= j_range; ++j) {
      long long n = prog.element(j);
      if (!is_in_I(n)) ++member_bad;
      if (is_in_I(n + q)) ++shift_bad;
    }
    t.rows.push_back({fmt(q), fmt(prog.start), fmt(prog.difference), fmt(2 * j_range + 1),
                      fmt(member_bad), fmt(shift_bad)});
    if (member_bad > 0)
      t.violations.push_back("progression for q=" + fmt(q) + " leaves the member set at " +
                             fmt(member_bad) + " of " + fmt(2 * j_range + 1) + " offsets");
    if (shift_bad > 0)
      t.violations.push_back("progression for q=" + fmt(q) + " shifted by q re-enters the member set at " +
                             fmt(shift_bad) + " offsets");
  }
  return t;
}

// ---------------------------------------------------------------------------
// lemma3: discrepancy witness

ResultTable run_lemma3(const ExperimentConfig& cfg) {
  ResultTable t;
  t.columns = {"tau", "N", "gamma", "M", "q", "x", "delta_f"};
  double tau = cfg.get_real("tau");
  double a = cfg.get_real("a");
  DiscrepancyReport rep = discrepancy_search(tau, a);
  t.rows.push_back({fmt(rep.tau), fmt(rep.n), fmt(rep.gamma), fmt(rep.m), fmt(rep.q),
                    fmt(rep.x), fmt(rep.delta_f)});

  if (!(rep.delta_f > rep.gamma))
    t.violations.push_back("delta_f " + fmt(rep.delta_f) + " does not exceed gamma " +
                           fmt(rep.gamma));
  if (rep.m < 1 || rep.m > rep.n)
    t.violations.push_back("pigeonhole index M=" + fmt(rep.m) + " falls outside [1, " +
                           fmt(rep.n) + "]");
  double cert = std::abs(static_cast<double>(rep.m) * tau - static_cast<double>(rep.q));
  double cert_cap = 1.0 / static_cast<double>(rep.n) + 1e-12;
  if (cert > cert_cap)
    t.violations.push_back("certificate |M tau - q| = " + fmt(cert) + " exceeds 1/N = " +
                           fmt(cert_cap));
  if (tau == 1.0) {
    double floor = 1.0 - std::sqrt(std::numbers::pi) / 2.0 - 1e-6;
    if (rep.delta_f < floor)
      t.violations.push_back("integer-shift witness delta_f " + fmt(rep.delta_f) +
                             " falls below 1 - sqrt(pi)/2 - 1e-6 = " + fmt(floor));
  }
  return t;
}

// ---------------------------------------------------------------------------
// lemma4: power-sum inequality sweep

ResultTable run_lemma4(const ExperimentConfig& cfg) {
  ResultTable t;
  t.columns = {"p", "points", "worst_x", "lhs", "rhs", "ok"};
  double x_max = cfg.get_real("x_max");
  double x_step = cfg.get_real("x_step");
  std::vector<double> grid = arithmetic_grid(0.0, x_max, x_step);

  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    double worst_margin = -1e300;
    double worst_x = 0.0;
    PowerSumCheck worst{};
    bool all_ok = true;
    for (double x : grid) {
      PowerSumCheck c = lemma4_check(x, p);
      all_ok = all_ok && c.ok;
      double margin = c.lhs - c.rhs;
      if (margin > worst_margin) {
        worst_margin = margin;
        worst_x = x;
        worst = c;
      }
    }
    t.rows.push_back({fmt(p), fmt(static_cast<long long>(grid.size())), fmt(worst_x),
                      fmt(worst.lhs), fmt(worst.rhs), mark(all_ok)});
    if (!all_ok)
      t.violations.push_back("power-sum inequality fails at x=" + fmt(worst_x) + ", p=" +
                             fmt(p) + ": lhs " + fmt(worst.lhs) + " > rhs " + fmt(worst.rhs) +
                             " + 1e-12");
  }
  return t;
}

// ---------------------------------------------------------------------------
// theorem2-rate: Weyl-1 decay toward the periodic partial sum

ResultTable run_theorem2_rate(const ExperimentConfig& cfg) {
  ResultTable t;
  t.columns = {"m", "H", "T", "value", "limit_bound", "finite_bound", "ok"};
  int m = static_cast<int>(cfg.get_int("m"));
  double h = cfg.get_real("H");

  SeparatorSpec spec;
  StripFunction f = separator_function(spec);
  StripFunction fm = partial_sum(spec, m);
  Strip sub = h == 0.0 ? Strip::line(0.0) : Strip(-h, h);
  // One full period of f_m plus the adjacent level-(m+1) centers, so the sup
  // catches the dominant residual bump.
  ShiftGrid grid{0.0, std::pow(3.0, m + 1), 0.1, 0.0};
  QuadratureSpec quad;
  MetricEstimate est = weyl_distance(f, fm, 1.0, sub, grid, WindowLadder{}, quad);

  double cap = t2_weyl_rate_bound(m, h) + 1e-6;
  for (const MetricRung& rung : est.rungs) {
    double finite = t2_weyl_rate_bound_finite(m, h, rung.t);
    bool ok = rung.value <= cap;
    t.rows.push_back({fmt(m), fmt(h), fmt(rung.t), fmt(rung.value), fmt(cap), fmt(finite),
                      mark(ok)});
    if (!ok)
      t.violations.push_back("weyl-1 rung at T=" + fmt(rung.t) + " value " + fmt(rung.value) +
                             " exceeds (3 sqrt(pi)/2) 3^-m e^{4H^2} + 1e-6 = " + fmt(cap) +
                             " (m=" + fmt(m) + ", H=" + fmt(h) + ")");
  }
  return t;
}

// ---------------------------------------------------------------------------
// kernel-properties: coefficient table, positivity scan, degree monotonicity

ResultTable run_kernel_properties(const ExperimentConfig& cfg) {
  ResultTable t;
  t.columns = {"basis",      "degree",   "entries",  "weight_min", "weight_max",
               "zero_weight", "symmetry_gap", "eval_min", "fixed_tuple_weight", "ok"};
  int max_degree = static_cast<int>(cfg.get_int("degree"));
  double scan_range = cfg.get_real("scan_range");
  double scan_step = cfg.get_real("scan_step");
  std::vector<double> scan = arithmetic_grid(-scan_range, scan_range, scan_step);

  struct BasisCase {
    const char* label;
    std::vector<double> elements;
  };
  const BasisCase cases[] = {{"1", {1.0}}, {"1;sqrt2", {1.0, std::sqrt(2.0)}}};

  for (const BasisCase& bc : cases) {
    RationalBasis basis(bc.elements);
    double prev_fixed = 0.0;
    for (int d = 1; d <= max_degree; ++d) {
      AveragingKernel kernel = build_kernel(basis, std::vector<int>(bc.elements.size(), d));

      double wmin = 1e300;
      double wmax = -1e300;
      double symmetry_gap = 0.0;
      for (const KernelEntry& e : kernel.entries()) {
        wmin = std::min(wmin, e.weight);
        wmax = std::max(wmax, e.weight);
        std::vector<int> neg(e.tuple.size());
        for (std::size_t j = 0; j < e.tuple.size(); ++j) neg[j] = -e.tuple[j];
        symmetry_gap =
            std::max(symmetry_gap, std::abs(e.weight - kernel.weight_for_tuple(neg)));
      }
      double zero_weight =
          kernel.weight_for_tuple(std::vector<int>(bc.elements.size(), 0));

      double eval_min = 1e300;
      std::vector<double> values(scan.size());
      parallel_for(scan.size(), [&](std::size_t i) { values[i] = kernel.eval(scan[i]); });
      for (double v : values) eval_min = std::min(eval_min, v);

      double fixed = kernel.weight_for_tuple(std::vector<int>(bc.elements.size(), 1));
      bool monotone = fixed > prev_fixed;

      bool row_ok = wmin > 0.0 && wmax <= 1.0 && zero_weight == 1.0 && symmetry_gap == 0.0 &&
                    eval_min >= -1e-9 && monotone;
      t.rows.push_back({bc.label, fmt(d), fmt(static_cast<long long>(kernel.size())),
                        fmt(wmin), fmt(wmax), fmt(zero_weight), fmt(symmetry_gap),
                        fmt(eval_min), fmt(fixed), mark(row_ok)});

      std::string where = std::string(" (basis ") + bc.label + ", degree " + fmt(d) + ")";
      if (!(wmin > 0.0 && wmax <= 1.0))
        t.violations.push_back("coefficient weights leave (0, 1]: min " + fmt(wmin) +
                               ", max " + fmt(wmax) + where);
      if (zero_weight != 1.0)
        t.violations.push_back("zero-tuple weight " + fmt(zero_weight) +
                               " is not exactly 1" + where);
      if (symmetry_gap != 0.0)
        t.violations.push_back("coefficient table breaks symmetry by " + fmt(symmetry_gap) +
                               where);
      if (eval_min < -1e-9)
        t.violations.push_back("kernel evaluation dips to " + fmt(eval_min) +
                               " below -1e-9" + where);
      if (!monotone)
        t.violations.push_back("fixed-tuple weight " + fmt(fixed) +
                               " fails to increase past " + fmt(prev_fixed) + where);
      prev_fixed = fixed;
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// theorem1-approx: convolution exactness and windowed estimate leakage

ResultTable run_theorem1_approx(const ExperimentConfig& cfg) {
  ResultTable t;
  t.columns = {"index", "terms", "conv_gap", "max_abs_err", "worst_excess", "ok"};
  int count = static_cast<int>(cfg.get_int("count"));

  double r2 = std::sqrt(2.0);
  AveragingKernel kernel = build_kernel(RationalBasis({1.0, r2}), {2, 2});
  std::vector<double> support;
  for (const KernelEntry& e : kernel.entries()) support.push_back(e.frequency);

  WindowLadder ladder;
  QuadratureSpec quad;
  double t_last = ladder.values().back();
  Splitmix rng(0x7a9b34c1d2e5f681ULL);

  for (int i = 0; i < count; ++i) {
    int n_terms = 3 + rng.pick(4);
    std::vector<int> chosen;
    while (static_cast<int>(chosen.size()) < n_terms) {
      int idx = rng.pick(static_cast<int>(support.size()));
      if (std::find(chosen.begin(), chosen.end(), idx) == chosen.end()) chosen.push_back(idx);
    }
    std::vector<ExpSum::Term> terms;
    for (int idx : chosen)
      terms.push_back({support[static_cast<std::size_t>(idx)],
                       CoefficientProfile::constant({rng.uniform(-1.0, 1.0),
                                                     rng.uniform(-1.0, 1.0)})});
    bool foreign = rng.pick(2) == 0;
    if (foreign)
      terms.push_back({5.5 + rng.uniform(0.0, 1.0),
                       CoefficientProfile::constant({rng.uniform(-1.0, 1.0),
                                                     rng.uniform(-1.0, 1.0)})});
    ExpSum s(Strip::line(0.0), terms);

    ExpSum conv = convolve_exact(s, kernel);
    double conv_gap = 0.0;
    std::size_t in_support = 0;
    for (const ExpSum::Term& src : s.terms()) {
      double w = kernel.weight_at(src.lambda);
      if (w == 0.0) continue;
      ++in_support;
      Complex expected = w * src.coeff(0.0);
      conv_gap = std::max(conv_gap,
                          std::abs(fourier_coefficient(conv, src.lambda)(0.0) - expected));
    }
    bool count_ok = conv.terms().size() == in_support;

    ExpSum approx = bf_approximate(s.as_function(), kernel, {0.0}, ladder, quad);
    double max_err = 0.0;
    double worst_excess = -1e300;
    for (const ExpSum::Term& term : approx.terms()) {
      KahanSum budget;
      for (const ExpSum::Term& src : s.terms()) {
        double gap = std::abs(src.lambda - term.lambda);
        if (gap <= 1e-9) continue;
        budget.add(std::abs(src.coeff(0.0)) / gap);
      }
      double leak = 2.0 * budget.value() / (2.0 * t_last) + 1e-5;
      double err = std::abs(term.coeff(0.0) - fourier_coefficient(conv, term.lambda)(0.0));
      max_err = std::max(max_err, err);
      worst_excess = std::max(worst_excess, err - leak);
    }
    bool ok = conv_gap <= 1e-12 && count_ok && worst_excess <= 0.0;
    t.rows.push_back({fmt(i), fmt(static_cast<long long>(s.terms().size())), fmt(conv_gap),
                      fmt(max_err), fmt(worst_excess), mark(ok)});
    if (conv_gap > 1e-12)
      t.violations.push_back("sum " + fmt(i) + ": convolution coefficient deviates by " +
                             fmt(conv_gap) + " (> 1e-12)");
    if (!count_ok)
      t.violations.push_back("sum " + fmt(i) +
                             ": convolution kept a frequency outside the kernel support");
    if (worst_excess > 0.0)
      t.violations.push_back("sum " + fmt(i) + ": windowed estimate misses the exact " +
                             "coefficient by " + fmt(worst_excess) +
                             " beyond the leakage budget");
  }
  return t;
}

// ---------------------------------------------------------------------------
// metrics-ordering: chain, p-monotonicity, bridge, Gaussian example

struct PairEstimates {
  MetricEstimate weyl;
  MetricEstimate bes;
};

ResultTable run_metrics_ordering(const ExperimentConfig& cfg) {
  ResultTable t;
  t.columns = {"check", "case", "p", "worst_gap", "tolerance", "ok"};
  int pairs = static_cast<int>(cfg.get_int("pairs"));

  double r2 = std::sqrt(2.0);
  const std::vector<double> pool = {0.0,      1.0, -1.0,     2.0,        3.0,
                                    r2,       -r2, 1.0 + r2, 2.0 * r2,   std::numbers::pi};
  Strip line = Strip::line(0.0);
  QuadratureSpec quad;
  WindowLadder ladder;
  const double p_values[] = {1.0, 2.0, 4.0};
  Splitmix rng(0x51c3a9e8b7d60f42ULL);

  auto push_check = [&](const std::string& check, const std::string& which, double p,
                        double worst, double tol) {
    bool ok = worst <= tol;
    t.rows.push_back({check, which, fmt(p), fmt(worst), fmt(tol), mark(ok)});
    if (!ok)
      t.violations.push_back(check + " fails for " + which + " at p=" + fmt(p) + ": gap " +
                             fmt(worst) + " > " + fmt(tol));
  };

  for (int i = 0; i < pairs; ++i) {
    int nf = 2 + rng.pick(3);
    std::vector<int> chosen;
    while (static_cast<int>(chosen.size()) < nf) {
      int idx = rng.pick(static_cast<int>(pool.size()));
      if (std::find(chosen.begin(), chosen.end(), idx) == chosen.end()) chosen.push_back(idx);
    }
    std::vector<ExpSum::Term> f_terms;
    for (int idx : chosen)
      f_terms.push_back({pool[static_cast<std::size_t>(idx)],
                         CoefficientProfile::constant({rng.uniform(-1.0, 1.0),
                                                       rng.uniform(-1.0, 1.0)})});

    std::vector<ExpSum::Term> g_terms = f_terms;
    g_terms[0].coeff = g_terms[0].coeff.scaled(Complex(rng.uniform(0.25, 1.75), 0.0));
    if (g_terms.size() >= 3 && rng.pick(2) == 0) g_terms.pop_back();
    if (rng.pick(2) == 0) {
      int extra = rng.pick(static_cast<int>(pool.size()));
      if (std::find(chosen.begin(), chosen.end(), extra) == chosen.end())
        g_terms.push_back({pool[static_cast<std::size_t>(extra)],
                           CoefficientProfile::constant({rng.uniform(-0.5, 0.5),
                                                         rng.uniform(-0.5, 0.5)})});
    }
    StripFunction f = ExpSum(line, f_terms).as_function();
    StripFunction g = ExpSum(line, g_terms).as_function();

    PairEstimates by_p[3];
    for (int k = 0; k < 3; ++k) {
      by_p[k].weyl = weyl_distance(f, g, p_values[k], line, ShiftGrid{}, ladder, quad);
      by_p[k].bes = besicovitch_distance(f, g, p_values[k], line, ladder, quad);
    }

    std::string which = "pair " + fmt(i);
    for (int k = 0; k < 3; ++k) {
      double chain1 = -1e300;
      double chain2 = -1e300;
      for (std::size_t r = 0; r < by_p[k].weyl.rungs.size(); ++r) {
        chain1 = std::max(chain1, by_p[k].bes.rungs[r].value - by_p[k].weyl.rungs[r].value);
        chain2 = std::max(chain2, by_p[k].weyl.rungs[r].value - by_p[k].weyl.node_sup);
      }
      push_check("bes_le_weyl", which, p_values[k], chain1, 1e-9);
      push_check("weyl_le_uniform", which, p_values[k], chain2, 1e-9);
    }
    for (int k = 0; k + 1 < 3; ++k) {
      double gap_w = -1e300;
      double gap_b = -1e300;
      for (std::size_t r = 0; r < by_p[k].weyl.rungs.size(); ++r) {
        gap_w = std::max(gap_w,
                         by_p[k].weyl.rungs[r].value - by_p[k + 1].weyl.rungs[r].value);
        gap_b = std::max(gap_b, by_p[k].bes.rungs[r].value - by_p[k + 1].bes.rungs[r].value);
      }
      push_check("p_monotone_weyl", which, p_values[k + 1], gap_w, 1e-9);
      push_check("p_monotone_bes", which, p_values[k + 1], gap_b, 1e-9);
    }
  }

  // Stepanov-to-Weyl bridge on a fixed two-term sum with aligned unit
  // subwindows: rung(L)^p <= (floor(L)+1)/L * stepanov^p.
  ExpSum bridge_sum(Strip::whole_plane(),
                    {{1.0, CoefficientProfile::constant(1.0)},
                     {r2, CoefficientProfile::constant(0.5)}});
  StripFunction bf = bridge_sum.as_function();
  StripFunction zf = zero_function();
  for (double L : {1.5, 10.5}) {
    double factor = (std::floor(L) + 1.0) / L;
    ShiftGrid weyl_grid{0.0, 1.0, 0.5, 0.0};
    ShiftGrid step_grid{-(std::floor(L) + 1.0), std::floor(L) + 1.0, 0.5, 0.0};
    WindowLadder one_rung{L, 2.0, 1};
    for (double p : {1.0, 2.0}) {
      MetricEstimate w = weyl_distance(bf, zf, p, line, weyl_grid, one_rung, quad);
      double st = stepanov_distance(bf, zf, p, line, step_grid, quad);
      double lhs = std::pow(w.rungs[0].value, p);
      double rhs = factor * std::pow(st, p);
      push_check("stepanov_bridge", "L=" + fmt(L), p, lhs - rhs, 1e-9);
    }
  }

  // A Gaussian is Weyl-null: windowed 1-means on |y| <= 1 shrink like
  // e sqrt(pi) / (2T) and decrease along the ladder.
  Strip band(-1.0, 1.0);
  StripFunction gauss(band, [](ComplexPoint z) {
    Complex w(z.x * z.x - z.y * z.y, 2.0 * z.x * z.y);
    return std::exp(-w);
  });
  MetricEstimate gest =
      weyl_distance(gauss, zero_function(), 1.0, band, ShiftGrid{}, WindowLadder{125.0, 2.0, 4}, quad);
  double cap = std::numbers::e * std::sqrt(std::numbers::pi) / 2000.0 + 1e-9;
  push_check("gauss_rung_cap", "T=1000", 1.0, gest.rungs.back().value - cap, 0.0);
  double worst_rise = -1e300;
  for (std::size_t r = 0; r + 1 < gest.rungs.size(); ++r)
    worst_rise = std::max(worst_rise, gest.rungs[r + 1].value - gest.rungs[r].value);
  push_check("gauss_monotone", "ladder 125..1000", 1.0, worst_rise, 0.0);
  return t;
}

// ---------------------------------------------------------------------------
// theorem3-separation: windowed norms grow, Besicovitch rungs stay capped

ResultTable run_theorem3_separation(const ExperimentConfig& cfg) {
  ResultTable t;
  t.columns = {"kind", "l", "n", "T", "value", "bound", "ok"};
  double p = cfg.get_real("p");
  double t0 = cfg.get_real("T0");
  int l_min = static_cast<int>(cfg.get_int("l_min"));
  int l_max = static_cast<int>(cfg.get_int("l_max"));
  long long n_lo = cfg.get_int("n_lo");
  long long n_hi = cfg.get_int("n_hi");

  SeparatorSpec spec;
  spec.variant = SeparatorVariant::kT3;
  QuadratureSpec quad;

  std::vector<std::vector<WindowedNormRow>> levels;
  for (int l = l_min; l <= l_max; ++l)
    levels.push_back(windowed_norm_at_centers(spec, l, n_lo, n_hi, p, t0, quad));

  for (const auto& rows : levels) {
    for (const WindowedNormRow& row : rows) {
      bool ok = row.value >= row.bound - 1e-6;
      t.rows.push_back({"window", fmt(row.l), fmt(row.n), fmt(row.t0), fmt(row.value),
                        fmt(row.bound), mark(ok)});
      if (!ok)
        t.violations.push_back("windowed norm at l=" + fmt(row.l) + ", n=" + fmt(row.n) +
                               " value " + fmt(row.value) + " falls below bound " +
                               fmt(row.bound) + " - 1e-6");
    }
  }
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
    for (std::size_t j = 0; j < levels[i].size(); ++j) {
      if (!(levels[i + 1][j].value > levels[i][j].value))
        t.violations.push_back("windowed norm fails to increase from l=" +
                               fmt(levels[i][j].l) + " to l=" + fmt(levels[i + 1][j].l) +
                               " at n=" + fmt(levels[i][j].n));
    }
  }

  StripFunction f = separator_function(spec);
  MetricEstimate bes =
      besicovitch_distance(f, zero_function(), p, Strip::line(0.0), WindowLadder{}, quad);
  double cap = 10.0 * t3_tail_bound(6, p);
  double bes_max = 0.0;
  for (const MetricRung& rung : bes.rungs) {
    bes_max = std::max(bes_max, rung.value);
    bool ok = rung.value <= cap;
    t.rows.push_back({"besicovitch", "-", "-", fmt(rung.t), fmt(rung.value), fmt(cap),
                      mark(ok)});
    if (!ok)
      t.violations.push_back("besicovitch rung at T=" + fmt(rung.t) + " value " +
                             fmt(rung.value) + " exceeds the cap " + fmt(cap));
  }

  // Unbounded-vs-bounded contrast: the level-l window value dwarfs every
  // centered rung once l >= 5.
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i].front().l < 5) continue;
    double ratio = levels[i].front().value / bes_max;
    bool ok = ratio > 10.0;
    t.rows.push_back({"ratio", fmt(levels[i].front().l), fmt(n_lo), "-", fmt(ratio), "10",
                      mark(ok)});
    if (!ok)
      t.violations.push_back("window-to-rung ratio " + fmt(ratio) + " at l=" +
                             fmt(levels[i].front().l) + " fails to exceed 10");
  }
  return t;
}

// ---------------------------------------------------------------------------
// theorem4-separation: windowed mean slope vs capped p-rungs

ResultTable run_theorem4_separation(const ExperimentConfig& cfg) {
  ResultTable t;
  t.columns = {"kind", "l", "n", "T", "value", "bound", "ok"};
  double p = cfg.get_real("p");
  double pp = cfg.get_real("p'");
  double p0 = cfg.get_real("p0");
  double t0 = cfg.get_real("T0");
  int l_min = static_cast<int>(cfg.get_int("l_min"));
  int l_max = static_cast<int>(cfg.get_int("l_max"));

  SeparatorSpec spec;
  spec.variant = SeparatorVariant::kT4;
  spec.p0 = p0;
  QuadratureSpec quad;

  std::vector<double> log_values;
  std::vector<double> ls;
  double prev = 0.0;
  double ratio_target = std::pow(3.0, pp / p0);
  for (int l = l_min; l <= l_max; ++l) {
    WindowedNormRow row = windowed_norm_at_centers(spec, l, 0, 0, pp, t0, quad).front();
    bool ok = row.value >= row.bound - 1e-6;
    t.rows.push_back({"window", fmt(l), "0", fmt(t0), fmt(row.value), fmt(row.bound),
                      mark(ok)});
    if (!ok)
      t.violations.push_back("windowed p'-norm at l=" + fmt(l) + " value " + fmt(row.value) +
                             " falls below bound " + fmt(row.bound) + " - 1e-6");
    log_values.push_back(std::log(row.value));
    ls.push_back(static_cast<double>(l));
    if (l > l_min) {
      double ratio = row.value / prev;
      bool ratio_ok = std::abs(ratio - ratio_target) <= 0.10 * ratio_target;
      t.rows.push_back({"ratio", fmt(l), "0", fmt(t0), fmt(ratio), fmt(ratio_target),
                        mark(ratio_ok)});
      if (!ratio_ok)
        t.violations.push_back("window growth ratio " + fmt(ratio) + " from l=" + fmt(l - 1) +
                               " strays more than 10% from 3^{p'/p0} = " + fmt(ratio_target));
    }
    prev = row.value;
  }

  // Least-squares slope of log window value on l.
  double n = static_cast<double>(ls.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < ls.size(); ++i) {
    sx += ls[i];
    sy += log_values[i];
    sxx += ls[i] * ls[i];
    sxy += ls[i] * log_values[i];
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double target = (pp / p0) * std::log(3.0);
  bool slope_ok = std::abs(slope - target) <= 0.10 * target;
  t.rows.push_back({"slope", "-", "-", "-", fmt(slope), fmt(target), mark(slope_ok)});
  if (!slope_ok)
    t.violations.push_back("log window slope " + fmt(slope) +
                           " strays more than 10% from (p'/p0) ln 3 = " + fmt(target));

  // Cap on the p-rungs: comb means give (1/2T) int phi_l <= (3 sqrt(pi)/2)
  // 3^{1-l}, so for p = 1 the level sum telescopes to a geometric series;
  // for p > 1 the Hoelder split against sum l^{-q} does, provided p < p0.
  double cap;
  double x = std::pow(3.0, 1.0 / p0 - 1.0);
  if (p == 1.0) {
    cap = 4.5 * std::sqrt(std::numbers::pi) * x / (1.0 - x);
  } else {
    double q = p / (p - 1.0);
    KahanSum series;
    KahanSum holder;
    for (int l = 1; l <= 2000; ++l) {
      double term = std::pow(std::pow(3.0, l / p0) * l, p) * std::pow(2.0, p - 1.0) * 9.0 *
                    std::sqrt(std::numbers::pi) * std::pow(3.0, -l);
      double hterm = std::pow(static_cast<double>(l), -q);
      series.add(term);
      holder.add(hterm);
      if (term < 1e-15 * series.value() && hterm < 1e-15 * holder.value()) break;
    }
    cap = std::pow(series.value(), 1.0 / p) * std::pow(holder.value(), 1.0 / q);
  }

  StripFunction f = separator_function(spec);
  MetricEstimate bes =
      besicovitch_distance(f, zero_function(), p, Strip::line(0.0), WindowLadder{}, quad);
  for (const MetricRung& rung : bes.rungs) {
    bool ok = rung.value <= cap;
    t.rows.push_back({"besicovitch", "-", "-", fmt(rung.t), fmt(rung.value), fmt(cap),
                      mark(ok)});
    if (!ok)
      t.violations.push_back("besicovitch rung at T=" + fmt(rung.t) + " value " +
                             fmt(rung.value) + " exceeds the cap " + fmt(cap));
  }
  return t;
}

// ---------------------------------------------------------------------------
// mean-value: window means of the separator and of exponential sums

ResultTable run_mean_value(const ExperimentConfig& cfg) {
  ResultTable t;
  t.columns = {"kind", "T", "re", "im", "gap", "bound", "ok"};
  int rungs = static_cast<int>(cfg.get_int("rungs"));
  double y = cfg.get_real("y");

  SeparatorSpec spec;
  StripFunction f = separator_function(spec);
  WindowLadder ladder{3.0, 3.0, rungs};
  QuadratureSpec quad;
  MeanValueEstimate est = mean_value(f, y, ladder, quad);
  for (const auto& [tt, mean] : est.rungs)
    t.rows.push_back({"mean", fmt(tt), fmt(mean.real()), fmt(mean.imag()), "-", "-", "-"});

  // Members have density 1/2 among the integers and each bump integrates to
  // sqrt(pi)/2 on every horizontal line (contour shift), so the limit mean
  // is sqrt(pi)/4 at every height.
  double target = std::sqrt(std::numbers::pi) / 4.0;
  double gap = std::abs(est.surrogate - Complex(target, 0.0));
  bool ok = gap <= 2e-3;
  t.rows.push_back({"surrogate", fmt(est.rungs.back().first), fmt(est.surrogate.real()),
                    fmt(est.surrogate.imag()), fmt(gap), fmt(2e-3), mark(ok)});
  if (!ok)
    t.violations.push_back("separator mean " + fmt(est.surrogate.real()) +
                           " misses sqrt(pi)/4 = " + fmt(target) + " by " + fmt(gap) +
                           " (> 2e-3)");

  // Exponential-sum means land on the zero-frequency coefficient at the
  // closed-form 1/T rate: |(1/2T) int e^{i lambda t} dt| <= 1 / (|lambda| T).
  double r2 = std::sqrt(2.0);
  ExpSum s(Strip::line(0.0), {{0.0, CoefficientProfile::constant({0.4, 0.2})},
                              {1.0, CoefficientProfile::constant({0.8, -0.1})},
                              {r2, CoefficientProfile::constant({-0.3, 0.5})}});
  MeanValueEstimate ms = mean_value(s.as_function(), 0.0, ladder, quad);
  Complex exact = mean_coefficient(s)(0.0);
  double t_last = ladder.values().back();
  KahanSum rate;
  for (const ExpSum::Term& term : s.terms()) {
    if (term.lambda == 0.0) continue;
    rate.add(std::abs(term.coeff(0.0)) / (std::abs(term.lambda) * t_last));
  }
  double bound = rate.value() + 1e-8;
  double egap = std::abs(ms.surrogate - exact);
  bool eok = egap <= bound;
  t.rows.push_back({"expsum_mean", fmt(t_last), fmt(ms.surrogate.real()),
                    fmt(ms.surrogate.imag()), fmt(egap), fmt(bound), mark(eok)});
  if (!eok)
    t.violations.push_back("exponential-sum mean misses the zero-frequency coefficient by " +
                           fmt(egap) + " (allowed " + fmt(bound) + ")");
  return t;
}

ResultTable dispatch(const ExperimentConfig& cfg) {
  if (cfg.experiment == "metrics-ordering") return run_metrics_ordering(cfg);
  if (cfg.experiment == "kernel-properties") return run_kernel_properties(cfg);
  if (cfg.experiment == "theorem1-approx") return run_theorem1_approx(cfg);
  if (cfg.experiment == "lemma1") return run_lemma1(cfg);
  if (cfg.experiment == "lemma2") return run_lemma2(cfg);
  if (cfg.experiment == "lemma3") return run_lemma3(cfg);
  if (cfg.experiment == "lemma4") return run_lemma4(cfg);
  if (cfg.experiment == "theorem2-rate") return run_theorem2_rate(cfg);
  if (cfg.experiment == "theorem3-separation") return run_theorem3_separation(cfg);
  if (cfg.experiment == "theorem4-separation") return run_theorem4_separation(cfg);
  if (cfg.experiment == "mean-value") return run_mean_value(cfg);
  throw std::invalid_argument("unknown experiment id '" + cfg.experiment + "'");
}

}  // namespace

int ExperimentConfig::get_int(const std::string& key) const {
  auto it = params.find(key);
  if (it == params.end()) throw std::invalid_argument("missing key '" + key + "'");
  return static_cast<int>(parse_int_value(key, it->second));
}

double ExperimentConfig::get_real(const std::string& key) const {
  auto it = params.find(key);
  if (it == params.end()) throw std::invalid_argument("missing key '" + key + "'");
  return parse_real_value(key, it->second);
}

ExperimentConfig parse_config(const std::string& text) {
  std::map<std::string, std::string> raw;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("line " + std::to_string(line_no) +
                                  " is not of the form key = value: '" + stripped + "'");
    std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("line " + std::to_string(line_no) + " has an empty key");
    if (raw.count(key))
      throw std::invalid_argument("duplicate key '" + key + "'");
    raw[key] = value;
  }

  auto exp_it = raw.find("experiment");
  if (exp_it == raw.end())
    throw std::invalid_argument("missing key 'experiment'");
  ExperimentConfig cfg;
  cfg.experiment = exp_it->second;
  const Schema& schema = schema_for(cfg.experiment);
  raw.erase(exp_it);

  for (const auto& [key, value] : raw) {
    const ParamSpec* spec = param_spec(schema, key);
    if (spec == nullptr)
      throw std::invalid_argument("unknown key '" + key + "' for experiment '" +
                                  cfg.experiment + "'");
    check_value(*spec, value);
    cfg.params[key] = value;
  }
  for (const ParamSpec& spec : schema.params)
    if (!cfg.params.count(spec.key)) cfg.params[spec.key] = spec.fallback;
  if (!cfg.params.count("out")) cfg.params["out"] = ".";

  cross_validate(cfg);
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

const std::vector<ExperimentInfo>& experiment_catalog() {
  static const std::vector<ExperimentInfo> catalog = [] {
    std::vector<ExperimentInfo> list;
    for (const Schema& s : schemas()) {
      ExperimentInfo info;
      info.id = s.id;
      info.summary = s.summary;
      for (const ParamSpec& p : s.params) info.defaults.push_back({p.key, p.fallback});
      list.push_back(std::move(info));
    }
    return list;
  }();
  return catalog;
}

std::string ResultTable::csv() const {
  std::ostringstream os;
  for (const auto& [key, value] : metadata) os << "# " << key << " = " << value << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) os << ',';
    os << columns[i];
  }
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      os << row[i];
    }
    os << '\n';
  }
  return os.str();
}

nlohmann::json ResultTable::json() const {
  nlohmann::json j;
  j["experiment"] = experiment;
  nlohmann::json meta = nlohmann::json::object();
  for (const auto& [key, value] : metadata) meta[key] = value;
  j["metadata"] = meta;
  j["columns"] = columns;
  j["rows"] = rows;
  j["violations"] = violations;
  j["status"] = passed() ? "pass" : "fail";
  return j;
}

ResultTable run_experiment(const ExperimentConfig& cfg) {
  const Schema& schema = schema_for(cfg.experiment);
  auto start = std::chrono::steady_clock::now();
  ResultTable t = dispatch(cfg);
  auto stop = std::chrono::steady_clock::now();
  double wall_ms =
      std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(stop - start)
          .count();

  std::vector<std::pair<std::string, std::string>> meta;
  meta.push_back({"experiment", cfg.experiment});
  for (const ParamSpec& p : schema.params) meta.push_back({p.key, cfg.params.at(p.key)});
  meta.push_back({"version", kVersion});
  meta.push_back({"status", t.passed() ? "pass" : "fail"});
  for (const std::string& v : t.violations) meta.push_back({"violation", v});
  meta.push_back({"wall_ms", format_double(wall_ms)});
  meta.insert(meta.end(), t.metadata.begin(), t.metadata.end());
  t.metadata = std::move(meta);
  t.experiment = cfg.experiment;
  return t;
}

}  // namespace apstrip
