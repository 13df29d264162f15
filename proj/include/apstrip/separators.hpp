#ifndef APSTRIP_SEPARATORS_HPP
#define APSTRIP_SEPARATORS_HPP

#include <string>
#include <vector>

#include "apstrip/core.hpp"
#include "json.hpp"

namespace apstrip {

// The ternary index set: n = 3^{l-1}(3k+1), i.e. the least significant
// nonzero ternary digit of n is 1.  Negative n use the mathematical residue,
// so -2 = 3(-1)+1 is a member.  0 never is.
bool is_in_I(long long n);

// The l above: one plus the number of trailing ternary zeros.  n must be
// nonzero (members of level l sit on the lattice 3^{l-1}(3Z+1)).
int ternary_level(long long n);

// Two-sided arithmetic progression inside the member set that a fixed shift
// q maps entirely onto nonmembers: element(j) is a member, element(j) + q is
// not, for every j.
struct ProgressionIq {
  long long q = 0;
  long long start = 0;
  long long difference = 0;  // 3^r or 3^{r+1} depending on the residue of q
  long long element(long long j) const { return start + j * difference; }
};

ProgressionIq progression_for_shift(long long q);  // q != 0

// The three separating functions built from Gaussian bumps on the member
// set: T2 weights every level by 1, T3 by l, T4 by 3^{l/p0}.
enum class SeparatorVariant { kT2, kT3, kT4 };

const char* separator_variant_name(SeparatorVariant v);

struct SeparatorSpec {
  SeparatorVariant variant = SeparatorVariant::kT2;
  double p0 = 1.5;      // T4 level weight exponent base, must sit in (p, p')
  int l_max = 12;       // level truncation for T3/T4 (T2 sums every level)
  double window = 8.0;  // bump half-width W: centers beyond |x - n| > W are
                        // dropped, tail < e^{4y^2} 2 e^{-4(W-1)^2}

  void validate() const;  // l_max >= 1, window >= 6, p0 > 0
};

// Level-l comb: sum of e^{-4(z-n)^2} over centers n = 3^{l-1}(3k+1) within
// |x - n| <= window.  Periodic in x with period 3^l at the level of center
// sets.
Complex phi_l(ComplexPoint z, int l, double window = 8.0);

// Truncated series value of the chosen variant at z.
Complex separator_eval(const SeparatorSpec& spec, ComplexPoint z);

// The separator as a strip function on the whole plane, and its partial sum
// over levels <= m (periodic with real period 3^m).
StripFunction separator_function(const SeparatorSpec& spec);
StripFunction partial_sum(const SeparatorSpec& spec, int m);

// Exhaustive integer scan of the T2 separator on [-R, R]: sup over
// nonmembers (<= sqrt(pi)/2) and inf over members (>= 1).
struct IntegerScanBounds {
  double sup_nonmembers = 0.0;
  double inf_members = 0.0;
};

IntegerScanBounds lemma1_bounds(long long r);

// Upper bound for the T2 separator's derivative on the real axis: max over
// one period of the majorant sum_n 8|x-n| e^{-4(x-n)^2}.  Computed once on a
// 1e-5 grid and cached.
double t2_lipschitz_bound();

// Certificate that the shift tau moves the T2 separator by more than gamma
// somewhere in every window of length L + N tau: N is the modulus-of-
// continuity index, (M, q) the pigeonhole pair with |M tau - q| <= 1/N, x
// the witness point, delta_f = |f(x+tau) - f(x)| > gamma.
struct DiscrepancyReport {
  double tau = 0.0;
  int n = 0;
  double gamma = 0.0;
  long long m = 0;
  long long q = 0;
  double x = 0.0;
  double delta_f = 0.0;
};

// |tau| >= 1; the scan starts at a.  Throws if no witness appears in the
// guaranteed window (that would falsify the certificate construction).
DiscrepancyReport discrepancy_search(double tau, double a = 0.0);

std::string discrepancy_csv(const DiscrepancyReport& report);
nlohmann::json discrepancy_json(const DiscrepancyReport& report);

// (sum_n e^{-4(x-3n)^2})^p <= 2^{p-1} sum_n e^{-4(x-3n)^2}: both sides and
// the verdict, for the level-2 comb the power-sum arguments rest on.
struct PowerSumCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = false;
};

PowerSumCheck lemma4_check(double x, double p);

// Closed form of integral_{-a}^{a} e^{-4 p t^2} dt.
double gaussian_power_window(double p, double half_width);

// Quantitative bounds attached to the separators:
//  - t2_weyl_rate_bound: Weyl-1 distance of T2 to its level-m partial sum,
//    limit form (3 sqrt(pi)/2) 3^{-m} e^{4h^2};
//  - t2_weyl_rate_bound_finite: the same chain kept at finite T, which adds
//    sqrt(pi) e^{4h^2} / (2T) for the centers straddling the window edge;
//  - t3_tail_bound: 2^{p-1} 9 sqrt(pi) sum_{l>m} l^{2p} 3^{-l}, the p-power
//    tail of T3 beyond level m (series truncated at relative 1e-15);
//  - t3_window_bound: l^p integral_{-t0}^{t0} e^{-4pt^2} dt, the level-l
//    bump's contribution to a centered window of the T3 separator;
//  - t4_window_bound: 3^{lp/p0} times the unit-window Gaussian mass, same
//    role for T4.
double t2_weyl_rate_bound(int m, double h);
double t2_weyl_rate_bound_finite(int m, double h, double t);
double t3_tail_bound(int m, double p);
double t3_window_bound(int l, double p, double t0);
double t4_window_bound(int l, double p, double p0);

// p-integral of the separator over [x_n - t0, x_n + t0] at the level-l
// centers x_n = 3^l n + 3^{l-1}, n in [n_lo, n_hi], with the variant's
// matching lower bound attached per row.
struct WindowedNormRow {
  SeparatorVariant variant = SeparatorVariant::kT3;
  int l = 1;
  long long n = 0;
  double p = 1.0;
  double t0 = 0.5;
  double value = 0.0;
  double bound = 0.0;
};

std::vector<WindowedNormRow> windowed_norm_at_centers(const SeparatorSpec& spec, int l,
                                                      long long n_lo, long long n_hi,
                                                      double p, double t0,
                                                      const QuadratureSpec& quad);

// Columns (variant, l, n, p, T0, value, bound), one row per center.
std::string windowed_norm_csv(const std::vector<WindowedNormRow>& rows);
nlohmann::json windowed_norm_json(const std::vector<WindowedNormRow>& rows);

}  // namespace apstrip

#endif  // APSTRIP_SEPARATORS_HPP
