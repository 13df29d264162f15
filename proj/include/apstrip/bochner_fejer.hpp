#ifndef APSTRIP_BOCHNER_FEJER_HPP
#define APSTRIP_BOCHNER_FEJER_HPP

#include <iosfwd>
#include <vector>

#include "apstrip/exp_sum.hpp"

namespace apstrip {

// Positive reals, pairwise rationally independent as far as floating point
// can tell: no ratio is within 1e-9 of a fraction with denominator at most
// max_denominator (checked through continued-fraction convergents).
class RationalBasis {
 public:
  explicit RationalBasis(std::vector<double> elements, int max_denominator = 64);
  const std::vector<double>& elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }

 private:
  std::vector<double> elements_;
};

struct KernelEntry {
  std::vector<int> tuple;  // r_j, |r_j| <= degree_j
  double frequency;        // sum_j r_j * basis_j
  double weight;           // prod_j (1 - |r_j| / (degree_j + 1)), in (0, 1]
};

// Finite positive trigonometric averaging kernel: product of one-dimensional
// triangular-weight kernels over the basis.  Entries are in lexicographic
// tuple order, which fixes every summation order downstream.
class AveragingKernel {
 public:
  AveragingKernel(RationalBasis basis, std::vector<int> degrees,
                  std::vector<KernelEntry> entries);

  const RationalBasis& basis() const { return basis_; }
  const std::vector<int>& degrees() const { return degrees_; }
  const std::vector<KernelEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  // Weight at a frequency (0 if no entry lies within 1e-9); weight of an
  // exact tuple.
  double weight_at(double lambda) const;
  double weight_for_tuple(const std::vector<int>& tuple) const;

  // sum_r weight(r) e^{-i frequency(r) t}; real and nonnegative up to
  // rounding.  Throws if the imaginary residue exceeds 1e-8.
  double eval(double t) const;

  void write_csv(std::ostream& os) const;  // columns (tuple, lambda, weight)

 private:
  RationalBasis basis_;
  std::vector<int> degrees_;
  std::vector<KernelEntry> entries_;
  std::vector<std::size_t> by_frequency_;  // entry indices sorted by frequency
};

// Builds the kernel table; degrees must all be >= 1 and the table size
// prod_j (2 N_j + 1) must stay at or below 10^7.
AveragingKernel build_kernel(const RationalBasis& basis, const std::vector<int>& degrees);

// Exact convolution action on an exponential sum: each term's coefficient is
// scaled by the kernel weight at its frequency (dropped if the frequency is
// not in the kernel's support).
ExpSum convolve_exact(const ExpSum& s, const AveragingKernel& kernel);

enum class ProfileFitFamily { kConstant, kPolynomial, kExponential };

struct ApproximateOptions {
  ProfileFitFamily family = ProfileFitFamily::kConstant;
  int polynomial_degree = 1;
  double fit_tolerance = 1e-6;  // relative residual allowed by the family fit
};

// Numerical counterpart of convolve_exact for a general strip function:
// estimates the coefficient at every kernel frequency as the last-rung
// windowed mean of f(t+iy) e^{-i lambda t} per y sample, fits the requested
// coefficient family through the samples, and assembles the exponential sum
// sum_lambda weight(lambda) a_lambda(y) e^{i lambda x}.  Throws (reporting
// the residual) if a fit misses the family by more than fit_tolerance.
ExpSum bf_approximate(const StripFunction& f, const AveragingKernel& kernel,
                      const std::vector<double>& y_samples, const WindowLadder& ladder,
                      const QuadratureSpec& quad, const ApproximateOptions& options = {});

}  // namespace apstrip

#endif  // APSTRIP_BOCHNER_FEJER_HPP
