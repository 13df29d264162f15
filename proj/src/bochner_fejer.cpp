#include "apstrip/bochner_fejer.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace apstrip {

namespace {

// Best rational approximation with denominator capped by max_den, through
// continued-fraction convergents.
double nearest_rational_gap(double ratio, int max_den) {
  double x = ratio;
  long long h_prev = 1, h = static_cast<long long>(std::floor(x));
  long long k_prev = 0, k = 1;
  double frac = x - std::floor(x);
  double best = std::abs(ratio - static_cast<double>(h));
  for (int iter = 0; iter < 64 && frac > 1e-15; ++iter) {
    x = 1.0 / frac;
    double a_floor = std::floor(x);
    if (a_floor > 1e18) break;
    auto a = static_cast<long long>(a_floor);
    frac = x - a_floor;
    long long h_next = a * h + h_prev;
    long long k_next = a * k + k_prev;
    if (k_next > max_den) {
      // Largest semiconvergent still within the cap.
      long long room = (max_den - k_prev) / k;
      if (room > 0) {
        double semi = static_cast<double>(room * h + h_prev) /
                      static_cast<double>(room * k + k_prev);
        best = std::min(best, std::abs(ratio - semi));
      }
      break;
    }
    h_prev = h;
    k_prev = k;
    h = h_next;
    k = k_next;
    best = std::min(best, std::abs(ratio - static_cast<double>(h) / static_cast<double>(k)));
  }
  return best;
}

}  // namespace

RationalBasis::RationalBasis(std::vector<double> elements, int max_denominator)
    : elements_(std::move(elements)) {
  if (elements_.empty()) throw std::invalid_argument("basis must be nonempty");
  if (max_denominator < 1) throw std::invalid_argument("denominator cap must be >= 1");
  for (double b : elements_)
    if (!(b > 0.0) || !std::isfinite(b))
      throw std::invalid_argument("basis elements must be positive and finite");
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    for (std::size_t j = i + 1; j < elements_.size(); ++j) {
      double gap = nearest_rational_gap(elements_[i] / elements_[j], max_denominator);
      if (gap < 1e-9) {
        std::ostringstream os;
        os << "basis elements " << elements_[i] << " and " << elements_[j]
           << " are rationally dependent within the checked denominators";
        throw std::invalid_argument(os.str());
      }
    }
  }
}

AveragingKernel::AveragingKernel(RationalBasis basis, std::vector<int> degrees,
                                 std::vector<KernelEntry> entries)
    : basis_(std::move(basis)), degrees_(std::move(degrees)), entries_(std::move(entries)) {
  by_frequency_.resize(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) by_frequency_[i] = i;
  std::sort(by_frequency_.begin(), by_frequency_.end(), [&](std::size_t a, std::size_t b) {
    return entries_[a].frequency < entries_[b].frequency;
  });
  for (std::size_t i = 1; i < by_frequency_.size(); ++i) {
    double prev = entries_[by_frequency_[i - 1]].frequency;
    double cur = entries_[by_frequency_[i]].frequency;
    if (cur - prev <= 1e-9)
      throw std::runtime_error("kernel frequencies collide; basis is too close to dependent");
  }
}

double AveragingKernel::weight_at(double lambda) const {
  auto it = std::lower_bound(
      by_frequency_.begin(), by_frequency_.end(), lambda,
      [&](std::size_t idx, double v) { return entries_[idx].frequency < v; });
  for (auto probe : {it, it == by_frequency_.begin() ? it : std::prev(it)}) {
    if (probe != by_frequency_.end() &&
        std::abs(entries_[*probe].frequency - lambda) <= 1e-9)
      return entries_[*probe].weight;
  }
  return 0.0;
}

double AveragingKernel::weight_for_tuple(const std::vector<int>& tuple) const {
  if (tuple.size() != degrees_.size())
    throw std::invalid_argument("tuple arity does not match the basis");
  // Entries are the full lexicographic box, so the index is positional.
  std::size_t idx = 0;
  for (std::size_t j = 0; j < tuple.size(); ++j) {
    int n = degrees_[j];
    if (std::abs(tuple[j]) > n) return 0.0;
    idx = idx * static_cast<std::size_t>(2 * n + 1) +
          static_cast<std::size_t>(tuple[j] + n);
  }
  return entries_[idx].weight;
}

double AveragingKernel::eval(double t) const {
  KahanSum re, im;
  for (const KernelEntry& e : entries_) {
    double phase = -e.frequency * t;
    re.add(e.weight * std::cos(phase));
    im.add(e.weight * std::sin(phase));
  }
  if (std::abs(im.value()) > 1e-8) {
    std::ostringstream os;
    os << "kernel symmetry violated at t=" << t << ": imaginary residue " << im.value();
    throw std::runtime_error(os.str());
  }
  return re.value();
}

void AveragingKernel::write_csv(std::ostream& os) const {
  os << "tuple,lambda,weight\n";
  for (const KernelEntry& e : entries_) {
    for (std::size_t j = 0; j < e.tuple.size(); ++j) {
      if (j) os << ';';
      os << e.tuple[j];
    }
    os << ',' << format_double(e.frequency) << ',' << format_double(e.weight) << '\n';
  }
}

AveragingKernel build_kernel(const RationalBasis& basis, const std::vector<int>& degrees) {
  if (degrees.size() != basis.size())
    throw std::invalid_argument("one degree per basis element required");
  double table = 1.0;
  for (int n : degrees) {
    if (n < 1) throw std::invalid_argument("kernel degrees must be >= 1");
    table *= static_cast<double>(2 * n + 1);
  }
  if (table > 1e7)
    throw std::invalid_argument("kernel table would exceed 10^7 entries");

  std::size_t q = degrees.size();
  std::vector<KernelEntry> entries;
  entries.reserve(static_cast<std::size_t>(table));
  std::vector<int> tuple(q);
  for (std::size_t j = 0; j < q; ++j) tuple[j] = -degrees[j];
  for (;;) {
    KernelEntry e;
    e.tuple = tuple;
    double freq = 0.0, weight = 1.0;
    for (std::size_t j = 0; j < q; ++j) {
      freq += tuple[j] * basis.elements()[j];
      weight *= 1.0 - std::abs(tuple[j]) / (degrees[j] + 1.0);
    }
    e.frequency = freq;
    e.weight = weight;
    entries.push_back(std::move(e));

    std::size_t j = q;
    while (j > 0) {
      --j;
      if (tuple[j] < degrees[j]) {
        ++tuple[j];
        for (std::size_t k = j + 1; k < q; ++k) tuple[k] = -degrees[k];
        break;
      }
      if (j == 0) return AveragingKernel(basis, degrees, std::move(entries));
    }
  }
}

ExpSum convolve_exact(const ExpSum& s, const AveragingKernel& kernel) {
  std::vector<ExpSum::Term> terms;
  for (const auto& t : s.terms()) {
    double w = kernel.weight_at(t.lambda);
    if (w != 0.0) terms.push_back({t.lambda, t.coeff.scaled(w)});
  }
  return ExpSum(s.strip(), std::move(terms));
}

namespace {

struct FitResult {
  CoefficientProfile profile = CoefficientProfile::zero();
  double residual = 0.0;
};

double sample_scale(const std::vector<Complex>& samples) {
  double scale = 0.0;
  for (Complex s : samples) scale = std::max(scale, std::abs(s));
  return scale;
}

double rms_residual(const CoefficientProfile& profile, const std::vector<double>& ys,
                    const std::vector<Complex>& samples) {
  double acc = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i)
    acc += std::norm(profile(ys[i]) - samples[i]);
  return std::sqrt(acc / static_cast<double>(ys.size()));
}

// Least squares polynomial of the requested degree through (y_k, s_k):
// normal equations on the Vandermonde system, complex Gaussian elimination
// with partial pivoting (systems here stay tiny).
CoefficientProfile fit_polynomial(const std::vector<double>& ys,
                                  const std::vector<Complex>& samples, int degree) {
  std::size_t m = static_cast<std::size_t>(degree) + 1;
  if (ys.size() < m)
    throw std::invalid_argument("polynomial fit needs at least degree+1 samples");
  std::vector<std::vector<Complex>> a(m, std::vector<Complex>(m + 1, 0.0));
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < m; ++c) {
      double acc = 0.0;
      for (double y : ys) acc += std::pow(y, static_cast<double>(r + c));
      a[r][c] = acc;
    }
    Complex rhs = 0.0;
    for (std::size_t k = 0; k < ys.size(); ++k)
      rhs += samples[k] * std::pow(ys[k], static_cast<double>(r));
    a[r][m] = rhs;
  }
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < m; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    std::swap(a[col], a[pivot]);
    if (std::abs(a[col][col]) < 1e-14)
      throw std::runtime_error("polynomial fit is degenerate for these samples");
    for (std::size_t r = 0; r < m; ++r) {
      if (r == col) continue;
      Complex factor = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= m; ++c) a[r][c] -= factor * a[col][c];
    }
  }
  std::vector<Complex> coeffs(m);
  for (std::size_t r = 0; r < m; ++r) coeffs[r] = a[r][m] / a[r][r];
  if (m == 1) return CoefficientProfile::constant(coeffs[0]);
  return CoefficientProfile::polynomial(std::move(coeffs));
}

// a e^{mu y} through log-linearization of successive ratios; needs equally
// spaced samples and stays on principal branches, so steep imaginary mu can
// wrap.  A wrapped fit is caught by the residual check downstream.
CoefficientProfile fit_exponential(const std::vector<double>& ys,
                                   const std::vector<Complex>& samples) {
  if (ys.size() < 2) throw std::invalid_argument("exponential fit needs >= 2 samples");
  double d = ys[1] - ys[0];
  for (std::size_t i = 1; i + 1 < ys.size(); ++i)
    if (std::abs((ys[i + 1] - ys[i]) - d) > 1e-12 * (1.0 + std::abs(d)))
      throw std::invalid_argument("exponential fit needs equally spaced samples");
  double scale = sample_scale(samples);
  for (Complex s : samples)
    if (std::abs(s) < 1e-12 * scale)
      throw std::runtime_error("exponential fit hit a vanishing sample");
  Complex mu_acc = 0.0;
  for (std::size_t i = 0; i + 1 < samples.size(); ++i)
    mu_acc += std::log(samples[i + 1] / samples[i]);
  Complex mu = mu_acc / (static_cast<double>(samples.size() - 1) * d);
  Complex num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    Complex basis = std::exp(mu * ys[i]);
    num += samples[i] * std::conj(basis);
    den += std::norm(basis);
  }
  return CoefficientProfile::exponential(num / den, mu);
}

FitResult fit_profile(const std::vector<double>& ys, const std::vector<Complex>& samples,
                      const ApproximateOptions& options) {
  FitResult out;
  switch (options.family) {
    case ProfileFitFamily::kConstant: {
      Complex mean = 0.0;
      for (Complex s : samples) mean += s;
      mean /= static_cast<double>(samples.size());
      out.profile = CoefficientProfile::constant(mean);
      break;
    }
    case ProfileFitFamily::kPolynomial:
      out.profile = fit_polynomial(ys, samples, options.polynomial_degree);
      break;
    case ProfileFitFamily::kExponential:
      out.profile = fit_exponential(ys, samples);
      break;
  }
  out.residual = rms_residual(out.profile, ys, samples);
  return out;
}

}  // namespace

ExpSum bf_approximate(const StripFunction& f, const AveragingKernel& kernel,
                      const std::vector<double>& y_samples, const WindowLadder& ladder,
                      const QuadratureSpec& quad, const ApproximateOptions& options) {
  if (y_samples.empty()) throw std::invalid_argument("bf_approximate needs y samples");
  double t_last = ladder.values().back();
  WindowNodes nodes = make_window(0.0, t_last, quad);
  const std::size_t n = nodes.x.size();

  // Frequencies ascending; the per-frequency means reuse one evaluation of f
  // per node and height.
  std::vector<double> freqs;
  freqs.reserve(kernel.size());
  for (const KernelEntry& e : kernel.entries()) freqs.push_back(e.frequency);
  std::sort(freqs.begin(), freqs.end());

  std::vector<std::vector<Complex>> coeff_samples(freqs.size());
  for (auto& v : coeff_samples) v.resize(y_samples.size());

  std::vector<Complex> values(n);
  for (std::size_t yi = 0; yi < y_samples.size(); ++yi) {
    double y = y_samples[yi];
    parallel_for(n, [&](std::size_t i) { values[i] = f(nodes.x[i], y); });
    for (std::size_t fi = 0; fi < freqs.size(); ++fi) {
      double lambda = freqs[fi];
      KahanSum re, im;
      for (std::size_t i = 0; i < n; ++i) {
        Complex v = values[i] * std::exp(Complex(0.0, -lambda * nodes.x[i]));
        re.add(nodes.w[i] * v.real());
        im.add(nodes.w[i] * v.imag());
      }
      coeff_samples[fi][yi] =
          Complex(re.value() / (2.0 * t_last), im.value() / (2.0 * t_last));
    }
  }

  std::vector<ExpSum::Term> terms;
  terms.reserve(freqs.size());
  for (std::size_t fi = 0; fi < freqs.size(); ++fi) {
    FitResult fit = fit_profile(y_samples, coeff_samples[fi], options);
    double scale = std::max(sample_scale(coeff_samples[fi]), 1e-300);
    if (fit.residual > options.fit_tolerance * scale) {
      std::ostringstream os;
      os << "coefficient fit at frequency " << freqs[fi]
         << " missed the family: relative residual " << fit.residual / scale;
      throw std::runtime_error(os.str());
    }
    terms.push_back({freqs[fi], fit.profile.scaled(kernel.weight_at(freqs[fi]))});
  }
  return ExpSum(f.domain(), std::move(terms));
}

}  // namespace apstrip
