#ifndef APSTRIP_EXP_SUM_HPP
#define APSTRIP_EXP_SUM_HPP

#include <variant>
#include <vector>

#include "apstrip/core.hpp"
#include "json.hpp"

namespace apstrip {

// Coefficient of one exponential term as a function of the vertical
// coordinate: constant, polynomial in y, or a*e^{mu*y}.  All three families
// are closed under complex scaling, which is what convolution needs.
class CoefficientProfile {
 public:
  enum class Kind { kConstant, kPolynomial, kExponential };

  static CoefficientProfile constant(Complex c);
  static CoefficientProfile polynomial(std::vector<Complex> coeffs);  // sum c_k y^k
  static CoefficientProfile exponential(Complex amplitude, Complex mu);
  static CoefficientProfile zero() { return constant(0.0); }

  Kind kind() const;
  Complex operator()(double y) const;
  CoefficientProfile scaled(Complex s) const;
  bool is_zero() const;  // structurally zero

  // In-family addition; constants coerce to polynomials, exponentials only
  // combine when mu matches exactly.
  static CoefficientProfile add(const CoefficientProfile& a, const CoefficientProfile& b);

  friend bool operator==(const CoefficientProfile& a, const CoefficientProfile& b);

  nlohmann::json to_json() const;
  static CoefficientProfile from_json(const nlohmann::json& j);

 private:
  struct Constant {
    Complex value;
    bool operator==(const Constant&) const = default;
  };
  struct Polynomial {
    std::vector<Complex> coeffs;
    bool operator==(const Polynomial&) const = default;
  };
  struct Exponential {
    Complex amplitude;
    Complex mu;
    bool operator==(const Exponential&) const = default;
  };
  using Rep = std::variant<Constant, Polynomial, Exponential>;

  explicit CoefficientProfile(Rep rep) : rep_(std::move(rep)) {}
  Rep rep_;
};

// Finite sum  f(z) = sum_n c_n(y) e^{i lambda_n x}  on a strip.  Terms are
// kept sorted by frequency; frequencies are distinct as binary doubles.
class ExpSum {
 public:
  struct Term {
    double lambda;
    CoefficientProfile coeff;
  };

  ExpSum(Strip strip, std::vector<Term> terms);

  const Strip& strip() const { return strip_; }
  const std::vector<Term>& terms() const { return terms_; }

  Complex eval(ComplexPoint z) const;
  StripFunction as_function() const;

 private:
  Strip strip_;
  std::vector<Term> terms_;
};

// Coefficient at frequency zero (the formal mean in x), or zero if absent.
CoefficientProfile mean_coefficient(const ExpSum& s);

// Coefficient at the given frequency (exact double match), or zero.
CoefficientProfile fourier_coefficient(const ExpSum& s, double lambda);

// Horizontal shift z -> z + tau: multiplies each coefficient by e^{i lambda tau}.
ExpSum shift_sum(const ExpSum& s, double tau);

// Term-wise sum; merges equal frequencies with in-family coefficient addition.
ExpSum add(const ExpSum& a, const ExpSum& b);

// JSON document is the array of terms; the strip travels separately.
nlohmann::json to_json(const ExpSum& s);
ExpSum exp_sum_from_json(const nlohmann::json& doc, Strip strip);

}  // namespace apstrip

#endif  // APSTRIP_EXP_SUM_HPP
