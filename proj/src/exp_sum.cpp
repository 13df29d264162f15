#include "apstrip/exp_sum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace apstrip {

namespace {

nlohmann::json complex_to_json(Complex c) {
  return nlohmann::json::array({c.real(), c.imag()});
}

Complex complex_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2)
    throw std::invalid_argument("complex value must be a [re, im] pair");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

}  // namespace

CoefficientProfile CoefficientProfile::constant(Complex c) {
  return CoefficientProfile(Rep(Constant{c}));
}

CoefficientProfile CoefficientProfile::polynomial(std::vector<Complex> coeffs) {
  if (coeffs.empty()) throw std::invalid_argument("polynomial profile needs coefficients");
  return CoefficientProfile(Rep(Polynomial{std::move(coeffs)}));
}

CoefficientProfile CoefficientProfile::exponential(Complex amplitude, Complex mu) {
  return CoefficientProfile(Rep(Exponential{amplitude, mu}));
}

CoefficientProfile::Kind CoefficientProfile::kind() const {
  if (std::holds_alternative<Constant>(rep_)) return Kind::kConstant;
  if (std::holds_alternative<Polynomial>(rep_)) return Kind::kPolynomial;
  return Kind::kExponential;
}

Complex CoefficientProfile::operator()(double y) const {
  if (const auto* c = std::get_if<Constant>(&rep_)) return c->value;
  if (const auto* p = std::get_if<Polynomial>(&rep_)) {
    Complex acc = 0.0;  // Horner, highest degree first
    for (auto it = p->coeffs.rbegin(); it != p->coeffs.rend(); ++it) acc = acc * y + *it;
    return acc;
  }
  const auto& e = std::get<Exponential>(rep_);
  return e.amplitude * std::exp(e.mu * y);
}

CoefficientProfile CoefficientProfile::scaled(Complex s) const {
  if (const auto* c = std::get_if<Constant>(&rep_)) return constant(s * c->value);
  if (const auto* p = std::get_if<Polynomial>(&rep_)) {
    std::vector<Complex> coeffs = p->coeffs;
    for (Complex& c : coeffs) c *= s;
    return polynomial(std::move(coeffs));
  }
  const auto& e = std::get<Exponential>(rep_);
  return exponential(s * e.amplitude, e.mu);
}

bool CoefficientProfile::is_zero() const {
  if (const auto* c = std::get_if<Constant>(&rep_)) return c->value == 0.0;
  if (const auto* p = std::get_if<Polynomial>(&rep_))
    return std::all_of(p->coeffs.begin(), p->coeffs.end(),
                       [](Complex c) { return c == 0.0; });
  return std::get<Exponential>(rep_).amplitude == 0.0;
}

CoefficientProfile CoefficientProfile::add(const CoefficientProfile& a,
                                           const CoefficientProfile& b) {
  auto as_poly = [](const CoefficientProfile& p) -> std::vector<Complex> {
    if (const auto* c = std::get_if<Constant>(&p.rep_)) return {c->value};
    return std::get<Polynomial>(p.rep_).coeffs;
  };
  bool a_polyish = a.kind() != Kind::kExponential;
  bool b_polyish = b.kind() != Kind::kExponential;
  if (a_polyish && b_polyish) {
    std::vector<Complex> pa = as_poly(a), pb = as_poly(b);
    if (pb.size() > pa.size()) pa.swap(pb);
    for (std::size_t i = 0; i < pb.size(); ++i) pa[i] += pb[i];
    if (pa.size() == 1) return constant(pa[0]);
    return polynomial(std::move(pa));
  }
  if (!a_polyish && !b_polyish) {
    const auto& ea = std::get<Exponential>(a.rep_);
    const auto& eb = std::get<Exponential>(b.rep_);
    if (ea.mu == eb.mu) return exponential(ea.amplitude + eb.amplitude, ea.mu);
  }
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  throw std::invalid_argument("cannot add coefficient profiles of incompatible families");
}

bool operator==(const CoefficientProfile& a, const CoefficientProfile& b) {
  return a.rep_ == b.rep_;
}

nlohmann::json CoefficientProfile::to_json() const {
  nlohmann::json j;
  if (const auto* c = std::get_if<Constant>(&rep_)) {
    j["kind"] = "constant";
    j["parameters"] = {{"value", complex_to_json(c->value)}};
  } else if (const auto* p = std::get_if<Polynomial>(&rep_)) {
    j["kind"] = "polynomial";
    nlohmann::json coeffs = nlohmann::json::array();
    for (Complex c : p->coeffs) coeffs.push_back(complex_to_json(c));
    j["parameters"] = {{"coeffs", coeffs}};
  } else {
    const auto& e = std::get<Exponential>(rep_);
    j["kind"] = "exponential";
    j["parameters"] = {{"amplitude", complex_to_json(e.amplitude)},
                       {"mu", complex_to_json(e.mu)}};
  }
  return j;
}

CoefficientProfile CoefficientProfile::from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const nlohmann::json& par = j.at("parameters");
  if (kind == "constant") return constant(complex_from_json(par.at("value")));
  if (kind == "polynomial") {
    std::vector<Complex> coeffs;
    for (const auto& c : par.at("coeffs")) coeffs.push_back(complex_from_json(c));
    return polynomial(std::move(coeffs));
  }
  if (kind == "exponential")
    return exponential(complex_from_json(par.at("amplitude")),
                       complex_from_json(par.at("mu")));
  throw std::invalid_argument("unknown coefficient kind '" + kind + "'");
}

ExpSum::ExpSum(Strip strip, std::vector<Term> terms)
    : strip_(strip), terms_(std::move(terms)) {
  std::stable_sort(terms_.begin(), terms_.end(),
                   [](const Term& a, const Term& b) { return a.lambda < b.lambda; });
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (!std::isfinite(terms_[i].lambda))
      throw std::invalid_argument("frequencies must be finite");
    if (i > 0 && terms_[i].lambda == terms_[i - 1].lambda)
      throw std::invalid_argument("frequencies must be distinct");
  }
}

Complex ExpSum::eval(ComplexPoint z) const {
  if (!strip_.contains_y(z.y)) {
    throw std::domain_error("exp sum evaluated outside its strip");
  }
  KahanSum re, im;
  for (const Term& t : terms_) {
    Complex v = t.coeff(z.y) * std::exp(Complex(0.0, t.lambda * z.x));
    re.add(v.real());
    im.add(v.imag());
  }
  return Complex(re.value(), im.value());
}

StripFunction ExpSum::as_function() const {
  ExpSum copy = *this;
  return StripFunction(strip_, [copy](ComplexPoint z) { return copy.eval(z); });
}

CoefficientProfile mean_coefficient(const ExpSum& s) {
  return fourier_coefficient(s, 0.0);
}

CoefficientProfile fourier_coefficient(const ExpSum& s, double lambda) {
  for (const auto& t : s.terms())
    if (t.lambda == lambda) return t.coeff;
  return CoefficientProfile::zero();
}

ExpSum shift_sum(const ExpSum& s, double tau) {
  std::vector<ExpSum::Term> terms;
  terms.reserve(s.terms().size());
  for (const auto& t : s.terms()) {
    Complex phase = std::exp(Complex(0.0, t.lambda * tau));
    terms.push_back({t.lambda, t.coeff.scaled(phase)});
  }
  return ExpSum(s.strip(), std::move(terms));
}

ExpSum add(const ExpSum& a, const ExpSum& b) {
  Strip dom = Strip::intersect(a.strip(), b.strip());
  std::vector<ExpSum::Term> terms;
  auto ia = a.terms().begin(), ea = a.terms().end();
  auto ib = b.terms().begin(), eb = b.terms().end();
  while (ia != ea || ib != eb) {
    if (ib == eb || (ia != ea && ia->lambda < ib->lambda)) {
      terms.push_back(*ia++);
    } else if (ia == ea || ib->lambda < ia->lambda) {
      terms.push_back(*ib++);
    } else {
      terms.push_back({ia->lambda, CoefficientProfile::add(ia->coeff, ib->coeff)});
      ++ia;
      ++ib;
    }
  }
  return ExpSum(dom, std::move(terms));
}

nlohmann::json to_json(const ExpSum& s) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& t : s.terms())
    doc.push_back({{"lambda", t.lambda}, {"coeff", t.coeff.to_json()}});
  return doc;
}

ExpSum exp_sum_from_json(const nlohmann::json& doc, Strip strip) {
  if (!doc.is_array()) throw std::invalid_argument("exp sum document must be an array");
  std::vector<ExpSum::Term> terms;
  for (const auto& t : doc)
    terms.push_back({t.at("lambda").get<double>(),
                     CoefficientProfile::from_json(t.at("coeff"))});
  return ExpSum(strip, std::move(terms));
}

}  // namespace apstrip
