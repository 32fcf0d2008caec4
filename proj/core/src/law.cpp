#include "fragkit/law.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/tools/roots.hpp>

#include "fragkit/error.hpp"
#include "fragkit/special.hpp"

namespace fragkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kLn2 = 0.69314718055994530942;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string format_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

void require(bool ok, const std::string& message) {
  if (!ok) throw InvalidLawSpec(message);
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

double total_mass(const IntensityComponent& component) {
  return std::visit(
      Overloaded{
          [](const PowerDensity& p) -> double {
            if (p.lower <= 0.0) return p.theta > 0.0 ? p.lambda / p.theta : kInf;
            if (p.theta == 0.0) return -p.lambda * std::log(p.lower);
            return p.lambda * (1.0 - std::pow(p.lower, p.theta)) / p.theta;
          },
          [](const BetaDensity& b) { return b.mass; },
          [](const LogSingularDensity&) { return kInf; },
          [](const PointMass& a) { return a.mass; },
      },
      component);
}

struct ReproductionLaw::State {
  LawKind kind{};
  LawParameters parameters;
  std::optional<MellinForm> closed_form;
  std::vector<IntensityComponent> intensity;
  double abscissa = -kInf;
  bool abscissa_closed = false;
  std::optional<AbscissaEstimate> estimate;
  bool arithmetic = false;
  double atom_at_one = 0.0;
  bool conservative = false;
  bool sampler = false;
  double discarded = 0.0;
  double beta_star = kNaN;
};

ReproductionLaw::ReproductionLaw(std::shared_ptr<const State> state) : state_(std::move(state)) {}

LawKind ReproductionLaw::kind() const { return state_->kind; }
const LawParameters& ReproductionLaw::parameters() const { return state_->parameters; }
double ReproductionLaw::convergence_abscissa() const { return state_->abscissa; }
bool ReproductionLaw::abscissa_closed() const { return state_->abscissa_closed; }
const std::optional<AbscissaEstimate>& ReproductionLaw::abscissa_estimate() const {
  return state_->estimate;
}
bool ReproductionLaw::arithmetic() const { return state_->arithmetic; }
double ReproductionLaw::atom_mass_at_one() const { return state_->atom_at_one; }
bool ReproductionLaw::conservative() const { return state_->conservative; }
bool ReproductionLaw::has_sampler() const { return state_->sampler; }
const std::optional<MellinForm>& ReproductionLaw::closed_form() const {
  return state_->closed_form;
}
const std::vector<IntensityComponent>& ReproductionLaw::intensity() const {
  return state_->intensity;
}
double ReproductionLaw::discarded_intensity() const { return state_->discarded; }
double ReproductionLaw::beta_star() const { return state_->beta_star; }
bool ReproductionLaw::has_beta_star() const { return !std::isnan(state_->beta_star); }

std::string ReproductionLaw::name() const {
  switch (state_->kind) {
    case LawKind::binary_uniform_conservative: return "binary_uniform";
    case LawKind::stick_breaking_lossy: return "stick_breaking_lossy";
    case LawKind::stick_breaking_conservative: return "stick_breaking_conservative";
    case LawKind::filippov_power: return "filippov";
    case LawKind::dirichlet_polynomial: return "dirichlet_polynomial";
    case LawKind::user_atomic: return "user_atomic";
    case LawKind::user_poisson: return "user_poisson";
    case LawKind::log_singular: return "log_singular";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Quadrature over one intensity component. With x = exp(-u) every density
// becomes exp(L(u) - u*beta) du where L is cheap to write down in log form,
// which keeps the tails free of 0 * inf.

namespace {

struct LogIntegrand {
  double u_lo = 0.0;
  double u_hi = kInf;
  // log of g(e^-u) e^-u, i.e. the density in the u variable at beta = 0
  std::function<double(double)> log_weight;
};

LogIntegrand log_integrand(const IntensityComponent& component) {
  return std::visit(
      Overloaded{
          [](const PowerDensity& p) {
            const double ll = std::log(p.lambda);
            const double th = p.theta;
            return LogIntegrand{0.0, p.lower > 0.0 ? -std::log(p.lower) : kInf,
                                [ll, th](double u) { return ll - u * th; }};
          },
          [](const BetaDensity& b) {
            const double norm = std::log(b.mass) - std::log(boost::math::beta(b.a, b.b));
            const double a = b.a;
            const double bm1 = b.b - 1.0;
            return LogIntegrand{0.0, kInf, [norm, a, bm1](double u) {
                                  const double tail = bm1 == 0.0 ? 0.0 : bm1 * std::log(-std::expm1(-u));
                                  return norm - u * a + tail;
                                }};
          },
          [](const LogSingularDensity& s) {
            const double lc = std::log(s.c);
            return LogIntegrand{kLn2, kInf,
                                [lc](double u) { return lc + 0.5 * u - 2.0 * std::log(u); }};
          },
          [](const PointMass&) -> LogIntegrand {
            throw std::logic_error("point masses are summed directly");
          },
      },
      component);
}

template <class F>
double integrate_half_line(F f, double a, double b) {
  thread_local boost::math::quadrature::tanh_sinh<double> ts;
  thread_local boost::math::quadrature::exp_sinh<double> es;
  constexpr double tol = 1e-13;
  if (std::isfinite(b)) return ts.integrate(f, a, b, tol);
  return ts.integrate(f, a, a + 1.0, tol) + es.integrate(f, a + 1.0, kInf, tol);
}

std::complex<double> component_mellin(const IntensityComponent& component,
                                      std::complex<double> beta) {
  if (const auto* atom = std::get_if<PointMass>(&component)) {
    if (atom->location <= 0.0) return 0.0;
    return atom->mass * std::exp(beta * std::log(atom->location));
  }
  const LogIntegrand li = log_integrand(component);
  const double br = beta.real();
  const double bi = beta.imag();
  const auto& lw = li.log_weight;
  const double re = integrate_half_line(
      [&](double u) {
        const double v = std::exp(lw(u) - u * br);
        return bi == 0.0 ? v : v * std::cos(u * bi);
      },
      li.u_lo, li.u_hi);
  if (bi == 0.0) return re;
  const double im = integrate_half_line(
      [&](double u) { return -std::exp(lw(u) - u * br) * std::sin(u * bi); }, li.u_lo, li.u_hi);
  return {re, im};
}

}  // namespace

double continuous_density(const std::vector<IntensityComponent>& comps, double x) {
  double total = 0.0;
  for (const auto& c : comps) {
    total += std::visit(
        Overloaded{
            [x](const PowerDensity& p) {
              return x > p.lower ? p.lambda * std::pow(x, p.theta - 1.0) : 0.0;
            },
            [x](const BetaDensity& b) {
              return b.mass * std::pow(x, b.a - 1.0) * std::pow(1.0 - x, b.b - 1.0) /
                     boost::math::beta(b.a, b.b);
            },
            [x](const LogSingularDensity& s) {
              if (x >= 0.5) return 0.0;
              const double l = std::log(x);
              return s.c * std::pow(x, -1.5) / (l * l);
            },
            [](const PointMass&) { return 0.0; },
        },
        c);
  }
  return total;
}

namespace {

// Geometric probe: I_k = sigma]2^-(k+1), 2^-k] behaves like 2^(k beta_a) near
// zero, so log2(I_k / I_(k+1)) estimates -beta_a.
AbscissaEstimate probe_abscissa(const std::vector<IntensityComponent>& comps) {
  constexpr int kProbes = 60;
  std::vector<double> increments;
  for (int k = 1; k <= kProbes; ++k) {
    const double hi = std::ldexp(1.0, -k);
    const double lo = 0.5 * hi;
    const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [&](double x) { return continuous_density(comps, x); }, lo, hi, 5, 1e-12);
    increments.push_back(value);
  }
  std::vector<double> exponents;
  for (int k = kProbes - 12; k + 1 < kProbes; ++k) {
    const double a = increments[k];
    const double b = increments[k + 1];
    if (a > 0.0 && b > 0.0) exponents.push_back(std::log2(a / b));
  }
  AbscissaEstimate out;
  if (exponents.empty()) return out;  // no mass near zero: entire
  const auto [mn, mx] = std::minmax_element(exponents.begin(), exponents.end());
  out.lower = -*mx;
  out.upper = -*mn;
  return out;
}

void check_domain(const ReproductionLaw& law, double re_beta) {
  const double a = law.abscissa_estimate() ? law.abscissa_estimate()->upper
                                           : law.convergence_abscissa();
  const bool ok = re_beta > a || (law.abscissa_closed() && re_beta == a);
  if (!ok || std::isnan(re_beta)) {
    throw DomainError("phi undefined at Re(beta) = " + format_double(re_beta) +
                      " (convergence abscissa " + format_double(a) + ")");
  }
}

std::vector<PowerDensity> merge_terms(std::vector<PowerDensity> terms) {
  std::map<double, double> by_theta;
  for (const auto& t : terms) by_theta[t.theta] += t.lambda;
  std::vector<PowerDensity> out;
  for (const auto& [theta, lambda] : by_theta) {
    if (lambda != 0.0) out.push_back({lambda, theta, 0.0});
  }
  return out;
}

double partial_fraction_abscissa(const std::vector<PowerDensity>& terms) {
  double a = -kInf;
  for (const auto& t : terms) a = std::max(a, -t.theta);
  return a;
}

std::shared_ptr<ReproductionLaw::State> partial_fraction_state(LawKind kind, LawParameters params,
                                                               std::vector<PowerDensity> terms) {
  auto s = std::make_shared<ReproductionLaw::State>();
  s->kind = kind;
  s->parameters = std::move(params);
  s->abscissa = partial_fraction_abscissa(terms);
  for (const auto& t : terms) s->intensity.emplace_back(t);
  s->closed_form = PartialFractions{std::move(terms)};
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// phi and derivatives

std::complex<double> phi(const ReproductionLaw& law, std::complex<double> beta) {
  check_domain(law, beta.real());
  if (const auto& cf = law.closed_form()) {
    if (const auto* pf = std::get_if<PartialFractions>(&*cf)) {
      std::complex<double> s = 0.0;
      for (const auto& t : pf->terms) s += t.lambda / (t.theta + beta);
      return s;
    }
    if (const auto* as = std::get_if<AtomSum>(&*cf)) {
      std::complex<double> s = 0.0;
      for (const auto& a : as->atoms) s += a.mass * std::exp(beta * std::log(a.location));
      return s;
    }
    if (const auto* ei = std::get_if<ExpIntegralForm>(&*cf); ei && beta.imag() == 0.0) {
      return ei->c / kLn2 * special::expint_n(2, (beta.real() - 0.5) * kLn2);
    }
  }
  std::complex<double> s = 0.0;
  for (const auto& c : law.intensity()) s += component_mellin(c, beta);
  return s;
}

double phi(const ReproductionLaw& law, double beta) {
  return phi(law, std::complex<double>(beta, 0.0)).real();
}

std::optional<mp::BigComplex> phi_big(const ReproductionLaw& law, const mp::BigComplex& beta) {
  check_domain(law, beta.re.to_double());
  const auto& cf = law.closed_form();
  if (!cf) return std::nullopt;
  const mp::Precision bits = beta.precision();
  if (const auto* pf = std::get_if<PartialFractions>(&*cf)) {
    mp::BigComplex s(bits);
    for (const auto& t : pf->terms) {
      mp::BigComplex denom = beta + t.theta;
      s += mp::BigComplex(mp::BigFloat(t.lambda, bits), mp::BigFloat(bits)) / denom;
    }
    return s;
  }
  if (const auto* as = std::get_if<AtomSum>(&*cf)) {
    mp::BigComplex s(bits);
    for (const auto& a : as->atoms) {
      mp::BigComplex term = mp::real_pow(mp::BigFloat(a.location, bits), beta);
      term *= a.mass;
      s += term;
    }
    return s;
  }
  return std::nullopt;
}

std::optional<mp::BigFloat> phi_derivative_big(const ReproductionLaw& law, const mp::BigFloat& beta) {
  check_domain(law, beta.to_double());
  const auto& cf = law.closed_form();
  if (!cf) return std::nullopt;
  const mp::Precision bits = beta.precision();
  if (const auto* pf = std::get_if<PartialFractions>(&*cf)) {
    mp::BigFloat s(bits);
    for (const auto& t : pf->terms) {
      mp::BigFloat d = beta + t.theta;
      s -= mp::BigFloat(t.lambda, bits) / (d * d);
    }
    return s;
  }
  if (const auto* as = std::get_if<AtomSum>(&*cf)) {
    mp::BigFloat s(bits);
    for (const auto& a : as->atoms) {
      const mp::BigFloat loc(a.location, bits);
      s += mp::log(loc) * mp::pow(loc, beta) * a.mass;
    }
    return s;
  }
  return std::nullopt;
}

double psi(const ReproductionLaw& law, double beta) { return 1.0 - phi(law, beta); }

std::complex<double> psi(const ReproductionLaw& law, std::complex<double> beta) {
  return 1.0 - phi(law, beta);
}

double psi_derivative(const ReproductionLaw& law, double beta) {
  check_domain(law, beta);
  if (const auto& cf = law.closed_form()) {
    if (const auto* pf = std::get_if<PartialFractions>(&*cf)) {
      double s = 0.0;
      for (const auto& t : pf->terms) s += t.lambda / ((t.theta + beta) * (t.theta + beta));
      return s;
    }
    if (const auto* as = std::get_if<AtomSum>(&*cf)) {
      double s = 0.0;
      for (const auto& a : as->atoms) s -= a.mass * std::log(a.location) * std::pow(a.location, beta);
      return s;
    }
    if (const auto* ei = std::get_if<ExpIntegralForm>(&*cf)) {
      return ei->c * special::expint_n(1, (beta - 0.5) * kLn2);
    }
  }

  // Richardson extrapolation of central differences over h, h/2, h/4; shrink h
  // until two successive extrapolants agree.
  const double a = law.abscissa_estimate() ? law.abscissa_estimate()->upper
                                           : law.convergence_abscissa();
  double h = 1e-2 * std::max(1.0, std::abs(beta));
  if (std::isfinite(a)) h = std::min(h, 0.5 * (beta - a));
  auto central = [&](double step) { return (phi(law, beta + step) - phi(law, beta - step)) / (2 * step); };
  auto extrapolate = [&](double step) {
    double d0 = central(step), d1 = central(step / 2), d2 = central(step / 4);
    const double e1 = (4 * d1 - d0) / 3, e2 = (4 * d2 - d1) / 3;
    return (16 * e2 - e1) / 15;
  };
  double previous = extrapolate(h);
  for (int i = 0; i < 12; ++i) {
    h *= 0.5;
    const double current = extrapolate(h);
    if (std::abs(current - previous) <= 1e-8 * std::abs(current)) return -current;
    previous = current;
  }
  return -previous;
}

// ---------------------------------------------------------------------------
// Malthusian exponent

namespace {

double malthusian_impl(const ReproductionLaw& law, double tol) {
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  const double a = law.abscissa_estimate() ? law.abscissa_estimate()->upper
                                           : law.convergence_abscissa();
  auto f = [&](double b) { return phi(law, b) - 1.0; };

  // Left end: a point with phi > 1.
  double left;
  if (std::isfinite(a)) {
    if (law.abscissa_closed()) {
      left = a;
      const double at = phi(law, a);
      if (at < 1.0) {
        throw NoMalthusianExponent("phi(beta_a+) = " + format_double(at) + " < 1: no Malthusian exponent",
                                   at);
      }
    } else {
      double step = 1.0;
      left = a + step;
      double value = f(left);
      for (int k = 0; value <= 0.0 && k < 60; ++k) {
        step *= 0.5;
        left = a + step;
        value = f(left);
      }
      if (value <= 0.0) {
        throw NoMalthusianExponent("phi stays below 1 up to the convergence abscissa", value + 1.0);
      }
    }
  } else {
    left = 0.0;
    double step = 1.0;
    for (int k = 0; f(left) <= 0.0; ++k) {
      if (k > 200) throw RootFindingFailure("could not bracket phi = 1 from the left");
      left -= step;
      step *= 2.0;
    }
  }
  if (f(left) == 0.0) return left;

  if (law.atom_mass_at_one() >= 1.0) {
    throw NoMalthusianExponent("sigma{1} >= 1: phi never drops below 1", law.atom_mass_at_one());
  }
  double right = std::max(left, 0.0) + 1.0;
  double step = 1.0;
  for (int k = 0; f(right) >= 0.0; ++k) {
    if (k > 200) throw RootFindingFailure("could not bracket phi = 1 from the right");
    left = right;
    step *= 2.0;
    right += step;
  }

  std::uintmax_t max_iter = 300;
  auto stop = [tol](double lo, double hi) { return std::abs(hi - lo) <= tol; };
  const auto [lo, hi] = boost::math::tools::toms748_solve(f, left, right, stop, max_iter);
  double root = 0.5 * (lo + hi);

  // Newton polish in extended precision, so exact roots come back exact.
  if (law.closed_form() && !std::holds_alternative<ExpIntegralForm>(*law.closed_form())) {
    constexpr mp::Precision bits = 256;
    mp::BigFloat b(root, bits);
    for (int i = 0; i < 4; ++i) {
      const auto value = phi_big(law, mp::BigComplex(b, mp::BigFloat(bits)));
      const auto slope = phi_derivative_big(law, b);
      if (!value || !slope || slope->is_zero()) break;
      b -= (value->re - 1.0) / *slope;
    }
    const double polished = b.to_double();
    if (std::isfinite(polished) && std::abs(polished - root) <= std::max(10 * tol, 1e-8)) root = polished;
  }
  return root;
}

double cache_beta_star(const ReproductionLaw& law) {
  try {
    return malthusian_impl(law, 1e-15);
  } catch (const Error&) {
    return kNaN;
  }
}

}  // namespace

double malthusian_exponent(const ReproductionLaw& law, double tol) { return malthusian_impl(law, tol); }

// ---------------------------------------------------------------------------
// Arithmetic detection

namespace {

// Best rational approximation of x with denominator <= max_den (continued fractions).
std::pair<long, long> best_rational(double x, int max_den) {
  long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = x;
  for (int i = 0; i < 64; ++i) {
    const double a = std::floor(r);
    const long ai = static_cast<long>(a);
    const long p2 = ai * p1 + p0;
    const long q2 = ai * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const double frac = r - a;
    if (frac < 1e-15) break;
    r = 1.0 / frac;
  }
  return {p1, q1};
}

}  // namespace

bool arithmetic_check(const std::vector<double>& atom_locations, double rel_tol, int max_denominator) {
  std::vector<double> logs;
  for (double x : atom_locations) {
    if (!(x > 0.0) || x > 1.0) continue;
    if (x < 1.0) logs.push_back(-std::log(x));
  }
  if (logs.empty()) return true;
  const double base = *std::min_element(logs.begin(), logs.end());
  for (double l : logs) {
    const double q = l / base;
    const auto [p, d] = best_rational(q, max_denominator);
    if (d == 0 || std::abs(q - static_cast<double>(p) / static_cast<double>(d)) > rel_tol * q) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Factories

ReproductionLaw ReproductionLaw::binary_uniform_conservative() {
  auto s = partial_fraction_state(LawKind::binary_uniform_conservative, BinaryUniformConservative{},
                                  {{2.0, 1.0, 0.0}});
  s->conservative = true;
  s->sampler = true;
  ReproductionLaw law(s);
  s->beta_star = cache_beta_star(law);
  return law;
}

ReproductionLaw ReproductionLaw::stick_breaking_lossy(double child_floor) {
  require(child_floor > 0.0 && child_floor < 1.0, "child_floor must lie in ]0,1[");
  // 1/beta - 1/(1+beta) = 1/(beta(beta+1)), density (1-x)/x
  auto s = partial_fraction_state(LawKind::stick_breaking_lossy, StickBreakingLossy{child_floor},
                                  {{1.0, 0.0, 0.0}, {-1.0, 1.0, 0.0}});
  s->sampler = true;
  ReproductionLaw law(s);
  s->beta_star = cache_beta_star(law);
  return law;
}

ReproductionLaw ReproductionLaw::stick_breaking_conservative(double child_floor) {
  require(child_floor > 0.0 && child_floor < 1.0, "child_floor must lie in ]0,1[");
  auto s = partial_fraction_state(LawKind::stick_breaking_conservative,
                                  StickBreakingConservative{child_floor}, {{1.0, 0.0, 0.0}});
  s->conservative = true;
  s->sampler = true;
  ReproductionLaw law(s);
  s->beta_star = cache_beta_star(law);
  return law;
}

ReproductionLaw ReproductionLaw::filippov(double lambda, double theta) {
  require(finite(lambda) && finite(theta), "filippov parameters must be finite");
  require(lambda > 0.0, "filippov lambda must be positive");
  auto s = partial_fraction_state(LawKind::filippov_power, FilippovPower{lambda, theta},
                                  {{lambda, theta, 0.0}});
  s->sampler = theta > 0.0 && lambda > theta;
  ReproductionLaw law(s);
  s->beta_star = cache_beta_star(law);
  return law;
}

ReproductionLaw ReproductionLaw::dirichlet_polynomial(std::vector<PowerDensity> terms) {
  require(!terms.empty(), "dirichlet_polynomial needs at least one term");
  for (const auto& t : terms) {
    require(finite(t.lambda) && finite(t.theta), "dirichlet_polynomial terms must be finite");
    require(t.lower == 0.0, "dirichlet_polynomial terms live on ]0,1]");
  }
  const LawParameters params = DirichletPolynomial{terms};
  auto merged = merge_terms(std::move(terms));
  require(!merged.empty(), "dirichlet_polynomial terms cancel out");
  // The smallest exponent dominates near 0, so it must carry positive weight;
  // then check the density on a log grid.
  require(merged.front().lambda > 0.0, "dirichlet_polynomial density is negative near 0");
  for (int i = 0; i <= 2400; ++i) {
    const double x = std::pow(10.0, -12.0 + 12.0 * i / 2400.0);
    double d = 0.0, scale = 0.0;
    for (const auto& t : merged) {
      const double v = t.lambda * std::pow(x, t.theta - 1.0);
      d += v;
      scale += std::abs(v);
    }
    require(d >= -1e-12 * scale, "dirichlet_polynomial density is negative at x = " + format_double(x));
  }
  bool sampleable = true;
  double total = 0.0;
  for (const auto& t : merged) {
    sampleable = sampleable && t.lambda >= 0.0 && t.theta > 0.0;
    total += t.theta > 0.0 ? t.lambda / t.theta : kInf;
  }
  auto s = partial_fraction_state(LawKind::dirichlet_polynomial, params, merged);
  s->sampler = sampleable && total >= 1.0;
  ReproductionLaw law(s);
  s->beta_star = cache_beta_star(law);
  return law;
}

ReproductionLaw ReproductionLaw::user_atomic(std::vector<AtomicOutcome> outcomes) {
  require(!outcomes.empty(), "user_atomic needs at least one outcome");
  double total_probability = 0.0;
  bool conservative = true;
  std::map<double, double> atoms;
  for (auto& o : outcomes) {
    require(finite(o.probability) && o.probability >= 0.0, "outcome probabilities must be >= 0");
    total_probability += o.probability;
    double sum = 0.0;
    for (double x : o.sizes) {
      require(finite(x) && x >= 0.0 && x <= 1.0, "outcome sizes must lie in [0,1]");
      sum += x;
      if (x > 0.0 && o.probability > 0.0) atoms[x] += o.probability;
    }
    std::sort(o.sizes.begin(), o.sizes.end(), std::greater<>());
    if (o.probability > 0.0 && std::abs(sum - 1.0) > 1e-12) conservative = false;
  }
  require(std::abs(total_probability - 1.0) <= 1e-9, "outcome probabilities must sum to 1");
  require(!atoms.empty(), "user_atomic law has no positive sizes");

  auto s = std::make_shared<State>();
  s->kind = LawKind::user_atomic;
  s->parameters = UserAtomic{std::move(outcomes)};
  std::vector<PointMass> pm;
  std::vector<double> locations;
  for (const auto& [x, m] : atoms) {
    pm.push_back({x, m});
    locations.push_back(x);
    s->intensity.emplace_back(PointMass{x, m});
    if (x == 1.0) s->atom_at_one = m;
  }
  require(s->atom_at_one < 1.0, "sigma{1} must be < 1");
  s->closed_form = AtomSum{std::move(pm)};
  s->abscissa = -kInf;
  s->conservative = conservative;
  s->arithmetic = arithmetic_check(locations);
  s->sampler = true;
  ReproductionLaw law(s);
  s->beta_star = cache_beta_star(law);
  return law;
}

ReproductionLaw ReproductionLaw::user_poisson(IntensityComponent first,
                                              std::vector<IntensityComponent> intensity,
                                              double floor) {
  require(finite(floor) && floor >= 0.0 && floor < 1.0, "floor must lie in [0,1[");
  auto validate = [](const IntensityComponent& c) {
    std::visit(Overloaded{
                   [](const PowerDensity& p) {
                     require(finite(p.lambda) && p.lambda > 0.0 && finite(p.theta),
                             "power component needs lambda > 0 and finite theta");
                     require(p.lower >= 0.0 && p.lower < 1.0, "power component lower bound in [0,1[");
                   },
                   [](const BetaDensity& b) {
                     require(b.mass > 0.0 && b.a > 0.0 && b.b > 0.0 && finite(b.mass) && finite(b.a) &&
                                 finite(b.b),
                             "beta component needs positive mass, a, b");
                   },
                   [](const LogSingularDensity&) {
                     throw InvalidLawSpec("log_singular is only available as a standalone law");
                   },
                   [](const PointMass& a) {
                     require(a.location > 0.0 && a.location <= 1.0 && a.mass > 0.0 && finite(a.mass),
                             "atom component needs location in ]0,1] and positive mass");
                   },
               },
               c);
  };
  validate(first);
  require(std::abs(total_mass(first) - 1.0) <= 1e-9, "sigma1 must be a probability (total mass 1)");

  double discarded = 0.0;
  std::vector<IntensityComponent> kept;
  for (auto c : intensity) {
    validate(c);
    if (floor > 0.0) {
      if (auto* p = std::get_if<PowerDensity>(&c)) {
        if (p->lower < floor) {
          const double all = total_mass(*p);
          p->lower = floor;
          discarded += all - total_mass(*p);
        }
      } else if (auto* a = std::get_if<PointMass>(&c); a && a->location < floor) {
        discarded += a->mass;
        continue;
      }
    }
    if (!std::isfinite(total_mass(c))) {
      throw InvalidIntensity("sigma2 has infinite total mass; pass a positive floor");
    }
    kept.push_back(c);
  }

  auto s = std::make_shared<State>();
  s->kind = LawKind::user_poisson;
  s->parameters = UserPoisson{first, intensity, floor};
  s->intensity.push_back(first);
  for (const auto& c : kept) s->intensity.push_back(c);
  s->discarded = discarded;
  s->estimate = probe_abscissa(s->intensity);
  s->abscissa = s->estimate->upper;
  bool all_atoms = true;
  std::vector<double> locations;
  for (const auto& c : s->intensity) {
    if (const auto* a = std::get_if<PointMass>(&c)) {
      locations.push_back(a->location);
      if (a->location == 1.0) s->atom_at_one += a->mass;
    } else {
      all_atoms = false;
    }
  }
  require(s->atom_at_one < 1.0, "sigma{1} must be < 1");
  s->arithmetic = all_atoms && arithmetic_check(locations);
  s->sampler = true;
  ReproductionLaw law(s);
  s->beta_star = cache_beta_star(law);
  return law;
}

ReproductionLaw ReproductionLaw::log_singular(double c) {
  require(finite(c) && c > 0.0, "log_singular c must be positive");
  auto s = std::make_shared<State>();
  s->kind = LawKind::log_singular;
  s->parameters = LogSingular{c};
  s->closed_form = ExpIntegralForm{c};
  s->intensity.emplace_back(LogSingularDensity{c});
  s->abscissa = 0.5;
  s->abscissa_closed = true;
  ReproductionLaw law(s);
  s->beta_star = cache_beta_star(law);
  return law;
}

ReproductionLaw ReproductionLaw::from_parameters(LawParameters parameters, LawOverrides overrides) {
  ReproductionLaw law = std::visit(
      Overloaded{
          [](const BinaryUniformConservative&) { return binary_uniform_conservative(); },
          [](const StickBreakingLossy& p) { return stick_breaking_lossy(p.child_floor); },
          [](const StickBreakingConservative& p) { return stick_breaking_conservative(p.child_floor); },
          [](const FilippovPower& p) { return filippov(p.lambda, p.theta); },
          [](const DirichletPolynomial& p) { return dirichlet_polynomial(p.terms); },
          [](const UserAtomic& p) { return user_atomic(p.outcomes); },
          [](const UserPoisson& p) { return user_poisson(p.first, p.intensity, p.floor); },
          [](const LogSingular& p) { return log_singular(p.c); },
      },
      parameters);
  if (!overrides.arithmetic && !overrides.convergence_abscissa) return law;

  auto s = std::make_shared<State>(*law.state_);
  if (overrides.arithmetic) s->arithmetic = *overrides.arithmetic;
  if (overrides.convergence_abscissa) {
    s->abscissa = *overrides.convergence_abscissa;
    s->estimate.reset();
    s->abscissa_closed = false;
  }
  ReproductionLaw out(s);
  s->beta_star = cache_beta_star(out);
  return out;
}

ReproductionLaw poisson_reproduction(IntensityComponent first, std::vector<IntensityComponent> intensity,
                                     double floor) {
  return ReproductionLaw::user_poisson(std::move(first), std::move(intensity), floor);
}

}  // namespace fragkit
