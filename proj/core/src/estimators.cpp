#include "fragkit/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "fragkit/analytics.hpp"
#include "fragkit/error.hpp"

namespace fragkit {

void RunningStats::add(double x) {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

// Chan et al. pairwise update
void RunningStats::merge(const RunningStats& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n_), nb = static_cast<double>(other.n_);
  const double n = na + nb;
  const double delta = other.mean_ - mean_;
  mean_ += delta * nb / n;
  m2_ += other.m2_ + delta * delta * na * nb / n;
  n_ += other.n_;
}

double RunningStats::variance() const { return n_ < 2 ? 0.0 : m2_ / static_cast<double>(n_ - 1); }

double RunningStats::standard_error() const {
  return n_ < 2 ? 0.0 : std::sqrt(variance() / static_cast<double>(n_));
}

Check z_check(std::string name, double estimate, double target, double se) {
  Check c;
  c.name = std::move(name);
  c.estimate = estimate;
  c.target = target;
  c.se = se;
  const double diff = estimate - target;
  if (se > 0.0) {
    c.z = diff / se;
  } else {
    const double scale = std::max({1.0, std::abs(estimate), std::abs(target)});
    c.z = std::abs(diff) <= 1e-12 * scale ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
  }
  c.pass = std::abs(c.z) <= 3.0;
  return c;
}

bool ValidationReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::string ValidationReport::table() const {
  std::size_t width = 5;
  for (const auto& c : checks) width = std::max(width, c.name.size());
  std::ostringstream out;
  char buf[512];
  std::snprintf(buf, sizeof buf, "%-*s  %17s  %17s  %12s  %9s  %s\n", static_cast<int>(width), "check", "estimate",
                "target", "se", "z", "result");
  out << buf;
  for (const auto& c : checks) {
    std::snprintf(buf, sizeof buf, "%-*s  %17.10g  %17.10g  %12.4g  %9.3f  %s", static_cast<int>(width),
                  c.name.c_str(), c.estimate, c.target, c.se, c.z, c.pass ? "PASS" : "FAIL");
    out << buf;
    if (!c.note.empty()) out << "  (" << c.note << ")";
    out << '\n';
  }
  return out.str();
}

namespace {

nlohmann::json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

}  // namespace

std::string ValidationReport::json(std::string_view build_id) const {
  nlohmann::json doc;
  doc["build_id"] = std::string(build_id);
  doc["all_pass"] = all_pass();
  doc["checks"] = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json j;
    j["name"] = c.name;
    j["estimate"] = number(c.estimate);
    j["target"] = number(c.target);
    j["se"] = number(c.se);
    j["z"] = number(c.z);
    j["pass"] = c.pass;
    if (!c.note.empty()) j["note"] = c.note;
    doc["checks"].push_back(std::move(j));
  }
  return doc.dump(2);
}

// ---------------------------------------------------------------------------

WeightedEmpiricalMeasure::WeightedEmpiricalMeasure(double t, double alpha, double beta_star,
                                                   std::size_t replicates)
    : t_(t), alpha_(alpha), beta_star_(beta_star), totals_(replicates, 0.0) {}

bool WeightedEmpiricalMeasure::empty() const {
  return std::none_of(totals_.begin(), totals_.end(), [](double w) { return w > 0.0; });
}

void WeightedEmpiricalMeasure::add_atom(double location, double weight, std::uint32_t replicate) {
  if (replicate >= totals_.size()) throw DomainError("replicate index out of range");
  if (!(location > 0.0)) throw DomainError("atom locations must be positive");
  atoms_.push_back({location, weight, replicate});
  totals_[replicate] += weight;
  sorted_ = false;
}

std::vector<double> WeightedEmpiricalMeasure::replicate_integrals(const std::function<double(double)>& f) const {
  std::vector<double> out(totals_.size(), 0.0);
  for (const Atom& a : atoms_) out[a.replicate] += a.weight * f(a.location);
  return out;
}

RunningStats WeightedEmpiricalMeasure::integral(const std::function<double(double)>& f) const {
  RunningStats s;
  for (double v : replicate_integrals(f)) s.add(v);
  return s;
}

RunningStats WeightedEmpiricalMeasure::moment(int k) const {
  const double p = alpha_ * k;
  return integral([p](double x) { return std::pow(x, p); });
}

void WeightedEmpiricalMeasure::sort_atoms() const {
  if (sorted_) return;
  auto& atoms = atoms_;
  std::stable_sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.location < b.location; });
  cumulative_.resize(atoms.size());
  double c = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) cumulative_[i] = c += atoms[i].weight;
  sorted_ = true;
}

double WeightedEmpiricalMeasure::cdf(double x) const {
  if (empty()) throw EmptySnapshot("weighted measure has no mass");
  sort_atoms();
  const auto it = std::upper_bound(atoms_.begin(), atoms_.end(), x,
                                   [](double v, const Atom& a) { return v < a.location; });
  if (it == atoms_.begin()) return 0.0;
  return cumulative_[static_cast<std::size_t>(it - atoms_.begin()) - 1] / cumulative_.back();
}

std::vector<double> WeightedEmpiricalMeasure::default_edges(std::size_t bins) const {
  if (empty()) throw EmptySnapshot("weighted measure has no mass");
  if (bins == 0) throw DomainError("need at least one bin");
  sort_atoms();
  const double total = cumulative_.back();
  auto quantile = [&](double q) {
    const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), q * total);
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), atoms_.size() - 1);
    return atoms_[i].location;
  };
  double lo = quantile(0.001), hi = quantile(0.999);
  if (!(hi > lo)) {
    lo *= 0.5;
    hi *= 2.0;
  }
  std::vector<double> edges(bins + 1);
  const double r = std::log(hi / lo);
  for (std::size_t i = 0; i <= bins; ++i) edges[i] = lo * std::exp(r * static_cast<double>(i) / static_cast<double>(bins));
  edges.back() = hi;
  return edges;
}

std::vector<HistogramBin> WeightedEmpiricalMeasure::histogram(const std::vector<double>& edges) const {
  if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end())) {
    throw DomainError("histogram edges must be sorted with at least two entries");
  }
  std::vector<HistogramBin> bins(edges.size() - 1);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) bins[i] = {edges[i], edges[i + 1], 0.0};
  // atoms outside the edges are folded into the end bins so the total is kept
  const double scale = totals_.empty() ? 0.0 : 1.0 / static_cast<double>(totals_.size());
  for (const Atom& a : atoms_) {
    const auto it = std::upper_bound(edges.begin(), edges.end(), a.location);
    std::size_t i = it == edges.begin() ? 0 : static_cast<std::size_t>(it - edges.begin()) - 1;
    i = std::min(i, bins.size() - 1);
    bins[i].mass += a.weight * scale;
  }
  return bins;
}

WeightedEmpiricalMeasure empirical_weighted_measure(const std::vector<PopulationSnapshot>& snapshots, double alpha,
                                                    double beta_star) {
  if (snapshots.empty()) throw EmptySnapshot("no snapshots");
  if (!(alpha > 0.0)) throw DomainError("the scaled measure needs alpha > 0");
  const double t = snapshots.front().t;
  for (const auto& s : snapshots) {
    if (s.t != t) throw DomainError("snapshots must share a common time");
  }
  WeightedEmpiricalMeasure measure(t, alpha, beta_star, snapshots.size());
  const double scale = std::pow(t, 1.0 / alpha);
  for (std::size_t r = 0; r < snapshots.size(); ++r) {
    for (double x : snapshots[r].sizes) {
      if (x > 0.0) measure.add_atom(scale * x, std::pow(x, beta_star), static_cast<std::uint32_t>(r));
    }
  }
  return measure;
}

double cdf_distance(const WeightedEmpiricalMeasure& measure, const std::function<double(double)>& target_cdf) {
  if (measure.empty()) throw EmptySnapshot("weighted measure has no mass");
  std::vector<std::pair<double, double>> pts;
  pts.reserve(measure.atoms().size());
  for (const auto& a : measure.atoms()) pts.emplace_back(a.location, a.weight);
  std::sort(pts.begin(), pts.end());
  double total = 0.0;
  for (const auto& p : pts) total += p.second;
  double d = 0.0, c = 0.0;
  for (std::size_t i = 0; i < pts.size();) {
    const double x = pts[i].first;
    const double before = c / total;
    while (i < pts.size() && pts[i].first == x) c += pts[i++].second;
    const double F = target_cdf(x);
    d = std::max({d, std::abs(before - F), std::abs(c / total - F)});
  }
  return d;
}

double kolmogorov_distance(std::vector<double> samples, const std::function<double(double)>& target_cdf) {
  if (samples.empty()) throw EmptySnapshot("no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size();) {
    const double x = samples[i];
    const double before = static_cast<double>(i) / n;
    while (i < samples.size() && samples[i] == x) ++i;
    const double F = target_cdf(x);
    d = std::max({d, std::abs(before - F), std::abs(static_cast<double>(i) / n - F)});
  }
  return d;
}

// ---------------------------------------------------------------------------

Check mean_power_sum_test(const std::vector<double>& power_sums, double t, double beta, const ReproductionLaw& law,
                          double alpha) {
  RunningStats s;
  for (double v : power_sums) s.add(v);
  char name[128];
  std::snprintf(name, sizeof name, "E M(t=%g, beta=%g)", t, beta);
  if (t == 0.0) return z_check(name, s.mean(), 1.0, s.standard_error());
  try {
    const SeriesEvaluation m = m_series(law, alpha, t, beta);
    return z_check(name, s.mean(), m.value.real(), s.standard_error());
  } catch (const PrecisionExhausted&) {
    const double bs = law.beta_star();
    const double target = asymptotic_coefficient(law, alpha, beta).real() * std::pow(t, (bs - beta) / alpha);
    // 5% band folded into the SE so that pass still means |z| <= 3
    Check c = z_check(name, s.mean(), target, s.standard_error() + 0.05 * std::abs(target) / 3.0);
    c.note = "asymptotic target, 5% band";
    return c;
  }
}

SecondMomentOracle m_infinity_second_moment_oracle(const ReproductionLaw& law, double beta_star, std::uint64_t seed,
                                                   std::size_t draws) {
  SecondMomentOracle out;
  if (law.conservative()) {
    out.value = 1.0;
    out.method = "conservative";
    return out;
  }
  const double phi2 = phi(law, 2.0 * beta_star);
  if (!(phi2 < 1.0)) throw SecondMomentInfinite("phi(2 beta*) >= 1");
  double es2 = 0.0;
  double es2_se = 0.0;

  if (const auto* atomic = std::get_if<UserAtomic>(&law.parameters())) {
    for (const auto& o : atomic->outcomes) {
      double s = 0.0;
      for (double x : o.sizes) {
        if (x > 0.0) s += std::pow(x, beta_star);
      }
      es2 += o.probability * s * s;
    }
    out.method = "atomic";
  } else if (law.has_sampler() &&
             (law.kind() == LawKind::filippov_power || law.kind() == LawKind::dirichlet_polynomial)) {
    // one forced child plus Poisson(L - 1) more, iid from sigma / L
    double L = 0.0;
    for (const auto& c : law.intensity()) L += total_mass(c);
    es2 = phi2 + 1.0 - 1.0 / (L * L);
    out.method = "poisson";
  } else {
    if (!law.has_sampler()) throw UnsupportedSampler("no closed form and no sampler for E (sum xi^beta*)^2");
    Stream stream(seed, Stream::Purpose::generic);
    RunningStats stats;
    double largest = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < draws; ++i) {
      const OffspringSample sample = sample_offspring(law, stream);
      double s = sample.truncated_beta_mass_bound;
      for (double x : sample.sizes) s += std::pow(x, beta_star);
      const double s2 = s * s;
      stats.add(s2);
      largest = std::max(largest, s2);
      sum += s2;
    }
    if (!std::isfinite(sum) || (draws >= 10'000 && largest > 0.1 * sum)) {
      throw SecondMomentInfinite("Monte Carlo estimate of E (sum xi^beta*)^2 is dominated by single draws");
    }
    es2 = stats.mean();
    es2_se = stats.standard_error();
    out.method = "monte_carlo";
  }
  out.value = (es2 - phi2) / (1.0 - phi2);
  out.se = es2_se / (1.0 - phi2);
  return out;
}

double TestFunction::operator()(double x) const {
  switch (kind) {
    case Kind::indicator:
      return (x >= a && x <= b) ? 1.0 : 0.0;
    case Kind::exp_neg:
      return std::exp(-x);
    case Kind::power_min:
      return std::min(std::pow(x, alpha), a);
  }
  return 0.0;
}

std::string TestFunction::name() const {
  char buf[96];
  switch (kind) {
    case Kind::indicator:
      std::snprintf(buf, sizeof buf, "1[%g,%g]", a, b);
      break;
    case Kind::exp_neg:
      std::snprintf(buf, sizeof buf, "exp(-x)");
      break;
    case Kind::power_min:
      std::snprintf(buf, sizeof buf, "min(x^%g,%g)", alpha, a);
      break;
  }
  return buf;
}

ValidationReport l2_functional_test(const std::vector<double>& times,
                                    const std::vector<std::vector<L2Observation>>& ladder, double integral_f_rho,
                                    double integral_se, const SecondMomentOracle& oracle) {
  if (times.size() < 2 || ladder.size() != times.size()) throw DomainError("need at least two ladder times");
  const std::size_t R = ladder.front().size();
  for (const auto& row : ladder) {
    if (row.size() != R) throw DomainError("every ladder time needs the same replicates");
  }
  if (R < 2) throw DomainError("need at least two replicates");

  ValidationReport report;
  const std::size_t last = times.size() - 1;
  char name[128];

  RunningStats a, am;
  for (const auto& o : ladder[last]) {
    a.add(o.a_t);
    am.add(o.a_t * o.m_t);
  }
  std::snprintf(name, sizeof name, "E A_t (t=%g)", times[last]);
  report.add(z_check(name, a.mean(), integral_f_rho, std::hypot(a.standard_error(), integral_se)));

  const double target = oracle.value * integral_f_rho;
  const double target_se = std::hypot(oracle.se * integral_f_rho, oracle.value * integral_se);
  std::snprintf(name, sizeof name, "E A_t M_t (t=%g)", times[last]);
  report.add(z_check(name, am.mean(), target, std::hypot(am.standard_error(), target_se)));

  // mean square error of A_t against M_t int f drho, paired across the ladder
  auto sq = [&](const L2Observation& o) {
    const double d = o.a_t - o.m_t * integral_f_rho;
    return d * d;
  };
  for (std::size_t i = 0; i < times.size(); ++i) {
    RunningStats ms;
    for (const auto& o : ladder[i]) ms.add(sq(o));
    std::snprintf(name, sizeof name, "mean square (t=%g)", times[i]);
    Check c;
    c.name = name;
    c.estimate = ms.mean();
    c.target = 0.0;
    c.se = ms.standard_error();
    c.pass = true;
    c.note = "informational";
    report.add(std::move(c));
  }
  RunningStats diff;
  for (std::size_t r = 0; r < R; ++r) diff.add(sq(ladder[0][r]) - sq(ladder[last][r]));
  std::snprintf(name, sizeof name, "mean square drop t=%g -> %g", times[0], times[last]);
  Check c;
  c.name = name;
  c.estimate = diff.mean();
  c.target = 0.0;
  c.se = diff.standard_error();
  c.z = c.se > 0.0 ? c.estimate / c.se : 0.0;
  c.pass = c.z > 2.0;
  c.note = "one-sided, needs z > 2";
  report.add(std::move(c));
  return report;
}

}  // namespace fragkit
