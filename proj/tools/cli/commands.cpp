#include "commands.hpp"

#include <json.hpp>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>

#include "cli.hpp"
#include "fragkit/analytics.hpp"
#include "fragkit/error.hpp"
#include "fragkit/law_spec.hpp"
#include "fragkit/simulator.hpp"
#include "fragkit/version.hpp"

namespace fragkit::cli {

using nlohmann::json;

std::string g10(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

double r10(double x) {
  if (!std::isfinite(x)) return x;
  return std::strtod(g10(x).c_str(), nullptr);
}

namespace {

json num(double x) {
  if (std::isfinite(x)) return r10(x);
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

json report_header() { return json{{"build_id", std::string(build_id())}}; }

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  return f;
}

}  // namespace

int law_inspect(const std::string& path, std::ostream& out) {
  const ReproductionLaw law = load_law_spec(path);
  json doc = report_header();
  doc["name"] = law.name();
  doc["spec"] = json::parse(law_spec_json(law));
  const double ba = law.convergence_abscissa();
  doc["convergence_abscissa"] = num(ba);
  doc["abscissa_closed"] = law.abscissa_closed();
  if (const auto& est = law.abscissa_estimate()) {
    doc["abscissa_estimate"] = json{{"lower", num(est->lower)}, {"upper", num(est->upper)}};
  }
  doc["arithmetic"] = law.arithmetic();
  doc["conservative"] = law.conservative();
  doc["has_sampler"] = law.has_sampler();
  doc["closed_form"] = law.closed_form().has_value();
  doc["atom_mass_at_one"] = num(law.atom_mass_at_one());
  if (law.has_beta_star()) {
    doc["beta_star"] = num(law.beta_star());
  } else {
    doc["beta_star"] = nullptr;
  }

  json probes = json::array();
  const double base = std::isfinite(ba) ? ba : 0.0;
  for (double offset : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const double beta = base + offset;
    probes.push_back(json{{"beta", num(beta)}, {"phi", num(phi(law, beta))}});
  }
  doc["phi"] = std::move(probes);
  out << doc.dump(2) << '\n';
  return ok;
}

int malthus(const std::string& path, std::ostream& out) {
  const ReproductionLaw law = load_law_spec(path);
  out << g10(malthusian_exponent(law)) << '\n';
  return ok;
}

int mseries(const MseriesOptions& o, std::ostream& out) {
  const ReproductionLaw law = load_law_spec(o.law);
  SeriesOptions opts;
  opts.rel_tol = o.rel_tol;
  const SeriesEvaluation m = m_series(law, o.alpha, o.t, {o.beta, o.beta_imag}, opts);
  json doc = report_header();
  doc["value"] = num(m.value.real());
  if (o.beta_imag != 0.0) doc["value_imag"] = num(m.value.imag());
  doc["precision_bits"] = m.working_precision_bits;
  doc["digits_lost"] = num(m.cancellation_digits_lost);
  doc["terms"] = m.terms_used;
  doc["exact_coefficients"] = m.exact_coefficients;
  out << doc.dump(2) << '\n';
  return ok;
}

int gamma(const GammaOptions& o, std::ostream& out) {
  const ReproductionLaw law = load_law_spec(o.law);
  const GammaExtrapolation g = gamma_z(law, o.alpha, {o.z, o.z_imag}, {o.beta, o.beta_imag});
  json doc = report_header();
  doc["value"] = num(g.value.real());
  doc["value_imag"] = num(g.value.imag());
  doc["truncation_K"] = g.truncation_K;
  doc["tail_estimate"] = num(g.tail_estimate);
  out << doc.dump(2) << '\n';
  return ok;
}

int asym_coeff(const AsymOptions& o, std::ostream& out) {
  const ReproductionLaw law = load_law_spec(o.law);
  const std::complex<double> c = asymptotic_coefficient(law, o.alpha, {o.beta, o.beta_imag});
  json doc = report_header();
  doc["value"] = num(c.real());
  doc["value_imag"] = num(c.imag());
  doc["beta_star"] = num(law.beta_star());
  doc["exponent"] = num((law.beta_star() - o.beta) / o.alpha);
  out << doc.dump(2) << '\n';
  return ok;
}

int rho_moments(const RhoMomentsOptions& o, std::ostream& out) {
  const ReproductionLaw law = load_law_spec(o.law);
  const RhoMoments rm = fragkit::rho_moments(law, o.alpha, o.kmax);
  out << "k,moment\n";
  for (std::size_t k = 0; k < rm.moments.size(); ++k) out << k + 1 << ',' << g10(rm.moments[k]) << '\n';
  return ok;
}

int simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err) {
  const ReproductionLaw law = load_law_spec(o.law);
  if (!law.has_beta_star()) throw DomainError("law has no Malthusian exponent");
  SimulationConfig config;
  config.alpha = o.alpha;
  config.t_max = o.tmax;
  config.child_floor = o.floor;
  config.max_particles = o.max_particles;
  config.master_seed = o.seed;
  config.snapshot_times = o.snapshots.empty() ? std::vector<double>{o.tmax} : o.snapshots;

  const auto results = run_replicates(config, law, o.replicates, o.threads);
  const double bs = law.beta_star();
  out << "replicate,t,n_particles,M_beta_star,frozen_bound\n";
  std::size_t capped = 0;
  for (std::size_t r = 0; r < results.size(); ++r) {
    if (results[r].particle_cap_exceeded) ++capped;
    for (const auto& s : results[r].snapshots) {
      out << r << ',' << g10(s.t) << ',' << s.sizes.size() << ',' << g10(snapshot_power_sum(s, bs)) << ','
          << g10(s.frozen_beta_mass_bound) << '\n';
    }
  }
  if (!o.dump.empty()) {
    std::ofstream f = open_output(o.dump);
    f << "replicate,t,size\n";
    for (std::size_t r = 0; r < results.size(); ++r) {
      for (const auto& s : results[r].snapshots) {
        for (double x : s.sizes) f << r << ',' << g10(s.t) << ',' << g10(x) << '\n';
      }
    }
  }
  if (capped > 0) err << "warning: " << capped << " replicate(s) hit the particle cap; later snapshots omitted\n";
  return ok;
}

std::optional<double> gamma_type_lambda(const ReproductionLaw& law) {
  if (const auto* p = std::get_if<FilippovPower>(&law.parameters())) return p->lambda;
  if (law.kind() == LawKind::binary_uniform_conservative) return 2.0;
  return std::nullopt;
}

double gamma_type_integral(double lambda, double alpha, const TestFunction& f) {
  if (f.kind == TestFunction::Kind::indicator) {
    return filippov_rho_cdf(lambda, alpha, f.b) - filippov_rho_cdf(lambda, alpha, f.a);
  }
  auto g = [&](double x) { return x > 0.0 ? f(x) * filippov_rho_density(lambda, 0.0, alpha, x) : 0.0; };
  boost::math::quadrature::tanh_sinh<double> near;
  boost::math::quadrature::exp_sinh<double> far;
  return near.integrate(g, 0.0, 1.0, 1e-12) + far.integrate(g, 1.0, std::numeric_limits<double>::infinity(), 1e-12);
}

int tagged(const TaggedOptions& o, std::ostream& out) {
  const ReproductionLaw law = load_law_spec(o.law);
  const TaggedLaw tag = tilted_tag_law(law);
  const double scale = std::pow(o.t, 1.0 / o.alpha);
  std::vector<double> scaled(o.paths);
  std::vector<double> raw(o.paths);
  for (std::size_t p = 0; p < o.paths; ++p) {
    Stream stream(root_key(o.seed, p), Stream::Purpose::generic);
    raw[p] = tagged_fragment_path(tag, o.alpha, o.t, stream).size_at(o.t);
    scaled[p] = scale * raw[p];
  }
  if (!o.summary) {
    out << "path,size,scaled\n";
    for (std::size_t p = 0; p < o.paths; ++p) out << p << ',' << g10(raw[p]) << ',' << g10(scaled[p]) << '\n';
    return ok;
  }
  RunningStats m1, m2;
  for (double x : scaled) {
    m1.add(std::pow(x, o.alpha));
    m2.add(std::pow(x, 2.0 * o.alpha));
  }
  json doc = report_header();
  doc["t"] = num(o.t);
  doc["paths"] = o.paths;
  doc["moment1"] = json{{"estimate", num(m1.mean())}, {"se", num(m1.standard_error())}};
  doc["moment2"] = json{{"estimate", num(m2.mean())}, {"se", num(m2.standard_error())}};
  if (const auto lambda = gamma_type_lambda(law)) {
    const double a = o.alpha, l = *lambda;
    doc["kolmogorov_distance"] =
        num(kolmogorov_distance(scaled, [l, a](double x) { return filippov_rho_cdf(l, a, x); }));
  }
  out << doc.dump(2) << '\n';
  return ok;
}

int sample_y(const SampleYOptions& o, std::ostream& out) {
  const ReproductionLaw law = load_law_spec(o.law);
  const TaggedLaw tag = tilted_tag_law(law);
  std::vector<YSample> ys(o.n);
  for (std::size_t i = 0; i < o.n; ++i) {
    Stream stream(root_key(o.seed, i), Stream::Purpose::generic);
    ys[i] = sample_Y(tag, o.alpha, stream, o.eps);
  }
  if (!o.summary) {
    out << "index,Y,tail_bound\n";
    for (std::size_t i = 0; i < o.n; ++i) out << i << ',' << g10(ys[i].value) << ',' << g10(ys[i].tail_bound) << '\n';
    return ok;
  }
  RunningStats m1, m2;
  double tail = 0.0;
  for (const auto& y : ys) {
    m1.add(y.value);
    m2.add(y.value * y.value);
    tail = std::max(tail, y.tail_bound);
  }
  json doc = report_header();
  doc["n"] = o.n;
  doc["mean"] = json{{"estimate", num(m1.mean())}, {"se", num(m1.standard_error())},
                     {"rho_moment", num(rho_moment(law, o.alpha, 1))}};
  doc["second_moment"] = json{{"estimate", num(m2.mean())}, {"se", num(m2.standard_error())},
                              {"rho_moment", num(rho_moment(law, o.alpha, 2))}};
  doc["max_tail_bound"] = num(tail);
  out << doc.dump(2) << '\n';
  return ok;
}

int rho_empirical(const RhoEmpiricalOptions& o, std::ostream& out) {
  const ReproductionLaw law = load_law_spec(o.law);
  if (!law.has_beta_star()) throw DomainError("law has no Malthusian exponent");
  SimulationConfig config;
  config.alpha = o.alpha;
  config.t_max = o.t;
  config.child_floor = o.floor;
  config.master_seed = o.seed;
  config.snapshot_times = {o.t};
  const auto results = run_replicates(config, law, o.replicates, o.threads);
  std::vector<PopulationSnapshot> snaps;
  for (const auto& r : results) {
    if (r.particle_cap_exceeded) throw Error("particle cap exceeded; lower t or raise the cap");
    snaps.push_back(r.snapshots.front());
  }
  const WeightedEmpiricalMeasure measure = empirical_weighted_measure(snaps, o.alpha, law.beta_star());

  json doc = report_header();
  doc["t"] = num(o.t);
  doc["replicates"] = o.replicates;
  RunningStats total;
  for (double w : measure.replicate_totals()) total.add(w);
  doc["total_weight"] = json{{"estimate", num(total.mean())}, {"se", num(total.standard_error())}};
  doc["empty"] = measure.empty();
  json moments = json::array();
  for (int k = 1; k <= o.kmax; ++k) {
    const RunningStats m = measure.moment(k);
    moments.push_back(json{{"k", k},
                           {"estimate", num(m.mean())},
                           {"se", num(m.standard_error())},
                           {"rho_moment", num(rho_moment(law, o.alpha, k))}});
  }
  doc["moments"] = std::move(moments);
  if (!o.hist.empty() && !measure.empty()) {
    std::ofstream f = open_output(o.hist);
    f << "bin_left,bin_right,mass\n";
    for (const auto& b : measure.histogram(measure.default_edges(o.bins))) {
      f << g10(b.left) << ',' << g10(b.right) << ',' << g10(b.mass) << '\n';
    }
  }
  out << doc.dump(2) << '\n';
  return ok;
}

}  // namespace fragkit::cli
