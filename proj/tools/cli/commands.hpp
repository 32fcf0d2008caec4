#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fragkit/estimators.hpp"
#include "fragkit/law.hpp"

namespace fragkit::cli {

std::string g10(double x);
/// Rounds to 10 significant digits so JSON scalars match the CSV output.
double r10(double x);

struct MseriesOptions {
  std::string law;
  double alpha = 1.0;
  double t = 0.0;
  double beta = 0.0;
  double beta_imag = 0.0;
  double rel_tol = 1e-12;
};

struct GammaOptions {
  std::string law;
  double alpha = 1.0;
  double z = 0.0;
  double z_imag = 0.0;
  double beta = 0.0;
  double beta_imag = 0.0;
};

struct AsymOptions {
  std::string law;
  double alpha = 1.0;
  double beta = 0.0;
  double beta_imag = 0.0;
};

struct RhoMomentsOptions {
  std::string law;
  double alpha = 1.0;
  int kmax = 6;
};

struct SimulateOptions {
  std::string law;
  double alpha = 1.0;
  double tmax = 1.0;
  std::vector<double> snapshots;
  std::size_t replicates = 1;
  std::uint64_t seed = 1;
  double floor = 1e-9;
  unsigned threads = 1;
  std::size_t max_particles = 10'000'000;
  std::string dump;
};

struct TaggedOptions {
  std::string law;
  double alpha = 1.0;
  double t = 1.0;
  std::size_t paths = 1000;
  std::uint64_t seed = 1;
  bool summary = false;
};

struct SampleYOptions {
  std::string law;
  double alpha = 1.0;
  std::size_t n = 1000;
  std::uint64_t seed = 1;
  double eps = 1e-12;
  bool summary = false;
};

struct ValidateOptions {
  std::string law;
  double alpha = 1.0;
  std::string suite = "all";
  std::size_t replicates = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  double t = 10.0;
  std::vector<double> ladder{10.0, 40.0};
  int depth = 12;
  double prune = 1e-4;
  std::size_t y_samples = 100'000;
  double cdf_tol = 0.02;
  double floor = 1e-9;
  std::string f = "exp";
  double f_a = 0.0;
  double f_b = 1.0;
  std::string json;
};

struct RhoEmpiricalOptions {
  std::string law;
  double alpha = 1.0;
  double t = 10.0;
  std::size_t replicates = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  double floor = 1e-9;
  std::size_t bins = 40;
  int kmax = 2;
  std::string hist;
};

int law_inspect(const std::string& path, std::ostream& out);
int malthus(const std::string& path, std::ostream& out);
int mseries(const MseriesOptions& o, std::ostream& out);
int gamma(const GammaOptions& o, std::ostream& out);
int asym_coeff(const AsymOptions& o, std::ostream& out);
int rho_moments(const RhoMomentsOptions& o, std::ostream& out);
int simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err);
int tagged(const TaggedOptions& o, std::ostream& out);
int sample_y(const SampleYOptions& o, std::ostream& out);
int validate(const ValidateOptions& o, std::ostream& out, std::ostream& err);
int rho_empirical(const RhoEmpiricalOptions& o, std::ostream& out);

/// lambda of a law whose limit measure has the gamma-type closed form.
std::optional<double> gamma_type_lambda(const ReproductionLaw& law);
/// int f d(rho) for the gamma-type limit measure.
double gamma_type_integral(double lambda, double alpha, const TestFunction& f);

ValidationReport run_suite(const ReproductionLaw& law, const ValidateOptions& o);

}  // namespace fragkit::cli
