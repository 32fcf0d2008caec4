#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "fragkit/law.hpp"
#include "fragkit/simulator.hpp"

namespace fragkit {

/// Welford accumulator; merge() is associative, so per-replicate summaries can
/// be combined in any grouping.
class RunningStats {
 public:
  void add(double x);
  void merge(const RunningStats& other);
  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const;  ///< unbiased
  double standard_error() const;

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct Check {
  std::string name;
  double estimate = 0.0;
  double target = 0.0;
  double se = 0.0;
  double z = 0.0;
  bool pass = false;
  std::string note;
};

/// z = (estimate - target) / se, pass iff |z| <= 3. A zero SE passes only on
/// (near) exact agreement.
Check z_check(std::string name, double estimate, double target, double se);

struct ValidationReport {
  std::vector<Check> checks;
  bool all_pass() const;
  void add(Check check) { checks.push_back(std::move(check)); }
  std::string table() const;
  std::string json(std::string_view build_id) const;
};

struct HistogramBin {
  double left = 0.0;
  double right = 0.0;
  double mass = 0.0;
};

/// Atoms at t^(1/alpha) X_j(t) with weights X_j(t)^beta*, pooled over replicates.
class WeightedEmpiricalMeasure {
 public:
  struct Atom {
    double location;
    double weight;
    std::uint32_t replicate;
  };

  WeightedEmpiricalMeasure(double t, double alpha, double beta_star, std::size_t replicates);

  double t() const { return t_; }
  double alpha() const { return alpha_; }
  double beta_star() const { return beta_star_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<double>& replicate_totals() const { return totals_; }
  std::size_t replicates() const { return totals_.size(); }
  bool empty() const;

  /// Per-replicate values of sum weight * f(location).
  std::vector<double> replicate_integrals(const std::function<double(double)>& f) const;
  /// Mean over replicates of int f d(measure), with its standard error.
  RunningStats integral(const std::function<double(double)>& f) const;
  /// int x^(alpha k), the k-th power moment.
  RunningStats moment(int k) const;

  /// Weight-normalised CDF of the pooled measure.
  double cdf(double x) const;
  /// Geometric bins over [min, q_0.001, ..., q_0.999, max].
  std::vector<double> default_edges(std::size_t bins = 40) const;
  std::vector<HistogramBin> histogram(const std::vector<double>& edges) const;

  void add_atom(double location, double weight, std::uint32_t replicate);

 private:
  void sort_atoms() const;

  double t_, alpha_, beta_star_;
  mutable std::vector<Atom> atoms_;  // sorted lazily by location
  std::vector<double> totals_;
  mutable bool sorted_ = true;
  mutable std::vector<double> cumulative_;
};

/// Builds the measure from snapshots taken at a common time, one per replicate.
WeightedEmpiricalMeasure empirical_weighted_measure(const std::vector<PopulationSnapshot>& snapshots,
                                                    double alpha, double beta_star);

/// Kolmogorov distance between the normalised measure and a target CDF.
double cdf_distance(const WeightedEmpiricalMeasure& measure, const std::function<double(double)>& target_cdf);

/// Kolmogorov distance between the empirical CDF of unweighted samples and a
/// target CDF.
double kolmogorov_distance(std::vector<double> samples, const std::function<double(double)>& target_cdf);

/// z-test of the replicate mean of M(t, beta) against m(t, beta); falls back to
/// C(beta) t^((beta* - beta)/alpha) with a 5% band when the series is out of reach.
Check mean_power_sum_test(const std::vector<double>& power_sums, double t, double beta,
                          const ReproductionLaw& law, double alpha);

struct SecondMomentOracle {
  double value = 0.0;
  double se = 0.0;  ///< zero when exact
  std::string method;
};

/// E M_inf^2 = (E (sum xi^beta*)^2 - phi(2 beta*)) / (1 - phi(2 beta*)).
SecondMomentOracle m_infinity_second_moment_oracle(const ReproductionLaw& law, double beta_star,
                                                   std::uint64_t seed = 7, std::size_t draws = 1'000'000);

struct TestFunction {
  enum class Kind { indicator, exp_neg, power_min };
  Kind kind = Kind::exp_neg;
  double a = 0.0;  ///< indicator: [a, b]; power_min: cap c in a
  double b = 1.0;
  double alpha = 1.0;

  double operator()(double x) const;
  std::string name() const;
};

/// Replicates carry paired observations at each ladder time.
struct L2Observation {
  double a_t = 0.0;  ///< sum X^beta* f(t^(1/alpha) X)
  double m_t = 0.0;  ///< M(t, beta*)
};

/// ladder[i][r]: observation of replicate r at the i-th time. Reports
/// E A_t vs int f d rho, E[A_t M_t] vs E M_inf^2 int f d rho, and that the
/// mean square of A_t - M_t int f d rho drops between the first and last time
/// by more than 2 SE of the paired difference.
ValidationReport l2_functional_test(const std::vector<double>& times,
                                    const std::vector<std::vector<L2Observation>>& ladder,
                                    double integral_f_rho, double integral_se, const SecondMomentOracle& oracle);

}  // namespace fragkit
