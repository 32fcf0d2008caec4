#include <CLI11.hpp>

#include <ostream>

#include "cli.hpp"
#include "commands.hpp"
#include "fragkit/error.hpp"
#include "fragkit/law_spec.hpp"
#include "fragkit/version.hpp"

namespace fragkit::cli {

namespace {

void add_law(CLI::App* app, std::string& target) {
  app->add_option("--law", target, "law spec JSON file")->required()->check(CLI::ExistingFile);
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return dispatch(args, out, err);
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"fragkit: self-similar fragmentation processes", "fragkit"};
  app.set_version_flag("--version", std::string(build_id()));
  app.require_subcommand(1);
  app.footer("\n" + law_spec_help());

  std::function<int()> action;

  auto* law_cmd = app.add_subcommand("law", "law utilities");
  law_cmd->require_subcommand(1);
  std::string inspect_path;
  auto* inspect = law_cmd->add_subcommand("inspect", "phi at probe points, beta*, flags");
  inspect->add_option("spec", inspect_path, "law spec JSON file")->required()->check(CLI::ExistingFile);
  inspect->callback([&] { action = [&] { return law_inspect(inspect_path, out); }; });

  std::string malthus_law;
  auto* malthus_cmd = app.add_subcommand("malthus", "Malthusian exponent");
  add_law(malthus_cmd, malthus_law);
  malthus_cmd->callback([&] { action = [&] { return malthus(malthus_law, out); }; });

  MseriesOptions ms;
  auto* ms_cmd = app.add_subcommand("mseries", "mean power sum m(t, beta) by series");
  add_law(ms_cmd, ms.law);
  ms_cmd->add_option("--alpha", ms.alpha)->capture_default_str();
  ms_cmd->add_option("--t", ms.t)->required();
  ms_cmd->add_option("--beta", ms.beta)->required();
  ms_cmd->add_option("--beta-imag", ms.beta_imag)->capture_default_str();
  ms_cmd->add_option("--rel-tol", ms.rel_tol)->capture_default_str();
  ms_cmd->callback([&] { action = [&] { return mseries(ms, out); }; });

  GammaOptions gm;
  auto* gm_cmd = app.add_subcommand("gamma", "extrapolated gamma(z, beta)");
  add_law(gm_cmd, gm.law);
  gm_cmd->add_option("--alpha", gm.alpha)->capture_default_str();
  gm_cmd->add_option("--z", gm.z)->required();
  gm_cmd->add_option("--z-imag", gm.z_imag)->capture_default_str();
  gm_cmd->add_option("--beta", gm.beta)->required();
  gm_cmd->add_option("--beta-imag", gm.beta_imag)->capture_default_str();
  gm_cmd->callback([&] { action = [&] { return gamma(gm, out); }; });

  AsymOptions as;
  auto* as_cmd = app.add_subcommand("asym-coeff", "coefficient C(beta) of the large-t asymptotics");
  add_law(as_cmd, as.law);
  as_cmd->add_option("--alpha", as.alpha)->capture_default_str();
  as_cmd->add_option("--beta", as.beta)->required();
  as_cmd->add_option("--beta-imag", as.beta_imag)->capture_default_str();
  as_cmd->callback([&] { action = [&] { return asym_coeff(as, out); }; });

  RhoMomentsOptions rm;
  auto* rm_cmd = app.add_subcommand("rho-moments", "power moments of the limit measure");
  add_law(rm_cmd, rm.law);
  rm_cmd->add_option("--alpha", rm.alpha)->capture_default_str();
  rm_cmd->add_option("--kmax", rm.kmax)->capture_default_str()->check(CLI::PositiveNumber);
  rm_cmd->callback([&] { action = [&] { return rho_moments(rm, out); }; });

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "event-driven simulation");
  add_law(sim_cmd, sim.law);
  sim_cmd->add_option("--alpha", sim.alpha)->capture_default_str();
  sim_cmd->add_option("--tmax", sim.tmax)->required();
  sim_cmd->add_option("--snapshots", sim.snapshots, "comma separated times")->delimiter(',');
  sim_cmd->add_option("--replicates", sim.replicates)->capture_default_str();
  sim_cmd->add_option("--seed", sim.seed)->capture_default_str();
  sim_cmd->add_option("--floor", sim.floor, "child size floor")->capture_default_str();
  sim_cmd->add_option("--threads", sim.threads)->capture_default_str();
  sim_cmd->add_option("--max-particles", sim.max_particles)->capture_default_str();
  sim_cmd->add_option("--dump", sim.dump, "per-particle CSV output");
  sim_cmd->callback([&] { action = [&] { return simulate(sim, out, err); }; });

  TaggedOptions tg;
  auto* tg_cmd = app.add_subcommand("tagged", "tagged fragment sizes at time t");
  add_law(tg_cmd, tg.law);
  tg_cmd->add_option("--alpha", tg.alpha)->capture_default_str();
  tg_cmd->add_option("--t", tg.t)->required();
  tg_cmd->add_option("--paths", tg.paths)->capture_default_str();
  tg_cmd->add_option("--seed", tg.seed)->capture_default_str();
  tg_cmd->add_flag("--summary", tg.summary, "JSON summary instead of CSV");
  tg_cmd->callback([&] { action = [&] { return tagged(tg, out); }; });

  SampleYOptions sy;
  auto* sy_cmd = app.add_subcommand("sample-y", "samples of the exponential functional");
  add_law(sy_cmd, sy.law);
  sy_cmd->add_option("--alpha", sy.alpha)->capture_default_str();
  sy_cmd->add_option("--n", sy.n)->capture_default_str();
  sy_cmd->add_option("--seed", sy.seed)->capture_default_str();
  sy_cmd->add_option("--eps", sy.eps, "tail cutoff")->capture_default_str();
  sy_cmd->add_flag("--summary", sy.summary, "JSON summary instead of CSV");
  sy_cmd->callback([&] { action = [&] { return sample_y(sy, out); }; });

  ValidateOptions va;
  auto* va_cmd = app.add_subcommand("validate", "simulation against closed forms");
  add_law(va_cmd, va.law);
  va_cmd->add_option("--alpha", va.alpha)->capture_default_str();
  va_cmd->add_option("--suite", va.suite)
      ->check(CLI::IsMember({"moments", "martingale", "l2", "cdf", "all"}))
      ->capture_default_str();
  va_cmd->add_option("--replicates", va.replicates)->capture_default_str();
  va_cmd->add_option("--seed", va.seed)->capture_default_str();
  va_cmd->add_option("--threads", va.threads)->capture_default_str();
  va_cmd->add_option("--t", va.t, "time for the moments/martingale/cdf suites")->capture_default_str();
  va_cmd->add_option("--ladder", va.ladder, "times for the l2 suite")->delimiter(',');
  va_cmd->add_option("--depth", va.depth, "generations for the genealogy checks")->capture_default_str();
  va_cmd->add_option("--prune", va.prune)->capture_default_str();
  va_cmd->add_option("--y-samples", va.y_samples)->capture_default_str();
  va_cmd->add_option("--cdf-tol", va.cdf_tol)->capture_default_str();
  va_cmd->add_option("--floor", va.floor)->capture_default_str();
  va_cmd->add_option("--f", va.f, "test function for the l2 suite")
      ->check(CLI::IsMember({"exp", "indicator", "powmin"}))
      ->capture_default_str();
  va_cmd->add_option("--f-a", va.f_a, "indicator left end / powmin cap")->capture_default_str();
  va_cmd->add_option("--f-b", va.f_b, "indicator right end")->capture_default_str();
  va_cmd->add_option("--json", va.json, "write the JSON report here instead of stdout");
  va_cmd->callback([&] { action = [&] { return validate(va, out, err); }; });

  RhoEmpiricalOptions re;
  auto* re_cmd = app.add_subcommand("rho-empirical", "weighted empirical measure at time t");
  add_law(re_cmd, re.law);
  re_cmd->add_option("--alpha", re.alpha)->capture_default_str();
  re_cmd->add_option("--t", re.t)->capture_default_str();
  re_cmd->add_option("--replicates", re.replicates)->capture_default_str();
  re_cmd->add_option("--seed", re.seed)->capture_default_str();
  re_cmd->add_option("--threads", re.threads)->capture_default_str();
  re_cmd->add_option("--floor", re.floor)->capture_default_str();
  re_cmd->add_option("--bins", re.bins)->capture_default_str();
  re_cmd->add_option("--kmax", re.kmax)->capture_default_str();
  re_cmd->add_option("--hist", re.hist, "histogram CSV output");
  re_cmd->callback([&] { action = [&] { return rho_empirical(re, out); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return usage_error;
  }

  try {
    return action ? action() : usage_error;
  } catch (const InvalidLawSpec& e) {
    err << "error: " << e.what() << "\n\n" << law_spec_help() << '\n';
  } catch (const NoMalthusianExponent& e) {
    err << "error: " << e.what() << " (phi at the abscissa: " << g10(e.phi_at_abscissa()) << ")\n";
  } catch (const PrecisionExhausted& e) {
    err << "error: " << e.what() << " (last precision " << e.last_precision_bits() << " bits, "
        << g10(e.digits_lost()) << " digits lost)\n";
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return usage_error;
}

}  // namespace fragkit::cli
