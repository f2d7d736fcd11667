// Experiment runner for the linearized-KdV laboratory.  Every analysis and
// spectral operation is a subcommand; parameters come from flags or a flat
// key=value config file (flags win).  Reports land in --outdir as
// <experiment>-<timestamp>.json (never overwritten), pseudospectra also as
// CSV.  Exit codes: 0 success, 1 invalid configuration, 2 numerical abort.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "lkdv/analysis.hpp"
#include "lkdv/report_io.hpp"
#include "lkdv/selftest.hpp"
#include "lkdv/spectral.hpp"
#include "lkdv/version.hpp"

namespace {

using namespace lkdv;

struct CommonOpts {
  double L = 30.0;
  int N = 1024;
  double T = 100.0;
  double dt = 1e-3;
  double coupling = 1.0;
  std::string generator = "H";
  std::string branch = "plus";
  std::string outdir = "reports";
  std::string seed_id = "battery";  // battery | gauss | sech | rand
  uint64_t rng_seed = 1;
  bool no_write = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  cmd->add_option("--L", o.L, "domain half-width");
  cmd->add_option("--N", o.N, "grid points (even)");
  cmd->add_option("--dt", o.dt, "time step");
  cmd->add_option("--coupling", o.coupling, "potential coupling scale");
  cmd->add_option("--outdir", o.outdir, "report directory");
  cmd->add_option("--seed", o.rng_seed, "rng seed for the random battery members");
  cmd->add_flag("--no-write", o.no_write, "skip writing report files");
  cmd->footer("Also accepts --config FILE (flat key=value, long option names as\nkeys); explicit flags win.");
}

// Flat key=value config support: `--config file` is extracted before CLI11
// sees the command line, and the file's entries are replayed as flags right
// after the subcommand token, so explicit flags win (TakeLast).
std::vector<std::string> splice_config(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::string config_path;
  for (size_t i = 1; i < args.size();) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[i + 1];
      args.erase(args.begin() + i, args.begin() + i + 2);
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
      args.erase(args.begin() + i);
    } else {
      ++i;
    }
  }
  if (config_path.empty()) return args;

  std::ifstream in(config_path);
  if (!in)
    throw PreconditionError("cannot read config file: " + config_path);
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) continue;
    tokens.push_back("--" + key + "=" + value);
  }

  // insert right after the subcommand token (first non-flag argument)
  size_t at = args.size();
  for (size_t i = 1; i < args.size(); ++i) {
    if (args[i].rfind("-", 0) != 0) {
      at = i + 1;
      break;
    }
  }
  args.insert(args.begin() + static_cast<long>(at), tokens.begin(),
              tokens.end());
  return args;
}

std::vector<Seed> select_seeds(const Grid& g, const std::string& battery,
                               uint64_t rng_seed) {
  if (battery == "battery") return make_battery(g, rng_seed);
  if (battery == "gauss") return {{"gauss_c0", make_gaussian(g, 0.0, 1.0)}};
  if (battery == "sech") return {{"sech_b0125", make_sech_seed(g, 0.125)}};
  if (battery == "rand")
    return {{"rand_a", make_band_limited_random(g, 0xA11CE + rng_seed)}};
  throw PreconditionError("unknown seed battery id: " + battery);
}

Provenance make_provenance(const CLI::App& cmd, uint64_t rng_seed) {
  Provenance p;
  p.code_version = kVersion;
  p.rng_seed = rng_seed;
  p.timestamp = current_utc_timestamp();
  for (const CLI::Option* opt : cmd.get_options()) {
    if (opt->get_name().rfind("--", 0) != 0) continue;
    const std::string key = opt->get_name().substr(2);
    if (key == "config" || key == "help") continue;
    if (!opt->results().empty())
      p.config[key] = opt->results().back();  // TakeLast: effective value
    else if (!opt->get_default_str().empty())
      p.config[key] = opt->get_default_str();
  }
  return p;
}

void announce(const std::filesystem::path& p) {
  std::cout << "wrote " << p.string() << "\n";
}

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::string token;
  std::stringstream ss(csv);
  while (std::getline(ss, token, ',')) out.push_back(std::stod(token));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"linearized-KdV numerical laboratory"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  // evolve -------------------------------------------------------------
  CommonOpts ev;
  double ev_T = 1.0;
  int ev_record = 0;
  std::string ev_scheme = "lawson_rk4";
  auto* evolve_cmd = app.add_subcommand("evolve", "run one trajectory");
  add_common(evolve_cmd, ev);
  evolve_cmd->add_option("--T", ev_T, "final time");
  evolve_cmd->add_option("--generator", ev.generator, "H0|H|Hstar|Htilde0|NegH|NegHstar");
  evolve_cmd->add_option("--record-every", ev_record, "snapshot stride in steps");
  evolve_cmd->add_option("--scheme", ev_scheme, "lawson_rk4|dense_oracle");

  // stability ----------------------------------------------------------
  CommonOpts st;
  double st_T = 200.0;
  auto* stability_cmd = app.add_subcommand("stability", "norm-ratio scan");
  add_common(stability_cmd, st);
  stability_cmd->add_option("--T", st_T, "final time");
  stability_cmd->add_option("--generator", st.generator, "H|Hstar|H0|Htilde0");
  stability_cmd->add_option("--battery", st.seed_id, "battery|gauss|sech|rand");

  // smoothing ----------------------------------------------------------
  CommonOpts sm;
  double sm_alpha = 1.0;
  bool sm_derivative = false;
  std::string sm_ladder = "25,50,100";
  auto* smoothing_cmd =
      app.add_subcommand("smoothing", "weighted smoothing ladder for e^{-itH}");
  add_common(smoothing_cmd, sm);
  smoothing_cmd->add_option("--alpha", sm_alpha, "weight exponent in (0,1]");
  smoothing_cmd->add_option("--generator", sm.generator, "H|Hstar");
  smoothing_cmd->add_option("--branch", sm.branch, "plus|minus");
  smoothing_cmd->add_flag("--derivative", sm_derivative, "insert the p factor");
  smoothing_cmd->add_option("--ladder", sm_ladder, "comma list of T_k");
  smoothing_cmd->add_option("--battery", sm.seed_id, "battery|gauss|sech|rand");

  // free-smoothing -------------------------------------------------------
  CommonOpts fs;
  double fs_theta = 1.0;
  bool fs_absp = false;
  std::string fs_ladder = "25,50,100";
  auto* free_cmd =
      app.add_subcommand("free-smoothing", "free-flow smoothing ladder");
  add_common(free_cmd, fs);
  free_cmd->add_option("--theta", fs_theta, "bracket power in [0,1]");
  free_cmd->add_flag("--abs-p", fs_absp, "use |xi| instead of <xi>^theta");
  free_cmd->add_option("--ladder", fs_ladder, "comma list of T_k");
  free_cmd->add_option("--battery", fs.seed_id, "battery|gauss|sech|rand");

  // decay ----------------------------------------------------------------
  CommonOpts dc;
  double dc_alpha = 1.0;
  int dc_n = 1;
  double dc_tmin = 1.0, dc_tmax = 10.0, dc_tstep = 0.1;
  double dc_sigma = 0.0;
  auto* decay_cmd =
      app.add_subcommand("decay", "conjugated-flow decay-rate fit");
  add_common(decay_cmd, dc);
  decay_cmd->add_option("--alpha", dc_alpha, "conjugation exponent in (0,1]");
  decay_cmd->add_option("--n", dc_n, "momentum power 0|1|2");
  decay_cmd->add_option("--t-min", dc_tmin, "fit window start");
  decay_cmd->add_option("--t-max", dc_tmax, "fit window end");
  decay_cmd->add_option("--t-step", dc_tstep, "sample spacing");
  decay_cmd->add_option("--sigma", dc_sigma,
                        "Gaussian seed width (0 picks sqrt(8 alpha))");
  decay_cmd->add_option("--branch", dc.branch, "plus|minus");

  // wave-op ----------------------------------------------------------------
  CommonOpts wo;
  std::string wo_checkpoints = "5,10,20,40";
  int wo_direction = +1;
  auto* wave_cmd =
      app.add_subcommand("wave-op", "Cook wave-operator convergence");
  add_common(wave_cmd, wo);
  wo.L = 180.0;
  wo.N = 2048;
  wo.dt = 2e-3;
  wave_cmd->add_option("--checkpoints", wo_checkpoints, "comma list of times");
  wave_cmd->add_option("--direction", wo_direction, "+1 or -1");
  wave_cmd->add_option("--battery", wo.seed_id, "battery|gauss|sech|rand");

  // inverse-wave -------------------------------------------------------
  CommonOpts iw;
  std::string iw_checkpoints = "10,20,40,80";
  int iw_direction = +1;
  auto* inv_cmd =
      app.add_subcommand("inverse-wave", "inverse wave-operator convergence");
  add_common(inv_cmd, iw);
  iw.L = 180.0;
  iw.N = 2048;
  iw.dt = 2e-3;
  inv_cmd->add_option("--checkpoints", iw_checkpoints, "comma list of times");
  inv_cmd->add_option("--direction", iw_direction, "+1 or -1");
  inv_cmd->add_option("--battery", iw.seed_id, "battery|gauss|sech|rand");

  // eigen-scan -----------------------------------------------------------
  CommonOpts es;
  auto* eigen_cmd =
      app.add_subcommand("eigen-scan", "dense spectrum with refinement filter");
  add_common(eigen_cmd, es);
  es.N = 256;
  eigen_cmd->add_option("--generator", es.generator, "H|Hstar|Htilde0");

  // pseudospec -----------------------------------------------------------
  CommonOpts ps;
  std::string ps_box = "-5,5,0.1,2";
  int ps_nx = 40, ps_ny = 20;
  auto* pseudo_cmd = app.add_subcommand("pseudospec", "sigma_min field over a box");
  add_common(pseudo_cmd, ps);
  ps.N = 256;
  pseudo_cmd->add_option("--box", ps_box, "re_min,re_max,im_min,im_max");
  pseudo_cmd->add_option("--nx", ps_nx, "lattice points (Re)");
  pseudo_cmd->add_option("--ny", ps_ny, "lattice points (Im)");
  pseudo_cmd->add_option("--generator", ps.generator, "H|Hstar|Htilde0");

  // evans ------------------------------------------------------------------
  CommonOpts evx;
  std::string evx_box = "-5,5,0.1,2";
  int evx_nx = 40, evx_ny = 20;
  double evx_lode = 15.0, evx_tol = 1e-10;
  auto* evans_cmd = app.add_subcommand("evans", "Evans-function sweep + winding");
  add_common(evans_cmd, evx);
  evans_cmd->add_option("--box", evx_box, "re_min,re_max,im_min,im_max");
  evans_cmd->add_option("--nx", evx_nx, "lattice points (Re)");
  evans_cmd->add_option("--ny", evx_ny, "lattice points (Im)");
  evans_cmd->add_option("--L-ode", evx_lode, "integration half-width (>= 15)");
  evans_cmd->add_option("--tol", evx_tol, "ODE tolerance");
  evans_cmd->add_option("--generator", evx.generator, "H|Hstar");

  // selftest / plotdata ------------------------------------------------
  auto* selftest_cmd =
      app.add_subcommand("selftest", "fast formula-level check battery");
  std::string plot_report, plot_outdir = "reports";
  auto* plot_cmd =
      app.add_subcommand("plotdata", "project a report JSON onto CSV curves");
  plot_cmd->add_option("report", plot_report, "report JSON path")->required();
  plot_cmd->add_option("--outdir", plot_outdir, "CSV directory");

  std::vector<std::string> args;
  try {
    args = splice_config(argc, argv);
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::vector<const char*> cargv;
  cargv.reserve(args.size());
  for (const auto& a : args) cargv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // help/version exit 0, bad flags exit 1
  }

  try {
    if (selftest_cmd->parsed()) {
      return run_selftest(std::cout) == 0 ? 0 : 1;
    }
    if (plot_cmd->parsed()) {
      for (const auto& p : emit_plotdata(plot_report, plot_outdir)) announce(p);
      return 0;
    }

    if (evolve_cmd->parsed()) {
      const Grid g = make_grid(ev.L, ev.N);
      const WaveField f = make_gaussian(g, 0.0, 1.0);
      EvolveConfig cfg{generator_from_string(ev.generator), ev_T, ev.dt,
                       scheme_from_string(ev_scheme), ev_record, ev.coupling};
      const Trajectory traj = evolve(f, cfg);
      if (traj.resolution_warning)
        std::cerr << "warning: seed violates the resolution precondition "
                     "(top-third spectrum above 1e-10 of peak)\n";
      std::cout << "final norm ratio "
                << traj.norms.back() / traj.norms.front() << "\n";
      if (!ev.no_write)
        announce(write_report(
            to_json_string(traj, make_provenance(*evolve_cmd, ev.rng_seed)),
            ev.outdir, "evolve"));
    } else if (stability_cmd->parsed()) {
      const Grid g = make_grid(st.L, st.N);
      const auto seeds = select_seeds(g, st.seed_id, st.rng_seed);
      const StabilityReport rep =
          stability_scan(seeds, st_T, st.dt,
                         generator_from_string(st.generator), st.coupling);
      for (const auto& s : rep.seeds)
        std::cout << s.id << ": max ratio " << s.max_ratio << ", min ratio "
                  << s.min_ratio << ", rate " << s.growth_rate << "\n";
      if (!st.no_write)
        announce(write_report(
            to_json_string(rep, make_provenance(*stability_cmd, st.rng_seed)),
            st.outdir, "stability"));
    } else if (smoothing_cmd->parsed()) {
      const Grid g = make_grid(sm.L, sm.N);
      const auto seeds = select_seeds(g, sm.seed_id, sm.rng_seed);
      const auto prov = make_provenance(*smoothing_cmd, sm.rng_seed);
      for (const auto& seed : seeds) {
        const SmoothingReport rep = smoothing_integral(
            seed.field, sm_alpha, branch_from_string(sm.branch), sm_derivative,
            parse_list(sm_ladder), generator_from_string(sm.generator), sm.dt,
            sm.coupling, seed.id);
        std::cout << seed.id << ": S(T) = " << rep.partial.back()
                  << ", tail fraction "
                  << rep.tail.back() / std::max(rep.partial.back(), 1e-300)
                  << "\n";
        if (!sm.no_write)
          announce(write_report(to_json_string(rep, prov), sm.outdir,
                                "smoothing-" + seed.id));
      }
    } else if (free_cmd->parsed()) {
      const Grid g = make_grid(fs.L, fs.N);
      const auto seeds = select_seeds(g, fs.seed_id, fs.rng_seed);
      const auto prov = make_provenance(*free_cmd, fs.rng_seed);
      const FreqFactor factor =
          fs_absp ? FreqFactor{FreqFactor::abs_p, 0.0}
                  : FreqFactor{FreqFactor::bracket_theta, fs_theta};
      for (const auto& seed : seeds) {
        const SmoothingReport rep = free_smoothing_integral(
            seed.field, factor, parse_list(fs_ladder), 5e-3, seed.id);
        std::cout << seed.id << ": S(T) = " << rep.partial.back() << "\n";
        if (!fs.no_write)
          announce(write_report(to_json_string(rep, prov), fs.outdir,
                                "free-smoothing-" + seed.id));
      }
    } else if (decay_cmd->parsed()) {
      const Grid g = make_grid(dc.L, dc.N);
      const double sigma = dc_sigma > 0.0 ? dc_sigma : std::sqrt(8.0 * dc_alpha);
      const WaveField psi = make_gaussian(g, 0.0, sigma);
      std::vector<double> t_grid;
      for (double t = 0.0; t <= dc_tmax + 1e-12; t += dc_tstep)
        t_grid.push_back(t);
      const DecayFitReport rep =
          decay_fit(dc_alpha, dc_n, psi, t_grid, dc_tmin, dc_tmax,
                    branch_from_string(dc.branch), "gauss_sigma");
      std::cout << "rate " << rep.fitted_rate << " (target " << rep.target_rate
                << "), power " << rep.fitted_power << " (target "
                << rep.target_power << ")\n";
      if (!dc.no_write)
        announce(write_report(
            to_json_string(rep, make_provenance(*decay_cmd, dc.rng_seed)),
            dc.outdir, "decay"));
    } else if (wave_cmd->parsed()) {
      const Grid g = make_grid(wo.L, wo.N);
      const auto seeds = select_seeds(g, wo.seed_id == "battery" ? "gauss" : wo.seed_id,
                                      wo.rng_seed);
      const auto prov = make_provenance(*wave_cmd, wo.rng_seed);
      WaveOperatorOptions opt;
      opt.dt = wo.dt;
      opt.coupling = wo.coupling;
      for (const auto& seed : seeds) {
        const WaveOperatorReport rep = cook_wave_operator(
            seed.field, wo_direction, parse_list(wo_checkpoints), opt, seed.id);
        std::cout << seed.id << ": last increment "
                  << (rep.increments.empty() ? 0.0 : rep.increments.back())
                  << ", integrand rate " << rep.integrand_rate << "\n";
        if (!wo.no_write)
          announce(write_report(to_json_string(rep, prov), wo.outdir,
                                "wave-op-" + seed.id));
      }
    } else if (inv_cmd->parsed()) {
      const Grid g = make_grid(iw.L, iw.N);
      const auto seeds = select_seeds(g, iw.seed_id == "battery" ? "gauss" : iw.seed_id,
                                      iw.rng_seed);
      const auto prov = make_provenance(*inv_cmd, iw.rng_seed);
      WaveOperatorOptions opt;
      opt.dt = iw.dt;
      opt.coupling = iw.coupling;
      for (const auto& seed : seeds) {
        const WaveOperatorReport rep = inverse_wave_check(
            seed.field, iw_direction, parse_list(iw_checkpoints), opt, seed.id);
        std::cout << seed.id << ": increments";
        for (double d : rep.increments) std::cout << " " << d;
        std::cout << ", scattering residual " << rep.scattering_residual << "\n";
        if (!iw.no_write)
          announce(write_report(to_json_string(rep, prov), iw.outdir,
                                "inverse-wave-" + seed.id));
      }
    } else if (eigen_cmd->parsed()) {
      const EigenScanReport rep =
          eigen_scan(es.L, es.N, generator_from_string(es.generator),
                     es.coupling);
      std::cout << "persistent off-real candidates: " << rep.persistent.size()
                << "\n";
      if (!es.no_write)
        announce(write_report(
            to_json_string(rep, make_provenance(*eigen_cmd, es.rng_seed)),
            es.outdir, "eigen-scan"));
    } else if (pseudo_cmd->parsed()) {
      const auto b = parse_list(ps_box);
      if (b.size() != 4)
        throw PreconditionError("pseudospec: --box needs re_min,re_max,im_min,im_max");
      const Grid g = make_grid(ps.L, ps.N);
      const PseudospectrumReport rep =
          pseudospectrum(ComplexBox{b[0], b[1], b[2], b[3]}, ps_nx, ps_ny, g,
                         generator_from_string(ps.generator), ps.coupling);
      std::cout << "min sigma over the box: " << rep.min_sigma << "\n";
      if (!ps.no_write) {
        const auto json_path = write_report(
            to_json_string(rep, make_provenance(*pseudo_cmd, ps.rng_seed)),
            ps.outdir, "pseudospec");
        announce(json_path);
        announce(write_pseudospectrum_csv(rep, ps.outdir,
                                          json_path.stem().string()));
      }
    } else if (evans_cmd->parsed()) {
      const auto b = parse_list(evx_box);
      if (b.size() != 4)
        throw PreconditionError("evans: --box needs re_min,re_max,im_min,im_max");
      const EvansSweepReport rep = evans_sweep(
          ComplexBox{b[0], b[1], b[2], b[3]}, evx_nx, evx_ny, evx_lode, evx_tol,
          generator_from_string(evx.generator), evx.coupling);
      std::cout << "winding " << rep.winding << ", min |E| " << rep.min_abs_E
                << "\n";
      if (!evx.no_write)
        announce(write_report(
            to_json_string(rep, make_provenance(*evans_cmd, evx.rng_seed)),
            evx.outdir, "evans"));
    }
    return 0;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const InstabilityError& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return 2;
  }
}
