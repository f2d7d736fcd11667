#include "lkdv/report_io.hpp"

#include <chrono>
#include <fstream>

#include "json.hpp"
#include "lkdv/version.hpp"

namespace lkdv {

using nlohmann::json;

namespace {

json complex_list(std::span<const cplx> v) {
  json re = json::array(), im = json::array();
  for (const cplx& c : v) {
    re.push_back(c.real());
    im.push_back(c.imag());
  }
  return json{{"re", std::move(re)}, {"im", std::move(im)}};
}

json provenance_block(const Provenance& p) {
  json cfg = json::object();
  for (const auto& [k, v] : p.config) cfg[k] = v;
  json out{{"code_version",
            p.code_version.empty() ? std::string(kVersion) : p.code_version},
           {"rng_seed", p.rng_seed},
           {"config", std::move(cfg)}};
  if (!p.timestamp.empty()) out["timestamp"] = p.timestamp;
  return out;
}

json wrap(const std::string& name, json params, json grid, json results,
          const Provenance& prov) {
  return json{{"schema_version", 1},
              {"name", name},
              {"params", std::move(params)},
              {"grid", std::move(grid)},
              {"results", std::move(results)},
              {"provenance", provenance_block(prov)}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string current_utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

std::string to_json_string(const StabilityReport& rep, const Provenance& prov) {
  json seeds = json::array();
  for (const auto& s : rep.seeds) {
    seeds.push_back(json{{"id", s.id},
                         {"max_ratio", s.max_ratio},
                         {"min_ratio", s.min_ratio},
                         {"growth_rate", s.growth_rate},
                         {"crude_bound_margin", s.crude_bound_margin},
                         {"resolution_warning", s.resolution_warning},
                         {"t", s.t},
                         {"ratio", s.ratio}});
  }
  return dump(wrap("stability",
                   json{{"T", rep.T},
                        {"dt", rep.dt},
                        {"generator", to_string(rep.generator)},
                        {"coupling", rep.coupling}},
                   json{{"L", rep.L}, {"N", rep.N}},
                   json{{"seeds", std::move(seeds)}}, prov));
}

std::string to_json_string(const SmoothingReport& rep, const Provenance& prov) {
  json params{{"kind", rep.kind},
              {"derivative", rep.derivative},
              {"dt", rep.dt},
              {"seed_id", rep.seed_id},
              {"coupling", rep.coupling}};
  if (rep.kind == "interacting") {
    params["generator"] = to_string(rep.generator);
    params["branch"] = to_string(rep.branch);
    params["alpha"] = rep.alpha;
  } else {
    params["theta"] = rep.theta;
    params["abs_p"] = rep.abs_p;
  }
  return dump(wrap(rep.kind == "free" ? "free_smoothing" : "smoothing",
                   std::move(params), json{{"L", rep.L}, {"N", rep.N}},
                   json{{"ladder", rep.ladder},
                        {"partial", rep.partial},
                        {"tail", rep.tail},
                        {"seed_norm2", rep.seed_norm2},
                        {"constant_estimate", rep.constant_estimate},
                        {"crude_bound_margin", rep.crude_bound_margin},
                        {"t", rep.t_curve},
                        {"S", rep.s_curve}},
                   prov));
}

std::string to_json_string(const DecayFitReport& rep, const Provenance& prov) {
  return dump(wrap("decay_fit",
                   json{{"alpha", rep.alpha},
                        {"n", rep.n},
                        {"t_min", rep.t_min},
                        {"t_max", rep.t_max},
                        {"seed_id", rep.seed_id}},
                   json{{"L", rep.L}, {"N", rep.N}},
                   json{{"fitted_rate", rep.fitted_rate},
                        {"target_rate", rep.target_rate},
                        {"fitted_power", rep.fitted_power},
                        {"target_power", rep.target_power},
                        {"residual_rms", rep.residual_rms},
                        {"t", rep.t_curve},
                        {"norm", rep.norm_curve}},
                   prov));
}

std::string to_json_string(const WaveOperatorReport& rep,
                           const Provenance& prov) {
  json results{{"checkpoints", rep.checkpoints},
               {"increments", rep.increments},
               {"seed_norm", rep.seed_norm},
               {"integrand_t", rep.integrand_t},
               {"integrand", rep.integrand},
               {"integrand_rate", rep.integrand_rate},
               {"limit_norm", rep.limit_norm},
               {"crude_bound_margin", rep.crude_bound_margin}};
  if (rep.scattering_residual >= 0.0)
    results["scattering_residual"] = rep.scattering_residual;
  return dump(wrap(rep.kind == "cook" ? "wave_operator" : "inverse_wave",
                   json{{"direction", rep.direction},
                        {"dt", rep.dt},
                        {"coupling", rep.coupling},
                        {"seed_id", rep.seed_id}},
                   json{{"L", rep.L}, {"N", rep.N}}, std::move(results), prov));
}

std::string to_json_string(const EigenScanReport& rep, const Provenance& prov) {
  json persistent = json::array();
  for (const auto& c : rep.persistent)
    persistent.push_back(json{{"re", c.lambda.real()},
                              {"im", c.lambda.imag()},
                              {"displacement", c.displacement}});
  return dump(wrap("eigen_scan",
                   json{{"tag", to_string(rep.tag)},
                        {"coupling", rep.coupling},
                        {"tol_match", rep.tol_match},
                        {"imag_cut", rep.imag_cut}},
                   json{{"L", rep.L},
                        {"N_coarse", rep.N_coarse},
                        {"N_fine", rep.N_fine}},
                   json{{"eigs_coarse", complex_list(rep.eigs_coarse)},
                        {"eigs_fine", complex_list(rep.eigs_fine)},
                        {"displacement", rep.displacement},
                        {"persistent", std::move(persistent)},
                        {"max_abs_imag_coarse", rep.max_abs_imag_coarse}},
                   prov));
}

std::string to_json_string(const PseudospectrumReport& rep,
                           const Provenance& prov) {
  return dump(wrap("pseudospectrum",
                   json{{"tag", to_string(rep.tag)},
                        {"coupling", rep.coupling},
                        {"nx", rep.nx},
                        {"ny", rep.ny},
                        {"box", json{{"re_min", rep.box.re_min},
                                     {"re_max", rep.box.re_max},
                                     {"im_min", rep.box.im_min},
                                     {"im_max", rep.box.im_max}}}},
                   json{{"L", rep.L}, {"N", rep.N}},
                   json{{"re_z", rep.re},
                        {"im_z", rep.im},
                        {"sigma_min", rep.sigma_min},
                        {"min_sigma", rep.min_sigma}},
                   prov));
}

std::string to_json_string(const EvansSweepReport& rep, const Provenance& prov) {
  json re = json::array(), im = json::array(), ere = json::array(),
       eim = json::array(), nplus = json::array();
  for (const auto& s : rep.samples) {
    re.push_back(s.lambda.real());
    im.push_back(s.lambda.imag());
    ere.push_back(s.E.real());
    eim.push_back(s.E.imag());
    nplus.push_back(s.n_plus);
  }
  return dump(wrap("evans_sweep",
                   json{{"tag", to_string(rep.tag)},
                        {"coupling", rep.coupling},
                        {"nx", rep.nx},
                        {"ny", rep.ny},
                        {"L_ode", rep.L_ode},
                        {"tol", rep.tol},
                        {"box", json{{"re_min", rep.box.re_min},
                                     {"re_max", rep.box.re_max},
                                     {"im_min", rep.box.im_min},
                                     {"im_max", rep.box.im_max}}}},
                   json::object(),
                   json{{"lambda_re", std::move(re)},
                        {"lambda_im", std::move(im)},
                        {"E_re", std::move(ere)},
                        {"E_im", std::move(eim)},
                        {"n_plus", std::move(nplus)},
                        {"min_abs_E", rep.min_abs_E},
                        {"winding", rep.winding},
                        {"boundary_points", rep.boundary_points},
                        {"max_cr_residual", rep.max_cr_residual}},
                   prov));
}

std::string to_json_string(const Trajectory& traj, const Provenance& prov) {
  json snaps = json::array();
  for (size_t i = 0; i < traj.states.size(); ++i) {
    snaps.push_back(json{{"t", traj.times[i]},
                         {"values", complex_list(traj.states[i].values)}});
  }
  std::vector<double> t_ds, n_ds;
  const size_t stride = std::max<size_t>(1, traj.norms.size() / 2048);
  for (size_t i = 0; i < traj.norms.size(); i += stride) {
    t_ds.push_back(traj.step_times[i]);
    n_ds.push_back(traj.norms[i]);
  }
  return dump(wrap(
      "evolve",
      json{{"generator", to_string(traj.config.generator)},
           {"T", traj.config.T},
           {"dt", traj.config.dt},
           {"scheme", to_string(traj.config.scheme)},
           {"record_every", traj.config.record_every},
           {"coupling", traj.config.coupling}},
      json{{"L", traj.states.empty() ? 0.0 : traj.states.front().grid.L()},
           {"N", traj.states.empty() ? 0 : traj.states.front().grid.N()}},
      json{{"snapshots", std::move(snaps)},
           {"t", t_ds},
           {"norm", n_ds},
           {"resolution_warning", traj.resolution_warning},
           {"crude_bound_margin", traj.crude_bound_margin}},
      prov));
}

std::filesystem::path write_report(const std::string& json_text,
                                   const std::filesystem::path& outdir,
                                   const std::string& experiment) {
  std::filesystem::create_directories(outdir);
  const std::string stamp = current_utc_timestamp();
  std::filesystem::path path = outdir / (experiment + "-" + stamp + ".json");
  for (int counter = 1; std::filesystem::exists(path); ++counter)
    path = outdir /
           (experiment + "-" + stamp + "-" + std::to_string(counter) + ".json");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << json_text;
  return path;
}

namespace {

std::filesystem::path unique_csv_path(const std::filesystem::path& outdir,
                                      const std::string& base) {
  std::filesystem::path path = outdir / (base + ".csv");
  for (int counter = 1; std::filesystem::exists(path); ++counter)
    path = outdir / (base + "-" + std::to_string(counter) + ".csv");
  return path;
}

std::filesystem::path write_csv(const std::filesystem::path& outdir,
                                const std::string& base,
                                const std::string& header,
                                const std::vector<std::vector<double>>& cols) {
  std::filesystem::create_directories(outdir);
  const auto path = unique_csv_path(outdir, base);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << header << "\n";
  out.precision(17);
  const size_t rows = cols.empty() ? 0 : cols.front().size();
  for (size_t r = 0; r < rows; ++r) {
    for (size_t c = 0; c < cols.size(); ++c)
      out << (c ? "," : "") << cols[c][r];
    out << "\n";
  }
  return path;
}

const json& need(const json& j, const std::string& key,
                 const std::string& path) {
  if (!j.contains(key))
    throw std::runtime_error("emit_plotdata: missing field " + path + "/" + key);
  return j.at(key);
}

std::vector<double> doubles(const json& j, const std::string& path) {
  if (!j.is_array())
    throw std::runtime_error("emit_plotdata: " + path + " is not an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) out.push_back(v.get<double>());
  return out;
}

}  // namespace

std::filesystem::path write_pseudospectrum_csv(
    const PseudospectrumReport& rep, const std::filesystem::path& outdir,
    const std::string& experiment) {
  return write_csv(outdir, experiment, "re_z,im_z,sigma_min",
                   {rep.re, rep.im, rep.sigma_min});
}

std::vector<std::filesystem::path> emit_plotdata(
    const std::filesystem::path& report_json,
    const std::filesystem::path& outdir) {
  std::ifstream in(report_json, std::ios::binary);
  if (!in)
    throw std::runtime_error("emit_plotdata: cannot read " +
                             report_json.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("emit_plotdata: invalid JSON: " +
                             std::string(e.what()));
  }
  const std::string name = need(j, "name", "").get<std::string>();
  const json& res = need(j, "results", "");
  const std::string stem = report_json.stem().string();

  std::vector<std::filesystem::path> written;
  if (name == "stability") {
    for (const auto& s : need(res, "seeds", "results")) {
      const std::string id = need(s, "id", "results/seeds").get<std::string>();
      written.push_back(write_csv(
          outdir, stem + "-" + id, "t,ratio",
          {doubles(need(s, "t", "seeds"), "t"),
           doubles(need(s, "ratio", "seeds"), "ratio")}));
    }
  } else if (name == "smoothing" || name == "free_smoothing") {
    written.push_back(
        write_csv(outdir, stem, "t,S",
                  {doubles(need(res, "t", "results"), "results/t"),
                   doubles(need(res, "S", "results"), "results/S")}));
  } else if (name == "decay_fit") {
    const auto t_all = doubles(need(res, "t", "results"), "results/t");
    const auto y_all = doubles(need(res, "norm", "results"), "results/norm");
    const double q = need(res, "fitted_power", "results").get<double>();
    const double r = need(res, "fitted_rate", "results").get<double>();
    std::vector<double> t, logy, fit;  // fit curve defined for t > 0 only
    for (size_t i = 0; i < y_all.size(); ++i) {
      if (!(t_all[i] > 0.0) || !(y_all[i] > 0.0)) continue;
      t.push_back(t_all[i]);
      logy.push_back(std::log(y_all[i]));
      fit.push_back(-q * std::log(t_all[i]) - r * t_all[i]);
    }
    written.push_back(
        write_csv(outdir, stem, "t,log_norm,fit", {t, logy, fit}));
  } else if (name == "wave_operator" || name == "inverse_wave") {
    written.push_back(write_csv(
        outdir, stem + "-integrand", "t,integrand",
        {doubles(need(res, "integrand_t", "results"), "integrand_t"),
         doubles(need(res, "integrand", "results"), "integrand")}));
    const auto cp = doubles(need(res, "checkpoints", "results"), "checkpoints");
    const auto inc = doubles(need(res, "increments", "results"), "increments");
    written.push_back(write_csv(outdir, stem + "-increments", "t,increment",
                                {std::vector<double>(cp.begin() + 1, cp.end()),
                                 inc}));
  } else if (name == "pseudospectrum") {
    written.push_back(write_csv(
        outdir, stem, "re_z,im_z,sigma_min",
        {doubles(need(res, "re_z", "results"), "re_z"),
         doubles(need(res, "im_z", "results"), "im_z"),
         doubles(need(res, "sigma_min", "results"), "sigma_min")}));
  } else if (name == "evans_sweep") {
    const auto re = doubles(need(res, "lambda_re", "results"), "lambda_re");
    const auto im = doubles(need(res, "lambda_im", "results"), "lambda_im");
    const auto er = doubles(need(res, "E_re", "results"), "E_re");
    const auto ei = doubles(need(res, "E_im", "results"), "E_im");
    std::vector<double> mag(er.size());
    for (size_t i = 0; i < er.size(); ++i) mag[i] = std::hypot(er[i], ei[i]);
    written.push_back(write_csv(outdir, stem, "re_lambda,im_lambda,abs_E",
                                {re, im, mag}));
  } else if (name == "eigen_scan") {
    for (const char* which : {"eigs_coarse", "eigs_fine"}) {
      const json& e = need(res, which, "results");
      written.push_back(write_csv(outdir, stem + "-" + which, "re,im",
                                  {doubles(need(e, "re", which), "re"),
                                   doubles(need(e, "im", which), "im")}));
    }
  } else if (name == "evolve") {
    written.push_back(
        write_csv(outdir, stem + "-norm", "t,norm",
                  {doubles(need(res, "t", "results"), "results/t"),
                   doubles(need(res, "norm", "results"), "results/norm")}));
  } else {
    throw std::runtime_error("emit_plotdata: unknown report name '" + name +
                             "'");
  }
  return written;
}

}  // namespace lkdv
