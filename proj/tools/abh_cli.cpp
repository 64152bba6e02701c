// abh: tabulates decoherence, characteristics and correlation data.
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "abh/characteristics.hpp"
#include "abh/correlations.hpp"
#include "abh/decoherence.hpp"
#include "abh/environment.hpp"
#include "abh/langevin.hpp"
#include "abh/output.hpp"
#include "abh/params.hpp"
#include "abh/profile.hpp"

namespace {

using namespace abh;

struct Common {
  std::string config_path;
  std::string output = "-";
  std::string format = "csv";
};

struct LineFlags {
  double a = 1.0, v_min = 0.9, v_max = 1.1, tau = 1.0;
  LineProfile make() const { return LineProfile(v_min, v_max, a, tau); }
};

void add_line_flags(CLI::App* app, LineFlags& f) {
  app->add_option("--a", f.a, "Half-width of the transition region")->capture_default_str();
  app->add_option("--v-min", f.v_min, "Inner velocity")->capture_default_str();
  app->add_option("--v-max", f.v_max, "Outer velocity")->capture_default_str();
  app->add_option("--tau", f.tau, "Collapse time")->capture_default_str();
}

std::vector<double> spaced(double from, double to, int points, bool log) {
  if (points < 1) throw ConfigError("--points must be >= 1");
  if (log && !(from > 0 && to > 0)) throw ConfigError("log spacing needs positive bounds");
  std::vector<double> out(points);
  for (int i = 0; i < points; ++i) {
    const double s = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    out[i] = log ? std::exp(std::log(from) + s * (std::log(to) - std::log(from))) : from + s * (to - from);
  }
  out.front() = from;
  if (points > 1) out.back() = to;
  return out;
}

double parse_beta(const std::string& text) {
  if (text == "inf" || text == "+inf" || text == "infinity") return kInfiniteBeta;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("--beta expects a positive number or 'inf'");
  }
  if (used != text.size() || !(v > 0) || std::isinf(v)) {
    throw ConfigError("--beta expects a positive number or 'inf'");
  }
  return v;
}

struct Context {
  KeyValueDoc doc;
  PhysicalConfig config;
  DerivedParams derived;
};

Context load(const Common& c) {
  std::string path = c.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv("ABH_CONFIG")) path = env;
  }
  Context ctx;
  ctx.doc = path.empty() ? KeyValueDoc::parse(default_config_text()) : KeyValueDoc::from_file(path);
  ctx.config = config_from_doc(ctx.doc);
  ctx.derived = derive(ctx.config);
  return ctx;
}

void emit(const Common& c, const Manifest& m, const Table& t) {
  const auto text = render(m, t, parse_output_format(c.format));
  if (c.output == "-") {
    std::cout << text;
  } else {
    write_atomic(c.output, text);
  }
}

Manifest manifest_for(const std::string& command, const Context& ctx, const std::vector<std::string>& args) {
  Manifest m;
  m.command = command;
  m.config_hash = config_hash(ctx.doc);
  std::string joined;
  for (const auto& a : args) joined += (joined.empty() ? "" : " ") + a;
  m.extra.emplace_back("args", joined);
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acoustic black hole open-system toolkit"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  Common common;
  app.add_option("--config", common.config_path, "Key-value config file (default: $ABH_CONFIG or built-in)");
  app.add_option("--output,-o", common.output, "Output path, '-' for stdout")->capture_default_str();
  app.add_option("--format", common.format, "csv or json")->capture_default_str();

  // tdec-sweep
  auto* sweep = app.add_subcommand("tdec-sweep", "Decoherence-time band over an axis");
  std::string axis = "gamma";
  double from = 1e-8, to = 1e-5;
  int points = 50;
  bool linear = false, full_v = false;
  std::string branch = "u";
  SweepOptions sweep_opts;
  sweep->add_option("--axis", axis, "gamma, v_min or temperature")->capture_default_str();
  sweep->add_option("--from", from)->capture_default_str();
  sweep->add_option("--to", to)->capture_default_str();
  sweep->add_option("--points", points)->capture_default_str();
  sweep->add_flag("--linear", linear, "Linear spacing (default logarithmic on the gamma axis)");
  sweep->add_option("--gamma", sweep_opts.gamma, "Fixed gamma off the gamma axis")->capture_default_str();
  sweep->add_option("--temperature", sweep_opts.temperature, "Fixed bath temperature")->capture_default_str();
  sweep->add_option("--epsilon", sweep_opts.epsilon, "x_v exclusion half-width (0: ion spacing)");
  sweep->add_flag("--full-v", full_v, "Include the anomalous V2 term in the spatial factor");
  sweep->add_option("--branch", branch, "u or v")->capture_default_str();

  // diffusion
  auto* diff = app.add_subcommand("diffusion", "Diffusion coefficients versus time");
  double omega = 10.0, t_from = 1e-3, t_to = 10.0;
  int t_points = 50;
  std::string method = "exact";
  std::optional<double> gamma_override, cutoff_override, temp_override;
  diff->add_option("--omega", omega)->capture_default_str();
  diff->add_option("--t-from", t_from)->capture_default_str();
  diff->add_option("--t-to", t_to)->capture_default_str();
  diff->add_option("--points", t_points)->capture_default_str();
  diff->add_option("--method", method, "exact, asymptotic, thermal or oracle")->capture_default_str();
  diff->add_option("--gamma", gamma_override, "Noise parameter (overrides config)");
  diff->add_option("--cutoff", cutoff_override, "Cutoff frequency (overrides config)");
  diff->add_option("--temperature", temp_override, "Bath temperature (overrides config)");

  // vcoef
  auto* vcoef = app.add_subcommand("vcoef", "V1/V2 spatial coefficients over allowed frequencies");
  std::optional<double> vc_omega_max, vc_epsilon;
  vcoef->add_option("--omega-max", vc_omega_max, "Upper frequency (default N/T)");
  vcoef->add_option("--epsilon", vc_epsilon, "x_v exclusion half-width (default ion spacing)");

  // correlation
  auto* corr = app.add_subcommand("correlation", "Two-point function of the left-moving momentum");
  LineFlags corr_line;
  double corr_t = 100.0, x1 = -4.0, x2_from = 1.01, x2_to = 15.0;
  int corr_points = 281;
  std::string beta_text = "inf", corr_method = "closed", convention = "symmetric";
  add_line_flags(corr, corr_line);
  corr->add_option("--t", corr_t)->capture_default_str();
  corr->add_option("--x1", x1)->capture_default_str();
  corr->add_option("--x2-from", x2_from)->capture_default_str();
  corr->add_option("--x2-to", x2_to)->capture_default_str();
  corr->add_option("--points", corr_points)->capture_default_str();
  corr->add_option("--beta", beta_text, "Inverse temperature or 'inf'")->capture_default_str();
  corr->add_option("--method", corr_method, "closed, oracle or homogeneous")->capture_default_str();
  corr->add_option("--convention", convention, "symmetric or verbatim")->capture_default_str();

  // boundary
  auto* bound = app.add_subcommand("boundary", "Entanglement-region boundary x-(t), x+(t)");
  LineFlags bound_line;
  double t_max = 200.0;
  int bound_points = 201;
  add_line_flags(bound, bound_line);
  bound->add_option("--t-max", t_max)->capture_default_str();
  bound->add_option("--points", bound_points)->capture_default_str();

  // er
  auto* er = app.add_subcommand("er", "Open-system relative correction per mode");
  LineFlags er_line;
  std::vector<double> ks{0.01, 0.05, 0.1, 0.2};
  double er_t_max = 10.0, lambda = 1e-7, er_temp_th = 100.0;
  int er_points = 51;
  std::string reading = "symmetric";
  add_line_flags(er, er_line);
  er->add_option("--k", ks, "Wavenumbers")->capture_default_str();
  er->add_option("--t-max", er_t_max)->capture_default_str();
  er->add_option("--points", er_points)->capture_default_str();
  er->add_option("--lambda", lambda)->capture_default_str();
  er->add_option("--temperature-th", er_temp_th, "Bath temperature in units of T_H")->capture_default_str();
  er->add_option("--reading", reading, "symmetric or literal")->capture_default_str();

  // langevin
  auto* lang = app.add_subcommand("langevin", "Monte-Carlo lattice correlation");
  LineFlags lang_line;
  lang_line.tau = 0.025;
  EnsembleConfig ens;
  double lang_t = 30.0, lang_x1 = -2.4, lang_temp_th = 0.0, lang_lambda = 0.0;
  std::optional<double> lang_x2_from, lang_x2_to;
  add_line_flags(lang, lang_line);
  lang->add_option("--seed", ens.seed)->capture_default_str();
  lang->add_option("--realizations", ens.realizations)->capture_default_str();
  lang->add_option("--batches", ens.batches)->capture_default_str();
  lang->add_option("--sites", ens.sites)->capture_default_str();
  lang->add_option("--length", ens.length)->capture_default_str();
  lang->add_option("--dt", ens.dt)->capture_default_str();
  lang->add_option("--cutoff-k", ens.cutoff_k)->capture_default_str();
  lang->add_option("--t", lang_t)->capture_default_str();
  lang->add_option("--x1", lang_x1)->capture_default_str();
  lang->add_option("--x2-from", lang_x2_from, "Default a");
  lang->add_option("--x2-to", lang_x2_to, "Default x+(t)");
  lang->add_option("--temperature-th", lang_temp_th, "Initial temperature in units of T_H")->capture_default_str();
  lang->add_option("--lambda", lang_lambda, "Effective coupling")->capture_default_str();
  ens.length = 12.8;
  ens.dt = 0.005;
  ens.realizations = 10000;
  ens.cutoff_k = 10.0;

  // hawking
  auto* hawk = app.add_subcommand("hawking", "Hawking temperature at each sonic point");
  LineFlags hawk_line;
  add_line_flags(hawk, hawk_line);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << render_error(ErrorKind::config, e.what());
    return static_cast<int>(ErrorKind::config);
  }

  const std::vector<std::string> args(argv + 1, argv + argc);
  try {
    const Context ctx = load(common);
    Table table;

    if (*sweep) {
      const auto ax = parse_sweep_axis(axis);
      if (branch != "u" && branch != "v") throw ConfigError("--branch must be u or v");
      sweep_opts.branch = branch == "u" ? NullBranch::u : NullBranch::v;
      sweep_opts.full_v = full_v;
      const bool log = ax == SweepAxis::gamma && !linear;
      const auto rows = sweep_decoherence(ax, spaced(from, to, points, log), ctx.config, sweep_opts);
      table.columns = {"axis", "t_d_min", "t_d_max", "omega_min", "omega_max", "status"};
      for (const auto& r : rows) {
        table.rows.push_back({r.axis_value, r.t_d_min, r.t_d_max, r.omega_min, r.omega_max,
                              r.error.empty() ? std::string("ok") : r.error});
      }
      auto m = manifest_for("tdec-sweep", ctx, args);
      m.extra.emplace_back("axis", to_string(ax));
      emit(common, m, table);
    } else if (*diff) {
      KeyValueDoc doc = ctx.doc;
      EnvironmentSpec env = environment_from_doc(doc, ctx.config, ctx.derived);
      if (gamma_override) env.coupling_eff = effective_coupling(*gamma_override, ctx.config, ctx.derived);
      if (cutoff_override) env.cutoff = *cutoff_override;
      if (temp_override) env.bath_temperature = *temp_override;
      validate(env);
      DiffusionMethod dm;
      if (method == "exact") dm = DiffusionMethod::exact;
      else if (method == "asymptotic") dm = DiffusionMethod::asymptotic;
      else if (method == "thermal") dm = DiffusionMethod::thermal_expansion;
      else if (method == "oracle") dm = DiffusionMethod::quadrature_oracle;
      else throw ConfigError("unknown --method '" + method + "'");
      table.columns = {"t", "normal", "anomalous"};
      for (double t : spaced(t_from, t_to, t_points, t_from > 0)) {
        const auto r = diffusion(t, omega, env, dm, ctx.derived.tau);
        table.rows.push_back({t, r.normal, r.anomalous});
      }
      auto m = manifest_for("diffusion", ctx, args);
      m.extra.emplace_back("method", to_string(dm));
      if (auto w = cutoff_closure_warning(env, ctx.derived)) m.extra.emplace_back("warning", *w);
      emit(common, m, table);
    } else if (*vcoef) {
      const RingProfile ring(ctx.config);
      const auto snap = ring.snapshot(RingProfile::kLate);
      const auto tables = make_null_tables(snap, vc_epsilon.value_or(ctx.derived.delta));
      table.columns = {"omega", "v1_u", "v2_u", "v1_v", "v2_v"};
      for (double w : allowed_frequencies(tables.u, vc_omega_max.value_or(ctx.derived.omega_max))) {
        const auto vc = v_coefficients(tables, snap, w);
        table.rows.push_back({w, vc.v1_u, vc.v2_u, vc.v1_v, vc.v2_v});
      }
      emit(common, manifest_for("vcoef", ctx, args), table);
    } else if (*corr) {
      const auto p = corr_line.make();
      const double beta = parse_beta(beta_text);
      MatchConvention mc;
      if (convention == "symmetric") mc = MatchConvention::symmetric;
      else if (convention == "verbatim") mc = MatchConvention::verbatim;
      else throw ConfigError("unknown --convention '" + convention + "'");
      CorrelationMethod cm;
      if (corr_method == "closed") cm = CorrelationMethod::closed_form;
      else if (corr_method == "oracle") cm = CorrelationMethod::mode_sum_oracle;
      else if (corr_method == "homogeneous") cm = CorrelationMethod::homogeneous;
      else throw ConfigError("unknown --method '" + corr_method + "'");
      const auto grid = correlation_grid(x1, spaced(x2_from, x2_to, corr_points, false), corr_t, beta, p, cm, mc);
      table.columns = {"x2", "value"};
      for (const auto& s : grid.samples) table.rows.push_back({s.x2, s.value});
      auto m = manifest_for("correlation", ctx, args);
      m.extra.emplace_back("method", to_string(cm));
      if (grid.samples.size() >= 16) {
        const auto peak = detect_peak(grid);
        m.extra.emplace_back("peak_present", peak.present ? "true" : "false");
        m.extra.emplace_back("peak_location", format_number(peak.location));
        m.extra.emplace_back("peak_contrast", format_number(peak.contrast));
      }
      emit(common, m, table);
    } else if (*bound) {
      const auto p = bound_line.make();
      table.columns = {"t", "x_minus", "x_plus"};
      for (double t : spaced(0.0, t_max, bound_points, false)) {
        const auto [lo, hi] = entanglement_boundary(t, p);
        table.rows.push_back({t, lo, hi});
      }
      emit(common, manifest_for("boundary", ctx, args), table);
    } else if (*er) {
      const auto p = er_line.make();
      CrossTermReading rd;
      if (reading == "symmetric") rd = CrossTermReading::symmetric;
      else if (reading == "literal") rd = CrossTermReading::literal;
      else throw ConfigError("unknown --reading '" + reading + "'");
      const double t0 = er_temp_th * hawking_temperature_line(p.v_max(), p.v_min(), p.a());
      table.columns = {"t", "k", "e_r", "overlap"};
      std::optional<std::string> warning;
      for (double k : ks) {
        for (double t : spaced(0.0, er_t_max, er_points, false)) {
          const auto r = open_correction_er(k, t, lambda, t0, p, rd);
          if (r.warning && !warning) warning = r.warning;
          table.rows.push_back({t, k, r.e_r, r.overlap});
        }
      }
      auto m = manifest_for("er", ctx, args);
      if (warning) m.extra.emplace_back("warning", *warning);
      emit(common, m, table);
    } else if (*lang) {
      const auto p = lang_line.make();
      EnvironmentSpec env;
      env.coupling_eff = lang_lambda;
      env.cutoff = 1.0 / p.tau();
      const double t_h = hawking_temperature_line(p.v_max(), p.v_min(), p.a());
      const double lo = lang_x2_from.value_or(p.a());
      const double hi = lang_x2_to.value_or(entanglement_boundary(lang_t, p).second);
      const auto res = estimate_correlation(ens, lang_x1, lo, hi, lang_t, lang_temp_th * t_h, p, env);
      table.columns = {"x2", "value", "std_error"};
      for (const auto& s : res.grid.samples) table.rows.push_back({s.x2, s.value, s.std_error});
      auto m = manifest_for("langevin", ctx, args);
      m.seed = ens.seed;
      m.extra.emplace_back("realizations", std::to_string(res.realizations));
      m.extra.emplace_back("x1_site", format_number(res.x1_site));
      m.extra.emplace_back("peak_location", format_number(res.peak_location));
      m.extra.emplace_back("peak_stat_error", format_number(res.peak_stat_error));
      m.extra.emplace_back("discretization_error", format_number(res.discretization_error));
      m.extra.emplace_back("closed_form_peak", format_number(mirrored_peak_position(res.x1_site, lang_t, p)));
      m.extra.emplace_back("numerics", "artifact convention: RK4 transport, upwind-biased differences");
      emit(common, m, table);
    } else if (*hawk) {
      table.columns = {"profile", "position", "temperature"};
      const RingProfile ring(ctx.config);
      const auto horizons = ring.horizons(RingProfile::kLate);
      const auto temps = hawking_temperature_ring(ring);
      for (std::size_t i = 0; i < horizons.size(); ++i) {
        table.rows.push_back({std::string("ring"), horizons[i], temps[i]});
      }
      const auto p = hawk_line.make();
      table.rows.push_back({std::string("line"), 0.0, hawking_temperature_line(p.v_max(), p.v_min(), p.a())});
      emit(common, manifest_for("hawking", ctx, args), table);
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << render_error(e.kind(), e.what());
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    std::cerr << render_error(ErrorKind::numeric, e.what());
    return static_cast<int>(ErrorKind::numeric);
  }
}
