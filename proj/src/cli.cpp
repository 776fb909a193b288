#include "semisparse/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>

#include "semisparse/errors.hpp"
#include "semisparse/imageio.hpp"
#include "semisparse/metrics.hpp"
#include "semisparse/pipelines.hpp"
#include "semisparse/priors.hpp"
#include "semisparse/solver.hpp"
#include "semisparse/synth.hpp"

namespace semisparse {

namespace {

using nlohmann::json;

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// All flag values for one invocation, before resolution. The option map
// remembers which flags were given explicitly so a --config file can fill
// in only the rest.
struct Invocation {
  std::string input;
  std::string output;
  std::string config_path;
  int verbosity = 0;

  double lambda = 0.02;
  double alpha = 0.1;
  double kappa = 1.2;
  double tau = 0.95;
  double beta0 = -1.0;
  double beta_max = 1e5;
  int order = 2;
  std::string grouping = "pixel";
  int pad = -1;
  int max_iter = 100;
  bool cross_terms = false;       // config-file key only
  bool scalar_laplacian = false;  // config-file key only

  bool log_domain = true;
  double boost = 3.5;
  std::string levels;  // inline JSON array or a path to one
  double target_range = 2.5;
  double saturation = 0.6;
  double dog_sigma = 1.0;
  double dog_k = 1.6;
  double edge_tau = 0.02;
  bool soft_threshold = false;  // config-file key only
  std::string mode;             // stylize: pen|color_pencil; synth: signal|ramp
  double epsilon = 1e-3;
  int bins = 64;
  int crop = -1;  // metrics crop; < 0 means 12 for images, 0 for signals
  double sigma = -1.0;  // synth noise level; < 0 means per-kind default
  uint64_t seed = 1;
  bool png16 = false;           // config-file key only
  bool srgb_linear = false;     // config-file key only

  // A flag name can live on several subcommands; only the active one
  // will have been counted.
  std::map<std::string, std::vector<CLI::Option*>> options;

  void track(const std::string& name, CLI::Option* opt) { options[name].push_back(opt); }

  bool given(const std::string& name) const {
    const auto it = options.find(name);
    if (it == options.end()) return false;
    for (const auto* opt : it->second)
      if (opt->count() > 0) return true;
    return false;
  }
};

void add_solver_flags(CLI::App* cmd, Invocation& inv) {
  inv.track("lambda", cmd->add_option("--lambda", inv.lambda, "sparsity weight (>= 0)"));
  inv.track("alpha", cmd->add_option("--alpha", inv.alpha, "lower-order quadratic weight"));
  inv.track("kappa", cmd->add_option("--kappa", inv.kappa, "coupling growth factor (> 1)"));
  inv.track("tau", cmd->add_option("--tau", inv.tau, "alpha decay factor in [0,1)"));
  inv.track("beta0", cmd->add_option("--beta0", inv.beta0, "initial coupling weight"));
  inv.track("beta_max", cmd->add_option("--beta-max", inv.beta_max, "terminal coupling bound"));
  inv.track("order", cmd->add_option("--order", inv.order, "highest difference order (1..3)"));
  inv.track("grouping",
            cmd->add_option("--grouping", inv.grouping, "threshold grouping: pixel|component")
                ->check(CLI::IsMember({"pixel", "component"})));
  inv.track("pad", cmd->add_option("--pad", inv.pad, "mirror margin in samples"));
  inv.track("max_iter", cmd->add_option("--max-iter", inv.max_iter, "iteration safeguard"));
}

void add_common_flags(CLI::App* cmd, Invocation& inv) {
  inv.track("config",
            cmd->add_option("--config", inv.config_path, "JSON file with defaults for unset flags"));
  cmd->add_flag("-v", inv.verbosity, "increase verbosity");
}

SolverConfig solver_config(const Invocation& inv) {
  SolverConfig cfg;
  cfg.lambda = inv.lambda;
  cfg.alpha = inv.alpha;
  cfg.kappa = inv.kappa;
  cfg.tau = inv.tau;
  cfg.beta0 = inv.beta0;
  cfg.beta_max = inv.beta_max;
  cfg.order = inv.order;
  cfg.grouping = (inv.grouping == "component") ? Grouping::PerComponent : Grouping::PerPixel;
  cfg.pad = inv.pad;
  cfg.max_iter = inv.max_iter;
  cfg.cross_terms = inv.cross_terms;
  cfg.scalar_laplacian = inv.scalar_laplacian;
  return cfg;
}

// --config merge: values apply only where the flag was not set explicitly.
void apply_config_file(Invocation& inv) {
  if (inv.config_path.empty()) return;
  std::ifstream in(inv.config_path);
  if (!in) throw IoError("cannot open config file " + inv.config_path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config file " + inv.config_path + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");

  auto want = [&](const char* key) { return j.contains(key) && !inv.given(key); };
  try {
    if (want("lambda")) inv.lambda = j["lambda"].get<double>();
    if (want("alpha")) inv.alpha = j["alpha"].get<double>();
    if (want("kappa")) inv.kappa = j["kappa"].get<double>();
    if (want("tau")) inv.tau = j["tau"].get<double>();
    if (want("beta0")) inv.beta0 = j["beta0"].get<double>();
    if (want("beta_max")) inv.beta_max = j["beta_max"].get<double>();
    if (want("order")) inv.order = j["order"].get<int>();
    if (want("grouping")) inv.grouping = j["grouping"].get<std::string>();
    if (want("pad")) inv.pad = j["pad"].get<int>();
    if (want("max_iter")) inv.max_iter = j["max_iter"].get<int>();
    if (want("log_domain")) inv.log_domain = j["log_domain"].get<bool>();
    if (want("boost")) inv.boost = j["boost"].get<double>();
    if (want("levels")) inv.levels = j["levels"].dump();
    if (want("target_range")) inv.target_range = j["target_range"].get<double>();
    if (want("saturation")) inv.saturation = j["saturation"].get<double>();
    if (want("dog_sigma")) inv.dog_sigma = j["dog_sigma"].get<double>();
    if (want("dog_k")) inv.dog_k = j["dog_k"].get<double>();
    if (want("edge_tau")) inv.edge_tau = j["edge_tau"].get<double>();
    if (want("mode")) inv.mode = j["mode"].get<std::string>();
    if (want("epsilon")) inv.epsilon = j["epsilon"].get<double>();
    if (want("bins")) inv.bins = j["bins"].get<int>();
    if (want("crop")) inv.crop = j["crop"].get<int>();
    if (want("sigma")) inv.sigma = j["sigma"].get<double>();
    if (want("seed")) inv.seed = j["seed"].get<uint64_t>();
    // Keys without dedicated flags; settable only through the file.
    if (j.contains("cross_terms")) inv.cross_terms = j["cross_terms"].get<bool>();
    if (j.contains("scalar_laplacian")) inv.scalar_laplacian = j["scalar_laplacian"].get<bool>();
    if (j.contains("soft_threshold")) inv.soft_threshold = j["soft_threshold"].get<bool>();
    if (j.contains("png16")) inv.png16 = j["png16"].get<bool>();
    if (j.contains("srgb_linear")) inv.srgb_linear = j["srgb_linear"].get<bool>();
  } catch (const json::exception& e) {
    throw ConfigError("config file " + inv.config_path + ": " + e.what());
  }
}

void check_grouping(const Invocation& inv) {
  if (inv.grouping != "pixel" && inv.grouping != "component")
    throw ConfigError("grouping must be 'pixel' or 'component'");
}

Field load_input(const Invocation& inv) {
  LoadOptions opt;
  opt.srgb_to_linear = inv.srgb_linear;
  return load_image(inv.input, opt);
}

void save_output(const Field& field, const Invocation& inv) {
  SaveOptions opt;
  opt.png16 = inv.png16;
  opt.linear_to_srgb = inv.srgb_linear;
  opt.clamp = true;  // display formats; raw/csv writers ignore this
  save_image(field, inv.output, opt);
}

void print_trace(const SolverTrace& trace) {
  std::printf("%5s  %12s  %12s  %16s  %10s\n", "iter", "beta", "alpha", "energy", "nnz");
  for (const auto& row : trace.rows)
    std::printf("%5d  %12.6g  %12.6g  %16.10g  %10ld\n", row.iteration, row.beta, row.alpha,
                row.energy, row.nnz);
}

// ---- subcommands ----------------------------------------------------------

int cmd_smooth(const Invocation& inv) {
  const Field in = load_input(inv);
  const auto result = smooth(in, solver_config(inv));
  if (inv.verbosity >= 1) print_trace(result.trace);
  std::printf("iterations=%d\n", result.trace.iterations());
  std::printf("wall_ms=%.3f\n", result.trace.total_millis);
  if (!result.trace.rows.empty()) {
    std::printf("terminal_beta=%s\n", g17(result.trace.rows.back().beta).c_str());
    std::printf("terminal_energy=%s\n", g17(result.trace.rows.back().energy).c_str());
    std::printf("terminal_nnz=%ld\n", result.trace.rows.back().nnz);
  }
  save_output(result.output, inv);
  return 0;
}

int cmd_enhance(const Invocation& inv) {
  const Field in = load_input(inv);
  const Field out = detail_enhance(in, solver_config(inv), inv.boost, inv.log_domain);
  std::printf("boost=%s\n", g17(inv.boost).c_str());
  std::printf("log_domain=%d\n", inv.log_domain ? 1 : 0);
  save_output(out, inv);
  return 0;
}

std::vector<ScaleLevel> parse_levels(const Invocation& inv) {
  const SolverConfig base = solver_config(inv);
  if (inv.levels.empty()) {
    auto levels = default_scale_levels();
    for (auto& level : levels) {
      const double a = level.config.alpha, l = level.config.lambda;
      level.config = base;
      level.config.alpha = a;
      level.config.lambda = l;
    }
    return levels;
  }
  std::string text = inv.levels;
  if (!text.empty() && text[0] != '[') {
    std::ifstream in(text);
    if (!in) throw IoError("cannot open levels file " + text);
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("levels JSON: ") + e.what());
  }
  if (!j.is_array() || j.empty()) throw ConfigError("levels must be a non-empty JSON array");

  std::vector<ScaleLevel> levels;
  for (const auto& entry : j) {
    if (!entry.is_object()) throw ConfigError("each level must be a JSON object");
    ScaleLevel level;
    level.label = entry.value("label", std::string("custom"));
    level.config = base;
    try {
      if (entry.contains("lambda")) level.config.lambda = entry["lambda"].get<double>();
      if (entry.contains("alpha")) level.config.alpha = entry["alpha"].get<double>();
      if (entry.contains("order")) level.config.order = entry["order"].get<int>();
      if (entry.contains("pad")) level.config.pad = entry["pad"].get<int>();
      if (entry.contains("max_iter")) level.config.max_iter = entry["max_iter"].get<int>();
      level.gain = entry.value("gain", 1.0);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("levels JSON: ") + e.what());
    }
    levels.push_back(std::move(level));
  }
  return levels;
}

int cmd_multiscale(const Invocation& inv) {
  const Field in = load_input(inv);
  const auto levels = parse_levels(inv);
  const auto decomposition = multiscale_decompose(in, levels);
  std::vector<double> gains;
  gains.reserve(levels.size());
  for (const auto& level : levels) gains.push_back(level.gain);
  const Field out = multiscale_recombine(decomposition.base, decomposition.details, gains);
  for (size_t i = 0; i < levels.size(); ++i)
    std::printf("level_%zu=%s lambda=%s alpha=%s gain=%s\n", i, levels[i].label.c_str(),
                g17(levels[i].config.lambda).c_str(), g17(levels[i].config.alpha).c_str(),
                g17(levels[i].gain).c_str());
  save_output(out, inv);
  return 0;
}

int cmd_hdr(const Invocation& inv) {
  const Field in = load_input(inv);
  HdrDiagnostics diag;
  const Field out = hdr_compress(in, solver_config(inv), inv.target_range, inv.saturation, &diag);
  std::printf("base_scale=%s\n", g17(diag.scale).c_str());
  std::printf("log_range=%s\n", g17(diag.base.max_value() - diag.base.min_value()).c_str());
  save_output(out, inv);
  return 0;
}

int cmd_stylize(const Invocation& inv) {
  StylizeMode mode = StylizeMode::Pen;
  if (inv.mode == "color_pencil")
    mode = StylizeMode::ColorPencil;
  else if (!inv.mode.empty() && inv.mode != "pen")
    throw ConfigError("stylize mode must be 'pen' or 'color_pencil'");
  const Field in = load_input(inv);
  const Field out = stylize(in, solver_config(inv), inv.dog_sigma, inv.dog_k, inv.edge_tau, mode,
                            inv.soft_threshold);
  save_output(out, inv);
  return 0;
}

int cmd_stats(const Invocation& inv) {
  namespace fs = std::filesystem;
  std::vector<std::string> paths;
  if (fs::is_directory(inv.input)) {
    for (const auto& entry : fs::directory_iterator(inv.input)) {
      if (!entry.is_regular_file()) continue;
      const std::string ext = entry.path().extension().string();
      if (ext == ".png" || ext == ".hdr" || ext == ".ssf") paths.push_back(entry.path().string());
    }
    std::sort(paths.begin(), paths.end());
  } else {
    paths.push_back(inv.input);
  }

  std::vector<Field> corpus;
  int skipped = 0;
  for (const auto& path : paths) {
    try {
      corpus.push_back(load_image(path));
    } catch (const Error& e) {
      ++skipped;
      std::fprintf(stderr, "warning: skipping %s (%s)\n", path.c_str(), e.what());
    }
  }
  if (corpus.empty()) throw IoError("stats: no readable images in " + inv.input);

  const auto report = semisparsity_report(corpus, inv.epsilon, inv.bins);
  std::string hist_path = inv.output;
  const auto dot = hist_path.find_last_of('.');
  hist_path = (dot == std::string::npos) ? hist_path + "_hist.csv"
                                         : hist_path.substr(0, dot) + "_hist" + hist_path.substr(dot);
  {
    std::ofstream out(inv.output);
    if (!out) throw IoError("cannot create " + inv.output);
    out << report_ratios_csv(report);
  }
  {
    std::ofstream out(hist_path);
    if (!out) throw IoError("cannot create " + hist_path);
    out << report_histograms_csv(report);
  }

  std::printf("images_used=%d\n", report.images_used);
  std::printf("images_skipped=%d\n", skipped);
  for (size_t k = 0; k < report.ratios.size(); ++k)
    std::printf("ratio_order%zu=%s\n", k + 1, g17(report.ratios[k]).c_str());
  for (size_t k = 1; k < report.ratios.size(); ++k)
    std::printf("gap_order%zu=%s\n", k + 1, g17(report.gap(static_cast<int>(k))).c_str());
  std::printf("histograms=%s\n", hist_path.c_str());
  return 0;
}

SignalSpec demo_signal_spec(double sigma, uint64_t seed) {
  SignalSpec spec;
  spec.length = 512;
  spec.sigma = sigma;
  spec.seed = seed;
  spec.segments = {
      Segment::constant(60, 0.2),  Segment::spike(41, 0.2, 0.6),
      Segment::constant(59, 0.55), Segment::ramp(160, 0.25, 0.003125),
      Segment::constant(64, 0.75), Segment::spike(41, 0.75, -0.5),
      Segment::constant(87, 0.4),
  };
  return spec;
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return path + suffix;
  return path.substr(0, dot) + suffix + path.substr(dot);
}

int cmd_synth(const Invocation& inv) {
  std::string kind = inv.mode;
  if (kind.empty() || kind == "auto") {
    kind = (format_from_path(inv.output) == ImageFormat::CsvSignal) ? "signal" : "ramp";
  }
  const std::string clean_path = with_suffix(inv.output, "_clean");
  json sidecar;
  Field clean, noisy;

  if (kind == "signal") {
    if (format_from_path(inv.output) != ImageFormat::CsvSignal)
      throw ConfigError("synth signal writes csv_signal files; use a .csv output path");
    const double sigma = inv.sigma < 0 ? 0.03 : inv.sigma;
    const SignalSpec spec = demo_signal_spec(sigma, inv.seed);
    auto pair = gen_signal(spec);
    clean = std::move(pair.clean);
    noisy = std::move(pair.noisy);
    sidecar["kind"] = "signal";
    sidecar["length"] = spec.length;
    sidecar["sigma"] = spec.sigma;
    sidecar["seed"] = spec.seed;
    json segs = json::array();
    for (const auto& seg : spec.segments) {
      json s;
      s["kind"] = seg.kind == Segment::Kind::Constant ? "constant"
                  : seg.kind == Segment::Kind::Ramp   ? "ramp"
                                                      : "spike";
      s["length"] = seg.length;
      s["level"] = seg.level;
      if (seg.kind == Segment::Kind::Ramp) s["slope"] = seg.slope;
      if (seg.kind == Segment::Kind::Spike) s["amplitude"] = seg.amplitude;
      segs.push_back(s);
    }
    sidecar["segments"] = segs;
  } else if (kind == "ramp") {
    if (format_from_path(inv.output) == ImageFormat::CsvSignal)
      throw ConfigError("synth ramp writes 2D fields; use a .ssf or .png output path");
    RampStepsSpec spec;
    if (inv.sigma >= 0) spec.sigma = inv.sigma;
    spec.seed = inv.seed;
    auto image = gen_ramp_steps_image(spec);
    clean = std::move(image.clean);
    noisy = std::move(image.noisy);
    sidecar["kind"] = "ramp_steps";
    sidecar["height"] = spec.height;
    sidecar["width"] = spec.width;
    sidecar["sigma"] = spec.sigma;
    sidecar["seed"] = spec.seed;
    json regions = json::array();
    for (const auto& r : image.constant_regions)
      regions.push_back({{"y0", r.y0}, {"x0", r.x0}, {"height", r.height}, {"width", r.width}});
    sidecar["constant_regions"] = regions;
    sidecar["ramp_region"] = {{"y0", image.ramp_region.y0},
                              {"x0", image.ramp_region.x0},
                              {"height", image.ramp_region.height},
                              {"width", image.ramp_region.width}};
  } else {
    throw ConfigError("synth mode must be 'signal' or 'ramp'");
  }

  SaveOptions opt;
  opt.clamp = true;  // only consulted by display formats
  save_image(noisy, inv.output, opt);
  save_image(clean, clean_path, opt);
  {
    std::ofstream out(inv.output + ".json");
    if (!out) throw IoError("cannot create " + inv.output + ".json");
    out << sidecar.dump(2) << "\n";
  }

  const int crop = inv.crop >= 0 ? inv.crop : (noisy.is_1d() ? 0 : 12);
  std::printf("clean=%s\n", clean_path.c_str());
  std::printf("sidecar=%s.json\n", inv.output.c_str());
  std::printf("psnr_noisy_db=%s\n", g17(psnr(noisy, clean, crop)).c_str());
  std::printf("mae_noisy=%s\n", g17(mae(noisy, clean, crop)).c_str());
  return 0;
}

// ---- verify oracle suites ---------------------------------------------------

StackedField random_stack(const OperatorSpec& spec, int h, int w, int channels, uint64_t seed) {
  StackedField st;
  const int layers = static_cast<int>(spec.components().size());
  for (int l = 0; l < layers; ++l) {
    Field layer = uniform_field(h, w, channels, seed + static_cast<uint64_t>(l) * 7919);
    for (int c = 0; c < channels; ++c) layer.plane(c) -= 0.5;
    st.layers.push_back(std::move(layer));
  }
  return st;
}

bool verify_dense_match(int verbosity, double* worst_out) {
  double worst = 0;
  for (int i = 0; i < 30; ++i) {
    const bool image = i < 15;
    const int h = image ? 16 : 64;
    const int w = image ? 16 : 1;
    const int rank = image ? 2 : 1;
    const int order = 1 + i % 3;
    const bool cross = image && order >= 2 && (i % 5 == 0);
    const bool lap = image && order == 2 && !cross && (i % 7 == 0);

    SolverConfig cfg;
    cfg.order = order;
    cfg.cross_terms = cross;
    cfg.scalar_laplacian = lap;
    cfg.pad = 0;
    const SolverConfig rcfg = cfg.resolved(w == 1);

    const double alpha = (i % 4 == 0) ? 0.0 : 0.05 * (1 + i % 5);
    const double beta = std::pow(10.0, (i % 5) - 2);
    const int channels = (i % 2 == 0) ? 1 : 3;
    const Field f = uniform_field(h, w, channels, 9000 + static_cast<uint64_t>(i));
    const auto spec = OperatorSpec::make(order, rank, cross, lap);
    const StackedField wst = random_stack(spec, h, w, channels, 500 + static_cast<uint64_t>(i));

    SolverWorkspace ws(h, w, rcfg);
    const Field u_fft = u_step(f, wst, alpha, beta, ws);
    const Field u_dense = dense_oracle_solve(f, wst, alpha, beta, cfg);
    const double rel = std::sqrt((u_fft - u_dense).squared_norm() / u_dense.squared_norm());
    worst = std::max(worst, rel);
    if (verbosity >= 2)
      std::printf("  dense case %2d: order=%d cross=%d lap=%d rel=%.3e\n", i, order, cross, lap,
                  rel);
  }
  *worst_out = worst;
  return worst <= 1e-8;
}

bool verify_w_step(long* mismatches_out) {
  long mismatches = 0;
  const double lambda = 0.02, beta = 2.0;

  Field grid(2049, 1, 1);
  for (int i = 0; i < 2049; ++i) grid.at(i, 0, 0) = (i - 1024) * 1e-3;
  const StackedField got = w_step(StackedField({grid}), lambda, beta, Grouping::PerComponent);
  for (int i = 0; i < 2049; ++i) {
    const double du = (i - 1024) * 1e-3;
    const double expect = (du * du >= lambda / beta) ? du : 0.0;
    if (got.layer(0).at(i, 0, 0) != expect) ++mismatches;
  }

  // Exact representable tie: du^2 == lambda/beta with no rounding; must keep.
  Field tie(1, 1, 1);
  tie.at(0, 0, 0) = 0.5;
  const StackedField tie_w = w_step(StackedField({tie}), 0.5, 2.0, Grouping::PerComponent);
  if (tie_w.layer(0).at(0, 0, 0) != 0.5) ++mismatches;
  const StackedField tie_p = w_step(StackedField({tie}), 0.5, 2.0, Grouping::PerPixel);
  if (tie_p.layer(0).at(0, 0, 0) != 0.5) ++mismatches;

  *mismatches_out = mismatches;
  return mismatches == 0;
}

bool verify_support_enum(int verbosity, double* worst_ratio_out) {
  double worst = 0;
  for (int i = 0; i < 5; ++i) {
    SignalSpec sspec;
    sspec.length = 10;
    sspec.segments = {Segment::constant(5, 0.2), Segment::constant(5, 0.7)};
    sspec.sigma = 0.05;
    sspec.seed = 40 + static_cast<uint64_t>(i);
    const auto pair = gen_signal(sspec);

    SolverConfig cfg;
    cfg.lambda = 0.02;
    cfg.order = 1;
    cfg.pad = 0;  // keep solver and oracle on the same periodic domain
    const auto result = smooth(pair.noisy, cfg);
    const auto& last = result.trace.rows.back();
    const auto oracle =
        support_enum_oracle(pair.noisy, cfg.lambda, last.alpha, last.beta, cfg.order);
    const double ratio = last.energy / oracle.energy_value;
    worst = std::max(worst, ratio);
    if (verbosity >= 2)
      std::printf("  support case %d: solver=%.8g oracle=%.8g ratio=%.6f\n", i, last.energy,
                  oracle.energy_value, ratio);
  }
  *worst_ratio_out = worst;
  return worst <= 1.1;
}

int cmd_verify(const Invocation& inv) {
  bool all_ok = true;

  double worst_rel = 0;
  const bool dense_ok = verify_dense_match(inv.verbosity, &worst_rel);
  std::printf("%s dense-solve-match worst_rel=%.3e (bound 1e-8)\n", dense_ok ? "PASS" : "FAIL",
              worst_rel);
  all_ok = all_ok && dense_ok;

  long mismatches = 0;
  const bool w_ok = verify_w_step(&mismatches);
  std::printf("%s hard-threshold-match mismatches=%ld (bound 0)\n", w_ok ? "PASS" : "FAIL",
              mismatches);
  all_ok = all_ok && w_ok;

  double worst_ratio = 0;
  const bool support_ok = verify_support_enum(inv.verbosity, &worst_ratio);
  std::printf("%s support-enum-ratio worst=%.6f (bound 1.1)\n", support_ok ? "PASS" : "FAIL",
              worst_ratio);
  all_ok = all_ok && support_ok;

  return all_ok ? 0 : 3;
}

int dispatch(const std::string& name, const Invocation& inv) {
  if (name == "smooth") return cmd_smooth(inv);
  if (name == "enhance") return cmd_enhance(inv);
  if (name == "multiscale") return cmd_multiscale(inv);
  if (name == "hdr") return cmd_hdr(inv);
  if (name == "stylize") return cmd_stylize(inv);
  if (name == "stats") return cmd_stats(inv);
  if (name == "synth") return cmd_synth(inv);
  if (name == "verify") return cmd_verify(inv);
  throw ConfigError("unknown subcommand " + name);
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"semi-sparse smoothing filters"};
  app.require_subcommand(1);

  Invocation inv;

  auto* smooth_cmd = app.add_subcommand("smooth", "edge-preserving smoothing");
  auto* enhance_cmd = app.add_subcommand("enhance", "base/detail boost");
  auto* multiscale_cmd = app.add_subcommand("multiscale", "multi-level detail manipulation");
  auto* hdr_cmd = app.add_subcommand("hdr", "tone-map a radiance map to display range");
  auto* stylize_cmd = app.add_subcommand("stylize", "line-drawing stylization");
  auto* stats_cmd = app.add_subcommand("stats", "gradient sparsity statistics");
  auto* synth_cmd = app.add_subcommand("synth", "generate test signals/images with ground truth");
  auto* verify_cmd = app.add_subcommand("verify", "run solver oracle self-checks");

  for (auto* cmd : {smooth_cmd, enhance_cmd, multiscale_cmd, hdr_cmd, stylize_cmd}) {
    cmd->add_option("input", inv.input, "input file")->required();
    cmd->add_option("output", inv.output, "output file")->required();
    add_solver_flags(cmd, inv);
    add_common_flags(cmd, inv);
  }
  stats_cmd->add_option("input", inv.input, "image file or directory")->required();
  stats_cmd->add_option("output", inv.output, "ratios CSV path")->required();
  add_common_flags(stats_cmd, inv);
  synth_cmd->add_option("output", inv.output, "noisy output path (.csv or .ssf)")->required();
  add_common_flags(synth_cmd, inv);
  add_common_flags(verify_cmd, inv);

  inv.track("log_domain",
            enhance_cmd->add_option("--log-domain", inv.log_domain, "decompose in log10 intensity"));
  inv.track("boost", enhance_cmd->add_option("--boost", inv.boost, "detail gain"));
  inv.track("levels",
            multiscale_cmd->add_option("--levels", inv.levels, "JSON level list (inline or file)"));
  inv.track("target_range",
            hdr_cmd->add_option("--target-range", inv.target_range, "base contrast in log10 units"));
  inv.track("saturation",
            hdr_cmd->add_option("--saturation", inv.saturation, "color saturation exponent (0,1]"));
  inv.track("dog_sigma", stylize_cmd->add_option("--dog-sigma", inv.dog_sigma, "edge scale"));
  inv.track("dog_k", stylize_cmd->add_option("--dog-k", inv.dog_k, "scale ratio (> 1)"));
  inv.track("edge_tau",
            stylize_cmd->add_option("--edge-tau", inv.edge_tau, "edge response threshold"));
  inv.track("mode", stylize_cmd->add_option("--mode", inv.mode, "pen|color_pencil"));
  inv.track("epsilon",
            stats_cmd->add_option("--epsilon", inv.epsilon, "near-zero threshold (intensity units)"));
  inv.track("bins", stats_cmd->add_option("--bins", inv.bins, "histogram bins"));
  inv.track("mode",
            synth_cmd->add_option("--mode", inv.mode, "signal|ramp (default by extension)"));
  inv.track("seed", synth_cmd->add_option("--seed", inv.seed, "noise seed"));
  inv.track("crop", synth_cmd->add_option("--crop", inv.crop, "metric boundary crop"));

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("semisparse");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    apply_config_file(inv);
    check_grouping(inv);
    const std::string name = app.get_subcommands().front()->get_name();
    return dispatch(name, inv);
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const ShapeError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected error: %s\n", e.what());
    return 3;
  }
}

}  // namespace semisparse
