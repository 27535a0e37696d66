#include "experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>

#include <fmt/format.h>

#include "compress.hpp"
#include "matrix_io.hpp"
#include "moments.hpp"
#include "parallel.hpp"
#include "walk.hpp"

#ifndef LINOPT_BUILD_ID
#define LINOPT_BUILD_ID "unknown"
#endif

namespace linopt {

using nlohmann::json;

TrialError::TrialError(std::size_t trial, const std::string& what)
    : std::runtime_error(fmt::format("trial {}: {}", trial, what)), trial_(trial) {}

std::string build_id() { return LINOPT_BUILD_ID; }

namespace {

struct KindName {
  ExperimentKind kind;
  const char* name;
};

constexpr KindName kKindNames[] = {
    {ExperimentKind::entropy_sweep, "entropy-sweep"},
    {ExperimentKind::uut_heatmap, "uut-heatmap"},
    {ExperimentKind::walk_check, "walk-check"},
    {ExperimentKind::mixing, "mixing"},
    {ExperimentKind::meeting, "meeting"},
    {ExperimentKind::decouple, "decouple"},
    {ExperimentKind::compress_sweep, "compress-sweep"},
    {ExperimentKind::bounds_audit, "bounds-audit"},
};

}  // namespace

std::string to_string(ExperimentKind kind) {
  for (const auto& k : kKindNames) {
    if (k.kind == kind) return k.name;
  }
  return "entropy-sweep";
}

std::optional<ExperimentKind> parse_kind(const std::string& name) {
  for (const auto& k : kKindNames) {
    if (name == k.name) return k.kind;
  }
  return std::nullopt;
}

const std::vector<std::string>& experiment_kind_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& k : kKindNames) out.emplace_back(k.name);
    return out;
  }();
  return names;
}

// ---------------------------------------------------------------- config

namespace {

[[noreturn]] void config_fail(const std::string& path, const std::string& what) {
  throw ConfigError(fmt::format("{}: {}", path, what));
}

std::size_t get_count(const json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    config_fail(path, "expected a nonnegative integer");
  }
  return j.get<std::size_t>();
}

double get_real(const json& j, const std::string& path) {
  if (!j.is_number()) config_fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) config_fail(path, "must be finite");
  return v;
}

std::vector<std::size_t> get_counts(const json& j, const std::string& path) {
  if (!j.is_array()) config_fail(path, "expected an array of integers");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_count(j[i], fmt::format("{}[{}]", path, i)));
  return out;
}

GeometryConfig parse_geometry(const json& j) {
  const std::string path = "config.geometry";
  GeometryConfig g;
  if (j.is_string()) {
    g.kind = j.get<std::string>();
  } else if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      const std::string p = path + "." + key;
      if (key == "kind") {
        if (!value.is_string()) config_fail(p, "expected a string");
        g.kind = value.get<std::string>();
      } else if (key == "m") {
        g.m = get_count(value, p);
      } else if (key == "D" || key == "dim") {
        g.dim = get_count(value, p);
      } else if (key == "order") {
        g.order = get_counts(value, p);
      } else if (key == "layers") {
        if (!value.is_array()) config_fail(p, "expected an array of layers");
        for (std::size_t l = 0; l < value.size(); ++l) {
          const std::string lp = fmt::format("{}[{}]", p, l);
          if (!value[l].is_array()) config_fail(lp, "expected an array of blocks");
          std::vector<std::vector<std::size_t>> layer;
          for (std::size_t b = 0; b < value[l].size(); ++b) {
            layer.push_back(get_counts(value[l][b], fmt::format("{}[{}]", lp, b)));
          }
          g.layers.push_back(std::move(layer));
        }
      } else {
        config_fail(p, "unknown field");
      }
    }
  } else {
    config_fail(path, "expected an object or a kind name");
  }
  if (g.kind != "brickwall" && g.kind != "brickwork" && g.kind != "custom" && g.kind != "octahedral") {
    config_fail(path + ".kind", fmt::format("unknown geometry '{}'", g.kind));
  }
  return g;
}

bool needs_depths(ExperimentKind kind) {
  return kind != ExperimentKind::mixing && kind != ExperimentKind::meeting &&
         kind != ExperimentKind::decouple;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) config_fail("config", "expected a JSON object");
  ExperimentConfig c;
  if (!j.contains("kind")) config_fail("config.kind", "missing");
  if (!j["kind"].is_string()) config_fail("config.kind", "expected a string");
  const auto kind = parse_kind(j["kind"].get<std::string>());
  if (!kind) config_fail("config.kind", fmt::format("unknown kind '{}'", j["kind"].get<std::string>()));
  c.kind = *kind;
  bool has_c_band = false;

  for (const auto& [key, value] : j.items()) {
    const std::string p = "config." + key;
    if (key == "kind") {
      continue;
    } else if (key == "n") {
      c.n = get_count(value, p);
    } else if (key == "depths") {
      c.depths = get_counts(value, p);
    } else if (key == "depth") {
      c.depths = {get_count(value, p)};
    } else if (key == "s") {
      c.s = get_real(value, p);
    } else if (key == "gamma") {
      c.gamma = get_counts(value, p);
    } else if (key == "k") {
      c.k = get_count(value, p);
    } else if (key == "box") {
      c.box = get_counts(value, p);
    } else if (key == "trials") {
      c.trials = get_count(value, p);
    } else if (key == "seed") {
      if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<std::int64_t>() >= 0)) {
        config_fail(p, "expected an unsigned 64-bit integer");
      }
      c.seed = value.get<std::uint64_t>();
    } else if (key == "geometry") {
      c.geometry = parse_geometry(value);
    } else if (key == "kappa") {
      c.kappa = get_real(value, p);
    } else if (key == "c_band") {
      c.c_bands = {get_real(value, p)};
      has_c_band = true;
    } else if (key == "c_bands") {
      if (!value.is_array() || value.empty()) config_fail(p, "expected a nonempty array of numbers");
      c.c_bands.clear();
      for (std::size_t i = 0; i < value.size(); ++i) {
        c.c_bands.push_back(get_real(value[i], fmt::format("{}[{}]", p, i)));
      }
      if (has_c_band) config_fail(p, "give either c_band or c_bands");
    } else if (key == "hs_tolerance") {
      c.hs_tolerance = get_real(value, p);
    } else if (key == "epsilon") {
      c.epsilon = get_real(value, p);
    } else if (key == "epsilon_meet") {
      c.epsilon_meet = get_real(value, p);
    } else if (key == "t_max") {
      c.t_max = get_count(value, p);
    } else if (key == "per_trial") {
      if (!value.is_boolean()) config_fail(p, "expected true or false");
      c.per_trial = value.get<bool>();
    } else if (key == "haar_trials") {
      c.haar_trials = get_count(value, p);
    } else if (key == "start") {
      c.start = get_count(value, p);
    } else {
      config_fail(p, "unknown field");
    }
  }

  if (c.geometry.kind == "brickwork") {
    if (c.geometry.m == 0) config_fail("config.geometry.m", "required for brickwork");
    std::size_t modes = 1;
    for (std::size_t i = 0; i < c.geometry.dim; ++i) modes *= c.geometry.m;
    if (c.n == 0) c.n = modes;
    if (c.n != modes) config_fail("config.n", fmt::format("brickwork has m^D = {} modes", modes));
  } else if (c.geometry.kind == "octahedral") {
    if (c.n == 0) c.n = 6;
    if (c.n != 6) config_fail("config.n", "octahedral geometry has 6 modes");
  }
  if (c.n == 0) config_fail("config.n", "missing or zero");
  if (c.trials < 1) config_fail("config.trials", "must be >= 1");
  if (needs_depths(c.kind) && c.depths.empty()) config_fail("config.depths", "must be nonempty");
  for (std::size_t i = 1; i < c.depths.size(); ++i) {
    if (c.depths[i] <= c.depths[i - 1]) {
      config_fail(fmt::format("config.depths[{}]", i), "depths must be strictly increasing");
    }
  }
  if (!(c.s >= 0.0)) config_fail("config.s", "must be >= 0");
  if (c.k > c.n) config_fail("config.k", fmt::format("must be <= n = {}", c.n));
  for (std::size_t i = 0; i < c.gamma.size(); ++i) {
    if (c.gamma[i] < 1 || c.gamma[i] > c.n) {
      config_fail(fmt::format("config.gamma[{}]", i), fmt::format("mode out of range 1..{}", c.n));
    }
  }
  if (!(c.kappa >= 1.0)) config_fail("config.kappa", "must be >= 1");
  for (std::size_t i = 0; i < c.c_bands.size(); ++i) {
    if (!(c.c_bands[i] > 0.0)) config_fail(fmt::format("config.c_bands[{}]", i), "must be positive");
  }
  if (!(c.hs_tolerance > 0.0)) config_fail("config.hs_tolerance", "must be positive");
  if (c.epsilon && !(*c.epsilon > 0.0 && *c.epsilon < 1.0)) config_fail("config.epsilon", "must lie in (0,1)");
  if (c.epsilon_meet && !(*c.epsilon_meet > 0.0 && *c.epsilon_meet < 1.0)) {
    config_fail("config.epsilon_meet", "must lie in (0,1)");
  }
  if (c.t_max < 1) config_fail("config.t_max", "must be >= 1");
  if (c.start < 1 || c.start > c.n) config_fail("config.start", fmt::format("must lie in 1..{}", c.n));
  if (c.kind == ExperimentKind::compress_sweep) {
    for (std::size_t i = 0; i < c.depths.size(); ++i) {
      if (c.depths[i] < 2) config_fail(fmt::format("config.depths[{}]", i), "compression needs depth >= 2");
    }
  }
  // Geometry and subsystem problems surface here with a field path.
  const GeometrySpec g = build_geometry(c);
  (void)build_subsystem(c, g);
  return c;
}

json ExperimentConfig::to_json() const {
  json g = {{"kind", geometry.kind}};
  if (geometry.kind == "brickwork") {
    g["m"] = geometry.m;
    g["D"] = geometry.dim;
    if (!geometry.order.empty()) g["order"] = geometry.order;
  }
  if (geometry.kind == "custom") g["layers"] = geometry.layers;
  json j = {
      {"kind", to_string(kind)}, {"n", n},           {"depths", depths},
      {"s", s},                  {"trials", trials}, {"seed", seed},
      {"geometry", g},           {"kappa", kappa},   {"c_bands", c_bands},
      {"hs_tolerance", hs_tolerance}, {"t_max", t_max}, {"per_trial", per_trial},
      {"haar_trials", haar_trials},   {"start", start},
  };
  if (!gamma.empty()) j["gamma"] = gamma;
  if (k != 0) j["k"] = k;
  if (!box.empty()) j["box"] = box;
  if (epsilon) j["epsilon"] = *epsilon;
  if (epsilon_meet) j["epsilon_meet"] = *epsilon_meet;
  return j;
}

std::string ExperimentConfig::hash() const { return fnv1a64_hex(to_json().dump()); }

GeometrySpec build_geometry(const ExperimentConfig& c) {
  const GeometryConfig& g = c.geometry;
  try {
    if (g.kind == "brickwall") return brickwall_geometry(c.n);
    if (g.kind == "octahedral") return octahedral_geometry();
    if (g.kind == "brickwork") {
      std::vector<std::size_t> order;
      for (std::size_t slot : g.order) {
        if (slot < 1) throw std::invalid_argument("order slots are 1-based");
        order.push_back(slot - 1);
      }
      return brickwork_d_geometry(g.m, g.dim, order);
    }
    std::vector<Pairing> layers;
    for (const auto& layer : g.layers) layers.push_back(Pairing::from_one_based(c.n, layer));
    return custom_geometry(c.n, std::move(layers));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    config_fail("config.geometry", e.what());
  }
}

Subsystem build_subsystem(const ExperimentConfig& c, const GeometrySpec& geometry) {
  try {
    if (!c.box.empty()) {
      if (geometry.kind != GeometryKind::brickwork && geometry.kind != GeometryKind::brickwall1d) {
        config_fail("config.box", "needs a brickwork geometry");
      }
      const std::size_t dim = geometry.dim;
      if (c.box.size() != dim) config_fail("config.box", fmt::format("expected {} extents", dim));
      std::vector<std::size_t> modes;
      for (std::size_t x = 0; x < geometry.n; ++x) {
        const auto coords = brickwork_coordinates(x, geometry.side, dim);
        bool inside = true;
        for (std::size_t j = 0; j < dim; ++j) inside = inside && coords[j] < c.box[j];
        if (inside) modes.push_back(x + 1);
      }
      if (modes.empty()) config_fail("config.box", "selects no modes");
      return Subsystem::from_one_based(geometry.n, modes);
    }
    if (!c.gamma.empty()) return Subsystem::from_one_based(geometry.n, c.gamma);
    return Subsystem::first_k(geometry.n, c.k != 0 ? c.k : std::max<std::size_t>(1, geometry.n / 2));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    config_fail(c.box.empty() ? (c.gamma.empty() ? "config.k" : "config.gamma") : "config.box", e.what());
  }
}

// ---------------------------------------------------------------- helpers

namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }

class Csv {
 public:
  explicit Csv(const std::string& header) { text_ = header + "\n"; }
  template <class... Args>
  void row(fmt::format_string<Args...> f, Args&&... args) {
    text_ += fmt::format(f, std::forward<Args>(args)...);
    text_ += '\n';
  }
  std::string str() const { return text_; }

 private:
  std::string text_;
};

template <class Fn>
auto guarded_trial(std::size_t trial, Fn&& fn) {
  try {
    return fn();
  } catch (const NumericError& e) {
    throw TrialError(trial, e.what());
  }
}

json nullable(const std::optional<std::size_t>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("loglog_slope: need two or more matching points");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) throw std::invalid_argument("loglog_slope: values must be positive");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

std::vector<double> diagonal_profile(const RealMatrix& values) {
  const auto n = values.rows();
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (Eigen::Index off = 0; off < n; ++off) {
    double acc = 0.0;
    for (Eigen::Index x = 0; x + off < n; ++x) acc += values(x, x + off);
    out[static_cast<std::size_t>(off)] = acc / static_cast<double>(n - off);
  }
  return out;
}

EntropySweep entropy_sweep(const GeometrySpec& geometry, const Subsystem& gamma, double s,
                           const std::vector<std::size_t>& depths, std::size_t trials,
                           RngStream stream, unsigned threads) {
  EntropySweep out;
  out.depths = depths;
  out.values.assign(trials, std::vector<double>(depths.size(), 0.0));
  parallel_for(trials, threads, [&](std::size_t t) {
    guarded_trial(t, [&] {
      CircuitGrower grower(geometry, stream.derive(t));
      for (std::size_t i = 0; i < depths.size(); ++i) {
        grower.advance(depths[i] - grower.depth());
        out.values[t][i] = renyi2_eig(grower.snapshot().u, gamma, s).value;
      }
      return 0;
    });
  });
  out.stats.resize(depths.size());
  for (std::size_t t = 0; t < trials; ++t) {
    for (std::size_t i = 0; i < depths.size(); ++i) out.stats[i].add(out.values[t][i]);
  }
  return out;
}

DecouplingDepth decoupling_depth(const GeometrySpec& geometry, double eps_mix, double eps_meet,
                                 std::size_t t_max) {
  DecouplingDepth best;
  const std::size_t m = geometry.layers_per_step();
  for (const GeometrySpec& g : {geometry, geometry.reversed()}) {
    const auto mix = mixing_time(g, eps_mix, t_max);
    if (!mix) throw NumericError(fmt::format("mixing time not reached within {} steps", t_max));
    const auto meet = meeting_layers_exact(g, eps_meet, t_max * m);
    if (!meet) throw NumericError(fmt::format("meeting time not reached within {} steps", t_max));
    const std::size_t meet_steps = (*meet + m - 1) / m;
    if (*mix + meet_steps > best.depth) best = {*mix, meet_steps, *mix + meet_steps};
  }
  return best;
}

// ---------------------------------------------------------------- kinds

namespace {

RngStream root_stream(const ExperimentConfig& c) { return RngStream{c.seed, 0}; }

ExperimentOutput run_entropy_sweep(const ExperimentConfig& c, unsigned threads) {
  const GeometrySpec g = build_geometry(c);
  const Subsystem gamma = build_subsystem(c, g);
  const EntropySweep sweep = entropy_sweep(g, gamma, c.s, c.depths, c.trials, root_stream(c), threads);

  ExperimentOutput out;
  Csv agg("depth,mean_s2,var_s2,stderr_s2,trials");
  Csv rows("depth,trial,s2");
  std::vector<double> dx, my;
  for (std::size_t i = 0; i < c.depths.size(); ++i) {
    const RunningStats& st = sweep.stats[i];
    agg.row("{},{},{},{},{}", c.depths[i], num(st.mean), num(st.variance()), num(st.stderr_mean()), st.count);
    // Two-pass recomputation from the per-trial rows must agree.
    double mean = 0.0;
    for (const auto& v : sweep.values) mean += v[i];
    mean /= static_cast<double>(c.trials);
    double var = 0.0;
    for (const auto& v : sweep.values) var += (v[i] - mean) * (v[i] - mean);
    var = c.trials > 1 ? var / static_cast<double>(c.trials - 1) : 0.0;
    if (std::abs(mean - st.mean) > 1e-9 * std::max(1.0, std::abs(mean)) ||
        std::abs(var - st.variance()) > 1e-9 * std::max(1.0, var)) {
      throw std::logic_error(fmt::format("aggregate/per-trial mismatch at depth {}", c.depths[i]));
    }
    if (c.depths[i] > 0 && st.mean > 0.0) {
      dx.push_back(static_cast<double>(c.depths[i]));
      my.push_back(st.mean);
    }
  }
  for (std::size_t i = 0; i < c.depths.size(); ++i) {
    for (std::size_t t = 0; t < c.trials; ++t) rows.row("{},{},{}", c.depths[i], t, num(sweep.values[t][i]));
  }
  out.files.push_back({"aggregate.csv", agg.str()});
  if (c.per_trial) out.files.push_back({"per_trial.csv", rows.str()});

  json means = json::array();
  for (const auto& st : sweep.stats) means.push_back(st.mean);
  out.summary = {{"subsystem_size", gamma.size()}, {"mean_s2", means}};
  if (dx.size() >= 2) out.summary["loglog_slope"] = loglog_slope(dx, my);
  if (c.haar_trials >= 2) {
    const MomentEstimate h = haar_reference(g.n, gamma, c.s, c.haar_trials, root_stream(c).derive(~0ULL), threads);
    out.summary["haar_mean_s2"] = h.value;
    out.summary["haar_stderr_s2"] = h.stderr_value;
  }
  return out;
}

ExperimentOutput run_uut_heatmap(const ExperimentConfig& c, unsigned threads) {
  const GeometrySpec g = build_geometry(c);
  ExperimentOutput out;
  Csv profile_csv("depth,offset,mean_abs_uut");
  Csv moments_csv("target,params,value,stderr,trials");
  json per_depth = json::array();
  for (std::size_t depth : c.depths) {
    const MomentTables tables(g, depth, std::max<std::size_t>(c.trials, 2), root_stream(c).derive(depth),
                              threads, {false});
    Csv heat("x,y,value");
    RealMatrix values(static_cast<Eigen::Index>(g.n), static_cast<Eigen::Index>(g.n));
    for (std::size_t x = 0; x < g.n; ++x) {
      for (std::size_t y = 0; y < g.n; ++y) {
        values(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = tables.uut_abs_mean(x, y);
        heat.row("{},{},{}", x + 1, y + 1, num(tables.uut_abs_mean(x, y)));
        const MomentEstimate e = tables.uut_second(x, y);
        moments_csv.row("uut_second,d={};x={};y={},{},{},{}", depth, x + 1, y + 1, num(e.value),
                        num(e.stderr_value), e.trials);
      }
    }
    out.files.push_back({c.depths.size() == 1 ? "heatmap.csv" : fmt::format("heatmap_d{}.csv", depth), heat.str()});
    const auto profile = diagonal_profile(values);
    for (std::size_t off = 0; off < profile.size(); ++off) profile_csv.row("{},{},{}", depth, off, num(profile[off]));

    double beyond = 0.0;
    for (std::size_t x = 0; x < g.n; ++x) {
      for (std::size_t y = 0; y < g.n; ++y) {
        if ((x > y ? x - y : y - x) > 4 * depth) beyond = std::max(beyond, values(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)));
      }
    }
    json entry = {{"depth", depth}, {"max_beyond_4d", beyond}};
    const auto near = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(depth))));
    if (depth >= 1 && 4 * depth - 2 < g.n) {
      double near_min = std::numeric_limits<double>::infinity();
      for (std::size_t off = 0; off <= near && off < g.n; ++off) near_min = std::min(near_min, profile[off]);
      entry["edge_offset"] = 4 * depth - 2;
      entry["edge_mean"] = profile[4 * depth - 2];
      entry["near_min"] = near_min;
    }
    per_depth.push_back(entry);
  }
  out.files.push_back({"band_profile.csv", profile_csv.str()});
  out.files.push_back({"moments.csv", moments_csv.str()});
  out.summary = {{"depths", per_depth}};
  return out;
}

ExperimentOutput run_walk_check(const ExperimentConfig& c, unsigned threads) {
  const GeometrySpec g = build_geometry(c);
  ExperimentOutput out;
  Csv walk("depth,x,y,mc_mean,mc_stderr,exact,z");
  Csv refl("depth,x,empirical,exact");
  json per_depth = json::array();
  for (std::size_t depth : c.depths) {
    const BosonWalkReport r = verify_boson_rw(g, depth, c.trials, root_stream(c).derive(depth), threads);
    for (Eigen::Index x = 0; x < r.exact.rows(); ++x) {
      for (Eigen::Index y = 0; y < r.exact.cols(); ++y) {
        walk.row("{},{},{},{},{},{},{}", depth, x + 1, y + 1, num(r.mc_mean(x, y)), num(r.mc_stderr(x, y)),
                 num(r.exact(x, y)), num(r.z(x, y)));
      }
    }
    json entry = {{"depth", depth}, {"max_abs_z", r.max_abs_z}, {"pass", r.max_abs_z <= 5.0}};
    if (g.kind == GeometryKind::brickwall1d) {
      const ReflectionReport rr =
          verify_reflection(g.n, depth, c.trials, c.start, root_stream(c).derive(depth).derive(1));
      for (std::size_t x = 0; x < g.n; ++x) {
        refl.row("{},{},{},{}", depth, x + 1, num(rr.empirical[x]), num(rr.exact[x]));
      }
      entry["reflection_tv"] = rr.tv_gap;
      entry["reflection_bound"] = rr.stat_bound;
      entry["reflection_pass"] = rr.pass;
    }
    per_depth.push_back(entry);
  }
  out.files.push_back({"walk.csv", walk.str()});
  if (g.kind == GeometryKind::brickwall1d) out.files.push_back({"reflection.csv", refl.str()});
  out.summary = {{"depths", per_depth}};
  return out;
}

double default_eps(const ExperimentConfig& c, int power) {
  return 1.0 / std::pow(static_cast<double>(c.n), power);
}

ExperimentOutput run_mixing(const ExperimentConfig& c, unsigned) {
  const GeometrySpec g = build_geometry(c);
  const double eps = c.epsilon.value_or(default_eps(c, 2));
  const auto curve = mixing_curve(g, eps, c.t_max);
  ExperimentOutput out;
  Csv csv("t,max_tv");
  for (std::size_t t = 0; t < curve.size(); ++t) csv.row("{},{}", t, num(curve[t]));
  out.files.push_back({"mixing.csv", csv.str()});
  std::optional<std::size_t> t_mix;
  if (curve.size() > 1 && curve.back() <= eps) t_mix = curve.size() - 1;
  out.summary = {{"epsilon", eps}, {"t_mix", nullable(t_mix)}};
  return out;
}

ExperimentOutput run_meeting(const ExperimentConfig& c, unsigned threads) {
  const GeometrySpec g = build_geometry(c);
  const double eps = c.epsilon.value_or(default_eps(c, 3));
  const std::size_t m = g.layers_per_step();
  const std::size_t max_layers = c.t_max * m;
  const MeetingStudy study(g, c.trials, max_layers, root_stream(c), threads);
  const auto mc = study.meeting_layers(eps);
  const auto exact = meeting_layers_exact(g, eps, max_layers);

  const std::size_t last = std::min(max_layers, ((mc.value_or(max_layers) + m - 1) / m) * m);
  Csv csv("t_times_M,start_x,start_y,tail_estimate,stderr");
  for (std::size_t k = 1; k <= last; ++k) {
    for (const auto& tail : study.tails(k)) {
      csv.row("{},{},{},{},{}", k, tail.x, tail.y, num(tail.tail), num(tail.stderr_tail));
    }
  }
  ExperimentOutput out;
  out.files.push_back({"meeting.csv", csv.str()});
  out.summary = {{"epsilon", eps},
                 {"layers_per_step", m},
                 {"mc_meeting_layers", nullable(mc)},
                 {"exact_meeting_layers", nullable(exact)}};
  return out;
}

ExperimentOutput run_decouple(const ExperimentConfig& c, unsigned threads) {
  const GeometrySpec g = build_geometry(c);
  const double eps_mix = c.epsilon.value_or(default_eps(c, 2));
  const double eps_meet = c.epsilon_meet.value_or(default_eps(c, 3));
  DecouplingDepth dd;
  if (!c.depths.empty()) {
    dd.depth = c.depths.front();
  } else {
    try {
      dd = decoupling_depth(g, eps_mix, eps_meet, c.t_max);
    } catch (const NumericError& e) {
      config_fail("config.t_max", e.what());
    }
  }
  const MomentTables tables(g, dd.depth, std::max<std::size_t>(c.trials, 2), root_stream(c), threads);
  const double n = static_cast<double>(g.n);
  const double floor = 0.9 / (3.0 * n * n);

  Csv csv("target,params,value,stderr,trials");
  double worst_margin = std::numeric_limits<double>::infinity();
  double min_value = std::numeric_limits<double>::infinity();
  double max_gap_z = 0.0;
  for (MomentSide side : {MomentSide::rows, MomentSide::cols}) {
    const char* tag = side == MomentSide::rows ? "fourth_rows" : "fourth_cols";
    for (std::size_t a = 0; a < g.n; ++a) {
      for (std::size_t x = 0; x < g.n; ++x) {
        for (std::size_t y = 0; y < g.n; ++y) {
          const MomentEstimate e = tables.fourth(side, a, x, y);
          csv.row("{},d={};alpha={};x={};y={},{},{},{}", tag, dd.depth, a + 1, x + 1, y + 1, num(e.value),
                  num(e.stderr_value), e.trials);
          worst_margin = std::min(worst_margin, e.value + 3.0 * e.stderr_value - floor);
          min_value = std::min(min_value, e.value);
        }
      }
    }
  }
  for (std::size_t x = 0; x < g.n; ++x) {
    for (std::size_t y = 0; y < g.n; ++y) {
      const MomentEstimate u = tables.uut_second(x, y);
      csv.row("uut_second,d={};x={};y={},{},{},{}", dd.depth, x + 1, y + 1, num(u.value), num(u.stderr_value), u.trials);
      const MomentEstimate gap = tables.uut_identity_gap(x, y);
      csv.row("uut_identity_gap,d={};x={};y={},{},{},{}", dd.depth, x + 1, y + 1, num(gap.value),
              num(gap.stderr_value), gap.trials);
      if (gap.stderr_value > 0.0) {
        max_gap_z = std::max(max_gap_z, std::abs(gap.value) / gap.stderr_value);
      } else if (std::abs(gap.value) > 1e-12) {
        max_gap_z = std::numeric_limits<double>::infinity();
      }
    }
  }
  ExperimentOutput out;
  out.files.push_back({"moments.csv", csv.str()});
  out.summary = {{"depth", dd.depth},       {"t_mix", dd.t_mix},
                 {"t_meet", dd.t_meet},     {"floor", floor},
                 {"min_fourth", min_value}, {"worst_margin", worst_margin},
                 {"decoupled", worst_margin >= 0.0}, {"max_identity_gap_z", max_gap_z}};
  return out;
}

ExperimentOutput run_compress_sweep(const ExperimentConfig& c, unsigned threads) {
  const GeometrySpec g = build_geometry(c);
  if (g.kind != GeometryKind::brickwall1d) config_fail("config.geometry", "compress-sweep needs a brickwall");
  struct Row {
    std::size_t band = 0, gates = 0;
    double hs = 0.0, eps = 0.0;
    bool close = true;
  };
  Csv csv("c_band,depth,trial,band,gate_count,gate_bound,naive_two_mode,hs_error,eps_hat,close_diag_ok");
  json per = json::array();
  for (std::size_t depth : c.depths) {
    const NaiveGateCount naive = gate_count_naive(g, depth);
    std::vector<std::vector<Row>> rows(c.c_bands.size(), std::vector<Row>(c.trials));
    parallel_for(c.trials, threads, [&](std::size_t t) {
      guarded_trial(t, [&] {
        const CircuitSample sample = sample_circuit(g, depth, root_stream(c).derive(depth).derive(t));
        for (std::size_t i = 0; i < c.c_bands.size(); ++i) {
          const std::size_t w = effective_bandwidth(depth, c.kappa, c.c_bands[i], g.n);
          const CompressionResult r = banded_compress(sample.u, w);
          rows[i][t] = {w, r.gate_count, r.hs_error, r.eps_hat, r.close_diag_ok};
        }
        return 0;
      });
    });
    for (std::size_t i = 0; i < c.c_bands.size(); ++i) {
      std::size_t within = 0, max_gates = 0;
      bool close = true;
      double worst = 0.0;
      const std::size_t w = rows[i].front().band;
      for (std::size_t t = 0; t < c.trials; ++t) {
        const Row& r = rows[i][t];
        csv.row("{},{},{},{},{},{},{},{},{},{}", num(c.c_bands[i]), depth, t, r.band, r.gates,
                banded_gate_bound(g.n, r.band), naive.two_mode, num(r.hs), num(r.eps), r.close ? 1 : 0);
        within += r.hs <= c.hs_tolerance ? 1 : 0;
        max_gates = std::max(max_gates, r.gates);
        close = close && r.close;
        worst = std::max(worst, r.hs);
      }
      per.push_back({{"c_band", c.c_bands[i]},
                     {"depth", depth},
                     {"band", w},
                     {"within_tolerance", within},
                     {"fraction_within", static_cast<double>(within) / static_cast<double>(c.trials)},
                     {"max_hs_error", worst},
                     {"max_gate_count", max_gates},
                     {"gate_bound", banded_gate_bound(g.n, w)},
                     {"naive_two_mode", naive.two_mode},
                     {"close_diag_all", close}});
    }
  }
  ExperimentOutput out;
  out.files.push_back({"compress.csv", csv.str()});
  out.summary = {{"sweep", per}, {"hs_tolerance", c.hs_tolerance}};
  return out;
}

ExperimentOutput run_bounds_audit(const ExperimentConfig& c, unsigned threads) {
  const GeometrySpec g = build_geometry(c);
  const Subsystem gamma = build_subsystem(c, g);
  Csv csv("depth,trial,s2,worst_bound,trivial_bound,boundary_bound,boundary_size,ok");
  std::size_t violations = 0;
  std::size_t with_worst = 0;
  for (std::size_t depth : c.depths) {
    std::vector<BoundReport> reports(c.trials);
    parallel_for(c.trials, threads, [&](std::size_t t) {
      reports[t] = guarded_trial(t, [&] {
        return check_bounds(sample_circuit(g, depth, root_stream(c).derive(depth).derive(t)), gamma, c.s);
      });
    });
    for (std::size_t t = 0; t < c.trials; ++t) {
      const BoundReport& r = reports[t];
      csv.row("{},{},{},{},{},{},{},{}", depth, t, num(r.s2), r.worst_bound ? num(*r.worst_bound) : "",
              num(r.trivial_bound), num(r.boundary_bound), r.boundary_size, r.all_ok() ? 1 : 0);
      violations += r.all_ok() ? 0 : 1;
      with_worst += r.worst_bound ? 1 : 0;
    }
  }
  ExperimentOutput out;
  out.files.push_back({"bounds.csv", csv.str()});
  out.summary = {{"violations", violations}, {"samples", c.trials * c.depths.size()},
                 {"samples_with_lightcone_bound", with_worst}};
  return out;
}

}  // namespace

ExperimentOutput compute_experiment(const ExperimentConfig& c, unsigned threads) {
  threads = resolve_threads(threads);
  switch (c.kind) {
    case ExperimentKind::entropy_sweep: return run_entropy_sweep(c, threads);
    case ExperimentKind::uut_heatmap: return run_uut_heatmap(c, threads);
    case ExperimentKind::walk_check: return run_walk_check(c, threads);
    case ExperimentKind::mixing: return run_mixing(c, threads);
    case ExperimentKind::meeting: return run_meeting(c, threads);
    case ExperimentKind::decouple: return run_decouple(c, threads);
    case ExperimentKind::compress_sweep: return run_compress_sweep(c, threads);
    case ExperimentKind::bounds_audit: return run_bounds_audit(c, threads);
  }
  throw std::logic_error("unhandled experiment kind");
}

RunRecord run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentOutput output = compute_experiment(config, options.threads);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  RunRecord rec;
  rec.config_hash = config.hash();
  rec.build_id = build_id();
  rec.directory = options.out_dir / rec.config_hash;
  std::error_code ec;
  std::filesystem::create_directories(rec.directory, ec);
  if (ec) throw IoError(fmt::format("cannot create {}: {}", rec.directory.string(), ec.message()));

  json files = json::array();
  for (const OutputFile& f : output.files) {
    write_text_file(rec.directory / f.name, f.content);
    files.push_back({{"name", f.name}, {"bytes", f.content.size()}, {"fnv1a64", fnv1a64_hex(f.content)}});
  }
  rec.wall_seconds = wall;
  rec.summary = output.summary;
  const json manifest = {{"kind", to_string(config.kind)},
                         {"config", config.to_json()},
                         {"config_hash", rec.config_hash},
                         {"seed", config.seed},
                         {"build_id", rec.build_id},
                         {"files", files},
                         {"wall_seconds", wall},
                         {"summary", output.summary}};
  rec.manifest = rec.directory / "manifest.json";
  write_text_file(rec.manifest, manifest.dump(2) + "\n");
  return rec;
}

}  // namespace linopt
