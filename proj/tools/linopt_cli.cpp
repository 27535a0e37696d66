// Command-line front end. Every subcommand except `compress` builds an
// experiment config (from --config plus flag overrides) and hands it to the
// library; `compress` runs a single banded compression in place.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "linopt/linopt.h"

namespace {

using nlohmann::json;

struct Flags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::string out = "runs";
  unsigned threads = 0;
  std::optional<std::size_t> n;
  std::optional<std::size_t> depth;
  std::vector<std::size_t> depths;
  std::optional<double> s;
  std::optional<std::size_t> k;
  std::optional<double> kappa;
  std::vector<double> c_bands;
  std::optional<double> epsilon;
  std::optional<std::size_t> t_max;
  std::string geometry;
  bool full = false;
  bool per_trial = false;
  std::string gates_path;
};

int exit_code(linopt_status status) {
  switch (status) {
    case LINOPT_OK: return 0;
    case LINOPT_ERR_CONFIG:
    case LINOPT_ERR_INVALID_ARGUMENT: return 2;
    case LINOPT_ERR_NUMERIC: return 3;
    default: return 1;
  }
}

int report(linopt_status status) {
  std::cerr << "error: " << linopt_last_error() << "\n";
  return exit_code(status);
}

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config_path, "experiment config (JSON)");
  sub->add_option("--seed", f.seed, "override the config seed");
  sub->add_option("--trials", f.trials, "override the trial count");
  sub->add_option("--out", f.out, "output directory")->capture_default_str();
  sub->add_option("--threads", f.threads, "worker threads (default: LINOPT_THREADS or all cores)");
  sub->add_option("--n", f.n, "mode count");
  sub->add_option("--depth", f.depth, "single depth");
  sub->add_option("--depths", f.depths, "depth list")->delimiter(',');
  sub->add_option("--s", f.s, "squeezing parameter");
  sub->add_option("--k", f.k, "subsystem size (first k modes)");
  sub->add_option("--kappa", f.kappa, "target accuracy exponent");
  sub->add_option("--c-band", f.c_bands, "band constant(s)")->delimiter(',');
  sub->add_option("--epsilon", f.epsilon, "distance threshold");
  sub->add_option("--t-max", f.t_max, "step horizon");
  sub->add_option("--geometry", f.geometry, "brickwall | brickwork | octahedral");
  sub->add_flag("--full", f.full, "entropy-sweep: 5000 trials");
  sub->add_flag("--per-trial", f.per_trial, "emit per-trial rows");
}

// Returns nullopt and prints the reason when the config cannot be assembled.
std::optional<json> assemble_config(const std::string& kind, const Flags& f) {
  json j = json::object();
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) {
      std::cerr << "error: cannot open config " << f.config_path << "\n";
      return std::nullopt;
    }
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      std::cerr << "error: config: " << e.what() << "\n";
      return std::nullopt;
    }
    if (!j.is_object()) {
      std::cerr << "error: config: expected a JSON object\n";
      return std::nullopt;
    }
    if (j.contains("kind") && j["kind"] != kind) {
      std::cerr << "error: config.kind: '" << j["kind"].dump() << "' does not match subcommand " << kind << "\n";
      return std::nullopt;
    }
  } else if (!f.n && f.geometry != "octahedral") {
    std::cerr << "error: missing config: pass --config <path> or --n\n";
    return std::nullopt;
  }
  j["kind"] = kind;
  if (f.n) j["n"] = *f.n;
  if (!f.depths.empty()) j["depths"] = f.depths;
  if (f.depth) j["depths"] = {*f.depth};
  if (f.s) j["s"] = *f.s;
  if (f.k) j["k"] = *f.k;
  if (f.kappa) j["kappa"] = *f.kappa;
  if (!f.c_bands.empty()) {
    j.erase("c_band");
    j["c_bands"] = f.c_bands;
  }
  if (f.epsilon) j["epsilon"] = *f.epsilon;
  if (f.t_max) j["t_max"] = *f.t_max;
  if (f.per_trial) j["per_trial"] = true;
  if (!f.geometry.empty()) {
    if (j.contains("geometry") && j["geometry"].is_object()) {
      j["geometry"]["kind"] = f.geometry;
    } else {
      j["geometry"] = {{"kind", f.geometry}};
    }
  }
  return j;
}

void print_summary(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) return;
  try {
    const json m = json::parse(in);
    const json& s = m.at("summary");
    if (m.at("kind") == "mixing") {
      std::cout << "t = " << (s.at("t_mix").is_null() ? std::string("not reached") : s.at("t_mix").dump()) << "\n";
    }
    for (const auto& [key, value] : s.items()) std::cout << key << " = " << value.dump() << "\n";
  } catch (const json::exception&) {
    // summary printing is best effort
  }
}

int run_kind(const std::string& kind, const Flags& f) {
  const auto config = assemble_config(kind, f);
  if (!config) return 2;
  linopt_run_options opts{};
  opts.out_dir = f.out.c_str();
  opts.threads = f.threads;
  opts.has_seed = f.seed.has_value();
  opts.seed = f.seed.value_or(0);
  opts.has_trials = f.trials.has_value();
  opts.trials = f.trials.value_or(0);
  opts.full = f.full ? 1 : 0;
  std::vector<char> path(4096);
  const linopt_status st = linopt_run_experiment(config->dump().c_str(), &opts, path.data(), path.size());
  if (st != LINOPT_OK) return report(st);
  std::cout << "manifest: " << path.data() << "\n";
  print_summary(path.data());
  return 0;
}

int run_compress(const Flags& f) {
  if (!f.n || !f.depth) {
    std::cerr << "error: compress needs --n and --depth\n";
    return 2;
  }
  const double kappa = f.kappa.value_or(2.0);
  const double c_band = f.c_bands.empty() ? 2.0 : f.c_bands.front();
  linopt_geometry* g = nullptr;
  linopt_status st = linopt_geometry_brickwall(*f.n, &g);
  if (st != LINOPT_OK) return report(st);
  linopt_matrix* u = nullptr;
  st = linopt_sample_circuit(g, *f.depth, f.seed.value_or(1), 0, &u);
  linopt_geometry_free(g);
  if (st != LINOPT_OK) return report(st);
  std::size_t w = 0;
  st = linopt_effective_bandwidth(*f.depth, kappa, c_band, *f.n, &w);
  linopt_compression* c = nullptr;
  if (st == LINOPT_OK) st = linopt_banded_compress(u, w, &c);
  linopt_matrix_free(u);
  if (st != LINOPT_OK) return report(st);

  std::cout << "band = " << w << "\n";
  std::cout << "gate_count = " << linopt_compression_gate_count(c) << "\n";
  std::cout << "naive_gate_count = " << *f.depth * (*f.n - 1) << "\n";
  std::printf("hs_error = %.6e\n", linopt_compression_hs_error(c));
  std::cout << "close_diag_ok = " << (linopt_compression_close_diag_ok(c) ? "true" : "false") << "\n";
  if (!f.gates_path.empty()) {
    std::size_t needed = 0;
    linopt_compression_gates_json(c, nullptr, 0, &needed);
    std::string buf(needed, '\0');
    st = linopt_compression_gates_json(c, buf.data(), buf.size(), nullptr);
    if (st == LINOPT_OK) {
      std::ofstream out(f.gates_path);
      out << buf.c_str() << "\n";
      std::cout << "gates: " << f.gates_path << "\n";
    }
  }
  linopt_compression_free(c);
  return st == LINOPT_OK ? 0 : report(st);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random linear-optical circuit experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(linopt_build_id()));

  Flags flags;
  const std::vector<std::string> kinds = {"entropy-sweep", "uut-heatmap", "walk-check", "mixing",
                                          "meeting", "decouple", "compress-sweep", "bounds-audit"};
  std::vector<CLI::App*> subs;
  for (const auto& kind : kinds) {
    CLI::App* sub = app.add_subcommand(kind, "run a " + kind + " experiment");
    add_common(sub, flags);
    subs.push_back(sub);
  }
  CLI::App* compress = app.add_subcommand("compress", "banded compression of one sampled brickwall circuit");
  add_common(compress, flags);
  compress->add_option("--gates", flags.gates_path, "write the gate list JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (flags.threads == 0) {
    if (const char* env = std::getenv("LINOPT_THREADS")) flags.threads = static_cast<unsigned>(std::atoi(env));
  }
  if (compress->parsed()) return run_compress(flags);
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    if (subs[i]->parsed()) return run_kind(kinds[i], flags);
  }
  return 2;
}
