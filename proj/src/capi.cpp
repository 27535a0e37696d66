#include "linopt/linopt.h"

#include <cstring>
#include <string>

#include <fmt/format.h>

#include "compress.hpp"
#include "experiments.hpp"
#include "gaussian.hpp"
#include "geometry.hpp"
#include "matrix_io.hpp"
#include "sampler.hpp"
#include "walk.hpp"

struct linopt_matrix {
  linopt::ComplexMatrix m;
};

struct linopt_geometry {
  linopt::GeometrySpec g;
};

struct linopt_compression {
  linopt::CompressionResult r;
};

namespace {

thread_local std::string g_last_error;

linopt_status fail(linopt_status status, const std::string& what) {
  g_last_error = what;
  return status;
}

template <class Fn>
linopt_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    return fn();
  } catch (const linopt::ConfigError& e) {
    return fail(LINOPT_ERR_CONFIG, e.what());
  } catch (const linopt::TrialError& e) {
    return fail(LINOPT_ERR_NUMERIC, e.what());
  } catch (const linopt::NumericError& e) {
    return fail(LINOPT_ERR_NUMERIC, e.what());
  } catch (const linopt::IoError& e) {
    return fail(LINOPT_ERR_IO, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(LINOPT_ERR_CONFIG, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(LINOPT_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(LINOPT_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(LINOPT_ERR_INTERNAL, "unknown exception");
  }
}

#define LINOPT_REQUIRE(cond, msg) \
  if (!(cond)) return fail(LINOPT_ERR_INVALID_ARGUMENT, msg)

linopt_status copy_string(const std::string& s, char* buf, std::size_t len, std::size_t* needed) {
  if (needed) *needed = s.size() + 1;
  if (!buf) return LINOPT_OK;
  if (len < s.size() + 1) {
    return fail(LINOPT_ERR_INVALID_ARGUMENT, fmt::format("buffer too small: need {} bytes", s.size() + 1));
  }
  std::memcpy(buf, s.c_str(), s.size() + 1);
  return LINOPT_OK;
}

linopt_status emit_geometry(linopt::GeometrySpec g, linopt_geometry** out) {
  *out = new linopt_geometry{std::move(g)};
  return LINOPT_OK;
}

}  // namespace

extern "C" {

const char* linopt_last_error(void) { return g_last_error.c_str(); }

const char* linopt_build_id(void) {
  static const std::string id = linopt::build_id();
  return id.c_str();
}

linopt_status linopt_geometry_brickwall(size_t n, linopt_geometry** out) {
  LINOPT_REQUIRE(out, "out is NULL");
  return guarded([&] { return emit_geometry(linopt::brickwall_geometry(n), out); });
}

linopt_status linopt_geometry_brickwork(size_t m, size_t dim, const size_t* order, size_t order_len,
                                        linopt_geometry** out) {
  LINOPT_REQUIRE(out, "out is NULL");
  LINOPT_REQUIRE(order || order_len == 0, "order is NULL but order_len > 0");
  return guarded([&] {
    std::vector<std::size_t> slots(order, order + order_len);
    return emit_geometry(linopt::brickwork_d_geometry(m, dim, slots), out);
  });
}

linopt_status linopt_geometry_octahedral(linopt_geometry** out) {
  LINOPT_REQUIRE(out, "out is NULL");
  return guarded([&] { return emit_geometry(linopt::octahedral_geometry(), out); });
}

linopt_status linopt_geometry_from_json(const char* json, linopt_geometry** out) {
  LINOPT_REQUIRE(json && out, "NULL argument");
  return guarded([&] {
    const auto j = nlohmann::json::parse(json);
    if (!j.is_object() || !j.contains("n") || !j.contains("layers")) {
      return fail(LINOPT_ERR_INVALID_ARGUMENT, "geometry JSON needs n and layers");
    }
    const auto n = j.at("n").get<std::size_t>();
    std::vector<linopt::Pairing> layers;
    for (const auto& layer : j.at("layers")) {
      layers.push_back(linopt::Pairing::from_one_based(n, layer.get<std::vector<std::vector<std::size_t>>>()));
    }
    return emit_geometry(linopt::custom_geometry(n, std::move(layers)), out);
  });
}

size_t linopt_geometry_modes(const linopt_geometry* g) { return g ? g->g.n : 0; }
size_t linopt_geometry_layers(const linopt_geometry* g) { return g ? g->g.layers.size() : 0; }
void linopt_geometry_free(linopt_geometry* g) { delete g; }

linopt_status linopt_matrix_create(size_t rows, size_t cols, const double* entries, linopt_matrix** out) {
  LINOPT_REQUIRE(entries && out, "NULL argument");
  LINOPT_REQUIRE(rows > 0 && cols > 0, "matrix dimensions must be positive");
  return guarded([&] {
    auto* m = new linopt_matrix{linopt::ComplexMatrix(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols))};
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        const double* e = entries + 2 * (r * cols + c);
        m->m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = {e[0], e[1]};
      }
    }
    if (!linopt::all_finite(m->m)) {
      delete m;
      return fail(LINOPT_ERR_INVALID_ARGUMENT, "matrix entries must be finite");
    }
    *out = m;
    return LINOPT_OK;
  });
}

size_t linopt_matrix_rows(const linopt_matrix* m) { return m ? static_cast<size_t>(m->m.rows()) : 0; }
size_t linopt_matrix_cols(const linopt_matrix* m) { return m ? static_cast<size_t>(m->m.cols()) : 0; }

linopt_status linopt_matrix_entries(const linopt_matrix* m, double* out, size_t len) {
  LINOPT_REQUIRE(m && out, "NULL argument");
  const auto need = static_cast<std::size_t>(2 * m->m.size());
  LINOPT_REQUIRE(len >= need, fmt::format("buffer holds {} doubles, need {}", len, need));
  std::size_t i = 0;
  for (Eigen::Index r = 0; r < m->m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m->m.cols(); ++c) {
      out[i++] = m->m(r, c).real();
      out[i++] = m->m(r, c).imag();
    }
  }
  return LINOPT_OK;
}

linopt_status linopt_matrix_defect(const linopt_matrix* m, double* out) {
  LINOPT_REQUIRE(m && out, "NULL argument");
  return guarded([&] {
    *out = linopt::unitarity_defect(m->m);
    return LINOPT_OK;
  });
}

linopt_status linopt_matrix_write_json(const linopt_matrix* m, const char* path) {
  LINOPT_REQUIRE(m && path, "NULL argument");
  return guarded([&] {
    linopt::write_matrix_json(path, m->m);
    return LINOPT_OK;
  });
}

linopt_status linopt_matrix_read_json(const char* path, linopt_matrix** out) {
  LINOPT_REQUIRE(path && out, "NULL argument");
  return guarded([&] {
    *out = new linopt_matrix{linopt::read_matrix_json(path)};
    return LINOPT_OK;
  });
}

linopt_status linopt_matrix_write_binary(const linopt_matrix* m, const char* path) {
  LINOPT_REQUIRE(m && path, "NULL argument");
  return guarded([&] {
    linopt::write_matrix_binary(path, m->m);
    return LINOPT_OK;
  });
}

linopt_status linopt_matrix_read_binary(const char* path, linopt_matrix** out) {
  LINOPT_REQUIRE(path && out, "NULL argument");
  return guarded([&] {
    *out = new linopt_matrix{linopt::read_matrix_binary(path)};
    return LINOPT_OK;
  });
}

void linopt_matrix_free(linopt_matrix* m) { delete m; }

linopt_status linopt_sample_circuit(const linopt_geometry* g, size_t depth, uint64_t seed,
                                    uint64_t stream, linopt_matrix** out) {
  LINOPT_REQUIRE(g && out, "NULL argument");
  return guarded([&] {
    *out = new linopt_matrix{linopt::sample_circuit(g->g, depth, linopt::RngStream{seed, stream}).u};
    return LINOPT_OK;
  });
}

linopt_status linopt_haar_unitary(size_t n, uint64_t seed, linopt_matrix** out) {
  LINOPT_REQUIRE(out, "out is NULL");
  LINOPT_REQUIRE(n >= 1, "n must be >= 1");
  return guarded([&] {
    linopt::Engine rng = linopt::RngStream{seed, 0}.engine();
    *out = new linopt_matrix{linopt::haar_unitary(n, rng)};
    return LINOPT_OK;
  });
}

linopt_status linopt_renyi2(const linopt_matrix* u, const size_t* gamma, size_t k, double s,
                            linopt_route route, size_t series_terms, double* value) {
  LINOPT_REQUIRE(u && gamma && value, "NULL argument");
  return guarded([&] {
    const auto sub = linopt::Subsystem::from_one_based(static_cast<std::size_t>(u->m.rows()),
                                                       std::vector<std::size_t>(gamma, gamma + k));
    switch (route) {
      case LINOPT_ROUTE_EIG: *value = linopt::renyi2_eig(u->m, sub, s).value; break;
      case LINOPT_ROUTE_COV: *value = linopt::renyi2_cov(u->m, sub, s).value; break;
      case LINOPT_ROUTE_SERIES:
        if (series_terms < 1) return fail(LINOPT_ERR_INVALID_ARGUMENT, "series_terms must be >= 1");
        *value = linopt::renyi2_series(u->m, sub, s, series_terms).value;
        break;
      default: return fail(LINOPT_ERR_INVALID_ARGUMENT, "unknown route");
    }
    return LINOPT_OK;
  });
}

linopt_status linopt_mixing_time(const linopt_geometry* g, double epsilon, size_t t_max, size_t* t) {
  LINOPT_REQUIRE(g && t, "NULL argument");
  return guarded([&] {
    const auto r = linopt::mixing_time(g->g, epsilon, t_max);
    if (!r) return fail(LINOPT_ERR_NOT_REACHED, fmt::format("not mixed within {} steps", t_max));
    *t = *r;
    return LINOPT_OK;
  });
}

linopt_status linopt_meeting_layers(const linopt_geometry* g, double epsilon, size_t max_layers,
                                    size_t* layers) {
  LINOPT_REQUIRE(g && layers, "NULL argument");
  LINOPT_REQUIRE(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0,1)");
  return guarded([&] {
    const auto r = linopt::meeting_layers_exact(g->g, epsilon, max_layers);
    if (!r) return fail(LINOPT_ERR_NOT_REACHED, fmt::format("tail above epsilon after {} layers", max_layers));
    *layers = *r;
    return LINOPT_OK;
  });
}

linopt_status linopt_effective_bandwidth(size_t depth, double kappa, double c_band, size_t n, size_t* w) {
  LINOPT_REQUIRE(w, "w is NULL");
  return guarded([&] {
    *w = linopt::effective_bandwidth(depth, kappa, c_band, n);
    return LINOPT_OK;
  });
}

linopt_status linopt_banded_compress(const linopt_matrix* u, size_t w, linopt_compression** out) {
  LINOPT_REQUIRE(u && out, "NULL argument");
  return guarded([&] {
    *out = new linopt_compression{linopt::banded_compress(u->m, w)};
    return LINOPT_OK;
  });
}

linopt_status linopt_reck_decompose(const linopt_matrix* u, linopt_compression** out) {
  LINOPT_REQUIRE(u && out, "NULL argument");
  return guarded([&] {
    *out = new linopt_compression{linopt::reck_decompose(u->m)};
    return LINOPT_OK;
  });
}

size_t linopt_compression_gate_count(const linopt_compression* c) { return c ? c->r.gate_count : 0; }
size_t linopt_compression_band(const linopt_compression* c) { return c ? c->r.band : 0; }
double linopt_compression_hs_error(const linopt_compression* c) { return c ? c->r.hs_error : 0.0; }
int linopt_compression_close_diag_ok(const linopt_compression* c) { return c && c->r.close_diag_ok ? 1 : 0; }

linopt_status linopt_compression_gates_json(const linopt_compression* c, char* buf, size_t len,
                                            size_t* needed) {
  LINOPT_REQUIRE(c, "NULL argument");
  return guarded([&] { return copy_string(linopt::gates_to_json(c->r.gates).dump(), buf, len, needed); });
}

linopt_status linopt_compression_reconstruct(const linopt_compression* c, linopt_matrix** out) {
  LINOPT_REQUIRE(c && out, "NULL argument");
  return guarded([&] {
    *out = new linopt_matrix{linopt::reconstruct(c->r.gates, c->r.n)};
    return LINOPT_OK;
  });
}

void linopt_compression_free(linopt_compression* c) { delete c; }

linopt_status linopt_run_experiment(const char* config_json, const linopt_run_options* options,
                                    char* manifest_path, size_t len) {
  LINOPT_REQUIRE(config_json, "config_json is NULL");
  return guarded([&] {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(config_json);
    } catch (const nlohmann::json::parse_error& e) {
      return fail(LINOPT_ERR_CONFIG, fmt::format("config: {}", e.what()));
    }
    if (options && j.is_object()) {
      if (options->has_seed) j["seed"] = options->seed;
      if (options->has_trials) {
        j["trials"] = options->trials;
      } else if (options->full && j.value("kind", "") == "entropy-sweep") {
        j["trials"] = 5000;
      }
    }
    const auto config = linopt::ExperimentConfig::from_json(j);
    linopt::RunOptions run;
    if (options && options->out_dir) run.out_dir = options->out_dir;
    if (options) run.threads = options->threads;
    const auto record = linopt::run_experiment(config, run);
    if (!manifest_path) return LINOPT_OK;
    return copy_string(record.manifest.string(), manifest_path, len, nullptr);
  });
}

}  // extern "C"
