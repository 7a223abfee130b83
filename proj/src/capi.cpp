#include "tunneldecay.h"

#include <cstring>
#include <memory>
#include <sstream>
#include <string>

#include "core/runner.hpp"
#include "core/threading.hpp"

using namespace td;

namespace {

td_status status_of(ErrorCode code) {
  switch (code) {
  case ErrorCode::InvalidParameter:
    return TD_ERR_INVALID_ARGUMENT;
  case ErrorCode::BadConfig:
    return TD_ERR_BAD_CONFIG;
  case ErrorCode::AccuracyFailure:
    return TD_ERR_ACCURACY;
  case ErrorCode::PhaseViolation:
    return TD_ERR_PHASE;
  case ErrorCode::DivergentIntegral:
    return TD_ERR_DIVERGENT;
  case ErrorCode::DegenerateThreshold:
    return TD_ERR_DEGENERATE;
  case ErrorCode::InsufficientHorizon:
    return TD_ERR_HORIZON;
  case ErrorCode::TruncatedTrace:
    return TD_ERR_TRUNCATED;
  case ErrorCode::InvalidMeasurement:
    return TD_ERR_MEASUREMENT;
  case ErrorCode::Io:
    return TD_ERR_IO;
  case ErrorCode::Internal:
    return TD_ERR_INTERNAL;
  }
  return TD_ERR_INTERNAL;
}

std::string &creation_error() {
  static std::string err;
  return err;
}

} // namespace

struct td_model {
  SimConfig config;
  std::string last_error;

  // lazily built pieces
  std::unique_ptr<ModelSetup> model;
  std::shared_ptr<const Wavefunction> wavefunction;
  std::unique_ptr<WellIntegrator> well_integrator;
  TimescaleReport report;
  bool report_ready = false;

  ModelSetup &setup() {
    if (!model)
      model = std::make_unique<ModelSetup>(ModelSetup::create(
          config.U0, config.a1, config.a2, config.initial_state,
          config.grid_config(), effective_threads(config.threads)));
    return *model;
  }

  const Wavefunction &field() {
    if (!wavefunction) {
      auto &m = setup();
      const double x_max =
          config.detector_positions.empty()
              ? std::max(config.a2 + 2.0, 50.0)
              : *std::max_element(config.detector_positions.begin(),
                                  config.detector_positions.end()) +
                    3.0;
      if (config.closing_time && *config.closing_time < config.time_horizon) {
        wavefunction =
            m.close_at(*config.closing_time, x_max,
                       config.time_horizon - *config.closing_time)
                .combined;
      } else {
        wavefunction =
            m.open_evolution(x_max, config.time_horizon, config.closing_time);
      }
    }
    return *wavefunction;
  }
};

namespace {

template <class Fn> td_status guarded(td_model *m, Fn &&fn) {
  try {
    fn();
    return TD_OK;
  } catch (const Error &e) {
    if (m)
      m->last_error = e.what();
    else
      creation_error() = e.what();
    return status_of(e.code());
  } catch (const std::exception &e) {
    if (m)
      m->last_error = e.what();
    else
      creation_error() = e.what();
    return TD_ERR_INTERNAL;
  }
}

} // namespace

extern "C" {

const char *td_version(void) { return version_string; }

td_status td_model_create(const char *config_json, td_model **out_model) {
  if (config_json == nullptr || out_model == nullptr) {
    creation_error() = "NULL argument";
    return TD_ERR_INVALID_ARGUMENT;
  }
  *out_model = nullptr;
  return guarded(nullptr, [&] {
    auto m = std::make_unique<td_model>();
    m->config = parse_config(config_json);
    *out_model = m.release();
  });
}

td_status td_model_create_from_file(const char *config_path,
                                    td_model **out_model) {
  if (config_path == nullptr || out_model == nullptr) {
    creation_error() = "NULL argument";
    return TD_ERR_INVALID_ARGUMENT;
  }
  *out_model = nullptr;
  return guarded(nullptr, [&] {
    auto m = std::make_unique<td_model>();
    m->config = load_config_file(config_path);
    *out_model = m.release();
  });
}

void td_model_destroy(td_model *model) { delete model; }

const char *td_last_error(const td_model *model) {
  return model ? model->last_error.c_str() : creation_error().c_str();
}

td_status td_model_set_threads(td_model *model, int32_t threads) {
  if (!model || threads < 0)
    return TD_ERR_INVALID_ARGUMENT;
  return guarded(model, [&] {
    model->config.threads = threads;
    if (model->model)
      throw invalid_parameter(
          "set the thread count before the first computation");
  });
}

td_status td_bound_count(td_model *model, int32_t *count) {
  if (!model || !count)
    return TD_ERR_INVALID_ARGUMENT;
  return guarded(model, [&] {
    *count = static_cast<int32_t>(model->setup().bound_states().size());
  });
}

td_status td_bound_energy(td_model *model, int32_t index, double *energy) {
  if (!model || !energy)
    return TD_ERR_INVALID_ARGUMENT;
  return guarded(model, [&] {
    const auto &bound = model->setup().bound_states();
    if (index < 0 || static_cast<std::size_t>(index) >= bound.size())
      throw invalid_parameter("bound-state index out of range");
    *energy = bound[static_cast<std::size_t>(index)].energy;
  });
}

td_status td_opening_amplitude(td_model *model, double k, double *g) {
  if (!model || !g)
    return TD_ERR_INVALID_ARGUMENT;
  return guarded(model, [&] {
    *g = std::real(model->setup().open_decomposition()->coeff(k));
  });
}

td_status td_sample(td_model *model, double x, double t, double out[4]) {
  if (!model || !out)
    return TD_ERR_INVALID_ARGUMENT;
  return guarded(model, [&] {
    const auto ws = model->field().sample(x, t);
    out[0] = ws.psi.real();
    out[1] = ws.psi.imag();
    out[2] = ws.dpsi_dx.real();
    out[3] = ws.dpsi_dx.imag();
  });
}

td_status td_density(td_model *model, double x, double t, double *rho) {
  if (!model || !rho)
    return TD_ERR_INVALID_ARGUMENT;
  return guarded(model,
                 [&] { *rho = density(model->field().sample(x, t)); });
}

td_status td_flux(td_model *model, double x, double t, double *j) {
  if (!model || !j)
    return TD_ERR_INVALID_ARGUMENT;
  return guarded(model, [&] { *j = flux(model->field().sample(x, t)); });
}

td_status td_well_probability(td_model *model, double t, double *w1) {
  if (!model || !w1)
    return TD_ERR_INVALID_ARGUMENT;
  return guarded(model, [&] {
    if (!model->well_integrator)
      model->well_integrator = std::make_unique<WellIntegrator>(
          model->field(), model->config.a1);
    *w1 = (*model->well_integrator)(t, effective_threads(model->config.threads));
  });
}

td_status td_run(td_model *model, const char *mode, const char *out_dir) {
  if (!model || !mode)
    return TD_ERR_INVALID_ARGUMENT;
  return guarded(model, [&] {
    SimConfig cfg = model->config;
    if (out_dir)
      cfg.output_dir = out_dir;
    const std::string m(mode);
    RunResult result;
    if (m == "eigen")
      result = run_eigen(cfg);
    else if (m == "decay")
      result = run_decay(cfg);
    else if (m == "detector")
      result = run_detector(cfg);
    else if (m == "closing-scan")
      result = run_closing_scan(cfg);
    else
      throw bad_config("unknown mode '" + m +
                       "' (eigen | decay | detector | closing-scan)");
    if (m == "decay" || m == "detector") {
      model->report = result.report;
      model->report_ready = true;
    }
  });
}

td_status td_report_json(td_model *model, char *buf, size_t buf_len,
                         size_t *needed) {
  if (!model)
    return TD_ERR_INVALID_ARGUMENT;
  return guarded(model, [&] {
    if (!model->report_ready)
      throw invalid_parameter("no report yet: run 'decay' or 'detector'");
    const auto &r = model->report;
    std::ostringstream os;
    os << "{";
    bool first = true;
    const auto field = [&os, &first](const char *key, double v) {
      if (!first)
        os << ",";
      first = false;
      os << "\"" << key << "\":" << format_value(v);
    };
    field("t_l", r.t_l);
    field("t_l_slope", r.t_l_slope);
    field("t_pl", r.t_pl);
    field("t_pl_estimate", r.t_pl_estimate);
    field("t_BL", r.t_bl);
    field("T_k0", r.T_k0);
    field("A_fit", r.A_fit);
    field("detector_X", r.detector_X);
    field("t_X", r.t_X);
    field("v_X", r.v_X);
    field("v_tilde_p", r.v_tilde_p);
    field("E_tilde_0", r.E_tilde_0);
    field("t_tun1", r.t_tun1);
    field("t_tun2", r.t_tun2);
    os << ",\"t_l_method\":\"" << r.t_l_method << "\"}";
    const std::string s = os.str();
    if (needed)
      *needed = s.size() + 1;
    if (buf && buf_len > 0) {
      const size_t n = std::min(buf_len - 1, s.size());
      std::memcpy(buf, s.data(), n);
      buf[n] = '\0';
      if (n < s.size())
        throw invalid_parameter("report buffer too small");
    }
  });
}

td_status td_reproduce_figure(const char *name, const char *out_dir,
                              int32_t threads, char *errbuf,
                              size_t errbuf_len) {
  if (!name || !out_dir)
    return TD_ERR_INVALID_ARGUMENT;
  try {
    reproduce_figure(name, out_dir, threads);
    return TD_OK;
  } catch (const Error &e) {
    if (errbuf && errbuf_len > 0) {
      std::strncpy(errbuf, e.what(), errbuf_len - 1);
      errbuf[errbuf_len - 1] = '\0';
    }
    return status_of(e.code());
  } catch (const std::exception &e) {
    if (errbuf && errbuf_len > 0) {
      std::strncpy(errbuf, e.what(), errbuf_len - 1);
      errbuf[errbuf_len - 1] = '\0';
    }
    return TD_ERR_INTERNAL;
  }
}

} // extern "C"
