// Experiment runner for the tunneling-decay simulator. Talks to the core
// exclusively through the C API in tunneldecay.h.
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tunneldecay.h"

namespace {

// exit codes: 0 success, 2 validation error, 3 accuracy failure, 1 other
int exit_code_of(td_status st) {
  switch (st) {
  case TD_OK:
    return 0;
  case TD_ERR_BAD_CONFIG:
  case TD_ERR_INVALID_ARGUMENT:
    return 2;
  case TD_ERR_ACCURACY:
    return 3;
  default:
    return 1;
  }
}

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  int threads = 0;
};

int run_mode(const char *mode, const CommonOpts &opts) {
  td_model *model = nullptr;
  td_status st;
  if (opts.config_path.empty()) {
    std::string json = "{";
    if (opts.threads > 0)
      json += "\"threads\": " + std::to_string(opts.threads);
    json += "}";
    st = td_model_create(json.c_str(), &model);
  } else {
    st = td_model_create_from_file(opts.config_path.c_str(), &model);
  }
  if (st != TD_OK) {
    std::fprintf(stderr, "error: %s\n", td_last_error(model));
    td_model_destroy(model);
    return exit_code_of(st);
  }
  if (opts.threads > 0)
    td_model_set_threads(model, opts.threads);
  st = td_run(model, mode, opts.out_dir.empty() ? nullptr : opts.out_dir.c_str());
  if (st != TD_OK) {
    std::fprintf(stderr, "error: %s\n", td_last_error(model));
    td_model_destroy(model);
    return exit_code_of(st);
  }
  if (std::string(mode) == "decay" || std::string(mode) == "detector") {
    std::vector<char> buf(4096);
    if (td_report_json(model, buf.data(), buf.size(), nullptr) == TD_OK)
      std::printf("%s\n", buf.data());
  }
  td_model_destroy(model);
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"tunneling decay of a localized state: exact spectral "
               "simulator and timescale extraction"};
  app.require_subcommand(1);

  CommonOpts opts;
  const auto add_common = [&](CLI::App *cmd) {
    cmd->add_option("--config", opts.config_path, "JSON experiment config");
    cmd->add_option("--out", opts.out_dir, "output directory for artifacts");
    cmd->add_option("--threads", opts.threads,
                    "worker threads (speed only, never results)");
  };

  auto *eigen = app.add_subcommand(
      "eigen", "dump bound and continuum state data plus G(k)");
  add_common(eigen);
  auto *decay = app.add_subcommand(
      "decay", "well-probability decay, edge traces, timescale report");
  add_common(decay);
  auto *detector = app.add_subcommand(
      "detector", "remote-detector traces and extrapolated tunneling times");
  add_common(detector);
  auto *closing = app.add_subcommand(
      "closing-scan", "escaped fraction and peak time vs closing time");
  add_common(closing);

  auto *figure = app.add_subcommand(
      "figure", "reproduce the dataset behind one reference figure");
  std::string fig_name;
  figure->add_option("name", fig_name, "fig2 .. fig10")->required();
  add_common(figure);

  CLI11_PARSE(app, argc, argv);

  if (eigen->parsed())
    return run_mode("eigen", opts);
  if (decay->parsed())
    return run_mode("decay", opts);
  if (detector->parsed())
    return run_mode("detector", opts);
  if (closing->parsed())
    return run_mode("closing-scan", opts);
  if (figure->parsed()) {
    char err[1024] = {0};
    const td_status st = td_reproduce_figure(
        fig_name.c_str(), opts.out_dir.empty() ? "." : opts.out_dir.c_str(),
        opts.threads, err, sizeof(err));
    if (st != TD_OK) {
      std::fprintf(stderr, "error: %s\n", err);
      return exit_code_of(st);
    }
    return 0;
  }
  return 2;
}
