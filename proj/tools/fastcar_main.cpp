// Command-line front end. Talks to the library only through the C API.

#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fastcar/fastcar.h"

namespace {

struct Globals {
  std::optional<unsigned long long> seed;
  std::string out;
  bool quiet = false;
};

void print_line(const char* line, void* user) {
  const bool quiet = *static_cast<const bool*>(user);
  // Errors are always shown; progress lines only without --quiet.
  const bool is_error = std::string(line).rfind("error:", 0) == 0;
  if (quiet && !is_error) return;
  std::fprintf(is_error ? stderr : stdout, "%s\n", line);
  std::fflush(is_error ? stderr : stdout);
}

int need_out(const Globals& g, const char* command) {
  if (!g.out.empty()) return 0;
  std::fprintf(stderr, "error: %s needs --out\n", command);
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid label codec and experiment runner"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(fastcar_version()));

  Globals g;
  app.add_option("--seed", g.seed, "Seed override for experiment runs");
  app.add_option("--out", g.out,
                 "Output file (fit-codec, transform, decode) or directory (experiment)");
  app.add_flag("--quiet", g.quiet, "Only print errors");

  auto* fit = app.add_subcommand("fit-codec", "Fit a codec from a labels CSV");
  std::string labels;
  double u = 1.5;
  std::string mode = "paper_exact";
  bool no_centering = false;
  std::string report;
  fit->add_option("labels", labels, "CSV with header id,class,property")
      ->required()
      ->check(CLI::ExistingFile);
  fit->add_option("--u", u, "Spacing factor")->capture_default_str();
  fit->add_option("--mode", mode, "paper_exact or strict_spacing")
      ->capture_default_str();
  fit->add_flag("--no-centering", no_centering, "Keep hybrid labels uncentred");
  fit->add_option("--report", report,
                  "Spacing report path (default: <out>.spacing.json)");

  auto* transform = app.add_subcommand("transform", "Encode labels to hybrid values");
  std::string codec_path;
  transform->add_option("labels", labels, "CSV with header id,class,property")
      ->required();
  transform->add_option("--codec", codec_path, "Codec JSON")->required();

  auto* decode = app.add_subcommand("decode", "Decode predictions to class and property");
  std::string predictions;
  decode->add_option("predictions", predictions, "CSV with header id,prediction")
      ->required();
  decode->add_option("--codec", codec_path, "Codec JSON")->required();

  auto* experiment = app.add_subcommand("experiment", "Run a JSON experiment config");
  std::string config;
  experiment->add_option("config", config, "Experiment config JSON")->required();

  for (auto* sub : {fit, transform, decode, experiment}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  void* user = &g.quiet;
  if (*fit) {
    if (const int rc = need_out(g, "fit-codec")) return rc;
    fastcar_transform_config cfg = fastcar_transform_config_default();
    if (fastcar_mode_parse(mode.c_str(), &cfg.mode) != FASTCAR_OK) {
      std::fprintf(stderr, "error: %s\n", fastcar_last_error());
      return 1;
    }
    cfg.u = u;
    cfg.centering = no_centering ? 0 : 1;
    return fastcar_cmd_fit_codec(labels.c_str(), &cfg, g.out.c_str(),
                                 report.empty() ? nullptr : report.c_str(),
                                 print_line, user);
  }
  if (*transform) {
    if (const int rc = need_out(g, "transform")) return rc;
    return fastcar_cmd_transform(labels.c_str(), codec_path.c_str(), g.out.c_str(),
                                 print_line, user);
  }
  if (*decode) {
    if (const int rc = need_out(g, "decode")) return rc;
    return fastcar_cmd_decode(predictions.c_str(), codec_path.c_str(),
                              g.out.c_str(), print_line, user);
  }
  const unsigned long long* seed = g.seed ? &*g.seed : nullptr;
  return fastcar_cmd_experiment(config.c_str(), seed,
                                g.out.empty() ? nullptr : g.out.c_str(),
                                print_line, user);
}
