#include "fastcar/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "fastcar/baseline.hpp"
#include "fastcar/bench.hpp"
#include "fastcar/consolidated.hpp"
#include "fastcar/error.hpp"

namespace fastcar {

namespace {

const std::set<std::string> kPipelines{"fastcar", "baseline", "ablation",
                                       "timing"};

[[noreturn]] void schema_error(const std::string& pointer,
                               const std::string& what) {
  throw Error(ErrorCode::SchemaViolation,
              (pointer.empty() ? std::string("/") : pointer) + ": " + what);
}

// Walks one JSON object, rejecting keys nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const nlohmann::json& node, std::string pointer)
      : node_(node), pointer_(std::move(pointer)) {
    if (!node_.is_object()) schema_error(pointer_, "expected an object");
  }

  ~ObjectReader() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.count(key)) schema_error(child(key), "unknown key");
    }
  }

  std::string child(const std::string& key) const {
    std::string escaped;
    for (const char c : key) {
      if (c == '~') escaped += "~0";
      else if (c == '/') escaped += "~1";
      else escaped += c;
    }
    return pointer_ + "/" + escaped;
  }

  const nlohmann::json* get(const std::string& key) {
    seen_.insert(key);
    const auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  void number(const std::string& key, double& out) {
    if (const auto* v = get(key)) {
      if (!v->is_number()) schema_error(child(key), "expected a number");
      out = v->get<double>();
    }
  }

  template <typename Int>
  void count(const std::string& key, Int& out) {
    if (const auto* v = get(key)) {
      if (!v->is_number_integer() || v->get<long long>() < 0) {
        schema_error(child(key), "expected a non-negative integer");
      }
      out = static_cast<Int>(v->get<long long>());
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const auto* v = get(key)) {
      if (!v->is_boolean()) schema_error(child(key), "expected true or false");
      out = v->get<bool>();
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const auto* v = get(key)) {
      if (!v->is_string()) schema_error(child(key), "expected a string");
      out = v->get<std::string>();
    }
  }

 private:
  const nlohmann::json& node_;
  std::string pointer_;
  std::set<std::string> seen_;
};

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::string& text) {
  std::filesystem::path p(text);
  return p.is_absolute() || base.empty() ? p : base / p;
}

void read_synth(const nlohmann::json& node, const std::string& pointer,
                SynthParams& synth) {
  ObjectReader r(node, pointer);
  r.count("n_classes", synth.n_classes);
  r.count("per_class", synth.per_class);
  r.count("feature_dim", synth.feature_dim);
  r.number("separation", synth.separation);
  r.number("noise_sd", synth.noise_sd);
  r.number("cluster_sd", synth.cluster_sd);
  if (const auto* v = r.get("intervals")) {
    if (!v->is_array()) schema_error(r.child("intervals"), "expected [[a, b], ...]");
    for (std::size_t i = 0; i < v->size(); ++i) {
      const auto& pair = (*v)[i];
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() ||
          !pair[1].is_number()) {
        schema_error(r.child("intervals") + "/" + std::to_string(i),
                     "expected a [lo, hi] number pair");
      }
      synth.intervals.push_back({pair[0].get<double>(), pair[1].get<double>()});
    }
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& doc,
                                             const std::filesystem::path& base_dir) {
  ExperimentConfig cfg;
  ObjectReader root(doc, "");
  root.count("seed", cfg.seed);

  if (const auto* ds = root.get("dataset")) {
    ObjectReader r(*ds, "/dataset");
    const int sources = static_cast<int>(r.has("synth")) + r.has("csv") + r.has("jsonl");
    if (sources != 1) {
      schema_error("/dataset", "exactly one of synth, csv, jsonl is required");
    }
    if (const auto* synth = r.get("synth")) {
      cfg.dataset.kind = DatasetSource::Kind::Synth;
      read_synth(*synth, "/dataset/synth", cfg.dataset.synth);
    }
    std::string path;
    if (r.has("csv")) {
      r.string("csv", path);
      cfg.dataset.kind = DatasetSource::Kind::Csv;
      cfg.dataset.path = resolve(base_dir, path);
    }
    if (r.has("jsonl")) {
      r.string("jsonl", path);
      cfg.dataset.kind = DatasetSource::Kind::Jsonl;
      cfg.dataset.path = resolve(base_dir, path);
    }
  }

  if (const auto* t = root.get("transform")) {
    ObjectReader r(*t, "/transform");
    r.number("u", cfg.transform.u);
    r.boolean("centering", cfg.transform.centering);
    std::string mode;
    r.string("mode", mode);
    if (!mode.empty()) {
      try {
        cfg.transform.mode = spacing_mode_from_string(mode);
      } catch (const Error& e) {
        schema_error("/transform/mode", e.what());
      }
    }
    try {
      cfg.transform.validate();
    } catch (const Error& e) {
      schema_error("/transform/u", e.what());
    }
  }

  if (const auto* t = root.get("train")) {
    ObjectReader r(*t, "/train");
    r.number("learning_rate", cfg.train.learning_rate);
    r.number("weight_decay", cfg.train.weight_decay);
    r.number("factor", cfg.train.scheduler.factor);
    r.count("patience", cfg.train.scheduler.patience);
    r.count("max_epochs", cfg.train.max_epochs);
    r.count("batch_size", cfg.train.batch_size);
    if (const auto* h = r.get("hidden")) {
      if (!h->is_array() || h->empty()) {
        schema_error("/train/hidden", "expected a non-empty array of widths");
      }
      cfg.train.hidden_widths.clear();
      for (std::size_t i = 0; i < h->size(); ++i) {
        const auto& w = (*h)[i];
        if (!w.is_number_integer() || w.get<long long>() < 1) {
          schema_error("/train/hidden/" + std::to_string(i),
                       "expected a positive integer");
        }
        cfg.train.hidden_widths.push_back(w.get<std::size_t>());
      }
    }
    try {
      cfg.train.validate();
    } catch (const Error& e) {
      schema_error("/train", e.what());
    }
  }

  if (const auto* p = root.get("pipelines")) {
    if (!p->is_array()) schema_error("/pipelines", "expected an array of names");
    cfg.pipelines.clear();
    for (std::size_t i = 0; i < p->size(); ++i) {
      const auto& name = (*p)[i];
      if (!name.is_string() || !kPipelines.count(name.get<std::string>())) {
        schema_error("/pipelines/" + std::to_string(i),
                     "expected one of fastcar, baseline, ablation, timing");
      }
      cfg.pipelines.push_back(name.get<std::string>());
    }
  }

  if (const auto* t = root.get("timing")) {
    ObjectReader r(*t, "/timing");
    r.count("repeats", cfg.timing_repeats);
    r.count("infer_items", cfg.timing_infer_items);
    if (cfg.timing_repeats == 0 || cfg.timing_infer_items == 0) {
      schema_error("/timing", "repeats and infer_items must be positive");
    }
  }

  std::string out;
  root.string("output_dir", out);
  if (!out.empty()) cfg.output_dir = resolve(base_dir, out);
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::Parse, path.string() + ": " + e.what());
  }
  return from_json(doc, path.parent_path());
}

bool ExperimentConfig::wants(const std::string& pipeline) const {
  return std::find(pipelines.begin(), pipelines.end(), pipeline) !=
         pipelines.end();
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json doc;
  doc["seed"] = seed;
  switch (dataset.kind) {
    case DatasetSource::Kind::Synth: {
      const auto& s = dataset.synth;
      auto intervals = nlohmann::json::array();
      for (const auto& b : s.intervals) intervals.push_back({b.lo, b.hi});
      doc["dataset"]["synth"] = {{"n_classes", s.n_classes},
                                 {"per_class", s.per_class},
                                 {"feature_dim", s.feature_dim},
                                 {"separation", s.separation},
                                 {"noise_sd", s.noise_sd},
                                 {"cluster_sd", s.cluster_sd},
                                 {"intervals", intervals}};
      break;
    }
    case DatasetSource::Kind::Csv:
      doc["dataset"]["csv"] = dataset.path.string();
      break;
    case DatasetSource::Kind::Jsonl:
      doc["dataset"]["jsonl"] = dataset.path.string();
      break;
  }
  doc["transform"] = {{"u", transform.u},
                      {"mode", to_string(transform.mode)},
                      {"centering", transform.centering}};
  auto train_json = train.to_json();
  train_json.erase("seed");
  doc["train"] = train_json;
  doc["pipelines"] = pipelines;
  doc["timing"] = {{"repeats", timing_repeats},
                   {"infer_items", timing_infer_items}};
  return doc;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text,
                std::vector<std::filesystem::path>& written) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
  written.push_back(path);
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc,
                std::vector<std::filesystem::path>& written) {
  write_text(path, doc.dump(2) + "\n", written);
}

std::string percent(double fraction) {
  std::ostringstream out;
  out.precision(4);
  out << 100.0 * fraction << "%";
  return out.str();
}

}  // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& config,
                                 const LogFn& log) {
  auto say = [&](const std::string& line) {
    if (log) log(line);
  };
  ExperimentOutcome outcome;
  LabeledDataset dataset;
  switch (config.dataset.kind) {
    case DatasetSource::Kind::Synth: {
      SynthParams params = config.dataset.synth;
      params.seed = config.seed;
      dataset = synth_generate(params);
      break;
    }
    case DatasetSource::Kind::Csv:
      dataset = load_csv(config.dataset.path);
      break;
    case DatasetSource::Kind::Jsonl:
      dataset = load_jsonl(config.dataset.path);
      break;
  }
  say("dataset: " + std::to_string(dataset.size()) + " records, " +
      std::to_string(dataset.n_classes()) + " classes, " +
      std::to_string(dataset.feature_dim()) + " features");

  const SplitAssignment splits = split(dataset, config.seed);
  TrainConfig train = config.train;
  train.seed = config.seed;

  std::filesystem::create_directories(config.output_dir);
  const auto& dir = config.output_dir;
  auto& written = outcome.written;

  nlohmann::json resolved = config.to_json();
  resolved["splits"] = {{"train", splits.train.size()},
                        {"val", splits.val.size()},
                        {"test", splits.test.size()}};
  write_json(dir / "config.resolved.json", resolved, written);

  nlohmann::json wall_clock = nlohmann::json::object();

  if (config.wants("fastcar")) {
    say("fastcar: training single-output regressor on hybrid labels");
    const auto run = run_fastcar(dataset, splits, config.transform, train);
    outcome.spacing_violations = !run.spacing.good();
    if (!run.spacing.good()) say(run.spacing.render());
    nlohmann::json doc;
    doc["report"] = run.report.to_json();
    doc["spacing"] = run.spacing.to_json();
    doc["guideline"] = run.guideline ? run.guideline->to_json() : nlohmann::json(nullptr);
    doc["trace"] = run.trace.to_json();
    write_json(dir / "fastcar_report.json", doc, written);
    write_json(dir / "fastcar_codec.json", run.codec.to_json(), written);
    write_json(dir / "fastcar_checkpoint.json", run.model.to_json(), written);
    wall_clock["fastcar"] = {{"wall_train_ms", *run.report.wall_train_ms},
                             {"wall_infer_ms", *run.report.wall_infer_ms}};
    say("fastcar: accuracy " + percent(run.report.accuracy) + ", MAPE " +
        percent(run.report.mape) + ", clamped " +
        std::to_string(run.report.n_clamped) + "/" +
        std::to_string(run.report.n_samples));
  }

  if (config.wants("baseline")) {
    say("baseline: training two-head network with equal loss weights");
    const auto run = run_baseline(dataset, splits, train);
    nlohmann::json doc;
    doc["report"] = run.report.to_json();
    doc["trace"] = run.trace.to_json();
    write_json(dir / "baseline_report.json", doc, written);
    write_json(dir / "baseline_checkpoint.json", run.model.to_json(), written);
    wall_clock["baseline"] = {{"wall_train_ms", *run.report.wall_train_ms},
                              {"wall_infer_ms", *run.report.wall_infer_ms}};
    say("baseline: accuracy " + percent(run.report.accuracy) + ", MAPE " +
        percent(run.report.mape));
  }

  if (config.wants("ablation")) {
    say("ablation: good/bad labels x centering");
    const auto table = run_ablation(dataset, splits, config.transform, train);
    write_json(dir / "ablation.json", table.to_json(), written);
    const auto text = table.render();
    write_text(dir / "ablation.txt", text, written);
    say(text);
  }

  if (config.wants("timing")) {
    say("timing: " + std::to_string(config.timing_repeats) + " repeats");
    const auto timing = run_timing(dataset, splits, config.transform, train,
                                   config.timing_repeats,
                                   config.timing_infer_items);
    write_json(dir / "timing.json", timing.to_json(), written);
    const auto text = timing.render();
    write_text(dir / "timing.txt", text, written);
    say(text);
  }

  write_json(dir / "wall_clock.json", wall_clock, written);
  return outcome;
}

}  // namespace fastcar
