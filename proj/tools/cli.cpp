#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "infospec/ann.hpp"
#include "infospec/core.hpp"
#include "infospec/eval.hpp"
#include "infospec/fit.hpp"
#include "infospec/io.hpp"
#include "infospec/synth.hpp"

namespace infospec::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

/// Everything a command may need; filled from the config file, then flags.
struct PipelineConfig {
  std::optional<std::uint64_t> seed;
  fs::path out = ".";

  fs::path library;
  fs::path model;
  fs::path spectrum;

  // synth
  double start_ppm = 1.0;
  double end_ppm = 5.5;
  std::size_t n_channels = 5000;
  std::vector<std::size_t> multiplicities;
  CountRange peaks_per_class;
  VariationConfig variation;

  // fit
  FitOptions fit;

  // eval
  BayesOptions bayes;

  // ann
  std::size_t ann_channels = 500;
  std::size_t n_hidden = 10;
  TrainConfig train{.max_epochs = 20000};
  std::vector<std::uint64_t> ann_seeds = {1, 2, 3, 4};
  std::optional<std::size_t> n_repeats;
  std::string ann_input = "both";
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void check_keys(const json& j, std::initializer_list<std::string_view> allowed, const char* where) {
  if (!j.is_object()) throw UsageError(std::string(where) + " must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw UsageError("unknown key '" + key + "' in " + where);
}

std::optional<double> parse_threshold(const std::string& text) {
  if (text == "auto") return std::nullopt;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size()) throw UsageError("threshold must be 'auto' or a number, got '" + text + "'");
  return v;
}

Loss parse_loss(const std::string& name) {
  if (name == "cross_entropy") return Loss::kCrossEntropy;
  if (name == "squared_error") return Loss::kSquaredError;
  throw UsageError("loss must be 'cross_entropy' or 'squared_error', got '" + name + "'");
}

PriorMode parse_priors(const std::string& name) {
  if (name == "equal") return PriorMode::kEqual;
  if (name == "empirical") return PriorMode::kEmpirical;
  throw UsageError("priors must be 'equal' or 'empirical', got '" + name + "'");
}

void apply_config(PipelineConfig& cfg, const json& j) {
  check_keys(j, {"seed", "out", "paths", "synth", "fit", "eval", "ann"}, "config");
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("out")) cfg.out = j["out"].get<std::string>();
  if (j.contains("paths")) {
    const auto& p = j["paths"];
    check_keys(p, {"library", "model", "spectrum"}, "paths");
    if (p.contains("library")) cfg.library = p["library"].get<std::string>();
    if (p.contains("model")) cfg.model = p["model"].get<std::string>();
    if (p.contains("spectrum")) cfg.spectrum = p["spectrum"].get<std::string>();
  }
  if (j.contains("synth")) {
    const auto& s = j["synth"];
    check_keys(s, {"start_ppm", "end_ppm", "n_channels", "multiplicities", "peaks_per_class", "variation"},
               "synth");
    if (s.contains("start_ppm")) cfg.start_ppm = s["start_ppm"].get<double>();
    if (s.contains("end_ppm")) cfg.end_ppm = s["end_ppm"].get<double>();
    if (s.contains("n_channels")) cfg.n_channels = s["n_channels"].get<std::size_t>();
    if (s.contains("multiplicities")) cfg.multiplicities = s["multiplicities"].get<std::vector<std::size_t>>();
    if (s.contains("peaks_per_class")) {
      const auto v = s["peaks_per_class"].get<std::vector<std::size_t>>();
      if (v.size() != 2) throw UsageError("peaks_per_class must be [lo, hi]");
      cfg.peaks_per_class = {v[0], v[1]};
    }
    if (s.contains("variation")) cfg.variation = io::variation_from_json(s["variation"], cfg.variation);
  }
  if (j.contains("fit")) {
    const auto& f = j["fit"];
    check_keys(f, {"n_bins", "threshold", "suppress_solvent", "solvent_windows"}, "fit");
    if (f.contains("n_bins")) cfg.fit.n_bins = f["n_bins"].get<std::size_t>();
    if (f.contains("threshold")) {
      cfg.fit.threshold = f["threshold"].is_string() ? parse_threshold(f["threshold"].get<std::string>())
                                                     : std::optional<double>(f["threshold"].get<double>());
    }
    if (f.contains("suppress_solvent")) cfg.fit.suppress_solvent = f["suppress_solvent"].get<bool>();
    if (f.contains("solvent_windows")) {
      cfg.fit.solvent_windows.clear();
      for (const auto& w : f["solvent_windows"]) {
        const auto v = w.get<std::vector<double>>();
        if (v.size() != 2) throw UsageError("solvent window must be [lo, hi]");
        cfg.fit.solvent_windows.push_back({v[0], v[1]});
      }
    }
  }
  if (j.contains("eval")) {
    const auto& e = j["eval"];
    check_keys(e, {"bayes_bins", "priors"}, "eval");
    if (e.contains("bayes_bins")) cfg.bayes.n_bins = e["bayes_bins"].get<std::size_t>();
    if (e.contains("priors")) cfg.bayes.priors = parse_priors(e["priors"].get<std::string>());
  }
  if (j.contains("ann")) {
    const auto& a = j["ann"];
    check_keys(a,
               {"n_channels", "n_hidden", "step_size", "epochs", "target_max_bit_error", "seeds",
                "n_repeats", "loss", "input"},
               "ann");
    if (a.contains("n_channels")) cfg.ann_channels = a["n_channels"].get<std::size_t>();
    if (a.contains("n_hidden")) cfg.n_hidden = a["n_hidden"].get<std::size_t>();
    if (a.contains("step_size")) cfg.train.step_size = a["step_size"].get<double>();
    if (a.contains("epochs")) cfg.train.max_epochs = a["epochs"].get<std::size_t>();
    if (a.contains("target_max_bit_error")) {
      if (a["target_max_bit_error"].is_null())
        cfg.train.target_max_bit_error.reset();
      else
        cfg.train.target_max_bit_error = a["target_max_bit_error"].get<double>();
    }
    if (a.contains("seeds")) cfg.ann_seeds = a["seeds"].get<std::vector<std::uint64_t>>();
    if (a.contains("n_repeats")) cfg.n_repeats = a["n_repeats"].get<std::size_t>();
    if (a.contains("loss")) cfg.train.loss = parse_loss(a["loss"].get<std::string>());
    if (a.contains("input")) cfg.ann_input = a["input"].get<std::string>();
  }
}

/// Raw flag values; `Flag::given` tells whether the user passed it.
struct Flags {
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  std::string library;
  std::string model;
  std::string spectrum;
  std::size_t n_channels = 0;
  std::vector<std::size_t> multiplicities;
  std::size_t n_bins = 0;
  std::string threshold;
  bool no_suppress = false;
  std::size_t bayes_bins = 0;
  std::string priors;
  std::size_t ann_channels = 0;
  std::size_t n_hidden = 0;
  double step_size = 0.0;
  std::size_t epochs = 0;
  double target = 0.0;
  std::vector<std::uint64_t> seeds;
  std::size_t n_repeats = 0;
  std::string loss;
  std::string input;
};

struct Command {
  CLI::App* app = nullptr;
  std::vector<std::pair<CLI::Option*, std::function<void(PipelineConfig&)>>> overrides;

  template <typename T>
  void option(const std::string& name, T& target, const std::string& help,
              std::function<void(PipelineConfig&)> apply) {
    overrides.emplace_back(app->add_option(name, target, help), std::move(apply));
  }
  void flag(const std::string& name, bool& target, const std::string& help,
            std::function<void(PipelineConfig&)> apply) {
    overrides.emplace_back(app->add_flag(name, target, help), std::move(apply));
  }
};

void add_common(Command& cmd, Flags& f) {
  cmd.app->add_option("--config", f.config, "JSON config file (flags override it)");
  cmd.option("--seed", f.seed, "master seed", [&f](PipelineConfig& c) { c.seed = f.seed; });
  cmd.option("--out", f.out, "output directory", [&f](PipelineConfig& c) { c.out = f.out; });
}

void add_fit_options(Command& cmd, Flags& f) {
  cmd.option("--bins", f.n_bins, "histogram bins per channel",
             [&f](PipelineConfig& c) { c.fit.n_bins = f.n_bins; });
  cmd.option("--threshold", f.threshold, "maximum threshold or 'auto'",
             [&f](PipelineConfig& c) { c.fit.threshold = parse_threshold(f.threshold); });
  cmd.flag("--no-solvent-suppression", f.no_suppress, "skip the first normalization",
           [&f](PipelineConfig& c) { c.fit.suppress_solvent = !f.no_suppress; });
}

PipelineConfig resolve(const Command& cmd, const Flags& f) {
  PipelineConfig cfg;
  if (!f.config.empty()) {
    const auto text = io::read_file(f.config);
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw UsageError("config '" + f.config + "' is not valid JSON: " + e.what());
    }
    try {
      apply_config(cfg, j);
    } catch (const json::exception& e) {
      throw UsageError("config '" + f.config + "': " + e.what());
    }
  }
  for (const auto& [opt, apply] : cmd.overrides)
    if (opt->count() > 0) apply(cfg);
  return cfg;
}

fs::path require_path(const fs::path& p, const char* what) {
  if (p.empty()) throw UsageError(std::string("missing ") + what + " path");
  if (!fs::exists(p)) throw Error(Errc::kIo, std::string(what) + " '" + p.string() + "' does not exist");
  return p;
}

void write_text(const fs::path& path, const std::string& text) { io::write_file(path, text); }

template <typename F>
std::string render(F&& f) {
  std::ostringstream ss;
  f(ss);
  return ss.str();
}

std::string sanitize(const std::string& label) {
  std::string out = label;
  for (char& ch : out)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' && ch != '_') ch = '_';
  return out;
}

// --- commands ----------------------------------------------------------------

void cmd_synth(const PipelineConfig& cfg, std::ostream& out) {
  if (!cfg.seed) throw UsageError("synth requires --seed (or \"seed\" in the config)");
  const auto mult = cfg.multiplicities.empty() ? reference_multiplicities()
                                               : ClassMultiplicities(cfg.multiplicities);
  const PpmGrid grid(cfg.start_ppm, cfg.end_ppm, cfg.n_channels);
  const auto lib = gen_library(mult.n_classes(), mult, cfg.variation, grid, *cfg.seed, cfg.peaks_per_class);
  const fs::path path = cfg.library.empty() ? cfg.out / "library.json" : cfg.library;
  write_text(path, io::dump(io::to_json(lib)));
  out << "wrote " << lib.size() << " spectra in " << mult.n_classes() << " classes to "
      << path.string() << "\n";
}

void cmd_fit_train(const PipelineConfig& cfg, std::ostream& out) {
  const auto lib = io::read_library(require_path(cfg.library, "library"));
  const auto model = fit_train(lib, cfg.fit);
  const fs::path path = cfg.model.empty() ? cfg.out / "model.json" : cfg.model;
  write_text(path, io::dump(io::to_json(model)));
  out << "trained on " << lib.size() << " spectra, " << model.grid.size() << " channels, "
      << model.n_bins << " bins, max threshold " << io::format_number(model.max_threshold)
      << "\nwrote " << path.string() << "\n";
}

FitModel load_model(const fs::path& path) {
  const auto text = io::read_file(require_path(path, "model"));
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::kParse, "model '" + path.string() + "': " + e.what());
  }
  return io::model_from_json(j);
}

void cmd_fit_apply(const PipelineConfig& cfg, std::ostream& out) {
  const auto model = load_model(cfg.model);
  if (!cfg.spectrum.empty() == !cfg.library.empty())
    throw UsageError("fit apply needs exactly one of --spectrum or --library");
  std::size_t written = 0;
  if (!cfg.spectrum.empty()) {
    const auto s = io::read_spectrum_csv(require_path(cfg.spectrum, "spectrum"));
    const auto fis = fit_apply(model, s);
    const fs::path path = cfg.out / (cfg.spectrum.stem().string() + ".fis.csv");
    write_text(path, render([&](std::ostream& os) { io::write_information_csv(os, fis); }));
    ++written;
  } else {
    const auto lib = io::read_library(require_path(cfg.library, "library"));
    require_valid(lib);
    for (std::size_t i = 0; i < lib.size(); ++i) {
      const auto fis = fit_apply(model, lib[i].spectrum);
      std::ostringstream name;
      name << "fis_" << std::setw(3) << std::setfill('0') << i << '_' << sanitize(lib[i].label) << ".csv";
      write_text(cfg.out / name.str(), render([&](std::ostream& os) { io::write_information_csv(os, fis); }));
      ++written;
    }
  }
  out << "wrote " << written << " information spectra to " << cfg.out.string() << "\n";
}

json evaluate_section(const SpectrumLibrary& lib, std::span<const std::vector<double>> vectors,
                      const BayesOptions& bayes, const IndexPartition& part, const fs::path& samples_path,
                      std::ostream& err) {
  const auto mult = lib.multiplicities();
  const auto measured = correlation_matrix(vectors);
  json section;
  section["distances"] = io::to_json(distances(measured, ideal_matrix(mult), part));
  const auto intra = gather(measured, part.intra);
  const auto inter = gather(measured, part.inter);
  try {
    section["bayes"] = io::to_json(bayes_error(intra, inter, bayes));
  } catch (const Error& e) {
    err << "warning: bayes error unavailable: " << e.what() << "\n";
    section["bayes"] = nullptr;
    section["bayes_error"] = e.what();
  }
  write_text(samples_path, render([&](std::ostream& os) { io::write_samples_csv(os, part, intra, inter); }));
  return section;
}

void cmd_eval(const PipelineConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto lib = io::read_library(require_path(cfg.library, "library"));
  require_valid(lib);
  const auto part = partition_indices(lib.multiplicities());

  json report;
  report["raw"] = evaluate_section(lib, library_vectors(lib), cfg.bayes, part,
                                   cfg.out / "samples_raw.csv", err);
  try {
    const auto model = cfg.model.empty() ? fit_train(lib, cfg.fit) : load_model(cfg.model);
    std::vector<std::vector<double>> fis;
    for (const auto& e : lib.entries()) fis.push_back(fit_apply(model, e.spectrum).info);
    report["fit"] = evaluate_section(lib, fis, cfg.bayes, part, cfg.out / "samples_fit.csv", err);
  } catch (const Error& e) {
    if (e.code() == Errc::kIo || e.code() == Errc::kParse || e.code() == Errc::kGridMismatch) throw;
    err << "warning: FIT evaluation unavailable: " << e.what() << "\n";
    report["fit"] = json{{"error", e.what()}};
  }
  const fs::path path = cfg.out / "eval.json";
  write_text(path, report.dump(2) + "\n");

  for (const char* key : {"raw", "fit"}) {
    const auto& s = report[key];
    if (!s.contains("distances")) continue;
    const auto& d = s["distances"];
    out << key << ": d_intra " << io::format_number(d["d_intra"].get<double>()) << ", d_inter "
        << io::format_number(d["d_inter"].get<double>()) << ", d_total "
        << io::format_number(d["d_total"].get<double>()) << ", d_avg "
        << io::format_number(d["d_avg"].get<double>());
    if (!s["bayes"].is_null())
      out << ", bayes error " << io::format_number(s["bayes"]["error_probability"].get<double>());
    out << "\n";
  }
  out << "wrote " << path.string() << "\n";
}

void cmd_ann(const PipelineConfig& cfg, std::ostream& out) {
  if (cfg.train.max_epochs < 1) throw UsageError("epochs must be >= 1");
  if (cfg.ann_seeds.empty()) throw UsageError("at least one ANN seed is required");
  TrainConfig train = cfg.train;
  train.n_repeats = cfg.n_repeats.value_or(cfg.ann_seeds.size());
  if (train.n_repeats != cfg.ann_seeds.size())
    throw UsageError("n_repeats " + std::to_string(train.n_repeats) + " does not match " +
                     std::to_string(cfg.ann_seeds.size()) + " seeds");
  if (cfg.ann_input != "fit" && cfg.ann_input != "raw" && cfg.ann_input != "both")
    throw UsageError("ann input must be 'fit', 'raw' or 'both'");

  auto lib = io::read_library(require_path(cfg.library, "library"));
  require_valid(lib);
  if (cfg.ann_channels != 0 && cfg.ann_channels != lib.grid().size())
    lib = resample(lib, PpmGrid(lib.grid().start_ppm(), lib.grid().end_ppm(), cfg.ann_channels));

  const auto mult = lib.multiplicities();
  std::vector<std::size_t> classes(lib.size());
  for (std::size_t i = 0; i < lib.size(); ++i) classes[i] = mult.class_of(i);
  const auto targets = one_hot_targets(classes, mult.n_classes());
  const MlpTopology topology{lib.grid().size(), cfg.n_hidden, mult.n_classes()};

  auto run = [&](const std::string& name, const std::vector<std::vector<double>>& inputs) {
    const auto result = train_repeated(topology, inputs, targets, train, cfg.ann_seeds);
    write_text(cfg.out / ("curve_" + name + ".csv"),
               render([&](std::ostream& os) { io::write_curve_csv(os, result.mean_curve); }));
    write_text(cfg.out / ("network_" + name + ".json"), io::dump(io::to_json(result.runs.front().network)));
    const auto& curve = result.mean_curve.max_bit_error;
    out << name << ": " << curve.size() << " epochs, final max bit error "
        << io::format_number(curve.back()) << ", training accuracy "
        << io::format_number(result.mean_curve.accuracy) << "\n";
  };

  if (cfg.ann_input == "raw" || cfg.ann_input == "both") run("raw", library_vectors(lib));
  if (cfg.ann_input == "fit" || cfg.ann_input == "both") {
    const auto model = fit_train(lib, cfg.fit);
    std::vector<std::vector<double>> fis;
    for (const auto& e : lib.entries()) fis.push_back(fit_apply(model, e.spectrum).info);
    run("fit", fis);
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Frequency-to-information transformation toolkit for 1D spectra", "infospec"};
  app.require_subcommand(1);
  Flags f;

  Command synth{app.add_subcommand("synth", "generate a synthetic spectrum library")};
  add_common(synth, f);
  synth.option("--library", f.library, "output library path (default <out>/library.json)",
               [&f](PipelineConfig& c) { c.library = f.library; });
  synth.option("--channels", f.n_channels, "channels on the 1.0-5.5 ppm grid",
               [&f](PipelineConfig& c) { c.n_channels = f.n_channels; });
  synth.app->add_option("--multiplicities", f.multiplicities, "spectra per class")->delimiter(',');
  synth.overrides.emplace_back(synth.app->get_option("--multiplicities"),
                               [&f](PipelineConfig& c) { c.multiplicities = f.multiplicities; });

  auto* fit_app = app.add_subcommand("fit", "train or apply a FIT model");
  fit_app->require_subcommand(1);
  Command train{fit_app->add_subcommand("train", "train a model from a library")};
  add_common(train, f);
  train.option("--library", f.library, "library JSON", [&f](PipelineConfig& c) { c.library = f.library; });
  train.option("--model", f.model, "output model path (default <out>/model.json)",
               [&f](PipelineConfig& c) { c.model = f.model; });
  add_fit_options(train, f);

  Command apply{fit_app->add_subcommand("apply", "transform spectra into information spectra")};
  add_common(apply, f);
  apply.option("--model", f.model, "model JSON", [&f](PipelineConfig& c) { c.model = f.model; });
  apply.option("--spectrum", f.spectrum, "single spectrum CSV",
               [&f](PipelineConfig& c) { c.spectrum = f.spectrum; });
  apply.option("--library", f.library, "library JSON", [&f](PipelineConfig& c) { c.library = f.library; });

  Command eval{app.add_subcommand("eval", "correlation distances and Bayes error, raw vs FIT")};
  add_common(eval, f);
  eval.option("--library", f.library, "library JSON", [&f](PipelineConfig& c) { c.library = f.library; });
  eval.option("--model", f.model, "model JSON (trained on the library if omitted)",
              [&f](PipelineConfig& c) { c.model = f.model; });
  eval.option("--bayes-bins", f.bayes_bins, "histogram bins for the Bayes estimate",
              [&f](PipelineConfig& c) { c.bayes.n_bins = f.bayes_bins; });
  eval.option("--priors", f.priors, "equal | empirical",
              [&f](PipelineConfig& c) { c.bayes.priors = parse_priors(f.priors); });
  add_fit_options(eval, f);

  Command ann{app.add_subcommand("ann", "train the MLP on raw and/or FIT inputs")};
  add_common(ann, f);
  ann.option("--library", f.library, "library JSON", [&f](PipelineConfig& c) { c.library = f.library; });
  ann.option("--channels", f.ann_channels, "resample inputs to this many channels (0 keeps the grid)",
             [&f](PipelineConfig& c) { c.ann_channels = f.ann_channels; });
  ann.option("--hidden", f.n_hidden, "hidden neurons", [&f](PipelineConfig& c) { c.n_hidden = f.n_hidden; });
  ann.option("--step", f.step_size, "step size", [&f](PipelineConfig& c) { c.train.step_size = f.step_size; });
  ann.option("--epochs", f.epochs, "maximum epochs", [&f](PipelineConfig& c) { c.train.max_epochs = f.epochs; });
  ann.option("--target", f.target, "stop once the max bit error reaches this",
             [&f](PipelineConfig& c) { c.train.target_max_bit_error = f.target; });
  ann.app->add_option("--seeds", f.seeds, "one seed per repeat")->delimiter(',');
  ann.overrides.emplace_back(ann.app->get_option("--seeds"),
                             [&f](PipelineConfig& c) { c.ann_seeds = f.seeds; });
  ann.option("--repeats", f.n_repeats, "number of repeats (must match the seed count)",
             [&f](PipelineConfig& c) { c.n_repeats = f.n_repeats; });
  ann.option("--loss", f.loss, "cross_entropy | squared_error",
             [&f](PipelineConfig& c) { c.train.loss = parse_loss(f.loss); });
  ann.option("--input", f.input, "fit | raw | both", [&f](PipelineConfig& c) { c.ann_input = f.input; });
  add_fit_options(ann, f);

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (synth.app->parsed()) cmd_synth(resolve(synth, f), out);
    else if (train.app->parsed()) cmd_fit_train(resolve(train, f), out);
    else if (apply.app->parsed()) cmd_fit_apply(resolve(apply, f), out);
    else if (eval.app->parsed()) cmd_eval(resolve(eval, f), out, err);
    else if (ann.app->parsed()) cmd_ann(resolve(ann, f), out);
    return kExitOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace infospec::cli
