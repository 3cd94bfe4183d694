#include "cli.hpp"

#include "mgcnn/checkpoint.hpp"
#include "mgcnn/dataset.hpp"
#include "mgcnn/metrics.hpp"
#include "mgcnn/pipeline.hpp"
#include "mgcnn/synth.hpp"
#include "mgcnn/trainer.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#ifndef MGCNN_VERSION
#define MGCNN_VERSION "dev"
#endif

namespace mgcnn::cli {

namespace fs = std::filesystem;

namespace {

struct CommonOpts {
  int threads = 0;  // 0 = machine parallelism
  bool serial = false;

  int resolved_threads() const {
    if (serial) return 1;
    if (threads > 0) return threads;
    return std::max(1u, std::thread::hardware_concurrency());
  }
};

struct PipelineOpts {
  std::string data_dir;
  std::string topology;
  double collinearity_threshold = 0.8;
  long gap_limit = 60;
  int train_days = 19;
  int total_days = 20;
  double speed_floor = 1.0;
  bool keep_outliers = false;

  PipelineConfig config() const {
    PipelineConfig c;
    c.collinearity_threshold = collinearity_threshold;
    c.gap_limit = gap_limit;
    c.train_days = train_days;
    c.total_days = total_days;
    c.speed_floor_mph = speed_floor;
    c.replace_outliers = !keep_outliers;
    return c;
  }
};

struct ModelOpts {
  int lookback = 10;
  int horizon = 5;
  int order = 3;
  int hidden1 = 32;
  int hidden2 = 32;
};

struct TrainOpts {
  double learning_rate = 0.0007;
  double lr_decay = 0.1;
  int lr_decay_every = 10;
  int batch_size = 16;
  int epochs = 50;
  int patience = 10;
  double dropout = 0.35;
  std::uint64_t seed = 7;

  TrainConfig config(int threads) const {
    TrainConfig c;
    c.learning_rate = learning_rate;
    c.lr_decay_factor = lr_decay;
    c.lr_decay_every = lr_decay_every;
    c.batch_size = batch_size;
    c.epochs = epochs;
    c.early_stop_patience = patience;
    c.dropout_rate = dropout;
    c.seed = seed;
    c.threads = threads;
    return c;
  }
};

void add_common(CLI::App* sub, CommonOpts& o) {
  sub->add_option("--threads", o.threads, "Worker threads; 0 uses every core")
      ->envname("MGCNN_THREADS")
      ->check(CLI::NonNegativeNumber);
  sub->add_flag("--serial", o.serial, "Single-threaded, for bit-reproducible runs");
}

void add_pipeline(CLI::App* sub, PipelineOpts& o, bool data_required = true) {
  auto* d = sub->add_option("--data-dir", o.data_dir, "Directory holding topology.txt and one CSV per intersection");
  if (data_required) d->required();
  sub->add_option("--topology", o.topology, "Topology file (default: <data-dir>/topology.txt)");
  sub->add_option("--collinearity-threshold", o.collinearity_threshold,
                  "Drop an attribute when |r| with a kept one reaches this")
      ->check(CLI::Range(0.0, 1.0));
  sub->add_option("--gap-limit", o.gap_limit, "Longest fillable gap, in minutes");
  sub->add_option("--train-days", o.train_days, "Days whose minutes train the model");
  sub->add_option("--total-days", o.total_days, "Days in the corridor record; the rest after training are test");
  sub->add_option("--speed-floor", o.speed_floor, "Lowest speed (mph) used for edge travel times");
  sub->add_flag("--keep-outliers", o.keep_outliers, "Skip IQR outlier replacement");
}

void add_model(CLI::App* sub, ModelOpts& o, bool with_lookback = true, bool with_horizon = true) {
  if (with_lookback) sub->add_option("--lookback", o.lookback, "Lookback window M in minutes")->check(CLI::PositiveNumber);
  if (with_horizon) sub->add_option("--horizon", o.horizon, "Prediction horizon N in minutes")->check(CLI::PositiveNumber);
  sub->add_option("--order", o.order, "Chebyshev order K of both graph convolutions")->check(CLI::PositiveNumber);
  sub->add_option("--hidden1", o.hidden1, "Channels of the first graph convolution")->check(CLI::PositiveNumber);
  sub->add_option("--hidden2", o.hidden2, "Channels of the second graph convolution")->check(CLI::PositiveNumber);
}

void add_train(CLI::App* sub, TrainOpts& o) {
  sub->add_option("--lr", o.learning_rate, "Adam learning rate");
  sub->add_option("--lr-decay", o.lr_decay, "Learning-rate multiplier applied every --lr-decay-every epochs");
  sub->add_option("--lr-decay-every", o.lr_decay_every, "Epochs between learning-rate decays");
  sub->add_option("--batch-size", o.batch_size, "Windows per minibatch");
  sub->add_option("--epochs", o.epochs, "Maximum training epochs");
  sub->add_option("--patience", o.patience, "Epochs without improvement before stopping; 0 disables");
  sub->add_option("--dropout", o.dropout, "Dropout rate after temporal fusion");
  sub->add_option("--seed", o.seed, "Seed for initialization, shuffling, and dropout");
}

std::uint64_t fnv1a_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("write failed for " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// The manifest is a config file for this binary: `mgcnn --config <manifest>`
// replays the run. Provenance goes in comment lines.
void write_manifest(const CLI::App& sub, const fs::path& dir, std::uint64_t seed,
                    const std::vector<fs::path>& inputs) {
  std::ostringstream out;
  out << "# mgcnn run manifest\n";
  out << "# command: " << sub.get_name() << '\n';
  out << "# version: " << MGCNN_VERSION << '\n';
  out << "# timestamp: " << utc_timestamp() << '\n';
  out << "# seed: " << seed << '\n';
  for (const auto& p : inputs) {
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a_file(p)));
    out << "# input: " << p.string() << " fnv1a64=" << hex << '\n';
  }
  out << '[' << sub.get_name() << "]\n" << sub.config_to_str(true, false);
  write_text(dir / (sub.get_name() + ".manifest.toml"), out.str());
}

struct LoadedCorridor {
  CorridorTopology topology;
  std::vector<RawIntersectionSeries> raw;
  std::vector<fs::path> inputs;
};

LoadedCorridor load_corridor(const PipelineOpts& o, Warnings* warnings) {
  const CorridorFiles files = find_corridor_files(o.data_dir);
  LoadedCorridor c;
  const fs::path topo = o.topology.empty() ? files.topology : fs::path(o.topology);
  c.topology = load_topology(topo);
  c.inputs.push_back(topo);
  c.inputs.insert(c.inputs.end(), files.csvs.begin(), files.csvs.end());
  c.raw = ingest_csv(files.csvs, o.gap_limit, warnings);
  return c;
}

void flush_warnings(Warnings& w, std::ostream& err) {
  for (const auto& msg : w) err << "warning: " << msg << '\n';
  w.clear();
}

ModelConfig model_config(const ModelOpts& m, const WindowDataset& ds, double dropout) {
  ModelConfig c;
  c.nodes = ds.node_count();
  c.features = ds.features;
  c.lookback = m.lookback;
  c.order = m.order;
  c.hidden1 = m.hidden1;
  c.hidden2 = m.hidden2;
  c.dropout_rate = dropout;
  return c;
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(tok, &used);
      if (used != tok.size() || v < 1) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      throw DataError(std::string(what) + ": '" + tok + "' is not a positive integer");
    }
  }
  if (out.empty()) throw DataError(std::string(what) + " is empty");
  return out;
}

// Loads a checkpoint and rebuilds its corridor with the recorded pipeline
// (kept attributes and normalization stats) when one is available.
struct CheckpointContext {
  Checkpoint ckpt;
  PreparedCorridor corridor;
  WindowDataset dataset;
  TrainTestSplit split;
  std::vector<fs::path> inputs;
};

CheckpointContext load_checkpoint_context(const std::string& ckpt_path, const std::string& pipeline_path,
                                          const PipelineOpts& popts, Warnings& warnings) {
  CheckpointContext ctx;
  if (!fs::exists(ckpt_path)) throw DataError("checkpoint not found: " + ckpt_path);
  ctx.ckpt = load_checkpoint(ckpt_path);
  LoadedCorridor lc = load_corridor(popts, &warnings);
  ctx.inputs = lc.inputs;
  ctx.inputs.insert(ctx.inputs.begin(), ckpt_path);
  const fs::path pipe = pipeline_path.empty() ? fs::path(ckpt_path).parent_path() / "pipeline.manifest"
                                              : fs::path(pipeline_path);
  if (fs::exists(pipe)) {
    const PipelineManifest m = parse_pipeline_manifest(read_text(pipe));
    ctx.inputs.push_back(pipe);
    ctx.corridor = prepare_corridor_replay(lc.topology, lc.raw, m.config, m.kept_attribute_ids, m.stats);
  } else {
    if (!pipeline_path.empty()) throw DataError("pipeline manifest not found: " + pipeline_path);
    warnings.push_back("no pipeline manifest next to the checkpoint; refitting the pipeline from flags");
    ctx.corridor = prepare_corridor(lc.topology, lc.raw, popts.config(), &warnings);
  }
  const ModelConfig& mc = ctx.ckpt.params.config;
  ctx.dataset = assemble(ctx.corridor, mc.lookback, ctx.ckpt.horizon, &warnings);
  if (ctx.dataset.node_count() != mc.nodes || ctx.dataset.features != mc.features) {
    throw DataError("checkpoint expects " + std::to_string(mc.nodes) + " nodes x " + std::to_string(mc.features) +
                    " features but the data has " + std::to_string(ctx.dataset.node_count()) + " x " +
                    std::to_string(ctx.dataset.features));
  }
  ctx.split = split_train_test(ctx.dataset, ctx.corridor.config.train_days, ctx.corridor.config.total_days);
  return ctx;
}

fs::path default_out(const std::string& flag, const std::string& ckpt) {
  if (!flag.empty()) return flag;
  const fs::path parent = fs::path(ckpt).parent_path();
  return parent.empty() ? fs::path(".") : parent;
}

int movement_index(const std::string& name) {
  for (int b = 0; b < 4; ++b) {
    for (int t = 0; t < 3; ++t) {
      if (name == std::string(schema::kBounds[b]) + "_" + std::string(schema::kTurns[t])) return b * 3 + t;
    }
  }
  throw DataError("unknown movement '" + name + "' (expected e.g. WB_T)");
}

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string evaluation_table(const ModelEvaluation& ev) {
  std::ostringstream out;
  for (UnitSpace space : {UnitSpace::Raw, UnitSpace::Normalized}) {
    const bool raw = space == UnitSpace::Raw;
    out << "unit space: " << to_string(space) << '\n';
    out << std::left << std::setw(14) << "model" << std::right << std::setw(12) << "MSE" << std::setw(12) << "RMSE"
        << std::setw(12) << "MAE" << std::setw(12) << "MAPE(%)" << '\n';
    auto row = [&](const char* label, const MetricsReport& r) {
      out << std::left << std::setw(14) << label << std::right << std::fixed << std::setprecision(4) << std::setw(12)
          << r.mse << std::setw(12) << r.rmse << std::setw(12) << r.mae;
      if (r.mape_defined) {
        out << std::setw(12) << std::setprecision(3) << r.mape;
      } else {
        out << std::setw(12) << "undefined";
      }
      out << '\n';
    };
    row("mgcnn", raw ? ev.model_raw : ev.model_normalized);
    row("persistence", raw ? ev.persistence_raw : ev.persistence_normalized);
    row("historical", raw ? ev.historical_raw : ev.historical_normalized);
    out << '\n';
  }
  const auto& r = ev.model_raw;
  out << "samples " << r.sample_count << ", MAPE excludes " << r.excluded_zero_count << " zero-count targets";
  if (ev.historical_fallbacks > 0) out << ", historical average fell back to class means " << ev.historical_fallbacks << " times";
  out << '\n';
  return out.str();
}

std::string evaluation_records(const ModelEvaluation& ev) {
  std::ostringstream out;
  out << "label,unit_space,lookback,horizon,mse,rmse,mae,mape,samples,excluded_zero\n";
  out << format_report_record(ev.model_raw, "mgcnn") << '\n';
  out << format_report_record(ev.model_normalized, "mgcnn") << '\n';
  out << format_report_record(ev.persistence_raw, "persistence") << '\n';
  out << format_report_record(ev.persistence_normalized, "persistence") << '\n';
  out << format_report_record(ev.historical_raw, "historical") << '\n';
  out << format_report_record(ev.historical_normalized, "historical") << '\n';
  return out.str();
}

std::string sweep_histories(std::span<const SweepRow> rows) {
  std::ostringstream out;
  out << "lookback,horizon,epoch,loss,lr\n";
  for (const auto& row : rows) {
    for (std::size_t e = 0; e < row.history.epochs(); ++e) {
      out << row.lookback << ',' << row.horizon << ',' << e + 1 << ',' << fmt(row.history.loss[e]) << ','
          << fmt(row.history.learning_rate[e]) << '\n';
    }
  }
  return out.str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multigraph convolutional forecaster for intersection turning movements", "mgcnn"};
  app.set_version_flag("--version", MGCNN_VERSION);
  app.set_config("--config", "", "Read options from a TOML config or run manifest; flags take precedence");
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  CommonOpts common;
  PipelineOpts popts;
  ModelOpts mopts;
  TrainOpts topts;

  // synth
  SynthConfig synth_cfg;
  std::string synth_out;
  bool synth_noiseless = false;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corridor dataset")->configurable();
  synth->add_option("--seed", synth_cfg.seed, "Generator seed");
  synth->add_option("--days", synth_cfg.days, "Days to generate")->check(CLI::PositiveNumber);
  synth->add_option("--nodes", synth_cfg.n_intersections, "Intersections along the corridor")
      ->check(CLI::Range(2, 99));
  synth->add_option("--out-dir", synth_out, "Output directory")->required();
  synth->add_option("--outlier-rate", synth_cfg.outlier_rate, "Fraction of count entries replaced by spikes");
  synth->add_flag("--noiseless", synth_noiseless, "Counts equal the deterministic daily profile");
  add_common(synth, common);

  // preprocess
  std::string pre_out;
  auto* preprocess = app.add_subcommand("preprocess", "Clean, prune, and fit normalization; write a pipeline manifest")
                         ->configurable();
  add_pipeline(preprocess, popts);
  preprocess->add_option("--out-dir", pre_out, "Where pipeline.manifest goes (default: --data-dir)");
  add_common(preprocess, common);

  // train
  std::string train_out = "mgcnn-run";
  auto* trainc = app.add_subcommand("train", "Train a model and write model.ckpt and history.csv")->configurable();
  add_pipeline(trainc, popts);
  add_model(trainc, mopts);
  add_train(trainc, topts);
  trainc->add_option("--out-dir", train_out, "Output directory");
  add_common(trainc, common);

  // evaluate / predict / export-plot-data share checkpoint handling
  std::string ckpt_path, pipeline_path, eval_out;
  auto add_ckpt = [&](CLI::App* sub) {
    sub->add_option("--ckpt", ckpt_path, "Checkpoint written by train")->required();
    sub->add_option("--pipeline", pipeline_path, "Pipeline manifest (default: next to the checkpoint)");
    add_pipeline(sub, popts);
    sub->add_option("--out-dir", eval_out, "Output directory (default: the checkpoint's directory)");
    add_common(sub, common);
  };
  int check_lookback = 0, check_horizon = 0;
  auto* evaluate = app.add_subcommand("evaluate", "Test-day metrics for a checkpoint and both baselines")->configurable();
  add_ckpt(evaluate);
  evaluate->add_option("--lookback", check_lookback, "Expected lookback; must match the checkpoint if given");
  evaluate->add_option("--horizon", check_horizon, "Expected horizon; must match the checkpoint if given");

  long predict_minute = -1;
  std::string predict_file;
  auto* predictc = app.add_subcommand("predict", "Predict turning counts at one target minute")->configurable();
  add_ckpt(predictc);
  predictc->add_option("--minute", predict_minute, "Target minute (default: the last one available)");
  predictc->add_option("--out", predict_file, "CSV output file (default: stdout)");

  std::string lookbacks = "10,20,30,40,50,60", horizons = "1,2,3,4,5", sweep_out = "mgcnn-sweep";
  auto* sweep_m = app.add_subcommand("sweep-lookback", "Train one model per lookback at a fixed horizon")->configurable();
  add_pipeline(sweep_m, popts);
  add_model(sweep_m, mopts, false, true);
  add_train(sweep_m, topts);
  sweep_m->add_option("--lookbacks", lookbacks, "Comma-separated lookback values");
  sweep_m->add_option("--out-dir", sweep_out, "Output directory");
  add_common(sweep_m, common);

  auto* sweep_n = app.add_subcommand("sweep-horizon", "Train one model per horizon at a fixed lookback")->configurable();
  add_pipeline(sweep_n, popts);
  add_model(sweep_n, mopts, true, false);
  add_train(sweep_n, topts);
  sweep_n->add_option("--horizons", horizons, "Comma-separated horizon values");
  sweep_n->add_option("--out-dir", sweep_out, "Output directory");
  add_common(sweep_n, common);

  std::string plot_node, plot_movement = "WB_T";
  auto* plot = app.add_subcommand("export-plot-data", "Write data series behind the standard figures")->configurable();
  add_ckpt(plot);
  plot->add_option("--node", plot_node, "Intersection id for the series (default: first node)");
  plot->add_option("--movement", plot_movement, "Movement for the series, e.g. WB_T");

  try {
    app.parse(argc, argv);
  } catch (const CLI::FileError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const CLI::ValidationError& e) {
    // A well-formed flag with an out-of-range value is bad input, not bad usage.
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Warnings warnings;
  try {
    const int threads = common.resolved_threads();

    if (*synth) {
      if (synth_noiseless) {
        const auto rate = synth_cfg.outlier_rate;
        synth_cfg = SynthConfig::noiseless(synth_cfg.n_intersections, synth_cfg.days, synth_cfg.seed);
        synth_cfg.outlier_rate = rate;
      }
      synth_cfg.validate();
      write_manifest(*synth, synth_out, synth_cfg.seed, {});
      const SynthDataset data = generate(synth_cfg);
      write_dataset(data, synth_out);
      out << "wrote " << data.series.size() << " intersections x " << synth_cfg.days << " days to " << synth_out;
      if (data.outliers_injected > 0) out << " (" << data.outliers_injected << " injected outliers)";
      out << '\n';
    } else if (*preprocess) {
      const fs::path dir = pre_out.empty() ? fs::path(popts.data_dir) : fs::path(pre_out);
      LoadedCorridor lc = load_corridor(popts, &warnings);
      write_manifest(*preprocess, dir, 0, lc.inputs);
      const PreparedCorridor pc = prepare_corridor(lc.topology, lc.raw, popts.config(), &warnings);
      write_text(dir / "pipeline.manifest", pipeline_manifest(pc));
      out << "kept " << pc.kept_attribute_ids.size() << " of " << schema::kReducedWidth << " attributes:";
      for (int id : pc.kept_attribute_ids) out << ' ' << schema::annotation(id);
      out << "\nreplaced " << pc.outliers_replaced << " outliers\n";
    } else if (*trainc) {
      const fs::path dir = train_out;
      LoadedCorridor lc = load_corridor(popts, &warnings);
      write_manifest(*trainc, dir, topts.seed, lc.inputs);
      const PreparedCorridor pc = prepare_corridor(lc.topology, lc.raw, popts.config(), &warnings);
      write_text(dir / "pipeline.manifest", pipeline_manifest(pc));
      WindowDataset ds = assemble(pc, mopts.lookback, mopts.horizon, &warnings);
      flush_warnings(warnings, err);
      const auto split = split_train_test(ds, popts.train_days, popts.total_days);
      const ModelConfig mc = model_config(mopts, ds, topts.dropout);
      const TrainConfig tc = topts.config(threads);
      out << "training on " << split.train.size() << " windows (" << ds.node_count() << " nodes, " << ds.features
          << " features), testing on " << split.test.size() << '\n';
      auto result = train(ds, split.train, mc, tc, [&](int epoch, double loss, double lr) {
        out << "epoch " << epoch << " loss " << fmt(loss) << " lr " << fmt(lr) << std::endl;
      });
      save_checkpoint(Checkpoint{result.params, mopts.horizon}, dir / "model.ckpt");
      write_text(dir / "history.csv", result.history.to_records());
      double secs = 0;
      for (double s : result.history.seconds) secs += s;
      out << "wrote " << (dir / "model.ckpt").string() << " after " << result.history.epochs() << " epochs ("
          << std::fixed << std::setprecision(1) << secs << " s)\n";
    } else if (*evaluate) {
      const fs::path dir = default_out(eval_out, ckpt_path);
      CheckpointContext ctx = load_checkpoint_context(ckpt_path, pipeline_path, popts, warnings);
      if (check_lookback > 0 && check_lookback != ctx.ckpt.params.config.lookback) {
        throw DataError("--lookback " + std::to_string(check_lookback) + " does not match the checkpoint's " +
                        std::to_string(ctx.ckpt.params.config.lookback));
      }
      if (check_horizon > 0 && check_horizon != ctx.ckpt.horizon) {
        throw DataError("--horizon " + std::to_string(check_horizon) + " does not match the checkpoint's " +
                        std::to_string(ctx.ckpt.horizon));
      }
      write_manifest(*evaluate, dir, 0, ctx.inputs);
      flush_warnings(warnings, err);
      const ModelEvaluation ev = evaluate_model(ctx.dataset, ctx.split, ctx.ckpt.params, threads);
      const std::string table = evaluation_table(ev);
      write_text(dir / "evaluation.txt", table);
      write_text(dir / "evaluation.csv", evaluation_records(ev));
      out << table;
    } else if (*predictc) {
      const fs::path dir = default_out(eval_out, ckpt_path);
      CheckpointContext ctx = load_checkpoint_context(ckpt_path, pipeline_path, popts, warnings);
      write_manifest(*predictc, dir, 0, ctx.inputs);
      flush_warnings(warnings, err);
      const auto& windows = ctx.dataset.windows;
      if (windows.empty()) throw DataError("no complete window in the data");
      std::size_t pick = windows.size() - 1;
      if (predict_minute >= 0) {
        auto it = std::find_if(windows.begin(), windows.end(),
                               [&](const MultiGraphWindow& w) { return w.target_minute() == predict_minute; });
        if (it == windows.end()) {
          throw DataError("no window targets minute " + std::to_string(predict_minute) + "; valid range is " +
                          std::to_string(windows.front().target_minute()) + ".." +
                          std::to_string(windows.back().target_minute()));
        }
        pick = static_cast<std::size_t>(it - windows.begin());
      }
      const std::size_t idx[] = {pick};
      const Matrix raw = ctx.dataset.denormalize_counts(predict(ctx.dataset, idx, ctx.ckpt.params, threads)[0]);
      std::ostringstream csv;
      csv << "minute,intersection_id,movement,prediction\n";
      const auto& ids = ctx.corridor.topology.node_ids();
      for (int v = 0; v < raw.rows(); ++v) {
        for (int m = 0; m < raw.cols(); ++m) {
          csv << windows[pick].target_minute() << ',' << ids[v] << ',' << schema::kBounds[m / 3] << '_'
              << schema::kTurns[m % 3] << ',' << fmt(raw(v, m)) << '\n';
        }
      }
      if (predict_file.empty()) {
        out << csv.str();
      } else {
        write_text(predict_file, csv.str());
      }
    } else if (*sweep_m || *sweep_n) {
      const bool by_lookback = static_cast<bool>(*sweep_m);
      CLI::App& sub = by_lookback ? *sweep_m : *sweep_n;
      const std::string name = sub.get_name();
      const auto values = parse_int_list(by_lookback ? lookbacks : horizons, by_lookback ? "--lookbacks" : "--horizons");
      const fs::path dir = sweep_out;
      LoadedCorridor lc = load_corridor(popts, &warnings);
      write_manifest(sub, dir, topts.seed, lc.inputs);
      const PreparedCorridor pc = prepare_corridor(lc.topology, lc.raw, popts.config(), &warnings);
      flush_warnings(warnings, err);
      SweepOptions so;
      so.model.order = mopts.order;
      so.model.hidden1 = mopts.hidden1;
      so.model.hidden2 = mopts.hidden2;
      so.model.dropout_rate = topts.dropout;
      so.train = topts.config(threads);
      const auto rows = by_lookback ? sweep_lookback(pc, values, mopts.horizon, so, &warnings)
                                    : sweep_horizon(pc, mopts.lookback, values, so, &warnings);
      flush_warnings(warnings, err);
      const std::string table = format_table(rows, UnitSpace::Raw) + '\n' + format_table(rows, UnitSpace::Normalized);
      write_text(dir / (name + ".txt"), table);
      write_text(dir / (name + ".csv"), format_records(rows));
      write_text(dir / (name + "-history.csv"), sweep_histories(rows));
      out << table;
      if (!by_lookback && rows.size() > 1 && rows.front().raw.mse > rows.back().raw.mse) {
        err << "warning: MSE at N=" << rows.front().horizon << " exceeds MSE at N=" << rows.back().horizon
            << "; errors usually grow with the horizon\n";
      }
    } else if (*plot) {
      const fs::path dir = eval_out.empty() ? default_out("", ckpt_path) / "plot-data" : fs::path(eval_out);
      CheckpointContext ctx = load_checkpoint_context(ckpt_path, pipeline_path, popts, warnings);
      const auto& ids = ctx.corridor.topology.node_ids();
      const int node = plot_node.empty() ? 0 : ctx.corridor.topology.index_of(plot_node);
      const int mov = movement_index(plot_movement);
      write_manifest(*plot, dir, 0, ctx.inputs);
      flush_warnings(warnings, err);
      const WindowDataset& ds = ctx.dataset;
      const auto preds = predict(ds, ctx.split.test, ctx.ckpt.params, threads);
      const HistoricalAverageBaseline ha(ds, ctx.split.train);
      std::vector<long> minutes;
      std::vector<double> truth, model, persist, hist;
      for (std::size_t i = 0; i < ctx.split.test.size(); ++i) {
        const auto& w = ds.windows[ctx.split.test[i]];
        const std::size_t pos = ds.target_position(w);
        const std::size_t last = ds.start_position(w) + w.snapshots.size() - 1;
        const long minute = w.target_minute();
        minutes.push_back(minute);
        truth.push_back(ds.raw_counts[pos](node, mov));
        model.push_back(ds.denormalize_counts(preds[i])(node, mov));
        persist.push_back(ds.raw_counts[last](node, mov));
        hist.push_back(ha.predict(static_cast<int>(minute % kMinutesPerDay), ds.day_class[pos])(node, mov));
      }
      export_series(minutes, truth, model, dir / "truth_vs_mgcnn.csv");
      export_series(minutes, truth, persist, dir / "truth_vs_persistence.csv");
      export_series(minutes, truth, hist, dir / "truth_vs_historical.csv");

      // Correlation among the 85 cleaned attributes on training minutes.
      const CleanFeatureSeries& s = ctx.corridor.series[node];
      const long fit = std::min<long>(s.reduced.cols(), ctx.corridor.train_end_minute() - s.first_minute);
      const Matrix corr = correlation_matrix(s.reduced.leftCols(fit));
      std::ostringstream c;
      c << "attribute";
      for (int j = 0; j < corr.cols(); ++j) c << ',' << schema::annotation(j);
      c << '\n';
      for (int i = 0; i < corr.rows(); ++i) {
        c << schema::annotation(i);
        for (int j = 0; j < corr.cols(); ++j) c << ',' << fmt(corr(i, j));
        c << '\n';
      }
      write_text(dir / "correlation.csv", c.str());

      // Per-movement count distribution at every intersection.
      std::ostringstream d;
      d << "intersection_id,movement,min,q1,median,q3,max,mean\n";
      for (std::size_t v = 0; v < ctx.corridor.series.size(); ++v) {
        const Matrix& r = ctx.corridor.series[v].reduced;
        for (int m = 0; m < kMovements; ++m) {
          std::vector<double> vals(r.row(m).begin(), r.row(m).end());
          d << ids[v] << ',' << schema::kBounds[m / 3] << '_' << schema::kTurns[m % 3] << ',' << fmt(quantile(vals, 0))
            << ',' << fmt(quantile(vals, 0.25)) << ',' << fmt(quantile(vals, 0.5)) << ','
            << fmt(quantile(vals, 0.75)) << ',' << fmt(quantile(vals, 1)) << ','
            << fmt(r.row(m).mean()) << '\n';
        }
      }
      write_text(dir / "count_distribution.csv", d.str());
      out << "wrote plot data for " << ids[node] << ' ' << plot_movement << " to " << dir.string() << '\n';
    }
    flush_warnings(warnings, err);
    return kExitOk;
  } catch (const DataError& e) {
    flush_warnings(warnings, err);
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const InvariantError& e) {
    flush_warnings(warnings, err);
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace mgcnn::cli
