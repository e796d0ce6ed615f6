// simtrack command-line front end.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 I/O or data error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "simtrack/bench.hpp"
#include "simtrack/metrics.hpp"
#include "simtrack/synthetic.hpp"
#include "simtrack/tracker.hpp"

namespace fs = std::filesystem;
using namespace simtrack;

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

void print_warnings(const std::string& source, const std::vector<ParseWarning>& warnings) {
  for (const auto& w : warnings) std::cerr << source << ":" << w.line << ": warning: " << w.message << "\n";
}

NetKind parse_net(const std::string& s) {
  if (s == "base") return NetKind::BaseNet;
  if (s == "esnn") return NetKind::EnhancedNet;
  throw ConfigError("unknown net '" + s + "' (expected base or esnn)");
}

MatchAlgorithm parse_matcher(const std::string& s) {
  if (s == "greedy") return MatchAlgorithm::Greedy;
  if (s == "hungarian") return MatchAlgorithm::Hungarian;
  throw ConfigError("unknown matcher '" + s + "' (expected greedy or hungarian)");
}

ProviderKind parse_provider(const std::string& s) {
  if (s == "handcrafted") return ProviderKind::Handcrafted;
  if (s == "oracle") return ProviderKind::Oracle;
  if (s == "file") return ProviderKind::File;
  throw ConfigError("unknown provider '" + s + "' (expected handcrafted, oracle or file)");
}

// ---------------------------------------------------------------------------
// Config files: `key = value` per line, `#` starts a comment. Keys use the
// long option names with '-' or '_'. Command-line flags win over the file.
// ---------------------------------------------------------------------------

struct ConfigBinding {
  CLI::Option* option;
  std::function<void(const std::string&)> assign;
};

void apply_config(const std::string& path, const std::map<std::string, ConfigBinding>& bindings) {
  auto in = open_in(path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string trimmed(detail::trim(line));
    if (trimmed.empty()) continue;
    const auto eq = trimmed.find('=');
    const std::string where = path + ":" + std::to_string(line_no);
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    std::string key(detail::trim(std::string_view(trimmed).substr(0, eq)));
    const std::string value(detail::trim(std::string_view(trimmed).substr(eq + 1)));
    std::replace(key.begin(), key.end(), '-', '_');
    const auto it = bindings.find(key);
    if (it == bindings.end()) throw ConfigError(where + ": unknown config key '" + key + "'");
    if (it->second.option->count() > 0) continue;
    try {
      it->second.assign(value);
    } catch (const std::invalid_argument&) {
      throw ConfigError(where + ": bad value '" + value + "' for '" + key + "'");
    } catch (const std::out_of_range&) {
      throw ConfigError(where + ": value out of range for '" + key + "'");
    }
  }
}

// ---------------------------------------------------------------------------
// Sequence directories as written by gen-synth:
//   det/det.txt  gt/gt.txt  labels.csv  descriptors.csv  [patches.csv]
// ---------------------------------------------------------------------------

std::string aux_path(const std::string& seq_dir, const std::string& explicit_path, const char* name) {
  if (!explicit_path.empty()) return explicit_path;
  if (seq_dir.empty()) throw ConfigError(std::string("need --seq or an explicit path for ") + name);
  return (fs::path(seq_dir) / name).string();
}

std::vector<Detection> load_detections(const std::string& path) {
  const auto parsed = parse_mot_file(path);
  print_warnings(path, parsed.warnings);
  auto dets = to_detections(parsed.entries);
  for (auto& d : dets) d.label = -1;
  return dets;
}

void attach_labels(std::vector<Detection>& dets, const std::string& path) {
  auto in = open_in(path);
  const auto labels = read_labels(in, path);
  for (auto& d : dets) {
    const auto it = labels.find({d.frame, d.ordinal});
    if (it == labels.end()) {
      throw ValidationError(path + ": no label for frame " + std::to_string(d.frame) + ", detection " +
                            std::to_string(d.ordinal));
    }
    d.label = it->second;
  }
}

// ---------------------------------------------------------------------------
// track
// ---------------------------------------------------------------------------

struct TrackArgs {
  std::string seq, det, out, model, descriptors, patches, labels, config;
  std::string net = "base", matcher = "greedy", provider = "file";
  int fn = 1;
  unsigned threads = 1;
  std::uint64_t seed = kDefaultSeed;
  double alpha = 0.8, gamma = 1e-5, delta = 0.2, min_confidence = 0.0;
  std::optional<double> min_score;
  bool quiet = false;
};

void add_track(CLI::App& app, TrackArgs& a, std::function<void()>& run) {
  auto* cmd = app.add_subcommand("track", "Track a detection file online");
  cmd->add_option("--seq", a.seq, "Sequence directory with labels/descriptors/patches");
  cmd->add_option("--det", a.det, "MOT detection file (default <seq>/det/det.txt)");
  cmd->add_option("--out", a.out, "MOT result file to write")->required();
  auto* net = cmd->add_option("--net", a.net, "Scoring variant")->check(CLI::IsMember({"base", "esnn"}));
  auto* matcher =
      cmd->add_option("--matcher", a.matcher, "Association")->check(CLI::IsMember({"greedy", "hungarian"}));
  auto* fn = cmd->add_option("--fn", a.fn, "Look-back window in frames")->check(CLI::PositiveNumber);
  auto* provider = cmd->add_option("--provider", a.provider, "Descriptor source")
                       ->check(CLI::IsMember({"handcrafted", "oracle", "file"}));
  auto* model = cmd->add_option("--model", a.model, "Trained embedding model (default: seeded init)");
  cmd->add_option("--descriptors", a.descriptors, "Descriptor CSV (default <seq>/descriptors.csv)");
  cmd->add_option("--patches", a.patches, "Patch CSV (default <seq>/patches.csv)");
  cmd->add_option("--labels", a.labels, "Label CSV for the oracle provider (default <seq>/labels.csv)");
  auto* alpha = cmd->add_option("--alpha", a.alpha);
  auto* gamma = cmd->add_option("--gamma", a.gamma);
  auto* delta = cmd->add_option("--delta", a.delta);
  auto* minconf = cmd->add_option("--min-confidence", a.min_confidence);
  auto* minscore = cmd->add_option("--min-score", a.min_score, "Pairs scoring below never match");
  auto* threads = cmd->add_option("--threads", a.threads)->check(CLI::PositiveNumber);
  auto* seed = cmd->add_option("--seed", a.seed);
  cmd->add_option("--config", a.config, "key = value file; flags override it");
  cmd->add_flag("--quiet", a.quiet, "No progress on stderr");

  run = [&a, net, matcher, fn, provider, model, alpha, gamma, delta, minconf, minscore, threads, seed] {
    if (!a.config.empty()) {
      auto str = [](std::string& dst) { return [&dst](const std::string& v) { dst = v; }; };
      auto dbl = [](double& dst) { return [&dst](const std::string& v) { dst = std::stod(v); }; };
      const std::map<std::string, ConfigBinding> bindings = {
          {"net", {net, str(a.net)}},
          {"matcher", {matcher, str(a.matcher)}},
          {"fn", {fn, [&](const std::string& v) { a.fn = std::stoi(v); }}},
          {"provider", {provider, str(a.provider)}},
          {"model", {model, str(a.model)}},
          {"alpha", {alpha, dbl(a.alpha)}},
          {"gamma", {gamma, dbl(a.gamma)}},
          {"delta", {delta, dbl(a.delta)}},
          {"min_confidence", {minconf, dbl(a.min_confidence)}},
          {"min_score", {minscore, [&](const std::string& v) { a.min_score = std::stod(v); }}},
          {"threads", {threads, [&](const std::string& v) { a.threads = static_cast<unsigned>(std::stoul(v)); }}},
          {"seed", {seed, [&](const std::string& v) { a.seed = std::stoull(v); }}},
      };
      apply_config(a.config, bindings);
    }

    TrackerConfig cfg;
    cfg.score.net = parse_net(a.net);
    cfg.score.alpha = a.alpha;
    cfg.score.gamma = a.gamma;
    cfg.score.delta = a.delta;
    cfg.matcher.algorithm = parse_matcher(a.matcher);
    cfg.matcher.look_back = a.fn;
    if (a.min_score) cfg.matcher.min_score = *a.min_score;
    cfg.min_confidence = a.min_confidence;
    cfg.threads = a.threads;
    cfg.validate();

    const std::string det_path = a.det.empty() ? aux_path(a.seq, "", "det/det.txt") : a.det;
    auto dets = load_detections(det_path);

    DescriptorProvider prov;
    switch (parse_provider(a.provider)) {
      case ProviderKind::Oracle:
        attach_labels(dets, aux_path(a.seq, a.labels, "labels.csv"));
        prov = oracle_provider();
        break;
      case ProviderKind::File: {
        const auto path = aux_path(a.seq, a.descriptors, "descriptors.csv");
        auto in = open_in(path);
        prov = table_provider(read_descriptors(in, path));
        break;
      }
      case ProviderKind::Handcrafted: {
        const auto path = aux_path(a.seq, a.patches, "patches.csv");
        auto in = open_in(path);
        prov = patch_provider(read_patches(in, path));
        break;
      }
    }

    const EmbeddingModel emb = !a.model.empty()                      ? load_model(a.model)
                               : cfg.score.net == NetKind::BaseNet ? EmbeddingModel::base(a.seed)
                                                                   : EmbeddingModel::enhanced(a.seed);
    const int last = dets.empty() ? 0 : dets.back().frame;
    auto progress = [&](int frame) {
      if (!a.quiet && (frame % 100 == 0 || frame == last)) std::cerr << "frame " << frame << "/" << last << "\n";
    };
    const auto result = run_sequence(cfg, emb, std::move(prov), dets, progress);
    write_mot_file(a.out, result.rows);
    std::fprintf(stderr, "%d frames, %zu rows, %lld tracks, %.1f Hz\n", result.frames, result.rows.size(),
                 static_cast<long long>(result.tracks_created), result.hz);
  };
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

struct EvaluateArgs {
  std::string gt, res, format = "mot", csv, name = "sequence", cls;
  double iou = 0.5;
  double hz = 0.0;
};

void add_evaluate(CLI::App& app, EvaluateArgs& a, std::function<void()>& run) {
  auto* cmd = app.add_subcommand("evaluate", "CLEAR-MOT metrics of a result file");
  cmd->add_option("--gt", a.gt, "Ground-truth file")->required();
  cmd->add_option("--res", a.res, "Result file")->required();
  cmd->add_option("--iou", a.iou, "Match threshold")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--format", a.format)->check(CLI::IsMember({"mot", "kitti"}));
  cmd->add_option("--class", a.cls, "KITTI class to keep (default Car and Pedestrian)");
  cmd->add_option("--csv", a.csv, "Append a row to this CSV");
  cmd->add_option("--name", a.name, "Sequence name for the table and CSV");
  cmd->add_option("--hz", a.hz, "Tracker frame rate to report");

  run = [&a] {
    MotReport r;
    if (a.format == "mot") {
      const auto gt = parse_mot_file(a.gt);
      print_warnings(a.gt, gt.warnings);
      const auto res = parse_mot_file(a.res);
      print_warnings(a.res, res.warnings);
      r = evaluate(res.entries, to_ground_truth(gt.entries), a.iou);
    } else {
      auto gt = parse_kitti_file(a.gt);
      print_warnings(a.gt, gt.warnings);
      auto res = parse_kitti_file(a.res);
      print_warnings(a.res, res.warnings);
      if (!a.cls.empty()) {
        gt.entries = filter_class(std::move(gt.entries), a.cls);
        res.entries = filter_class(std::move(res.entries), a.cls);
      }
      r = evaluate(std::span<const GroundTruthEntry>(res.entries), gt.entries, a.iou);
    }
    std::cout << format_report_table(a.name, r, a.hz);
    const nlohmann::json j = {
        {"sequence", a.name}, {"mota", r.mota},       {"motp", r.motp},
        {"faf", r.faf},       {"mt", r.mostly_tracked}, {"pt", r.partially_tracked},
        {"ml", r.mostly_lost}, {"fp", r.fp},          {"fn", r.fn},
        {"ids", r.id_switches}, {"frag", r.fragmentations}, {"recall", r.recall},
        {"precision", r.precision}, {"frames", r.frames}};
    std::cout << j.dump() << "\n";
    if (!a.csv.empty()) {
      const bool fresh = !fs::exists(a.csv) || fs::file_size(a.csv) == 0;
      std::ofstream out(a.csv, std::ios::app);
      if (!out) throw IoError("cannot open '" + a.csv + "' for writing");
      if (fresh) out << mot_report_csv_header() << "\n";
      out << to_csv_row(a.name, r, a.hz) << "\n";
    }
  };
}

// ---------------------------------------------------------------------------
// bench and report
// ---------------------------------------------------------------------------

void print_bench_table(const std::vector<BenchRecord>& records) {
  const auto summary = summarize(records);
  std::printf("%8s %14s %14s %24s\n", "n", "greedy_ms", "hungarian_ms", "ratio(hungarian/greedy)");
  for (const auto& s : summary) {
    std::printf("%8d %14.4f %14.4f %24.2f\n", s.n, s.greedy_median_ns / 1e6, s.hungarian_median_ns / 1e6, s.ratio);
  }
  if (summary.size() >= 2) {
    const double g = loglog_slope(summary, MatchAlgorithm::Greedy);
    const double h = loglog_slope(summary, MatchAlgorithm::Hungarian);
    std::printf("log-log slope: greedy %.2f, hungarian %.2f, difference %.2f\n", g, h, h - g);
  }
}

struct BenchArgs {
  std::vector<int> sizes{50, 200, 800};
  int trials = 3;
  std::uint64_t seed = kDefaultSeed;
  std::string out;
};

void add_bench(CLI::App& app, BenchArgs& a, std::function<void()>& run) {
  auto* cmd = app.add_subcommand("bench", "Time greedy against Hungarian on dense random matrices");
  cmd->add_option("--sizes", a.sizes, "Ascending n values, comma separated")->delimiter(',');
  cmd->add_option("--trials", a.trials)->check(CLI::PositiveNumber);
  cmd->add_option("--seed", a.seed);
  cmd->add_option("--out", a.out, "Raw timings CSV");
  run = [&a] {
    const auto records = bench_matchers(a.sizes, a.trials, a.seed);
    if (!a.out.empty()) {
      auto out = open_out(a.out);
      write_bench_csv(out, records);
    }
    print_bench_table(records);
  };
}

struct ReportArgs {
  std::string bench, eval;
};

void report_eval(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  std::getline(in, line);
  if (line != mot_report_csv_header()) throw FormatError(path + ": unexpected header");
  std::printf("%-16s %8s %8s %8s %8s %8s %10s\n", "sequence", "MOTA", "MOTP", "MT", "PT", "ML", "MT+PT+ML");
  int line_no = 1;
  bool consistent = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto f = detail::split(line, ',');
    if (f.size() != 14) throw FormatError(path + ":" + std::to_string(line_no) + ": expected 14 columns");
    auto num = [&](std::size_t i) {
      const auto v = detail::to_double(f[i]);
      if (!v) throw FormatError(path + ":" + std::to_string(line_no) + ": bad number in column " + std::to_string(i + 1));
      return *v;
    };
    const double mt = num(5), ml = num(6), pt = num(13);
    const double sum = mt + pt + ml;
    // Rows with no ground-truth trajectories report all three as 0.
    const bool ok = std::abs(sum - 100.0) <= 0.02 || sum == 0.0;
    consistent = consistent && ok;
    std::printf("%-16.*s %8.2f %8.2f %8.2f %8.2f %8.2f %8.2f %s\n", static_cast<int>(f[0].size()), f[0].data(),
                num(1), num(2), mt, pt, ml, sum, ok ? "ok" : "MISMATCH");
  }
  if (!consistent) throw FormatError(path + ": MT+PT+ML does not add up to 100%");
}

void add_report(CLI::App& app, ReportArgs& a, std::function<void()>& run) {
  auto* cmd = app.add_subcommand("report", "Summarize bench or evaluation CSVs");
  auto* b = cmd->add_option("--bench", a.bench, "CSV written by bench --out");
  auto* e = cmd->add_option("--eval", a.eval, "CSV written by evaluate --csv");
  b->excludes(e);
  cmd->require_option(1);
  run = [&a] {
    if (!a.bench.empty()) {
      auto in = open_in(a.bench);
      print_bench_table(read_bench_csv(in, a.bench));
    } else {
      report_eval(a.eval);
    }
  };
}

// ---------------------------------------------------------------------------
// train-embed
// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string seq, det, out, init, source = "oracle", head = "base";
  int epochs = 50, batch_size = 128, freeze = 0;
  double lr = 0.01, negatives = 1.0;
  std::optional<double> margin;
  std::vector<int> decay;
  std::uint64_t seed = kDefaultSeed;
};

void add_train(CLI::App& app, TrainArgs& a, std::function<void()>& run) {
  auto* cmd = app.add_subcommand("train-embed", "Train an embedding head on a labelled sequence");
  cmd->add_option("--seq", a.seq, "Sequence directory from gen-synth")->required();
  cmd->add_option("--det", a.det, "Detection file (default <seq>/det/det.txt)");
  cmd->add_option("--out", a.out, "Model file to write")->required();
  cmd->add_option("--head", a.head)->check(CLI::IsMember({"base", "enhanced"}));
  cmd->add_option("--init", a.init, "Trained base model to start an enhanced head from");
  cmd->add_option("--source", a.source, "Descriptor source")->check(CLI::IsMember({"oracle", "patches"}));
  cmd->add_option("--epochs", a.epochs)->check(CLI::NonNegativeNumber);
  cmd->add_option("--batch-size", a.batch_size)->check(CLI::PositiveNumber);
  cmd->add_option("--lr", a.lr);
  cmd->add_option("--margin", a.margin, "Default 3 for base, 0.5 for enhanced");
  cmd->add_option("--negatives", a.negatives, "Non-matching pairs kept per matching pair");
  cmd->add_option("--freeze-schedule", a.freeze, "Leading epochs with the trunk frozen (enhanced only)");
  cmd->add_option("--lr-decay", a.decay, "Epochs at which the rate drops tenfold")->delimiter(',');
  cmd->add_option("--seed", a.seed);
  run = [&a] {
    SyntheticSequence seq;
    seq.detections = load_detections(a.det.empty() ? aux_path(a.seq, "", "det/det.txt") : a.det);
    attach_labels(seq.detections, aux_path(a.seq, "", "labels.csv"));
    const DescriptorSource source = a.source == "oracle" ? DescriptorSource::Oracle : DescriptorSource::Patches;
    if (source == DescriptorSource::Oracle) {
      const auto path = aux_path(a.seq, "", "descriptors.csv");
      auto in = open_in(path);
      seq.descriptors = read_descriptors(in, path);
    } else {
      const auto path = aux_path(a.seq, "", "patches.csv");
      auto in = open_in(path);
      seq.patches = read_patches(in, path);
    }
    Rng rng = make_rng(a.seed, "pairs");
    const auto samples = make_pair_samples(seq, source, a.negatives, rng);

    EmbeddingModel model = EmbeddingModel::base(a.seed);
    if (a.head == "enhanced") {
      model = a.init.empty() ? EmbeddingModel::enhanced(a.seed) : EmbeddingModel::enhanced_from(load_model(a.init), a.seed);
    } else if (!a.init.empty()) {
      throw ConfigError("--init applies to the enhanced head only");
    }
    TrainConfig cfg;
    cfg.epochs = a.epochs;
    cfg.batch_size = a.batch_size;
    cfg.learning_rate = a.lr;
    cfg.margin = a.margin;
    cfg.freeze_epochs = a.freeze;
    cfg.lr_decay_epochs = a.decay;
    cfg.seed = a.seed;
    const auto result = train(model, samples, cfg);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
    save_model(result.model, a.out);
    const auto rep = evaluate_pairs(result.model, samples);
    std::printf("%zu pairs, %d epochs", samples.size(), a.epochs);
    if (!result.loss_history.empty()) {
      std::printf(", loss %.6g -> %.6g", result.loss_history.front(), result.loss_history.back());
    }
    std::printf("\ntraining pairs: precision %.4f recall %.4f f1 %.4f (threshold = margin %.3g)\n",
                rep.precision, rep.recall, rep.f1, result.model.margin());
  };
}

// ---------------------------------------------------------------------------
// gen-synth
// ---------------------------------------------------------------------------

void add_gen_synth(CLI::App& app, SyntheticSpec& spec, std::string& out_dir, std::function<void()>& run) {
  auto* cmd = app.add_subcommand("gen-synth", "Write a synthetic labelled sequence");
  cmd->add_option("--out", out_dir, "Output directory")->required();
  cmd->add_option("--identities", spec.identities);
  cmd->add_option("--frames", spec.frames);
  cmd->add_option("--patch-size", spec.patch_size, "Render RGB patches of this side (0 = none)");
  cmd->add_option("--box-noise", spec.box_noise);
  cmd->add_option("--descriptor-noise", spec.descriptor_noise);
  cmd->add_option("--dropout", spec.dropout);
  cmd->add_option("--spurious", spec.spurious_rate);
  cmd->add_option("--width", spec.image_width);
  cmd->add_option("--height", spec.image_height);
  cmd->add_option("--seed", spec.seed);
  run = [&spec, &out_dir] {
    const auto seq = generate_synthetic(spec);
    const fs::path root(out_dir);
    std::error_code ec;
    fs::create_directories(root / "det", ec);
    fs::create_directories(root / "gt", ec);
    if (ec) throw IoError("cannot create '" + out_dir + "': " + ec.message());
    write_mot_file((root / "det" / "det.txt").string(), detections_as_rows(seq.detections, false));
    {
      auto out = open_out((root / "gt" / "gt.txt").string());
      write_mot_ground_truth(out, seq.ground_truth);
    }
    {
      auto out = open_out((root / "labels.csv").string());
      write_labels(out, seq.labels);
    }
    {
      auto out = open_out((root / "descriptors.csv").string());
      write_descriptors(out, seq.descriptors);
    }
    if (!seq.patches.empty()) {
      auto out = open_out((root / "patches.csv").string());
      write_patches(out, seq.patches);
    }
    std::fprintf(stderr, "%zu detections, %zu ground-truth rows in %s\n", seq.detections.size(),
                 seq.ground_truth.size(), out_dir.c_str());
  };
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online multi-object tracking with Siamese appearance scores"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  TrackArgs track_args;
  EvaluateArgs eval_args;
  BenchArgs bench_args;
  ReportArgs report_args;
  TrainArgs train_args;
  SyntheticSpec synth_spec;
  std::string synth_out;
  std::function<void()> run_track, run_eval, run_bench, run_report, run_train, run_synth;
  add_track(app, track_args, run_track);
  add_evaluate(app, eval_args, run_eval);
  add_bench(app, bench_args, run_bench);
  add_report(app, report_args, run_report);
  add_train(app, train_args, run_train);
  add_gen_synth(app, synth_spec, synth_out, run_synth);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const std::map<std::string, std::function<void()>*> runners = {
      {"track", &run_track},   {"evaluate", &run_eval},   {"bench", &run_bench},
      {"report", &run_report}, {"train-embed", &run_train}, {"gen-synth", &run_synth}};
  const std::string name = app.get_subcommands().front()->get_name();
  try {
    (*runners.at(name))();
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const SequencingError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
