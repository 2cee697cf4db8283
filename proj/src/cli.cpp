#include "emg/cli.hpp"

#include <fstream>
#include <map>

#include "CLI11.hpp"
#include "emg/config.hpp"
#include "emg/dataset.hpp"
#include "emg/error.hpp"
#include "emg/evaluation.hpp"
#include "emg/recognizer.hpp"
#include "emg/synth.hpp"
#include "emg/transport.hpp"

namespace emg {

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string model_path;
  std::string out_path;
  std::string csv_path;
  double rate = 1.0;
  std::string link = "queue";
  std::vector<std::string> inputs;
};

PipelineConfig load_pipeline(const CommonOptions& o) {
  PipelineConfig cfg = o.config_path.empty() ? PipelineConfig{} : load_config_file(o.config_path);
  if (o.seed) cfg.seed = *o.seed;
  validate(cfg);
  return cfg;
}

Lexicon load_lexicon(const PipelineConfig& cfg) {
  return cfg.lexicon_path ? load_lexicon_file(*cfg.lexicon_path) : default_lexicon();
}

std::vector<LabeledVector> load_windows(const PipelineConfig& cfg, const std::vector<std::string>& paths) {
  const WaveletSpec spec = cfg.wavelet_spec();
  std::vector<LabeledVector> data;
  for (const auto& p : paths) {
    const EmgRecording rec = read_recording_file(p);
    if (!rec.labeled()) throw Error("recording '" + p + "' has no labels");
    auto windows = extract_windows(rec, cfg.filter, spec, cfg.windowing());
    data.insert(data.end(), windows.begin(), windows.end());
  }
  if (data.empty()) throw Error("no active labeled windows found in the input recordings");
  return data;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path + "'");
  f << text;
}

int cmd_gen(const CommonOptions& o, std::ostream& out) {
  const PipelineConfig cfg = load_pipeline(o);
  const SessionPlan plan = cfg.plan();
  const EmgRecording rec = gen_recording(plan, default_templates());
  write_recording_file(rec, o.out_path);

  std::map<Gesture, std::pair<int, double>> summary;
  for (const auto& s : plan.segments) {
    auto& [count, secs] = summary[s.label];
    ++count;
    secs += s.seconds;
  }
  out << "seed=" << plan.seed << " fs=" << plan.fs << " samples=" << rec.size() << " segments=" << plan.segments.size()
      << "\n";
  for (const auto& [g, cs] : summary) out << "  " << to_string(g) << ": " << cs.first << " x, " << cs.second << " s\n";
  out << "wrote " << o.out_path << "\n";
  return 0;
}

int cmd_train(const CommonOptions& o, std::ostream& out) {
  const PipelineConfig cfg = load_pipeline(o);
  const auto data = load_windows(cfg, o.inputs);
  const DatasetSplit parts = split(data, 1.0 - cfg.test_fraction, cfg.seed);
  TrainConfig tc = cfg.train;
  tc.seed = cfg.seed;
  const TrainResult result = train(parts.train, tc);
  const Evaluation ev = evaluate(result.model, parts.test);

  out << "windows: train=" << parts.train.size() << " test=" << parts.test.size() << "\n";
  out << "epochs=" << result.history.size() - 1 << " best_epoch=" << result.best_epoch << "\n";
  out << format_table(ev.matrix);
  if (!o.csv_path.empty()) write_text(o.csv_path, format_csv(ev.matrix));
  save_model_file(result.model, o.out_path);
  out << "wrote " << o.out_path << "\n";
  return 0;
}

int cmd_eval(const CommonOptions& o, std::ostream& out) {
  const PipelineConfig cfg = load_pipeline(o);
  const MlpModel model = load_model_file(o.model_path);
  const auto data = load_windows(cfg, o.inputs);
  const Evaluation ev = evaluate(model, data);
  out << format_table(ev.matrix);
  if (!o.csv_path.empty()) write_text(o.csv_path, format_csv(ev.matrix));
  return 0;
}

RecognizerSetup make_setup(const PipelineConfig& cfg, const CommonOptions& o) {
  Lexicon lex = load_lexicon(cfg);
  MlpModel model = load_model_file(o.model_path);
  RecognizerSetup setup{std::move(model), std::move(lex), cfg.recognizer, cfg.filter, cfg.wavelet_spec(), cfg.levels};
  validate(setup);
  return setup;
}

int cmd_classify(const CommonOptions& o, std::ostream& out) {
  const PipelineConfig cfg = load_pipeline(o);
  const RecognizerSetup setup = make_setup(cfg, o);
  const EmgRecording rec = read_recording_file(o.inputs.at(0));
  for (const auto& ev : recognize_stream(rec, setup)) out << format_event(ev) << "\n";
  return 0;
}

int cmd_stream(const CommonOptions& o, std::ostream& out, std::ostream& err) {
  const PipelineConfig cfg = load_pipeline(o);
  const RecognizerSetup setup = make_setup(cfg, o);
  const EmgRecording rec = read_recording_file(o.inputs.at(0));
  if (rec.fs != cfg.fs)
    throw ConfigError("recording sampled at " + std::to_string(rec.fs) + " Hz but config says " +
                      std::to_string(cfg.fs) + " Hz");
  if (o.link != "queue" && o.link != "socket") throw ConfigError("--link must be 'queue' or 'socket'");
  const auto report =
      stream_recognize(rec, setup, o.rate, o.link == "socket" ? LinkKind::Socket : LinkKind::InProcess);
  for (const auto& ev : report.events) out << format_event(ev) << "\n";
  if (report.dropped > 0 || !report.gaps.empty())
    err << "warning: " << report.dropped << " frame(s) dropped, " << report.gaps.size() << " sequence gap(s)\n";
  return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Surface-EMG gesture recognition: synthesize, train, evaluate and recognize"};
  app.require_subcommand(1);
  CommonOptions o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "Pipeline config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "Override the config seed");
  };

  auto* gen = app.add_subcommand("gen", "Write a labeled synthetic recording");
  add_common(gen);
  gen->add_option("--out", o.out_path, "Output recording path")->required();

  auto* train_cmd = app.add_subcommand("train", "Train a classifier on labeled recordings");
  add_common(train_cmd);
  train_cmd->add_option("recordings", o.inputs, "Labeled recording files")->required();
  train_cmd->add_option("--out", o.out_path, "Output model path")->required();
  train_cmd->add_option("--csv", o.csv_path, "Write true,predicted,count lines here");

  auto* eval = app.add_subcommand("eval", "Evaluate a model on labeled recordings");
  add_common(eval);
  eval->add_option("recordings", o.inputs, "Labeled recording files")->required();
  eval->add_option("--model", o.model_path, "Model file")->required();
  eval->add_option("--csv", o.csv_path, "Write true,predicted,count lines here");

  auto* classify_cmd = app.add_subcommand("classify", "Recognize gesture events in a recording (batch)");
  add_common(classify_cmd);
  classify_cmd->add_option("recording", o.inputs, "Recording file")->required()->expected(1);
  classify_cmd->add_option("--model", o.model_path, "Model file")->required();

  auto* stream = app.add_subcommand("stream", "Replay a recording through the frame link and recognize");
  add_common(stream);
  stream->add_option("recording", o.inputs, "Recording file")->required()->expected(1);
  stream->add_option("--model", o.model_path, "Model file")->required();
  stream->add_option("--rate", o.rate, "Replay speed multiplier (0 = as fast as possible)")->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  stream->add_option("--link", o.link, "queue or socket")->capture_default_str();

  std::vector<std::string> argv_store{"emgassist"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    const auto parsed = app.get_subcommands();
    out << (parsed.empty() ? app.help() : parsed.front()->help());
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (gen->parsed()) return cmd_gen(o, out);
    if (train_cmd->parsed()) return cmd_train(o, out);
    if (eval->parsed()) return cmd_eval(o, out);
    if (classify_cmd->parsed()) return cmd_classify(o, out);
    if (stream->parsed()) return cmd_stream(o, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

} // namespace emg
