#include "emg/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "emg/error.hpp"

namespace emg {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double to_double(std::string_view v, const std::string& key) {
  double out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty())
    throw ConfigError("'" + key + "' expects a number, got '" + std::string(v) + "'");
  return out;
}

template <typename Int>
Int to_int(std::string_view v, const std::string& key) {
  Int out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty())
    throw ConfigError("'" + key + "' expects an integer, got '" + std::string(v) + "'");
  return out;
}

std::vector<int> to_int_list(std::string_view v, const std::string& key) {
  std::vector<int> out;
  while (!v.empty()) {
    const auto comma = v.find(',');
    out.push_back(to_int<int>(trim(v.substr(0, comma)), key));
    v = comma == std::string_view::npos ? std::string_view{} : v.substr(comma + 1);
  }
  return out;
}

using Setter = std::function<void(PipelineConfig&, std::string_view, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"seed", [](auto& c, auto v, auto& k) { c.seed = to_int<std::uint64_t>(v, k); }},
      {"signal.fs", [](auto& c, auto v, auto& k) { c.fs = to_int<int>(v, k); }},
      {"filter.band_lo", [](auto& c, auto v, auto& k) { c.filter.band_lo = to_double(v, k); }},
      {"filter.band_hi", [](auto& c, auto v, auto& k) { c.filter.band_hi = to_double(v, k); }},
      {"filter.order", [](auto& c, auto v, auto& k) { c.filter.bp_order = to_int<int>(v, k); }},
      {"filter.notch_f0", [](auto& c, auto v, auto& k) { c.filter.notch_f0 = to_double(v, k); }},
      {"filter.notch_q", [](auto& c, auto v, auto& k) { c.filter.notch_q = to_double(v, k); }},
      {"wavelet.name", [](auto& c, auto v, auto&) { c.wavelet = std::string(v); }},
      {"wavelet.levels", [](auto& c, auto v, auto& k) { c.levels = to_int<int>(v, k); }},
      {"recognizer.window", [](auto& c, auto v, auto& k) { c.recognizer.window_len = to_double(v, k); }},
      {"recognizer.hop", [](auto& c, auto v, auto& k) { c.recognizer.hop = to_double(v, k); }},
      {"recognizer.threshold", [](auto& c, auto v, auto& k) { c.recognizer.activity_threshold = to_double(v, k); }},
      {"recognizer.debounce", [](auto& c, auto v, auto& k) { c.recognizer.debounce_k = to_int<int>(v, k); }},
      {"recognizer.hold", [](auto& c, auto v, auto& k) { c.recognizer.hold = to_double(v, k); }},
      {"mlp.hidden", [](auto& c, auto v, auto& k) { c.train.hidden = to_int_list(v, k); }},
      {"mlp.learning_rate", [](auto& c, auto v, auto& k) { c.train.learning_rate = to_double(v, k); }},
      {"mlp.momentum", [](auto& c, auto v, auto& k) { c.train.momentum = to_double(v, k); }},
      {"mlp.max_epochs", [](auto& c, auto v, auto& k) { c.train.max_epochs = to_int<int>(v, k); }},
      {"mlp.target_mse", [](auto& c, auto v, auto& k) { c.train.target_mse = to_double(v, k); }},
      {"mlp.validation_fraction", [](auto& c, auto v, auto& k) { c.train.validation_fraction = to_double(v, k); }},
      {"mlp.patience", [](auto& c, auto v, auto& k) { c.train.patience = to_int<int>(v, k); }},
      {"train.hop", [](auto& c, auto v, auto& k) { c.train_hop = to_double(v, k); }},
      {"train.test_fraction", [](auto& c, auto v, auto& k) { c.test_fraction = to_double(v, k); }},
      {"lexicon.path", [](auto& c, auto v, auto&) { c.lexicon_path = std::string(v); }},
      {"gen.plan", [](auto& c, auto v, auto&) { c.gen.segments = parse_plan(v); }},
      {"gen.repeat", [](auto& c, auto v, auto& k) { c.gen.repeat = to_int<int>(v, k); }},
      {"gen.noise_floor", [](auto& c, auto v, auto& k) { c.gen.noise_floor = to_double(v, k); }},
      {"gen.powerline_amp", [](auto& c, auto v, auto& k) { c.gen.powerline_amp = to_double(v, k); }},
  };
  return table;
}

} // namespace

WindowingOptions PipelineConfig::windowing() const {
  return {recognizer.window_len, train_hop, recognizer.activity_threshold, levels};
}

SessionPlan PipelineConfig::plan() const {
  SessionPlan p;
  p.fs = fs;
  p.seed = seed;
  p.noise_floor = gen.noise_floor;
  p.powerline_amp = gen.powerline_amp;
  for (int r = 0; r < gen.repeat; ++r) p.segments.insert(p.segments.end(), gen.segments.begin(), gen.segments.end());
  return p;
}

std::vector<PlanSegment> parse_plan(std::string_view text) {
  std::vector<PlanSegment> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto item = trim(text.substr(0, comma));
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    const auto name = trim(item.substr(0, colon));
    const auto g = parse_gesture(name);
    if (!g) throw ConfigError("unknown gesture label '" + std::string(name) + "' in plan");
    if (colon == std::string_view::npos)
      throw ConfigError("plan item '" + std::string(item) + "' needs a duration (Label:seconds)");
    const double secs = to_double(trim(item.substr(colon + 1)), "gen.plan");
    if (!(secs > 0)) throw ConfigError("plan item '" + std::string(item) + "' needs a positive duration");
    out.push_back({*g, secs});
  }
  return out;
}

PipelineConfig parse_config(std::string_view text) {
  PipelineConfig cfg;
  std::string section;
  std::size_t lineno = 0;
  while (!text.empty()) {
    ++lineno;
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(lineno, "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(lineno, "expected 'key = value'");
    const std::string name(trim(line.substr(0, eq)));
    const std::string key = section.empty() ? name : section + "." + name;
    const auto it = setters().find(key);
    if (it == setters().end()) throw ParseError(lineno, "unknown setting '" + key + "'");
    try {
      it->second(cfg, trim(line.substr(eq + 1)), key);
    } catch (const ConfigError& e) {
      throw ParseError(lineno, e.what());
    }
  }
  cfg.filter.fs = cfg.fs;
  return cfg;
}

PipelineConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.detail(), path);
  }
}

void validate(const PipelineConfig& cfg) {
  if (cfg.fs <= 0) throw ConfigError("fs must be positive");
  if (std::abs(cfg.filter.fs - cfg.fs) > 0) throw ConfigError("filter fs does not match signal fs");
  validate(cfg.filter);
  validate(cfg.recognizer);
  validate(cfg.train);
  const WaveletSpec spec = cfg.wavelet_spec();
  const double w = cfg.recognizer.window_len * cfg.fs;
  if (std::abs(w - std::round(w)) > 1e-9 * w)
    throw ConfigError("window length is not a whole number of samples");
  check_decomposable(static_cast<Eigen::Index>(std::lround(w)), spec, cfg.levels);
  const double h = cfg.recognizer.hop * cfg.fs;
  if (std::abs(h - std::round(h)) > 1e-9 * h || std::lround(h) < 1)
    throw ConfigError("recognizer hop is not a positive whole number of samples");
  if (!(cfg.train_hop > 0)) throw ConfigError("train.hop must be positive");
  if (!(cfg.test_fraction > 0 && cfg.test_fraction < 1)) throw ConfigError("train.test_fraction must lie in (0, 1)");
  if (cfg.gen.repeat < 1) throw ConfigError("gen.repeat must be >= 1");
  validate(cfg.plan());
}

} // namespace emg
