#include "emg/recognizer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "emg/error.hpp"
#include "emg/features.hpp"

namespace emg {

namespace {

std::size_t whole_samples(double seconds, double fs, const char* what) {
  const double n = seconds * fs;
  const double r = std::round(n);
  if (std::abs(n - r) > 1e-9 * std::max(1.0, n) || r < 1)
    throw ConfigError(std::string(what) + " of " + std::to_string(seconds) + " s is not a positive whole number of samples at " +
                      std::to_string(fs) + " Hz");
  return static_cast<std::size_t>(r);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

} // namespace

Lexicon default_lexicon() {
  return {
      {Gesture::FingersSpread, "HELLO", std::nullopt},
      {Gesture::Fist, "YES", std::nullopt},
      {Gesture::WaveIn, "NO", std::nullopt},
      {Gesture::WaveOut, "THANK YOU", std::nullopt},
      {Gesture::DoubleTap, "GOOD BYE", std::nullopt},
  };
}

Lexicon parse_lexicon(std::string_view text, Lexicon base) {
  std::size_t lineno = 0;
  std::vector<Gesture> seen;
  while (!text.empty()) {
    ++lineno;
    const auto nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.empty() || line.front() == '#') continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(lineno, "expected 'Gesture=phrase[;audio_ref]'");
    const auto name = trim(line.substr(0, eq));
    const auto g = parse_gesture(name);
    if (!g) throw ParseError(lineno, "unknown gesture class '" + std::string(name) + "'");
    if (std::find(seen.begin(), seen.end(), *g) != seen.end())
      throw ParseError(lineno, "duplicate entry for " + std::string(name));
    seen.push_back(*g);

    auto rest = line.substr(eq + 1);
    LexiconEntry entry{*g, {}, std::nullopt};
    const auto semi = rest.find(';');
    entry.phrase = std::string(trim(rest.substr(0, semi)));
    if (semi != std::string_view::npos) {
      const auto audio = trim(rest.substr(semi + 1));
      if (!audio.empty()) entry.audio_ref = std::string(audio);
    }
    if (entry.phrase.empty()) throw ParseError(lineno, "empty phrase for " + std::string(name));

    auto it = std::find_if(base.begin(), base.end(), [&](const LexiconEntry& e) { return e.gesture == *g; });
    if (it != base.end())
      *it = std::move(entry);
    else
      base.push_back(std::move(entry));
  }
  return base;
}

Lexicon load_lexicon_file(const std::string& path, Lexicon base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open lexicon '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_lexicon(ss.str(), std::move(base));
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.detail(), path);
  }
}

const LexiconEntry* find_entry(const Lexicon& lex, Gesture g) {
  for (const auto& e : lex)
    if (e.gesture == g) return &e;
  return nullptr;
}

void validate(const RecognizerConfig& cfg) {
  if (!(cfg.hop > 0)) throw ConfigError("hop must be positive");
  if (!(cfg.window_len >= cfg.hop)) throw ConfigError("window length must be >= hop");
  if (cfg.debounce_k < 1) throw ConfigError("debounce_k must be >= 1");
  if (!(cfg.hold >= 0)) throw ConfigError("hold must be non-negative");
  if (!(cfg.activity_threshold >= 0)) throw ConfigError("activity threshold must be non-negative");
}

std::string format_event(const RecognitionEvent& ev) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "t=%.2f", ev.start_time);
  std::string line = buf;
  line += " gesture=";
  line += to_string(ev.gesture);
  line += " phrase=\"" + ev.phrase + "\"";
  std::snprintf(buf, sizeof buf, " conf=%.2f", ev.confidence);
  line += buf;
  return line;
}

bool activity_gate(const Eigen::Ref<const Eigen::MatrixXd>& window, double threshold) {
  if (window.cols() != kChannels)
    throw DimensionError("expected " + std::to_string(kChannels) + " channels, got " + std::to_string(window.cols()));
  if (window.size() == 0) return false;
  return window.cwiseAbs().mean() >= threshold;
}

std::size_t RecognizerSetup::window_samples() const {
  return whole_samples(config.window_len, filter.fs, "window length");
}

std::size_t RecognizerSetup::hop_samples() const { return whole_samples(config.hop, filter.fs, "hop"); }

void validate(const RecognizerSetup& setup) {
  validate(setup.config);
  validate(setup.filter);
  validate(setup.model);
  check_decomposable(static_cast<Eigen::Index>(setup.window_samples()), setup.wavelet, setup.levels);
  setup.hop_samples();
  if (setup.model.input_dim() != feature_dimension(setup.levels))
    throw ConfigError("model input dimension " + std::to_string(setup.model.input_dim()) +
                      " does not match " + std::to_string(feature_dimension(setup.levels)) + " features for L=" +
                      std::to_string(setup.levels));
  if (setup.model.classes.empty()) throw ConfigError("model has no class list");
  for (auto g : setup.model.classes) {
    if (g == Gesture::Rest) continue;
    const auto* e = find_entry(setup.lexicon, g);
    if (!e || e->phrase.empty())
      throw ConfigError("lexicon has no phrase for model class " + std::string(to_string(g)));
  }
}

WindowClassifier::WindowClassifier(const RecognizerSetup& setup) : setup_(setup), preprocess_(setup.filter) {}

Classification WindowClassifier::operator()(const Eigen::Ref<const Eigen::MatrixXd>& raw_window) const {
  if (!activity_gate(raw_window, setup_.config.activity_threshold)) return {Gesture::Rest, 0.0};
  const Eigen::MatrixXd filtered = preprocess_(raw_window);
  return classify(setup_.model, feature_vector(filtered, setup_.wavelet, setup_.levels));
}

EventTracker::EventTracker(RecognizerConfig cfg, Lexicon lexicon) : cfg_(cfg), lexicon_(std::move(lexicon)) {
  validate(cfg_);
}

std::optional<RecognitionEvent> EventTracker::observe(const Classification& decision, double window_start) {
  if (decision.gesture != run_gesture_ || run_length_ == 0) {
    run_gesture_ = decision.gesture;
    run_length_ = 0;
    run_conf_sum_ = 0;
    run_fired_ = false;
  }
  ++run_length_;
  run_conf_sum_ += decision.confidence;

  if (run_gesture_ == Gesture::Rest || run_fired_ || run_length_ < cfg_.debounce_k) return std::nullopt;
  // Small slack so hop multiples that should equal `hold` are not rejected by rounding.
  if (last_fire_ && window_start - *last_fire_ < cfg_.hold - 1e-9) return std::nullopt;

  const auto* entry = find_entry(lexicon_, run_gesture_);
  if (!entry) throw ConfigError("lexicon has no phrase for " + std::string(to_string(run_gesture_)));
  run_fired_ = true;
  last_fire_ = window_start;
  return RecognitionEvent{run_gesture_, entry->phrase, entry->audio_ref,
                          run_conf_sum_ / run_length_, window_start, cfg_.hold};
}

std::vector<RecognitionEvent> recognize_stream(const EmgRecording& rec, const RecognizerSetup& setup) {
  validate(setup);
  if (std::abs(setup.filter.fs - rec.fs) > 0)
    throw ConfigError("recording sampled at " + std::to_string(rec.fs) + " Hz but the pipeline is configured for " +
                      std::to_string(setup.filter.fs) + " Hz");
  const std::size_t W = setup.window_samples();
  const std::size_t H = setup.hop_samples();
  const WindowClassifier classify_window(setup);
  EventTracker tracker(setup.config, setup.lexicon);
  std::vector<RecognitionEvent> events;
  for (std::size_t start = 0; start + W <= rec.size(); start += H) {
    const auto decision = classify_window(to_block(rec, start, W));
    if (auto ev = tracker.observe(decision, static_cast<double>(start) / rec.fs)) events.push_back(std::move(*ev));
  }
  return events;
}

std::vector<RecognitionEvent> recognize_stream(const EmgRecording& rec, const MlpModel& model, const Lexicon& lex,
                                               const RecognizerConfig& cfg, const FilterConfig& filt,
                                               const WaveletSpec& wspec, int levels) {
  return recognize_stream(rec, RecognizerSetup{model, lex, cfg, filt, wspec, levels});
}

StreamRecognizer::StreamRecognizer(RecognizerSetup setup, int fs)
    : setup_(std::move(setup)), classify_(setup_), tracker_(setup_.config, setup_.lexicon), fs_(fs) {
  validate(setup_);
  if (std::abs(setup_.filter.fs - fs) > 0)
    throw ConfigError("stream sampled at " + std::to_string(fs) + " Hz but the pipeline is configured for " +
                      std::to_string(setup_.filter.fs) + " Hz");
  window_ = setup_.window_samples();
  hop_ = setup_.hop_samples();
  ring_.resize(window_);
}

std::optional<RecognitionEvent> StreamRecognizer::push(const ChannelValues& sample) {
  ring_[seen_ % window_] = sample;
  ++seen_;
  if (seen_ < window_ || (seen_ - window_) % hop_ != 0) return std::nullopt;

  const std::size_t start = seen_ - window_;
  Eigen::MatrixXd block(static_cast<Eigen::Index>(window_), kChannels);
  for (std::size_t i = 0; i < window_; ++i) {
    const auto& s = ring_[(start + i) % window_];
    for (int c = 0; c < kChannels; ++c) block(static_cast<Eigen::Index>(i), c) = s[c];
  }
  return tracker_.observe(classify_(block), static_cast<double>(start) / fs_);
}

} // namespace emg
