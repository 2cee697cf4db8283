#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "emg/dsp.hpp"
#include "emg/mlp.hpp"
#include "emg/recording.hpp"
#include "emg/wavelet.hpp"

namespace emg {

struct LexiconEntry {
  Gesture gesture = Gesture::Rest;
  std::string phrase;
  std::optional<std::string> audio_ref;

  friend bool operator==(const LexiconEntry&, const LexiconEntry&) = default;
};

using Lexicon = std::vector<LexiconEntry>;

/// FingersSpread HELLO, Fist YES, WaveIn NO, WaveOut THANK YOU, DoubleTap GOOD BYE.
Lexicon default_lexicon();

/// Lines `Gesture=phrase[;audio_ref]`, blank lines and `#` comments ignored.
/// Entries replace those of `base` for the same gesture.
Lexicon parse_lexicon(std::string_view text, Lexicon base = default_lexicon());
Lexicon load_lexicon_file(const std::string& path, Lexicon base = default_lexicon());
const LexiconEntry* find_entry(const Lexicon& lex, Gesture g);

struct RecognizerConfig {
  double window_len = 1.0;  ///< seconds
  double hop = 0.25;        ///< seconds
  double activity_threshold = 4.0;
  int debounce_k = 3;
  double hold = 1.0;  ///< refractory period after an event, seconds
};

void validate(const RecognizerConfig& cfg);

struct RecognitionEvent {
  Gesture gesture = Gesture::Rest;
  std::string phrase;
  std::optional<std::string> audio_ref;
  double confidence = 0;
  double start_time = 0;  ///< start of the window on which the event fired, seconds
  double hold = 0;

  friend bool operator==(const RecognitionEvent&, const RecognitionEvent&) = default;
};

/// `t=<sec> gesture=<name> phrase="<text>" conf=<0.xx>`
std::string format_event(const RecognitionEvent& ev);

/// True iff the mean absolute raw value over all channels and samples reaches `threshold`.
bool activity_gate(const Eigen::Ref<const Eigen::MatrixXd>& window, double threshold);

/// Everything needed to turn raw windows into decisions and events.
struct RecognizerSetup {
  MlpModel model;
  Lexicon lexicon = default_lexicon();
  RecognizerConfig config;
  FilterConfig filter;
  WaveletSpec wavelet = daubechies4();
  int levels = 3;

  std::size_t window_samples() const;
  std::size_t hop_samples() const;
};

/// Checks every cross-module constraint (window divisibility, model input
/// dimension, lexicon coverage of the model's classes).
void validate(const RecognizerSetup& setup);

/// Per-window decision: Rest for inactive windows, otherwise the classifier's
/// output. Holds a reference to `setup`, which must outlive it.
class WindowClassifier {
public:
  explicit WindowClassifier(const RecognizerSetup& setup);
  Classification operator()(const Eigen::Ref<const Eigen::MatrixXd>& raw_window) const;

private:
  const RecognizerSetup& setup_;
  Preprocessor preprocess_;
};

/// Debounce and refractory logic over a sequence of window decisions. A run
/// of identical non-Rest decisions fires at most once: at the first window
/// where the run has debounce_k members and at least `hold` seconds have
/// passed since the previous firing.
class EventTracker {
public:
  EventTracker(RecognizerConfig cfg, Lexicon lexicon);
  std::optional<RecognitionEvent> observe(const Classification& decision, double window_start);

private:
  RecognizerConfig cfg_;
  Lexicon lexicon_;
  Gesture run_gesture_ = Gesture::Rest;
  int run_length_ = 0;
  double run_conf_sum_ = 0;
  bool run_fired_ = false;
  std::optional<double> last_fire_;
};

/// Batch recognition over a complete recording.
std::vector<RecognitionEvent> recognize_stream(const EmgRecording& rec, const RecognizerSetup& setup);

std::vector<RecognitionEvent> recognize_stream(const EmgRecording& rec, const MlpModel& model, const Lexicon& lex,
                                               const RecognizerConfig& cfg, const FilterConfig& filt,
                                               const WaveletSpec& wspec, int levels);

/// Incremental recognizer fed one sample at a time. Must be driven by a single thread.
class StreamRecognizer {
public:
  StreamRecognizer(RecognizerSetup setup, int fs);
  StreamRecognizer(const StreamRecognizer&) = delete;
  StreamRecognizer& operator=(const StreamRecognizer&) = delete;

  std::optional<RecognitionEvent> push(const ChannelValues& sample);
  std::size_t samples_seen() const { return seen_; }

private:
  RecognizerSetup setup_;
  WindowClassifier classify_;
  EventTracker tracker_;
  std::size_t window_, hop_;
  double fs_;
  std::vector<ChannelValues> ring_;
  std::size_t seen_ = 0;
};

} // namespace emg
