#include "cfprm/types.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "cfprm/errors.hpp"

namespace cfprm {

std::string_view to_symbol(StepLabel label) noexcept {
  return label == StepLabel::kPositive ? "+" : "-";
}

StepLabel label_from_symbol(std::string_view symbol) {
  if (symbol == "+") return StepLabel::kPositive;
  if (symbol == "-") return StepLabel::kNegative;
  throw std::invalid_argument("step label must be \"+\" or \"-\", got \"" + std::string(symbol) +
                              "\"");
}

std::string_view to_string(QRankNormalization n) noexcept {
  return n == QRankNormalization::kCorrectSteps ? "correct_steps" : "all_steps";
}

std::string join_steps(const Trajectory& t, std::size_t first, std::size_t last) {
  std::string out;
  for (std::size_t i = first; i <= last; ++i) {
    if (i != first) out += kStepSeparator;
    out += t.steps[i - 1].text;
  }
  return out;
}

std::string MergedSample::partial_solution() const {
  if (context.empty()) return text;
  std::string out = context;
  out += kStepSeparator;
  out += text;
  return out;
}

std::size_t GranularCorpus::total_samples() const noexcept {
  std::size_t n = 0;
  for (const auto& [c, samples] : buckets) n += samples.size();
  return n;
}

std::vector<std::size_t> GranularCorpus::traversal_order() const {
  std::vector<std::size_t> order;
  order.reserve(buckets.size());
  for (const auto& [c, samples] : buckets) order.push_back(c);
  return order;
}

const std::vector<MergedSample>& GranularCorpus::bucket(std::size_t c) const {
  static const std::vector<MergedSample> kEmpty;
  auto it = buckets.find(c);
  return it == buckets.end() ? kEmpty : it->second;
}

namespace {

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char ch) { return std::isspace(ch) != 0; });
}

}  // namespace

const Trajectory& validate_trajectory(const Trajectory& t) {
  if (t.steps.empty()) throw EmptyTrajectoryError("trajectory has no steps");
  for (std::size_t pos = 0; pos < t.steps.size(); ++pos) {
    const Step& s = t.steps[pos];
    if (s.index != pos + 1) {
      throw ContiguityError("expected step index " + std::to_string(pos + 1) + ", found " +
                            std::to_string(s.index));
    }
    if (blank(s.text)) throw EmptyStepError("step " + std::to_string(s.index) + " has empty text");
  }
  return t;
}

Trajectory make_trajectory(std::string query,
                           std::span<const std::pair<std::string, StepLabel>> steps,
                           std::optional<bool> answer_correct) {
  Trajectory t;
  t.query = std::move(query);
  t.answer_correct = answer_correct;
  t.steps.reserve(steps.size());
  for (std::size_t i = 0; i < steps.size(); ++i) {
    t.steps.push_back(Step{i + 1, steps[i].first, steps[i].second});
  }
  return t;
}

}  // namespace cfprm
