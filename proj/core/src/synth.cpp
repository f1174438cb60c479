#include "cfprm/synth.hpp"

#include <array>
#include <string_view>

#include "cfprm/errors.hpp"
#include "cfprm/rng.hpp"

namespace cfprm {

namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

constexpr std::array<std::string_view, 5> kRestatements = {
    "so the running total is ",
    "that means we now have ",
    "in other words the value is ",
    "restating the result we are at ",
    "checking again the current value is ",
};

std::string op_phrase(const ChainOp& op) {
  switch (op.kind) {
    case OpKind::kAdd: return "add " + std::to_string(op.operand);
    case OpKind::kSubtract: return "subtract " + std::to_string(op.operand);
    case OpKind::kMultiply: return "multiply by " + std::to_string(op.operand);
  }
  return {};
}

char op_symbol(OpKind k) {
  switch (k) {
    case OpKind::kAdd: return '+';
    case OpKind::kSubtract: return '-';
    case OpKind::kMultiply: return '*';
  }
  return '?';
}

std::string op_step_text(const ChainOp& op, std::int64_t lhs, std::int64_t result) {
  return op_phrase(op) + " gives " + std::to_string(lhs) + op_symbol(op.kind) +
         std::to_string(op.operand) + "=" + std::to_string(result);
}

// Next operation keeping the correct-track value inside [0, max_value].
ChainOp pick_op(Rng& rng, std::int64_t value, std::int64_t max_value) {
  std::vector<ChainOp> options;
  for (std::int64_t k = 1; k <= 9; ++k) {
    if (value + k <= max_value) options.push_back({OpKind::kAdd, k});
    if (value - k >= 0) options.push_back({OpKind::kSubtract, k});
  }
  for (std::int64_t k = 2; k <= 3; ++k) {
    if (value >= 1 && value * k <= max_value) options.push_back({OpKind::kMultiply, k});
  }
  return options[rng.below(options.size())];
}

std::int64_t error_offset(Rng& rng) {
  const std::int64_t magnitude = rng.between(1, 3);
  return rng.bernoulli(0.5) ? magnitude : -magnitude;
}

}  // namespace

void SynthConfig::validate() const {
  if (!is_probability(p_error) || !is_probability(p_recover) || !is_probability(p_redundant)) {
    throw ConfigError("synthetic probabilities must lie in [0, 1]");
  }
  if (min_ops > max_ops) throw ConfigError("min_ops must not exceed max_ops");
  if (candidates_per_query < 1) throw ConfigError("candidates_per_query must be >= 1");
  if (max_value < 10) throw ConfigError("max_value must be >= 10");
}

nlohmann::json SynthConfig::to_json() const {
  return {{"n_queries", n_queries},
          {"n_eval_queries", n_eval_queries},
          {"min_ops", min_ops},
          {"max_ops", max_ops},
          {"p_error", p_error},
          {"p_recover", p_recover},
          {"p_redundant", p_redundant},
          {"candidates_per_query", candidates_per_query},
          {"max_value", max_value},
          {"seed", seed}};
}

std::int64_t apply(const ChainOp& op, std::int64_t value) noexcept {
  switch (op.kind) {
    case OpKind::kAdd: return value + op.operand;
    case OpKind::kSubtract: return value - op.operand;
    case OpKind::kMultiply: return value * op.operand;
  }
  return value;
}

SynthTask gen_task(std::uint64_t seed, const SynthConfig& cfg) {
  cfg.validate();
  Rng rng = Rng(seed).split("task");
  SynthTask task;
  task.start = rng.between(1, 9);
  const auto n_ops = static_cast<std::size_t>(
      rng.between(static_cast<std::int64_t>(cfg.min_ops), static_cast<std::int64_t>(cfg.max_ops)));
  task.query = "start with " + std::to_string(task.start);
  std::int64_t value = task.start;
  for (std::size_t i = 0; i < n_ops; ++i) {
    const ChainOp op = pick_op(rng, value, cfg.max_value);
    task.ops.push_back(op);
    task.query += "; " + op_phrase(op);
    value = apply(op, value);
  }
  task.answer = value;
  return task;
}

SampledTrajectory sample_trajectory_traced(const SynthTask& task, const SynthConfig& cfg,
                                           std::uint64_t seed) {
  cfg.validate();
  Rng rng = Rng(seed).split("trajectory");
  SampledTrajectory out;
  out.trajectory.query = task.query;

  auto emit = [&](std::string text, std::int64_t stated, std::int64_t reference, bool redundant) {
    const std::size_t index = out.trajectory.steps.size() + 1;
    const StepLabel label = stated == reference ? StepLabel::kPositive : StepLabel::kNegative;
    out.trajectory.steps.push_back(Step{index, std::move(text), label});
    out.stated.push_back(stated);
    out.reference.push_back(reference);
    out.redundant.push_back(redundant);
  };

  if (task.ops.empty()) {
    emit("start with " + std::to_string(task.start) + " so the value is " +
             std::to_string(task.start),
         task.start, task.start, false);
  }

  std::int64_t truth = task.start;
  std::int64_t stated = task.start;
  for (std::size_t i = 0; i < task.ops.size(); ++i) {
    const ChainOp& op = task.ops[i];
    const std::int64_t next_truth = apply(op, truth);
    if (stated == truth) {
      if (rng.bernoulli(cfg.p_error)) {
        const std::int64_t wrong = next_truth + error_offset(rng);
        emit(op_step_text(op, truth, wrong), wrong, next_truth, false);
        stated = wrong;
      } else {
        emit(op_step_text(op, truth, next_truth), next_truth, next_truth, false);
        stated = next_truth;
      }
    } else if (rng.bernoulli(cfg.p_recover)) {
      emit(op_step_text(op, truth, next_truth), next_truth, next_truth, false);
      stated = next_truth;
    } else {
      const std::int64_t carried = apply(op, stated);
      emit(op_step_text(op, stated, carried), carried, next_truth, false);
      stated = carried;
    }
    truth = next_truth;

    if (i + 1 < task.ops.size() && rng.bernoulli(cfg.p_redundant)) {
      const auto phrase = kRestatements[rng.below(kRestatements.size())];
      emit(std::string(phrase) + std::to_string(stated), stated, truth, true);
    }
  }
  out.trajectory.answer_correct = stated == task.answer;
  return out;
}

CandidatePool gen_bon_pool(const SynthTask& task, const SynthConfig& cfg, std::uint64_t seed) {
  CandidatePool pool;
  pool.query = task.query;
  pool.candidates.reserve(cfg.candidates_per_query);
  const Rng root = Rng(seed).split("pool");
  for (std::size_t m = 0; m < cfg.candidates_per_query; ++m) {
    pool.candidates.push_back(sample_trajectory(task, cfg, root.split(m).next()));
  }
  return pool;
}

std::vector<Trajectory> gen_training_set(const SynthConfig& cfg) {
  cfg.validate();
  const Rng root = Rng(cfg.seed).split("train-set");
  std::vector<Trajectory> out;
  out.reserve(cfg.n_queries);
  for (std::size_t i = 0; i < cfg.n_queries; ++i) {
    const Rng item = root.split(i);
    const SynthTask task = gen_task(item.split("task").next(), cfg);
    out.push_back(sample_trajectory(task, cfg, item.split("sample").next()));
  }
  return out;
}

std::vector<CandidatePool> gen_eval_pools(const SynthConfig& cfg) {
  cfg.validate();
  const Rng root = Rng(cfg.seed).split("eval-set");
  std::vector<CandidatePool> out;
  out.reserve(cfg.n_eval_queries);
  for (std::size_t i = 0; i < cfg.n_eval_queries; ++i) {
    const Rng item = root.split(i);
    const SynthTask task = gen_task(item.split("task").next(), cfg);
    out.push_back(gen_bon_pool(task, cfg, item.split("pool").next()));
  }
  return out;
}

}  // namespace cfprm
