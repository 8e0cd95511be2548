#pragma once

#include <array>
#include <cmath>
#include <string>

#include "trashfire/error.hpp"

namespace trashfire {

/// One attack-vs-model trial from an experiment log. `t_attack` is the
/// observed time; `event` is true when the attack produced a
/// misclassification within budget, false when the trial is right-censored
/// at its elapsed time.
struct ExperimentRecord {
  std::string dataset;
  std::string attack;
  double attack_strength = 0.0;
  std::string defence;
  double defence_strength = 0.0;
  long layers = 0;
  long epochs = 0;
  double t_train = 0.0;    // seconds per training sample
  double t_predict = 0.0;  // seconds per inference sample
  double t_attack = 0.0;   // seconds per attacked sample (observed time)
  bool event = false;
  double acc_ben = 0.0;
  double acc_adv = 0.0;
};

/// Canonical CSV/JSONL column order.
inline const std::array<const char*, 13>& record_columns() {
  static const std::array<const char*, 13> cols = {
      "dataset",   "attack",  "attack_strength", "defence", "defence_strength",
      "layers",    "epochs",  "t_train",         "t_predict", "t_attack",
      "event",     "acc_ben", "acc_adv"};
  return cols;
}

/// Checks the record invariants; throws ParseError with `where` prefixed
/// on the first violation.
inline void validate_record(const ExperimentRecord& r, const std::string& where) {
  auto fail = [&where](const std::string& msg) {
    throw ParseError(where + ": " + msg);
  };
  auto positive_finite = [&](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      fail(std::string(name) + " must be strictly positive and finite, got " +
           std::to_string(v));
  };
  positive_finite(r.t_train, "t_train");
  positive_finite(r.t_predict, "t_predict");
  positive_finite(r.t_attack, "t_attack");
  if (!(r.attack_strength >= 0.0) || !std::isfinite(r.attack_strength))
    fail("attack_strength must be >= 0");
  if (!(r.defence_strength >= 0.0) || !std::isfinite(r.defence_strength))
    fail("defence_strength must be >= 0");
  if (r.layers <= 0) fail("layers must be a positive integer");
  if (r.epochs <= 0) fail("epochs must be a positive integer");
  if (!(r.acc_ben >= 0.0 && r.acc_ben <= 1.0)) fail("acc_ben must be in [0,1]");
  if (!(r.acc_adv >= 0.0 && r.acc_adv <= 1.0)) fail("acc_adv must be in [0,1]");
  if (r.dataset.empty()) fail("dataset label must be nonempty");
  if (r.attack.empty()) fail("attack label must be nonempty");
  if (r.defence.empty()) fail("defence label must be nonempty");
}

}  // namespace trashfire
