// Copyright 2026 The Gauntlet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <optional>
#include <string>
#include <vector>

namespace gauntlet::harness {

// Result of one untargeted attack on one image. `votes` counts the defended
// evaluation trials that still produced the true label; `correct` is the
// majority-vote verdict over those trials. The attack succeeded on this image
// exactly when `correct` is false.
struct AttackOutcome {
  double linf = 0.0;
  int votes = 0;
  int trials = 0;
  bool correct = false;
};

// Result of one targeted attack. `votes` counts trials classified as
// `target`; `success` applies the vote threshold from the manifest, so with
// trials=10 and threshold=9 an image counts only if at least 9 of 10
// defended predictions hit the adversarial target.
struct TargetedOutcome {
  int target = 0;
  double linf = 0.0;
  int votes = 0;
  int trials = 0;
  bool success = false;
};

struct PerImageRecord {
  long index = 0;
  int label = 0;
  // Prediction of the bare classifier on the clean image (no defense).
  int clean_prediction = 0;
  // Defended majority vote on the clean image.
  int clean_votes = 0;
  int clean_trials = 0;
  bool clean_defended_correct = false;
  std::optional<AttackOutcome> oblivious;
  std::optional<AttackOutcome> whitebox;
  std::optional<TargetedOutcome> targeted;
};

struct Aggregates {
  long images = 0;
  double clean_accuracy = 0.0;
  double defended_clean_accuracy = 0.0;
  std::optional<double> oblivious_accuracy;
  std::optional<double> whitebox_accuracy;
  std::optional<double> targeted_success_rate;
};

struct Timing {
  double wall_ms = 0.0;
  std::vector<double> per_image_ms;
};

struct EvalReport {
  int version = 1;
  // Canonical JSON of the manifest that produced this report, embedded so a
  // report is self-describing.
  std::string manifest_json;
  std::vector<PerImageRecord> per_image;
  Aggregates aggregates;
  Timing timing;
  // False when the run aborted partway; partial reports keep whatever
  // records finished.
  bool complete = true;
};

inline constexpr int kReportVersion = 1;

// Recomputes the aggregate block from the per-image records. Throws
// InputError if `per_image` is empty and ConsistencyError if optional
// sections are present on some records but missing on others.
Aggregates recompute_aggregates(const std::vector<PerImageRecord>& per_image);

// Serializes the report as indented JSON. Every field except the timing
// block is a pure function of the manifest, so two runs of the same manifest
// agree byte for byte once `timing` is erased.
std::string report_to_json(const EvalReport& report);

// Parses a report emitted by report_to_json. Throws FormatError on malformed
// or unversioned input.
EvalReport report_from_json(const std::string& text);

// Writes the report to `path` (report.output convention: pretty JSON with a
// trailing newline). Refuses an empty per_image section with InputError.
void save_report(const EvalReport& report, const std::string& path);

EvalReport load_report(const std::string& path);

}  // namespace gauntlet::harness
