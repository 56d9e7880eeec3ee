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

#include <vector>

#include "gauntlet/harness/dataset.hpp"
#include "gauntlet/harness/evaluate.hpp"
#include "gauntlet/harness/manifest.hpp"
#include "gauntlet/harness/report.hpp"

namespace gauntlet::harness {

// Re-checks the attack budget with code independent of the attacks module:
// every element must satisfy |x_adv - x| <= epsilon + 1e-12 and lie in
// [0,1]. Throws ContractError on any violation.
void verify_budget(const Tensor& x, const Tensor& x_adv, double epsilon);

// Untargeted attack crafted against the bare classifier (the attacker never
// sees the defense), then judged against the defended pipeline with a
// majority vote. The attack seed is shared with the white-box untargeted
// phase, so under the identity defense the two phases score the very same
// adversarial example.
AttackOutcome oblivious_outcome(const models::Classifier& classifier,
                                const defenses::DefensePipeline& defense,
                                const Tensor& x, int y, long image_index,
                                const RunManifest& manifest);

// White-box untargeted attack through the defense (direct route when the
// defense is differentiable, BPDA otherwise), majority-vote verdict.
AttackOutcome whitebox_outcome(const models::Classifier& classifier,
                               const defenses::DefensePipeline& defense,
                               const Tensor& x, int y, long image_index,
                               const RunManifest& manifest);

// Targeted white-box attack toward a uniformly random target != y, judged by
// the manifest's trials/threshold rule (default: 9 of 10 defended
// classifications must hit the target).
TargetedOutcome targeted_outcome(const models::Classifier& classifier,
                                 const defenses::DefensePipeline& defense,
                                 const Tensor& x, int y, long image_index,
                                 const RunManifest& manifest);

// Full per-image work item: clean predictions, then the phases enabled in
// the manifest. All randomness derives from (manifest.seed, image_index), so
// records do not depend on scheduling.
PerImageRecord evaluate_image(const models::Classifier& classifier,
                              const defenses::DefensePipeline& defense,
                              const Tensor& x, int y, long image_index,
                              const RunManifest& manifest);

struct ObliviousRunResult {
  std::vector<AttackOutcome> outcomes;
  double accuracy = 0.0;
};

// Dataset-level oblivious pass, mainly for experiments that want the
// fragment without the rest of the suite.
ObliviousRunResult run_oblivious_attack(const models::Classifier& classifier,
                                        const defenses::DefensePipeline& defense,
                                        const Dataset& dataset,
                                        const RunManifest& manifest);

// End-to-end evaluation: loads data and checkpoints named by the manifest,
// distributes per-image work over manifest.workers threads, and assembles
// the report. If any work item throws, the finished records are dumped to
// manifest.output as an incomplete report and the error is rethrown.
EvalReport run_whitebox_suite(const RunManifest& manifest);

// Same, with already-loaded pieces (used by the CLI and tests to avoid
// re-reading checkpoints).
EvalReport run_whitebox_suite(const RunManifest& manifest,
                              const models::Classifier& classifier,
                              const defenses::DefensePipeline& defense,
                              const Dataset& test);

}  // namespace gauntlet::harness
