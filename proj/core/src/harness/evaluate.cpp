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

#include "gauntlet/harness/evaluate.hpp"

#include "gauntlet/errors.hpp"
#include "gauntlet/rng.hpp"

namespace gauntlet::harness {

std::uint64_t image_stream_seed(std::uint64_t master_seed, long image_index,
                                std::uint64_t stream) {
  return derive_seed(
      {master_seed, static_cast<std::uint64_t>(image_index), stream});
}

int effective_trials(const defenses::DefensePipeline& defense, int trials) {
  return defense.randomized() ? trials : 1;
}

int defended_votes(const models::Classifier& classifier,
                   const defenses::DefensePipeline& defense, const Tensor& x,
                   int wanted, int trials, Rng& rng) {
  if (trials < 1) throw ConfigError("evaluate: trials must be >= 1");
  int votes = 0;
  for (int t = 0; t < trials; ++t) {
    if (classifier.classify(defense.apply(x, rng)) == wanted) ++votes;
  }
  return votes;
}

int majority_threshold(int trials) { return trials / 2 + 1; }

AccuracyResult evaluate_accuracy(const models::Classifier& classifier,
                                 const defenses::DefensePipeline* defense,
                                 const Dataset& dataset, int trials,
                                 std::uint64_t seed) {
  if (dataset.size() == 0) {
    throw InputError("evaluate: dataset is empty");
  }
  if (trials < 1) throw ConfigError("evaluate: trials must be >= 1");

  AccuracyResult result;
  result.trials = defense ? effective_trials(*defense, trials) : 1;
  const int needed = majority_threshold(result.trials);
  long correct_count = 0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const int label = dataset.labels[i];
    int votes = 0;
    if (defense) {
      Rng rng(image_stream_seed(seed, static_cast<long>(i), kStreamVotes));
      votes = defended_votes(classifier, *defense, dataset.images[i], label,
                             result.trials, rng);
    } else {
      votes = (classifier.classify(dataset.images[i]) == label) ? 1 : 0;
    }
    const bool ok = votes >= needed;
    result.votes.push_back(votes);
    result.correct.push_back(ok);
    if (ok) ++correct_count;
  }
  result.accuracy =
      static_cast<double>(correct_count) / static_cast<double>(dataset.size());
  return result;
}

}  // namespace gauntlet::harness
