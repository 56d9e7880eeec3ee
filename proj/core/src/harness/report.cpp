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

#include "gauntlet/harness/report.hpp"

#include <fstream>
#include <iterator>

#include "gauntlet/errors.hpp"
#include "gauntlet/version.hpp"
#include "json.hpp"

namespace gauntlet::harness {
namespace {

using nlohmann::ordered_json;

ordered_json attack_to_json(const AttackOutcome& a) {
  return {{"linf", a.linf},
          {"votes", a.votes},
          {"trials", a.trials},
          {"correct", a.correct}};
}

AttackOutcome attack_from_json(const ordered_json& j) {
  AttackOutcome a;
  a.linf = j.at("linf").get<double>();
  a.votes = j.at("votes").get<int>();
  a.trials = j.at("trials").get<int>();
  a.correct = j.at("correct").get<bool>();
  return a;
}

ordered_json targeted_to_json(const TargetedOutcome& t) {
  return {{"target", t.target},
          {"linf", t.linf},
          {"votes", t.votes},
          {"trials", t.trials},
          {"success", t.success}};
}

TargetedOutcome targeted_from_json(const ordered_json& j) {
  TargetedOutcome t;
  t.target = j.at("target").get<int>();
  t.linf = j.at("linf").get<double>();
  t.votes = j.at("votes").get<int>();
  t.trials = j.at("trials").get<int>();
  t.success = j.at("success").get<bool>();
  return t;
}

ordered_json record_to_json(const PerImageRecord& r) {
  ordered_json j;
  j["index"] = r.index;
  j["label"] = r.label;
  j["clean_prediction"] = r.clean_prediction;
  j["clean_votes"] = r.clean_votes;
  j["clean_trials"] = r.clean_trials;
  j["clean_defended_correct"] = r.clean_defended_correct;
  if (r.oblivious) j["oblivious"] = attack_to_json(*r.oblivious);
  if (r.whitebox) j["whitebox"] = attack_to_json(*r.whitebox);
  if (r.targeted) j["targeted"] = targeted_to_json(*r.targeted);
  return j;
}

PerImageRecord record_from_json(const ordered_json& j) {
  PerImageRecord r;
  r.index = j.at("index").get<long>();
  r.label = j.at("label").get<int>();
  r.clean_prediction = j.at("clean_prediction").get<int>();
  r.clean_votes = j.at("clean_votes").get<int>();
  r.clean_trials = j.at("clean_trials").get<int>();
  r.clean_defended_correct = j.at("clean_defended_correct").get<bool>();
  if (j.contains("oblivious")) r.oblivious = attack_from_json(j.at("oblivious"));
  if (j.contains("whitebox")) r.whitebox = attack_from_json(j.at("whitebox"));
  if (j.contains("targeted")) r.targeted = targeted_from_json(j.at("targeted"));
  return r;
}

ordered_json aggregates_to_json(const Aggregates& a) {
  ordered_json j;
  j["images"] = a.images;
  j["clean_accuracy"] = a.clean_accuracy;
  j["defended_clean_accuracy"] = a.defended_clean_accuracy;
  if (a.oblivious_accuracy) j["oblivious_accuracy"] = *a.oblivious_accuracy;
  if (a.whitebox_accuracy) j["whitebox_accuracy"] = *a.whitebox_accuracy;
  if (a.targeted_success_rate) {
    j["targeted_success_rate"] = *a.targeted_success_rate;
  }
  return j;
}

Aggregates aggregates_from_json(const ordered_json& j) {
  Aggregates a;
  a.images = j.at("images").get<long>();
  a.clean_accuracy = j.at("clean_accuracy").get<double>();
  a.defended_clean_accuracy = j.at("defended_clean_accuracy").get<double>();
  if (j.contains("oblivious_accuracy")) {
    a.oblivious_accuracy = j.at("oblivious_accuracy").get<double>();
  }
  if (j.contains("whitebox_accuracy")) {
    a.whitebox_accuracy = j.at("whitebox_accuracy").get<double>();
  }
  if (j.contains("targeted_success_rate")) {
    a.targeted_success_rate = j.at("targeted_success_rate").get<double>();
  }
  return a;
}

}  // namespace

Aggregates recompute_aggregates(const std::vector<PerImageRecord>& per_image) {
  if (per_image.empty()) {
    throw InputError("report: cannot aggregate zero per-image records");
  }
  const double n = static_cast<double>(per_image.size());
  Aggregates a;
  a.images = static_cast<long>(per_image.size());

  long clean = 0;
  long defended = 0;
  long oblivious = 0;
  long whitebox = 0;
  long targeted = 0;
  long have_oblivious = 0;
  long have_whitebox = 0;
  long have_targeted = 0;
  for (const PerImageRecord& r : per_image) {
    clean += (r.clean_prediction == r.label) ? 1 : 0;
    defended += r.clean_defended_correct ? 1 : 0;
    if (r.oblivious) {
      ++have_oblivious;
      oblivious += r.oblivious->correct ? 1 : 0;
    }
    if (r.whitebox) {
      ++have_whitebox;
      whitebox += r.whitebox->correct ? 1 : 0;
    }
    if (r.targeted) {
      ++have_targeted;
      targeted += r.targeted->success ? 1 : 0;
    }
  }
  auto check_section = [&](long have, const char* name) {
    if (have != 0 && have != a.images) {
      throw ConsistencyError(std::string("report: section '") + name +
                             "' present on " + std::to_string(have) + " of " +
                             std::to_string(a.images) + " records");
    }
  };
  check_section(have_oblivious, "oblivious");
  check_section(have_whitebox, "whitebox");
  check_section(have_targeted, "targeted");

  a.clean_accuracy = static_cast<double>(clean) / n;
  a.defended_clean_accuracy = static_cast<double>(defended) / n;
  if (have_oblivious) a.oblivious_accuracy = static_cast<double>(oblivious) / n;
  if (have_whitebox) a.whitebox_accuracy = static_cast<double>(whitebox) / n;
  if (have_targeted) {
    a.targeted_success_rate = static_cast<double>(targeted) / n;
  }
  return a;
}

std::string report_to_json(const EvalReport& report) {
  ordered_json j;
  j["version"] = {{"report", report.version}, {"toolkit", kVersion}};
  j["complete"] = report.complete;
  try {
    j["manifest"] = ordered_json::parse(report.manifest_json);
  } catch (const ordered_json::parse_error& e) {
    throw FormatError(std::string("report: embedded manifest is not JSON: ") +
                      e.what());
  }
  j["aggregates"] = aggregates_to_json(report.aggregates);
  ordered_json images = ordered_json::array();
  for (const PerImageRecord& r : report.per_image) {
    images.push_back(record_to_json(r));
  }
  j["per_image"] = std::move(images);
  j["timing"] = {{"wall_ms", report.timing.wall_ms},
                 {"per_image_ms", report.timing.per_image_ms}};
  return j.dump(2) + "\n";
}

EvalReport report_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw FormatError(std::string("report: invalid JSON: ") + e.what());
  }
  EvalReport report;
  try {
    report.version = j.at("version").at("report").get<int>();
    if (report.version != kReportVersion) {
      throw FormatError("report: unsupported version " +
                        std::to_string(report.version));
    }
    report.complete = j.at("complete").get<bool>();
    report.manifest_json = j.at("manifest").dump(2);
    report.aggregates = aggregates_from_json(j.at("aggregates"));
    for (const ordered_json& rec : j.at("per_image")) {
      report.per_image.push_back(record_from_json(rec));
    }
    const ordered_json& timing = j.at("timing");
    report.timing.wall_ms = timing.at("wall_ms").get<double>();
    report.timing.per_image_ms =
        timing.at("per_image_ms").get<std::vector<double>>();
  } catch (const ordered_json::exception& e) {
    throw FormatError(std::string("report: ") + e.what());
  }
  return report;
}

void save_report(const EvalReport& report, const std::string& path) {
  if (report.per_image.empty()) {
    throw InputError("report: refusing to write a report with no images");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("report: cannot open '" + path + "' for writing");
  out << report_to_json(report);
  out.flush();
  if (!out) throw IoError("report: write to '" + path + "' failed");
}

EvalReport load_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("report: cannot open '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("report: read from '" + path + "' failed");
  return report_from_json(text);
}

}  // namespace gauntlet::harness
