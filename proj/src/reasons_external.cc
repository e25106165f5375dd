// Copyright 2026 The Relworks Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>

#include "relworks/error.h"
#include "relworks/reasons.h"
#include "relworks/text.h"
#include "relworks/transport.h"

namespace relworks::reasons {

ExternalReasonClassifier::ExternalReasonClassifier(
    const Taxonomy& taxonomy, std::string endpoint,
    std::chrono::milliseconds timeout)
    : taxonomy_(taxonomy),
      endpoint_(std::move(endpoint)),
      transport_(transport::MakeEndpoint(endpoint_, "/classify", timeout)) {}

ReasonScores ExternalReasonClassifier::Classify(
    std::string_view x_abstract, std::string_view c_abstract) const {
  if (text::Trim(x_abstract).empty() || text::Trim(c_abstract).empty()) {
    throw Error(ErrorCode::kEmptyAbstract, "pairwise classification input");
  }
  std::vector<std::string> labels;
  for (const ReasonLabel& l : taxonomy_.labels()) labels.push_back(l.label);
  Json request{{"version", 1},
               {"x", std::string(x_abstract)},
               {"c", std::string(c_abstract)},
               {"labels", labels}};
  Json reply = transport_->Call(request);
  if (reply.value("version", 0) != 1 || !reply.contains("scores") ||
      !reply["scores"].is_array() ||
      reply["scores"].size() != taxonomy_.size()) {
    throw Error(ErrorCode::kProtocolError,
                "classifier reply needs version 1 and one score per label");
  }
  std::vector<double> scores;
  double sum = 0.0;
  for (const Json& s : reply["scores"]) {
    if (!s.is_number()) throw Error(ErrorCode::kProtocolError, "non-numeric score");
    double v = s.get<double>();
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorCode::kProtocolError, "score outside [0, inf)");
    }
    scores.push_back(v);
    sum += v;
  }
  if (sum <= 0.0) throw Error(ErrorCode::kProtocolError, "all scores zero");
  for (double& v : scores) v /= sum;
  size_t best = 0;
  for (size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return ReasonScores{Reason{taxonomy_.labels()[best].label}, std::move(scores)};
}

}  // namespace relworks::reasons
