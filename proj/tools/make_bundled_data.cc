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

// Writes the bundled mini corpus: records, segment annotations, the answer
// key, update cases and the default taxonomy.
//
//   make_bundled_data [output_dir]   (default: data)

#include <filesystem>
#include <iostream>

#include "relworks/corpus.h"
#include "relworks/io.h"
#include "relworks/plan.h"
#include "relworks/reasons.h"
#include "relworks/synthetic.h"

namespace fs = std::filesystem;
using relworks::io::Json;

int main(int argc, char** argv) {
  fs::path root = argc > 1 ? fs::path(argv[1]) : fs::path("data");
  try {
    relworks::synthetic::MiniCorpus mini = relworks::synthetic::BuildMiniCorpus();
    fs::create_directories(root / "mini_corpus");
    fs::create_directories(root / "segments");

    std::vector<Json> rows;
    for (const auto& r : mini.records) {
      rows.push_back(relworks::corpus::SerializeRecord(r));
    }
    relworks::io::WriteJsonLinesAtomic(root / "mini_corpus" / "papers.jsonl", rows);

    Json key = Json::array();
    for (const auto& a : mini.answers) {
      relworks::io::WriteJsonAtomic(
          root / "segments" / (a.paper_id + ".json"),
          Json{{"paper_id", a.paper_id}, {"segment_starts", a.segment_starts}});
      key.push_back({{"paper_id", a.paper_id},
                     {"plan", relworks::planner::PlanToJson(a.plan)},
                     {"segment_starts", a.segment_starts},
                     {"leading_unaligned", a.leading_unaligned},
                     {"merged_segments", a.merged_segments}});
    }
    relworks::io::WriteJsonAtomic(root / "answer_key.json",
                                  Json{{"version", 1}, {"papers", key}});

    std::vector<Json> cases;
    for (const auto& u : relworks::synthetic::BuildUpdateCases()) {
      cases.push_back({{"paper_id", u.paper_id},
                       {"inserted", u.inserted},
                       {"existing_text", u.existing_text},
                       {"existing_starts", u.existing_starts}});
    }
    relworks::io::WriteJsonLinesAtomic(root / "update_cases.jsonl", cases);

    relworks::io::WriteJsonAtomic(root / "taxonomy.json",
                                  relworks::reasons::Taxonomy::Default().ToJson());
    std::cout << "wrote " << mini.records.size() << " papers, "
              << mini.answers.size() << " annotations, " << cases.size()
              << " update cases to " << root.string() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "make_bundled_data: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
