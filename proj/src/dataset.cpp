#include "stlgen/dataset.hpp"

#include <fstream>

#include "json.hpp"
#include "stlgen/parser.hpp"

namespace stlgen {

DatasetLoadResult load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset '" + path + "'");

  DatasetLoadResult result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    try {
      nlohmann::json j = nlohmann::json::parse(line);
      NlStlRecord rec;
      rec.instruction = j.at("instruction").get<std::string>();
      rec.input = j.at("input").get<std::string>();
      rec.output = j.at("output").get<std::string>();
      if (rec.input.empty()) throw DataError("empty input");
      rec.ref = parse(rec.output);
      result.records.push_back(std::move(rec));
    } catch (const std::exception& e) {
      result.rejects.push_back({line_no, e.what()});
    }
  }
  if (result.records.empty())
    throw DataError("dataset '" + path + "' contains no valid records (" +
                    std::to_string(result.rejects.size()) + " rejected)");
  return result;
}

void save_dataset(const std::vector<NlStlRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write dataset to '" + path + "'");
  for (const NlStlRecord& rec : records) {
    nlohmann::ordered_json j;
    j["instruction"] = rec.instruction;
    j["input"] = rec.input;
    j["output"] = rec.output;
    out << j.dump() << "\n";
  }
}

void save_rejects(const std::vector<DatasetLoadResult::Reject>& rejects,
                  const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write rejects to '" + path + "'");
  for (const auto& r : rejects) {
    nlohmann::ordered_json j;
    j["line"] = r.line;
    j["error"] = r.error;
    out << j.dump() << "\n";
  }
}

}  // namespace stlgen
