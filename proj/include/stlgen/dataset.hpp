#pragma once

#include <string>
#include <vector>

#include "stlgen/ast.hpp"
#include "stlgen/errors.hpp"

namespace stlgen {

/// One dataset entry: an instruction, the natural-language input x, and the
/// reference formula text with its parsed form.
struct NlStlRecord {
  std::string instruction;
  std::string input;
  std::string output;
  Formula ref;
};

struct DatasetLoadResult {
  struct Reject {
    std::size_t line = 0;
    std::string error;
  };
  std::vector<NlStlRecord> records;
  std::vector<Reject> rejects;
};

/// Loads a JSON Lines dataset with keys instruction/input/output. Records
/// whose output fails to parse (or with an empty input) are collected as
/// rejects rather than aborting the load. Throws DataError when the file is
/// unreadable or no record is valid.
DatasetLoadResult load_dataset(const std::string& path);

/// Writes records as JSON Lines with canonical key order
/// (instruction, input, output).
void save_dataset(const std::vector<NlStlRecord>& records, const std::string& path);

void save_rejects(const std::vector<DatasetLoadResult::Reject>& rejects,
                  const std::string& path);

}  // namespace stlgen
