#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "stlgen/dataset.hpp"
#include "stlgen/parser.hpp"

using namespace stlgen;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / "stlgen_dataset_test") {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kValidThree =
    "{\"instruction\":\"Translate.\",\"input\":\"x stays above 0\",\"output\":\"G[0,5](x > 0)\"}\n"
    "{\"instruction\":\"Translate.\",\"input\":\"y eventually drops\",\"output\":\"F[0,9](y < 1)\"}\n"
    "{\"instruction\":\"Translate.\",\"input\":\"brake engages\",\"output\":\"brake == 1\"}\n";

}  // namespace

TEST_CASE("a three-line valid file loads three records") {
  TempDir dir;
  write(dir.file("data.jsonl"), kValidThree);
  DatasetLoadResult result = load_dataset(dir.file("data.jsonl"));
  CHECK(result.records.size() == 3);
  CHECK(result.rejects.empty());
  CHECK(result.records[0].input == "x stays above 0");
  CHECK(render(result.records[0].ref) == "G[0,5](x > 0)");
}

TEST_CASE("an unparseable output becomes a reject, not a failure") {
  TempDir dir;
  std::string content = kValidThree;
  content +=
      "{\"instruction\":\"Translate.\",\"input\":\"broken\",\"output\":\"G[5,3](x > 0)\"}\n";
  write(dir.file("data.jsonl"), content);
  DatasetLoadResult result = load_dataset(dir.file("data.jsonl"));
  CHECK(result.records.size() == 3);
  REQUIRE(result.rejects.size() == 1);
  CHECK(result.rejects[0].line == 4);
}

TEST_CASE("empty inputs and missing keys are rejects") {
  TempDir dir;
  std::string content = kValidThree;
  content += "{\"instruction\":\"T.\",\"input\":\"\",\"output\":\"x > 0\"}\n";
  content += "{\"instruction\":\"T.\",\"input\":\"no output\"}\n";
  write(dir.file("data.jsonl"), content);
  DatasetLoadResult result = load_dataset(dir.file("data.jsonl"));
  CHECK(result.records.size() == 3);
  CHECK(result.rejects.size() == 2);
}

TEST_CASE("zero valid records is an error") {
  TempDir dir;
  write(dir.file("bad.jsonl"),
        "{\"instruction\":\"T.\",\"input\":\"x\",\"output\":\"((((\"}\n");
  CHECK_THROWS_AS(load_dataset(dir.file("bad.jsonl")), DataError);
  CHECK_THROWS_AS(load_dataset(dir.file("missing.jsonl")), DataError);
}

TEST_CASE("save then load is byte-stable with canonical key order") {
  TempDir dir;
  // keys intentionally scrambled in the source file
  write(dir.file("scrambled.jsonl"),
        "{\"output\":\"x > 0\",\"instruction\":\"T.\",\"input\":\"x positive\"}\n");
  DatasetLoadResult loaded = load_dataset(dir.file("scrambled.jsonl"));
  save_dataset(loaded.records, dir.file("canonical.jsonl"));
  std::string first = slurp(dir.file("canonical.jsonl"));
  CHECK(first ==
        "{\"instruction\":\"T.\",\"input\":\"x positive\",\"output\":\"x > 0\"}\n");

  DatasetLoadResult reloaded = load_dataset(dir.file("canonical.jsonl"));
  save_dataset(reloaded.records, dir.file("canonical2.jsonl"));
  CHECK(slurp(dir.file("canonical2.jsonl")) == first);
}

TEST_CASE("reject reports round-trip as JSON lines") {
  TempDir dir;
  std::vector<DatasetLoadResult::Reject> rejects = {{4, "interval requires lo < hi"}};
  save_rejects(rejects, dir.file("rejects.jsonl"));
  std::string content = slurp(dir.file("rejects.jsonl"));
  CHECK(content.find("\"line\":4") != std::string::npos);
}
