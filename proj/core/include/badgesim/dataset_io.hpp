#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "badgesim/dataset.hpp"

namespace badgesim {

struct DatasetPaths {
  std::filesystem::path events;  // JSON Lines {"user","badge","ts"}
  std::filesystem::path graph;   // CSV src,dst (header optional)
  std::filesystem::path badges;  // JSON Lines {"id","name","category","level","prev"}

  // events.jsonl, graph.csv and badges.jsonl inside `dir`.
  static DatasetPaths in_directory(const std::filesystem::path& dir);
};

// Parse errors carry the file name and 1-based line number.
Dataset load_dataset(const DatasetPaths& paths);
Dataset read_dataset(std::istream& events, std::istream& graph, std::istream& badges);

// Writers emit records in the deterministic total order, so loading and
// writing a canonically sorted dump reproduces it byte for byte.
void write_dataset(const Dataset& d, const DatasetPaths& paths);
void write_events(const Dataset& d, std::ostream& out);
void write_graph(const Dataset& d, std::ostream& out);
void write_badges(const Dataset& d, std::ostream& out);

}  // namespace badgesim
