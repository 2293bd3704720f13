#include "badgesim/dataset_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "badgesim/error.hpp"

namespace badgesim {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool blank(std::string_view line) { return trim(line).empty(); }

template <typename T>
T field(const json& rec, const char* key, const std::string& file, std::size_t line) {
  auto it = rec.find(key);
  if (it == rec.end()) throw ParseError(file, line, std::string("missing field \"") + key + "\"");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ParseError(file, line, std::string("field \"") + key + "\" has the wrong type");
  }
}

json parse_line(const std::string& line, const std::string& file, std::size_t lineno) {
  json rec;
  try {
    rec = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(file, lineno, std::string("invalid JSON: ") + e.what());
  }
  if (!rec.is_object()) throw ParseError(file, lineno, "expected a JSON object");
  return rec;
}

std::vector<EventRecord> read_events(std::istream& in, const std::string& file) {
  std::vector<EventRecord> out;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (blank(line)) continue;
    json rec = parse_line(line, file, lineno);
    out.push_back({field<std::string>(rec, "user", file, lineno),
                   field<std::string>(rec, "badge", file, lineno),
                   field<Timestamp>(rec, "ts", file, lineno)});
  }
  return out;
}

std::vector<Badge> read_badges(std::istream& in, const std::string& file) {
  std::vector<Badge> out;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (blank(line)) continue;
    json rec = parse_line(line, file, lineno);
    Badge b;
    b.id = field<std::string>(rec, "id", file, lineno);
    b.name = field<std::string>(rec, "name", file, lineno);
    b.category = field<std::string>(rec, "category", file, lineno);
    b.level = field<int>(rec, "level", file, lineno);
    if (auto it = rec.find("prev"); it != rec.end() && !it->is_null()) {
      if (!it->is_string()) throw ParseError(file, lineno, "field \"prev\" has the wrong type");
      b.prev = it->get<std::string>();
    }
    out.push_back(std::move(b));
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> read_graph(std::istream& in,
                                                            const std::string& file) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  bool first = true;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    auto comma = view.find(',');
    if (comma == std::string_view::npos || view.find(',', comma + 1) != std::string_view::npos) {
      throw ParseError(file, lineno, "expected exactly two comma-separated fields");
    }
    std::string_view src = trim(view.substr(0, comma));
    std::string_view dst = trim(view.substr(comma + 1));
    bool header = first && src == "src" && dst == "dst";
    first = false;
    if (header) continue;
    if (src.empty() || dst.empty()) throw ParseError(file, lineno, "empty user id");
    out.emplace_back(std::string(src), std::string(dst));
  }
  return out;
}

std::ifstream open_in(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw DataError("cannot open " + p.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + p.string());
  return out;
}

}  // namespace

DatasetPaths DatasetPaths::in_directory(const std::filesystem::path& dir) {
  return {dir / "events.jsonl", dir / "graph.csv", dir / "badges.jsonl"};
}

Dataset load_dataset(const DatasetPaths& paths) {
  auto ev = open_in(paths.events);
  auto gr = open_in(paths.graph);
  auto bd = open_in(paths.badges);
  auto events = read_events(ev, paths.events.string());
  auto follows = read_graph(gr, paths.graph.string());
  auto badges = read_badges(bd, paths.badges.string());
  return Dataset::from_records({}, std::move(badges), events, follows);
}

Dataset read_dataset(std::istream& events, std::istream& graph, std::istream& badges) {
  auto ev = read_events(events, "events");
  auto follows = read_graph(graph, "graph");
  auto bd = read_badges(badges, "badges");
  return Dataset::from_records({}, std::move(bd), ev, follows);
}

void write_events(const Dataset& d, std::ostream& out) {
  for (const auto& e : d.events()) {
    ordered_json rec;
    rec["user"] = d.user_id(e.user);
    rec["badge"] = d.badge_id(e.badge);
    rec["ts"] = e.ts;
    out << rec.dump() << '\n';
  }
}

void write_graph(const Dataset& d, std::ostream& out) {
  out << "src,dst\n";
  for (const auto& e : d.graph().edges()) out << d.user_id(e.src) << ',' << d.user_id(e.dst) << '\n';
}

void write_badges(const Dataset& d, std::ostream& out) {
  for (const auto& b : d.badges()) {
    ordered_json rec;
    rec["id"] = b.id;
    rec["name"] = b.name;
    rec["category"] = b.category;
    rec["level"] = b.level;
    rec["prev"] = b.prev ? ordered_json(*b.prev) : ordered_json(nullptr);
    out << rec.dump() << '\n';
  }
}

void write_dataset(const Dataset& d, const DatasetPaths& paths) {
  auto ev = open_out(paths.events);
  write_events(d, ev);
  auto gr = open_out(paths.graph);
  write_graph(d, gr);
  auto bd = open_out(paths.badges);
  write_badges(d, bd);
}

}  // namespace badgesim
