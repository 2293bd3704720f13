#include "badgesim/rules_io.hpp"

#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "badgesim/error.hpp"

namespace badgesim {

void write_rules(const std::vector<Rule>& rules, const Dataset& catalog, std::ostream& out) {
  for (const auto& r : rules) {
    nlohmann::ordered_json rec;
    rec["ant"] = nlohmann::ordered_json::array();
    for (BadgeIndex b : r.antecedent) rec["ant"].push_back(catalog.badge_id(b));
    rec["con"] = catalog.badge_id(r.consequent);
    rec["conf"] = r.confidence;
    out << rec.dump() << '\n';
  }
}

std::vector<Rule> read_rules(std::istream& in, const Dataset& catalog) {
  std::vector<Rule> rules;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto rec = nlohmann::json::parse(line);
      Rule r;
      for (const auto& id : rec.at("ant")) {
        auto b = catalog.find_badge(id.get<std::string>());
        if (!b) throw ParseError("rules", lineno, "unknown badge " + id.get<std::string>());
        r.antecedent.push_back(*b);
      }
      auto con = catalog.find_badge(rec.at("con").get<std::string>());
      if (!con) throw ParseError("rules", lineno, "unknown badge " + rec.at("con").get<std::string>());
      r.consequent = *con;
      r.confidence = rec.at("conf").get<double>();
      if (!(r.confidence > 0.0 && r.confidence <= 1.0)) {
        throw ParseError("rules", lineno, "confidence outside (0, 1]");
      }
      rules.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("rules", lineno, e.what());
    }
  }
  return rules;
}

}  // namespace badgesim
