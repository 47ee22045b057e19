#ifndef PAIRED_GOF_IO_HPP
#define PAIRED_GOF_IO_HPP

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "paired_gof/types.hpp"

namespace paired_gof {

enum class TableFormat { Json, Csv };

namespace detail {

inline std::int64_t count_from_json(const nlohmann::json& value, const char* what,
                                    std::size_t group) {
  if (!value.is_number_integer())
    throw invalid_input(std::string("non-integer ") + what + " count in group " +
                        std::to_string(group + 1));
  return value.get<std::int64_t>();
}

}  // namespace detail

/// Parses `{"groups":[{"label":..., "bilateral":[m0,m1,m2], "unilateral":[n0,n1]}, ...]}`.
/// A missing "unilateral" array means [0,0]. The result is validated.
inline FrequencyTable parse_json_table(std::istream& in) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw invalid_input(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("groups") || !doc["groups"].is_array())
    throw invalid_input("missing \"groups\" array");
  FrequencyTable table;
  std::size_t idx = 0;
  for (const auto& grp : doc["groups"]) {
    if (!grp.is_object()) throw invalid_input("group entry is not an object");
    if (!grp.contains("bilateral") || !grp["bilateral"].is_array() ||
        grp["bilateral"].size() != 3)
      throw invalid_input("missing or malformed \"bilateral\" in group " +
                          std::to_string(idx + 1));
    GroupCounts counts;
    counts.m0 = detail::count_from_json(grp["bilateral"][0], "bilateral", idx);
    counts.m1 = detail::count_from_json(grp["bilateral"][1], "bilateral", idx);
    counts.m2 = detail::count_from_json(grp["bilateral"][2], "bilateral", idx);
    if (grp.contains("unilateral")) {
      if (!grp["unilateral"].is_array() || grp["unilateral"].size() != 2)
        throw invalid_input("malformed \"unilateral\" in group " + std::to_string(idx + 1));
      counts.n0 = detail::count_from_json(grp["unilateral"][0], "unilateral", idx);
      counts.n1 = detail::count_from_json(grp["unilateral"][1], "unilateral", idx);
    }
    table.groups.push_back(counts);
    table.labels.push_back(grp.value("label", std::string{}));
    ++idx;
  }
  validate(table);
  return table;
}

/// Parses CSV rows `label,m0,m1,m2,n0,n1` (no header). The result is validated.
inline FrequencyTable parse_csv_table(std::istream& in) {
  FrequencyTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != 6)
      throw invalid_input("line " + std::to_string(lineno) + ": expected 6 fields, got " +
                          std::to_string(fields.size()));
    GroupCounts counts;
    std::int64_t* slots[5] = {&counts.m0, &counts.m1, &counts.m2, &counts.n0, &counts.n1};
    for (int k = 0; k < 5; ++k) {
      try {
        std::size_t pos = 0;
        *slots[k] = std::stoll(fields[k + 1], &pos);
        if (pos != fields[k + 1].find_last_not_of(" \t\r") + 1 &&
            fields[k + 1].find_first_not_of(" \t\r", pos) != std::string::npos)
          throw std::invalid_argument("trailing junk");
      } catch (const std::exception&) {
        throw invalid_input("line " + std::to_string(lineno) + ": bad count '" +
                            fields[k + 1] + "'");
      }
    }
    table.labels.push_back(fields[0]);
    table.groups.push_back(counts);
  }
  validate(table);
  return table;
}

inline FrequencyTable parse_frequency_table(std::istream& in, TableFormat format) {
  return format == TableFormat::Json ? parse_json_table(in) : parse_csv_table(in);
}

inline FrequencyTable parse_frequency_table(const std::string& text, TableFormat format) {
  std::istringstream in(text);
  return parse_frequency_table(in, format);
}

inline nlohmann::json to_json(const FrequencyTable& table) {
  nlohmann::json groups = nlohmann::json::array();
  for (std::size_t i = 0; i < table.g(); ++i) {
    const auto& grp = table.groups[i];
    nlohmann::json entry = {
        {"bilateral", {grp.m0, grp.m1, grp.m2}},
        {"unilateral", {grp.n0, grp.n1}},
    };
    if (i < table.labels.size() && !table.labels[i].empty()) entry["label"] = table.labels[i];
    groups.push_back(entry);
  }
  return nlohmann::json{{"groups", groups}};
}

inline void serialize_json(const FrequencyTable& table, std::ostream& out) {
  out << to_json(table).dump(2) << '\n';
}

inline void serialize_csv(const FrequencyTable& table, std::ostream& out) {
  for (std::size_t i = 0; i < table.g(); ++i) {
    const auto& grp = table.groups[i];
    out << group_label(table, i) << ',' << grp.m0 << ',' << grp.m1 << ',' << grp.m2 << ','
        << grp.n0 << ',' << grp.n1 << '\n';
  }
}

inline std::string serialize_json(const FrequencyTable& table) {
  std::ostringstream out;
  serialize_json(table, out);
  return out.str();
}

inline std::string serialize_csv(const FrequencyTable& table) {
  std::ostringstream out;
  serialize_csv(table, out);
  return out.str();
}

}  // namespace paired_gof

#endif  // PAIRED_GOF_IO_HPP
