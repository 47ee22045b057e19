#ifndef PAIRED_GOF_TYPES_HPP
#define PAIRED_GOF_TYPES_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace paired_gof {

/// Error thrown on invalid input data or parameter values.
class invalid_input : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Counts for one treatment group: bilateral subjects with 0/1/2 cured
/// organs (m0,m1,m2) and unilateral subjects with 0/1 (n0,n1).
struct GroupCounts {
  std::int64_t m0 = 0;
  std::int64_t m1 = 0;
  std::int64_t m2 = 0;
  std::int64_t n0 = 0;
  std::int64_t n1 = 0;

  std::int64_t m_plus() const { return m0 + m1 + m2; }
  std::int64_t n_plus() const { return n0 + n1; }
  bool degenerate() const { return m_plus() == 0 && n_plus() == 0; }
};

/// The full frequency table: one GroupCounts per group, with optional labels.
struct FrequencyTable {
  std::vector<GroupCounts> groups;
  std::vector<std::string> labels;  // same length as groups once validated

  std::size_t g() const { return groups.size(); }

  std::int64_t m_row_total(int r) const {
    std::int64_t s = 0;
    for (const auto& grp : groups) s += (r == 0 ? grp.m0 : r == 1 ? grp.m1 : grp.m2);
    return s;
  }
  std::int64_t n_row_total(int r) const {
    std::int64_t s = 0;
    for (const auto& grp : groups) s += (r == 0 ? grp.n0 : grp.n1);
    return s;
  }
  std::int64_t m_total() const {
    std::int64_t s = 0;
    for (const auto& grp : groups) s += grp.m_plus();
    return s;
  }
  std::int64_t n_total() const {
    std::int64_t s = 0;
    for (const auto& grp : groups) s += grp.n_plus();
    return s;
  }
};

/// Checks every table invariant; throws invalid_input naming the first
/// violation and the offending group (1-based).
inline void validate(const FrequencyTable& table) {
  if (table.groups.empty()) throw invalid_input("zero groups");
  for (std::size_t i = 0; i < table.groups.size(); ++i) {
    const auto& grp = table.groups[i];
    const auto where = " in group " + std::to_string(i + 1);
    if (grp.m0 < 0 || grp.m1 < 0 || grp.m2 < 0 || grp.n0 < 0 || grp.n1 < 0)
      throw invalid_input("negative count" + where);
    if (grp.degenerate()) throw invalid_input("degenerate group" + where);
  }
  if (!table.labels.empty() && table.labels.size() != table.groups.size())
    throw invalid_input("label count does not match group count");
}

/// Label of group i, defaulting to its 1-based index.
inline std::string group_label(const FrequencyTable& table, std::size_t i) {
  if (i < table.labels.size() && !table.labels[i].empty()) return table.labels[i];
  return std::to_string(i + 1);
}

}  // namespace paired_gof

#endif  // PAIRED_GOF_TYPES_HPP
