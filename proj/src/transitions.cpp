#include "occmob/transitions.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace occmob::transitions {

void Tally::add(int father_group, int son_group, double w) {
  if (father_group < 1 || father_group > kGroups || son_group < 1 || son_group > kGroups)
    throw DataError("broad group outside 1..7");
  weight[father_group - 1][son_group - 1] += w;
  ++count[father_group - 1][son_group - 1];
}

void Tally::merge(const Tally& other) {
  for (int i = 0; i < kGroups; ++i)
    for (int j = 0; j < kGroups; ++j) {
      weight[i][j] += other.weight[i][j];
      count[i][j] += other.count[i][j];
    }
}

Tally tally_pairs(const std::vector<FatherSonPair>& pairs,
                  const OccupationCatalogue& catalogue) {
  Tally t;
  for (const auto& p : pairs)
    t.add(catalogue.at(p.father_occupation).broad_group,
          catalogue.at(p.son_occupation).broad_group, p.weight);
  return t;
}

TransitionMatrix from_tally(const Tally& tally, std::optional<SocialGroup> group) {
  TransitionMatrix m;
  m.group = group;
  for (int i = 0; i < kGroups; ++i) {
    double row_weight = 0.0;
    std::size_t row_count = 0;
    for (int j = 0; j < kGroups; ++j) {
      row_weight += tally.weight[i][j];
      row_count += tally.count[i][j];
    }
    m.row_counts[i] = row_count;
    if (row_weight > 0.0)
      for (int j = 0; j < kGroups; ++j) m.rows[i][j] = tally.weight[i][j] / row_weight;
  }
  return m;
}

TransitionMatrix transition_matrix(const std::vector<FatherSonPair>& pairs,
                                   const OccupationCatalogue& catalogue,
                                   std::optional<SocialGroup> group) {
  std::vector<FatherSonPair> scope;
  for (const auto& p : pairs)
    if (!group || p.group == *group) scope.push_back(p);
  return from_tally(tally_pairs(scope, catalogue), group);
}

std::string render_matrix(const TransitionMatrix& m) {
  std::ostringstream out;
  out << "STM " << (m.group ? to_string(*m.group) : "ALL") << "\n";
  out << "     ";
  for (int j = 1; j <= kGroups; ++j) out << "     " << j;
  out << "     n*\n";
  char buf[16];
  for (int i = 0; i < kGroups; ++i) {
    out << "  " << (i + 1) << "  ";
    for (int j = 0; j < kGroups; ++j) {
      if (m.row_counts[i] == 0) {
        out << "     -";
      } else {
        std::snprintf(buf, sizeof buf, "  %.2f", m.rows[i][j]);
        out << buf;
      }
    }
    out << "  " << m.row_counts[i] << "\n";
  }
  return out.str();
}

void write_matrix_csv(const std::string& path, const TransitionMatrix& m,
                      const std::string& provenance) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  if (!provenance.empty()) out << "# " << provenance << "\n";
  out << "father_group";
  for (int j = 1; j <= kGroups; ++j) out << ",to_" << j;
  out << ",n\n";
  char buf[32];
  for (int i = 0; i < kGroups; ++i) {
    out << (i + 1);
    for (int j = 0; j < kGroups; ++j) {
      std::snprintf(buf, sizeof buf, ",%.17g", m.rows[i][j]);
      out << buf;
    }
    out << "," << m.row_counts[i] << "\n";
  }
}

}  // namespace occmob::transitions
