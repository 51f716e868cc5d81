#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "occmob/types.hpp"

namespace occmob::transitions {

inline constexpr int kGroups = 7; // broad occupation groups 1..7

// Mergeable weighted tally; the matrix is a pure function of it.
struct Tally {
  std::array<std::array<double, kGroups>, kGroups> weight{};
  std::array<std::array<std::size_t, kGroups>, kGroups> count{};
  void add(int father_group, int son_group, double w); // groups 1-based
  void merge(const Tally& other);
};

struct TransitionMatrix {
  std::optional<SocialGroup> group; // nullopt => ALL
  std::array<std::array<double, kGroups>, kGroups> rows{}; // row-stochastic
  std::array<std::size_t, kGroups> row_counts{};           // unweighted n*
};

Tally tally_pairs(const std::vector<FatherSonPair>& pairs,
                  const OccupationCatalogue& catalogue);
TransitionMatrix from_tally(const Tally& tally, std::optional<SocialGroup> group);

// Weighted father -> son broad-group transition probabilities. Empty rows
// stay all-zero with row_count 0.
TransitionMatrix transition_matrix(const std::vector<FatherSonPair>& pairs,
                                   const OccupationCatalogue& catalogue,
                                   std::optional<SocialGroup> group = std::nullopt);

// Two-decimal probabilities plus the n* column; empty rows render as dashes.
std::string render_matrix(const TransitionMatrix& m);

void write_matrix_csv(const std::string& path, const TransitionMatrix& m,
                      const std::string& provenance);

}  // namespace occmob::transitions
