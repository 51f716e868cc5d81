#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "occmob/error.hpp"

namespace occmob {

enum class SocialGroup { Brahmin, FC, OBC, Dalit, Adivasi, Muslim, Other };

const char* to_string(SocialGroup g);
SocialGroup parse_social_group(const std::string& s);
inline constexpr int kNumSocialGroups = 7;

enum class Dataset { NSS43, IHDS2 };

const char* to_string(Dataset d);
Dataset parse_dataset(const std::string& s);

struct IndividualRecord {
  std::string person_id;
  std::string household_id;
  int birth_year = 0;
  int education_code = -1;
  int occupation_code = -1;           // 2-digit after remapping
  std::optional<double> income_proxy; // monthly household expenditure; absent => unusable for SEI
  double sample_weight = 1.0;
  SocialGroup social_group = SocialGroup::Other;
  bool is_household_head = false;
  Dataset dataset = Dataset::IHDS2;

  int education_years = -1;           // filled in by recoding

  // Father linkage (present only on son rows that carry it).
  std::optional<int> father_education_code;
  std::optional<int> father_occupation_code; // 2-digit after remapping
  std::optional<int> father_birth_year;
};

using CohortId = std::string; // e.g. "1946-55"

struct Cohort {
  CohortId id;
  int start_year = 0;
  int end_year = 0;
  Dataset sei_source = Dataset::IHDS2;
};

struct CohortScheme {
  std::vector<Cohort> cohorts;
  int shift_years = 0;

  // Index of the cohort containing `birth_year`, or nullopt.
  std::optional<std::size_t> assign(int birth_year) const;
  const Cohort* find(const CohortId& id) const;
  void validate() const;

  static CohortScheme base();
  static CohortScheme shifted(int years = 4);
};

struct FatherSonPair {
  std::string son_id;
  CohortId son_cohort;
  CohortId father_cohort;
  int son_occupation = -1;
  int father_occupation = -1;
  int son_education_years = -1;
  int father_education_years = -1;
  SocialGroup group = SocialGroup::Other;
  double weight = 1.0; // son household weight
  int son_birth_year = 0;
  int father_birth_year = 0;
};

struct OccupationEntry {
  int one_digit_code = 0;
  int broad_group = 0; // 1..7
  std::string description;
};

class OccupationCatalogue {
 public:
  void add(int two_digit_code, OccupationEntry entry);
  bool contains(int two_digit_code) const;
  const OccupationEntry& at(int two_digit_code) const;
  const std::map<int, OccupationEntry>& entries() const { return entries_; }

  static OccupationCatalogue load_csv(const std::string& path);

 private:
  std::map<int, OccupationEntry> entries_;
};

}  // namespace occmob
