#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "occmob/types.hpp"

namespace occmob::ingest {

// Dataset-specific education recoding (source code -> years of schooling),
// loaded from a data file so alternative schemes stay testable.
class EducationRecoder {
 public:
  void add(Dataset d, int code, int years);
  std::optional<int> recode(Dataset d, int code) const;

  // CSV columns: dataset,code,years
  static EducationRecoder load_csv(const std::string& path);

 private:
  std::map<std::pair<int, int>, int> map_;
};

// 3-digit codes drop their trailing digit; 1- and 2-digit codes pass through.
int remap_occupation(int code);

struct ColumnMap {
  // canonical field name -> column name in the file; defaults to identity.
  std::map<std::string, std::string> names;
  std::string resolve(const std::string& canonical) const;
};

struct SurveySource {
  std::string path;
  Dataset dataset = Dataset::IHDS2;
  ColumnMap columns;
};

// Counts per rejection reason; conservation (parsed = accepted + rejected)
// is part of the contract.
struct ExclusionReport {
  std::map<std::string, std::size_t> reasons;
  std::size_t total() const;
  void count(const std::string& reason) { ++reasons[reason]; }
};

struct LoadResult {
  std::vector<IndividualRecord> records;
  ExclusionReport rejected;
  std::size_t parsed_rows = 0;
};

// Parse + validate + recode one survey extract. Duplicate person_id is a
// hard error (DataError). Unknown codes reject the record with a counted
// reason, never a silent drop.
LoadResult load_survey(const SurveySource& src, const EducationRecoder& recoder,
                       const OccupationCatalogue& catalogue);

struct PairConfig {
  int working_age_min = 25;
  int working_age_max = 55;
  std::map<Dataset, int> survey_years = {{Dataset::NSS43, 1988}, {Dataset::IHDS2, 2011}};
};

struct PairResult {
  std::vector<FatherSonPair> pairs;
  ExclusionReport excluded; // pair candidates dropped, by reason
  std::size_t candidates = 0;
  // (son cohort, father cohort) -> pair count, Table-8 style cross-tab.
  std::map<std::pair<CohortId, CohortId>, std::size_t> crosstab;
};

PairResult build_pairs(const std::vector<IndividualRecord>& records,
                       const CohortScheme& scheme, const OccupationCatalogue& catalogue,
                       const EducationRecoder& recoder, const PairConfig& config);

// Canonical pair file (stable column order).
void write_pairs(const std::string& path, const std::vector<FatherSonPair>& pairs,
                 const std::string& provenance);
std::vector<FatherSonPair> read_pairs(const std::string& path);

std::string render_crosstab(const PairResult& result, const CohortScheme& scheme);

}  // namespace occmob::ingest
