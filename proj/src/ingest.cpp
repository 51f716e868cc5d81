#include "occmob/ingest.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "occmob/csv.hpp"

namespace occmob::ingest {

void EducationRecoder::add(Dataset d, int code, int years) {
  map_[{static_cast<int>(d), code}] = years;
}

std::optional<int> EducationRecoder::recode(Dataset d, int code) const {
  auto it = map_.find({static_cast<int>(d), code});
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

EducationRecoder EducationRecoder::load_csv(const std::string& path) {
  auto t = csv::Table::read_file(path);
  EducationRecoder r;
  for (std::size_t i = 0; i < t.rows(); ++i)
    r.add(parse_dataset(t.at(i, "dataset")), std::stoi(t.at(i, "code")),
          std::stoi(t.at(i, "years")));
  return r;
}

int remap_occupation(int code) {
  if (code < 0) throw DataError("negative occupation code");
  if (code >= 1000) throw DataError("occupation code has more than 3 digits");
  return code >= 100 ? code / 10 : code;
}

std::string ColumnMap::resolve(const std::string& canonical) const {
  auto it = names.find(canonical);
  return it == names.end() ? canonical : it->second;
}

std::size_t ExclusionReport::total() const {
  std::size_t n = 0;
  for (const auto& [_, c] : reasons) n += c;
  return n;
}

namespace {

bool parse_int(const std::string& s, int& out) {
  try {
    std::size_t pos = 0;
    out = std::stoi(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

bool parse_double(const std::string& s, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

}  // namespace

LoadResult load_survey(const SurveySource& src, const EducationRecoder& recoder,
                       const OccupationCatalogue& catalogue) {
  auto table = csv::Table::read_file(src.path);
  const auto& cm = src.columns;
  LoadResult result;
  result.parsed_rows = table.rows();
  std::set<std::string> seen_ids;

  for (std::size_t i = 0; i < table.rows(); ++i) {
    IndividualRecord r;
    r.dataset = src.dataset;
    r.person_id = table.at(i, cm.resolve("person_id"));
    r.household_id = table.at(i, cm.resolve("household_id"));
    if (!seen_ids.insert(r.person_id).second)
      throw DataError(src.path + ": duplicate person_id '" + r.person_id + "'");

    if (!parse_int(table.at(i, cm.resolve("birth_year")), r.birth_year) ||
        r.birth_year < 1900 || r.birth_year > 2000) {
      result.rejected.count("bad-birth-year");
      continue;
    }
    if (!parse_double(table.at(i, cm.resolve("sample_weight")), r.sample_weight) ||
        !(r.sample_weight > 0.0)) {
      result.rejected.count("bad-weight");
      continue;
    }
    const std::string& inc = table.at(i, cm.resolve("income_proxy"));
    if (!inc.empty()) {
      double v;
      if (!parse_double(inc, v) || v < 0.0) {
        result.rejected.count("bad-income");
        continue;
      }
      r.income_proxy = v;
    }
    try {
      r.social_group = parse_social_group(table.at(i, cm.resolve("social_group")));
    } catch (const DataError&) {
      result.rejected.count("unknown-social-group");
      continue;
    }
    r.is_household_head = table.at(i, cm.resolve("is_household_head")) == "1";

    int occ;
    if (!parse_int(table.at(i, cm.resolve("occupation_code")), occ)) {
      result.rejected.count("bad-occupation-code");
      continue;
    }
    r.occupation_code = remap_occupation(occ);
    if (!catalogue.contains(r.occupation_code)) {
      result.rejected.count("occupation-not-in-catalogue");
      continue;
    }
    if (!parse_int(table.at(i, cm.resolve("education_code")), r.education_code)) {
      result.rejected.count("bad-education-code");
      continue;
    }
    auto years = recoder.recode(src.dataset, r.education_code);
    if (!years) {
      result.rejected.count("unknown-education-code");
      continue;
    }
    r.education_years = *years;

    // Father linkage columns are optional per-row (empty => no linkage).
    auto opt_field = [&](const char* name) -> std::string {
      std::string col = cm.resolve(name);
      return table.has_column(col) ? table.at(i, col) : std::string();
    };
    std::string fedu = opt_field("father_education_code");
    std::string focc = opt_field("father_occupation_code");
    std::string fby = opt_field("father_birth_year");
    if (!fedu.empty() || !focc.empty() || !fby.empty()) {
      int v;
      if (parse_int(fedu, v)) r.father_education_code = v;
      if (parse_int(focc, v)) r.father_occupation_code = v;
      if (parse_int(fby, v)) r.father_birth_year = v;
      if (!r.father_education_code || !r.father_occupation_code || !r.father_birth_year) {
        result.rejected.count("partial-father-linkage");
        continue;
      }
    }
    result.records.push_back(std::move(r));
  }
  return result;
}

PairResult build_pairs(const std::vector<IndividualRecord>& records,
                       const CohortScheme& scheme, const OccupationCatalogue& catalogue,
                       const EducationRecoder& recoder, const PairConfig& config) {
  scheme.validate();
  PairResult result;
  for (const auto& r : records) {
    if (!r.father_birth_year) continue; // not a pair candidate
    ++result.candidates;

    auto survey_year_it = config.survey_years.find(r.dataset);
    if (survey_year_it == config.survey_years.end())
      throw ConfigError("no survey year configured for dataset");
    int age = survey_year_it->second - r.birth_year;
    if (age < config.working_age_min || age > config.working_age_max) {
      result.excluded.count("son-not-working-age");
      continue;
    }
    if (*r.father_birth_year >= r.birth_year) {
      result.excluded.count("father-not-older");
      continue;
    }
    auto son_cohort = scheme.assign(r.birth_year);
    if (!son_cohort) {
      result.excluded.count("son-cohort-unresolved");
      continue;
    }
    auto father_cohort = scheme.assign(*r.father_birth_year);
    if (!father_cohort) {
      result.excluded.count("father-cohort-unresolved");
      continue;
    }
    int father_occ = remap_occupation(*r.father_occupation_code);
    if (!catalogue.contains(father_occ)) {
      result.excluded.count("father-occupation-not-in-catalogue");
      continue;
    }
    auto father_edu = recoder.recode(r.dataset, *r.father_education_code);
    if (!father_edu) {
      result.excluded.count("father-education-unknown-code");
      continue;
    }

    FatherSonPair p;
    p.son_id = r.person_id;
    p.son_cohort = scheme.cohorts[*son_cohort].id;
    p.father_cohort = scheme.cohorts[*father_cohort].id;
    p.son_occupation = r.occupation_code;
    p.father_occupation = father_occ;
    p.son_education_years = r.education_years;
    p.father_education_years = *father_edu;
    p.group = r.social_group;
    p.weight = r.sample_weight;
    p.son_birth_year = r.birth_year;
    p.father_birth_year = *r.father_birth_year;
    ++result.crosstab[{p.son_cohort, p.father_cohort}];
    result.pairs.push_back(std::move(p));
  }
  return result;
}

void write_pairs(const std::string& path, const std::vector<FatherSonPair>& pairs,
                 const std::string& provenance) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  if (!provenance.empty()) out << "# " << provenance << "\n";
  out << "son_id,father_cohort,son_cohort,father_occ,son_occ,father_edu_years,"
         "son_edu_years,group,weight,son_birth_year,father_birth_year\n";
  char buf[64];
  for (const auto& p : pairs) {
    std::snprintf(buf, sizeof buf, "%.10g", p.weight);
    out << csv::join_row({p.son_id, p.father_cohort, p.son_cohort,
                          std::to_string(p.father_occupation), std::to_string(p.son_occupation),
                          std::to_string(p.father_education_years),
                          std::to_string(p.son_education_years), to_string(p.group), buf,
                          std::to_string(p.son_birth_year),
                          std::to_string(p.father_birth_year)})
        << "\n";
  }
}

std::vector<FatherSonPair> read_pairs(const std::string& path) {
  auto t = csv::Table::read_file(path);
  std::vector<FatherSonPair> pairs;
  pairs.reserve(t.rows());
  for (std::size_t i = 0; i < t.rows(); ++i) {
    FatherSonPair p;
    p.son_id = t.at(i, "son_id");
    p.father_cohort = t.at(i, "father_cohort");
    p.son_cohort = t.at(i, "son_cohort");
    p.father_occupation = std::stoi(t.at(i, "father_occ"));
    p.son_occupation = std::stoi(t.at(i, "son_occ"));
    p.father_education_years = std::stoi(t.at(i, "father_edu_years"));
    p.son_education_years = std::stoi(t.at(i, "son_edu_years"));
    p.group = parse_social_group(t.at(i, "group"));
    p.weight = std::stod(t.at(i, "weight"));
    p.son_birth_year = std::stoi(t.at(i, "son_birth_year"));
    p.father_birth_year = std::stoi(t.at(i, "father_birth_year"));
    pairs.push_back(std::move(p));
  }
  return pairs;
}

std::string render_crosstab(const PairResult& result, const CohortScheme& scheme) {
  std::ostringstream out;
  out << "SC/FC";
  for (const auto& c : scheme.cohorts) out << "," << c.id;
  out << ",row_total\n";
  std::map<CohortId, std::size_t> col_totals;
  std::size_t grand = 0;
  for (const auto& son : scheme.cohorts) {
    bool any = false;
    for (const auto& father : scheme.cohorts)
      if (result.crosstab.count({son.id, father.id})) any = true;
    if (!any) continue;
    out << son.id;
    std::size_t row_total = 0;
    for (const auto& father : scheme.cohorts) {
      auto it = result.crosstab.find({son.id, father.id});
      std::size_t n = it == result.crosstab.end() ? 0 : it->second;
      out << "," << n;
      row_total += n;
      col_totals[father.id] += n;
    }
    grand += row_total;
    out << "," << row_total << "\n";
  }
  out << "col_total";
  for (const auto& c : scheme.cohorts) out << "," << col_totals[c.id];
  out << "," << grand << "\n";
  return out.str();
}

}  // namespace occmob::ingest
