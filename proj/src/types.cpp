#include "occmob/types.hpp"

#include <algorithm>
#include <charconv>

#include "occmob/csv.hpp"

namespace occmob {

const char* to_string(SocialGroup g) {
  switch (g) {
    case SocialGroup::Brahmin: return "Brahmin";
    case SocialGroup::FC: return "FC";
    case SocialGroup::OBC: return "OBC";
    case SocialGroup::Dalit: return "Dalit";
    case SocialGroup::Adivasi: return "Adivasi";
    case SocialGroup::Muslim: return "Muslim";
    case SocialGroup::Other: return "Other";
  }
  return "?";
}

SocialGroup parse_social_group(const std::string& s) {
  if (s == "Brahmin") return SocialGroup::Brahmin;
  if (s == "FC") return SocialGroup::FC;
  if (s == "OBC") return SocialGroup::OBC;
  if (s == "Dalit" || s == "SC") return SocialGroup::Dalit;
  if (s == "Adivasi" || s == "ST") return SocialGroup::Adivasi;
  if (s == "Muslim") return SocialGroup::Muslim;
  if (s == "Other") return SocialGroup::Other;
  throw DataError("unknown social group '" + s + "'");
}

const char* to_string(Dataset d) { return d == Dataset::NSS43 ? "NSS43" : "IHDS2"; }

Dataset parse_dataset(const std::string& s) {
  if (s == "NSS43") return Dataset::NSS43;
  if (s == "IHDS2") return Dataset::IHDS2;
  throw ConfigError("unknown dataset '" + s + "'");
}

std::optional<std::size_t> CohortScheme::assign(int birth_year) const {
  for (std::size_t i = 0; i < cohorts.size(); ++i)
    if (birth_year >= cohorts[i].start_year && birth_year <= cohorts[i].end_year) return i;
  return std::nullopt;
}

const Cohort* CohortScheme::find(const CohortId& id) const {
  for (const auto& c : cohorts)
    if (c.id == id) return &c;
  return nullptr;
}

void CohortScheme::validate() const {
  if (cohorts.empty()) throw ConfigError("cohort scheme has no cohorts");
  for (std::size_t i = 0; i < cohorts.size(); ++i) {
    const auto& c = cohorts[i];
    if (c.end_year < c.start_year)
      throw ConfigError("cohort " + c.id + " has end before start");
    if (i > 0 && c.start_year != cohorts[i - 1].end_year + 1)
      throw ConfigError("cohorts must be contiguous and non-overlapping at " + c.id);
  }
}

namespace {

CohortId label(int start, int end) {
  std::string tail = std::to_string(end % 100);
  if (tail.size() == 1) tail = "0" + tail;
  return std::to_string(start) + "-" + tail;
}

}  // namespace

CohortScheme CohortScheme::base() {
  CohortScheme s;
  s.shift_years = 0;
  const Dataset src[6] = {Dataset::NSS43, Dataset::NSS43, Dataset::NSS43,
                          Dataset::NSS43, Dataset::IHDS2, Dataset::IHDS2};
  for (int k = 0; k < 6; ++k) {
    int start = 1926 + 10 * k;
    int end = start + 9;
    s.cohorts.push_back({label(start, end), start, end, src[k]});
  }
  return s;
}

CohortScheme CohortScheme::shifted(int years) {
  CohortScheme s = base();
  s.shift_years = years;
  for (auto& c : s.cohorts) {
    c.start_year += years;
    c.end_year += years;
    c.id = label(c.start_year, c.end_year);
  }
  return s;
}

void OccupationCatalogue::add(int code, OccupationEntry entry) {
  entries_[code] = std::move(entry);
}

bool OccupationCatalogue::contains(int code) const { return entries_.count(code) > 0; }

const OccupationEntry& OccupationCatalogue::at(int code) const {
  auto it = entries_.find(code);
  if (it == entries_.end())
    throw DataError("occupation code " + std::to_string(code) + " not in catalogue");
  return it->second;
}

OccupationCatalogue OccupationCatalogue::load_csv(const std::string& path) {
  auto t = csv::Table::read_file(path);
  OccupationCatalogue cat;
  for (std::size_t i = 0; i < t.rows(); ++i) {
    OccupationEntry e;
    e.one_digit_code = std::stoi(t.at(i, "one_digit"));
    e.broad_group = std::stoi(t.at(i, "broad_group"));
    e.description = t.at(i, "description");
    if (e.broad_group < 1 || e.broad_group > 7)
      throw DataError(path + ": broad_group out of range for code " + t.at(i, "two_digit"));
    cat.add(std::stoi(t.at(i, "two_digit")), std::move(e));
  }
  return cat;
}

}  // namespace occmob
