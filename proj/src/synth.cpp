#include "occmob/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "occmob/csv.hpp"
#include "occmob/stats.hpp"

namespace occmob::synth {

using nlohmann::json;

void SynthSpec::validate() const {
  if (n_households == 0) throw ConfigError("infeasible spec: n_households is 0");
  if (ladder.size() < 2) throw ConfigError("infeasible spec: ladder needs >= 2 rungs");
  double share = 0.0;
  for (const auto& g : groups) {
    if (g.share < 0.0) throw ConfigError("infeasible spec: negative group share");
    share += g.share;
  }
  if (std::abs(share - 1.0) > 1e-9)
    throw ConfigError("infeasible spec: group shares sum to " + std::to_string(share));
  for (const auto& r : ladder)
    if (r.edu_sd < 0.0 || r.inc_sd < 0.0)
      throw ConfigError("infeasible spec: negative noise sd");
  if (noise_kind == RankNoise::UniformMixture) {
    for (const auto& g : groups) {
      if (g.slope < 0.0 || g.slope > 1.0)
        throw ConfigError("infeasible spec: mixture noise needs slope in [0,1]");
      if (std::abs(g.intercept - (1.0 - g.slope) * 50.0) > 1e-9)
        throw ConfigError(
            "infeasible spec: mixture noise requires intercept == (1-slope)*50 for group " +
            std::string(to_string(g.group)));
    }
  }
  if (son_birth_max < son_birth_min || father_gap_max < father_gap_min)
    throw ConfigError("infeasible spec: empty year range");
}

SynthSpec SynthSpec::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open synth spec " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  SynthSpec s;
  try {
    s.n_households = j.at("n_households").get<std::size_t>();
    s.seed = j.value("seed", std::uint64_t{1});
    for (const auto& g : j.at("groups")) {
      GroupSpec gs;
      gs.group = parse_social_group(g.at("name").get<std::string>());
      gs.share = g.at("share").get<double>();
      gs.slope = g.at("slope").get<double>();
      gs.intercept = g.at("intercept").get<double>();
      s.groups.push_back(gs);
    }
    for (const auto& r : j.at("ladder")) {
      LadderRung rung;
      rung.occupation_code = r.at("occupation_code").get<int>();
      rung.latent_status = r.at("latent_status").get<double>();
      rung.edu_mean = r.at("edu_mean").get<double>();
      rung.inc_mean = r.at("inc_mean").get<double>();
      rung.edu_sd = r.value("edu_sd", 0.0);
      rung.inc_sd = r.value("inc_sd", 0.0);
      s.ladder.push_back(rung);
    }
    std::string kind = j.value("rank_noise", "uniform-mixture");
    if (kind == "uniform-mixture") s.noise_kind = RankNoise::UniformMixture;
    else if (kind == "gaussian") s.noise_kind = RankNoise::Gaussian;
    else throw ConfigError("unknown rank_noise '" + kind + "'");
    s.noise_sd = j.value("noise_sd", 10.0);
    if (j.contains("son_birth_range")) {
      s.son_birth_min = j["son_birth_range"].at(0).get<int>();
      s.son_birth_max = j["son_birth_range"].at(1).get<int>();
    }
    if (j.contains("father_gap")) {
      s.father_gap_min = j["father_gap"].at(0).get<int>();
      s.father_gap_max = j["father_gap"].at(1).get<int>();
    }
    s.weight_jitter = j.value("weight_jitter", 0.0);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  s.validate();
  return s;
}

namespace {

// Rung index for a latent rank under the equal-probability partition of
// (0,100) over K status-sorted rungs. Keeping the partition equal-probability
// makes recomputed percentile ranks land on the planted line.
std::size_t rung_of(double rank, std::size_t k) {
  auto idx = static_cast<std::size_t>(rank / 100.0 * static_cast<double>(k));
  return std::min(idx, k - 1);
}

double clamp_rank(double r) { return std::clamp(r, 0.01, 99.99); }

}  // namespace

Generated generate(const SynthSpec& spec) {
  spec.validate();
  std::vector<LadderRung> ladder = spec.ladder;
  std::sort(ladder.begin(), ladder.end(),
            [](const LadderRung& a, const LadderRung& b) {
              return a.latent_status < b.latent_status;
            });
  const std::size_t k = ladder.size();

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  auto draw_group = [&]() -> const GroupSpec& {
    double u = unit(rng), acc = 0.0;
    for (const auto& g : spec.groups) {
      acc += g.share;
      if (u <= acc) return g;
    }
    return spec.groups.back();
  };

  auto person = [&](const std::string& id, const std::string& hh, int birth_year,
                    const LadderRung& rung, SocialGroup group, double weight) {
    IndividualRecord r;
    r.person_id = id;
    r.household_id = hh;
    r.birth_year = birth_year;
    int edu = static_cast<int>(std::lround(rung.edu_mean + rung.edu_sd * gauss(rng)));
    r.education_code = std::clamp(edu, 0, 17); // IHDS2 codes are years directly
    r.education_years = r.education_code;
    r.occupation_code = rung.occupation_code;
    r.income_proxy = std::max(0.0, rung.inc_mean + rung.inc_sd * gauss(rng));
    r.sample_weight = weight;
    r.social_group = group;
    r.is_household_head = true;
    r.dataset = Dataset::IHDS2;
    return r;
  };

  Generated out;
  out.records.reserve(2 * spec.n_households);
  out.latent_ranks.reserve(spec.n_households);
  std::uniform_int_distribution<int> son_year(spec.son_birth_min, spec.son_birth_max);
  std::uniform_int_distribution<int> gap(spec.father_gap_min, spec.father_gap_max);

  for (std::size_t i = 0; i < spec.n_households; ++i) {
    const GroupSpec& g = draw_group();
    double weight = 1.0 + spec.weight_jitter * unit(rng);

    double father_rank = clamp_rank(100.0 * unit(rng));
    double son_rank;
    if (spec.noise_kind == RankNoise::UniformMixture) {
      son_rank = unit(rng) < g.slope ? father_rank : clamp_rank(100.0 * unit(rng));
    } else {
      son_rank = clamp_rank(g.intercept + g.slope * father_rank + spec.noise_sd * gauss(rng));
    }
    out.latent_ranks.emplace_back(father_rank, son_rank);

    const LadderRung& father_rung = ladder[rung_of(father_rank, k)];
    const LadderRung& son_rung = ladder[rung_of(son_rank, k)];

    int sy = son_year(rng);
    int fy = sy - gap(rng);

    IndividualRecord son =
        person("S" + std::to_string(i), "H" + std::to_string(i), sy, son_rung, g.group, weight);
    IndividualRecord father = person("F" + std::to_string(i), "HF" + std::to_string(i), fy,
                                     father_rung, g.group, weight);
    son.father_birth_year = fy;
    son.father_occupation_code = father_rung.occupation_code;
    son.father_education_code = father.education_code;
    out.records.push_back(std::move(son));
    out.records.push_back(std::move(father));
  }
  return out;
}

void write_survey(const std::string& path, const std::vector<IndividualRecord>& records,
                  const std::string& provenance) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  if (!provenance.empty()) out << "# " << provenance << "\n";
  out << "person_id,household_id,birth_year,education_code,occupation_code,income_proxy,"
         "sample_weight,social_group,is_household_head,father_education_code,"
         "father_occupation_code,father_birth_year\n";
  char buf[64];
  for (const auto& r : records) {
    std::string inc;
    if (r.income_proxy) {
      std::snprintf(buf, sizeof buf, "%.10g", *r.income_proxy);
      inc = buf;
    }
    std::snprintf(buf, sizeof buf, "%.10g", r.sample_weight);
    auto opt = [](const std::optional<int>& v) {
      return v ? std::to_string(*v) : std::string();
    };
    out << csv::join_row({r.person_id, r.household_id, std::to_string(r.birth_year),
                          std::to_string(r.education_code), std::to_string(r.occupation_code),
                          inc, buf, to_string(r.social_group),
                          r.is_household_head ? "1" : "0", opt(r.father_education_code),
                          opt(r.father_occupation_code), opt(r.father_birth_year)})
        << "\n";
  }
}

std::vector<OracleEstimate> oracle_estimates(const SynthSpec& spec) {
  spec.validate();
  std::vector<OracleEstimate> out;

  bool need_monte_carlo = false;
  if (spec.noise_kind == RankNoise::Gaussian) {
    // Truncation probability at the worst-case father rank for each group.
    for (const auto& g : spec.groups) {
      for (double x : {0.01, 99.99}) {
        double mu = g.intercept + g.slope * x;
        double p_low = 0.5 * std::erfc((mu - 0.0) / (spec.noise_sd * std::sqrt(2.0)));
        double p_high = 0.5 * std::erfc((100.0 - mu) / (spec.noise_sd * std::sqrt(2.0)));
        if (p_low + p_high > 0.01) need_monte_carlo = true;
      }
    }
  }

  if (!need_monte_carlo && spec.noise_kind == RankNoise::UniformMixture) {
    for (const auto& g : spec.groups)
      out.push_back({g.group, g.intercept + 25.0 * g.slope, g.intercept + 75.0 * g.slope});
    return out;
  }
  if (!need_monte_carlo) {
    // Gaussian noise with negligible truncation: conditional mean is the line.
    for (const auto& g : spec.groups)
      out.push_back({g.group, g.intercept + 25.0 * g.slope, g.intercept + 75.0 * g.slope});
    return out;
  }

  // Monte Carlo over the pooled population: simulate latent pairs, re-rank
  // sons within the pooled son distribution, then regress per group.
  const std::size_t n = 1'000'000;
  std::mt19937_64 rng(spec.seed ^ 0x6f7261636c65ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> fr(n), sr(n);
  std::vector<std::size_t> grp(n);
  for (std::size_t i = 0; i < n; ++i) {
    double u = unit(rng), acc = 0.0;
    std::size_t gi = spec.groups.size() - 1;
    for (std::size_t t = 0; t < spec.groups.size(); ++t) {
      acc += spec.groups[t].share;
      if (u <= acc) {
        gi = t;
        break;
      }
    }
    const auto& g = spec.groups[gi];
    fr[i] = clamp_rank(100.0 * unit(rng));
    sr[i] = clamp_rank(g.intercept + g.slope * fr[i] + spec.noise_sd * gauss(rng));
    grp[i] = gi;
  }
  auto son_ranks = stats::weighted_percentile_ranks(stats::WeightedSample::uniform(sr));
  auto father_ranks = stats::weighted_percentile_ranks(stats::WeightedSample::uniform(fr));
  for (std::size_t gi = 0; gi < spec.groups.size(); ++gi) {
    stats::WeightedSample y;
    std::vector<double> x;
    for (std::size_t i = 0; i < n; ++i) {
      if (grp[i] != gi) continue;
      y.values.push_back(son_ranks[i]);
      y.weights.push_back(1.0);
      x.push_back(father_ranks[i]);
    }
    auto fit = stats::wls(y, {x});
    out.push_back({spec.groups[gi].group, fit.intercept + 25.0 * fit.slopes[0],
                   fit.intercept + 75.0 * fit.slopes[0]});
  }
  return out;
}

}  // namespace occmob::synth
