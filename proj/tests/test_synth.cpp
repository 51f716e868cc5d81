#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>

#include "occmob/mobility.hpp"
#include "occmob/synth.hpp"

using namespace occmob;
namespace fs = std::filesystem;

namespace {

synth::SynthSpec base_spec(std::size_t n, double slope, unsigned seed) {
  synth::SynthSpec s;
  s.n_households = n;
  s.seed = seed;
  s.groups = {{SocialGroup::OBC, 1.0, slope, (1.0 - slope) * 50.0}};
  int codes[10] = {61, 75, 52, 43, 30, 98, 21, 12, 2, 14};
  for (int k = 0; k < 10; ++k)
    s.ladder.push_back({codes[k], static_cast<double>(k), 1.5 * k, 300.0 + 250.0 * k, 0.3,
                        15.0});
  return s;
}

}  // namespace

TEST_CASE("spec validation catches infeasible specs") {
  auto s = base_spec(100, 0.6, 1);
  s.groups[0].share = 0.7;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = base_spec(100, 0.6, 1);
  s.groups[0].intercept = 10.0; // mixture needs (1-slope)*50
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = base_spec(100, 0.6, 1);
  s.ladder.resize(1);
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("same seed gives byte-identical output files") {
  auto spec = base_spec(500, 0.6, 42);
  auto dir = fs::temp_directory_path();
  auto p1 = (dir / "occmob_synth_a.csv").string();
  auto p2 = (dir / "occmob_synth_b.csv").string();
  synth::write_survey(p1, synth::generate(spec).records, "prov");
  synth::write_survey(p2, synth::generate(spec).records, "prov");
  std::ifstream a(p1), b(p2);
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().size() > 1000);
}

TEST_CASE("slope 1 with zero noise: sons reproduce father ranks") {
  auto spec = base_spec(300, 1.0, 7);
  auto gen = synth::generate(spec);
  for (const auto& [f, s] : gen.latent_ranks) CHECK(f == s);
  // and son occupation equals father occupation on every record pair
  for (std::size_t i = 0; i + 1 < gen.records.size(); i += 2)
    CHECK(gen.records[i].occupation_code == *gen.records[i].father_occupation_code);
}

TEST_CASE("slope 0: son rung independent of father rung (chi-square)") {
  auto spec = base_spec(10000, 0.0, 11);
  spec.ladder.resize(0);
  int codes[5] = {61, 43, 30, 12, 2};
  for (int k = 0; k < 5; ++k)
    spec.ladder.push_back({codes[k], static_cast<double>(k), 2.0 * k, 300.0 + 250.0 * k,
                           0.3, 15.0});
  auto gen = synth::generate(spec);
  std::map<int, int> code_idx;
  for (int k = 0; k < 5; ++k) code_idx[codes[k]] = k;
  double obs[5][5] = {};
  double rowm[5] = {}, colm[5] = {};
  double n = 0;
  for (std::size_t i = 0; i < gen.records.size(); i += 2) {
    int s = code_idx.at(gen.records[i].occupation_code);
    int f = code_idx.at(*gen.records[i].father_occupation_code);
    obs[f][s] += 1;
    rowm[f] += 1;
    colm[s] += 1;
    n += 1;
  }
  double chi2 = 0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      double e = rowm[i] * colm[j] / n;
      chi2 += (obs[i][j] - e) * (obs[i][j] - e) / e;
    }
  boost::math::chi_squared_distribution<double> dist(16.0);
  CHECK(chi2 < boost::math::quantile(dist, 0.99));
}

TEST_CASE("oracle: mixture mode is the plain linear formula") {
  auto spec = base_spec(100, 0.6, 3);
  auto oracles = synth::oracle_estimates(spec);
  REQUIRE(oracles.size() == 1);
  CHECK(oracles[0].p25 == doctest::Approx(35.0));
  CHECK(oracles[0].p75 == doctest::Approx(65.0));

  auto flat = base_spec(100, 0.0, 3);
  auto o2 = synth::oracle_estimates(flat);
  CHECK(o2[0].p25 == doctest::Approx(50.0));
  CHECK(o2[0].p75 == doctest::Approx(50.0));
}

TEST_CASE("oracle: truncation-heavy gaussian spec falls back to Monte Carlo") {
  auto spec = base_spec(100, 0.9, 5);
  spec.noise_kind = synth::RankNoise::Gaussian;
  spec.groups[0].intercept = 0.0;
  spec.noise_sd = 25.0; // heavy truncation at both ends
  auto oracles = synth::oracle_estimates(spec);
  REQUIRE(oracles.size() == 1);
  // truncation pulls the recomputed-rank line toward the middle; the oracle
  // must differ measurably from the naive formula yet stay ordered
  CHECK(oracles[0].p25 < oracles[0].p75);
  CHECK(oracles[0].p25 > 0.0);
  CHECK(oracles[0].p75 < 100.0);
  double naive25 = 0.0 + 0.9 * 25.0;
  CHECK(std::abs(oracles[0].p25 - naive25) > 0.5);
}

TEST_CASE("planted slope recovered downstream at n=50000") {
  auto spec = base_spec(50000, 0.6, 123);
  auto gen = synth::generate(spec);

  // build pairs directly and rank with the planted latent statuses
  std::vector<FatherSonPair> pairs;
  for (std::size_t i = 0; i < gen.records.size(); i += 2) {
    const auto& son = gen.records[i];
    FatherSonPair p;
    p.son_cohort = "all";
    p.father_cohort = "all";
    p.son_occupation = son.occupation_code;
    p.father_occupation = *son.father_occupation_code;
    p.group = son.social_group;
    p.weight = son.sample_weight;
    pairs.push_back(p);
  }
  sei::CohortAveragedScores status;
  for (const auto& rung : spec.ladder) status.scores[rung.occupation_code] = rung.latent_status;
  auto ranked =
      mobility::rank_pairs(pairs, mobility::StatusResolver::from_constant(status));
  REQUIRE(ranked.excluded == 0);
  auto p25 = mobility::estimate_mobility(ranked.ranked, mobility::Estimator::P25);
  auto p75 = mobility::estimate_mobility(ranked.ranked, mobility::Estimator::P75);
  CHECK(std::abs(p25.point - 35.0) < 1.5);
  CHECK(std::abs(p75.point - 65.0) < 1.5);
}

TEST_CASE("non-uniform weights preserve planted slopes") {
  auto spec = base_spec(100000, 0.5, 31);
  spec.weight_jitter = 3.0;
  auto gen = synth::generate(spec);
  std::vector<FatherSonPair> pairs;
  for (std::size_t i = 0; i < gen.records.size(); i += 2) {
    const auto& son = gen.records[i];
    FatherSonPair p;
    p.son_cohort = "all";
    p.father_cohort = "all";
    p.son_occupation = son.occupation_code;
    p.father_occupation = *son.father_occupation_code;
    p.group = son.social_group;
    p.weight = son.sample_weight;
    pairs.push_back(p);
  }
  sei::CohortAveragedScores status;
  for (const auto& rung : spec.ladder) status.scores[rung.occupation_code] = rung.latent_status;
  auto ranked =
      mobility::rank_pairs(pairs, mobility::StatusResolver::from_constant(status));
  auto p25 = mobility::estimate_mobility(ranked.ranked, mobility::Estimator::P25);
  CHECK(std::abs(p25.point - (25.0 + 0.5 * 25.0)) < 1.5);
}
