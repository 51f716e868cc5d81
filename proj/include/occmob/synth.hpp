#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "occmob/types.hpp"

namespace occmob::synth {

struct GroupSpec {
  SocialGroup group = SocialGroup::Other;
  double share = 0.0;
  double slope = 0.0;     // planted rank-rank slope
  double intercept = 0.0; // planted intercept
};

struct LadderRung {
  int occupation_code = -1;
  double latent_status = 0.0;
  double edu_mean = 0.0; // years of schooling
  double inc_mean = 0.0;
  double edu_sd = 0.0;
  double inc_sd = 0.0;
};

enum class RankNoise {
  // Son keeps the father's latent rank with probability `slope`, otherwise
  // draws a fresh uniform rank; conditional mean is exactly
  // intercept + slope * father_rank and the son marginal stays uniform.
  // Requires intercept == (1 - slope) * 50.
  UniformMixture,
  // Additive gaussian noise on the linear model, clamped to (0,100); biases
  // extreme-slope recovery, oracle falls back to Monte Carlo.
  Gaussian,
};

struct SynthSpec {
  std::size_t n_households = 0;
  std::uint64_t seed = 1;
  std::vector<GroupSpec> groups;
  std::vector<LadderRung> ladder; // sorted by latent_status internally
  RankNoise noise_kind = RankNoise::UniformMixture;
  double noise_sd = 10.0;            // gaussian mode only
  int son_birth_min = 1956;
  int son_birth_max = 1985;
  int father_gap_min = 22;
  int father_gap_max = 32;
  double weight_jitter = 0.0;        // weights ~ 1 + U(0, jitter)
  double edu_income_correlation = 0.0; // unused hook for sensitivity specs

  void validate() const; // throws ConfigError("infeasible spec: ...")
  static SynthSpec from_json_file(const std::string& path);
};

struct Generated {
  std::vector<IndividualRecord> records; // son heads + father heads
  // Ground truth per pair, for oracles: (father latent rank, son latent rank).
  std::vector<std::pair<double, double>> latent_ranks;
};

// Deterministic in the seed; record order is generation order.
Generated generate(const SynthSpec& spec);

// Writes the exact survey file format consumed by ingest.
void write_survey(const std::string& path, const std::vector<IndividualRecord>& records,
                  const std::string& provenance);

struct OracleEstimate {
  SocialGroup group;
  double p25 = 0.0;
  double p75 = 0.0;
};

// Planted-model conditional expectations: analytic for the mixture noise,
// Monte Carlo (1e6 draws) when gaussian truncation distorts the line.
std::vector<OracleEstimate> oracle_estimates(const SynthSpec& spec);

}  // namespace occmob::synth
