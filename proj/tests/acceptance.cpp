// Acceptance harness: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria 1 and 9 exercise the installed CLI end to end; the rest
// drive the library directly against brute-force oracles.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "occmob/ingest.hpp"
#include "occmob/mobility.hpp"
#include "occmob/sei.hpp"
#include "occmob/stats.hpp"
#include "occmob/synth.hpp"
#include "occmob/transitions.hpp"
#include "oracles.hpp"

#ifndef OCCMOB_CLI_PATH
#error "OCCMOB_CLI_PATH must be defined"
#endif
#ifndef OCCMOB_SOURCE_DIR
#error "OCCMOB_SOURCE_DIR must be defined"
#endif

namespace fs = std::filesystem;
using namespace occmob;

namespace {

const std::string kSource = OCCMOB_SOURCE_DIR;
const fs::path kWork = fs::temp_directory_path() / "occmob_acceptance";

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failure(what);
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(OCCMOB_CLI_PATH) + " " + args + " 2>/dev/null";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::vector<std::string>> read_csv_body(const fs::path& p) {
  std::ifstream in(p);
  require(bool(in), "cannot open " + p.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

synth::SynthSpec fixture_spec() {
  return synth::SynthSpec::from_json_file(kSource +
                                          "/tests/fixtures/acceptance_spec.json");
}

// Pairs with planted ranks from a generated population, pooled into one cell.
std::vector<FatherSonPair> pooled_pairs(const synth::Generated& gen) {
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
  return pairs;
}

sei::CohortAveragedScores ladder_statuses(const synth::SynthSpec& spec) {
  sei::CohortAveragedScores s;
  for (const auto& r : spec.ladder) s.scores[r.occupation_code] = r.latent_status;
  return s;
}

std::string prepared_config;
fs::path survey_path;

// Criterion 1: planted-slope recovery through the whole CLI pipeline,
// p25 within 1.5 of 35 and p75 within 1.5 of 65 in under 30 seconds.
void criterion_1() {
  fs::create_directories(kWork);
  survey_path = kWork / "survey.csv";
  auto cfg_text = slurp(kSource + "/tests/fixtures/acceptance_run.json.in");
  auto sub = [&](const std::string& tag, const std::string& value) {
    for (std::size_t at; (at = cfg_text.find(tag)) != std::string::npos;)
      cfg_text.replace(at, tag.size(), value);
  };
  sub("@SURVEY@", survey_path.string());
  sub("@DATA@", kSource + "/data");
  prepared_config = (kWork / "run.json").string();
  std::ofstream(prepared_config) << cfg_text;

  auto t0 = std::chrono::steady_clock::now();
  require(run_cli("synth --spec " + kSource + "/tests/fixtures/acceptance_spec.json --out " +
                  survey_path.string()) == 0,
          "synth stage failed");
  auto out = (kWork / "out").string();
  require(run_cli("pipeline --config " + prepared_config + " --out " + out) == 0,
          "pipeline failed");
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  require(secs < 30.0, "pipeline took " + std::to_string(secs) + "s");

  for (auto [est, truth] : {std::pair{"p25", 35.0}, std::pair{"p75", 65.0}}) {
    auto rows = read_csv_body(fs::path(out) /
                              ("mobility_occupation_" + std::string(est) + "_plot.csv"));
    require(rows.size() >= 3, "plot file too short"); // header + 2 groups
    for (std::size_t i = 1; i < rows.size(); ++i) {
      double point = std::stod(rows[i][2]);
      require(std::abs(point - truth) <= 1.5,
              std::string(est) + " for " + rows[i][0] + " = " + rows[i][2]);
    }
  }
}

// Criterion 2: slope-0 population, both estimators within 2 of 50.
void criterion_2() {
  auto spec = fixture_spec();
  spec.n_households = 20000;
  spec.seed = 5150;
  for (auto& g : spec.groups) {
    g.slope = 0.0;
    g.intercept = 50.0;
  }
  auto gen = synth::generate(spec);
  auto ranked = mobility::rank_pairs(pooled_pairs(gen),
                                     mobility::StatusResolver::from_constant(ladder_statuses(spec)));
  for (auto est : {mobility::Estimator::P25, mobility::Estimator::P75}) {
    auto m = mobility::estimate_mobility(ranked.ranked, est);
    require(std::abs(m.point - 50.0) <= 2.0,
            "null point " + std::to_string(m.point));
  }
}

// Criterion 3: 95% bootstrap CI covers the planted p25 in 95 +/- 3 percent of
// 500 independent datasets, in under 10 minutes.
void criterion_3() {
  auto t0 = std::chrono::steady_clock::now();
  int covered = 0;
  const int runs = 500, n = 2000;
  for (int t = 0; t < runs; ++t) {
    // independent draws from the planted rank model: slope 0.6, intercept 20
    std::mt19937_64 rng(90000 + static_cast<std::uint64_t>(t));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<mobility::RankedPair> cell;
    for (int i = 0; i < n; ++i) {
      double f = 100.0 * u(rng);
      double s = u(rng) < 0.6 ? f : 100.0 * u(rng);
      cell.push_back({s, f, SocialGroup::OBC, "all", 1.0});
    }
    mobility::BootstrapConfig cfg;
    cfg.seed = 1000 + static_cast<std::uint64_t>(t);
    auto est = mobility::bootstrap_ci(cell, mobility::Estimator::P25, cfg);
    if (est.ci_low <= 35.0 && 35.0 <= est.ci_high) ++covered;
  }
  double rate = static_cast<double>(covered) / runs;
  require(std::abs(rate - 0.95) <= 0.03, "coverage " + std::to_string(rate));
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  require(secs < 600.0, "coverage study took " + std::to_string(secs) + "s");
}

// Criterion 4: scaling loop correctness on a separable fixture plus
// bit-identical reruns.
void criterion_4() {
  auto catalogue =
      OccupationCatalogue::load_csv(kSource + "/data/occupation_catalogue.csv");
  std::vector<int> codes{99, 75, 61, 43, 30, 12};
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> age(25.0, 60.0);
  std::vector<sei::HeadObservation> heads;
  for (std::size_t k = 0; k < codes.size(); ++k)
    for (int i = 0; i < 30; ++i) {
      sei::HeadObservation h;
      h.age = age(rng);
      h.education_years = 2.0 * static_cast<double>(k); // occupation determines EDU
      h.income = 400.0 + 600.0 * static_cast<double>(k); // and INC
      h.occupation_code = codes[k];
      heads.push_back(h);
    }
  auto t1 = sei::estimate_sei(heads, "c", catalogue, {});
  require(t1.converged && t1.iterations <= 100, "no convergence");
  for (std::size_t i = 1; i + 1 < t1.beta42_trace.size(); ++i)
    require(t1.beta42_trace[i] <= t1.beta42_trace[i - 1] + 1e-12,
            "beta42 trace increased");
  for (std::size_t k = 0; k + 1 < codes.size(); ++k)
    require(t1.scores.at(codes[k]).raw < t1.scores.at(codes[k + 1]).raw,
            "occupation ordering broken");

  // bit-identical rerun, on this fixture and on a noisy one
  auto t2 = sei::estimate_sei(heads, "c", catalogue, {});
  for (const auto& [code, s] : t1.scores)
    require(s.raw == t2.scores.at(code).raw && s.rescaled == t2.scores.at(code).rescaled,
            "rerun differs");
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (auto& h : heads) {
    h.education_years = std::max(0.0, h.education_years + 0.7 * gauss(rng));
    h.income = std::max(1.0, h.income + 120.0 * gauss(rng));
  }
  auto n1 = sei::estimate_sei(heads, "c", catalogue, {});
  auto n2 = sei::estimate_sei(heads, "c", catalogue, {});
  for (const auto& [code, s] : n1.scores)
    require(s.raw == n2.scores.at(code).raw, "noisy rerun differs");
}

// Criterion 5: rank, WLS and correlation machinery vs quadratic-time oracles
// over 200 random weighted samples.
void criterion_5() {
  std::mt19937_64 rng(501);
  std::uniform_int_distribution<int> size(5, 50);
  std::uniform_real_distribution<double> val(-10.0, 10.0);
  std::uniform_real_distribution<double> wgt(0.2, 4.0);
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };

  for (int t = 0; t < 200; ++t) {
    int n = size(rng);
    stats::WeightedSample s;
    std::vector<double> x1, x2, b;
    for (int i = 0; i < n; ++i) {
      // one-decimal grid to force ties
      s.values.push_back(std::round(val(rng) * 10.0) / 10.0);
      s.weights.push_back(wgt(rng));
      x1.push_back(val(rng));
      x2.push_back(val(rng));
      b.push_back(std::round(val(rng) * 10.0) / 10.0);
    }

    auto ranks = stats::weighted_percentile_ranks(s);
    auto oranks = oracle::percentile_ranks(s.values, s.weights);
    for (int i = 0; i < n; ++i)
      require(rel(ranks[i], oranks[i]) <= 1e-10, "rank mismatch");

    auto fit = stats::wls(s, {x1, x2});
    auto ofit = oracle::wls_coefficients(s.values, s.weights, {x1, x2});
    require(rel(fit.intercept, ofit[0]) <= 1e-10, "wls intercept mismatch");
    require(rel(fit.slopes[0], ofit[1]) <= 1e-10, "wls slope1 mismatch");
    require(rel(fit.slopes[1], ofit[2]) <= 1e-10, "wls slope2 mismatch");

    try {
      auto c = stats::correlations(s.values, b);
      require(rel(c.pearson, oracle::pearson(s.values, b)) <= 1e-10, "pearson mismatch");
      require(rel(c.spearman, oracle::spearman(s.values, b)) <= 1e-10, "spearman mismatch");
      require(rel(c.kendall, oracle::kendall_tau_b(s.values, b)) <= 1e-10,
              "kendall mismatch");
    } catch (const NumericError&) {
      // zero-variance draw; skip, the unit suite covers the error path
    }
  }
}

// Criterion 6: transition matrix row sums, identity fixture, brute force.
void criterion_6() {
  auto catalogue =
      OccupationCatalogue::load_csv(kSource + "/data/occupation_catalogue.csv");
  constexpr int kCodeOf[7] = {12, 21, 30, 43, 52, 61, 75};

  std::vector<FatherSonPair> ident;
  for (int g = 0; g < 7; ++g) {
    FatherSonPair p;
    p.father_occupation = kCodeOf[g];
    p.son_occupation = kCodeOf[g];
    p.weight = 1.0;
    ident.push_back(p);
  }
  auto mi = transitions::transition_matrix(ident, catalogue);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j)
      require(std::abs(mi.rows[i][j] - (i == j ? 1.0 : 0.0)) <= 1e-9, "identity broken");

  std::mt19937_64 rng(601);
  std::uniform_real_distribution<double> w(0.1, 3.0);
  std::vector<FatherSonPair> pairs;
  double tally[7][7] = {};
  for (int i = 0; i < 100; ++i) {
    int fg = static_cast<int>(rng() % 7), sg = static_cast<int>(rng() % 7);
    FatherSonPair p;
    p.father_occupation = kCodeOf[fg];
    p.son_occupation = kCodeOf[sg];
    p.weight = w(rng);
    pairs.push_back(p);
    tally[fg][sg] += p.weight;
  }
  auto m = transitions::transition_matrix(pairs, catalogue);
  for (int i = 0; i < 7; ++i) {
    double rowsum = 0, total = 0;
    for (int j = 0; j < 7; ++j) total += tally[i][j];
    for (int j = 0; j < 7; ++j) {
      if (total > 0)
        require(std::abs(m.rows[i][j] - tally[i][j] / total) <= 1e-12,
                "brute force mismatch");
      rowsum += m.rows[i][j];
    }
    if (total > 0) require(std::abs(rowsum - 1.0) <= 1e-9, "row sum off");
  }
}

// Criterion 7: a strictly increasing transform of every SEI score moves no
// estimate by more than 1e-9.
void criterion_7() {
  std::mt19937_64 rng(701);
  std::uniform_real_distribution<double> w(0.3, 2.5);
  int codes[6] = {99, 75, 61, 43, 30, 12};
  std::vector<FatherSonPair> pairs;
  for (int i = 0; i < 500; ++i) {
    FatherSonPair p;
    p.son_cohort = (i % 2) ? "c1" : "c2";
    p.father_cohort = p.son_cohort;
    p.son_occupation = codes[rng() % 6];
    p.father_occupation = codes[rng() % 6];
    p.group = static_cast<SocialGroup>(rng() % 3);
    p.weight = w(rng);
    pairs.push_back(p);
  }
  auto table_with = [&](std::function<double(double)> f) {
    std::vector<sei::SeiTable> tables;
    for (const char* c : {"c1", "c2"}) {
      sei::SeiTable t;
      t.cohort = c;
      for (int k = 0; k < 6; ++k) {
        double base = 5.0 + 12.0 * k + (c[1] == '2' ? 1.5 : 0.0);
        t.scores[codes[k]] = {0.0, f(base), false};
      }
      tables.push_back(t);
    }
    return tables;
  };
  auto run = [&](std::function<double(double)> f) {
    auto ranked =
        mobility::rank_pairs(pairs, mobility::StatusResolver::from_tables(table_with(f)));
    std::map<std::pair<SocialGroup, CohortId>, std::vector<mobility::RankedPair>> cells;
    for (const auto& rp : ranked.ranked) cells[{rp.group, rp.cohort}].push_back(rp);
    std::vector<mobility::MobilityEstimate> out;
    mobility::BootstrapConfig bcfg;
    bcfg.resample_count = 40;
    for (const auto& [key, cell] : cells)
      for (auto est : {mobility::Estimator::P25, mobility::Estimator::P75,
                       mobility::Estimator::IntervalBottomHalf,
                       mobility::Estimator::IntervalTopHalf})
        out.push_back(mobility::bootstrap_ci(cell, est, bcfg));
    return out;
  };
  auto a = run([](double s) { return s; });
  auto b = run([](double s) { return s * s * s / 1000.0 + 2.0 * s; }); // strictly increasing
  require(a.size() == b.size() && !a.empty(), "estimate sets differ in size");
  for (std::size_t i = 0; i < a.size(); ++i) {
    require(std::abs(a[i].point - b[i].point) <= 1e-9, "point moved");
    require(std::abs(a[i].ci_low - b[i].ci_low) <= 1e-9, "ci_low moved");
    require(std::abs(a[i].ci_high - b[i].ci_high) <= 1e-9, "ci_high moved");
  }
}

// Criterion 8: education recode table and broad-group collapse.
void criterion_8() {
  auto recoder =
      ingest::EducationRecoder::load_csv(kSource + "/data/education_recode.csv");
  int expected[7] = {0, 1, 3, 8, 11, 13, 17};
  for (int code = 0; code <= 5; ++code)
    require(*recoder.recode(Dataset::NSS43, code) == expected[code], "recode mismatch");
  for (int code = 6; code <= 9; ++code)
    require(*recoder.recode(Dataset::NSS43, code) == 17, "recode top mismatch");

  auto catalogue =
      OccupationCatalogue::load_csv(kSource + "/data/occupation_catalogue.csv");
  for (const auto& [code, e] : catalogue.entries()) {
    int want = e.one_digit_code;
    if (want == 0) want = 1;
    if (want >= 7) want = 7;
    require(e.broad_group == want, "broad group mismatch for code " + std::to_string(code));
  }
}

// Criterion 9: sei and mobility outputs structurally match the golden layouts.
void criterion_9() {
  require(!prepared_config.empty(), "criterion 1 must run first");
  auto out = (kWork / "out9").string();
  require(run_cli("sei --config " + prepared_config + " --out " + out) == 0, "sei failed");
  require(run_cli("mobility --config " + prepared_config + " --out " + out) == 0,
          "mobility failed");

  auto check_layout = [&](const fs::path& file, const fs::path& golden, bool labels_only) {
    auto rows = read_csv_body(file);
    std::ifstream gold(golden);
    require(bool(gold), "missing golden " + golden.string());
    std::string line;
    std::size_t i = 0;
    while (std::getline(gold, line)) {
      require(i < rows.size(), file.string() + ": fewer rows than golden");
      std::string got;
      if (i == 0 || !labels_only) {
        for (std::size_t c = 0; c < rows[i].size(); ++c)
          got += (c ? "," : "") + rows[i][c];
      } else {
        got = rows[i][0];
      }
      require(got == line, file.string() + " row " + std::to_string(i) + ": '" + got +
                               "' vs '" + line + "'");
      ++i;
    }
    require(i == rows.size(), file.string() + ": more rows than golden");
  };

  auto golden = fs::path(kSource) / "tests/golden";
  check_layout(fs::path(out) / "sei_coefficients.csv",
               golden / "sei_coefficients_layout.txt", true);
  check_layout(fs::path(out) / "mobility_occupation_p25_grid.csv",
               golden / "mobility_grid_layout.txt", true);

  auto plot = read_csv_body(fs::path(out) / "mobility_occupation_p25_plot.csv");
  std::string header;
  for (std::size_t c = 0; c < plot[0].size(); ++c) header += (c ? "," : "") + plot[0][c];
  std::string want = slurp(golden / "mobility_plot_header.txt");
  if (!want.empty() && want.back() == '\n') want.pop_back();
  require(header == want, "plot header '" + header + "'");
  for (std::size_t r = 1; r < plot.size(); ++r)
    require(plot[r].size() == 6 && std::stoul(plot[r][5]) > 0, "plot row malformed");
}

}  // namespace

int main() {
  fs::remove_all(kWork);
  struct Item {
    int number;
    const char* label;
    std::function<void()> fn;
  };
  std::vector<Item> items = {
      {1, "planted-slope recovery (pipeline, <30s)", criterion_1},
      {2, "perfect-mobility null", criterion_2},
      {3, "bootstrap coverage (<10min)", criterion_3},
      {4, "scaling-loop correctness and determinism", criterion_4},
      {5, "rank machinery vs quadratic oracles", criterion_5},
      {6, "transition matrices", criterion_6},
      {7, "monotone-transform invariance", criterion_7},
      {8, "recoding conformance", criterion_8},
      {9, "output layout conformance", criterion_9},
  };
  int failures = 0;
  for (auto& item : items) {
    try {
      item.fn();
      std::cout << "[PASS] criterion " << item.number << ": " << item.label << "\n";
    } catch (const std::exception& e) {
      ++failures;
      std::cout << "[FAIL] criterion " << item.number << ": " << item.label << " — "
                << e.what() << "\n";
    }
  }
  return failures == 0 ? 0 : 1;
}
