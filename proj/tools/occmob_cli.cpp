// occmob command line front end: ingest | sei | mobility | transitions |
// synth | pipeline, driven by a declarative JSON config.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "occmob/ingest.hpp"
#include "occmob/mobility.hpp"
#include "occmob/sei.hpp"
#include "occmob/synth.hpp"
#include "occmob/transitions.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace occmob;

namespace {

constexpr const char* kVersion = "0.1.0";

struct RunConfig {
  std::vector<ingest::SurveySource> surveys;
  std::string catalogue_path;
  std::string recode_path;
  CohortScheme scheme;
  std::string scheme_name = "base";
  ingest::PairConfig pair_config;
  sei::SeiConfig sei_config;
  mobility::BootstrapConfig bootstrap;
  mobility::EstimateConfig estimate;
  std::vector<mobility::Dimension> dimensions;
  std::vector<mobility::Estimator> estimators;
  std::string out_dir = "out";
  std::string config_hash;
};

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

CohortScheme scheme_from_json(const json& j) {
  if (j.is_string()) {
    std::string name = j.get<std::string>();
    if (name == "base") return CohortScheme::base();
    if (name == "shifted") return CohortScheme::shifted(4);
    throw ConfigError("unknown scheme '" + name + "'");
  }
  CohortScheme s;
  for (const auto& c : j.at("cohorts")) {
    Cohort cohort;
    cohort.id = c.at("id").get<std::string>();
    cohort.start_year = c.at("start").get<int>();
    cohort.end_year = c.at("end").get<int>();
    cohort.sei_source = parse_dataset(c.value("dataset", "IHDS2"));
    s.cohorts.push_back(std::move(cohort));
  }
  s.shift_years = j.value("shift_years", 0);
  s.validate();
  return s;
}

RunConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_override,
                      const std::string& out_override, const std::string& scheme_override,
                      const std::string& dimension_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }

  RunConfig cfg;
  try {
    for (const auto& s : j.at("inputs").at("surveys")) {
      ingest::SurveySource src;
      src.path = s.at("path").get<std::string>();
      src.dataset = parse_dataset(s.value("dataset", "IHDS2"));
      if (s.contains("columns"))
        for (const auto& [k, v] : s["columns"].items())
          src.columns.names[k] = v.get<std::string>();
      cfg.surveys.push_back(std::move(src));
    }
    cfg.catalogue_path = j.at("inputs").at("catalogue").get<std::string>();
    cfg.recode_path = j.at("inputs").at("education_recode").get<std::string>();

    json scheme_json = j.value("scheme", json("base"));
    if (!scheme_override.empty()) scheme_json = json(scheme_override);
    cfg.scheme = scheme_from_json(scheme_json);
    cfg.scheme_name = scheme_json.is_string() ? scheme_json.get<std::string>() : "custom";

    if (j.contains("working_age")) {
      cfg.pair_config.working_age_min = j["working_age"].at(0).get<int>();
      cfg.pair_config.working_age_max = j["working_age"].at(1).get<int>();
    }
    if (j.contains("survey_years"))
      for (const auto& [k, v] : j["survey_years"].items())
        cfg.pair_config.survey_years[parse_dataset(k)] = v.get<int>();

    if (j.contains("sei")) {
      const auto& s = j["sei"];
      cfg.sei_config.tol = s.value("tol", cfg.sei_config.tol);
      cfg.sei_config.max_iters = s.value("max_iters", cfg.sei_config.max_iters);
      cfg.sei_config.min_cell_size = s.value("min_cell_size", cfg.sei_config.min_cell_size);
      cfg.sei_config.weighted = s.value("weighted", false);
      cfg.sei_config.log_income = s.value("log_income", false);
    }
    if (j.contains("bootstrap")) {
      const auto& b = j["bootstrap"];
      cfg.bootstrap.resample_count = b.value("resamples", std::size_t{0});
      cfg.bootstrap.resample_size = b.value("size", std::size_t{0});
      cfg.bootstrap.confidence_level = b.value("level", 0.95);
      cfg.bootstrap.seed = b.value("seed", std::uint64_t{42});
    }
    cfg.estimate.min_pairs = j.value("min_pairs", std::size_t{10});

    for (const auto& d : j.value("dimensions", json::array({"occupation"})))
      cfg.dimensions.push_back(mobility::parse_dimension(d.get<std::string>()));
    if (!dimension_override.empty()) {
      cfg.dimensions = {mobility::parse_dimension(dimension_override)};
    }
    for (const auto& e : j.value("estimators",
                                 json::array({"p25", "p75", "interval-bottom", "interval-top"})))
      cfg.estimators.push_back(mobility::parse_estimator(e.get<std::string>()));

    cfg.out_dir = j.value("out", std::string("out"));
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }

  if (seed_override) cfg.bootstrap.seed = *seed_override;
  if (!out_override.empty()) cfg.out_dir = out_override;
  cfg.config_hash = hex64(fnv1a(buf.str()));
  return cfg;
}

std::string provenance(const RunConfig& cfg) {
  return std::string("occmob v") + kVersion + " config=" + cfg.config_hash +
         " seed=" + std::to_string(cfg.bootstrap.seed);
}

struct LoadedInputs {
  OccupationCatalogue catalogue;
  ingest::EducationRecoder recoder;
  std::vector<IndividualRecord> records;
  ingest::ExclusionReport rejected;
  std::size_t parsed = 0;
};

LoadedInputs load_inputs(const RunConfig& cfg) {
  LoadedInputs li;
  li.catalogue = OccupationCatalogue::load_csv(cfg.catalogue_path);
  li.recoder = ingest::EducationRecoder::load_csv(cfg.recode_path);
  for (const auto& src : cfg.surveys) {
    if (!fs::exists(src.path)) throw ConfigError("input file not found: " + src.path);
    auto r = ingest::load_survey(src, li.recoder, li.catalogue);
    li.parsed += r.parsed_rows;
    for (auto& rec : r.records) li.records.push_back(std::move(rec));
    for (const auto& [reason, n] : r.rejected.reasons) li.rejected.reasons[reason] += n;
  }
  return li;
}

int run_ingest(const RunConfig& cfg) {
  auto li = load_inputs(cfg);
  auto pr = ingest::build_pairs(li.records, cfg.scheme, li.catalogue, li.recoder,
                                cfg.pair_config);
  fs::create_directories(cfg.out_dir);
  ingest::write_pairs(cfg.out_dir + "/pairs.csv", pr.pairs, provenance(cfg));

  json report;
  report["parsed_rows"] = li.parsed;
  report["accepted_records"] = li.records.size();
  report["rejected_records"] = li.rejected.reasons;
  report["pair_candidates"] = pr.candidates;
  report["pairs"] = pr.pairs.size();
  report["pair_exclusions"] = pr.excluded.reasons;
  std::ofstream rep(cfg.out_dir + "/exclusions.json");
  rep << "// " << provenance(cfg) << "\n" << report.dump(2) << "\n";

  std::ofstream ct(cfg.out_dir + "/crosstab.csv");
  ct << "# " << provenance(cfg) << "\n" << ingest::render_crosstab(pr, cfg.scheme);
  std::cerr << "ingest: " << pr.pairs.size() << " pairs, " << pr.excluded.total()
            << " excluded\n";
  return 0;
}

std::vector<sei::SeiTable> compute_sei_tables(const RunConfig& cfg, const LoadedInputs& li) {
  std::vector<sei::SeiTable> tables;
  for (const auto& cohort : cfg.scheme.cohorts) {
    std::vector<sei::HeadObservation> heads;
    int survey_year = cfg.pair_config.survey_years.at(cohort.sei_source);
    for (const auto& r : li.records) {
      if (!r.is_household_head || !r.income_proxy) continue;
      if (r.dataset != cohort.sei_source) continue;
      if (r.birth_year < cohort.start_year || r.birth_year > cohort.end_year) continue;
      heads.push_back({static_cast<double>(survey_year - r.birth_year),
                       static_cast<double>(r.education_years), *r.income_proxy,
                       r.occupation_code, r.sample_weight});
    }
    if (heads.empty()) {
      std::cerr << "sei: no heads for cohort " << cohort.id << ", skipping\n";
      continue;
    }
    tables.push_back(sei::estimate_sei(heads, cohort.id, li.catalogue, cfg.sei_config));
  }
  if (tables.empty()) throw DataError("no cohort produced an SEI table");
  return tables;
}

int run_sei(const RunConfig& cfg) {
  auto li = load_inputs(cfg);
  auto tables = compute_sei_tables(cfg, li);
  fs::create_directories(cfg.out_dir);
  for (const auto& t : tables)
    sei::write_sei_table(cfg.out_dir + "/sei_" + t.cohort + ".csv", t, provenance(cfg));
  sei::write_coefficients(cfg.out_dir + "/sei_coefficients.csv", tables, provenance(cfg));
  sei::write_stability(cfg.out_dir + "/sei_stability.csv", sei::cohort_stability(tables),
                       provenance(cfg));
  auto averaged = sei::average_across_cohorts(tables);
  {
    std::ofstream out(cfg.out_dir + "/sei_averaged.csv");
    out << "# " << provenance(cfg) << "\n"
        << "occupation_code,avg_rescaled_sei\n";
    char buf[32];
    for (const auto& [code, v] : averaged.scores) {
      std::snprintf(buf, sizeof buf, "%.10g", v);
      out << code << "," << buf << "\n";
    }
  }
  std::cerr << "sei: " << tables.size() << " cohort tables\n";
  return 0;
}

int run_mobility(const RunConfig& cfg) {
  auto li = load_inputs(cfg);
  auto pr = ingest::build_pairs(li.records, cfg.scheme, li.catalogue, li.recoder,
                                cfg.pair_config);

  std::vector<sei::SeiTable> tables;
  bool needs_sei = false;
  for (auto d : cfg.dimensions)
    if (d != mobility::Dimension::EducationYears) needs_sei = true;
  if (needs_sei) tables = compute_sei_tables(cfg, li);

  std::vector<mobility::MobilityEstimate> estimates;
  for (auto dim : cfg.dimensions) {
    mobility::StatusResolver resolver = mobility::StatusResolver::education();
    if (dim == mobility::Dimension::OccupationSei)
      resolver = mobility::StatusResolver::from_tables(tables);
    else if (dim == mobility::Dimension::OccupationSeiConstant)
      resolver = mobility::StatusResolver::from_constant(sei::average_across_cohorts(tables));

    auto ranked = mobility::rank_pairs(pr.pairs, resolver);
    std::map<std::pair<SocialGroup, CohortId>, std::vector<mobility::RankedPair>> cells;
    for (const auto& rp : ranked.ranked) cells[{rp.group, rp.cohort}].push_back(rp);

    for (const auto& [key, cell] : cells) {
      for (auto estr : cfg.estimators) {
        try {
          auto est = mobility::bootstrap_ci(cell, estr, cfg.bootstrap, cfg.estimate);
          est.dimension = dim;
          estimates.push_back(est);
        } catch (const NumericError&) {
          // cell below the pair floor or degenerate: rendered as absent
        }
      }
    }
  }
  mobility::mobility_report(estimates, cfg.scheme, cfg.out_dir, provenance(cfg));
  std::cerr << "mobility: " << estimates.size() << " estimates\n";
  return 0;
}

int run_transitions(const RunConfig& cfg) {
  auto li = load_inputs(cfg);
  auto pr = ingest::build_pairs(li.records, cfg.scheme, li.catalogue, li.recoder,
                                cfg.pair_config);
  fs::create_directories(cfg.out_dir);

  auto emit = [&](std::optional<SocialGroup> g) {
    auto m = transitions::transition_matrix(pr.pairs, li.catalogue, g);
    std::string tag = g ? to_string(*g) : "ALL";
    transitions::write_matrix_csv(cfg.out_dir + "/stm_" + tag + ".csv", m, provenance(cfg));
    std::ofstream txt(cfg.out_dir + "/stm_" + tag + ".txt");
    txt << "# " << provenance(cfg) << "\n" << transitions::render_matrix(m);
  };
  emit(std::nullopt);
  for (int g = 0; g < kNumSocialGroups; ++g) emit(static_cast<SocialGroup>(g));
  std::cerr << "transitions: written\n";
  return 0;
}

int run_synth(const std::string& spec_path, const std::string& out_path) {
  auto spec = synth::SynthSpec::from_json_file(spec_path);
  auto gen = synth::generate(spec);
  std::ifstream in(spec_path);
  std::stringstream buf;
  buf << in.rdbuf();
  synth::write_survey(out_path, gen.records,
                      std::string("occmob v") + kVersion + " config=" + hex64(fnv1a(buf.str())) +
                          " seed=" + std::to_string(spec.seed));
  std::cerr << "synth: " << gen.records.size() << " records -> " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Intergenerational occupational mobility estimation"};
  app.require_subcommand(1);

  std::string config_path, out_override, scheme_override, dimension_override;
  std::optional<std::uint64_t> seed_override;
  std::uint64_t seed_value = 0;
  bool seed_set = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON run config")->required();
    cmd->add_option("--out", out_override, "output directory (overrides config)");
    cmd->add_option("--scheme", scheme_override, "cohort scheme: base|shifted");
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t v) { seed_value = v; seed_set = true; },
        "bootstrap seed (overrides config)");
    return cmd;
  };

  auto* c_ingest = add_common(app.add_subcommand("ingest", "build pair file + exclusions"));
  auto* c_sei = add_common(app.add_subcommand("sei", "SEI tables + coefficients"));
  auto* c_mob = add_common(app.add_subcommand("mobility", "mobility estimates + plot data"));
  c_mob->add_option("--dimension", dimension_override,
                    "occupation|occupation-constant|education");
  auto* c_trans = add_common(app.add_subcommand("transitions", "transition matrices"));
  auto* c_pipe = add_common(app.add_subcommand("pipeline", "all stages in order"));
  c_pipe->add_option("--dimension", dimension_override,
                     "occupation|occupation-constant|education");

  auto* c_synth = app.add_subcommand("synth", "generate synthetic survey");
  std::string spec_path, synth_out = "survey.csv";
  c_synth->add_option("--spec", spec_path, "synth spec JSON")->required();
  c_synth->add_option("--out", synth_out, "output survey file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_synth->parsed()) return run_synth(spec_path, synth_out);
    if (seed_set) seed_override = seed_value;
    RunConfig cfg = load_config(config_path, seed_override, out_override, scheme_override,
                                dimension_override);
    if (c_ingest->parsed()) return run_ingest(cfg);
    if (c_sei->parsed()) return run_sei(cfg);
    if (c_mob->parsed()) return run_mobility(cfg);
    if (c_trans->parsed()) return run_transitions(cfg);
    if (c_pipe->parsed()) {
      int rc = run_ingest(cfg);
      if (!rc) rc = run_sei(cfg);
      if (!rc) rc = run_mobility(cfg);
      if (!rc) rc = run_transitions(cfg);
      return rc;
    }
  } catch (const occmob::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const occmob::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const occmob::NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
