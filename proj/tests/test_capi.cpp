#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

#include "doctest.h"
#include "json.hpp"
#include "retraction/retraction.h"

namespace fs = std::filesystem;

namespace {

const std::string kData = RTX_TEST_DATA;

struct Scratch {
  fs::path dir;
  Scratch() : dir(fs::temp_directory_path() / ("rtx_capi_" + std::to_string(::getpid()))) {
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string operator()(const std::string& name) const { return (dir / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("status names and error reporting") {
  CHECK(std::string(rtx_status_name(RTX_OK)) == "Ok");
  CHECK(std::string(rtx_status_name(RTX_E_FILE_NOT_FOUND)) == "FileNotFound");
  CHECK(std::string(rtx_status_name(RTX_E_OUT_OF_RANGE_P)) == "OutOfRangeP");
  CHECK(std::strlen(rtx_version()) > 0);

  rtx_corpus* c = nullptr;
  CHECK(rtx_corpus_load((kData + "/missing.csv").c_str(), &c) == RTX_E_FILE_NOT_FOUND);
  CHECK(c == nullptr);
  CHECK(std::string(rtx_last_error()).find("missing.csv") != std::string::npos);
  CHECK(rtx_corpus_load(nullptr, &c) == RTX_E_INVALID_ARGUMENT);
  CHECK(rtx_corpus_load((kData + "/missing_columns.csv").c_str(), &c) == RTX_E_SCHEMA_VIOLATION);

  rtx_corpus_free(nullptr);
  rtx_sweep_free(nullptr);
  rtx_link_free(nullptr);
  rtx_matching_free(nullptr);
  rtx_outcomes_free(nullptr);
  rtx_attention_free(nullptr);
  rtx_mentions_free(nullptr);
  rtx_string_free(nullptr);
}

TEST_CASE("simulation through the C surface") {
  Scratch tmp;
  rtx_sim_params p;
  rtx_sim_params_default(&p);
  CHECK(p.n_agents == 100);
  CHECK(p.share_window == 200);
  CHECK(rtx_sim_params_set_topology(&p, "ring:2") == RTX_OK);
  CHECK(p.topology == RTX_TOPOLOGY_RING);
  CHECK(rtx_sim_params_set_topology(&p, "hypercube") == RTX_E_INVALID_TOPOLOGY_PARAM);
  CHECK(rtx_sim_params_set_topology(&p, "complete") == RTX_OK);

  p.n_agents = 30;
  p.max_steps = 200;
  p.retraction_delay = 10;
  int counts[3];
  REQUIRE(rtx_simulate(&p, tmp("trace.csv").c_str(), counts) == RTX_OK);
  CHECK(counts[0] + counts[1] + counts[2] == 30);
  const auto trace = slurp(tmp("trace.csv"));
  CHECK(trace.rfind("step,neutral,false,retracted\n", 0) == 0);
  int again[3];
  REQUIRE(rtx_simulate(&p, tmp("trace2.csv").c_str(), again) == RTX_OK);
  CHECK(std::memcmp(counts, again, sizeof counts) == 0);
  CHECK(slurp(tmp("trace2.csv")) == trace);

  p.retraction_delay = p.max_steps + 1;
  CHECK(rtx_simulate(&p, nullptr, counts) == RTX_E_INVALID_ARGUMENT);
  p.retraction_delay = 0;

  p.n_replicates = 20;
  const int delays[] = {0, 20, 60};
  rtx_sweep *s1 = nullptr, *s4 = nullptr;
  REQUIRE(rtx_sweep_run(&p, delays, 3, 1, &s1) == RTX_OK);
  REQUIRE(rtx_sweep_run(&p, delays, 3, 4, &s4) == RTX_OK);
  CHECK(rtx_sweep_delay_count(s1) == 3);
  for (size_t d = 0; d < 3; ++d) {
    rtx_delay_summary a, b;
    REQUIRE(rtx_sweep_summary(s1, d, &a) == RTX_OK);
    REQUIRE(rtx_sweep_summary(s4, d, &b) == RTX_OK);
    CHECK(a.delay == delays[d]);
    CHECK(a.mean_retracted == b.mean_retracted);
    CHECK(a.sd_retracted == b.sd_retracted);
    CHECK(a.mean_false == b.mean_false);
    CHECK(a.sd_neutral == b.sd_neutral);
    CHECK(a.mean_neutral + a.mean_false + a.mean_retracted == doctest::Approx(1.0));
  }
  int rep[3];
  CHECK(rtx_sweep_replicate(s1, 0, 19, rep) == RTX_OK);
  CHECK(rtx_sweep_replicate(s1, 0, 20, rep) == RTX_E_INVALID_ARGUMENT);
  CHECK(rtx_sweep_replicate(s1, 3, 0, rep) == RTX_E_INVALID_ARGUMENT);
  REQUIRE(rtx_sweep_write_summary_csv(s1, tmp("s1.csv").c_str()) == RTX_OK);
  REQUIRE(rtx_sweep_write_summary_csv(s4, tmp("s4.csv").c_str()) == RTX_OK);
  CHECK(slurp(tmp("s1.csv")) == slurp(tmp("s4.csv")));
  rtx_sweep_free(s1);
  rtx_sweep_free(s4);

  CHECK(rtx_sweep_run(&p, delays, 0, 1, &s1) == RTX_E_INVALID_ARGUMENT);
}

TEST_CASE("corpus handles") {
  Scratch tmp;
  rtx_corpus* c = nullptr;
  REQUIRE(rtx_corpus_load((kData + "/bad_rows.csv").c_str(), &c) == RTX_OK);
  CHECK(rtx_corpus_size(c) == 1);
  CHECK(rtx_corpus_violation_count(c) == 5);
  CHECK(std::string(rtx_corpus_violation(c, 0)).find("row 1") != std::string::npos);
  CHECK(rtx_corpus_violation(c, 99) == nullptr);
  rtx_corpus_free(c);

  REQUIRE(rtx_corpus_load((kData + "/corpus3.jsonl").c_str(), &c) == RTX_OK);
  CHECK(rtx_corpus_size(c) == 3);
  CHECK(rtx_corpus_retracted_count(c) == 2);
  size_t removed = 99;
  CHECK(rtx_corpus_filter_bulk(c, 0, &removed) == RTX_OK);
  CHECK(removed == 2);
  CHECK(rtx_corpus_size(c) == 1);
  CHECK(rtx_corpus_write_csv(c, tmp("one.csv").c_str()) == RTX_OK);
  rtx_corpus_free(c);

  rtx_mentions* m = nullptr;
  REQUIRE(rtx_mentions_load((kData + "/mentions.csv").c_str(), &m) == RTX_OK);
  CHECK(rtx_mentions_size(m) == 2);
  CHECK(rtx_mentions_violation_count(m) == 3);
  rtx_mentions_free(m);
}

TEST_CASE("linkage helpers") {
  size_t d = 0;
  CHECK(rtx_levenshtein("The cowbell", "The cow-bell", &d) == RTX_OK);
  CHECK(d == 1);
  char* norm = nullptr;
  REQUIRE(rtx_normalize_title("  Déjà   Vu! ", &norm) == RTX_OK);
  CHECK(std::string(norm) == "deja vu");
  rtx_string_free(norm);
  double sim = 0;
  CHECK(rtx_title_similarity("The cowbell", "The cow-bell", &sim) == RTX_OK);
  CHECK(sim == 1.0);
  CHECK(rtx_levenshtein(nullptr, "x", &d) == RTX_E_INVALID_ARGUMENT);
}

TEST_CASE("statistics helpers") {
  const double a[] = {2.1, 3.4, 1.9, 4.4, 2.8};
  const double b[] = {3.9, 5.2, 4.1, 6.3, 4.8};
  rtx_test_result r;
  REQUIRE(rtx_welch_t(a, 5, b, 5, &r) == RTX_OK);
  CHECK(r.statistic == doctest::Approx(-3.098551340249708).epsilon(1e-12));
  CHECK(r.p_value == doctest::Approx(0.014758939057242217).epsilon(1e-9));
  CHECK(std::isnan(r.df2));

  const double g1[] = {1, 2}, g2[] = {3, 4}, g3[] = {5, 6};
  const double* groups[] = {g1, g2, g3};
  const size_t sizes[] = {2, 2, 2};
  REQUIRE(rtx_kruskal_wallis(groups, sizes, 3, &r) == RTX_OK);
  CHECK(r.statistic == doctest::Approx(32.0 / 7.0));
  CHECK(r.warning == 0);
  REQUIRE(rtx_welch_anova(groups, sizes, 3, &r) == RTX_OK);
  CHECK(r.df1 == 2.0);
  CHECK_FALSE(std::isnan(r.df2));

  const double one[] = {1.0};
  CHECK(rtx_welch_t(one, 1, b, 5, &r) == RTX_E_DEGENERATE_GROUP);

  const double p[] = {0.01, 0.04, 0.03};
  double adj[3];
  REQUIRE(rtx_holm_adjust(p, 3, adj) == RTX_OK);
  CHECK(adj[0] == doctest::Approx(0.03));
  CHECK(adj[1] == doctest::Approx(0.06));
  CHECK(adj[2] == doctest::Approx(0.06));
  const double bad[] = {1.5};
  CHECK(rtx_holm_adjust(bad, 1, adj) == RTX_E_OUT_OF_RANGE_P);
  CHECK(rtx_normal_cdf(0.0) == 0.5);
}

TEST_CASE("synthetic pipeline end to end") {
  Scratch tmp;
  rtx_synth_config cfg;
  rtx_synth_config_default(&cfg);
  cfg.n_retracted = 600;
  cfg.rng_seed = 17;
  cfg.tier_penalties[0] = 1.0;
  cfg.tier_penalties[1] = 0.8;
  cfg.tier_penalties[2] = 0.5;
  cfg.tier_penalties[3] = 0.2;
  REQUIRE(rtx_synth_write(&cfg, tmp("corpus.csv").c_str(), tmp("mentions.csv").c_str(),
                          tmp("truth.json").c_str()) == RTX_OK);
  const auto truth = nlohmann::json::parse(slurp(tmp("truth.json")));
  CHECK(truth["config"]["n_retracted"] == 600);

  char digest[65];
  REQUIRE(rtx_sha256_file(tmp("corpus.csv").c_str(), digest) == RTX_OK);
  CHECK(std::strlen(digest) == 64);
  REQUIRE(rtx_synth_write(&cfg, tmp("corpus2.csv").c_str(), tmp("mentions2.csv").c_str(),
                          tmp("truth2.json").c_str()) == RTX_OK);
  char digest2[65];
  REQUIRE(rtx_sha256_file(tmp("corpus2.csv").c_str(), digest2) == RTX_OK);
  CHECK(std::string(digest) == std::string(digest2));

  rtx_corpus* corpus = nullptr;
  REQUIRE(rtx_corpus_load(tmp("corpus.csv").c_str(), &corpus) == RTX_OK);
  CHECK(rtx_corpus_retracted_count(corpus) == 600);

  rtx_matching* m = nullptr;
  REQUIRE(rtx_matching_run(corpus, 1990, 2015, 2, &m) == RTX_OK);
  CHECK(rtx_matching_matched_count(m) == 600);
  CHECK(rtx_matching_unmatched_count(m) == 0);
  REQUIRE(rtx_matching_write_csv(m, tmp("matched.csv").c_str()) == RTX_OK);

  rtx_matching* reloaded = nullptr;
  REQUIRE(rtx_matching_load_csv(corpus, tmp("matched.csv").c_str(), &reloaded) == RTX_OK);
  CHECK(rtx_matching_matched_count(reloaded) == 600);
  rtx_matching_free(reloaded);

  rtx_outcome_options opts;
  rtx_outcome_options_default(&opts);
  CHECK(opts.epsilon == 1e-5);
  CHECK(opts.horizon_years == 5);
  rtx_outcomes* out = nullptr;
  REQUIRE(rtx_outcomes_compute(m, &opts, &out) == RTX_OK);
  CHECK(rtx_outcomes_count(out) == 600);
  REQUIRE(rtx_outcomes_tier_count(out) == 4);
  double medians[4];
  for (size_t t = 0; t < 4; ++t) {
    rtx_tier_summary s;
    REQUIRE(rtx_outcomes_tier_summary(out, t, &s) == RTX_OK);
    REQUIRE(s.has_values);
    medians[t] = s.outcome2_median;
  }
  CHECK(medians[1] > medians[2]);
  CHECK(medians[2] > medians[3]);
  rtx_outcome_row row;
  REQUIRE(rtx_outcomes_row(out, 0, &row) == RTX_OK);
  CHECK(row.n_controls == 5);
  REQUIRE(rtx_outcomes_write_csv(out, tmp("outcomes.csv").c_str()) == RTX_OK);

  char* json = nullptr;
  REQUIRE(rtx_stats_report(tmp("outcomes.csv").c_str(),
                           RTX_REPORT_OUTCOME1 | RTX_REPORT_OUTCOME2 | RTX_REPORT_MEAN_TESTS |
                               RTX_REPORT_RANK_TESTS,
                           &json) == RTX_OK);
  const auto report = nlohmann::json::parse(json);
  rtx_string_free(json);
  CHECK(report["n_rows"] == 600);
  for (const char* o : {"outcome1", "outcome2"}) {
    const auto& tests = report["outcomes"][o]["tests"];
    REQUIRE(tests.size() == 2);
    for (const auto& t : tests) CHECK(t["p"].get<double>() < 0.01);
  }

  const int64_t cuts[] = {5};
  opts.tier_boundaries = cuts;
  opts.n_tier_boundaries = 1;
  rtx_outcomes* two = nullptr;
  REQUIRE(rtx_outcomes_compute(m, &opts, &two) == RTX_OK);
  CHECK(rtx_outcomes_tier_count(two) == 2);
  rtx_outcomes_free(two);
  const int64_t bad_cuts[] = {5, 5};
  opts.tier_boundaries = bad_cuts;
  opts.n_tier_boundaries = 2;
  CHECK(rtx_outcomes_compute(m, &opts, &two) == RTX_E_INVALID_ARGUMENT);

  rtx_mentions* mentions = nullptr;
  REQUIRE(rtx_mentions_load(tmp("mentions.csv").c_str(), &mentions) == RTX_OK);
  rtx_attention_options aopt;
  rtx_attention_options_default(&aopt);
  CHECK(aopt.window_first_offset == -6);
  CHECK(aopt.window_last_offset == 5);
  rtx_attention* att = nullptr;
  REQUIRE(rtx_attention_run(corpus, mentions, &aopt, &att) == RTX_OK);
  CHECK(rtx_attention_row_count(att) == 600);
  rtx_coefficient coef;
  REQUIRE(rtx_attention_coefficient(att, 1, "pre_citations", &coef) == RTX_OK);
  CHECK(std::abs(coef.estimate - 0.2) < 4 * coef.std_error);
  CHECK(rtx_attention_coefficient(att, 1, "no_such_column", &coef) == RTX_E_INVALID_ARGUMENT);
  CHECK(rtx_attention_write_series_csv(att, tmp("series.csv").c_str()) == RTX_OK);

  rtx_attention_free(att);
  rtx_mentions_free(mentions);
  rtx_outcomes_free(out);
  rtx_matching_free(m);

  // linking the corpus against itself pairs every record by DOI
  rtx_link* link = nullptr;
  REQUIRE(rtx_link_run(corpus, corpus, 0.9, 2, &link) == RTX_OK);
  CHECK(rtx_link_pair_count(link) == rtx_corpus_size(corpus));
  rtx_link_pair pair;
  REQUIRE(rtx_link_pair_at(link, 0, &pair) == RTX_OK);
  CHECK(pair.fuzzy == 0);
  CHECK(std::string(pair.left_id) == pair.right_id);
  CHECK(rtx_link_unmatched_left_count(link) == 0);
  rtx_link_free(link);
  rtx_corpus_free(corpus);

  cfg.n_retracted = 0;
  CHECK(rtx_synth_write(&cfg, tmp("x.csv").c_str(), tmp("y.csv").c_str(), tmp("z.json").c_str()) ==
        RTX_E_INVALID_CONFIG);
}
