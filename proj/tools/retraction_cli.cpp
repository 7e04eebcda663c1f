// Command-line front end. Talks to the library only through retraction.h.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "retraction/retraction.h"

namespace fs = std::filesystem;

namespace {

struct RuntimeFailure {
  std::string message;
};

void check(rtx_status status) {
  if (status == RTX_OK) return;
  std::string msg = rtx_last_error();
  const std::string name = rtx_status_name(status);
  if (msg.rfind(name, 0) != 0) msg = name + ": " + msg;
  throw RuntimeFailure{msg};
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
template <class T, void (*Free)(T*)>
using Handle = std::unique_ptr<T, Deleter<T, Free>>;

using Corpus = Handle<rtx_corpus, rtx_corpus_free>;
using Mentions = Handle<rtx_mentions, rtx_mentions_free>;
using Sweep = Handle<rtx_sweep, rtx_sweep_free>;
using Link = Handle<rtx_link, rtx_link_free>;
using Matching = Handle<rtx_matching, rtx_matching_free>;
using Outcomes = Handle<rtx_outcomes, rtx_outcomes_free>;
using Attention = Handle<rtx_attention, rtx_attention_free>;

struct OwnedString {
  char* p = nullptr;
  ~OwnedString() { rtx_string_free(p); }
};

struct Globals {
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out_dir = ".";
};

// Tracks files read and written so the manifest can hash them.
class Run {
 public:
  explicit Run(const Globals& g) : out_dir_(g.out_dir) {}

  const std::string& input(const std::string& path) {
    inputs_.push_back(path);
    return path;
  }

  std::string output(const std::string& name) {
    fs::create_directories(out_dir_);
    outputs_.push_back(name);
    return (fs::path(out_dir_) / name).string();
  }

  void note(const std::string& key, nlohmann::json value) { notes_[key] = std::move(value); }

  void write_manifest(const CLI::App& app, const CLI::App& sub) const;

 private:
  std::string out_dir_;
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
  nlohmann::json notes_ = nlohmann::json::object();
};

std::string hash_of(const std::string& path) {
  char hex[65];
  check(rtx_sha256_file(path.c_str(), hex));
  return hex;
}

nlohmann::json options_json(const CLI::App& app) {
  nlohmann::json j = nlohmann::json::object();
  for (const CLI::Option* opt : app.get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || opt->get_configurable() == false) continue;
    const auto& results = opt->results();
    std::string value;
    if (results.empty()) {
      value = opt->get_default_str();
    } else {
      for (std::size_t i = 0; i < results.size(); ++i) value += (i ? "," : "") + results[i];
    }
    j[name] = value;
  }
  return j;
}

void Run::write_manifest(const CLI::App& app, const CLI::App& sub) const {
  nlohmann::json m;
  m["tool"] = "retraction";
  m["version"] = rtx_version();
  m["subcommand"] = sub.get_name();
  m["global"] = options_json(app);
  m["options"] = options_json(sub);
  nlohmann::json ins = nlohmann::json::array();
  for (const auto& p : inputs_) ins.push_back({{"path", p}, {"sha256", hash_of(p)}});
  m["inputs"] = ins;
  nlohmann::json outs = nlohmann::json::array();
  for (const auto& name : outputs_)
    outs.push_back({{"path", name}, {"sha256", hash_of((fs::path(out_dir_) / name).string())}});
  m["outputs"] = outs;
  if (!notes_.empty()) m["notes"] = notes_;
  std::ofstream out(fs::path(out_dir_) / "manifest.json", std::ios::binary);
  out << m.dump(2) << "\n";
  if (!out) throw RuntimeFailure{"Io: cannot write manifest.json"};
}

Corpus load_corpus(Run& run, const std::string& path) {
  rtx_corpus* raw = nullptr;
  check(rtx_corpus_load(run.input(path).c_str(), &raw));
  Corpus corpus(raw);
  for (std::size_t i = 0; i < rtx_corpus_violation_count(raw); ++i)
    std::cerr << "warning: " << rtx_corpus_violation(raw, i) << "\n";
  return corpus;
}

// ---- simulate / sweep ---------------------------------------------------

struct SimOptions {
  int n_agents = 100;
  std::string topology = "complete";
  int share_window = 200;
  int max_steps = 1000;
  int reps = 1;
  double transmission_prob = 1.0;
};

void add_sim_options(CLI::App* sub, SimOptions& o) {
  sub->add_option("--n", o.n_agents, "number of agents")->check(CLI::PositiveNumber);
  sub->add_option("--topology", o.topology, "complete | ring:K | erdos-renyi:P");
  sub->add_option("--share-window", o.share_window, "steps an agent shares a new message")
      ->check(CLI::PositiveNumber);
  sub->add_option("--max-steps", o.max_steps, "step budget per run")->check(CLI::PositiveNumber);
  sub->add_option("--reps", o.reps, "replicates per delay")->check(CLI::PositiveNumber);
  sub->add_option("--transmission-prob", o.transmission_prob, "per-contact adoption probability")
      ->check(CLI::Range(0.0, 1.0));
}

rtx_sim_params sim_params(const SimOptions& o, const Globals& g) {
  rtx_sim_params p;
  rtx_sim_params_default(&p);
  p.n_agents = o.n_agents;
  check(rtx_sim_params_set_topology(&p, o.topology.c_str()));
  p.share_window = o.share_window;
  p.max_steps = o.max_steps;
  p.n_replicates = o.reps;
  p.rng_seed = g.seed;
  p.transmission_prob = o.transmission_prob;
  return p;
}

void write_sweep(Run& run, const rtx_sweep* sweep) {
  check(rtx_sweep_write_replicates_csv(sweep, run.output("replicates.csv").c_str()));
  check(rtx_sweep_write_summary_csv(sweep, run.output("summary.csv").c_str()));
  for (std::size_t d = 0; d < rtx_sweep_delay_count(sweep); ++d) {
    rtx_delay_summary s;
    check(rtx_sweep_summary(sweep, d, &s));
    std::cout << "delay " << s.delay << ": retracted " << s.mean_retracted << " (sd " << s.sd_retracted
              << "), false " << s.mean_false << " (sd " << s.sd_false << ")\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Retraction dynamics simulator and citation-impact analysis pipeline", "retraction"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file with option values (flags take precedence)");

  Globals g;
  app.add_option("--seed", g.seed, "base random seed");
  app.add_option("--threads", g.threads, "worker threads (0 = all cores)");
  app.add_option("--out-dir", g.out_dir, "directory for outputs and manifest.json");

  // simulate
  SimOptions sim_opts;
  int sim_delay = 0;
  auto* simulate = app.add_subcommand("simulate", "run one delay setting and record a trace");
  add_sim_options(simulate, sim_opts);
  simulate->add_option("--delay", sim_delay, "retraction delay in steps")->check(CLI::NonNegativeNumber);

  // sweep
  SimOptions sweep_opts;
  std::vector<int> delays;
  auto* sweep = app.add_subcommand("sweep", "replicated runs over a grid of retraction delays");
  add_sim_options(sweep, sweep_opts);
  sweep->add_option("--delays", delays, "comma-separated delay grid")->required()->delimiter(',');

  // link
  std::string link_left, link_right;
  double link_threshold = 0.9;
  auto* link = app.add_subcommand("link", "merge two corpora by DOI, then fuzzy title");
  link->add_option("--left", link_left, "left corpus file")->required();
  link->add_option("--right", link_right, "right corpus file")->required();
  link->add_option("--threshold", link_threshold, "minimum title similarity")->check(CLI::Range(0.0, 1.0));

  // match
  std::string match_corpus;
  std::size_t bulk_threshold = 50;
  int first_year = 1990, last_year = 2015;
  auto* match = app.add_subcommand("match", "find exactly matched controls for retracted papers");
  match->add_option("--corpus", match_corpus, "corpus file")->required();
  match->add_option("--bulk-threshold", bulk_threshold,
                    "drop (venue, retraction month) clusters larger than this");
  match->add_option("--first-year", first_year, "earliest retraction year kept");
  match->add_option("--last-year", last_year, "latest retraction year kept");

  // outcomes
  std::string out_corpus, out_matched;
  double epsilon = 1e-5;
  int horizon = 5;
  std::vector<std::int64_t> tiers;
  std::vector<double> percentiles;
  auto* outcomes = app.add_subcommand("outcomes", "post-retraction citation outcomes per matched set");
  outcomes->add_option("--corpus", out_corpus, "corpus file")->required();
  outcomes->add_option("--matched", out_matched, "matched-sets CSV from `match`")->required();
  outcomes->add_option("--epsilon", epsilon, "log-ratio stabilizer")->check(CLI::PositiveNumber);
  outcomes->add_option("--horizon", horizon, "post-retraction years counted")->check(CLI::PositiveNumber);
  auto* tiers_opt = outcomes->add_option("--tiers", tiers, "tier cut points, e.g. 1,9,31")->delimiter(',');
  outcomes->add_option("--percentiles", percentiles, "derive tier cuts from these percentiles")
      ->delimiter(',')
      ->excludes(tiers_opt);

  // stats
  std::string stats_input, stats_outcome = "both", stats_tests = "all";
  auto* stats = app.add_subcommand("stats", "tier comparison tests on an outcomes CSV");
  stats->add_option("--outcomes", stats_input, "outcomes CSV from `outcomes`")->required();
  stats->add_option("--outcome", stats_outcome, "1, 2 or both")
      ->check(CLI::IsMember({"1", "2", "both"}));
  stats->add_option("--tests", stats_tests, "welch, kruskal or all")
      ->check(CLI::IsMember({"welch", "kruskal", "all"}));

  // attention
  std::string att_corpus, att_mentions, att_window = "centered";
  int series_half_width = 6;
  std::vector<std::int64_t> att_tiers;
  auto* att = app.add_subcommand("attention", "attention around the retraction month");
  att->add_option("--corpus", att_corpus, "corpus file")->required();
  att->add_option("--mentions", att_mentions, "mentions file")->required();
  att->add_option("--window", att_window,
                  "centered (-6..+5 with the retraction month) or symmetric (-6..+6 without it)")
      ->check(CLI::IsMember({"centered", "symmetric"}));
  att->add_option("--series-half-width", series_half_width, "months either side in the series")
      ->check(CLI::PositiveNumber);
  att->add_option("--tiers", att_tiers, "tier cut points, e.g. 1,9,31")->delimiter(',');

  // synth
  rtx_synth_config synth_cfg;
  rtx_synth_config_default(&synth_cfg);
  std::vector<double> penalties = {1.0, 1.0, 1.0, 1.0};
  auto* synth = app.add_subcommand("synth", "synthetic corpus with known effects");
  synth->add_option("--n-retracted", synth_cfg.n_retracted, "retracted papers (one cell each)")
      ->check(CLI::PositiveNumber);
  synth->add_option("--controls-per-cell", synth_cfg.n_controls_per_cell, "matched controls per cell")
      ->check(CLI::PositiveNumber);
  synth->add_option("--penalties", penalties, "post-citation multipliers for the four tiers")
      ->delimiter(',')
      ->expected(4);
  synth->add_option("--attention-beta", synth_cfg.attention_beta, "mentions per pre-retraction citation");
  synth->add_option("--post-rate", synth_cfg.post_rate_per_citation,
                    "control post-citations per (pre + 1)");
  synth->add_option("--decoys-per-cell", synth_cfg.decoys_per_cell, "near-miss non-controls per cell");
  synth->add_option("--missing-rate", synth_cfg.missing_control_rate,
                    "chance a retracted paper lacks one regression control");
  synth->add_option("--attention-intercept", synth_cfg.attention_intercept, "baseline window mentions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  Run run(g);
  try {
    const CLI::App* sub = app.get_subcommands().front();

    if (sub == simulate) {
      auto p = sim_params(sim_opts, g);
      p.retraction_delay = sim_delay;
      int counts[3];
      check(rtx_simulate(&p, run.output("trace.csv").c_str(), counts));
      rtx_sweep* raw = nullptr;
      check(rtx_sweep_run(&p, &sim_delay, 1, g.threads, &raw));
      Sweep h(raw);
      write_sweep(run, h.get());
    } else if (sub == sweep) {
      const auto p = sim_params(sweep_opts, g);
      rtx_sweep* raw = nullptr;
      check(rtx_sweep_run(&p, delays.data(), delays.size(), g.threads, &raw));
      Sweep h(raw);
      write_sweep(run, h.get());
    } else if (sub == link) {
      auto left = load_corpus(run, link_left);
      auto right = load_corpus(run, link_right);
      rtx_link* raw = nullptr;
      check(rtx_link_run(left.get(), right.get(), link_threshold, g.threads, &raw));
      Link h(raw);
      check(rtx_link_write_pairs_csv(h.get(), run.output("links.csv").c_str()));
      check(rtx_link_write_unmatched_csv(h.get(), run.output("unmatched_left.csv").c_str(),
                                         run.output("unmatched_right.csv").c_str()));
      std::cout << rtx_link_pair_count(h.get()) << " pairs, " << rtx_link_unmatched_left_count(h.get())
                << " left and " << rtx_link_unmatched_right_count(h.get()) << " right unmatched\n";
    } else if (sub == match) {
      auto corpus = load_corpus(run, match_corpus);
      std::size_t removed = 0;
      check(rtx_corpus_filter_bulk(corpus.get(), bulk_threshold, &removed));
      rtx_matching* raw = nullptr;
      check(rtx_matching_run(corpus.get(), first_year, last_year, g.threads, &raw));
      Matching h(raw);
      check(rtx_matching_write_csv(h.get(), run.output("matched.csv").c_str()));
      check(rtx_matching_write_unmatched_csv(h.get(), run.output("unmatched.csv").c_str()));
      run.note("bulk_removed", removed);
      run.note("matched", rtx_matching_matched_count(h.get()));
      run.note("unmatched", rtx_matching_unmatched_count(h.get()));
      std::cout << rtx_matching_matched_count(h.get()) << " matched, "
                << rtx_matching_unmatched_count(h.get()) << " without controls, " << removed
                << " removed as bulk retractions\n";
    } else if (sub == outcomes) {
      auto corpus = load_corpus(run, out_corpus);
      rtx_matching* raw_m = nullptr;
      check(rtx_matching_load_csv(corpus.get(), run.input(out_matched).c_str(), &raw_m));
      Matching m(raw_m);
      rtx_outcome_options opts;
      rtx_outcome_options_default(&opts);
      opts.epsilon = epsilon;
      opts.horizon_years = horizon;
      opts.tier_boundaries = tiers.empty() ? nullptr : tiers.data();
      opts.n_tier_boundaries = tiers.size();
      opts.tier_percentiles = percentiles.empty() ? nullptr : percentiles.data();
      opts.n_tier_percentiles = percentiles.size();
      rtx_outcomes* raw = nullptr;
      check(rtx_outcomes_compute(m.get(), &opts, &raw));
      Outcomes h(raw);
      check(rtx_outcomes_write_csv(h.get(), run.output("outcomes.csv").c_str()));
      check(rtx_outcomes_write_tier_summary_csv(h.get(), run.output("tier_summary.csv").c_str()));
      for (std::size_t t = 0; t < rtx_outcomes_tier_count(h.get()); ++t) {
        rtx_tier_summary s;
        check(rtx_outcomes_tier_summary(h.get(), t, &s));
        std::cout << s.label << ": n=" << s.n;
        if (s.has_values)
          std::cout << " outcome1 mean " << s.outcome1_mean << ", outcome2 median " << s.outcome2_median;
        std::cout << "\n";
      }
    } else if (sub == stats) {
      unsigned flags = 0;
      if (stats_outcome != "2") flags |= RTX_REPORT_OUTCOME1;
      if (stats_outcome != "1") flags |= RTX_REPORT_OUTCOME2;
      if (stats_tests != "kruskal") flags |= RTX_REPORT_MEAN_TESTS;
      if (stats_tests != "welch") flags |= RTX_REPORT_RANK_TESTS;
      OwnedString json;
      check(rtx_stats_report(run.input(stats_input).c_str(), flags, &json.p));
      const auto path = run.output("stats.json");
      std::ofstream out(path, std::ios::binary);
      out << json.p;
      if (!out) throw RuntimeFailure{"Io: write failed: " + path};
      out.close();
      const auto report = nlohmann::json::parse(json.p);
      for (const auto& [outcome, block] : report["outcomes"].items())
        for (const auto& t : block["tests"]) {
          std::cout << outcome << " " << t["method"].get<std::string>() << ": ";
          if (t.contains("error"))
            std::cout << t["error"].get<std::string>() << "\n";
          else
            std::cout << "statistic " << t["statistic"] << ", p " << t["p"] << "\n";
        }
    } else if (sub == att) {
      auto corpus = load_corpus(run, att_corpus);
      rtx_mentions* raw_m = nullptr;
      check(rtx_mentions_load(run.input(att_mentions).c_str(), &raw_m));
      Mentions mentions(raw_m);
      for (std::size_t i = 0; i < rtx_mentions_violation_count(raw_m); ++i)
        std::cerr << "warning: " << rtx_mentions_violation(raw_m, i) << "\n";
      rtx_attention_options opts;
      rtx_attention_options_default(&opts);
      if (att_window == "symmetric") {
        opts.window_first_offset = -6;
        opts.window_last_offset = 6;
        opts.include_retraction_month = 0;
      }
      opts.series_half_width = series_half_width;
      opts.tier_boundaries = att_tiers.empty() ? nullptr : att_tiers.data();
      opts.n_tier_boundaries = att_tiers.size();
      rtx_attention* raw = nullptr;
      check(rtx_attention_run(corpus.get(), mentions.get(), &opts, &raw));
      Attention h(raw);
      check(rtx_attention_write_rows_csv(h.get(), run.output("attention_rows.csv").c_str()));
      check(rtx_attention_write_series_csv(h.get(), run.output("attention_series.csv").c_str()));
      check(rtx_attention_write_tier_csv(h.get(), run.output("attention_tiers.csv").c_str()));
      OwnedString json;
      check(rtx_attention_regression_json(h.get(), &json.p));
      const auto path = run.output("regression.json");
      std::ofstream out(path, std::ios::binary);
      out << json.p;
      if (!out) throw RuntimeFailure{"Io: write failed: " + path};
      out.close();
      rtx_coefficient c;
      if (rtx_attention_coefficient(h.get(), 1, "pre_citations", &c) == RTX_OK)
        std::cout << "window mentions ~ pre_citations: " << c.estimate << " (se " << c.std_error
                  << ", t " << c.t_value << ")\n";
      else
        std::cerr << "warning: " << rtx_last_error() << "\n";
    } else if (sub == synth) {
      for (std::size_t t = 0; t < 4; ++t) synth_cfg.tier_penalties[t] = penalties[t];
      synth_cfg.rng_seed = g.seed;
      check(rtx_synth_write(&synth_cfg, run.output("corpus.csv").c_str(),
                            run.output("mentions.csv").c_str(), run.output("truth.json").c_str()));
    }
    run.write_manifest(app, *sub);
  } catch (const RuntimeFailure& f) {
    std::cerr << "error: " << f.message << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
