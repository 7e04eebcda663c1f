#include "retraction/retraction.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "retraction/attention.hpp"
#include "retraction/belief_sim.hpp"
#include "retraction/csv.hpp"
#include "retraction/digest.hpp"
#include "retraction/distributions.hpp"
#include "retraction/error.hpp"
#include "retraction/linkage.hpp"
#include "retraction/matching.hpp"
#include "retraction/records.hpp"
#include "retraction/stats.hpp"
#include "retraction/synthetic.hpp"
#include "retraction/tier_report.hpp"

using namespace retraction;

struct rtx_sweep {
  sim::SweepResult result;
};

struct rtx_corpus {
  // Shared so that matchings built from a corpus outlive later filtering.
  std::shared_ptr<const std::vector<PaperRecord>> records;
  std::vector<std::string> violations;
};

struct rtx_mentions {
  std::vector<MentionEvent> events;
  std::vector<std::string> violations;
};

struct rtx_link {
  linkage::LinkResult result;
};

struct rtx_matching {
  std::shared_ptr<const std::vector<PaperRecord>> records;
  std::unique_ptr<matching::CorpusIndex> index;
  matching::MatchingRun run;
};

struct rtx_outcomes {
  matching::TierSpec tiers;
  std::vector<matching::OutcomeRow> rows;
  std::vector<matching::TierSummary> summaries;
};

struct rtx_attention {
  attention::AttentionReport report;
};

namespace {

thread_local std::string last_error;

rtx_status fail(rtx_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

template <class F>
rtx_status guard(F&& f) noexcept {
  try {
    f();
    return RTX_OK;
  } catch (const Error& e) {
    return fail(static_cast<rtx_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(RTX_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(RTX_E_INTERNAL, e.what());
  } catch (...) {
    return fail(RTX_E_INTERNAL, "unknown error");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

sim::SimParams to_cpp(const rtx_sim_params& p) {
  sim::SimParams s;
  s.n_agents = p.n_agents;
  switch (p.topology) {
    case RTX_TOPOLOGY_COMPLETE: s.topology = sim::Topology::complete(); break;
    case RTX_TOPOLOGY_RING: s.topology = sim::Topology::ring(p.ring_k); break;
    case RTX_TOPOLOGY_ERDOS_RENYI: s.topology = sim::Topology::erdos_renyi(p.edge_prob); break;
    default: throw Error(ErrorCode::InvalidTopologyParam, "unknown topology kind");
  }
  s.share_window = p.share_window;
  s.retraction_delay = p.retraction_delay;
  s.max_steps = p.max_steps;
  s.n_replicates = p.n_replicates;
  s.rng_seed = p.rng_seed;
  s.transmission_prob = p.transmission_prob;
  return s;
}

std::vector<std::string> describe_all(const std::vector<SchemaViolation>& vs, const std::string& src) {
  std::vector<std::string> out;
  out.reserve(vs.size());
  for (const auto& v : vs) out.push_back(v.describe(src));
  return out;
}

std::vector<stats::Sample> to_groups(const double* const* groups, const size_t* sizes, size_t k) {
  require(groups && sizes, "groups and sizes must not be NULL");
  std::vector<stats::Sample> out(k);
  for (size_t i = 0; i < k; ++i) {
    require(groups[i] || sizes[i] == 0, "group data must not be NULL");
    if (sizes[i] > 0) out[i].assign(groups[i], groups[i] + sizes[i]);
  }
  return out;
}

void fill(const stats::TestResult& r, rtx_test_result* out) {
  out->statistic = r.statistic;
  out->df1 = r.df1;
  out->df2 = r.df2 ? *r.df2 : std::numeric_limits<double>::quiet_NaN();
  out->p_value = r.p_value;
  out->warning = r.warning ? 1 : 0;
}

matching::TierSpec explicit_tiers(const int64_t* boundaries, size_t n) {
  if (!boundaries || n == 0) return matching::TierSpec::published();
  matching::TierSpec t{std::vector<long long>(boundaries, boundaries + n)};
  t.validate();
  return t;
}

}  // namespace

extern "C" {

const char* rtx_version(void) { return "1.0.0"; }

const char* rtx_status_name(rtx_status status) {
  if (status == RTX_OK) return "Ok";
  if (status < RTX_E_INVALID_ARGUMENT || status > RTX_E_INTERNAL) return "Unknown";
  return error_code_name(static_cast<ErrorCode>(status));
}

const char* rtx_last_error(void) { return last_error.c_str(); }

void rtx_string_free(char* s) { std::free(s); }

rtx_status rtx_sha256_file(const char* path, char out[65]) {
  return guard([&] {
    require(path && out, "path and out must not be NULL");
    const auto hex = sha256_file(path);
    std::memcpy(out, hex.c_str(), 65);
  });
}

/* ---- simulation ---- */

void rtx_sim_params_default(rtx_sim_params* params) {
  if (!params) return;
  const sim::SimParams d;
  *params = rtx_sim_params{d.n_agents, RTX_TOPOLOGY_COMPLETE, 2, 0.1, d.share_window,
                           d.retraction_delay, d.max_steps, d.n_replicates, d.rng_seed,
                           d.transmission_prob};
}

rtx_status rtx_sim_params_set_topology(rtx_sim_params* params, const char* spec) {
  return guard([&] {
    require(params && spec, "params and spec must not be NULL");
    const auto t = sim::parse_topology(spec);
    switch (t.kind) {
      case sim::Topology::Kind::Complete: params->topology = RTX_TOPOLOGY_COMPLETE; break;
      case sim::Topology::Kind::Ring:
        params->topology = RTX_TOPOLOGY_RING;
        params->ring_k = t.ring_k;
        break;
      case sim::Topology::Kind::ErdosRenyi:
        params->topology = RTX_TOPOLOGY_ERDOS_RENYI;
        params->edge_prob = t.edge_prob;
        break;
    }
  });
}

rtx_status rtx_simulate(const rtx_sim_params* params, const char* trace_csv, int final_counts[3]) {
  return guard([&] {
    require(params, "params must not be NULL");
    const auto p = to_cpp(*params);
    sim::validate(p);
    sim::Rng rng(sim::replicate_seed(p.rng_seed, 0, 0));
    std::vector<std::pair<int, sim::BeliefCounts>> trace;
    sim::StepObserver observer;
    if (trace_csv) {
      observer = [&](const sim::SimState& s) {
        // seeding and the contact round can report the same step; keep the last
        if (!trace.empty() && trace.back().first == s.step)
          trace.back().second = s.counts();
        else
          trace.emplace_back(s.step, s.counts());
      };
    }
    const auto counts = sim::run(p, rng, observer);
    if (trace_csv) {
      auto out = open_output(trace_csv);
      write_csv_row(out, {"step", "neutral", "false", "retracted"});
      for (const auto& [step, c] : trace)
        write_csv_row(out, {std::to_string(step), std::to_string(c.neutral),
                            std::to_string(c.false_belief), std::to_string(c.retracted)});
      if (!out) throw Error(ErrorCode::Io, std::string("write failed: ") + trace_csv);
    }
    if (final_counts) {
      final_counts[0] = counts.neutral;
      final_counts[1] = counts.false_belief;
      final_counts[2] = counts.retracted;
    }
  });
}

rtx_status rtx_sweep_run(const rtx_sim_params* params, const int* delays, size_t n_delays,
                         unsigned threads, rtx_sweep** out) {
  return guard([&] {
    require(params && out, "params and out must not be NULL");
    require(delays || n_delays == 0, "delays must not be NULL");
    auto h = std::make_unique<rtx_sweep>();
    h->result = sim::sweep_delay(to_cpp(*params), std::span<const int>(delays, n_delays), threads);
    *out = h.release();
  });
}

size_t rtx_sweep_delay_count(const rtx_sweep* sweep) { return sweep ? sweep->result.delays.size() : 0; }

rtx_status rtx_sweep_summary(const rtx_sweep* sweep, size_t delay_index, rtx_delay_summary* out) {
  return guard([&] {
    require(sweep && out, "sweep and out must not be NULL");
    require(delay_index < sweep->result.summaries.size(), "delay index out of range");
    const auto& s = sweep->result.summaries[delay_index];
    *out = rtx_delay_summary{s.delay,      s.mean_neutral,   s.sd_neutral, s.mean_false,
                             s.sd_false,   s.mean_retracted, s.sd_retracted};
  });
}

rtx_status rtx_sweep_replicate(const rtx_sweep* sweep, size_t delay_index, size_t replicate,
                               int counts[3]) {
  return guard([&] {
    require(sweep && counts, "sweep and counts must not be NULL");
    require(delay_index < sweep->result.replicates.size(), "delay index out of range");
    const auto& reps = sweep->result.replicates[delay_index];
    require(replicate < reps.size(), "replicate index out of range");
    counts[0] = reps[replicate].neutral;
    counts[1] = reps[replicate].false_belief;
    counts[2] = reps[replicate].retracted;
  });
}

rtx_status rtx_sweep_write_replicates_csv(const rtx_sweep* sweep, const char* path) {
  return guard([&] {
    require(sweep && path, "sweep and path must not be NULL");
    sim::write_replicates_csv(sweep->result, path);
  });
}

rtx_status rtx_sweep_write_summary_csv(const rtx_sweep* sweep, const char* path) {
  return guard([&] {
    require(sweep && path, "sweep and path must not be NULL");
    sim::write_summary_csv(sweep->result, path);
  });
}

void rtx_sweep_free(rtx_sweep* sweep) { delete sweep; }

/* ---- corpora ---- */

rtx_status rtx_corpus_load(const char* path, rtx_corpus** out) {
  return guard([&] {
    require(path && out, "path and out must not be NULL");
    auto loaded = load_corpus(path);
    auto h = std::make_unique<rtx_corpus>();
    h->violations = describe_all(loaded.violations, path);
    h->records = std::make_shared<const std::vector<PaperRecord>>(std::move(loaded.records));
    *out = h.release();
  });
}

size_t rtx_corpus_size(const rtx_corpus* corpus) { return corpus ? corpus->records->size() : 0; }

size_t rtx_corpus_retracted_count(const rtx_corpus* corpus) {
  if (!corpus) return 0;
  size_t n = 0;
  for (const auto& r : *corpus->records) n += r.is_retracted() ? 1 : 0;
  return n;
}

size_t rtx_corpus_violation_count(const rtx_corpus* corpus) {
  return corpus ? corpus->violations.size() : 0;
}

const char* rtx_corpus_violation(const rtx_corpus* corpus, size_t index) {
  if (!corpus || index >= corpus->violations.size()) return nullptr;
  return corpus->violations[index].c_str();
}

rtx_status rtx_corpus_filter_bulk(rtx_corpus* corpus, size_t threshold, size_t* removed) {
  return guard([&] {
    require(corpus, "corpus must not be NULL");
    auto part = filter_bulk_retractions(*corpus->records, threshold);
    if (removed) *removed = part.removed.size();
    corpus->records = std::make_shared<const std::vector<PaperRecord>>(std::move(part.kept));
  });
}

rtx_status rtx_corpus_write_csv(const rtx_corpus* corpus, const char* path) {
  return guard([&] {
    require(corpus && path, "corpus and path must not be NULL");
    write_corpus_csv(*corpus->records, path);
  });
}

void rtx_corpus_free(rtx_corpus* corpus) { delete corpus; }

rtx_status rtx_mentions_load(const char* path, rtx_mentions** out) {
  return guard([&] {
    require(path && out, "path and out must not be NULL");
    auto loaded = load_mentions(path);
    auto h = std::make_unique<rtx_mentions>();
    h->violations = describe_all(loaded.violations, path);
    h->events = std::move(loaded.records);
    *out = h.release();
  });
}

size_t rtx_mentions_size(const rtx_mentions* mentions) { return mentions ? mentions->events.size() : 0; }

size_t rtx_mentions_violation_count(const rtx_mentions* mentions) {
  return mentions ? mentions->violations.size() : 0;
}

const char* rtx_mentions_violation(const rtx_mentions* mentions, size_t index) {
  if (!mentions || index >= mentions->violations.size()) return nullptr;
  return mentions->violations[index].c_str();
}

void rtx_mentions_free(rtx_mentions* mentions) { delete mentions; }

/* ---- synthetic ---- */

void rtx_synth_config_default(rtx_synth_config* config) {
  if (!config) return;
  const synth::SynthConfig d;
  *config = rtx_synth_config{d.n_retracted,        d.n_controls_per_cell, {1.0, 1.0, 1.0, 1.0},
                             d.attention_beta,     d.rng_seed,            d.post_rate_per_citation,
                             d.decoys_per_cell,    d.missing_control_rate, d.attention_intercept};
}

rtx_status rtx_synth_write(const rtx_synth_config* config, const char* corpus_csv,
                           const char* mentions_csv, const char* truth_json) {
  return guard([&] {
    require(config && corpus_csv && mentions_csv && truth_json, "arguments must not be NULL");
    synth::SynthConfig c;
    c.n_retracted = config->n_retracted;
    c.n_controls_per_cell = config->n_controls_per_cell;
    for (std::size_t t = 0; t < 4; ++t) c.tier_penalties[t] = config->tier_penalties[t];
    c.attention_beta = config->attention_beta;
    c.rng_seed = config->rng_seed;
    c.post_rate_per_citation = config->post_rate_per_citation;
    c.decoys_per_cell = config->decoys_per_cell;
    c.missing_control_rate = config->missing_control_rate;
    c.attention_intercept = config->attention_intercept;
    const auto data = synth::gen_synthetic(c);
    write_corpus_csv(data.corpus, corpus_csv);
    write_mentions_csv(data.mentions, mentions_csv);
    auto out = open_output(truth_json);
    out << data.truth.to_json();
    if (!out) throw Error(ErrorCode::Io, std::string("write failed: ") + truth_json);
  });
}

/* ---- linkage ---- */

rtx_status rtx_link_run(const rtx_corpus* left, const rtx_corpus* right, double sim_threshold,
                        unsigned threads, rtx_link** out) {
  return guard([&] {
    require(left && right && out, "left, right and out must not be NULL");
    auto h = std::make_unique<rtx_link>();
    h->result = linkage::link_records(*left->records, *right->records,
                                      linkage::LinkConfig{sim_threshold, threads});
    *out = h.release();
  });
}

size_t rtx_link_pair_count(const rtx_link* link) { return link ? link->result.pairs.size() : 0; }

rtx_status rtx_link_pair_at(const rtx_link* link, size_t index, rtx_link_pair* out) {
  return guard([&] {
    require(link && out, "link and out must not be NULL");
    require(index < link->result.pairs.size(), "pair index out of range");
    const auto& p = link->result.pairs[index];
    *out = rtx_link_pair{p.left_id.c_str(), p.right_id.c_str(),
                         p.method == linkage::LinkMethod::Fuzzy ? 1 : 0, p.similarity};
  });
}

size_t rtx_link_unmatched_left_count(const rtx_link* link) {
  return link ? link->result.unmatched_left.size() : 0;
}

size_t rtx_link_unmatched_right_count(const rtx_link* link) {
  return link ? link->result.unmatched_right.size() : 0;
}

rtx_status rtx_link_write_pairs_csv(const rtx_link* link, const char* path) {
  return guard([&] {
    require(link && path, "link and path must not be NULL");
    linkage::write_pairs_csv(link->result, path);
  });
}

rtx_status rtx_link_write_unmatched_csv(const rtx_link* link, const char* left_path,
                                        const char* right_path) {
  return guard([&] {
    require(link && left_path && right_path, "arguments must not be NULL");
    linkage::write_unmatched_csv(link->result.unmatched_left, left_path);
    linkage::write_unmatched_csv(link->result.unmatched_right, right_path);
  });
}

void rtx_link_free(rtx_link* link) { delete link; }

rtx_status rtx_levenshtein(const char* a, const char* b, size_t* out) {
  return guard([&] {
    require(a && b && out, "arguments must not be NULL");
    *out = linkage::levenshtein(std::string_view(a), std::string_view(b));
  });
}

rtx_status rtx_normalize_title(const char* title, char** out) {
  return guard([&] {
    require(title && out, "arguments must not be NULL");
    *out = dup_string(linkage::normalize_title(title));
  });
}

rtx_status rtx_title_similarity(const char* a, const char* b, double* out) {
  return guard([&] {
    require(a && b && out, "arguments must not be NULL");
    *out = linkage::title_similarity(a, b);
  });
}

/* ---- matching and outcomes ---- */

rtx_status rtx_matching_run(const rtx_corpus* corpus, int first_year, int last_year,
                            unsigned threads, rtx_matching** out) {
  return guard([&] {
    require(corpus && out, "corpus and out must not be NULL");
    require(first_year <= last_year, "first_year must not exceed last_year");
    auto h = std::make_unique<rtx_matching>();
    h->records = corpus->records;
    h->index = std::make_unique<matching::CorpusIndex>(*h->records);
    const auto retracted = filter_retraction_window(*h->records, first_year, last_year);
    h->run = matching::match_all(retracted, *h->index, threads);
    *out = h.release();
  });
}

rtx_status rtx_matching_load_csv(const rtx_corpus* corpus, const char* path, rtx_matching** out) {
  return guard([&] {
    require(corpus && path && out, "arguments must not be NULL");
    auto h = std::make_unique<rtx_matching>();
    h->records = corpus->records;
    h->index = std::make_unique<matching::CorpusIndex>(*h->records);
    h->run.matched = matching::read_matched_csv(path, *h->index);
    *out = h.release();
  });
}

size_t rtx_matching_matched_count(const rtx_matching* m) { return m ? m->run.matched.size() : 0; }

size_t rtx_matching_unmatched_count(const rtx_matching* m) { return m ? m->run.unmatched_ids.size() : 0; }

rtx_status rtx_matching_write_csv(const rtx_matching* m, const char* path) {
  return guard([&] {
    require(m && path, "matching and path must not be NULL");
    matching::write_matched_csv(m->run.matched, path);
  });
}

rtx_status rtx_matching_write_unmatched_csv(const rtx_matching* m, const char* path) {
  return guard([&] {
    require(m && path, "matching and path must not be NULL");
    linkage::write_unmatched_csv(m->run.unmatched_ids, path);
  });
}

void rtx_matching_free(rtx_matching* m) { delete m; }

void rtx_outcome_options_default(rtx_outcome_options* options) {
  if (!options) return;
  const matching::OutcomeConfig d;
  *options = rtx_outcome_options{d.epsilon, d.horizon_years, nullptr, 0, nullptr, 0};
}

rtx_status rtx_outcomes_compute(const rtx_matching* m, const rtx_outcome_options* options,
                                rtx_outcomes** out) {
  return guard([&] {
    require(m && out, "matching and out must not be NULL");
    rtx_outcome_options opts;
    rtx_outcome_options_default(&opts);
    if (options) opts = *options;
    require(opts.epsilon > 0, "epsilon must be positive");
    require(opts.horizon_years >= 1, "horizon_years must be at least 1");

    matching::OutcomeConfig config;
    config.epsilon = opts.epsilon;
    config.horizon_years = opts.horizon_years;
    if (opts.n_tier_percentiles > 0) {
      require(opts.tier_percentiles, "tier_percentiles must not be NULL");
      std::vector<long long> pre;
      for (const auto& set : m->run.matched)
        pre.push_back(matching::pre_retraction_citations(m->index->at(set.retracted_id),
                                                         set.retraction_year));
      config.tiers = matching::TierSpec::from_percentiles(
          pre, std::span<const double>(opts.tier_percentiles, opts.n_tier_percentiles));
    } else {
      config.tiers = explicit_tiers(opts.tier_boundaries, opts.n_tier_boundaries);
    }
    config.tiers.validate();

    auto h = std::make_unique<rtx_outcomes>();
    h->tiers = config.tiers;
    h->rows = matching::compute_outcomes(m->run.matched, *m->index, config);
    h->summaries = matching::summarize_tiers(matching::stratify(h->rows, h->tiers), h->tiers);
    *out = h.release();
  });
}

size_t rtx_outcomes_count(const rtx_outcomes* o) { return o ? o->rows.size() : 0; }

rtx_status rtx_outcomes_row(const rtx_outcomes* o, size_t index, rtx_outcome_row* out) {
  return guard([&] {
    require(o && out, "outcomes and out must not be NULL");
    require(index < o->rows.size(), "row index out of range");
    const auto& r = o->rows[index];
    *out = rtx_outcome_row{r.retracted_id.c_str(), r.tier_label.c_str(), r.tier,
                           r.pre_citations, r.outcome1, r.outcome2, r.n_controls};
  });
}

size_t rtx_outcomes_tier_count(const rtx_outcomes* o) { return o ? o->summaries.size() : 0; }

rtx_status rtx_outcomes_tier_summary(const rtx_outcomes* o, size_t tier, rtx_tier_summary* out) {
  return guard([&] {
    require(o && out, "outcomes and out must not be NULL");
    require(tier < o->summaries.size(), "tier index out of range");
    const auto& s = o->summaries[tier];
    const double nan = std::numeric_limits<double>::quiet_NaN();
    *out = rtx_tier_summary{s.label.c_str(),
                            s.n,
                            s.n > 0 ? 1 : 0,
                            s.outcome1_mean.value_or(nan),
                            s.outcome2_median.value_or(nan),
                            s.outcome2_mean.value_or(nan),
                            s.outcome2_max.value_or(nan)};
  });
}

rtx_status rtx_outcomes_write_csv(const rtx_outcomes* o, const char* path) {
  return guard([&] {
    require(o && path, "outcomes and path must not be NULL");
    matching::write_outcomes_csv(o->rows, path);
  });
}

rtx_status rtx_outcomes_write_tier_summary_csv(const rtx_outcomes* o, const char* path) {
  return guard([&] {
    require(o && path, "outcomes and path must not be NULL");
    matching::write_tier_summary_csv(o->summaries, path);
  });
}

void rtx_outcomes_free(rtx_outcomes* o) { delete o; }

/* ---- statistics ---- */

rtx_status rtx_stats_report(const char* outcomes_csv, unsigned flags, char** json_out) {
  return guard([&] {
    require(outcomes_csv && json_out, "arguments must not be NULL");
    stats::TierReportOptions options;
    options.outcome1 = flags & RTX_REPORT_OUTCOME1;
    options.outcome2 = flags & RTX_REPORT_OUTCOME2;
    options.mean_tests = flags & RTX_REPORT_MEAN_TESTS;
    options.rank_tests = flags & RTX_REPORT_RANK_TESTS;
    require(options.outcome1 || options.outcome2, "select at least one outcome");
    require(options.mean_tests || options.rank_tests, "select at least one test family");
    const auto rows = matching::read_outcomes_csv(outcomes_csv);
    *json_out = dup_string(stats::tier_report_json(rows, options));
  });
}

rtx_status rtx_welch_t(const double* a, size_t na, const double* b, size_t nb, rtx_test_result* out) {
  return guard([&] {
    require((a || na == 0) && (b || nb == 0) && out, "arguments must not be NULL");
    fill(stats::welch_t(std::span<const double>(a, na), std::span<const double>(b, nb)), out);
  });
}

rtx_status rtx_welch_anova(const double* const* groups, const size_t* sizes, size_t k,
                           rtx_test_result* out) {
  return guard([&] {
    require(out, "out must not be NULL");
    fill(stats::welch_anova(to_groups(groups, sizes, k)), out);
  });
}

rtx_status rtx_kruskal_wallis(const double* const* groups, const size_t* sizes, size_t k,
                              rtx_test_result* out) {
  return guard([&] {
    require(out, "out must not be NULL");
    fill(stats::kruskal_wallis(to_groups(groups, sizes, k)), out);
  });
}

rtx_status rtx_holm_adjust(const double* p, size_t n, double* adjusted) {
  return guard([&] {
    require((p && adjusted) || n == 0, "arguments must not be NULL");
    const auto adj = stats::holm_adjust(std::span<const double>(p, n));
    std::copy(adj.begin(), adj.end(), adjusted);
  });
}

double rtx_normal_cdf(double z) { return stats::normal_cdf(z); }

/* ---- attention ---- */

void rtx_attention_options_default(rtx_attention_options* options) {
  if (!options) return;
  const attention::AttentionConfig d;
  *options = rtx_attention_options{d.window.first_offset, d.window.last_offset,
                                   d.window.include_retraction_month ? 1 : 0,
                                   d.series_half_width, nullptr, 0};
}

rtx_status rtx_attention_run(const rtx_corpus* corpus, const rtx_mentions* mentions,
                             const rtx_attention_options* options, rtx_attention** out) {
  return guard([&] {
    require(corpus && mentions && out, "corpus, mentions and out must not be NULL");
    rtx_attention_options opts;
    rtx_attention_options_default(&opts);
    if (options) opts = *options;
    require(opts.window_first_offset <= opts.window_last_offset, "empty attention window");
    attention::AttentionConfig config;
    config.window = attention::WindowSpec{opts.window_first_offset, opts.window_last_offset,
                                          opts.include_retraction_month != 0};
    config.series_half_width = opts.series_half_width;
    config.tiers = explicit_tiers(opts.tier_boundaries, opts.n_tier_boundaries);

    std::vector<PaperRecord> retracted;
    for (const auto& r : *corpus->records)
      if (r.is_retracted()) retracted.push_back(r);
    auto h = std::make_unique<rtx_attention>();
    h->report = attention::analyze(retracted, mentions->events, config);
    *out = h.release();
  });
}

size_t rtx_attention_row_count(const rtx_attention* a) { return a ? a->report.rows.size() : 0; }

rtx_status rtx_attention_write_rows_csv(const rtx_attention* a, const char* path) {
  return guard([&] {
    require(a && path, "attention and path must not be NULL");
    attention::write_rows_csv(a->report.rows, path);
  });
}

rtx_status rtx_attention_write_series_csv(const rtx_attention* a, const char* path) {
  return guard([&] {
    require(a && path, "attention and path must not be NULL");
    attention::write_series_csv(a->report, path);
  });
}

rtx_status rtx_attention_write_tier_csv(const rtx_attention* a, const char* path) {
  return guard([&] {
    require(a && path, "attention and path must not be NULL");
    attention::write_tier_csv(a->report.tiers, path);
  });
}

rtx_status rtx_attention_regression_json(const rtx_attention* a, char** json_out) {
  return guard([&] {
    require(a && json_out, "attention and json_out must not be NULL");
    *json_out = dup_string(attention::regression_report_json(a->report));
  });
}

rtx_status rtx_attention_coefficient(const rtx_attention* a, int outcome, const char* column,
                                     rtx_coefficient* out) {
  return guard([&] {
    require(a && column && out, "arguments must not be NULL");
    require(outcome == 0 || outcome == 1, "outcome must be 0 (score) or 1 (mentions)");
    if (a->report.regression_error)
      throw Error(ErrorCode::InvalidArgument, "regression unavailable: " + *a->report.regression_error);
    const auto& fit = outcome == 0 ? *a->report.score_fit : *a->report.mentions_fit;
    const auto& names = a->report.dataset.column_names;
    const auto it = std::find(names.begin(), names.end(), column);
    require(it != names.end(), "unknown regression column");
    const auto j = static_cast<std::size_t>(it - names.begin());
    *out = rtx_coefficient{fit.coefficients[j], fit.std_errors[j], fit.t_values[j], fit.p_values[j]};
  });
}

void rtx_attention_free(rtx_attention* a) { delete a; }

}  // extern "C"
