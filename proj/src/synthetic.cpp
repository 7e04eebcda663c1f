#include "retraction/synthetic.hpp"

#include <array>
#include <cmath>
#include <random>

#include "json.hpp"
#include "retraction/error.hpp"
#include "retraction/matching.hpp"

namespace retraction::synth {

namespace {

using Rng = std::mt19937_64;

constexpr std::array kDisciplines = {"Biology", "Medicine", "Chemistry", "Physics",
                                     "Computer Science", "Psychology", "Engineering",
                                     "Economics"};
constexpr std::array kVenueStems = {"Journal of", "Annals of", "Proceedings in",
                                    "Letters in", "Reviews of"};
constexpr std::array kSubjects = {"(HSC) Health Sciences", "(BLS) Life Sciences",
                                  "(PHY) Physical Sciences", "(SOC) Social Sciences",
                                  "(ENG) Engineering"};
constexpr std::array kReasons = {"misconduct", "error", "plagiarism", "duplication"};
constexpr std::array kReasonWeights = {0.35, 0.30, 0.20, 0.15};
constexpr std::array kWords = {
    "adaptive",  "analysis",  "binding",   "cellular",  "cortex",    "dynamics",
    "effects",   "enzyme",    "evidence",  "expression","framework", "gene",
    "growth",    "imaging",   "inhibition","kinetics",  "lattice",   "membrane",
    "model",     "network",   "neural",    "novel",     "oxidative", "pathway",
    "protein",   "quantum",   "receptor",  "regulation","response",  "signal",
    "spectral",  "stability", "structure", "synthesis", "thermal",   "tissue",
    "transport", "tumor",     "variation", "viral"};

// Mention offsets (relative to the retraction month) inside the -6..+5
// window; attention peaks at the retraction month and the month after.
constexpr std::array kWindowOffsetWeights = {1.0, 1.0, 1.0, 1.0, 1.0, 1.5,
                                             4.0, 3.0, 1.5, 1.0, 1.0, 1.0};

constexpr std::array kSources = {SourceType::Social, SourceType::News, SourceType::Blog,
                                 SourceType::Repository, SourceType::Other};
constexpr std::array kSourceWeights = {0.6, 0.1, 0.1, 0.1, 0.1};
constexpr std::array kSourceScore = {0.25, 8.0, 5.0, 3.0, 1.0};

constexpr double kPubYearSlope = 0.05;
constexpr double kBackgroundMentions = 1.0;

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

long long poisson(Rng& rng, double mean) {
  if (mean <= 0) return 0;
  return std::poisson_distribution<long long>(mean)(rng);
}

// Spreads `total` citations uniformly at random over [first_year, last_year].
std::map<int, long long> spread(Rng& rng, long long total, int first_year, int last_year) {
  std::map<int, long long> out;
  for (long long i = 0; i < total; ++i) ++out[uniform_int(rng, first_year, last_year)];
  return out;
}

void add_followup(Rng& rng, std::map<int, long long>& series, int retraction_year, double mean5) {
  // five horizon years plus two later years that the outcome window ignores
  for (int y = retraction_year + 1; y <= retraction_year + 7; ++y) {
    const auto n = poisson(rng, mean5 / 5.0);
    if (n > 0) series[y] += n;
  }
}

std::string make_title(Rng& rng) {
  const int n = uniform_int(rng, 6, 10);
  std::string t;
  for (int i = 0; i < n; ++i) {
    std::string w = kWords[uniform_int(rng, 0, static_cast<int>(kWords.size()) - 1)];
    if (i == 0) w[0] = static_cast<char>(w[0] - 'a' + 'A');
    if (!t.empty()) t += ' ';
    t += w;
  }
  return t;
}

std::string padded(std::size_t v) {
  std::string s = std::to_string(v);
  return std::string(s.size() < 6 ? 6 - s.size() : 0, '0') + s;
}

const std::map<std::string, double>& reason_effects() {
  static const std::map<std::string, double> effects = {
      {"misconduct", 1.5}, {"error", 0.0}, {"plagiarism", 0.5}, {"duplication", 0.0}};
  return effects;
}

}  // namespace

void validate(const SynthConfig& c) {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::InvalidConfig, m); };
  if (c.n_retracted == 0) fail("n_retracted must be positive");
  if (c.n_controls_per_cell == 0) fail("n_controls_per_cell must be positive");
  const auto tiers = matching::TierSpec::published().tier_count();
  for (const auto& [tier, mult] : c.tier_penalties) {
    if (tier >= tiers) fail("tier penalty for unknown tier " + std::to_string(tier));
    if (!(mult >= 0.0 && mult <= 1.0)) fail("tier penalties must lie in [0, 1]");
  }
  if (!std::isfinite(c.attention_beta)) fail("attention_beta must be finite");
  if (!(c.post_rate_per_citation > 0)) fail("post_rate_per_citation must be positive");
  if (!(c.missing_control_rate >= 0 && c.missing_control_rate <= 1))
    fail("missing_control_rate must lie in [0, 1]");
}

SynthCorpus gen_synthetic(const SynthConfig& config) {
  validate(config);
  Rng rng(config.rng_seed);
  const auto tiers = matching::TierSpec::published();

  SynthCorpus out;
  auto& truth = out.truth;
  truth.config = config;
  truth.tier_boundaries = tiers.boundaries;
  for (std::size_t t = 0; t < tiers.tier_count(); ++t) {
    auto it = config.tier_penalties.find(t);
    const double pen = it == config.tier_penalties.end() ? 1.0 : it->second;
    truth.tier_penalty.push_back(pen);
    truth.outcome2_target.push_back(std::log(pen));
  }
  truth.pub_year_slope = kPubYearSlope;
  truth.reason_effect = reason_effects();

  std::discrete_distribution<int> reason_pick(kReasonWeights.begin(), kReasonWeights.end());
  std::discrete_distribution<int> offset_pick(kWindowOffsetWeights.begin(), kWindowOffsetWeights.end());
  std::discrete_distribution<int> source_pick(kSourceWeights.begin(), kSourceWeights.end());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // tier ranges of pre-retraction citations; the top tier is capped at 120
  const std::array<std::pair<int, int>, 4> pre_range = {{{0, 0}, {1, 8}, {9, 30}, {31, 120}}};

  for (std::size_t cell = 0; cell < config.n_retracted; ++cell) {
    const std::string tag = padded(cell + 1);
    const std::size_t tier = static_cast<std::size_t>(uniform_int(rng, 0, 3));
    const long long pre = uniform_int(rng, pre_range[tier].first, pre_range[tier].second);
    const int pub_year = uniform_int(rng, 1990, 2010);
    const int retraction_year = pub_year + uniform_int(rng, 0, 5);
    const int retraction_month = uniform_int(rng, 1, 12);
    const std::string discipline = kDisciplines[cell % kDisciplines.size()];
    const std::string venue = std::string(kVenueStems[cell % kVenueStems.size()]) + " " +
                              discipline + " " + std::to_string(cell + 1);
    const double journal_rank = unit(rng);
    const double control_mean = config.post_rate_per_citation * static_cast<double>(pre + 1);
    const double penalty = truth.tier_penalty[tier];

    PaperRecord base;
    base.pub_year = pub_year;
    base.venue = venue;
    base.discipline = discipline;
    base.journal_rank = journal_rank;

    // retracted paper
    PaperRecord r = base;
    r.paper_id = "R" + tag;
    r.doi = "10.5555/synth.r" + tag;
    r.title = make_title(rng);
    r.retraction_date = YearMonth{retraction_year, retraction_month};
    r.retraction_reason = kReasons[reason_pick(rng)];
    r.n_authors = uniform_int(rng, 1, 12);
    r.subject_area = kSubjects[cell % kSubjects.size()];
    r.citations_by_year = spread(rng, pre, pub_year, retraction_year);
    add_followup(rng, r.citations_by_year, retraction_year, control_mean * penalty);

    InjectedPaper injected{r.paper_id, tier, pre, penalty, control_mean, 0.0, {}};

    // attention, computed before any control is blanked
    const double lambda = std::max(
        0.0, config.attention_intercept + config.attention_beta * static_cast<double>(pre) +
                 kPubYearSlope * (pub_year - 2000) + reason_effects().at(*r.retraction_reason));
    injected.expected_mentions = lambda;
    const long long in_window = poisson(rng, lambda);
    const YearMonth retraction{retraction_year, retraction_month};
    auto add_mention = [&](int offset) {
      const long idx = retraction.month_index() + offset;
      const int src = source_pick(rng);
      out.mentions.push_back({r.paper_id,
                              YearMonth{static_cast<int>(idx / 12), static_cast<int>(idx % 12) + 1},
                              kSources[src], kSourceScore[src]});
    };
    for (long long k = 0; k < in_window; ++k) add_mention(offset_pick(rng) - 6);
    const long long background = poisson(rng, kBackgroundMentions);
    for (long long k = 0; k < background; ++k) {
      const int off = uniform_int(rng, 6, 24);
      add_mention(unit(rng) < 0.5 ? -off - 1 : off);  // -25..-7 or +6..+24
    }

    if (unit(rng) < config.missing_control_rate) {
      switch (uniform_int(rng, 0, 3)) {
        case 0: r.journal_rank.reset(); break;
        case 1: r.retraction_reason.reset(); break;
        case 2: r.n_authors.reset(); break;
        default: r.subject_area.reset(); break;
      }
    }
    out.corpus.push_back(std::move(r));

    for (std::size_t k = 0; k < config.n_controls_per_cell; ++k) {
      PaperRecord c = base;
      c.paper_id = "C" + tag + "-" + std::to_string(k + 1);
      c.doi = "10.5555/synth.c" + tag + "." + std::to_string(k + 1);
      c.title = make_title(rng);
      c.n_authors = uniform_int(rng, 1, 12);
      c.citations_by_year = spread(rng, pre, pub_year, retraction_year);
      add_followup(rng, c.citations_by_year, retraction_year, control_mean);
      injected.control_ids.push_back(c.paper_id);
      out.corpus.push_back(std::move(c));
    }
    for (std::size_t k = 0; k < config.decoys_per_cell; ++k) {
      PaperRecord d = base;
      d.paper_id = "D" + tag + "-" + std::to_string(k + 1);
      d.doi = "10.5555/synth.d" + tag + "." + std::to_string(k + 1);
      d.title = make_title(rng);
      d.citations_by_year = spread(rng, pre + 1, pub_year, retraction_year);
      add_followup(rng, d.citations_by_year, retraction_year, control_mean);
      out.corpus.push_back(std::move(d));
    }
    truth.papers.push_back(std::move(injected));
  }
  return out;
}

std::string SynthTruth::to_json() const {
  nlohmann::json j;
  nlohmann::json penalties = nlohmann::json::object();
  for (const auto& [t, m] : config.tier_penalties) penalties[std::to_string(t)] = m;
  j["config"] = {{"n_retracted", config.n_retracted},
                 {"n_controls_per_cell", config.n_controls_per_cell},
                 {"tier_penalties", penalties},
                 {"attention_beta", config.attention_beta},
                 {"rng_seed", config.rng_seed},
                 {"post_rate_per_citation", config.post_rate_per_citation},
                 {"decoys_per_cell", config.decoys_per_cell},
                 {"missing_control_rate", config.missing_control_rate},
                 {"attention_intercept", config.attention_intercept}};
  const auto tiers = matching::TierSpec{tier_boundaries};
  nlohmann::json tier_json = nlohmann::json::array();
  for (std::size_t t = 0; t < tier_penalty.size(); ++t) {
    tier_json.push_back({{"tier", t},
                         {"label", tiers.label(t)},
                         {"penalty", tier_penalty[t]},
                         {"outcome2_target", std::isfinite(outcome2_target[t])
                                                 ? nlohmann::json(outcome2_target[t])
                                                 : nlohmann::json(nullptr)}});
  }
  j["tiers"] = tier_json;
  j["attention"] = {{"intercept", config.attention_intercept},
                    {"beta_pre_citations", config.attention_beta},
                    {"pub_year_slope", pub_year_slope},
                    {"pub_year_reference", 2000},
                    {"reason_effect", reason_effect},
                    {"source_scores", {{"social", kSourceScore[0]}, {"news", kSourceScore[1]},
                                       {"blog", kSourceScore[2]}, {"repository", kSourceScore[3]},
                                       {"other", kSourceScore[4]}}}};
  nlohmann::json papers_json = nlohmann::json::array();
  for (const auto& p : papers) {
    papers_json.push_back({{"paper_id", p.paper_id},
                           {"tier", p.tier},
                           {"pre_citations", p.pre_citations},
                           {"penalty", p.penalty},
                           {"expected_control_post", p.expected_control_post},
                           {"expected_mentions", p.expected_mentions},
                           {"control_ids", p.control_ids}});
  }
  j["papers"] = papers_json;
  return j.dump(2) + "\n";
}

}  // namespace retraction::synth
