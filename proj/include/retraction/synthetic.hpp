#pragma once

// Synthetic corpora with known injected effects, used to check that the
// matching, outcome and attention pipeline recovers what was put in.
//
// Every retracted paper gets its own cell: `n_controls_per_cell` never-
// retracted papers share its publication year, venue, discipline and
// pre-retraction citation total. Control post-retraction citations are
// Poisson with mean post_rate_per_citation * (pre + 1) spread evenly over the
// five follow-up years; the retracted paper's mean is additionally scaled by
// the penalty of its citation tier. Window mention counts are Poisson with
// mean attention_intercept + attention_beta * pre + pub-year and reason
// effects (see SynthTruth).

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "retraction/records.hpp"

namespace retraction::synth {

struct SynthConfig {
  std::size_t n_retracted = 2000;
  std::size_t n_controls_per_cell = 5;
  // Tier index (published tiers [0,1), [1,9), [9,31), [31,inf)) -> multiplier
  // on the retracted paper's post-retraction citation rate. Missing = 1.
  std::map<std::size_t, double> tier_penalties;
  double attention_beta = 0.2;
  std::uint64_t rng_seed = 1;

  double post_rate_per_citation = 10.0;
  std::size_t decoys_per_cell = 1;     // same block, pre-citations off by one
  double missing_control_rate = 0.05;  // chance a retracted paper lacks one control
  double attention_intercept = 2.0;
};

// Throws InvalidConfig.
void validate(const SynthConfig& config);

struct InjectedPaper {
  std::string paper_id;
  std::size_t tier = 0;
  long long pre_citations = 0;
  double penalty = 1.0;
  double expected_control_post = 0;
  double expected_mentions = 0;
  std::vector<std::string> control_ids;
};

struct SynthTruth {
  SynthConfig config;
  std::vector<long long> tier_boundaries;
  std::vector<double> tier_penalty;         // per tier
  std::vector<double> outcome2_target;      // ln(penalty) per tier
  double pub_year_slope = 0;                // mentions per year after 2000
  std::map<std::string, double> reason_effect;
  std::vector<InjectedPaper> papers;

  std::string to_json() const;
};

struct SynthCorpus {
  std::vector<PaperRecord> corpus;
  std::vector<MentionEvent> mentions;
  SynthTruth truth;
};

// Bit-identical output for identical configs.
SynthCorpus gen_synthetic(const SynthConfig& config);

}  // namespace retraction::synth
