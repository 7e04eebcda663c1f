#pragma once

// Record linkage: exact DOI join, then year-blocked fuzzy title matching.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "retraction/records.hpp"

namespace retraction::linkage {

// Lowercase, NFD-fold diacritics, drop hyphens and punctuation, collapse
// whitespace. Input is UTF-8; invalid sequences are replaced by U+FFFD.
std::string normalize_title(std::string_view title);

// Edit distance over Unicode code points (UTF-8 input).
std::size_t levenshtein(std::string_view a, std::string_view b);
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);

std::u32string to_code_points(std::string_view utf8);

// 1 - d / max(len); 1 when both are empty. Inputs are used as given.
double levenshtein_similarity(std::string_view a, std::string_view b);

// Jaccard index of the whitespace token sets of the normalized strings;
// 1 when both token sets are empty.
double jaccard_tokens(std::string_view a, std::string_view b);

// max(levenshtein_similarity, jaccard) of the normalized titles.
double title_similarity(std::string_view a, std::string_view b);

enum class LinkMethod { Doi, Fuzzy };
const char* link_method_name(LinkMethod method);

struct LinkPair {
  std::string left_id;
  std::string right_id;
  LinkMethod method = LinkMethod::Doi;
  double similarity = 1.0;
};

struct LinkResult {
  std::vector<LinkPair> pairs;
  std::vector<std::string> unmatched_left;
  std::vector<std::string> unmatched_right;
};

struct LinkConfig {
  double sim_threshold = 0.90;
  unsigned threads = 1;
};

// One-to-one. DOI pairs first (in left order); the remaining records are
// scored within publication-year blocks and assigned greedily by
// (similarity desc, left_id asc, right_id asc).
LinkResult link_records(const std::vector<PaperRecord>& left,
                        const std::vector<PaperRecord>& right, const LinkConfig& config = {});

void write_pairs_csv(const LinkResult& result, const std::string& path);
void write_unmatched_csv(const std::vector<std::string>& ids, const std::string& path);

}  // namespace retraction::linkage
