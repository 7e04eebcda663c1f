#include "retraction/linkage.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <atomic>
#include <map>
#include <set>
#include <thread>
#include <unordered_map>

#include "retraction/csv.hpp"
#include "retraction/error.hpp"

namespace retraction::linkage {

namespace {

const icu::Normalizer2& nfd() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* n = icu::Normalizer2::getNFDInstance(status);
  if (U_FAILURE(status)) throw Error(ErrorCode::Internal, "ICU NFD normalizer unavailable");
  return *n;
}

const icu::Normalizer2& nfc() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* n = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error(ErrorCode::Internal, "ICU NFC normalizer unavailable");
  return *n;
}

std::vector<std::string> tokens(const std::string& normalized) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < normalized.size()) {
    const auto j = normalized.find(' ', i);
    const auto end = j == std::string::npos ? normalized.size() : j;
    if (end > i) out.emplace_back(normalized.substr(i, end - i));
    i = end + 1;
  }
  return out;
}

double jaccard_normalized(const std::string& a, const std::string& b) {
  auto ta = tokens(a);
  auto tb = tokens(b);
  std::sort(ta.begin(), ta.end());
  ta.erase(std::unique(ta.begin(), ta.end()), ta.end());
  std::sort(tb.begin(), tb.end());
  tb.erase(std::unique(tb.begin(), tb.end()), tb.end());
  if (ta.empty() && tb.empty()) return 1.0;
  std::vector<std::string> common;
  std::set_intersection(ta.begin(), ta.end(), tb.begin(), tb.end(), std::back_inserter(common));
  const double inter = static_cast<double>(common.size());
  return inter / (static_cast<double>(ta.size() + tb.size()) - inter);
}

double lev_similarity(std::u32string_view a, std::u32string_view b) {
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

struct PreparedTitle {
  std::string normalized;
  std::u32string code_points;
};

PreparedTitle prepare(const std::string& title) {
  PreparedTitle p;
  p.normalized = normalize_title(title);
  p.code_points = to_code_points(p.normalized);
  return p;
}

double prepared_similarity(const PreparedTitle& a, const PreparedTitle& b) {
  return std::max(lev_similarity(a.code_points, b.code_points),
                  jaccard_normalized(a.normalized, b.normalized));
}

}  // namespace

std::string normalize_title(std::string_view title) {
  icu::UnicodeString text =
      icu::UnicodeString::fromUTF8(icu::StringPiece(title.data(), static_cast<int32_t>(title.size())));
  text.toLower();
  UErrorCode status = U_ZERO_ERROR;
  const icu::UnicodeString decomposed = nfd().normalize(text, status);
  if (U_FAILURE(status)) throw Error(ErrorCode::Internal, "ICU normalization failed");

  icu::UnicodeString kept;
  bool pending_space = false;
  for (int32_t i = 0; i < decomposed.length();) {
    const UChar32 c = decomposed.char32At(i);
    i += U16_LENGTH(c);
    if (u_charType(c) == U_NON_SPACING_MARK) continue;
    if (u_isUWhiteSpace(c)) {
      pending_space = kept.length() > 0;
      continue;
    }
    if (!u_isalnum(c)) continue;  // punctuation, hyphens, symbols
    if (pending_space) {
      kept.append(static_cast<UChar>(' '));
      pending_space = false;
    }
    kept.append(c);
  }
  const icu::UnicodeString composed = nfc().normalize(kept, status);
  if (U_FAILURE(status)) throw Error(ErrorCode::Internal, "ICU normalization failed");
  std::string out;
  composed.toUTF8String(out);
  return out;
}

std::u32string to_code_points(std::string_view utf8) {
  const icu::UnicodeString text =
      icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  std::u32string out;
  out.reserve(static_cast<std::size_t>(text.length()));
  for (int32_t i = 0; i < text.length();) {
    const UChar32 c = text.char32At(i);
    i += U16_LENGTH(c);
    out.push_back(static_cast<char32_t>(c));
  }
  return out;
}

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      const std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + cost});
      diag = up;
    }
  }
  return row[b.size()];
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  return levenshtein(to_code_points(a), to_code_points(b));
}

double levenshtein_similarity(std::string_view a, std::string_view b) {
  return lev_similarity(to_code_points(a), to_code_points(b));
}

double jaccard_tokens(std::string_view a, std::string_view b) {
  return jaccard_normalized(normalize_title(a), normalize_title(b));
}

double title_similarity(std::string_view a, std::string_view b) {
  return prepared_similarity(prepare(std::string(a)), prepare(std::string(b)));
}

const char* link_method_name(LinkMethod method) {
  return method == LinkMethod::Doi ? "doi" : "fuzzy";
}

LinkResult link_records(const std::vector<PaperRecord>& left,
                        const std::vector<PaperRecord>& right, const LinkConfig& config) {
  if (!(config.sim_threshold >= 0.0 && config.sim_threshold <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "sim_threshold must be in [0, 1]");

  LinkResult result;
  std::vector<char> left_used(left.size(), 0), right_used(right.size(), 0);

  // Phase 1: exact DOI join.
  std::unordered_map<std::string, std::vector<std::size_t>> right_by_doi;
  for (std::size_t j = 0; j < right.size(); ++j)
    if (right[j].doi) right_by_doi[*right[j].doi].push_back(j);
  for (std::size_t i = 0; i < left.size(); ++i) {
    if (!left[i].doi) continue;
    auto it = right_by_doi.find(*left[i].doi);
    if (it == right_by_doi.end()) continue;
    for (auto j : it->second) {
      if (right_used[j]) continue;
      right_used[j] = left_used[i] = 1;
      result.pairs.push_back({left[i].paper_id, right[j].paper_id, LinkMethod::Doi, 1.0});
      break;
    }
  }

  // Phase 2: fuzzy titles within publication-year blocks.
  std::map<int, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> blocks;
  for (std::size_t i = 0; i < left.size(); ++i)
    if (!left_used[i]) blocks[left[i].pub_year].first.push_back(i);
  for (std::size_t j = 0; j < right.size(); ++j)
    if (!right_used[j]) blocks[right[j].pub_year].second.push_back(j);

  struct Candidate {
    double similarity;
    std::size_t left;
    std::size_t right;
  };
  std::vector<std::pair<const std::vector<std::size_t>*, const std::vector<std::size_t>*>> work;
  for (const auto& [year, members] : blocks)
    if (!members.first.empty() && !members.second.empty())
      work.emplace_back(&members.first, &members.second);

  std::vector<std::vector<Candidate>> per_block(work.size());
  std::atomic<std::size_t> next{0};
  auto score_blocks = [&] {
    for (std::size_t b = next++; b < work.size(); b = next++) {
      const auto& ls = *work[b].first;
      const auto& rs = *work[b].second;
      std::vector<PreparedTitle> rt;
      rt.reserve(rs.size());
      for (auto j : rs) rt.push_back(prepare(right[j].title));
      for (auto i : ls) {
        const auto lt = prepare(left[i].title);
        for (std::size_t r = 0; r < rs.size(); ++r) {
          const double s = prepared_similarity(lt, rt[r]);
          if (s >= config.sim_threshold) per_block[b].push_back({s, i, rs[r]});
        }
      }
    }
  };
  const unsigned threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                               : config.threads;
  if (threads <= 1 || work.size() <= 1) {
    score_blocks();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < std::min<std::size_t>(threads, work.size()); ++t)
      pool.emplace_back(score_blocks);
  }

  std::vector<Candidate> candidates;
  for (auto& block : per_block) candidates.insert(candidates.end(), block.begin(), block.end());
  std::sort(candidates.begin(), candidates.end(), [&](const Candidate& x, const Candidate& y) {
    if (x.similarity != y.similarity) return x.similarity > y.similarity;
    if (left[x.left].paper_id != left[y.left].paper_id)
      return left[x.left].paper_id < left[y.left].paper_id;
    return right[x.right].paper_id < right[y.right].paper_id;
  });
  for (const auto& c : candidates) {
    if (left_used[c.left] || right_used[c.right]) continue;
    left_used[c.left] = right_used[c.right] = 1;
    result.pairs.push_back({left[c.left].paper_id, right[c.right].paper_id, LinkMethod::Fuzzy,
                            c.similarity});
  }

  for (std::size_t i = 0; i < left.size(); ++i)
    if (!left_used[i]) result.unmatched_left.push_back(left[i].paper_id);
  for (std::size_t j = 0; j < right.size(); ++j)
    if (!right_used[j]) result.unmatched_right.push_back(right[j].paper_id);
  return result;
}

void write_pairs_csv(const LinkResult& result, const std::string& path) {
  auto out = open_output(path);
  write_csv_row(out, {"left_id", "right_id", "method", "similarity"});
  for (const auto& p : result.pairs)
    write_csv_row(out, {p.left_id, p.right_id, link_method_name(p.method), format_double(p.similarity)});
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path);
}

void write_unmatched_csv(const std::vector<std::string>& ids, const std::string& path) {
  auto out = open_output(path);
  write_csv_row(out, {"paper_id"});
  for (const auto& id : ids) write_csv_row(out, {id});
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path);
}

}  // namespace retraction::linkage
