#include "retraction/matching.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "retraction/csv.hpp"
#include "retraction/error.hpp"

namespace retraction::matching {

TierSpec TierSpec::from_percentiles(std::span<const long long> values,
                                    std::span<const double> percentiles) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "no values to derive tiers from");
  std::vector<long long> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  TierSpec spec;
  for (double pct : percentiles) {
    if (!(pct >= 0.0 && pct <= 100.0))
      throw Error(ErrorCode::InvalidArgument, "percentile outside [0, 100]");
    const double pos = pct / 100.0 * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double q = static_cast<double>(sorted[lo]) +
                     (pos - static_cast<double>(lo)) * static_cast<double>(sorted[hi] - sorted[lo]);
    const auto cut = static_cast<long long>(std::floor(q)) + 1;
    if (cut > 0) spec.boundaries.push_back(cut);
  }
  std::sort(spec.boundaries.begin(), spec.boundaries.end());
  spec.boundaries.erase(std::unique(spec.boundaries.begin(), spec.boundaries.end()),
                        spec.boundaries.end());
  return spec;
}

void TierSpec::validate() const {
  long long prev = 0;
  for (auto b : boundaries) {
    if (b <= prev)
      throw Error(ErrorCode::InvalidArgument, "tier boundaries must be positive and ascending");
    prev = b;
  }
}

std::size_t TierSpec::tier_of(long long pre_citations) const {
  return static_cast<std::size_t>(
      std::upper_bound(boundaries.begin(), boundaries.end(), pre_citations) - boundaries.begin());
}

std::string TierSpec::label(std::size_t tier) const {
  const long long lo = tier == 0 ? 0 : boundaries.at(tier - 1);
  const std::string hi = tier < boundaries.size() ? std::to_string(boundaries[tier]) : "inf";
  return "[" + std::to_string(lo) + "," + hi + ")";
}

long long pre_retraction_citations(const PaperRecord& paper, int retraction_year) {
  if (retraction_year < paper.pub_year)
    throw Error(ErrorCode::YearOrderViolation,
                paper.paper_id + ": retraction year " + std::to_string(retraction_year) +
                    " precedes publication year " + std::to_string(paper.pub_year));
  long long total = 0;
  for (auto it = paper.citations_by_year.lower_bound(paper.pub_year);
       it != paper.citations_by_year.end() && it->first <= retraction_year; ++it)
    total += it->second;
  return total;
}

long long post_retraction_citations(const PaperRecord& paper, int retraction_year,
                                    int horizon_years) {
  if (horizon_years < 1) throw Error(ErrorCode::InvalidArgument, "horizon_years must be >= 1");
  long long total = 0;
  for (auto it = paper.citations_by_year.lower_bound(retraction_year + 1);
       it != paper.citations_by_year.end() && it->first <= retraction_year + horizon_years; ++it)
    total += it->second;
  return total;
}

MatchKey match_key(const PaperRecord& paper, int retraction_year) {
  return MatchKey{paper.pub_year, casefold_key(paper.venue), casefold_key(paper.discipline),
                  pre_retraction_citations(paper, retraction_year)};
}

CorpusIndex::CorpusIndex(const std::vector<PaperRecord>& corpus) : corpus_(&corpus) {
  by_id_.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& p = corpus[i];
    if (!by_id_.emplace(p.paper_id, i).second)
      throw Error(ErrorCode::InvalidArgument, "duplicate paper_id in corpus: " + p.paper_id);
    if (!p.is_retracted())
      controls_by_block_[{p.pub_year, casefold_key(p.venue), casefold_key(p.discipline)}]
          .push_back(i);
  }
}

const PaperRecord* CorpusIndex::find(std::string_view paper_id) const {
  auto it = by_id_.find(std::string(paper_id));
  return it == by_id_.end() ? nullptr : &(*corpus_)[it->second];
}

const PaperRecord& CorpusIndex::at(std::string_view paper_id) const {
  if (const auto* p = find(paper_id)) return *p;
  throw Error(ErrorCode::InvalidArgument, "unknown paper_id: " + std::string(paper_id));
}

std::optional<MatchedSet> CorpusIndex::find_controls(const PaperRecord& retracted) const {
  if (!retracted.retraction_date)
    throw Error(ErrorCode::MissingRetractionDate, retracted.paper_id + " has no retraction date");
  const int ry = retracted.retraction_date->year;
  const long long target = pre_retraction_citations(retracted, ry);

  auto block = controls_by_block_.find(
      {retracted.pub_year, casefold_key(retracted.venue), casefold_key(retracted.discipline)});
  if (block == controls_by_block_.end()) return std::nullopt;

  MatchedSet set{retracted.paper_id, {}, ry};
  for (auto i : block->second) {
    const auto& candidate = (*corpus_)[i];
    if (candidate.paper_id == retracted.paper_id) continue;
    if (pre_retraction_citations(candidate, ry) == target) set.control_ids.push_back(candidate.paper_id);
  }
  if (set.control_ids.empty()) return std::nullopt;
  return set;
}

MatchingRun match_all(std::span<const PaperRecord> retracted, const CorpusIndex& index,
                      unsigned threads) {
  std::vector<std::optional<MatchedSet>> found(retracted.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, retracted.size())));

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < retracted.size(); i = next++) {
      try {
        found[i] = index.find_controls(retracted[i]);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  MatchingRun run;
  for (std::size_t i = 0; i < retracted.size(); ++i) {
    if (found[i])
      run.matched.push_back(std::move(*found[i]));
    else
      run.unmatched_ids.push_back(retracted[i].paper_id);
  }
  return run;
}

double outcome1(long long post_retracted, std::span<const long long> post_controls) {
  if (post_controls.empty()) throw Error(ErrorCode::InvalidArgument, "no controls");
  double sum = 0;
  for (auto m : post_controls) sum += static_cast<double>(post_retracted - m);
  return sum / static_cast<double>(post_controls.size());
}

double outcome2(long long post_retracted, std::span<const long long> post_controls,
                double epsilon) {
  if (post_controls.empty()) throw Error(ErrorCode::InvalidArgument, "no controls");
  if (!(epsilon > 0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  const double num = static_cast<double>(post_retracted) + epsilon;
  double sum = 0;
  for (auto m : post_controls) {
    // log of the ratio, not a difference of logs, so equal counts give exactly 0
    sum += std::log(num / (static_cast<double>(m) + epsilon));
  }
  return sum / static_cast<double>(post_controls.size());
}

namespace {

std::vector<long long> control_posts(const MatchedSet& matched, const CorpusIndex& index,
                                     int horizon_years) {
  std::vector<long long> posts;
  posts.reserve(matched.control_ids.size());
  for (const auto& id : matched.control_ids)
    posts.push_back(post_retraction_citations(index.at(id), matched.retraction_year, horizon_years));
  return posts;
}

}  // namespace

double outcome1(const MatchedSet& matched, const CorpusIndex& index, int horizon_years) {
  const auto post_r =
      post_retraction_citations(index.at(matched.retracted_id), matched.retraction_year, horizon_years);
  return outcome1(post_r, control_posts(matched, index, horizon_years));
}

double outcome2(const MatchedSet& matched, const CorpusIndex& index, double epsilon,
                int horizon_years) {
  const auto post_r =
      post_retraction_citations(index.at(matched.retracted_id), matched.retraction_year, horizon_years);
  return outcome2(post_r, control_posts(matched, index, horizon_years), epsilon);
}

OutcomeRow compute_outcome(const MatchedSet& matched, const CorpusIndex& index,
                           const OutcomeConfig& config) {
  const auto& retracted = index.at(matched.retracted_id);
  const auto post_r =
      post_retraction_citations(retracted, matched.retraction_year, config.horizon_years);
  const auto posts = control_posts(matched, index, config.horizon_years);

  OutcomeRow row;
  row.retracted_id = matched.retracted_id;
  row.pre_citations = pre_retraction_citations(retracted, matched.retraction_year);
  row.tier = config.tiers.tier_of(row.pre_citations);
  row.tier_label = config.tiers.label(row.tier);
  row.outcome1 = outcome1(post_r, posts);
  row.outcome2 = outcome2(post_r, posts, config.epsilon);
  row.n_controls = matched.control_ids.size();
  return row;
}

std::vector<OutcomeRow> compute_outcomes(std::span<const MatchedSet> matched,
                                         const CorpusIndex& index, const OutcomeConfig& config) {
  config.tiers.validate();
  std::vector<OutcomeRow> rows;
  rows.reserve(matched.size());
  for (const auto& m : matched) rows.push_back(compute_outcome(m, index, config));
  return rows;
}

std::vector<std::vector<OutcomeRow>> stratify(std::span<const OutcomeRow> rows,
                                              const TierSpec& tiers) {
  tiers.validate();
  std::vector<std::vector<OutcomeRow>> out(tiers.tier_count());
  for (const auto& r : rows) {
    OutcomeRow copy = r;
    copy.tier = tiers.tier_of(r.pre_citations);
    copy.tier_label = tiers.label(copy.tier);
    out[copy.tier].push_back(std::move(copy));
  }
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "median of empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<TierSummary> summarize_tiers(const std::vector<std::vector<OutcomeRow>>& stratified,
                                         const TierSpec& tiers) {
  std::vector<TierSummary> out;
  for (std::size_t t = 0; t < stratified.size(); ++t) {
    TierSummary s;
    s.tier = t;
    s.label = tiers.label(t);
    s.n = stratified[t].size();
    if (s.n > 0) {
      std::vector<double> o1, o2;
      for (const auto& r : stratified[t]) {
        o1.push_back(r.outcome1);
        o2.push_back(r.outcome2);
      }
      s.outcome1_mean = std::accumulate(o1.begin(), o1.end(), 0.0) / static_cast<double>(s.n);
      s.outcome2_mean = std::accumulate(o2.begin(), o2.end(), 0.0) / static_cast<double>(s.n);
      s.outcome2_max = *std::max_element(o2.begin(), o2.end());
      s.outcome2_median = median(std::move(o2));
    }
    out.push_back(std::move(s));
  }
  return out;
}

void write_matched_csv(std::span<const MatchedSet> matched, const std::string& path) {
  auto out = open_output(path);
  write_csv_row(out, {"retracted_id", "control_id"});
  for (const auto& m : matched)
    for (const auto& c : m.control_ids) write_csv_row(out, {m.retracted_id, c});
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path);
}

std::vector<MatchedSet> read_matched_csv(const std::string& path, const CorpusIndex& index) {
  auto in = open_input(path);
  CsvReader reader(in);
  std::vector<std::string> fields;
  if (!reader.next(fields)) throw Error(ErrorCode::SchemaViolation, path + ": missing header row");
  static constexpr std::string_view required[] = {"retracted_id", "control_id"};
  CsvHeader header(fields, required, path);
  const auto ri = header.index("retracted_id");
  const auto ci = header.index("control_id");

  std::vector<MatchedSet> sets;
  std::unordered_map<std::string, std::size_t> position;
  std::size_t row = 0;
  while (reader.next(fields)) {
    ++row;
    if (fields.size() == 1 && trim(fields[0]).empty()) continue;
    if (fields.size() <= std::max(ri, ci))
      throw Error(ErrorCode::SchemaViolation, path + ": row " + std::to_string(row) + ": too few fields");
    const std::string rid(trim(fields[ri]));
    const std::string cid(trim(fields[ci]));
    const auto* r = index.find(rid);
    if (!r || !r->retraction_date)
      throw Error(ErrorCode::SchemaViolation, path + ": row " + std::to_string(row) +
                                                  ", field 'retracted_id': not a retracted paper in the corpus: " + rid);
    const auto* c = index.find(cid);
    if (!c || c->is_retracted())
      throw Error(ErrorCode::SchemaViolation, path + ": row " + std::to_string(row) +
                                                  ", field 'control_id': not a non-retracted paper in the corpus: " + cid);
    auto [it, inserted] = position.emplace(rid, sets.size());
    if (inserted) sets.push_back(MatchedSet{rid, {}, r->retraction_date->year});
    sets[it->second].control_ids.push_back(cid);
  }
  return sets;
}

void write_outcomes_csv(std::span<const OutcomeRow> rows, const std::string& path) {
  auto out = open_output(path);
  write_csv_row(out, {"retracted_id", "tier", "outcome1", "outcome2", "n_controls"});
  for (const auto& r : rows)
    write_csv_row(out, {r.retracted_id, r.tier_label, format_double(r.outcome1),
                        format_double(r.outcome2), std::to_string(r.n_controls)});
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path);
}

std::vector<OutcomeRow> read_outcomes_csv(const std::string& path) {
  auto in = open_input(path);
  CsvReader reader(in);
  std::vector<std::string> fields;
  if (!reader.next(fields)) throw Error(ErrorCode::SchemaViolation, path + ": missing header row");
  static constexpr std::string_view required[] = {"retracted_id", "tier", "outcome1", "outcome2",
                                                  "n_controls"};
  CsvHeader header(fields, required, path);
  const std::size_t cols[] = {header.index("retracted_id"), header.index("tier"),
                              header.index("outcome1"), header.index("outcome2"),
                              header.index("n_controls")};
  const std::size_t width = *std::max_element(std::begin(cols), std::end(cols)) + 1;

  auto bad = [&](std::size_t row, std::string_view field, const std::string& why) {
    return Error(ErrorCode::SchemaViolation, path + ": row " + std::to_string(row) + ", field '" +
                                                 std::string(field) + "': " + why);
  };
  std::vector<OutcomeRow> rows;
  std::map<std::string, long long> lower_bound_of;
  std::size_t row = 0;
  while (reader.next(fields)) {
    ++row;
    if (fields.size() == 1 && trim(fields[0]).empty()) continue;
    if (fields.size() < width) throw bad(row, "*", "too few fields");
    OutcomeRow r;
    r.retracted_id = std::string(trim(fields[cols[0]]));
    r.tier_label = std::string(trim(fields[cols[1]]));
    const auto o1 = parse_double(fields[cols[2]]);
    const auto o2 = parse_double(fields[cols[3]]);
    const auto nc = parse_int(fields[cols[4]]);
    if (!o1) throw bad(row, "outcome1", "not a number");
    if (!o2) throw bad(row, "outcome2", "not a number");
    if (!nc || *nc < 1) throw bad(row, "n_controls", "must be a positive integer");
    const auto& label = r.tier_label;
    const auto comma = label.find(',');
    const auto lo = label.size() > 2 && label.front() == '[' && comma != std::string::npos
                        ? parse_int(std::string_view(label).substr(1, comma - 1))
                        : std::nullopt;
    if (!lo) throw bad(row, "tier", "expected a label like [9,31): " + label);
    lower_bound_of[label] = *lo;
    r.outcome1 = *o1;
    r.outcome2 = *o2;
    r.n_controls = static_cast<std::size_t>(*nc);
    rows.push_back(std::move(r));
  }
  std::vector<std::pair<long long, std::string>> order;
  for (const auto& [label, lo] : lower_bound_of) order.emplace_back(lo, label);
  std::sort(order.begin(), order.end());
  std::map<std::string, std::size_t> tier_of;
  for (std::size_t t = 0; t < order.size(); ++t) tier_of[order[t].second] = t;
  for (auto& r : rows) r.tier = tier_of[r.tier_label];
  return rows;
}

void write_tier_summary_csv(std::span<const TierSummary> summaries, const std::string& path) {
  auto out = open_output(path);
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string{}; };
  write_csv_row(out, {"tier", "n", "outcome1_mean", "outcome2_median", "outcome2_mean", "outcome2_max"});
  for (const auto& s : summaries)
    write_csv_row(out, {s.label, std::to_string(s.n), opt(s.outcome1_mean), opt(s.outcome2_median),
                        opt(s.outcome2_mean), opt(s.outcome2_max)});
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path);
}

}  // namespace retraction::matching
