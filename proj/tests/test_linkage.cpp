#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "retraction/linkage.hpp"

using namespace retraction;
using namespace retraction::linkage;

namespace {

PaperRecord rec(std::string id, std::string title, int year, std::optional<std::string> doi = {}) {
  PaperRecord r;
  r.paper_id = std::move(id);
  r.title = std::move(title);
  r.pub_year = year;
  r.venue = "v";
  r.discipline = "d";
  r.doi = std::move(doi);
  return r;
}

std::u32string random_word(std::mt19937_64& rng, std::size_t max_len, const std::u32string& alphabet) {
  std::u32string s(rng() % (max_len + 1), U'a');
  for (auto& c : s) c = alphabet[rng() % alphabet.size()];
  return s;
}

std::string utf8(const std::u32string& s) {
  std::string out;
  for (char32_t c : s) {
    if (c < 0x80) {
      out += static_cast<char>(c);
    } else if (c < 0x800) {
      out += static_cast<char>(0xC0 | (c >> 6));
      out += static_cast<char>(0x80 | (c & 0x3F));
    } else {
      out += static_cast<char>(0xE0 | (c >> 12));
      out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (c & 0x3F));
    }
  }
  return out;
}

}  // namespace

TEST_CASE("title normalization examples") {
  CHECK(normalize_title("The cow-bell") == "the cowbell");
  CHECK(normalize_title("The cowbell") == "the cowbell");
  CHECK(normalize_title("") == "");
  CHECK(normalize_title("  Déjà   Vu! ") == "deja vu");
  CHECK(normalize_title("Ünïcödé\tTITLE:\n a–b") == "unicode title ab");
  CHECK(normalize_title("!!! ... ---") == "");
}

TEST_CASE("normalization is idempotent") {
  const std::u32string alphabet = U"aZé- .,!ñÅ\t9";
  std::mt19937_64 rng(17);
  for (int i = 0; i < 2000; ++i) {
    const auto s = utf8(random_word(rng, 20, alphabet));
    const auto once = normalize_title(s);
    CHECK(normalize_title(once) == once);
  }
}

TEST_CASE("levenshtein examples") {
  CHECK(levenshtein("abc", "abc") == 0);
  CHECK(levenshtein("The cowbell", "The cow-bell") == 1);
  CHECK(levenshtein("", "abc") == 3);
  CHECK(levenshtein("kitten", "sitting") == 3);
  CHECK(levenshtein("é", "e") == 1);
  CHECK(levenshtein("naïve", "naive") == 1);
}

TEST_CASE("levenshtein agrees with the recursive oracle") {
  const std::u32string alphabet = U"abcé";
  std::mt19937_64 rng(99);
  for (int i = 0; i < 3000; ++i) {
    const auto a = random_word(rng, 12, alphabet);
    const auto b = random_word(rng, 12, alphabet);
    CHECK(levenshtein(a, b) == oracle::levenshtein(a, b));
    CHECK(levenshtein(utf8(a), utf8(b)) == oracle::levenshtein(a, b));
  }
}

TEST_CASE("levenshtein metric properties") {
  const std::u32string alphabet = U"abxy";
  std::mt19937_64 rng(5);
  for (int i = 0; i < 2000; ++i) {
    const auto a = random_word(rng, 10, alphabet);
    const auto b = random_word(rng, 10, alphabet);
    const auto c = random_word(rng, 10, alphabet);
    CHECK(levenshtein(a, b) == levenshtein(b, a));
    CHECK(levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c));
    CHECK((levenshtein(a, b) == 0) == (a == b));
  }
}

TEST_CASE("similarity measures") {
  CHECK(jaccard_tokens("red blue", "blue green") == doctest::Approx(1.0 / 3.0));
  CHECK(jaccard_tokens("same words here", "same words here") == 1.0);
  CHECK(jaccard_tokens("", "") == 1.0);
  CHECK(jaccard_tokens("a", "") == 0.0);
  CHECK(levenshtein_similarity("", "") == 1.0);
  CHECK(levenshtein_similarity("abcd", "abce") == doctest::Approx(0.75));
  CHECK(title_similarity("The cowbell", "The cow-bell") == 1.0);
  CHECK(title_similarity("word order swapped", "swapped order word") == 1.0);
}

TEST_CASE("DOI join comes first") {
  std::vector<PaperRecord> left{rec("L1", "Completely different", 2001, "10.1/x"),
                                rec("L2", "The cowbell", 2003)};
  std::vector<PaperRecord> right{rec("R1", "Nothing alike", 1999, "10.1/x"),
                                 rec("R2", "The cow-bell", 2003)};
  const auto r = link_records(left, right);
  REQUIRE(r.pairs.size() == 2);
  CHECK(r.pairs[0].left_id == "L1");
  CHECK(r.pairs[0].right_id == "R1");
  CHECK(r.pairs[0].method == LinkMethod::Doi);
  CHECK(r.pairs[0].similarity == 1.0);
  CHECK(r.pairs[1].left_id == "L2");
  CHECK(r.pairs[1].method == LinkMethod::Fuzzy);
  CHECK(r.pairs[1].similarity >= 0.9);
  CHECK(r.unmatched_left.empty());
  CHECK(r.unmatched_right.empty());
}

TEST_CASE("below-threshold and cross-year pairs stay unmatched") {
  std::vector<PaperRecord> left{rec("L1", "Protein folding dynamics", 2001), rec("L2", "The cowbell", 2004)};
  std::vector<PaperRecord> right{rec("R1", "Galaxy rotation curves", 2001), rec("R2", "The cowbell", 2005)};
  const auto r = link_records(left, right);
  CHECK(r.pairs.empty());
  CHECK(r.unmatched_left == std::vector<std::string>{"L1", "L2"});
  CHECK(r.unmatched_right == std::vector<std::string>{"R1", "R2"});
}

TEST_CASE("greedy assignment breaks ties by left id") {
  std::vector<PaperRecord> left{rec("L2", "Same title", 2000), rec("L1", "Same title", 2000)};
  std::vector<PaperRecord> right{rec("R1", "Same title", 2000)};
  const auto r = link_records(left, right);
  REQUIRE(r.pairs.size() == 1);
  CHECK(r.pairs[0].left_id == "L1");
  CHECK(r.unmatched_left == std::vector<std::string>{"L2"});
}

TEST_CASE("linking is one-to-one and thread independent") {
  std::mt19937_64 rng(8);
  const std::u32string alphabet = U"abcde ";
  std::vector<PaperRecord> left, right;
  for (int i = 0; i < 150; ++i) {
    const auto title = utf8(random_word(rng, 14, alphabet));
    const int year = 2000 + static_cast<int>(rng() % 3);
    left.push_back(rec("L" + std::to_string(i), title, year, rng() % 5 == 0 ? std::optional<std::string>("10.9/" + std::to_string(i % 40)) : std::nullopt));
    right.push_back(rec("R" + std::to_string(i), utf8(random_word(rng, 14, alphabet)), year,
                        rng() % 5 == 0 ? std::optional<std::string>("10.9/" + std::to_string(i % 40)) : std::nullopt));
  }
  const auto a = link_records(left, right, {0.6, 1});
  const auto b = link_records(left, right, {0.6, 4});
  CHECK(a.pairs.size() <= std::min(left.size(), right.size()));
  std::set<std::string> ls, rs;
  for (const auto& p : a.pairs) {
    CHECK(ls.insert(p.left_id).second);
    CHECK(rs.insert(p.right_id).second);
    if (p.method == LinkMethod::Doi) CHECK(p.similarity == 1.0);
    else CHECK(p.similarity >= 0.6);
  }
  CHECK(a.pairs.size() + a.unmatched_left.size() == left.size());
  CHECK(a.pairs.size() + a.unmatched_right.size() == right.size());
  REQUIRE(a.pairs.size() == b.pairs.size());
  for (std::size_t i = 0; i < a.pairs.size(); ++i) {
    CHECK(a.pairs[i].left_id == b.pairs[i].left_id);
    CHECK(a.pairs[i].right_id == b.pairs[i].right_id);
    CHECK(a.pairs[i].similarity == b.pairs[i].similarity);
  }
}

TEST_CASE("pair CSV layout") {
  std::vector<PaperRecord> left{rec("L1", "x", 2000, "10.1/a")};
  std::vector<PaperRecord> right{rec("R1", "y", 2000, "10.1/a")};
  const auto r = link_records(left, right);
  write_pairs_csv(r, "pairs_test.csv");
  std::ifstream in("pairs_test.csv");
  std::stringstream s;
  s << in.rdbuf();
  CHECK(s.str().rfind("left_id,right_id,method,similarity\nL1,R1,doi,1", 0) == 0);
  std::remove("pairs_test.csv");
}
