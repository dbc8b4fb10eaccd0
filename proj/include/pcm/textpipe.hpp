#pragma once

#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace pcm {

// Tokenizer rule identifier. The rule is frozen: UTF-8 decode with U+FFFD
// replacement, ASCII + Latin-1 letter folding, tokens are runs of
// [a-z0-9] plus code points >= U+0080 (excluding the Latin-1 punctuation
// block U+00A0..U+00BF, the multiplication/division signs, and U+FFFD).
inline constexpr const char* kTokenRule = "ascii-fold-v1";

// shipped word lists, versioned by content hash (see builtin_lists.cpp)
const std::string& builtin_stopwords_text();
const std::string& builtin_lemmas_text();

struct PipelineConfig {
  std::vector<std::string> stopwords;                             // list order
  std::unordered_set<std::string> stopword_set;                   // lookup
  std::vector<std::pair<std::string, std::string>> lemma_entries; // list order
  std::unordered_map<std::string, std::string> lemma_table;       // lookup
  std::string stopword_list_id;  // e.g. "stopwords-en-v1/<16-hex>"
  std::string lemma_table_id;    // e.g. "lemma-en-v1/<16-hex>"
  std::string token_rule = kTokenRule;
  int k = 100;
};

// pipeline backed by the shipped lists
PipelineConfig default_pipeline(int k = 100);

// pipeline with list overrides loaded from files ("token" per line for
// stopwords, "surface→lemma" per line for lemmas); empty path keeps the
// shipped list for that slot
PipelineConfig pipeline_from_files(const std::string& stopwords_path,
                                   const std::string& lemmas_path, int k = 100);

// casefold, tokenize, drop digit/stopword tokens, lemmatize (exception
// table, then suffix rules, iterated to a fixpoint), re-filter
std::vector<std::string> normalize(std::string_view text, const PipelineConfig& config);

// single lemmatizer step exposed for tests
std::string lemmatize(const std::string& token, const PipelineConfig& config);

struct FrequencyTable {
  std::map<std::string, long long> counts;
  long long total = 0;
};

FrequencyTable frequency_table(const std::vector<std::vector<std::string>>& token_lists);

struct TopKSet {
  std::vector<std::string> words;  // ordered by (-count, token)
};

TopKSet top_k(const FrequencyTable& table, int k);

}  // namespace pcm
