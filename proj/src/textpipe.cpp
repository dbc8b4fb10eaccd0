#include "pcm/textpipe.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "pcm/errors.hpp"
#include "pcm/hash.hpp"

namespace pcm {

namespace {

bool is_ascii_vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

bool has_vowel(std::string_view s) {
  for (char c : s)
    if (is_ascii_vowel(c)) return true;
  return false;
}

bool all_ascii(std::string_view s) {
  for (unsigned char c : s)
    if (c >= 0x80) return false;
  return true;
}

bool digits_only(std::string_view s) {
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return !s.empty();
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

// drop a trailing doubled consonant left by suffix stripping ("hopp" -> "hop")
std::string undouble(std::string s) {
  if (s.size() >= 2) {
    char last = s[s.size() - 1];
    if (last == s[s.size() - 2] && !is_ascii_vowel(last) && last != 'l' && last != 's' &&
        last != 'z' && s.size() - 1 >= 3) {
      s.pop_back();
    }
  }
  return s;
}

uint32_t fold_codepoint(uint32_t cp) {
  if (cp >= 0x41 && cp <= 0x5A) return cp + 0x20;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;  // Latin-1 letters
  return cp;
}

bool is_token_codepoint(uint32_t cp) {
  if ((cp >= 'a' && cp <= 'z') || (cp >= '0' && cp <= '9')) return true;
  if (cp >= 0x80) {
    if (cp == 0xFFFD) return false;
    if (cp >= 0xA0 && cp <= 0xBF) return false;  // Latin-1 punctuation block
    if (cp == 0xD7 || cp == 0xF7) return false;  // multiplication / division
    return true;
  }
  return false;
}

void append_utf8(std::string& out, uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// decode the next code point; invalid bytes yield U+FFFD and advance by one,
// so malformed input degrades to token separators rather than failing
uint32_t next_codepoint(std::string_view text, size_t& i) {
  unsigned char b0 = static_cast<unsigned char>(text[i]);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int extra;
  uint32_t cp;
  if ((b0 & 0xE0) == 0xC0) {
    extra = 1;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    extra = 2;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    extra = 3;
    cp = b0 & 0x07;
  } else {
    ++i;
    return 0xFFFD;
  }
  if (i + static_cast<size_t>(extra) >= text.size()) {
    // truncated sequence
    ++i;
    return 0xFFFD;
  }
  uint32_t out = cp;
  for (int k = 1; k <= extra; ++k) {
    unsigned char b = static_cast<unsigned char>(text[i + k]);
    if ((b & 0xC0) != 0x80) {
      ++i;
      return 0xFFFD;
    }
    out = (out << 6) | (b & 0x3F);
  }
  // reject overlong encodings and surrogate range
  if ((extra == 1 && out < 0x80) || (extra == 2 && out < 0x800) ||
      (extra == 3 && out < 0x10000) || (out >= 0xD800 && out <= 0xDFFF) || out > 0x10FFFF) {
    ++i;
    return 0xFFFD;
  }
  i += 1 + extra;
  return out;
}

std::string lemma_pass(const std::string& w, const PipelineConfig& config) {
  auto it = config.lemma_table.find(w);
  if (it != config.lemma_table.end()) return it->second;
  // suffix rules are defined for ASCII tokens only
  if (!all_ascii(w)) return w;
  size_t n = w.size();
  if (n >= 5 && ends_with(w, "ies")) return w.substr(0, n - 3) + "y";
  if (n >= 5 && ends_with(w, "sses")) return w.substr(0, n - 2);
  if (n >= 5 && (ends_with(w, "xes") || ends_with(w, "ches") || ends_with(w, "shes") ||
                 ends_with(w, "zzes"))) {
    return w.substr(0, n - 2);
  }
  if (n >= 4 && ends_with(w, "s") && !ends_with(w, "ss") && !ends_with(w, "us") &&
      !ends_with(w, "is")) {
    return w.substr(0, n - 1);
  }
  if (n >= 5 && ends_with(w, "eed")) {
    if (has_vowel(std::string_view(w).substr(0, n - 3))) return w.substr(0, n - 1);
    return w;
  }
  if (n >= 6 && ends_with(w, "ing") && has_vowel(std::string_view(w).substr(0, n - 3))) {
    return undouble(w.substr(0, n - 3));
  }
  if (n >= 5 && ends_with(w, "ed") && has_vowel(std::string_view(w).substr(0, n - 2))) {
    return undouble(w.substr(0, n - 2));
  }
  return w;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  size_t start = 0;
  while (start <= text.size()) {
    size_t nl = text.find('\n', start);
    if (nl == std::string::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

void load_stopwords(PipelineConfig& config, const std::string& text, const std::string& id) {
  config.stopwords.clear();
  config.stopword_set.clear();
  for (auto& line : split_lines(text)) {
    if (line.empty()) continue;
    config.stopwords.push_back(line);
    config.stopword_set.insert(line);
  }
  config.stopword_list_id = id;
}

void load_lemmas(PipelineConfig& config, const std::string& text, const std::string& id) {
  config.lemma_entries.clear();
  config.lemma_table.clear();
  static const std::string arrow = "\xE2\x86\x92";  // U+2192
  for (auto& line : split_lines(text)) {
    if (line.empty()) continue;
    size_t pos = line.find(arrow);
    if (pos == std::string::npos) {
      throw error(errc::config_error, "lemma entry missing arrow: " + line);
    }
    std::string surface = line.substr(0, pos);
    std::string lemma = line.substr(pos + arrow.size());
    if (surface.empty() || lemma.empty()) {
      throw error(errc::config_error, "bad lemma entry: " + line);
    }
    config.lemma_entries.emplace_back(surface, lemma);
    config.lemma_table[surface] = lemma;
  }
  config.lemma_table_id = id;
}

std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error(errc::io_failure, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

PipelineConfig default_pipeline(int k) {
  PipelineConfig config;
  config.k = k;
  load_stopwords(config, builtin_stopwords_text(),
                 "stopwords-en-v1/" + sha16(builtin_stopwords_text()));
  load_lemmas(config, builtin_lemmas_text(), "lemma-en-v1/" + sha16(builtin_lemmas_text()));
  return config;
}

PipelineConfig pipeline_from_files(const std::string& stopwords_path,
                                   const std::string& lemmas_path, int k) {
  PipelineConfig config = default_pipeline(k);
  if (!stopwords_path.empty()) {
    std::string bytes = read_file_bytes(stopwords_path);
    load_stopwords(config, bytes, "file/" + sha16(bytes));
  }
  if (!lemmas_path.empty()) {
    std::string bytes = read_file_bytes(lemmas_path);
    load_lemmas(config, bytes, "file/" + sha16(bytes));
  }
  return config;
}

std::string lemmatize(const std::string& token, const PipelineConfig& config) {
  std::string w = token;
  for (int i = 0; i < 10; ++i) {
    std::string next = lemma_pass(w, config);
    if (next == w) return w;
    w = std::move(next);
  }
  return w;
}

std::vector<std::string> normalize(std::string_view text, const PipelineConfig& config) {
  std::vector<std::string> raw_tokens;
  std::string cur;
  size_t i = 0;
  while (i < text.size()) {
    uint32_t cp = fold_codepoint(next_codepoint(text, i));
    if (is_token_codepoint(cp)) {
      append_utf8(cur, cp);
    } else if (!cur.empty()) {
      raw_tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) raw_tokens.push_back(std::move(cur));

  std::vector<std::string> out;
  out.reserve(raw_tokens.size());
  for (auto& tok : raw_tokens) {
    if (digits_only(tok)) continue;
    if (config.stopword_set.count(tok)) continue;
    std::string lemma = lemmatize(tok, config);
    if (digits_only(lemma) || config.stopword_set.count(lemma)) continue;
    out.push_back(std::move(lemma));
  }
  return out;
}

FrequencyTable frequency_table(const std::vector<std::vector<std::string>>& token_lists) {
  FrequencyTable table;
  for (const auto& list : token_lists) {
    for (const auto& tok : list) {
      ++table.counts[tok];
      ++table.total;
    }
  }
  return table;
}

TopKSet top_k(const FrequencyTable& table, int k) {
  TopKSet result;
  if (k <= 0) return result;
  // map iteration is token-ascending; stable sort by count keeps that as tiebreak
  std::vector<std::pair<std::string, long long>> items(table.counts.begin(),
                                                       table.counts.end());
  std::stable_sort(items.begin(), items.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  size_t take = std::min<size_t>(static_cast<size_t>(k), items.size());
  result.words.reserve(take);
  for (size_t j = 0; j < take; ++j) result.words.push_back(items[j].first);
  return result;
}

}  // namespace pcm
