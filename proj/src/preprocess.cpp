#include "canon/preprocess.hpp"

#include <algorithm>
#include <cstdint>
#include <set>
#include <unordered_map>

#include "canon/error.hpp"
#include "canon/io.hpp"
#include "canon/stopwords_data.hpp"

namespace canon {

namespace {

struct Decoded {
  std::uint32_t cp;
  std::size_t len;
};

// Caller guarantees valid UTF-8 or tolerates replacement; malformed bytes
// decode as a single non-letter unit.
Decoded decode(std::string_view s, std::size_t i) {
  const auto c = static_cast<unsigned char>(s[i]);
  if (c < 0x80) return {c, 1};
  std::size_t len = (c & 0xE0) == 0xC0 ? 2 : (c & 0xF0) == 0xE0 ? 3 : (c & 0xF8) == 0xF0 ? 4 : 0;
  if (len == 0 || i + len > s.size()) return {0xFFFD, 1};
  std::uint32_t cp = c & (0xFF >> (len + 1));
  for (std::size_t k = 1; k < len; ++k) {
    const auto cc = static_cast<unsigned char>(s[i + k]);
    if ((cc & 0xC0) != 0x80) return {0xFFFD, 1};
    cp = (cp << 6) | (cc & 0x3F);
  }
  return {cp, len};
}

void encode(std::uint32_t cp, std::string& out) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

bool is_letter(std::uint32_t cp) {
  if ((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z')) return true;
  if (cp >= 0xC0 && cp <= 0x24F) return cp != 0xD7 && cp != 0xF7;
  return false;
}

bool is_apostrophe(std::uint32_t cp) { return cp == '\'' || cp == 0x2019; }

std::uint32_t to_lower(std::uint32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
  if ((cp >= 0x100 && cp <= 0x137) || (cp >= 0x14A && cp <= 0x177)) return cp | 1u;
  if ((cp >= 0x139 && cp <= 0x148) || (cp >= 0x179 && cp <= 0x17E)) return (cp & 1u) ? cp + 1 : cp;
  return cp;
}

}  // namespace

// ---- tokenization ---------------------------------------------------------

TokenList tokenize_words(std::string_view text, bool lowercase) {
  TokenList tokens;
  std::string current;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto d = decode(text, i);
    if (is_letter(d.cp)) {
      encode(lowercase ? to_lower(d.cp) : d.cp, current);
      i += d.len;
      continue;
    }
    if (is_apostrophe(d.cp) && !current.empty() && i + d.len < text.size() &&
        is_letter(decode(text, i + d.len).cp)) {
      current += '\'';
      i += d.len;
      continue;
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
    i += d.len;
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

namespace {

const std::set<std::string, std::less<>>& abbreviations() {
  static const std::set<std::string, std::less<>> kAbbrev = {
      "mr", "mrs", "ms", "dr", "st", "jr", "sr", "vs", "cf", "etc", "e.g", "i.e", "ch", "vol", "no", "viz", "ver"};
  return kAbbrev;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

}  // namespace

std::vector<std::string> tokenize_sentences(std::string_view text) {
  std::vector<std::string> sentences;
  std::size_t start = 0;
  auto emit = [&](std::size_t end) {
    auto s = io::trim(text.substr(start, end - start));
    if (!s.empty()) sentences.emplace_back(s);
    start = end;
  };
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c != '.' && c != '!' && c != '?') {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < text.size() && (text[end] == '.' || text[end] == '!' || text[end] == '?')) ++end;
    // closing quotes and brackets belong to the sentence they end
    while (end < text.size()) {
      if (text[end] == '"' || text[end] == '\'' || text[end] == ')' || text[end] == ']') {
        ++end;
      } else if (text.substr(end).starts_with("\xE2\x80\x9D") || text.substr(end).starts_with("\xE2\x80\x99")) {
        end += 3;
      } else {
        break;
      }
    }
    if (end < text.size() && !is_space(text[end])) {
      i = end;
      continue;
    }
    if (c == '.' && end == i + 1) {
      std::size_t w = i;
      while (w > start && !is_space(text[w - 1])) --w;
      std::string word(text.substr(w, i - w));
      std::transform(word.begin(), word.end(), word.begin(), [](unsigned char ch) { return std::tolower(ch); });
      while (!word.empty() && (word.front() == '(' || word.front() == '"')) word.erase(0, 1);
      if (abbreviations().contains(word)) {
        i = end;
        continue;
      }
    }
    emit(end);
    i = end;
  }
  emit(text.size());
  return sentences;
}

// ---- stopwords / noise ----------------------------------------------------

std::string_view default_stopwords_text() { return kStopwordsEn; }

const StopwordSet& default_stopwords() {
  static const StopwordSet kSet = parse_stopwords(kStopwordsEn);
  return kSet;
}

StopwordSet parse_stopwords(std::string_view text) {
  StopwordSet set;
  for (auto line : io::split_lines(text)) {
    const auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = io::trim(line);
    if (line.empty()) continue;
    std::string word(line);
    std::transform(word.begin(), word.end(), word.begin(), [](unsigned char c) { return std::tolower(c); });
    set.insert(std::move(word));
  }
  return set;
}

StopwordSet read_stopwords(const std::filesystem::path& file) { return parse_stopwords(io::read_file(file)); }

bool is_punctuation_token(std::string_view token) {
  if (token.empty()) return false;
  std::size_t i = 0;
  while (i < token.size()) {
    const auto d = decode(token, i);
    const bool punct = (d.cp < 0x80 && std::ispunct(static_cast<int>(d.cp))) || (d.cp >= 0x2000 && d.cp <= 0x206F) ||
                       (d.cp >= 0xA1 && d.cp <= 0xBF) || d.cp == 0xD7 || d.cp == 0xF7;
    if (!punct) return false;
    i += d.len;
  }
  return true;
}

bool is_digit_token(std::string_view token) {
  return !token.empty() && std::all_of(token.begin(), token.end(), [](unsigned char c) { return c >= '0' && c <= '9'; });
}

TokenList remove_noise(const TokenList& tokens, const StopwordSet& stopwords) {
  TokenList out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (t.empty() || stopwords.contains(t) || is_punctuation_token(t) || is_digit_token(t)) continue;
    out.push_back(t);
  }
  return out;
}

// ---- POS ------------------------------------------------------------------

const std::vector<std::string>& penn_tagset() {
  static const std::vector<std::string> kTags = {
      "CC", "CD", "DT",  "EX",  "FW",  "IN",  "JJ",  "JJR", "JJS", "LS", "MD",  "NN",
      "NNS", "NNP", "NNPS", "PDT", "POS", "PRP", "PRP$", "RB", "RBR", "RBS", "RP", "SYM",
      "TO", "UH", "VB",  "VBD", "VBG", "VBN", "VBP", "VBZ", "WDT", "WP",  "WP$", "WRB"};
  return kTags;
}

namespace {

const std::unordered_map<std::string_view, std::string_view>& lexicon() {
  static const auto kLexicon = [] {
    std::unordered_map<std::string_view, std::string_view> m;
    auto add = [&](std::string_view tag, std::initializer_list<std::string_view> words) {
      for (auto w : words) m.emplace(w, tag);
    };
    add("MD", {"can", "could", "may", "might", "must", "shall", "should", "will", "would", "ought", "shalt", "wilt"});
    add("DT", {"the", "a", "an", "this", "that", "these", "those", "every", "each", "some", "any", "no", "another",
               "either", "neither", "both", "all"});
    add("PRP", {"i", "you", "he", "she", "it", "we", "they", "me", "him", "her", "us", "them", "thee", "thou", "ye",
                "myself", "yourself", "himself", "herself", "itself", "ourselves", "themselves", "thyself", "mine"});
    add("PRP$", {"my", "your", "his", "its", "our", "their", "thy", "thine"});
    add("IN", {"of", "in", "for", "on", "with", "at", "by", "from", "into", "upon", "unto", "about", "against",
               "among", "between", "through", "during", "before", "after", "above", "below", "under", "over",
               "without", "within", "toward", "towards", "because", "if", "whether", "while", "although",
               "though", "since", "until", "unless", "as", "like", "than", "beside", "beyond"});
    add("TO", {"to"});
    add("CC", {"and", "or", "but", "nor", "yet"});
    add("WDT", {"which", "whichever"});
    add("WP", {"who", "whom", "what", "whoever"});
    add("WP$", {"whose"});
    add("WRB", {"when", "where", "why", "how", "whereby", "wherein", "whence", "whither"});
    add("EX", {"there"});
    add("RB", {"not", "never", "very", "also", "too", "then", "now", "here", "ever", "still", "again", "thus",
               "therefore", "indeed", "verily", "so", "only", "even", "always"});
    add("UH", {"o", "oh", "lo", "alas", "amen"});
    add("CD", {"one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "hundred",
               "thousand"});
    add("VBZ", {"is", "has", "does", "hath", "doth"});
    add("VBP", {"am", "are", "have", "do", "art"});
    add("VB", {"be"});
    add("VBN", {"been", "known", "given", "taken", "seen", "done", "gone", "written", "spoken", "born"});
    add("VBG", {"being"});
    add("VBD", {"was", "were", "had", "did", "said", "came", "went", "made", "gave", "took", "saw", "knew", "spoke",
                "told", "became", "began", "brought", "sent", "found", "thought", "sat", "stood", "heard", "left",
                "kept", "held", "spake", "wast", "hast", "didst"});
    return m;
  }();
  return kLexicon;
}

}  // namespace

std::string RuleTagger::tag(std::string_view token) const {
  if (auto it = lexicon().find(token); it != lexicon().end()) return std::string(it->second);
  if (token.size() > 3 && token.ends_with("ed")) return "VBD";
  if (token.size() > 4 && token.ends_with("ing")) return "VBG";
  if (token.size() > 3 && token.ends_with("ly")) return "RB";
  if (token.size() > 3 && token.ends_with("s") && !token.ends_with("ss")) return "NNS";
  return "NN";
}

std::vector<PosTaggedToken> pos_tag(const TokenList& tokens, const PosTagger& tagger) {
  std::vector<PosTaggedToken> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(PosTaggedToken{t, tagger.tag(t)});
  return out;
}

std::map<std::string, std::size_t> pos_counts(const std::vector<PosTaggedToken>& tagged) {
  std::map<std::string, std::size_t> counts;
  for (const auto& t : tagged) ++counts[t.tag];
  return counts;
}

std::string pos_counts_csv(const std::map<std::string, std::size_t>& counts) {
  std::string out = "tag,count\n";
  for (const auto& [tag, n] : counts) out += io::csv_field(tag) + "," + std::to_string(n) + "\n";
  return out;
}

// ---- frequency ------------------------------------------------------------

FrequencyReport frequency_report(const TokenList& tokens, std::size_t top_k) {
  if (top_k == 0) throw Error(ErrorCode::InvalidArgument, "top_k must be >= 1");
  if (tokens.empty()) throw Error(ErrorCode::EmptyInput, "frequency report of an empty token list");
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& t : tokens) ++counts[t];
  std::vector<std::pair<std::string, std::size_t>> sorted(counts.begin(), counts.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  FrequencyReport report;
  report.total = tokens.size();
  const auto k = std::min(top_k, sorted.size());
  report.entries.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    report.entries.push_back(FrequencyEntry{sorted[i].first, sorted[i].second,
                                            static_cast<double>(sorted[i].second) / static_cast<double>(report.total)});
  }
  return report;
}

std::string frequency_csv(const FrequencyReport& report) {
  std::string out = "token,count,ratio\n";
  for (const auto& e : report.entries) {
    out += io::csv_field(e.token) + "," + std::to_string(e.count) + "," + io::format_double17(e.ratio) + "\n";
  }
  return out;
}

// ---- pipeline -------------------------------------------------------------

std::string PreprocessConfig::fingerprint() const {
  std::string fp = "lower=" + std::to_string(lowercase) + ";noise=" + std::to_string(remove_noise) +
                   ";stem=" + std::to_string(stem) + ";stop=";
  std::vector<std::string> words(stopword_set().begin(), stopword_set().end());
  std::sort(words.begin(), words.end());
  for (const auto& w : words) fp += w + ",";
  return fp;
}

TokenList pipeline(std::string_view text, const PreprocessConfig& config) {
  TokenList tokens = tokenize_words(text, config.lowercase);
  if (config.remove_noise) tokens = remove_noise(tokens, config.stopword_set());
  if (!config.stem) return tokens;
  TokenList out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    // a stem such as "god'" (from "god's") would re-tokenize differently
    std::string s = t;
    for (;;) {
      std::string next = stem(s);
      while (!next.empty() && next.back() == '\'') next.pop_back();
      if (next == s) break;
      s = std::move(next);
    }
    if (s.empty()) continue;
    if (config.remove_noise && config.stopword_set().contains(s)) continue;
    out.push_back(std::move(s));
  }
  return out;
}

TokenList pipeline(const RawDocument& doc, const PreprocessConfig& config) { return pipeline(doc.text, config); }

}  // namespace canon
