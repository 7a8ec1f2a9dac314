#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "simplegate/common.hpp"

namespace simplegate {

struct Token {
  std::string surface;
  bool is_punct = false;

  bool operator==(const Token&) const = default;
};

using Sentence = std::vector<Token>;

namespace utf8 {

// Decodes one codepoint starting at `pos`, advancing `pos` past it.
// Invalid sequences fall back to single-byte codepoints so tokenization
// is total over arbitrary input.
inline char32_t decode(std::string_view text, std::size_t& pos) {
  unsigned char lead = static_cast<unsigned char>(text[pos]);
  std::size_t len = 1;
  char32_t cp = lead;
  if (lead >= 0xF0)
    len = 4, cp = lead & 0x07;
  else if (lead >= 0xE0)
    len = 3, cp = lead & 0x0F;
  else if (lead >= 0xC0)
    len = 2, cp = lead & 0x1F;
  if (len > 1) {
    if (pos + len > text.size()) {
      ++pos;
      return lead;
    }
    for (std::size_t i = 1; i < len; ++i) {
      unsigned char cont = static_cast<unsigned char>(text[pos + i]);
      if ((cont & 0xC0) != 0x80) {
        ++pos;
        return lead;
      }
      cp = (cp << 6) | (cont & 0x3F);
    }
  }
  pos += len;
  return cp;
}

inline void encode(char32_t cp, std::string& out) {
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

inline std::size_t codepoint_count(std::string_view text) {
  std::size_t pos = 0, n = 0;
  while (pos < text.size()) {
    decode(text, pos);
    ++n;
  }
  return n;
}

}  // namespace utf8

inline bool is_whitespace_cp(char32_t cp) {
  switch (cp) {
    case U' ':
    case U'\t':
    case U'\n':
    case U'\r':
    case U'\v':
    case U'\f':
    case 0x0085:  // NEL
    case 0x00A0:  // no-break space
    case 0x1680:
    case 0x2028:
    case 0x2029:
    case 0x202F:
    case 0x205F:
    case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

// The punctuation set that gets split into single-character tokens:
// . , ; : ! ? " ' ( ) [ ] - em-dash /
inline bool is_punct_cp(char32_t cp) {
  switch (cp) {
    case U'.':
    case U',':
    case U';':
    case U':':
    case U'!':
    case U'?':
    case U'"':
    case U'\'':
    case U'(':
    case U')':
    case U'[':
    case U']':
    case U'-':
    case 0x2014:  // em dash
    case U'/':
      return true;
    default:
      return false;
  }
}

// True iff the surface consists solely of punctuation-set characters.
inline bool is_punct_surface(std::string_view surface) {
  if (surface.empty()) return false;
  std::size_t pos = 0;
  while (pos < surface.size()) {
    if (!is_punct_cp(utf8::decode(surface, pos))) return false;
  }
  return true;
}

inline Token make_token(std::string surface) {
  bool punct = is_punct_surface(surface);
  return Token{std::move(surface), punct};
}

namespace detail {

inline std::string lowercase_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

inline void flush_chunk(const std::vector<std::pair<char32_t, std::string>>& chunk,
                        Sentence& out) {
  if (chunk.empty()) return;
  std::size_t begin = 0, end = chunk.size();
  while (begin < end && is_punct_cp(chunk[begin].first)) ++begin;
  while (end > begin && is_punct_cp(chunk[end - 1].first)) --end;
  for (std::size_t i = 0; i < begin; ++i)
    out.push_back(Token{chunk[i].second, true});
  if (begin < end) {
    std::string middle;
    for (std::size_t i = begin; i < end; ++i) middle += chunk[i].second;
    out.push_back(make_token(lowercase_ascii(middle)));
  }
  for (std::size_t i = end; i < chunk.size(); ++i)
    out.push_back(Token{chunk[i].second, true});
}

}  // namespace detail

// Splits on Unicode whitespace, peels leading/trailing punctuation-set
// characters into single-character tokens, lowercases alphabetic text.
// Deterministic; empty input yields an empty sequence.
inline Sentence tokenize(std::string_view text) {
  Sentence out;
  std::vector<std::pair<char32_t, std::string>> chunk;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t start = pos;
    char32_t cp = utf8::decode(text, pos);
    if (is_whitespace_cp(cp)) {
      detail::flush_chunk(chunk, out);
      chunk.clear();
    } else {
      chunk.emplace_back(cp, std::string(text.substr(start, pos - start)));
    }
  }
  detail::flush_chunk(chunk, out);
  return out;
}

inline std::string detokenize(const Sentence& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i].surface;
  }
  return out;
}

inline std::vector<std::string> surfaces(const Sentence& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const Token& t : tokens) out.push_back(t.surface);
  return out;
}

}  // namespace simplegate
