#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace propspan {

// One decoded Unicode scalar value together with its byte extent in the
// source string. Malformed byte sequences decode to U+FFFD.
struct DecodedChar {
  char32_t value = 0;
  std::size_t byte_pos = 0;
  std::size_t byte_len = 0;
};

inline constexpr char32_t kReplacementChar = 0xFFFD;

namespace detail {

inline bool is_continuation(unsigned char b) { return (b & 0xC0) == 0x80; }

}  // namespace detail

inline std::vector<DecodedChar> decode_utf8(std::string_view s) {
  std::vector<DecodedChar> out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    char32_t cp = kReplacementChar;
    std::size_t len = 1;
    if (b0 < 0x80) {
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0 && i + 1 < s.size() &&
               detail::is_continuation(s[i + 1])) {
      cp = (char32_t(b0 & 0x1F) << 6) | (s[i + 1] & 0x3F);
      len = 2;
      if (cp < 0x80) cp = kReplacementChar;  // overlong
    } else if ((b0 & 0xF0) == 0xE0 && i + 2 < s.size() &&
               detail::is_continuation(s[i + 1]) &&
               detail::is_continuation(s[i + 2])) {
      cp = (char32_t(b0 & 0x0F) << 12) | (char32_t(s[i + 1] & 0x3F) << 6) |
           (s[i + 2] & 0x3F);
      len = 3;
      if (cp < 0x800 || (cp >= 0xD800 && cp <= 0xDFFF)) cp = kReplacementChar;
    } else if ((b0 & 0xF8) == 0xF0 && i + 3 < s.size() &&
               detail::is_continuation(s[i + 1]) &&
               detail::is_continuation(s[i + 2]) &&
               detail::is_continuation(s[i + 3])) {
      cp = (char32_t(b0 & 0x07) << 18) | (char32_t(s[i + 1] & 0x3F) << 12) |
           (char32_t(s[i + 2] & 0x3F) << 6) | (s[i + 3] & 0x3F);
      len = 4;
      if (cp < 0x10000 || cp > 0x10FFFF) cp = kReplacementChar;
    }
    out.push_back({cp, i, len});
    i += len;
  }
  return out;
}

// Number of Unicode scalar values in a UTF-8 string.
inline std::size_t cp_length(std::string_view s) {
  std::size_t n = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    if ((b0 & 0xE0) == 0xC0 && i + 1 < s.size() &&
        detail::is_continuation(s[i + 1])) {
      len = 2;
    } else if ((b0 & 0xF0) == 0xE0 && i + 2 < s.size() &&
               detail::is_continuation(s[i + 1]) &&
               detail::is_continuation(s[i + 2])) {
      len = 3;
    } else if ((b0 & 0xF8) == 0xF0 && i + 3 < s.size() &&
               detail::is_continuation(s[i + 1]) &&
               detail::is_continuation(s[i + 2]) &&
               detail::is_continuation(s[i + 3])) {
      len = 4;
    }
    i += len;
    ++n;
  }
  return n;
}

inline void append_utf8(std::string& out, char32_t c) {
  if (c < 0x80) {
    out.push_back(static_cast<char>(c));
  } else if (c < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (c >> 6)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else if (c < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (c >> 12)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (c >> 18)));
    out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  }
}

// Substring by code-point indices [from, to), clamped to the string.
inline std::string cp_substr(std::string_view s, std::size_t from,
                             std::size_t to) {
  if (from >= to) return {};
  const auto chars = decode_utf8(s);
  if (from >= chars.size()) return {};
  const std::size_t byte_from = chars[from].byte_pos;
  const std::size_t byte_to = to < chars.size()
                                  ? chars[to].byte_pos
                                  : chars.back().byte_pos + chars.back().byte_len;
  return std::string(s.substr(byte_from, byte_to - byte_from));
}

// Unicode White_Space property (the set relevant to text segmentation).
inline bool is_unicode_space(char32_t c) {
  switch (c) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return (c >= 0x2000 && c <= 0x200A);
  }
}

// Punctuation characters the tokenizer peels off token edges. ASCII plus
// the common Latin-1, general, Arabic, CJK and fullwidth punctuation blocks.
inline bool is_split_punct(char32_t c) {
  if (c < 0x80) {
    return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) ||
           (c >= 0x5B && c <= 0x60) || (c >= 0x7B && c <= 0x7E);
  }
  switch (c) {
    case 0xA1: case 0xA7: case 0xAB: case 0xB6: case 0xB7: case 0xBB:
    case 0xBF:
    case 0x060C: case 0x060D: case 0x061B: case 0x061E: case 0x061F:
    case 0x06D4:
      return true;
    default:
      return (c >= 0x066A && c <= 0x066D) ||    // Arabic percent, separators
             (c >= 0x2010 && c <= 0x2027) ||    // dashes, quotes, bullets
             (c >= 0x2030 && c <= 0x205E) ||    // permille .. general punct
             (c >= 0x3001 && c <= 0x3003) ||    // CJK comma, full stop
             (c >= 0x3008 && c <= 0x3011) ||    // CJK brackets
             (c >= 0x3014 && c <= 0x301F) ||    // CJK brackets, quotes
             (c >= 0xFE50 && c <= 0xFE6B) ||    // small form variants
             (c >= 0xFF01 && c <= 0xFF0F) ||    // fullwidth ASCII punct
             (c >= 0xFF1A && c <= 0xFF20) ||
             (c >= 0xFF3B && c <= 0xFF40) ||
             (c >= 0xFF5B && c <= 0xFF65);
  }
}

namespace detail {

struct Composition {
  char32_t base;
  char32_t mark;
  char32_t composed;
};

// base + combining mark -> precomposed Latin letter. Covers the letters
// that occur in the label vocabulary and the usual Western European set.
inline constexpr Composition kCompositions[] = {
    {U'a', 0x0300, 0xE0}, {U'a', 0x0301, 0xE1}, {U'a', 0x0302, 0xE2},
    {U'a', 0x0303, 0xE3}, {U'a', 0x0308, 0xE4},
    {U'e', 0x0300, 0xE8}, {U'e', 0x0301, 0xE9}, {U'e', 0x0302, 0xEA},
    {U'e', 0x0308, 0xEB},
    {U'i', 0x0300, 0xEC}, {U'i', 0x0301, 0xED}, {U'i', 0x0302, 0xEE},
    {U'i', 0x0308, 0xEF},
    {U'o', 0x0300, 0xF2}, {U'o', 0x0301, 0xF3}, {U'o', 0x0302, 0xF4},
    {U'o', 0x0303, 0xF5}, {U'o', 0x0308, 0xF6},
    {U'u', 0x0300, 0xF9}, {U'u', 0x0301, 0xFA}, {U'u', 0x0302, 0xFB},
    {U'u', 0x0308, 0xFC},
    {U'y', 0x0301, 0xFD}, {U'y', 0x0308, 0xFF},
    {U'n', 0x0303, 0xF1}, {U'c', 0x0327, 0xE7},
    {U'A', 0x0300, 0xC0}, {U'A', 0x0301, 0xC1}, {U'A', 0x0302, 0xC2},
    {U'A', 0x0303, 0xC3}, {U'A', 0x0308, 0xC4},
    {U'E', 0x0300, 0xC8}, {U'E', 0x0301, 0xC9}, {U'E', 0x0302, 0xCA},
    {U'E', 0x0308, 0xCB},
    {U'I', 0x0300, 0xCC}, {U'I', 0x0301, 0xCD}, {U'I', 0x0302, 0xCE},
    {U'I', 0x0308, 0xCF},
    {U'O', 0x0300, 0xD2}, {U'O', 0x0301, 0xD3}, {U'O', 0x0302, 0xD4},
    {U'O', 0x0303, 0xD5}, {U'O', 0x0308, 0xD6},
    {U'U', 0x0300, 0xD9}, {U'U', 0x0301, 0xDA}, {U'U', 0x0302, 0xDB},
    {U'U', 0x0308, 0xDC},
    {U'Y', 0x0301, 0xDD}, {U'Y', 0x0308, 0x178},
    {U'N', 0x0303, 0xD1}, {U'C', 0x0327, 0xC7},
};

inline char32_t compose_pair(char32_t base, char32_t mark) {
  for (const auto& c : kCompositions) {
    if (c.base == base && c.mark == mark) return c.composed;
  }
  return 0;
}

}  // namespace detail

// Folds decomposed base+combining-mark pairs into their precomposed form
// so that both NFC and NFD spellings of a label compare equal.
inline std::string compose_marks(std::string_view s) {
  const auto chars = decode_utf8(s);
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < chars.size()) {
    char32_t c = chars[i].value;
    while (i + 1 < chars.size()) {
      const char32_t composed = detail::compose_pair(c, chars[i + 1].value);
      if (composed == 0) break;
      c = composed;
      ++i;
    }
    append_utf8(out, c);
    ++i;
  }
  return out;
}

// Strips leading and trailing Unicode whitespace.
inline std::string trim_spaces(std::string_view s) {
  const auto chars = decode_utf8(s);
  std::size_t first = 0;
  std::size_t last = chars.size();
  while (first < last && is_unicode_space(chars[first].value)) ++first;
  while (last > first && is_unicode_space(chars[last - 1].value)) --last;
  if (first >= last) return {};
  const std::size_t byte_from = chars[first].byte_pos;
  const std::size_t byte_to = chars[last - 1].byte_pos + chars[last - 1].byte_len;
  return std::string(s.substr(byte_from, byte_to - byte_from));
}

}  // namespace propspan
