#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "propspan/annotation.hpp"
#include "propspan/unicode.hpp"

namespace propspan {

// One token with its exact character extent in the source text.
struct TokenSpan {
  std::string surface;
  CharOffset start = 0;
  CharOffset end = 0;

  bool operator==(const TokenSpan&) const = default;
};

namespace detail {

inline TokenSpan make_token(std::string_view text,
                            const std::vector<DecodedChar>& chars,
                            std::size_t first, std::size_t last) {
  const std::size_t byte_from = chars[first].byte_pos;
  const std::size_t byte_to = chars[last].byte_pos + chars[last].byte_len;
  return TokenSpan{std::string(text.substr(byte_from, byte_to - byte_from)),
                   static_cast<CharOffset>(first),
                   static_cast<CharOffset>(last + 1)};
}

}  // namespace detail

// Splits on Unicode whitespace, then peels leading and trailing punctuation
// characters off each chunk as single-character tokens. Offsets are exact:
// text[start,end) == surface for every token.
inline std::vector<TokenSpan> tokenize(std::string_view text) {
  const auto chars = decode_utf8(text);
  std::vector<TokenSpan> tokens;
  std::size_t i = 0;
  while (i < chars.size()) {
    if (is_unicode_space(chars[i].value)) {
      ++i;
      continue;
    }
    std::size_t chunk_end = i;
    while (chunk_end < chars.size() &&
           !is_unicode_space(chars[chunk_end].value)) {
      ++chunk_end;
    }
    std::size_t lo = i;
    std::size_t hi = chunk_end;  // [lo, hi) is the remaining core
    while (lo < hi && is_split_punct(chars[lo].value)) {
      tokens.push_back(detail::make_token(text, chars, lo, lo));
      ++lo;
    }
    std::size_t tail = hi;
    while (tail > lo && is_split_punct(chars[tail - 1].value)) --tail;
    if (lo < tail) tokens.push_back(detail::make_token(text, chars, lo, tail - 1));
    for (std::size_t p = tail; p < hi; ++p) {
      tokens.push_back(detail::make_token(text, chars, p, p));
    }
    i = chunk_end;
  }
  return tokens;
}

}  // namespace propspan
