#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "propspan/technique.hpp"
#include "propspan/unicode.hpp"

namespace propspan {

// Character offsets count Unicode scalar values, 0-based. Signed so that
// malformed (negative) input offsets can be carried to the validator
// instead of wrapping.
using CharOffset = std::int64_t;

// Half-open character interval [start, end) carrying one technique.
struct Span {
  CharOffset start = 0;
  CharOffset end = 0;
  Technique technique = Technique::AppealToAuthority;

  bool operator==(const Span&) const = default;
};

inline CharOffset span_length(const Span& s) { return s.end - s.start; }

inline CharOffset overlap_len(CharOffset a_start, CharOffset a_end,
                              CharOffset b_start, CharOffset b_end) {
  return std::max<CharOffset>(
      0, std::min(a_end, b_end) - std::max(a_start, b_start));
}

// |[a.start,a.end) ∩ [b.start,b.end)| in characters.
inline CharOffset overlap(const Span& a, const Span& b) {
  return overlap_len(a.start, a.end, b.start, b.end);
}

// One annotated tweet. An empty span list means "no technique".
struct TweetAnnotation {
  std::string id;
  std::string text;
  std::vector<Span> spans;

  bool operator==(const TweetAnnotation&) const = default;
};

using LabelSet = std::set<Technique>;

// Every structural problem in the annotation, one message per violation.
// Overlapping spans are legal (the data is multi-label) and not reported.
inline std::vector<std::string> validate_annotation(
    const TweetAnnotation& ann) {
  std::vector<std::string> violations;
  const auto text_len = static_cast<CharOffset>(cp_length(ann.text));
  for (std::size_t i = 0; i < ann.spans.size(); ++i) {
    const Span& s = ann.spans[i];
    const std::string where = "span " + std::to_string(i) + " [" +
                              std::to_string(s.start) + "," +
                              std::to_string(s.end) + ")";
    if (s.start < 0) violations.push_back(where + ": negative start offset");
    if (s.end < 0) violations.push_back(where + ": negative end offset");
    if (s.start >= s.end)
      violations.push_back(where + ": start must be less than end");
    if (s.end > text_len)
      violations.push_back(where + ": end exceeds text length " +
                           std::to_string(text_len));
  }
  return violations;
}

}  // namespace propspan
