#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "propspan/annotation.hpp"
#include "propspan/tokenizer.hpp"

namespace propspan {

// Per-token label: a technique or O (nullopt).
using TokenTag = std::optional<Technique>;
using TagSequence = std::vector<TokenTag>;

class TokenMismatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LengthMismatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Collapses character spans onto tokens: each token takes the technique of
// the span with maximal character overlap. Ties break to the span with the
// smaller start, then the smaller technique index. Tokens covered by no
// span get O.
inline TagSequence spans_to_tags(const TweetAnnotation& ann,
                                 const std::vector<TokenSpan>& tokens) {
  const auto text_len = static_cast<CharOffset>(cp_length(ann.text));
  TagSequence tags;
  tags.reserve(tokens.size());
  for (const TokenSpan& tok : tokens) {
    if (tok.start < 0 || tok.start >= tok.end || tok.end > text_len) {
      throw TokenMismatchError("token [" + std::to_string(tok.start) + "," +
                               std::to_string(tok.end) +
                               ") out of bounds for text of length " +
                               std::to_string(text_len));
    }
    const Span* best = nullptr;
    CharOffset best_overlap = 0;
    for (const Span& s : ann.spans) {
      const CharOffset ov = overlap_len(tok.start, tok.end, s.start, s.end);
      if (ov <= 0) continue;
      if (best == nullptr || ov > best_overlap ||
          (ov == best_overlap &&
           (s.start < best->start ||
            (s.start == best->start &&
             technique_index(s.technique) < technique_index(best->technique))))) {
        best = &s;
        best_overlap = ov;
      }
    }
    tags.push_back(best ? TokenTag(best->technique) : std::nullopt);
  }
  return tags;
}

// Decodes a tag sequence back into spans: each maximal run of consecutive
// tokens sharing a non-O label becomes one span from the run's first token
// start to its last token end, inter-token gaps included.
inline std::vector<Span> tags_to_spans(const std::vector<TokenSpan>& tokens,
                                       const TagSequence& tags) {
  if (tokens.size() != tags.size()) {
    throw LengthMismatchError("tag sequence length " +
                              std::to_string(tags.size()) +
                              " does not match token count " +
                              std::to_string(tokens.size()));
  }
  std::vector<Span> spans;
  std::size_t i = 0;
  while (i < tokens.size()) {
    if (!tags[i]) {
      ++i;
      continue;
    }
    const Technique tech = *tags[i];
    std::size_t j = i;
    while (j + 1 < tokens.size() && tags[j + 1] && *tags[j + 1] == tech) ++j;
    spans.push_back(Span{tokens[i].start, tokens[j].end, tech});
    i = j + 1;
  }
  return spans;
}

// Distinct techniques over the annotation's spans.
inline LabelSet labels_of(const TweetAnnotation& ann) {
  LabelSet labels;
  for (const Span& s : ann.spans) labels.insert(s.technique);
  return labels;
}

}  // namespace propspan
