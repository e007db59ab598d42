#pragma once

#include <algorithm>
#include <charconv>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "propspan/annotation.hpp"
#include "propspan/tokenizer.hpp"

namespace propspan {

class MalformedPairError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IndexOutOfRangeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Word-alignment links as (source token index, target token index) pairs.
// Many-to-many alignments are allowed.
struct AlignmentLinks {
  std::set<std::pair<std::size_t, std::size_t>> links;

  bool operator==(const AlignmentLinks&) const = default;
};

struct ParallelExample {
  TweetAnnotation source;
  std::string target_text;
  AlignmentLinks links;
};

namespace detail {

inline std::optional<std::size_t> parse_index(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

}  // namespace detail

// Parses one Pharaoh line: whitespace-separated "i-j" pairs of 0-based
// token indices. An empty line is an empty alignment.
inline AlignmentLinks parse_alignment(std::string_view line) {
  AlignmentLinks out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (line[i] == ' ' || line[i] == '\t' || line[i] == '\r' ||
        line[i] == '\n') {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' &&
           line[j] != '\r' && line[j] != '\n') {
      ++j;
    }
    const std::string_view pair = line.substr(i, j - i);
    const std::size_t dash = pair.find('-');
    std::optional<std::size_t> src;
    std::optional<std::size_t> tgt;
    if (dash != std::string_view::npos) {
      src = detail::parse_index(pair.substr(0, dash));
      tgt = detail::parse_index(pair.substr(dash + 1));
    }
    if (!src || !tgt) {
      throw MalformedPairError("malformed alignment pair: \"" +
                               std::string(pair) + "\"");
    }
    out.links.emplace(*src, *tgt);
    i = j;
  }
  return out;
}

// Canonical Pharaoh rendering: pairs sorted, space-separated.
inline std::string format_alignment(const AlignmentLinks& alignment) {
  std::string out;
  for (const auto& [src, tgt] : alignment.links) {
    if (!out.empty()) out.push_back(' ');
    out += std::to_string(src);
    out.push_back('-');
    out += std::to_string(tgt);
  }
  return out;
}

namespace detail {

inline void check_links(const AlignmentLinks& links, std::size_t n_src,
                        std::size_t n_tgt) {
  for (const auto& [src, tgt] : links.links) {
    if (src >= n_src || tgt >= n_tgt) {
      throw IndexOutOfRangeError(
          "alignment link " + std::to_string(src) + "-" +
          std::to_string(tgt) + " outside token ranges " +
          std::to_string(n_src) + "x" + std::to_string(n_tgt));
    }
  }
}

// Target token indices aligned to any source token the span touches.
inline std::vector<std::size_t> aligned_target_tokens(
    const Span& span, const std::vector<TokenSpan>& src_tokens,
    const std::vector<TokenSpan>& tgt_tokens, const AlignmentLinks& links) {
  check_links(links, src_tokens.size(), tgt_tokens.size());
  std::set<std::size_t> targets;
  for (std::size_t i = 0; i < src_tokens.size(); ++i) {
    if (overlap_len(src_tokens[i].start, src_tokens[i].end, span.start,
                    span.end) <= 0) {
      continue;
    }
    for (const auto& [src, tgt] : links.links) {
      if (src == i) targets.insert(tgt);
    }
  }
  return {targets.begin(), targets.end()};
}

}  // namespace detail

// Projects one span across the alignment: the contiguous closure (min
// start to max end) of the target tokens aligned to any source token the
// span overlaps. A span whose tokens carry no links is dropped (absent).
inline std::optional<Span> project_span(const Span& span,
                                        const std::vector<TokenSpan>& src_tokens,
                                        const std::vector<TokenSpan>& tgt_tokens,
                                        const AlignmentLinks& links) {
  const auto targets =
      detail::aligned_target_tokens(span, src_tokens, tgt_tokens, links);
  if (targets.empty()) return std::nullopt;
  CharOffset lo = tgt_tokens[targets.front()].start;
  CharOffset hi = tgt_tokens[targets.front()].end;
  for (const std::size_t t : targets) {
    lo = std::min(lo, tgt_tokens[t].start);
    hi = std::max(hi, tgt_tokens[t].end);
  }
  return Span{lo, hi, span.technique};
}

// Alternative policy: one span per maximal run of consecutive aligned
// target tokens instead of a single closure.
inline std::vector<Span> project_span_runs(
    const Span& span, const std::vector<TokenSpan>& src_tokens,
    const std::vector<TokenSpan>& tgt_tokens, const AlignmentLinks& links) {
  const auto targets =
      detail::aligned_target_tokens(span, src_tokens, tgt_tokens, links);
  std::vector<Span> out;
  std::size_t i = 0;
  while (i < targets.size()) {
    std::size_t j = i;
    while (j + 1 < targets.size() && targets[j + 1] == targets[j] + 1) ++j;
    out.push_back(Span{tgt_tokens[targets[i]].start,
                       tgt_tokens[targets[j]].end, span.technique});
    i = j + 1;
  }
  return out;
}

struct ProjectionOptions {
  bool split_runs = false;  // project_span_runs instead of closure
  std::string id_suffix;    // appended to each source id
};

struct ProjectionOutcome {
  std::vector<TweetAnnotation> annotations;  // one per input example
  std::size_t spans_in = 0;
  std::size_t spans_projected = 0;  // source spans with >= 1 target span
  std::size_t spans_dropped = 0;
  std::vector<std::string> errors;  // one message per failed example
};

// Projects a whole parallel corpus. Per-example failures are collected in
// the report (the example contributes an empty annotation and its spans
// count as dropped); the corpus run never aborts. Exactly:
// spans_in == spans_projected + spans_dropped.
inline ProjectionOutcome project_dataset(
    const std::vector<ParallelExample>& examples,
    const ProjectionOptions& options = {}) {
  ProjectionOutcome outcome;
  outcome.annotations.reserve(examples.size());
  for (const ParallelExample& example : examples) {
    TweetAnnotation projected;
    projected.id = example.source.id + options.id_suffix;
    projected.text = example.target_text;
    outcome.spans_in += example.source.spans.size();
    try {
      const auto src_tokens = tokenize(example.source.text);
      const auto tgt_tokens = tokenize(example.target_text);
      std::size_t projected_here = 0;
      std::vector<Span> spans_here;
      for (const Span& span : example.source.spans) {
        if (options.split_runs) {
          auto runs =
              project_span_runs(span, src_tokens, tgt_tokens, example.links);
          if (!runs.empty()) {
            ++projected_here;
            for (Span& r : runs) spans_here.push_back(r);
          }
        } else if (auto p = project_span(span, src_tokens, tgt_tokens,
                                         example.links)) {
          ++projected_here;
          spans_here.push_back(*p);
        }
      }
      projected.spans = std::move(spans_here);
      outcome.spans_projected += projected_here;
      outcome.spans_dropped += example.source.spans.size() - projected_here;
    } catch (const std::exception& e) {
      outcome.spans_dropped += example.source.spans.size();
      projected.spans.clear();
      outcome.errors.push_back("example \"" + example.source.id +
                               "\": " + e.what());
    }
    outcome.annotations.push_back(std::move(projected));
  }
  return outcome;
}

// TransPTC+ style filtering: keeps exactly the annotations that contain at
// least one span, order preserved.
inline std::vector<TweetAnnotation> filter_propaganda(
    const std::vector<TweetAnnotation>& dataset) {
  std::vector<TweetAnnotation> out;
  std::copy_if(dataset.begin(), dataset.end(), std::back_inserter(out),
               [](const TweetAnnotation& a) { return !a.spans.empty(); });
  return out;
}

}  // namespace propspan
