#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "propspan/annotation.hpp"
#include "propspan/tag_codec.hpp"
#include "propspan/tokenizer.hpp"

namespace propspan {

class EmptyInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyDatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Token classes: index 0 is O, technique k maps to class k + 1.
inline constexpr std::size_t kTokenClasses = kTechniqueCount + 1;

inline constexpr std::size_t tag_class(const TokenTag& tag) {
  return tag ? static_cast<std::size_t>(technique_index(*tag)) + 1 : 0;
}

struct ModelDims {
  std::size_t vocab_buckets = 4096;  // hashed char-3-gram buckets
  std::size_t embed_dim = 32;
  std::size_t hidden_dim = 64;
  std::size_t window = 2;  // tokens of context on each side

  std::size_t window_input() const { return (2 * window + 1) * embed_dim; }

  bool operator==(const ModelDims&) const = default;
};

struct LossWeights {
  double token = 1.0;
  double sentence = 1.0;
  double gate = 1.0;
};

struct TrainConfig {
  double learning_rate = 0.05;
  std::size_t epochs = 50;
  std::size_t batch_size = 8;
  std::uint64_t seed = 0;
  double threshold = 0.5;
  ModelDims dims{};
  LossWeights weights{};
};

// Every trainable parameter. The same shape doubles as the gradient
// container.
struct ModelParams {
  ModelDims dims;
  std::vector<double> token_embed;   // vocab_buckets x embed_dim
  std::vector<double> encoder_w;     // hidden_dim x window_input
  std::vector<double> encoder_b;     // hidden_dim
  std::vector<double> token_head_w;  // kTokenClasses x hidden_dim
  std::vector<double> token_head_b;  // kTokenClasses
  std::vector<double> sent_head_w;   // kTechniqueCount x hidden_dim
  std::vector<double> sent_head_b;   // kTechniqueCount
  std::vector<double> gate_w;        // hidden_dim
  double gate_b = 0.0;

  bool operator==(const ModelParams&) const = default;
};

inline ModelParams zero_params(const ModelDims& dims) {
  ModelParams p;
  p.dims = dims;
  p.token_embed.assign(dims.vocab_buckets * dims.embed_dim, 0.0);
  p.encoder_w.assign(dims.hidden_dim * dims.window_input(), 0.0);
  p.encoder_b.assign(dims.hidden_dim, 0.0);
  p.token_head_w.assign(kTokenClasses * dims.hidden_dim, 0.0);
  p.token_head_b.assign(kTokenClasses, 0.0);
  p.sent_head_w.assign(kTechniqueCount * dims.hidden_dim, 0.0);
  p.sent_head_b.assign(kTechniqueCount, 0.0);
  p.gate_w.assign(dims.hidden_dim, 0.0);
  p.gate_b = 0.0;
  return p;
}

namespace detail {

// All parameter arrays of one ModelParams, in a fixed order. Used by the
// optimizer, the checkpoint codec and the finite-difference walker.
inline std::vector<std::pair<double*, std::size_t>> param_arrays(
    ModelParams& p) {
  return {
      {p.token_embed.data(), p.token_embed.size()},
      {p.encoder_w.data(), p.encoder_w.size()},
      {p.encoder_b.data(), p.encoder_b.size()},
      {p.token_head_w.data(), p.token_head_w.size()},
      {p.token_head_b.data(), p.token_head_b.size()},
      {p.sent_head_w.data(), p.sent_head_w.size()},
      {p.sent_head_b.data(), p.sent_head_b.size()},
      {p.gate_w.data(), p.gate_w.size()},
      {&p.gate_b, 1},
  };
}

// mt19937_64 output mapped to [0, 1) with 53 usable bits; avoids the
// implementation-defined std::uniform_real_distribution.
inline double next_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline void fill_uniform(std::vector<double>& v, double limit,
                         std::mt19937_64& rng) {
  for (double& x : v) x = (2.0 * next_unit(rng) - 1.0) * limit;
}

inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

// Hashed character-3-gram bucket ids of a token surface. Surfaces shorter
// than three characters hash as a single whole-surface gram.
inline std::vector<std::size_t> gram_buckets(std::string_view surface,
                                             std::size_t vocab_buckets) {
  const auto chars = decode_utf8(surface);
  std::vector<std::size_t> buckets;
  if (chars.size() < 3) {
    buckets.push_back(fnv1a(surface) % vocab_buckets);
    return buckets;
  }
  buckets.reserve(chars.size() - 2);
  for (std::size_t i = 0; i + 3 <= chars.size(); ++i) {
    const std::size_t from = chars[i].byte_pos;
    const std::size_t to = chars[i + 2].byte_pos + chars[i + 2].byte_len;
    buckets.push_back(fnv1a(surface.substr(from, to - from)) % vocab_buckets);
  }
  return buckets;
}

inline double stable_sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline double softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

// Binary cross-entropy of sigmoid(logit) against y, evaluated on the logit
// for numerical stability.
inline double bce_from_logit(double logit, double y) {
  return y * softplus(-logit) + (1.0 - y) * softplus(logit);
}

// Everything the backward pass needs from one forward run.
struct ForwardTrace {
  std::vector<std::vector<std::size_t>> buckets;  // per token gram buckets
  std::vector<std::vector<double>> embed;         // n x embed_dim
  std::vector<std::vector<double>> hidden;        // n x hidden_dim
  std::vector<double> pooled;                     // hidden_dim
  std::vector<std::vector<double>> softmax_q;     // n x kTokenClasses
  std::vector<double> technique_mass;             // n, sum of q over classes != O
  std::vector<std::vector<double>> gated;         // n x kTokenClasses
  std::vector<double> sent_logits;                // kTechniqueCount
  std::vector<double> sent_probs;                 // kTechniqueCount
  double gate_logit = 0.0;
  double gate = 0.0;
};

inline ForwardTrace run_forward(const std::vector<TokenSpan>& tokens,
                                const ModelParams& params) {
  if (tokens.empty()) {
    throw EmptyInputError("forward pass requires at least one token");
  }
  const ModelDims& dims = params.dims;
  const std::size_t n = tokens.size();
  ForwardTrace trace;

  trace.buckets.resize(n);
  trace.embed.assign(n, std::vector<double>(dims.embed_dim, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    trace.buckets[i] = gram_buckets(tokens[i].surface, dims.vocab_buckets);
    auto& e = trace.embed[i];
    for (const std::size_t b : trace.buckets[i]) {
      const double* row = params.token_embed.data() + b * dims.embed_dim;
      for (std::size_t d = 0; d < dims.embed_dim; ++d) e[d] += row[d];
    }
    const double inv = 1.0 / static_cast<double>(trace.buckets[i].size());
    for (double& x : e) x *= inv;
  }

  const std::size_t win_in = dims.window_input();
  const auto w = static_cast<std::ptrdiff_t>(dims.window);
  trace.hidden.assign(n, std::vector<double>(dims.hidden_dim, 0.0));
  std::vector<double> x(win_in);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(x.begin(), x.end(), 0.0);
    for (std::ptrdiff_t s = -w; s <= w; ++s) {
      const auto j = static_cast<std::ptrdiff_t>(i) + s;
      if (j < 0 || j >= static_cast<std::ptrdiff_t>(n)) continue;
      const auto slot = static_cast<std::size_t>(s + w);
      std::copy(trace.embed[static_cast<std::size_t>(j)].begin(),
                trace.embed[static_cast<std::size_t>(j)].end(),
                x.begin() + static_cast<std::ptrdiff_t>(slot * dims.embed_dim));
    }
    auto& h = trace.hidden[i];
    for (std::size_t r = 0; r < dims.hidden_dim; ++r) {
      const double* row = params.encoder_w.data() + r * win_in;
      double acc = params.encoder_b[r];
      for (std::size_t c = 0; c < win_in; ++c) acc += row[c] * x[c];
      h[r] = std::tanh(acc);
    }
  }

  trace.pooled.assign(dims.hidden_dim, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t r = 0; r < dims.hidden_dim; ++r) {
      trace.pooled[r] += trace.hidden[i][r];
    }
  }
  for (double& v : trace.pooled) v /= static_cast<double>(n);

  trace.softmax_q.assign(n, std::vector<double>(kTokenClasses, 0.0));
  trace.technique_mass.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto& q = trace.softmax_q[i];
    for (std::size_t k = 0; k < kTokenClasses; ++k) {
      const double* row = params.token_head_w.data() + k * dims.hidden_dim;
      double acc = params.token_head_b[k];
      for (std::size_t r = 0; r < dims.hidden_dim; ++r) {
        acc += row[r] * trace.hidden[i][r];
      }
      q[k] = acc;
    }
    const double zmax = *std::max_element(q.begin(), q.end());
    double norm = 0.0;
    for (double& z : q) {
      z = std::exp(z - zmax);
      norm += z;
    }
    for (double& z : q) z /= norm;
    for (std::size_t k = 1; k < kTokenClasses; ++k) {
      trace.technique_mass[i] += q[k];
    }
  }

  trace.sent_logits.assign(kTechniqueCount, 0.0);
  trace.sent_probs.assign(kTechniqueCount, 0.0);
  for (std::size_t k = 0; k < kTechniqueCount; ++k) {
    const double* row = params.sent_head_w.data() + k * dims.hidden_dim;
    double acc = params.sent_head_b[k];
    for (std::size_t r = 0; r < dims.hidden_dim; ++r) {
      acc += row[r] * trace.pooled[r];
    }
    trace.sent_logits[k] = acc;
    trace.sent_probs[k] = stable_sigmoid(acc);
  }

  trace.gate_logit = params.gate_b;
  for (std::size_t r = 0; r < dims.hidden_dim; ++r) {
    trace.gate_logit += params.gate_w[r] * trace.pooled[r];
  }
  trace.gate = stable_sigmoid(trace.gate_logit);

  // Gate: technique-class mass is scaled by g, the remainder moves to O,
  // so each token distribution keeps total mass 1.
  trace.gated.assign(n, std::vector<double>(kTokenClasses, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& q = trace.softmax_q[i];
    auto& r = trace.gated[i];
    r[0] = q[0] + (1.0 - trace.gate) * trace.technique_mass[i];
    for (std::size_t k = 1; k < kTokenClasses; ++k) r[k] = trace.gate * q[k];
  }
  return trace;
}

}  // namespace detail

// Per-token hidden vectors: hashed char-3-gram embeddings, a ±window
// concatenation (zero-padded at the edges), then one affine+tanh layer.
inline std::vector<std::vector<double>> encode_tokens(
    const std::vector<TokenSpan>& tokens, const ModelParams& params) {
  return detail::run_forward(tokens, params).hidden;
}

struct ForwardOutput {
  std::vector<std::vector<double>> token_dist;  // n x kTokenClasses, gated
  double gate = 0.0;
  std::vector<double> multilabel_probs;  // kTechniqueCount
};

inline ForwardOutput forward(const std::vector<TokenSpan>& tokens,
                             const ModelParams& params) {
  auto trace = detail::run_forward(tokens, params);
  ForwardOutput out;
  out.token_dist = std::move(trace.gated);
  out.gate = trace.gate;
  out.multilabel_probs = std::move(trace.sent_probs);
  return out;
}

// Subtask-1 decision rule: technique k is assigned iff p_k >= threshold;
// an empty result means "no technique".
inline LabelSet classify_multilabel(const std::vector<TokenSpan>& tokens,
                                    const ModelParams& params,
                                    double threshold) {
  const ForwardOutput out = forward(tokens, params);
  LabelSet labels;
  for (std::size_t k = 0; k < kTechniqueCount; ++k) {
    if (out.multilabel_probs[k] >= threshold) labels.insert(technique_at(k));
  }
  return labels;
}

// Argmax decode of gated token distributions (ties to the lowest class
// index, O first), then run merging via tags_to_spans.
inline std::vector<Span> decode_spans(
    const std::vector<TokenSpan>& tokens,
    const std::vector<std::vector<double>>& token_dist) {
  if (tokens.size() != token_dist.size()) {
    throw LengthMismatchError("token distribution count " +
                              std::to_string(token_dist.size()) +
                              " does not match token count " +
                              std::to_string(tokens.size()));
  }
  TagSequence tags;
  tags.reserve(tokens.size());
  for (const auto& dist : token_dist) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < kTokenClasses; ++k) {
      if (dist[k] > dist[best]) best = k;
    }
    tags.push_back(best == 0 ? TokenTag{}
                             : TokenTag(technique_at(best - 1)));
  }
  return tags_to_spans(tokens, tags);
}

namespace detail {

// Supervision targets of one example, precomputed once.
struct ExampleTerms {
  std::vector<TokenSpan> tokens;
  std::vector<std::size_t> target_class;         // per token, 0 = O
  std::array<double, kTechniqueCount> labels{};  // multilabel targets
  double gate_target = 0.0;
};

inline ExampleTerms make_terms(const TweetAnnotation& ann) {
  ExampleTerms terms;
  terms.tokens = tokenize(ann.text);
  const TagSequence tags = spans_to_tags(ann, terms.tokens);
  terms.target_class.reserve(tags.size());
  for (const TokenTag& t : tags) terms.target_class.push_back(tag_class(t));
  for (const Technique t : labels_of(ann)) {
    terms.labels[static_cast<std::size_t>(technique_index(t))] = 1.0;
  }
  terms.gate_target = ann.spans.empty() ? 0.0 : 1.0;
  return terms;
}

inline constexpr double kProbFloor = 1e-300;

inline double loss_from_trace(const ForwardTrace& trace,
                              const ExampleTerms& terms,
                              const LossWeights& w) {
  const std::size_t n = terms.tokens.size();
  double token_ce = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    token_ce -=
        std::log(std::max(trace.gated[i][terms.target_class[i]], kProbFloor));
  }
  token_ce /= static_cast<double>(n);

  double sent_bce = 0.0;
  for (std::size_t k = 0; k < kTechniqueCount; ++k) {
    sent_bce += bce_from_logit(trace.sent_logits[k], terms.labels[k]);
  }
  sent_bce /= static_cast<double>(kTechniqueCount);

  const double gate_bce = bce_from_logit(trace.gate_logit, terms.gate_target);
  return w.token * token_ce + w.sentence * sent_bce + w.gate * gate_bce;
}

inline double loss_terms(const ExampleTerms& terms, const ModelParams& params,
                         const LossWeights& w) {
  return loss_from_trace(run_forward(terms.tokens, params), terms, w);
}

// Accumulates scale * d(loss of this example)/d(params) into grad_out.
inline void accumulate_grad(const ExampleTerms& terms,
                            const ModelParams& params, const LossWeights& w,
                            double scale, ModelParams& grad_out) {
  const ForwardTrace trace = run_forward(terms.tokens, params);
  const ModelDims& dims = params.dims;
  const std::size_t n = terms.tokens.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  const double g = trace.gate;

  // d loss / d token logits, and the token-CE path into the gate.
  std::vector<std::vector<double>> dz(n,
                                      std::vector<double>(kTokenClasses, 0.0));
  double dgate = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& q = trace.softmax_q[i];
    const std::size_t target = terms.target_class[i];
    const double coeff = w.token * inv_n;
    if (target == 0) {
      const double r_o = std::max(trace.gated[i][0], kProbFloor);
      dz[i][0] = coeff * q[0] * (1.0 - 1.0 / r_o);
      for (std::size_t k = 1; k < kTokenClasses; ++k) {
        dz[i][k] = coeff * q[k] * (1.0 - (1.0 - g) / r_o);
      }
      dgate += coeff * trace.technique_mass[i] / r_o;
    } else {
      for (std::size_t k = 0; k < kTokenClasses; ++k) {
        dz[i][k] = coeff * (q[k] - (k == target ? 1.0 : 0.0));
      }
      dgate -= coeff / std::max(g, kProbFloor);
    }
  }

  std::vector<double> du(kTechniqueCount);
  for (std::size_t k = 0; k < kTechniqueCount; ++k) {
    du[k] = w.sentence * (trace.sent_probs[k] - terms.labels[k]) /
            static_cast<double>(kTechniqueCount);
  }
  const double dv =
      dgate * g * (1.0 - g) + w.gate * (g - terms.gate_target);

  // Heads.
  std::vector<std::vector<double>> dh(n,
                                      std::vector<double>(dims.hidden_dim, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < kTokenClasses; ++k) {
      const double d = dz[i][k];
      if (d == 0.0) continue;
      double* wt_row = grad_out.token_head_w.data() + k * dims.hidden_dim;
      const double* w_row = params.token_head_w.data() + k * dims.hidden_dim;
      for (std::size_t r = 0; r < dims.hidden_dim; ++r) {
        wt_row[r] += scale * d * trace.hidden[i][r];
        dh[i][r] += d * w_row[r];
      }
      grad_out.token_head_b[k] += scale * d;
    }
  }

  std::vector<double> dpooled(dims.hidden_dim, 0.0);
  for (std::size_t k = 0; k < kTechniqueCount; ++k) {
    const double d = du[k];
    double* ws_row = grad_out.sent_head_w.data() + k * dims.hidden_dim;
    const double* w_row = params.sent_head_w.data() + k * dims.hidden_dim;
    for (std::size_t r = 0; r < dims.hidden_dim; ++r) {
      ws_row[r] += scale * d * trace.pooled[r];
      dpooled[r] += d * w_row[r];
    }
    grad_out.sent_head_b[k] += scale * d;
  }
  for (std::size_t r = 0; r < dims.hidden_dim; ++r) {
    grad_out.gate_w[r] += scale * dv * trace.pooled[r];
    dpooled[r] += dv * params.gate_w[r];
  }
  grad_out.gate_b += scale * dv;

  // Mean pool spreads the pooled gradient evenly over tokens.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t r = 0; r < dims.hidden_dim; ++r) {
      dh[i][r] += dpooled[r] * inv_n;
    }
  }

  // Encoder and embeddings.
  const std::size_t win_in = dims.window_input();
  const auto win = static_cast<std::ptrdiff_t>(dims.window);
  std::vector<double> x(win_in);
  std::vector<double> dx(win_in);
  std::vector<std::vector<double>> dembed(n,
                                          std::vector<double>(dims.embed_dim,
                                                              0.0));
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(x.begin(), x.end(), 0.0);
    for (std::ptrdiff_t s = -win; s <= win; ++s) {
      const auto j = static_cast<std::ptrdiff_t>(i) + s;
      if (j < 0 || j >= static_cast<std::ptrdiff_t>(n)) continue;
      const auto slot = static_cast<std::size_t>(s + win);
      std::copy(trace.embed[static_cast<std::size_t>(j)].begin(),
                trace.embed[static_cast<std::size_t>(j)].end(),
                x.begin() + static_cast<std::ptrdiff_t>(slot * dims.embed_dim));
    }
    std::fill(dx.begin(), dx.end(), 0.0);
    for (std::size_t r = 0; r < dims.hidden_dim; ++r) {
      const double h = trace.hidden[i][r];
      const double da = dh[i][r] * (1.0 - h * h);
      if (da == 0.0) continue;
      double* w1_row = grad_out.encoder_w.data() + r * win_in;
      const double* w_row = params.encoder_w.data() + r * win_in;
      for (std::size_t c = 0; c < win_in; ++c) {
        w1_row[c] += scale * da * x[c];
        dx[c] += da * w_row[c];
      }
      grad_out.encoder_b[r] += scale * da;
    }
    for (std::ptrdiff_t s = -win; s <= win; ++s) {
      const auto j = static_cast<std::ptrdiff_t>(i) + s;
      if (j < 0 || j >= static_cast<std::ptrdiff_t>(n)) continue;
      const auto slot = static_cast<std::size_t>(s + win);
      const double* dx_slot = dx.data() + slot * dims.embed_dim;
      auto& de = dembed[static_cast<std::size_t>(j)];
      for (std::size_t d = 0; d < dims.embed_dim; ++d) de[d] += dx_slot[d];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double inv_grams =
        1.0 / static_cast<double>(trace.buckets[i].size());
    for (const std::size_t b : trace.buckets[i]) {
      double* row = grad_out.token_embed.data() + b * dims.embed_dim;
      for (std::size_t d = 0; d < dims.embed_dim; ++d) {
        row[d] += scale * inv_grams * dembed[i][d];
      }
    }
  }
}

}  // namespace detail

// Joint training objective: mean token cross-entropy of the gated
// distributions, binary cross-entropy of the multilabel probabilities, and
// binary cross-entropy of the gate against "has at least one span".
inline double loss(const TweetAnnotation& example, const ModelParams& params,
                   const LossWeights& weights = {}) {
  const auto terms = detail::make_terms(example);
  if (terms.tokens.empty()) {
    throw EmptyInputError("example \"" + example.id +
                          "\" tokenizes to an empty sequence");
  }
  return detail::loss_terms(terms, params, weights);
}

// Exact analytic gradient of the mean loss over the batch, shaped like
// ModelParams.
inline ModelParams grad(const std::vector<TweetAnnotation>& batch,
                        const ModelParams& params,
                        const LossWeights& weights = {}) {
  if (batch.empty()) {
    throw EmptyInputError("gradient requires a nonempty batch");
  }
  ModelParams g = zero_params(params.dims);
  const double scale = 1.0 / static_cast<double>(batch.size());
  for (const TweetAnnotation& example : batch) {
    const auto terms = detail::make_terms(example);
    if (terms.tokens.empty()) {
      throw EmptyInputError("example \"" + example.id +
                            "\" tokenizes to an empty sequence");
    }
    detail::accumulate_grad(terms, params, weights, scale, g);
  }
  return g;
}

// Uniform ±1/sqrt(fan_in) weight init, zero biases. Deterministic in seed.
inline ModelParams init_params(const ModelDims& dims, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ModelParams p = zero_params(dims);
  detail::fill_uniform(p.token_embed,
                       1.0 / std::sqrt(static_cast<double>(dims.embed_dim)),
                       rng);
  detail::fill_uniform(p.encoder_w,
                       1.0 / std::sqrt(static_cast<double>(dims.window_input())),
                       rng);
  const double head_limit = 1.0 / std::sqrt(static_cast<double>(dims.hidden_dim));
  detail::fill_uniform(p.token_head_w, head_limit, rng);
  detail::fill_uniform(p.sent_head_w, head_limit, rng);
  detail::fill_uniform(p.gate_w, head_limit, rng);
  return p;
}

struct TrainResult {
  ModelParams params;
  double initial_loss = 0.0;
  std::vector<double> epoch_loss;  // mean dataset loss after each epoch
  std::size_t skipped_examples = 0;
};

namespace detail {

inline void shuffle_indices(std::vector<std::size_t>& idx,
                            std::mt19937_64& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    const std::size_t j = rng() % i;
    std::swap(idx[i - 1], idx[j]);
  }
}

}  // namespace detail

// Mini-batch gradient descent. Starts from `initial` when given (continued
// training; its dims win) and from a seeded random init otherwise. Examples
// whose text tokenizes to nothing are skipped and counted. Deterministic:
// the same seed, data and config produce bit-identical parameters.
inline TrainResult train(const std::vector<TweetAnnotation>& dataset,
                         const TrainConfig& config,
                         const std::optional<ModelParams>& initial =
                             std::nullopt) {
  if (dataset.empty()) {
    throw EmptyDatasetError("training dataset is empty");
  }
  std::vector<detail::ExampleTerms> terms;
  std::size_t skipped = 0;
  for (const TweetAnnotation& ann : dataset) {
    auto t = detail::make_terms(ann);
    if (t.tokens.empty()) {
      ++skipped;
      continue;
    }
    terms.push_back(std::move(t));
  }
  if (terms.empty()) {
    throw EmptyDatasetError("no trainable examples: every text tokenizes to "
                            "an empty sequence");
  }

  TrainResult result;
  result.skipped_examples = skipped;
  result.params = initial ? *initial : init_params(config.dims, config.seed);
  const ModelDims& dims = result.params.dims;
  const LossWeights& w = config.weights;

  const auto dataset_loss = [&]() {
    double total = 0.0;
    for (const auto& t : terms) {
      total += detail::loss_terms(t, result.params, w);
    }
    return total / static_cast<double>(terms.size());
  };
  result.initial_loss = dataset_loss();

  std::mt19937_64 shuffle_rng(config.seed ^ 0xD1B54A32D192ED03ull);
  std::vector<std::size_t> order(terms.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t batch_size = std::max<std::size_t>(1, config.batch_size);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    detail::shuffle_indices(order, shuffle_rng);
    for (std::size_t b = 0; b < order.size(); b += batch_size) {
      const std::size_t b_end = std::min(order.size(), b + batch_size);
      ModelParams g = zero_params(dims);
      const double scale = 1.0 / static_cast<double>(b_end - b);
      for (std::size_t k = b; k < b_end; ++k) {
        detail::accumulate_grad(terms[order[k]], result.params, w, scale, g);
      }
      auto target = detail::param_arrays(result.params);
      auto source = detail::param_arrays(g);
      for (std::size_t a = 0; a < target.size(); ++a) {
        for (std::size_t i = 0; i < target[a].second; ++i) {
          target[a].first[i] -= config.learning_rate * source[a].first[i];
        }
      }
    }
    result.epoch_loss.push_back(dataset_loss());
  }
  return result;
}

// Central-difference check of the analytic gradient over every parameter
// coordinate. Returns the maximum relative error with denominator
// max(|analytic|, |numeric|, 1e-8).
inline double grad_check(const TweetAnnotation& example,
                         const ModelParams& params, double epsilon,
                         const LossWeights& weights = {}) {
  if (epsilon <= 0.0) {
    throw std::invalid_argument("epsilon must be positive");
  }
  ModelParams analytic = grad({example}, params, weights);
  ModelParams probe = params;
  auto analytic_arrays = detail::param_arrays(analytic);
  auto probe_arrays = detail::param_arrays(probe);

  const auto terms = detail::make_terms(example);
  double max_rel = 0.0;
  for (std::size_t a = 0; a < probe_arrays.size(); ++a) {
    double* values = probe_arrays[a].first;
    const double* grads = analytic_arrays[a].first;
    for (std::size_t i = 0; i < probe_arrays[a].second; ++i) {
      const double saved = values[i];
      values[i] = saved + epsilon;
      const double up = detail::loss_terms(terms, probe, weights);
      values[i] = saved - epsilon;
      const double down = detail::loss_terms(terms, probe, weights);
      values[i] = saved;
      const double numeric = (up - down) / (2.0 * epsilon);
      const double denom =
          std::max({std::abs(grads[i]), std::abs(numeric), 1e-8});
      max_rel = std::max(max_rel, std::abs(grads[i] - numeric) / denom);
    }
  }
  return max_rel;
}

}  // namespace propspan
