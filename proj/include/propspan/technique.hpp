#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "propspan/unicode.hpp"

namespace propspan {

// The closed 20-technique inventory, in registry order. The integer value
// of each member is its stable index.
enum class Technique : int {
  AppealToAuthority = 0,
  AppealToFearPrejudice = 1,
  BlackAndWhiteFallacy = 2,
  CausalOversimplification = 3,
  Doubt = 4,
  ExaggerationMinimisation = 5,
  FlagWaving = 6,
  GlitteringGeneralities = 7,
  LoadedLanguage = 8,
  MisrepresentationOfPosition = 9,
  NameCallingLabeling = 10,
  ObfuscationVagueness = 11,
  RedHerring = 12,
  ReductioAdHitlerum = 13,
  Repetition = 14,
  Slogans = 15,
  Smears = 16,
  ThoughtTerminatingCliche = 17,
  Whataboutism = 18,
  Bandwagon = 19,
};

inline constexpr std::size_t kTechniqueCount = 20;

inline constexpr std::array<std::string_view, kTechniqueCount>
    kTechniqueNames = {
        "Appeal to authority",
        "Appeal to fear/prejudice",
        "Black-and-white Fallacy/Dictatorship",
        "Causal oversimplification",
        "Doubt",
        "Exaggeration/Minimisation",
        "Flag-waving",
        "Glittering generalities (virtue)",
        "Loaded language",
        "Misrepresentation of someone's position",
        "Name calling/Labeling",
        "Obfuscation, intentional vagueness, confusion",
        "Presenting irrelevant data (red herring)",
        "Reductio ad hitlerum",
        "Repetition",
        "Slogans",
        "Smears",
        "Thought-terminating cliché",
        "Whataboutism",
        "Bandwagon",
};

constexpr std::string_view technique_name(Technique t) {
  return kTechniqueNames[static_cast<std::size_t>(t)];
}

constexpr int technique_index(Technique t) { return static_cast<int>(t); }

constexpr Technique technique_at(std::size_t index) {
  return static_cast<Technique>(index);
}

inline std::array<Technique, kTechniqueCount> all_techniques() {
  std::array<Technique, kTechniqueCount> out{};
  for (std::size_t i = 0; i < kTechniqueCount; ++i) out[i] = technique_at(i);
  return out;
}

class UnknownTechniqueError : public std::runtime_error {
 public:
  UnknownTechniqueError(std::string name, std::string message)
      : std::runtime_error(std::move(message)), name_(std::move(name)) {}

  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

namespace detail {

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

inline std::size_t edit_distance(std::string_view a, std::string_view b) {
  const auto ca = decode_utf8(a);
  const auto cb = decode_utf8(b);
  std::vector<std::size_t> row(cb.size() + 1);
  for (std::size_t j = 0; j <= cb.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= ca.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= cb.size(); ++j) {
      const std::size_t subst =
          diag + (ca[i - 1].value == cb[j - 1].value ? 0 : 1);
      diag = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, subst});
    }
  }
  return row[cb.size()];
}

}  // namespace detail

// Names closest to `name` by case-insensitive edit distance, nearest first.
inline std::vector<std::string_view> nearest_technique_names(
    std::string_view name, std::size_t count = 3) {
  const std::string needle = detail::ascii_lower(name);
  std::array<std::pair<std::size_t, std::size_t>, kTechniqueCount> ranked{};
  for (std::size_t i = 0; i < kTechniqueCount; ++i) {
    ranked[i] = {detail::edit_distance(
                     needle, detail::ascii_lower(kTechniqueNames[i])),
                 i};
  }
  std::sort(ranked.begin(), ranked.end());
  std::vector<std::string_view> out;
  for (std::size_t i = 0; i < std::min(count, kTechniqueCount); ++i) {
    out.push_back(kTechniqueNames[ranked[i].second]);
  }
  return out;
}

// Lookup after combining-mark composition and surrounding-whitespace trim.
inline std::optional<Technique> find_technique(std::string_view name) {
  const std::string normalized = compose_marks(trim_spaces(name));
  for (std::size_t i = 0; i < kTechniqueCount; ++i) {
    if (normalized == kTechniqueNames[i]) return technique_at(i);
  }
  return std::nullopt;
}

inline Technique technique_from_name(std::string_view name) {
  if (auto t = find_technique(name)) return *t;
  std::string message = "unknown technique: \"";
  message += name;
  message += "\"; closest canonical names:";
  for (const auto candidate : nearest_technique_names(name)) {
    message += " \"";
    message += candidate;
    message += "\"";
  }
  throw UnknownTechniqueError(std::string(name), std::move(message));
}

}  // namespace propspan
