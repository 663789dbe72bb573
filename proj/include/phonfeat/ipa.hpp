#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "phonfeat/schema.hpp"

namespace phonfeat {

enum class SegmentKind { phoneme, silence, word_boundary, sentence_end };

const char* to_string(SegmentKind kind);
SegmentKind segment_kind_from_string(const std::string& name);

// One parsed IPA unit. Non-phoneme kinds carry no base, diacritics, stress
// or length.
struct Segment {
  SegmentKind kind = SegmentKind::phoneme;
  std::string base;                     // base symbol, incl. tie bar for affricates
  std::vector<std::string> diacritics;  // schema diacritic value names, in order
  bool stressed = false;
  bool long_mark = false;
  std::optional<std::pair<std::string, std::string>> affricate_components;

  static Segment boundary(SegmentKind kind);
  static Segment phoneme(std::string base);

  bool operator==(const Segment&) const = default;
};

struct ConsonantTraits {
  std::string voicing;
  std::string place;
  std::string manner;
};

struct VowelTraits {
  std::string frontness;
  std::string openness;
  std::string roundedness;
};

// Built-in IPA chart: articulatory traits per base symbol plus the combining
// and modifier marks recognized as diacritics. Immutable after load.
struct IPAChart {
  std::map<std::string, ConsonantTraits> consonants;
  std::map<std::string, VowelTraits> vowels;
  std::map<char32_t, std::string> diacritic_marks;  // mark codepoint -> name
  // Single codepoints that tokenize as base + intrinsic diacritics (e.g. the
  // velarized l).
  std::map<std::string, std::pair<std::string, std::vector<std::string>>>
      precomposed;

  bool is_vowel(const std::string& base) const { return vowels.count(base) > 0; }
  bool is_consonant(const std::string& base) const {
    return consonants.count(base) > 0;
  }
  bool contains(const std::string& base) const {
    return is_vowel(base) || is_consonant(base);
  }
  std::size_t size() const { return consonants.size() + vowels.size(); }
};

// Chart covering the full pulmonic consonant and vowel tables plus the common
// "other symbols", affricate ligatures and implosive stubs (109 bases).
const IPAChart& default_chart();

// JSON export of the embedded chart for auditing.
nlohmann::ordered_json chart_to_json(const IPAChart& chart);

// Spelling of the canonical mark for a diacritic name (modifier letter where
// one exists, combining mark otherwise).
std::string diacritic_mark_for(const std::string& name);

// Non-phoneme tokens recognized by the tokenizer. sentence_end only matches
// when it stands alone as a whitespace-separated token; an attached '.' is a
// syllable separator and produces no segment.
struct BoundaryTokens {
  std::string silence = "_";
  std::string word_boundary = "#";
  std::string sentence_end = ".";
};

// Splits an IPA string into Segments. Primary stress (U+02C8) attaches to the
// next vowel, the length mark (U+02D0) to the preceding phoneme, combining and
// modifier diacritics to the preceding base, and a tie bar (U+0361 or U+035C)
// joins two consonants into one affricate segment. Secondary stress (U+02CC)
// is parsed and dropped. Throws Error on unknown symbols, dangling marks and
// unconsumed stress marks.
std::vector<Segment> tokenize(std::string_view ipa_text, const IPAChart& chart,
                              const BoundaryTokens& boundaries = {});

// Renders Segments back to IPA text such that tokenize(render(s)) == s.
std::string render(const Segment& segment, bool with_stress_and_length = true);
std::string render(std::span<const Segment> segments,
                   const BoundaryTokens& boundaries = {});

// Override dictionary: rendered symbol (base + diacritics, no stress/length
// marks) -> full categorical record. Wins over compositional analysis.
using OverrideDict = std::map<std::string, CategoricalMap>;

// TSV: `<ipa><TAB><feature=value;feature=value;...>`.
OverrideDict load_pf_overrides(const std::string& path,
                               const FeatureSchema& schema);

using WarningSink = std::function<void(const std::string&)>;

// Bundles the immutable lookup state most analysis passes need.
struct AnalysisContext {
  const FeatureSchema* schema = &default_schema();
  const IPAChart* chart = &default_chart();
  const OverrideDict* overrides = nullptr;
  WarningSink warn;
};

// Compositional segment analysis: chart traits, stress flag, and the highest
// priority diacritic produce the categorical record, which is then binarized.
// Override entries replace the composed record wholesale (stress stays
// segment-driven unless the override pins it). Throws Error when the base is
// neither in the chart nor overridden.
PFVector analyze(const Segment& segment, const AnalysisContext& ctx);
PFVector analyze(const Segment& segment, const FeatureSchema& schema,
                 const IPAChart& chart, const OverrideDict* overrides = nullptr,
                 WarningSink warn = {});

}  // namespace phonfeat
