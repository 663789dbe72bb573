#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "phonfeat/ipa.hpp"

namespace phonfeat {

// One resource phoneme symbol; stress_onset marks the start of the stressed
// syllable (`"` prefix in the lexicon file).
struct PronSymbol {
  std::string symbol;
  bool stress_onset = false;

  bool operator==(const PronSymbol&) const = default;
};

struct Lexicon {
  std::string name;
  std::string source_tag;
  std::map<std::string, std::vector<PronSymbol>> entries;  // casefolded words
};

// TSV: `word<TAB>pron` where pron is space-separated resource symbols and a
// `"` prefix marks the stressed syllable's start. Throws Error (with line
// number) on malformed lines, duplicate headwords or empty pronunciations.
Lexicon load_lexicon(const std::string& path, const std::string& format_tag,
                     WarningSink warn = {});

struct DiphthongExpansion {
  std::string first;   // IPA of the first component vowel
  std::string second;  // IPA of the second component vowel
};

// Resource-symbol to IPA mapping, with diphthong symbols flagged so they can
// be split into their component vowels.
struct MappingTable {
  std::string name;
  std::map<std::string, std::string> ipa;
  std::map<std::string, DiphthongExpansion> diphthongs;
};

// TSV: `symbol<TAB>ipa[<TAB>diphthong]`. Every IPA field must tokenize under
// the chart; a diphthong line must tokenize to exactly two vowels.
MappingTable load_mapping_table(const std::string& path, const IPAChart& chart);

// Maps resource symbols to IPA Segments: diphthongs split into component
// vowels, syllable stress lands on the syllable's first vowel (for diphthongs
// the first component), and all length flags are discarded.
std::vector<Segment> to_ipa(const std::vector<PronSymbol>& symbols,
                            const MappingTable& table, const IPAChart& chart);

struct Utterance {
  std::string text;
  std::vector<Segment> segments;
  BitMatrix pf_matrix;  // one row per segment
};

// Encodes segments row-by-row via analyze + binarize.
BitMatrix encode_segments(std::span<const Segment> segments,
                          const AnalysisContext& ctx);

// Builds an utterance from raw text: words are casefolded, stripped of
// punctuation and looked up in the lexicon (OOV is an error, no grapheme
// fallback); words are separated by word_boundary segments and the utterance
// is terminated by sentence_end.
Utterance text_to_utterance(const std::string& text, const Lexicon& lexicon,
                            const MappingTable& table,
                            const AnalysisContext& ctx);

// Utterance built directly from an IPA string (no lexicon pass).
Utterance ipa_to_utterance(const std::string& ipa_text,
                           const AnalysisContext& ctx);

// CSV with schema-derived bit headers; `utt` is an utterance index column so
// multi-utterance streams share one header.
void write_utterance_csv_header(std::ostream& out, const FeatureSchema& schema);
void write_utterance_csv_rows(std::ostream& out, const Utterance& utt,
                              std::size_t utt_index);

nlohmann::ordered_json utterance_to_json(const Utterance& utt);

}  // namespace phonfeat
