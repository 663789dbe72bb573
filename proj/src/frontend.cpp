#include "phonfeat/frontend.hpp"

#include <fstream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "phonfeat/error.hpp"
#include "phonfeat/text.hpp"
#include "phonfeat/utf8.hpp"

namespace phonfeat {

Lexicon load_lexicon(const std::string& path, const std::string& format_tag,
                     WarningSink warn) {
  std::ifstream in(path);
  if (!in) throw Error("lexicon: cannot open '" + path + "'");
  Lexicon lex;
  lex.name = path;
  lex.source_tag = format_tag;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw Error("lexicon: " + path + ":" + std::to_string(lineno) +
                  ": expected <word><TAB><pronunciation>");
    std::string word = utf8_casefold(trim(line.substr(0, tab)));
    std::string pron(trim(line.substr(tab + 1)));
    if (word.empty())
      throw Error("lexicon: " + path + ":" + std::to_string(lineno) +
                  ": empty headword");
    if (pron.empty())
      throw Error("lexicon: " + path + ":" + std::to_string(lineno) +
                  ": empty pronunciation for '" + word + "'");
    if (lex.entries.count(word))
      throw Error("lexicon: " + path + ":" + std::to_string(lineno) +
                  ": duplicate headword '" + word + "'");
    std::vector<PronSymbol> symbols;
    bool pending_onset = false;
    for (std::string tok : split_whitespace(pron)) {
      bool onset = pending_onset;
      pending_onset = false;
      while (!tok.empty() && tok.front() == '"') {
        onset = true;
        tok.erase(tok.begin());
      }
      if (tok.empty()) {
        // Bare `"` marks the next symbol's syllable.
        pending_onset = onset;
        continue;
      }
      PronSymbol ps;
      ps.stress_onset = onset;
      ps.symbol = std::move(tok);
      symbols.push_back(std::move(ps));
    }
    if (pending_onset)
      throw Error("lexicon: " + path + ":" + std::to_string(lineno) +
                  ": trailing stress marker in pronunciation for '" + word +
                  "'");
    if (symbols.empty())
      throw Error("lexicon: " + path + ":" + std::to_string(lineno) +
                  ": pronunciation for '" + word + "' has no symbols");
    lex.entries[word] = std::move(symbols);
  }
  if (lex.entries.empty() && warn)
    warn("lexicon: '" + path + "' is empty");
  return lex;
}

MappingTable load_mapping_table(const std::string& path, const IPAChart& chart) {
  std::ifstream in(path);
  if (!in) throw Error("mapping: cannot open '" + path + "'");
  MappingTable table;
  table.name = path;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto cols = split_char(line, '\t');
    if (cols.size() < 2 || cols.size() > 3)
      throw Error("mapping: " + path + ":" + std::to_string(lineno) +
                  ": expected <symbol><TAB><ipa>[<TAB>diphthong]");
    std::string symbol(trim(cols[0]));
    std::string ipa(trim(cols[1]));
    if (symbol.empty() || ipa.empty())
      throw Error("mapping: " + path + ":" + std::to_string(lineno) +
                  ": empty symbol or IPA field");
    if (table.ipa.count(symbol))
      throw Error("mapping: " + path + ":" + std::to_string(lineno) +
                  ": duplicate symbol '" + symbol + "'");
    std::vector<Segment> segs;
    try {
      segs = tokenize(ipa, chart);
    } catch (const Error& e) {
      throw Error("mapping: " + path + ":" + std::to_string(lineno) + ": " +
                  e.what());
    }
    if (cols.size() == 3) {
      if (trim(cols[2]) != "diphthong")
        throw Error("mapping: " + path + ":" + std::to_string(lineno) +
                    ": unknown flag '" + std::string(trim(cols[2])) + "'");
      if (segs.size() != 2 || !chart.is_vowel(segs[0].base) ||
          !chart.is_vowel(segs[1].base))
        throw Error("mapping: " + path + ":" + std::to_string(lineno) +
                    ": diphthong '" + symbol +
                    "' must map to exactly two vowels");
      table.diphthongs[symbol] = {render(segs[0], false), render(segs[1], false)};
    }
    table.ipa[symbol] = ipa;
  }
  return table;
}

std::vector<Segment> to_ipa(const std::vector<PronSymbol>& symbols,
                            const MappingTable& table, const IPAChart& chart) {
  std::vector<Segment> out;
  bool stress_pending = false;
  for (const auto& ps : symbols) {
    auto it = table.ipa.find(ps.symbol);
    if (it == table.ipa.end())
      throw Error("to_ipa: resource symbol '" + ps.symbol +
                  "' is not in mapping table '" + table.name + "'");
    if (ps.stress_onset) stress_pending = true;

    std::vector<Segment> segs = tokenize(it->second, chart);
    const bool is_diphthong = table.diphthongs.count(ps.symbol) > 0;
    bool first_vowel_in_symbol = true;
    for (Segment& seg : segs) {
      seg.long_mark = false;  // vowel/consonant length is discarded
      if (seg.kind == SegmentKind::phoneme && chart.is_vowel(seg.base)) {
        if (is_diphthong && !first_vowel_in_symbol) {
          seg.stressed = false;  // only the first component may carry stress
        } else if (stress_pending) {
          seg.stressed = true;
          stress_pending = false;
        }
        first_vowel_in_symbol = false;
      }
      out.push_back(std::move(seg));
    }
  }
  return out;
}

BitMatrix encode_segments(std::span<const Segment> segments,
                          const AnalysisContext& ctx) {
  BitMatrix m(static_cast<Index>(segments.size()), ctx.schema->total_bits());
  for (std::size_t i = 0; i < segments.size(); ++i)
    m.row(static_cast<Index>(i)) = analyze(segments[i], ctx).bits;
  return m;
}

namespace {

// Strips leading/trailing punctuation; interior apostrophes and hyphens stay
// (lexicon headwords may contain them).
std::string strip_punctuation(const std::string& word) {
  static const std::u32string kPunct = U".,;:!?\"()[]{}“”„«»‘’…—";
  std::vector<char32_t> cps = utf8_decode(word);
  std::size_t begin = 0;
  std::size_t end = cps.size();
  auto is_punct = [&](char32_t cp) {
    return kPunct.find(cp) != std::u32string::npos || cp == U'\'' || cp == U'-';
  };
  while (begin < end && is_punct(cps[begin])) ++begin;
  while (end > begin && is_punct(cps[end - 1])) --end;
  return utf8_encode(std::vector<char32_t>(cps.begin() + begin, cps.begin() + end));
}

}  // namespace

Utterance text_to_utterance(const std::string& text, const Lexicon& lexicon,
                            const MappingTable& table,
                            const AnalysisContext& ctx) {
  Utterance utt;
  utt.text = text;
  bool first = true;
  for (const std::string& raw : split_whitespace(text)) {
    std::string word = utf8_casefold(strip_punctuation(raw));
    if (word.empty()) continue;
    auto entry = lexicon.entries.find(word);
    if (entry == lexicon.entries.end())
      throw Error("frontend: word '" + word + "' is not in lexicon '" +
                  lexicon.name + "'");
    if (!first)
      utt.segments.push_back(Segment::boundary(SegmentKind::word_boundary));
    first = false;
    for (Segment& seg : to_ipa(entry->second, table, *ctx.chart))
      utt.segments.push_back(std::move(seg));
  }
  utt.segments.push_back(Segment::boundary(SegmentKind::sentence_end));
  utt.pf_matrix = encode_segments(utt.segments, ctx);
  return utt;
}

Utterance ipa_to_utterance(const std::string& ipa_text,
                           const AnalysisContext& ctx) {
  Utterance utt;
  utt.text = ipa_text;
  utt.segments = tokenize(ipa_text, *ctx.chart);
  utt.pf_matrix = encode_segments(utt.segments, ctx);
  return utt;
}

void write_utterance_csv_header(std::ostream& out, const FeatureSchema& schema) {
  out << "utt,symbol,kind";
  for (const auto& def : schema.features())
    for (const auto& value : def.values) out << ',' << def.name << ':' << value;
  out << '\n';
}

void write_utterance_csv_rows(std::ostream& out, const Utterance& utt,
                              std::size_t utt_index) {
  for (std::size_t i = 0; i < utt.segments.size(); ++i) {
    const Segment& seg = utt.segments[i];
    out << utt_index << ',' << render(seg) << ',' << to_string(seg.kind);
    for (Index j = 0; j < utt.pf_matrix.cols(); ++j)
      out << ',' << static_cast<int>(utt.pf_matrix(static_cast<Index>(i), j));
    out << '\n';
  }
}

nlohmann::ordered_json utterance_to_json(const Utterance& utt) {
  nlohmann::ordered_json doc;
  doc["text"] = utt.text;
  doc["segments"] = nlohmann::ordered_json::array();
  for (const auto& seg : utt.segments) {
    nlohmann::ordered_json s;
    s["ipa"] = render(seg);
    s["kind"] = to_string(seg.kind);
    if (seg.kind == SegmentKind::phoneme) {
      s["base"] = seg.base;
      s["diacritics"] = seg.diacritics;
      s["stressed"] = seg.stressed;
      s["long"] = seg.long_mark;
    }
    doc["segments"].push_back(std::move(s));
  }
  doc["pf_matrix"] = nlohmann::ordered_json::array();
  for (Index i = 0; i < utt.pf_matrix.rows(); ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (Index j = 0; j < utt.pf_matrix.cols(); ++j)
      row.push_back(static_cast<int>(utt.pf_matrix(i, j)));
    doc["pf_matrix"].push_back(std::move(row));
  }
  return doc;
}

}  // namespace phonfeat
