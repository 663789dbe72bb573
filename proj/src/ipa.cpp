#include "phonfeat/ipa.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "phonfeat/error.hpp"
#include "phonfeat/text.hpp"
#include "phonfeat/utf8.hpp"

namespace phonfeat {

namespace {

constexpr char32_t kPrimaryStress = U'ˈ';
constexpr char32_t kSecondaryStress = U'ˌ';
constexpr char32_t kLengthMark = U'ː';
constexpr char32_t kTieBarAbove = U'͡';
constexpr char32_t kTieBarBelow = U'͜';

bool is_ws(char32_t cp) {
  return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r';
}

}  // namespace

const char* to_string(SegmentKind kind) {
  switch (kind) {
    case SegmentKind::phoneme: return "phoneme";
    case SegmentKind::silence: return "silence";
    case SegmentKind::word_boundary: return "word_boundary";
    case SegmentKind::sentence_end: return "sentence_end";
  }
  return "phoneme";
}

SegmentKind segment_kind_from_string(const std::string& name) {
  if (name == "phoneme") return SegmentKind::phoneme;
  if (name == "silence") return SegmentKind::silence;
  if (name == "word_boundary") return SegmentKind::word_boundary;
  if (name == "sentence_end") return SegmentKind::sentence_end;
  throw Error("unknown segment kind '" + name + "'");
}

Segment Segment::boundary(SegmentKind kind) {
  Segment s;
  s.kind = kind;
  return s;
}

Segment Segment::phoneme(std::string base) {
  Segment s;
  s.kind = SegmentKind::phoneme;
  s.base = std::move(base);
  return s;
}

std::vector<Segment> tokenize(std::string_view ipa_text, const IPAChart& chart,
                              const BoundaryTokens& boundaries) {
  const std::vector<char32_t> cps = utf8_decode(ipa_text);
  const std::vector<char32_t> silence_tok = utf8_decode(boundaries.silence);
  const std::vector<char32_t> word_tok = utf8_decode(boundaries.word_boundary);
  const std::vector<char32_t> end_tok = utf8_decode(boundaries.sentence_end);

  std::vector<Segment> segments;
  int pending_stress = 0;
  bool pending_tie = false;
  char32_t tie_cp = kTieBarAbove;

  auto matches = [&](std::size_t i, const std::vector<char32_t>& tok) {
    if (tok.empty() || i + tok.size() > cps.size()) return false;
    return std::equal(tok.begin(), tok.end(), cps.begin() + i);
  };
  auto separated = [&](std::size_t i, std::size_t len) {
    const bool left = i == 0 || is_ws(cps[i - 1]);
    const bool right = i + len == cps.size() || is_ws(cps[i + len]);
    return left && right;
  };
  auto last_phoneme = [&]() -> Segment* {
    if (segments.empty() || segments.back().kind != SegmentKind::phoneme)
      return nullptr;
    return &segments.back();
  };

  std::size_t i = 0;
  while (i < cps.size()) {
    const char32_t cp = cps[i];
    if (is_ws(cp)) {
      ++i;
      continue;
    }
    if (matches(i, silence_tok)) {
      segments.push_back(Segment::boundary(SegmentKind::silence));
      i += silence_tok.size();
      continue;
    }
    if (matches(i, word_tok)) {
      segments.push_back(Segment::boundary(SegmentKind::word_boundary));
      i += word_tok.size();
      continue;
    }
    if (matches(i, end_tok)) {
      if (separated(i, end_tok.size())) {
        segments.push_back(Segment::boundary(SegmentKind::sentence_end));
        i += end_tok.size();
        continue;
      }
      if (end_tok.size() == 1 && end_tok[0] == U'.') {
        // Attached dot is a syllable separator, no segment.
        ++i;
        continue;
      }
    }
    if (cp == kPrimaryStress) {
      ++pending_stress;
      ++i;
      continue;
    }
    if (cp == kSecondaryStress) {
      // Binary stress model: secondary stress parses as unstressed.
      ++i;
      continue;
    }
    if (cp == kLengthMark) {
      Segment* prev = last_phoneme();
      if (!prev)
        throw Error("tokenize: length mark " + codepoint_name(cp) +
                    " has no preceding phoneme");
      prev->long_mark = true;
      ++i;
      continue;
    }
    if (cp == kTieBarAbove || cp == kTieBarBelow) {
      Segment* prev = last_phoneme();
      if (!prev)
        throw Error("tokenize: tie bar has no preceding phoneme");
      if (pending_tie || prev->affricate_components)
        throw Error("tokenize: chained tie bars are not supported");
      pending_tie = true;
      tie_cp = cp;
      ++i;
      continue;
    }
    if (auto mark = chart.diacritic_marks.find(cp);
        mark != chart.diacritic_marks.end()) {
      Segment* prev = last_phoneme();
      if (!prev)
        throw Error("tokenize: dangling diacritic " + codepoint_name(cp) +
                    " (no preceding base symbol)");
      prev->diacritics.push_back(mark->second);
      ++i;
      continue;
    }

    // Base symbol.
    const std::string sym = utf8_encode(cp);
    std::string base = sym;
    std::vector<std::string> intrinsic;
    if (auto pre = chart.precomposed.find(sym); pre != chart.precomposed.end()) {
      base = pre->second.first;
      intrinsic = pre->second.second;
    } else if (!chart.contains(sym)) {
      throw Error("tokenize: unknown IPA symbol '" + sym + "' (" +
                  codepoint_name(cp) + ")");
    }

    if (pending_tie) {
      Segment& prev = segments.back();
      if (!chart.is_consonant(prev.base) || !chart.is_consonant(base))
        throw Error("tokenize: tie bar requires two consonant components, got '" +
                    prev.base + "' + '" + base + "'");
      prev.affricate_components = std::make_pair(prev.base, base);
      prev.base = prev.base + utf8_encode(tie_cp) + base;
      for (const auto& d : intrinsic) prev.diacritics.push_back(d);
      pending_tie = false;
      ++i;
      continue;
    }

    Segment seg = Segment::phoneme(base);
    seg.diacritics = std::move(intrinsic);
    if (chart.is_vowel(base) && pending_stress > 0) {
      seg.stressed = true;
      --pending_stress;
    }
    segments.push_back(std::move(seg));
    ++i;
  }

  if (pending_tie) throw Error("tokenize: dangling tie bar at end of input");
  if (pending_stress > 0)
    throw Error("tokenize: stress mark with no following vowel");
  return segments;
}

std::string render(const Segment& segment, bool with_stress_and_length) {
  switch (segment.kind) {
    case SegmentKind::silence: return BoundaryTokens{}.silence;
    case SegmentKind::word_boundary: return BoundaryTokens{}.word_boundary;
    case SegmentKind::sentence_end: return BoundaryTokens{}.sentence_end;
    case SegmentKind::phoneme: break;
  }
  std::string out;
  if (with_stress_and_length && segment.stressed) out += utf8_encode(kPrimaryStress);
  out += segment.base;
  for (const auto& d : segment.diacritics) out += diacritic_mark_for(d);
  if (with_stress_and_length && segment.long_mark) out += utf8_encode(kLengthMark);
  return out;
}

std::string render(std::span<const Segment> segments,
                   const BoundaryTokens& boundaries) {
  std::string out;
  for (const auto& seg : segments) {
    if (seg.kind != SegmentKind::phoneme) {
      if (!out.empty() && out.back() != ' ') out += ' ';
      switch (seg.kind) {
        case SegmentKind::silence: out += boundaries.silence; break;
        case SegmentKind::word_boundary: out += boundaries.word_boundary; break;
        default: out += boundaries.sentence_end; break;
      }
      out += ' ';
    } else {
      out += render(seg);
    }
  }
  if (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

namespace {

// Priority used when stacked diacritics must collapse to the single one-hot
// diacritic feature. The leading entries are fixed; everything else follows
// in schema declaration order.
int diacritic_priority(const std::string& name, const FeatureSchema& schema) {
  static const std::vector<std::string> kLeading = {
      "nasalized",  "velarized", "pharyngealized",
      "palatalized", "labialized", "aspirated"};
  for (std::size_t i = 0; i < kLeading.size(); ++i)
    if (kLeading[i] == name) return static_cast<int>(i);
  const FeatureDef* def = schema.find("diacritic");
  if (def) {
    for (std::size_t i = 0; i < def->values.size(); ++i)
      if (def->values[i] == name)
        return static_cast<int>(kLeading.size() + i);
  }
  throw Error("analyze: diacritic '" + name + "' absent from schema");
}

CategoricalMap compose_phoneme(const Segment& segment, const FeatureSchema& schema,
                               const IPAChart& chart, const WarningSink& warn) {
  CategoricalMap cat;
  cat["symbol_type"] = "phoneme";

  if (segment.affricate_components) {
    const auto& [first, second] = *segment.affricate_components;
    auto f = chart.consonants.find(first);
    auto s = chart.consonants.find(second);
    if (f == chart.consonants.end() || s == chart.consonants.end())
      throw Error("analyze: affricate component not in chart for '" +
                  segment.base + "'");
    cat["cv"] = "consonant";
    // Voicing follows the plosive component, place the fricative one; for
    // unusual pairings fall back to first/second respectively.
    const ConsonantTraits* voicing_src = &f->second;
    if (f->second.manner != "plosive" && s->second.manner == "plosive")
      voicing_src = &s->second;
    const ConsonantTraits* place_src = &s->second;
    if (s->second.manner != "fricative" && f->second.manner == "fricative")
      place_src = &f->second;
    cat["voicing"] = voicing_src->voicing;
    cat["place"] = place_src->place;
    cat["manner"] = "affricate";
  } else if (auto c = chart.consonants.find(segment.base);
             c != chart.consonants.end()) {
    cat["cv"] = "consonant";
    cat["voicing"] = c->second.voicing;
    cat["place"] = c->second.place;
    cat["manner"] = c->second.manner;
  } else if (auto v = chart.vowels.find(segment.base);
             v != chart.vowels.end()) {
    cat["cv"] = "vowel";
    cat["voicing"] = "voiced";
    cat["frontness"] = v->second.frontness;
    cat["openness"] = v->second.openness;
    cat["roundedness"] = v->second.roundedness;
    cat["stress"] = segment.stressed ? "stressed" : "unstressed";
  } else {
    throw Error("analyze: symbol '" + segment.base +
                "' is not in the chart and has no override entry");
  }

  if (!segment.diacritics.empty()) {
    std::string chosen = segment.diacritics.front();
    int best = diacritic_priority(chosen, schema);
    for (const auto& d : segment.diacritics) {
      int p = diacritic_priority(d, schema);
      if (p < best) {
        best = p;
        chosen = d;
      }
    }
    bool dropped = false;
    for (const auto& d : segment.diacritics)
      if (d != chosen) dropped = true;
    if (dropped && warn)
      warn("segment '" + render(segment, false) +
           "' has stacked diacritics; keeping '" + chosen + "'");
    cat["diacritic"] = chosen;
  }
  return cat;
}

}  // namespace

PFVector analyze(const Segment& segment, const AnalysisContext& ctx) {
  const FeatureSchema& schema = *ctx.schema;
  CategoricalMap cat;
  if (segment.kind != SegmentKind::phoneme) {
    cat["symbol_type"] = to_string(segment.kind);
  } else {
    bool overridden = false;
    if (ctx.overrides) {
      auto it = ctx.overrides->find(render(segment, false));
      if (it != ctx.overrides->end()) {
        cat = it->second;
        if (!cat.count("symbol_type")) cat["symbol_type"] = "phoneme";
        auto cv = cat.find("cv");
        if (cv != cat.end() && cv->second == "vowel" && !cat.count("stress"))
          cat["stress"] = segment.stressed ? "stressed" : "unstressed";
        overridden = true;
      }
    }
    if (!overridden) cat = compose_phoneme(segment, schema, *ctx.chart, ctx.warn);
  }
  PFVector pf;
  pf.bits = binarize(cat, schema);
  pf.categorical = std::move(cat);
  return pf;
}

PFVector analyze(const Segment& segment, const FeatureSchema& schema,
                 const IPAChart& chart, const OverrideDict* overrides,
                 WarningSink warn) {
  AnalysisContext ctx{&schema, &chart, overrides, std::move(warn)};
  return analyze(segment, ctx);
}

OverrideDict load_pf_overrides(const std::string& path,
                               const FeatureSchema& schema) {
  std::ifstream in(path);
  if (!in) throw Error("overrides: cannot open '" + path + "'");
  OverrideDict dict;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw Error("overrides: line " + std::to_string(lineno) +
                  ": expected <ipa><TAB><feature=value;...>");
    std::string ipa(trim(line.substr(0, tab)));
    std::string spec(trim(line.substr(tab + 1)));
    if (ipa.empty() || spec.empty())
      throw Error("overrides: line " + std::to_string(lineno) +
                  ": empty symbol or feature list");
    CategoricalMap cat;
    for (const auto& pair : split_char(spec, ';')) {
      auto p = trim(pair);
      if (p.empty()) continue;
      auto eq = p.find('=');
      if (eq == std::string::npos)
        throw Error("overrides: line " + std::to_string(lineno) +
                    ": expected feature=value, got '" + std::string(p) + "'");
      std::string feature(trim(p.substr(0, eq)));
      std::string value(trim(p.substr(eq + 1)));
      // Validate names eagerly so bad files fail at load, not at use.
      schema.value_index(feature, value);
      cat[feature] = value;
    }
    if (dict.count(ipa))
      throw Error("overrides: line " + std::to_string(lineno) +
                  ": duplicate entry for '" + ipa + "'");
    dict[ipa] = std::move(cat);
  }
  return dict;
}

}  // namespace phonfeat
