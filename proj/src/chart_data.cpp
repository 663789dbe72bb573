#include <nlohmann/json.hpp>

#include "phonfeat/error.hpp"
#include "phonfeat/ipa.hpp"
#include "phonfeat/utf8.hpp"

namespace phonfeat {

namespace {

IPAChart build_default_chart() {
  IPAChart chart;

  struct C {
    const char* sym;
    const char* voicing;
    const char* place;
    const char* manner;
  };
  // Pulmonic consonant table, row by row, plus the standalone symbols,
  // affricate ligatures and implosive stubs (implosives are charted as plain
  // plosives; clicks are unsupported).
  static const C kConsonants[] = {
      // plosives
      {"p", "unvoiced", "bilabial", "plosive"},
      {"b", "voiced", "bilabial", "plosive"},
      {"t", "unvoiced", "alveolar", "plosive"},
      {"d", "voiced", "alveolar", "plosive"},
      {"ʈ", "unvoiced", "retroflex", "plosive"},
      {"ɖ", "voiced", "retroflex", "plosive"},
      {"c", "unvoiced", "palatal", "plosive"},
      {"ɟ", "voiced", "palatal", "plosive"},
      {"k", "unvoiced", "velar", "plosive"},
      {"ɡ", "voiced", "velar", "plosive"},
      {"g", "voiced", "velar", "plosive"},  // ASCII alias of ɡ
      {"q", "unvoiced", "uvular", "plosive"},
      {"ɢ", "voiced", "uvular", "plosive"},
      {"ʔ", "unvoiced", "glottal", "plosive"},
      {"ʡ", "unvoiced", "pharyngeal", "plosive"},  // epiglottal stub
      // nasals
      {"m", "voiced", "bilabial", "nasal"},
      {"ɱ", "voiced", "labiodental", "nasal"},
      {"n", "voiced", "alveolar", "nasal"},
      {"ɳ", "voiced", "retroflex", "nasal"},
      {"ɲ", "voiced", "palatal", "nasal"},
      {"ŋ", "voiced", "velar", "nasal"},
      {"ɴ", "voiced", "uvular", "nasal"},
      // trills
      {"ʙ", "voiced", "bilabial", "trill"},
      {"r", "voiced", "alveolar", "trill"},
      {"ʀ", "voiced", "uvular", "trill"},
      // taps and flaps
      {"ⱱ", "voiced", "labiodental", "tap_flap"},
      {"ɾ", "voiced", "alveolar", "tap_flap"},
      {"ɽ", "voiced", "retroflex", "tap_flap"},
      {"ɺ", "voiced", "alveolar", "tap_flap"},  // lateral flap
      // fricatives
      {"ɸ", "unvoiced", "bilabial", "fricative"},
      {"β", "voiced", "bilabial", "fricative"},
      {"f", "unvoiced", "labiodental", "fricative"},
      {"v", "voiced", "labiodental", "fricative"},
      {"θ", "unvoiced", "dental", "fricative"},
      {"ð", "voiced", "dental", "fricative"},
      {"s", "unvoiced", "alveolar", "fricative"},
      {"z", "voiced", "alveolar", "fricative"},
      {"ʃ", "unvoiced", "postalveolar", "fricative"},
      {"ʒ", "voiced", "postalveolar", "fricative"},
      {"ʂ", "unvoiced", "retroflex", "fricative"},
      {"ʐ", "voiced", "retroflex", "fricative"},
      {"ç", "unvoiced", "palatal", "fricative"},
      {"ʝ", "voiced", "palatal", "fricative"},
      {"ɕ", "unvoiced", "palatal", "fricative"},  // alveolo-palatal
      {"ʑ", "voiced", "palatal", "fricative"},    // alveolo-palatal
      {"x", "unvoiced", "velar", "fricative"},
      {"ɣ", "voiced", "velar", "fricative"},
      {"ɧ", "unvoiced", "velar", "fricative"},
      {"ʍ", "unvoiced", "velar", "fricative"},  // labial-velar
      {"χ", "unvoiced", "uvular", "fricative"},
      {"ʁ", "voiced", "uvular", "fricative"},
      {"ħ", "unvoiced", "pharyngeal", "fricative"},
      {"ʕ", "voiced", "pharyngeal", "fricative"},
      {"ʜ", "unvoiced", "pharyngeal", "fricative"},  // epiglottal stub
      {"ʢ", "voiced", "pharyngeal", "fricative"},    // epiglottal stub
      {"h", "unvoiced", "glottal", "fricative"},
      {"ɦ", "voiced", "glottal", "fricative"},
      // lateral fricatives
      {"ɬ", "unvoiced", "alveolar", "lateral_fricative"},
      {"ɮ", "voiced", "alveolar", "lateral_fricative"},
      // approximants
      {"ʋ", "voiced", "labiodental", "approximant"},
      {"ɹ", "voiced", "alveolar", "approximant"},
      {"ɻ", "voiced", "retroflex", "approximant"},
      {"j", "voiced", "palatal", "approximant"},
      {"ɥ", "voiced", "palatal", "approximant"},  // labial-palatal
      {"ɰ", "voiced", "velar", "approximant"},
      {"w", "voiced", "velar", "approximant"},  // labial-velar
      // lateral approximants
      {"l", "voiced", "alveolar", "lateral_approximant"},
      {"ɭ", "voiced", "retroflex", "lateral_approximant"},
      {"ʎ", "voiced", "palatal", "lateral_approximant"},
      {"ʟ", "voiced", "velar", "lateral_approximant"},
      // affricate ligatures
      {"ʦ", "unvoiced", "alveolar", "affricate"},
      {"ʣ", "voiced", "alveolar", "affricate"},
      {"ʧ", "unvoiced", "postalveolar", "affricate"},
      {"ʤ", "voiced", "postalveolar", "affricate"},
      {"ʨ", "unvoiced", "palatal", "affricate"},
      {"ʥ", "voiced", "palatal", "affricate"},
      // implosive stubs
      {"ɓ", "voiced", "bilabial", "plosive"},
      {"ɗ", "voiced", "alveolar", "plosive"},
      {"ʄ", "voiced", "palatal", "plosive"},
      {"ɠ", "voiced", "velar", "plosive"},
      {"ʛ", "voiced", "uvular", "plosive"},
  };

  struct V {
    const char* sym;
    const char* frontness;
    const char* openness;
    const char* roundedness;
  };
  static const V kVowels[] = {
      {"i", "front", "close", "unrounded"},
      {"y", "front", "close", "rounded"},
      {"ɨ", "central", "close", "unrounded"},
      {"ʉ", "central", "close", "rounded"},
      {"ɯ", "back", "close", "unrounded"},
      {"u", "back", "close", "rounded"},
      {"ɪ", "near_front", "near_close", "unrounded"},
      {"ʏ", "near_front", "near_close", "rounded"},
      {"ʊ", "near_back", "near_close", "rounded"},
      {"e", "front", "close_mid", "unrounded"},
      {"ø", "front", "close_mid", "rounded"},
      {"ɘ", "central", "close_mid", "unrounded"},
      {"ɵ", "central", "close_mid", "rounded"},
      {"ɤ", "back", "close_mid", "unrounded"},
      {"o", "back", "close_mid", "rounded"},
      {"ə", "central", "mid", "unrounded"},
      {"ɛ", "front", "open_mid", "unrounded"},
      {"œ", "front", "open_mid", "rounded"},
      {"ɜ", "central", "open_mid", "unrounded"},
      {"ɞ", "central", "open_mid", "rounded"},
      {"ʌ", "back", "open_mid", "unrounded"},
      {"ɔ", "back", "open_mid", "rounded"},
      {"æ", "front", "near_open", "unrounded"},
      {"ɐ", "central", "near_open", "unrounded"},
      {"a", "front", "open", "unrounded"},
      {"ɶ", "front", "open", "rounded"},
      {"ɑ", "back", "open", "unrounded"},
      {"ɒ", "back", "open", "rounded"},
  };

  for (const auto& c : kConsonants)
    chart.consonants[c.sym] = {c.voicing, c.place, c.manner};
  for (const auto& v : kVowels)
    chart.vowels[v.sym] = {v.frontness, v.openness, v.roundedness};

  chart.diacritic_marks = {
      {U'̃', "nasalized"},       // combining tilde
      {U'ˠ', "velarized"},       // modifier small gamma
      {U'̴', "velarized"},       // combining tilde overlay
      {U'ʷ', "labialized"},      // modifier small w
      {U'ʲ', "palatalized"},     // modifier small j
      {U'ˤ', "pharyngealized"},  // modifier reversed glottal stop
      {U'ʰ', "aspirated"},       // modifier small h
      {U'̚', "unreleased"},      // combining left angle above
      {U'̤', "breathy_voiced"},  // combining diaeresis below
      {U'̰', "creaky_voiced"},   // combining tilde below
      {U'̪', "dental_mod"},      // combining bridge below
      {U'̺', "apical"},          // combining inverted bridge below
      {U'̻', "laminal"},         // combining square below
      {U'̟', "advanced"},        // combining plus sign below
      {U'̠', "retracted"},       // combining minus sign below
      {U'˞', "rhotic"},          // rhotic hook
      {U'̩', "syllabic"},        // combining vertical line below
  };

  chart.precomposed = {
      {"ɫ", {"l", {"velarized"}}},
      {"ɚ", {"ə", {"rhotic"}}},
      {"ɝ", {"ɜ", {"rhotic"}}},
      // NFC forms of nasalized vowels; the decomposed base + U+0303 spelling
      // is handled by the diacritic pass.
      {"ã", {"a", {"nasalized"}}},
      {"ẽ", {"e", {"nasalized"}}},
      {"ĩ", {"i", {"nasalized"}}},
      {"õ", {"o", {"nasalized"}}},
      {"ũ", {"u", {"nasalized"}}},
  };

  return chart;
}

}  // namespace

const IPAChart& default_chart() {
  static const IPAChart chart = build_default_chart();
  return chart;
}

std::string diacritic_mark_for(const std::string& name) {
  // Canonical mark per diacritic name, used for rendering.
  static const std::map<std::string, char32_t> kCanonical = {
      {"nasalized", U'̃'},      {"velarized", U'ˠ'},
      {"labialized", U'ʷ'},     {"palatalized", U'ʲ'},
      {"pharyngealized", U'ˤ'}, {"aspirated", U'ʰ'},
      {"unreleased", U'̚'},     {"breathy_voiced", U'̤'},
      {"creaky_voiced", U'̰'},  {"dental_mod", U'̪'},
      {"apical", U'̺'},         {"laminal", U'̻'},
      {"advanced", U'̟'},       {"retracted", U'̠'},
      {"rhotic", U'˞'},         {"syllabic", U'̩'},
  };
  auto it = kCanonical.find(name);
  if (it == kCanonical.end())
    throw Error("render: no canonical mark for diacritic '" + name + "'");
  return utf8_encode(it->second);
}

nlohmann::ordered_json chart_to_json(const IPAChart& chart) {
  nlohmann::ordered_json doc;
  doc["consonants"] = nlohmann::ordered_json::object();
  for (const auto& [sym, t] : chart.consonants)
    doc["consonants"][sym] = {
        {"voicing", t.voicing}, {"place", t.place}, {"manner", t.manner}};
  doc["vowels"] = nlohmann::ordered_json::object();
  for (const auto& [sym, t] : chart.vowels)
    doc["vowels"][sym] = {{"frontness", t.frontness},
                          {"openness", t.openness},
                          {"roundedness", t.roundedness}};
  doc["diacritics"] = nlohmann::ordered_json::object();
  for (const auto& [mark, name] : chart.diacritic_marks)
    doc["diacritics"][utf8_encode(mark)] = name;
  doc["precomposed"] = nlohmann::ordered_json::object();
  for (const auto& [sym, decomp] : chart.precomposed)
    doc["precomposed"][sym] = {{"base", decomp.first},
                               {"diacritics", decomp.second}};
  return doc;
}

}  // namespace phonfeat
