#include "phonfeat/schema.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "phonfeat/error.hpp"

namespace phonfeat {

FeatureSchema FeatureSchema::from_defs(std::vector<FeatureDef> defs) {
  if (defs.empty()) throw Error("schema: no features defined");
  FeatureSchema schema;
  Index offset = 0;
  for (std::size_t i = 0; i < defs.size(); ++i) {
    FeatureDef& def = defs[i];
    if (def.name.empty()) throw Error("schema: feature with empty name");
    if (def.values.empty())
      throw Error("schema: feature '" + def.name + "' has no values");
    if (schema.index_.count(def.name))
      throw Error("schema: duplicate feature name '" + def.name + "'");
    std::set<std::string> seen;
    for (const auto& v : def.values) {
      if (v.empty())
        throw Error("schema: feature '" + def.name + "' has an empty value name");
      if (!seen.insert(v).second)
        throw Error("schema: duplicate value '" + v + "' in feature '" +
                    def.name + "'");
    }
    def.bit_offset = offset;
    offset += static_cast<Index>(def.values.size());
    schema.index_[def.name] = i;
    schema.features_.push_back(std::move(def));
  }
  schema.total_bits_ = offset;
  return schema;
}

FeatureSchema FeatureSchema::from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("features") ||
      !doc["features"].is_array())
    throw Error("schema: expected an object with a 'features' array");
  std::vector<FeatureDef> defs;
  for (const auto& f : doc["features"]) {
    FeatureDef def;
    const auto malformed = [&f] {
      return Error("schema: feature entry " + f.dump() +
                   " needs a string 'name' and an array of string 'values'");
    };
    try {
      def.name = f.at("name").get<std::string>();
      const auto& values = f.at("values");
      if (!values.is_array()) throw malformed();
      for (const auto& v : values) def.values.push_back(v.get<std::string>());
      def.nullable = f.value("nullable", true);
    } catch (const nlohmann::json::exception&) {
      throw malformed();
    }
    // A stored bit_offset is ignored; offsets are always recomputed.
    defs.push_back(std::move(def));
  }
  FeatureSchema schema = from_defs(std::move(defs));
  if (doc.contains("total_bits") &&
      (!doc["total_bits"].is_number_integer() ||
       doc["total_bits"].get<Index>() != schema.total_bits()))
    throw Error("schema: total_bits " + doc["total_bits"].dump() +
                " does not match the " + std::to_string(schema.total_bits()) +
                " bits defined by the features");
  return schema;
}

const FeatureDef* FeatureSchema::find(const std::string& feature) const {
  auto it = index_.find(feature);
  return it == index_.end() ? nullptr : &features_[it->second];
}

const FeatureDef& FeatureSchema::at(const std::string& feature) const {
  const FeatureDef* def = find(feature);
  if (!def) throw Error("schema: unknown feature '" + feature + "'");
  return *def;
}

Index FeatureSchema::value_index(const std::string& feature,
                                 const std::string& value) const {
  const FeatureDef& def = at(feature);
  for (std::size_t i = 0; i < def.values.size(); ++i)
    if (def.values[i] == value) return static_cast<Index>(i);
  throw Error("schema: unknown value '" + value + "' for feature '" + feature +
              "'");
}

nlohmann::ordered_json FeatureSchema::to_json() const {
  nlohmann::ordered_json doc;
  doc["total_bits"] = total_bits_;
  doc["features"] = nlohmann::ordered_json::array();
  for (const auto& def : features_) {
    nlohmann::ordered_json f;
    f["name"] = def.name;
    f["values"] = def.values;
    f["nullable"] = def.nullable;
    f["bit_offset"] = def.bit_offset;
    doc["features"].push_back(std::move(f));
  }
  return doc;
}

const FeatureSchema& default_schema() {
  static const FeatureSchema schema = FeatureSchema::from_defs({
      {"symbol_type", {"phoneme", "silence", "word_boundary", "sentence_end"},
       0, false},
      {"cv", {"consonant", "vowel"}, 0, true},
      {"voicing", {"voiced", "unvoiced"}, 0, true},
      {"frontness", {"front", "near_front", "central", "near_back", "back"},
       0, true},
      {"openness",
       {"close", "near_close", "close_mid", "mid", "open_mid", "near_open",
        "open"},
       0, true},
      {"roundedness", {"rounded", "unrounded"}, 0, true},
      {"stress", {"stressed", "unstressed"}, 0, true},
      {"place",
       {"bilabial", "labiodental", "dental", "alveolar", "postalveolar",
        "retroflex", "palatal", "velar", "uvular", "pharyngeal", "glottal"},
       0, true},
      {"manner",
       {"plosive", "nasal", "trill", "tap_flap", "fricative",
        "lateral_fricative", "approximant", "lateral_approximant", "affricate"},
       0, true},
      {"diacritic",
       {"nasalized", "velarized", "labialized", "palatalized", "pharyngealized",
        "aspirated", "unreleased", "breathy_voiced", "creaky_voiced",
        "dental_mod", "apical", "laminal", "advanced", "retracted", "rhotic",
        "syllabic"},
       0, true},
  });
  return schema;
}

FeatureSchema load_schema(const std::string& path) {
  if (path.empty()) return default_schema();
  std::ifstream in(path);
  if (!in) throw Error("schema: cannot open '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error("schema: '" + path + "' is not valid JSON: " + e.what());
  }
  return FeatureSchema::from_json(doc);
}

BitVector binarize(const CategoricalMap& categorical,
                   const FeatureSchema& schema) {
  for (const auto& [feature, value] : categorical) {
    (void)value;
    if (!schema.find(feature))
      throw Error("binarize: unknown feature '" + feature + "'");
  }
  BitVector bits = BitVector::Zero(schema.total_bits());
  for (const auto& def : schema.features()) {
    auto it = categorical.find(def.name);
    if (it == categorical.end()) {
      if (!def.nullable)
        throw Error("binarize: feature '" + def.name + "' is not nullable");
      continue;
    }
    bits[def.bit_offset + schema.value_index(def.name, it->second)] = 1;
  }
  return bits;
}

CategoricalMap debinarize(const BitVector& bits, const FeatureSchema& schema) {
  if (bits.size() != schema.total_bits())
    throw Error("debinarize: expected " + std::to_string(schema.total_bits()) +
                " bits, got " + std::to_string(bits.size()));
  CategoricalMap out;
  for (const auto& def : schema.features()) {
    Index set_at = -1;
    for (std::size_t i = 0; i < def.values.size(); ++i) {
      if (!bits[def.bit_offset + static_cast<Index>(i)]) continue;
      if (set_at >= 0)
        throw Error("debinarize: malformed vector, feature '" + def.name +
                    "' has more than one bit set");
      set_at = static_cast<Index>(i);
    }
    if (set_at < 0) {
      if (!def.nullable)
        throw Error("debinarize: malformed vector, non-nullable feature '" +
                    def.name + "' has no bit set");
      continue;
    }
    out[def.name] = def.values[static_cast<std::size_t>(set_at)];
  }
  return out;
}

}  // namespace phonfeat
