#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "phonfeat/types.hpp"

namespace phonfeat {

// Categorical record of one segment. A feature absent from the map is NULL.
using CategoricalMap = std::map<std::string, std::string>;

struct FeatureDef {
  std::string name;
  std::vector<std::string> values;  // declaration order fixes bit order
  Index bit_offset = 0;             // computed, never read from files
  bool nullable = true;
};

// Ordered catalog of categorical features and their one-hot bit layout.
// NULL is encoded as an all-zeros block; no bit is spent on it. Immutable
// after construction, safe for concurrent reads.
class FeatureSchema {
 public:
  // Validates and computes contiguous bit offsets. Throws Error on duplicate
  // feature/value names or an empty value list.
  static FeatureSchema from_defs(std::vector<FeatureDef> defs);
  static FeatureSchema from_json(const nlohmann::json& doc);

  const std::vector<FeatureDef>& features() const { return features_; }
  Index total_bits() const { return total_bits_; }

  const FeatureDef* find(const std::string& feature) const;
  const FeatureDef& at(const std::string& feature) const;  // throws Error
  // Index of a value within its feature's block; throws Error when unknown.
  Index value_index(const std::string& feature, const std::string& value) const;

  nlohmann::ordered_json to_json() const;

 private:
  std::vector<FeatureDef> features_;
  std::map<std::string, std::size_t> index_;
  Index total_bits_ = 0;
};

// The shipped 10-feature, 60-bit schema.
const FeatureSchema& default_schema();

// Loads a schema file ({"features":[{"name","values","nullable"},...]}).
// An empty path returns the built-in default.
FeatureSchema load_schema(const std::string& path);

// One-hot encodes a categorical record. Exactly one bit per non-NULL feature;
// NULL features contribute an all-zeros block. Throws Error on unknown
// feature/value names and on NULL for a non-nullable feature.
BitVector binarize(const CategoricalMap& categorical, const FeatureSchema& schema);

// Inverse of binarize. Throws Error on length mismatch, two bits within one
// feature block, or an empty block for a non-nullable feature.
CategoricalMap debinarize(const BitVector& bits, const FeatureSchema& schema);

struct PFVector {
  CategoricalMap categorical;
  BitVector bits;
};

}  // namespace phonfeat
