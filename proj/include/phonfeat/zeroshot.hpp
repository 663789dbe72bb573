#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "phonfeat/frontend.hpp"
#include "phonfeat/ipa.hpp"

namespace phonfeat {

// Set of phonemes observed in training data. Identity covers base symbol and
// diacritics; the stressed/unstressed variants of a vowel collapse to one
// member unless count_stress_variants is set (which restores baseline-style
// counting where stressed vowels are separate symbols). Length never enters
// identity (the frontend discards it).
class PhonemeInventory {
 public:
  explicit PhonemeInventory(std::string name, bool count_stress_variants = false)
      : name_(std::move(name)), count_stress_variants_(count_stress_variants) {}

  static std::string identity_key(const Segment& seg, bool count_stress_variants);

  const std::string& name() const { return name_; }
  bool count_stress_variants() const { return count_stress_variants_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }

  // Non-phoneme segments are ignored. Returns true when the member was new.
  bool add(const Segment& seg);
  bool contains(const Segment& seg) const;

  // Members ordered by identity key; deterministic regardless of insertion
  // order.
  std::vector<Segment> members() const;

  nlohmann::ordered_json to_json() const;

 private:
  std::string name_;
  bool count_stress_variants_ = false;
  std::map<std::string, Segment> members_;
};

PhonemeInventory build_inventory(const std::string& name,
                                 std::span<const Segment> segments,
                                 bool count_stress_variants = false);

// Loads an inventory from a file: either the JSON export of `to_json` or a
// plain text file with one IPA string per line (every phoneme segment on the
// line joins the inventory).
PhonemeInventory load_inventory(const std::string& path, const IPAChart& chart,
                                bool count_stress_variants = false);

// Phoneme segments absent from the inventory, in first-occurrence order.
// Boundaries and silences are never out-of-sample.
std::vector<Segment> detect_oos(std::span<const Segment> segments,
                                const PhonemeInventory& inventory);

// Number of categorical features (symbol_type excluded) whose values differ;
// NULL versus a value counts as differing. Symmetric, zero on identical
// records.
int pf_distance(const Segment& a, const Segment& b, const AnalysisContext& ctx);

// Top-k inventory members by ascending pf_distance. Ties prefer matching
// manner, then matching place, then matching voicing, then ascending base
// codepoints (identity key as the final disambiguator).
std::vector<std::pair<Segment, int>> suggest_nearest(const Segment& oos,
                                                     const PhonemeInventory& inventory,
                                                     std::size_t k,
                                                     const AnalysisContext& ctx);

enum class Strategy { Auto, Manual, Random };

const char* to_string(Strategy s);
Strategy strategy_from_string(const std::string& name);

struct Resolution {
  Segment oos;
  std::optional<Segment> target;       // manual
  std::optional<int> distance;         // manual
  bool overridden = false;             // manual, expert override applied
  std::optional<std::uint64_t> vector_id;  // random
};

// Per-OOS-phoneme resolution record. Auto keeps resolutions empty: PF vectors
// pass through unchanged.
struct ZeroShotPlan {
  Strategy strategy = Strategy::Auto;
  std::optional<std::uint64_t> seed;
  std::vector<Resolution> resolutions;

  const Resolution* find(const Segment& seg, bool count_stress_variants) const;
};

// Manual override file, TSV: `oos_ipa<TAB>target_ipa`.
std::map<std::string, std::string> load_manual_overrides(const std::string& path);

// Auto: empty resolutions. Manual: override target when present, otherwise
// the top suggest_nearest hit (throws on an empty inventory or an override
// target that is not an inventory member). Random: sequential vector ids
// drawn against the given seed.
ZeroShotPlan build_plan(Strategy strategy, std::span<const Segment> oos_set,
                        const PhonemeInventory& inventory,
                        const std::map<std::string, std::string>* manual_overrides,
                        std::optional<std::uint64_t> seed,
                        const AnalysisContext& ctx);

nlohmann::ordered_json plan_to_json(const ZeroShotPlan& plan);

// PF matrix for the segments with the plan applied at the feature level.
// Auto passes every row through unchanged; manual substitutes the target's
// record (the source segment's stress is preserved on vowel targets); random
// resolves in embedding space only and is rejected here.
BitMatrix plan_bit_matrix(std::span<const Segment> segments,
                          const ZeroShotPlan& plan,
                          const PhonemeInventory& inventory,
                          const AnalysisContext& ctx);

}  // namespace phonfeat
