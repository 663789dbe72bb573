#include "phonfeat/zeroshot.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "phonfeat/error.hpp"
#include "phonfeat/text.hpp"
#include "phonfeat/utf8.hpp"

namespace phonfeat {

std::string PhonemeInventory::identity_key(const Segment& seg,
                                           bool count_stress_variants) {
  std::string key = render(seg, false);
  if (count_stress_variants && seg.stressed) key = "ˈ" + key;
  return key;
}

bool PhonemeInventory::add(const Segment& seg) {
  if (seg.kind != SegmentKind::phoneme) return false;
  Segment normalized = seg;
  normalized.long_mark = false;
  if (!count_stress_variants_) normalized.stressed = false;
  return members_
      .emplace(identity_key(normalized, count_stress_variants_), normalized)
      .second;
}

bool PhonemeInventory::contains(const Segment& seg) const {
  if (seg.kind != SegmentKind::phoneme) return false;
  return members_.count(identity_key(seg, count_stress_variants_)) > 0;
}

std::vector<Segment> PhonemeInventory::members() const {
  std::vector<Segment> out;
  out.reserve(members_.size());
  for (const auto& [key, seg] : members_) out.push_back(seg);
  return out;
}

nlohmann::ordered_json PhonemeInventory::to_json() const {
  nlohmann::ordered_json doc;
  doc["name"] = name_;
  doc["count_stress_variants"] = count_stress_variants_;
  doc["size"] = members_.size();
  doc["members"] = nlohmann::ordered_json::array();
  for (const auto& [key, seg] : members_) doc["members"].push_back(key);
  return doc;
}

PhonemeInventory build_inventory(const std::string& name,
                                 std::span<const Segment> segments,
                                 bool count_stress_variants) {
  PhonemeInventory inv(name, count_stress_variants);
  for (const auto& seg : segments) inv.add(seg);
  return inv;
}

PhonemeInventory load_inventory(const std::string& path, const IPAChart& chart,
                                bool count_stress_variants) {
  std::ifstream in(path);
  if (!in) throw Error("inventory: cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string content = buf.str();
  const std::string_view trimmed = trim(content);
  if (!trimmed.empty() && trimmed.front() == '{') {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(content);
    } catch (const nlohmann::json::exception& e) {
      throw Error("inventory: '" + path + "' is not valid JSON: " + e.what());
    }
    PhonemeInventory inv(doc.value("name", path),
                         doc.value("count_stress_variants", count_stress_variants));
    for (const auto& m : doc.at("members"))
      for (const auto& seg : tokenize(m.get<std::string>(), chart)) inv.add(seg);
    return inv;
  }
  PhonemeInventory inv(path, count_stress_variants);
  std::size_t lineno = 0;
  for (const auto& line : split_char(content, '\n')) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      for (const auto& seg : tokenize(line, chart)) inv.add(seg);
    } catch (const Error& e) {
      throw Error("inventory: " + path + ":" + std::to_string(lineno) + ": " +
                  e.what());
    }
  }
  return inv;
}

std::vector<Segment> detect_oos(std::span<const Segment> segments,
                                const PhonemeInventory& inventory) {
  std::vector<Segment> oos;
  std::vector<std::string> seen;
  for (const auto& seg : segments) {
    if (seg.kind != SegmentKind::phoneme) continue;
    if (inventory.contains(seg)) continue;
    Segment normalized = seg;
    normalized.long_mark = false;
    if (!inventory.count_stress_variants()) normalized.stressed = false;
    std::string key = PhonemeInventory::identity_key(
        normalized, inventory.count_stress_variants());
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
    seen.push_back(std::move(key));
    oos.push_back(std::move(normalized));
  }
  return oos;
}

namespace {

std::optional<std::string> feature_value(const CategoricalMap& cat,
                                         const std::string& feature) {
  auto it = cat.find(feature);
  if (it == cat.end()) return std::nullopt;
  return it->second;
}

}  // namespace

int pf_distance(const Segment& a, const Segment& b, const AnalysisContext& ctx) {
  const CategoricalMap ca = analyze(a, ctx).categorical;
  const CategoricalMap cb = analyze(b, ctx).categorical;
  int distance = 0;
  for (const auto& def : ctx.schema->features()) {
    if (def.name == "symbol_type") continue;
    if (feature_value(ca, def.name) != feature_value(cb, def.name)) ++distance;
  }
  return distance;
}

std::vector<std::pair<Segment, int>> suggest_nearest(const Segment& oos,
                                                     const PhonemeInventory& inventory,
                                                     std::size_t k,
                                                     const AnalysisContext& ctx) {
  if (inventory.empty())
    throw Error("suggest_nearest: inventory '" + inventory.name() + "' is empty");
  const CategoricalMap query = analyze(oos, ctx).categorical;

  struct Ranked {
    int distance;
    int manner_mismatch;
    int place_mismatch;
    int voicing_mismatch;
    std::vector<char32_t> base_cps;
    std::string key;
    Segment segment;
  };
  std::vector<Ranked> ranked;
  for (const Segment& member : inventory.members()) {
    const CategoricalMap cand = analyze(member, ctx).categorical;
    Ranked r;
    r.distance = 0;
    for (const auto& def : ctx.schema->features()) {
      if (def.name == "symbol_type") continue;
      if (feature_value(query, def.name) != feature_value(cand, def.name))
        ++r.distance;
    }
    r.manner_mismatch =
        feature_value(query, "manner") != feature_value(cand, "manner");
    r.place_mismatch =
        feature_value(query, "place") != feature_value(cand, "place");
    r.voicing_mismatch =
        feature_value(query, "voicing") != feature_value(cand, "voicing");
    r.base_cps = utf8_decode(member.base);
    r.key = PhonemeInventory::identity_key(member, inventory.count_stress_variants());
    r.segment = member;
    ranked.push_back(std::move(r));
  }
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    return std::tie(a.distance, a.manner_mismatch, a.place_mismatch,
                    a.voicing_mismatch, a.base_cps, a.key) <
           std::tie(b.distance, b.manner_mismatch, b.place_mismatch,
                    b.voicing_mismatch, b.base_cps, b.key);
  });
  if (k < ranked.size()) ranked.resize(k);

  std::vector<std::pair<Segment, int>> out;
  out.reserve(ranked.size());
  for (auto& r : ranked) out.emplace_back(std::move(r.segment), r.distance);
  return out;
}

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::Auto: return "auto";
    case Strategy::Manual: return "manual";
    case Strategy::Random: return "random";
  }
  return "auto";
}

Strategy strategy_from_string(const std::string& name) {
  if (name == "auto") return Strategy::Auto;
  if (name == "manual") return Strategy::Manual;
  if (name == "random") return Strategy::Random;
  throw Error("unknown strategy '" + name + "' (expected auto, manual or random)");
}

const Resolution* ZeroShotPlan::find(const Segment& seg,
                                     bool count_stress_variants) const {
  Segment normalized = seg;
  normalized.long_mark = false;
  if (!count_stress_variants) normalized.stressed = false;
  const std::string key =
      PhonemeInventory::identity_key(normalized, count_stress_variants);
  for (const auto& res : resolutions) {
    if (PhonemeInventory::identity_key(res.oos, count_stress_variants) == key)
      return &res;
  }
  return nullptr;
}

std::map<std::string, std::string> load_manual_overrides(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("overrides: cannot open '" + path + "'");
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw Error("overrides: " + path + ":" + std::to_string(lineno) +
                  ": expected <oos_ipa><TAB><target_ipa>");
    std::string oos(trim(line.substr(0, tab)));
    std::string target(trim(line.substr(tab + 1)));
    if (oos.empty() || target.empty())
      throw Error("overrides: " + path + ":" + std::to_string(lineno) +
                  ": empty field");
    out[oos] = target;
  }
  return out;
}

ZeroShotPlan build_plan(Strategy strategy, std::span<const Segment> oos_set,
                        const PhonemeInventory& inventory,
                        const std::map<std::string, std::string>* manual_overrides,
                        std::optional<std::uint64_t> seed,
                        const AnalysisContext& ctx) {
  ZeroShotPlan plan;
  plan.strategy = strategy;

  switch (strategy) {
    case Strategy::Auto:
      // PF vectors of OOS phonemes pass through unchanged.
      break;

    case Strategy::Manual: {
      if (inventory.empty())
        throw Error("build_plan: manual strategy needs a non-empty inventory");
      for (const Segment& oos : oos_set) {
        Resolution res;
        res.oos = oos;
        const std::string key = PhonemeInventory::identity_key(
            oos, inventory.count_stress_variants());
        const std::string* override_target = nullptr;
        if (manual_overrides) {
          auto it = manual_overrides->find(key);
          if (it == manual_overrides->end())
            it = manual_overrides->find(render(oos, false));
          if (it != manual_overrides->end()) override_target = &it->second;
        }
        if (override_target) {
          std::vector<Segment> segs = tokenize(*override_target, *ctx.chart);
          if (segs.size() != 1 || segs[0].kind != SegmentKind::phoneme)
            throw Error("build_plan: override target '" + *override_target +
                        "' is not a single phoneme");
          if (!inventory.contains(segs[0]))
            throw Error("build_plan: override target '" + *override_target +
                        "' is not an inventory member");
          res.target = segs[0];
          res.distance = pf_distance(oos, segs[0], ctx);
          res.overridden = true;
        } else {
          auto nearest = suggest_nearest(oos, inventory, 1, ctx);
          res.target = nearest[0].first;
          res.distance = nearest[0].second;
        }
        plan.resolutions.push_back(std::move(res));
      }
      break;
    }

    case Strategy::Random: {
      if (!seed)
        throw Error("build_plan: random strategy requires a seed");
      plan.seed = seed;
      std::uint64_t next_id = 0;
      for (const Segment& oos : oos_set) {
        Resolution res;
        res.oos = oos;
        res.vector_id = next_id++;
        plan.resolutions.push_back(std::move(res));
      }
      break;
    }
  }
  return plan;
}

nlohmann::ordered_json plan_to_json(const ZeroShotPlan& plan) {
  nlohmann::ordered_json doc;
  doc["strategy"] = to_string(plan.strategy);
  if (plan.seed) doc["seed"] = *plan.seed;
  doc["resolutions"] = nlohmann::ordered_json::array();
  for (const auto& res : plan.resolutions) {
    nlohmann::ordered_json r;
    r["oos"] = render(res.oos, false);
    if (res.target) r["target"] = render(*res.target, false);
    if (res.distance) r["distance"] = *res.distance;
    if (plan.strategy == Strategy::Manual) r["overridden"] = res.overridden;
    if (res.vector_id) r["vector_id"] = *res.vector_id;
    doc["resolutions"].push_back(std::move(r));
  }
  return doc;
}

BitMatrix plan_bit_matrix(std::span<const Segment> segments,
                          const ZeroShotPlan& plan,
                          const PhonemeInventory& inventory,
                          const AnalysisContext& ctx) {
  if (plan.strategy == Strategy::Random)
    throw Error(
        "plan_bit_matrix: random strategy resolves in embedding space; "
        "use the projection layer");
  BitMatrix m(static_cast<Index>(segments.size()), ctx.schema->total_bits());
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const Segment& seg = segments[i];
    const Resolution* res = nullptr;
    if (plan.strategy == Strategy::Manual && seg.kind == SegmentKind::phoneme &&
        !inventory.contains(seg))
      res = plan.find(seg, inventory.count_stress_variants());
    if (res && res->target) {
      Segment target = *res->target;
      if (ctx.chart->is_vowel(target.base)) target.stressed = seg.stressed;
      m.row(static_cast<Index>(i)) = analyze(target, ctx).bits;
    } else {
      m.row(static_cast<Index>(i)) = analyze(seg, ctx).bits;
    }
  }
  return m;
}

}  // namespace phonfeat
