#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "phonfeat/error.hpp"
#include "phonfeat/zeroshot.hpp"

using namespace phonfeat;

namespace {

const std::string kDataDir = TEST_DATA_DIR;

std::string write_temp(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path.string();
}

Segment seg(const std::string& ipa) {
  const auto parsed = tokenize(ipa, default_chart());
  REQUIRE(parsed.size() == 1);
  return parsed[0];
}

PhonemeInventory rp_inventory() {
  return load_inventory(kDataDir + "/inventory_en_rp.txt", default_chart());
}

Segment random_phoneme(std::mt19937_64& gen,
                       const std::vector<std::string>& bases,
                       const std::vector<std::string>& diacritics) {
  Segment s = Segment::phoneme(bases[gen() % bases.size()]);
  if ((gen() & 3u) == 0) s.diacritics.push_back(diacritics[gen() % diacritics.size()]);
  if (default_chart().is_vowel(s.base) && (gen() & 1u)) s.stressed = true;
  return s;
}

}  // namespace

TEST_SUITE("zeroshot") {

TEST_CASE("identity keys ignore length and collapse stress by default") {
  Segment a = seg("a");
  Segment a_long = seg("aː");
  Segment a_stressed = seg("ˈa");

  CHECK(PhonemeInventory::identity_key(a, false) ==
        PhonemeInventory::identity_key(a_long, false));
  CHECK(PhonemeInventory::identity_key(a, false) ==
        PhonemeInventory::identity_key(a_stressed, false));
  CHECK(PhonemeInventory::identity_key(a, true) !=
        PhonemeInventory::identity_key(a_stressed, true));
}

TEST_CASE("inventory membership") {
  PhonemeInventory inv("test");
  CHECK(inv.add(seg("p")));
  CHECK_FALSE(inv.add(seg("p")));  // duplicate
  CHECK(inv.add(seg("a")));
  CHECK_FALSE(inv.add(seg("ˈa")));  // stress variant collapses
  CHECK_FALSE(inv.add(seg("aː")));  // length variant collapses
  CHECK_FALSE(inv.add(Segment::boundary(SegmentKind::word_boundary)));
  CHECK(inv.size() == 2);
  CHECK(inv.contains(seg("ˈaː")));
  CHECK_FALSE(inv.contains(seg("b")));
  CHECK_FALSE(inv.contains(Segment::boundary(SegmentKind::silence)));

  // tʰ and t are distinct members
  CHECK(inv.add(seg("tʰ")));
  CHECK_FALSE(inv.contains(seg("t")));
}

TEST_CASE("stress variants count separately when asked") {
  PhonemeInventory inv("test", true);
  CHECK(inv.add(seg("a")));
  CHECK(inv.add(seg("ˈa")));
  CHECK(inv.size() == 2);
  CHECK_FALSE(inv.contains(seg("ˈe")));
}

TEST_CASE("members are ordered independently of insertion order") {
  const std::vector<std::string> ipa = {"t", "a", "ʃ", "p", "ɪ"};
  PhonemeInventory forward("f");
  for (const auto& s : ipa) forward.add(seg(s));
  PhonemeInventory backward("b");
  for (auto it = ipa.rbegin(); it != ipa.rend(); ++it) backward.add(seg(*it));
  CHECK(forward.members() == backward.members());
}

TEST_CASE("inventory files load from IPA lines and from JSON") {
  const PhonemeInventory inv = rp_inventory();
  CHECK(inv.size() == 38);
  CHECK(inv.contains(seg("ʃ")));
  CHECK(inv.contains(seg("d͡ʒ")));
  CHECK_FALSE(inv.contains(seg("ç")));
  CHECK_FALSE(inv.contains(seg("ʏ")));

  // JSON export reloads to the same member set
  const std::string json_path =
      write_temp("inv_roundtrip.json", inv.to_json().dump());
  const PhonemeInventory back =
      load_inventory(json_path, default_chart());
  CHECK(back.members() == inv.members());
  CHECK(back.name() == inv.name());

  CHECK_THROWS_WITH_AS(
      load_inventory(kDataDir + "/nope.txt", default_chart()),
      ("inventory: cannot open '" + kDataDir + "/nope.txt'").c_str(), Error);
  const std::string bad_json = write_temp("inv_bad.json", "{broken");
  CHECK_THROWS_AS(load_inventory(bad_json, default_chart()), Error);
  const std::string bad_ipa = write_temp("inv_bad.txt", "p\n÷\n");
  try {
    load_inventory(bad_ipa, default_chart());
    FAIL("expected Error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }
}

TEST_CASE("oos detection is first-occurrence ordered and deduplicated") {
  const PhonemeInventory inv = rp_inventory();
  const auto segs = tokenize("ˈʏ p ç # ʏː ç ʀ .", default_chart());
  const auto oos = detect_oos(segs, inv);
  REQUIRE(oos.size() == 3);
  CHECK(oos[0].base == "ʏ");
  CHECK(oos[1].base == "ç");
  CHECK(oos[2].base == "ʀ");
  // detection normalizes stress and length away
  CHECK_FALSE(oos[0].stressed);
  CHECK_FALSE(oos[0].long_mark);

  CHECK(detect_oos(tokenize("p a t #", default_chart()), inv).empty());
}

TEST_CASE("pf distance on known pairs") {
  const AnalysisContext ctx;
  CHECK(pf_distance(seg("ç"), seg("ʃ"), ctx) == 1);  // place only
  CHECK(pf_distance(seg("ʏ"), seg("ɪ"), ctx) == 1);  // roundedness only
  CHECK(pf_distance(seg("ʀ"), seg("ɹ"), ctx) == 2);  // place and manner
  CHECK(pf_distance(seg("ʀ"), seg("g"), ctx) == 2);  // place and manner
  CHECK(pf_distance(seg("a"), seg("ˈa"), ctx) == 1);  // stress counts
  CHECK(pf_distance(seg("p"), seg("a"), ctx) > 2);   // cv switch cascades
}

TEST_CASE("pf distance is a metric on random segments") {
  const AnalysisContext ctx;
  std::vector<std::string> bases;
  for (const auto& [b, t] : default_chart().consonants) {
    (void)t;
    bases.push_back(b);
  }
  for (const auto& [b, t] : default_chart().vowels) {
    (void)t;
    bases.push_back(b);
  }
  const auto& diacritics = default_schema().at("diacritic").values;
  std::mt19937_64 gen(0x5eed);
  for (int i = 0; i < 200; ++i) {
    const Segment x = random_phoneme(gen, bases, diacritics);
    const Segment y = random_phoneme(gen, bases, diacritics);
    const Segment z = random_phoneme(gen, bases, diacritics);
    const int xy = pf_distance(x, y, ctx);
    const int yx = pf_distance(y, x, ctx);
    const int xz = pf_distance(x, z, ctx);
    const int zy = pf_distance(z, y, ctx);
    CHECK(pf_distance(x, x, ctx) == 0);
    CHECK(xy == yx);
    CHECK(xy >= 0);
    CHECK(xy <= 9);  // all features minus symbol_type
    CHECK(xy <= xz + zy);
  }
}

TEST_CASE("nearest suggestions rank by distance then manner, place, voicing") {
  const AnalysisContext ctx;

  SUBCASE("over the full inventory") {
    const auto hits = suggest_nearest(seg("ç"), rp_inventory(), 5, ctx);
    REQUIRE(hits.size() == 5);
    CHECK(hits[0].second == 1);
    CHECK(hits[0].first.base == "f");  // lowest codepoint among the ties
    bool saw_esh = false;
    for (const auto& [s, d] : hits)
      if (s.base == "ʃ") {
        saw_esh = true;
        CHECK(d == 1);
      }
    CHECK(saw_esh);
    for (std::size_t i = 1; i < hits.size(); ++i)
      CHECK(hits[i - 1].second <= hits[i].second);
  }

  SUBCASE("manner agreement breaks distance ties") {
    PhonemeInventory inv("tiny");
    inv.add(seg("d"));  // same place+voicing as n, differs in manner
    inv.add(seg("m"));  // same manner+voicing as n, differs in place
    const auto hits = suggest_nearest(seg("n"), inv, 2, ctx);
    REQUIRE(hits.size() == 2);
    CHECK(hits[0].second == 1);
    CHECK(hits[1].second == 1);
    CHECK(hits[0].first.base == "m");
    CHECK(hits[1].first.base == "d");
  }

  SUBCASE("k truncates and oversized k returns everything") {
    const auto one = suggest_nearest(seg("ç"), rp_inventory(), 1, ctx);
    CHECK(one.size() == 1);
    const auto all = suggest_nearest(seg("ç"), rp_inventory(), 999, ctx);
    CHECK(all.size() == 38);
  }

  SUBCASE("empty inventory is an error") {
    const PhonemeInventory empty("void");
    CHECK_THROWS_WITH_AS(suggest_nearest(seg("ç"), empty, 1, ctx),
                         "suggest_nearest: inventory 'void' is empty", Error);
  }
}

TEST_CASE("strategy names round-trip") {
  for (auto s : {Strategy::Auto, Strategy::Manual, Strategy::Random})
    CHECK(strategy_from_string(to_string(s)) == s);
  CHECK_THROWS_AS(strategy_from_string("nearest"), Error);
}

TEST_CASE("manual override files") {
  const auto overrides = load_manual_overrides(kDataDir + "/overrides_de.tsv");
  CHECK(overrides.at("ʀ") == "ɹ");
  CHECK(overrides.at("ç") == "ʃ");

  CHECK_THROWS_AS(load_manual_overrides(kDataDir + "/nope.tsv"), Error);
  CHECK_THROWS_AS(
      load_manual_overrides(write_temp("ov_bad1.tsv", "no tab here\n")), Error);
  CHECK_THROWS_AS(
      load_manual_overrides(write_temp("ov_bad2.tsv", "x\t \n")), Error);
}

TEST_CASE("plans per strategy") {
  const AnalysisContext ctx;
  const PhonemeInventory inv = rp_inventory();
  const std::vector<Segment> oos = {seg("ç"), seg("ʏ"), seg("ʀ")};

  SUBCASE("auto keeps no resolutions") {
    const ZeroShotPlan plan =
        build_plan(Strategy::Auto, oos, inv, nullptr, std::nullopt, ctx);
    CHECK(plan.strategy == Strategy::Auto);
    CHECK(plan.resolutions.empty());
    CHECK_FALSE(plan.seed.has_value());
  }

  SUBCASE("manual resolves to the nearest member") {
    const ZeroShotPlan plan =
        build_plan(Strategy::Manual, oos, inv, nullptr, std::nullopt, ctx);
    REQUIRE(plan.resolutions.size() == 3);
    for (const auto& res : plan.resolutions) {
      REQUIRE(res.target.has_value());
      REQUIRE(res.distance.has_value());
      CHECK_FALSE(res.overridden);
      CHECK(inv.contains(*res.target));
      CHECK(*res.distance == pf_distance(res.oos, *res.target, ctx));
    }
    CHECK(plan.resolutions[1].target->base == "ɪ");  // ʏ unrounds
    CHECK(*plan.resolutions[1].distance == 1);
  }

  SUBCASE("manual respects expert overrides") {
    const std::map<std::string, std::string> overrides = {{"ç", "ʃ"}};
    const ZeroShotPlan plan =
        build_plan(Strategy::Manual, oos, inv, &overrides, std::nullopt, ctx);
    CHECK(plan.resolutions[0].target->base == "ʃ");
    CHECK(plan.resolutions[0].overridden);
    CHECK(*plan.resolutions[0].distance == 1);
    CHECK_FALSE(plan.resolutions[1].overridden);
  }

  SUBCASE("override targets must be single inventory phonemes") {
    const std::map<std::string, std::string> not_member = {{"ç", "ʏ"}};
    CHECK_THROWS_WITH_AS(
        build_plan(Strategy::Manual, oos, inv, &not_member, std::nullopt, ctx),
        "build_plan: override target 'ʏ' is not an inventory member", Error);
    const std::map<std::string, std::string> two = {{"ç", "pa"}};
    CHECK_THROWS_WITH_AS(
        build_plan(Strategy::Manual, oos, inv, &two, std::nullopt, ctx),
        "build_plan: override target 'pa' is not a single phoneme", Error);
  }

  SUBCASE("manual needs a non-empty inventory") {
    const PhonemeInventory empty("void");
    CHECK_THROWS_AS(
        build_plan(Strategy::Manual, oos, empty, nullptr, std::nullopt, ctx),
        Error);
  }

  SUBCASE("random assigns sequential vector ids under a seed") {
    const ZeroShotPlan plan =
        build_plan(Strategy::Random, oos, inv, nullptr, 7, ctx);
    CHECK(plan.seed == 7);
    REQUIRE(plan.resolutions.size() == 3);
    for (std::size_t i = 0; i < plan.resolutions.size(); ++i) {
      CHECK(plan.resolutions[i].vector_id == i);
      CHECK_FALSE(plan.resolutions[i].target.has_value());
    }
    CHECK_THROWS_WITH_AS(
        build_plan(Strategy::Random, oos, inv, nullptr, std::nullopt, ctx),
        "build_plan: random strategy requires a seed", Error);
  }
}

TEST_CASE("plan lookup normalizes stress and length") {
  const AnalysisContext ctx;
  const PhonemeInventory inv = rp_inventory();
  const std::vector<Segment> oos = {seg("ʏ")};
  const ZeroShotPlan plan =
      build_plan(Strategy::Manual, oos, inv, nullptr, std::nullopt, ctx);
  CHECK(plan.find(seg("ˈʏː"), false) == &plan.resolutions[0]);
  CHECK(plan.find(seg("ç"), false) == nullptr);
}

TEST_CASE("plan bit matrices") {
  const AnalysisContext ctx;
  const PhonemeInventory inv = rp_inventory();
  const auto segs = tokenize("d a s # ˈʏ ç .", default_chart());
  const auto oos = detect_oos(segs, inv);

  SUBCASE("auto passes PF rows through unchanged") {
    const ZeroShotPlan plan =
        build_plan(Strategy::Auto, oos, inv, nullptr, std::nullopt, ctx);
    CHECK(bits_equal(plan_bit_matrix(segs, plan, inv, ctx),
                     encode_segments(segs, ctx)));
  }

  SUBCASE("manual substitutes target records, keeping the source stress") {
    const ZeroShotPlan plan =
        build_plan(Strategy::Manual, oos, inv, nullptr, std::nullopt, ctx);
    const BitMatrix m = plan_bit_matrix(segs, plan, inv, ctx);
    const BitMatrix plain = encode_segments(segs, ctx);
    REQUIRE(m.rows() == plain.rows());

    // in-inventory rows and boundaries stay identical
    for (Index i : {0, 1, 2, 3, 6})
      CHECK(bits_equal(BitVector(m.row(i)), BitVector(plain.row(i))));

    // ˈʏ row becomes its target with stress carried over
    Segment target = *plan.resolutions[0].target;
    REQUIRE(target.base == "ɪ");
    target.stressed = true;
    CHECK(bits_equal(BitVector(m.row(4)), analyze(target, ctx).bits));
    CHECK_FALSE(bits_equal(BitVector(m.row(4)), BitVector(plain.row(4))));

    // ç row becomes its (consonant) target unchanged
    CHECK(bits_equal(BitVector(m.row(5)),
                     analyze(*plan.resolutions[1].target, ctx).bits));
  }

  SUBCASE("random plans do not resolve at the feature level") {
    const ZeroShotPlan plan =
        build_plan(Strategy::Random, oos, inv, nullptr, 42, ctx);
    CHECK_THROWS_AS(plan_bit_matrix(segs, plan, inv, ctx), Error);
  }
}

TEST_CASE("plan JSON layout") {
  const AnalysisContext ctx;
  const PhonemeInventory inv = rp_inventory();
  const std::vector<Segment> oos = {seg("ç")};
  const std::map<std::string, std::string> overrides = {{"ç", "ʃ"}};
  const ZeroShotPlan plan =
      build_plan(Strategy::Manual, oos, inv, &overrides, std::nullopt, ctx);
  const auto doc = plan_to_json(plan);
  CHECK(doc["strategy"] == "manual");
  REQUIRE(doc["resolutions"].size() == 1);
  CHECK(doc["resolutions"][0]["oos"] == "ç");
  CHECK(doc["resolutions"][0]["target"] == "ʃ");
  CHECK(doc["resolutions"][0]["distance"] == 1);
  CHECK(doc["resolutions"][0]["overridden"] == true);
  CHECK(doc.dump().rfind("{\"strategy\":", 0) == 0);

  const auto rnd = plan_to_json(
      build_plan(Strategy::Random, oos, inv, nullptr, 42, ctx));
  CHECK(rnd["seed"] == 42);
  CHECK(rnd["resolutions"][0]["vector_id"] == 0);
  CHECK(rnd["resolutions"][0].contains("target") == false);
}

}
