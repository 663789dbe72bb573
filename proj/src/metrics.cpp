#include "phonfeat/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "phonfeat/error.hpp"

namespace phonfeat {

UtteranceStats upr(std::span<const Segment> segments,
                   const PhonemeInventory& inventory, bool type_based) {
  UtteranceStats stats;
  std::set<std::string> types;
  std::set<std::string> oos_types;
  bool in_word = false;
  for (const Segment& seg : segments) {
    if (seg.kind != SegmentKind::phoneme) {
      in_word = false;
      continue;
    }
    if (!in_word) {
      ++stats.word_count;
      in_word = true;
    }
    const bool oos = !inventory.contains(seg);
    if (type_based) {
      std::string key = PhonemeInventory::identity_key(
          seg, inventory.count_stress_variants());
      if (oos) oos_types.insert(key);
      types.insert(std::move(key));
    } else {
      ++stats.phoneme_count;
      if (oos) ++stats.oos_count;
    }
  }
  if (type_based) {
    stats.phoneme_count = types.size();
    stats.oos_count = oos_types.size();
  }
  if (stats.phoneme_count == 0)
    throw Error("upr: utterance has no phoneme segments");
  stats.upr_percent = 100.0 * static_cast<double>(stats.oos_count) /
                      static_cast<double>(stats.phoneme_count);
  return stats;
}

UtteranceStats upr(const Utterance& utt, const PhonemeInventory& inventory,
                   bool type_based) {
  return upr(std::span<const Segment>(utt.segments), inventory, type_based);
}

InventoryStats inventory_stats(const PhonemeInventory& corpus,
                               const PhonemeInventory& target) {
  InventoryStats stats;
  stats.unique_count = corpus.size();
  for (const Segment& member : target.members())
    if (!corpus.contains(member)) ++stats.oos_count;
  return stats;
}

TestSetStats testset_stats(std::span<const UtteranceStats> per_utterance) {
  if (per_utterance.empty()) throw Error("testset_stats: no utterances");
  TestSetStats stats;
  stats.sentence_count = per_utterance.size();
  double sum = 0.0;
  bool first = true;
  for (const UtteranceStats& u : per_utterance) {
    if (first) {
      stats.min_sentence_len = stats.max_sentence_len = u.word_count;
      stats.upr_min = stats.upr_max = u.upr_percent;
      first = false;
    } else {
      stats.min_sentence_len = std::min(stats.min_sentence_len, u.word_count);
      stats.max_sentence_len = std::max(stats.max_sentence_len, u.word_count);
      stats.upr_min = std::min(stats.upr_min, u.upr_percent);
      stats.upr_max = std::max(stats.upr_max, u.upr_percent);
    }
    sum += u.upr_percent;
  }
  stats.upr_mean = sum / static_cast<double>(stats.sentence_count);
  return stats;
}

TestSetStats testset_stats(std::span<const Utterance> utterances,
                           const PhonemeInventory& inventory,
                           bool type_based) {
  if (utterances.empty()) throw Error("testset_stats: no utterances");
  std::vector<UtteranceStats> per_utterance;
  per_utterance.reserve(utterances.size());
  for (const Utterance& utt : utterances)
    per_utterance.push_back(upr(utt, inventory, type_based));
  return testset_stats(std::span<const UtteranceStats>(per_utterance));
}

nlohmann::ordered_json to_json(const UtteranceStats& s) {
  return nlohmann::ordered_json{{"word_count", s.word_count},
                                {"phoneme_count", s.phoneme_count},
                                {"oos_count", s.oos_count},
                                {"upr_percent", s.upr_percent}};
}

nlohmann::ordered_json to_json(const InventoryStats& s) {
  return nlohmann::ordered_json{{"unique_phonemes", s.unique_count},
                                {"oos_phonemes", s.oos_count}};
}

nlohmann::ordered_json to_json(const TestSetStats& s) {
  return nlohmann::ordered_json{{"sentence_count", s.sentence_count},
                                {"min_sentence_len", s.min_sentence_len},
                                {"max_sentence_len", s.max_sentence_len},
                                {"upr_min", s.upr_min},
                                {"upr_max", s.upr_max},
                                {"upr_mean", s.upr_mean}};
}

namespace {

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace

std::string inventory_stats_table(const std::string& corpus_name,
                                  const InventoryStats& s) {
  const std::size_t name_w = std::max<std::size_t>(corpus_name.size(), 6);
  std::ostringstream out;
  out << pad("Corpus", name_w) << "  " << pad("Phonemes", 8) << "  OOS\n";
  out << pad(corpus_name, name_w) << "  "
      << pad(std::to_string(s.unique_count), 8) << "  " << s.oos_count << '\n';
  return out.str();
}

std::string testset_stats_table(const std::string& set_name,
                                const TestSetStats& s) {
  const std::size_t name_w = std::max<std::size_t>(set_name.size(), 3);
  std::string len = s.min_sentence_len == s.max_sentence_len
                        ? std::to_string(s.min_sentence_len)
                        : std::to_string(s.min_sentence_len) + "-" +
                              std::to_string(s.max_sentence_len);
  std::string range = percent(s.upr_min) + "-" + percent(s.upr_max) +
                      " (mean=" + percent(s.upr_mean) + ")";
  std::ostringstream out;
  out << pad("Set", name_w) << "  " << pad("n sents", 7) << "  "
      << pad("sent. len.", 10) << "  UPR%\n";
  out << pad(set_name, name_w) << "  "
      << pad(std::to_string(s.sentence_count), 7) << "  " << pad(len, 10)
      << "  " << range << '\n';
  return out.str();
}

}  // namespace phonfeat
