#pragma once

#include <cstddef>
#include <span>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "phonfeat/frontend.hpp"
#include "phonfeat/zeroshot.hpp"

namespace phonfeat {

// Per-utterance counts behind the unseen phoneme rate: the number of OOS
// phoneme tokens divided by the number of phoneme tokens, in percent.
// Boundaries and silences join neither count. Words are maximal runs of
// consecutive phoneme segments.
struct UtteranceStats {
  std::size_t word_count = 0;
  std::size_t phoneme_count = 0;
  std::size_t oos_count = 0;
  double upr_percent = 0.0;
};

// Token-based by default (every occurrence counts). With type_based, both
// counts collapse to distinct phoneme identities first. Throws Error when
// there is no phoneme segment to count.
UtteranceStats upr(std::span<const Segment> segments,
                   const PhonemeInventory& inventory, bool type_based = false);
UtteranceStats upr(const Utterance& utt, const PhonemeInventory& inventory,
                   bool type_based = false);

struct InventoryStats {
  std::size_t unique_count = 0;  // corpus inventory size
  std::size_t oos_count = 0;     // target members absent from the corpus
};

// unique = |corpus|, oos = |target \ corpus|. Membership honors the corpus
// inventory's stress-variant counting flag.
InventoryStats inventory_stats(const PhonemeInventory& corpus,
                               const PhonemeInventory& target);

// Aggregate over a test set. Sentence length is counted in words; the UPR
// mean is unweighted across utterances.
struct TestSetStats {
  std::size_t sentence_count = 0;
  std::size_t min_sentence_len = 0;
  std::size_t max_sentence_len = 0;
  double upr_min = 0.0;
  double upr_max = 0.0;
  double upr_mean = 0.0;
};

// Throws Error on an empty set or on any utterance without phonemes.
TestSetStats testset_stats(std::span<const Utterance> utterances,
                           const PhonemeInventory& inventory,
                           bool type_based = false);

// Aggregates per-utterance stats computed elsewhere (streaming callers).
TestSetStats testset_stats(std::span<const UtteranceStats> per_utterance);

nlohmann::ordered_json to_json(const UtteranceStats& s);
nlohmann::ordered_json to_json(const InventoryStats& s);
nlohmann::ordered_json to_json(const TestSetStats& s);

// Aligned plain-text tables. Inventory rows carry corpus name, phoneme count
// and OOS count; test-set rows carry sentence count, sentence length range
// and a UPR range with its mean.
std::string inventory_stats_table(const std::string& corpus_name,
                                  const InventoryStats& s);
std::string testset_stats_table(const std::string& set_name,
                                const TestSetStats& s);

}  // namespace phonfeat
