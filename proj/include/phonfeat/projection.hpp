#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "phonfeat/zeroshot.hpp"

namespace phonfeat {

// Linear feedforward layer replacing a phoneme embedding table: an embedding
// is weights * bits + bias. Untrained by construction; trained weights can be
// imported from CSV. Immutable after init, safe for concurrent reads.
struct ProjectionLayer {
  Eigen::MatrixXd weights;  // embedding_dim x total_bits
  Eigen::VectorXd bias;     // embedding_dim
  std::uint64_t seed = 0;

  Index embedding_dim() const { return weights.rows(); }
  Index total_bits() const { return weights.cols(); }
  // Weights plus bias; compare against inventory_size * embedding_dim for an
  // embedding table.
  Index parameter_count() const { return weights.size() + bias.size(); }
};

// Weights drawn uniform in [-a, a] with a = sqrt(6 / (total_bits +
// embedding_dim)), row-major draw order, bias zero. Deterministic per seed.
ProjectionLayer init_projection(Index embedding_dim, Index total_bits,
                                std::uint64_t seed);

// init_projection, then a collision check over the distinct PF vectors of the
// chart (default schema segments, stressed and unstressed vowels). A seed
// whose layer collapses two distinct PF vectors is rejected and the draw is
// retried with seed+1, seed+2, ... (the layer records the seed actually
// used).
ProjectionLayer init_projection_validated(Index embedding_dim,
                                          const AnalysisContext& ctx,
                                          std::uint64_t seed);

// weights * bits + bias. Throws Error on a length mismatch.
EmbeddingVector project(const ProjectionLayer& layer, const BitVector& bits);

enum class EmbeddingMetric { Euclidean, Cosine };

// Top-k inventory members by ascending embedding distance to the query
// segment; ties break by base codepoints then identity key.
std::vector<std::pair<Segment, double>> nearest_in_embedding(
    const ProjectionLayer& layer, const Segment& query,
    const PhonemeInventory& inventory, std::size_t k, const AnalysisContext& ctx,
    EmbeddingMetric metric = EmbeddingMetric::Euclidean);

// CSV export: header `ipa,kind,dim0..dimN`, one row per input segment in
// input order. Deterministic byte-for-byte given layer and segments.
void export_embeddings(const ProjectionLayer& layer,
                       std::span<const Segment> segments,
                       const AnalysisContext& ctx, std::ostream& out);
void export_embeddings(const ProjectionLayer& layer,
                       std::span<const Segment> segments,
                       const AnalysisContext& ctx, const std::string& path);

// Weight matrix CSV: header `dim,total_bits`, a row with the two counts, the
// weight rows (row-major), and one final row holding the bias.
void export_weights_csv(const ProjectionLayer& layer, std::ostream& out);
void export_weights_csv(const ProjectionLayer& layer, const std::string& path);
ProjectionLayer import_weights_csv(const std::string& path);

// The untrained vector assigned to a RANDOM-plan phoneme: components uniform
// in [-0.1, 0.1] from a single mt19937_64 stream seeded with the plan seed;
// vector i occupies draws [i*dim, (i+1)*dim).
EmbeddingVector random_embedding(std::uint64_t seed, std::uint64_t vector_id,
                                 Index dim);

// Embedding rows for an utterance with a plan applied: auto projects each
// row's own bits, manual projects the target's bits, random substitutes the
// assigned untrained vector for OOS rows.
EmbeddingMatrix embed_with_plan(const ProjectionLayer& layer,
                                std::span<const Segment> segments,
                                const ZeroShotPlan& plan,
                                const PhonemeInventory& inventory,
                                const AnalysisContext& ctx);

}  // namespace phonfeat
