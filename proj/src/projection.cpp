#include "phonfeat/projection.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include "phonfeat/error.hpp"
#include "phonfeat/random.hpp"
#include "phonfeat/text.hpp"
#include "phonfeat/utf8.hpp"

namespace phonfeat {

ProjectionLayer init_projection(Index embedding_dim, Index total_bits,
                                std::uint64_t seed) {
  if (embedding_dim <= 0 || total_bits <= 0)
    throw Error("init_projection: dimensions must be positive");
  ProjectionLayer layer;
  layer.seed = seed;
  layer.weights.resize(embedding_dim, total_bits);
  layer.bias = Eigen::VectorXd::Zero(embedding_dim);
  const double bound =
      std::sqrt(6.0 / static_cast<double>(total_bits + embedding_dim));
  std::mt19937_64 gen(seed);
  for (Index i = 0; i < embedding_dim; ++i)
    for (Index j = 0; j < total_bits; ++j)
      layer.weights(i, j) = uniform_in(gen, -bound, bound);
  return layer;
}

namespace {

// Distinct PF bit patterns realized by the chart under the given context
// (all bases, vowels both unstressed and stressed).
std::vector<BitVector> chart_bit_patterns(const AnalysisContext& ctx) {
  std::vector<BitVector> patterns;
  std::set<std::string> seen;
  auto push = [&](const Segment& seg) {
    BitVector bits = analyze(seg, ctx).bits;
    std::string key(reinterpret_cast<const char*>(bits.data()),
                    static_cast<std::size_t>(bits.size()));
    if (seen.insert(std::move(key)).second) patterns.push_back(std::move(bits));
  };
  for (const auto& [base, traits] : ctx.chart->consonants) {
    (void)traits;
    push(Segment::phoneme(base));
  }
  for (const auto& [base, traits] : ctx.chart->vowels) {
    (void)traits;
    Segment seg = Segment::phoneme(base);
    push(seg);
    seg.stressed = true;
    push(seg);
  }
  return patterns;
}

}  // namespace

ProjectionLayer init_projection_validated(Index embedding_dim,
                                          const AnalysisContext& ctx,
                                          std::uint64_t seed) {
  const std::vector<BitVector> patterns = chart_bit_patterns(ctx);
  for (std::uint64_t attempt = 0;; ++attempt) {
    ProjectionLayer layer =
        init_projection(embedding_dim, ctx.schema->total_bits(), seed + attempt);
    std::vector<EmbeddingVector> embeddings;
    embeddings.reserve(patterns.size());
    for (const auto& bits : patterns) embeddings.push_back(project(layer, bits));
    bool collision = false;
    for (std::size_t i = 0; i < embeddings.size() && !collision; ++i)
      for (std::size_t j = i + 1; j < embeddings.size(); ++j)
        if ((embeddings[i] - embeddings[j]).norm() == 0.0) {
          collision = true;
          break;
        }
    if (!collision) return layer;
  }
}

EmbeddingVector project(const ProjectionLayer& layer, const BitVector& bits) {
  if (bits.size() != layer.total_bits())
    throw Error("project: expected " + std::to_string(layer.total_bits()) +
                " bits, got " + std::to_string(bits.size()));
  return layer.weights * bits.transpose().cast<double>() + layer.bias;
}

std::vector<std::pair<Segment, double>> nearest_in_embedding(
    const ProjectionLayer& layer, const Segment& query,
    const PhonemeInventory& inventory, std::size_t k, const AnalysisContext& ctx,
    EmbeddingMetric metric) {
  if (inventory.empty())
    throw Error("nearest_in_embedding: inventory '" + inventory.name() +
                "' is empty");
  const EmbeddingVector q = project(layer, analyze(query, ctx).bits);

  struct Ranked {
    double distance;
    std::vector<char32_t> base_cps;
    std::string key;
    Segment segment;
  };
  std::vector<Ranked> ranked;
  for (const Segment& member : inventory.members()) {
    const EmbeddingVector e = project(layer, analyze(member, ctx).bits);
    double d;
    if (metric == EmbeddingMetric::Euclidean) {
      d = (e - q).norm();
    } else {
      const double denom = e.norm() * q.norm();
      d = denom == 0.0 ? 1.0 : 1.0 - e.dot(q) / denom;
    }
    ranked.push_back({d, utf8_decode(member.base),
                      PhonemeInventory::identity_key(
                          member, inventory.count_stress_variants()),
                      member});
  }
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    return std::tie(a.distance, a.base_cps, a.key) <
           std::tie(b.distance, b.base_cps, b.key);
  });
  if (k < ranked.size()) ranked.resize(k);

  std::vector<std::pair<Segment, double>> out;
  out.reserve(ranked.size());
  for (auto& r : ranked) out.emplace_back(std::move(r.segment), r.distance);
  return out;
}

void export_embeddings(const ProjectionLayer& layer,
                       std::span<const Segment> segments,
                       const AnalysisContext& ctx, std::ostream& out) {
  out << "ipa,kind";
  for (Index d = 0; d < layer.embedding_dim(); ++d) out << ",dim" << d;
  out << '\n';
  for (const Segment& seg : segments) {
    const EmbeddingVector e = project(layer, analyze(seg, ctx).bits);
    out << render(seg) << ',' << to_string(seg.kind);
    for (Index d = 0; d < e.size(); ++d) out << ',' << format_double(e[d]);
    out << '\n';
  }
}

void export_embeddings(const ProjectionLayer& layer,
                       std::span<const Segment> segments,
                       const AnalysisContext& ctx, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("export_embeddings: cannot open '" + path + "'");
  export_embeddings(layer, segments, ctx, out);
  if (!out) throw Error("export_embeddings: write to '" + path + "' failed");
}

void export_weights_csv(const ProjectionLayer& layer, std::ostream& out) {
  out << "dim,total_bits\n"
      << layer.embedding_dim() << ',' << layer.total_bits() << '\n';
  for (Index i = 0; i < layer.embedding_dim(); ++i) {
    for (Index j = 0; j < layer.total_bits(); ++j) {
      if (j) out << ',';
      out << format_double(layer.weights(i, j));
    }
    out << '\n';
  }
  for (Index i = 0; i < layer.embedding_dim(); ++i) {
    if (i) out << ',';
    out << format_double(layer.bias[i]);
  }
  out << '\n';
}

void export_weights_csv(const ProjectionLayer& layer, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("export_weights: cannot open '" + path + "'");
  export_weights_csv(layer, out);
  if (!out) throw Error("export_weights: write to '" + path + "' failed");
}

ProjectionLayer import_weights_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("import_weights: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || trim(line) != "dim,total_bits")
    throw Error("import_weights: '" + path +
                "': expected header 'dim,total_bits'");
  if (!std::getline(in, line))
    throw Error("import_weights: '" + path + "': missing dimension row");
  auto dims = split_char(std::string(trim(line)), ',');
  if (dims.size() != 2)
    throw Error("import_weights: '" + path + "': malformed dimension row");
  Index dim = 0, bits = 0;
  try {
    dim = std::stoll(dims[0]);
    bits = std::stoll(dims[1]);
  } catch (const std::exception&) {
    throw Error("import_weights: '" + path + "': malformed dimension row");
  }
  if (dim <= 0 || bits <= 0)
    throw Error("import_weights: '" + path + "': dimensions must be positive");

  ProjectionLayer layer;
  layer.weights.resize(dim, bits);
  layer.bias = Eigen::VectorXd::Zero(dim);
  auto parse_row = [&](const std::string& row, Index expected,
                       Index lineno) {
    auto cells = split_char(std::string(trim(row)), ',');
    if (static_cast<Index>(cells.size()) != expected)
      throw Error("import_weights: '" + path + "' line " +
                  std::to_string(lineno) + ": expected " +
                  std::to_string(expected) + " values, got " +
                  std::to_string(cells.size()));
    Eigen::VectorXd v(expected);
    for (Index i = 0; i < expected; ++i) {
      try {
        v[i] = std::stod(cells[static_cast<std::size_t>(i)]);
      } catch (const std::exception&) {
        throw Error("import_weights: '" + path + "' line " +
                    std::to_string(lineno) + ": malformed number '" +
                    cells[static_cast<std::size_t>(i)] + "'");
      }
    }
    return v;
  };
  Index lineno = 2;
  for (Index i = 0; i < dim; ++i) {
    if (!std::getline(in, line))
      throw Error("import_weights: '" + path + "': truncated after " +
                  std::to_string(i) + " weight rows");
    layer.weights.row(i) = parse_row(line, bits, ++lineno).transpose();
  }
  // Optional trailing bias row; absent means zero bias.
  if (std::getline(in, line) && !trim(line).empty())
    layer.bias = parse_row(line, dim, ++lineno);
  return layer;
}

EmbeddingVector random_embedding(std::uint64_t seed, std::uint64_t vector_id,
                                 Index dim) {
  if (dim <= 0) throw Error("random_embedding: dimension must be positive");
  std::mt19937_64 gen(seed);
  gen.discard(vector_id * static_cast<std::uint64_t>(dim));
  EmbeddingVector v(dim);
  for (Index i = 0; i < dim; ++i) v[i] = uniform_in(gen, -0.1, 0.1);
  return v;
}

EmbeddingMatrix embed_with_plan(const ProjectionLayer& layer,
                                std::span<const Segment> segments,
                                const ZeroShotPlan& plan,
                                const PhonemeInventory& inventory,
                                const AnalysisContext& ctx) {
  EmbeddingMatrix m(static_cast<Index>(segments.size()), layer.embedding_dim());
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const Segment& seg = segments[i];
    const Resolution* res = nullptr;
    if (plan.strategy != Strategy::Auto && seg.kind == SegmentKind::phoneme &&
        !inventory.contains(seg))
      res = plan.find(seg, inventory.count_stress_variants());
    if (res && plan.strategy == Strategy::Random) {
      if (!plan.seed || !res->vector_id)
        throw Error("embed_with_plan: random plan is missing seed or vector id");
      m.row(static_cast<Index>(i)) =
          random_embedding(*plan.seed, *res->vector_id, layer.embedding_dim())
              .transpose();
    } else if (res && res->target) {
      Segment target = *res->target;
      if (ctx.chart->is_vowel(target.base)) target.stressed = seg.stressed;
      m.row(static_cast<Index>(i)) =
          project(layer, analyze(target, ctx).bits).transpose();
    } else {
      m.row(static_cast<Index>(i)) =
          project(layer, analyze(seg, ctx).bits).transpose();
    }
  }
  return m;
}

}  // namespace phonfeat
