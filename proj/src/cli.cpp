#include "phonfeat/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "phonfeat/error.hpp"
#include "phonfeat/frontend.hpp"
#include "phonfeat/ipa.hpp"
#include "phonfeat/metrics.hpp"
#include "phonfeat/projection.hpp"
#include "phonfeat/schema.hpp"
#include "phonfeat/text.hpp"
#include "phonfeat/utf8.hpp"
#include "phonfeat/zeroshot.hpp"

namespace phonfeat::cli {
namespace {

constexpr std::uint64_t kDefaultSeed = 42;
constexpr Index kDefaultDim = 512;

// Owns the lookup state one invocation analyzes against.
struct Session {
  FeatureSchema schema;
  OverrideDict overrides;
  AnalysisContext ctx;

  Session(const std::string& schema_path, const std::string& overrides_path,
          std::ostream& err) {
    schema = load_schema(schema_path);
    ctx.schema = &schema;
    ctx.chart = &default_chart();
    if (!overrides_path.empty()) {
      overrides = load_pf_overrides(overrides_path, schema);
      ctx.overrides = &overrides;
    }
    ctx.warn = [&err](const std::string& msg) {
      err << "warning: " << msg << '\n';
    };
  }
};

std::string pad(const std::string& s, std::size_t width) {
  const std::size_t w = utf8_length(s);
  return w >= width ? s : s + std::string(width - w, ' ');
}

void write_table(std::ostream& out,
                 const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths;
  for (const auto& row : rows) {
    if (widths.size() < row.size()) widths.resize(row.size(), 0);
    for (std::size_t i = 0; i < row.size(); ++i)
      widths[i] = std::max(widths[i], utf8_length(row[i]));
  }
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << "  ";
      out << (i + 1 == row.size() ? row[i] : pad(row[i], widths[i]));
    }
    out << '\n';
  }
}

template <typename Fn>
void for_each_line(const std::string& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) fn(++lineno, line);
}

std::vector<Segment> tokenize_file(const std::string& path,
                                   const IPAChart& chart) {
  std::vector<Segment> segments;
  for_each_line(path, [&](std::size_t lineno, const std::string& raw) {
    const auto line = trim(raw);
    if (line.empty()) return;
    try {
      auto segs = tokenize(line, chart);
      segments.insert(segments.end(), segs.begin(), segs.end());
    } catch (const Error& e) {
      throw Error(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  });
  return segments;
}

// Holds every option CLI11 binds; only one subcommand parses per run.
// format is empty until the user passes --format, so each handler can apply
// its own default.
struct Opts {
  std::string schema_path;
  std::string chart_overrides;
  std::string format;
  std::string ipa;
  std::string lexicon_path;
  std::string mapping_path;
  std::string text;
  std::string input_path;
  std::string segments_path;
  std::string inventory_path;
  std::string target_path;
  std::string utterances_path;
  std::string phoneme;
  std::string overrides_path;
  std::string weights_path;
  std::string out_path;
  std::string export_weights_path;
  std::string strategy;
  std::string name;
  std::size_t k = 5;
  std::uint64_t seed = kDefaultSeed;
  Index dim = kDefaultDim;
  bool with_chart = false;
  bool validated = false;
  bool types = false;
  bool stress_variants = false;
};

std::string fmt_or(const std::string& format, const char* fallback) {
  return format.empty() ? std::string(fallback) : format;
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Phonological feature pipeline: IPA parsing, PF encoding, "
               "lexicon frontend, zero-shot phoneme plans and embedding "
               "projection",
               "phonfeat"};
  app.require_subcommand(1);
  Opts o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--schema", o.schema_path,
                    "Feature schema JSON (built-in 60-bit default if omitted)");
    sub->add_option("--chart-overrides", o.chart_overrides,
                    "PF override TSV applied on top of the chart");
  };
  auto add_format = [&](CLI::App* sub, std::vector<std::string> allowed) {
    sub->add_option("--format", o.format, "Output format")
        ->check(CLI::IsMember(allowed));
  };

  CLI::App* schema_cmd =
      app.add_subcommand("schema", "Inspect or validate the feature schema");
  schema_cmd->require_subcommand(1);
  CLI::App* schema_show =
      schema_cmd->add_subcommand("show", "Print the schema as JSON");
  add_common(schema_show);
  schema_show->add_flag("--chart", o.with_chart, "Include the IPA chart");
  add_format(schema_show, {"json"});
  schema_show->callback([&] {
    Session s(o.schema_path, o.chart_overrides, err);
    nlohmann::ordered_json doc = s.schema.to_json();
    if (o.with_chart)
      doc = nlohmann::ordered_json{{"schema", std::move(doc)},
                                   {"chart", chart_to_json(*s.ctx.chart)}};
    out << doc.dump(2) << '\n';
  });

  CLI::App* schema_validate = schema_cmd->add_subcommand(
      "validate", "Check schema consistency and chart round-trips");
  add_common(schema_validate);
  schema_validate->add_flag("--chart", o.with_chart,
                            "Round-trip every chart segment");
  add_format(schema_validate, {"json", "table"});
  schema_validate->callback([&] {
    Session s(o.schema_path, o.chart_overrides, err);
    nlohmann::ordered_json doc;
    doc["features"] = s.schema.features().size();
    doc["total_bits"] = s.schema.total_bits();
    std::size_t failures = 0;
    if (o.with_chart) {
      std::size_t checked = 0;
      auto check = [&](const Segment& seg) {
        ++checked;
        const PFVector pf = analyze(seg, s.ctx);
        if (debinarize(pf.bits, s.schema) != pf.categorical) ++failures;
      };
      for (const auto& [base, traits] : s.ctx.chart->consonants) {
        (void)traits;
        check(Segment::phoneme(base));
      }
      for (const auto& [base, traits] : s.ctx.chart->vowels) {
        (void)traits;
        Segment seg = Segment::phoneme(base);
        check(seg);
        seg.stressed = true;
        check(seg);
      }
      doc["chart_segments"] = checked;
      doc["round_trip_failures"] = failures;
    }
    if (fmt_or(o.format, "json") == "json") {
      out << doc.dump(2) << '\n';
    } else {
      std::vector<std::vector<std::string>> rows;
      for (const auto& [key, value] : doc.items())
        rows.push_back({key, value.dump()});
      write_table(out, rows);
    }
    if (failures)
      throw Error("schema validate: " + std::to_string(failures) +
                  " round-trip failures");
  });

  CLI::App* encode_cmd =
      app.add_subcommand("encode", "PF-encode an IPA string");
  add_common(encode_cmd);
  encode_cmd->add_option("--ipa", o.ipa, "IPA text")->required();
  add_format(encode_cmd, {"csv", "json"});
  encode_cmd->callback([&] {
    Session s(o.schema_path, o.chart_overrides, err);
    const Utterance utt = ipa_to_utterance(o.ipa, s.ctx);
    if (fmt_or(o.format, "csv") == "csv") {
      write_utterance_csv_header(out, s.schema);
      write_utterance_csv_rows(out, utt, 0);
    } else {
      out << utterance_to_json(utt).dump(2) << '\n';
    }
  });

  CLI::App* analyze_cmd = app.add_subcommand(
      "analyze", "Show the categorical feature record per segment");
  add_common(analyze_cmd);
  analyze_cmd->add_option("--ipa", o.ipa, "IPA text")->required();
  add_format(analyze_cmd, {"table", "json", "csv"});
  analyze_cmd->callback([&] {
    Session s(o.schema_path, o.chart_overrides, err);
    const auto segments = tokenize(o.ipa, *s.ctx.chart);
    const std::string format = fmt_or(o.format, "table");
    if (format == "csv") {
      Utterance utt;
      utt.text = o.ipa;
      utt.segments = segments;
      utt.pf_matrix = encode_segments(segments, s.ctx);
      write_utterance_csv_header(out, s.schema);
      write_utterance_csv_rows(out, utt, 0);
      return;
    }
    if (format == "json") {
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const Segment& seg : segments) {
        const PFVector pf = analyze(seg, s.ctx);
        nlohmann::ordered_json j;
        j["ipa"] = render(seg);
        j["kind"] = to_string(seg.kind);
        j["features"] = nlohmann::ordered_json::object();
        for (const auto& def : s.schema.features()) {
          auto it = pf.categorical.find(def.name);
          if (it == pf.categorical.end())
            j["features"][def.name] = nullptr;
          else
            j["features"][def.name] = it->second;
        }
        std::vector<int> bits(static_cast<std::size_t>(pf.bits.size()));
        for (Index b = 0; b < pf.bits.size(); ++b)
          bits[static_cast<std::size_t>(b)] = pf.bits[b];
        j["bits"] = bits;
        arr.push_back(std::move(j));
      }
      out << arr.dump(2) << '\n';
      return;
    }
    std::vector<std::vector<std::string>> rows{{"ipa", "kind", "features"}};
    for (const Segment& seg : segments) {
      const PFVector pf = analyze(seg, s.ctx);
      std::string feats;
      for (const auto& def : s.schema.features()) {
        auto it = pf.categorical.find(def.name);
        if (it == pf.categorical.end()) continue;
        if (!feats.empty()) feats += ' ';
        feats += def.name + "=" + it->second;
      }
      rows.push_back({render(seg), to_string(seg.kind), feats});
    }
    write_table(out, rows);
  });

  CLI::App* frontend_cmd = app.add_subcommand(
      "frontend", "Text to PF matrix through a lexicon and mapping table");
  add_common(frontend_cmd);
  frontend_cmd->add_option("--lexicon", o.lexicon_path, "Lexicon TSV")
      ->required();
  frontend_cmd->add_option("--mapping", o.mapping_path, "Mapping TSV")
      ->required();
  CLI::Option* fe_text =
      frontend_cmd->add_option("--text", o.text, "One sentence of text");
  CLI::Option* fe_input = frontend_cmd->add_option(
      "--input", o.input_path, "UTF-8 text file, one sentence per line");
  fe_text->excludes(fe_input);
  add_format(frontend_cmd, {"csv", "json"});
  frontend_cmd->callback([&] {
    if ((fe_text->count() > 0) == (fe_input->count() > 0))
      throw CLI::RequiredError("frontend: exactly one of --text/--input");
    Session s(o.schema_path, o.chart_overrides, err);
    const Lexicon lex = load_lexicon(o.lexicon_path, "tsv", s.ctx.warn);
    const MappingTable table = load_mapping_table(o.mapping_path, *s.ctx.chart);
    const std::string format = fmt_or(o.format, "csv");
    // Convert everything before the first byte of output so a failure
    // anywhere leaves stdout empty instead of truncated mid-document.
    std::vector<Utterance> utts;
    if (fe_text->count() > 0) {
      utts.push_back(text_to_utterance(o.text, lex, table, s.ctx));
    } else {
      for_each_line(o.input_path, [&](std::size_t lineno,
                                      const std::string& raw) {
        const auto line = trim(raw);
        if (line.empty()) return;
        try {
          utts.push_back(text_to_utterance(std::string(line), lex, table,
                                           s.ctx));
        } catch (const Error& e) {
          throw Error(o.input_path + ":" + std::to_string(lineno) + ": " +
                      e.what());
        }
      });
    }
    if (format == "csv") {
      write_utterance_csv_header(out, s.schema);
      for (std::size_t idx = 0; idx < utts.size(); ++idx)
        write_utterance_csv_rows(out, utts[idx], idx);
    } else {
      out << "[\n";
      for (std::size_t idx = 0; idx < utts.size(); ++idx) {
        if (idx) out << ",\n";
        out << "  " << utterance_to_json(utts[idx]).dump();
      }
      out << "\n]\n";
    }
  });

  CLI::App* inventory_cmd = app.add_subcommand(
      "inventory", "Build a phoneme inventory from IPA lines or JSON");
  inventory_cmd
      ->add_option("--segments", o.segments_path,
                   "IPA file (one string per line) or inventory JSON")
      ->required();
  inventory_cmd->add_option("--name", o.name, "Inventory name");
  inventory_cmd->add_flag("--count-stress-variants", o.stress_variants,
                          "Keep stressed vowels as separate members");
  add_format(inventory_cmd, {"json"});
  inventory_cmd->callback([&] {
    PhonemeInventory inv =
        load_inventory(o.segments_path, default_chart(), o.stress_variants);
    if (!o.name.empty()) {
      const auto members = inv.members();
      inv = build_inventory(o.name, members, inv.count_stress_variants());
    }
    out << inv.to_json().dump(2) << '\n';
  });

  CLI::App* oos_cmd = app.add_subcommand(
      "oos", "Inventory statistics: corpus size and OOS phonemes in a target");
  oos_cmd->add_option("--inventory", o.inventory_path, "Corpus inventory file")
      ->required();
  oos_cmd->add_option("--target", o.target_path, "Target inventory file")
      ->required();
  oos_cmd->add_flag("--count-stress-variants", o.stress_variants,
                    "Keep stressed vowels as separate members");
  add_format(oos_cmd, {"json", "table"});
  oos_cmd->callback([&] {
    const PhonemeInventory corpus =
        load_inventory(o.inventory_path, default_chart(), o.stress_variants);
    const PhonemeInventory target =
        load_inventory(o.target_path, default_chart(), o.stress_variants);
    const InventoryStats stats = inventory_stats(corpus, target);
    std::vector<std::string> oos_list;
    for (const Segment& m : target.members())
      if (!corpus.contains(m)) oos_list.push_back(render(m));
    if (fmt_or(o.format, "json") == "json") {
      nlohmann::ordered_json doc;
      doc["corpus"] = corpus.name();
      doc["target"] = target.name();
      doc.update(to_json(stats));
      doc["oos"] = oos_list;
      out << doc.dump(2) << '\n';
    } else {
      out << inventory_stats_table(corpus.name(), stats);
      if (!oos_list.empty()) {
        out << "OOS:";
        for (const auto& m : oos_list) out << ' ' << m;
        out << '\n';
      }
    }
  });

  CLI::App* upr_cmd = app.add_subcommand(
      "upr", "Unseen phoneme rate per utterance plus test-set aggregate");
  upr_cmd->add_option("--inventory", o.inventory_path, "Corpus inventory file")
      ->required();
  upr_cmd
      ->add_option("--utterances", o.utterances_path,
                   "IPA file, one utterance per line")
      ->required();
  upr_cmd->add_flag("--types", o.types,
                    "Count distinct phoneme types instead of tokens");
  upr_cmd->add_flag("--count-stress-variants", o.stress_variants,
                    "Keep stressed vowels as separate members");
  add_format(upr_cmd, {"json", "csv", "table"});
  upr_cmd->callback([&] {
    Session s(o.schema_path, o.chart_overrides, err);
    const PhonemeInventory inv =
        load_inventory(o.inventory_path, *s.ctx.chart, o.stress_variants);
    const std::string format = fmt_or(o.format, "json");
    // Score every utterance and aggregate before the first byte of output
    // so a failure anywhere leaves stdout empty instead of truncated.
    std::vector<UtteranceStats> collected;
    for_each_line(o.utterances_path, [&](std::size_t lineno,
                                         const std::string& raw) {
      const auto line = trim(raw);
      if (line.empty()) return;
      try {
        const auto segments = tokenize(line, *s.ctx.chart);
        collected.push_back(upr(segments, inv, o.types));
      } catch (const Error& e) {
        throw Error(o.utterances_path + ":" + std::to_string(lineno) + ": " +
                    e.what());
      }
    });
    const TestSetStats agg =
        testset_stats(std::span<const UtteranceStats>(collected));
    if (format == "csv") {
      out << "utt,word_count,phoneme_count,oos_count,upr_percent\n";
      for (std::size_t idx = 0; idx < collected.size(); ++idx) {
        const UtteranceStats& u = collected[idx];
        out << idx << ',' << u.word_count << ',' << u.phoneme_count << ','
            << u.oos_count << ',' << format_double(u.upr_percent) << '\n';
      }
    } else if (format == "json") {
      out << "{\n  \"utterances\": [\n";
      for (std::size_t idx = 0; idx < collected.size(); ++idx) {
        nlohmann::ordered_json j{{"utt", idx}};
        j.update(to_json(collected[idx]));
        if (idx) out << ",\n";
        out << "    " << j.dump();
      }
      out << "\n  ],\n  \"testset\": " << to_json(agg).dump() << "\n}\n";
    } else {
      out << testset_stats_table(o.utterances_path, agg);
    }
  });

  CLI::App* nearest_cmd = app.add_subcommand(
      "nearest", "Rank inventory members by categorical PF distance");
  add_common(nearest_cmd);
  nearest_cmd
      ->add_option("--inventory", o.inventory_path, "Corpus inventory file")
      ->required();
  nearest_cmd->add_option("--phoneme", o.phoneme, "Query phoneme (IPA)")
      ->required();
  nearest_cmd->add_option("-k,--top", o.k, "Number of results")
      ->capture_default_str();
  nearest_cmd->add_flag("--count-stress-variants", o.stress_variants,
                        "Keep stressed vowels as separate members");
  add_format(nearest_cmd, {"table", "json"});
  nearest_cmd->callback([&] {
    Session s(o.schema_path, o.chart_overrides, err);
    const PhonemeInventory inv =
        load_inventory(o.inventory_path, *s.ctx.chart, o.stress_variants);
    const auto segments = tokenize(o.phoneme, *s.ctx.chart);
    if (segments.size() != 1 || segments[0].kind != SegmentKind::phoneme)
      throw Error("nearest: --phoneme must be a single phoneme");
    const auto results = suggest_nearest(segments[0], inv, o.k, s.ctx);
    if (fmt_or(o.format, "table") == "json") {
      nlohmann::ordered_json doc;
      doc["query"] = render(segments[0]);
      doc["results"] = nlohmann::ordered_json::array();
      for (const auto& [seg, d] : results)
        doc["results"].push_back(
            nlohmann::ordered_json{{"ipa", render(seg)}, {"distance", d}});
      out << doc.dump(2) << '\n';
    } else {
      std::vector<std::vector<std::string>> rows{{"rank", "ipa", "distance"}};
      std::size_t rank = 1;
      for (const auto& [seg, d] : results)
        rows.push_back(
            {std::to_string(rank++), render(seg), std::to_string(d)});
      write_table(out, rows);
    }
  });

  CLI::App* plan_cmd = app.add_subcommand(
      "plan", "Resolve OOS phonemes with the auto, manual or random strategy");
  add_common(plan_cmd);
  plan_cmd->add_option("--strategy", o.strategy, "auto, manual or random")
      ->required()
      ->check(CLI::IsMember({"auto", "manual", "random"}));
  plan_cmd->add_option("--inventory", o.inventory_path, "Corpus inventory file")
      ->required();
  CLI::Option* plan_target =
      plan_cmd->add_option("--target", o.target_path, "Target inventory file");
  CLI::Option* plan_utts = plan_cmd->add_option(
      "--utterances", o.utterances_path, "IPA file, one utterance per line");
  plan_target->excludes(plan_utts);
  plan_cmd->add_option("--overrides", o.overrides_path,
                       "Manual override TSV (oos<TAB>target)");
  plan_cmd->add_option("--seed", o.seed, "Seed for random vector assignment")
      ->capture_default_str();
  plan_cmd->add_flag("--count-stress-variants", o.stress_variants,
                     "Keep stressed vowels as separate members");
  add_format(plan_cmd, {"json"});
  plan_cmd->callback([&] {
    if ((plan_target->count() > 0) == (plan_utts->count() > 0))
      throw CLI::RequiredError("plan: exactly one of --target/--utterances");
    Session s(o.schema_path, o.chart_overrides, err);
    const Strategy strategy = strategy_from_string(o.strategy);
    const PhonemeInventory corpus =
        load_inventory(o.inventory_path, *s.ctx.chart, o.stress_variants);
    std::vector<Segment> oos_set;
    if (plan_target->count() > 0) {
      const PhonemeInventory target =
          load_inventory(o.target_path, *s.ctx.chart, o.stress_variants);
      for (const Segment& m : target.members())
        if (!corpus.contains(m)) oos_set.push_back(m);
    } else {
      const auto segments = tokenize_file(o.utterances_path, *s.ctx.chart);
      oos_set = detect_oos(segments, corpus);
    }
    std::map<std::string, std::string> manual;
    const std::map<std::string, std::string>* manual_ptr = nullptr;
    if (!o.overrides_path.empty()) {
      manual = load_manual_overrides(o.overrides_path);
      manual_ptr = &manual;
    }
    std::optional<std::uint64_t> seed;
    if (strategy == Strategy::Random) seed = o.seed;
    const ZeroShotPlan plan =
        build_plan(strategy, oos_set, corpus, manual_ptr, seed, s.ctx);
    out << plan_to_json(plan).dump(2) << '\n';
  });

  CLI::App* project_cmd = app.add_subcommand(
      "project", "Project PF vectors into embedding space and export CSV");
  add_common(project_cmd);
  CLI::Option* proj_dim =
      project_cmd->add_option("--dim", o.dim, "Embedding dimensionality")
          ->capture_default_str();
  project_cmd->add_option("--seed", o.seed, "Weight init seed")
      ->capture_default_str();
  project_cmd->add_option("--weights", o.weights_path,
                          "Import weights CSV instead of initializing");
  project_cmd
      ->add_option("--segments", o.segments_path,
                   "IPA file, one string per line")
      ->required();
  project_cmd->add_option("--out", o.out_path, "Embedding CSV destination")
      ->required();
  project_cmd->add_option("--export-weights", o.export_weights_path,
                          "Also write the weight matrix CSV here");
  project_cmd->add_flag(
      "--validated", o.validated,
      "Reject seeds that collapse two distinct chart PF vectors");
  add_format(project_cmd, {"json"});
  project_cmd->callback([&] {
    Session s(o.schema_path, o.chart_overrides, err);
    ProjectionLayer layer;
    bool imported = false;
    if (!o.weights_path.empty()) {
      layer = import_weights_csv(o.weights_path);
      imported = true;
      if (proj_dim->count() > 0 && layer.embedding_dim() != o.dim)
        throw Error("project: --dim " + std::to_string(o.dim) +
                    " does not match imported weights (" +
                    std::to_string(layer.embedding_dim()) + ")");
      if (layer.total_bits() != s.schema.total_bits())
        throw Error("project: imported weights expect " +
                    std::to_string(layer.total_bits()) +
                    " bits but the schema has " +
                    std::to_string(s.schema.total_bits()));
    } else if (o.validated) {
      layer = init_projection_validated(o.dim, s.ctx, o.seed);
    } else {
      layer = init_projection(o.dim, s.schema.total_bits(), o.seed);
    }
    const auto segments = tokenize_file(o.segments_path, *s.ctx.chart);
    export_embeddings(layer, segments, s.ctx, o.out_path);
    if (!o.export_weights_path.empty())
      export_weights_csv(layer, o.export_weights_path);
    nlohmann::ordered_json doc;
    doc["embedding_dim"] = layer.embedding_dim();
    doc["total_bits"] = layer.total_bits();
    doc["parameter_count"] = layer.parameter_count();
    if (!imported) doc["seed"] = layer.seed;
    doc["segments"] = segments.size();
    doc["out"] = o.out_path;
    out << doc.dump(2) << '\n';
  });

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::CallForHelp&) {
    const CLI::App* target = &app;
    while (!target->get_subcommands().empty())
      target = target->get_subcommands().front();
    out << target->help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace phonfeat::cli
