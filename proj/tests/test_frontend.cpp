#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "phonfeat/error.hpp"
#include "phonfeat/frontend.hpp"

using namespace phonfeat;

namespace {

const std::string kDataDir = TEST_DATA_DIR;

std::string write_temp(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path.string();
}

std::vector<std::string> rendered(const std::vector<Segment>& segs) {
  std::vector<std::string> out;
  for (const auto& s : segs) out.push_back(render(s, false));
  return out;
}

}  // namespace

TEST_SUITE("frontend") {

TEST_CASE("lexicon file parses headwords and stress onsets") {
  const Lexicon lex =
      load_lexicon(kDataDir + "/lexicon_de.tsv", "sampa-de");
  CHECK(lex.source_tag == "sampa-de");
  REQUIRE(lex.entries.count("haus") == 1);

  // the bare quote token marks the next symbol as the syllable onset
  const auto& haus = lex.entries.at("haus");
  REQUIRE(haus.size() == 3);
  CHECK(haus[0] == PronSymbol{"h", true});
  CHECK(haus[1] == PronSymbol{"aU", false});
  CHECK(haus[2] == PronSymbol{"s", false});

  // late stress stays where the file puts it
  REQUIRE(lex.entries.count("verstehen") == 1);
  const auto& verstehen = lex.entries.at("verstehen");
  std::size_t onsets = 0;
  std::size_t onset_at = 0;
  for (std::size_t i = 0; i < verstehen.size(); ++i)
    if (verstehen[i].stress_onset) {
      ++onsets;
      onset_at = i;
    }
  CHECK(onsets == 1);
  CHECK(onset_at > 0);
}

TEST_CASE("lexicon headwords are casefolded") {
  const std::string path = write_temp(
      "lex_case.tsv", "HAUS\t\" h aU s\nSchön\t\" S 2: n\n");
  const Lexicon lex = load_lexicon(path, "t");
  CHECK(lex.entries.count("haus") == 1);
  CHECK(lex.entries.count("schön") == 1);
  CHECK(lex.entries.count("HAUS") == 0);
}

TEST_CASE("quote prefix attached to a symbol also marks the onset") {
  const std::string path = write_temp("lex_prefix.tsv", "ja\t\"j a\n");
  const Lexicon lex = load_lexicon(path, "t");
  const auto& pron = lex.entries.at("ja");
  REQUIRE(pron.size() == 2);
  CHECK(pron[0] == PronSymbol{"j", true});
  CHECK(pron[1] == PronSymbol{"a", false});
}

TEST_CASE("lexicon file errors carry path and line number") {
  CHECK_THROWS_WITH_AS(load_lexicon(kDataDir + "/missing.tsv", "t"),
                       ("lexicon: cannot open '" + kDataDir + "/missing.tsv'")
                           .c_str(),
                       Error);

  auto check_line2 = [](const std::string& name, const std::string& content,
                        const char* needle) {
    const std::string path = write_temp(name, content);
    try {
      load_lexicon(path, "t");
      FAIL("expected Error for ", name);
    } catch (const Error& e) {
      const std::string msg = e.what();
      CHECK(msg.find(path + ":2") != std::string::npos);
      CHECK(msg.find(needle) != std::string::npos);
    }
  };
  check_line2("lex_notab.tsv", "a\ta\nword without tab\n",
              "expected <word><TAB><pronunciation>");
  check_line2("lex_dup.tsv", "Haus\th aU s\nhaus\th aU s\n",
              "duplicate headword 'haus'");
  check_line2("lex_empty_pron.tsv", "a\ta\nb\t \n", "empty pronunciation");
  check_line2("lex_trailing.tsv", "a\ta\nb\tb a \"\n",
              "trailing stress marker");
}

TEST_CASE("empty lexicon file warns") {
  const std::string path = write_temp("lex_empty.tsv", "\n\n");
  std::vector<std::string> warnings;
  const Lexicon lex =
      load_lexicon(path, "t", [&](const std::string& m) { warnings.push_back(m); });
  CHECK(lex.entries.empty());
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("is empty") != std::string::npos);
}

TEST_CASE("mapping table parses IPA and diphthong flags") {
  const MappingTable table =
      load_mapping_table(kDataDir + "/mapping_de.tsv", default_chart());
  CHECK(table.ipa.at("C") == "ç");
  CHECK(table.ipa.at("ts") == "t͡s");
  REQUIRE(table.diphthongs.count("aI") == 1);
  CHECK(table.diphthongs.at("aI").first == "a");
  CHECK(table.diphthongs.at("aI").second == "ɪ");
  CHECK(table.diphthongs.at("OY").first == "ɔ");
  CHECK(table.diphthongs.at("OY").second == "ʏ");
  // plain vowels are not diphthongs
  CHECK(table.diphthongs.count("a:") == 0);
}

TEST_CASE("mapping table rejects malformed files") {
  const IPAChart& chart = default_chart();
  auto bad = [&](const std::string& name, const std::string& content,
                 const char* needle) {
    const std::string path = write_temp(name, content);
    try {
      load_mapping_table(path, chart);
      FAIL("expected Error for ", name);
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  bad("map_cols.tsv", "one-column\n", "expected <symbol><TAB><ipa>");
  bad("map_dup.tsv", "p\tp\np\tb\n", "duplicate symbol 'p'");
  bad("map_flag.tsv", "aI\taɪ\tglide\n", "unknown flag 'glide'");
  bad("map_dip1.tsv", "aI\ta\tdiphthong\n", "exactly two vowels");
  bad("map_dip2.tsv", "aI\tap\tdiphthong\n", "exactly two vowels");
  bad("map_ipa.tsv", "q\t÷\n", "unknown IPA symbol");
}

TEST_CASE("to_ipa places syllable stress on the first following vowel") {
  const MappingTable table =
      load_mapping_table(kDataDir + "/mapping_de.tsv", default_chart());
  const IPAChart& chart = default_chart();

  SUBCASE("onset on a consonant carries to the next vowel") {
    const auto segs = to_ipa({{"h", true}, {"aU", false}, {"s", false}},
                             table, chart);
    CHECK(rendered(segs) == std::vector<std::string>{"h", "a", "ʊ", "s"});
    CHECK_FALSE(segs[0].stressed);
    CHECK(segs[1].stressed);   // first diphthong component
    CHECK_FALSE(segs[2].stressed);  // second component never stressed
    CHECK_FALSE(segs[3].stressed);
  }

  SUBCASE("onset directly on a vowel symbol") {
    const auto segs = to_ipa({{"m", false}, {"a:", true}}, table, chart);
    REQUIRE(segs.size() == 2);
    CHECK(segs[1].stressed);
  }

  SUBCASE("length flags are discarded") {
    const auto segs = to_ipa({{"a:", false}, {"e:", true}}, table, chart);
    for (const auto& s : segs) CHECK_FALSE(s.long_mark);
  }

  SUBCASE("affricate symbols stay single segments") {
    const auto segs = to_ipa({{"tS", false}, {"a", false}}, table, chart);
    REQUIRE(segs.size() == 2);
    REQUIRE(segs[0].affricate_components.has_value());
    CHECK(segs[0].affricate_components->first == "t");
    CHECK(segs[0].affricate_components->second == "ʃ");
  }

  SUBCASE("unmapped symbols are an error") {
    CHECK_THROWS_WITH_AS(
        to_ipa({{"zz", false}}, table, chart),
        ("to_ipa: resource symbol 'zz' is not in mapping table '" + table.name +
         "'")
            .c_str(),
        Error);
  }
}

TEST_CASE("text to utterance") {
  const Lexicon lex = load_lexicon(kDataDir + "/lexicon_de.tsv", "sampa-de");
  const MappingTable table =
      load_mapping_table(kDataDir + "/mapping_de.tsv", default_chart());
  const AnalysisContext ctx;

  const Utterance utt =
      text_to_utterance("Das Haus ist schön.", lex, table, ctx);
  CHECK(utt.text == "Das Haus ist schön.");

  std::size_t boundaries = 0;
  std::size_t stressed = 0;
  for (const auto& s : utt.segments) {
    if (s.kind == SegmentKind::word_boundary) ++boundaries;
    if (s.stressed) ++stressed;
  }
  CHECK(boundaries == 3);  // four words
  CHECK(stressed == 2);    // content words only; das/ist carry no stress
  REQUIRE(!utt.segments.empty());
  CHECK(utt.segments.back().kind == SegmentKind::sentence_end);
  CHECK(utt.pf_matrix.rows() == static_cast<Index>(utt.segments.size()));
  CHECK(utt.pf_matrix.cols() == ctx.schema->total_bits());

  // h ˈa ʊ s between the first and second boundary
  const auto ipa = rendered(utt.segments);
  const std::vector<std::string> expect_haus = {"h", "a", "ʊ", "s"};
  const auto it = std::search(ipa.begin(), ipa.end(), expect_haus.begin(),
                              expect_haus.end());
  CHECK(it != ipa.end());

  CHECK_THROWS_WITH_AS(
      text_to_utterance("Das Krokodil", lex, table, ctx),
      ("frontend: word 'krokodil' is not in lexicon '" + lex.name + "'")
          .c_str(),
      Error);
}

TEST_CASE("ipa to utterance") {
  const AnalysisContext ctx;
  const Utterance utt = ipa_to_utterance("pa", ctx);
  REQUIRE(utt.segments.size() == 2);
  CHECK(utt.pf_matrix.rows() == 2);
  CHECK(utt.pf_matrix.cols() == 60);
  // rows match per-segment analysis
  CHECK(bits_equal(BitVector(utt.pf_matrix.row(0)),
                   analyze(utt.segments[0], ctx).bits));
  CHECK(bits_equal(BitVector(utt.pf_matrix.row(1)),
                   analyze(utt.segments[1], ctx).bits));
}

TEST_CASE("utterance CSV layout") {
  const AnalysisContext ctx;
  const Utterance utt = ipa_to_utterance("ˈpa #", ctx);
  std::ostringstream out;
  write_utterance_csv_header(out, *ctx.schema);
  write_utterance_csv_rows(out, utt, 7);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  CHECK(header.rfind("utt,symbol,kind,", 0) == 0);
  CHECK(std::count(header.begin(), header.end(), ',') == 2 + 60);
  CHECK(header.find("symbol_type:phoneme") != std::string::npos);
  CHECK(header.find("manner:plosive") != std::string::npos);

  std::vector<std::string> rows;
  for (std::string line; std::getline(in, line);) rows.push_back(line);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].rfind("7,p,phoneme,", 0) == 0);
  CHECK(rows[1].rfind("7,ˈa,phoneme,", 0) == 0);
  CHECK(rows[2].rfind("7,#,word_boundary,", 0) == 0);
  for (const auto& row : rows) {
    CHECK(std::count(row.begin(), row.end(), ',') == 2 + 60);
    // bit cells hold only 0 or 1
    std::size_t cell_start = 0;
    for (int k = 0; k < 3; ++k) cell_start = row.find(',', cell_start) + 1;
    for (std::size_t i = cell_start; i < row.size(); ++i)
      CHECK((row[i] == '0' || row[i] == '1' || row[i] == ','));
  }
}

TEST_CASE("utterance JSON layout") {
  const AnalysisContext ctx;
  const auto doc = utterance_to_json(ipa_to_utterance("ˈpa .", ctx));
  CHECK(doc["text"] == "ˈpa .");
  REQUIRE(doc["segments"].size() == 3);
  CHECK(doc["segments"][0]["ipa"] == "p");
  CHECK(doc["segments"][0]["kind"] == "phoneme");
  CHECK(doc["segments"][0]["stressed"] == false);
  CHECK(doc["segments"][1]["stressed"] == true);
  CHECK(doc["segments"][2]["kind"] == "sentence_end");
  CHECK(doc["segments"][2].contains("base") == false);
  REQUIRE(doc["pf_matrix"].size() == 3);
  CHECK(doc["pf_matrix"][0].size() == 60);

  // field order is designed, not alphabetical
  const std::string dumped = doc.dump();
  CHECK(dumped.rfind("{\"text\":", 0) == 0);
}

}
