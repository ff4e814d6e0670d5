#include <doctest.h>

#include <fstream>

#include "test_support.hpp"
#include "tweetfuse/corpus.hpp"
#include "tweetfuse/preprocess.hpp"

using namespace tweetfuse;

TEST_CASE("clean removes mentions, urls, hash marks and punctuation") {
  PreprocessConfig cfg;
  cfg.emoji_map = {{"😂", "ضحك"}};
  CHECK(clean("@user مرحبا http://t.co/x", cfg) == "مرحبا");
  CHECK(clean("الرَّحْمَٰن", cfg) == "الرحمن");
  CHECK(clean("#فوز 😂", cfg) == "فوز ضحك");
  CHECK(clean("", cfg).empty());
  CHECK(clean("HTTPS://X.COM/a b", cfg) == "b");
}

TEST_CASE("hashtags can be dropped whole") {
  PreprocessConfig cfg;
  cfg.strip_hashmark_keep_word = false;
  CHECK(clean("#فوز كبير #win_2024!", cfg) == "كبير");
}

TEST_CASE("diacritics are kept when configured") {
  PreprocessConfig cfg;
  cfg.remove_diacritics = false;
  CHECK(clean("جَميل!", cfg) == "جَميل");
}

TEST_CASE("longer emoji keys win") {
  PreprocessConfig cfg;
  cfg.emoji_map = {{"❤", "قلب"}, {"❤️", "حب"}};
  CHECK(clean("❤️❤", cfg) == "حب قلب");
}

TEST_CASE("normalize maps letter variants") {
  CHECK(normalize("إلى أحمد") == "الي احمد");
  CHECK(normalize("مدرســـة") == "مدرسه");
  CHECK(normalize("آمين") == "امين");
  CHECK(normalize("الي احمد") == "الي احمد");
}

TEST_CASE("stopword removal keeps order") {
  PreprocessConfig cfg;
  CHECK(remove_stopwords({"في", "البيت"}, cfg) == std::vector<std::string>{"في", "البيت"});
  cfg.stopwords = {"في"};
  CHECK(remove_stopwords({"في", "البيت", "في"}, cfg) == std::vector<std::string>{"البيت"});
  CHECK(remove_stopwords({"في", "في"}, cfg).empty());
}

TEST_CASE("stopword file entries are normalized on load") {
  testing::TempDir tmp("stopwords");
  testing::write_file(tmp.file("s.txt"), "إلى\nعلى\n\n  هذا  \n");
  const auto words = load_stopwords(tmp.file("s.txt"));
  CHECK(words == std::set<std::string>{"الي", "علي", "هذا"});
}

TEST_CASE("emoji map loader rejects lines without a tab") {
  testing::TempDir tmp("emoji");
  testing::write_file(tmp.file("ok.tsv"), "😂\tضحك\r\n\n👍\tجيد جدا\n");
  const auto m = load_emoji_map(tmp.file("ok.tsv"));
  CHECK(m.size() == 2);
  CHECK(m.at("👍") == "جيد جدا");
  testing::write_file(tmp.file("bad.tsv"), "😂 ضحك\n");
  CHECK_THROWS(load_emoji_map(tmp.file("bad.tsv")));
}

TEST_CASE("encoding pads, truncates and maps unknown words to OOV") {
  PreprocessConfig cfg;
  cfg.max_len = 5;
  const Vocabulary vocab{{"a", 2}, {"b", 3}, {"c", 4}};
  const auto seq = tokenize_encode("a b c", vocab, cfg, "x");
  CHECK(seq.ids == std::vector<std::int32_t>{2, 3, 4, 0, 0});
  CHECK(seq.true_len == 3);
  CHECK(seq.source_id == "x");
  CHECK(tokenize_encode("a zz", vocab, cfg).ids == std::vector<std::int32_t>{2, kOovId, 0, 0, 0});
  CHECK(tokenize_encode("", vocab, cfg).ids == std::vector<std::int32_t>(5, kPadId));

  cfg.max_len = 100;
  std::string long_text;
  for (int i = 0; i < 120; ++i) long_text += (i % 2 ? "a " : "b ");
  const auto truncated = tokenize_encode(long_text, vocab, cfg);
  CHECK(truncated.ids.size() == 100);
  CHECK(truncated.true_len == 100);
  CHECK(truncated.ids[99] == 2);
}

TEST_CASE("full pipeline is deterministic and ids stay in range") {
  PreprocessConfig cfg;
  cfg.max_len = 12;
  const Vocabulary vocab{{"رائع", 2}, {"اليوم", 3}};
  Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    const std::string s = testing::fuzz_text(rng) + " رائع اليوم";
    const auto a = preprocess_text(s, vocab, cfg);
    CHECK(a == preprocess_text(s, vocab, cfg));
    for (auto id : a.ids) CHECK((id >= 0 && id <= 3));
    for (std::size_t t = a.true_len; t < a.ids.size(); ++t) CHECK(a.ids[t] == kPadId);
  }
}

TEST_CASE("golden file") {
  PreprocessConfig cfg;
  cfg.emoji_map = load_emoji_map(testing::fixture_path("golden_emoji_map.tsv").string());
  std::ifstream in(testing::fixture_path("clean_golden.tsv"), std::ios::binary);
  std::vector<std::string> f;
  std::size_t line = 0, cases = 0;
  REQUIRE(read_record(in, f, line));
  while (read_record(in, f, line)) {
    ++cases;
    REQUIRE(f.size() == 3);
    CAPTURE(f[0]);
    CHECK(clean(f[0], cfg) == f[1]);
    CHECK(normalize(f[1]) == f[2]);
  }
  CHECK(cases == 30);
}

TEST_CASE("clean and normalize are idempotent on fuzzed input") {
  PreprocessConfig cfg;
  cfg.emoji_map = {{"😂", "ضحك"}, {"❤️", "حَب"}, {"🌹", "وردة"}};
  PreprocessConfig drop = cfg;
  drop.strip_hashmark_keep_word = false;
  Rng rng(77);
  for (int i = 0; i < 10000; ++i) {
    const std::string s = testing::fuzz_text(rng);
    const std::string c = clean(s, cfg);
    REQUIRE(clean(c, cfg) == c);
    const std::string d = clean(s, drop);
    REQUIRE(clean(d, drop) == d);
    const std::string n = normalize(s);
    REQUIRE(normalize(n) == n);
    CHECK(c.find('#') == std::string::npos);
    CHECK(c.find('@') == std::string::npos);
  }
}
