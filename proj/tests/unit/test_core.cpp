#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "autointent/errors.hpp"
#include "autointent/intent.hpp"
#include "autointent/prompt_assets.hpp"
#include "autointent/render.hpp"
#include "autointent/rng.hpp"
#include "autointent/text.hpp"
#include "autointent/trajectory_io.hpp"
#include "fixtures.hpp"

using namespace autointent;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  auto d = fs::temp_directory_path() / ("autointent_core_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

void write_file(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

}  // namespace

TEST_CASE("normalize_intent lowercases and strips punctuation") {
  auto n = normalize_intent("Selecting Date.");
  CHECK(n.intent.words() == std::vector<std::string>{"selecting", "date"});
  CHECK_FALSE(n.truncated);
}

TEST_CASE("normalize_intent truncates beyond three words") {
  auto n = normalize_intent("clicking the main search button");
  CHECK(n.intent.words() == std::vector<std::string>{"clicking", "the", "main"});
  CHECK(n.truncated);
}

TEST_CASE("normalize_intent rejects blank input") {
  CHECK_THROWS_AS(normalize_intent("  "), EmptyIntent);
  CHECK_THROWS_AS(normalize_intent("?!-- ..."), EmptyIntent);
}

TEST_CASE("normalize_intent keeps internal hyphens and drops apostrophes") {
  CHECK(normalize_intent("Selecting one-way").intent.text() == "selecting one-way");
  CHECK(normalize_intent("-checking- -").intent.text() == "checking");
  CHECK(normalize_intent("opening user's cart").intent.text() == "opening users cart");
  CHECK(normalize_intent("opening user\xE2\x80\x99s cart").intent.text() == "opening users cart");
  CHECK(normalize_intent("entering \"boston\"").intent.text() == "entering boston");
}

TEST_CASE("intent_text joins with single spaces and round-trips") {
  CHECK(intent_text(Intent::from_words({"selecting", "date"})) == "selecting date");
  CHECK(intent_text(Intent::from_words({"searching"})) == "searching");
  for (const char* raw : {"selecting date", "searching", "a-b c d", "caf\xC3\xA9 ordering now"}) {
    const Intent z = normalize_intent(raw).intent;
    CHECK(normalize_intent(intent_text(z)).intent == z);
  }
}

TEST_CASE("Intent::from_words enforces the invariants") {
  CHECK_THROWS_AS(Intent::from_words({}), EmptyIntent);
  CHECK_THROWS_AS(Intent::from_words({"a", "b", "c", "d"}), ValidationError);
  CHECK_THROWS_AS(Intent::from_words({"Upper"}), ValidationError);
  CHECK_THROWS_AS(Intent::from_words({"-edge"}), ValidationError);
  CHECK_THROWS_AS(Intent::from_words({"two words"}), ValidationError);
  CHECK_THROWS_AS(parse_canonical_intent("one two three four"), ValidationError);
}

TEST_CASE("looks_gerund_led is a heuristic on the first word") {
  CHECK(looks_gerund_led(parse_canonical_intent("searching availability")));
  CHECK_FALSE(looks_gerund_led(parse_canonical_intent("date picker")));
  CHECK_FALSE(looks_gerund_led(parse_canonical_intent("ing")));
}

TEST_CASE("text helpers") {
  CHECK(text::trim("  a b \n") == "a b");
  CHECK(text::split_whitespace(" a  b\tc ") == std::vector<std::string>{"a", "b", "c"});
  CHECK(text::split_lines("a\r\nb\n") == std::vector<std::string>{"a", "b", ""});
  CHECK(text::split_on("a,,b,", ',') == std::vector<std::string>{"a", "b"});
  CHECK(text::truncate_utf8("caf\xC3\xA9", 4) == "caf");
  CHECK(text::render_template("{a} {{x}} {b}", {{"a", "1"}, {"b", "2"}}) == "1 {x} 2");
  CHECK_THROWS_AS(text::render_template("{missing}", {}), ConfigError);
  CHECK(text::hex64(0x1234) == "0000000000001234");
  CHECK(text::fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(text::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("Rng draws are reproducible and derived seeds differ by key") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  Rng r(1);
  for (int i = 0; i < 1000; ++i) {
    CHECK(r.uniform_index(7) < 7);
    const double u = r.uniform_unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  CHECK(derive_seed(1, "task-a") != derive_seed(1, "task-b"));
  CHECK(derive_seed(1, "task-a", 1) != derive_seed(1, "task-a", 2));
  CHECK(derive_seed(1, "task-a") == derive_seed(1, "task-a"));
}

TEST_CASE("action rendering") {
  CHECK(render_action(fixtures::click("5"), "svg") == "CLICK <svg id=5 />");
  CHECK(render_action(fixtures::type("12", "san francisco"), "input") == "TYPE <input id=12 /> san francisco");
  CHECK(render_action_brief(fixtures::select("3", "2 guests")) == "SELECT id=3 \"2 guests\"");
  Element e = fixtures::el("7", "input", "City", 0.5);
  e.attributes = {{"placeholder", "City or ZIP"}};
  CHECK(render_element(e, 1, 100) == "(1) <input id=7 placeholder=\"City or ZIP\"> City");
  CHECK(render_element(e, 2, 100, false) == "(2) <input id=7> City");
  CHECK(render_numbered({}) == "(none)");
  CHECK(render_numbered({"a", "b"}) == "1. a\n2. b");
}

TEST_CASE("validation rules") {
  using fixtures::el;
  CHECK_THROWS_AS(validate(Action{ActionKind::Click, "1", "x"}), ValidationError);
  CHECK_THROWS_AS(validate(Action{ActionKind::Type, "1", ""}), ValidationError);
  Observation o{"t", 1, {el("1", "a", "", 0.5), el("1", "b", "", 0.4)}, std::nullopt};
  CHECK_THROWS_AS(validate(o), ValidationError);  // duplicate id
  o.candidates = {el("1", "a", "", 0.1), el("2", "b", "", 0.4)};
  CHECK_THROWS_AS(validate(o), ValidationError);  // unsorted
  o.candidates = {};
  CHECK_THROWS_AS(validate(o), ValidationError);  // empty
  Trajectory t{"t", {}, SplitTag::Train};
  CHECK_THROWS_AS(validate(t), ValidationError);
  t.steps.push_back(fixtures::make_step("t", 1, {el("1", "a", "", 0.5)}, fixtures::click("1")));
  t.steps.push_back(fixtures::make_step("t", 3, {el("1", "a", "", 0.5)}, fixtures::click("1")));
  CHECK_THROWS_AS(validate(t), ValidationError);  // not consecutive
}

TEST_CASE("candidate order is rank_score descending then id ascending") {
  std::vector<Element> c{fixtures::el("b", "a", "", 0.5), fixtures::el("a", "a", "", 0.5),
                         fixtures::el("c", "a", "", 0.9)};
  sort_candidates(c);
  CHECK(c[0].element_id == "c");
  CHECK(c[1].element_id == "a");
  CHECK(c[2].element_id == "b");
}

TEST_CASE("trajectory files round-trip and re-sort candidates") {
  const auto dir = temp_dir("roundtrip");
  const auto ex = fixtures::extraction_fixture();
  std::vector<Trajectory> two(ex.trajectories.begin(), ex.trajectories.begin() + 2);
  two[0].steps[0].observation.candidates[0].attributes = {{"aria-label", "Search"}, {"name", "q"}};
  two[1].split_tag = SplitTag::CrossDomain;
  two[1].steps[0].observation.page_meta = "travel";
  save_trajectories(two, dir / "t.jsonl");
  CHECK(load_trajectories(dir / "t.jsonl") == two);

  // Writing is deterministic.
  save_trajectories(two, dir / "u.jsonl");
  std::ifstream a(dir / "t.jsonl"), b(dir / "u.jsonl");
  CHECK(std::string(std::istreambuf_iterator<char>(a), {}) == std::string(std::istreambuf_iterator<char>(b), {}));

  // On-disk order is not trusted.
  auto j = io::to_json(two[0]);
  std::swap(j["steps"][0]["observation"]["candidates"][0], j["steps"][0]["observation"]["candidates"][2]);
  write_file(dir / "v.jsonl", j.dump() + "\n");
  CHECK(load_trajectories(dir / "v.jsonl")[0] == two[0]);
}

TEST_CASE("annotated files round-trip") {
  const auto dir = temp_dir("annotated");
  const auto f = fixtures::trend_fixture(3, 4, 2);
  save_annotated(f.train, dir / "a.jsonl", "abc");
  CHECK(load_annotated(dir / "a.jsonl") == f.train);
}

TEST_CASE("schema errors name the line and field") {
  const auto dir = temp_dir("schema");
  const auto ex = fixtures::extraction_fixture();
  auto j = io::to_json(ex.trajectories[0]);
  auto bad = j;
  bad["steps"][1]["action"].erase("kind");
  write_file(dir / "a.jsonl", "\n" + j.dump() + "\n" + bad.dump() + "\n");
  try {
    load_trajectories(dir / "a.jsonl");
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.line() == 3);
    CHECK(e.field() == "steps[1].action.kind");
  }

  auto wrong_schema = j;
  wrong_schema["schema"] = "other/v0";
  write_file(dir / "b.jsonl", wrong_schema.dump() + "\n");
  CHECK_THROWS_AS(load_trajectories(dir / "b.jsonl"), SchemaError);

  write_file(dir / "c.jsonl", "{not json\n");
  CHECK_THROWS_AS(load_trajectories(dir / "c.jsonl"), SchemaError);

  auto not_in_gt = j;
  not_in_gt["steps"][0]["gt_element_ids"] = nlohmann::json::array({"nope"});
  write_file(dir / "d.jsonl", not_in_gt.dump() + "\n");
  CHECK_THROWS_AS(load_trajectories(dir / "d.jsonl"), SchemaError);

  CHECK_THROWS_AS(load_trajectories(dir / "missing.jsonl"), DataError);
}

TEST_CASE("1,009 tasks load as 1,009 trajectories") {
  const auto dir = temp_dir("many");
  const auto ex = fixtures::extraction_fixture();
  std::vector<Trajectory> many;
  for (int i = 0; i < 1009; ++i) {
    Trajectory t = ex.trajectories[static_cast<std::size_t>(i) % ex.trajectories.size()];
    t.task_id = "task" + std::to_string(i);
    many.push_back(std::move(t));
  }
  save_trajectories(many, dir / "train.jsonl");
  CHECK(load_trajectories(dir / "train.jsonl").size() == 1009);
}

TEST_CASE("prompt assets: built-in texts and directory overrides") {
  const auto& a = PromptAssets::builtin();
  CHECK(a.extractor_examples.size() == 3);
  CHECK(a.policy_examples.size() == 2);
  CHECK(a.extractor_query.find("{previous_intents}") != std::string::npos);
  CHECK(a.policy_query.find("{intent_section}") != std::string::npos);
  CHECK(a.extractor_system.find('#') != 0);

  const auto dir = temp_dir("assets");
  write_file(dir / "policy_system.txt", "# comment\nYou act.\n");
  const auto b = PromptAssets::load(dir);
  CHECK(b.policy_system == "You act.");
  CHECK(b.extractor_query == a.extractor_query);

  CHECK(parse_examples("[input]\nx\n[output]\ny\n=====\n[input]\nz\n[output]\nw\n").size() == 2);
  CHECK_THROWS_AS(parse_examples("[input]\nx\n"), ConfigError);
}
