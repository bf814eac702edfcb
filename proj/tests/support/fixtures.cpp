#include "fixtures.hpp"

#include <algorithm>
#include <json.hpp>

#include "autointent/eval/metrics.hpp"
#include "autointent/trajectory_io.hpp"

namespace fixtures {

Element el(std::string id, std::string tag, std::string text, double score) {
  return Element{std::move(id), std::move(tag), std::move(text), {}, score};
}

Action click(std::string id) { return Action{ActionKind::Click, std::move(id), ""}; }
Action type(std::string id, std::string value) { return Action{ActionKind::Type, std::move(id), std::move(value)}; }
Action select(std::string id, std::string value) {
  return Action{ActionKind::Select, std::move(id), std::move(value)};
}

Intent intent(std::string_view text) { return parse_canonical_intent(text); }

Step make_step(std::string task, int index, std::vector<Element> candidates, Action action,
               std::set<std::string> extra_gt) {
  sort_candidates(candidates);
  Step s{Observation{std::move(task), index, std::move(candidates), std::nullopt}, std::move(action), {}};
  s.gt_element_ids = std::move(extra_gt);
  s.gt_element_ids.insert(s.action.element_id);
  return s;
}

AnnotatedTrajectory annotate(const Trajectory& t, const std::vector<std::string>& intents) {
  AnnotatedTrajectory a{t.task_id, {}, t.split_tag};
  for (std::size_t i = 0; i < t.steps.size(); ++i) a.steps.push_back({t.steps[i], intent(intents.at(i))});
  return a;
}

StepOutcome outcome(const Step& gt, std::optional<Action> predicted) {
  StepOutcome o;
  o.gt = gt;
  o.predicted = std::move(predicted);
  eval::score(o);
  return o;
}

eval::OutcomesByTask metric_fixture() {
  const std::vector<Element> page{el("1", "button", "Search", 0.9), el("2", "input", "From", 0.8),
                                  el("3", "select", "Class", 0.7), el("4", "a", "Deals", 0.6),
                                  el("5", "button", "Search flights", 0.5)};
  eval::OutcomesByTask out;

  // Task A, 4 steps.
  {
    auto& a = out["task-a"];
    const Step s1 = make_step("A", 1, page, click("1"));
    const Step s2 = make_step("A", 2, page, type("2", "San Francisco"));
    const Step s3 = make_step("A", 3, page, select("3", "economy"));
    const Step s4 = make_step("A", 4, page, click("5"), {"1"});  // either search button counts
    a.push_back(outcome(s1, click("1")));                         // success
    a.push_back(outcome(s2, type("2", "san diego")));             // element ok, F1 2/3
    a.push_back(outcome(s3, select("3", " Economy ")));           // success after trim/lowercase
    a.push_back(outcome(s4, click("1")));                         // second gt element: success
  }
  // Task B, 6 steps.
  {
    auto& b = out["task-b"];
    const Step s1 = make_step("B", 1, page, click("4"));
    const Step s2 = make_step("B", 2, page, type("2", "new york city"));
    const Step s3 = make_step("B", 3, page, select("3", "business"));
    const Step s4 = make_step("B", 4, page, click("1"));
    const Step s5 = make_step("B", 5, page, type("2", "boston"), {"5"});
    const Step s6 = make_step("B", 6, page, click("5"));
    b.push_back(outcome(s1, click("1")));                   // wrong element, F1 1
    b.push_back(outcome(s2, type("2", "new york")));        // element ok, F1 0.857142...
    b.push_back(outcome(s3, click("3")));                   // element ok, F1 0
    b.push_back(outcome(s4, std::nullopt));                 // unparseable: all zero
    b.push_back(outcome(s5, type("5", "boston")));          // second gt element: success
    b.push_back(outcome(s6, type("4", "boston")));          // wrong, F1 0
  }
  // Task C, 3 steps.
  {
    auto& c = out["task-c"];
    const Step s1 = make_step("C", 1, page, select("3", "first class"));
    const Step s2 = make_step("C", 2, page, click("5"));
    const Step s3 = make_step("C", 3, page, type("2", "la"));
    c.push_back(outcome(s1, select("3", "first class")));  // success
    c.push_back(outcome(s2, click("5")));                  // success
    c.push_back(outcome(s3, type("2", "los angeles")));    // element ok, F1 0.4
  }
  return out;
}

// ---- trend fixture ----

namespace {

struct StepSpec {
  std::string intent;
  ActionKind kind;
  std::string tag;
  std::string text;
  std::string value_key;  // "" for CLICK
};

struct TaskSpec {
  std::string site;
  std::string task;  // with {placeholders}
  std::vector<StepSpec> head;
  std::vector<StepSpec> shuffled;  // emitted in random order
  std::vector<StepSpec> tail;
};

const std::vector<std::string> kRestaurants{"sushi zen", "olive garden", "blue hill", "nopa", "state bird",
                                            "tartine", "zuni cafe", "aster"};
const std::vector<std::string> kCities{"boston", "chicago", "seattle", "austin", "denver",
                                       "miami", "portland", "atlanta", "phoenix", "dallas"};
const std::vector<std::string> kTimes{"7 pm", "8 pm", "6 pm", "9 pm"};
const std::vector<std::string> kParty{"2 people", "3 people", "4 people", "6 people"};
const std::vector<std::string> kCars{"suv", "compact", "minivan", "convertible"};
const std::vector<std::string> kCabins{"economy", "premium economy", "business"};

const std::vector<std::pair<std::string, std::string>> kDistractors{
    {"a", "Sign in"},      {"a", "Help"},          {"button", "Deals"},     {"a", "Gift cards"},
    {"div", "Careers"},    {"a", "About us"},      {"button", "Menu"},      {"span", "Language"},
    {"a", "Privacy"},      {"button", "Share"},    {"a", "Blog"},           {"div", "Newsletter"},
    {"a", "Contact"},      {"button", "Close"},    {"span", "Currency"},    {"a", "Download app"},
    {"div", "Reviews"},    {"a", "Terms"},         {"button", "Favorites"}, {"a", "Accessibility"},
    {"span", "Rewards"},   {"a", "Press"},         {"button", "Filter"},    {"div", "Map view"}};

const std::vector<TaskSpec>& task_specs() {
  static const std::vector<TaskSpec> specs{
      {"opentable",
       "Book a table at {rest} in {city} for {party}",
       {{"searching restaurant", ActionKind::Type, "input", "Search restaurants", "rest"}},
       {{"selecting date", ActionKind::Click, "button", "Date", ""},
        {"choosing party size", ActionKind::Select, "select", "Party size", "party"}},
       {{"confirming reservation", ActionKind::Click, "button", "Reserve now", ""}}},
      {"resy",
       "Find a dinner spot in {city} at {time}",
       {{"entering city", ActionKind::Type, "input", "Location", "city"},
        {"selecting time", ActionKind::Select, "select", "Time", "time"},
        {"searching restaurants", ActionKind::Click, "button", "Search", ""}},
       {},
       {{"opening first result", ActionKind::Click, "a", "Top result", ""}}},
      {"expedia",
       "Book a flight from {city} to {city2} in {cabin}",
       {{"entering departure city", ActionKind::Type, "input", "Leaving from", "city"},
        {"entering arrival city", ActionKind::Type, "input", "Going to", "city2"}},
       {{"selecting date", ActionKind::Click, "button", "Departing", ""},
        {"choosing cabin class", ActionKind::Select, "select", "Cabin", "cabin"}},
       {{"searching flights", ActionKind::Click, "button", "Search flights", ""}}},
      {"budget",
       "Rent a {car} in {city}",
       {{"entering pickup location", ActionKind::Type, "input", "Pick-up location", "city"},
        {"choosing car type", ActionKind::Select, "select", "Vehicle type", "car"},
        {"searching cars", ActionKind::Click, "button", "Find cars", ""}},
       {},
       {}},
  };
  return specs;
}

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[rng.uniform_index(v.size())];
}

std::string fill(std::string s, const std::map<std::string, std::string>& values) {
  for (const auto& [k, v] : values) {
    const std::string key = "{" + k + "}";
    for (std::size_t at; (at = s.find(key)) != std::string::npos;) s.replace(at, key.size(), v);
  }
  return s;
}

AnnotatedTrajectory make_task(Rng& rng, const std::string& prefix, std::size_t index, SplitTag split,
                              double p_gt_top) {
  const TaskSpec& spec = task_specs()[index % task_specs().size()];
  std::map<std::string, std::string> values{{"rest", pick(rng, kRestaurants)}, {"city", pick(rng, kCities)},
                                            {"time", pick(rng, kTimes)},       {"party", pick(rng, kParty)},
                                            {"car", pick(rng, kCars)},         {"cabin", pick(rng, kCabins)}};
  do {
    values["city2"] = pick(rng, kCities);
  } while (values["city2"] == values["city"]);
  const std::string task = fill(spec.task, values) + " on " + spec.site;
  const std::string task_id = prefix + std::to_string(index);

  std::vector<StepSpec> steps = spec.head;
  std::vector<StepSpec> middle = spec.shuffled;
  rng.shuffle(middle);
  steps.insert(steps.end(), middle.begin(), middle.end());
  steps.insert(steps.end(), spec.tail.begin(), spec.tail.end());

  Trajectory t{task_id, {}, split};
  std::vector<std::string> intents;
  for (std::size_t s = 0; s < steps.size(); ++s) {
    const StepSpec& st = steps[s];
    const std::string base = task_id + "s" + std::to_string(s + 1) + "e";
    const std::size_t n = 10 + rng.uniform_index(11);  // 10..20 candidates
    std::vector<std::pair<std::string, std::string>> pool = kDistractors;
    rng.shuffle(pool);
    const std::size_t gt_pos = rng.uniform_unit() < p_gt_top ? 0 : 1 + rng.uniform_index(n - 1);
    // The page shows every control of the form, so the candidate texts do
    // not reveal which one is next.
    std::vector<std::pair<std::string, std::string>> others;
    for (const auto& o : steps)
      if (o.text != st.text) others.emplace_back(o.tag, o.text);
    rng.shuffle(others);
    pool.insert(pool.begin(), others.begin(), others.end());
    std::vector<Element> cands;
    std::size_t d = 0;
    for (std::size_t pos = 0; pos < n; ++pos) {
      const double score = 1.0 - 0.04 * static_cast<double>(pos);
      if (pos == gt_pos) {
        cands.push_back(el(base + std::to_string(pos), st.tag, st.text, score));
      } else {
        const auto& [tag, text] = pool[d++ % pool.size()];
        cands.push_back(el(base + std::to_string(pos), tag, text, score));
      }
    }
    const std::string gt_id = base + std::to_string(gt_pos);
    Action a{st.kind, gt_id, st.value_key.empty() ? "" : values.at(st.value_key)};
    t.steps.push_back(make_step(task, static_cast<int>(s + 1), cands, a));
    intents.push_back(st.intent);
  }
  return annotate(t, intents);
}

}  // namespace

TrendFixture trend_fixture(std::uint64_t seed, std::size_t n_train, std::size_t n_eval) {
  TrendFixture f;
  Rng rng(seed);
  for (std::size_t i = 0; i < n_train; ++i) f.train.push_back(make_task(rng, "train", i, SplitTag::Train, 0.3));
  for (std::size_t i = 0; i < n_eval; ++i) {
    const SplitTag split = i % 2 == 0 ? SplitTag::CrossTask : SplitTag::CrossWebsite;
    f.eval.push_back(make_task(rng, "eval", i, split, 0.3));
  }
  for (const auto& t : f.eval)
    for (const auto& s : t.steps) {
      const Element* e = s.step.observation.find(s.step.action.element_id);
      f.mappings.push_back({s.step.observation.task, s.intent.text(), render_action(s.step.action, e->tag)});
    }
  return f;
}

LocalPredictor trend_predictor(const TrendFixture& f, std::uint64_t seed) {
  return LocalPredictor::build(dataset::augment_all(f.train, seed));
}

// ---- extraction fixture ----

ExtractionFixture extraction_fixture() {
  ExtractionFixture f;
  struct Row {
    Action action;
    std::string tag;
    std::vector<std::string> greedy;   // replies in order
    std::vector<std::string> sampled;  // five paraphrases
    std::string expected;
  };
  const std::vector<std::pair<std::string, std::vector<Row>>> tasks{
      {"Find a sushi restaurant in Boston for two",
       {{type("x101", "sushi boston"), "input", {"searching sushi restaurant"},
         {"searching sushi restaurant", "searching restaurant", "entering search query", "typing restaurant name",
          "searching sushi"}, "searching sushi restaurant"},
        {click("x102"), "svg", {"searching availability"},
         {"searching availability", "checking availability", "opening availability", "viewing time slots",
          "finding open tables"}, "searching availability"},
        {select("x103", "2 guests"), "select", {"choosing party size"},
         {"choosing party size", "selecting guests", "setting party size", "picking guest count",
          "choosing guests"}, "choosing party size"}}},
      {"Book a one-way flight from Denver to Miami",
       {{click("x201"), "label", {"1. selecting one-way trip"},
         {"selecting one-way trip", "choosing trip type", "selecting one-way", "picking trip type",
          "setting one-way"}, "selecting one-way trip"},
        {type("x202", "denver"), "input",
         {"Intent: Entering the departure city name for the flight search", "entering departure city"},
         {"entering departure city", "typing origin", "setting departure", "entering origin city",
          "filling departure"}, "entering departure city"},
        {type("x203", "miami"), "input", {"Entering arrival city."},
         {"entering arrival city", "typing destination", "setting arrival", "entering destination",
          "filling arrival"}, "entering arrival city"},
        {click("x204"), "button", {"searching flights"},
         {"searching flights", "submitting search", "finding flights", "starting search", "looking up flights"},
         "searching flights"}}},
      {"Rent an SUV at Seattle airport next weekend",
       {{type("x301", "seattle airport"), "input", {"- entering pickup location"},
         {"entering pickup location", "typing pickup", "setting location", "entering airport",
          "choosing pickup"}, "entering pickup location"},
        {select("x302", "suv"), "select", {"choosing car type"},
         {"choosing car type", "selecting suv", "picking vehicle", "filtering car type", "choosing vehicle class"},
         "choosing car type"}}},
      {"Buy a pair of running shoes under 100 dollars",
       {{type("x401", "running shoes"), "input", {"searching running shoes"},
         {"searching running shoes", "typing product", "searching shoes", "entering query", "looking up shoes"},
         "searching running shoes"},
        {click("x402"), "span", {"filtering by price"},
         {"filtering by price", "setting price filter", "applying price", "limiting price", "choosing price range"},
         "filtering by price"},
        {click("x403"), "a", {"opening product page"},
         {"opening product page", "viewing product", "selecting shoe", "opening item", "choosing product"},
         "opening product page"},
        {select("x404", "10"), "select", {"choosing shoe size"},
         {"choosing shoe size", "selecting size", "setting size", "picking size ten", "choosing size"},
         "choosing shoe size"},
        {click("x405"), "button", {"adding to cart"},
         {"adding to cart", "putting in cart", "adding item", "saving to cart", "clicking add"},
         "adding to cart"}}},
      {"Check the status of train 2150 departing today",
       {{click("x501"), "a", {"opening train status"},
         {"opening train status", "viewing status page", "opening status", "checking train status",
          "going to status"}, "opening train status"},
        {type("x502", "2150"), "input", {"entering train number"},
         {"entering train number", "typing train id", "setting train number", "entering number",
          "filling train number"}, "entering train number"},
        {click("x503"), "button", {"checking status"},
         {"checking status", "submitting query", "viewing status", "getting status", "looking up status"},
         "checking status"}}},
  };

  int task_no = 0;
  for (const auto& [task, rows] : tasks) {
    ++task_no;
    Trajectory t{"ex" + std::to_string(task_no), {}, SplitTag::Train};
    std::vector<std::string> expected;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const Row& r = rows[i];
      std::vector<Element> cands{el(r.action.element_id, r.tag, "target", 0.9),
                                 el(r.action.element_id + "a", "a", "Help", 0.5 + 0.01 * static_cast<double>(i)),
                                 el(r.action.element_id + "b", "button", "Sign in", 0.4)};
      t.steps.push_back(make_step(task, static_cast<int>(i + 1), cands, r.action));
      const std::string match = "Action: " + render_action(r.action, r.tag);
      f.script.push_back({{llm::ScriptMatcher::Kind::Substring, match}, r.greedy});
      f.sampled_script.push_back({{llm::ScriptMatcher::Kind::Substring, match}, r.sampled});
      expected.push_back(r.expected);
    }
    f.expected[t.task_id] = expected;
    f.trajectories.push_back(std::move(t));
  }
  return f;
}

// ---- random corpora ----

RandomCorpus random_corpus(Rng& rng, std::size_t max_intents, std::size_t max_vocab) {
  RandomCorpus c;
  const std::size_t vocab = 2 + rng.uniform_index(max_vocab - 1);
  std::vector<std::string> words;
  for (std::size_t i = 0; i < vocab; ++i) words.push_back("w" + std::to_string(i));
  const std::vector<std::string> task_words{"book", "find", "rent", "buy", "check", "flight", "table",
                                            "car", "shoes", "train", "hotel", "cheap", "today", "boston"};
  const std::vector<std::string> tags{"button", "a", "input", "select", "div"};

  const std::size_t n_intents = 1 + rng.uniform_index(max_intents);
  std::set<Intent> pool;
  for (std::size_t guard = 0; pool.size() < n_intents && guard < n_intents * 20; ++guard) {
    std::vector<std::string> w;
    const std::size_t len = 1 + rng.uniform_index(3);
    for (std::size_t i = 0; i < len; ++i) w.push_back(pick(rng, words));
    pool.insert(Intent::from_words(w));
  }
  const std::vector<Intent> intents(pool.begin(), pool.end());

  auto random_context = [&]() {
    PredictionContext ctx;
    for (std::size_t i = 0, n = 2 + rng.uniform_index(4); i < n; ++i) {
      if (i) ctx.task += " ";
      ctx.task += pick(rng, task_words);
    }
    ctx.step_index = 1 + static_cast<int>(rng.uniform_index(4));
    for (int s = 1; s < ctx.step_index; ++s) {
      const auto kind = static_cast<ActionKind>(rng.uniform_index(3));
      ctx.action_history.push_back({kind, "e" + std::to_string(rng.uniform_index(9)),
                                    kind == ActionKind::Click ? "" : pick(rng, task_words)});
      ctx.intent_history.push_back(pick(rng, intents));
    }
    for (std::size_t i = 0, n = 1 + rng.uniform_index(6); i < n; ++i)
      ctx.candidate_view.push_back(el("e" + std::to_string(i), pick(rng, tags), pick(rng, task_words),
                                      1.0 - 0.1 * static_cast<double>(i)));
    return ctx;
  };

  const std::size_t n_samples = intents.size() + rng.uniform_index(2 * intents.size() + 1);
  for (std::size_t i = 0; i < n_samples; ++i) {
    c.contexts.push_back(random_context());
    c.targets.push_back(i < intents.size() ? intents[i] : pick(rng, intents));
  }
  for (int q = 0; q < 3; ++q) c.queries.push_back(random_context());
  c.queries.push_back(pick(rng, c.contexts));
  return c;
}

eval::OutcomesByTask random_outcomes(Rng& rng, std::size_t n_tasks, std::size_t max_steps) {
  const std::vector<Element> page{el("1", "button", "a", 0.9), el("2", "input", "b", 0.8),
                                  el("3", "select", "c", 0.7)};
  const std::vector<std::string> values{"", "x", "x y", "y"};
  auto random_action = [&]() {
    const auto kind = static_cast<ActionKind>(rng.uniform_index(3));
    return Action{kind, std::to_string(1 + rng.uniform_index(3)),
                  kind == ActionKind::Click ? "" : values[1 + rng.uniform_index(3)]};
  };
  eval::OutcomesByTask out;
  for (std::size_t t = 0; t < n_tasks; ++t) {
    auto& steps = out["task" + std::to_string(t)];
    for (std::size_t s = 0, n = 1 + rng.uniform_index(max_steps); s < n; ++s) {
      std::set<std::string> extra;
      if (rng.uniform_index(4) == 0) extra.insert(std::to_string(1 + rng.uniform_index(3)));
      const Step gt = make_step("T", static_cast<int>(s + 1), page, random_action(), extra);
      std::optional<Action> pred;
      if (rng.uniform_index(8) != 0) pred = rng.uniform_index(3) == 0 ? gt.action : random_action();
      steps.push_back(outcome(gt, pred));
    }
  }
  return out;
}

void write_fixture_files(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const ExtractionFixture ex = extraction_fixture();
  save_trajectories(ex.trajectories, dir / "raw.jsonl");
  std::vector<nlohmann::json> script;
  for (const auto& e : ex.script) script.push_back({{"match", e.matcher.pattern}, {"reply", e.replies}});
  io::write_records(dir / "script.jsonl", script);
  std::vector<nlohmann::json> sampled;
  for (const auto& e : ex.sampled_script) sampled.push_back({{"match", e.matcher.pattern}, {"reply", e.replies}});
  io::write_records(dir / "sampled_script.jsonl", sampled);

  const TrendFixture tf = trend_fixture();
  save_annotated(tf.train, dir / "train_annotated.jsonl");
  save_annotated(tf.eval, dir / "eval_annotated.jsonl");
  std::vector<nlohmann::json> hints;
  for (const auto& m : tf.mappings) hints.push_back({{"task", m.task}, {"intent", m.intent}, {"action", m.action}});
  io::write_records(dir / "hint_map.jsonl", hints);
}

}  // namespace fixtures
