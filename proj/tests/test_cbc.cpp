#include <gtest/gtest.h>

#include "bdead/cbc.hpp"
#include "testing.hpp"

using namespace bdead;
namespace fixture = bdead::fixture;
using cbc::CheckOptions;
using cbc::Verdict;
using fixture::load;
using fixture::pred;
using model::Value;

namespace {

std::vector<std::string> event_names(const model::TypedMachine& m) {
  std::vector<std::string> out;
  for (const auto& e : m->events) out.push_back(e.name);
  return out;
}

// The reported state satisfies the axioms, invariants and goal and disables every event.
void expect_valid_deadlock(const model::TypedMachine& m, const cbc::CbcResult& r, const CheckOptions& opts = {}) {
  const model::EvalContext ctx{m->sorts, opts.maxint};
  ASSERT_TRUE(model::is_true(model::eval(cbc::build_ai(m, opts), r.state, ctx)))
      << model::format_valuation(r.state, m->sorts);
  for (const auto& e : m->events)
    EXPECT_TRUE(model::is_false(model::eval(model::enabling_predicate(e), r.state, ctx))) << e.name;
}

std::set<std::string> names_of(const std::vector<model::Pred>& conjuncts, const cbc::Component& c) {
  std::set<std::string> out;
  for (auto i : c.conjuncts)
    for (const auto& n : model::free_vars(conjuncts[i])) out.insert(n);
  return out;
}

}  // namespace

TEST(CheckDeadlock, MinSetOriginal) {
  const auto m = load("minset_v1");
  const auto r = cbc::check_deadlock(m);
  ASSERT_EQ(r.verdict, Verdict::DeadlockFound);
  expect_valid_deadlock(m, r);
  EXPECT_EQ(r.state.size(), 4u);
}

TEST(CheckDeadlock, MinSetCorrectedGuard) {
  const auto m = load("minset_v2");
  const auto r = cbc::check_deadlock(m);
  ASSERT_EQ(r.verdict, Verdict::DeadlockFound);
  expect_valid_deadlock(m, r);
  EXPECT_EQ(r.state.at("s"), Value::set({}));
}

TEST(CheckDeadlock, MinSetWithInvariant) {
  const auto r = cbc::check_deadlock(load("minset_v3"));
  EXPECT_EQ(r.verdict, Verdict::NoDeadlock);
  EXPECT_FALSE(r.bounds_qualified);
}

TEST(CheckDeadlock, GoalRestrictsStates) {
  const auto m = load("minset_v2");
  CheckOptions opts;
  opts.goal = pred("min : s", m);
  EXPECT_EQ(cbc::check_deadlock(m, opts).verdict, Verdict::NoDeadlock);
  opts.goal = pred("z = 2", m);
  const auto r = cbc::check_deadlock(m, opts);
  ASSERT_EQ(r.verdict, Verdict::DeadlockFound);
  EXPECT_EQ(r.state.at("z"), Value::integer(2));
  expect_valid_deadlock(m, r, opts);
}

TEST(CheckDeadlock, EventsOfInterest) {
  const auto m = load("minset_v3");
  CheckOptions opts;
  opts.events = std::vector<std::string>{"get"};
  const auto r = cbc::check_deadlock(m, opts);
  ASSERT_EQ(r.verdict, Verdict::DeadlockFound);
  EXPECT_EQ(r.considered, std::vector<std::string>{"get"});
  EXPECT_TRUE(model::is_false(model::eval(model::enabling_predicate(*m->find_event("get")), r.state, {m->sorts})));
}

TEST(CheckDeadlock, WdGuardIsReported) {
  const auto m = load("wd");
  const auto r = cbc::check_deadlock(m);
  EXPECT_EQ(r.verdict, Verdict::Unknown);
  ASSERT_TRUE(r.wd.has_value());
  EXPECT_EQ(model::to_string(r.wd->where), "x div y >= 0");
}

TEST(CheckDeadlock, NoEventsMeansEveryStateDeadlocks) {
  const auto m = fixture::machine(
      "MACHINE M VARIABLES x INVARIANTS x : 2..3 EVENTS INITIALISATION = BEGIN x := 2 END END");
  const auto r = cbc::check_deadlock(m);
  ASSERT_EQ(r.verdict, Verdict::DeadlockFound);
  EXPECT_TRUE(r.state.at("x") == Value::integer(2) || r.state.at("x") == Value::integer(3));
  EXPECT_EQ(model::to_string(cbc::build_dln(m, cbc::build_ai(m, {}), {}, {})), "x : 2..3");
}

TEST(CheckDeadlock, UnboundedIntegersQualifyTheVerdict) {
  const auto m = fixture::machine(
      "MACHINE M VARIABLES x INVARIANTS x : INT EVENTS INITIALISATION = BEGIN x := 0 END ; "
      "up = WHEN x < 5 THEN x := x + 1 END ; down = WHEN x >= 5 THEN x := 0 END END");
  const auto r = cbc::check_deadlock(m);
  EXPECT_EQ(r.verdict, Verdict::NoDeadlock);
}

TEST(CheckDeadlock, Queens) {
  const auto r = cbc::check_deadlock(load("queens8"));
  ASSERT_EQ(r.verdict, Verdict::DeadlockFound);
  expect_valid_deadlock(load("queens8"), r);
}

TEST(BuildDln, CorrectedMinSet) {
  const auto m = load("minset_v2");
  CheckOptions opts;
  opts.sort = false;
  const auto ai = cbc::build_ai(m, opts);
  const auto dln = cbc::build_dln(m, ai, event_names(m), opts);
  EXPECT_EQ(model::to_string(dln),
            "N <: 0..3 & N /= {} & s <: 0..3 & min : 0..3 & z : 0..4 & "
            "not(min : s & #x:INT.(x : s & x < min)) & not(min : s & #x:INT.(x : s & x > min)) & not(s = {min})");
}

TEST(BuildDln, GoalJoinsAi) {
  const auto m = load("minset_v2");
  CheckOptions opts;
  opts.goal = pred("min : s", m);
  EXPECT_EQ(model::conjuncts(cbc::build_ai(m, opts)).back()->op, model::Op::In);
}

TEST(FilterEvents, GoalDisablesEvents) {
  const auto m = load("counter");
  CheckOptions opts;
  opts.goal = pred("Counter = 10", m);
  const auto ai = cbc::build_ai(m, opts);
  EXPECT_EQ(cbc::filter_events(m, ai, event_names(m), opts), std::vector<std::string>{"restart"});
}

TEST(FilterEvents, SatisfiableGuardSurvives) {
  const auto m = load("minset_v1");
  const auto ai = cbc::build_ai(m, {});
  EXPECT_EQ(cbc::filter_events(m, ai, event_names(m), {}), event_names(m));
}

TEST(FilterEvents, FalseGuardDropped) {
  const auto m = fixture::machine(
      "MACHINE M VARIABLES x INVARIANTS x : 0..3 EVENTS INITIALISATION = BEGIN x := 0 END ; "
      "never = WHEN FALSE THEN x := 1 END ; always = WHEN TRUE THEN x := 2 END END");
  EXPECT_EQ(cbc::filter_events(m, cbc::build_ai(m, {}), event_names(m), {}), std::vector<std::string>{"always"});
}

TEST(FilterEvents, DroppedEventsRecordedAndVerdictUnchanged) {
  const auto m = load("counter");
  CheckOptions opts;
  opts.goal = pred("Counter = 10", m);
  const auto filtered = cbc::check_deadlock(m, opts);
  opts.filter = false;
  const auto unfiltered = cbc::check_deadlock(m, opts);
  EXPECT_EQ(filtered.dropped, (std::vector<std::string>{"inc", "mark"}));
  EXPECT_TRUE(unfiltered.dropped.empty());
  ASSERT_EQ(filtered.verdict, Verdict::DeadlockFound);
  EXPECT_EQ(unfiltered.verdict, filtered.verdict);
  EXPECT_EQ(filtered.state.at("Counter"), Value::integer(10));
  EXPECT_EQ(filtered.state.at("flag"), Value::boolean(true));
  for (const auto& g : filtered.guards) EXPECT_FALSE(g.enabled) << g.event;
}

TEST(SortConjuncts, FrequentAtomsFirst) {
  const auto& m = fixture::scratch();
  const auto p = pred("not(b > 0 & a > 0) & not(f = TRUE & a > 0)", m);
  EXPECT_EQ(model::to_string(cbc::sort_conjuncts(p)), "not(a > 0 & b > 0) & not(a > 0 & f = TRUE)");
}

TEST(SortConjuncts, SingleGuardUnchanged) {
  const auto& m = fixture::scratch();
  const auto p = pred("not(b > 0 & a > 0)", m);
  EXPECT_TRUE(model::same(cbc::sort_conjuncts(p), p));
}

TEST(SortConjuncts, SharedAtomLeadsInMinSet) {
  const auto m = load("minset_v2");
  const auto dln = cbc::build_dln(m, model::ast::truth(true), event_names(m), {});
  for (const auto& c : model::conjuncts(dln)) {
    ASSERT_EQ(c->op, model::Op::Not);
    if (c->args[0]->op == model::Op::And) EXPECT_EQ(model::to_string(c->args[0]->args[0]), "min : s");
  }
}

TEST(SortConjuncts, PreservesMeaning) {
  const auto& m = fixture::scratch();
  const model::EvalContext ctx{m->sorts, 7};
  for (unsigned seed = 0; seed < 200; ++seed) {
    fixture::RandomPred gen(seed);
    std::string text;
    for (int i = 0; i < 3; ++i) text += (i ? " & not(" : "not(") + gen.pred(1) + " & " + gen.pred(1) + " & " + gen.atom() + ")";
    model::Pred p;
    try {
      p = pred(text, m);
    } catch (const model::InputError&) {
      continue;
    }
    const auto q = cbc::sort_conjuncts(p);
    fixture::for_each_valuation(m, model::free_vars(p), ctx, [&](const model::Valuation& v) {
      const auto a = model::eval(p, v, ctx), b = model::eval(q, v, ctx);
      ASSERT_EQ(model::is_wd(a), model::is_wd(b));
      if (!model::is_wd(a)) ASSERT_EQ(std::get<bool>(a), std::get<bool>(b)) << text;
    });
  }
}

TEST(Components, MinSetIsolatesZ) {
  const auto m = load("minset_v1");
  CheckOptions opts;
  opts.drop_irrelevant = false;
  const auto r = cbc::check_deadlock(m, opts);
  const auto conjuncts = model::conjuncts(r.dln);
  ASSERT_EQ(r.components.size(), 3u);
  EXPECT_FALSE(r.components[0].relevant);
  EXPECT_EQ(names_of(conjuncts, r.components[0]), std::set<std::string>{"N"});
  EXPECT_TRUE(r.components[1].relevant);
  EXPECT_EQ(names_of(conjuncts, r.components[1]), (std::set<std::string>{"min", "s"}));
  EXPECT_FALSE(r.components[2].relevant);
  EXPECT_EQ(names_of(conjuncts, r.components[2]), std::set<std::string>{"z"});
  EXPECT_EQ(model::to_string(r.components[2].pred), "z : 0..4");
}

TEST(Components, DroppingIrrelevantKeepsVerdictAndFillsState) {
  const auto m = load("minset_v1");
  const auto dropped = cbc::check_deadlock(m);
  CheckOptions opts;
  opts.drop_irrelevant = false;
  const auto kept = cbc::check_deadlock(m, opts);
  EXPECT_EQ(dropped.verdict, kept.verdict);
  ASSERT_TRUE(dropped.state.contains("z"));
  expect_valid_deadlock(m, dropped);
}

TEST(Components, FullyConnected) {
  const auto& m = fixture::scratch();
  const std::vector<model::Pred> cs = {pred("a > 0", m), pred("a < b", m), pred("b : s", m)};
  const auto comps = cbc::components(cs, {false, true, false});
  ASSERT_EQ(comps.size(), 1u);
  EXPECT_EQ(comps[0].conjuncts, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_TRUE(comps[0].relevant);
}

TEST(Components, IndependentVariables) {
  const auto& m = fixture::scratch();
  const std::vector<model::Pred> cs = {pred("a > 0", m), pred("b > 0", m), pred("not(a > 2)", m)};
  const auto comps = cbc::components(cs, {false, false, true});
  ASSERT_EQ(comps.size(), 2u);
  EXPECT_EQ(comps[0].conjuncts, (std::vector<std::size_t>{0, 2}));
  EXPECT_TRUE(comps[0].relevant);
  EXPECT_EQ(comps[1].conjuncts, std::vector<std::size_t>{1});
  EXPECT_FALSE(comps[1].relevant);
}

TEST(GuardTable, ReportsFalsifiedConjunct) {
  const auto m = load("minset_v1");
  const model::Valuation v{{"N", Value::set({Value::integer(3)})},
                           {"s", Value::set({Value::integer(3)})},
                           {"min", Value::integer(3)},
                           {"z", Value::integer(4)}};
  const auto table = cbc::guard_table(m, event_names(m), v, 1023);
  ASSERT_EQ(table.size(), 3u);
  for (const auto& g : table) EXPECT_FALSE(g.enabled) << g.event;
  ASSERT_TRUE(table[2].falsified.has_value());
  EXPECT_EQ(model::to_string(*table[2].falsified), "s = {}");
}

TEST(Toggles, VerdictsStableOnCorpus) {
  for (const auto& entry : std::filesystem::directory_iterator(fixture::data_dir() / "corpus")) {
    const auto m = model::typecheck(model::parse_machine(fixture::read_text(entry.path())));
    const auto base = cbc::check_deadlock(m).verdict;
    for (int toggle = 0; toggle < 5; ++toggle) {
      CheckOptions opts;
      opts.filter = toggle != 0;
      opts.simplify = toggle != 1;
      opts.sort = toggle != 2;
      opts.partition = toggle != 3;
      opts.drop_irrelevant = toggle != 4;
      const auto r = cbc::check_deadlock(m, opts);
      EXPECT_EQ(r.verdict, base) << entry.path().filename() << " toggle " << toggle;
      if (r.verdict == Verdict::DeadlockFound) expect_valid_deadlock(m, r, opts);
    }
  }
}

namespace {

struct BruteResult {
  bool deadlock = false;
  bool wd = false;
};

BruteResult brute_force(const model::TypedMachine& m, const model::EvalContext& ctx) {
  std::set<std::string> names;
  for (const auto& d : m.scope()) names.insert(d.name);
  const auto ai = cbc::build_ai(m, {});
  BruteResult out;
  fixture::for_each_valuation(m, names, ctx, [&](const model::Valuation& v) {
    if (out.deadlock) return;
    const auto inv = model::eval(ai, v, ctx);
    if (model::is_wd(inv)) out.wd = true;
    if (!model::is_true(inv)) return;
    bool enabled = false;
    for (const auto& e : m->events) {
      const auto g = model::eval(model::enabling_predicate(e), v, ctx);
      if (model::is_wd(g)) out.wd = true;
      enabled |= model::is_true(g);
    }
    if (!enabled) out.deadlock = true;
  });
  return out;
}

}  // namespace

TEST(Property, AgreesWithBruteForceOnRandomMachines) {
  CheckOptions opts;
  opts.maxint = 7;
  int deadlocks = 0, total = 0;
  for (unsigned seed = 0; seed < 600; ++seed) {
    const std::string text = fixture::random_machine(seed);
    const auto m = fixture::machine(text);
    const model::EvalContext ctx{m->sorts, opts.maxint};
    const auto expected = brute_force(m, ctx);
    const auto r = cbc::check_deadlock(m, opts);
    ++total;
    if (expected.wd) continue;
    ASSERT_NE(r.verdict, Verdict::Unknown) << text << r.reason;
    ASSERT_EQ(r.verdict == Verdict::DeadlockFound, expected.deadlock) << text;
    if (r.verdict == Verdict::DeadlockFound) {
      ++deadlocks;
      expect_valid_deadlock(m, r, opts);
    }
  }
  EXPECT_GT(deadlocks, 50);
  EXPECT_LT(deadlocks, total - 50);
}

// Partitioning never changes a verdict and never invalidates a reported state.
TEST(Property, PartitioningPreservesVerdicts) {
  CheckOptions with, without;
  with.maxint = without.maxint = 7;
  without.partition = false;
  for (unsigned seed = 1000; seed < 1150; ++seed) {
    const auto m = fixture::machine(fixture::random_machine(seed));
    EXPECT_EQ(cbc::check_deadlock(m, with).verdict, cbc::check_deadlock(m, without).verdict) << seed;
  }
}
