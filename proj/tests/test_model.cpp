#include <gtest/gtest.h>

#include <regex>

#include "bdead/eval.hpp"
#include "bdead/machine.hpp"
#include "testing.hpp"

using namespace bdead;
namespace fixture = bdead::fixture;
using bdead::fixture::load;
using bdead::fixture::machine;
using bdead::fixture::pred;
using model::Value;

namespace {

model::EvalContext ctx_of(const model::TypedMachine& m, std::int64_t maxint = 7) { return {m->sorts, maxint}; }

Value ints(std::initializer_list<int> xs) {
  std::vector<Value> v;
  for (int x : xs) v.push_back(Value::integer(x));
  return Value::set(std::move(v));
}

}  // namespace

TEST(Parse, MinSetStructure) {
  const auto m = model::parse_machine(fixture::read_text(fixture::model_path("minset_v1")));
  EXPECT_EQ(m.name, "MinSet");
  EXPECT_EQ(m.constants.size(), 1u);
  EXPECT_EQ(m.variables.size(), 3u);
  ASSERT_EQ(m.events.size(), 3u);
  EXPECT_EQ(m.events[0].name, "acc");
  EXPECT_EQ(m.events[0].params.size(), 1u);
  EXPECT_EQ(m.events[0].guards.size(), 3u);
  EXPECT_EQ(m.events[0].actions.size(), 2u);
  EXPECT_EQ(m.init.actions.size(), 3u);
}

TEST(Parse, MissingVariableListIsSyntaxError) {
  try {
    model::parse_machine("MACHINE M VARIABLES END");
    FAIL() << "expected a syntax error";
  } catch (const model::ParseError& e) {
    EXPECT_EQ(e.pos().line, 1);
    EXPECT_GT(e.pos().column, 1);
  }
}

TEST(Parse, SkipGivesEmptyActions) {
  const auto m = model::parse_machine("MACHINE M EVENTS e = WHEN 1=1 THEN skip END END");
  ASSERT_EQ(m.events.size(), 1u);
  ASSERT_EQ(m.events[0].guards.size(), 1u);
  EXPECT_EQ(model::to_string(m.events[0].guards[0]), "1 = 1");
  EXPECT_TRUE(m.events[0].actions.empty());
}

TEST(Parse, ErrorPositionsPointAtOffendingToken) {
  try {
    model::parse_machine("MACHINE M\nVARIABLES x\nINVARIANTS x : 0..3 &\nEND");
    FAIL();
  } catch (const model::ParseError& e) {
    EXPECT_EQ(e.pos().line, 4);
  }
}

TEST(Parse, DuplicateDeclarationRejected) {
  EXPECT_THROW(machine("MACHINE M VARIABLES x, x INVARIANTS x : 0..1 EVENTS INITIALISATION = BEGIN x := 0 END END"),
               model::InputError);
}

TEST(Typecheck, SubsetOfIntervalIsIntegerSet) {
  const auto m = load("minset_v1");
  const auto* s = m.find_decl("s");
  ASSERT_NE(s, nullptr);
  EXPECT_EQ(s->type, model::Ty::set_of(model::Ty::integer()));
  EXPECT_EQ(m.find_decl("min")->type, model::Ty::integer());
  EXPECT_EQ(m.find_decl("N")->type, model::Ty::set_of(model::Ty::integer()));
}

TEST(Typecheck, IntegerComparedWithSetIsTypeError) {
  EXPECT_THROW(machine("MACHINE M VARIABLES x INVARIANTS x < {1} EVENTS INITIALISATION = BEGIN x := 0 END END"),
               model::TypeError);
}

TEST(Typecheck, MembershipFixesBinderType) {
  const auto& m = fixture::scratch();
  const auto p = pred("#x.(x : s)", m);
  ASSERT_EQ(p->op, model::Op::Exists);
  EXPECT_EQ(p->binder_type, model::Ty::integer());
}

TEST(Typecheck, UnknownIdentifier) {
  EXPECT_THROW(pred("nope = 1", fixture::scratch()), model::TypeError);
}

TEST(Typecheck, ShadowingBinderIsRenamed) {
  const auto& m = fixture::scratch();
  const auto p = pred("#a.(a : s & a > 1)", m);
  ASSERT_EQ(p->op, model::Op::Exists);
  EXPECT_NE(p->name, "a");
  const auto q = pred("#x.(x : s & #x.(x : t & x > 1))", m);
  EXPECT_NE(q->name, q->args[0]->args[1]->name);
}

TEST(Typecheck, InitialisationMustAssignEveryVariable) {
  EXPECT_THROW(machine("MACHINE M VARIABLES x, y INVARIANTS x : 0..1 & y : 0..1 "
                       "EVENTS INITIALISATION = BEGIN x := 0 END END"),
               model::TypeError);
}

TEST(Typecheck, AxiomsMayNotMentionVariables) {
  EXPECT_THROW(machine("MACHINE M CONSTANTS k AXIOMS k = x VARIABLES x INVARIANTS x : 0..1 "
                       "EVENTS INITIALISATION = BEGIN x := 0 END END"),
               model::TypeError);
}

TEST(Typecheck, DuplicateAssignmentInOneEvent) {
  EXPECT_THROW(machine("MACHINE M VARIABLES x INVARIANTS x : 0..1 "
                       "EVENTS INITIALISATION = BEGIN x := 0 END ; e = BEGIN x := 1 || x := 0 END END"),
               model::TypeError);
}

TEST(EnablingPredicate, ParameterisedEvent) {
  const auto m = load("minset_v1");
  EXPECT_EQ(model::to_string(model::enabling_predicate(*m->find_event("acc"))), "#x:INT.(min : s & x : s & x < min)");
}

TEST(EnablingPredicate, BareGuard) {
  const auto m = load("minset_v1");
  EXPECT_EQ(model::to_string(model::enabling_predicate(*m->find_event("get"))), "s = {}");
}

TEST(EnablingPredicate, NoParametersNoGuards) {
  const auto m = machine("MACHINE M VARIABLES x INVARIANTS x : 0..1 "
                         "EVENTS INITIALISATION = BEGIN x := 0 END ; e = BEGIN x := 1 END END");
  EXPECT_EQ(model::enabling_predicate(*m->find_event("e"))->op, model::Op::True);
}

TEST(Eval, MembershipInEmptySet) {
  const auto m = load("minset_v1");
  const auto r = model::eval(pred("min : s", m), {{"min", Value::integer(0)}, {"s", ints({})}}, ctx_of(m));
  EXPECT_TRUE(model::is_false(r));
}

TEST(Eval, DivisionByZeroIsWd) {
  const auto& m = fixture::scratch();
  const auto r = model::eval(pred("a div b > 0", m), {{"a", Value::integer(1)}, {"b", Value::integer(0)}}, ctx_of(m));
  ASSERT_TRUE(model::is_wd(r));
  EXPECT_EQ(model::to_string(std::get<model::WdError>(r).where), "a div b > 0");
}

TEST(Eval, FalseConjunctMasksWdOnTheRight) {
  const auto& m = fixture::scratch();
  EXPECT_TRUE(model::is_false(model::eval(pred("FALSE & (1 div 0 = 1)", m), {}, ctx_of(m))));
  EXPECT_TRUE(model::is_wd(model::eval(pred("(1 div 0 = 1) & FALSE", m), {}, ctx_of(m))));
  EXPECT_TRUE(model::is_true(model::eval(pred("TRUE or (1 div 0 = 1)", m), {}, ctx_of(m))));
  EXPECT_TRUE(model::is_true(model::eval(pred("FALSE => (1 div 0 = 1)", m), {}, ctx_of(m))));
}

TEST(Eval, ModuloRequiresNaturalOperands) {
  const auto& m = fixture::scratch();
  EXPECT_TRUE(model::is_true(model::eval(pred("7 mod 3 = 1", m), {}, ctx_of(m))));
  EXPECT_TRUE(model::is_wd(model::eval(pred("7 mod 0 = 1", m), {}, ctx_of(m))));
  EXPECT_TRUE(model::is_wd(model::eval(pred("(0 - 7) mod 3 = 1", m), {}, ctx_of(m))));
}

TEST(Eval, DivisionTruncatesTowardZero) {
  const auto& m = fixture::scratch();
  EXPECT_TRUE(model::is_true(model::eval(pred("(0 - 7) div 2 = 0 - 3", m), {}, ctx_of(m))));
}

TEST(Eval, QuantifierOverIntegersUsesGlobalBounds) {
  const auto& m = fixture::scratch();
  EXPECT_TRUE(model::is_true(model::eval(pred("#x.(x > 6)", m), {}, ctx_of(m, 7))));
  EXPECT_TRUE(model::is_false(model::eval(pred("#x.(x > 7)", m), {}, ctx_of(m, 7))));
  EXPECT_TRUE(model::is_true(model::eval(pred("!x.(x : s => x < 4)", m), {{"s", ints({1, 3})}}, ctx_of(m))));
}

TEST(Eval, KleeneQuantifiers) {
  const auto& m = fixture::scratch();
  // a witness decides an existential even when other instances are undefined
  EXPECT_TRUE(model::is_true(model::eval(pred("#x.(x : 0..2 & 4 div x = 2)", m), {}, ctx_of(m))));
  EXPECT_TRUE(model::is_wd(model::eval(pred("#x.(x : 0..1 & 4 div x = 3)", m), {}, ctx_of(m))));
  EXPECT_TRUE(model::is_false(model::eval(pred("!x.(x : 0..2 => 4 div x = 4)", m), {}, ctx_of(m))));
}

TEST(Eval, SetOperators) {
  const auto& m = fixture::scratch();
  const model::Valuation v{{"s", ints({0, 1})}, {"t", ints({1, 2})}};
  for (const char* text : {"s \\/ t = {0, 1, 2}", "s /\\ t = {1}", "s \\ t = {0}", "card(s \\/ t) = 3",
                           "1..3 = {1, 2, 3}", "3..1 = {}", "s <: 0..1", "2 /: s"})
    EXPECT_TRUE(model::is_true(model::eval(pred(text, m), v, ctx_of(m)))) << text;
}

TEST(Eval, ExpressionValues) {
  const auto& m = fixture::scratch();
  const auto r = model::eval_expr(pred("a + 1 = 0", m)->args[0], {{"a", Value::integer(4)}}, ctx_of(m));
  EXPECT_EQ(std::get<Value>(r), Value::integer(5));
}

TEST(Eval, OverflowIsAnEvaluationError) {
  const auto& m = fixture::scratch();
  EXPECT_THROW(model::eval(pred("a * a * a * a = 0", m), {{"a", Value::integer(1'000'000'000)}}, ctx_of(m)),
               model::EvalError);
}

TEST(FreeVars, BoundIdentifiersExcluded) {
  const auto m = load("minset_v1");
  EXPECT_EQ(model::free_vars(pred("#x.(min : s & x : s & x < min)", m)), (std::set<std::string>{"min", "s"}));
  EXPECT_TRUE(model::free_vars(pred("TRUE", m)).empty());
  EXPECT_EQ(model::free_vars(pred("s = {} & z > 0", m)), (std::set<std::string>{"s", "z"}));
}

TEST(RoundTrip, PrintThenParseIsIdentityOnCorpus) {
  for (const auto& sub : {"corpus", "models"}) {
    for (const auto& entry : std::filesystem::directory_iterator(fixture::data_dir() / sub)) {
      if (entry.path().extension() != ".mch") continue;
      const auto m1 = model::parse_machine(fixture::read_text(entry.path()));
      const std::string printed = model::print_machine(m1);
      const auto m2 = model::parse_machine(printed);
      EXPECT_EQ(model::print_machine(m2), printed) << entry.path();
      ASSERT_EQ(m1.events.size(), m2.events.size());
      for (std::size_t i = 0; i < m1.events.size(); ++i)
        for (std::size_t j = 0; j < m1.events[i].guards.size(); ++j)
          EXPECT_TRUE(model::same(m1.events[i].guards[j], m2.events[i].guards[j])) << entry.path();
      for (std::size_t i = 0; i < m1.invariants.size(); ++i)
        EXPECT_TRUE(model::same(m1.invariants[i].pred, m2.invariants[i].pred)) << entry.path();
    }
  }
}

// Renaming binders must not change the meaning of a formula.
TEST(Property, EvalUnchangedByAlphaRenaming) {
  const auto& m = fixture::scratch();
  const auto ctx = ctx_of(m);
  fixture::RandomPred gen(11, true);
  int checked = 0;
  for (int i = 0; i < 300; ++i) {
    std::string text = gen.pred(2);
    if (std::regex_search(text, std::regex("\\ba\\b"))) continue;
    // binders named like globals force the renaming pass to act
    std::string clashing = text;
    for (std::size_t pos = 0; (pos = clashing.find('x', pos)) != std::string::npos; ++pos) clashing[pos] = 'a';
    model::Pred p, q;
    try {
      p = pred(text, m);
      q = pred(clashing, m);
    } catch (const model::InputError&) {
      continue;
    }
    if (model::free_vars(p) != model::free_vars(q)) continue;
    ++checked;
    fixture::for_each_valuation(m, model::free_vars(p), ctx, [&](const model::Valuation& v) {
      const auto a = model::eval(p, v, ctx);
      const auto b = model::eval(q, v, ctx);
      ASSERT_EQ(model::is_wd(a), model::is_wd(b)) << text;
      if (!model::is_wd(a)) ASSERT_EQ(std::get<bool>(a), std::get<bool>(b)) << text;
    });
  }
  EXPECT_GT(checked, 50);
}

// An enabling predicate holds iff some parameter value satisfies the guards.
TEST(Property, EnablingPredicateMatchesParameterSearch) {
  const auto& m = fixture::scratch();
  const auto ctx = ctx_of(m);
  for (unsigned seed = 0; seed < 60; ++seed) {
    const auto rm = model::typecheck(model::parse_machine(fixture::random_machine(seed)));
    for (const auto& e : rm->events) {
      if (e.params.empty()) continue;
      const auto g = model::enabling_predicate(e);
      const auto guard = model::ast::conj(e.guards);
      std::set<std::string> names;
      for (const auto& d : rm.scope()) names.insert(d.name);
      fixture::for_each_valuation(rm, names, ctx, [&](const model::Valuation& v) {
        bool any = false;
        for (int p = -7; p <= 7; ++p) {
          auto w = v;
          w[e.params[0].name] = Value::integer(p);
          any |= model::is_true(model::eval(guard, w, ctx));
        }
        const auto r = model::eval(g, v, ctx);
        if (!model::is_wd(r)) ASSERT_EQ(std::get<bool>(r), any) << fixture::random_machine(seed);
      });
    }
  }
}
