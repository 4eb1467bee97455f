#include <doctest.h>

#include <algorithm>

#include "cau/corpus.hpp"
#include "cau/machine.hpp"
#include "cau/sigma.hpp"

using namespace cau;

namespace {

Term omega() {
  const Term w = lam(app(var(1), var(1)));
  return app(w, w);
}

std::vector<int> rules_of(const RunResult& r) {
  std::vector<int> out;
  for (const auto& [rule, c] : r.trace) out.push_back(rule);
  return out;
}

// Each transition either preserves the denotation up to στ or performs one
// principal contraction of it.
void check_sound(const Term& m, std::uint64_t fuel) {
  Config c = inject(m);
  for (std::uint64_t i = 0; i < fuel; ++i) {
    auto r = step(c);
    if (r.kind != StepResult::Kind::next) return;
    CHECK(validate(r.next).kind == Validity::Kind::term_config);
    CHECK(trails_normalized(r.next));
    const Term before = sigmatau_normalize(denote_config(c));
    const Term after = sigmatau_normalize(denote_config(r.next));
    if (before != after) {
      INFO("rule ", r.rule, ": ", show(before), " ~> ", show(after));
      const auto succ = cau_successors(before);
      const bool hit = std::any_of(succ.begin(), succ.end(),
                                   [&](const Term& s) { return sigmatau_normalize(s) == after; });
      CHECK(hit);
      CHECK((r.rule == 2 || r.rule == 5 || r.rule == 9));
    }
    c = r.next;
  }
}

}  // namespace

TEST_CASE("inject accepts closed pure terms only") {
  CHECK(inject(identity()).stack.size() == 1);
  CHECK_THROWS_AS(inject(var(1)), SyntaxError);
  CHECK_THROWS_AS(inject(annot(beta(), identity())), SyntaxError);
  CHECK_THROWS_AS(inject(erase(identity())), SyntaxError);
}

TEST_CASE("environments are 1-based and persistent") {
  const auto a = lam_closure(var(1), nullptr);
  const auto b = lam_closure(var(2), nullptr);
  const Env e1 = env_cons({refl(), a}, nullptr);
  const Env e2 = env_cons({refl(), b}, e1);
  CHECK(env_length(e2) == 2);
  CHECK(*env_lookup(e2, 1) == b);
  CHECK(*env_lookup(e2, 2) == a);
  CHECK_FALSE(env_lookup(e2, 3));
  CHECK_FALSE(env_lookup(e2, 0));
  CHECK(env_length(e1) == 1);
}

TEST_CASE("trails as open terms") {
  CHECK(trail_to_open_term(refl()) == var(1));
  CHECK(trail_to_open_term(beta()) == var(3));
  CHECK(trail_to_open_term(trans(beta(), ti())) == app(var(2), var(3), var(5)));
  CHECK(trail_to_open_term(app_t(refl(), beta_bang())) == app(var(7), var(1), var(4)));
  CHECK(trail_to_open_term(lam_t(refl())) == app(var(6), var(1)));
  CHECK_THROWS(trail_to_open_term(extract(var(1))));
}

TEST_CASE("identity applied to identity") {
  auto r = run(inject(app(identity(), identity())), 100);
  REQUIRE(r.outcome == RunResult::Outcome::final);
  CHECK(rules_of(r) == std::vector<int>{1, 3, 3, 2, 10});
  CHECK(r.value->trail == beta());
  CHECK(r.value->closure->kind == MachineClosure::Kind::lam);
  CHECK(r.value->closure->body == var(1));
  CHECK(env_length(r.value->closure->env) == 0);
  CHECK(sigmatau_normalize(denote_value(*r.value)) == annot(beta(), identity()));
}

TEST_CASE("divergence exhausts fuel") {
  auto r = run(inject(omega()), 50, false);
  CHECK(r.outcome == RunResult::Outcome::fuel_exhausted);
  CHECK(r.trace.empty());
}

TEST_CASE("stuck configurations") {
  SUBCASE("non-lambda application") {
    auto r = run(inject(app(bang(identity()), identity())), 100);
    CHECK(r.outcome == RunResult::Outcome::stuck);
    CHECK(r.reason == "non-lambda application");
  }
  SUBCASE("non-bang let definiens") {
    auto r = run(inject(let_bang(identity(), var(1))), 100);
    CHECK(r.outcome == RunResult::Outcome::stuck);
    CHECK(r.reason == "non-bang let definiens");
  }
  SUBCASE("inspection outside any bang") {
    Replacement<Term> br;
    br.fill(identity());
    auto r = run(inject(inspect(br)), 100);
    CHECK(r.outcome == RunResult::Outcome::stuck);
    CHECK(r.reason == "inspection-locked");
  }
}

TEST_CASE("let-bang binds the boxed value") {
  const Term m = let_bang(bang(identity()), app(var(1), var(1)));
  auto r = run(inject(m), 200);
  REQUIRE(r.outcome == RunResult::Outcome::final);
  CHECK(r.value->closure->kind == MachineClosure::Kind::lam);
  // bb, then the application of the bound identity
  CHECK(r.value->trail == trans(beta_bang(), beta()));
}

TEST_CASE("bang values carry their body's history") {
  const Term m = bang(app(identity(), identity()));
  auto r = run(inject(m), 200);
  REQUIRE(r.outcome == RunResult::Outcome::final);
  REQUIRE(r.value->closure->kind == MachineClosure::Kind::bang);
  CHECK(r.value->trail == refl());
  CHECK(r.value->closure->trail == beta());
  CHECK(sigmatau_normalize(denote_value(*r.value)) == bang(beta(), identity()));
}

TEST_CASE("inspection counts the contractions so far") {
  // !((λ1)(λ1) ; ι θ+): one β before the inspection, and the inspection
  // itself adds one ti after it.
  const Term body = app(lam(inspect(theta_plus())), identity());
  auto r = run(inject(bang(body)), 100000);
  REQUIRE(r.outcome == RunResult::Outcome::final);
  REQUIRE(r.value->closure->kind == MachineClosure::Kind::bang);
  // the inspected history is t(app(r,r),b) = one β, so the result is church 1
  const Term result = sigmatau_normalize(denote_closure(*r.value->closure->inner));
  const auto reduced = cau_normalize(result, 100000);
  REQUIRE(reduced.outcome == EvalResult::Outcome::value);
  const Term stripped = reduced.term.is(Kind::annot) ? reduced.term.term(1) : reduced.term;
  CHECK(stripped == church(1));
}

TEST_CASE("materialized inspection trails") {
  // an inspection at branch 9 directly under a bang node
  std::vector<Tuple> stack{{refl(), Code{CodeKind::bang_node, {}}, nullptr}};
  CHECK(materialize_inspection_trail(beta(), stack, {}) == beta());
  // under an application argument: t(q'', app(q_fun, q))
  const Value f{ti(), lam_closure(var(1), nullptr)};
  stack.push_back({beta_bang(), Code{CodeKind::app_node, {}}, nullptr});
  CHECK(materialize_inspection_trail(beta(), stack, {f}) == trans(beta_bang(), app_t(ti(), beta())));
  // no bang at all
  std::vector<Tuple> bare{{refl(), Code{CodeKind::let_node, var(1)}, nullptr}};
  CHECK_FALSE(materialize_inspection_trail(beta(), bare, {}));
}

TEST_CASE("validation") {
  const Config init = inject(app(identity(), identity()));
  CHECK(validate(init).kind == Validity::Kind::term_config);

  Config ctx{{{refl(), Code{CodeKind::bang_node, {}}, nullptr}}, {}};
  CHECK(validate(ctx).kind == Validity::Kind::context_config);
  auto d = denote_context(ctx);
  CHECK(d.plug(identity()) == annot(refl(), bang(identity())));

  Config open{{{refl(), Code{CodeKind::term, var(2)}, env_cons({refl(), lam_closure(var(1), nullptr)}, nullptr)}}, {}};
  CHECK(validate(open).kind == Validity::Kind::invalid);

  Config two{{}, {{refl(), lam_closure(var(1), nullptr)}, {refl(), lam_closure(var(1), nullptr)}}};
  CHECK(validate(two).kind == Validity::Kind::invalid);
  CHECK_THROWS(denote_config(two));
}

TEST_CASE("denotation of the initial configuration") {
  const Term m = app(identity(), identity());
  CHECK(sigmatau_normalize(denote_config(inject(m))) == m);
}

TEST_CASE("transitions are sound for the denotation") {
  check_sound(app(identity(), identity()), 50);
  check_sound(app(plus(), church(1), church(2)), 200);
  check_sound(let_bang(bang(identity()), app(var(1), var(1))), 50);
  check_sound(bang(app(lam(inspect(theta_plus())), identity())), 400);
  check_sound(app(pair_ctor(), bang(identity()), identity()), 100);
}
