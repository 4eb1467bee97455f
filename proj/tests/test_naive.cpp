#include <doctest.h>

#include "cau/corpus.hpp"
#include "cau/naive.hpp"

using namespace cau;

namespace {

Replacement<Term> numbered() {
  // distinct closed branches so slot mix-ups show
  Replacement<Term> r;
  for (std::uint32_t i = 0; i < kSlots; ++i) r[i] = church(i);
  return r;
}

Term inspect_numbered() { return inspect(numbered()); }

// Independent de Bruijn substitution: [N/1] with the textbook shift/subst pair.
Term shift_by(const Term& m, int d, std::uint32_t c) {
  switch (m.kind()) {
    case Kind::var: return m.index() > c ? var(static_cast<std::uint32_t>(static_cast<int>(m.index()) + d)) : m;
    case Kind::lam: return lam(shift_by(m.term(0), d, c + 1));
    case Kind::app: return app(shift_by(m.term(0), d, c), shift_by(m.term(1), d, c));
    default: FAIL("unexpected node"); return m;
  }
}
Term textbook_subst(const Term& m, std::uint32_t j, const Term& s) {
  switch (m.kind()) {
    case Kind::var: return m.index() == j ? s : m;
    case Kind::lam: return lam(textbook_subst(m.term(0), j + 1, shift_by(s, 1, 0)));
    case Kind::app: return app(textbook_subst(m.term(0), j, s), textbook_subst(m.term(1), j, s));
    default: FAIL("unexpected node"); return m;
  }
}
Term textbook_beta(const Term& body, const Term& arg) {
  return shift_by(textbook_subst(body, 1, shift_by(arg, 1, 0)), -1, 0);
}

}  // namespace

TEST_CASE("apply_replacement") {
  const auto th = numbered();
  CHECK(apply_replacement(refl(), th) == church(0));
  CHECK(apply_replacement(lam_t(beta()), th) == app(church(5), church(2)));
  CHECK(apply_replacement(trans(beta(), ti()), th) == app(church(1), church(2), church(4)));
  CHECK_THROWS_AS(apply_replacement(extract(var(1)), th), SyntaxError);
}

TEST_CASE("apply_replacement counts contractions with theta_plus") {
  const Trail q = trans(let_t(beta(), refl()), beta_bang());
  CHECK(apply_replacement(q, theta_plus()) == app(plus(), app(plus(), church(1), church(0)), church(1)));
}

TEST_CASE("meta_subst") {
  CHECK(meta_subst(var(1), 0, {church(2)}) == church(2));
  CHECK(meta_subst(lam(app(var(1), var(2))), 0, {church(0)}) == lam(app(var(1), church(0))));
  CHECK(meta_subst(annot(beta(), var(1)), 0, {var(5)}) == annot(beta(), var(5)));
  // open arguments are lifted under binders
  CHECK(meta_subst(lam(var(2)), 0, {var(1)}) == lam(var(2)));
  // indices past the vector are renumbered: n - k + p
  CHECK(meta_subst(var(3), 2, {church(0)}) == var(4));
  CHECK(meta_subst(let_bang(var(1), var(2)), 0, {var(7)}) == let_bang(var(7), var(8)));
  CHECK_THROWS_AS(meta_subst(closure(var(1), id()), 0, {var(1)}), SyntaxError);
}

TEST_CASE("meta_subst agrees with textbook beta on pure lambda terms") {
  const std::vector<Term> bodies = {var(1), var(2), lam(app(var(1), var(2))), lam(lam(app(var(3), app(var(4), var(1))))),
                                    app(var(1), lam(var(2)))};
  const std::vector<Term> args = {var(1), var(3), church(2), lam(var(2))};
  for (const auto& b : bodies)
    for (const auto& a : args) CHECK(meta_subst(b, 0, {a}) == textbook_beta(b, a));
}

TEST_CASE("tau steps and normal forms") {
  CHECK(*tau_step(annot(refl(), church(1))) == church(1));
  CHECK(*tau_step(bang(beta(), annot(beta(), var(1)))) == bang(trans(beta(), beta()), var(1)));
  CHECK(*tau_step(app_t(refl(), refl())) == refl());
  CHECK_FALSE(tau_step(church(2)).has_value());
  CHECK(tau_normalize(annot(refl(), var(1))) == var(1));
  CHECK(tau_normalize(lam(annot(beta(), var(1)))) == annot(lam_t(beta()), lam(var(1))));
  CHECK(tau_normalize(bang(refl(), annot(beta(), annot(beta(), var(1))))) == bang(trans(beta(), beta()), var(1)));
  const Trail fused = tau_normalize(trans(app_t(beta(), refl()), trans(app_t(refl(), beta()), ti())));
  CHECK(fused == trans(app_t(beta(), beta()), ti()));
}

TEST_CASE("principal redexes") {
  const auto rs = find_principal_redexes(app(lam(var(1)), church(0)));
  REQUIRE(rs.size() == 1);
  CHECK(rs[0].path.empty());
  CHECK(rs[0].kind == RedexKind::beta);
  CHECK(find_principal_redexes(inspect_numbered()).empty());
  const auto in_bang = find_principal_redexes(bang(beta(), inspect_numbered()));
  REQUIRE(in_bang.size() == 1);
  CHECK(in_bang[0].kind == RedexKind::inspect);
  CHECK(in_bang[0].path == TermPath{1});
  CHECK(in_bang[0].bang_path.empty());
  // nearest bang wins
  const auto nested = find_principal_redexes(bang(beta(), lam(bang(ti(), inspect_numbered()))));
  REQUIRE(nested.size() == 1);
  CHECK(nested[0].bang_path == TermPath{1, 0});
}

TEST_CASE("principal contractions") {
  const Term idt = lam(var(1));
  const Term m1 = app(idt, idt);
  CHECK(principal_contract(m1, find_principal_redexes(m1)[0]) == annot(beta(), idt));
  const Term m2 = let_bang(bang(beta(), church(2)), var(1));
  CHECK(principal_contract(m2, find_principal_redexes(m2)[0]) == annot(beta_bang(), annot(beta(), church(2))));
  const Term m3 = bang(beta(), inspect_numbered());
  CHECK(principal_contract(m3, find_principal_redexes(m3)[0]) == bang(beta(), annot(ti(), church(2))));
}

TEST_CASE("cau_step reproduces the pair construction trails") {
  const Term start = bang(app(app(pair_ctor(), church(2)), church(6)));
  const auto s1 = cau_step(start);
  REQUIRE(s1);
  CHECK(*s1 == bang(tau_normalize(trans(refl(), app_t(beta(), refl()))),
                    app(lam(lam(app(var(1), church(2), var(2)))), church(6))));
  const auto s2 = cau_step(*s1);
  REQUIRE(s2);
  CHECK(*s2 == bang(tau_normalize(trans(trans(refl(), app_t(beta(), refl())), beta())),
                    lam(app(var(1), church(2), church(6)))));
  CHECK_FALSE(cau_step(*s2));
  CHECK_FALSE(cau_step(church(2)));
}

TEST_CASE("cau_eval_cbv") {
  const Term idt = lam(var(1));
  auto r = cau_eval_cbv(app(idt, idt), 100);
  CHECK(r.outcome == EvalResult::Outcome::value);
  CHECK(r.term == annot(beta(), idt));

  auto r2 = cau_eval_cbv(bang(let_bang(bang(church(2)), var(1))), 100);
  REQUIRE(r2.outcome == EvalResult::Outcome::value);
  CHECK(r2.term == bang(beta_bang(), church(2)));

  const Term omega = app(lam(app(var(1), var(1))), lam(app(var(1), var(1))));
  CHECK(cau_eval_cbv(omega, 100).outcome == EvalResult::Outcome::fuel_exhausted);

  auto stuck = cau_eval_cbv(app(bang(idt), idt), 100);
  CHECK(stuck.outcome == EvalResult::Outcome::stuck);
  CHECK(stuck.reason == "non-lambda application");
  CHECK(cau_eval_cbv(inspect_numbered(), 10).reason == "inspection-locked");
}

TEST_CASE("contraction counting through inspection") {
  // ! ((λx.x) (λx.x)) ; then inspect: history has one β
  const Term idt = lam(var(1));
  const Term m = bang(app(lam(inspect(theta_plus())), app(idt, idt)));
  auto r = cau_eval_cbv(m, 1000);
  REQUIRE(r.outcome == EvalResult::Outcome::value);
  REQUIRE(r.term.is(Kind::bang));
  // evaluation of ϑ₊ applied to the history reduces to a numeral under the bang
  auto full = cau_normalize(r.term.term(1), 10000);
  REQUIRE(full.outcome == EvalResult::Outcome::value);
  const Term nf = full.term.is(Kind::annot) ? full.term.term(1) : full.term;
  CHECK(nf == church(2));
}
