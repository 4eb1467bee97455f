#include <doctest.h>

#include "cau/corpus.hpp"
#include "cau/sigma.hpp"

using namespace cau;

namespace {

Replacement<Term> numbered() {
  Replacement<Term> r;
  for (std::uint32_t i = 0; i < kSlots; ++i) r[i] = church(i);
  return r;
}

}  // namespace

TEST_CASE("sigma steps") {
  CHECK(*sigma_step(closure(var(1), cons(church(3), id()))) == church(3));
  CHECK(*sigma_step(erase(lam(var(1)))) == lam(erase(var(1))));
  CHECK(*sigma_step(extract(bang(beta(), church(2)))) == refl());
  CHECK(*sigma_step(closure(var(3), shift())) == var(4));
  CHECK(*sigma_step(closure(var(3), cons(church(1), shift()))) == closure(var(2), shift()));
  CHECK(*sigma_step(comp(shift(), cons(var(1), id()))) == id());
  CHECK(*sigma_step(erase(bang(beta(), var(1)))) == bang(beta(), var(1)));
  CHECK(*sigma_step(erase(closure(var(1), id()))) == erase(var(1)));
  CHECK_FALSE(sigma_step(church(2)).has_value());
}

TEST_CASE("erasure and extraction are blocked on closures") {
  // only the inner closure may move: the projection waits for it
  const auto all = one_step(erase(closure(var(1), cons(var(2), id()))).node(), Rules::sigma);
  REQUIRE(all.size() == 1);
  CHECK(all[0].path == TermPath{0});
}

TEST_CASE("sigmatau normal forms") {
  CHECK(sigmatau_normalize(closure(app(var(1), var(1)), cons(lam(var(1)), id()))) == app(lam(var(1)), lam(var(1))));
  CHECK(sigmatau_normalize(erase(annot(beta(), var(1)))) == var(1));
  CHECK(sigmatau_normalize(extract(annot(beta(), annot(beta(), var(1))))) == trans(beta(), beta()));
  // let binds index 1 in its body and substitutes into its definiens
  CHECK(sigmatau_normalize(closure(let_bang(var(1), var(2)), cons(church(0), id()))) == let_bang(church(0), church(0)));
  CHECK(sigmatau_normalize(closure(lam(var(2)), cons(var(5), id()))) == lam(var(6)));
}

TEST_CASE("meta projections and focus") {
  const Term a = annot(beta(), var(1));
  CHECK(erase_meta(a) == var(1));
  CHECK(trailify_meta(a) == beta());
  CHECK(erase_meta(lam(var(1))) == lam(var(1)));
  CHECK(trailify_meta(lam(var(1))) == refl());
  CHECK(trailify_meta(app(annot(beta(), lam(var(1))), church(0))) == app_t(beta(), refl()));
  CHECK(focus(var(1)) == annot(refl(), var(1)));
  CHECK(focus(a) == a);
  CHECK(focus(bang(beta(), annot(beta(), var(1)))) == annot(refl(), bang(trans(beta(), beta()), var(1))));
}

TEST_CASE("beta redexes under evaluation contexts") {
  const Term r = app(lam(var(1)), church(0));
  CHECK(beta_sigma_redexes(erase(r)).empty());
  const auto in_clo = beta_sigma_redexes(closure(r, id()));
  REQUIRE(in_clo.size() == 1);
  CHECK(in_clo[0].path == TermPath{0});
  const auto in_subst = beta_sigma_redexes(closure(var(1), comp(shift(), cons(r, id()))));
  REQUIRE(in_subst.size() == 1);
  CHECK(in_subst[0].path == (TermPath{1, 1, 0}));
  CHECK(beta_sigma_redexes(church(2)).empty());
  // inspections see through closure bodies but not through substitutions
  const Term insp = inspect(numbered());
  CHECK(beta_sigma_redexes(bang(beta(), closure(insp, id()))).size() == 1);
  CHECK(beta_sigma_redexes(bang(beta(), closure(var(1), cons(insp, id())))).empty());
}

TEST_CASE("lazy contractions") {
  const Term idt = lam(var(1));
  const Term m = app(idt, idt);
  const Term c = beta_sigma_contract(m, beta_sigma_redexes(m)[0]);
  CHECK(c == annot(trans(app_t(lam_t(extract(var(1))), extract(idt)), beta()), closure(erase(var(1)), cons(erase(idt), id()))));
  CHECK(sigmatau_normalize(c) == annot(beta(), idt));

  const Term lb = let_bang(bang(beta(), church(2)), var(1));
  const Term clb = beta_sigma_contract(lb, beta_sigma_redexes(lb)[0]);
  CHECK(sigmatau_normalize(clb) == annot(trans(beta_bang(), beta()), church(2)));

  const Term bi = bang(beta(), inspect(numbered()));
  CHECK(beta_sigma_contract(bi, beta_sigma_redexes(bi)[0]) == bang(beta(), annot(ti(), church(2))));
}

TEST_CASE("inspection history includes pending annotations") {
  // !_b ((b ▷ λx.x) ι(ϑ)): the local β is not yet absorbed
  const Term m = bang(beta(), app(annot(beta(), lam(var(1))), inspect(numbered())));
  const auto rs = beta_sigma_redexes(m);
  REQUIRE(rs.size() == 1);
  const Term c = beta_sigma_contract(m, rs[0]);
  // history: t(b, app(b, r)) → ϑ(t) ϑ(b) (ϑ(app) ϑ(b) ϑ(r))
  const auto th = numbered();
  const Term expect = app(th[1], th[2], app(th[6], th[2], th[0]));
  CHECK(c == bang(beta(), app(annot(beta(), lam(var(1))), annot(ti(), expect))));
}

TEST_CASE("sigmatau_equiv") {
  CHECK(sigmatau_equiv(annot(refl(), church(3)), church(3)));
  CHECK_FALSE(sigmatau_equiv(annot(beta(), church(3)), church(3)));
}
