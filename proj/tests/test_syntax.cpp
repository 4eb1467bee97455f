#include <doctest.h>

#include "cau/syntax.hpp"

using namespace cau;

namespace {

Replacement<Term> all_same(Term m) {
  Replacement<Term> r;
  r.fill(m);
  return r;
}

}  // namespace

TEST_CASE("is_pure") {
  CHECK(is_pure(lam(var(1))));
  CHECK_FALSE(is_pure(erase(var(1))));
  CHECK_FALSE(is_pure(bang(extract(var(1)), var(1))));
  CHECK_FALSE(is_pure(closure(var(1), id())));
  CHECK(is_pure(annot(app_t(beta(), refl()), var(1))));
}

TEST_CASE("is_pure is closed under subterms") {
  const Term m = bang(trans(beta(), lam_t(beta_bang())), app(lam(var(1)), inspect(all_same(church(1)))));
  REQUIRE(is_pure(m));
  std::vector<NodePtr> todo{m.node()};
  while (!todo.empty()) {
    auto n = todo.back();
    todo.pop_back();
    CHECK(is_pure(n));
    for (const auto& k : n->kids()) todo.push_back(k);
  }
}

TEST_CASE("max_free_index") {
  CHECK(max_free_index(lam(var(1))) == 0);
  CHECK(max_free_index(var(3)) == 3);
  CHECK(max_free_index(app(lam(var(2)), var(1))) == 1);
  CHECK(max_free_index(let_bang(var(2), var(2))) == 2);
  CHECK(max_free_index(let_bang(bang(lam(var(1))), var(1))) == 0);
  // 2[1.id] leaves index 1 unbound
  CHECK(max_free_index(closure(var(2), cons(lam(var(1)), id()))) == 1);
  CHECK(max_free_index(closure(var(2), cons(lam(var(1)), shift()))) == 2);
  CHECK(max_free_index(closure(var(1), cons(lam(var(1)), id()))) == 0);
  CHECK(max_free_index(closure(var(1), comp(shift(), cons(var(4), id())))) == 1);
  CHECK(max_free_index(closure(var(1), comp(cons(var(4), id()), shift()))) == 5);
  for (std::uint32_t n = 0; n <= 20; ++n) CHECK(max_free_index(church(n)) == 0);
}

TEST_CASE("church numerals") {
  CHECK(church(0) == lam(lam(var(1))));
  CHECK(church(1) == lam(lam(app(var(2), var(1)))));
  CHECK(church(2) == lam(lam(app(var(2), app(var(2), var(1))))));
}

TEST_CASE("structural equality") {
  CHECK(app(var(1), var(2)) == app(var(1), var(2)));
  CHECK_FALSE(app(var(1), var(2)) == app(var(2), var(1)));
  CHECK_FALSE(annot(beta(), var(1)) == annot(beta_bang(), var(1)));
  CHECK(trpl({refl(), refl(), refl(), refl(), refl(), refl(), refl(), refl(), beta()}) ==
        trpl({refl(), refl(), refl(), refl(), refl(), refl(), refl(), refl(), beta()}));
}

TEST_CASE("sort discipline") {
  CHECK_THROWS_AS(make_node(Kind::app, {var(1).node(), beta().node()}), SyntaxError);
  CHECK_THROWS_AS(make_node(Kind::lam, {}), SyntaxError);
  CHECK_THROWS_AS(var(0), SyntaxError);
  CHECK_THROWS_AS(Term(beta().node()), SyntaxError);
}

TEST_CASE("show") {
  CHECK(show(lam(app(var(1), var(1)))) == "λ.(1 1)");
  CHECK(show(trans(beta(), app_t(refl(), beta()))) == "t(b,app(r,b))");
}
