#include <doctest.h>

#include <unordered_set>

#include "cau/corpus.hpp"
#include "cau/oracle.hpp"
#include "cau/sigma.hpp"

using namespace cau;

namespace {

// Independent size count: every node of every sort.
std::uint32_t count_nodes(const NodePtr& n) {
  std::uint32_t c = 1;
  for (std::size_t i = 0; i < n->kids().size(); ++i) c += count_nodes(n->kid(i));
  return c;
}

// Number of pure λ-terms (var/lam/app only) of exactly n nodes with
// indices bounded by depth + extra, by the textbook recurrence.
std::uint64_t lambda_count(std::uint32_t n, std::uint32_t depth, std::uint32_t extra) {
  if (n == 1) return depth + extra;
  std::uint64_t c = lambda_count(n - 1, depth + 1, extra);
  for (std::uint32_t a = 1; a + 1 < n; ++a) c += lambda_count(a, depth, extra) * lambda_count(n - 1 - a, depth, extra);
  return c;
}

GenFlags lambda_only() {
  GenFlags f;
  f.bang = f.inspect = f.closure = f.erase = f.extract = f.annot = f.let = false;
  return f;
}

bool contains(const NodePtr& n, Kind k) {
  if (n->kind() == k) return true;
  for (const auto& c : n->kids())
    if (contains(c, k)) return true;
  return false;
}

}  // namespace

TEST_CASE("generation edge cases") {
  GenSpec g;
  g.size = 1;
  CHECK(gen_term(g) == var(1));
  g.size = 2;
  g.closed = true;
  CHECK(gen_term(g) == lam(var(1)));
  g.size = 1;
  CHECK_THROWS_AS(gen_term(g), GenerationError);
}

TEST_CASE("generation is deterministic, sized and honors flags") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    GenSpec g{seed, static_cast<std::uint32_t>(2 + seed % 35), GenFlags{}, seed % 2 == 0};
    const Term a = gen_term(g);
    CHECK(a == gen_term(g));
    CHECK(count_nodes(a.node()) == g.size);
    CHECK(term_size(a.node()) == g.size);
    if (g.closed) CHECK(max_free_index(a) == 0);

    GenSpec p{seed, 30, machine_flags(), true};
    const Term m = gen_term(p);
    CHECK(is_pure(m));
    CHECK_FALSE(m.node()->has_annot());
    CHECK(max_free_index(m) == 0);
  }
}

TEST_CASE("inspection branches are full replacements") {
  GenFlags f = lambda_only();
  f.inspect = true;
  bool seen = false;
  for (std::uint64_t seed = 0; seed < 300 && !seen; ++seed) {
    const Term m = gen_term({seed, 20, f, false});
    if (contains(m.node(), Kind::inspect)) seen = true;
  }
  CHECK(seen);
}

TEST_CASE("enumeration matches the λ-term recurrence") {
  for (std::uint32_t n = 1; n <= 8; ++n) {
    std::uint64_t open = 0, closed = 0;
    for (std::uint32_t k = 1; k <= n; ++k) {
      open += lambda_count(k, 0, 1);
      closed += lambda_count(k, 0, 0);
    }
    CHECK(enumerate_terms(n, lambda_only(), false).size() == open);
    CHECK(enumerate_terms(n, lambda_only(), true).size() == closed);
  }
}

TEST_CASE("enumerated terms are distinct and within size") {
  const auto all = enumerate_terms(6, GenFlags{}, false);
  std::unordered_set<NodePtr, NodeHash, NodeEq> seen;
  for (const auto& t : all) {
    CHECK(term_size(t.node()) <= 6);
    CHECK(seen.insert(t.node()).second);
  }
}

TEST_CASE("one-step enumeration") {
  auto s = enumerate_one_step(annot(refl(), var(1)).node(), StepRules::tau);
  REQUIRE(s.size() == 1);
  CHECK(Term(s[0].result) == var(1));

  s = enumerate_one_step(app_t(refl(), refl()).node(), StepRules::tau);
  REQUIRE(s.size() == 1);
  CHECK(Trail(s[0].result) == refl());

  CHECK(enumerate_one_step(church(2).node(), StepRules::beta_sigma).empty());

  const Term two = app(identity(), app(identity(), identity()));
  CHECK(enumerate_one_step(two.node(), StepRules::beta_sigma).size() == 2);
  CHECK(enumerate_one_step(two.node(), StepRules::cau_principal).size() == 2);
}

TEST_CASE("joinability") {
  const Term m = app(identity(), annot(beta(), identity()));
  CHECK(joinable(m.node(), tau_normalize(m).node(), StepRules::tau));
  CHECK(joinable(m.node(), m.node(), StepRules::beta_sigma, 0));
  // both reduce to b ▷ λ1
  CHECK(joinable(app(identity(), identity()).node(), annot(beta(), identity()).node(), StepRules::beta_sigma, 1));
  CHECK_FALSE(joinable(annot(beta(), identity()).node(), identity().node(), StepRules::beta_sigma, 4));
}

TEST_CASE("focused beta") {
  const auto s = beta_focused_step(app(identity(), identity()));
  REQUIRE(s.size() == 1);
  CHECK(s[0] == annot(beta(), identity()));
  CHECK(beta_focused_step(church(2)).empty());

  // a single redex: lazy contraction then focus agrees with β̄
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const Term m = gen_term({seed, 18, GenFlags{}, false});
    const auto rs = beta_sigma_redexes(m);
    if (rs.size() != 1 || rs[0].kind != RedexKind::beta) continue;
    const Term lazy = sigmatau_normalize(focus(beta_sigma_contract(m, rs[0])));
    bool hit = lazy == sigmatau_normalize(m);
    for (const auto& f : beta_focused_step(m)) hit = hit || sigmatau_normalize(f) == lazy;
    CHECK(hit);
  }
}

TEST_CASE("order anomaly endpoints") {
  const auto f = fig1();
  const Term mnn = app(var(1), identity(), identity());
  CHECK(f.left == annot(trans(beta(), app_t(app_t(refl(), beta()), beta())), mnn));
  CHECK(f.right == annot(trans(app_t(refl(), beta()), beta()), mnn));
  CHECK_FALSE(f.joinable);
  CHECK(f.naive_engine == f.right);
  CHECK_FALSE(joinable(f.left.node(), f.right.node(), StepRules::beta_sigma, 6));
}

TEST_CASE("properties on small exhaustive corpora") {
  CheckOptions o;
  for (const auto& name : property_names()) {
    GenSpec g;
    g.size = name == "substitution-lemma" ? 5 : name == "relativized-confluence" ? 7 : 6;
    const auto r = check_property(name, g, 0, o);
    INFO(name, ": ", r.detail);
    CHECK(r.ok());
    CHECK(r.trials > 0);
  }
}

TEST_CASE("properties on random terms") {
  CheckOptions o;
  o.exhaustive_if_small = false;
  for (const auto& name : property_names()) {
    GenSpec g;
    g.seed = 17;
    g.size = 25;
    const auto r = check_property(name, g, 60, o);
    INFO(name, ": ", r.detail);
    CHECK(r.ok());
  }
}

TEST_CASE("unknown property") {
  CHECK_THROWS_AS(check_property("no-such-property", GenSpec{}, 1), std::invalid_argument);
}

TEST_CASE("shrinking keeps the failure") {
  // "contains an application whose argument is an annotation"
  std::function<bool(const NodePtr&)> bad = [&](const NodePtr& n) {
    if (n->kind() == Kind::app && n->kid(1)->kind() == Kind::annot) return true;
    for (const auto& k : n->kids())
      if (bad(k)) return true;
    return false;
  };
  const Term big = lam(app(app(var(1), lam(var(1))), app(identity(), annot(beta(), app(var(1), var(1))))));
  REQUIRE(bad(big.node()));
  const Term small = shrink_term(big, [&](const Term& t) { return bad(t.node()); });
  CHECK(bad(small.node()));
  CHECK(small == app(var(1), annot(beta(), var(1))));
}
