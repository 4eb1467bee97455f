#include "cau/oracle.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <unordered_set>

#include "cau/corpus.hpp"
#include "cau/machine.hpp"
#include "cau/sigma.hpp"

namespace cau {

GenFlags machine_flags() {
  GenFlags f;
  f.closure = f.erase = f.extract = f.annot = false;
  return f;
}

GenFlags naive_flags() {
  GenFlags f;
  f.closure = f.erase = f.extract = false;
  return f;
}

std::uint32_t term_size(const NodePtr& n) {
  std::uint32_t s = 1;
  for (const auto& k : n->kids()) s += term_size(k);
  return s;
}

// --- random generation -----------------------------------------------------------

namespace {

class Generator {
 public:
  Generator(const GenSpec& spec) : rng_(spec.seed), flags_(spec.flags), closed_(spec.closed) {}

  std::uint32_t min_term(std::uint32_t depth) const { return closed_ && depth == 0 ? 2 : 1; }

  Term term(std::uint32_t budget, std::uint32_t depth) {
    const std::uint32_t m = min_term(depth);
    const std::uint32_t rest = budget - 1;
    struct Option {
      Kind kind;
      unsigned weight;
    };
    std::vector<Option> opts;
    if (budget == 1 && m == 1) opts.push_back({Kind::var, 1});
    if (rest >= 1) opts.push_back({Kind::lam, 3});
    if (rest >= 2 * m) opts.push_back({Kind::app, 3});
    if (flags_.let && rest >= m + 1) opts.push_back({Kind::let, 3});
    if (flags_.bang && rest >= 1 + m) opts.push_back({Kind::bang, 1});
    if (flags_.annot && rest >= 1 + m) opts.push_back({Kind::annot, 1});
    if (flags_.inspect && rest >= kSlots * m) opts.push_back({Kind::inspect, 1});
    if (flags_.closure && rest >= 1 + m) opts.push_back({Kind::closure, 1});
    if (flags_.erase && rest >= m) opts.push_back({Kind::erase, 1});
    if (opts.empty()) throw GenerationError("no term of " + std::to_string(budget) + " nodes fits these flags");

    unsigned total = 0;
    for (const auto& o : opts) total += o.weight;
    unsigned pick = uniform(0, total - 1);
    Kind kind = opts.back().kind;
    for (const auto& o : opts) {
      if (pick < o.weight) {
        kind = o.kind;
        break;
      }
      pick -= o.weight;
    }

    switch (kind) {
      case Kind::var: {
        const std::uint32_t top = closed_ ? depth : depth + 1;
        return var(uniform(1, top));
      }
      case Kind::lam:
        return lam(term(rest, depth + 1));
      case Kind::app: {
        const auto a = uniform(m, rest - m);
        return app(term(a, depth), term(rest - a, depth));
      }
      case Kind::let: {
        const auto a = uniform(m, rest - 1);
        // mostly boxed definientia, so let-bang redexes actually occur
        if (flags_.bang && a >= 2 + m && uniform(0, 3) != 0) {
          const auto qa = uniform(1, std::min<std::uint32_t>(3, a - 1 - m));
          const Trail q = trail(qa, depth);
          return let_bang(bang(q, term(a - 1 - qa, depth)), term(rest - a, depth + 1));
        }
        return let_bang(term(a, depth), term(rest - a, depth + 1));
      }
      case Kind::bang:
      case Kind::annot: {
        const auto a = uniform(1, std::min<std::uint32_t>(4, rest - m));
        const Trail q = trail(a, depth);
        const Term body = term(rest - a, depth);
        return kind == Kind::bang ? bang(q, body) : annot(q, body);
      }
      case Kind::inspect: {
        std::array<std::uint32_t, kSlots> sizes;
        sizes.fill(m);
        for (std::uint32_t left = rest - kSlots * m; left > 0; --left) ++sizes[uniform(0, kSlots - 1)];
        Replacement<Term> br;
        for (std::size_t i = 0; i < kSlots; ++i) br[i] = term(sizes[i], depth);
        return inspect(br);
      }
      case Kind::closure: {
        // the substitution first: it fixes how deep the body may reach
        const std::uint32_t sub_max = std::min<std::uint32_t>(5, rest - m);
        for (std::uint32_t tries = 0; tries < 8; ++tries) {
          auto [s, cap] = subst(uniform(1, sub_max), depth);
          const std::uint32_t used = term_size(s.node());
          if (rest - used >= min_term(cap)) return closure(term(rest - used, cap), s);
        }
        return closure(term(rest - 1, depth), id());
      }
      case Kind::erase:
        return erase(term(rest, depth));
      default:
        break;
    }
    throw GenerationError("generator");
  }

  Trail trail(std::uint32_t budget, std::uint32_t depth) {
    if (budget == 1) {
      switch (uniform(0, 3)) {
        case 0: return refl();
        case 1: return beta();
        case 2: return beta_bang();
        default: return ti();
      }
    }
    const std::uint32_t rest = budget - 1;
    std::vector<Kind> opts{Kind::lam_t};
    if (rest >= 2) opts.insert(opts.end(), {Kind::trans, Kind::trans, Kind::app_t, Kind::let_t});
    if (rest >= kSlots) opts.push_back(Kind::trpl);
    if (flags_.extract && rest >= min_term(depth)) opts.push_back(Kind::extract);
    const Kind kind = opts[uniform(0, static_cast<std::uint32_t>(opts.size()) - 1)];
    switch (kind) {
      case Kind::lam_t: return lam_t(trail(rest, depth));
      case Kind::trpl: {
        std::array<std::uint32_t, kSlots> sizes;
        sizes.fill(1);
        for (std::uint32_t left = rest - kSlots; left > 0; --left) ++sizes[uniform(0, kSlots - 1)];
        Replacement<Trail> br;
        for (std::size_t i = 0; i < kSlots; ++i) br[i] = trail(sizes[i], depth);
        return trpl(br);
      }
      case Kind::extract: return extract(term(rest, depth));
      default: {
        const auto a = uniform(1, rest - 1);
        const Trail l = trail(a, depth);
        const Trail r = trail(rest - a, depth);
        if (kind == Kind::trans) return trans(l, r);
        if (kind == Kind::app_t) return app_t(l, r);
        return let_t(l, r);
      }
    }
  }

  // A substitution of at most `budget` nodes and the depth its body may use.
  std::pair<Subst, std::uint32_t> subst(std::uint32_t budget, std::uint32_t depth) {
    if (budget < 2 + min_term(depth)) {
      if (uniform(0, 1) == 0) return {id(), depth};
      return {shift(), depth == 0 ? 0 : depth - 1};
    }
    if (budget >= 3 && uniform(0, 3) == 0) {
      const auto a = uniform(1, budget - 2);
      auto [t, cap_t] = subst(a, depth);
      auto [s, cap_s] = subst(budget - 1 - term_size(t.node()), cap_t);
      return {comp(s, t), cap_s};
    }
    const auto a = uniform(min_term(depth), budget - 2);
    const Term head = term(a, depth);
    auto [tail, cap] = subst(budget - 1 - a, depth);
    return {cons(head, tail), cap + 1};
  }

 private:
  std::uint32_t uniform(std::uint32_t lo, std::uint32_t hi) {
    return std::uniform_int_distribution<std::uint32_t>(lo, hi)(rng_);
  }

  std::mt19937_64 rng_;
  GenFlags flags_;
  bool closed_;
};

}  // namespace

Term gen_term(const GenSpec& spec) {
  if (spec.size == 0) throw GenerationError("size must be at least 1");
  if (spec.closed && spec.size < 2) throw GenerationError("a closed term needs at least 2 nodes");
  Generator g(spec);
  return g.term(spec.size, 0);
}

// --- enumeration -------------------------------------------------------------------

namespace {

class Enumerator {
 public:
  Enumerator(const GenFlags& flags, bool closed) : flags_(flags), closed_(closed) {}

  // Terms of exactly n nodes whose indices stay within `depth` (+1 when open).
  const std::vector<Term>& terms(std::uint32_t n, std::uint32_t depth) {
    const auto key = std::make_pair(n, depth);
    if (auto it = terms_.find(key); it != terms_.end()) return it->second;
    std::vector<Term> out;
    if (n == 1) {
      const std::uint32_t top = closed_ ? depth : depth + 1;
      for (std::uint32_t i = 1; i <= top; ++i) out.push_back(var(i));
    } else {
      const std::uint32_t rest = n - 1;
      for (const auto& b : terms(rest, depth + 1)) out.push_back(lam(b));
      for (std::uint32_t a = 1; a < rest; ++a) {
        for (const auto& l : terms(a, depth))
          for (const auto& r : terms(rest - a, depth)) out.push_back(app(l, r));
        if (flags_.let)
          for (const auto& l : terms(a, depth))
            for (const auto& r : terms(rest - a, depth + 1)) out.push_back(let_bang(l, r));
        if (flags_.bang || flags_.annot)
          for (const auto& q : trails(a, depth))
            for (const auto& b : terms(rest - a, depth)) {
              if (flags_.bang) out.push_back(bang(q, b));
              if (flags_.annot) out.push_back(annot(q, b));
            }
        if (flags_.closure)
          for (const auto& [s, cap] : substs(a, depth))
            for (const auto& b : terms(rest - a, cap)) out.push_back(closure(b, s));
      }
      if (flags_.erase)
        for (const auto& b : terms(rest, depth)) out.push_back(erase(b));
      if (flags_.inspect && rest >= kSlots) {
        Replacement<Term> br;
        std::function<void(std::size_t, std::uint32_t)> fill = [&](std::size_t i, std::uint32_t left) {
          if (i == kSlots - 1) {
            for (const auto& t : terms(left, depth)) {
              br[i] = t;
              out.push_back(inspect(br));
            }
            return;
          }
          for (std::uint32_t a = 1; a + (kSlots - 1 - i) <= left; ++a)
            for (const auto& t : terms(a, depth)) {
              br[i] = t;
              fill(i + 1, left - a);
            }
        };
        fill(0, rest);
      }
    }
    return terms_.emplace(key, std::move(out)).first->second;
  }

  const std::vector<Trail>& trails(std::uint32_t n, std::uint32_t depth) {
    const auto key = std::make_pair(n, depth);
    if (auto it = trails_.find(key); it != trails_.end()) return it->second;
    std::vector<Trail> out;
    if (n == 1) {
      out = {refl(), beta()};
    } else {
      const std::uint32_t rest = n - 1;
      for (const auto& q : trails(rest, depth)) out.push_back(lam_t(q));
      for (std::uint32_t a = 1; a < rest; ++a)
        for (const auto& l : trails(a, depth))
          for (const auto& r : trails(rest - a, depth)) {
            out.push_back(trans(l, r));
            out.push_back(app_t(l, r));
            out.push_back(let_t(l, r));
          }
      if (flags_.extract)
        for (const auto& m : terms(rest, depth)) out.push_back(extract(m));
    }
    return trails_.emplace(key, std::move(out)).first->second;
  }

  // One-element conses keep the substitution alphabet small.
  std::vector<std::pair<Subst, std::uint32_t>> substs(std::uint32_t n, std::uint32_t depth) {
    std::vector<std::pair<Subst, std::uint32_t>> out;
    if (n == 1) {
      out.push_back({id(), depth});
      out.push_back({shift(), depth == 0 ? 0 : depth - 1});
    } else if (n >= 3) {
      for (const auto& m : terms(n - 2, depth)) out.push_back({cons(m, id()), depth + 1});
    }
    return out;
  }

 private:
  GenFlags flags_;
  bool closed_;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<Term>> terms_;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<Trail>> trails_;
};

}  // namespace

std::vector<Term> enumerate_terms(std::uint32_t max_size, const GenFlags& flags, bool closed) {
  Enumerator e(flags, closed);
  std::vector<Term> out;
  for (std::uint32_t n = 1; n <= max_size; ++n) {
    const auto& level = e.terms(n, 0);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

// --- one-step relations ------------------------------------------------------------

const char* step_rules_name(StepRules r) {
  switch (r) {
    case StepRules::tau: return "tau";
    case StepRules::sigma: return "sigma";
    case StepRules::sigmatau: return "sigmatau";
    case StepRules::beta_sigma: return "beta_sigma";
    case StepRules::cau_principal: return "cau_principal";
  }
  return "?";
}

std::optional<StepRules> parse_step_rules(const std::string& s) {
  for (auto r : {StepRules::tau, StepRules::sigma, StepRules::sigmatau, StepRules::beta_sigma, StepRules::cau_principal})
    if (s == step_rules_name(r)) return r;
  return std::nullopt;
}

std::vector<Successor> enumerate_one_step(const NodePtr& x, StepRules rules, std::uint64_t fuel) {
  std::vector<Successor> out;
  auto rewrites = [&](Rules r) {
    for (auto& w : one_step(x, r)) out.push_back({std::move(w.path), w.rule, std::move(w.result)});
  };
  switch (rules) {
    case StepRules::tau: rewrites(Rules::tau); break;
    case StepRules::sigma: rewrites(Rules::sigma); break;
    case StepRules::sigmatau: rewrites(Rules::sigmatau); break;
    case StepRules::beta_sigma: {
      if (x->sort() != Sort::term) break;
      const Term m(x);
      for (const auto& r : beta_sigma_redexes(m))
        out.push_back({r.path, redex_name(r.kind), beta_sigma_contract(m, r, fuel).node()});
      break;
    }
    case StepRules::cau_principal: {
      if (x->sort() != Sort::term || !is_pure(x)) break;
      const Term m(x);
      for (const auto& r : find_principal_redexes(m))
        out.push_back({r.path, redex_name(r.kind), tau_normalize(principal_contract(m, r), fuel).node()});
      break;
    }
  }
  return out;
}

namespace {

using NodeSet = std::unordered_set<NodePtr, NodeHash, NodeEq>;

constexpr std::size_t kJoinStates = 4000;

// Reducts within `bound` Beta steps, modulo στ; nullopt past the state cap.
std::optional<NodeSet> reach(const NodePtr& x, StepRules rules, std::uint32_t bound, std::uint64_t fuel) {
  NodeSet seen;
  std::vector<NodePtr> layer{normalize(x, Rules::sigmatau, fuel)};
  seen.insert(layer[0]);
  for (std::uint32_t d = 0; d < bound && !layer.empty(); ++d) {
    std::vector<NodePtr> next;
    for (const auto& n : layer)
      for (auto& s : enumerate_one_step(n, rules, fuel)) {
        auto k = normalize(s.result, Rules::sigmatau, fuel);
        if (seen.insert(k).second) next.push_back(k);
        if (seen.size() > kJoinStates) return std::nullopt;
      }
    layer = std::move(next);
  }
  return seen;
}

std::optional<bool> join_search(const NodePtr& x, const NodePtr& y, StepRules rules, std::uint32_t bound,
                                std::uint64_t fuel) {
  switch (rules) {
    case StepRules::tau: return equal(normalize(x, Rules::tau, fuel), normalize(y, Rules::tau, fuel));
    case StepRules::sigma: return equal(normalize(x, Rules::sigma, fuel), normalize(y, Rules::sigma, fuel));
    case StepRules::sigmatau:
      return equal(normalize(x, Rules::sigmatau, fuel), normalize(y, Rules::sigmatau, fuel));
    default: break;
  }
  auto rx = reach(x, rules, bound, fuel);
  auto ry = reach(y, rules, bound, fuel);
  if (!rx || !ry) return std::nullopt;
  for (const auto& n : *rx)
    if (ry->count(n)) return true;
  return false;
}

}  // namespace

bool joinable(const NodePtr& x, const NodePtr& y, StepRules rules, std::uint32_t bound, std::uint64_t fuel) {
  if (equal(x, y)) return true;
  return join_search(x, y, rules, bound, fuel).value_or(false);
}

std::vector<Term> beta_focused_step(const Term& m, std::uint64_t fuel) {
  const Term a = sigmatau_normalize(m, fuel);
  std::vector<Term> out;
  for (const auto& r : find_principal_redexes(a)) out.push_back(focus(principal_contract(a, r), fuel));
  return out;
}

// --- order anomaly ---------------------------------------------------------------------------

Term naive_es_beta(const Term& redex) {
  if (!redex.is(Kind::app) || !redex.term(0).is(Kind::lam)) throw std::invalid_argument("not a beta redex");
  return annot(beta(), closure(redex.term(0).term(0), cons(redex.term(1), id())));
}

Fig1Result fig1(std::uint32_t bound) {
  const Term m = var(2);  // M under the binder
  const Term n = identity();
  const Trail q = beta();
  const Term start = app(lam(app(m, var(1), var(1))), annot(q, n));

  // β first, then στ
  const Term left = sigmatau_normalize(naive_es_beta(start));
  // τ first, then β, then στ
  const Term pushed = tau_normalize(start);
  const Term right = sigmatau_normalize(annot(pushed.trail(0), naive_es_beta(pushed.term(1))));
  const auto engine = cau_step(pushed);
  const bool join = joinable(left.node(), right.node(), StepRules::beta_sigma, bound);
  return Fig1Result{start, left, right, engine ? *engine : pushed, join};
}

// --- properties --------------------------------------------------------------------------

const std::vector<std::string>& property_names() {
  static const std::vector<std::string> names{
      "tau-confluence",         "sigmatau-confluence", "sigmatau-termination", "simulation-forward",
      "simulation-backward",    "relativized-confluence", "machine-soundness", "machine-validity",
      "projection-agreement",   "substitution-lemma",  "admissible-rules",     "fig1-anachronism"};
  return names;
}

namespace {

Verdict pass() { return {Verdict::Kind::pass, {}}; }
Verdict fail(std::string why) { return {Verdict::Kind::fail, std::move(why)}; }
Verdict skip() { return {Verdict::Kind::skip, {}}; }

std::string s(const NodePtr& n) { return show(n); }

// Unique normal forms: every first step, a second strategy and a seeded
// random walk all land on the same normal form, which is a fixpoint.
Verdict confluence(const Term& m, Rules rules, const CheckOptions& o) {
  const NodePtr nf = normalize(m.node(), rules, o.fuel);
  if (!equal(normalize(nf, rules, o.fuel), nf)) return fail("normalization is not idempotent on " + s(nf));
  const NodePtr nf2 = normalize_by_steps(m.node(), rules, o.fuel);
  if (!equal(nf, nf2)) return fail("strategies disagree: " + s(nf) + " vs " + s(nf2));
  for (const auto& w : one_step(m.node(), rules)) {
    const NodePtr k = normalize(w.result, rules, o.fuel);
    if (!equal(k, nf)) return fail(std::string(w.rule) + " at " + show_path(w.path) + " leads to " + s(k) + " not " + s(nf));
  }
  std::mt19937_64 rng(m.node()->hash());
  NodePtr cur = m.node();
  for (std::uint64_t i = 0;; ++i) {
    if (i > o.fuel) throw FuelExhausted("random walk");
    auto succ = one_step(cur, rules);
    if (succ.empty()) break;
    cur = succ[std::uniform_int_distribution<std::size_t>(0, succ.size() - 1)(rng)].result;
  }
  if (!equal(cur, nf)) return fail("random walk ends in " + s(cur) + " not " + s(nf));
  if (rules == Rules::sigmatau && !is_pure(nf)) return fail("στ-normal form keeps explicit operators: " + s(nf));
  return pass();
}

Verdict termination(const Term& m, const CheckOptions& o) {
  const NodePtr nf = normalize(m.node(), Rules::sigmatau, o.fuel);
  if (!is_pure(nf)) return fail("στ-normal form keeps explicit operators: " + s(nf));
  if (!equal(normalize(nf, Rules::sigmatau, o.fuel), nf)) return fail("not idempotent");
  if (!equal(normalize_by_steps(m.node(), Rules::sigmatau, o.fuel), nf)) return fail("strategies disagree");
  return pass();
}

Verdict forward(const Term& input, const CheckOptions& o) {
  const Term m = tau_normalize(input, o.fuel);
  const auto redexes = find_principal_redexes(m);
  if (redexes.empty()) return skip();
  for (const auto& r : redexes) {
    const Term naive = tau_normalize(principal_contract(m, r), o.fuel);
    const Term lazy = beta_sigma_contract(m, r, o.fuel);
    const Term a = sigmatau_normalize(naive, o.fuel);
    const Term b = sigmatau_normalize(lazy, o.fuel);
    if (a != b)
      return fail(std::string(redex_name(r.kind)) + " at " + show_path(r.path) + ": naive " + show(a) + ", lazy " +
                  show(b));
  }
  return pass();
}

bool reachable_in_one(const Term& from, const Term& to, const CheckOptions& o) {
  if (from == to) return true;
  for (const auto& s : cau_successors(from, o.fuel))
    if (sigmatau_normalize(s, o.fuel) == to) return true;
  return false;
}

Verdict backward(const Term& m, const CheckOptions& o) {
  const auto redexes = beta_sigma_redexes(m);
  if (redexes.empty()) return skip();
  const Term a = sigmatau_normalize(m, o.fuel);
  for (const auto& r : redexes) {
    const Term n = beta_sigma_contract(m, r, o.fuel);
    const Term b = sigmatau_normalize(n, o.fuel);
    if (!reachable_in_one(a, b, o))
      return fail(std::string(redex_name(r.kind)) + " at " + show_path(r.path) + ": στ(M) = " + show(a) +
                  " does not reach στ(N) = " + show(b));
    // the focused-form lemma: ⟨M⟩ reaches ⟨N⟩ by at most one β̄ step
    const Term fb = sigmatau_normalize(focus(n, o.fuel), o.fuel);
    bool hit = fb == a;
    for (const auto& f : beta_focused_step(m, o.fuel)) hit = hit || sigmatau_normalize(f, o.fuel) == fb;
    if (!hit) return fail("no focused step reaches " + show(fb));
  }
  for (const auto& w : one_step(m.node(), Rules::sigmatau)) {
    const Term k = sigmatau_normalize(Term(w.result), o.fuel);
    if (k != a) return fail(std::string(w.rule) + " at " + show_path(w.path) + " changes the στ-normal form");
  }
  return pass();
}

Verdict relativized(const Term& m, const CheckOptions& o) {
  const auto redexes = beta_sigma_redexes(m);
  if (redexes.size() < 2) return skip();
  std::vector<Term> ds;
  for (const auto& r : redexes) ds.push_back(beta_sigma_contract(m, r, o.fuel));
  bool decided = false;
  for (std::size_t i = 0; i < ds.size(); ++i)
    for (std::size_t j = i + 1; j < ds.size(); ++j) {
      const Term a = sigmatau_normalize(ds[i], o.fuel);
      const Term b = sigmatau_normalize(ds[j], o.fuel);
      const auto premise = join_search(a.node(), b.node(), StepRules::cau_principal, o.join_bound, o.fuel);
      if (!premise || !*premise) continue;
      const auto concl = join_search(ds[i].node(), ds[j].node(), StepRules::beta_sigma, o.join_bound, o.fuel);
      if (!concl) continue;
      decided = true;
      if (!*concl) return fail("derivatives " + show(ds[i]) + " and " + show(ds[j]) + " do not join");
    }
  return decided ? pass() : Verdict{Verdict::Kind::inconclusive, "no pair decided within the search bound"};
}

Verdict machine_run(const Term& m, const CheckOptions& o, bool soundness, bool validity, bool admissible) {
  Config c = inject(m);
  for (std::uint64_t i = 0; i <= o.machine_fuel; ++i) {
    if (validity) {
      const auto v = validate(c);
      if (v.kind != Validity::Kind::term_config) return fail("step " + std::to_string(i) + ": invalid state: " + v.reason);
      if (!trails_normalized(c)) return fail("step " + std::to_string(i) + ": trail not στ-normal");
    }
    const auto r = step(c, o.fuel);
    if (r.kind == StepResult::Kind::stuck) return {Verdict::Kind::inconclusive, "stuck: " + r.reason};
    if (r.kind == StepResult::Kind::final) {
      if (!soundness) return pass();
      const auto cbv = cau_eval_cbv(m, o.fuel);
      if (cbv.outcome != EvalResult::Outcome::value) return fail("machine value but call-by-value ends " + cbv.reason);
      const Term a = sigmatau_normalize(denote_value(*r.value), o.fuel);
      const Term b = sigmatau_normalize(cbv.term, o.fuel);
      if (a != b) return fail("machine value " + show(a) + ", call-by-value " + show(b));
      return pass();
    }
    const bool contraction = r.rule == 2 || r.rule == 5 || r.rule == 9;
    if (soundness) {
      const Term before = sigmatau_normalize(denote_config(c), o.fuel);
      const Term after = sigmatau_normalize(denote_config(r.next), o.fuel);
      if (!contraction && before != after)
        return fail("rule " + std::to_string(r.rule) + " changes the denotation: " + show(before) + " to " + show(after));
      if (contraction && (before == after || !reachable_in_one(before, after, o)))
        return fail("rule " + std::to_string(r.rule) + " is not one step: " + show(before) + " to " + show(after));
    }
    if (admissible && (r.rule == 2 || r.rule == 5)) {
      // the rule in isolation, without its context
      const Tuple& top = c.stack.back();
      const std::size_t need = r.rule == 2 ? 2 : 1;
      Config local{{Tuple{top.trail, top.code, top.env}}, {c.dump.end() - need, c.dump.end()}};
      const auto lr = step(local, o.fuel);
      if (lr.kind != StepResult::Kind::next) return fail("rule " + std::to_string(r.rule) + " fails in isolation");
      const Term before = sigmatau_normalize(denote_config(local), o.fuel);
      const Term after = sigmatau_normalize(denote_config(lr.next), o.fuel);
      if (!reachable_in_one(before, after, o) || before == after)
        return fail("admissible rule for " + std::to_string(r.rule) + ": " + show(before) + " to " + show(after));
    }
    if (admissible && r.rule == 9) {
      const Term before = sigmatau_normalize(denote_config(c), o.fuel);
      const Term after = sigmatau_normalize(denote_config(r.next), o.fuel);
      if (!reachable_in_one(before, after, o) || before == after)
        return fail("admissible inspection rule: " + show(before) + " to " + show(after));
    }
    c = r.next;
  }
  return {Verdict::Kind::inconclusive, "machine fuel exhausted"};
}

Verdict projections(const Term& m, const CheckOptions& o) {
  const Term e = sigmatau_normalize(erase(m), o.fuel);
  if (e != erase_meta(m, o.fuel)) return fail("erasure: " + show(e) + " vs " + show(erase_meta(m, o.fuel)));
  const Trail t = sigmatau_normalize(extract(m), o.fuel);
  if (t != trailify_meta(m, o.fuel)) return fail("extraction: " + show(t) + " vs " + show(trailify_meta(m, o.fuel)));
  if (sigmatau_normalize(focus(m, o.fuel), o.fuel) != sigmatau_normalize(m, o.fuel)) return fail("focus changes στ(M)");
  return pass();
}

Subst shifts(std::uint32_t p) {
  if (p == 0) return id();
  Subst s = shift();
  for (std::uint32_t i = 1; i < p; ++i) s = comp(s, shift());
  return s;
}

Verdict substitution(const Term& input, const CheckOptions& o) {
  const Term m = sigmatau_normalize(input, o.fuel);
  const std::vector<Term> pool{annot(beta(), identity()), var(1), bang(beta(), var(2)),
                               app(var(1), annot(ti(), var(1))), m};
  for (std::uint32_t p = 0; p <= 2; ++p)
    for (std::size_t k = 0; k <= 2; ++k)
      for (std::size_t start = 0; start + k <= pool.size(); ++start) {
        std::vector<Term> ns(pool.begin() + static_cast<std::ptrdiff_t>(start),
                             pool.begin() + static_cast<std::ptrdiff_t>(start + k));
        Subst s = shifts(p);
        for (auto it = ns.rbegin(); it != ns.rend(); ++it) s = cons(*it, s);
        const Term lhs = sigmatau_normalize(closure(m, s), o.fuel);
        const Term rhs = sigmatau_normalize(meta_subst(m, p, ns), o.fuel);
        if (lhs != rhs)
          return fail("p=" + std::to_string(p) + ", " + std::to_string(k) + " terms: " + show(lhs) + " vs " + show(rhs));
        if (k == 0) break;
      }
  return pass();
}

struct Domain {
  GenFlags flags;
  bool closed;
};

Domain domain_of(const std::string& name) {
  if (name == "tau-confluence" || name == "simulation-forward") return {naive_flags(), false};
  if (name == "machine-soundness" || name == "machine-validity" || name == "admissible-rules")
    return {machine_flags(), true};
  return {GenFlags{}, false};
}

GenFlags meet(const GenFlags& a, const GenFlags& b) {
  return GenFlags{a.bang && b.bang,       a.inspect && b.inspect, a.closure && b.closure, a.erase && b.erase,
                  a.extract && b.extract, a.annot && b.annot,     a.let && b.let};
}

bool in_domain(const Term& m, const Domain& d) {
  if (d.closed && max_free_index(m) != 0) return false;
  const NodePtr& n = m.node();
  std::function<bool(const NodePtr&)> ok = [&](const NodePtr& x) {
    switch (x->kind()) {
      case Kind::bang: if (!d.flags.bang) return false; break;
      case Kind::inspect: if (!d.flags.inspect) return false; break;
      case Kind::closure: if (!d.flags.closure) return false; break;
      case Kind::erase: if (!d.flags.erase) return false; break;
      case Kind::extract: if (!d.flags.extract) return false; break;
      case Kind::annot: if (!d.flags.annot) return false; break;
      case Kind::let: if (!d.flags.let) return false; break;
      default: break;
    }
    for (const auto& k : x->kids())
      if (!ok(k)) return false;
    return true;
  };
  return ok(n);
}

Term shrink(const std::string& name, const Term& m, const Domain& d, const CheckOptions& o, std::string& detail) {
  return shrink_term(m, [&](const Term& c) {
    if (!in_domain(c, d)) return false;
    const Verdict v = check_one(name, c, o);
    if (v.kind != Verdict::Kind::fail) return false;
    detail = v.detail;
    return true;
  });
}

}  // namespace

Term shrink_term(Term m, const std::function<bool(const Term&)>& still_fails) {
  for (bool progress = true; progress;) {
    progress = false;
    std::vector<Term> candidates;
    std::function<void(const NodePtr&, TermPath&)> walk = [&](const NodePtr& n, TermPath& path) {
      if (n->sort() == Sort::term)
        for (const auto& k : n->kids())
          if (k->sort() == Sort::term) candidates.emplace_back(replace_at(m.node(), path, k));
      for (std::size_t i = 0; i < n->kids().size(); ++i) {
        path.push_back(static_cast<std::uint8_t>(i));
        walk(n->kid(i), path);
        path.pop_back();
      }
    };
    TermPath p;
    walk(m.node(), p);
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Term& a, const Term& b) { return term_size(a.node()) < term_size(b.node()); });
    for (const auto& c : candidates) {
      if (still_fails(c)) {
        m = c;
        progress = true;
        break;
      }
    }
  }
  return m;
}

Verdict check_one(const std::string& name, const Term& m, const CheckOptions& o) {
  try {
    if (name == "tau-confluence") return confluence(m, Rules::tau, o);
    if (name == "sigmatau-confluence") return confluence(m, Rules::sigmatau, o);
    if (name == "sigmatau-termination") return termination(m, o);
    if (name == "simulation-forward") return forward(m, o);
    if (name == "simulation-backward") return backward(m, o);
    if (name == "relativized-confluence") return relativized(m, o);
    if (name == "machine-soundness") return machine_run(m, o, true, false, false);
    if (name == "machine-validity") return machine_run(m, o, false, true, false);
    if (name == "admissible-rules") return machine_run(m, o, false, false, true);
    if (name == "projection-agreement") return projections(m, o);
    if (name == "substitution-lemma") return substitution(m, o);
  } catch (const FuelExhausted& e) {
    return {Verdict::Kind::inconclusive, std::string("fuel exhausted: ") + e.what()};
  } catch (const std::exception& e) {
    return fail(std::string("exception: ") + e.what());
  }
  throw std::invalid_argument("unknown property: " + name);
}

Report check_property(const std::string& name, const GenSpec& spec, std::uint64_t count, const CheckOptions& o) {
  const auto& names = property_names();
  if (std::find(names.begin(), names.end(), name) == names.end())
    throw std::invalid_argument("unknown property: " + name);
  Report rep;
  rep.property = name;

  if (name == "fig1-anachronism") {
    const auto f = fig1(o.join_bound);
    rep.trials = 1;
    const Term expect_left = annot(trans(beta(), app_t(app_t(refl(), beta()), beta())), app(var(1), identity(), identity()));
    const Term expect_right = annot(trans(app_t(refl(), beta()), beta()), app(var(1), identity(), identity()));
    std::ostringstream d;
    d << "beta first: " << show(f.left) << "; tau first: " << show(f.right) << "; "
      << (f.joinable ? "joinable" : "not joinable");
    rep.detail = d.str();
    const bool ok = f.left == expect_left && f.right == expect_right && !f.joinable &&
                    sigmatau_normalize(f.naive_engine) == f.right;
    (ok ? rep.passed : rep.failed) = 1;
    if (!ok) rep.counterexample = f.start;
    return rep;
  }

  const Domain base = domain_of(name);
  const Domain d{meet(base.flags, spec.flags), base.closed || spec.closed};

  auto record = [&](const Term& m, const Verdict& v) {
    switch (v.kind) {
      case Verdict::Kind::pass: ++rep.passed; break;
      case Verdict::Kind::inconclusive: ++rep.inconclusive; break;
      case Verdict::Kind::skip: return;
      case Verdict::Kind::fail:
        ++rep.failed;
        if (!rep.counterexample) {
          std::string detail = v.detail;
          rep.counterexample = o.shrink ? shrink(name, m, d, o, detail) : m;
          rep.detail = detail;
        }
        break;
    }
    ++rep.trials;
  };

  if (o.exhaustive_if_small && spec.size <= 10) {
    rep.exhaustive = true;
    for (const auto& m : enumerate_terms(spec.size, d.flags, d.closed)) record(m, check_one(name, m, o));
    return rep;
  }

  const std::uint32_t lo = d.closed ? 2 : 1;
  for (std::uint64_t i = 0; i < count; ++i) {
    std::mt19937_64 sizes(spec.seed + i);
    bool done = false;
    for (std::uint32_t attempt = 0; attempt < 64 && !done; ++attempt) {
      GenSpec g{spec.seed + i * 1000003ULL + attempt * 7919ULL, 0, d.flags, d.closed};
      g.size = std::uniform_int_distribution<std::uint32_t>(lo, std::max(lo, spec.size))(sizes);
      const Term m = gen_term(g);
      const Verdict v = check_one(name, m, o);
      if (v.kind == Verdict::Kind::skip) continue;
      record(m, v);
      done = true;
    }
    if (!done) {
      ++rep.trials;
      ++rep.inconclusive;
    }
  }
  return rep;
}

}  // namespace cau
