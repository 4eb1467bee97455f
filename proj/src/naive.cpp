#include "cau/naive.hpp"

#include <stdexcept>

namespace cau {

Term apply_replacement(const Trail& q, const Replacement<Term>& theta) {
  auto slot = [&theta](Slot s) { return theta[static_cast<std::size_t>(s)]; };
  switch (q.kind()) {
    case Kind::refl: return slot(Slot::r);
    case Kind::beta: return slot(Slot::beta);
    case Kind::beta_bang: return slot(Slot::beta_bang);
    case Kind::ti: return slot(Slot::ti);
    case Kind::trans:
      return app(slot(Slot::t), apply_replacement(q.trail(0), theta), apply_replacement(q.trail(1), theta));
    case Kind::lam_t: return app(slot(Slot::lam), apply_replacement(q.trail(0), theta));
    case Kind::app_t:
      return app(slot(Slot::app), apply_replacement(q.trail(0), theta), apply_replacement(q.trail(1), theta));
    case Kind::let_t:
      return app(slot(Slot::let), apply_replacement(q.trail(0), theta), apply_replacement(q.trail(1), theta));
    case Kind::trpl: {
      Term out = slot(Slot::tb);
      for (std::size_t i = 0; i < kSlots; ++i) out = app(out, apply_replacement(q.trail(i), theta));
      return out;
    }
    case Kind::extract:
      throw SyntaxError("trail replacement needs a pure trail, found ext(" + show(q.term(0)) + ")");
    default:
      break;
  }
  throw SyntaxError("not a trail");
}

namespace {

void require_plain(const NodePtr& n, const char* what) {
  if (n->kind() == Kind::closure || n->kind() == Kind::erase)
    throw SyntaxError(std::string(what) + " is undefined on explicit substitutions and erasures");
}

NodePtr lift_node(const NodePtr& n, std::uint32_t by, std::uint32_t cutoff) {
  require_plain(n, "lifting");
  switch (n->kind()) {
    case Kind::var:
      return n->index() > cutoff ? var(n->index() + by).node() : n;
    case Kind::lam:
      return with_kids(n, {lift_node(n->kid(0), by, cutoff + 1)});
    case Kind::let:
      return with_kids(n, {lift_node(n->kid(0), by, cutoff), lift_node(n->kid(1), by, cutoff + 1)});
    case Kind::bang:
    case Kind::annot:
      return with_kids(n, {n->kid(0), lift_node(n->kid(1), by, cutoff)});
    default: {
      std::vector<NodePtr> kids;
      kids.reserve(n->kids().size());
      for (const auto& k : n->kids()) kids.push_back(lift_node(k, by, cutoff));
      return with_kids(n, std::move(kids));
    }
  }
}

// Substitution under `depth` binders crossed since the root of the call.
NodePtr subst_node(const NodePtr& n, std::uint32_t depth, std::uint32_t p, const std::vector<Term>& ns) {
  require_plain(n, "meta-substitution");
  const auto k = static_cast<std::uint32_t>(ns.size());
  switch (n->kind()) {
    case Kind::var: {
      const auto i = n->index();
      if (i <= depth) return n;
      const auto j = i - depth;
      if (j <= k) return depth == 0 ? ns[j - 1].node() : lift_node(ns[j - 1].node(), depth, 0);
      return var(j - k + p + depth).node();
    }
    case Kind::lam:
      return with_kids(n, {subst_node(n->kid(0), depth + 1, p, ns)});
    case Kind::let:
      return with_kids(n, {subst_node(n->kid(0), depth, p, ns), subst_node(n->kid(1), depth + 1, p, ns)});
    case Kind::bang:
    case Kind::annot:
      return with_kids(n, {n->kid(0), subst_node(n->kid(1), depth, p, ns)});
    default: {
      std::vector<NodePtr> kids;
      kids.reserve(n->kids().size());
      for (const auto& c : n->kids()) kids.push_back(subst_node(c, depth, p, ns));
      return with_kids(n, std::move(kids));
    }
  }
}

}  // namespace

Term lift(const Term& m, std::uint32_t by, std::uint32_t cutoff) {
  return Term(lift_node(m.node(), by, cutoff));
}

Term meta_subst(const Term& m, std::uint32_t p, const std::vector<Term>& ns) {
  return Term(subst_node(m.node(), 0, p, ns));
}

std::optional<Term> tau_step(const Term& m) {
  if (auto r = rewrite_step(m.node(), Rules::tau)) return Term(r->result);
  return std::nullopt;
}

std::optional<Trail> tau_step(const Trail& q) {
  if (auto r = rewrite_step(q.node(), Rules::tau)) return Trail(r->result);
  return std::nullopt;
}

Term tau_normalize(const Term& m, std::uint64_t fuel) { return Term(normalize(m.node(), Rules::tau, fuel)); }
Trail tau_normalize(const Trail& q, std::uint64_t fuel) { return Trail(normalize(q.node(), Rules::tau, fuel)); }

const char* redex_name(RedexKind k) {
  switch (k) {
    case RedexKind::beta: return "beta";
    case RedexKind::beta_bang: return "beta-bang";
    case RedexKind::inspect: return "inspect";
  }
  return "?";
}

std::optional<TermPath> nearest_bang(const NodePtr& root, const TermPath& path) {
  std::optional<TermPath> found;
  NodePtr cur = root;
  TermPath prefix;
  for (auto i : path) {
    switch (cur->kind()) {
      case Kind::bang:
        found = prefix;
        break;
      case Kind::lam:
      case Kind::app:
      case Kind::let:
      case Kind::annot:
      case Kind::inspect:
        break;
      case Kind::closure:
        if (i != 0) found.reset();
        break;
      default:
        found.reset();
        break;
    }
    prefix.push_back(i);
    cur = cur->kid(i);
  }
  return found;
}

namespace {

void collect_redexes(const NodePtr& n, TermPath& path, const std::optional<TermPath>& bang,
                     std::vector<Redex>& out) {
  switch (n->kind()) {
    case Kind::app:
      if (n->kid(0)->kind() == Kind::lam) out.push_back({path, RedexKind::beta, {}});
      break;
    case Kind::let:
      if (n->kid(0)->kind() == Kind::bang) out.push_back({path, RedexKind::beta_bang, {}});
      break;
    case Kind::inspect:
      if (bang) out.push_back({path, RedexKind::inspect, *bang});
      break;
    default:
      break;
  }
  auto descend = [&](std::size_t i, const std::optional<TermPath>& b) {
    path.push_back(static_cast<std::uint8_t>(i));
    collect_redexes(n->kid(i), path, b, out);
    path.pop_back();
  };
  switch (n->kind()) {
    case Kind::bang:
      descend(1, path);
      break;
    case Kind::annot:
      descend(1, bang);
      break;
    default:
      if (n->sort() == Sort::term)
        for (std::size_t i = 0; i < n->kids().size(); ++i) descend(i, bang);
      break;
  }
}

}  // namespace

std::vector<Redex> find_principal_redexes(const Term& m) {
  if (!is_pure(m)) throw SyntaxError("principal redexes are defined on pure terms");
  std::vector<Redex> out;
  TermPath path;
  collect_redexes(m.node(), path, std::nullopt, out);
  return out;
}

Term principal_contract(const Term& m, const Redex& r) {
  const Term sub(subterm_at(m.node(), r.path));
  Term contractum;
  switch (r.kind) {
    case RedexKind::beta:
      if (!sub.is(Kind::app) || !sub.term(0).is(Kind::lam)) throw std::invalid_argument("no beta redex at " + show_path(r.path));
      contractum = annot(beta(), meta_subst(sub.term(0).term(0), 0, {sub.term(1)}));
      break;
    case RedexKind::beta_bang: {
      if (!sub.is(Kind::let) || !sub.term(0).is(Kind::bang))
        throw std::invalid_argument("no let-bang redex at " + show_path(r.path));
      const Term boxed = sub.term(0);
      contractum = annot(beta_bang(), meta_subst(sub.term(1), 0, {annot(boxed.trail(0), boxed.term(1))}));
      break;
    }
    case RedexKind::inspect: {
      if (!sub.is(Kind::inspect)) throw std::invalid_argument("no inspection at " + show_path(r.path));
      const Term bang_node(subterm_at(m.node(), r.bang_path));
      if (!bang_node.is(Kind::bang)) throw std::invalid_argument("no bang at " + show_path(r.bang_path));
      contractum = annot(ti(), apply_replacement(bang_node.trail(0), branches_of(sub)));
      break;
    }
  }
  return Term(replace_at(m.node(), r.path, contractum.node()));
}

std::optional<Term> cau_step(const Term& m, std::uint64_t fuel) {
  const auto redexes = find_principal_redexes(m);
  if (redexes.empty()) return std::nullopt;
  return tau_normalize(principal_contract(m, redexes.front()), fuel);
}

std::vector<Term> cau_successors(const Term& m, std::uint64_t fuel) {
  std::vector<Term> out;
  for (const auto& r : find_principal_redexes(m)) out.push_back(tau_normalize(principal_contract(m, r), fuel));
  return out;
}

bool is_cbv_value(const Term& m) {
  const NodePtr* n = &m.node();
  while ((*n)->kind() == Kind::bang) n = &(*n)->kid(1);
  return (*n)->kind() == Kind::lam;
}

namespace {

CbvFocus focus_at(const NodePtr& n, TermPath& path, const std::optional<TermPath>& bang) {
  auto value = [] { return CbvFocus{CbvFocus::Kind::value, {}, {}}; };
  auto stuck = [](std::string why) { return CbvFocus{CbvFocus::Kind::stuck, {}, std::move(why)}; };
  auto redex = [&path](RedexKind k, TermPath b = {}) { return CbvFocus{CbvFocus::Kind::redex, {path, k, std::move(b)}, {}}; };
  auto sub = [&](std::size_t i, const std::optional<TermPath>& b) {
    path.push_back(static_cast<std::uint8_t>(i));
    auto r = focus_at(n->kid(i), path, b);
    path.pop_back();
    return r;
  };
  switch (n->kind()) {
    case Kind::lam:
      return value();
    case Kind::var:
      return stuck("env underflow");
    case Kind::annot:
      return sub(1, bang);
    case Kind::bang:
      return sub(1, path);
    case Kind::app: {
      auto f = sub(0, bang);
      if (f.kind != CbvFocus::Kind::value) return f;
      auto a = sub(1, bang);
      if (a.kind != CbvFocus::Kind::value) return a;
      if (n->kid(0)->kind() != Kind::lam) return stuck("non-lambda application");
      return redex(RedexKind::beta);
    }
    case Kind::let: {
      auto d = sub(0, bang);
      if (d.kind != CbvFocus::Kind::value) return d;
      if (n->kid(0)->kind() != Kind::bang) return stuck("non-bang let definiens");
      return redex(RedexKind::beta_bang);
    }
    case Kind::inspect: {
      for (std::size_t i = 0; i < kSlots; ++i) {
        auto b = sub(i, bang);
        if (b.kind != CbvFocus::Kind::value) return b;
      }
      if (!bang) return stuck("inspection-locked");
      return redex(RedexKind::inspect, *bang);
    }
    default:
      throw SyntaxError("call-by-value evaluation is defined on pure terms");
  }
}

}  // namespace

CbvFocus cbv_focus(const Term& m) {
  TermPath path;
  return focus_at(m.node(), path, std::nullopt);
}

EvalResult cau_eval_cbv(const Term& m, std::uint64_t fuel) {
  Term cur = tau_normalize(m);
  std::uint64_t steps = 0;
  for (;;) {
    auto f = cbv_focus(cur);
    if (f.kind == CbvFocus::Kind::value) return {EvalResult::Outcome::value, cur, steps, {}};
    if (f.kind == CbvFocus::Kind::stuck) return {EvalResult::Outcome::stuck, cur, steps, f.reason};
    if (steps == fuel) return {EvalResult::Outcome::fuel_exhausted, cur, steps, {}};
    cur = tau_normalize(principal_contract(cur, f.redex));
    ++steps;
  }
}

EvalResult cau_normalize(const Term& m, std::uint64_t fuel) {
  Term cur = tau_normalize(m);
  std::uint64_t steps = 0;
  for (;;) {
    const auto redexes = find_principal_redexes(cur);
    if (redexes.empty()) return {EvalResult::Outcome::value, cur, steps, {}};
    if (steps == fuel) return {EvalResult::Outcome::fuel_exhausted, cur, steps, {}};
    cur = tau_normalize(principal_contract(cur, redexes.front()));
    ++steps;
  }
}

}  // namespace cau
