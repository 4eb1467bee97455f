#include "cau/rewrite.hpp"

#include <sstream>
#include <unordered_set>

namespace cau {

std::string show_path(const TermPath& p) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < p.size(); ++i) os << (i ? "," : "") << static_cast<int>(p[i]);
  os << ']';
  return os.str();
}

NodePtr subterm_at(const NodePtr& root, const TermPath& path) {
  NodePtr cur = root;
  for (auto i : path) {
    if (i >= cur->kids().size()) throw SyntaxError("path " + show_path(path) + " leaves the term");
    cur = cur->kid(i);
  }
  return cur;
}

namespace {

NodePtr replace_from(const NodePtr& n, const TermPath& path, std::size_t at, NodePtr repl) {
  if (at == path.size()) return repl;
  if (path[at] >= n->kids().size()) throw SyntaxError("path " + show_path(path) + " leaves the term");
  auto kids = n->kids();
  kids[path[at]] = replace_from(n->kid(path[at]), path, at + 1, std::move(repl));
  return make_node(n->kind(), std::move(kids), n->index());
}

}  // namespace

NodePtr replace_at(const NodePtr& root, const TermPath& path, NodePtr replacement) {
  return replace_from(root, path, 0, std::move(replacement));
}

const char* rules_name(Rules r) {
  switch (r) {
    case Rules::tau: return "tau";
    case Rules::sigma: return "sigma";
    case Rules::sigmatau: return "sigmatau";
  }
  return "?";
}

namespace {

NodePtr mk(Kind k, std::vector<NodePtr> kids, std::uint32_t index = 0) {
  return make_node(k, std::move(kids), index);
}

NodePtr R() { return refl().node(); }
bool is_refl(const NodePtr& n) { return n->kind() == Kind::refl; }

using Emit = std::function<bool(const char*, NodePtr)>;

// --- τ on terms --------------------------------------------------------------

bool tau_term(const NodePtr& n, const Emit& emit) {
  const auto k = n->kind();
  if (k == Kind::annot) {
    const auto& q = n->kid(0);
    const auto& body = n->kid(1);
    if (is_refl(q) && !emit("tau:refl-annot", body)) return false;
    if (body->kind() == Kind::annot &&
        !emit("tau:annot-annot", mk(Kind::annot, {mk(Kind::trans, {q, body->kid(0)}), body->kid(1)})))
      return false;
    return true;
  }
  if (k == Kind::bang) {
    const auto& body = n->kid(1);
    if (body->kind() == Kind::annot &&
        !emit("tau:bang-annot",
              mk(Kind::bang, {mk(Kind::trans, {n->kid(0), body->kid(0)}), body->kid(1)})))
      return false;
    return true;
  }
  if (k == Kind::lam) {
    const auto& body = n->kid(0);
    if (body->kind() == Kind::annot &&
        !emit("tau:lam", mk(Kind::annot, {mk(Kind::lam_t, {body->kid(0)}), mk(Kind::lam, {body->kid(1)})})))
      return false;
    return true;
  }
  if (k == Kind::app || k == Kind::let) {
    const Kind cong = k == Kind::app ? Kind::app_t : Kind::let_t;
    const auto& a = n->kid(0);
    const auto& b = n->kid(1);
    if (a->kind() == Kind::annot &&
        !emit(k == Kind::app ? "tau:app-left" : "tau:let-left",
              mk(Kind::annot, {mk(cong, {a->kid(0), R()}), mk(k, {a->kid(1), b})})))
      return false;
    if (b->kind() == Kind::annot &&
        !emit(k == Kind::app ? "tau:app-right" : "tau:let-right",
              mk(Kind::annot, {mk(cong, {R(), b->kid(0)}), mk(k, {a, b->kid(1)})})))
      return false;
    return true;
  }
  if (k == Kind::inspect) {
    for (std::size_t i = 0; i < kSlots; ++i) {
      const auto& bi = n->kid(i);
      if (bi->kind() != Kind::annot) continue;
      std::vector<NodePtr> trails(kSlots, R());
      trails[i] = bi->kid(0);
      auto kids = n->kids();
      kids[i] = bi->kid(1);
      if (!emit("tau:inspect", mk(Kind::annot, {mk(Kind::trpl, std::move(trails)), mk(Kind::inspect, std::move(kids))})))
        return false;
    }
  }
  return true;
}

// --- τ on trails -------------------------------------------------------------

bool congruence(Kind k) {
  return k == Kind::lam_t || k == Kind::app_t || k == Kind::let_t || k == Kind::trpl;
}

// Pointwise t(a_i, b_i) of two congruence trails of the same kind.
NodePtr fuse(const NodePtr& a, const NodePtr& b) {
  std::vector<NodePtr> kids;
  kids.reserve(a->kids().size());
  for (std::size_t i = 0; i < a->kids().size(); ++i) kids.push_back(mk(Kind::trans, {a->kid(i), b->kid(i)}));
  return mk(a->kind(), std::move(kids));
}

bool tau_trail(const NodePtr& n, const Emit& emit) {
  const auto k = n->kind();
  if (k == Kind::trans) {
    const auto& a = n->kid(0);
    const auto& b = n->kid(1);
    if (is_refl(b) && !emit("tau:trans-refl-right", a)) return false;
    if (is_refl(a) && !emit("tau:trans-refl-left", b)) return false;
    if (a->kind() == Kind::trans &&
        !emit("tau:trans-assoc", mk(Kind::trans, {a->kid(0), mk(Kind::trans, {a->kid(1), b})})))
      return false;
    if (congruence(a->kind())) {
      if (b->kind() == a->kind() && !emit("tau:fuse", fuse(a, b))) return false;
      if (b->kind() == Kind::trans && b->kid(0)->kind() == a->kind() &&
          !emit("tau:fuse-assoc", mk(Kind::trans, {fuse(a, b->kid(0)), b->kid(1)})))
        return false;
    }
    return true;
  }
  if (congruence(k)) {
    bool all_refl = true;
    for (const auto& c : n->kids()) all_refl = all_refl && is_refl(c);
    if (all_refl && !emit("tau:congruence-refl", R())) return false;
  }
  return true;
}

// --- σ: substitutions ---------------------------------------------------------

NodePtr lift_subst(const NodePtr& s) {
  return mk(Kind::cons, {var(1).node(), mk(Kind::comp, {s, shift().node()})});
}

bool sigma_closure(const NodePtr& n, const Emit& emit) {
  const auto& m = n->kid(0);
  const auto& s = n->kid(1);
  auto clo = [](const NodePtr& body, const NodePtr& sub) { return mk(Kind::closure, {body, sub}); };
  switch (m->kind()) {
    case Kind::var: {
      const auto k = m->index();
      switch (s->kind()) {
        case Kind::id:
          return emit("sigma:var-id", m);
        case Kind::shift:
          return emit("sigma:var-shift", var(k + 1).node());
        case Kind::cons:
          if (k == 1) return emit("sigma:var-cons-head", s->kid(0));
          return emit("sigma:var-cons-tail", clo(var(k - 1).node(), s->kid(1)));
        case Kind::comp:
          if (s->kid(0)->kind() == Kind::shift)
            return emit("sigma:var-shift-comp", clo(var(k + 1).node(), s->kid(1)));
          return true;
        default:
          return true;
      }
    }
    case Kind::lam:
      return emit("sigma:lam", mk(Kind::lam, {clo(m->kid(0), lift_subst(s))}));
    case Kind::app:
      return emit("sigma:app", mk(Kind::app, {clo(m->kid(0), s), clo(m->kid(1), s)}));
    case Kind::bang:
      return emit("sigma:bang", mk(Kind::bang, {m->kid(0), clo(m->kid(1), s)}));
    case Kind::let:
      return emit("sigma:let", mk(Kind::let, {clo(m->kid(0), s), clo(m->kid(1), lift_subst(s))}));
    case Kind::annot:
      return emit("sigma:annot", mk(Kind::annot, {m->kid(0), clo(m->kid(1), s)}));
    case Kind::inspect: {
      std::vector<NodePtr> kids;
      kids.reserve(kSlots);
      for (const auto& b : m->kids()) kids.push_back(clo(b, s));
      return emit("sigma:inspect", mk(Kind::inspect, std::move(kids)));
    }
    case Kind::closure:
      return emit("sigma:clos", clo(m->kid(0), mk(Kind::comp, {m->kid(1), s})));
    default:
      return true;  // erasures block until their body is σ-evaluated
  }
}

bool sigma_comp(const NodePtr& n, const Emit& emit) {
  const auto& a = n->kid(0);
  const auto& b = n->kid(1);
  switch (a->kind()) {
    case Kind::id:
      return emit("sigma:id-comp", b);
    case Kind::shift:
      if (b->kind() == Kind::id) return emit("sigma:shift-id", a);
      if (b->kind() == Kind::cons) return emit("sigma:shift-cons", b->kid(1));
      return true;
    case Kind::cons:
      return emit("sigma:map",
                  mk(Kind::cons, {mk(Kind::closure, {a->kid(0), b}), mk(Kind::comp, {a->kid(1), b})}));
    case Kind::comp:
      return emit("sigma:comp-assoc", mk(Kind::comp, {a->kid(0), mk(Kind::comp, {a->kid(1), b})}));
    default:
      return true;
  }
}

// --- σ: trail projections -----------------------------------------------------

bool sigma_erase(const NodePtr& n, const Emit& emit) {
  const auto& m = n->kid(0);
  auto er = [](const NodePtr& x) { return mk(Kind::erase, {x}); };
  switch (m->kind()) {
    case Kind::var:
      return emit("sigma:erase-var", m);
    case Kind::lam:
      return emit("sigma:erase-lam", mk(Kind::lam, {er(m->kid(0))}));
    case Kind::app:
      return emit("sigma:erase-app", mk(Kind::app, {er(m->kid(0)), er(m->kid(1))}));
    case Kind::bang:
      return emit("sigma:erase-bang", m);
    case Kind::let:
      return emit("sigma:erase-let", mk(Kind::let, {er(m->kid(0)), er(m->kid(1))}));
    case Kind::annot:
      return emit("sigma:erase-annot", er(m->kid(1)));
    case Kind::inspect: {
      std::vector<NodePtr> kids;
      kids.reserve(kSlots);
      for (const auto& b : m->kids()) kids.push_back(er(b));
      return emit("sigma:erase-inspect", mk(Kind::inspect, std::move(kids)));
    }
    default:
      return true;
  }
}

bool sigma_extract(const NodePtr& n, const Emit& emit) {
  const auto& m = n->kid(0);
  auto ex = [](const NodePtr& x) { return mk(Kind::extract, {x}); };
  switch (m->kind()) {
    case Kind::var:
      return emit("sigma:ext-var", R());
    case Kind::lam:
      return emit("sigma:ext-lam", mk(Kind::lam_t, {ex(m->kid(0))}));
    case Kind::app:
      return emit("sigma:ext-app", mk(Kind::app_t, {ex(m->kid(0)), ex(m->kid(1))}));
    case Kind::bang:
      return emit("sigma:ext-bang", R());
    case Kind::let:
      return emit("sigma:ext-let", mk(Kind::let_t, {ex(m->kid(0)), ex(m->kid(1))}));
    case Kind::annot:
      return emit("sigma:ext-annot", mk(Kind::trans, {m->kid(0), ex(m->kid(1))}));
    case Kind::inspect: {
      std::vector<NodePtr> kids;
      kids.reserve(kSlots);
      for (const auto& b : m->kids()) kids.push_back(ex(b));
      return emit("sigma:ext-inspect", mk(Kind::trpl, std::move(kids)));
    }
    default:
      return true;
  }
}

}  // namespace

void root_rewrites(const NodePtr& n, Rules rules, const Emit& emit) {
  if (has(rules, Rules::sigma)) {
    bool go = true;
    switch (n->kind()) {
      case Kind::closure: go = sigma_closure(n, emit); break;
      case Kind::comp: go = sigma_comp(n, emit); break;
      case Kind::erase: go = sigma_erase(n, emit); break;
      case Kind::extract: go = sigma_extract(n, emit); break;
      default: break;
    }
    if (!go) return;
  }
  if (has(rules, Rules::tau)) {
    if (n->sort() == Sort::term)
      tau_term(n, emit);
    else if (n->sort() == Sort::trail)
      tau_trail(n, emit);
  }
}

namespace {

std::optional<NodePtr> first_root_rewrite(const NodePtr& n, Rules rules, const char** rule) {
  std::optional<NodePtr> out;
  root_rewrites(n, rules, [&](const char* name, NodePtr r) {
    out = std::move(r);
    if (rule) *rule = name;
    return false;
  });
  return out;
}

bool find_step(const NodePtr& n, Rules rules, TermPath& path, const char** rule, NodePtr& result) {
  if (auto r = first_root_rewrite(n, rules, rule)) {
    result = std::move(*r);
    return true;
  }
  for (std::size_t i = 0; i < n->kids().size(); ++i) {
    path.push_back(static_cast<std::uint8_t>(i));
    if (find_step(n->kid(i), rules, path, rule, result)) return true;
    path.pop_back();
  }
  return false;
}

void collect_steps(const NodePtr& root, const NodePtr& n, Rules rules, TermPath& path,
                   std::vector<Rewrite>& out) {
  root_rewrites(n, rules, [&](const char* name, NodePtr r) {
    out.push_back(Rewrite{path, name, replace_at(root, path, std::move(r))});
    return true;
  });
  for (std::size_t i = 0; i < n->kids().size(); ++i) {
    path.push_back(static_cast<std::uint8_t>(i));
    collect_steps(root, n->kid(i), rules, path, out);
    path.pop_back();
  }
}

class Normalizer {
 public:
  Normalizer(Rules rules, std::uint64_t fuel) : rules_(rules), fuel_(fuel) {}

  NodePtr run(const NodePtr& n) {
    if (normal_.count(n)) return n;
    NodePtr cur = n;
    if (!cur->kids().empty()) {
      std::vector<NodePtr> kids;
      kids.reserve(cur->kids().size());
      for (const auto& k : cur->kids()) kids.push_back(run(k));
      cur = with_kids(cur, std::move(kids));
    }
    if (auto r = first_root_rewrite(cur, rules_, nullptr)) {
      if (fuel_ == 0) throw FuelExhausted(std::string(rules_name(rules_)) + " normalization ran out of fuel");
      --fuel_;
      cur = run(*r);
    }
    normal_.insert(cur);
    return cur;
  }

 private:
  Rules rules_;
  std::uint64_t fuel_;
  // Holding the pointers keeps addresses from being reused within one run.
  std::unordered_set<NodePtr> normal_;
};

}  // namespace

std::optional<Rewrite> rewrite_step(const NodePtr& n, Rules rules) {
  TermPath path;
  const char* rule = nullptr;
  NodePtr result;
  if (!find_step(n, rules, path, &rule, result)) return std::nullopt;
  return Rewrite{path, rule, replace_at(n, path, std::move(result))};
}

std::vector<Rewrite> one_step(const NodePtr& n, Rules rules) {
  std::vector<Rewrite> out;
  TermPath path;
  collect_steps(n, n, rules, path, out);
  return out;
}

NodePtr normalize(const NodePtr& n, Rules rules, std::uint64_t fuel) {
  return Normalizer(rules, fuel).run(n);
}

NodePtr normalize_by_steps(const NodePtr& n, Rules rules, std::uint64_t fuel) {
  NodePtr cur = n;
  while (auto step = rewrite_step(cur, rules)) {
    if (fuel == 0) throw FuelExhausted(std::string(rules_name(rules)) + " normalization ran out of fuel");
    --fuel;
    cur = std::move(step->result);
  }
  return cur;
}

}  // namespace cau
