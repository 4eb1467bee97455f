#include "cau/sigma.hpp"

#include <stdexcept>

namespace cau {

namespace {

template <typename R>
std::optional<R> step_as(const R& x, Rules rules) {
  if (auto r = rewrite_step(x.node(), rules)) return R(r->result);
  return std::nullopt;
}

}  // namespace

std::optional<Term> sigma_step(const Term& m) { return step_as(m, Rules::sigma); }
std::optional<Trail> sigma_step(const Trail& q) { return step_as(q, Rules::sigma); }
std::optional<Subst> sigma_step(const Subst& s) { return step_as(s, Rules::sigma); }

Term sigma_normalize(const Term& m, std::uint64_t fuel) { return Term(normalize(m.node(), Rules::sigma, fuel)); }
Trail sigma_normalize(const Trail& q, std::uint64_t fuel) { return Trail(normalize(q.node(), Rules::sigma, fuel)); }
Subst sigma_normalize(const Subst& s, std::uint64_t fuel) { return Subst(normalize(s.node(), Rules::sigma, fuel)); }

Term sigmatau_normalize(const Term& m, std::uint64_t fuel) {
  return Term(normalize(m.node(), Rules::sigmatau, fuel));
}
Trail sigmatau_normalize(const Trail& q, std::uint64_t fuel) {
  return Trail(normalize(q.node(), Rules::sigmatau, fuel));
}
Subst sigmatau_normalize(const Subst& s, std::uint64_t fuel) {
  return Subst(normalize(s.node(), Rules::sigmatau, fuel));
}

bool sigmatau_equiv(const Term& a, const Term& b, std::uint64_t fuel) {
  return sigmatau_normalize(a, fuel) == sigmatau_normalize(b, fuel);
}

Term erase_meta(const Term& m, std::uint64_t fuel) {
  auto n = sigmatau_normalize(m, fuel);
  return n.is(Kind::annot) ? n.term(1) : n;
}

Trail trailify_meta(const Term& m, std::uint64_t fuel) {
  auto n = sigmatau_normalize(m, fuel);
  return n.is(Kind::annot) ? n.trail(0) : refl();
}

Term focus(const Term& m, std::uint64_t fuel) {
  auto n = sigmatau_normalize(m, fuel);
  return n.is(Kind::annot) ? n : annot(refl(), n);
}

namespace {

void collect(const NodePtr& root, const NodePtr& n, TermPath& path, std::vector<Redex>& out) {
  if (n->sort() == Sort::term) {
    switch (n->kind()) {
      case Kind::app:
        if (n->kid(0)->kind() == Kind::lam) out.push_back({path, RedexKind::beta, {}});
        break;
      case Kind::let:
        if (n->kid(0)->kind() == Kind::bang) out.push_back({path, RedexKind::beta_bang, {}});
        break;
      case Kind::inspect:
        if (auto b = nearest_bang(root, path)) out.push_back({path, RedexKind::inspect, *b});
        break;
      case Kind::erase:
        return;
      default:
        break;
    }
  }
  for (std::size_t i = 0; i < n->kids().size(); ++i) {
    if (n->kid(i)->sort() == Sort::trail) continue;
    path.push_back(static_cast<std::uint8_t>(i));
    collect(root, n->kid(i), path, out);
    path.pop_back();
  }
}

}  // namespace

std::vector<Redex> beta_sigma_redexes(const Term& m) {
  std::vector<Redex> out;
  TermPath path;
  collect(m.node(), m.node(), path, out);
  return out;
}

Term beta_sigma_contract(const Term& m, const Redex& r, std::uint64_t fuel) {
  const Term sub(subterm_at(m.node(), r.path));
  Term contractum;
  switch (r.kind) {
    case RedexKind::beta: {
      if (!sub.is(Kind::app) || !sub.term(0).is(Kind::lam)) throw std::invalid_argument("no beta redex at " + show_path(r.path));
      const Term body = sub.term(0).term(0);
      const Term arg = sub.term(1);
      contractum = annot(trans(app_t(lam_t(extract(body)), extract(arg)), beta()),
                         closure(erase(body), cons(erase(arg), id())));
      break;
    }
    case RedexKind::beta_bang: {
      if (!sub.is(Kind::let) || !sub.term(0).is(Kind::bang))
        throw std::invalid_argument("no let-bang redex at " + show_path(r.path));
      const Term boxed = sub.term(0);
      const Term body = sub.term(1);
      contractum = annot(trans(let_t(refl(), extract(body)), beta_bang()),
                         closure(erase(body), cons(annot(boxed.trail(0), boxed.term(1)), id())));
      break;
    }
    case RedexKind::inspect: {
      if (!sub.is(Kind::inspect)) throw std::invalid_argument("no inspection at " + show_path(r.path));
      const Term bang_node(subterm_at(m.node(), r.bang_path));
      if (!bang_node.is(Kind::bang)) throw std::invalid_argument("no bang at " + show_path(r.bang_path));
      const Trail history = sigmatau_normalize(trans(bang_node.trail(0), extract(bang_node.term(1))), fuel);
      if (!is_pure(history)) throw SyntaxError("malformed history: " + show(history));
      // Trails carried by the branches stay in the term; the replacement
      // then runs on the erased branches.
      const Trail own = sigmatau_normalize(extract(sub), fuel);
      if (own == refl()) {
        contractum = annot(ti(), apply_replacement(history, branches_of(sub)));
      } else {
        Replacement<Term> erased = branches_of(sub);
        for (auto& b : erased) b = erase(b);
        contractum = annot(trans(extract(sub), ti()), apply_replacement(history, erased));
      }
      break;
    }
  }
  return Term(replace_at(m.node(), r.path, contractum.node()));
}

}  // namespace cau
