#include "cau/syntax.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace cau {

Sort sort_of(Kind k) {
  if (k <= Kind::erase) return Sort::term;
  if (k <= Kind::extract) return Sort::trail;
  return Sort::subst;
}

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::var: return "var";
    case Kind::lam: return "lam";
    case Kind::app: return "app";
    case Kind::let: return "let";
    case Kind::bang: return "bang";
    case Kind::annot: return "annot";
    case Kind::inspect: return "inspect";
    case Kind::closure: return "closure";
    case Kind::erase: return "erase";
    case Kind::refl: return "r";
    case Kind::trans: return "t";
    case Kind::beta: return "b";
    case Kind::beta_bang: return "bb";
    case Kind::ti: return "ti";
    case Kind::lam_t: return "lam";
    case Kind::app_t: return "app";
    case Kind::let_t: return "letq";
    case Kind::trpl: return "tb";
    case Kind::extract: return "ext";
    case Kind::id: return "id";
    case Kind::shift: return "shift";
    case Kind::cons: return "cons";
    case Kind::comp: return "comp";
  }
  return "?";
}

std::size_t arity(Kind k) {
  switch (k) {
    case Kind::var:
    case Kind::refl:
    case Kind::beta:
    case Kind::beta_bang:
    case Kind::ti:
    case Kind::id:
    case Kind::shift:
      return 0;
    case Kind::lam:
    case Kind::erase:
    case Kind::lam_t:
    case Kind::extract:
      return 1;
    case Kind::inspect:
    case Kind::trpl:
      return kSlots;
    default:
      return 2;
  }
}

Sort child_sort(Kind parent, std::size_t i) {
  switch (parent) {
    case Kind::bang:
    case Kind::annot:
      return i == 0 ? Sort::trail : Sort::term;
    case Kind::closure:
      return i == 0 ? Sort::term : Sort::subst;
    case Kind::cons:
      return i == 0 ? Sort::term : Sort::subst;
    case Kind::extract:
      return Sort::term;
    case Kind::comp:
      return Sort::subst;
    default:
      return sort_of(parent);
  }
}

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

}  // namespace

Node::Node(Kind kind, std::uint32_t index, std::vector<NodePtr> kids)
    : kind_(kind), index_(index), kids_(std::move(kids)) {
  if (kids_.size() != arity(kind_)) throw SyntaxError(std::string("wrong arity for ") + kind_name(kind_));
  for (std::size_t i = 0; i < kids_.size(); ++i) {
    if (!kids_[i] || kids_[i]->sort() != child_sort(kind_, i))
      throw SyntaxError(std::string("child of the wrong sort under ") + kind_name(kind_));
  }
  if (kind_ == Kind::var && index_ == 0) throw SyntaxError("de Bruijn indices start at 1");
  hash_ = mix(static_cast<std::size_t>(kind_) * 1315423911u, index_);
  size_ = 1;
  has_explicit_ = kind_ == Kind::closure || kind_ == Kind::erase || kind_ == Kind::extract;
  has_annot_ = kind_ == Kind::annot;
  for (const auto& k : kids_) {
    hash_ = mix(hash_, k->hash_);
    size_ += k->size_;
    has_explicit_ = has_explicit_ || k->has_explicit_;
    has_annot_ = has_annot_ || k->has_annot_;
  }
}

NodePtr make_node(Kind kind, std::vector<NodePtr> kids, std::uint32_t index) {
  return std::make_shared<const Node>(kind, index, std::move(kids));
}

NodePtr with_kids(const NodePtr& n, std::vector<NodePtr> kids) {
  bool same = kids.size() == n->kids().size();
  for (std::size_t i = 0; same && i < kids.size(); ++i) same = kids[i] == n->kid(i);
  if (same) return n;
  return make_node(n->kind(), std::move(kids), n->index());
}

bool equal(const NodePtr& a, const NodePtr& b) {
  if (a == b) return true;
  if (a->hash() != b->hash() || a->kind() != b->kind() || a->index() != b->index() ||
      a->size() != b->size())
    return false;
  for (std::size_t i = 0; i < a->kids().size(); ++i)
    if (!equal(a->kid(i), b->kid(i))) return false;
  return true;
}

// --- constructors -----------------------------------------------------------

Term var(std::uint32_t n) { return Term(make_node(Kind::var, {}, n)); }
Term lam(Term body) { return Term(make_node(Kind::lam, {body.node()})); }
Term app(Term fun, Term arg) { return Term(make_node(Kind::app, {fun.node(), arg.node()})); }
Term app(Term fun, Term arg1, Term arg2) { return app(app(std::move(fun), std::move(arg1)), std::move(arg2)); }
Term let_bang(Term def, Term body) { return Term(make_node(Kind::let, {def.node(), body.node()})); }
Term bang(Trail q, Term body) { return Term(make_node(Kind::bang, {q.node(), body.node()})); }
Term bang(Term body) { return bang(refl(), std::move(body)); }
Term annot(Trail q, Term body) { return Term(make_node(Kind::annot, {q.node(), body.node()})); }
Term closure(Term body, Subst s) { return Term(make_node(Kind::closure, {body.node(), s.node()})); }
Term erase(Term body) { return Term(make_node(Kind::erase, {body.node()})); }

Term inspect(const Replacement<Term>& branches) {
  std::vector<NodePtr> kids;
  kids.reserve(kSlots);
  for (const auto& b : branches) kids.push_back(b.node());
  return Term(make_node(Kind::inspect, std::move(kids)));
}

Trail refl() {
  static const Trail r(make_node(Kind::refl, {}));
  return r;
}
Trail beta() {
  static const Trail b(make_node(Kind::beta, {}));
  return b;
}
Trail beta_bang() {
  static const Trail b(make_node(Kind::beta_bang, {}));
  return b;
}
Trail ti() {
  static const Trail t(make_node(Kind::ti, {}));
  return t;
}
Trail trans(Trail a, Trail b) { return Trail(make_node(Kind::trans, {a.node(), b.node()})); }
Trail lam_t(Trail q) { return Trail(make_node(Kind::lam_t, {q.node()})); }
Trail app_t(Trail a, Trail b) { return Trail(make_node(Kind::app_t, {a.node(), b.node()})); }
Trail let_t(Trail a, Trail b) { return Trail(make_node(Kind::let_t, {a.node(), b.node()})); }
Trail extract(Term m) { return Trail(make_node(Kind::extract, {m.node()})); }

Trail trpl(const Replacement<Trail>& branches) {
  std::vector<NodePtr> kids;
  kids.reserve(kSlots);
  for (const auto& b : branches) kids.push_back(b.node());
  return Trail(make_node(Kind::trpl, std::move(kids)));
}

Subst id() {
  static const Subst s(make_node(Kind::id, {}));
  return s;
}
Subst shift() {
  static const Subst s(make_node(Kind::shift, {}));
  return s;
}
Subst cons(Term head, Subst tail) { return Subst(make_node(Kind::cons, {head.node(), tail.node()})); }
Subst comp(Subst first, Subst second) { return Subst(make_node(Kind::comp, {first.node(), second.node()})); }

Replacement<Term> branches_of(const Term& inspection) {
  if (!inspection.is(Kind::inspect)) throw SyntaxError("not an inspection");
  Replacement<Term> out;
  for (std::size_t i = 0; i < kSlots; ++i) out[i] = inspection.term(i);
  return out;
}

Replacement<Trail> branches_of(const Trail& tb) {
  if (!tb.is(Kind::trpl)) throw SyntaxError("not a tb trail");
  Replacement<Trail> out;
  for (std::size_t i = 0; i < kSlots; ++i) out[i] = tb.trail(i);
  return out;
}

// --- queries ----------------------------------------------------------------

bool is_pure(const NodePtr& n) { return !n->has_explicit(); }

namespace {

using IndexSet = std::set<std::uint32_t>;

// Free indices of the body of M[s] mapped through s.
IndexSet through_subst(const NodePtr& s, const IndexSet& body);

IndexSet free_indices(const NodePtr& n) {
  IndexSet out;
  auto add_under = [&out](const IndexSet& inner, std::uint32_t binders) {
    for (auto i : inner)
      if (i > binders) out.insert(i - binders);
  };
  switch (n->kind()) {
    case Kind::var:
      out.insert(n->index());
      break;
    case Kind::lam:
      add_under(free_indices(n->kid(0)), 1);
      break;
    case Kind::let:
      add_under(free_indices(n->kid(0)), 0);
      add_under(free_indices(n->kid(1)), 1);
      break;
    case Kind::bang:
    case Kind::annot:
      out = free_indices(n->kid(1));
      break;
    case Kind::closure:
      out = through_subst(n->kid(1), free_indices(n->kid(0)));
      break;
    default:
      if (n->sort() == Sort::term)
        for (const auto& k : n->kids()) add_under(free_indices(k), 0);
      break;
  }
  return out;
}

IndexSet through_subst(const NodePtr& s, const IndexSet& body) {
  IndexSet out;
  switch (s->kind()) {
    case Kind::id:
      return body;
    case Kind::shift:
      for (auto i : body) out.insert(i + 1);
      return out;
    case Kind::cons: {
      IndexSet rest;
      for (auto i : body) {
        if (i == 1) {
          auto head = free_indices(s->kid(0));
          out.insert(head.begin(), head.end());
        } else {
          rest.insert(i - 1);
        }
      }
      auto tail = through_subst(s->kid(1), rest);
      out.insert(tail.begin(), tail.end());
      return out;
    }
    case Kind::comp:
      return through_subst(s->kid(1), through_subst(s->kid(0), body));
    default:
      throw SyntaxError("not a substitution");
  }
}

}  // namespace

std::uint32_t max_free_index(const Term& m) {
  auto fv = free_indices(m.node());
  return fv.empty() ? 0 : *fv.rbegin();
}

Term church(std::uint32_t n) {
  Term body = var(1);
  for (std::uint32_t i = 0; i < n; ++i) body = app(var(2), body);
  return lam(lam(body));
}

// --- diagnostics ------------------------------------------------------------

namespace {

void show_into(std::ostringstream& os, const NodePtr& n) {
  auto list = [&](const char* head) {
    os << head << '(';
    for (std::size_t i = 0; i < n->kids().size(); ++i) {
      if (i) os << ',';
      show_into(os, n->kid(i));
    }
    os << ')';
  };
  switch (n->kind()) {
    case Kind::var: os << n->index(); break;
    case Kind::lam: os << "λ."; show_into(os, n->kid(0)); break;
    case Kind::app:
      os << '(';
      show_into(os, n->kid(0));
      os << ' ';
      show_into(os, n->kid(1));
      os << ')';
      break;
    case Kind::let: list("let"); break;
    case Kind::bang:
      os << "!{";
      show_into(os, n->kid(0));
      os << "}";
      show_into(os, n->kid(1));
      break;
    case Kind::annot:
      os << '[';
      show_into(os, n->kid(0));
      os << " |> ";
      show_into(os, n->kid(1));
      os << ']';
      break;
    case Kind::inspect: list("iota"); break;
    case Kind::closure:
      show_into(os, n->kid(0));
      os << '[';
      show_into(os, n->kid(1));
      os << ']';
      break;
    case Kind::erase: list("erase"); break;
    case Kind::refl:
    case Kind::beta:
    case Kind::beta_bang:
    case Kind::ti:
    case Kind::id:
    case Kind::shift:
      os << kind_name(n->kind());
      break;
    case Kind::cons:
      show_into(os, n->kid(0));
      os << " . ";
      show_into(os, n->kid(1));
      break;
    case Kind::comp:
      os << '(';
      show_into(os, n->kid(0));
      os << " o ";
      show_into(os, n->kid(1));
      os << ')';
      break;
    default:
      list(kind_name(n->kind()));
      break;
  }
}

}  // namespace

std::string show(const NodePtr& n) {
  std::ostringstream os;
  show_into(os, n);
  return os.str();
}

}  // namespace cau
