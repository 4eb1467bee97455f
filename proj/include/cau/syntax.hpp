#pragma once

// Shared syntax trees for audited terms, trails and explicit substitutions.
//
// All three sorts live in one immutable node family so that rewriting,
// positions and one-step enumeration can be written once.  The typed
// handles Term, Trail and Subst are thin views that pin down the sort.

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cau {

enum class Sort : std::uint8_t { term, trail, subst };

enum class Kind : std::uint8_t {
  // terms
  var,      // de Bruijn index n >= 1
  lam,      // [body]
  app,      // [fun, arg]
  let,      // [definiens, body]; body binds index 1
  bang,     // [trail, body]
  annot,    // [trail, body]
  inspect,  // [nine branches]
  closure,  // [body, subst]
  erase,    // [body]
  // trails
  refl,
  trans,      // [left, right]
  beta,
  beta_bang,
  ti,
  lam_t,      // [sub]
  app_t,      // [left, right]
  let_t,      // [left, right]
  trpl,       // [nine branches]
  extract,    // [term]
  // substitutions
  id,
  shift,
  cons,  // [head term, tail subst]
  comp,  // [first, second]
};

Sort sort_of(Kind k);
const char* kind_name(Kind k);

class Node;
using NodePtr = std::shared_ptr<const Node>;

/// Immutable syntax node.  Children are ordered; the sort of each child is
/// fixed by the parent kind (see child_sort).
class Node {
 public:
  Node(Kind kind, std::uint32_t index, std::vector<NodePtr> kids);

  Kind kind() const { return kind_; }
  Sort sort() const { return sort_of(kind_); }
  std::uint32_t index() const { return index_; }
  const std::vector<NodePtr>& kids() const { return kids_; }
  const NodePtr& kid(std::size_t i) const { return kids_[i]; }
  std::size_t hash() const { return hash_; }
  std::uint32_t size() const { return size_; }
  /// True iff a Closure, Erase or Extract occurs anywhere below (inclusive).
  bool has_explicit() const { return has_explicit_; }
  /// True iff an Annot occurs anywhere below (inclusive).
  bool has_annot() const { return has_annot_; }

 private:
  Kind kind_;
  std::uint32_t index_;
  std::vector<NodePtr> kids_;
  std::size_t hash_;
  std::uint32_t size_;
  bool has_explicit_;
  bool has_annot_;
};

NodePtr make_node(Kind kind, std::vector<NodePtr> kids, std::uint32_t index = 0);
NodePtr with_kids(const NodePtr& n, std::vector<NodePtr> kids);
Sort child_sort(Kind parent, std::size_t i);
std::size_t arity(Kind k);

bool equal(const NodePtr& a, const NodePtr& b);

struct NodeHash {
  std::size_t operator()(const NodePtr& n) const { return n->hash(); }
};
struct NodeEq {
  bool operator()(const NodePtr& a, const NodePtr& b) const { return equal(a, b); }
};

class SyntaxError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <Sort S>
class Ref {
 public:
  Ref() = default;
  explicit Ref(NodePtr n) : node_(std::move(n)) {
    if (!node_ || node_->sort() != S) throw SyntaxError("syntax node of the wrong sort");
  }

  const NodePtr& node() const { return node_; }
  Kind kind() const { return node_->kind(); }
  std::uint32_t index() const { return node_->index(); }
  std::uint32_t size() const { return node_->size(); }
  std::size_t arity() const { return node_->kids().size(); }

  Ref<Sort::term> term(std::size_t i) const { return Ref<Sort::term>(node_->kid(i)); }
  Ref<Sort::trail> trail(std::size_t i) const { return Ref<Sort::trail>(node_->kid(i)); }
  Ref<Sort::subst> subst(std::size_t i) const { return Ref<Sort::subst>(node_->kid(i)); }

  bool is(Kind k) const { return node_->kind() == k; }

  friend bool operator==(const Ref& a, const Ref& b) { return equal(a.node_, b.node_); }

 private:
  NodePtr node_;
};

using Term = Ref<Sort::term>;
using Trail = Ref<Sort::trail>;
using Subst = Ref<Sort::subst>;

/// Slots of a trail replacement, in the fixed order r, t, β, β!, ti, lam, app, let, tb.
enum class Slot : std::uint8_t { r, t, beta, beta_bang, ti, lam, app, let, tb };
inline constexpr std::size_t kSlots = 9;

template <typename T>
using Replacement = std::array<T, kSlots>;

// --- constructors -----------------------------------------------------------

Term var(std::uint32_t n);
Term lam(Term body);
Term app(Term fun, Term arg);
Term app(Term fun, Term arg1, Term arg2);
Term let_bang(Term def, Term body);
Term bang(Trail q, Term body);
Term bang(Term body);  // ! M, i.e. bang with the reflexivity trail
Term annot(Trail q, Term body);
Term inspect(const Replacement<Term>& branches);
Term closure(Term body, Subst s);
Term erase(Term body);

Trail refl();
Trail trans(Trail a, Trail b);
Trail beta();
Trail beta_bang();
Trail ti();
Trail lam_t(Trail q);
Trail app_t(Trail a, Trail b);
Trail let_t(Trail a, Trail b);
Trail trpl(const Replacement<Trail>& branches);
Trail extract(Term m);

Subst id();
Subst shift();
Subst cons(Term head, Subst tail);
Subst comp(Subst first, Subst second);

Replacement<Term> branches_of(const Term& inspection);
Replacement<Trail> branches_of(const Trail& tb);

// --- queries ----------------------------------------------------------------

bool is_pure(const NodePtr& n);
inline bool is_pure(const Term& m) { return is_pure(m.node()); }
inline bool is_pure(const Trail& q) { return is_pure(q.node()); }
inline bool is_pure(const Subst& s) { return is_pure(s.node()); }

/// Largest dangling de Bruijn index of M, 0 when M is closed.  Trails are
/// not scanned: substitutions never enter them, so indices under Extract are
/// inert.
std::uint32_t max_free_index(const Term& m);

Term church(std::uint32_t n);

/// Compact de Bruijn rendering for diagnostics, e.g. `λ.(1 1)`.
std::string show(const NodePtr& n);
inline std::string show(const Term& m) { return show(m.node()); }
inline std::string show(const Trail& q) { return show(q.node()); }
inline std::string show(const Subst& s) { return show(s.node()); }

template <Sort S>
std::ostream& operator<<(std::ostream& os, const Ref<S>& r) {
  return os << show(r.node());
}

}  // namespace cau
