#pragma once

// Reference semantics of the calculus without explicit operators:
// trail replacement, principal contractions, τ-normalization and the
// combined step M ↦ τ(N).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cau/rewrite.hpp"
#include "cau/syntax.hpp"

namespace cau {

/// q ϑ: structural recursion on a pure trail.
Term apply_replacement(const Trail& q, const Replacement<Term>& theta);

/// Shift every free index of M that is > cutoff by `by`.
Term lift(const Term& m, std::uint32_t by = 1, std::uint32_t cutoff = 0);

/// M{p ← N⃗}: indices m ≤ k map to N_m, indices n > k to n - k + p.
/// M must be free of closures and erasures.
Term meta_subst(const Term& m, std::uint32_t p, const std::vector<Term>& ns);

std::optional<Term> tau_step(const Term& m);
std::optional<Trail> tau_step(const Trail& q);
Term tau_normalize(const Term& m, std::uint64_t fuel = kDefaultFuel);
Trail tau_normalize(const Trail& q, std::uint64_t fuel = kDefaultFuel);

enum class RedexKind : std::uint8_t { beta, beta_bang, inspect };
const char* redex_name(RedexKind k);

struct Redex {
  TermPath path;
  RedexKind kind;
  TermPath bang_path;  // inspections only: the capturing bang
};

/// Innermost Bang above `path` whose body reaches `path` through a
/// bang-free context (λ, application, let, annotation, inspection branch,
/// closure body).  Erasures and substitutions cut the search.
std::optional<TermPath> nearest_bang(const NodePtr& root, const TermPath& path);

/// All principal redexes of a pure term, leftmost-outermost first.
std::vector<Redex> find_principal_redexes(const Term& m);

/// The contractum in place, not τ-normalized.
Term principal_contract(const Term& m, const Redex& r);

/// Leftmost-outermost contraction followed by τ-normalization.
std::optional<Term> cau_step(const Term& m, std::uint64_t fuel = kDefaultFuel);

/// τ(contract(M, r)) for every principal redex r.
std::vector<Term> cau_successors(const Term& m, std::uint64_t fuel = kDefaultFuel);

/// Weak call-by-value order matching the abstract machine.
struct EvalResult {
  enum class Outcome : std::uint8_t { value, stuck, fuel_exhausted };
  Outcome outcome;
  Term term;
  std::uint64_t steps = 0;
  std::string reason;  // stuck reason
};

/// Next call-by-value redex of a τ-normal term, or why there is none.
struct CbvFocus {
  enum class Kind : std::uint8_t { redex, value, stuck } kind;
  Redex redex;
  std::string reason;
};
CbvFocus cbv_focus(const Term& m);

bool is_cbv_value(const Term& m);

EvalResult cau_eval_cbv(const Term& m, std::uint64_t fuel);

/// Full normal-order reduction (leftmost-outermost cau_step to a normal form).
EvalResult cau_normalize(const Term& m, std::uint64_t fuel);

}  // namespace cau
