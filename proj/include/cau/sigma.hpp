#pragma once

// The explicit-substitution refinement: σ-rules with trail projections,
// στ-normal forms, meta-level projections, focused forms and lazy Beta.

#include <optional>
#include <vector>

#include "cau/naive.hpp"
#include "cau/rewrite.hpp"
#include "cau/syntax.hpp"

namespace cau {

std::optional<Term> sigma_step(const Term& m);
std::optional<Trail> sigma_step(const Trail& q);
std::optional<Subst> sigma_step(const Subst& s);

Term sigma_normalize(const Term& m, std::uint64_t fuel = kDefaultFuel);
Trail sigma_normalize(const Trail& q, std::uint64_t fuel = kDefaultFuel);
Subst sigma_normalize(const Subst& s, std::uint64_t fuel = kDefaultFuel);

Term sigmatau_normalize(const Term& m, std::uint64_t fuel = kDefaultFuel);
Trail sigmatau_normalize(const Trail& q, std::uint64_t fuel = kDefaultFuel);
Subst sigmatau_normalize(const Subst& s, std::uint64_t fuel = kDefaultFuel);

bool sigmatau_equiv(const Term& a, const Term& b, std::uint64_t fuel = kDefaultFuel);

/// ⌊M⌋ and ⌈M⌉ at the meta level: split the top annotation of στ(M).
Term erase_meta(const Term& m, std::uint64_t fuel = kDefaultFuel);
Trail trailify_meta(const Term& m, std::uint64_t fuel = kDefaultFuel);

/// ⟨M⟩ = ⌈M⌉ ▷ ⌊M⌋ (meta-level projections).
Term focus(const Term& m, std::uint64_t fuel = kDefaultFuel);

/// Beta redexes reachable through evaluation contexts (never under an
/// erasure, never inside a trail), in pre-order.
std::vector<Redex> beta_sigma_redexes(const Term& m);

/// The lazy contractum in place.  Projections stay explicit except the
/// inspection trail, which is στ-normalized to feed the replacement.
Term beta_sigma_contract(const Term& m, const Redex& r, std::uint64_t fuel = kDefaultFuel);

}  // namespace cau
