#pragma once

// Positions and the first-order rewriting machinery shared by the τ
// (permutation) and σ (substitution and projection) rule sets.

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cau/syntax.hpp"

namespace cau {

/// A position: child selectors from the root (indices into Node::kids()).
using TermPath = std::vector<std::uint8_t>;

std::string show_path(const TermPath& p);

NodePtr subterm_at(const NodePtr& root, const TermPath& path);
NodePtr replace_at(const NodePtr& root, const TermPath& path, NodePtr replacement);

enum class Rules : std::uint8_t { tau = 1, sigma = 2, sigmatau = 3 };

inline bool has(Rules set, Rules part) {
  return (static_cast<std::uint8_t>(set) & static_cast<std::uint8_t>(part)) != 0;
}

const char* rules_name(Rules r);

class FuelExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultFuel = 1'000'000;

/// Every rule of `rules` that matches at the root of `n`, in a fixed order.
/// `emit(rule_name, result)` returns false to stop early.
void root_rewrites(const NodePtr& n, Rules rules,
                   const std::function<bool(const char*, NodePtr)>& emit);

struct Rewrite {
  TermPath path;
  const char* rule;
  NodePtr result;  // the whole rewritten root
};

/// Leftmost-outermost single step; nullopt on a normal form.
std::optional<Rewrite> rewrite_step(const NodePtr& n, Rules rules);

/// All single-step rewrites of `n`, in pre-order of positions.
std::vector<Rewrite> one_step(const NodePtr& n, Rules rules);

/// Normal form.  Children are normalized before the root so each subterm is
/// visited once; confluence makes the strategy unobservable.  Throws
/// FuelExhausted after `fuel` rule applications.
NodePtr normalize(const NodePtr& n, Rules rules, std::uint64_t fuel = kDefaultFuel);

/// Normal form by iterating rewrite_step.  Quadratic; kept as an
/// independent route for cross-checking normalize().
NodePtr normalize_by_steps(const NodePtr& n, Rules rules, std::uint64_t fuel = kDefaultFuel);

}  // namespace cau
