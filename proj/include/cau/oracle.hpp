#pragma once

// Seeded term generation, exhaustive enumeration and the property harness.

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cau/naive.hpp"
#include "cau/rewrite.hpp"
#include "cau/syntax.hpp"

namespace cau {

struct GenFlags {
  bool bang = true;
  bool inspect = true;
  bool closure = true;
  bool erase = true;
  bool extract = true;
  bool annot = true;  // trail annotations q ▷ M
  bool let = true;
};

/// The pure, annotation-free fragment the machine accepts.
GenFlags machine_flags();
/// CAU⁻ with annotations: no closures or projections.
GenFlags naive_flags();

struct GenSpec {
  std::uint64_t seed = 0;
  std::uint32_t size = 10;  // node budget: term, trail and substitution nodes
  GenFlags flags;
  bool closed = false;
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A term of exactly `size` nodes when one exists.  Open terms use indices
/// up to one above the binding depth.
Term gen_term(const GenSpec& spec);

/// Node count used by the generator and the enumerator.
std::uint32_t term_size(const NodePtr& n);

/// Every term of at most `max_size` nodes over a reduced alphabet: leaf
/// trails r and b, substitutions id, ↑ and one-element conses.
std::vector<Term> enumerate_terms(std::uint32_t max_size, const GenFlags& flags, bool closed);

// --- one-step relations ----------------------------------------------------------

enum class StepRules : std::uint8_t { tau, sigma, sigmatau, beta_sigma, cau_principal };

const char* step_rules_name(StepRules r);
std::optional<StepRules> parse_step_rules(const std::string& s);

struct Successor {
  TermPath path;
  std::string rule;
  NodePtr result;
};

/// Every single-step rewrite of `x`.  cau_principal successors are
/// τ-normalized, as one step of the naive calculus.
std::vector<Successor> enumerate_one_step(const NodePtr& x, StepRules rules, std::uint64_t fuel = kDefaultFuel);

/// Common reduct.  Confluent sets compare normal forms; the Beta relations
/// search `bound` steps on each side, comparing modulo στ.
bool joinable(const NodePtr& x, const NodePtr& y, StepRules rules, std::uint32_t bound = 8,
              std::uint64_t fuel = kDefaultFuel);

/// β̄ on focused forms: every β-contraction of στ(M) by meta-substitution,
/// then focused.
std::vector<Term> beta_focused_step(const Term& m, std::uint64_t fuel = kDefaultFuel);

// --- order anomaly --------------------------------------------------------------------

/// β with naive explicit substitutions: (λM) N → β ▷ M[N·id].
Term naive_es_beta(const Term& redex);

struct Fig1Result {
  Term start;                // (λ. M 1 1) (q ▷ N)
  Term left, right;          // στ-normal endpoints: β first, τ first
  Term naive_engine;         // one cau_step from τ(start)
  bool joinable;
};
Fig1Result fig1(std::uint32_t bound = 8);

// --- properties ------------------------------------------------------------------

const std::vector<std::string>& property_names();

struct Report {
  std::string property;
  std::uint64_t trials = 0;
  std::uint64_t passed = 0;
  std::uint64_t failed = 0;
  std::uint64_t inconclusive = 0;
  bool exhaustive = false;
  std::optional<Term> counterexample;  // shrunk
  std::string detail;                  // what went wrong on the counterexample
  bool ok() const { return failed == 0; }
};

struct CheckOptions {
  std::uint64_t fuel = 100'000;          // rewrites per normalization
  std::uint64_t machine_fuel = 500;      // machine transitions per run
  std::uint32_t join_bound = 8;
  bool exhaustive_if_small = true;       // enumerate when size ≤ 10
  bool shrink = true;
};

/// Runs `count` seeded trials (seeds spec.seed, spec.seed+1, …), or every
/// enumerated term when spec.size ≤ 10.  Throws std::invalid_argument on an
/// unknown name.
Report check_property(const std::string& name, const GenSpec& spec, std::uint64_t count,
                      const CheckOptions& opts = {});

/// Greedy shrinking: repeatedly replaces a subterm by one of its own term
/// children, smallest candidate first, while `still_fails` holds.
Term shrink_term(Term m, const std::function<bool(const Term&)>& still_fails);

/// Outcome of one property on one input; `skip` marks an input outside the
/// property's premise.
struct Verdict {
  enum class Kind : std::uint8_t { pass, fail, inconclusive, skip } kind;
  std::string detail;
};
Verdict check_one(const std::string& name, const Term& m, const CheckOptions& opts = {});

}  // namespace cau
