#pragma once

// Call-by-value abstract machine: stack of (trail | code | env) tuples plus
// a dump of values.  Stacks and dumps are stored with the top element at
// the back of the vector.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cau/rewrite.hpp"
#include "cau/syntax.hpp"

namespace cau {

struct MachineClosure;
using ClosurePtr = std::shared_ptr<const MachineClosure>;

struct Value {
  Trail trail;
  ClosurePtr closure;
};

struct EnvCell;
/// Persistent list; nullptr is the empty environment.
using Env = std::shared_ptr<const EnvCell>;

struct EnvCell {
  Value head;
  Env tail;
  std::size_t length;
};

Env env_cons(Value v, Env tail);
std::size_t env_length(const Env& e);
std::vector<Value> env_values(const Env& e);  // head first

/// ⌊(λM)[e]⌋ or !_q C.
struct MachineClosure {
  enum class Kind : std::uint8_t { lam, bang } kind;
  Term body;        // lam: the body M of λM
  Env env;          // lam
  Trail trail;      // bang
  ClosurePtr inner; // bang
};

ClosurePtr lam_closure(Term body, Env env);
ClosurePtr bang_closure(Trail q, ClosurePtr inner);

enum class CodeKind : std::uint8_t { term, app_node, bang_node, let_node, inspect_node };

struct Code {
  CodeKind kind;
  Term term;  // term, and the body N of let(N)
};

struct Tuple {
  Trail trail;
  Code code;
  Env env;
};

struct Config {
  std::vector<Tuple> stack;  // back = top
  std::vector<Value> dump;   // back = top
};

Config inject(const Term& m);

/// e(n): the n-th closure, without its trail.
std::optional<ClosurePtr> env_lookup(const Env& e, std::uint32_t n);

/// r=1, t=2, β=3, β!=4, ti=5, lam=6, app=7, let=8, tb=9.
Term trail_to_open_term(const Trail& q);

/// 𝓘(q, π, D) over the context below the inspection node; nullopt when the
/// inspection is not under any bang.
std::optional<Trail> materialize_inspection_trail(const Trail& q, const std::vector<Tuple>& stack,
                                                  const std::vector<Value>& dump,
                                                  std::uint64_t fuel = kDefaultFuel);

struct StepResult {
  enum class Kind : std::uint8_t { next, final, stuck } kind;
  int rule = 0;
  Config next;
  std::optional<Value> value;
  std::string reason;
};

StepResult step(const Config& c, std::uint64_t fuel = kDefaultFuel);

struct RunResult {
  enum class Outcome : std::uint8_t { final, stuck, fuel_exhausted } outcome;
  std::optional<Value> value;
  std::string reason;
  std::vector<std::pair<int, Config>> trace;  // applied rule, successor
  Config last;
};

RunResult run(const Config& c, std::uint64_t fuel, bool keep_trace = true);

// --- denotations -------------------------------------------------------------

Term denote_closure(const MachineClosure& c);
Term denote_value(const Value& v);
Subst denote_env(const Env& e);
Term denote_config(const Config& c);

struct ContextDenotation {
  Term frame;     // the context with var(1) as a placeholder at the hole
  TermPath hole;
  Term plug(const Term& m) const;
};
ContextDenotation denote_context(const Config& c);

// --- validation ----------------------------------------------------------------

struct Validity {
  enum class Kind : std::uint8_t { term_config, context_config, invalid } kind;
  std::string reason;
};
Validity validate(const Config& c);

/// Every tuple, value and environment trail is pure and στ-normal.
bool trails_normalized(const Config& c);

std::string render_config(const Config& c);
std::string render_value(const Value& v);

}  // namespace cau
