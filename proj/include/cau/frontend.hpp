#pragma once

// Surface syntax, reduction drivers with JSON Lines traces, and the CLI.
//
//   term  := "\" ident+ "." term | "let" ident "=" term "in" term
//          | trail "|>" term | "!" ("{" trail "}")? term | app
//
// `!` extends as far right as λ does.
//   app   := atom+                      (the last atom may be an open form)
//   atom  := ident | "#" n | "(" term ")" | "iota" "{" slot ":" term, … "}"
//          | "erase" "(" term ")" | atom "[" subst "]"
//   trail := r | b | bb | ti | t(q,q) | lam(q) | app(q,q) | letq(q,q)
//          | tb(q × 9) | ext(term)
//   subst := id | shift | "(" subst ")" | term "." subst | subst "o" subst
//
// A file is a sequence of `def NAME = term;` followed by one term.  `#n` is
// a raw de Bruijn index; `--` starts a comment.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cau/naive.hpp"
#include "cau/syntax.hpp"

namespace cau {

class ParseError : public SyntaxError {
 public:
  ParseError(const std::string& msg, std::size_t line, std::size_t column);
  std::size_t line, column;
};

using Prelude = std::map<std::string, Term>;

/// zero … ten, two and six among them; plus, sum, idf, pair.
const Prelude& builtin_prelude();

Term parse_term(std::string_view text, const Prelude& prelude = builtin_prelude());
Trail parse_trail(std::string_view text, const Prelude& prelude = builtin_prelude());

std::string print_term(const Term& m);
/// As print_term, printing closed subterms that equal a prelude entry by name.
std::string print_term_named(const Term& m, const Prelude& names);
std::string print_trail(const Trail& q);
std::string print_subst(const Subst& s);

// --- reduction drivers -----------------------------------------------------------

enum class Engine : std::uint8_t { naive, sigma, machine };
enum class Strategy : std::uint8_t { normal, cbv };

const char* engine_name(Engine e);
std::optional<Engine> parse_engine(std::string_view s);
const char* strategy_name(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view s);

struct TraceRow {
  std::uint64_t step = 0;
  std::string engine;
  std::string rule;                       // "init" on step 0
  std::optional<std::string> position;    // naive and sigma
  std::optional<int> machine_rule;        // machine
  std::optional<std::size_t> stack_depth, dump_depth;  // machine
  std::string rendering;                  // term or configuration
  std::optional<std::string> bang_trail;  // στ-normal history of the nearest bang
  std::optional<std::string> term;        // step 0: the input term
  std::optional<std::string> strategy;    // step 0
};

std::string to_json_line(const TraceRow& row);
TraceRow row_from_json_line(const std::string& line);  // throws std::invalid_argument

struct ReduceResult {
  enum class Outcome : std::uint8_t { done, stuck, fuel_exhausted } outcome;
  Term result;          // the last term, or the machine's value denotation
  std::uint64_t steps;
  std::string reason;   // stuck reason
};

/// Runs `engine` for at most `max_steps` steps.  `sink` sees every row,
/// starting with the step-0 row.
ReduceResult reduce(const Term& m, Engine engine, Strategy strategy, std::uint64_t max_steps,
                    const std::function<void(const TraceRow&)>& sink = {});

/// Re-runs the trace's input term and compares every row.
struct ReplayResult {
  bool ok;
  std::string message;
};
ReplayResult replay(const std::vector<TraceRow>& rows);

/// Bang trails after each of the first `steps` naive steps, raw:
/// t(previous trail, trail absorbed by this step).
std::vector<Trail> raw_bang_trails(const Term& m, std::size_t steps);

/// Runs the contraction counter on the trail of the outermost bang of M's
/// normal form: the trail and the resulting numeral.
struct InspectCount {
  Trail trail;
  std::uint32_t count;
  Term counted;  // normal form of trail·ϑ₊
};
std::optional<InspectCount> inspect_count(const Term& m, std::uint64_t fuel);

/// Church numeral n, if M is one.
std::optional<std::uint32_t> church_value(const Term& m);

// --- CLI -------------------------------------------------------------------------

/// Exit codes: 0 success, 1 property failure, 2 usage or parse error,
/// 3 fuel exhausted, 4 stuck.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cau
