#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cau/corpus.hpp"
#include "cau/frontend.hpp"
#include "cau/oracle.hpp"
#include "cau/sigma.hpp"

namespace cau {

namespace {

constexpr std::uint64_t kRewriteFuel = 10'000;
constexpr std::uint64_t kMachineFuel = 100'000;

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::optional<std::uint64_t> env_fuel() {
  const char* v = std::getenv("CAU_FUEL");
  if (!v || !*v) return std::nullopt;
  char* end = nullptr;
  const unsigned long long n = std::strtoull(v, &end, 10);
  if (*end) throw Usage(std::string("CAU_FUEL is not a number: ") + v);
  return n;
}

std::string read_file(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), {}};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Usage("cannot read " + path);
  return {std::istreambuf_iterator<char>(in), {}};
}

Term load(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return parse_term(text);
  } catch (const ParseError& e) {
    throw Usage(path + ":" + e.what());
  }
}

// --- demos -----------------------------------------------------------------------

bool demo_example1(std::ostream& out) {
  const Term m = parse_term("! let x = !{b} two in let y = !{b} six in plus x y");
  const auto r = cau_normalize(m, kDefaultFuel);
  const Term nf = r.term.is(Kind::annot) ? r.term.term(1) : r.term;
  out << "term:   " << print_term_named(m, builtin_prelude()) << "\n";
  out << "normal: " << print_term_named(r.term, builtin_prelude()) << "\n";
  if (!nf.is(Kind::bang)) return false;
  const auto v = church_value(nf.term(1).is(Kind::annot) ? nf.term(1).term(1) : nf.term(1));
  out << "value:  " << (v ? std::to_string(*v) : "?") << "\n";
  return v == 8u;
}

bool demo_example2(std::ostream& out) {
  const Term m = parse_term("! ((\\x. \\y. \\p. p x y) two) six");
  const auto raw = raw_bang_trails(m, 2);
  const char* expected[] = {"t(r,app(b,r))", "t(t(r,app(b,r)),b)"};
  bool ok = raw.size() == 2;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const std::string s = print_trail(raw[i]);
    out << "step " << i + 1 << ": " << s << "\n";
    ok = ok && s == expected[i];
  }
  return ok;
}

bool demo_example3(std::ostream& out) {
  const Trail q = parse_trail("t(letq(b,r),bb)");
  const Term counted = apply_replacement(q, theta_plus());
  const auto r = cau_normalize(counted, kDefaultFuel);
  const Term nf = r.term.is(Kind::annot) ? r.term.term(1) : r.term;
  const auto n = church_value(nf);
  out << "trail:       " << print_trail(q) << "\n";
  out << "replacement: " << print_term_named(counted, builtin_prelude()) << "\n";
  out << "normal form: " << print_term_named(nf, builtin_prelude()) << "\n";
  return counted == parse_term("plus (plus one zero) one") && n == 2u;
}

bool demo_example4(std::ostream& out) {
  const Term m = tau_normalize(parse_term("! let x = !{b} two in let y = !{b} six in plus x y"));
  const auto next = cau_step(m);
  if (!next || !next->is(Kind::bang)) return false;
  const Trail q = tau_normalize(next->trail(0));
  out << "step 1 bang trail: " << print_trail(q) << "\n";
  return q == parse_trail("t(bb,letq(r,app(app(r,b),r)))");
}

bool demo_fig1(std::ostream& out) {
  const auto f = fig1();
  out << "start:        " << print_term(f.start) << "\n";
  out << "beta first:   " << print_term(f.left) << "\n";
  out << "tau first:    " << print_term(f.right) << "\n";
  out << "naive engine: " << print_term(f.naive_engine) << "\n";
  out << "joinable:     " << (f.joinable ? "yes" : "no") << "\n";
  return f.left.is(Kind::annot) && f.right.is(Kind::annot) &&
         f.left.trail(0) == parse_trail("t(b,app(app(r,b),b))") &&
         f.right.trail(0) == parse_trail("t(app(r,b),b)") && !f.joinable && f.naive_engine == f.right;
}

// --- subcommands -----------------------------------------------------------------

int outcome_code(ReduceResult::Outcome o) {
  switch (o) {
    case ReduceResult::Outcome::done: return 0;
    case ReduceResult::Outcome::fuel_exhausted: return 3;
    case ReduceResult::Outcome::stuck: return 4;
  }
  return 2;
}

void print_report(const Report& r, bool json, std::ostream& out) {
  if (json) {
    nlohmann::ordered_json j;
    j["property"] = r.property;
    j["exhaustive"] = r.exhaustive;
    j["trials"] = r.trials;
    j["passed"] = r.passed;
    j["failed"] = r.failed;
    j["inconclusive"] = r.inconclusive;
    j["counterexample"] = r.counterexample ? nlohmann::ordered_json(print_term(*r.counterexample)) : nullptr;
    j["detail"] = r.detail;
    j["ok"] = r.ok();
    out << j.dump() << "\n";
    return;
  }
  out << r.property << (r.exhaustive ? " (exhaustive)" : "") << ": " << r.trials << " trials, " << r.passed
      << " passed, " << r.failed << " failed, " << r.inconclusive << " inconclusive\n";
  if (r.counterexample) out << "counterexample: " << print_term(*r.counterexample) << "\n";
  if (!r.detail.empty()) out << "detail: " << r.detail << "\n";
  out << (r.ok() ? "PASS" : "FAIL") << "\n";
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"cau: audited units, explicit substitutions and the abstract machine"};
  app.require_subcommand(1);

  std::string file;
  auto* parse_cmd = app.add_subcommand("parse", "echo the elaborated term");
  parse_cmd->add_option("FILE", file, "input file, - for stdin")->required();

  std::string engine = "naive", strategy = "normal", trace;
  std::optional<std::uint64_t> max_steps;
  auto* reduce_cmd = app.add_subcommand("reduce", "reduce with one engine");
  reduce_cmd->add_option("--engine", engine, "naive|sigma|machine")->check(CLI::IsMember({"naive", "sigma", "machine"}));
  reduce_cmd->add_option("--strategy", strategy, "naive engine order: normal|cbv")
      ->check(CLI::IsMember({"normal", "cbv"}));
  reduce_cmd->add_option("--max-steps", max_steps, "step budget");
  reduce_cmd->add_option("--trace", trace, "write a JSON Lines trace");
  reduce_cmd->add_option("FILE", file, "input file, - for stdin")->required();

  std::string rules = "sigmatau";
  auto* norm_cmd = app.add_subcommand("normalize", "normal form under a rule set");
  norm_cmd->add_option("--rules", rules, "tau|sigma|sigmatau")->check(CLI::IsMember({"tau", "sigma", "sigmatau"}));
  norm_cmd->add_option("FILE", file, "input file, - for stdin")->required();

  auto* count_cmd = app.add_subcommand("inspect-count", "count contractions recorded in the final bang trail");
  count_cmd->add_option("FILE", file, "input file, - for stdin")->required();

  std::string property;
  std::uint64_t seed = 0, count = 100;
  std::uint32_t size = 20;
  bool json = false;
  auto* check_cmd = app.add_subcommand("check", "run a property of the oracle");
  check_cmd->add_option("--property", property, "property name")->required();
  check_cmd->add_option("--seed", seed, "first seed");
  check_cmd->add_option("--count", count, "random trials (ignored when exhaustive)");
  check_cmd->add_option("--size", size, "term size; <= 10 enumerates every term");
  check_cmd->add_flag("--json", json, "one JSON object");

  std::string demo;
  auto* demo_cmd = app.add_subcommand("demo", "golden reproductions");
  demo_cmd->add_option("NAME", demo, "fig1|example1|example2|example3|example4")
      ->required()
      ->check(CLI::IsMember({"fig1", "example1", "example2", "example3", "example4"}));

  auto* replay_cmd = app.add_subcommand("replay", "re-run a trace and compare every row");
  replay_cmd->add_option("FILE", file, "JSON Lines trace")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.front()->help());
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 2;
  }

  try {
    const auto fuel = env_fuel();
    if (*parse_cmd) {
      out << print_term(load(file)) << "\n";
      return 0;
    }
    if (*reduce_cmd) {
      const Term m = load(file);
      const Engine e = *parse_engine(engine);
      const std::uint64_t limit = max_steps ? *max_steps : fuel ? *fuel : e == Engine::machine ? kMachineFuel : kRewriteFuel;
      std::ofstream tf;
      if (!trace.empty()) {
        tf.open(trace);
        if (!tf) throw Usage("cannot write " + trace);
      }
      const auto r = reduce(m, e, *parse_strategy(strategy), limit, [&](const TraceRow& row) {
        if (tf.is_open()) tf << to_json_line(row) << "\n";
      });
      out << print_term(r.result) << "\n";
      out << "steps: " << r.steps << "\n";
      if (r.outcome == ReduceResult::Outcome::stuck) err << "stuck: " << r.reason << "\n";
      if (r.outcome == ReduceResult::Outcome::fuel_exhausted) err << "fuel exhausted after " << r.steps << " steps\n";
      return outcome_code(r.outcome);
    }
    if (*norm_cmd) {
      const Term m = load(file);
      const std::uint64_t f = fuel.value_or(kRewriteFuel);
      const Term nf = rules == "tau" ? tau_normalize(m, f) : rules == "sigma" ? sigma_normalize(m, f) : sigmatau_normalize(m, f);
      out << print_term(nf) << "\n";
      return 0;
    }
    if (*count_cmd) {
      const auto c = inspect_count(load(file), fuel.value_or(kRewriteFuel));
      if (!c) {
        err << "the normal form has no bang, or its count is not a numeral\n";
        return 4;
      }
      out << "trail: " << print_trail(c->trail) << "\n";
      out << "count: " << c->count << "\n";
      return 0;
    }
    if (*check_cmd) {
      GenSpec g;
      g.seed = seed;
      g.size = size;
      CheckOptions o;
      if (fuel) o.fuel = *fuel;
      Report r;
      try {
        r = check_property(property, g, count, o);
      } catch (const std::invalid_argument& e) {
        err << e.what() << "\n";
        return 2;
      }
      print_report(r, json, out);
      return r.ok() ? 0 : 1;
    }
    if (*demo_cmd) {
      const bool ok = demo == "fig1"       ? demo_fig1(out)
                      : demo == "example1" ? demo_example1(out)
                      : demo == "example2" ? demo_example2(out)
                      : demo == "example3" ? demo_example3(out)
                                           : demo_example4(out);
      if (!ok) err << "demo " << demo << " does not match its golden output\n";
      return ok ? 0 : 1;
    }
    if (*replay_cmd) {
      std::istringstream in(read_file(file));
      std::vector<TraceRow> rows;
      for (std::string line; std::getline(in, line);)
        if (!line.empty()) rows.push_back(row_from_json_line(line));
      const auto r = replay(rows);
      (r.ok ? out : err) << r.message << "\n";
      return r.ok ? 0 : 1;
    }
  } catch (const ParseError& e) {
    err << e.what() << "\n";
    return 2;
  } catch (const Usage& e) {
    err << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << e.what() << "\n";
    return 2;
  } catch (const FuelExhausted& e) {
    err << "fuel exhausted: " << e.what() << "\n";
    return 3;
  } catch (const SyntaxError& e) {
    err << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace cau
