// One PASS/FAIL line per acceptance criterion, each under a wall-clock limit.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "cau/corpus.hpp"
#include "cau/frontend.hpp"
#include "cau/oracle.hpp"
#include "cau/sigma.hpp"

using namespace cau;

namespace {

constexpr std::uint64_t kSeed = 20240601;

struct Outcome {
  bool ok;
  std::string note;
};

int failures = 0;

void criterion(int n, const char* what, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o{false, {}};
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = s < limit_s;
  const bool ok = o.ok && in_time;
  if (!ok) ++failures;
  std::printf("%s %2d %s [%.2fs / %.0fs]%s%s%s\n", ok ? "PASS" : "FAIL", n, what, s, limit_s,
              o.note.empty() ? "" : " ", o.note.c_str(), in_time ? "" : " (over time)");
  std::fflush(stdout);
}

std::string summary(const Report& r) {
  std::ostringstream os;
  os << r.property << (r.exhaustive ? "(exhaustive)" : "") << " " << r.passed << "/" << r.trials << " passed, "
     << r.failed << " failed, " << r.inconclusive << " inconclusive";
  if (r.counterexample) os << "; counterexample " << print_term(*r.counterexample) << ": " << r.detail;
  return os.str();
}

Report random_run(const std::string& property, std::uint32_t size, std::uint64_t count, CheckOptions o = {}) {
  o.exhaustive_if_small = false;
  GenSpec g;
  g.seed = kSeed;
  g.size = size;
  return check_property(property, g, count, o);
}

Report exhaustive_run(const std::string& property, std::uint32_t size) {
  GenSpec g;
  g.size = size;
  return check_property(property, g, 0);
}

bool clean(const Report& r) { return r.failed == 0 && r.inconclusive == 0 && r.trials > 0; }

}  // namespace

int main() {
  criterion(1, "pair term bang trails", 1, [] {
    const auto raw = raw_bang_trails(parse_term("! ((\\x.\\y.\\p. p x y) two) six"), 2);
    if (raw.size() != 2) return Outcome{false, "fewer than two steps"};
    const std::string a = print_trail(raw[0]), b = print_trail(raw[1]);
    return Outcome{a == "t(r,app(b,r))" && b == "t(t(r,app(b,r)),b)", a + " ; " + b};
  });

  criterion(2, "contraction counter on t(letq(b,r),bb)", 1, [] {
    const Term counted = apply_replacement(parse_trail("t(letq(b,r),bb)"), theta_plus());
    const Term expect = app(app(plus(), app(app(plus(), church(1)), church(0))), church(1));
    const auto r = cau_normalize(counted, kDefaultFuel);
    const Term nf = r.term.is(Kind::annot) ? r.term.term(1) : r.term;
    return Outcome{counted == expect && nf == church(2),
                   print_term_named(counted, builtin_prelude()) + " ->> " + print_term_named(nf, builtin_prelude())};
  });

  criterion(3, "one-step bang trail of the let term", 1, [] {
    const Term m = tau_normalize(parse_term("! let x = !{b} two in let y = !{b} six in plus x y"));
    const auto n = cau_step(m);
    if (!n || !n->is(Kind::bang)) return Outcome{false, "no bang after one step"};
    const Trail q = tau_normalize(n->trail(0));
    return Outcome{q == tau_normalize(parse_trail("t(bb,letq(r,app(app(r,b),r)))")), print_trail(q)};
  });

  criterion(4, "order anomaly endpoints", 5, [] {
    const auto f = fig1(8);
    const bool ok = f.left.is(Kind::annot) && f.right.is(Kind::annot) &&
                    f.left.trail(0) == parse_trail("t(b,app(app(r,b),b))") &&
                    f.right.trail(0) == parse_trail("t(app(r,b),b)") && !f.joinable &&
                    f.naive_engine == f.right;
    return Outcome{ok, print_trail(f.left.trail(0)) + " vs " + print_trail(f.right.trail(0)) +
                           (f.joinable ? ", joinable" : ", not joinable within 8")};
  });

  criterion(5, "tau and sigmatau confluence", 120, [] {
    std::string note;
    bool ok = true;
    for (const char* p : {"tau-confluence", "sigmatau-confluence"}) {
      const Report e = exhaustive_run(p, 9);
      const Report r = random_run(p, 25, 1000);
      ok = ok && clean(e) && clean(r);
      note += (note.empty() ? "" : "; ") + summary(e) + "; " + summary(r);
    }
    return Outcome{ok, note};
  });

  criterion(6, "forward simulation", 60, [] {
    const Report r = random_run("simulation-forward", 25, 1000);
    return Outcome{clean(r) && r.trials == 1000, summary(r)};
  });

  criterion(7, "backward simulation", 120, [] {
    const Report r = random_run("simulation-backward", 25, 1000);
    return Outcome{clean(r) && r.trials == 1000, summary(r)};
  });

  CheckOptions machine;
  machine.machine_fuel = 500;
  criterion(8, "machine soundness", 300, [&] {
    const Report r = random_run("machine-soundness", 25, 500, machine);
    return Outcome{r.failed == 0 && r.trials == 500 && r.passed > 0, summary(r)};
  });

  criterion(9, "machine configuration validity", 300, [&] {
    const Report r = random_run("machine-validity", 25, 500, machine);
    return Outcome{r.failed == 0 && r.trials == 500 && r.passed > 0, summary(r)};
  });

  criterion(10, "projection, focus and substitution lemmas", 120, [] {
    const Report p = random_run("projection-agreement", 25, 1000);
    const Report s = random_run("substitution-lemma", 25, 1000);
    return Outcome{clean(p) && clean(s) && p.trials == 1000 && s.trials == 1000, summary(p) + "; " + summary(s)};
  });

  return failures == 0 ? 0 : 1;
}
