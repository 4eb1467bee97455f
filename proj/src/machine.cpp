#include "cau/machine.hpp"

#include <sstream>
#include <stdexcept>

#include "cau/sigma.hpp"

namespace cau {

Env env_cons(Value v, Env tail) {
  const std::size_t n = env_length(tail) + 1;
  return std::make_shared<const EnvCell>(EnvCell{std::move(v), std::move(tail), n});
}

std::size_t env_length(const Env& e) { return e ? e->length : 0; }

std::vector<Value> env_values(const Env& e) {
  std::vector<Value> out;
  for (const EnvCell* c = e.get(); c; c = c->tail.get()) out.push_back(c->head);
  return out;
}

ClosurePtr lam_closure(Term body, Env env) {
  return std::make_shared<const MachineClosure>(
      MachineClosure{MachineClosure::Kind::lam, std::move(body), std::move(env), {}, nullptr});
}

ClosurePtr bang_closure(Trail q, ClosurePtr inner) {
  return std::make_shared<const MachineClosure>(
      MachineClosure{MachineClosure::Kind::bang, {}, nullptr, std::move(q), std::move(inner)});
}

Config inject(const Term& m) {
  if (!is_pure(m)) throw SyntaxError("the machine runs pure terms only");
  if (m.node()->has_annot()) throw SyntaxError("the machine has no rule for trail annotations");
  if (max_free_index(m) != 0) throw SyntaxError("the machine runs closed terms only");
  return Config{{Tuple{refl(), Code{CodeKind::term, m}, nullptr}}, {}};
}

std::optional<ClosurePtr> env_lookup(const Env& e, std::uint32_t n) {
  const EnvCell* c = e.get();
  for (std::uint32_t i = 1; c && i < n; ++i) c = c->tail.get();
  if (!c || n == 0) return std::nullopt;
  return c->head.closure;
}

Term trail_to_open_term(const Trail& q) {
  auto node = [&q](std::uint32_t index) {
    Term out = var(index);
    for (std::size_t i = 0; i < q.arity(); ++i) out = app(out, trail_to_open_term(q.trail(i)));
    return out;
  };
  switch (q.kind()) {
    case Kind::refl: return node(1);
    case Kind::trans: return node(2);
    case Kind::beta: return node(3);
    case Kind::beta_bang: return node(4);
    case Kind::ti: return node(5);
    case Kind::lam_t: return node(6);
    case Kind::app_t: return node(7);
    case Kind::let_t: return node(8);
    case Kind::trpl: return node(9);
    default: throw SyntaxError("only pure trails have an open-term form");
  }
}

// --- denotations -------------------------------------------------------------

Term denote_closure(const MachineClosure& c) {
  if (c.kind == MachineClosure::Kind::bang) return bang(c.trail, denote_closure(*c.inner));
  return erase(closure(lam(c.body), denote_env(c.env)));
}

Term denote_value(const Value& v) { return annot(v.trail, denote_closure(*v.closure)); }

Subst denote_env(const Env& e) {
  const auto vs = env_values(e);
  Subst s = id();
  for (auto it = vs.rbegin(); it != vs.rend(); ++it) s = cons(denote_value(*it), s);
  return s;
}

namespace {

Subst lifted(const Env& e) { return cons(var(1), comp(denote_env(e), shift())); }

Term denote_tuple(const Tuple& t) { return annot(t.trail, erase(closure(t.code.term, denote_env(t.env)))); }

// Walks a context configuration from the top.  Every well-formed frame is
// handed to `frame`; the result tells whether the walk reached (ε, ε).
struct Frame {
  enum class Kind : std::uint8_t { app_left, app_right, let, bang, inspect } kind;
  Trail trail;              // trail of the AST node
  const Tuple* pending = nullptr;   // app_left: the argument tuple
  const Value* value = nullptr;     // app_right: the function value
  const Tuple* let = nullptr;       // let
  std::vector<const Value*> done = {};  // inspect: evaluated branches, branch 1 first
  std::vector<const Tuple*> todo = {};  // inspect: pending branches, in branch order
};

// Parses the context frames of (stack[0..si), dump[0..di)), outermost last.
// Returns an error message on failure.
std::optional<std::string> parse_context(const std::vector<Tuple>& stack, std::size_t si,
                                         const std::vector<Value>& dump, std::size_t di,
                                         std::vector<Frame>& frames) {
  while (si > 0) {
    const Tuple& top = stack[si - 1];
    switch (top.code.kind) {
      case CodeKind::bang_node:
        frames.push_back({Frame::Kind::bang, top.trail});
        si -= 1;
        continue;
      case CodeKind::let_node: {
        Frame f{Frame::Kind::let, top.trail};
        f.let = &top;
        frames.push_back(std::move(f));
        si -= 1;
        continue;
      }
      case CodeKind::app_node: {
        if (di == 0) return "application node without a function value";
        Frame f{Frame::Kind::app_right, top.trail};
        f.value = &dump[di - 1];
        frames.push_back(std::move(f));
        si -= 1;
        di -= 1;
        continue;
      }
      case CodeKind::inspect_node: {
        if (di < 8) return "inspection node without its evaluated branches";
        Frame f{Frame::Kind::inspect, top.trail};
        for (std::size_t j = 0; j < 8; ++j) f.done.push_back(&dump[di - 8 + j]);
        frames.push_back(std::move(f));
        si -= 1;
        di -= 8;
        continue;
      }
      case CodeKind::term: {
        std::size_t c = 0;
        while (c < si && stack[si - 1 - c].code.kind == CodeKind::term) ++c;
        if (c == si) return "pending subterm outside any AST node";
        const Tuple& node = stack[si - 1 - c];
        if (node.code.kind == CodeKind::app_node && c == 1) {
          Frame f{Frame::Kind::app_left, node.trail};
          f.pending = &top;
          frames.push_back(std::move(f));
          si -= 2;
          continue;
        }
        if (node.code.kind == CodeKind::inspect_node && c <= 8) {
          const std::size_t k = 9 - c;  // the hole is branch k
          if (di < k - 1) return "inspection node without its evaluated branches";
          Frame f{Frame::Kind::inspect, node.trail};
          for (std::size_t j = 0; j < k - 1; ++j) f.done.push_back(&dump[di - (k - 1) + j]);
          for (std::size_t j = 0; j < c; ++j) f.todo.push_back(&stack[si - 1 - j]);
          frames.push_back(std::move(f));
          si -= c + 1;
          di -= k - 1;
          continue;
        }
        return "pending subterms do not match the AST node below them";
      }
    }
  }
  if (di != 0) return "values left in the dump outside any AST node";
  return std::nullopt;
}

// Wraps `filler` in one frame; records the local path to the hole.
Term wrap(const Frame& f, const Term& filler, TermPath& local) {
  switch (f.kind) {
    case Frame::Kind::app_left:
      local = {1, 0};
      return annot(f.trail, app(filler, denote_tuple(*f.pending)));
    case Frame::Kind::app_right:
      local = {1, 1};
      return annot(f.trail, app(denote_value(*f.value), filler));
    case Frame::Kind::let:
      local = {1, 0};
      return annot(f.trail, let_bang(filler, erase(closure(f.let->code.term, lifted(f.let->env)))));
    case Frame::Kind::bang:
      local = {1, 1};
      return annot(f.trail, bang(filler));
    case Frame::Kind::inspect: {
      Replacement<Term> br;
      std::size_t i = 0;
      for (const auto* v : f.done) br[i++] = denote_value(*v);
      local = {1, static_cast<std::uint8_t>(i)};
      br[i++] = filler;
      for (const auto* t : f.todo) br[i++] = denote_tuple(*t);
      return annot(f.trail, inspect(br));
    }
  }
  throw std::logic_error("frame");
}

Term plug_frames(const std::vector<Frame>& frames, Term filler, TermPath* hole) {
  std::vector<TermPath> locals;
  for (const auto& f : frames) {
    TermPath local;
    filler = wrap(f, filler, local);
    locals.push_back(std::move(local));
  }
  if (hole) {
    hole->clear();
    for (auto it = locals.rbegin(); it != locals.rend(); ++it) hole->insert(hole->end(), it->begin(), it->end());
  }
  return filler;
}

// Top-of-configuration filler for the term judgment, and the part of the
// configuration that must form a context.
struct TermTop {
  Term filler;
  std::size_t si, di;
};

std::optional<TermTop> term_top(const Config& c, std::string& why) {
  const auto& st = c.stack;
  const auto& d = c.dump;
  if (st.empty()) {
    if (d.size() == 1) return TermTop{denote_value(d[0]), 0, 0};
    why = "empty stack needs exactly one value in the dump";
    return std::nullopt;
  }
  const Tuple& top = st.back();
  const std::size_t si = st.size() - 1;
  const std::size_t di = d.size();
  auto need = [&](std::size_t n) {
    if (di < n) why = "not enough values in the dump";
    return di >= n;
  };
  switch (top.code.kind) {
    case CodeKind::term:
      return TermTop{denote_tuple(top), si, di};
    case CodeKind::app_node:
      if (!need(2)) return std::nullopt;
      return TermTop{annot(top.trail, app(denote_value(d[di - 2]), denote_value(d[di - 1]))), si, di - 2};
    case CodeKind::let_node:
      if (!need(1)) return std::nullopt;
      return TermTop{annot(top.trail, let_bang(denote_value(d[di - 1]), erase(closure(top.code.term, lifted(top.env))))),
                     si, di - 1};
    case CodeKind::bang_node:
      if (!need(1)) return std::nullopt;
      return TermTop{annot(top.trail, bang(denote_value(d[di - 1]))), si, di - 1};
    case CodeKind::inspect_node: {
      if (!need(9)) return std::nullopt;
      Replacement<Term> br;
      for (std::size_t j = 0; j < 9; ++j) br[j] = denote_value(d[di - 9 + j]);
      return TermTop{annot(top.trail, inspect(br)), si, di - 9};
    }
  }
  return std::nullopt;
}

}  // namespace

Term denote_config(const Config& c) {
  std::string why;
  auto top = term_top(c, why);
  if (!top) throw std::invalid_argument("not a term configuration: " + why);
  std::vector<Frame> frames;
  if (auto err = parse_context(c.stack, top->si, c.dump, top->di, frames))
    throw std::invalid_argument("not a term configuration: " + *err);
  return plug_frames(frames, top->filler, nullptr);
}

Term ContextDenotation::plug(const Term& m) const { return Term(replace_at(frame.node(), hole, m.node())); }

ContextDenotation denote_context(const Config& c) {
  std::vector<Frame> frames;
  if (auto err = parse_context(c.stack, c.stack.size(), c.dump, c.dump.size(), frames))
    throw std::invalid_argument("not a context configuration: " + *err);
  ContextDenotation out;
  out.frame = plug_frames(frames, var(1), &out.hole);
  return out;
}

// --- inspection trails ---------------------------------------------------------

std::optional<Trail> materialize_inspection_trail(const Trail& q, const std::vector<Tuple>& stack,
                                                  const std::vector<Value>& dump, std::uint64_t fuel) {
  std::size_t si = stack.size(), di = dump.size();
  Trail acc = q;
  while (si > 0) {
    const Tuple& top = stack[si - 1];
    if (top.code.kind == CodeKind::bang_node) return sigmatau_normalize(acc, fuel);
    std::size_t used_s = 0, used_d = 0;
    switch (top.code.kind) {
      case CodeKind::let_node:
        acc = trans(top.trail, let_t(acc, refl()));
        used_s = 1;
        break;
      case CodeKind::app_node:
        if (di == 0) throw std::invalid_argument("application node without a function value");
        acc = trans(top.trail, app_t(dump[di - 1].trail, acc));
        used_s = 1;
        used_d = 1;
        break;
      case CodeKind::inspect_node: {
        if (di < 8) throw std::invalid_argument("inspection node without its evaluated branches");
        Replacement<Trail> br;
        for (std::size_t j = 0; j < 8; ++j) br[j] = dump[di - 8 + j].trail;
        br[8] = acc;
        acc = trans(top.trail, trpl(br));
        used_s = 1;
        used_d = 8;
        break;
      }
      case CodeKind::term: {
        std::size_t c = 0;
        while (c < si && stack[si - 1 - c].code.kind == CodeKind::term) ++c;
        if (c == si) throw std::invalid_argument("pending subterm outside any AST node");
        const Tuple& node = stack[si - 1 - c];
        if (node.code.kind == CodeKind::app_node && c == 1) {
          acc = trans(node.trail, app_t(acc, top.trail));
          used_s = 2;
        } else if (node.code.kind == CodeKind::inspect_node && c <= 8) {
          const std::size_t k = 9 - c;
          if (di < k - 1) throw std::invalid_argument("inspection node without its evaluated branches");
          Replacement<Trail> br;
          std::size_t i = 0;
          for (std::size_t j = 0; j < k - 1; ++j) br[i++] = dump[di - (k - 1) + j].trail;
          br[i++] = acc;
          for (std::size_t j = 0; j < c; ++j) br[i++] = stack[si - 1 - j].trail;
          acc = trans(node.trail, trpl(br));
          used_s = c + 1;
          used_d = k - 1;
        } else {
          throw std::invalid_argument("pending subterms do not match the AST node below them");
        }
        break;
      }
      case CodeKind::bang_node:
        break;
    }
    si -= used_s;
    di -= used_d;
  }
  return std::nullopt;
}

// --- transitions ----------------------------------------------------------------

namespace {

Trail seq(std::initializer_list<Trail> parts) {
  // right-nested t(a, t(b, …))
  std::vector<Trail> v(parts);
  Trail acc = v.back();
  for (std::size_t i = v.size() - 1; i-- > 0;) acc = trans(v[i], acc);
  return acc;
}

StepResult stuck(std::string why) { return StepResult{StepResult::Kind::stuck, 0, {}, std::nullopt, std::move(why)}; }

StepResult next(int rule, Config c) { return StepResult{StepResult::Kind::next, rule, std::move(c), std::nullopt, {}}; }

}  // namespace

StepResult step(const Config& c, std::uint64_t fuel) {
  if (c.stack.empty()) {
    if (c.dump.size() == 1) return StepResult{StepResult::Kind::final, 0, c, c.dump[0], {}};
    return stuck("empty stack without a single final value");
  }
  Config n = c;
  const Tuple top = n.stack.back();
  n.stack.pop_back();
  const Trail& q = top.trail;
  switch (top.code.kind) {
    case CodeKind::term: {
      const Term& m = top.code.term;
      const Env& e = top.env;
      switch (m.kind()) {
        case Kind::app:  // 1
          n.stack.push_back({q, Code{CodeKind::app_node, {}}, nullptr});
          n.stack.push_back({refl(), Code{CodeKind::term, m.term(1)}, e});
          n.stack.push_back({refl(), Code{CodeKind::term, m.term(0)}, e});
          return next(1, std::move(n));
        case Kind::lam:  // 3
          n.dump.push_back({q, lam_closure(m.term(0), e)});
          return next(3, std::move(n));
        case Kind::let:  // 4
          n.stack.push_back({q, Code{CodeKind::let_node, m.term(1)}, e});
          n.stack.push_back({refl(), Code{CodeKind::term, m.term(0)}, e});
          return next(4, std::move(n));
        case Kind::bang: {  // 6
          const Trail inner = sigmatau_normalize(trans(m.trail(0), extract(closure(m.term(1), denote_env(e)))), fuel);
          n.stack.push_back({q, Code{CodeKind::bang_node, {}}, nullptr});
          n.stack.push_back({inner, Code{CodeKind::term, m.term(1)}, e});
          return next(6, std::move(n));
        }
        case Kind::inspect:  // 8
          n.stack.push_back({q, Code{CodeKind::inspect_node, {}}, nullptr});
          for (std::size_t i = kSlots; i-- > 0;) n.stack.push_back({refl(), Code{CodeKind::term, m.term(i)}, e});
          return next(8, std::move(n));
        case Kind::var: {  // 10
          auto cl = env_lookup(e, m.index());
          if (!cl) return stuck("env underflow");
          n.dump.push_back({q, *cl});
          return next(10, std::move(n));
        }
        default:
          return stuck(std::string("no rule for ") + kind_name(m.kind()) + " code");
      }
    }
    case CodeKind::app_node: {  // 2
      if (n.dump.size() < 2) return stuck("application node without its values");
      const Value arg = n.dump.back();
      n.dump.pop_back();
      const Value fun = n.dump.back();
      n.dump.pop_back();
      if (fun.closure->kind != MachineClosure::Kind::lam) return stuck("non-lambda application");
      const Trail t = sigmatau_normalize(seq({q, app_t(fun.trail, arg.trail), beta()}), fuel);
      n.stack.push_back({t, Code{CodeKind::term, fun.closure->body}, env_cons({refl(), arg.closure}, fun.closure->env)});
      return next(2, std::move(n));
    }
    case CodeKind::let_node: {  // 5
      if (n.dump.empty()) return stuck("let node without its definiens");
      const Value def = n.dump.back();
      n.dump.pop_back();
      if (def.closure->kind != MachineClosure::Kind::bang) return stuck("non-bang let definiens");
      const Value v{def.closure->trail, def.closure->inner};
      const Term& body = top.code.term;
      const Trail qnev = extract(closure(erase(closure(body, lifted(top.env))), cons(denote_value(v), id())));
      const Trail t = sigmatau_normalize(seq({q, let_t(def.trail, refl()), beta_bang(), qnev}), fuel);
      n.stack.push_back({t, Code{CodeKind::term, body}, env_cons(v, top.env)});
      return next(5, std::move(n));
    }
    case CodeKind::bang_node: {  // 7
      if (n.dump.empty()) return stuck("bang node without its body value");
      const Value v = n.dump.back();
      n.dump.pop_back();
      n.dump.push_back({q, bang_closure(v.trail, v.closure)});
      return next(7, std::move(n));
    }
    case CodeKind::inspect_node: {  // 9
      if (n.dump.size() < kSlots) return stuck("inspection node without its branch values");
      std::vector<Value> branches(n.dump.end() - kSlots, n.dump.end());  // branch 1 first
      n.dump.resize(n.dump.size() - kSlots);
      Replacement<Trail> qs;
      for (std::size_t i = 0; i < kSlots; ++i) qs[i] = branches[i].trail;
      const Trail qstar = trans(q, trpl(qs));
      auto hist = materialize_inspection_trail(qstar, n.stack, n.dump, fuel);
      if (!hist) return stuck("inspection-locked");
      Env env;
      for (std::size_t i = kSlots; i-- > 0;) env = env_cons({refl(), branches[i].closure}, env);
      n.stack.push_back({sigmatau_normalize(trans(qstar, ti()), fuel), Code{CodeKind::term, trail_to_open_term(*hist)}, env});
      return next(9, std::move(n));
    }
  }
  return stuck("unknown code");
}

RunResult run(const Config& c, std::uint64_t fuel, bool keep_trace) {
  RunResult out{RunResult::Outcome::fuel_exhausted, std::nullopt, {}, {}, c};
  for (std::uint64_t i = 0;; ++i) {
    auto r = step(out.last);
    if (r.kind == StepResult::Kind::final) {
      out.outcome = RunResult::Outcome::final;
      out.value = r.value;
      return out;
    }
    if (r.kind == StepResult::Kind::stuck) {
      out.outcome = RunResult::Outcome::stuck;
      out.reason = r.reason;
      return out;
    }
    if (i == fuel) return out;
    out.last = r.next;
    if (keep_trace) out.trace.emplace_back(r.rule, std::move(r.next));
  }
}

// --- validation ----------------------------------------------------------------

namespace {

bool closure_closed(const MachineClosure& c);

bool env_closed(const Env& e) {
  for (const EnvCell* c = e.get(); c; c = c->tail.get())
    if (!closure_closed(*c->head.closure)) return false;
  return true;
}

bool closure_closed(const MachineClosure& c) {
  if (c.kind == MachineClosure::Kind::bang) return closure_closed(*c.inner);
  return max_free_index(c.body) <= env_length(c.env) + 1 && env_closed(c.env);
}

}  // namespace

Validity validate(const Config& c) {
  auto invalid = [](std::string why) { return Validity{Validity::Kind::invalid, std::move(why)}; };
  for (const auto& t : c.stack) {
    switch (t.code.kind) {
      case CodeKind::term:
        if (!is_pure(t.code.term)) return invalid("impure code");
        if (max_free_index(t.code.term) > env_length(t.env)) return invalid("open code " + show(t.code.term));
        break;
      case CodeKind::let_node:
        if (!is_pure(t.code.term)) return invalid("impure let body");
        if (max_free_index(t.code.term) > env_length(t.env) + 1) return invalid("open let body " + show(t.code.term));
        break;
      default:
        if (t.env) return invalid("AST node with a non-empty environment");
        break;
    }
    if (!env_closed(t.env)) return invalid("open value in an environment");
  }
  for (const auto& v : c.dump)
    if (!closure_closed(*v.closure)) return invalid("open value in the dump");

  std::string why;
  if (auto top = term_top(c, why)) {
    std::vector<Frame> frames;
    auto err = parse_context(c.stack, top->si, c.dump, top->di, frames);
    if (!err) return {Validity::Kind::term_config, {}};
    why = *err;
  }
  std::vector<Frame> frames;
  if (!parse_context(c.stack, c.stack.size(), c.dump, c.dump.size(), frames)) return {Validity::Kind::context_config, {}};
  return invalid(why.empty() ? "malformed configuration" : why);
}

namespace {

bool trail_ok(const Trail& q) { return is_pure(q) && sigmatau_normalize(q) == q; }

bool closure_trails_ok(const MachineClosure& c);

bool env_trails_ok(const Env& e) {
  for (const EnvCell* c = e.get(); c; c = c->tail.get())
    if (!trail_ok(c->head.trail) || !closure_trails_ok(*c->head.closure)) return false;
  return true;
}

bool closure_trails_ok(const MachineClosure& c) {
  if (c.kind == MachineClosure::Kind::bang) return trail_ok(c.trail) && closure_trails_ok(*c.inner);
  return env_trails_ok(c.env);
}

}  // namespace

bool trails_normalized(const Config& c) {
  for (const auto& t : c.stack)
    if (!trail_ok(t.trail) || !env_trails_ok(t.env)) return false;
  for (const auto& v : c.dump)
    if (!trail_ok(v.trail) || !closure_trails_ok(*v.closure)) return false;
  return true;
}

// --- rendering -------------------------------------------------------------------

namespace {

void render_closure(std::ostringstream& os, const MachineClosure& c);

void render_env(std::ostringstream& os, const Env& e) {
  os << '<';
  bool first = true;
  for (const EnvCell* c = e.get(); c; c = c->tail.get()) {
    os << (first ? "" : ", ") << show(c->head.trail) << " |> ";
    render_closure(os, *c->head.closure);
    first = false;
  }
  os << '>';
}

void render_closure(std::ostringstream& os, const MachineClosure& c) {
  if (c.kind == MachineClosure::Kind::bang) {
    os << "!{" << show(c.trail) << "} ";
    render_closure(os, *c.inner);
    return;
  }
  os << "{" << show(lam(c.body)) << "}";
  render_env(os, c.env);
}

const char* code_name(CodeKind k) {
  switch (k) {
    case CodeKind::app_node: return "@";
    case CodeKind::bang_node: return "!";
    case CodeKind::let_node: return "let";
    case CodeKind::inspect_node: return "iota";
    case CodeKind::term: return "";
  }
  return "?";
}

}  // namespace

std::string render_value(const Value& v) {
  std::ostringstream os;
  os << show(v.trail) << " |> ";
  render_closure(os, *v.closure);
  return os.str();
}

std::string render_config(const Config& c) {
  std::ostringstream os;
  os << "stack[";
  for (std::size_t i = c.stack.size(); i-- > 0;) {
    const auto& t = c.stack[i];
    os << '(' << show(t.trail) << " | ";
    if (t.code.kind == CodeKind::term)
      os << show(t.code.term);
    else if (t.code.kind == CodeKind::let_node)
      os << "let(" << show(t.code.term) << ')';
    else
      os << code_name(t.code.kind);
    os << " | ";
    render_env(os, t.env);
    os << ')' << (i ? " :: " : "");
  }
  os << "] dump[";
  for (std::size_t i = c.dump.size(); i-- > 0;) os << render_value(c.dump[i]) << (i ? " :: " : "");
  os << ']';
  return os.str();
}

}  // namespace cau
