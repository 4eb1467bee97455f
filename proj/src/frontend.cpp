#include "cau/frontend.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "cau/corpus.hpp"
#include "cau/machine.hpp"
#include "cau/sigma.hpp"

namespace cau {

ParseError::ParseError(const std::string& msg, std::size_t l, std::size_t c)
    : SyntaxError(std::to_string(l) + ":" + std::to_string(c) + ": " + msg), line(l), column(c) {}

const Prelude& builtin_prelude() {
  static const Prelude p = [] {
    Prelude m;
    const char* numerals[] = {"zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten"};
    for (std::uint32_t i = 0; i <= 10; ++i) m.emplace(numerals[i], church(i));
    m.emplace("plus", plus());
    m.emplace("sum", sum9());
    m.emplace("idf", identity());
    m.emplace("pair", pair_ctor());
    return m;
  }();
  return p;
}

// --- lexing --------------------------------------------------------------------------

namespace {

const std::set<std::string, std::less<>> kReserved{"let", "in", "iota", "erase", "ext", "r", "t",  "b",  "bb",
                                                   "ti",  "lam", "app", "letq", "tb", "id", "shift", "def"};
const std::set<std::string, std::less<>> kTrailWords{"r", "t", "b", "bb", "ti", "lam", "app", "letq", "tb", "ext"};
const char* const kSlotNames[kSlots] = {"r", "t", "b", "bb", "ti", "lam", "app", "letq", "tb"};

struct Token {
  enum class Kind : std::uint8_t { ident, index, sym, end } kind;
  std::string text;
  std::size_t line, column;
};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else if ((static_cast<unsigned char>(src[i]) & 0xC0) != 0x80) {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (src.substr(i, 2) == "--") {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    const std::size_t l = line, cl = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '\''))
        ++j;
      out.push_back({Token::Kind::ident, std::string(src.substr(i, j - i)), l, cl});
      advance(j - i);
      continue;
    }
    if (c == '#') {
      std::size_t j = i + 1;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j == i + 1) throw ParseError("expected digits after '#'", l, cl);
      out.push_back({Token::Kind::index, std::string(src.substr(i + 1, j - i - 1)), l, cl});
      advance(j - i);
      continue;
    }
    if (src.substr(i, 2) == "|>") {
      out.push_back({Token::Kind::sym, "|>", l, cl});
      advance(2);
      continue;
    }
    if (src.substr(i, 2) == "\xCE\xBB") {  // λ
      out.push_back({Token::Kind::sym, "\\", l, cl});
      advance(2);
      continue;
    }
    if (std::string_view("\\.(){}[],:;=!").find(c) != std::string_view::npos) {
      out.push_back({Token::Kind::sym, std::string(1, c), l, cl});
      advance(1);
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", l, cl);
  }
  out.push_back({Token::Kind::end, "", line, col});
  return out;
}

// --- parsing ---------------------------------------------------------------------------

class Parser {
 public:
  Parser(std::string_view src, const Prelude& prelude) : toks_(lex(src)), prelude_(prelude) {}

  Term file() {
    while (is_ident("def")) definition();
    Term m = term();
    if (is_sym(";")) next();
    expect_end();
    return m;
  }

  Trail trail_only() {
    Trail q = trail();
    expect_end();
    return q;
  }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool is_sym(std::string_view s, std::size_t k = 0) const {
    return peek(k).kind == Token::Kind::sym && peek(k).text == s;
  }
  bool is_ident(std::string_view s) const { return peek().kind == Token::Kind::ident && peek().text == s; }

  [[noreturn]] void fail(const std::string& msg, const Token& at) const { throw ParseError(msg, at.line, at.column); }

  std::string describe(const Token& t) const {
    if (t.kind == Token::Kind::end) return "end of input";
    if (t.kind == Token::Kind::index) return "'#" + t.text + "'";
    return "'" + t.text + "'";
  }

  void expect_sym(std::string_view s) {
    if (!is_sym(s)) fail("expected '" + std::string(s) + "' but found " + describe(peek()), peek());
    next();
  }
  void expect_ident(std::string_view s) {
    if (!is_ident(s)) fail("expected '" + std::string(s) + "' but found " + describe(peek()), peek());
    next();
  }
  void expect_end() {
    if (peek().kind != Token::Kind::end) fail("unexpected " + describe(peek()), peek());
  }

  std::string binder() {
    const Token& t = peek();
    if (t.kind != Token::Kind::ident) fail("expected an identifier but found " + describe(t), t);
    if (kReserved.count(t.text)) fail("'" + t.text + "' is reserved", t);
    next();
    return t.text;
  }

  void definition() {
    next();  // def
    const Token at = peek();
    const std::string name = binder();
    expect_sym("=");
    const Term m = term();
    expect_sym(";");
    if (max_free_index(m) != 0) fail("definition of '" + name + "' is not closed", at);
    prelude_[name] = m;
  }

  bool open_form_start() const {
    if (is_sym("\\") || is_sym("!")) return true;
    if (peek().kind != Token::Kind::ident) return false;
    return peek().text == "let" || kTrailWords.count(peek().text) > 0;
  }

  bool atom_start() const {
    const Token& t = peek();
    if (t.kind == Token::Kind::index) return true;
    if (t.kind == Token::Kind::sym) return t.text == "(";
    if (t.kind != Token::Kind::ident) return false;
    return t.text == "iota" || t.text == "erase" || !kReserved.count(t.text);
  }

  Term term() {
    if (is_sym("\\")) {
      next();
      std::vector<std::string> names{binder()};
      while (peek().kind == Token::Kind::ident && !is_sym(".")) names.push_back(binder());
      expect_sym(".");
      for (const auto& n : names) scope_.push_back(n);
      Term body = term();
      scope_.resize(scope_.size() - names.size());
      for (std::size_t i = 0; i < names.size(); ++i) body = lam(body);
      return body;
    }
    if (is_ident("let")) {
      next();
      const std::string name = binder();
      expect_sym("=");
      const Term def = term();
      expect_ident("in");
      scope_.push_back(name);
      const Term body = term();
      scope_.pop_back();
      return let_bang(def, body);
    }
    if (is_sym("!")) {
      next();
      Trail q = refl();
      if (is_sym("{")) {
        next();
        q = trail();
        expect_sym("}");
      }
      return bang(q, term());
    }
    if (peek().kind == Token::Kind::ident && kTrailWords.count(peek().text)) {
      const Trail q = trail();
      expect_sym("|>");
      return annot(q, term());
    }
    return application();
  }

  Term application() {
    if (!atom_start()) fail("expected a term but found " + describe(peek()), peek());
    Term f = postfix_atom();
    for (;;) {
      if (atom_start()) {
        f = app(f, postfix_atom());
      } else if (open_form_start()) {
        return app(f, term());
      } else {
        return f;
      }
    }
  }

  Term postfix_atom() {
    Term a = atom();
    while (is_sym("[")) {
      next();
      const Subst s = subst();
      expect_sym("]");
      a = closure(a, s);
    }
    return a;
  }

  Term atom() {
    const Token t = peek();
    if (t.kind == Token::Kind::index) {
      next();
      const unsigned long n = std::stoul(t.text);
      if (n == 0) fail("indices start at #1", t);
      return var(static_cast<std::uint32_t>(n));
    }
    if (is_sym("(")) {
      next();
      Term m = term();
      expect_sym(")");
      return m;
    }
    if (t.text == "erase") {
      next();
      expect_sym("(");
      Term m = term();
      expect_sym(")");
      return erase(m);
    }
    if (t.text == "iota") return inspection();
    next();
    for (std::size_t i = scope_.size(); i-- > 0;)
      if (scope_[i] == t.text) return var(static_cast<std::uint32_t>(scope_.size() - i));
    if (auto it = prelude_.find(t.text); it != prelude_.end()) return it->second;
    fail("unbound identifier '" + t.text + "'", t);
  }

  Term inspection() {
    const Token start = next();  // iota
    expect_sym("{");
    std::array<std::optional<Term>, kSlots> slots;
    for (bool first = true; !is_sym("}"); first = false) {
      if (!first) expect_sym(",");
      const Token key = peek();
      if (key.kind != Token::Kind::ident) fail("expected an inspection slot but found " + describe(key), key);
      const auto* it = std::find(std::begin(kSlotNames), std::end(kSlotNames), key.text);
      if (it == std::end(kSlotNames)) fail("unknown inspection slot '" + key.text + "'", key);
      const auto i = static_cast<std::size_t>(it - std::begin(kSlotNames));
      if (slots[i]) fail("inspection slot '" + key.text + "' given twice", key);
      next();
      expect_sym(":");
      slots[i] = term();
    }
    next();  // }
    std::string missing;
    for (std::size_t i = 0; i < kSlots; ++i)
      if (!slots[i]) missing += (missing.empty() ? "" : ", ") + std::string(kSlotNames[i]);
    if (!missing.empty()) fail("inspection must name all nine slots; missing " + missing, start);
    Replacement<Term> br;
    for (std::size_t i = 0; i < kSlots; ++i) br[i] = *slots[i];
    return inspect(br);
  }

  Trail trail() {
    const Token t = peek();
    if (t.kind != Token::Kind::ident || !kTrailWords.count(t.text)) fail("expected a trail but found " + describe(t), t);
    next();
    if (t.text == "r") return refl();
    if (t.text == "b") return beta();
    if (t.text == "bb") return beta_bang();
    if (t.text == "ti") return ti();
    expect_sym("(");
    if (t.text == "ext") {
      const Term m = term();
      expect_sym(")");
      return extract(m);
    }
    std::vector<Trail> args{trail()};
    while (is_sym(",")) {
      next();
      args.push_back(trail());
    }
    expect_sym(")");
    auto arity = [&](std::size_t n) {
      if (args.size() != n)
        fail("'" + t.text + "' takes " + std::to_string(n) + " trails, got " + std::to_string(args.size()), t);
    };
    if (t.text == "lam") {
      arity(1);
      return lam_t(args[0]);
    }
    if (t.text == "tb") {
      arity(kSlots);
      Replacement<Trail> br;
      std::copy(args.begin(), args.end(), br.begin());
      return trpl(br);
    }
    arity(2);
    if (t.text == "t") return trans(args[0], args[1]);
    if (t.text == "app") return app_t(args[0], args[1]);
    return let_t(args[0], args[1]);
  }

  Subst subst() {
    Subst s = subst_primary();
    if (is_ident("o")) {
      next();
      return comp(s, subst());
    }
    return s;
  }

  Subst subst_primary() {
    if (is_ident("id")) {
      next();
      return id();
    }
    if (is_ident("shift")) {
      next();
      return shift();
    }
    if (is_sym("(")) {
      // a parenthesized substitution, or a parenthesized cons head
      const std::size_t save = pos_;
      try {
        next();
        Subst s = subst();
        expect_sym(")");
        return s;
      } catch (const ParseError&) {
        pos_ = save;
      }
    }
    const Term head = term();
    expect_sym(".");
    return cons(head, subst());
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  Prelude prelude_;
  std::vector<std::string> scope_;
};

}  // namespace

Term parse_term(std::string_view text, const Prelude& prelude) { return Parser(text, prelude).file(); }

Trail parse_trail(std::string_view text, const Prelude& prelude) { return Parser(text, prelude).trail_only(); }

// --- printing ----------------------------------------------------------------------------

namespace {

class Printer {
 public:
  explicit Printer(const Prelude* names) {
    if (!names) return;
    for (const auto& [name, m] : *names) constants_.emplace(m.node(), name);
  }

  enum class Ctx : std::uint8_t { top, fun, arg };

  void term(std::ostringstream& os, const Term& m, std::uint32_t depth, Ctx ctx) {
    if (!constants_.empty() && max_free_index(m) == 0)
      if (auto it = constants_.find(m.node()); it != constants_.end()) {
        os << it->second;
        return;
      }
    const bool open = m.is(Kind::lam) || m.is(Kind::let) || m.is(Kind::annot) || m.is(Kind::bang);
    const bool parens = (open && ctx != Ctx::top) || (m.is(Kind::app) && ctx == Ctx::arg);
    if (parens) os << '(';
    switch (m.kind()) {
      case Kind::var:
        if (m.index() <= depth)
          os << 'x' << depth - m.index() + 1;
        else
          os << '#' << m.index();
        break;
      case Kind::lam:
        os << "\\x" << depth + 1 << ". ";
        term(os, m.term(0), depth + 1, Ctx::top);
        break;
      case Kind::app:
        term(os, m.term(0), depth, Ctx::fun);
        os << ' ';
        term(os, m.term(1), depth, Ctx::arg);
        break;
      case Kind::let:
        os << "let x" << depth + 1 << " = ";
        term(os, m.term(0), depth, Ctx::top);
        os << " in ";
        term(os, m.term(1), depth + 1, Ctx::top);
        break;
      case Kind::bang:
        if (m.trail(0) == refl()) {
          os << "! ";
        } else {
          os << "!{";
          trail(os, m.trail(0), depth);
          os << "} ";
        }
        term(os, m.term(1), depth, Ctx::top);
        break;
      case Kind::annot:
        trail(os, m.trail(0), depth);
        os << " |> ";
        term(os, m.term(1), depth, Ctx::top);
        break;
      case Kind::inspect:
        os << "iota{";
        for (std::size_t i = 0; i < kSlots; ++i) {
          os << (i ? ", " : "") << kSlotNames[i] << ": ";
          term(os, m.term(i), depth, Ctx::top);
        }
        os << '}';
        break;
      case Kind::erase:
        os << "erase(";
        term(os, m.term(0), depth, Ctx::top);
        os << ')';
        break;
      case Kind::closure: {
        const Term body = m.term(0);
        const bool atomic = body.is(Kind::var) || body.is(Kind::inspect) || body.is(Kind::erase) || body.is(Kind::closure);
        if (!atomic) os << '(';
        term(os, body, depth, Ctx::top);
        if (!atomic) os << ')';
        os << '[';
        subst(os, m.subst(1), depth);
        os << ']';
        break;
      }
      default:
        throw SyntaxError("not a term");
    }
    if (parens) os << ')';
  }

  void trail(std::ostringstream& os, const Trail& q, std::uint32_t depth) {
    switch (q.kind()) {
      case Kind::refl: os << 'r'; return;
      case Kind::beta: os << 'b'; return;
      case Kind::beta_bang: os << "bb"; return;
      case Kind::ti: os << "ti"; return;
      case Kind::extract:
        os << "ext(";
        term(os, q.term(0), depth, Ctx::top);
        os << ')';
        return;
      default: break;
    }
    const char* head = q.is(Kind::trans) ? "t" : q.is(Kind::lam_t) ? "lam" : q.is(Kind::app_t) ? "app"
                     : q.is(Kind::let_t) ? "letq" : "tb";
    os << head << '(';
    for (std::size_t i = 0; i < q.arity(); ++i) {
      if (i) os << ',';
      trail(os, q.trail(i), depth);
    }
    os << ')';
  }

  void subst(std::ostringstream& os, const Subst& s, std::uint32_t depth) {
    switch (s.kind()) {
      case Kind::id: os << "id"; return;
      case Kind::shift: os << "shift"; return;
      case Kind::cons:
        term(os, s.term(0), depth, Ctx::fun);
        os << " . ";
        subst(os, s.subst(1), depth);
        return;
      case Kind::comp: {
        const Subst l = s.subst(0);
        const bool wrap = l.is(Kind::cons) || l.is(Kind::comp);
        if (wrap) os << '(';
        subst(os, l, depth);
        if (wrap) os << ')';
        os << " o ";
        subst(os, s.subst(1), depth);
        return;
      }
      default: throw SyntaxError("not a substitution");
    }
  }

 private:
  std::unordered_map<NodePtr, std::string, NodeHash, NodeEq> constants_;
};

}  // namespace

std::string print_term(const Term& m) {
  std::ostringstream os;
  Printer(nullptr).term(os, m, 0, Printer::Ctx::top);
  return os.str();
}

std::string print_term_named(const Term& m, const Prelude& names) {
  std::ostringstream os;
  Printer(&names).term(os, m, 0, Printer::Ctx::top);
  return os.str();
}

std::string print_trail(const Trail& q) {
  std::ostringstream os;
  Printer(nullptr).trail(os, q, 0);
  return os.str();
}

std::string print_subst(const Subst& s) {
  std::ostringstream os;
  Printer(nullptr).subst(os, s, 0);
  return os.str();
}

// --- drivers ---------------------------------------------------------------------------------

const char* engine_name(Engine e) {
  switch (e) {
    case Engine::naive: return "naive";
    case Engine::sigma: return "sigma";
    case Engine::machine: return "machine";
  }
  return "?";
}

std::optional<Engine> parse_engine(std::string_view s) {
  for (auto e : {Engine::naive, Engine::sigma, Engine::machine})
    if (s == engine_name(e)) return e;
  return std::nullopt;
}

const char* strategy_name(Strategy s) { return s == Strategy::normal ? "normal" : "cbv"; }

std::optional<Strategy> parse_strategy(std::string_view s) {
  if (s == "normal") return Strategy::normal;
  if (s == "cbv") return Strategy::cbv;
  return std::nullopt;
}

std::string to_json_line(const TraceRow& r) {
  nlohmann::ordered_json j;
  j["step"] = r.step;
  j["engine"] = r.engine;
  j["rule"] = r.rule;
  if (r.position) j["position"] = *r.position;
  if (r.machine_rule) j["machine_rule"] = *r.machine_rule;
  if (r.stack_depth) j["stack_depth"] = *r.stack_depth;
  if (r.dump_depth) j["dump_depth"] = *r.dump_depth;
  j["rendering"] = r.rendering;
  if (r.bang_trail) j["bang_trail"] = *r.bang_trail;
  if (r.term) j["term"] = *r.term;
  if (r.strategy) j["strategy"] = *r.strategy;
  return j.dump();
}

TraceRow row_from_json_line(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed trace row: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("trace row is not an object");
  try {
    TraceRow r;
    r.step = j.at("step").get<std::uint64_t>();
    r.engine = j.at("engine").get<std::string>();
    r.rule = j.at("rule").get<std::string>();
    if (j.contains("position")) r.position = j["position"].get<std::string>();
    if (j.contains("machine_rule")) r.machine_rule = j["machine_rule"].get<int>();
    if (j.contains("stack_depth")) r.stack_depth = j["stack_depth"].get<std::size_t>();
    if (j.contains("dump_depth")) r.dump_depth = j["dump_depth"].get<std::size_t>();
    r.rendering = j.at("rendering").get<std::string>();
    if (j.contains("bang_trail")) r.bang_trail = j["bang_trail"].get<std::string>();
    if (j.contains("term")) r.term = j["term"].get<std::string>();
    if (j.contains("strategy")) r.strategy = j["strategy"].get<std::string>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("trace row: ") + e.what());
  }
}

namespace {

// στ-normal history of the nearest bang above `path`, if any.
std::optional<std::string> history_at(const Term& root, const TermPath& path, std::optional<TermPath> bang_path) {
  if (!bang_path) bang_path = nearest_bang(root.node(), path);
  if (!bang_path) return std::nullopt;
  const Term b(subterm_at(root.node(), *bang_path));
  return print_trail(sigmatau_normalize(trans(b.trail(0), extract(b.term(1)))));
}

struct TermStep {
  Term next;
  TraceRow row;
};

std::optional<Redex> naive_redex(const Term& m, Strategy s, std::string& stuck) {
  if (s == Strategy::normal) {
    auto rs = find_principal_redexes(m);
    if (rs.empty()) return std::nullopt;
    return rs.front();
  }
  const auto f = cbv_focus(m);
  if (f.kind == CbvFocus::Kind::redex) return f.redex;
  if (f.kind == CbvFocus::Kind::stuck) stuck = f.reason;
  return std::nullopt;
}

}  // namespace

ReduceResult reduce(const Term& input, Engine engine, Strategy strategy, std::uint64_t max_steps,
                    const std::function<void(const TraceRow&)>& sink) {
  auto emit = [&](const TraceRow& r) {
    if (sink) sink(r);
  };
  TraceRow init;
  init.engine = engine_name(engine);
  init.rule = "init";
  init.term = print_term(input);
  init.strategy = strategy_name(strategy);

  if (engine == Engine::machine) {
    Config c = inject(input);
    init.rendering = render_config(c);
    init.stack_depth = c.stack.size();
    init.dump_depth = c.dump.size();
    emit(init);
    for (std::uint64_t n = 0;; ++n) {
      auto r = step(c);
      if (r.kind == StepResult::Kind::final)
        return {ReduceResult::Outcome::done, sigmatau_normalize(denote_value(*r.value)), n, {}};
      if (r.kind == StepResult::Kind::stuck)
        return {ReduceResult::Outcome::stuck, sigmatau_normalize(denote_config(c)), n, r.reason};
      if (n == max_steps) return {ReduceResult::Outcome::fuel_exhausted, sigmatau_normalize(denote_config(c)), n, {}};
      c = std::move(r.next);
      TraceRow row;
      row.step = n + 1;
      row.engine = init.engine;
      row.rule = "rule " + std::to_string(r.rule);
      row.machine_rule = r.rule;
      row.rendering = render_config(c);
      row.stack_depth = c.stack.size();
      row.dump_depth = c.dump.size();
      emit(row);
    }
  }

  Term m = engine == Engine::naive ? tau_normalize(input) : input;
  init.rendering = print_term(m);
  emit(init);
  for (std::uint64_t n = 0;; ++n) {
    TraceRow row;
    row.step = n + 1;
    row.engine = init.engine;
    Term next;
    if (engine == Engine::naive) {
      std::string stuck;
      const auto r = naive_redex(m, strategy, stuck);
      if (!r) {
        if (!stuck.empty()) return {ReduceResult::Outcome::stuck, m, n, stuck};
        return {ReduceResult::Outcome::done, m, n, {}};
      }
      if (n == max_steps) return {ReduceResult::Outcome::fuel_exhausted, m, n, {}};
      Term contracted;
      try {
        contracted = principal_contract(m, *r);
      } catch (const SyntaxError& e) {
        return {ReduceResult::Outcome::stuck, m, n, e.what()};
      }
      row.rule = redex_name(r->kind);
      row.position = show_path(r->path);
      row.bang_trail = history_at(contracted, r->path, r->kind == RedexKind::inspect ? std::optional(r->bang_path) : std::nullopt);
      next = tau_normalize(contracted);
    } else {
      const auto rs = beta_sigma_redexes(m);
      if (rs.empty()) {
        const Term nf = sigmatau_normalize(m);
        if (nf == m) return {ReduceResult::Outcome::done, m, n, {}};
        if (n == max_steps) return {ReduceResult::Outcome::fuel_exhausted, m, n, {}};
        row.rule = "sigmatau";
        next = nf;
      } else {
        if (n == max_steps) return {ReduceResult::Outcome::fuel_exhausted, m, n, {}};
        const Redex& r = rs.front();
        try {
          next = beta_sigma_contract(m, r);
        } catch (const SyntaxError& e) {
          return {ReduceResult::Outcome::stuck, m, n, e.what()};
        }
        row.rule = redex_name(r.kind);
        row.position = show_path(r.path);
        row.bang_trail = history_at(next, r.path, r.kind == RedexKind::inspect ? std::optional(r.bang_path) : std::nullopt);
      }
    }
    m = next;
    row.rendering = print_term(m);
    emit(row);
  }
}

ReplayResult replay(const std::vector<TraceRow>& rows) {
  if (rows.empty()) return {false, "empty trace"};
  const TraceRow& head = rows.front();
  if (head.step != 0 || head.rule != "init" || !head.term) return {false, "the first row must be the step-0 init row"};
  const auto engine = parse_engine(head.engine);
  if (!engine) return {false, "unknown engine '" + head.engine + "'"};
  const auto strategy = parse_strategy(head.strategy.value_or("normal"));
  if (!strategy) return {false, "unknown strategy"};
  Term m;
  try {
    m = parse_term(*head.term);
  } catch (const SyntaxError& e) {
    return {false, std::string("initial term: ") + e.what()};
  }
  std::vector<std::string> produced;
  reduce(m, *engine, *strategy, rows.size() - 1, [&](const TraceRow& r) { produced.push_back(to_json_line(r)); });
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i >= produced.size()) return {false, "row " + std::to_string(i) + " has no counterpart: the run ended earlier"};
    if (produced[i] != to_json_line(rows[i])) return {false, "row " + std::to_string(i) + " differs"};
  }
  return {true, std::to_string(rows.size()) + " rows reproduced"};
}

std::vector<Trail> raw_bang_trails(const Term& input, std::size_t steps) {
  std::vector<Trail> out;
  Term m = tau_normalize(input);
  std::optional<Trail> raw;
  for (std::size_t i = 0; i < steps; ++i) {
    const auto rs = find_principal_redexes(m);
    if (rs.empty()) break;
    const Term c = principal_contract(m, rs.front());
    const auto bp = rs.front().kind == RedexKind::inspect ? std::optional(rs.front().bang_path)
                                                          : nearest_bang(c.node(), rs.front().path);
    if (!bp) break;
    const Term b(subterm_at(c.node(), *bp));
    if (!raw) raw = b.trail(0);
    const Term body = tau_normalize(b.term(1));
    const Trail local = body.is(Kind::annot) ? body.trail(0) : refl();
    raw = trans(*raw, local);
    out.push_back(*raw);
    m = tau_normalize(c);
  }
  return out;
}

std::optional<std::uint32_t> church_value(const Term& m) {
  if (!m.is(Kind::lam) || !m.term(0).is(Kind::lam)) return std::nullopt;
  Term body = m.term(0).term(0);
  std::uint32_t n = 0;
  while (body.is(Kind::app) && body.term(0) == var(2)) {
    body = body.term(1);
    ++n;
  }
  if (body != var(1)) return std::nullopt;
  return n;
}

std::optional<InspectCount> inspect_count(const Term& m, std::uint64_t fuel) {
  const auto r = cau_normalize(m, fuel);
  if (r.outcome == EvalResult::Outcome::fuel_exhausted) throw FuelExhausted("normalization of the input");
  Term t = r.term;
  if (t.is(Kind::annot)) t = t.term(1);
  if (!t.is(Kind::bang)) return std::nullopt;
  const Trail q = t.trail(0);
  const auto c = cau_normalize(apply_replacement(q, theta_plus()), fuel);
  if (c.outcome == EvalResult::Outcome::fuel_exhausted) throw FuelExhausted("normalization of the count");
  Term counted = c.term.is(Kind::annot) ? c.term.term(1) : c.term;
  const auto n = church_value(counted);
  if (!n) return std::nullopt;
  return InspectCount{q, *n, counted};
}

}  // namespace cau
