#include "idts/syntax.hpp"

#include <cctype>
#include <fstream>
#include <functional>
#include <sstream>

namespace idts {

namespace {

// Lexer ---------------------------------------------------------------------

enum class Tok { Ident, LParen, RParen, LBrack, RBrack, Comma, Colon, Dot, Arrow, Lambda, At, End };

struct Token {
  Tok kind;
  std::string text;
  Location loc;
};

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrack: return "'['";
    case Tok::RBrack: return "']'";
    case Tok::Comma: return "','";
    case Tok::Colon: return "':'";
    case Tok::Dot: return "'.'";
    case Tok::Arrow: return "'->'";
    case Tok::Lambda: return "'λ'";
    case Tok::At: return "'@'";
    case Tok::End: return "end of input";
  }
  return "?";
}

bool starts_with(std::string_view s, std::size_t i, std::string_view what) { return s.substr(i, what.size()) == what; }

bool ident_byte(unsigned char c) { return std::isalnum(c) || c == '_' || c == '\'' || c >= 0x80; }

void lex_line(std::string_view line, std::size_t line_no, std::vector<Token>& out) {
  std::size_t i = 0;
  while (i < line.size()) {
    unsigned char c = line[i];
    Location loc{line_no, i + 1};
    if (c == '#') return;
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    auto single = [&](Tok k, std::size_t n) {
      out.push_back({k, std::string(line.substr(i, n)), loc});
      i += n;
    };
    if (starts_with(line, i, "->")) single(Tok::Arrow, 2);
    else if (starts_with(line, i, "→")) single(Tok::Arrow, std::string_view("→").size());
    else if (starts_with(line, i, "λ")) single(Tok::Lambda, std::string_view("λ").size());
    else if (c == '\\') single(Tok::Lambda, 1);
    else if (c == '(') single(Tok::LParen, 1);
    else if (c == ')') single(Tok::RParen, 1);
    else if (c == '[') single(Tok::LBrack, 1);
    else if (c == ']') single(Tok::RBrack, 1);
    else if (c == ',') single(Tok::Comma, 1);
    else if (c == ':') single(Tok::Colon, 1);
    else if (c == '.') single(Tok::Dot, 1);
    else if (c == '@') single(Tok::At, 1);
    else if (ident_byte(c)) {
      std::size_t j = i;
      while (j < line.size() && ident_byte(static_cast<unsigned char>(line[j])) && !starts_with(line, j, "λ") &&
             !starts_with(line, j, "→"))
        ++j;
      out.push_back({Tok::Ident, std::string(line.substr(i, j - i)), loc});
      i = j;
    } else {
      throw Error(ErrorKind::SyntaxError, std::string("unexpected character '") + static_cast<char>(c) + "'", {}, loc);
    }
  }
}

std::vector<Token> lex(std::string_view text, std::size_t first_line = 1) {
  std::vector<Token> out;
  std::size_t line_no = first_line, start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    lex_line(line, line_no, out);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
    ++line_no;
  }
  return out;
}

bool is_meta_name(const std::string& name) {
  for (unsigned char c : name) {
    if (c == '_') continue;
    return std::isupper(c);
  }
  return false;
}

// Type inference store ------------------------------------------------------

struct TyStore {
  struct Node {
    int tag;  // 0 var, 1 base, 2 arrow
    std::string base;
    int a = -1, b = -1;
    int link = -1;
  };
  std::vector<Node> nodes;
  std::optional<std::string> fallback;

  int fresh() {
    nodes.push_back({0, {}, -1, -1, -1});
    return static_cast<int>(nodes.size() - 1);
  }
  int base(const std::string& n) {
    nodes.push_back({1, n, -1, -1, -1});
    return static_cast<int>(nodes.size() - 1);
  }
  int arrow(int a, int b) {
    nodes.push_back({2, {}, a, b, -1});
    return static_cast<int>(nodes.size() - 1);
  }
  int from(const Type& t) { return t.is_base() ? base(t.name()) : arrow(from(t.domain()), from(t.codomain())); }
  int find(int i) {
    while (nodes[i].tag == 0 && nodes[i].link >= 0) i = nodes[i].link;
    return i;
  }
  bool occurs(int v, int t) {
    t = find(t);
    if (t == v) return true;
    if (nodes[t].tag == 2) return occurs(v, nodes[t].a) || occurs(v, nodes[t].b);
    return false;
  }
  bool unify(int x, int y) {
    x = find(x);
    y = find(y);
    if (x == y) return true;
    if (nodes[x].tag == 0) {
      if (occurs(x, y)) return false;
      nodes[x].link = y;
      return true;
    }
    if (nodes[y].tag == 0) return unify(y, x);
    if (nodes[x].tag != nodes[y].tag) return false;
    if (nodes[x].tag == 1) return nodes[x].base == nodes[y].base;
    int xa = nodes[x].a, xb = nodes[x].b, ya = nodes[y].a, yb = nodes[y].b;
    return unify(xa, ya) && unify(xb, yb);
  }
  std::optional<Type> resolve(int i) {
    i = find(i);
    if (nodes[i].tag == 0) {
      if (!fallback) return std::nullopt;
      nodes[i].link = base(*fallback);
      return Type::base(*fallback);
    }
    if (nodes[i].tag == 1) return Type::base(nodes[i].base);
    int a = nodes[i].a, b = nodes[i].b;
    auto ta = resolve(a);
    auto tb = resolve(b);
    if (!ta || !tb) return std::nullopt;
    return Type::arrow(*ta, *tb);
  }
  std::string show(int i) {
    i = find(i);
    if (nodes[i].tag == 0) return "?";
    if (nodes[i].tag == 1) return nodes[i].base;
    int a = nodes[i].a, b = nodes[i].b;
    std::string l = show(a);
    if (nodes[find(a)].tag == 2) l = "(" + l + ")";
    return l + " -> " + show(b);
  }
};

// Untyped syntax trees ------------------------------------------------------

enum class AstKind { Var, Abs, Fun, Meta, App, Const, HApp, Lam };

struct Ast {
  AstKind kind;
  std::string name;
  std::optional<Type> annot;
  std::vector<Ast> kids;
  Location loc;
  int ty = -1;
};

// Parser --------------------------------------------------------------------

class Parser {
 public:
  Parser(std::vector<Token> toks) : toks_(std::move(toks)) {
    Location end_loc = toks_.empty() ? Location{} : toks_.back().loc;
    if (!toks_.empty()) end_loc.column += toks_.back().text.size();
    toks_.push_back({Tok::End, "", end_loc});
  }

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_end() const { return at(Tok::End); }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool accept(Tok k) {
    if (!at(k)) return false;
    next();
    return true;
  }
  const Token& expect(Tok k, const char* context) {
    if (!at(k))
      throw Error(ErrorKind::SyntaxError,
                  std::string("expected ") + tok_name(k) + " " + context + ", found " +
                      (at_end() ? std::string("end of input") : "'" + peek().text + "'"),
                  {}, peek().loc);
    return next();
  }
  [[noreturn]] void fail(const std::string& msg) const { throw Error(ErrorKind::SyntaxError, msg, {}, peek().loc); }
  void expect_end(const char* what) {
    if (!at_end()) fail(std::string("unexpected '") + peek().text + "' after " + what);
  }

  // Types
  Type type() {
    Type a = type_atom();
    if (accept(Tok::Arrow)) return Type::arrow(a, type());
    return a;
  }
  Type type_atom() {
    if (accept(Tok::LParen)) {
      Type t = type();
      expect(Tok::RParen, "closing a type");
      return t;
    }
    const Token& t = expect(Tok::Ident, "in a type");
    if (bases_ && !bases_->count(t.text))
      throw Error(ErrorKind::InvalidAlphabet, "undeclared base type " + t.text, {}, t.loc);
    return Type::base(t.text);
  }
  /// `(T1, ..., Tn) -> T` or a plain type (arity 0).
  Signature signature() {
    if (at(Tok::LParen)) {
      std::size_t save = pos_;
      next();
      std::vector<Type> args;
      if (!at(Tok::RParen)) {
        args.push_back(type());
        while (accept(Tok::Comma)) args.push_back(type());
      }
      if (accept(Tok::RParen) && accept(Tok::Arrow)) return Signature{args, type()};
      pos_ = save;
    }
    return Signature{{}, type()};
  }

  // IDTS metaterms
  Ast idts_term();
  // HRS terms
  Ast hrs_term();

  const Alphabet* alphabet_ = nullptr;
  const std::map<std::string, Type>* constants_ = nullptr;
  const std::set<std::string>* bases_ = nullptr;

 private:
  Ast hrs_app();
  bool hrs_atom_start() const { return at(Tok::Ident) || at(Tok::LParen) || at(Tok::At); }
  Ast hrs_atom();
  std::vector<std::string> scope_;
  bool bound(const std::string& x) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (*it == x) return true;
    return false;
  }
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

Ast Parser::idts_term() {
  Location loc = peek().loc;
  if (accept(Tok::LBrack)) {
    const Token& x = expect(Tok::Ident, "as the bound variable");
    Ast a{AstKind::Abs, x.text, std::nullopt, {}, loc};
    if (accept(Tok::Colon)) a.annot = type();
    expect(Tok::RBrack, "after the bound variable");
    scope_.push_back(a.name);
    a.kids.push_back(idts_term());
    scope_.pop_back();
    return a;
  }
  if (accept(Tok::At)) {
    Ast a{AstKind::App, kApply, std::nullopt, {}, loc};
    expect(Tok::LParen, "after @");
    a.kids.push_back(idts_term());
    expect(Tok::Comma, "between the arguments of @");
    a.kids.push_back(idts_term());
    expect(Tok::RParen, "closing @(...)");
    return a;
  }
  if (accept(Tok::LParen)) {
    Ast a = idts_term();
    expect(Tok::RParen, "closing a parenthesised term");
    return a;
  }
  const Token& id = expect(Tok::Ident, "at the start of a term");
  Ast a{AstKind::Var, id.text, std::nullopt, {}, loc};
  if (bound(id.text)) a.kind = AstKind::Var;
  else if (alphabet_->function(id.text)) a.kind = AstKind::Fun;
  else if (is_meta_name(id.text)) a.kind = AstKind::Meta;
  if (accept(Tok::LParen)) {
    if (a.kind == AstKind::Var)
      throw Error(ErrorKind::SyntaxError, "variable " + id.text + " cannot be applied; use @", {}, loc);
    if (!at(Tok::RParen)) {
      a.kids.push_back(idts_term());
      while (accept(Tok::Comma)) a.kids.push_back(idts_term());
    }
    expect(Tok::RParen, ("closing the arguments of " + id.text).c_str());
  }
  return a;
}

Ast Parser::hrs_term() {
  Location loc = peek().loc;
  if (accept(Tok::Lambda)) {
    std::vector<std::pair<std::string, std::optional<Type>>> binders;
    do {
      const Token& x = expect(Tok::Ident, "as a λ-bound variable");
      std::optional<Type> t;
      if (accept(Tok::Colon)) t = type();
      binders.emplace_back(x.text, t);
    } while (at(Tok::Ident));
    expect(Tok::Dot, "after the λ-binders");
    for (auto& b : binders) scope_.push_back(b.first);
    Ast body = hrs_term();
    for (std::size_t i = 0; i < binders.size(); ++i) scope_.pop_back();
    for (auto it = binders.rbegin(); it != binders.rend(); ++it) {
      Ast lam{AstKind::Lam, it->first, it->second, {}, loc};
      lam.kids.push_back(std::move(body));
      body = std::move(lam);
    }
    return body;
  }
  return hrs_app();
}

Ast Parser::hrs_app() {
  Ast head = hrs_atom();
  while (hrs_atom_start() || at(Tok::Lambda)) {
    Ast arg = at(Tok::Lambda) ? hrs_term() : hrs_atom();
    Ast app{AstKind::HApp, {}, std::nullopt, {}, head.loc};
    app.kids.push_back(std::move(head));
    app.kids.push_back(std::move(arg));
    head = std::move(app);
  }
  return head;
}

Ast Parser::hrs_atom() {
  Location loc = peek().loc;
  if (accept(Tok::LParen)) {
    Ast a = hrs_term();
    expect(Tok::RParen, "closing a parenthesised term");
    return a;
  }
  if (accept(Tok::At)) return Ast{AstKind::Const, kApply, std::nullopt, {}, loc};
  const Token& id = expect(Tok::Ident, "at the start of a term");
  if (bound(id.text)) return Ast{AstKind::Var, id.text, std::nullopt, {}, loc};
  if (constants_->count(id.text)) return Ast{AstKind::Const, id.text, std::nullopt, {}, loc};
  return Ast{AstKind::Var, id.text, std::nullopt, {}, loc};
}

// Inference -----------------------------------------------------------------

struct MetaTy {
  std::vector<int> args;
  int result;
};

struct Inference {
  TyStore ts;
  const Alphabet* alphabet = nullptr;
  const std::map<std::string, Type>* constants = nullptr;
  const TypeEnv* env = nullptr;
  std::map<std::string, int> free_tys;
  std::map<std::string, MetaTy> metas;
  std::vector<std::pair<std::string, int>> scope;

  [[noreturn]] void mismatch(const Ast& a, const std::string& msg) {
    throw Error(ErrorKind::TypeMismatch, msg, {}, a.loc);
  }

  int unify_or_fail(int x, int y, const Ast& a, const std::string& what) {
    if (!ts.unify(x, y)) mismatch(a, what + " has type " + ts.show(y) + ", expected " + ts.show(x));
    return x;
  }

  int var_ty(const Ast& a) {
    for (auto it = scope.rbegin(); it != scope.rend(); ++it)
      if (it->first == a.name) return it->second;
    auto f = free_tys.find(a.name);
    if (f != free_tys.end()) return f->second;
    int t;
    auto e = env->find(a.name);
    if (e != env->end()) t = ts.from(e->second);
    else t = ts.fresh();
    free_tys.emplace(a.name, t);
    return t;
  }

  int infer(Ast& a) {
    switch (a.kind) {
      case AstKind::Var: a.ty = var_ty(a); break;
      case AstKind::Abs:
      case AstKind::Lam: {
        int x = a.annot ? ts.from(*a.annot) : ts.fresh();
        scope.emplace_back(a.name, x);
        int b = infer(a.kids[0]);
        scope.pop_back();
        a.ty = ts.arrow(x, b);
        break;
      }
      case AstKind::Fun: {
        const Signature* sig = alphabet->function(a.name);
        if (sig->arity() != a.kids.size())
          throw Error(ErrorKind::ArityMismatch, a.name + " expects " + std::to_string(sig->arity()) + " arguments, got " +
                                                    std::to_string(a.kids.size()),
                      {}, a.loc);
        for (std::size_t i = 0; i < a.kids.size(); ++i) {
          int t = infer(a.kids[i]);
          unify_or_fail(ts.from(sig->args[i]), t, a.kids[i], "argument " + std::to_string(i + 1) + " of " + a.name);
        }
        a.ty = ts.from(sig->result);
        break;
      }
      case AstKind::Meta: {
        auto it = metas.find(a.name);
        if (it == metas.end()) {
          MetaTy m;
          auto d = alphabet->metavariables.find(a.name);
          if (d != alphabet->metavariables.end()) {
            for (const Type& t : d->second.args) m.args.push_back(ts.from(t));
            m.result = ts.from(d->second.result);
          } else {
            for (std::size_t i = 0; i < a.kids.size(); ++i) m.args.push_back(ts.fresh());
            m.result = ts.fresh();
          }
          it = metas.emplace(a.name, m).first;
        }
        if (it->second.args.size() != a.kids.size())
          throw Error(ErrorKind::ArityMismatch, "metavariable " + a.name + " has arity " +
                                                    std::to_string(it->second.args.size()) + ", applied to " +
                                                    std::to_string(a.kids.size()) + " arguments",
                      {}, a.loc);
        for (std::size_t i = 0; i < a.kids.size(); ++i) {
          int t = infer(a.kids[i]);
          unify_or_fail(it->second.args[i], t, a.kids[i], "argument " + std::to_string(i + 1) + " of " + a.name);
        }
        a.ty = it->second.result;
        break;
      }
      case AstKind::App:
      case AstKind::HApp: {
        int f = infer(a.kids[0]);
        int x = infer(a.kids[1]);
        int r = ts.fresh();
        if (!ts.unify(f, ts.arrow(x, r)))
          mismatch(a, "cannot apply a term of type " + ts.show(f) + " to an argument of type " + ts.show(x));
        a.ty = r;
        break;
      }
      case AstKind::Const: {
        if (a.name == kApply) {
          int s = ts.fresh(), t = ts.fresh();
          a.ty = ts.arrow(ts.arrow(s, t), ts.arrow(s, t));
        } else {
          a.ty = ts.from(constants->at(a.name));
        }
        break;
      }
    }
    return a.ty;
  }

  Type resolved(const Ast& a, int ty) {
    auto t = ts.resolve(ty);
    if (!t) throw Error(ErrorKind::AmbiguousType, "cannot determine the type of this term", {}, a.loc);
    return *t;
  }

  Term build_term(const Ast& a) {
    Type t = resolved(a, a.ty);
    switch (a.kind) {
      case AstKind::Var: return Term::var(a.name, t);
      case AstKind::Abs: return Term::abs(a.name, t.domain(), build_term(a.kids[0]));
      case AstKind::App: return Term::app(build_term(a.kids[0]), build_term(a.kids[1]));
      case AstKind::Fun:
      case AstKind::Meta: {
        std::vector<Term> args;
        for (const Ast& k : a.kids) args.push_back(build_term(k));
        return a.kind == AstKind::Fun ? Term::fun(a.name, std::move(args), t) : Term::meta(a.name, std::move(args), t);
      }
      default: break;
    }
    throw Error(ErrorKind::SyntaxError, "internal: unexpected syntax node", {}, a.loc);
  }

  Lambda build_lambda(const Ast& a) {
    Type t = resolved(a, a.ty);
    switch (a.kind) {
      case AstKind::Var: return Lambda::var(a.name, t);
      case AstKind::Const: return Lambda::constant(a.name, t);
      case AstKind::Lam: return Lambda::lam(a.name, t.domain(), build_lambda(a.kids[0]));
      case AstKind::HApp: return Lambda::app(build_lambda(a.kids[0]), build_lambda(a.kids[1]));
      default: break;
    }
    throw Error(ErrorKind::SyntaxError, "internal: unexpected syntax node", {}, a.loc);
  }
};

Error with_location(const Error& e, Location loc) {
  if (e.location().line != 0) return e;
  return Error(e.kind(), e.message(), e.position(), loc);
}

// Entries and sections ------------------------------------------------------

struct Entry {
  std::vector<Token> toks;
  Location loc;
};

struct Section {
  std::string name;
  std::vector<Token> header_rest;
  std::vector<Entry> entries;
  Location loc;
};

const std::set<std::string> kSectionNames = {"TYPES", "CONSTRUCTORS", "FUNCTIONS", "VARIABLES",
                                             "STATUS", "RULES", "MODE", "BETA"};

std::vector<Section> split_sections(std::string_view text) {
  std::vector<Section> sections;
  Entry pending;
  int depth = 0;
  std::size_t line_no = 0, start = 0;
  auto flush = [&]() {
    if (pending.toks.empty()) return;
    if (sections.empty())
      throw Error(ErrorKind::SyntaxError, "entry outside of any section", {}, pending.loc);
    sections.back().entries.push_back(std::move(pending));
    pending = Entry{};
  };
  while (start <= text.size()) {
    ++line_no;
    std::size_t nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    std::vector<Token> toks;
    lex_line(line, line_no, toks);
    if (!toks.empty()) {
      if (depth == 0 && toks[0].kind == Tok::Ident && kSectionNames.count(toks[0].text)) {
        flush();
        Section s{toks[0].text, {toks.begin() + 1, toks.end()}, {}, toks[0].loc};
        sections.push_back(std::move(s));
      } else {
        if (pending.toks.empty()) pending.loc = toks[0].loc;
        for (Token& t : toks) {
          if (t.kind == Tok::LParen || t.kind == Tok::LBrack) ++depth;
          if (t.kind == Tok::RParen || t.kind == Tok::RBrack) --depth;
          pending.toks.push_back(std::move(t));
        }
        if (depth <= 0) {
          depth = 0;
          flush();
        }
      }
    }
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  if (depth > 0) {
    Location loc = pending.toks.empty() ? Location{} : pending.toks.back().loc;
    for (const Token& t : pending.toks)
      if (t.kind == Tok::LParen || t.kind == Tok::LBrack) loc = t.loc;
    throw Error(ErrorKind::SyntaxError, "unclosed parenthesis", {}, loc);
  }
  flush();
  return sections;
}

/// Splits `names : rest` and returns the names.
std::vector<Token> names_before_colon(Parser& p, const char* what) {
  std::vector<Token> names;
  while (p.at(Tok::Ident)) {
    names.push_back(p.next());
    p.accept(Tok::Comma);
  }
  if (names.empty()) p.fail(std::string("expected a name in ") + what);
  p.expect(Tok::Colon, (std::string("after the names in ") + what).c_str());
  return names;
}

bool has_rule_name(const Entry& e) {
  return e.toks.size() >= 2 && e.toks[0].kind == Tok::Ident && e.toks[1].kind == Tok::Colon;
}

Rule parse_idts_rule(const Entry& e, const Alphabet& alphabet, std::string name) {
  std::vector<Token> toks = e.toks;
  if (has_rule_name(e)) {
    name = toks[0].text;
    toks.erase(toks.begin(), toks.begin() + 2);
  }
  Parser p(toks);
  p.alphabet_ = &alphabet;
  Ast lhs = p.idts_term();
  p.expect(Tok::Arrow, "between the sides of a rule");
  Ast rhs = p.idts_term();
  p.expect_end("the right-hand side");
  Inference inf;
  TypeEnv none;
  inf.alphabet = &alphabet;
  if (alphabet.base_types.size() == 1) inf.ts.fallback = *alphabet.base_types.begin();
  inf.env = &none;
  int lt = inf.infer(lhs);
  int rt = inf.infer(rhs);
  if (!inf.ts.unify(lt, rt))
    throw Error(ErrorKind::TypeMismatch, "sides of rule " + name + " have types " + inf.ts.show(lt) + " and " +
                                             inf.ts.show(rt),
                {}, e.loc);
  Rule r{name, inf.build_term(lhs), inf.build_term(rhs)};
  try {
    validate_rule(r, alphabet);
  } catch (const Error& err) {
    throw with_location(err, e.loc);
  }
  return r;
}

HrsRule parse_hrs_rule(const Entry& e, const HrsSystem& sys, const TypeEnv& env, std::string name) {
  std::vector<Token> toks = e.toks;
  if (has_rule_name(e)) {
    name = toks[0].text;
    toks.erase(toks.begin(), toks.begin() + 2);
  }
  Parser p(toks);
  p.constants_ = &sys.functions;
  p.bases_ = &sys.base_types;
  Ast lhs = p.hrs_term();
  p.expect(Tok::Arrow, "between the sides of a rule");
  Ast rhs = p.hrs_term();
  p.expect_end("the right-hand side");
  Inference inf;
  inf.constants = &sys.functions;
  inf.env = &env;
  if (sys.base_types.size() == 1) inf.ts.fallback = *sys.base_types.begin();
  int lt = inf.infer(lhs);
  int rt = inf.infer(rhs);
  if (!inf.ts.unify(lt, rt))
    throw Error(ErrorKind::TypeMismatch, "sides of rule " + name + " have types " + inf.ts.show(lt) + " and " +
                                             inf.ts.show(rt),
                {}, e.loc);
  HrsRule r{name, inf.build_lambda(lhs), inf.build_lambda(rhs)};
  try {
    validate_hrs_rule(r, sys);
  } catch (const Error& err) {
    throw with_location(err, e.loc);
  }
  return r;
}

}  // namespace

// Public parsing API --------------------------------------------------------

Type parse_type(std::string_view text) {
  Parser p(lex(text));
  Type t = p.type();
  p.expect_end("the type");
  return t;
}

Term parse_term(std::string_view text, const Alphabet& alphabet, const TypeEnv& env, std::optional<Type> expected) {
  Parser p(lex(text));
  p.alphabet_ = &alphabet;
  Ast a = p.idts_term();
  p.expect_end("the term");
  Inference inf;
  inf.alphabet = &alphabet;
  inf.env = &env;
  if (alphabet.base_types.size() == 1) inf.ts.fallback = *alphabet.base_types.begin();
  int t = inf.infer(a);
  if (expected && !inf.ts.unify(inf.ts.from(*expected), t))
    throw Error(ErrorKind::TypeMismatch, "term has type " + inf.ts.show(t) + ", expected " + expected->str(), {},
                a.loc);
  Term u = inf.build_term(a);
  typecheck(u, alphabet, free_var_types(u));
  return u;
}

Lambda parse_lambda(std::string_view text, const std::map<std::string, Type>& constants, const TypeEnv& env,
                    std::optional<Type> expected) {
  Parser p(lex(text));
  p.constants_ = &constants;
  Ast a = p.hrs_term();
  p.expect_end("the term");
  Inference inf;
  inf.constants = &constants;
  inf.env = &env;
  int t = inf.infer(a);
  if (expected && !inf.ts.unify(inf.ts.from(*expected), t))
    throw Error(ErrorKind::TypeMismatch, "term has type " + inf.ts.show(t) + ", expected " + expected->str(), {},
                a.loc);
  return inf.build_lambda(a);
}

SystemFile parse_system(std::string_view text, Mode default_mode) {
  std::vector<Section> sections = split_sections(text);
  SystemFile file;
  file.mode = default_mode;
  bool beta = true;
  auto only = [&](const Section& s, const char* what) -> std::string {
    std::vector<Token> toks = s.header_rest;
    for (const Entry& e : s.entries) toks.insert(toks.end(), e.toks.begin(), e.toks.end());
    if (toks.size() != 1 || toks[0].kind != Tok::Ident)
      throw Error(ErrorKind::SyntaxError, std::string("expected ") + what + " after " + s.name, {}, s.loc);
    return toks[0].text;
  };
  auto entries_of = [](const Section& s) {
    std::vector<Entry> es = s.entries;
    if (!s.header_rest.empty()) es.insert(es.begin(), Entry{s.header_rest, s.header_rest[0].loc});
    return es;
  };
  for (const Section& s : sections) {
    if (s.name == "MODE") {
      std::string m = only(s, "idts or hrs");
      if (m == "idts") file.mode = Mode::Idts;
      else if (m == "hrs") file.mode = Mode::Hrs;
      else throw Error(ErrorKind::SyntaxError, "unknown mode " + m, {}, s.loc);
    } else if (s.name == "BETA") {
      std::string b = only(s, "on or off");
      if (b == "on") beta = true;
      else if (b == "off") beta = false;
      else throw Error(ErrorKind::SyntaxError, "BETA must be on or off", {}, s.loc);
    }
  }
  bool hrs = file.mode == Mode::Hrs;
  std::set<std::string> bases;
  for (const Section& s : sections)
    if (s.name == "TYPES")
      for (const Entry& e : entries_of(s))
        for (const Token& t : e.toks) {
          if (t.kind == Tok::Comma) continue;
          if (t.kind != Tok::Ident) throw Error(ErrorKind::SyntaxError, "expected a base type name", {}, t.loc);
          bases.insert(t.text);
        }

  Alphabet& alpha = file.idts.alphabet;
  HrsSystem& hsys = file.hrs;
  alpha.base_types = bases;
  hsys.base_types = bases;

  auto declare_error = [](const Token& t, const std::string& msg) {
    throw Error(ErrorKind::InvalidAlphabet, msg, {}, t.loc);
  };

  for (const Section& s : sections) {
    if (s.name != "FUNCTIONS") continue;
    for (const Entry& e : entries_of(s)) {
      Parser p(e.toks);
      p.bases_ = &bases;
      auto names = names_before_colon(p, "FUNCTIONS");
      if (hrs) {
        Type t = p.type();
        p.expect_end("the type");
        for (const Token& n : names)
          if (!hsys.functions.emplace(n.text, t).second) declare_error(n, n.text + " declared twice");
      } else {
        Signature sig = p.signature();
        p.expect_end("the signature");
        for (const Token& n : names) {
          if (n.text == kApply) declare_error(n, "@ is builtin");
          if (!alpha.functions.emplace(n.text, sig).second) declare_error(n, n.text + " declared twice");
        }
      }
    }
  }

  for (const Section& s : sections) {
    if (s.name == "CONSTRUCTORS") {
      hsys.constructors_declared = true;
      for (const Entry& e : entries_of(s)) {
        Parser p(e.toks);
        auto names = names_before_colon(p, "CONSTRUCTORS");
        if (names.size() != 1) declare_error(names[1], "one base type per CONSTRUCTORS entry");
        std::set<std::string>& cs = hrs ? hsys.constructors[names[0].text] : alpha.constructors[names[0].text];
        while (!p.at_end()) {
          if (p.accept(Tok::Comma)) continue;
          const Token& c = p.expect(Tok::Ident, "as a constructor name");
          cs.insert(c.text);
        }
      }
    } else if (s.name == "STATUS") {
      for (const Entry& e : entries_of(s)) {
        Parser p(e.toks);
        auto names = names_before_colon(p, "STATUS");
        const Token& st = p.expect(Tok::Ident, "as a status");
        p.expect_end("the status");
        Status status;
        if (st.text == "lex") status = Status::Lex;
        else if (st.text == "mul") status = Status::Mul;
        else throw Error(ErrorKind::SyntaxError, "status must be lex or mul", {}, st.loc);
        for (const Token& n : names) (hrs ? hsys.statuses : alpha.statuses)[n.text] = status;
      }
    } else if (s.name == "VARIABLES") {
      for (const Entry& e : entries_of(s)) {
        Parser p(e.toks);
        p.bases_ = &bases;
        auto names = names_before_colon(p, "VARIABLES");
        if (hrs) {
          Type t = p.type();
          p.expect_end("the type");
          for (const Token& n : names) file.variables[n.text] = t;
        } else {
          Signature sig = p.signature();
          p.expect_end("the signature");
          for (const Token& n : names) {
            if (is_meta_name(n.text)) alpha.metavariables[n.text] = sig;
            else if (sig.args.empty()) file.variables[n.text] = sig.result;
            else declare_error(n, "variable " + n.text + " cannot take arguments");
          }
        }
      }
    }
  }

  if (hrs) {
    for (auto& [base, cs] : hsys.constructors) {
      if (!bases.count(base)) throw Error(ErrorKind::InvalidAlphabet, "constructors declared for unknown type " + base);
      for (const std::string& c : cs) {
        auto it = hsys.functions.find(c);
        if (it == hsys.functions.end() || !(it->second.target() == Type::base(base)))
          throw Error(ErrorKind::InvalidAlphabet, "constructor " + c + " of " + base + " is not a symbol with target " + base);
      }
    }
    for (auto& [f, st] : hsys.statuses)
      if (!hsys.functions.count(f)) throw Error(ErrorKind::InvalidAlphabet, "status given for undeclared symbol " + f);
  } else {
    alpha.validate();
  }

  std::set<std::string> rule_names;
  for (const Section& s : sections) {
    if (s.name != "RULES") continue;
    for (const Entry& e : entries_of(s)) {
      std::size_t index = (hrs ? hsys.rules.size() : file.idts.rules.size()) + 1;
      std::string name = "r" + std::to_string(index);
      std::string final_name;
      if (hrs) {
        hsys.rules.push_back(parse_hrs_rule(e, hsys, file.variables, name));
        final_name = hsys.rules.back().name;
      } else {
        file.idts.rules.push_back(parse_idts_rule(e, alpha, name));
        final_name = file.idts.rules.back().name;
      }
      if (!rule_names.insert(final_name).second)
        throw Error(ErrorKind::SyntaxError, "rule name " + final_name + " used twice", {}, e.loc);
    }
  }

  if (!hrs) {
    file.idts.beta_enabled = beta;
    for (const Rule& r : file.idts.rules)
      if (beta && r.lhs.is_app())
        throw Error(ErrorKind::AtHeadedUserRule, "rule " + r.name + " has a left-hand side headed by @ (use BETA off)");
  }
  return file;
}

SystemFile load_system(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  bool hrs_ext = path.size() >= 4 && path.compare(path.size() - 4, 4, ".hrs") == 0;
  return parse_system(ss.str(), hrs_ext ? Mode::Hrs : Mode::Idts);
}

// Printing ------------------------------------------------------------------

namespace {

std::string type_annot(const Type& t) { return t.is_arrow() ? "(" + t.str() + ")" : t.str(); }

void print_term_rec(const Term& u, PrintOptions o, std::string& out) {
  switch (u.kind()) {
    case TermKind::Var: out += u.name(); return;
    case TermKind::Abs:
      out += "[" + u.name();
      if (o.annotate) out += ":" + u.binder_type().str();
      out += "] ";
      print_term_rec(u.body(), o, out);
      return;
    case TermKind::Fun:
    case TermKind::Meta:
      out += u.name();
      if (u.arity() == 0) return;
      out += "(";
      for (std::size_t i = 0; i < u.arity(); ++i) {
        if (i) out += ", ";
        print_term_rec(u.arg(i), o, out);
      }
      out += ")";
      return;
  }
}

void print_lambda_rec(const Lambda& u, PrintOptions o, std::string& out) {
  switch (u.kind()) {
    case LambdaKind::Var:
    case LambdaKind::Const: out += u.name(); return;
    case LambdaKind::Lam:
      out += "λ" + u.name();
      if (o.annotate) out += ":" + type_annot(u.binder_type());
      out += ". ";
      print_lambda_rec(u.body(), o, out);
      return;
    case LambdaKind::App: {
      Spine sp = spine(u);
      auto atom = [&](const Lambda& t) {
        if (t.is_app() || t.is_lam()) {
          out += "(";
          print_lambda_rec(t, o, out);
          out += ")";
        } else {
          print_lambda_rec(t, o, out);
        }
      };
      atom(sp.head);
      for (const Lambda& a : sp.args) {
        out += " ";
        atom(a);
      }
      return;
    }
  }
}

std::string signature_text(const Signature& s) {
  if (s.args.empty()) return type_annot(s.result);
  return s.str();
}

}  // namespace

std::string print_term(const Term& u, PrintOptions options) {
  std::string out;
  print_term_rec(u, options, out);
  return out;
}

std::string print_lambda(const Lambda& u, PrintOptions options) {
  std::string out;
  print_lambda_rec(u, options, out);
  return out;
}

std::string print_rule(const Rule& r, PrintOptions options) {
  return r.name + " : " + print_term(r.lhs, options) + " -> " + print_term(r.rhs, options);
}

std::string print_hrs_rule(const HrsRule& r, PrintOptions options) {
  return r.name + " : " + print_lambda(r.lhs, options) + " -> " + print_lambda(r.rhs, options);
}

std::string print_valuation(const Valuation& sigma) {
  std::string out = "{";
  bool first = true;
  for (auto& [z, s] : sigma) {
    if (!first) out += ", ";
    first = false;
    out += z + " ↦ " + substitute_str(s);
  }
  return out + "}";
}

std::string print_lambda_substitution(const LambdaSubstitution& theta) {
  std::string out = "{";
  bool first = true;
  for (auto& [x, t] : theta) {
    if (!first) out += ", ";
    first = false;
    out += x + " ↦ " + print_lambda(t);
  }
  return out + "}";
}

std::string substitute_str(const Substitute& s) {
  std::string out = "λ̲(";
  for (std::size_t i = 0; i < s.params.size(); ++i) {
    if (i) out += ", ";
    out += s.params[i].first;
  }
  return out + ")." + print_term(s.body);
}

namespace {

// Prints without binder types when they are recovered by inference.
std::string rule_text(const Rule& r, const Alphabet& alphabet) {
  std::string plain = print_rule(r);
  try {
    Entry e{lex(plain), {}};
    Rule back = parse_idts_rule(e, alphabet, r.name);
    if (alpha_equal(back.lhs, r.lhs) && alpha_equal(back.rhs, r.rhs)) return plain;
  } catch (const Error&) {
  }
  return print_rule(r, {true});
}

std::string hrs_rule_text(const HrsRule& r, const HrsSystem& sys, const TypeEnv& env) {
  std::string plain = print_hrs_rule(r);
  try {
    Entry e{lex(plain), {}};
    HrsRule back = parse_hrs_rule(e, sys, env, r.name);
    if (alpha_equal(back.lhs, r.lhs) && alpha_equal(back.rhs, r.rhs)) return plain;
  } catch (const Error&) {
  }
  return print_hrs_rule(r, {true});
}

std::string join(const std::set<std::string>& xs, const char* sep = " ") {
  std::string out;
  for (const std::string& x : xs) {
    if (!out.empty()) out += sep;
    out += x;
  }
  return out;
}

}  // namespace

std::string print_system(const RewriteSystem& system, const TypeEnv& variables) {
  const Alphabet& a = system.alphabet;
  std::string out = "MODE idts\n";
  out += std::string("BETA ") + (system.beta_enabled ? "on" : "off") + "\n";
  out += "TYPES\n  " + join(a.base_types) + "\n";
  out += "FUNCTIONS\n";
  for (auto& [f, sig] : a.functions) out += "  " + f + " : " + signature_text(sig) + "\n";
  bool any_constructors = false;
  for (auto& [b, cs] : a.constructors) any_constructors |= !cs.empty();
  if (any_constructors) {
    out += "CONSTRUCTORS\n";
    for (auto& [b, cs] : a.constructors)
      if (!cs.empty()) out += "  " + b + " : " + join(cs) + "\n";
  }
  if (!a.statuses.empty()) {
    out += "STATUS\n";
    for (auto& [f, st] : a.statuses) out += "  " + f + " : " + status_name(st) + "\n";
  }
  if (!a.metavariables.empty() || !variables.empty()) {
    out += "VARIABLES\n";
    for (auto& [z, sig] : a.metavariables) out += "  " + z + " : " + signature_text(sig) + "\n";
    for (auto& [x, t] : variables) out += "  " + x + " : " + t.str() + "\n";
  }
  out += "RULES\n";
  for (const Rule& r : system.rules) out += "  " + rule_text(r, a) + "\n";
  return out;
}

std::string print_system(const HrsSystem& system, const TypeEnv& variables) {
  std::string out = "MODE hrs\n";
  out += "TYPES\n  " + join(system.base_types) + "\n";
  out += "FUNCTIONS\n";
  for (auto& [f, t] : system.functions) out += "  " + f + " : " + t.str() + "\n";
  if (system.constructors_declared) {
    out += "CONSTRUCTORS\n";
    for (auto& [b, cs] : system.constructors)
      if (!cs.empty()) out += "  " + b + " : " + join(cs) + "\n";
  }
  if (!system.statuses.empty()) {
    out += "STATUS\n";
    for (auto& [f, st] : system.statuses) out += "  " + f + " : " + status_name(st) + "\n";
  }
  if (!variables.empty()) {
    out += "VARIABLES\n";
    for (auto& [x, t] : variables) out += "  " + x + " : " + t.str() + "\n";
  }
  out += "RULES\n";
  for (const HrsRule& r : system.rules) out += "  " + hrs_rule_text(r, system, variables) + "\n";
  return out;
}

}  // namespace idts
