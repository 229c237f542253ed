#include <cctype>
#include <set>

#include "stt/syntax.hpp"

namespace stt {

namespace {

enum class TokKind { Ident, Number, Symbol, Path, End };

struct Token {
  TokKind kind;
  std::string text;
  int line, col;
  std::size_t begin, end;  // byte offsets
  int end_line, end_col;
  bool conjecture = false;  // a `-- conjecture` pragma precedes this token
};

const std::set<std::string>& reserved() {
  static const std::set<std::string> words = {
      "postulate", "def", "import", "let", "mod", "in", "U", "Nat", "Bool", "Top", "refl", "J",
      "as", "suc", "zero", "fst", "snd", "natrec", "boolrec", "true", "false", "tt"};
  return words;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    bool pragma = false;
    while (true) {
      pragma = skip_space_and_comments() || pragma;
      if (i_ >= src_.size()) {
        out.push_back(Token{TokKind::End, "<end of input>", line_, col_, i_, i_, line_, col_, pragma});
        return out;
      }
      Token t = next();
      t.conjecture = pragma;
      pragma = false;
      bool is_import = t.kind == TokKind::Ident && t.text == "import";
      out.push_back(std::move(t));
      if (is_import) out.push_back(path());
    }
  }

 private:
  std::string_view src_;
  std::size_t i_ = 0;
  int line_ = 1, col_ = 1;

  char peek(std::size_t k = 0) const { return i_ + k < src_.size() ? src_[i_ + k] : '\0'; }

  void advance() {
    if (src_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  bool skip_space_and_comments() {
    bool pragma = false;
    while (i_ < src_.size()) {
      char c = peek();
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '-' && peek(1) == '-') {
        std::size_t start = i_ + 2;
        while (i_ < src_.size() && peek() != '\n') advance();
        std::string body(src_.substr(start, i_ - start));
        std::size_t a = body.find_first_not_of(" \t");
        if (a != std::string::npos && body.compare(a, 10, "conjecture") == 0) pragma = true;
      } else {
        break;
      }
    }
    return pragma;
  }

  [[noreturn]] void fail(const std::string& msg) {
    raise(ErrorCode::Syntax, msg, Span{line_, col_, line_, col_ + 1});
  }

  Token make(TokKind k, std::size_t begin, int line, int col) {
    return Token{k, std::string(src_.substr(begin, i_ - begin)), line, col, begin, i_, line_, col_};
  }

  Token next() {
    std::size_t begin = i_;
    int line = line_, col = col_;
    char c = peek();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '\'')
        advance();
      return make(TokKind::Ident, begin, line, col);
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      return make(TokKind::Number, begin, line, col);
    }
    if ((c == '-' && peek(1) == '>') || (c == ':' && peek(1) == '=')) {
      advance();
      advance();
      return make(TokKind::Symbol, begin, line, col);
    }
    if (std::string_view(":<|>^{}().,@*\\=").find(c) != std::string_view::npos) {
      advance();
      return make(TokKind::Symbol, begin, line, col);
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  Token path() {
    while (i_ < src_.size() && (peek() == ' ' || peek() == '\t')) advance();
    std::size_t begin = i_;
    int line = line_, col = col_;
    while (i_ < src_.size() && peek() != '\n') advance();
    Token t = make(TokKind::Path, begin, line, col);
    while (!t.text.empty() && std::isspace(static_cast<unsigned char>(t.text.back())))
      t.text.pop_back();
    if (t.text.empty()) fail("expected a module path after 'import'");
    return t;
  }
};

class Parser {
 public:
  Parser(std::string_view src, std::vector<Token> toks) : src_(src), toks_(std::move(toks)) {}

  std::vector<Decl> module() {
    std::vector<Decl> out;
    while (!at_end()) out.push_back(decl());
    return out;
  }

  TermPtr whole_expr() {
    TermPtr e = expr();
    if (!at_end()) fail_expected("end of input");
    return e;
  }

 private:
  std::string_view src_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;

  const Token& cur() const { return toks_[pos_]; }
  const Token& ahead(std::size_t k) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  bool at_end() const { return cur().kind == TokKind::End; }

  bool is_sym(const char* s, std::size_t k = 0) const {
    const Token& t = ahead(k);
    return t.kind == TokKind::Symbol && t.text == s;
  }
  bool is_kw(const char* s, std::size_t k = 0) const {
    const Token& t = ahead(k);
    return t.kind == TokKind::Ident && t.text == s;
  }

  [[noreturn]] void fail_expected(const std::string& what) {
    const Token& t = cur();
    raise(ErrorCode::Syntax, "expected " + what + ", found '" + t.text + "'",
          Span{t.line, t.col, t.end_line, t.end_col});
  }

  void expect_sym(const char* s) {
    if (!is_sym(s)) fail_expected(std::string("'") + s + "'");
    ++pos_;
  }
  void expect_kw(const char* s) {
    if (!is_kw(s)) fail_expected(std::string("'") + s + "'");
    ++pos_;
  }

  std::string ident() {
    const Token& t = cur();
    if (t.kind != TokKind::Ident || reserved().count(t.text)) fail_expected("an identifier");
    ++pos_;
    return t.text;
  }

  Span span_from(const Token& start) const {
    const Token& last = toks_[pos_ == 0 ? 0 : pos_ - 1];
    return Span{start.line, start.col, last.end_line, last.end_col};
  }

  TermPtr at(TermPtr t, const Token& start) {
    Term c = *t;
    c.span = span_from(start);
    return mk(std::move(c));
  }

  Decl decl() {
    const Token& start = cur();
    Decl d;
    d.conjecture = start.conjecture;
    if (is_kw("postulate")) {
      ++pos_;
      d.kind = Decl::Kind::Postulate;
      d.name = ident();
      expect_sym(":");
      d.type = expr();
    } else if (is_kw("def")) {
      ++pos_;
      d.kind = Decl::Kind::Def;
      d.name = ident();
      expect_sym(":");
      d.type = expr();
      expect_sym(":=");
      d.body = expr();
    } else if (is_kw("import")) {
      ++pos_;
      d.kind = Decl::Kind::Import;
      d.path = cur().text;
      ++pos_;
    } else {
      fail_expected("'postulate', 'def' or 'import'");
    }
    d.span = span_from(start);
    return d;
  }

  Modality braced_modality() {
    expect_sym("{");
    Modality m = modality_word();
    expect_sym("}");
    return m;
  }

  Modality modality_word() {
    Modality m;
    while (true) {
      const Token& t = cur();
      if (t.kind != TokKind::Ident) fail_expected("a modality");
      if (t.text != "id") {
        auto g = generator_from_name(t.text);
        if (!g) fail_expected("a modality (flat, sharp, op, tw, id)");
        m.word.push_back(*g);
      }
      ++pos_;
      if (!is_sym(".")) break;
      ++pos_;
    }
    return m;
  }

  TermPtr expr() {
    const Token& start = cur();
    if (is_sym("\\")) {
      ++pos_;
      std::vector<std::string> xs{binder_name()};
      while (!is_sym(".")) xs.push_back(binder_name());
      expect_sym(".");
      TermPtr body = expr();
      for (std::size_t i = xs.size(); i-- > 0;) body = at(mk_lam(xs[i], body), start);
      return body;
    }
    if (is_kw("let")) {
      ++pos_;
      if (is_kw("mod")) return letmod(start);
      std::string x = binder_name();
      TermPtr type;
      if (is_sym(":")) {
        ++pos_;
        type = expr();
      }
      expect_sym(":=");
      TermPtr def = expr();
      expect_kw("in");
      TermPtr body = expr();
      return at(mk_let(x, type, def, body), start);
    }
    return arrow();
  }

  std::string binder_name() {
    if (cur().kind == TokKind::Ident && cur().text == "_") {
      ++pos_;
      return "_";
    }
    return ident();
  }

  TermPtr letmod(const Token& start) {
    expect_kw("mod");
    Modality mu = braced_modality();
    std::string y = binder_name();
    expect_sym("=");
    TermPtr scrut = expr();
    Modality nu;
    if (is_sym("@")) {
      ++pos_;
      nu = braced_modality();
    }
    TermPtr motive;
    std::string z = "_";
    if (is_kw("as")) {
      ++pos_;
      expect_sym("(");
      z = binder_name();
      expect_sym(".");
      motive = expr();
      expect_sym(")");
    }
    expect_kw("in");
    TermPtr body = expr();
    return at(mk_letmod(mu, nu, z, y, motive, scrut, body), start);
  }

  struct Group {
    std::vector<std::string> names;
    Modality mu;
    TermPtr type;
    Token start;
  };

  // Parses `(x y :{mu} A)(z : B)...` if it is followed by `follow`; otherwise
  // rewinds and returns nullopt.
  std::optional<std::vector<Group>> telescope(const char* follow) {
    if (!is_sym("(")) return std::nullopt;
    std::size_t save = pos_;
    std::vector<Group> groups;
    try {
      while (is_sym("(")) {
        Group g{{}, {}, nullptr, cur()};
        std::size_t k = 1;
        while (ahead(k).kind == TokKind::Ident && !reserved().count(ahead(k).text)) ++k;
        if (k == 1 || !is_sym(":", k)) break;
        ++pos_;
        while (!is_sym(":")) g.names.push_back(binder_name());
        ++pos_;
        if (is_sym("{")) g.mu = braced_modality();
        g.type = expr();
        expect_sym(")");
        groups.push_back(std::move(g));
      }
    } catch (const SttError&) {
      pos_ = save;
      return std::nullopt;
    }
    if (groups.empty() || !is_sym(follow)) {
      pos_ = save;
      return std::nullopt;
    }
    return groups;
  }

  TermPtr arrow() {
    const Token& start = cur();
    if (auto groups = telescope("->")) {
      ++pos_;
      TermPtr body = arrow();
      for (std::size_t gi = groups->size(); gi-- > 0;) {
        const Group& g = (*groups)[gi];
        for (std::size_t i = g.names.size(); i-- > 0;)
          body = at(mk_pi(g.names[i], g.mu, g.type, body), g.start);
      }
      return at(body, start);
    }
    TermPtr lhs = prod();
    if (is_sym("->")) {
      ++pos_;
      TermPtr rhs = arrow();
      return at(mk_pi("_", {}, lhs, rhs), start);
    }
    return lhs;
  }

  TermPtr prod() {
    const Token& start = cur();
    if (auto groups = telescope("*")) {
      for (const auto& g : *groups)
        if (!g.mu.is_id()) {
          raise(ErrorCode::Syntax, "a dependent pair binder cannot carry a modality",
                Span{g.start.line, g.start.col, g.start.end_line, g.start.end_col});
        }
      ++pos_;
      TermPtr body = prod();
      for (std::size_t gi = groups->size(); gi-- > 0;) {
        const Group& g = (*groups)[gi];
        for (std::size_t i = g.names.size(); i-- > 0;)
          body = at(mk_sigma(g.names[i], g.type, body), g.start);
      }
      return at(body, start);
    }
    TermPtr lhs = eq();
    if (is_sym("*")) {
      ++pos_;
      TermPtr rhs = prod();
      return at(mk_sigma("_", lhs, rhs), start);
    }
    return lhs;
  }

  TermPtr eq() {
    const Token& start = cur();
    TermPtr lhs = app();
    if (!is_sym("=")) return lhs;
    ++pos_;
    TermPtr rhs = app();
    if (lhs->tag == Tag::Ann && lhs->paren_ann)
      return at(mk_id(lhs->kids[1], lhs->kids[0], rhs), start);
    return at(mk_id(nullptr, lhs, rhs), start);
  }

  bool atom_start(std::size_t k = 0) const {
    const Token& t = ahead(k);
    if (t.kind == TokKind::Number) return true;
    if (t.kind == TokKind::Symbol) return t.text == "(" || t.text == "<";
    if (t.kind != TokKind::Ident) return false;
    static const std::set<std::string> atoms = {"U", "Nat", "Bool", "Top", "refl", "zero",
                                                "true", "false", "tt"};
    return !reserved().count(t.text) || atoms.count(t.text);
  }

  // Unwraps `\x1 ... xn. b` into binder names and body.
  std::pair<std::vector<std::string>, TermPtr> unlam(TermPtr t, std::size_t n, const char* what) {
    std::vector<std::string> xs;
    while (xs.size() < n) {
      if (t->tag == Tag::Ann && t->paren_ann) t = t->kids[0];
      if (t->tag != Tag::Lam)
        raise(ErrorCode::Syntax, std::string(what) + " must be a lambda binding " +
                                     std::to_string(n) + " variable(s)",
              t->span);
      xs.push_back(t->binders[0]);
      t = t->kids[0];
    }
    return {xs, t};
  }

  TermPtr app() {
    const Token& start = cur();
    TermPtr head;
    if (is_kw("mod")) {
      ++pos_;
      Modality mu = braced_modality();
      head = at(mk_mod_intro(mu, atom()), start);
    } else if (is_kw("suc")) {
      ++pos_;
      head = at(mk_suc(atom()), start);
    } else if (is_kw("fst")) {
      ++pos_;
      head = at(mk_fst(atom()), start);
    } else if (is_kw("snd")) {
      ++pos_;
      head = at(mk_snd(atom()), start);
    } else if (is_kw("J")) {
      ++pos_;
      auto [ys, motive] = unlam(atom(), 2, "the motive of J");
      TermPtr d = atom();
      TermPtr p = atom();
      head = at(mk_j(ys[0], ys[1], motive, d, p), start);
    } else if (is_kw("natrec")) {
      ++pos_;
      auto [ns, motive] = unlam(atom(), 1, "the motive of natrec");
      TermPtr z = atom();
      auto [ss, s] = unlam(atom(), 2, "the step of natrec");
      TermPtr n = atom();
      head = at(mk_natrec(ns[0], ss[0], ss[1], motive, z, s, n), start);
    } else if (is_kw("boolrec")) {
      ++pos_;
      auto [bs, motive] = unlam(atom(), 1, "the motive of boolrec");
      TermPtr t = atom();
      TermPtr f = atom();
      TermPtr b = atom();
      head = at(mk_boolrec(bs[0], motive, t, f, b), start);
    } else {
      head = atom();
    }
    while (true) {
      if (is_sym("@") && is_sym("{", 1)) {
        // `f @{mu} a`; the framing annotation of let-mod has no argument after it
        std::size_t k = 2;
        while (!is_sym("}", k) && ahead(k).kind != TokKind::End) ++k;
        if (!atom_start(k + 1)) break;
        ++pos_;
        Modality mu = braced_modality();
        head = at(mk_app(head, atom(), mu), start);
      } else if (atom_start()) {
        Term t = *mk_app(head, atom(), {});
        t.mu_known = false;
        head = at(mk(std::move(t)), start);
      } else {
        break;
      }
    }
    return head;
  }

  TermPtr atom() {
    const Token& start = cur();
    if (cur().kind == TokKind::Number) {
      long n = std::stol(cur().text);
      ++pos_;
      TermPtr t = at(mk_atom(Tag::Zero), start);
      for (long i = 0; i < n; ++i) t = at(mk_suc(t), start);
      return t;
    }
    if (cur().kind == TokKind::Ident) {
      const std::string& w = cur().text;
      static const std::pair<const char*, Tag> simple[] = {
          {"Nat", Tag::Nat},   {"Bool", Tag::Bool},   {"Top", Tag::Top},
          {"refl", Tag::Refl}, {"zero", Tag::Zero},   {"true", Tag::True},
          {"false", Tag::False}, {"tt", Tag::TT}};
      for (const auto& [name, tag] : simple)
        if (w == name) {
          ++pos_;
          return at(mk_atom(tag), start);
        }
      if (w == "U") {
        ++pos_;
        if (cur().kind != TokKind::Number) fail_expected("a universe level");
        int level = std::stoi(cur().text);
        ++pos_;
        return at(mk_u(level), start);
      }
      std::string x = ident();
      Term t;
      t.tag = Tag::Name;
      t.name = x;
      if (is_sym("^")) {
        ++pos_;
        if (!is_sym("{")) fail_expected("'{'");
        std::size_t open = pos_;
        int depth = 0;
        std::size_t k = pos_;
        for (;; ++k) {
          if (toks_[k].kind == TokKind::End) {
            pos_ = k;
            fail_expected("'}'");
          }
          if (toks_[k].kind == TokKind::Symbol && toks_[k].text == "{") ++depth;
          if (toks_[k].kind == TokKind::Symbol && toks_[k].text == "}" && --depth == 0) break;
        }
        std::string_view text =
            src_.substr(toks_[open].end, toks_[k].begin - toks_[open].end);
        pos_ = k + 1;
        try {
          t.cell_expr = parse_cell(text);
        } catch (const ModeError& e) {
          raise(ErrorCode::Syntax, e.what(), span_from(start));
        }
      }
      t.span = span_from(start);
      return mk(std::move(t));
    }
    if (is_sym("<")) {
      ++pos_;
      Modality mu = modality_word();
      expect_sym("|");
      TermPtr a = expr();
      expect_sym(">");
      return at(mk_mod(mu, a), start);
    }
    if (is_sym("(")) {
      ++pos_;
      TermPtr e = expr();
      if (is_sym(",")) {
        ++pos_;
        TermPtr b = expr();
        expect_sym(")");
        return at(mk_pair(e, b), start);
      }
      if (is_sym(":")) {
        ++pos_;
        TermPtr type = expr();
        expect_sym(")");
        Term a = *mk_ann(e, type);
        a.paren_ann = true;
        a.span = span_from(start);
        return mk(std::move(a));
      }
      expect_sym(")");
      if (e->paren_ann) {
        Term c = *e;
        c.paren_ann = false;
        return mk(std::move(c));
      }
      return e;
    }
    fail_expected("an expression");
  }
};

}  // namespace

std::vector<Decl> parse_module(std::string_view text) {
  Parser p(text, Lexer(text).run());
  return p.module();
}

TermPtr parse_expr(std::string_view text) {
  Parser p(text, Lexer(text).run());
  return p.whole_expr();
}

}  // namespace stt
