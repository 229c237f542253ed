#include <set>

#include "stt/syntax.hpp"

namespace stt {

// ---------------------------------------------------------------------------
// Resolution

TermPtr resolve_term(const TermPtr& t, std::vector<std::string>& locals,
                     const std::function<bool(const std::string&)>& is_global) {
  if (!t) return t;
  if (t->tag == Tag::Name) {
    if (t->name != "_") {
      for (std::size_t i = locals.size(); i-- > 0;) {
        if (locals[i] != t->name) continue;
        Term v = *mk_var(static_cast<int>(locals.size() - 1 - i));
        v.cell_expr = t->cell_expr;
        v.span = t->span;
        return mk(std::move(v));
      }
      if (is_global(t->name)) {
        if (t->cell_expr)
          raise(ErrorCode::Syntax, "'" + t->name + "' is a global and takes no cell annotation",
                t->span);
        Term g = *mk_global(t->name);
        g.span = t->span;
        return mk(std::move(g));
      }
    }
    raise(ErrorCode::Unbound, "unbound name '" + t->name + "'", t->span);
  }
  std::vector<TermPtr> kids;
  kids.reserve(t->kids.size());
  for (std::size_t k = 0; k < t->kids.size(); ++k) {
    ChildInfo ci = child_info(*t, k);
    for (int b = 0; b < ci.binds; ++b) locals.push_back(t->binders[ci.binder_offset + b]);
    kids.push_back(resolve_term(t->kids[k], locals, is_global));
    locals.resize(locals.size() - ci.binds);
  }
  return with_kids(t, std::move(kids));
}

void resolve_decl(Decl& d, const std::function<bool(const std::string&)>& is_global) {
  std::vector<std::string> locals;
  if (d.type) d.type = resolve_term(d.type, locals, is_global);
  if (d.body) d.body = resolve_term(d.body, locals, is_global);
}

std::vector<Decl> resolve(std::vector<Decl> decls,
                          const std::function<bool(const std::string&)>& is_global) {
  std::set<std::string> seen;
  for (auto& d : decls) {
    if (d.kind == Decl::Kind::Import) continue;
    auto known = [&](const std::string& n) { return seen.count(n) > 0 || is_global(n); };
    resolve_decl(d, known);
    if (!seen.insert(d.name).second || is_global(d.name))
      raise(ErrorCode::Unbound, "duplicate definition of '" + d.name + "'", d.span);
  }
  return decls;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

bool occurs(const TermPtr& t, int idx) {
  if (!t) return false;
  if (t->tag == Tag::Var) return t->index == idx;
  for (std::size_t k = 0; k < t->kids.size(); ++k)
    if (occurs(t->kids[k], idx + child_info(*t, k).binds)) return true;
  return false;
}

void collect_globals(const TermPtr& t, std::set<std::string>& out) {
  if (!t) return;
  if (t->tag == Tag::Global || t->tag == Tag::Name) out.insert(t->name);
  for (const auto& k : t->kids) collect_globals(k, out);
}

std::optional<long> numeral(const TermPtr& t) {
  long n = 0;
  const Term* p = t.get();
  while (p->tag == Tag::Suc) {
    ++n;
    p = p->kids[0].get();
  }
  if (p->tag == Tag::Zero) return n;
  return std::nullopt;
}

class Printer {
 public:
  Printer(std::vector<std::string> locals, std::set<std::string> globals)
      : locals_(std::move(locals)), globals_(std::move(globals)) {}

  std::string print(const TermPtr& t, int prec) {
    if (!t) return "?";
    switch (t->tag) {
      case Tag::Name: {
        std::string s = t->name;
        if (t->cell_expr) s += " ^ {" + to_expr_string(**t->cell_expr) + "}";
        return s;
      }
      case Tag::Var: {
        std::string s = t->index >= 0 && std::size_t(t->index) < locals_.size()
                            ? locals_[locals_.size() - 1 - t->index]
                            : "#" + std::to_string(t->index);
        if (t->cell) {
          if (!t->cell->is_identity()) s += " ^ {" + to_expr_string(*t->cell) + "}";
        } else if (t->cell_expr) {
          s += " ^ {" + to_expr_string(**t->cell_expr) + "}";
        }
        return s;
      }
      case Tag::Global: return t->name;
      case Tag::U: return "U " + std::to_string(t->index);
      case Tag::Nat: return "Nat";
      case Tag::Bool: return "Bool";
      case Tag::Top: return "Top";
      case Tag::TT: return "tt";
      case Tag::True: return "true";
      case Tag::False: return "false";
      case Tag::Refl: return "refl";
      case Tag::Zero: return "zero";
      case Tag::Suc: {
        if (auto n = numeral(t)) return std::to_string(*n);
        return paren(prec > 3, "suc " + print(t->kids[0], 4));
      }
      case Tag::Pi: {
        if (t->mu.is_id() && !occurs(t->kids[1], 0)) {
          std::string dom = lhs(t->kids[0], 1);
          std::string cod = under({"_"}, t->kids[1], 0);
          return paren(prec > 0, dom + " -> " + cod);
        }
        std::string dom = print(t->kids[0], 0);
        std::string x = fresh(t->binders[0], t->kids[1], 0);
        std::string cod = under({x}, t->kids[1], 0);
        return paren(prec > 0, "(" + x + " :" + braced(t->mu) + " " + dom + ") -> " + cod);
      }
      case Tag::Lam: {
        std::vector<std::string> xs;
        TermPtr body = t;
        std::size_t pushed = 0;
        while (body->tag == Tag::Lam) {
          std::string x = fresh(body->binders[0], body->kids[0], 0);
          xs.push_back(x);
          locals_.push_back(x);
          ++pushed;
          body = body->kids[0];
        }
        std::string b = print(body, 0);
        locals_.resize(locals_.size() - pushed);
        std::string head = "\\";
        for (std::size_t i = 0; i < xs.size(); ++i) head += (i ? " " : "") + xs[i];
        return paren(prec > 0, head + ". " + b);
      }
      case Tag::App: {
        std::string s = print(t->kids[0], 3);
        if (t->mu_known && !t->mu.is_id()) s += " @{" + to_string(t->mu) + "}";
        return paren(prec > 3, s + " " + print(t->kids[1], 4));
      }
      case Tag::Sigma: {
        if (!occurs(t->kids[1], 0)) {
          std::string a = lhs(t->kids[0], 2);
          return paren(prec > 1, a + " * " + under({"_"}, t->kids[1], 1));
        }
        std::string a = print(t->kids[0], 0);
        std::string x = fresh(t->binders[0], t->kids[1], 0);
        return paren(prec > 1, "(" + x + " : " + a + ") * " + under({x}, t->kids[1], 1));
      }
      case Tag::Pair:
        return "(" + print(t->kids[0], 0) + ", " + print(t->kids[1], 0) + ")";
      case Tag::Fst: return paren(prec > 3, "fst " + print(t->kids[0], 4));
      case Tag::Snd: return paren(prec > 3, "snd " + print(t->kids[0], 4));
      case Tag::Id: {
        std::string rhs = print(t->kids[2], 3);
        if (t->kids[0])
          return paren(prec > 2, "(" + print(t->kids[1], 0) + " : " + print(t->kids[0], 0) +
                                     ") = " + rhs);
        return paren(prec > 2, lhs(t->kids[1], 3) + " = " + rhs);
      }
      case Tag::J: {
        std::string y = fresh(t->binders[0], t->kids[0], 1);
        std::string q = fresh(t->binders[1], t->kids[0], 0, {y});
        std::string motive = "(\\" + y + " " + q + ". " + under({y, q}, t->kids[0], 0) + ")";
        return paren(prec > 3,
                     "J " + motive + " " + print(t->kids[1], 4) + " " + print(t->kids[2], 4));
      }
      case Tag::Mod:
        return "<" + to_string(t->mu) + "| " + print(t->kids[0], 0) + ">";
      case Tag::ModIntro:
        return paren(prec > 3, "mod{" + to_string(t->mu) + "} " + print(t->kids[0], 4));
      case Tag::LetMod: {
        std::string scrut = print(t->kids[1], 1);
        std::string y = fresh(t->binders[1], t->kids[2], 0);
        std::string s = "let mod{" + to_string(t->mu) + "} " + y + " = " + scrut;
        if (!t->nu.is_id()) s += " @{" + to_string(t->nu) + "}";
        if (t->kids[0]) {
          std::string z = fresh(t->binders[0], t->kids[0], 0);
          s += " as (" + z + ". " + under({z}, t->kids[0], 0) + ")";
        }
        s += " in " + under({y}, t->kids[2], 0);
        return paren(prec > 0, s);
      }
      case Tag::NatRec: {
        std::string n = fresh(t->binders[0], t->kids[0], 0);
        std::string motive = "(\\" + n + ". " + under({n}, t->kids[0], 0) + ")";
        std::string m = fresh(t->binders[1], t->kids[2], 1);
        std::string ih = fresh(t->binders[2], t->kids[2], 0, {m});
        std::string step = "(\\" + m + " " + ih + ". " + under({m, ih}, t->kids[2], 0) + ")";
        return paren(prec > 3, "natrec " + motive + " " + print(t->kids[1], 4) + " " + step +
                                   " " + print(t->kids[3], 4));
      }
      case Tag::BoolRec: {
        std::string b = fresh(t->binders[0], t->kids[0], 0);
        std::string motive = "(\\" + b + ". " + under({b}, t->kids[0], 0) + ")";
        return paren(prec > 3, "boolrec " + motive + " " + print(t->kids[1], 4) + " " +
                                   print(t->kids[2], 4) + " " + print(t->kids[3], 4));
      }
      case Tag::Ann:
        return "(" + print(t->kids[0], 0) + " : " + print(t->kids[1], 0) + ")";
      case Tag::Let: {
        std::string x = fresh(t->binders[0], t->kids[2], 0);
        std::string s = "let " + x;
        if (t->kids[0]) s += " : " + print(t->kids[0], 0);
        s += " := " + print(t->kids[1], 0) + " in " + under({x}, t->kids[2], 0);
        return paren(prec > 0, s);
      }
    }
    return "?";
  }

 private:
  std::vector<std::string> locals_;
  std::set<std::string> globals_;

  static std::string paren(bool p, const std::string& s) { return p ? "(" + s + ")" : s; }

  static std::string braced(const Modality& m) {
    return m.is_id() ? "" : "{" + to_string(m) + "}";
  }

  // An annotation on the left of `->`, `*` or `=` would read as a binder or a
  // typed equation, so it gets an extra pair of parentheses.
  std::string lhs(const TermPtr& t, int prec) {
    std::string s = print(t, prec);
    return t->tag == Tag::Ann ? "(" + s + ")" : s;
  }

  std::string under(const std::vector<std::string>& xs, const TermPtr& t, int prec) {
    for (const auto& x : xs) locals_.push_back(x);
    std::string s = print(t, prec);
    locals_.resize(locals_.size() - xs.size());
    return s;
  }

  bool taken(const std::string& x, const std::vector<std::string>& extra) const {
    for (const auto& l : locals_)
      if (l == x) return true;
    for (const auto& l : extra)
      if (l == x) return true;
    return globals_.count(x) > 0;
  }

  // A name for a binder whose variable is `idx` inside `body`.
  std::string fresh(const std::string& hint, const TermPtr& body, int idx,
                    const std::vector<std::string>& extra = {}) {
    bool used = occurs(body, idx);
    std::string base = hint.empty() || hint == "_" ? (used ? "x" : "_") : hint;
    if (base == "_") return base;
    if (!taken(base, extra)) return base;
    for (int n = 1;; ++n) {
      std::string c = base + std::to_string(n);
      if (!taken(c, extra)) return c;
    }
  }
};

}  // namespace

std::string print_term(const TermPtr& t, std::vector<std::string> locals) {
  std::set<std::string> globals;
  collect_globals(t, globals);
  Printer p(std::move(locals), std::move(globals));
  return p.print(t, 0);
}

std::string print_decl(const Decl& d) {
  std::string s = d.conjecture ? "-- conjecture\n" : "";
  switch (d.kind) {
    case Decl::Kind::Import:
      return s + "import " + d.path;
    case Decl::Kind::Postulate:
      return s + "postulate " + d.name + " : " + print_term(d.type);
    case Decl::Kind::Def:
      return s + "def " + d.name + " : " + print_term(d.type) + " :=\n  " + print_term(d.body);
  }
  return s;
}

}  // namespace stt
