#include <sstream>

#include "json.hpp"
#include "stt/syntax.hpp"

namespace stt {

std::string_view error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::NoCell: return "NO_CELL";
    case ErrorCode::AmbiguousCell: return "AMBIGUOUS_CELL";
    case ErrorCode::BadBoundary: return "BAD_BOUNDARY";
    case ErrorCode::Mismatch: return "MISMATCH";
    case ErrorCode::Unbound: return "UNBOUND";
    case ErrorCode::Level: return "LEVEL";
    case ErrorCode::Cycle: return "CYCLE";
    case ErrorCode::Syntax: return "SYNTAX";
    case ErrorCode::Internal: return "INTERNAL";
  }
  return "INTERNAL";
}

std::optional<ErrorCode> error_code_from_name(std::string_view s) {
  for (ErrorCode c : {ErrorCode::NoCell, ErrorCode::AmbiguousCell, ErrorCode::BadBoundary,
                      ErrorCode::Mismatch, ErrorCode::Unbound, ErrorCode::Level, ErrorCode::Cycle,
                      ErrorCode::Syntax, ErrorCode::Internal})
    if (error_code_name(c) == s) return c;
  return std::nullopt;
}

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::Syntax:
    case ErrorCode::Unbound:
    case ErrorCode::Cycle:
      return 2;
    case ErrorCode::Internal:
      return 3;
    default:
      return 1;
  }
}

std::string Diagnostic::to_text() const {
  std::ostringstream os;
  os << (file.empty() ? "<input>" : file) << ":" << span.line << ":" << span.col << ": "
     << severity << " [" << error_code_name(code) << "] " << message;
  if (!expected.empty()) os << "\n  expected: " << expected;
  if (!actual.empty()) os << "\n  actual:   " << actual;
  return os.str();
}

std::string Diagnostic::to_json() const {
  nlohmann::json j;
  j["file"] = file;
  j["line"] = span.line;
  j["col"] = span.col;
  j["endLine"] = span.end_line;
  j["endCol"] = span.end_col;
  j["code"] = std::string(error_code_name(code));
  j["message"] = message;
  if (!expected.empty()) j["expected"] = expected;
  if (!actual.empty()) j["actual"] = actual;
  return j.dump();
}

void raise(ErrorCode code, const std::string& message, Span span, std::string expected,
           std::string actual) {
  Diagnostic d;
  d.code = code;
  d.message = message;
  d.span = span;
  d.expected = std::move(expected);
  d.actual = std::move(actual);
  throw SttError(std::move(d));
}

std::string_view tag_name(Tag t) {
  switch (t) {
    case Tag::Name: return "Name";
    case Tag::Var: return "Var";
    case Tag::Global: return "Global";
    case Tag::U: return "U";
    case Tag::Pi: return "Pi";
    case Tag::Lam: return "Lam";
    case Tag::App: return "App";
    case Tag::Sigma: return "Sigma";
    case Tag::Pair: return "Pair";
    case Tag::Fst: return "Fst";
    case Tag::Snd: return "Snd";
    case Tag::Id: return "Id";
    case Tag::Refl: return "Refl";
    case Tag::J: return "J";
    case Tag::Mod: return "Mod";
    case Tag::ModIntro: return "ModIntro";
    case Tag::LetMod: return "LetMod";
    case Tag::Nat: return "Nat";
    case Tag::Zero: return "Zero";
    case Tag::Suc: return "Suc";
    case Tag::NatRec: return "NatRec";
    case Tag::Bool: return "Bool";
    case Tag::True: return "True";
    case Tag::False: return "False";
    case Tag::BoolRec: return "BoolRec";
    case Tag::Top: return "Top";
    case Tag::TT: return "TT";
    case Tag::Ann: return "Ann";
    case Tag::Let: return "Let";
  }
  return "?";
}

ChildInfo child_info(const Term& t, std::size_t k) {
  switch (t.tag) {
    case Tag::Pi:
      return k == 0 ? ChildInfo{t.mu, 0, 0} : ChildInfo{{}, 1, 0};
    case Tag::Lam:
      return {{}, 1, 0};
    case Tag::App:
      return k == 1 ? ChildInfo{t.mu, 0, 0} : ChildInfo{};
    case Tag::Sigma:
      return k == 1 ? ChildInfo{{}, 1, 0} : ChildInfo{};
    case Tag::J:
      return k == 0 ? ChildInfo{{}, 2, 0} : ChildInfo{};
    case Tag::Mod:
    case Tag::ModIntro:
      return {t.mu, 0, 0};
    case Tag::LetMod:
      if (k == 0) return {{}, 1, 0};
      if (k == 1) return {t.nu, 0, 0};
      return {{}, 1, 1};
    case Tag::NatRec:
      if (k == 0) return {{}, 1, 0};
      if (k == 2) return {{}, 2, 1};
      return {};
    case Tag::BoolRec:
      return k == 0 ? ChildInfo{{}, 1, 0} : ChildInfo{};
    case Tag::Let:
      return k == 2 ? ChildInfo{{}, 1, 0} : ChildInfo{};
    default:
      return {};
  }
}

TermPtr mk(Term t) { return std::make_shared<const Term>(std::move(t)); }

namespace {
Term node(Tag tag, std::vector<TermPtr> kids = {}, std::vector<std::string> binders = {}) {
  Term t;
  t.tag = tag;
  t.kids = std::move(kids);
  t.binders = std::move(binders);
  return t;
}
}  // namespace

TermPtr mk_var(int index, std::optional<NormalCell> cell) {
  Term t = node(Tag::Var);
  t.index = index;
  t.cell = std::move(cell);
  return mk(std::move(t));
}

TermPtr mk_global(std::string name) {
  Term t = node(Tag::Global);
  t.name = std::move(name);
  return mk(std::move(t));
}

TermPtr mk_u(int level) {
  Term t = node(Tag::U);
  t.index = level;
  return mk(std::move(t));
}

TermPtr mk_atom(Tag tag) { return mk(node(tag)); }

TermPtr mk_pi(std::string x, Modality mu, TermPtr dom, TermPtr cod) {
  Term t = node(Tag::Pi, {std::move(dom), std::move(cod)}, {std::move(x)});
  t.mu = normalize_modality(mu);
  return mk(std::move(t));
}

TermPtr mk_lam(std::string x, TermPtr body) {
  return mk(node(Tag::Lam, {std::move(body)}, {std::move(x)}));
}

TermPtr mk_app(TermPtr fn, TermPtr arg, Modality mu) {
  Term t = node(Tag::App, {std::move(fn), std::move(arg)});
  t.mu = normalize_modality(mu);
  return mk(std::move(t));
}

TermPtr mk_sigma(std::string x, TermPtr a, TermPtr b) {
  return mk(node(Tag::Sigma, {std::move(a), std::move(b)}, {std::move(x)}));
}

TermPtr mk_pair(TermPtr a, TermPtr b) { return mk(node(Tag::Pair, {std::move(a), std::move(b)})); }
TermPtr mk_fst(TermPtr p) { return mk(node(Tag::Fst, {std::move(p)})); }
TermPtr mk_snd(TermPtr p) { return mk(node(Tag::Snd, {std::move(p)})); }

TermPtr mk_id(TermPtr type, TermPtr a, TermPtr b) {
  return mk(node(Tag::Id, {std::move(type), std::move(a), std::move(b)}));
}

TermPtr mk_j(std::string y, std::string q, TermPtr motive, TermPtr d, TermPtr p) {
  return mk(node(Tag::J, {std::move(motive), std::move(d), std::move(p)}, {std::move(y), std::move(q)}));
}

TermPtr mk_mod(Modality mu, TermPtr a) {
  Term t = node(Tag::Mod, {std::move(a)});
  t.mu = normalize_modality(mu);
  return mk(std::move(t));
}

TermPtr mk_mod_intro(Modality mu, TermPtr a) {
  Term t = node(Tag::ModIntro, {std::move(a)});
  t.mu = normalize_modality(mu);
  return mk(std::move(t));
}

TermPtr mk_letmod(Modality mu, Modality nu, std::string z, std::string y, TermPtr motive,
                  TermPtr scrut, TermPtr body) {
  Term t = node(Tag::LetMod, {std::move(motive), std::move(scrut), std::move(body)},
                {std::move(z), std::move(y)});
  t.mu = normalize_modality(mu);
  t.nu = normalize_modality(nu);
  return mk(std::move(t));
}

TermPtr mk_suc(TermPtr n) { return mk(node(Tag::Suc, {std::move(n)})); }

TermPtr mk_natrec(std::string n, std::string m, std::string ih, TermPtr motive, TermPtr z,
                  TermPtr s, TermPtr target) {
  return mk(node(Tag::NatRec, {std::move(motive), std::move(z), std::move(s), std::move(target)},
                 {std::move(n), std::move(m), std::move(ih)}));
}

TermPtr mk_boolrec(std::string b, TermPtr motive, TermPtr t, TermPtr f, TermPtr target) {
  return mk(node(Tag::BoolRec, {std::move(motive), std::move(t), std::move(f), std::move(target)},
                 {std::move(b)}));
}

TermPtr mk_ann(TermPtr e, TermPtr type) { return mk(node(Tag::Ann, {std::move(e), std::move(type)})); }

TermPtr mk_let(std::string x, TermPtr type, TermPtr def, TermPtr body) {
  return mk(node(Tag::Let, {std::move(type), std::move(def), std::move(body)}, {std::move(x)}));
}

TermPtr with_kid(const TermPtr& t, std::size_t k, TermPtr kid) {
  if (t->kids[k] == kid) return t;
  Term c = *t;
  c.kids[k] = std::move(kid);
  return mk(std::move(c));
}

TermPtr with_kids(const TermPtr& t, std::vector<TermPtr> kids) {
  bool same = kids.size() == t->kids.size();
  for (std::size_t i = 0; same && i < kids.size(); ++i) same = kids[i] == t->kids[i];
  if (same) return t;
  Term c = *t;
  c.kids = std::move(kids);
  return mk(std::move(c));
}

bool alpha_eq(const TermPtr& a, const TermPtr& b, bool holes) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->tag != b->tag) return false;
  switch (a->tag) {
    case Tag::Var: {
      if (a->index != b->index) return false;
      if (a->cell && b->cell) return a->cell->atoms == b->cell->atoms;
      if (!holes) return !a->cell && !b->cell;
      const auto& c = a->cell ? a->cell : b->cell;
      return !c || c->is_identity();
    }
    case Tag::Name:
    case Tag::Global:
      if (a->name != b->name) return false;
      break;
    case Tag::U:
      if (a->index != b->index) return false;
      break;
    case Tag::App:
      if (a->mu_known && b->mu_known) {
        if (a->mu != b->mu) return false;
      } else if (!holes) {
        if (a->mu_known != b->mu_known) return false;
      } else {
        const Term& k = a->mu_known ? *a : *b;
        if (k.mu_known && !k.mu.is_id()) return false;
      }
      break;
    case Tag::Pi:
    case Tag::Mod:
    case Tag::ModIntro:
      if (a->mu != b->mu) return false;
      break;
    case Tag::LetMod:
      if (a->mu != b->mu || a->nu != b->nu) return false;
      break;
    default:
      break;
  }
  if (a->kids.size() != b->kids.size()) return false;
  for (std::size_t i = 0; i < a->kids.size(); ++i)
    if (!alpha_eq(a->kids[i], b->kids[i], holes)) return false;
  return true;
}

std::size_t term_size(const TermPtr& t) {
  if (!t) return 0;
  std::size_t n = 1;
  for (const auto& k : t->kids) n += term_size(k);
  return n;
}

}  // namespace stt
