#pragma once

// Terms, declarations, diagnostics, the surface parser, name resolution and
// the printer. Surface and core share one Term type: the parser emits Name
// nodes, resolution replaces them with de Bruijn Var or Global nodes.

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stt/mode_theory.hpp"

namespace stt {

struct Span {
  int line = 0, col = 0, end_line = 0, end_col = 0;
};

enum class ErrorCode { NoCell, AmbiguousCell, BadBoundary, Mismatch, Unbound, Level, Cycle, Syntax, Internal };

std::string_view error_code_name(ErrorCode c);
std::optional<ErrorCode> error_code_from_name(std::string_view s);

/// Exit status associated with an error code.
int exit_code_for(ErrorCode c);

struct Diagnostic {
  std::string severity = "error";
  std::string file;
  Span span;
  ErrorCode code = ErrorCode::Internal;
  std::string message;
  std::string expected;
  std::string actual;

  std::string to_text() const;
  std::string to_json() const;
};

class SttError : public std::runtime_error {
 public:
  explicit SttError(Diagnostic d) : std::runtime_error(d.message), diag(std::move(d)) {}
  Diagnostic diag;
};

[[noreturn]] void raise(ErrorCode code, const std::string& message, Span span = {},
                        std::string expected = {}, std::string actual = {});

// ---------------------------------------------------------------------------
// Terms

enum class Tag {
  Name, Var, Global, U,
  Pi, Lam, App,
  Sigma, Pair, Fst, Snd,
  Id, Refl, J,
  Mod, ModIntro, LetMod,
  Nat, Zero, Suc, NatRec,
  Bool, True, False, BoolRec,
  Top, TT,
  Ann, Let,
};

std::string_view tag_name(Tag t);

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  Tag tag;
  int index = 0;                        // Var: de Bruijn index; U: level
  std::string name;                     // Name, Global
  Modality mu;                          // Pi, App, Mod, ModIntro, LetMod
  Modality nu;                          // LetMod framing
  bool mu_known = true;                 // App: false until elaborated
  std::optional<NormalCell> cell;       // Var: nullopt is a hole
  std::optional<TwoCellPtr> cell_expr;  // Name/Var as written, before elaboration
  bool paren_ann = false;               // Ann written as `(e : T)`; parser only
  std::vector<std::string> binders;
  std::vector<TermPtr> kids;            // optional kids may be null
  Span span;
};

/// How child `k` of `t` sits relative to `t`'s scope.
struct ChildInfo {
  Modality lock;        // lock entered before the child (id if none)
  int binds = 0;        // number of variables bound for the child
  int binder_offset = 0;
};
ChildInfo child_info(const Term& t, std::size_t k);

// Smart constructors.
TermPtr mk(Term t);
TermPtr mk_var(int index, std::optional<NormalCell> cell = std::nullopt);
TermPtr mk_global(std::string name);
TermPtr mk_u(int level);
TermPtr mk_atom(Tag tag);  // Nat, Zero, Bool, True, False, Top, TT, Refl
TermPtr mk_pi(std::string x, Modality mu, TermPtr dom, TermPtr cod);
TermPtr mk_lam(std::string x, TermPtr body);
TermPtr mk_app(TermPtr fn, TermPtr arg, Modality mu);
TermPtr mk_sigma(std::string x, TermPtr a, TermPtr b);
TermPtr mk_pair(TermPtr a, TermPtr b);
TermPtr mk_fst(TermPtr p);
TermPtr mk_snd(TermPtr p);
TermPtr mk_id(TermPtr type, TermPtr a, TermPtr b);
TermPtr mk_j(std::string y, std::string q, TermPtr motive, TermPtr d, TermPtr p);
TermPtr mk_mod(Modality mu, TermPtr a);
TermPtr mk_mod_intro(Modality mu, TermPtr a);
TermPtr mk_letmod(Modality mu, Modality nu, std::string z, std::string y, TermPtr motive,
                  TermPtr scrut, TermPtr body);
TermPtr mk_suc(TermPtr n);
TermPtr mk_natrec(std::string n, std::string m, std::string ih, TermPtr motive, TermPtr z,
                  TermPtr s, TermPtr target);
TermPtr mk_boolrec(std::string b, TermPtr motive, TermPtr t, TermPtr f, TermPtr target);
TermPtr mk_ann(TermPtr e, TermPtr type);
TermPtr mk_let(std::string x, TermPtr type, TermPtr def, TermPtr body);

/// Copy of `t` with kid `k` replaced.
TermPtr with_kid(const TermPtr& t, std::size_t k, TermPtr kid);
/// Copy of `t` with all kids replaced.
TermPtr with_kids(const TermPtr& t, std::vector<TermPtr> kids);

/// Structural equality ignoring binder names and spans. With
/// `holes_match_identity`, a hole cell matches an identity cell and an
/// unknown application modality matches id.
bool alpha_eq(const TermPtr& a, const TermPtr& b, bool holes_match_identity = false);

/// Number of nodes.
std::size_t term_size(const TermPtr& t);

// ---------------------------------------------------------------------------
// Declarations and modules

struct Decl {
  enum class Kind { Postulate, Def, Import };
  Kind kind = Kind::Postulate;
  std::string name;
  TermPtr type;
  TermPtr body;
  std::string path;   // Import
  bool conjecture = false;
  Span span;
};

/// Parses a whole module. Throws SttError with code Syntax.
std::vector<Decl> parse_module(std::string_view text);
/// Parses a single expression (used by tests and the CLI).
TermPtr parse_expr(std::string_view text);

/// Resolves names in one term; `locals` lists binder names innermost last.
TermPtr resolve_term(const TermPtr& t, std::vector<std::string>& locals,
                     const std::function<bool(const std::string&)>& is_global);
/// Resolves a declaration in place.
void resolve_decl(Decl& d, const std::function<bool(const std::string&)>& is_global);
/// Resolves a module: earlier declarations are in scope for later ones.
std::vector<Decl> resolve(std::vector<Decl> decls,
                          const std::function<bool(const std::string&)>& is_global);

/// Prints a resolved term. `locals` are the names of enclosing binders,
/// innermost last; they are extended with fresh names as binders are passed.
std::string print_term(const TermPtr& t, std::vector<std::string> locals = {});
std::string print_decl(const Decl& d);

}  // namespace stt
