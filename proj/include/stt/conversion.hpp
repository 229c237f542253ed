#pragma once

// Definitional equality. Terms are evaluated to weak head normal form by
// substitution; keys (the action of a 2-cell on a locked context) are
// realized by rewriting the cells carried by free variables. Normal forms
// are beta-normal and eta-long for Pi and Sigma.

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "stt/mode_theory.hpp"
#include "stt/syntax.hpp"

namespace stt {

struct CtxNode;
/// A context is a persistent list of entries, innermost at the head.
using Context = std::shared_ptr<const CtxNode>;

struct CtxNode {
  Context parent;
  bool is_lock = false;
  std::string name;
  Modality mu;     // annotation of a variable, or the lock modality
  TermPtr type;    // variable type, living in parent.{mu}
  TermPtr def;     // let-bound value, living in parent.{mu}
  int nvars = 0;   // variables in this context, including this entry
};

Context extend_var(const Context& ctx, std::string name, Modality mu, TermPtr type,
                   TermPtr def = nullptr);
/// Identity locks are never stored.
Context extend_lock(const Context& ctx, const Modality& mu);
int ctx_vars(const Context& ctx);
/// Composite of the locks to the right of variable `index`.
Modality locks_after(const Context& ctx, int index);
/// Composite of every lock in the context.
Modality ctx_locks(const Context& ctx);
/// The entry of variable `index`.
const CtxNode& var_entry(const Context& ctx, int index);
/// Variable names, outermost first (the printer's `locals`).
std::vector<std::string> ctx_names(const Context& ctx);

struct GlobalInfo {
  TermPtr type;
  TermPtr body;  // null for postulates
  bool conjecture = false;
  std::string module;
};
using GlobalTable = std::unordered_map<std::string, GlobalInfo>;

TermPtr shift(const TermPtr& t, int d, int cutoff = 0);
/// `t` lives in `scope.{mu}`; returns `t` transported along `alpha : mu -> nu`,
/// living in `scope.{nu}`.
TermPtr apply_key(const Context& scope, const TermPtr& t, const NormalCell& alpha);
/// `body` lives in `scope.x:(mu)A` and `arg` in `scope.{mu}`; returns body[arg/x].
TermPtr subst_top(const Context& scope, const TermPtr& body, const TermPtr& arg);
/// The type of variable `index` accessed through `cell`, living in `ctx`.
TermPtr var_type(const Context& ctx, int index, const NormalCell& cell);
/// A variable use whose cell is the identity on its annotation.
TermPtr plain_var(int index, const Modality& mu);

// Motive instantiations shared by the checker and conversion.

/// J motive `P` lives in ctx.y:A.q:Id A a y; returns P[b/y, p/q].
TermPtr j_motive_at(const Context& ctx, const TermPtr& A, const TermPtr& P, const TermPtr& b,
                    const TermPtr& p);
/// Nat-indexed motive `P` in ctx.n:Nat; returns the step type P[suc m] in ctx.m:Nat.ih:P.
TermPtr natrec_step_type(const Context& ctx, const TermPtr& P);
/// Motive `P` in ctx.z:(nu)<mu|A>; returns P[mod{mu} y / z] in ctx.y:(nu.mu)A.
TermPtr letmod_body_type(const Context& ctx, const Modality& mu, const Modality& nu,
                         const TermPtr& A, const TermPtr& P);

class Conversion {
 public:
  explicit Conversion(const GlobalTable& globals) : globals_(globals) {}

  /// Weak head normal form.
  TermPtr whnf(const Context& ctx, const TermPtr& t) const;
  TermPtr eval(const Context& ctx, const TermPtr& t) const { return whnf(ctx, t); }

  /// Beta-normal, eta-long form of `t : type`.
  TermPtr nf(const Context& ctx, const TermPtr& type, const TermPtr& t) const;
  TermPtr quote(const Context& ctx, const TermPtr& type, const TermPtr& t) const {
    return nf(ctx, type, t);
  }
  TermPtr nf_type(const Context& ctx, const TermPtr& type) const;

  bool conv(const Context& ctx, const TermPtr& type, const TermPtr& a, const TermPtr& b) const;
  bool conv_type(const Context& ctx, const TermPtr& a, const TermPtr& b) const;

  /// Type of a term in weak head neutral form.
  TermPtr neutral_type(const Context& ctx, const TermPtr& t) const;

 private:
  const GlobalTable& globals_;

  std::optional<TermPtr> conv_neutral(const Context& ctx, const TermPtr& a,
                                      const TermPtr& b) const;
  std::pair<TermPtr, TermPtr> nf_neutral(const Context& ctx, const TermPtr& t) const;
};

}  // namespace stt
