#include "stt/conversion.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <unordered_map>

namespace stt {

// ---------------------------------------------------------------------------
// Contexts

Context extend_var(const Context& ctx, std::string name, Modality mu, TermPtr type, TermPtr def) {
  auto n = std::make_shared<CtxNode>();
  n->parent = ctx;
  n->name = std::move(name);
  n->mu = normalize_modality(mu);
  n->type = std::move(type);
  n->def = std::move(def);
  n->nvars = ctx_vars(ctx) + 1;
  return n;
}

Context extend_lock(const Context& ctx, const Modality& mu) {
  Modality m = normalize_modality(mu);
  if (m.is_id()) return ctx;
  auto n = std::make_shared<CtxNode>();
  n->parent = ctx;
  n->is_lock = true;
  n->mu = std::move(m);
  n->nvars = ctx_vars(ctx);
  return n;
}

int ctx_vars(const Context& ctx) { return ctx ? ctx->nvars : 0; }

Modality locks_after(const Context& ctx, int index) {
  Modality m;
  int seen = 0;
  for (const CtxNode* n = ctx.get(); n; n = n->parent.get()) {
    if (n->is_lock) {
      m = compose_modalities(n->mu, m);
    } else if (seen++ == index) {
      return m;
    }
  }
  raise(ErrorCode::Internal, "variable index " + std::to_string(index) + " out of scope");
}

Modality ctx_locks(const Context& ctx) {
  Modality m;
  for (const CtxNode* n = ctx.get(); n; n = n->parent.get())
    if (n->is_lock) m = compose_modalities(n->mu, m);
  return m;
}

const CtxNode& var_entry(const Context& ctx, int index) {
  int seen = 0;
  for (const CtxNode* n = ctx.get(); n; n = n->parent.get())
    if (!n->is_lock && seen++ == index) return *n;
  raise(ErrorCode::Internal, "variable index " + std::to_string(index) + " out of scope");
}

std::vector<std::string> ctx_names(const Context& ctx) {
  std::vector<std::string> out;
  for (const CtxNode* n = ctx.get(); n; n = n->parent.get())
    if (!n->is_lock) out.push_back(n->name);
  std::reverse(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Shifting, keys and substitution

namespace {

TermPtr map_kids(const TermPtr& t, const std::function<TermPtr(const TermPtr&, const ChildInfo&)>& f) {
  std::vector<TermPtr> kids;
  kids.reserve(t->kids.size());
  for (std::size_t k = 0; k < t->kids.size(); ++k)
    kids.push_back(t->kids[k] ? f(t->kids[k], child_info(*t, k)) : nullptr);
  return with_kids(t, std::move(kids));
}

TermPtr set_var(const TermPtr& v, int index, std::optional<NormalCell> cell) {
  Term c = *v;
  c.index = index;
  c.cell = std::move(cell);
  c.cell_expr.reset();
  return mk(std::move(c));
}

// Cheap check used to skip traversals: does any variable >= cutoff occur?
bool has_free(const TermPtr& t, int cutoff) {
  if (!t) return false;
  if (t->tag == Tag::Var) return t->index >= cutoff;
  for (std::size_t k = 0; k < t->kids.size(); ++k)
    if (has_free(t->kids[k], cutoff + child_info(*t, k).binds)) return true;
  return false;
}

}  // namespace

TermPtr shift(const TermPtr& t, int d, int cutoff) {
  if (!t || d == 0) return t;
  if (t->tag == Tag::Var)
    return t->index >= cutoff ? set_var(t, t->index + d, t->cell) : t;
  if (!has_free(t, cutoff)) return t;
  return map_kids(t, [&](const TermPtr& k, const ChildInfo& ci) {
    return shift(k, d, cutoff + ci.binds);
  });
}

namespace {

class Keyer {
 public:
  Keyer(const Context& scope, const NormalCell& alpha) : scope_(scope), alpha_(alpha) {}

  TermPtr go(const TermPtr& t, int k, const Modality& inner) {
    if (!t) return t;
    if (t->tag == Tag::Var) {
      if (t->index < k) return t;
      if (!t->cell) raise(ErrorCode::Internal, "unelaborated variable reached conversion");
      const NormalCell& w = whiskered(t->index - k, inner);
      return set_var(t, t->index, vcomp(w, *t->cell));
    }
    if (!has_free(t, k)) return t;
    return map_kids(t, [&](const TermPtr& kid, const ChildInfo& ci) {
      return go(kid, k + ci.binds, compose_modalities(inner, ci.lock));
    });
  }

 private:
  const Context& scope_;
  const NormalCell& alpha_;
  std::unordered_map<int, Modality> locks_;
  std::map<std::pair<int, Modality>, NormalCell> cells_;

  const NormalCell& whiskered(int y, const Modality& inner) {
    auto key = std::make_pair(y, inner);
    auto it = cells_.find(key);
    if (it != cells_.end()) return it->second;
    auto lt = locks_.find(y);
    if (lt == locks_.end()) lt = locks_.emplace(y, locks_after(scope_, y)).first;
    NormalCell w = whisker_right(whisker_left(lt->second, alpha_), inner);
    return cells_.emplace(key, std::move(w)).first->second;
  }
};

class Substituter {
 public:
  Substituter(const Context& scope, const TermPtr& arg) : scope_(scope), arg_(arg) {}

  TermPtr go(const TermPtr& t, int k) {
    if (!t) return t;
    if (t->tag == Tag::Var) {
      if (t->index < k) return t;
      if (t->index > k) return set_var(t, t->index - 1, t->cell);
      if (!t->cell) raise(ErrorCode::Internal, "unelaborated variable reached substitution");
      return shift(apply_key(scope_, arg_, *t->cell), k);
    }
    if (!has_free(t, k)) return t;
    return map_kids(t, [&](const TermPtr& kid, const ChildInfo& ci) { return go(kid, k + ci.binds); });
  }

 private:
  const Context& scope_;
  const TermPtr& arg_;
};

}  // namespace

TermPtr apply_key(const Context& scope, const TermPtr& t, const NormalCell& alpha) {
  if (alpha.is_identity() || !t) return t;
  Keyer k(scope, alpha);
  return k.go(t, 0, Modality::id());
}

TermPtr subst_top(const Context& scope, const TermPtr& body, const TermPtr& arg) {
  Substituter s(scope, arg);
  return s.go(body, 0);
}

TermPtr var_type(const Context& ctx, int index, const NormalCell& cell) {
  const CtxNode& e = var_entry(ctx, index);
  return shift(apply_key(e.parent, e.type, cell), index + 1);
}

TermPtr plain_var(int index, const Modality& mu) {
  return mk_var(index, NormalCell::identity(mu));
}

TermPtr j_motive_at(const Context& ctx, const TermPtr& A, const TermPtr& P, const TermPtr& b,
                    const TermPtr& p) {
  Context cy = extend_var(ctx, "y", {}, A);
  TermPtr q_done = subst_top(cy, P, shift(p, 1));
  return subst_top(ctx, q_done, b);
}

TermPtr natrec_step_type(const Context& ctx, const TermPtr& P) {
  Context cm = extend_var(ctx, "m", {}, mk_atom(Tag::Nat));
  TermPtr at_suc = subst_top(cm, shift(P, 1, 1), mk_suc(plain_var(0, {})));
  return shift(at_suc, 1);
}

TermPtr letmod_body_type(const Context& ctx, const Modality& mu, const Modality& nu,
                         const TermPtr& A, const TermPtr& P) {
  Modality numu = compose_modalities(nu, mu);
  Context cy = extend_var(ctx, "y", numu, A);
  return subst_top(cy, shift(P, 1, 1), mk_mod_intro(mu, plain_var(0, numu)));
}

// ---------------------------------------------------------------------------
// Evaluation

TermPtr Conversion::whnf(const Context& ctx, const TermPtr& t0) const {
  TermPtr t = t0;
  while (true) {
    switch (t->tag) {
      case Tag::Ann:
        t = t->kids[0];
        continue;
      case Tag::Let:
        t = subst_top(ctx, t->kids[2], t->kids[1]);
        continue;
      case Tag::Global: {
        auto it = globals_.find(t->name);
        if (it == globals_.end() || !it->second.body) return t;
        t = it->second.body;
        continue;
      }
      case Tag::Var: {
        const CtxNode& e = var_entry(ctx, t->index);
        if (!e.def) return t;
        if (!t->cell) raise(ErrorCode::Internal, "unelaborated variable reached evaluation");
        t = shift(apply_key(e.parent, e.def, *t->cell), t->index + 1);
        continue;
      }
      case Tag::App: {
        TermPtr f = whnf(ctx, t->kids[0]);
        if (f->tag == Tag::Lam) {
          t = subst_top(ctx, f->kids[0], t->kids[1]);
          continue;
        }
        return with_kid(t, 0, f);
      }
      case Tag::Fst:
      case Tag::Snd: {
        TermPtr p = whnf(ctx, t->kids[0]);
        if (p->tag == Tag::Pair) {
          t = p->kids[t->tag == Tag::Fst ? 0 : 1];
          continue;
        }
        return with_kid(t, 0, p);
      }
      case Tag::J: {
        TermPtr p = whnf(ctx, t->kids[2]);
        if (p->tag == Tag::Refl) {
          t = t->kids[1];
          continue;
        }
        return with_kid(t, 2, p);
      }
      case Tag::NatRec: {
        TermPtr n = whnf(ctx, t->kids[3]);
        if (n->tag == Tag::Zero) {
          t = t->kids[1];
          continue;
        }
        if (n->tag == Tag::Suc) {
          TermPtr m = n->kids[0];
          TermPtr rec = with_kid(t, 3, m);
          Context cm = extend_var(ctx, "m", {}, mk_atom(Tag::Nat));
          TermPtr s1 = subst_top(cm, t->kids[2], shift(rec, 1));
          t = subst_top(ctx, s1, m);
          continue;
        }
        return with_kid(t, 3, n);
      }
      case Tag::BoolRec: {
        TermPtr b = whnf(ctx, t->kids[3]);
        if (b->tag == Tag::True) {
          t = t->kids[1];
          continue;
        }
        if (b->tag == Tag::False) {
          t = t->kids[2];
          continue;
        }
        return with_kid(t, 3, b);
      }
      case Tag::LetMod: {
        TermPtr s = whnf(extend_lock(ctx, t->nu), t->kids[1]);
        if (s->tag == Tag::ModIntro) {
          t = subst_top(ctx, t->kids[2], s->kids[0]);
          continue;
        }
        return with_kid(t, 1, s);
      }
      default:
        return t;
    }
  }
}

// ---------------------------------------------------------------------------
// Neutral types

TermPtr Conversion::neutral_type(const Context& ctx, const TermPtr& t) const {
  switch (t->tag) {
    case Tag::Var:
      if (!t->cell) raise(ErrorCode::Internal, "unelaborated variable");
      return var_type(ctx, t->index, *t->cell);
    case Tag::Global: {
      auto it = globals_.find(t->name);
      if (it == globals_.end()) raise(ErrorCode::Internal, "unknown global " + t->name);
      return it->second.type;
    }
    case Tag::App: {
      TermPtr ft = whnf(ctx, neutral_type(ctx, whnf(ctx, t->kids[0])));
      if (ft->tag != Tag::Pi) raise(ErrorCode::Internal, "application of a non-function");
      return subst_top(ctx, ft->kids[1], t->kids[1]);
    }
    case Tag::Fst:
    case Tag::Snd: {
      TermPtr pt = whnf(ctx, neutral_type(ctx, whnf(ctx, t->kids[0])));
      if (pt->tag != Tag::Sigma) raise(ErrorCode::Internal, "projection from a non-pair");
      if (t->tag == Tag::Fst) return pt->kids[0];
      return subst_top(ctx, pt->kids[1], mk_fst(t->kids[0]));
    }
    case Tag::J: {
      TermPtr pt = whnf(ctx, neutral_type(ctx, whnf(ctx, t->kids[2])));
      if (pt->tag != Tag::Id) raise(ErrorCode::Internal, "J on a non-path");
      return j_motive_at(ctx, pt->kids[0], t->kids[0], pt->kids[2], t->kids[2]);
    }
    case Tag::NatRec:
    case Tag::BoolRec:
      return subst_top(ctx, t->kids[0], t->kids[3]);
    case Tag::LetMod:
      if (!t->kids[0]) raise(ErrorCode::Internal, "let-mod without motive");
      return subst_top(ctx, t->kids[0], t->kids[1]);
    default:
      raise(ErrorCode::Internal, std::string("not a neutral term: ") + std::string(tag_name(t->tag)));
  }
}

// ---------------------------------------------------------------------------
// Conversion

bool Conversion::conv(const Context& ctx, const TermPtr& type, const TermPtr& a,
                      const TermPtr& b) const {
  if (alpha_eq(a, b)) return true;
  TermPtr T = whnf(ctx, type);
  switch (T->tag) {
    case Tag::Pi: {
      Context c2 = extend_var(ctx, "x", T->mu, T->kids[0]);
      TermPtr v = plain_var(0, T->mu);
      return conv(c2, T->kids[1], mk_app(shift(a, 1), v, T->mu), mk_app(shift(b, 1), v, T->mu));
    }
    case Tag::Sigma: {
      TermPtr fa = mk_fst(a);
      if (!conv(ctx, T->kids[0], fa, mk_fst(b))) return false;
      return conv(ctx, subst_top(ctx, T->kids[1], fa), mk_snd(a), mk_snd(b));
    }
    case Tag::U:
      return conv_type(ctx, a, b);
    default:
      break;
  }
  TermPtr wa = whnf(ctx, a), wb = whnf(ctx, b);
  if (alpha_eq(wa, wb)) return true;
  if (wa->tag != wb->tag) return false;
  switch (wa->tag) {
    case Tag::Zero:
    case Tag::True:
    case Tag::False:
    case Tag::TT:
    case Tag::Refl:
      return true;
    case Tag::Suc:
      return conv(ctx, mk_atom(Tag::Nat), wa->kids[0], wb->kids[0]);
    case Tag::ModIntro:
      if (wa->mu != wb->mu || T->tag != Tag::Mod) return false;
      return conv(extend_lock(ctx, wa->mu), T->kids[0], wa->kids[0], wb->kids[0]);
    default:
      return conv_neutral(ctx, wa, wb).has_value();
  }
}

bool Conversion::conv_type(const Context& ctx, const TermPtr& a, const TermPtr& b) const {
  if (alpha_eq(a, b)) return true;
  TermPtr wa = whnf(ctx, a), wb = whnf(ctx, b);
  if (alpha_eq(wa, wb)) return true;
  if (wa->tag != wb->tag) return false;
  switch (wa->tag) {
    case Tag::U:
      return wa->index == wb->index;
    case Tag::Nat:
    case Tag::Bool:
    case Tag::Top:
      return true;
    case Tag::Pi:
      return wa->mu == wb->mu && conv_type(extend_lock(ctx, wa->mu), wa->kids[0], wb->kids[0]) &&
             conv_type(extend_var(ctx, "x", wa->mu, wa->kids[0]), wa->kids[1], wb->kids[1]);
    case Tag::Sigma:
      return conv_type(ctx, wa->kids[0], wb->kids[0]) &&
             conv_type(extend_var(ctx, "x", {}, wa->kids[0]), wa->kids[1], wb->kids[1]);
    case Tag::Id:
      return conv_type(ctx, wa->kids[0], wb->kids[0]) &&
             conv(ctx, wa->kids[0], wa->kids[1], wb->kids[1]) &&
             conv(ctx, wa->kids[0], wa->kids[2], wb->kids[2]);
    case Tag::Mod:
      return wa->mu == wb->mu && conv_type(extend_lock(ctx, wa->mu), wa->kids[0], wb->kids[0]);
    default:
      return conv_neutral(ctx, wa, wb).has_value();
  }
}

std::optional<TermPtr> Conversion::conv_neutral(const Context& ctx, const TermPtr& a0,
                                                const TermPtr& b0) const {
  TermPtr a = whnf(ctx, a0), b = whnf(ctx, b0);
  if (a->tag != b->tag) return std::nullopt;
  switch (a->tag) {
    case Tag::Var:
      if (a->index != b->index || !a->cell || !b->cell) return std::nullopt;
      if (a->cell->atoms != b->cell->atoms) return std::nullopt;
      return var_type(ctx, a->index, *a->cell);
    case Tag::Global:
      if (a->name != b->name) return std::nullopt;
      return neutral_type(ctx, a);
    case Tag::App: {
      auto ft = conv_neutral(ctx, a->kids[0], b->kids[0]);
      if (!ft) return std::nullopt;
      TermPtr P = whnf(ctx, *ft);
      if (P->tag != Tag::Pi) return std::nullopt;
      if (!conv(extend_lock(ctx, P->mu), P->kids[0], a->kids[1], b->kids[1])) return std::nullopt;
      return subst_top(ctx, P->kids[1], a->kids[1]);
    }
    case Tag::Fst:
    case Tag::Snd: {
      auto pt = conv_neutral(ctx, a->kids[0], b->kids[0]);
      if (!pt) return std::nullopt;
      TermPtr S = whnf(ctx, *pt);
      if (S->tag != Tag::Sigma) return std::nullopt;
      if (a->tag == Tag::Fst) return S->kids[0];
      return subst_top(ctx, S->kids[1], mk_fst(a->kids[0]));
    }
    case Tag::J: {
      auto pt = conv_neutral(ctx, a->kids[2], b->kids[2]);
      if (!pt) return std::nullopt;
      TermPtr I = whnf(ctx, *pt);
      if (I->tag != Tag::Id) return std::nullopt;
      const TermPtr& A = I->kids[0];
      Context cy = extend_var(ctx, "y", {}, A);
      Context cq = extend_var(cy, "q", {},
                              mk_id(shift(A, 1), shift(I->kids[1], 1), plain_var(0, {})));
      if (!conv_type(cq, a->kids[0], b->kids[0])) return std::nullopt;
      TermPtr dt = j_motive_at(ctx, A, a->kids[0], I->kids[1], mk_atom(Tag::Refl));
      if (!conv(ctx, dt, a->kids[1], b->kids[1])) return std::nullopt;
      return j_motive_at(ctx, A, a->kids[0], I->kids[2], a->kids[2]);
    }
    case Tag::NatRec: {
      if (!conv_neutral(ctx, a->kids[3], b->kids[3])) return std::nullopt;
      const TermPtr& P = a->kids[0];
      Context cn = extend_var(ctx, "n", {}, mk_atom(Tag::Nat));
      if (!conv_type(cn, P, b->kids[0])) return std::nullopt;
      if (!conv(ctx, subst_top(ctx, P, mk_atom(Tag::Zero)), a->kids[1], b->kids[1]))
        return std::nullopt;
      Context cih = extend_var(extend_var(ctx, "m", {}, mk_atom(Tag::Nat)), "ih", {}, P);
      if (!conv(cih, natrec_step_type(ctx, P), a->kids[2], b->kids[2])) return std::nullopt;
      return subst_top(ctx, P, a->kids[3]);
    }
    case Tag::BoolRec: {
      if (!conv_neutral(ctx, a->kids[3], b->kids[3])) return std::nullopt;
      const TermPtr& P = a->kids[0];
      Context cb = extend_var(ctx, "b", {}, mk_atom(Tag::Bool));
      if (!conv_type(cb, P, b->kids[0])) return std::nullopt;
      if (!conv(ctx, subst_top(ctx, P, mk_atom(Tag::True)), a->kids[1], b->kids[1]))
        return std::nullopt;
      if (!conv(ctx, subst_top(ctx, P, mk_atom(Tag::False)), a->kids[2], b->kids[2]))
        return std::nullopt;
      return subst_top(ctx, P, a->kids[3]);
    }
    case Tag::LetMod: {
      if (a->mu != b->mu || a->nu != b->nu || !a->kids[0] || !b->kids[0]) return std::nullopt;
      Context cl = extend_lock(ctx, a->nu);
      auto st = conv_neutral(cl, a->kids[1], b->kids[1]);
      if (!st) return std::nullopt;
      TermPtr M = whnf(cl, *st);
      if (M->tag != Tag::Mod) return std::nullopt;
      Context cz = extend_var(ctx, "z", a->nu, *st);
      if (!conv_type(cz, a->kids[0], b->kids[0])) return std::nullopt;
      Context cy = extend_var(ctx, "y", compose_modalities(a->nu, a->mu), M->kids[0]);
      TermPtr bt = letmod_body_type(ctx, a->mu, a->nu, M->kids[0], a->kids[0]);
      if (!conv(cy, bt, a->kids[2], b->kids[2])) return std::nullopt;
      return subst_top(ctx, a->kids[0], a->kids[1]);
    }
    default:
      return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// Normal forms

TermPtr Conversion::nf(const Context& ctx, const TermPtr& type, const TermPtr& t) const {
  TermPtr T = whnf(ctx, type);
  switch (T->tag) {
    case Tag::Pi: {
      Context c2 = extend_var(ctx, "x", T->mu, T->kids[0]);
      TermPtr body = nf(c2, T->kids[1], mk_app(shift(t, 1), plain_var(0, T->mu), T->mu));
      return mk_lam(T->binders[0], body);
    }
    case Tag::Sigma: {
      TermPtr f = mk_fst(t);
      return mk_pair(nf(ctx, T->kids[0], f), nf(ctx, subst_top(ctx, T->kids[1], f), mk_snd(t)));
    }
    case Tag::U:
      return nf_type(ctx, t);
    default:
      break;
  }
  TermPtr w = whnf(ctx, t);
  switch (w->tag) {
    case Tag::Zero:
    case Tag::True:
    case Tag::False:
    case Tag::TT:
    case Tag::Refl:
      return mk_atom(w->tag);
    case Tag::Suc:
      return mk_suc(nf(ctx, mk_atom(Tag::Nat), w->kids[0]));
    case Tag::ModIntro: {
      if (T->tag != Tag::Mod) raise(ErrorCode::Internal, "modal value at a non-modal type");
      return mk_mod_intro(w->mu, nf(extend_lock(ctx, w->mu), T->kids[0], w->kids[0]));
    }
    default:
      return nf_neutral(ctx, w).first;
  }
}

TermPtr Conversion::nf_type(const Context& ctx, const TermPtr& type) const {
  TermPtr w = whnf(ctx, type);
  switch (w->tag) {
    case Tag::U:
    case Tag::Nat:
    case Tag::Bool:
    case Tag::Top:
      return w->tag == Tag::U ? mk_u(w->index) : mk_atom(w->tag);
    case Tag::Pi:
      return mk_pi(w->binders[0], w->mu, nf_type(extend_lock(ctx, w->mu), w->kids[0]),
                   nf_type(extend_var(ctx, w->binders[0], w->mu, w->kids[0]), w->kids[1]));
    case Tag::Sigma:
      return mk_sigma(w->binders[0], nf_type(ctx, w->kids[0]),
                      nf_type(extend_var(ctx, w->binders[0], {}, w->kids[0]), w->kids[1]));
    case Tag::Id:
      return mk_id(nf_type(ctx, w->kids[0]), nf(ctx, w->kids[0], w->kids[1]),
                   nf(ctx, w->kids[0], w->kids[2]));
    case Tag::Mod:
      return mk_mod(w->mu, nf_type(extend_lock(ctx, w->mu), w->kids[0]));
    default:
      return nf_neutral(ctx, w).first;
  }
}

std::pair<TermPtr, TermPtr> Conversion::nf_neutral(const Context& ctx, const TermPtr& t0) const {
  TermPtr t = whnf(ctx, t0);
  switch (t->tag) {
    case Tag::Var:
      if (!t->cell) raise(ErrorCode::Internal, "unelaborated variable");
      return {mk_var(t->index, t->cell), var_type(ctx, t->index, *t->cell)};
    case Tag::Global:
      return {mk_global(t->name), neutral_type(ctx, t)};
    case Tag::App: {
      auto [f, ft] = nf_neutral(ctx, t->kids[0]);
      TermPtr P = whnf(ctx, ft);
      if (P->tag != Tag::Pi) raise(ErrorCode::Internal, "application of a non-function");
      TermPtr arg = nf(extend_lock(ctx, P->mu), P->kids[0], t->kids[1]);
      return {mk_app(f, arg, P->mu), subst_top(ctx, P->kids[1], t->kids[1])};
    }
    case Tag::Fst:
    case Tag::Snd: {
      auto [p, pt] = nf_neutral(ctx, t->kids[0]);
      TermPtr S = whnf(ctx, pt);
      if (S->tag != Tag::Sigma) raise(ErrorCode::Internal, "projection from a non-pair");
      if (t->tag == Tag::Fst) return {mk_fst(p), S->kids[0]};
      return {mk_snd(p), subst_top(ctx, S->kids[1], mk_fst(t->kids[0]))};
    }
    case Tag::J: {
      auto [p, pt] = nf_neutral(ctx, t->kids[2]);
      TermPtr I = whnf(ctx, pt);
      if (I->tag != Tag::Id) raise(ErrorCode::Internal, "J on a non-path");
      const TermPtr& A = I->kids[0];
      Context cy = extend_var(ctx, "y", {}, A);
      Context cq = extend_var(cy, "q", {}, mk_id(shift(A, 1), shift(I->kids[1], 1), plain_var(0, {})));
      TermPtr motive = nf_type(cq, t->kids[0]);
      TermPtr d = nf(ctx, j_motive_at(ctx, A, t->kids[0], I->kids[1], mk_atom(Tag::Refl)), t->kids[1]);
      return {mk_j(t->binders[0], t->binders[1], motive, d, p),
              j_motive_at(ctx, A, t->kids[0], I->kids[2], t->kids[2])};
    }
    case Tag::NatRec: {
      auto [n, nt] = nf_neutral(ctx, t->kids[3]);
      (void)nt;
      const TermPtr& P = t->kids[0];
      Context cn = extend_var(ctx, "n", {}, mk_atom(Tag::Nat));
      TermPtr motive = nf_type(cn, P);
      TermPtr z = nf(ctx, subst_top(ctx, P, mk_atom(Tag::Zero)), t->kids[1]);
      Context cih = extend_var(extend_var(ctx, "m", {}, mk_atom(Tag::Nat)), "ih", {}, P);
      TermPtr s = nf(cih, natrec_step_type(ctx, P), t->kids[2]);
      return {mk_natrec(t->binders[0], t->binders[1], t->binders[2], motive, z, s, n),
              subst_top(ctx, P, t->kids[3])};
    }
    case Tag::BoolRec: {
      auto [b, bt] = nf_neutral(ctx, t->kids[3]);
      (void)bt;
      const TermPtr& P = t->kids[0];
      Context cb = extend_var(ctx, "b", {}, mk_atom(Tag::Bool));
      TermPtr motive = nf_type(cb, P);
      TermPtr tt = nf(ctx, subst_top(ctx, P, mk_atom(Tag::True)), t->kids[1]);
      TermPtr ff = nf(ctx, subst_top(ctx, P, mk_atom(Tag::False)), t->kids[2]);
      return {mk_boolrec(t->binders[0], motive, tt, ff, b), subst_top(ctx, P, t->kids[3])};
    }
    case Tag::LetMod: {
      if (!t->kids[0]) raise(ErrorCode::Internal, "let-mod without motive");
      Context cl = extend_lock(ctx, t->nu);
      auto [s, st] = nf_neutral(cl, t->kids[1]);
      TermPtr M = whnf(cl, st);
      if (M->tag != Tag::Mod) raise(ErrorCode::Internal, "let-mod on a non-modal value");
      Context cz = extend_var(ctx, t->binders[0], t->nu, st);
      TermPtr motive = nf_type(cz, t->kids[0]);
      Context cy = extend_var(ctx, t->binders[1], compose_modalities(t->nu, t->mu), M->kids[0]);
      TermPtr body = nf(cy, letmod_body_type(ctx, t->mu, t->nu, M->kids[0], t->kids[0]), t->kids[2]);
      return {mk_letmod(t->mu, t->nu, t->binders[0], t->binders[1], motive, s, body),
              subst_top(ctx, t->kids[0], t->kids[1])};
    }
    default:
      raise(ErrorCode::Internal,
            std::string("cannot normalize a stuck ") + std::string(tag_name(t->tag)));
  }
}

}  // namespace stt
