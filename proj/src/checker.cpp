#include "stt/checker.hpp"

#include <algorithm>

namespace stt {

namespace {

TermPtr nat() { return mk_atom(Tag::Nat); }

TermPtr at_span(TermPtr t, const Span& sp) {
  if (t->span.line != 0 || sp.line == 0) return t;
  Term c = *t;
  c.span = sp;
  return mk(std::move(c));
}

bool mentions_top(const TermPtr& t, int k = 0) {
  if (!t) return false;
  if (t->tag == Tag::Var) return t->index == k;
  for (std::size_t i = 0; i < t->kids.size(); ++i)
    if (mentions_top(t->kids[i], k + child_info(*t, i).binds)) return true;
  return false;
}

}  // namespace

std::string Checker::show_type(const Context& ctx, const TermPtr& type) const {
  try {
    return print_term(cv_.nf_type(ctx, type), ctx_names(ctx));
  } catch (const std::exception&) {
    return print_term(type, ctx_names(ctx));
  }
}

void Checker::mismatch(const Context& ctx, const TermPtr& at, const std::string& what,
                       const TermPtr& expected, const TermPtr& actual) {
  raise(ErrorCode::Mismatch, what, at->span, expected ? show_type(ctx, expected) : "",
        actual ? show_type(ctx, actual) : "");
}

// ---------------------------------------------------------------------------
// Variables

std::vector<NormalCell> Checker::candidates(const Modality& src, const Modality& tgt, int depth) {
  auto key = std::make_pair(src, tgt);
  auto it = s_.hole_cache.find(key);
  if (it != s_.hole_cache.end()) return it->second;
  std::vector<NormalCell> found;
  for (int d = 0; d <= depth; ++d) {
    ++s_.searches;
    found = search_cells(src, tgt, d);
    if (!found.empty()) break;
  }
  s_.hole_cache.emplace(key, found);
  return found;
}

Access Checker::access_var(const Context& ctx, const TermPtr& var) {
  const CtxNode& e = var_entry(ctx, var->index);
  Modality locks = locks_after(ctx, var->index);
  NormalCell cell;
  if (var->cell) {
    cell = *var->cell;
    if (cell.source != e.mu || cell.target != locks)
      raise(ErrorCode::BadBoundary, "cell on '" + e.name + "' has the wrong boundary", var->span,
            to_string(e.mu) + " -> " + to_string(locks),
            to_string(cell.source) + " -> " + to_string(cell.target));
  } else if (var->cell_expr) {
    std::pair<Modality, Modality> b;
    try {
      b = cell_boundary(**var->cell_expr);
    } catch (const ModeError& err) {
      raise(ErrorCode::BadBoundary, std::string("ill-formed cell: ") + err.what(), var->span);
    }
    if (b.first != e.mu || b.second != locks)
      raise(ErrorCode::BadBoundary, "cell on '" + e.name + "' has the wrong boundary", var->span,
            to_string(e.mu) + " -> " + to_string(locks),
            to_string(b.first) + " -> " + to_string(b.second));
    cell = normalize_cell(**var->cell_expr);
  } else if (e.mu == locks) {
    cell = NormalCell::identity(e.mu);
  } else {
    auto found = candidates(e.mu, locks, s_.depth);
    if (found.empty())
      raise(ErrorCode::NoCell,
            "no 2-cell " + to_string(e.mu) + " -> " + to_string(locks) + " gives access to '" +
                e.name + "' (a variable x:(mu)A is usable behind locks nu only through some alpha : mu -> nu)",
            var->span);
    if (found.size() > 1) {
      std::string list;
      for (const auto& c : found) list += (list.empty() ? "" : ", ") + to_expr_string(c);
      raise(ErrorCode::AmbiguousCell,
            "several 2-cells " + to_string(e.mu) + " -> " + to_string(locks) + " give access to '" +
                e.name + "'; annotate it with ^ {cell}: " + list,
            var->span);
    }
    cell = found.front();
  }
  return {var_type(ctx, var->index, cell), std::move(cell)};
}

// ---------------------------------------------------------------------------
// Types

std::pair<TermPtr, int> Checker::check_type(const Context& ctx, const TermPtr& t) {
  auto [ty, e] = infer(ctx, t);
  TermPtr w = cv_.whnf(ctx, ty);
  if (w->tag != Tag::U) mismatch(ctx, t, "expected a type", nullptr, ty);
  return {e, w->index};
}

int Checker::level_of(const Context& ctx, const TermPtr& type) const {
  TermPtr w = cv_.whnf(ctx, type);
  switch (w->tag) {
    case Tag::U:
      return w->index + 1;
    case Tag::Nat:
    case Tag::Bool:
    case Tag::Top:
      return 0;
    case Tag::Pi: {
      int i = level_of(extend_lock(ctx, w->mu), w->kids[0]);
      return std::max(i, level_of(extend_var(ctx, w->binders[0], w->mu, w->kids[0]), w->kids[1]));
    }
    case Tag::Sigma: {
      int i = level_of(ctx, w->kids[0]);
      return std::max(i, level_of(extend_var(ctx, w->binders[0], {}, w->kids[0]), w->kids[1]));
    }
    case Tag::Mod:
      return level_of(extend_lock(ctx, w->mu), w->kids[0]);
    case Tag::Id:
      return level_of(ctx, w->kids[0]);
    default: {
      TermPtr u = cv_.whnf(ctx, cv_.neutral_type(ctx, w));
      if (u->tag != Tag::U) raise(ErrorCode::Internal, "level of a non-type");
      return u->index;
    }
  }
}

// ---------------------------------------------------------------------------
// Checking

TermPtr Checker::check(const Context& ctx, const TermPtr& t, const TermPtr& type) {
  TermPtr T = cv_.whnf(ctx, type);
  switch (t->tag) {
    case Tag::Lam: {
      if (T->tag != Tag::Pi) mismatch(ctx, t, "a function is not of this type", type, nullptr);
      Context c2 = extend_var(ctx, t->binders[0], T->mu, T->kids[0]);
      return at_span(mk_lam(t->binders[0], check(c2, t->kids[0], T->kids[1])), t->span);
    }
    case Tag::Pair: {
      if (T->tag != Tag::Sigma) mismatch(ctx, t, "a pair is not of this type", type, nullptr);
      TermPtr a = check(ctx, t->kids[0], T->kids[0]);
      TermPtr b = check(ctx, t->kids[1], subst_top(ctx, T->kids[1], a));
      return at_span(mk_pair(a, b), t->span);
    }
    case Tag::ModIntro: {
      if (T->tag != Tag::Mod)
        mismatch(ctx, t, "mod{" + to_string(t->mu) + "} is not of this type", type, nullptr);
      if (T->mu != t->mu)
        raise(ErrorCode::Mismatch, "modal introduction at the wrong modality", t->span,
              to_string(T->mu), to_string(t->mu));
      return at_span(mk_mod_intro(t->mu, check(extend_lock(ctx, t->mu), t->kids[0], T->kids[0])),
                     t->span);
    }
    case Tag::Refl: {
      if (T->tag != Tag::Id) mismatch(ctx, t, "refl is not of this type", type, nullptr);
      if (!cv_.conv(ctx, T->kids[0], T->kids[1], T->kids[2]))
        raise(ErrorCode::Mismatch, "refl: the endpoints are not definitionally equal", t->span,
              print_term(cv_.nf(ctx, T->kids[0], T->kids[1]), ctx_names(ctx)),
              print_term(cv_.nf(ctx, T->kids[0], T->kids[2]), ctx_names(ctx)));
      return at_span(mk_atom(Tag::Refl), t->span);
    }
    case Tag::Let: {
      TermPtr ty, def;
      if (t->kids[0]) {
        ty = check_type(ctx, t->kids[0]).first;
        def = check(ctx, t->kids[1], ty);
      } else {
        std::tie(ty, def) = infer(ctx, t->kids[1]);
      }
      Context c2 = extend_var(ctx, t->binders[0], {}, ty, def);
      TermPtr body = check(c2, t->kids[2], shift(type, 1));
      return at_span(mk_let(t->binders[0], t->kids[0] ? ty : nullptr, def, body), t->span);
    }
    case Tag::LetMod:
      if (!t->kids[0]) return infer_letmod(ctx, t, &type).second;
      break;
    default:
      break;
  }
  auto [actual, e] = infer(ctx, t);
  if (!cv_.conv_type(ctx, actual, type)) {
    TermPtr wa = cv_.whnf(ctx, actual);
    if (wa->tag == Tag::U && T->tag == Tag::U)
      raise(ErrorCode::Level, "universe levels differ (the hierarchy is not cumulative)", t->span,
            "U " + std::to_string(T->index), "U " + std::to_string(wa->index));
    mismatch(ctx, t, "type mismatch", type, actual);
  }
  return e;
}

// ---------------------------------------------------------------------------
// Inference

std::pair<TermPtr, TermPtr> Checker::infer_letmod(const Context& ctx, const TermPtr& t,
                                                  const TermPtr* expected) {
  const Modality& mu = t->mu;
  const Modality& nu = t->nu;
  Context cl = extend_lock(ctx, nu);
  auto [st, scrut] = infer(cl, t->kids[1]);
  TermPtr M = cv_.whnf(cl, st);
  if (M->tag != Tag::Mod)
    mismatch(cl, t->kids[1], "let mod{" + to_string(mu) + "}: the scrutinee is not modal", nullptr,
             st);
  if (M->mu != mu)
    raise(ErrorCode::Mismatch, "let mod: the scrutinee has a different modality", t->kids[1]->span,
          to_string(mu), to_string(M->mu));
  const TermPtr& A = M->kids[0];
  Context cz = extend_var(ctx, t->binders[0], nu, st);
  Modality numu = compose_modalities(nu, mu);
  Context cy = extend_var(ctx, t->binders[1], numu, A);
  TermPtr motive;
  TermPtr body;
  if (t->kids[0]) {
    motive = check_type(cz, t->kids[0]).first;
    body = check(cy, t->kids[2], letmod_body_type(ctx, mu, nu, A, motive));
  } else if (expected) {
    motive = shift(*expected, 1);
    body = check(cy, t->kids[2], shift(*expected, 1));
  } else {
    auto [bt, b] = infer(cy, t->kids[2]);
    if (mentions_top(bt))
      raise(ErrorCode::Mismatch,
            "let mod: the type of the body depends on the bound variable; add `as (z. B)`",
            t->span);
    motive = bt;  // lives in ctx.y; reinterpreted in ctx.z since it does not mention the variable
    body = b;
  }
  TermPtr e = at_span(mk_letmod(mu, nu, t->binders[0], t->binders[1], motive, scrut, body), t->span);
  return {subst_top(ctx, motive, scrut), e};
}

std::pair<TermPtr, TermPtr> Checker::infer(const Context& ctx, const TermPtr& t) {
  switch (t->tag) {
    case Tag::Var: {
      Access a = access_var(ctx, t);
      Term c = *t;
      c.cell = a.cell;
      c.cell_expr.reset();
      return {a.type, mk(std::move(c))};
    }
    case Tag::Global: {
      auto it = s_.globals.find(t->name);
      if (it == s_.globals.end()) raise(ErrorCode::Unbound, "unbound name '" + t->name + "'", t->span);
      return {it->second.type, t};
    }
    case Tag::Name:
      raise(ErrorCode::Unbound, "unbound name '" + t->name + "'", t->span);
    case Tag::U:
      if (t->index < 0 || t->index >= 2)
        raise(ErrorCode::Level, "U " + std::to_string(t->index) + " has no universe above it",
              t->span);
      return {mk_u(t->index + 1), t};
    case Tag::Nat:
    case Tag::Bool:
    case Tag::Top:
      return {mk_u(0), t};
    case Tag::Zero:
      return {nat(), t};
    case Tag::True:
    case Tag::False:
      return {mk_atom(Tag::Bool), t};
    case Tag::TT:
      return {mk_atom(Tag::Top), t};
    case Tag::Suc:
      return {nat(), at_span(mk_suc(check(ctx, t->kids[0], nat())), t->span)};
    case Tag::Pi: {
      auto [dom, i] = check_type(extend_lock(ctx, t->mu), t->kids[0]);
      auto [cod, j] = check_type(extend_var(ctx, t->binders[0], t->mu, dom), t->kids[1]);
      return {mk_u(std::max(i, j)), at_span(mk_pi(t->binders[0], t->mu, dom, cod), t->span)};
    }
    case Tag::Sigma: {
      auto [a, i] = check_type(ctx, t->kids[0]);
      auto [b, j] = check_type(extend_var(ctx, t->binders[0], {}, a), t->kids[1]);
      return {mk_u(std::max(i, j)), at_span(mk_sigma(t->binders[0], a, b), t->span)};
    }
    case Tag::Mod: {
      auto [a, i] = check_type(extend_lock(ctx, t->mu), t->kids[0]);
      return {mk_u(i), at_span(mk_mod(t->mu, a), t->span)};
    }
    case Tag::Id: {
      TermPtr A, a;
      int level;
      if (t->kids[0]) {
        std::tie(A, level) = check_type(ctx, t->kids[0]);
        a = check(ctx, t->kids[1], A);
      } else {
        std::tie(A, a) = infer(ctx, t->kids[1]);
        level = level_of(ctx, A);
      }
      TermPtr b = check(ctx, t->kids[2], A);
      return {mk_u(level), at_span(mk_id(A, a, b), t->span)};
    }
    case Tag::App: {
      auto [ft, f] = infer(ctx, t->kids[0]);
      TermPtr P = cv_.whnf(ctx, ft);
      if (P->tag != Tag::Pi) mismatch(ctx, t->kids[0], "applying a non-function", nullptr, ft);
      if (t->mu_known && t->mu != P->mu)
        raise(ErrorCode::Mismatch, "application at the wrong modality", t->span, to_string(P->mu),
              to_string(t->mu));
      TermPtr a = check(extend_lock(ctx, P->mu), t->kids[1], P->kids[0]);
      return {subst_top(ctx, P->kids[1], a), at_span(mk_app(f, a, P->mu), t->span)};
    }
    case Tag::Fst:
    case Tag::Snd: {
      auto [pt, p] = infer(ctx, t->kids[0]);
      TermPtr S = cv_.whnf(ctx, pt);
      if (S->tag != Tag::Sigma) mismatch(ctx, t->kids[0], "projection from a non-pair", nullptr, pt);
      if (t->tag == Tag::Fst) return {S->kids[0], at_span(mk_fst(p), t->span)};
      return {subst_top(ctx, S->kids[1], mk_fst(p)), at_span(mk_snd(p), t->span)};
    }
    case Tag::J: {
      auto [pt, p] = infer(ctx, t->kids[2]);
      TermPtr I = cv_.whnf(ctx, pt);
      if (I->tag != Tag::Id) mismatch(ctx, t->kids[2], "J on a non-path", nullptr, pt);
      const TermPtr& A = I->kids[0];
      Context cy = extend_var(ctx, t->binders[0], {}, A);
      Context cq = extend_var(cy, t->binders[1], {},
                              mk_id(shift(A, 1), shift(I->kids[1], 1), plain_var(0, {})));
      TermPtr P = check_type(cq, t->kids[0]).first;
      TermPtr d = check(ctx, t->kids[1], j_motive_at(ctx, A, P, I->kids[1], mk_atom(Tag::Refl)));
      return {j_motive_at(ctx, A, P, I->kids[2], p),
              at_span(mk_j(t->binders[0], t->binders[1], P, d, p), t->span)};
    }
    case Tag::NatRec: {
      TermPtr n = check(ctx, t->kids[3], nat());
      Context cn = extend_var(ctx, t->binders[0], {}, nat());
      TermPtr P = check_type(cn, t->kids[0]).first;
      TermPtr z = check(ctx, t->kids[1], subst_top(ctx, P, mk_atom(Tag::Zero)));
      Context cih = extend_var(extend_var(ctx, t->binders[1], {}, nat()), t->binders[2], {}, P);
      TermPtr s = check(cih, t->kids[2], natrec_step_type(ctx, P));
      return {subst_top(ctx, P, n),
              at_span(mk_natrec(t->binders[0], t->binders[1], t->binders[2], P, z, s, n), t->span)};
    }
    case Tag::BoolRec: {
      TermPtr b = check(ctx, t->kids[3], mk_atom(Tag::Bool));
      Context cb = extend_var(ctx, t->binders[0], {}, mk_atom(Tag::Bool));
      TermPtr P = check_type(cb, t->kids[0]).first;
      TermPtr tt = check(ctx, t->kids[1], subst_top(ctx, P, mk_atom(Tag::True)));
      TermPtr ff = check(ctx, t->kids[2], subst_top(ctx, P, mk_atom(Tag::False)));
      return {subst_top(ctx, P, b), at_span(mk_boolrec(t->binders[0], P, tt, ff, b), t->span)};
    }
    case Tag::LetMod:
      return infer_letmod(ctx, t, nullptr);
    case Tag::Ann: {
      TermPtr T = check_type(ctx, t->kids[1]).first;
      TermPtr e = check(ctx, t->kids[0], T);
      return {T, at_span(mk_ann(e, T), t->span)};
    }
    case Tag::Let: {
      TermPtr ty, def;
      if (t->kids[0]) {
        ty = check_type(ctx, t->kids[0]).first;
        def = check(ctx, t->kids[1], ty);
      } else {
        std::tie(ty, def) = infer(ctx, t->kids[1]);
      }
      Context c2 = extend_var(ctx, t->binders[0], {}, ty, def);
      auto [bt, body] = infer(c2, t->kids[2]);
      return {subst_top(ctx, bt, def),
              at_span(mk_let(t->binders[0], t->kids[0] ? ty : nullptr, def, body), t->span)};
    }
    case Tag::ModIntro: {
      auto [at, a] = infer(extend_lock(ctx, t->mu), t->kids[0]);
      return {mk_mod(t->mu, at), at_span(mk_mod_intro(t->mu, a), t->span)};
    }
    case Tag::Lam:
    case Tag::Pair:
    case Tag::Refl:
      raise(ErrorCode::Mismatch,
            "cannot infer the type of this " + std::string(tag_name(t->tag)) +
                "; add an annotation (e : T)",
            t->span);
  }
  raise(ErrorCode::Internal, "unhandled term");
}

// ---------------------------------------------------------------------------
// Declarations

Decl Checker::check_decl(const Decl& d, const std::string& module) {
  if (s_.globals.count(d.name))
    raise(ErrorCode::Unbound, "duplicate definition of '" + d.name + "'", d.span);
  try {
    Decl out = d;
    out.type = check_type(nullptr, d.type).first;
    if (d.kind == Decl::Kind::Def) out.body = check(nullptr, d.body, out.type);
    GlobalInfo info;
    info.type = out.type;
    info.body = out.body;
    info.conjecture = d.conjecture;
    info.module = module;
    s_.globals.emplace(d.name, std::move(info));
    s_.order.push_back(d.name);
    return out;
  } catch (SttError& e) {
    e.diag.message = "in '" + d.name + "': " + e.diag.message;
    if (e.diag.span.line == 0) e.diag.span = d.span;
    throw;
  } catch (const ModeError& e) {
    raise(ErrorCode::Internal, "in '" + d.name + "': mode theory defect: " + e.what(), d.span);
  }
}

}  // namespace stt
