#include "stt/mode_theory.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <unordered_map>

namespace stt {

namespace {

constexpr Generator kF = Generator::Flat;
constexpr Generator kS = Generator::Sharp;
constexpr Generator kO = Generator::Op;
constexpr Generator kT = Generator::Tw;

// Result of rewriting the two-letter word `a b`:
// -1 no rule applies, 4 the empty word, otherwise the single generator.
int rewrite_pair(Generator a, Generator b) {
  if (a == kF && (b == kF || b == kS || b == kO)) return int(kF);
  if (a == kT && b == kF) return int(kF);
  if (a == kS && (b == kS || b == kF || b == kO)) return int(kS);
  if (a == kO && b == kO) return 4;
  return -1;
}

}  // namespace

std::string_view generator_name(Generator g) {
  switch (g) {
    case Generator::Flat: return "flat";
    case Generator::Sharp: return "sharp";
    case Generator::Op: return "op";
    case Generator::Tw: return "tw";
  }
  return "?";
}

std::optional<Generator> generator_from_name(std::string_view s) {
  if (s == "flat") return kF;
  if (s == "sharp") return kS;
  if (s == "op") return kO;
  if (s == "tw") return kT;
  return std::nullopt;
}

std::strong_ordering operator<=>(const Modality& a, const Modality& b) {
  if (a.word.size() != b.word.size()) return a.word.size() <=> b.word.size();
  for (std::size_t i = 0; i < a.word.size(); ++i)
    if (a.word[i] != b.word[i]) return a.word[i] <=> b.word[i];
  return std::strong_ordering::equal;
}

std::string to_string(const Modality& m) {
  if (m.is_id()) return "id";
  std::string out;
  for (std::size_t i = 0; i < m.word.size(); ++i) {
    if (i) out += '.';
    out += generator_name(m.word[i]);
  }
  return out;
}

Modality parse_modality(std::string_view text) {
  Modality m;
  std::string tok;
  bool need_name = true;  // at the start or just after a separator
  auto flush = [&] {
    if (tok.empty()) return;
    if (tok != "id") {
      auto g = generator_from_name(tok);
      if (!g) throw ModeError("unknown modality '" + tok + "'");
      m.word.push_back(*g);
    }
    tok.clear();
    need_name = false;
  };
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else if (c == '.' || c == '*') {
      flush();
      if (need_name) throw ModeError("missing modality name in '" + std::string(text) + "'");
      need_name = true;
    } else if (std::isalpha(static_cast<unsigned char>(c))) {
      tok += c;
    } else {
      throw ModeError(std::string("unexpected character '") + c + "' in modality");
    }
  }
  flush();
  if (need_name) throw ModeError("missing modality name in '" + std::string(text) + "'");
  return m;
}

Modality normalize_modality(const Modality& m) {
  std::vector<Generator> st;
  st.reserve(m.word.size());
  for (Generator g : m.word) {
    st.push_back(g);
    while (st.size() >= 2) {
      int r = rewrite_pair(st[st.size() - 2], st.back());
      if (r < 0) break;
      st.pop_back();
      st.pop_back();
      if (r != 4) st.push_back(Generator(r));
    }
  }
  return Modality(std::move(st));
}

Modality compose_modalities(const Modality& outer, const Modality& inner) {
  std::vector<Generator> w = outer.word;
  w.insert(w.end(), inner.word.begin(), inner.word.end());
  return normalize_modality(Modality(std::move(w)));
}

bool eq_modality(const Modality& a, const Modality& b) {
  return normalize_modality(a) == normalize_modality(b);
}

bool is_normal_modality(const Modality& m) {
  for (std::size_t i = 0; i + 1 < m.word.size(); ++i)
    if (rewrite_pair(m.word[i], m.word[i + 1]) >= 0) return false;
  return true;
}

const std::vector<ModalityRule>& modality_rules() {
  static const std::vector<ModalityRule> rules = [] {
    std::vector<ModalityRule> rs;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        int r = rewrite_pair(Generator(a), Generator(b));
        if (r < 0) continue;
        ModalityRule rule{{Generator(a), Generator(b)}, {}};
        if (r != 4) rule.rhs = {Generator(r)};
        rs.push_back(rule);
      }
    return rs;
  }();
  return rules;
}

std::vector<CriticalPair> critical_pairs() {
  std::vector<CriticalPair> out;
  const auto& rules = modality_rules();
  for (const auto& r1 : rules)
    for (const auto& r2 : rules) {
      if (r1.lhs.word[1] != r2.lhs.word[0]) continue;
      Generator a = r1.lhs.word[0], b = r1.lhs.word[1], c = r2.lhs.word[1];
      CriticalPair cp;
      cp.overlap = {a, b, c};
      std::vector<Generator> w1 = r1.rhs.word;
      w1.push_back(c);
      std::vector<Generator> w2{a};
      w2.insert(w2.end(), r2.rhs.word.begin(), r2.rhs.word.end());
      cp.via_first = normalize_modality(Modality(w1));
      cp.via_second = normalize_modality(Modality(w2));
      out.push_back(cp);
    }
  return out;
}

// ---------------------------------------------------------------------------
// Cell generators

std::string_view cell_gen_name(CellGen g) {
  switch (g) {
    case CellGen::Eps: return "eps";
    case CellGen::Zeta: return "zeta";
    case CellGen::Tau: return "tau";
    case CellGen::TauInv: return "tauinv";
    case CellGen::Pi0: return "pi0";
    case CellGen::Pi1: return "pi1";
  }
  return "?";
}

std::optional<CellGen> cell_gen_from_name(std::string_view s) {
  if (s == "eps" || s == "epsilon") return CellGen::Eps;
  if (s == "zeta") return CellGen::Zeta;
  if (s == "tau") return CellGen::Tau;
  if (s == "tauinv") return CellGen::TauInv;
  if (s == "pi0") return CellGen::Pi0;
  if (s == "pi1") return CellGen::Pi1;
  return std::nullopt;
}

Modality cell_gen_source(CellGen g) {
  switch (g) {
    case CellGen::Eps: return Modality::flat();
    case CellGen::Zeta: return Modality::id();
    case CellGen::Tau: return Modality::tw();
    case CellGen::TauInv: return {kT, kO};
    case CellGen::Pi0: return Modality::tw();
    case CellGen::Pi1: return Modality::tw();
  }
  return {};
}

Modality cell_gen_target(CellGen g) {
  switch (g) {
    case CellGen::Eps: return Modality::id();
    case CellGen::Zeta: return Modality::sharp();
    case CellGen::Tau: return {kT, kO};
    case CellGen::TauInv: return Modality::tw();
    case CellGen::Pi0: return Modality::op();
    case CellGen::Pi1: return Modality::id();
  }
  return {};
}

BoundaryError::BoundaryError(Modality e, Modality a)
    : ModeError("cell boundary mismatch: expected " + to_string(e) + ", got " + to_string(a)),
      expected(std::move(e)),
      actual(std::move(a)) {}

// ---------------------------------------------------------------------------
// Cell expressions

TwoCellPtr TwoCell::identity(Modality m) {
  auto c = std::make_shared<TwoCell>();
  c->kind = Kind::Id;
  c->mod = normalize_modality(m);
  return c;
}

TwoCellPtr TwoCell::generator(CellGen g) {
  auto c = std::make_shared<TwoCell>();
  c->kind = Kind::Gen;
  c->gen = g;
  return c;
}

TwoCellPtr TwoCell::whisker_left(Modality m, TwoCellPtr x) {
  auto c = std::make_shared<TwoCell>();
  c->kind = Kind::WhiskerL;
  c->mod = normalize_modality(m);
  c->first = std::move(x);
  return c;
}

TwoCellPtr TwoCell::whisker_right(TwoCellPtr x, Modality m) {
  auto c = std::make_shared<TwoCell>();
  c->kind = Kind::WhiskerR;
  c->mod = normalize_modality(m);
  c->first = std::move(x);
  return c;
}

TwoCellPtr TwoCell::vcomp(TwoCellPtr second, TwoCellPtr first) {
  auto c = std::make_shared<TwoCell>();
  c->kind = Kind::VComp;
  c->first = std::move(first);
  c->second = std::move(second);
  return c;
}

TwoCellPtr TwoCell::hcomp(const TwoCellPtr& outer, const TwoCellPtr& inner) {
  auto [mu0, mu1] = cell_boundary(*outer);
  auto [nu0, nu1] = cell_boundary(*inner);
  (void)mu0;
  (void)nu1;
  return vcomp(whisker_right(outer, nu0), whisker_left(mu1, inner));
}

Modality Atom::source() const {
  return compose_modalities(compose_modalities(left, cell_gen_source(gen)), right);
}

Modality Atom::target() const {
  return compose_modalities(compose_modalities(left, cell_gen_target(gen)), right);
}

std::strong_ordering operator<=>(const Atom& a, const Atom& b) {
  if (auto c = a.left <=> b.left; c != 0) return c;
  if (auto c = a.gen <=> b.gen; c != 0) return c;
  return a.right <=> b.right;
}

NormalCell NormalCell::identity(const Modality& m) {
  Modality n = normalize_modality(m);
  return NormalCell{n, n, {}};
}

std::strong_ordering operator<=>(const NormalCell& a, const NormalCell& b) {
  if (a.atoms.size() != b.atoms.size()) return a.atoms.size() <=> b.atoms.size();
  if (auto c = a.source <=> b.source; c != 0) return c;
  if (auto c = a.target <=> b.target; c != 0) return c;
  for (std::size_t i = 0; i < a.atoms.size(); ++i)
    if (auto c = a.atoms[i] <=> b.atoms[i]; c != 0) return c;
  return std::strong_ordering::equal;
}

namespace {

struct Flat {
  Modality source, target;
  std::vector<Atom> atoms;
};

Flat flatten(const TwoCell& c) {
  switch (c.kind) {
    case TwoCell::Kind::Id: {
      Modality m = normalize_modality(c.mod);
      return {m, m, {}};
    }
    case TwoCell::Kind::Gen:
      return {cell_gen_source(c.gen), cell_gen_target(c.gen), {Atom{{}, c.gen, {}}}};
    case TwoCell::Kind::WhiskerL: {
      Flat f = flatten(*c.first);
      f.source = compose_modalities(c.mod, f.source);
      f.target = compose_modalities(c.mod, f.target);
      for (auto& a : f.atoms) a.left = compose_modalities(c.mod, a.left);
      return f;
    }
    case TwoCell::Kind::WhiskerR: {
      Flat f = flatten(*c.first);
      f.source = compose_modalities(f.source, c.mod);
      f.target = compose_modalities(f.target, c.mod);
      for (auto& a : f.atoms) a.right = compose_modalities(a.right, c.mod);
      return f;
    }
    case TwoCell::Kind::VComp: {
      Flat f1 = flatten(*c.first);
      Flat f2 = flatten(*c.second);
      if (f1.target != f2.source) throw BoundaryError(f2.source, f1.target);
      f1.atoms.insert(f1.atoms.end(), f2.atoms.begin(), f2.atoms.end());
      f1.target = f2.target;
      return f1;
    }
  }
  throw ModeError("bad cell");
}

bool ends_with(const Modality& m, Generator g) { return !m.word.empty() && m.word.back() == g; }
bool starts_with(const Modality& m, Generator g) { return !m.word.empty() && m.word.front() == g; }

bool is_identity_atom(const Atom& a) {
  switch (a.gen) {
    case CellGen::Zeta:
      return ends_with(a.left, kS) || ends_with(a.left, kF) || starts_with(a.right, kS);
    case CellGen::Eps:
      return ends_with(a.left, kF) || ends_with(a.left, kS) || starts_with(a.right, kF);
    case CellGen::Pi1:
      // pi1 * flat = id follows from pi1 . tw * eps = eps
      return starts_with(a.right, kF);
    default:
      return false;
  }
  return false;
}

// pi0 * flat = eps * op * flat, again from pi0 . tw * eps = eps * op.
Atom rewrite_atom(Atom a) {
  if (a.gen == CellGen::Pi0 && starts_with(a.right, kF))
    return Atom{a.left, CellGen::Eps, compose_modalities(Modality::op(), a.right)};
  return a;
}

void strip_identities(std::vector<Atom>& atoms) {
  for (auto& a : atoms) a = rewrite_atom(std::move(a));
  atoms.erase(std::remove_if(atoms.begin(), atoms.end(), is_identity_atom), atoms.end());
}

Modality op_then(const Modality& r) { return compose_modalities(Modality::op(), r); }

// Rewrites for `a2 o a1`; returns the replacement (possibly empty) or nullopt.
std::optional<std::vector<Atom>> reduce_pair(const Atom& a1, const Atom& a2) {
  using G = CellGen;
  if (a1.left == a2.left) {
    const Modality& l = a1.left;
    if (a1.gen == G::Tau && a2.gen == G::TauInv && a1.right == a2.right)
      return std::vector<Atom>{};
    if (a1.gen == G::TauInv && a2.gen == G::Tau && a1.right == a2.right)
      return std::vector<Atom>{};
    if (a1.gen == G::Tau && a2.right == op_then(a1.right)) {
      if (a2.gen == G::Pi0) return std::vector<Atom>{Atom{l, G::Pi1, a1.right}};
      if (a2.gen == G::Pi1) return std::vector<Atom>{Atom{l, G::Pi0, a1.right}};
    }
    if (a1.gen == G::TauInv && a1.right == a2.right) {
      if (a2.gen == G::Pi1) return std::vector<Atom>{Atom{l, G::Pi0, op_then(a1.right)}};
      if (a2.gen == G::Pi0) return std::vector<Atom>{Atom{l, G::Pi1, op_then(a1.right)}};
    }
    if (a1.gen == G::Eps && a2.gen == G::Zeta && a1.right == a2.right)
      return std::vector<Atom>{
          Atom{l, G::Eps, compose_modalities(Modality::sharp(), a1.right)}};
  }
  if (a1.gen == G::Eps && a1.right == a2.right &&
      a1.left == compose_modalities(a2.left, Modality::tw())) {
    if (a2.gen == G::Pi0) return std::vector<Atom>{Atom{a2.left, G::Eps, op_then(a1.right)}};
    if (a2.gen == G::Pi1) return std::vector<Atom>{Atom{a2.left, G::Eps, a1.right}};
  }
  return std::nullopt;
}

std::vector<Modality> prefixes(const Modality& m) {
  std::vector<Modality> out;
  for (std::size_t k = 0; k <= m.size(); ++k)
    out.push_back(Modality(std::vector<Generator>(m.word.begin(), m.word.begin() + k)));
  return out;
}

std::vector<Modality> suffixes(const Modality& m) {
  std::vector<Modality> out;
  for (std::size_t k = 0; k <= m.size(); ++k)
    out.push_back(Modality(std::vector<Generator>(m.word.begin() + k, m.word.end())));
  return out;
}

Modality compose3(const Modality& a, const Modality& b, const Modality& c) {
  return compose_modalities(compose_modalities(a, b), c);
}

// Interchange: `a2 o a1` where the two generators sit side by side, separated
// by a middle whisker `mu`.
std::vector<std::pair<Atom, Atom>> swaps(const Atom& a1, const Atom& a2) {
  std::vector<std::pair<Atom, Atom>> out;
  Modality sg = cell_gen_source(a1.gen), tg = cell_gen_target(a1.gen);
  Modality sh = cell_gen_source(a2.gen), th = cell_gen_target(a2.gen);
  auto add = [&](Atom b1, Atom b2) {
    for (const auto& p : out)
      if (p.first == b1 && p.second == b2) return;
    out.emplace_back(std::move(b1), std::move(b2));
  };
  // a2 sits to the right of a1: a1.right = mu.sh.a2.right, a2.left = a1.left.tg.mu
  {
    std::vector<Modality> mus = prefixes(a1.right);
    for (auto& m : suffixes(a2.left)) mus.push_back(m);
    for (const auto& mu : mus) {
      if (a1.right != compose3(mu, sh, a2.right)) continue;
      if (a2.left != compose3(a1.left, tg, mu)) continue;
      add(Atom{compose3(a1.left, sg, mu), a2.gen, a2.right},
          Atom{a1.left, a1.gen, compose3(mu, th, a2.right)});
    }
  }
  // a2 sits to the left of a1: a1.left = a2.left.sh.mu, a2.right = mu.tg.a1.right
  {
    std::vector<Modality> mus = suffixes(a1.left);
    for (auto& m : prefixes(a2.right)) mus.push_back(m);
    for (const auto& mu : mus) {
      if (a1.left != compose3(a2.left, sh, mu)) continue;
      if (a2.right != compose3(mu, tg, a1.right)) continue;
      add(Atom{a2.left, a2.gen, compose3(mu, sg, a1.right)},
          Atom{compose3(a2.left, th, mu), a1.gen, a1.right});
    }
  }
  return out;
}

bool atoms_less(const std::vector<Atom>& a, const std::vector<Atom>& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

constexpr std::size_t kClosureCap = 20000;

std::vector<Atom> closure_min(std::vector<Atom> start) {
  strip_identities(start);
  if (start.size() <= 1) return start;
  std::set<std::vector<Atom>> seen{start};
  std::deque<std::vector<Atom>> queue{start};
  std::vector<Atom> best = start;
  auto visit = [&](std::vector<Atom> s) {
    strip_identities(s);
    if (seen.size() >= kClosureCap || !seen.insert(s).second) return;
    if (atoms_less(s, best)) best = s;
    queue.push_back(std::move(s));
  };
  while (!queue.empty()) {
    std::vector<Atom> s = std::move(queue.front());
    queue.pop_front();
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      if (auto r = reduce_pair(s[i], s[i + 1])) {
        std::vector<Atom> n(s.begin(), s.begin() + i);
        n.insert(n.end(), r->begin(), r->end());
        n.insert(n.end(), s.begin() + i + 2, s.end());
        visit(std::move(n));
      }
      for (auto& [b1, b2] : swaps(s[i], s[i + 1])) {
        std::vector<Atom> n = s;
        n[i] = b1;
        n[i + 1] = b2;
        visit(std::move(n));
      }
    }
  }
  return best;
}

struct MemoKey {
  Modality source;
  std::vector<Atom> atoms;
  bool operator<(const MemoKey& o) const {
    if (auto c = source <=> o.source; c != 0) return c < 0;
    return atoms_less(atoms, o.atoms);
  }
};

std::mutex g_memo_mutex;
std::map<MemoKey, std::vector<Atom>> g_memo;

}  // namespace

std::pair<Modality, Modality> cell_boundary(const TwoCell& c) {
  Flat f = flatten(c);
  return {f.source, f.target};
}

NormalCell normalize_atoms(const Modality& source, const Modality& target,
                           std::vector<Atom> atoms) {
  for (auto& a : atoms) {
    a.left = normalize_modality(a.left);
    a.right = normalize_modality(a.right);
  }
  MemoKey key{normalize_modality(source), atoms};
  {
    std::lock_guard<std::mutex> lk(g_memo_mutex);
    auto it = g_memo.find(key);
    if (it != g_memo.end()) return NormalCell{key.source, normalize_modality(target), it->second};
  }
  std::vector<Atom> nf = closure_min(atoms);
  {
    std::lock_guard<std::mutex> lk(g_memo_mutex);
    if (g_memo.size() > 200000) g_memo.clear();
    g_memo.emplace(key, nf);
  }
  return NormalCell{key.source, normalize_modality(target), std::move(nf)};
}

NormalCell normalize_cell(const TwoCell& c) {
  Flat f = flatten(c);
  return normalize_atoms(f.source, f.target, std::move(f.atoms));
}

bool eq_cell(const NormalCell& a, const NormalCell& b) {
  if (a.source != b.source) throw BoundaryError(a.source, b.source);
  if (a.target != b.target) throw BoundaryError(a.target, b.target);
  NormalCell na = normalize_atoms(a.source, a.target, a.atoms);
  NormalCell nb = normalize_atoms(b.source, b.target, b.atoms);
  return na.atoms == nb.atoms;
}

bool eq_cell(const TwoCell& a, const TwoCell& b) {
  return eq_cell(normalize_cell(a), normalize_cell(b));
}

NormalCell vcomp(const NormalCell& second, const NormalCell& first) {
  if (first.target != second.source) throw BoundaryError(second.source, first.target);
  std::vector<Atom> atoms = first.atoms;
  atoms.insert(atoms.end(), second.atoms.begin(), second.atoms.end());
  return normalize_atoms(first.source, second.target, std::move(atoms));
}

NormalCell whisker_left(const Modality& m, const NormalCell& c) {
  std::vector<Atom> atoms = c.atoms;
  for (auto& a : atoms) a.left = compose_modalities(m, a.left);
  return normalize_atoms(compose_modalities(m, c.source), compose_modalities(m, c.target),
                         std::move(atoms));
}

NormalCell whisker_right(const NormalCell& c, const Modality& m) {
  std::vector<Atom> atoms = c.atoms;
  for (auto& a : atoms) a.right = compose_modalities(a.right, m);
  return normalize_atoms(compose_modalities(c.source, m), compose_modalities(c.target, m),
                         std::move(atoms));
}

TwoCellPtr to_two_cell(const NormalCell& c) {
  TwoCellPtr acc = TwoCell::identity(c.source);
  bool first = true;
  for (const auto& a : c.atoms) {
    TwoCellPtr g = TwoCell::generator(a.gen);
    if (!a.left.is_id()) g = TwoCell::whisker_left(a.left, g);
    if (!a.right.is_id()) g = TwoCell::whisker_right(g, a.right);
    acc = first ? g : TwoCell::vcomp(g, acc);
    first = false;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Search

namespace {

struct Edge {
  Atom atom;
  Modality target;
};

using EdgeMap = std::map<Modality, std::vector<Edge>>;

std::vector<Modality> normal_words(std::size_t max_len) {
  std::vector<Modality> out{Modality::id()};
  std::vector<Modality> layer{Modality::id()};
  for (std::size_t n = 1; n <= max_len; ++n) {
    std::vector<Modality> next;
    for (const auto& w : layer)
      for (int g = 0; g < 4; ++g) {
        Modality x = w;
        x.word.push_back(Generator(g));
        if (is_normal_modality(x)) next.push_back(x);
      }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

// Every non-identity atom whose whiskers have combined length at most `w`,
// grouped by source.
const EdgeMap& edges_for_bound(std::size_t w) {
  static std::mutex mu;
  static std::map<std::size_t, EdgeMap> cache;
  std::lock_guard<std::mutex> lk(mu);
  auto it = cache.find(w);
  if (it != cache.end()) return it->second;
  EdgeMap m;
  std::vector<Modality> words = normal_words(w);
  for (const auto& l : words)
    for (const auto& r : words) {
      if (l.size() + r.size() > w) continue;
      for (int g = 0; g < 6; ++g) {
        Atom a{l, CellGen(g), r};
        if (is_identity_atom(a)) continue;
        m[a.source()].push_back(Edge{a, a.target()});
      }
    }
  return cache.emplace(w, std::move(m)).first->second;
}

}  // namespace

std::vector<NormalCell> search_cells(const Modality& source_in, const Modality& target_in,
                                     int depth) {
  std::vector<NormalCell> results;
  if (depth < 0) return results;
  Modality source = normalize_modality(source_in);
  Modality target = normalize_modality(target_in);
  const EdgeMap& edges = edges_for_bound(std::max(source.size(), target.size()) + 1);
  static const std::vector<Edge> kNone;
  auto out_edges = [&](const Modality& m) -> const std::vector<Edge>& {
    auto it = edges.find(m);
    return it == edges.end() ? kNone : it->second;
  };

  // Modalities reachable from the source in at most `depth` steps.
  std::set<Modality> reach{source};
  std::vector<Modality> layer{source};
  for (int k = 0; k < depth; ++k) {
    std::vector<Modality> next;
    for (const auto& m : layer)
      for (const auto& e : out_edges(m))
        if (reach.insert(e.target).second) next.push_back(e.target);
    layer = std::move(next);
  }
  // good[d]: reachable modalities from which the target is d steps away or fewer.
  std::vector<std::set<Modality>> good(depth + 1);
  if (reach.count(target)) good[0].insert(target);
  for (int d = 1; d <= depth; ++d) {
    good[d] = good[d - 1];
    for (const auto& m : reach) {
      if (good[d].count(m)) continue;
      for (const auto& e : out_edges(m))
        if (good[d - 1].count(e.target)) {
          good[d].insert(m);
          break;
        }
    }
  }
  if (!good[depth].count(source)) return results;

  std::set<NormalCell> seen;
  NormalCell start = NormalCell::identity(source);
  seen.insert(start);
  if (source == target) results.push_back(start);
  std::vector<NormalCell> frontier{start};
  for (int k = 0; k < depth && !frontier.empty(); ++k) {
    const auto& ok = good[depth - k - 1];
    std::vector<NormalCell> next;
    for (const auto& c : frontier)
      for (const auto& e : out_edges(c.target)) {
        if (!ok.count(e.target)) continue;
        std::vector<Atom> atoms = c.atoms;
        atoms.push_back(e.atom);
        NormalCell n = normalize_atoms(source, e.target, std::move(atoms));
        if (!seen.insert(n).second) continue;
        if (n.target == target) results.push_back(n);
        next.push_back(std::move(n));
      }
    frontier = std::move(next);
  }
  std::sort(results.begin(), results.end());
  return results;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

std::string star_letters(const Modality& m) {
  std::string out;
  for (std::size_t i = 0; i < m.word.size(); ++i) {
    if (i) out += " * ";
    out += generator_name(m.word[i]);
  }
  return out;
}

std::string atom_expr(const Atom& a) {
  std::string out;
  if (!a.left.is_id()) out += star_letters(a.left) + " * ";
  out += cell_gen_name(a.gen);
  if (!a.right.is_id()) out += " * " + star_letters(a.right);
  return out;
}

}  // namespace

std::string to_chain_string(const NormalCell& c) {
  if (c.is_identity()) return "id(" + to_string(c.source) + ")";
  std::string out;
  for (std::size_t i = 0; i < c.atoms.size(); ++i) {
    if (i) out += " ; ";
    const Atom& a = c.atoms[i];
    out += "[" + to_string(a.left) + " * " + std::string(cell_gen_name(a.gen)) + " * " +
           to_string(a.right) + "]";
  }
  return out;
}

std::string to_expr_string(const NormalCell& c) {
  if (c.is_identity()) return c.source.is_id() ? "id" : star_letters(c.source);
  std::string out;
  for (std::size_t i = c.atoms.size(); i-- > 0;) {
    out += atom_expr(c.atoms[i]);
    if (i) out += " . ";
  }
  return out;
}

std::string to_expr_string(const TwoCell& c) {
  switch (c.kind) {
    case TwoCell::Kind::Id:
      if (c.mod.is_id()) return "id";
      if (c.mod.size() == 1) return star_letters(c.mod);
      return "(" + star_letters(c.mod) + ")";
    case TwoCell::Kind::Gen:
      return std::string(cell_gen_name(c.gen));
    case TwoCell::Kind::WhiskerL:
      if (c.mod.is_id()) return to_expr_string(*c.first);
      return "(" + star_letters(c.mod) + " * " + to_expr_string(*c.first) + ")";
    case TwoCell::Kind::WhiskerR:
      if (c.mod.is_id()) return to_expr_string(*c.first);
      return "(" + to_expr_string(*c.first) + " * " + star_letters(c.mod) + ")";
    case TwoCell::Kind::VComp:
      if (c.second->kind == TwoCell::Kind::Id) return to_expr_string(*c.first);
      if (c.first->kind == TwoCell::Kind::Id) return to_expr_string(*c.second);
      return "(" + to_expr_string(*c.second) + " . " + to_expr_string(*c.first) + ")";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct CellOrMod {
  bool is_mod = true;
  Modality mod;
  TwoCellPtr cell;

  TwoCellPtr as_cell() const { return is_mod ? TwoCell::identity(mod) : cell; }
};

class CellParser {
 public:
  explicit CellParser(std::string_view text) : text_(text) { tokenize(); }

  CellOrMod parse() {
    CellOrMod r = chain();
    if (pos_ != toks_.size()) fail("unexpected '" + toks_[pos_] + "'");
    return r;
  }

 private:
  std::string_view text_;
  std::vector<std::string> toks_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) {
    throw ModeError("cell syntax: " + msg + " in '" + std::string(text_) + "'");
  }

  void tokenize() {
    std::size_t i = 0;
    while (i < text_.size()) {
      char c = text_[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
      } else if (c == '*' || c == '.' || c == '(' || c == ')') {
        toks_.emplace_back(1, c);
        ++i;
      } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t j = i;
        while (j < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[j])) || text_[j] == '_'))
          ++j;
        toks_.emplace_back(text_.substr(i, j - i));
        i = j;
      } else {
        fail(std::string("unexpected character '") + c + "'");
      }
    }
  }

  bool accept(const char* t) {
    if (pos_ < toks_.size() && toks_[pos_] == t) {
      ++pos_;
      return true;
    }
    return false;
  }

  CellOrMod chain() {
    std::vector<CellOrMod> parts{hterm()};
    while (accept(".")) parts.push_back(hterm());
    bool all_mod = std::all_of(parts.begin(), parts.end(), [](auto& p) { return p.is_mod; });
    if (all_mod) {
      CellOrMod r;
      for (auto& p : parts) r.mod = compose_modalities(r.mod, p.mod);
      return r;
    }
    TwoCellPtr acc = parts.back().as_cell();
    for (std::size_t i = parts.size() - 1; i-- > 0;)
      acc = TwoCell::vcomp(parts[i].as_cell(), acc);
    return CellOrMod{false, {}, acc};
  }

  static CellOrMod star(const CellOrMod& a, const CellOrMod& b) {
    if (a.is_mod && b.is_mod) return CellOrMod{true, compose_modalities(a.mod, b.mod), nullptr};
    if (a.is_mod) return CellOrMod{false, {}, TwoCell::whisker_left(a.mod, b.cell)};
    if (b.is_mod) return CellOrMod{false, {}, TwoCell::whisker_right(a.cell, b.mod)};
    return CellOrMod{false, {}, TwoCell::hcomp(a.cell, b.cell)};
  }

  CellOrMod hterm() {
    CellOrMod acc = factor();
    while (accept("*")) acc = star(acc, factor());
    return acc;
  }

  static std::optional<Modality> mod_name(std::string_view s) {
    if (s == "id") return Modality::id();
    if (auto g = generator_from_name(s)) return Modality{*g};
    return std::nullopt;
  }

  CellOrMod name(const std::string& s) {
    if (auto m = mod_name(s)) return CellOrMod{true, *m, nullptr};
    if (auto g = cell_gen_from_name(s)) return CellOrMod{false, {}, TwoCell::generator(*g)};
    for (std::size_t k = 1; k < s.size(); ++k) {
      std::string_view a = std::string_view(s).substr(0, k), b = std::string_view(s).substr(k);
      auto ga = cell_gen_from_name(a);
      auto mb = mod_name(b);
      if (ga && mb) return CellOrMod{false, {}, TwoCell::whisker_right(TwoCell::generator(*ga), *mb)};
      auto ma = mod_name(a);
      auto gb = cell_gen_from_name(b);
      if (ma && gb) return CellOrMod{false, {}, TwoCell::whisker_left(*ma, TwoCell::generator(*gb))};
    }
    fail("unknown name '" + s + "'");
  }

  CellOrMod factor() {
    if (pos_ >= toks_.size()) fail("unexpected end");
    if (accept("(")) {
      CellOrMod r = chain();
      if (!accept(")")) fail("expected ')'");
      return r;
    }
    const std::string& t = toks_[pos_];
    if (t == "*" || t == "." || t == ")") fail("unexpected '" + t + "'");
    ++pos_;
    return name(t);
  }
};

}  // namespace

TwoCellPtr parse_cell(std::string_view text) {
  CellParser p(text);
  TwoCellPtr c = p.parse().as_cell();
  cell_boundary(*c);
  return c;
}
}  // namespace stt
