#pragma once

// Helpers shared by the unit tests and the acceptance binary: an independent
// modality oracle, session setup over the repository's prelude and corpus,
// and term walkers.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "stt/checker.hpp"
#include "stt/corpus.hpp"
#include "stt/mode_theory.hpp"
#include "stt/syntax.hpp"

namespace stt::testing {

inline std::string source_dir() { return STT_SOURCE_DIR; }
inline std::string prelude_path() { return source_dir() + "/prelude"; }
inline std::string corpus_path() { return source_dir() + "/corpus"; }

// ---------------------------------------------------------------------------
// Modality oracle. Words are strings over f, s, o, t. Every word up to
// `max_len` is joined with each one-step rewrite of itself (the relations used
// in both directions, as long as both ends fit); the representative of a
// class is its shortlex-least member.

inline const std::vector<std::pair<std::string, std::string>>& oracle_relations() {
  static const std::vector<std::pair<std::string, std::string>> r = {
      {"ff", "f"}, {"fs", "f"}, {"fo", "f"}, {"tf", "f"},
      {"ss", "s"}, {"sf", "s"}, {"so", "s"}, {"oo", ""}};
  return r;
}

inline bool shortlex_less(const std::string& a, const std::string& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  static const std::string order = "fsot";
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return order.find(a[i]) < order.find(b[i]);
  return false;
}

class ModalityOracle {
 public:
  explicit ModalityOracle(int max_len) {
    std::vector<std::string> level = {""};
    words_.push_back("");
    for (int n = 1; n <= max_len; ++n) {
      std::vector<std::string> next;
      for (const auto& w : level)
        for (char c : std::string("fsot")) next.push_back(w + c);
      words_.insert(words_.end(), next.begin(), next.end());
      level = std::move(next);
    }
    for (std::size_t i = 0; i < words_.size(); ++i) index_[words_[i]] = i;
    parent_.resize(words_.size());
    std::iota(parent_.begin(), parent_.end(), 0);
    for (std::size_t i = 0; i < words_.size(); ++i) {
      const std::string& w = words_[i];
      for (const auto& [lhs, rhs] : oracle_relations()) {
        for (std::size_t p = w.find(lhs); p != std::string::npos; p = w.find(lhs, p + 1)) {
          std::string v = w.substr(0, p) + rhs + w.substr(p + lhs.size());
          join(i, index_.at(v));
        }
      }
    }
    best_.assign(words_.size(), SIZE_MAX);
    for (std::size_t i = 0; i < words_.size(); ++i) {
      std::size_t r = find(i);
      if (best_[r] == SIZE_MAX || shortlex_less(words_[i], words_[best_[r]])) best_[r] = i;
    }
  }

  const std::string& canonical(const std::string& w) { return words_[best_[find(index_.at(w))]]; }
  const std::vector<std::string>& words() const { return words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> best_;

  std::size_t find(std::size_t i) {
    while (parent_[i] != i) i = parent_[i] = parent_[parent_[i]];
    return i;
  }
  void join(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }
};

inline std::string to_letters(const Modality& m) {
  std::string s;
  for (Generator g : m.word) s += "fsot"[static_cast<int>(g)];
  return s;
}

inline Modality from_letters(const std::string& w) {
  Modality m;
  for (char c : w) m.word.push_back(static_cast<Generator>(std::string("fsot").find(c)));
  return m;
}

// ---------------------------------------------------------------------------
// Sessions

inline Session prelude_session() {
  Session s;
  load_prelude(s, prelude_path());
  return s;
}

inline std::vector<std::string> corpus_files() { return stt_files(corpus_path()); }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes `text` to a fresh file under the temp directory and returns its path.
inline std::string temp_file(const std::string& name, const std::string& text) {
  auto dir = std::filesystem::temp_directory_path() / "stt_tests";
  std::filesystem::create_directories(dir);
  auto p = dir / name;
  std::ofstream(p) << text;
  return p.string();
}

/// Checks module text on top of the prelude session.
inline ModuleReport check_text(Session& s, const std::string& text,
                               const std::string& name = "inline.stt") {
  return load_source(s, text, name, corpus_path());
}

// ---------------------------------------------------------------------------
// Terms

/// Replaces written cell expressions by their normal forms so alpha_eq sees them.
inline TermPtr settle_cells(const TermPtr& t) {
  if (!t) return t;
  std::vector<TermPtr> kids;
  for (const auto& k : t->kids) kids.push_back(settle_cells(k));
  TermPtr r = with_kids(t, std::move(kids));
  if (r->tag == Tag::Var && r->cell_expr && !r->cell) {
    Term c = *r;
    c.cell = normalize_cell(**r->cell_expr);
    c.cell_expr.reset();
    r = mk(std::move(c));
  }
  return r;
}

/// Visits subterms of an elaborated declaration together with their contexts.
/// Types are walked through their binders; definition bodies through leading
/// lambdas matched against the Pi type, then along inferable spines.
class SubtermWalker {
 public:
  using Visit = std::function<void(const Context&, const TermPtr&)>;

  SubtermWalker(const Conversion& cv, Visit visit) : cv_(cv), visit_(std::move(visit)) {}

  void walk_decl(const Decl& d) {
    walk_type(nullptr, d.type);
    if (!d.body) return;
    Context ctx = nullptr;
    TermPtr ty = d.type;
    TermPtr body = d.body;
    while (body->tag == Tag::Lam) {
      TermPtr w = cv_.whnf(ctx, ty);
      if (w->tag != Tag::Pi) return;
      ctx = extend_var(ctx, body->binders.at(0), w->mu, w->kids[0]);
      ty = w->kids[1];
      body = body->kids[0];
    }
    walk_term(ctx, body);
  }

  void walk_type(const Context& ctx, const TermPtr& t) {
    if (!t) return;
    visit_(ctx, t);
    switch (t->tag) {
      case Tag::Pi:
        walk_type(extend_lock(ctx, t->mu), t->kids[0]);
        walk_type(extend_var(ctx, t->binders.at(0), t->mu, t->kids[0]), t->kids[1]);
        break;
      case Tag::Sigma:
        walk_type(ctx, t->kids[0]);
        walk_type(extend_var(ctx, t->binders.at(0), Modality::id(), t->kids[0]), t->kids[1]);
        break;
      case Tag::Mod:
        walk_type(extend_lock(ctx, t->mu), t->kids[0]);
        break;
      case Tag::Id:
        walk_type(ctx, t->kids[0]);
        walk_term(ctx, t->kids[1]);
        walk_term(ctx, t->kids[2]);
        break;
      case Tag::App:
      case Tag::Fst:
      case Tag::Snd:
        walk_spine(ctx, t);
        break;
      default:
        break;
    }
  }

  void walk_term(const Context& ctx, const TermPtr& t) {
    if (!t) return;
    switch (t->tag) {
      case Tag::Pi:
      case Tag::Sigma:
      case Tag::Mod:
      case Tag::Id:
        walk_type(ctx, t);
        break;
      case Tag::App:
      case Tag::Fst:
      case Tag::Snd:
        visit_(ctx, t);
        walk_spine(ctx, t);
        break;
      case Tag::Var:
      case Tag::Global:
      case Tag::Ann:
        visit_(ctx, t);
        break;
      default:
        break;
    }
  }

 private:
  const Conversion& cv_;
  Visit visit_;

  void walk_spine(const Context& ctx, const TermPtr& t) {
    if (t->tag == Tag::App) {
      walk_term(ctx, t->kids[0]);
      walk_term(extend_lock(ctx, t->mu), t->kids[1]);
    } else if (t->tag == Tag::Fst || t->tag == Tag::Snd) {
      walk_term(ctx, t->kids[0]);
    }
  }
};

// ---------------------------------------------------------------------------
// Timing

class Stopwatch {
 public:
  Stopwatch() : t0_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_;
};

}  // namespace stt::testing
