#pragma once

// Bidirectional type checking and elaboration. Introductions are checked,
// eliminations inferred. Elaboration fills variable cell holes, records the
// modality of every application and the motive of every let-mod.

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "stt/conversion.hpp"
#include "stt/mode_theory.hpp"
#include "stt/syntax.hpp"

namespace stt {

struct Session {
  GlobalTable globals;
  std::vector<std::string> order;  // declaration names in load order
  int depth = 4;                   // search depth for cell holes
  std::set<std::string> loaded;    // canonical module paths
  std::size_t searches = 0;        // calls to search_cells made for holes
  std::map<std::pair<Modality, Modality>, std::vector<NormalCell>> hole_cache;
};

struct Access {
  TermPtr type;
  NormalCell cell;
};

class Checker {
 public:
  explicit Checker(Session& s) : s_(s), cv_(s.globals) {}

  /// The variable rule: `var` is a Var node whose cell is given, written, or a hole.
  Access access_var(const Context& ctx, const TermPtr& var);
  /// Returns the elaborated term.
  TermPtr check(const Context& ctx, const TermPtr& t, const TermPtr& type);
  /// Returns (type, elaborated term).
  std::pair<TermPtr, TermPtr> infer(const Context& ctx, const TermPtr& t);
  /// Checks that `t` is a type; returns (elaborated term, universe level).
  std::pair<TermPtr, int> check_type(const Context& ctx, const TermPtr& t);
  /// Universe level of an already elaborated type.
  int level_of(const Context& ctx, const TermPtr& type) const;
  /// Checks a resolved declaration and adds it to the session. Returns the
  /// elaborated declaration. Errors are tagged with the declaration name.
  Decl check_decl(const Decl& d, const std::string& module = {});

  const Conversion& conversion() const { return cv_; }

 private:
  Session& s_;
  Conversion cv_;

  std::pair<TermPtr, TermPtr> infer_letmod(const Context& ctx, const TermPtr& t,
                                           const TermPtr* expected);
  [[noreturn]] void mismatch(const Context& ctx, const TermPtr& at, const std::string& what,
                             const TermPtr& expected, const TermPtr& actual);
  std::string show_type(const Context& ctx, const TermPtr& type) const;
  std::vector<NormalCell> candidates(const Modality& src, const Modality& tgt, int depth);
};

struct ModuleReport {
  std::string path;
  std::vector<Decl> decls;  // elaborated, in order
  std::vector<Diagnostic> diagnostics;
  int conjectures = 0;
  bool ok() const { return diagnostics.empty(); }
};

struct LoadOptions {
  bool keep_going = false;
};

/// Loads a module and its imports into the session. Imports are resolved
/// relative to the importing file. A module already loaded is skipped.
ModuleReport load_module(Session& s, const std::string& path, const LoadOptions& opts = {});
/// Checks module text that is not backed by a file; imports resolve against `dir`.
ModuleReport load_source(Session& s, const std::string& text, const std::string& name,
                         const std::string& dir, const LoadOptions& opts = {});

}  // namespace stt
