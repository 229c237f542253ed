#include <filesystem>
#include <fstream>
#include <sstream>

#include "stt/checker.hpp"

namespace stt {

namespace fs = std::filesystem;

namespace {

struct Loader {
  Session& s;
  LoadOptions opts;
  std::vector<std::string> active;  // import stack of canonical paths

  ModuleReport file(const std::string& path, const Span& from, const std::string& from_file) {
    ModuleReport rep;
    rep.path = path;
    std::error_code ec;
    fs::path canon = fs::weakly_canonical(fs::path(path), ec);
    std::string key = ec ? path : canon.string();
    if (std::find(active.begin(), active.end(), key) != active.end()) {
      Diagnostic d;
      d.file = from_file.empty() ? path : from_file;
      d.span = from;
      d.code = ErrorCode::Cycle;
      d.message = "import cycle through '" + path + "'";
      rep.diagnostics.push_back(d);
      return rep;
    }
    if (s.loaded.count(key)) return rep;
    std::ifstream in(key);
    if (!in) {
      Diagnostic d;
      d.file = from_file.empty() ? path : from_file;
      d.span = from;
      d.code = ErrorCode::Syntax;
      d.message = "cannot read '" + path + "'";
      rep.diagnostics.push_back(d);
      return rep;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    active.push_back(key);
    ModuleReport r = source(ss.str(), path, fs::path(key).parent_path().string());
    active.pop_back();
    if (r.ok()) s.loaded.insert(key);
    return r;
  }

  ModuleReport source(const std::string& text, const std::string& name, const std::string& dir) {
    ModuleReport rep;
    rep.path = name;
    auto fail = [&](Diagnostic d) {
      if (d.file.empty()) d.file = name;
      rep.diagnostics.push_back(std::move(d));
    };
    std::vector<Decl> decls;
    try {
      decls = parse_module(text);
    } catch (const SttError& e) {
      fail(e.diag);
      return rep;
    }
    auto is_global = [&](const std::string& n) { return s.globals.count(n) > 0; };
    Checker ck(s);
    for (Decl& d : decls) {
      if (d.kind == Decl::Kind::Import) {
        fs::path p = fs::path(dir) / d.path;
        ModuleReport sub = file(p.string(), d.span, name);
        for (auto& diag : sub.diagnostics) rep.diagnostics.push_back(diag);
        if (!sub.ok()) return rep;
        continue;
      }
      try {
        if (s.globals.count(d.name))
          raise(ErrorCode::Unbound, "duplicate definition of '" + d.name + "'", d.span);
        resolve_decl(d, is_global);
        rep.decls.push_back(ck.check_decl(d, name));
        if (d.conjecture) ++rep.conjectures;
      } catch (const SttError& e) {
        Diagnostic diag = e.diag;
        if (diag.span.line == 0) diag.span = d.span;
        fail(diag);
        if (!opts.keep_going) return rep;
      }
    }
    return rep;
  }
};

}  // namespace

ModuleReport load_module(Session& s, const std::string& path, const LoadOptions& opts) {
  Loader l{s, opts, {}};
  return l.file(path, {}, {});
}

ModuleReport load_source(Session& s, const std::string& text, const std::string& name,
                         const std::string& dir, const LoadOptions& opts) {
  Loader l{s, opts, {}};
  return l.source(text, name, dir);
}

}  // namespace stt
