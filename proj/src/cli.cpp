#include "stt/cli.hpp"

#include <algorithm>

#include "CLI11.hpp"
#include "json.hpp"
#include "stt/checker.hpp"
#include "stt/corpus.hpp"

namespace stt {

namespace {

struct Config {
  bool no_prelude = false;
  bool json = false;
  bool keep_going = false;
  bool trace = false;
  bool all = false;
  int jobs = 1;
  int depth = 4;
  std::vector<std::string> files;
  std::string name;
  std::string word;
  std::string c1, c2;
  std::string expect;
  std::string file;
};

void report(std::ostream& err, const Diagnostic& d, bool json) {
  err << (json ? d.to_json() : d.to_text()) << "\n";
}

int fail_with(std::ostream& err, ErrorCode code, const std::string& msg, bool json) {
  Diagnostic d;
  d.code = code;
  d.message = msg;
  report(err, d, json);
  return exit_code_for(code);
}

// Builds a session with the prelude loaded, or returns an exit code.
std::optional<int> base_session(Session& s, const Config& c, std::ostream& err) {
  s.depth = c.depth;
  if (c.no_prelude) return std::nullopt;
  try {
    load_prelude(s, prelude_dir());
  } catch (const SttError& e) {
    report(err, e.diag, c.json);
    return exit_code_for(e.diag.code);
  }
  return std::nullopt;
}

int cmd_check(const Config& c, std::ostream& out, std::ostream& err) {
  Session s;
  if (auto rc = base_session(s, c, err)) return *rc;
  CorpusOptions opts;
  opts.keep_going = c.keep_going;
  opts.jobs = c.jobs;
  if (!c.expect.empty()) {
    try {
      opts.expect_reject = read_mutation_manifest(c.expect);
    } catch (const SttError& e) {
      report(err, e.diag, c.json);
      return exit_code_for(e.diag.code);
    }
  }
  CorpusReport rep = run_corpus(s, c.files, opts);
  int rc = 0;
  for (const auto& f : rep.files) {
    for (const auto& d : f.diagnostics) {
      if (!f.expected) report(err, d, c.json);
      if (!f.expected) rc = std::max(rc, exit_code_for(d.code));
    }
    if (f.expected && !f.ok()) rc = std::max(rc, 1);
    std::string status = f.expected ? std::string(status_name(f.status))
                                    : (f.diagnostics.empty() ? "ok" : "error");
    if (c.json) {
      nlohmann::json j;
      j["file"] = f.file;
      j["status"] = status;
      j["decls"] = f.decls;
      j["conjectures"] = f.conjectures;
      if (f.expected) {
        j["expected"] = std::string(error_code_name(*f.expected));
        if (!f.diagnostics.empty()) j["actual"] = std::string(error_code_name(f.diagnostics.front().code));
      }
      out << j.dump() << "\n";
    } else if (f.expected) {
      out << f.file << ": " << status << " (expected " << error_code_name(*f.expected);
      if (!f.diagnostics.empty()) out << ", got " << error_code_name(f.diagnostics.front().code);
      out << ")\n";
    } else {
      out << f.file << ": " << (f.diagnostics.empty() ? "ok" : "FAILED") << " (" << f.decls
          << (f.decls == 1 ? " declaration" : " declarations");
      if (f.conjectures) out << ", " << f.conjectures << (f.conjectures == 1 ? " conjecture" : " conjectures");
      out << ")\n";
    }
  }
  return rc;
}

// Loads one file on top of the prelude; returns the report or an exit code.
std::optional<int> load_one(Session& s, const Config& c, const std::string& file,
                            ModuleReport& rep, std::ostream& err) {
  if (auto rc = base_session(s, c, err)) return rc;
  rep = load_module(s, file);
  if (!rep.ok()) {
    for (const auto& d : rep.diagnostics) report(err, d, c.json);
    return exit_code_for(rep.diagnostics.front().code);
  }
  return std::nullopt;
}

int cmd_nf(const Config& c, std::ostream& out, std::ostream& err) {
  Session s;
  ModuleReport rep;
  if (auto rc = load_one(s, c, c.file, rep, err)) return *rc;
  auto it = s.globals.find(c.name);
  if (it == s.globals.end())
    return fail_with(err, ErrorCode::Unbound, "unbound name '" + c.name + "'", c.json);
  Conversion cv(s.globals);
  TermPtr nf = it->second.body ? cv.nf(nullptr, it->second.type, it->second.body)
                               : mk_global(c.name);
  out << print_term(nf) << "\n";
  return 0;
}

int cmd_dump(const Config& c, std::ostream& out, std::ostream& err) {
  Session s;
  ModuleReport rep;
  if (auto rc = load_one(s, c, c.file, rep, err)) return *rc;
  for (const auto& d : rep.decls) out << print_decl(d) << "\n";
  return 0;
}

int cmd_mod_nf(const Config& c, std::ostream& out, std::ostream& err) {
  try {
    out << to_string(normalize_modality(parse_modality(c.word))) << "\n";
    return 0;
  } catch (const ModeError& e) {
    return fail_with(err, ErrorCode::Syntax, e.what(), c.json);
  }
}

int cmd_cell_eq(const Config& c, std::ostream& out, std::ostream& err) {
  TwoCellPtr a, b;
  try {
    a = parse_cell(c.c1);
    b = parse_cell(c.c2);
  } catch (const BoundaryError& e) {
    return fail_with(err, ErrorCode::BadBoundary, e.what(), c.json);
  } catch (const ModeError& e) {
    return fail_with(err, ErrorCode::Syntax, e.what(), c.json);
  }
  try {
    bool eq = eq_cell(*a, *b);
    NormalCell na = normalize_cell(*a), nb = normalize_cell(*b);
    out << (eq ? "true" : "false") << "\n";
    out << "  " << to_chain_string(na) << "\n";
    out << "  " << to_chain_string(nb) << "\n";
    return 0;
  } catch (const ModeError& e) {
    return fail_with(err, ErrorCode::BadBoundary, e.what(), c.json);
  }
}

int cmd_cell_search(const Config& c, std::ostream& out, std::ostream& err) {
  Modality src, tgt;
  try {
    src = parse_modality(c.c1);
    tgt = parse_modality(c.c2);
  } catch (const ModeError& e) {
    return fail_with(err, ErrorCode::Syntax, e.what(), c.json);
  }
  // Cells at the shallowest depth that has any, as hole filling sees them;
  // --all lists every normal form up to the depth.
  std::vector<NormalCell> cells;
  for (int d = c.all ? c.depth : 0; d <= c.depth && cells.empty(); ++d) cells = search_cells(src, tgt, d);
  if (cells.empty()) out << "none found (depth " << c.depth << ")\n";
  for (const auto& cell : cells) out << to_expr_string(cell) << "\t" << to_chain_string(cell) << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"Proof checker for modal simplicial type theory", "stt"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_flag("--no-prelude", c.no_prelude, "Do not load the axiom prelude");
  app.add_flag("--json", c.json, "Line-delimited JSON diagnostics");
  app.add_flag("--trace", c.trace, "Trace checking");
  app.add_option("--depth", c.depth, "Search depth for 2-cells")->check(CLI::NonNegativeNumber);

  auto* check = app.add_subcommand("check", "Check files");
  check->add_flag("--keep-going", c.keep_going, "Continue after a failing declaration");
  check->add_flag("--json", c.json, "Line-delimited JSON output");
  check->add_option("--jobs,-j", c.jobs, "Files checked in parallel")->check(CLI::PositiveNumber);
  check->add_option("--expect", c.expect, "Mutation manifest: listed files must be rejected with the given code");
  check->add_option("files", c.files, "Files")->required();

  auto* nf = app.add_subcommand("nf", "Print the normal form of a definition");
  nf->add_option("file", c.file, "Source file")->required();
  nf->add_option("name", c.name)->required();

  auto* dump = app.add_subcommand("dump-core", "Print the elaborated declarations of a file");
  dump->add_option("file", c.file, "Source file")->required();

  auto* mod = app.add_subcommand("mod", "Modality queries");
  mod->require_subcommand(1);
  mod->fallthrough();
  auto* mod_nf = mod->add_subcommand("nf", "Normalize a modality");
  mod_nf->add_option("word", c.word)->required();

  auto* cell = app.add_subcommand("cell", "2-cell queries");
  cell->require_subcommand(1);
  cell->fallthrough();
  auto* cell_eq = cell->add_subcommand("eq", "Decide equality of two cells");
  cell_eq->add_option("c1", c.c1)->required();
  cell_eq->add_option("c2", c.c2)->required();
  auto* cell_search = cell->add_subcommand("search", "List cells between two modalities");
  cell_search->add_option("source", c.c1)->required();
  cell_search->add_option("target", c.c2)->required();
  cell_search->add_option("--depth", c.depth, "Search depth")->check(CLI::NonNegativeNumber);
  cell_search->add_flag("--all", c.all, "List every cell up to the depth");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    if (*check) return cmd_check(c, out, err);
    if (*nf) return cmd_nf(c, out, err);
    if (*dump) return cmd_dump(c, out, err);
    if (*mod_nf) return cmd_mod_nf(c, out, err);
    if (*cell_eq) return cmd_cell_eq(c, out, err);
    if (*cell_search) return cmd_cell_search(c, out, err);
  } catch (const SttError& e) {
    report(err, e.diag, c.json);
    return exit_code_for(e.diag.code);
  } catch (const std::exception& e) {
    return fail_with(err, ErrorCode::Internal, e.what(), c.json);
  }
  return 2;
}

}  // namespace stt
