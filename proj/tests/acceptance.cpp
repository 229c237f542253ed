// Acceptance harness: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <cstdio>
#include <functional>

#include "support.hpp"

using namespace stt;
using stt::testing::Stopwatch;

namespace {

struct Verdict {
  bool ok = true;
  std::string detail;
};

int failures = 0;

void report(int n, const std::string& title, const std::function<Verdict()>& body) {
  Stopwatch sw;
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  if (!v.ok) ++failures;
  std::printf("%s  %d. %s (%.3fs)%s%s\n", v.ok ? "PASS" : "FAIL", n, title.c_str(), sw.seconds(),
              v.detail.empty() ? "" : ": ", v.detail.c_str());
  std::fflush(stdout);
}

bool cell_eq(std::string_view a, std::string_view b) { return eq_cell(*parse_cell(a), *parse_cell(b)); }

std::vector<std::string> conformance_files() { return stt_files(stt::testing::corpus_path() + "/conformance"); }

bool is_refl_body(TermPtr t) {
  while (t && t->tag == Tag::Lam) t = t->kids[0];
  return t && t->tag == Tag::Refl;
}

Verdict modality_oracle() {
  Stopwatch sw;
  stt::testing::ModalityOracle oracle(8);
  int checked = 0;
  for (const auto& w : oracle.words()) {
    if (w.size() > 6) continue;
    std::string got = stt::testing::to_letters(normalize_modality(stt::testing::from_letters(w)));
    if (got != oracle.canonical(w)) return {false, "word " + w + " normalizes to " + got};
    ++checked;
  }
  double t = sw.seconds();
  return {checked == 5461 && t < 5.0, std::to_string(checked) + " words"};
}

Verdict confluence() {
  Stopwatch sw;
  auto pairs = critical_pairs();
  for (const auto& p : pairs)
    if (!p.joinable()) return {false, "overlap " + to_string(p.overlap) + " not joinable"};
  return {!pairs.empty() && sw.seconds() < 1.0, std::to_string(pairs.size()) + " critical pairs joinable"};
}

Verdict coherence() {
  int n = 0;
  for (const auto& [lhs, rhs] : stt::testing::oracle_relations()) {
    if (!eq_modality(stt::testing::from_letters(lhs), stt::testing::from_letters(rhs)))
      return {false, "relation " + lhs + " = " + rhs};
    ++n;
  }
  const std::pair<const char*, const char*> cells[] = {
      {"sharp * zeta", "sharp"}, {"zeta * sharp", "sharp"}, {"flat * zeta", "flat"},
      {"eps * flat", "flat"},    {"flat * eps", "flat"},    {"sharp * eps", "sharp"},
      {"pi0 * op . tau", "pi1"}, {"pi1 * op . tau", "pi0"}, {"pi0 . tw * eps", "eps * op"},
      {"pi1 . tw * eps", "eps"}, {"tauinv . tau", "tw"},    {"tau . tauinv", "tw.op"},
  };
  for (const auto& [a, b] : cells) {
    if (!cell_eq(a, b)) return {false, std::string(a) + " != " + b};
    ++n;
  }
  return {true, std::to_string(n) + " equalities"};
}

Verdict search() {
  Stopwatch sw;
  bool none = search_cells(Modality::id(), Modality::flat(), 6).empty();
  auto eps = search_cells(Modality::flat(), Modality::id(), 1);
  bool one = eps.size() == 1 && eps[0] == normalize_cell(*parse_cell("eps"));
  return {none && one && sw.seconds() < 10.0, ""};
}

Verdict corpus() {
  Stopwatch sw;
  Session s = stt::testing::prelude_session();
  std::size_t prelude = s.order.size();
  CorpusReport rep = run_corpus(s, stt::testing::corpus_files());
  double t = sw.seconds();
  std::string detail = std::to_string(prelude) + " prelude + " + std::to_string(rep.declarations()) +
                       " corpus declarations, " + std::to_string(rep.failures()) + " failures";
  return {rep.failures() == 0 && rep.declarations() >= 40 && t < 10.0, detail};
}

Verdict conformance() {
  Session base = stt::testing::prelude_session();
  int refl = 0;
  std::set<std::string> families;
  for (const auto& file : conformance_files()) {
    Session s = base;
    ModuleReport r = load_module(s, file);
    if (!r.ok()) return {false, file + ": " + r.diagnostics[0].to_text()};
    for (const auto& d : r.decls) {
      if (!is_refl_body(d.body)) continue;
      ++refl;
      for (const char* f : {"beta_", "lock_", "key_comp", "key_natural", "interchange", "subst_mod", "subst_letmod"})
        if (d.name.rfind(f, 0) == 0) families.insert(f);
    }
  }
  return {refl >= 20 && families.size() == 7,
          std::to_string(refl) + " instances in " + std::to_string(families.size()) + " families"};
}

Verdict mutations() {
  std::string dir = stt::testing::corpus_path() + "/mutations";
  CorpusOptions opts;
  opts.expect_reject = read_mutation_manifest(dir + "/manifest.tsv");
  auto files = stt_files(dir);
  CorpusReport rep = run_corpus(stt::testing::prelude_session(), files, opts);
  for (const auto& f : rep.files)
    if (f.status != FileResult::Status::ExpectedReject) return {false, f.file + ": " + std::string(status_name(f.status))};
  return {files.size() >= 15, std::to_string(files.size()) + " mutations rejected"};
}

Verdict round_trip() {
  std::vector<std::string> files = stt_files(stt::testing::prelude_path());
  for (const auto& f : stt::testing::corpus_files()) files.push_back(f);
  for (const auto& f : conformance_files()) files.push_back(f);
  auto any_global = [](const std::string&) { return true; };
  int printed = 0;
  for (const auto& file : files) {
    for (auto& d : parse_module(stt::testing::read_file(file))) {
      if (d.kind == Decl::Kind::Import) continue;
      resolve_decl(d, any_global);
      std::string text = print_decl(d);
      auto again = parse_module(text);
      if (again.size() != 1) return {false, text};
      resolve_decl(again[0], any_global);
      using stt::testing::settle_cells;
      bool same = alpha_eq(settle_cells(again[0].type), settle_cells(d.type)) &&
                  (!d.body || alpha_eq(settle_cells(again[0].body), settle_cells(d.body)));
      if (!same) return {false, "round trip changed " + d.name};
      ++printed;
    }
  }

  Session all = stt::testing::prelude_session();
  std::vector<Decl> defs;
  for (const auto& name : all.order) {
    const auto& g = all.globals.at(name);
    if (g.body) defs.push_back(Decl{Decl::Kind::Def, name, g.type, g.body});
  }
  std::vector<std::string> checked = stt::testing::corpus_files();
  for (const auto& f : conformance_files()) checked.push_back(f);
  for (const auto& file : checked) {
    ModuleReport r = load_module(all, file);
    if (!r.ok()) return {false, file};
    for (const auto& d : r.decls)
      if (d.body) defs.push_back(d);
  }
  Conversion cv(all.globals);
  for (const auto& d : defs) {
    TermPtr once = cv.nf(nullptr, d.type, d.body);
    if (!alpha_eq(once, cv.nf(nullptr, d.type, once))) return {false, "nf not idempotent on " + d.name};
  }
  return {true, std::to_string(printed) + " declarations round-tripped, " + std::to_string(defs.size()) +
                    " bodies normalized"};
}

Verdict bidirectional() {
  Session all = stt::testing::prelude_session();
  std::vector<Decl> decls;
  for (const auto& file : stt::testing::corpus_files()) {
    ModuleReport r = load_module(all, file);
    if (!r.ok()) return {false, file};
    decls.insert(decls.end(), r.decls.begin(), r.decls.end());
  }
  Checker ck(all);
  int sampled = 0, bad = 0;
  std::string first_bad;
  stt::testing::SubtermWalker walker(ck.conversion(), [&](const Context& ctx, const TermPtr& t) {
    TermPtr ty;
    try {
      ty = ck.infer(ctx, t).first;
    } catch (const SttError&) {
      return;
    }
    ++sampled;
    try {
      ck.check(ctx, t, ty);
    } catch (const SttError&) {
      if (bad++ == 0) first_bad = print_term(t, ctx_names(ctx));
    }
  });
  for (const auto& d : decls) walker.walk_decl(d);
  return {bad == 0 && sampled >= 200,
          std::to_string(sampled) + " subterms" + (bad ? ", first failure " + first_bad : "")};
}

}  // namespace

int main() {
  report(1, "mode theory agrees with BFS oracle on words of length <= 6", modality_oracle);
  report(2, "critical pairs of the rewrite system are joinable", confluence);
  report(3, "generator relations and coherence equalities hold", coherence);
  report(4, "cell search: none id => flat at depth 6, exactly eps for flat => id", search);
  report(5, "prelude and corpus type-check", corpus);
  report(6, "conformance equalities hold by refl", conformance);
  report(7, "mutations rejected with their manifest code", mutations);
  report(8, "print/parse round trip and nf idempotence", round_trip);
  report(9, "inferred subterms check at their inferred type", bidirectional);
  std::printf("%s: %d of 9 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
