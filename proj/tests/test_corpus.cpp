#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "support.hpp"

using namespace stt;
namespace fs = std::filesystem;

namespace {

/// Lambdas peeled off, is the body `refl`?
bool is_refl_body(TermPtr t) {
  while (t && t->tag == Tag::Lam) t = t->kids[0];
  return t && t->tag == Tag::Refl;
}

/// Strips the longest common prefix and suffix; what remains on each side is
/// the edited region.
std::pair<std::string, std::string> edit_region(const std::string& a, const std::string& b) {
  std::size_t p = 0;
  while (p < a.size() && p < b.size() && a[p] == b[p]) ++p;
  std::size_t s = 0;
  while (s < a.size() - p && s < b.size() - p && a[a.size() - 1 - s] == b[b.size() - 1 - s]) ++s;
  return {a.substr(p, a.size() - p - s), b.substr(p, b.size() - p - s)};
}

std::string strip_parent_imports(std::string text) {
  std::string out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("import ../", 0) == 0) line = "import " + line.substr(10);
    out += line + "\n";
  }
  return out;
}

class CorpusTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { base_ = new Session(stt::testing::prelude_session()); }
  static void TearDownTestSuite() { delete base_; }
  static Session* base_;
};

Session* CorpusTest::base_ = nullptr;

}  // namespace

TEST_F(CorpusTest, PreludeMatchesManifest) {
  PreludeManifest m = read_prelude_manifest(stt::testing::prelude_path());
  ASSERT_EQ(m.modules.size(), 10u);
  int total = 0;
  for (const auto& mod : m.modules) total += mod.decls;
  EXPECT_EQ(static_cast<int>(base_->order.size()), total);
  EXPECT_GE(total, 60);
}

TEST_F(CorpusTest, PreludeManifestRejectsWrongCounts) {
  auto dir = fs::temp_directory_path() / "stt_bad_prelude";
  fs::create_directories(dir);
  std::ofstream(dir / "00_a.stt") << "postulate A : U 0\npostulate B : U 0\n";
  std::ofstream(dir / "manifest.json") << R"({"modules":[{"file":"00_a.stt","decls":3}]})";
  Session s;
  EXPECT_THROW(load_prelude(s, dir.string()), SttError);
}

TEST_F(CorpusTest, CoverageEntriesNameExactlyOneDeclaration) {
  Session all = *base_;
  for (const auto& file : stt::testing::corpus_files()) {
    ModuleReport r = load_module(all, file);
    ASSERT_TRUE(r.ok()) << file;
  }
  auto origin = [&](const std::string& name) {
    const auto& g = all.globals.at(name);
    return fs::path(g.module).filename().string();
  };
  std::set<std::string> claimed;
  auto check_map = [&](const std::map<std::string, std::vector<std::string>>& cov, bool corpus) {
    for (const auto& [rule, entries] : cov) {
      EXPECT_FALSE(entries.empty()) << rule;
      for (const auto& e : entries) {
        auto colon = e.find(':');
        ASSERT_NE(colon, std::string::npos) << e;
        std::string file = e.substr(0, colon), name = e.substr(colon + 1);
        ASSERT_TRUE(all.globals.count(name)) << rule << " -> " << e;
        if (file == "prelude")
          EXPECT_TRUE(corpus) << e;
        else
          EXPECT_EQ(origin(name), file) << rule << " -> " << e;
        EXPECT_TRUE(claimed.insert(name).second) << name << " is claimed twice";
      }
    }
  };
  check_map(read_prelude_manifest(stt::testing::prelude_path()).coverage, false);
  auto j = nlohmann::json::parse(stt::testing::read_file(stt::testing::corpus_path() + "/coverage.json"));
  check_map(j["coverage"].get<std::map<std::string, std::vector<std::string>>>(), true);
  EXPECT_GE(claimed.size(), 60u);
}

TEST_F(CorpusTest, CorpusIsAccepted) {
  CorpusReport rep = run_corpus(*base_, stt::testing::corpus_files());
  EXPECT_EQ(rep.failures(), 0) << rep.to_text();
  EXPECT_GE(rep.declarations(), 40);
  EXPECT_GT(rep.conjectures(), 0);
  for (const auto& f : rep.files) EXPECT_EQ(f.status, FileResult::Status::Accepted) << f.file;
}

TEST_F(CorpusTest, ParallelRunMatchesSequential) {
  auto files = stt::testing::corpus_files();
  CorpusReport one = run_corpus(*base_, files);
  CorpusOptions opts;
  opts.jobs = 4;
  CorpusReport four = run_corpus(*base_, files, opts);
  ASSERT_EQ(one.files.size(), four.files.size());
  for (std::size_t i = 0; i < one.files.size(); ++i) {
    EXPECT_EQ(one.files[i].file, four.files[i].file);
    EXPECT_EQ(one.files[i].decls, four.files[i].decls);
    EXPECT_EQ(one.files[i].status, four.files[i].status);
  }
}

TEST_F(CorpusTest, ConformanceEqualitiesHoldByRefl) {
  auto files = stt_files(stt::testing::corpus_path() + "/conformance");
  ASSERT_GE(files.size(), 4u);
  int refl = 0;
  for (const auto& file : files) {
    Session s = *base_;
    ModuleReport r = load_module(s, file);
    EXPECT_TRUE(r.ok()) << file << ": " << (r.ok() ? "" : r.diagnostics[0].to_text());
    for (const auto& d : r.decls) refl += is_refl_body(d.body);
  }
  EXPECT_GE(refl, 20);
}

TEST_F(CorpusTest, MutationsAreRejectedWithTheirCode) {
  std::string dir = stt::testing::corpus_path() + "/mutations";
  auto manifest = read_mutation_manifest(dir + "/manifest.tsv");
  auto files = stt_files(dir);
  EXPECT_GE(files.size(), 15u);
  EXPECT_EQ(files.size(), manifest.size());
  CorpusOptions opts;
  opts.expect_reject = manifest;
  CorpusReport rep = run_corpus(*base_, files, opts);
  for (const auto& f : rep.files) {
    EXPECT_EQ(f.status, FileResult::Status::ExpectedReject)
        << f.file << " (" << status_name(f.status) << ")";
  }
  EXPECT_EQ(rep.failures(), 0);
  std::set<ErrorCode> codes;
  for (const auto& [file, code] : manifest) codes.insert(code);
  EXPECT_GE(codes.size(), 6u);
}

TEST_F(CorpusTest, MutationsAreSingleEditsOfAcceptedFiles) {
  std::vector<std::string> sources = stt::testing::corpus_files();
  for (const auto& f : stt_files(stt::testing::corpus_path() + "/conformance")) sources.push_back(f);
  for (const auto& m : stt_files(stt::testing::corpus_path() + "/mutations")) {
    std::string text = strip_parent_imports(stt::testing::read_file(m));
    bool found = false;
    for (const auto& src : sources) {
      std::string orig = stt::testing::read_file(src);
      auto [was, now] = edit_region(orig, text);
      if (was.size() < 80 && now.size() < 80 && was.find('\n') == std::string::npos &&
          now.find('\n') == std::string::npos) {
        found = true;
        break;
      }
    }
    EXPECT_TRUE(found) << m << " is not a single-line edit of a corpus file";
  }
}

TEST_F(CorpusTest, UnexpectedAcceptIsAFailure) {
  CorpusOptions opts;
  std::string hom = stt::testing::corpus_path() + "/hom.stt";
  opts.expect_reject["hom.stt"] = ErrorCode::Mismatch;
  CorpusReport rep = run_corpus(*base_, {hom}, opts);
  ASSERT_EQ(rep.files.size(), 1u);
  EXPECT_EQ(rep.files[0].status, FileResult::Status::UnexpectedAccept);
  EXPECT_EQ(rep.failures(), 1);

  opts.expect_reject.clear();
  opts.expect_reject["hom_bad.stt"] = ErrorCode::Unbound;
  CorpusReport wrong = run_corpus(*base_, {stt::testing::corpus_path() + "/mutations/hom_bad.stt"}, opts);
  EXPECT_EQ(wrong.files[0].status, FileResult::Status::WrongCode);
}

TEST_F(CorpusTest, ReportsRenderAsTextAndJson) {
  CorpusReport rep = run_corpus(*base_, {stt::testing::corpus_path() + "/hom.stt"});
  std::string text = rep.to_text();
  EXPECT_NE(text.find("hom.stt"), std::string::npos);
  auto j = nlohmann::json::parse(rep.to_json());
  ASSERT_TRUE(j.contains("files"));
  EXPECT_EQ(j["files"].size(), 1u);
}

TEST_F(CorpusTest, ImportsLoadOnceAndCyclesAreReported) {
  Session s = *base_;
  ModuleReport a = load_module(s, stt::testing::corpus_path() + "/limits.stt");
  ASSERT_TRUE(a.ok());
  ModuleReport again = load_module(s, stt::testing::corpus_path() + "/categories.stt");
  EXPECT_TRUE(again.ok());
  EXPECT_TRUE(again.decls.empty());

  std::string x = stt::testing::temp_file("cyc_a.stt", "import cyc_b.stt\npostulate a : U 0\n");
  stt::testing::temp_file("cyc_b.stt", "import cyc_a.stt\npostulate b : U 0\n");
  Session c = *base_;
  ModuleReport r = load_module(c, x);
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.diagnostics[0].code, ErrorCode::Cycle);
}
