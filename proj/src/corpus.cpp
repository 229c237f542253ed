#include "stt/corpus.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

#include "json.hpp"

#ifndef STT_DEFAULT_PRELUDE_DIR
#define STT_DEFAULT_PRELUDE_DIR "prelude"
#endif

namespace stt {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

static double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string prelude_dir() {
  if (const char* e = std::getenv("STT_PRELUDE_DIR"); e && *e) return e;
  return STT_DEFAULT_PRELUDE_DIR;
}

PreludeManifest read_prelude_manifest(const std::string& dir) {
  std::ifstream in(fs::path(dir) / "manifest.json");
  if (!in) raise(ErrorCode::Syntax, "cannot read prelude manifest in '" + dir + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    raise(ErrorCode::Syntax, std::string("bad prelude manifest: ") + e.what());
  }
  PreludeManifest m;
  for (const auto& mod : j.at("modules")) m.modules.push_back({mod.at("file"), mod.at("decls")});
  if (j.contains("coverage"))
    for (auto& [rule, files] : j["coverage"].items())
      m.coverage[rule] = files.get<std::vector<std::string>>();
  return m;
}

void load_prelude(Session& s, const std::string& dir) {
  PreludeManifest m = read_prelude_manifest(dir);
  for (const auto& mod : m.modules) {
    std::string path = (fs::path(dir) / mod.file).string();
    ModuleReport r = load_module(s, path);
    if (!r.ok()) throw SttError(r.diagnostics.front());
    if (static_cast<int>(r.decls.size()) != mod.decls) {
      Diagnostic d;
      d.file = path;
      d.code = ErrorCode::Internal;
      d.message = "prelude manifest lists " + std::to_string(mod.decls) + " declarations, found " +
                  std::to_string(r.decls.size());
      throw SttError(d);
    }
  }
}

std::string_view status_name(FileResult::Status s) {
  switch (s) {
    case FileResult::Status::Accepted: return "accepted";
    case FileResult::Status::Rejected: return "rejected";
    case FileResult::Status::ExpectedReject: return "expected-reject";
    case FileResult::Status::UnexpectedAccept: return "unexpected-accept";
    case FileResult::Status::WrongCode: return "wrong-code";
  }
  return "?";
}

int CorpusReport::accepted() const {
  return std::count_if(files.begin(), files.end(),
                       [](const auto& f) { return f.status == FileResult::Status::Accepted; });
}
int CorpusReport::rejected() const { return static_cast<int>(files.size()) - accepted(); }
int CorpusReport::expected_rejects() const {
  return std::count_if(files.begin(), files.end(),
                       [](const auto& f) { return f.status == FileResult::Status::ExpectedReject; });
}
int CorpusReport::failures() const {
  return std::count_if(files.begin(), files.end(), [](const auto& f) { return !f.ok(); });
}
int CorpusReport::declarations() const {
  int n = 0;
  for (const auto& f : files) n += f.decls;
  return n;
}
int CorpusReport::conjectures() const {
  int n = 0;
  for (const auto& f : files) n += f.conjectures;
  return n;
}

std::string CorpusReport::to_text() const {
  std::ostringstream os;
  std::size_t w = 4;
  for (const auto& f : files) w = std::max(w, f.file.size());
  for (const auto& f : files) {
    os << f.file << std::string(w + 2 - f.file.size(), ' ') << status_name(f.status);
    os << "  decls=" << f.decls;
    if (f.conjectures) os << " conjectures=" << f.conjectures;
    if (!f.diagnostics.empty()) os << "  [" << error_code_name(f.diagnostics.front().code) << "]";
    os << "\n";
  }
  os << "files=" << files.size() << " accepted=" << accepted() << " rejected=" << rejected()
     << " expected-reject=" << expected_rejects() << " failures=" << failures()
     << " declarations=" << declarations() << " conjectures=" << conjectures() << " time_ms="
     << static_cast<long>(ms) << "\n";
  return os.str();
}

std::string CorpusReport::to_json() const {
  nlohmann::json j;
  j["files"] = nlohmann::json::array();
  for (const auto& f : files) {
    nlohmann::json e;
    e["file"] = f.file;
    e["status"] = std::string(status_name(f.status));
    e["decls"] = f.decls;
    e["conjectures"] = f.conjectures;
    e["ms"] = f.ms;
    if (f.expected) e["expected"] = std::string(error_code_name(*f.expected));
    e["diagnostics"] = nlohmann::json::array();
    for (const auto& d : f.diagnostics) e["diagnostics"].push_back(nlohmann::json::parse(d.to_json()));
    j["files"].push_back(e);
  }
  j["accepted"] = accepted();
  j["rejected"] = rejected();
  j["expectedReject"] = expected_rejects();
  j["failures"] = failures();
  j["declarations"] = declarations();
  j["conjectures"] = conjectures();
  j["ms"] = ms;
  return j.dump();
}

std::map<std::string, ErrorCode> read_mutation_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::Syntax, "cannot read mutation manifest '" + path + "'");
  std::map<std::string, ErrorCode> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string file, code;
    ls >> file >> code;
    auto c = error_code_from_name(code);
    if (!c) raise(ErrorCode::Syntax, "unknown error code '" + code + "' in " + path);
    out[file] = *c;
  }
  return out;
}

namespace {

FileResult check_one(const Session& base, const std::string& file, const CorpusOptions& opts) {
  auto t0 = Clock::now();
  Session s = base;
  FileResult fr;
  fr.file = file;
  ModuleReport r = load_module(s, file, {opts.keep_going});
  fr.decls = static_cast<int>(r.decls.size());
  fr.conjectures = r.conjectures;
  fr.diagnostics = r.diagnostics;
  std::string name = fs::path(file).filename().string();
  auto it = opts.expect_reject.find(name);
  if (it == opts.expect_reject.end()) it = opts.expect_reject.find(file);
  if (it != opts.expect_reject.end()) {
    fr.expected = it->second;
    if (r.ok())
      fr.status = FileResult::Status::UnexpectedAccept;
    else if (r.diagnostics.front().code == it->second)
      fr.status = FileResult::Status::ExpectedReject;
    else
      fr.status = FileResult::Status::WrongCode;
  } else {
    fr.status = r.ok() ? FileResult::Status::Accepted : FileResult::Status::Rejected;
  }
  fr.ms = ms_since(t0);
  return fr;
}

}  // namespace

CorpusReport run_corpus(const Session& base, const std::vector<std::string>& files,
                        const CorpusOptions& opts) {
  auto t0 = Clock::now();
  CorpusReport rep;
  rep.files.resize(files.size());
  std::size_t jobs = static_cast<std::size_t>(std::max(1, opts.jobs));
  for (std::size_t start = 0; start < files.size(); start += jobs) {
    std::vector<std::future<FileResult>> fs_;
    std::size_t end = std::min(files.size(), start + jobs);
    for (std::size_t i = start; i < end; ++i)
      fs_.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, check_one,
                               std::cref(base), files[i], std::cref(opts)));
    for (std::size_t i = start; i < end; ++i) rep.files[i] = fs_[i - start].get();
  }
  rep.ms = ms_since(t0);
  return rep;
}

std::vector<std::string> stt_files(const std::string& dir) {
  std::vector<std::string> out;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(dir, ec))
    if (e.is_regular_file() && e.path().extension() == ".stt") out.push_back(e.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace stt
