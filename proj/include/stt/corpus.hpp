#pragma once

// The axiom prelude, corpus runs and their reports, and the mutation
// manifest.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stt/checker.hpp"

namespace stt {

struct PreludeModule {
  std::string file;
  int decls = 0;
};

struct PreludeManifest {
  std::vector<PreludeModule> modules;
  std::map<std::string, std::vector<std::string>> coverage;  // rule id -> files
};

/// Prelude directory: $STT_PRELUDE_DIR, else the configured default.
std::string prelude_dir();
/// Reads `manifest.json` from the prelude directory.
PreludeManifest read_prelude_manifest(const std::string& dir);
/// Loads every prelude module in manifest order and checks declaration
/// counts. Throws SttError naming the failing declaration.
void load_prelude(Session& s, const std::string& dir);

struct FileResult {
  std::string file;
  enum class Status { Accepted, Rejected, ExpectedReject, UnexpectedAccept, WrongCode };
  Status status = Status::Accepted;
  int decls = 0;
  int conjectures = 0;
  std::optional<ErrorCode> expected;
  std::vector<Diagnostic> diagnostics;
  double ms = 0;
  bool ok() const { return status == Status::Accepted || status == Status::ExpectedReject; }
};

std::string_view status_name(FileResult::Status s);

struct CorpusReport {
  std::vector<FileResult> files;
  double ms = 0;
  int accepted() const;
  int rejected() const;
  int expected_rejects() const;
  int failures() const;
  int declarations() const;
  int conjectures() const;
  std::string to_text() const;
  std::string to_json() const;
};

/// file name -> expected error code, read from a tab-separated manifest.
std::map<std::string, ErrorCode> read_mutation_manifest(const std::string& path);

struct CorpusOptions {
  bool keep_going = false;
  int jobs = 1;
  /// Files listed here must be rejected with the given code.
  std::map<std::string, ErrorCode> expect_reject;
};

/// Checks each file in its own copy of `base` (a frozen session).
CorpusReport run_corpus(const Session& base, const std::vector<std::string>& files,
                        const CorpusOptions& opts = {});

/// `.stt` files of a directory, sorted, not recursive.
std::vector<std::string> stt_files(const std::string& dir);

}  // namespace stt
