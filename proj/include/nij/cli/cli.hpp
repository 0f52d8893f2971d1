#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nij/cli/io.hpp"
#include "nij/common/tolerances.hpp"
#include "nij/jetcount/jetcount.hpp"

/// The nijtool command line: argument parsing, dispatch and JSON reports.
namespace nij::cli {

inline const std::vector<std::string> kSubcommands{"check", "nijenhuis", "classify", "bryant", "frame4",
                                                   "web",   "pencil",    "quadric",  "jetcount", "scan"};

struct RunConfig {
  std::string subcommand;
  std::vector<std::string> inputs;
  Tolerances tol;
  std::uint64_t seed = 1;
  int samples = 20;
  /// Report path; empty writes to stdout.
  std::string out;

  // Subcommand options.
  int n = 2;                         // jetcount
  std::string mode;                  // pencil: generate | verify; quadric: fit | nondegeneracy | invariant-planes | certificate
  std::string example = "2";         // pencil: 1 | 2 | dg2-kernel-v1 | dg2-kernel-transversal
  int degree = 2;                    // pencil generators, pullback refit
  bool triangular = false;           // pencil example 2
  std::vector<int> v_coords{0, 1};   // pencil verify
  std::string structure_out;         // pencil generate: bare structure file
  int grid = 3;                      // check, scan
  std::optional<std::vector<double>> point;
  std::string diffeo;                // check, scan: pull back first
  int trials = 200;                  // quadric sampler restarts
  int max_degree = io::kDefaultMaxDegree;
  bool timestamp = true;
};

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitVerdict = 2;

struct RunResult {
  int exit_code = kExitOk;
  io::Json report;
  /// Human-readable text printed before the report (jetcount table).
  std::string text;
};

/// Throws Error(Argument) for a bad config (non-positive tolerances, unknown
/// subcommand or mode).
void validate(const RunConfig& cfg);

/// Never throws for toolkit errors: they become the report's "error" field
/// with exit 1 (input and usage kinds) or 2 (mathematical verdicts).
RunResult run(const RunConfig& cfg);

struct ParsedArgs {
  RunConfig config;
  /// Set when parsing already decided the exit (help, usage error).
  std::optional<int> exit_code;
  std::string message;
};

ParsedArgs parse_args(int argc, const char* const* argv);

/// Hex digest of bytes. SHA-256 when built with OpenSSL, else FNV-1a 64;
/// `algorithm` receives the name.
std::string digest_hex(const std::string& bytes, std::string* algorithm = nullptr);

std::string format_count_table(const jetcount::CountTable& t);

/// Two-space indented JSON with a trailing newline.
std::string dump(const io::Json& j);

/// Full program: parse, run, write the report. Returns the exit code.
int main_entry(int argc, const char* const* argv);

}  // namespace nij::cli
