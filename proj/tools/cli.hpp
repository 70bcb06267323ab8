#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace commdeg {
struct AuditReport;
}

namespace commdeg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitHardViolation = 3;
inline constexpr int kExitComputation = 4;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Carries the rendered --help text.
class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Invocation {
  std::string subcommand;  // info, prob, profile, zeta, dist, chartab, audit
  std::string group;
  std::vector<std::string> groups;  // audit only
  std::string H = "full";
  std::string K = "full";
  unsigned n = 1;
  unsigned m = 1;
  std::string g = "0";  // element id or "all"
  std::string method = "auto";
  std::string predicate = "derived";
  std::string output = "table";
  std::uint64_t seed = 0x5eed;
  unsigned threads = 1;
  std::optional<std::uint64_t> brute_cap;
  std::optional<std::size_t> max_order;
  std::string config;
  std::string battery;
  std::string claims;
  std::string emit;
  bool timings = false;
  bool x_block = false;
  std::string import_path;
  bool seed_given = false;
  bool threads_given = false;
};

/// Throws UsageError naming the offending flag, or HelpRequested.
Invocation parse(const std::vector<std::string>& args);

/// Runs a parsed invocation; returns the process exit code.
int execute(const Invocation& inv, std::ostream& out, std::ostream& err);

/// kExitHardViolation when the report violates a hard-guarantee claim.
int audit_exit_code(const AuditReport& report);

/// parse + execute with exit-code mapping; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace commdeg::cli
