#ifndef HMCTAG_EVAL_H_
#define HMCTAG_EVAL_H_

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hmctag/core.h"

namespace hmctag {

// Token-level error counts split into known / unknown words.
struct EvalReport {
  std::size_t known_tokens = 0;
  std::size_t known_errors = 0;
  std::size_t unknown_tokens = 0;
  std::size_t unknown_errors = 0;
  // (gold, predicted) -> count, over every token.
  std::map<std::pair<std::string, std::string>, std::size_t> confusion;

  std::size_t total_tokens() const { return known_tokens + unknown_tokens; }
  std::size_t total_errors() const { return known_errors + unknown_errors; }

  // Percentages; 0 for an empty bucket.
  double known_error_rate() const;
  double unknown_error_rate() const;
  double global_error_rate() const;

  void add(const std::string& gold, const std::string& predicted, bool unknown);
  bool operator==(const EvalReport&) const = default;
};

struct ReportContext {
  std::string dataset;
  std::string decoder;
  std::string tmpl;
};

// Flat "key=value" lines.
void write_report_kv(std::ostream& out, const EvalReport& report, const ReportContext& context);
// Human-readable table.
void write_report_table(std::ostream& out, const EvalReport& report, const ReportContext& context);

// "KW%/UW%/Global%" with two decimals.
std::string format_rates(const EvalReport& report);

}  // namespace hmctag

#endif  // HMCTAG_EVAL_H_
