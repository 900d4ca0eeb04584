#include "hmctag/eval.h"

#include <cstdio>
#include <iomanip>
#include <ostream>

namespace hmctag {

namespace {

double rate(std::size_t errors, std::size_t tokens) {
  return tokens == 0 ? 0.0 : 100.0 * static_cast<double>(errors) / static_cast<double>(tokens);
}

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

double EvalReport::known_error_rate() const { return rate(known_errors, known_tokens); }
double EvalReport::unknown_error_rate() const { return rate(unknown_errors, unknown_tokens); }
double EvalReport::global_error_rate() const { return rate(total_errors(), total_tokens()); }

void EvalReport::add(const std::string& gold, const std::string& predicted, bool unknown) {
  const bool wrong = gold != predicted;
  if (unknown) {
    ++unknown_tokens;
    unknown_errors += wrong;
  } else {
    ++known_tokens;
    known_errors += wrong;
  }
  ++confusion[{gold, predicted}];
}

std::string format_rates(const EvalReport& report) {
  return fixed2(report.known_error_rate()) + "%/" + fixed2(report.unknown_error_rate()) + "%/" +
         fixed2(report.global_error_rate()) + "%";
}

void write_report_kv(std::ostream& out, const EvalReport& report, const ReportContext& context) {
  out << "dataset=" << context.dataset << '\n'
      << "decoder=" << context.decoder << '\n'
      << "template=" << context.tmpl << '\n'
      << "kw_err=" << fixed2(report.known_error_rate()) << '\n'
      << "uw_err=" << fixed2(report.unknown_error_rate()) << '\n'
      << "global_err=" << fixed2(report.global_error_rate()) << '\n'
      << "kw_tokens=" << report.known_tokens << '\n'
      << "kw_errors=" << report.known_errors << '\n'
      << "uw_tokens=" << report.unknown_tokens << '\n'
      << "uw_errors=" << report.unknown_errors << '\n'
      << "tokens=" << report.total_tokens() << '\n'
      << "errors=" << report.total_errors() << '\n';
}

void write_report_table(std::ostream& out, const EvalReport& report, const ReportContext& context) {
  out << context.dataset << "  decoder=" << context.decoder << "  features=" << context.tmpl << '\n';
  out << std::left << std::setw(16) << "bucket" << std::right << std::setw(10) << "tokens"
      << std::setw(10) << "errors" << std::setw(10) << "error%" << '\n';
  auto line = [&](const char* name, std::size_t tokens, std::size_t errors, double r) {
    out << std::left << std::setw(16) << name << std::right << std::setw(10) << tokens
        << std::setw(10) << errors << std::setw(10) << fixed2(r) << '\n';
  };
  line("known words", report.known_tokens, report.known_errors, report.known_error_rate());
  line("unknown words", report.unknown_tokens, report.unknown_errors, report.unknown_error_rate());
  line("global", report.total_tokens(), report.total_errors(), report.global_error_rate());
}

}  // namespace hmctag
