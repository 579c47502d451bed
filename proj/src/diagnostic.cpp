#include "hpsgc/diagnostic.hpp"

#include <algorithm>

namespace hpsgc {

std::string Diagnostic::str() const {
  std::string out = severity == Severity::Error ? "error" : "warning";
  if (line > 0) {
    out += " at " + std::to_string(line) + ":" + std::to_string(column);
  }
  out += ": " + message;
  return out;
}

bool has_errors(const Diagnostics& diags) {
  return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) {
    return d.severity == Diagnostic::Severity::Error;
  });
}

namespace {
std::string join_messages(const Diagnostics& diags) {
  std::string out;
  for (const auto& d : diags) {
    if (!out.empty()) out += "\n";
    out += d.str();
  }
  return out;
}
}  // namespace

InputError::InputError(Diagnostics diags)
    : std::runtime_error(join_messages(diags)), diags_(std::move(diags)) {}

InputError::InputError(std::string message, int line, int column)
    : InputError(Diagnostics{{Diagnostic::Severity::Error, line, column, std::move(message)}}) {}

}  // namespace hpsgc
