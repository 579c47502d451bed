#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hpsgc {

struct Diagnostic {
  enum class Severity { Warning, Error };

  Severity severity = Severity::Error;
  int line = 0;  // 1-based; 0 when no source position applies
  int column = 0;
  std::string message;

  std::string str() const;
};

using Diagnostics = std::vector<Diagnostic>;

bool has_errors(const Diagnostics& diags);

// Thrown when an input (signature, grammar, compiled file) is rejected.
// Carries every diagnostic collected before giving up.
class InputError : public std::runtime_error {
 public:
  explicit InputError(Diagnostics diags);
  InputError(std::string message, int line = 0, int column = 0);

  const Diagnostics& diagnostics() const { return diags_; }

 private:
  Diagnostics diags_;
};

// Raised when an engine invariant is found broken at run time.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace hpsgc
