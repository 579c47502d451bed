#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hpsgc/program.hpp"

namespace hpsgc {

// Damaged or foreign compiled file.
class IntegrityError : public InputError {
 public:
  explicit IntegrityError(const std::string& what) : InputError("integrity error: " + what) {}
};

struct CompiledFile {
  Program program;
  // Present when the file carries a lexicon index.
  std::optional<std::vector<std::size_t>> fallback;
};

// Layout: magic, version, length-prefixed sections (SIGN, ATOM, CLAU,
// META, optional INDX), crc32 of everything before it. Integers are
// fixed-width little-endian. Atoms are numbered by first use, so equal
// programs give equal bytes whatever else their signature has interned.
std::string write_compiled(const Program& program, const std::vector<std::size_t>* fallback = nullptr);
CompiledFile read_compiled(std::string_view bytes);

void write_compiled_file(const std::string& path, const Program& program,
                         const std::vector<std::size_t>* fallback = nullptr);
CompiledFile read_compiled_file(const std::string& path);

}  // namespace hpsgc
