#pragma once

#include <string>

#include "hpsgc/text.hpp"

namespace testing_support {

inline std::string grammar_path(const std::string& rel) { return std::string(HPSGC_GRAMMAR_DIR) + "/" + rel; }

inline hpsgc::SignaturePtr load_sig(const std::string& dir) {
  return hpsgc::load_signature(hpsgc::read_text_file(grammar_path(dir + "/signature.tfs")));
}

inline hpsgc::Grammar load_grammar(const std::string& rel, const hpsgc::SignaturePtr& sig) {
  return hpsgc::parse_grammar(hpsgc::read_text_file(grammar_path(rel)), sig);
}

}  // namespace testing_support
