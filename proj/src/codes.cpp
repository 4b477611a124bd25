#include "hfpath/codes.hpp"

#include <algorithm>
#include <cctype>

namespace hfpath {
namespace {

bool is_code_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

}  // namespace

DiagnosisCode parse_code(std::string_view text) {
  std::string upper(text);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });

  if (upper == "DEATH") return DiagnosisCode::death();

  if (upper.size() != 5 && upper.size() != 6) {
    throw CodeError(CodeError::Kind::kInvalidLength,
                    "invalid code length " + std::to_string(upper.size()) + ": '" +
                        std::string(text) + "'");
  }
  // The canonical rendering carries '_' in the severity slot, so it must re-parse.
  for (std::size_t i = 0; i < upper.size(); ++i) {
    const bool placeholder = i == 5 && upper[i] == kMissingSeverity;
    if (!is_code_char(upper[i]) && !placeholder) {
      throw CodeError(CodeError::Kind::kInvalidCharset,
                      "invalid character at slot " + std::to_string(i + 1) + " in '" +
                          std::string(text) + "'");
    }
  }

  DiagnosisCode code;
  std::copy(upper.begin(), upper.end(), code.slots_.begin());
  if (upper.size() == 5) code.slots_[5] = kMissingSeverity;
  return code;
}

}  // namespace hfpath
