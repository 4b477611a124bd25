#pragma once

#include <array>
#include <compare>
#include <string>
#include <string_view>

#include "hfpath/error.hpp"

namespace hfpath {

inline constexpr char kMissingSeverity = '_';
inline constexpr std::string_view kDeathToken = "Death";

class CodeError : public DataError {
 public:
  enum class Kind { kInvalidLength, kInvalidCharset };
  CodeError(Kind kind, const std::string& what) : DataError(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// A hospitalization code with six positional slots:
///
///   [0..1] category   [2] care type   [3..4] counter   [5] severity
///
/// or the Death sentinel, which compares unequal to every slotted code.
/// Five-character inputs are canonicalized with a '_' severity placeholder.
class DiagnosisCode {
 public:
  static DiagnosisCode death() noexcept {
    DiagnosisCode c;
    c.death_ = true;
    return c;
  }

  bool is_death() const noexcept { return death_; }

  std::string_view category() const noexcept { return {slots_.data(), 2}; }
  char care_type() const noexcept { return slots_[2]; }
  std::string_view counter() const noexcept { return {slots_.data() + 3, 2}; }
  char severity() const noexcept { return slots_[5]; }
  bool has_severity() const noexcept { return slots_[5] != kMissingSeverity; }

  // All six slots as one string view (empty for Death).
  std::string_view slots() const noexcept {
    return death_ ? std::string_view{} : std::string_view{slots_.data(), slots_.size()};
  }

  std::string render() const {
    return death_ ? std::string(kDeathToken) : std::string(slots_.data(), slots_.size());
  }

  friend bool operator==(const DiagnosisCode&, const DiagnosisCode&) = default;
  friend auto operator<=>(const DiagnosisCode&, const DiagnosisCode&) = default;

 private:
  friend DiagnosisCode parse_code(std::string_view text);

  bool death_ = false;
  std::array<char, 6> slots_{'0', '0', '0', '0', '0', kMissingSeverity};
};

// Parses "Death" (any case), a 6-character code, or a 5-character code
// lacking severity. Throws CodeError.
DiagnosisCode parse_code(std::string_view text);

}  // namespace hfpath
