#pragma once

// Plain text to alphabet codes. Each line of input is one decode.

#include <array>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "repstat/corpus.hpp"
#include "repstat/error.hpp"

namespace repstat {

struct NormalizationPolicy {
  enum class Invalid { strip, error };

  std::string alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZ";
  bool case_fold = true;
  Invalid on_invalid = Invalid::error;

  int alphabet_size() const { return static_cast<int>(alphabet.size()); }
};

/// Byte to code lookup for a policy.
class Normalizer {
 public:
  explicit Normalizer(NormalizationPolicy policy) : policy_(std::move(policy)) {
    if (policy_.alphabet.size() < 2 || policy_.alphabet.size() > 256) {
      throw DataError("alphabet must have between 2 and 256 symbols");
    }
    codes_.fill(-1);
    for (std::size_t i = 0; i < policy_.alphabet.size(); ++i) {
      const auto ch = fold(static_cast<unsigned char>(policy_.alphabet[i]));
      if (codes_[ch] != -1) {
        throw DataError(std::string("alphabet symbol '") + policy_.alphabet[i] + "' is repeated" +
                        (policy_.case_fold ? " (after case folding)" : ""));
      }
      codes_[ch] = static_cast<int>(i);
    }
  }

  const NormalizationPolicy& policy() const noexcept { return policy_; }
  int alphabet_size() const { return policy_.alphabet_size(); }

  /// Codes for one line of text. `base_offset` is the byte offset of `line` in its file.
  std::vector<Symbol> encode(std::string_view line, std::size_t base_offset = 0) const {
    std::vector<Symbol> out;
    out.reserve(line.size());
    for (std::size_t i = 0; i < line.size(); ++i) {
      const int code = codes_[fold(static_cast<unsigned char>(line[i]))];
      if (code >= 0) {
        out.push_back(static_cast<Symbol>(code));
      } else if (policy_.on_invalid == NormalizationPolicy::Invalid::error) {
        throw ParseError(std::string("character '") + describe(line[i]) + "' is not in the alphabet",
                         base_offset + i);
      }
    }
    return out;
  }

  /// Splits text on line breaks and encodes each nonempty line as a decode.
  std::vector<std::vector<Symbol>> decodes(std::string_view text) const {
    std::vector<std::vector<Symbol>> out;
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(start, end - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      auto codes = encode(line, start);
      if (!codes.empty()) out.push_back(std::move(codes));
      start = end + 1;
    }
    return out;
  }

  /// All letters of a text as one sequence (line breaks dropped).
  std::vector<Symbol> sequence(std::string_view text) const {
    std::vector<Symbol> out;
    for (auto& d : decodes(text)) out.insert(out.end(), d.begin(), d.end());
    return out;
  }

 private:
  unsigned char fold(unsigned char ch) const {
    return policy_.case_fold ? static_cast<unsigned char>(std::toupper(ch)) : ch;
  }

  static std::string describe(char ch) {
    const auto u = static_cast<unsigned char>(ch);
    if (std::isprint(u)) return std::string(1, ch);
    static const char* hex = "0123456789abcdef";
    return std::string("\\x") + hex[u >> 4] + hex[u & 15];
  }

  NormalizationPolicy policy_;
  std::array<int, 256> codes_{};
};

}  // namespace repstat
