#pragma once

#include <string_view>

namespace covspec {

/// True for common English function words (fixed list, lowercase input).
bool is_stopword(std::string_view word) noexcept;

}  // namespace covspec
