#pragma once

#include <cstdint>
#include <functional>
#include <string_view>

namespace mixenc {

/// Local token estimator used whenever a provider does not report usage:
/// ceil(UTF-8 bytes / 4). Empty text counts as zero tokens.
std::int64_t count_tokens(std::string_view text);

/// Pluggable tokenizer hook; defaults to count_tokens everywhere.
using TokenCounter = std::function<std::int64_t(std::string_view)>;

TokenCounter default_token_counter();

}  // namespace mixenc
