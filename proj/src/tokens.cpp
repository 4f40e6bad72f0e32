#include "mixenc/tokens.hpp"

namespace mixenc {

std::int64_t count_tokens(std::string_view text) {
    return static_cast<std::int64_t>((text.size() + 3) / 4);
}

TokenCounter default_token_counter() {
    return [](std::string_view text) { return count_tokens(text); };
}

}  // namespace mixenc
