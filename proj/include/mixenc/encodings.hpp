#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mixenc::encodings {

enum class Kind {
    Plain,
    Base64,
    Caesar,
    Atbash,
    Base32,
    Base58,
    Morse,
    AsciiDecimal,
};

/// One reversible text transform. `shift` is meaningful for Caesar only
/// (positions down the alphabet, 1..25).
struct Scheme {
    Kind kind = Kind::Plain;
    int shift = 3;

    static Scheme plain() { return {Kind::Plain, 0}; }
    static Scheme base64() { return {Kind::Base64, 0}; }
    static Scheme caesar(int shift = 3) { return {Kind::Caesar, shift}; }
    static Scheme atbash() { return {Kind::Atbash, 0}; }
    static Scheme base32() { return {Kind::Base32, 0}; }
    static Scheme base58() { return {Kind::Base58, 0}; }
    static Scheme morse() { return {Kind::Morse, 0}; }
    static Scheme ascii_decimal() { return {Kind::AsciiDecimal, 0}; }
};

class EncodingError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input contains a character outside the scheme's domain (e.g. non-ASCII
/// for Morse). The caller must pick another scheme or pre-normalize.
class UnsupportedCharacter : public EncodingError {
    using EncodingError::EncodingError;
};

/// Encoded text is syntactically invalid for the scheme (bad Base64
/// padding, character outside the scheme alphabet, ...).
class MalformedEncoding : public EncodingError {
    using EncodingError::EncodingError;
};

class EmptyCorpus : public EncodingError {
    using EncodingError::EncodingError;
};

/// Mean length expansion of a scheme over a corpus, in code points.
struct ExpansionReport {
    Scheme scheme;
    std::string corpus_id;
    double mean_ratio = 0.0;
    std::size_t sample_count = 0;
};

/// Throws std::invalid_argument if the scheme is ill-formed
/// (Caesar shift outside 1..25).
void validate_scheme(const Scheme& scheme);

std::string encode(const Scheme& scheme, std::string_view text);
std::string decode(const Scheme& scheme, std::string_view encoded);

ExpansionReport expansion_ratio(const Scheme& scheme, const std::vector<std::string>& corpus,
                                std::string_view corpus_id = "");

/// Lowercase identifier used on the CLI and in config files ("base64", "caesar", ...).
std::string_view kind_name(Kind kind);
/// Human-readable name used inside prompts ("Base64", "Caesar", ...).
std::string_view display_name(Kind kind);
/// Parses a kind_name; shift applies when the name is "caesar".
std::optional<Scheme> parse_scheme(std::string_view name, int shift = 3);

/// Number of Unicode code points in a UTF-8 string.
std::size_t utf8_length(std::string_view text);

}  // namespace mixenc::encodings
