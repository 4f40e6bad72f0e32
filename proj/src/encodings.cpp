#include "mixenc/encodings.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <unordered_map>

namespace mixenc::encodings {

namespace {

constexpr std::string_view kBase64Alphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
constexpr std::string_view kBase32Alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZ234567";
// Bitcoin alphabet: no 0, O, I, l.
constexpr std::string_view kBase58Alphabet =
    "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz";

std::array<int, 256> make_reverse_table(std::string_view alphabet) {
    std::array<int, 256> table{};
    table.fill(-1);
    for (std::size_t i = 0; i < alphabet.size(); ++i) {
        table[static_cast<unsigned char>(alphabet[i])] = static_cast<int>(i);
    }
    return table;
}

const std::array<int, 256> kBase64Reverse = make_reverse_table(kBase64Alphabet);
const std::array<int, 256> kBase32Reverse = make_reverse_table(kBase32Alphabet);
const std::array<int, 256> kBase58Reverse = make_reverse_table(kBase58Alphabet);

std::string base64_encode(std::string_view in) {
    std::string out;
    out.reserve((in.size() + 2) / 3 * 4);
    std::size_t i = 0;
    while (i + 3 <= in.size()) {
        std::uint32_t n = (static_cast<unsigned char>(in[i]) << 16) |
                          (static_cast<unsigned char>(in[i + 1]) << 8) |
                          static_cast<unsigned char>(in[i + 2]);
        out.push_back(kBase64Alphabet[(n >> 18) & 0x3F]);
        out.push_back(kBase64Alphabet[(n >> 12) & 0x3F]);
        out.push_back(kBase64Alphabet[(n >> 6) & 0x3F]);
        out.push_back(kBase64Alphabet[n & 0x3F]);
        i += 3;
    }
    const std::size_t rest = in.size() - i;
    if (rest == 1) {
        std::uint32_t n = static_cast<unsigned char>(in[i]) << 16;
        out.push_back(kBase64Alphabet[(n >> 18) & 0x3F]);
        out.push_back(kBase64Alphabet[(n >> 12) & 0x3F]);
        out.push_back('=');
        out.push_back('=');
    } else if (rest == 2) {
        std::uint32_t n = (static_cast<unsigned char>(in[i]) << 16) |
                          (static_cast<unsigned char>(in[i + 1]) << 8);
        out.push_back(kBase64Alphabet[(n >> 18) & 0x3F]);
        out.push_back(kBase64Alphabet[(n >> 12) & 0x3F]);
        out.push_back(kBase64Alphabet[(n >> 6) & 0x3F]);
        out.push_back('=');
    }
    return out;
}

std::string base64_decode(std::string_view in) {
    if (in.empty()) return "";
    if (in.size() % 4 != 0) {
        throw MalformedEncoding("base64 length must be a multiple of 4");
    }
    std::size_t pad = 0;
    while (pad < in.size() && in[in.size() - 1 - pad] == '=') ++pad;
    if (pad > 2) throw MalformedEncoding("too much base64 padding");
    std::string_view data = in.substr(0, in.size() - pad);
    const std::size_t rem = data.size() % 4;
    if ((pad == 2 && rem != 2) || (pad == 1 && rem != 3) || (pad == 0 && rem != 0)) {
        throw MalformedEncoding("bad base64 padding");
    }
    std::string out;
    out.reserve(data.size() / 4 * 3 + 2);
    std::uint32_t buf = 0;
    int bits = 0;
    for (char c : data) {
        const int v = kBase64Reverse[static_cast<unsigned char>(c)];
        if (v < 0) throw MalformedEncoding("invalid base64 character");
        buf = (buf << 6) | static_cast<std::uint32_t>(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<char>((buf >> bits) & 0xFF));
        }
    }
    return out;
}

std::string base32_encode(std::string_view in) {
    std::string out;
    out.reserve((in.size() + 4) / 5 * 8);
    std::uint64_t buf = 0;
    int bits = 0;
    for (char c : in) {
        buf = (buf << 8) | static_cast<unsigned char>(c);
        bits += 8;
        while (bits >= 5) {
            bits -= 5;
            out.push_back(kBase32Alphabet[(buf >> bits) & 0x1F]);
        }
    }
    if (bits > 0) {
        out.push_back(kBase32Alphabet[(buf << (5 - bits)) & 0x1F]);
    }
    while (out.size() % 8 != 0) out.push_back('=');
    return out;
}

std::string base32_decode(std::string_view in) {
    if (in.empty()) return "";
    if (in.size() % 8 != 0) {
        throw MalformedEncoding("base32 length must be a multiple of 8");
    }
    std::size_t pad = 0;
    while (pad < in.size() && in[in.size() - 1 - pad] == '=') ++pad;
    if (pad != 0 && pad != 1 && pad != 3 && pad != 4 && pad != 6) {
        throw MalformedEncoding("bad base32 padding");
    }
    std::string_view data = in.substr(0, in.size() - pad);
    std::string out;
    out.reserve(data.size() * 5 / 8 + 4);
    std::uint64_t buf = 0;
    int bits = 0;
    for (char c : data) {
        const int v = kBase32Reverse[static_cast<unsigned char>(c)];
        if (v < 0) throw MalformedEncoding("invalid base32 character");
        buf = (buf << 5) | static_cast<std::uint32_t>(v);
        bits += 5;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<char>((buf >> bits) & 0xFF));
        }
    }
    return out;
}

std::string base58_encode(std::string_view in) {
    std::size_t zeros = 0;
    while (zeros < in.size() && in[zeros] == '\0') ++zeros;
    std::vector<unsigned char> digits;  // little-endian base-58
    digits.reserve(in.size() * 138 / 100 + 1);
    for (std::size_t i = zeros; i < in.size(); ++i) {
        int carry = static_cast<unsigned char>(in[i]);
        for (auto& d : digits) {
            const int v = d * 256 + carry;
            d = static_cast<unsigned char>(v % 58);
            carry = v / 58;
        }
        while (carry > 0) {
            digits.push_back(static_cast<unsigned char>(carry % 58));
            carry /= 58;
        }
    }
    std::string out(zeros, '1');
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
        out.push_back(kBase58Alphabet[*it]);
    }
    return out;
}

std::string base58_decode(std::string_view in) {
    std::size_t zeros = 0;
    while (zeros < in.size() && in[zeros] == '1') ++zeros;
    std::vector<unsigned char> bytes;  // little-endian base-256
    bytes.reserve(in.size() * 733 / 1000 + 1);
    for (std::size_t i = zeros; i < in.size(); ++i) {
        const int v = kBase58Reverse[static_cast<unsigned char>(in[i])];
        if (v < 0) throw MalformedEncoding("invalid base58 character");
        int carry = v;
        for (auto& b : bytes) {
            const int t = b * 58 + carry;
            b = static_cast<unsigned char>(t & 0xFF);
            carry = t >> 8;
        }
        while (carry > 0) {
            bytes.push_back(static_cast<unsigned char>(carry & 0xFF));
            carry >>= 8;
        }
    }
    std::string out(zeros, '\0');
    for (auto it = bytes.rbegin(); it != bytes.rend(); ++it) {
        out.push_back(static_cast<char>(*it));
    }
    return out;
}

std::string caesar_shift(std::string_view in, int shift) {
    std::string out(in);
    for (char& c : out) {
        if (c >= 'a' && c <= 'z') {
            c = static_cast<char>('a' + (c - 'a' + shift) % 26);
        } else if (c >= 'A' && c <= 'Z') {
            c = static_cast<char>('A' + (c - 'A' + shift) % 26);
        }
    }
    return out;
}

std::string atbash(std::string_view in) {
    std::string out(in);
    for (char& c : out) {
        if (c >= 'a' && c <= 'z') {
            c = static_cast<char>('a' + ('z' - c));
        } else if (c >= 'A' && c <= 'Z') {
            c = static_cast<char>('A' + ('Z' - c));
        }
    }
    return out;
}

// ITU table for A-Z and 0-9 plus common punctuation. Letters are separated
// by one space, words by " / ".
const std::unordered_map<char, std::string>& morse_table() {
    static const std::unordered_map<char, std::string> table = {
        {'A', ".-"},      {'B', "-..."},    {'C', "-.-."},   {'D', "-.."},
        {'E', "."},       {'F', "..-."},    {'G', "--."},    {'H', "...."},
        {'I', ".."},      {'J', ".---"},    {'K', "-.-"},    {'L', ".-.."},
        {'M', "--"},      {'N', "-."},      {'O', "---"},    {'P', ".--."},
        {'Q', "--.-"},    {'R', ".-."},     {'S', "..."},    {'T', "-"},
        {'U', "..-"},     {'V', "...-"},    {'W', ".--"},    {'X', "-..-"},
        {'Y', "-.--"},    {'Z', "--.."},    {'0', "-----"},  {'1', ".----"},
        {'2', "..---"},   {'3', "...--"},   {'4', "....-"},  {'5', "....."},
        {'6', "-...."},   {'7', "--..."},   {'8', "---.."},  {'9', "----."},
        {'.', ".-.-.-"},  {',', "--..--"},  {'?', "..--.."}, {'\'', ".----."},
        {'!', "-.-.--"},  {'/', "-..-."},   {'(', "-.--."},  {')', "-.--.-"},
        {'&', ".-..."},   {':', "---..."},  {';', "-.-.-."}, {'=', "-...-"},
        {'+', ".-.-."},   {'-', "-....-"},  {'_', "..--.-"}, {'"', ".-..-."},
        {'$', "...-..-"}, {'@', ".--.-."},
    };
    return table;
}

const std::unordered_map<std::string, char>& morse_reverse_table() {
    static const std::unordered_map<std::string, char> table = [] {
        std::unordered_map<std::string, char> rev;
        for (const auto& [c, pattern] : morse_table()) rev[pattern] = c;
        return rev;
    }();
    return table;
}

std::string morse_encode(std::string_view in) {
    if (in.empty()) return "";
    std::string out;
    std::string word;
    const auto& table = morse_table();
    auto flush_word = [&] {
        if (word.empty()) {
            throw UnsupportedCharacter("Morse domain requires single spaces between words");
        }
        if (!out.empty()) out += " / ";
        out += word;
        word.clear();
    };
    for (char c : in) {
        if (static_cast<unsigned char>(c) > 127) {
            throw UnsupportedCharacter("non-ASCII character has no Morse mapping");
        }
        if (c == ' ') {
            flush_word();
            continue;
        }
        const char folded = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        auto it = table.find(folded);
        if (it == table.end()) {
            throw UnsupportedCharacter(std::string("character '") + c + "' has no Morse mapping");
        }
        if (!word.empty()) word += ' ';
        word += it->second;
    }
    flush_word();
    return out;
}

std::string morse_decode(std::string_view in) {
    if (in.empty()) return "";
    std::string out;
    const auto& rev = morse_reverse_table();
    std::size_t pos = 0;
    while (pos <= in.size()) {
        const std::size_t next = in.find(' ', pos);
        const std::string token(in.substr(pos, next == std::string_view::npos ? next : next - pos));
        if (token.empty()) {
            throw MalformedEncoding("empty Morse token");
        }
        if (token == "/") {
            out += ' ';
        } else {
            auto it = rev.find(token);
            if (it == rev.end()) {
                throw MalformedEncoding("unknown Morse pattern: " + token);
            }
            out += it->second;
        }
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

std::string ascii_decimal_encode(std::string_view in) {
    std::string out;
    for (char c : in) {
        const auto code = static_cast<unsigned char>(c);
        if (code > 127) {
            throw UnsupportedCharacter("code point above 127 not in ASCII decimal domain");
        }
        if (!out.empty()) out += ' ';
        out += std::to_string(code);
    }
    return out;
}

std::string ascii_decimal_decode(std::string_view in) {
    if (in.empty()) return "";
    std::string out;
    std::size_t pos = 0;
    while (pos <= in.size()) {
        const std::size_t next = in.find(' ', pos);
        const std::string_view token =
            in.substr(pos, next == std::string_view::npos ? next : next - pos);
        if (token.empty()) {
            throw MalformedEncoding("empty ASCII decimal token");
        }
        if (token.size() > 1 && token[0] == '0') {
            throw MalformedEncoding("non-canonical ASCII decimal token");
        }
        int value = 0;
        for (char c : token) {
            if (c < '0' || c > '9') throw MalformedEncoding("invalid ASCII decimal digit");
            value = value * 10 + (c - '0');
            if (value > 127) throw MalformedEncoding("ASCII decimal value above 127");
        }
        out.push_back(static_cast<char>(value));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

}  // namespace

void validate_scheme(const Scheme& scheme) {
    if (scheme.kind == Kind::Caesar && (scheme.shift < 1 || scheme.shift > 25)) {
        throw std::invalid_argument("Caesar shift must be in 1..25");
    }
}

std::string encode(const Scheme& scheme, std::string_view text) {
    validate_scheme(scheme);
    switch (scheme.kind) {
        case Kind::Plain: return std::string(text);
        case Kind::Base64: return base64_encode(text);
        case Kind::Caesar: return caesar_shift(text, scheme.shift);
        case Kind::Atbash: return atbash(text);
        case Kind::Base32: return base32_encode(text);
        case Kind::Base58: return base58_encode(text);
        case Kind::Morse: return morse_encode(text);
        case Kind::AsciiDecimal: return ascii_decimal_encode(text);
    }
    throw std::invalid_argument("unknown encoding kind");
}

std::string decode(const Scheme& scheme, std::string_view encoded) {
    validate_scheme(scheme);
    switch (scheme.kind) {
        case Kind::Plain: return std::string(encoded);
        case Kind::Base64: return base64_decode(encoded);
        case Kind::Caesar: return caesar_shift(encoded, 26 - scheme.shift);
        case Kind::Atbash: return atbash(encoded);
        case Kind::Base32: return base32_decode(encoded);
        case Kind::Base58: return base58_decode(encoded);
        case Kind::Morse: return morse_decode(encoded);
        case Kind::AsciiDecimal: return ascii_decimal_decode(encoded);
    }
    throw std::invalid_argument("unknown encoding kind");
}

ExpansionReport expansion_ratio(const Scheme& scheme, const std::vector<std::string>& corpus,
                                std::string_view corpus_id) {
    if (corpus.empty()) throw EmptyCorpus("expansion_ratio needs a non-empty corpus");
    double sum = 0.0;
    std::size_t counted = 0;
    for (const auto& item : corpus) {
        const std::size_t original = utf8_length(item);
        if (original == 0) continue;  // zero-length items are skipped
        const std::size_t encoded = utf8_length(encode(scheme, item));
        sum += static_cast<double>(encoded) / static_cast<double>(original);
        ++counted;
    }
    if (counted == 0) throw EmptyCorpus("corpus contains only empty items");
    return ExpansionReport{scheme, std::string(corpus_id), sum / static_cast<double>(counted),
                           counted};
}

std::string_view kind_name(Kind kind) {
    switch (kind) {
        case Kind::Plain: return "plain";
        case Kind::Base64: return "base64";
        case Kind::Caesar: return "caesar";
        case Kind::Atbash: return "atbash";
        case Kind::Base32: return "base32";
        case Kind::Base58: return "base58";
        case Kind::Morse: return "morse";
        case Kind::AsciiDecimal: return "ascii";
    }
    return "unknown";
}

std::string_view display_name(Kind kind) {
    switch (kind) {
        case Kind::Plain: return "Plain";
        case Kind::Base64: return "Base64";
        case Kind::Caesar: return "Caesar";
        case Kind::Atbash: return "Atbash";
        case Kind::Base32: return "Base32";
        case Kind::Base58: return "Base58";
        case Kind::Morse: return "Morse";
        case Kind::AsciiDecimal: return "ASCII decimal";
    }
    return "unknown";
}

std::optional<Scheme> parse_scheme(std::string_view name, int shift) {
    if (name == "plain") return Scheme::plain();
    if (name == "base64") return Scheme::base64();
    if (name == "caesar") return Scheme::caesar(shift);
    if (name == "atbash") return Scheme::atbash();
    if (name == "base32") return Scheme::base32();
    if (name == "base58") return Scheme::base58();
    if (name == "morse") return Scheme::morse();
    if (name == "ascii") return Scheme::ascii_decimal();
    return std::nullopt;
}

std::size_t utf8_length(std::string_view text) {
    std::size_t count = 0;
    for (char c : text) {
        if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++count;
    }
    return count;
}

}  // namespace mixenc::encodings
