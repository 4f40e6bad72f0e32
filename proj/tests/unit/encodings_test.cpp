#include <random>

#include "doctest.h"
#include "json.hpp"
#include "mixenc/encodings.hpp"
#include "../support/test_paths.hpp"

using namespace mixenc::encodings;

namespace {

std::string random_bytes(std::mt19937& rng, std::size_t max_len) {
    std::uniform_int_distribution<int> len(0, static_cast<int>(max_len));
    std::uniform_int_distribution<int> byte(0, 255);
    std::string out;
    const int n = len(rng);
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.push_back(static_cast<char>(byte(rng)));
    return out;
}

std::string random_morse_text(std::mt19937& rng) {
    static const std::string alphabet =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789.,?'!/()&:;=+-_\"$@";
    std::uniform_int_distribution<int> words(1, 6);
    std::uniform_int_distribution<int> letters(1, 8);
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::string out;
    const int w = words(rng);
    for (int i = 0; i < w; ++i) {
        if (i > 0) out.push_back(' ');
        const int l = letters(rng);
        for (int j = 0; j < l; ++j) out.push_back(alphabet[pick(rng)]);
    }
    return out;
}

}  // namespace

TEST_CASE("base64 matches the published reference vectors") {
    CHECK(encode(Scheme::base64(), "") == "");
    CHECK(encode(Scheme::base64(), "f") == "Zg==");
    CHECK(encode(Scheme::base64(), "fo") == "Zm8=");
    CHECK(encode(Scheme::base64(), "foo") == "Zm9v");
    CHECK(encode(Scheme::base64(), "foob") == "Zm9vYg==");
    CHECK(encode(Scheme::base64(), "fooba") == "Zm9vYmE=");
    CHECK(encode(Scheme::base64(), "foobar") == "Zm9vYmFy");
    CHECK(encode(Scheme::base64(), "Hi") == "SGk=");
    CHECK(decode(Scheme::base64(), "Zm9vYmFy") == "foobar");
}

TEST_CASE("base32 matches the published reference vectors") {
    CHECK(encode(Scheme::base32(), "") == "");
    CHECK(encode(Scheme::base32(), "f") == "MY======");
    CHECK(encode(Scheme::base32(), "fo") == "MZXQ====");
    CHECK(encode(Scheme::base32(), "foo") == "MZXW6===");
    CHECK(encode(Scheme::base32(), "foob") == "MZXW6YQ=");
    CHECK(encode(Scheme::base32(), "fooba") == "MZXW6YTB");
    CHECK(encode(Scheme::base32(), "foobar") == "MZXW6YTBOI======");
    CHECK(decode(Scheme::base32(), "MZXW6YTBOI======") == "foobar");
}

TEST_CASE("base58 big-integer form with leading-zero digits") {
    CHECK(encode(Scheme::base58(), "") == "");
    CHECK(encode(Scheme::base58(), "Hi") == "6Wc");
    CHECK(encode(Scheme::base58(), "Hello World!") == "2NEpo7TZRRrLZSi2U");
    CHECK(encode(Scheme::base58(), std::string("\x00\x00Hi", 4)) == "116Wc");
    CHECK(decode(Scheme::base58(), "116Wc") == std::string("\x00\x00Hi", 4));
}

TEST_CASE("caesar shifts letters only and preserves case") {
    CHECK(encode(Scheme::caesar(3), "abc XYZ!") == "def ABC!");
    CHECK(decode(Scheme::caesar(3), "def ABC!") == "abc XYZ!");
    CHECK(encode(Scheme::caesar(25), "az") == "zy");
    CHECK(encode(Scheme::caesar(3), "Digits 123 stay.") == "Gljlwv 123 vwdb.");
}

TEST_CASE("atbash is an involution on letters") {
    CHECK(encode(Scheme::atbash(), "abz") == "zya");
    CHECK(encode(Scheme::atbash(), "Hello, World!") == "Svool, Dliow!");
    CHECK(decode(Scheme::atbash(), encode(Scheme::atbash(), "Mixed CASE text")) ==
          "Mixed CASE text");
}

TEST_CASE("morse uses the ITU table with slash word breaks") {
    CHECK(encode(Scheme::morse(), "SOS") == "... --- ...");
    CHECK(encode(Scheme::morse(), "sos") == "... --- ...");  // input is case-folded
    CHECK(encode(Scheme::morse(), "HI YOU") == ".... .. / -.-- --- ..-");
    CHECK(decode(Scheme::morse(), ".... .. / -.-- --- ..-") == "HI YOU");
    CHECK_THROWS_AS(encode(Scheme::morse(), "percent %"), UnsupportedCharacter);
    CHECK_THROWS_AS(decode(Scheme::morse(), "...---..."), MalformedEncoding);
}

TEST_CASE("ascii decimal is strict about canonical code points") {
    CHECK(encode(Scheme::ascii_decimal(), "ab") == "97 98");
    CHECK(decode(Scheme::ascii_decimal(), "97 98") == "ab");
    CHECK_THROWS_AS(encode(Scheme::ascii_decimal(), "caf\xc3\xa9"), UnsupportedCharacter);
    CHECK_THROWS_AS(decode(Scheme::ascii_decimal(), "97 098"), MalformedEncoding);
    CHECK_THROWS_AS(decode(Scheme::ascii_decimal(), "128"), MalformedEncoding);
    CHECK_THROWS_AS(decode(Scheme::ascii_decimal(), "97  98"), MalformedEncoding);
}

TEST_CASE("plain is the identity") {
    CHECK(encode(Scheme::plain(), "anything at all") == "anything at all");
    CHECK(decode(Scheme::plain(), "anything at all") == "anything at all");
}

TEST_CASE("malformed inputs are rejected rather than misdecoded") {
    CHECK_THROWS_AS(decode(Scheme::base64(), "SGk"), MalformedEncoding);     // bad padding
    CHECK_THROWS_AS(decode(Scheme::base64(), "SG!k"), MalformedEncoding);    // bad alphabet
    CHECK_THROWS_AS(decode(Scheme::base64(), "===="), MalformedEncoding);
    CHECK_THROWS_AS(decode(Scheme::base32(), "MY====="), MalformedEncoding);  // short pad
    CHECK_THROWS_AS(decode(Scheme::base58(), "0OIl"), MalformedEncoding);     // excluded chars
    // Caesar passes non-letters through untouched; it has no invalid inputs.
    CHECK(decode(Scheme::caesar(3), "caf\xc3\xa9") == "zxc\xc3\xa9");
}

TEST_CASE("scheme validation bounds the caesar shift") {
    CHECK_THROWS_AS(validate_scheme(Scheme::caesar(0)), std::invalid_argument);
    CHECK_THROWS_AS(validate_scheme(Scheme::caesar(26)), std::invalid_argument);
    CHECK_NOTHROW(validate_scheme(Scheme::caesar(1)));
    CHECK_NOTHROW(validate_scheme(Scheme::caesar(25)));
}

TEST_CASE("scheme names parse and print") {
    CHECK(kind_name(Kind::Base64) == "base64");
    CHECK(kind_name(Kind::AsciiDecimal) == "ascii");
    CHECK(display_name(Kind::Base64) == "Base64");
    CHECK(display_name(Kind::Caesar) == "Caesar");
    CHECK(parse_scheme("base58")->kind == Kind::Base58);
    CHECK(parse_scheme("caesar", 7)->shift == 7);
    CHECK_FALSE(parse_scheme("rot13").has_value());
}

TEST_CASE("round-trips hold on randomized domain-valid inputs") {
    std::mt19937 rng(0xC0FFEE);
    for (int i = 0; i < 500; ++i) {
        const std::string bytes = random_bytes(rng, 64);
        CHECK(decode(Scheme::base64(), encode(Scheme::base64(), bytes)) == bytes);
        CHECK(decode(Scheme::base32(), encode(Scheme::base32(), bytes)) == bytes);
        CHECK(decode(Scheme::base58(), encode(Scheme::base58(), bytes)) == bytes);
        CHECK(decode(Scheme::atbash(), encode(Scheme::atbash(), bytes)) == bytes);
        const int shift = 1 + (i % 25);
        CHECK(decode(Scheme::caesar(shift), encode(Scheme::caesar(shift), bytes)) == bytes);

        const std::string morse_text = random_morse_text(rng);
        CHECK(decode(Scheme::morse(), encode(Scheme::morse(), morse_text)) == morse_text);

        std::string ascii_text;
        for (char c : bytes) {
            ascii_text.push_back(static_cast<char>(static_cast<unsigned char>(c) % 128));
        }
        CHECK(decode(Scheme::ascii_decimal(), encode(Scheme::ascii_decimal(), ascii_text)) ==
              ascii_text);
    }
}

TEST_CASE("golden corpus pins base64/base32/base58 to an external reference") {
    const std::string text = test_support::slurp(test_support::data_path("rfc4648_golden.jsonl"));
    std::istringstream stream(text);
    std::string line;
    int checked = 0;
    while (std::getline(stream, line)) {
        if (line.empty()) continue;
        const auto record = nlohmann::json::parse(line);
        const std::string sample = record["text"].get<std::string>();
        CHECK(encode(Scheme::base64(), sample) == record["base64"].get<std::string>());
        CHECK(encode(Scheme::base32(), sample) == record["base32"].get<std::string>());
        CHECK(encode(Scheme::base58(), sample) == record["base58"].get<std::string>());
        CHECK(decode(Scheme::base64(), record["base64"].get<std::string>()) == sample);
        CHECK(decode(Scheme::base32(), record["base32"].get<std::string>()) == sample);
        CHECK(decode(Scheme::base58(), record["base58"].get<std::string>()) == sample);
        ++checked;
    }
    CHECK(checked == 50);
}

TEST_CASE("expansion ratio is measured in code points") {
    CHECK(expansion_ratio(Scheme::ascii_decimal(), {"ab"}).mean_ratio == doctest::Approx(2.5));
    CHECK(expansion_ratio(Scheme::base64(), {"Hi"}).mean_ratio == doctest::Approx(2.0));
    // 2-byte UTF-8 char: one code point in, four base64 chars out.
    CHECK(expansion_ratio(Scheme::base64(), {"\xc3\xa9"}).mean_ratio == doctest::Approx(4.0));
    CHECK(expansion_ratio(Scheme::plain(), {"anything"}).mean_ratio == doctest::Approx(1.0));

    const auto report = expansion_ratio(Scheme::base64(), {"Hi", "", "Hi"});
    CHECK(report.sample_count == 2);  // empty items are skipped
    CHECK(report.mean_ratio == doctest::Approx(2.0));

    CHECK_THROWS_AS(expansion_ratio(Scheme::base64(), {}), EmptyCorpus);
    CHECK_THROWS_AS(expansion_ratio(Scheme::base64(), {"", ""}), EmptyCorpus);
}

TEST_CASE("utf8_length counts code points") {
    CHECK(mixenc::encodings::utf8_length("") == 0);
    CHECK(mixenc::encodings::utf8_length("abc") == 3);
    CHECK(mixenc::encodings::utf8_length("caf\xc3\xa9") == 4);
}
