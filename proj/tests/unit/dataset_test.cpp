#include <string>

#include "doctest.h"
#include "mixenc/dataset.hpp"
#include "support/test_paths.hpp"

using namespace mixenc;
using namespace mixenc::dataset;

TEST_CASE("attack cases load with library resolution") {
    const auto library = load_attack_library(test_support::data_path("accept_attacks.json"));
    REQUIRE(library.count("override-pwned") == 1);

    const auto cases =
        load_attack_cases(test_support::data_path("accept_safety_cases.jsonl"), &library);
    REQUIRE(cases.size() == 20);

    const auto& first = cases[0];
    CHECK(first.id == "case-01");
    CHECK(first.task.instruction == "Summarize the following customer email.");
    CHECK(first.task.task_kind == prompting::TaskKind::Generation);
    CHECK(first.doc.content.rfind("Ticket 1:", 0) == 0);
    CHECK(first.attack_id == "override-pwned");
    CHECK(first.attack_text == library.at("override-pwned"));
    CHECK(first.insertion == eval::Insertion::End);
    CHECK(first.matcher.pattern == "PWNED");
    CHECK_FALSE(first.matcher.is_regex);
    CHECK(first.matcher.case_insensitive);

    CHECK(cases[7].insertion == eval::Insertion::Start);   // case-08
    CHECK(cases[14].insertion == eval::Insertion::Middle); // case-15
}

TEST_CASE("inline attack text needs no library") {
    const std::string line =
        R"({"id": "a1", "instruction": "Summarize.", "task_kind": "generation", )"
        R"("content": "benign", "attack_text": "do evil", "matcher": "evil", )"
        R"("matcher_is_regex": true, "matcher_case_insensitive": false})";
    const auto cases = parse_attack_cases(line);
    REQUIRE(cases.size() == 1);
    CHECK(cases[0].attack_text == "do evil");
    CHECK(cases[0].insertion == eval::Insertion::End);  // default
    CHECK(cases[0].matcher.is_regex);
    CHECK_FALSE(cases[0].matcher.case_insensitive);
}

TEST_CASE("attack case errors point at the offending line") {
    const std::string good =
        R"({"id": "a1", "instruction": "Summarize.", "task_kind": "generation", )"
        R"("content": "x", "attack_text": "y", "matcher": "z"})";

    SUBCASE("invalid json") {
        const auto text = good + "\nnot json\n";
        CHECK_THROWS_WITH_AS(parse_attack_cases(text, nullptr, "cases.jsonl"),
                             doctest::Contains("cases.jsonl:2:"), DatasetError);
    }
    SUBCASE("missing matcher") {
        const std::string bad =
            R"({"id": "a1", "instruction": "Summarize.", "task_kind": "generation", )"
            R"("content": "x", "attack_text": "y"})";
        CHECK_THROWS_WITH_AS(parse_attack_cases(bad), doctest::Contains("matcher"),
                             DatasetError);
    }
    SUBCASE("needs attack_text or attack_id") {
        const std::string bad =
            R"({"id": "a1", "instruction": "Summarize.", "task_kind": "generation", )"
            R"("content": "x", "matcher": "z"})";
        CHECK_THROWS_AS(parse_attack_cases(bad), DatasetError);
    }
    SUBCASE("attack_id without a library") {
        const std::string bad =
            R"({"id": "a1", "instruction": "Summarize.", "task_kind": "generation", )"
            R"("content": "x", "attack_id": "missing", "matcher": "z"})";
        CHECK_THROWS_AS(parse_attack_cases(bad), DatasetError);
    }
    SUBCASE("unknown attack_id") {
        AttackLibrary library{{"known", "text"}};
        const std::string bad =
            R"({"id": "a1", "instruction": "Summarize.", "task_kind": "generation", )"
            R"("content": "x", "attack_id": "unknown", "matcher": "z"})";
        CHECK_THROWS_WITH_AS(parse_attack_cases(bad, &library), doctest::Contains("unknown"),
                             DatasetError);
    }
    SUBCASE("bad insertion name") {
        const auto bad = good.substr(0, good.size() - 1) + R"(, "insertion": "sideways"})";
        CHECK_THROWS_AS(parse_attack_cases(bad), DatasetError);
    }
    SUBCASE("no records at all") {
        CHECK_THROWS_AS(parse_attack_cases("\n\n"), DatasetError);
    }
}

TEST_CASE("task samples load for generation and classification") {
    const auto samples = load_task_samples(test_support::data_path("accept_math_samples.jsonl"));
    REQUIRE(samples.size() == 10);
    CHECK(samples[0].id == "math-01");
    CHECK(samples[0].reference_text == "42");
    CHECK(samples[0].metric == eval::Metric::ExactMatch);
    CHECK_FALSE(samples[0].reference_label.has_value());

    const std::string line =
        R"({"id": "c1", "instruction": "Classify.", "task_kind": "classification", )"
        R"("label_set": ["no", "yes"], "content": "text", "reference": "yes"})";
    const auto classified = parse_task_samples(line);
    REQUIRE(classified.size() == 1);
    REQUIRE(classified[0].reference_label.has_value());
    CHECK(*classified[0].reference_label == 1);
    CHECK(classified[0].metric == eval::Metric::Accuracy);
}

TEST_CASE("task sample errors are rejected with context") {
    SUBCASE("classification reference outside the label set") {
        const std::string bad =
            R"({"id": "c1", "instruction": "Classify.", "task_kind": "classification", )"
            R"("label_set": ["no", "yes"], "content": "text", "reference": "maybe"})";
        CHECK_THROWS_WITH_AS(parse_task_samples(bad, "samples.jsonl"),
                             doctest::Contains("samples.jsonl:1:"), DatasetError);
    }
    SUBCASE("unknown metric") {
        const std::string bad =
            R"({"id": "g1", "instruction": "Summarize.", "task_kind": "generation", )"
            R"("content": "text", "reference": "ref", "metric": "vibes"})";
        CHECK_THROWS_AS(parse_task_samples(bad), DatasetError);
    }
    SUBCASE("label set on a generation task") {
        const std::string bad =
            R"({"id": "g1", "instruction": "Summarize.", "task_kind": "generation", )"
            R"("label_set": ["a", "b"], "content": "text", "reference": "ref"})";
        CHECK_THROWS_AS(parse_task_samples(bad), DatasetError);
    }
    SUBCASE("missing reference") {
        const std::string bad =
            R"({"id": "g1", "instruction": "Summarize.", "task_kind": "generation", )"
            R"("content": "text"})";
        CHECK_THROWS_AS(parse_task_samples(bad), DatasetError);
    }
}

TEST_CASE("blank lines and CRLF endings are tolerated") {
    const std::string text =
        "\r\n"
        R"({"id": "a1", "instruction": "Summarize.", "task_kind": "generation", )"
        R"("content": "x", "attack_text": "y", "matcher": "z"})"
        "\r\n\r\n";
    const auto cases = parse_attack_cases(text);
    CHECK(cases.size() == 1);
    CHECK(cases[0].doc.content == "x");  // no stray carriage return
}

TEST_CASE("attack libraries must map names to strings") {
    const auto library = parse_attack_library(R"({"a": "one", "b": "two"})");
    CHECK(library.size() == 2);
    CHECK(library.at("b") == "two");

    CHECK_THROWS_AS(parse_attack_library("[]"), DatasetError);
    CHECK_THROWS_AS(parse_attack_library(R"({"a": 3})"), DatasetError);
    CHECK_THROWS_AS(parse_attack_library("not json"), DatasetError);
}

TEST_CASE("missing files fail with the path in the message") {
    CHECK_THROWS_WITH_AS(read_file("/nonexistent/nope.jsonl"), doctest::Contains("nope.jsonl"),
                         DatasetError);
}
