#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mixenc/eval.hpp"

namespace mixenc::dataset {

// Raised with "source:line: why" so a bad record is easy to find.
class DatasetError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

using AttackLibrary = std::map<std::string, std::string>;

// One JSON object mapping attack_id -> attack text.
AttackLibrary parse_attack_library(std::string_view text, std::string_view source_name = "<memory>");
AttackLibrary load_attack_library(const std::string& path);

// JSONL, one attack case per line. Records may carry attack_text inline or
// reference a library entry through attack_id.
std::vector<eval::AttackCase> parse_attack_cases(std::string_view text,
                                                 const AttackLibrary* library = nullptr,
                                                 std::string_view source_name = "<memory>");
std::vector<eval::AttackCase> load_attack_cases(const std::string& path,
                                                const AttackLibrary* library = nullptr);

// JSONL, one benign task sample per line.
std::vector<eval::TaskSample> parse_task_samples(std::string_view text,
                                                 std::string_view source_name = "<memory>");
std::vector<eval::TaskSample> load_task_samples(const std::string& path);

std::string read_file(const std::string& path);

}  // namespace mixenc::dataset
