#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

#include "json.hpp"
#include "mixenc/dataset.hpp"

namespace mixenc::dataset {

namespace {

using nlohmann::json;

[[noreturn]] void fail(std::string_view source, std::size_t line, const std::string& why) {
    std::ostringstream msg;
    msg << source << ":" << line << ": " << why;
    throw DatasetError(msg.str());
}

json parse_line(std::string_view source, std::size_t line, const std::string& raw) {
    json record;
    try {
        record = json::parse(raw);
    } catch (const json::parse_error& e) {
        fail(source, line, std::string("invalid JSON: ") + e.what());
    }
    if (!record.is_object()) fail(source, line, "record must be a JSON object");
    return record;
}

std::string require_string(const json& record, const char* key, std::string_view source,
                           std::size_t line) {
    if (!record.contains(key) || !record[key].is_string()) {
        fail(source, line, std::string("missing string field \"") + key + "\"");
    }
    std::string value = record[key].get<std::string>();
    if (value.empty()) fail(source, line, std::string("field \"") + key + "\" must be non-empty");
    return value;
}

std::string optional_string(const json& record, const char* key, std::string_view fallback,
                            std::string_view source, std::size_t line) {
    if (!record.contains(key)) return std::string(fallback);
    if (!record[key].is_string()) {
        fail(source, line, std::string("field \"") + key + "\" must be a string");
    }
    return record[key].get<std::string>();
}

bool optional_bool(const json& record, const char* key, bool fallback, std::string_view source,
                   std::size_t line) {
    if (!record.contains(key)) return fallback;
    if (!record[key].is_boolean()) {
        fail(source, line, std::string("field \"") + key + "\" must be a boolean");
    }
    return record[key].get<bool>();
}

prompting::UserTask parse_task(const json& record, std::string_view source, std::size_t line) {
    prompting::UserTask task;
    task.instruction = require_string(record, "instruction", source, line);
    const std::string kind = require_string(record, "task_kind", source, line);
    if (kind == "classification") {
        task.task_kind = prompting::TaskKind::Classification;
    } else if (kind == "generation") {
        task.task_kind = prompting::TaskKind::Generation;
    } else {
        fail(source, line, "task_kind must be \"classification\" or \"generation\"");
    }
    if (record.contains("label_set")) {
        if (!record["label_set"].is_array()) fail(source, line, "label_set must be an array");
        for (const auto& label : record["label_set"]) {
            if (!label.is_string()) fail(source, line, "label_set entries must be strings");
            task.label_set.push_back(label.get<std::string>());
        }
    }
    try {
        prompting::validate_task(task);
    } catch (const prompting::PromptError& e) {
        fail(source, line, e.what());
    }
    return task;
}

void for_each_line(std::string_view text, std::string_view source,
                   const std::function<void(std::size_t, const std::string&)>& fn) {
    std::size_t line_number = 0;
    std::size_t begin = 0;
    bool any = false;
    while (begin <= text.size()) {
        std::size_t end = text.find('\n', begin);
        if (end == std::string_view::npos) end = text.size();
        std::string raw(text.substr(begin, end - begin));
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        ++line_number;
        const bool blank = raw.find_first_not_of(" \t") == std::string::npos;
        if (!blank) {
            fn(line_number, raw);
            any = true;
        }
        if (end == text.size()) break;
        begin = end + 1;
    }
    if (!any) fail(source, line_number == 0 ? 1 : line_number, "no records found");
}

}  // namespace

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DatasetError("cannot open file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

AttackLibrary parse_attack_library(std::string_view text, std::string_view source_name) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(source_name, 1, std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) fail(source_name, 1, "attack library must be a JSON object");
    AttackLibrary library;
    for (const auto& [key, value] : doc.items()) {
        if (!value.is_string() || value.get<std::string>().empty()) {
            fail(source_name, 1, "attack \"" + key + "\" must map to a non-empty string");
        }
        library[key] = value.get<std::string>();
    }
    if (library.empty()) fail(source_name, 1, "attack library is empty");
    return library;
}

AttackLibrary load_attack_library(const std::string& path) {
    return parse_attack_library(read_file(path), path);
}

std::vector<eval::AttackCase> parse_attack_cases(std::string_view text,
                                                 const AttackLibrary* library,
                                                 std::string_view source_name) {
    std::vector<eval::AttackCase> cases;
    for_each_line(text, source_name, [&](std::size_t line, const std::string& raw) {
        const json record = parse_line(source_name, line, raw);
        eval::AttackCase attack_case;
        attack_case.id = require_string(record, "id", source_name, line);
        attack_case.task = parse_task(record, source_name, line);
        attack_case.doc.content = require_string(record, "content", source_name, line);

        attack_case.attack_id = optional_string(record, "attack_id", "", source_name, line);
        attack_case.attack_text = optional_string(record, "attack_text", "", source_name, line);
        if (attack_case.attack_text.empty()) {
            if (attack_case.attack_id.empty()) {
                fail(source_name, line, "record needs attack_text or attack_id");
            }
            if (library == nullptr) {
                fail(source_name, line,
                     "attack_id \"" + attack_case.attack_id + "\" used without an attack library");
            }
            auto found = library->find(attack_case.attack_id);
            if (found == library->end()) {
                fail(source_name, line, "unknown attack_id \"" + attack_case.attack_id + "\"");
            }
            attack_case.attack_text = found->second;
        }

        const std::string where = optional_string(record, "insertion", "end", source_name, line);
        const auto insertion = eval::parse_insertion(where);
        if (!insertion.has_value()) {
            fail(source_name, line, "insertion must be start, middle, or end");
        }
        attack_case.insertion = *insertion;

        attack_case.matcher.pattern = require_string(record, "matcher", source_name, line);
        attack_case.matcher.is_regex =
            optional_bool(record, "matcher_is_regex", false, source_name, line);
        attack_case.matcher.case_insensitive =
            optional_bool(record, "matcher_case_insensitive", true, source_name, line);
        cases.push_back(std::move(attack_case));
    });
    return cases;
}

std::vector<eval::AttackCase> load_attack_cases(const std::string& path,
                                                const AttackLibrary* library) {
    return parse_attack_cases(read_file(path), library, path);
}

std::vector<eval::TaskSample> parse_task_samples(std::string_view text,
                                                 std::string_view source_name) {
    std::vector<eval::TaskSample> samples;
    for_each_line(text, source_name, [&](std::size_t line, const std::string& raw) {
        const json record = parse_line(source_name, line, raw);
        eval::TaskSample sample;
        sample.id = require_string(record, "id", source_name, line);
        sample.task = parse_task(record, source_name, line);
        sample.doc.content = require_string(record, "content", source_name, line);

        const std::string reference = require_string(record, "reference", source_name, line);
        if (sample.task.task_kind == prompting::TaskKind::Classification) {
            const auto& labels = sample.task.label_set;
            const auto found = std::find(labels.begin(), labels.end(), reference);
            if (found == labels.end()) {
                fail(source_name, line, "reference \"" + reference + "\" is not in label_set");
            }
            sample.reference_label = static_cast<std::size_t>(found - labels.begin());
            sample.metric = eval::Metric::Accuracy;
        } else {
            sample.reference_text = reference;
            const std::string metric =
                optional_string(record, "metric", "exact_match", source_name, line);
            const auto parsed = eval::parse_metric(metric);
            if (!parsed.has_value()) fail(source_name, line, "unknown metric \"" + metric + "\"");
            sample.metric = *parsed;
        }
        samples.push_back(std::move(sample));
    });
    return samples;
}

std::vector<eval::TaskSample> load_task_samples(const std::string& path) {
    return parse_task_samples(read_file(path), path);
}

}  // namespace mixenc::dataset
