#include "mixenc/defense.hpp"

#include <algorithm>
#include <cctype>

namespace mixenc::defense {

namespace {

std::size_t argmax_lowest(const std::vector<double>& values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) best = i;
    }
    return best;
}

std::string fold(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    const std::size_t begin = out.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const std::size_t end = out.find_last_not_of(" \t\r\n");
    return out.substr(begin, end - begin + 1);
}

// One-hot over the label the response text names, if it names exactly one.
std::optional<std::size_t> parse_label_index(std::string_view text,
                                             const std::vector<std::string>& labels) {
    const std::string folded = fold(text);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (folded == fold(labels[i])) return i;
    }
    std::optional<std::size_t> contained;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (folded.find(fold(labels[i])) != std::string::npos) {
            if (contained.has_value()) return std::nullopt;  // ambiguous
            contained = i;
        }
    }
    return contained;
}

LabelDistribution path_distribution(const backend::CallResult& result,
                                    const std::vector<std::string>& labels) {
    if (!result.ok) return LabelDistribution::uniform(labels.size());
    if (result.response.label_distribution.has_value()) {
        return *result.response.label_distribution;
    }
    // Score-less path: one-hot from the text, uniform when unparseable.
    if (auto index = parse_label_index(result.response.text, labels)) {
        return LabelDistribution::one_hot(labels.size(), *index);
    }
    return LabelDistribution::uniform(labels.size());
}

CallRecord record_call(const std::string& prompt, const backend::CallResult& result) {
    CallRecord record;
    record.prompt = prompt;
    record.ok = result.ok;
    if (result.ok) {
        record.response = result.response.text;
        record.usage = result.response.usage;
        record.latency_ms = result.response.latency_ms;
    } else {
        record.error = result.error;
    }
    return record;
}

void finish_totals(Audit& audit) {
    for (const auto& call : audit.calls) {
        audit.total_input_tokens += call.usage.input_tokens;
        audit.total_output_tokens += call.usage.output_tokens;
    }
}

}  // namespace

std::string_view strategy_name(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::NoDefense: return "none";
        case StrategyKind::Datamark: return "datamark";
        case StrategyKind::Ignoring: return "ignoring";
        case StrategyKind::Base64Only: return "base64";
        case StrategyKind::CaesarOnly: return "caesar";
        case StrategyKind::Mixture: return "mixture";
    }
    return "unknown";
}

std::optional<Strategy> parse_strategy(std::string_view name, int caesar_shift) {
    if (name == "none") return Strategy{StrategyKind::NoDefense, caesar_shift};
    if (name == "datamark") return Strategy{StrategyKind::Datamark, caesar_shift};
    if (name == "ignoring") return Strategy{StrategyKind::Ignoring, caesar_shift};
    if (name == "base64") return Strategy{StrategyKind::Base64Only, caesar_shift};
    if (name == "caesar") return Strategy{StrategyKind::CaesarOnly, caesar_shift};
    if (name == "mixture") return Strategy{StrategyKind::Mixture, caesar_shift};
    return std::nullopt;
}

std::size_t aggregate_labels(const LabelDistribution& p1, const LabelDistribution& p2,
                             const LabelDistribution& p3) {
    if (p1.size() != p2.size() || p1.size() != p3.size()) {
        throw DimensionMismatch("label distributions are not aligned");
    }
    if (p1.size() == 0) throw DimensionMismatch("empty label distributions");
    std::vector<double> sums(p1.size());
    for (std::size_t i = 0; i < sums.size(); ++i) {
        sums[i] = p1.probabilities[i] + p2.probabilities[i] + p3.probabilities[i];
    }
    return argmax_lowest(sums);
}

std::size_t Audit::failed_calls() const {
    return static_cast<std::size_t>(
        std::count_if(calls.begin(), calls.end(), [](const CallRecord& c) { return !c.ok; }));
}

std::vector<std::string> apply_strategy_prompt(const prompting::UserTask& task,
                                               const prompting::ExternalDocument& doc,
                                               const Strategy& strategy) {
    switch (strategy.kind) {
        case StrategyKind::NoDefense:
            return {prompting::build_plain_prompt(task, doc)};
        case StrategyKind::Datamark:
            return {prompting::build_datamark_prompt(task, doc)};
        case StrategyKind::Ignoring:
            return {prompting::build_ignoring_prompt(task, doc)};
        case StrategyKind::Base64Only:
            return {prompting::build_encoded_prompt(task, doc, encodings::Scheme::base64())};
        case StrategyKind::CaesarOnly:
            return {prompting::build_encoded_prompt(task, doc,
                                                    encodings::Scheme::caesar(strategy.caesar_shift))};
        case StrategyKind::Mixture: {
            auto bundle = prompting::build_bundle(task, doc, strategy.caesar_shift);
            return {std::move(bundle.p1), std::move(bundle.p2), std::move(bundle.p3)};
        }
    }
    throw std::invalid_argument("unknown strategy kind");
}

std::pair<std::size_t, Audit> defend_classification(const prompting::UserTask& task,
                                                    const prompting::ExternalDocument& doc,
                                                    const Strategy& strategy,
                                                    backend::ChatBackend& backend,
                                                    const Options& options) {
    prompting::validate_task(task);
    if (task.task_kind != prompting::TaskKind::Classification) {
        throw std::invalid_argument("defend_classification needs a classification task");
    }

    const std::vector<std::string> prompts = apply_strategy_prompt(task, doc, strategy);
    std::vector<backend::ChatRequest> requests;
    requests.reserve(prompts.size());
    for (const auto& prompt : prompts) {
        backend::ChatRequest request;
        request.prompt = prompt;
        request.want_label_scores = true;
        request.label_set = task.label_set;
        request.max_output_tokens = options.max_output_tokens;
        requests.push_back(std::move(request));
    }
    const auto results = backend::complete_many(backend, requests, options.parallelism);

    Audit audit;
    audit.strategy = strategy;
    for (std::size_t i = 0; i < results.size(); ++i) {
        audit.calls.push_back(record_call(prompts[i], results[i]));
    }

    std::size_t label_index = 0;
    if (strategy.kind == StrategyKind::Mixture) {
        label_index = aggregate_labels(path_distribution(results[0], task.label_set),
                                       path_distribution(results[1], task.label_set),
                                       path_distribution(results[2], task.label_set));
    } else {
        label_index = argmax_lowest(path_distribution(results[0], task.label_set).probabilities);
    }
    audit.final_label = label_index;
    audit.final_text = task.label_set[label_index];
    finish_totals(audit);
    return {label_index, audit};
}

std::pair<std::string, Audit> defend_generation(const prompting::UserTask& task,
                                                const prompting::ExternalDocument& doc,
                                                const Strategy& strategy,
                                                backend::ChatBackend& backend,
                                                const Options& options) {
    prompting::validate_task(task);
    if (task.task_kind != prompting::TaskKind::Generation) {
        throw std::invalid_argument("defend_generation needs a generation task");
    }

    const std::vector<std::string> prompts = apply_strategy_prompt(task, doc, strategy);
    std::vector<backend::ChatRequest> requests;
    requests.reserve(prompts.size());
    for (const auto& prompt : prompts) {
        backend::ChatRequest request;
        request.prompt = prompt;
        request.max_output_tokens = options.max_output_tokens;
        requests.push_back(std::move(request));
    }
    const auto results = backend::complete_many(backend, requests, options.parallelism);

    Audit audit;
    audit.strategy = strategy;
    for (std::size_t i = 0; i < results.size(); ++i) {
        audit.calls.push_back(record_call(prompts[i], results[i]));
    }

    if (strategy.kind != StrategyKind::Mixture) {
        if (!results[0].ok) {
            finish_totals(audit);
            throw DefenseFailure(results[0].error_kind, results[0].error, std::move(audit));
        }
        audit.final_text = results[0].response.text;
        finish_totals(audit);
        return {audit.final_text, audit};
    }

    // Failed encoded paths degrade to empty slots; the aggregation call
    // still sees the surviving answers.
    const std::string r1 = results[0].ok ? results[0].response.text : "";
    const std::string r2 = results[1].ok ? results[1].response.text : "";
    const std::string r3 = results[2].ok ? results[2].response.text : "";
    const std::string aggregation_prompt = prompting::build_aggregation_prompt(
        r1, r2, r3, options.aggregation_includes_instruction ? task.instruction : std::string_view{});

    backend::ChatRequest aggregation_request;
    aggregation_request.prompt = aggregation_prompt;
    aggregation_request.max_output_tokens = options.max_output_tokens;

    CallRecord aggregation_record;
    aggregation_record.prompt = aggregation_prompt;
    try {
        const auto response = backend.complete(aggregation_request);
        aggregation_record.response = response.text;
        aggregation_record.usage = response.usage;
        aggregation_record.latency_ms = response.latency_ms;
        audit.calls.push_back(std::move(aggregation_record));
        audit.final_text = response.text;
    } catch (const backend::BackendError& e) {
        aggregation_record.ok = false;
        aggregation_record.error = e.what();
        audit.calls.push_back(std::move(aggregation_record));
        finish_totals(audit);
        throw DefenseFailure(e.kind(), e.what(), std::move(audit));
    }
    finish_totals(audit);
    return {audit.final_text, audit};
}

std::string final_output_text(const prompting::UserTask& task, const Audit& audit) {
    if (task.task_kind == prompting::TaskKind::Classification && audit.final_label.has_value()) {
        return task.label_set[*audit.final_label];
    }
    return audit.final_text;
}

}  // namespace mixenc::defense
