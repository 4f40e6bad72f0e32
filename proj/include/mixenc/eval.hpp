#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mixenc/defense.hpp"
#include "mixenc/prompting.hpp"

namespace mixenc::eval {

class EvalError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class MissingUsage : public EvalError {
    using EvalError::EvalError;
};
class EmptyReference : public EvalError {
    using EvalError::EvalError;
};

enum class Insertion { Start, Middle, End };

std::optional<Insertion> parse_insertion(std::string_view name);
std::string_view insertion_name(Insertion insertion);

/// Regex or substring matcher checked against the final output only.
struct SuccessMatcher {
    std::string pattern;
    bool is_regex = false;
    bool case_insensitive = true;

    bool matches(std::string_view text) const;
};

/// One safety-benchmark record: a benign task plus an injected attack.
struct AttackCase {
    std::string id;
    prompting::UserTask task;
    prompting::ExternalDocument doc;  // benign content
    std::string attack_id;
    std::string attack_text;  // non-empty
    Insertion insertion = Insertion::End;
    SuccessMatcher matcher;
};

enum class Metric { Accuracy, ExactMatch, TokenF1, RougeL, Bleu };

std::optional<Metric> parse_metric(std::string_view name);
std::string_view metric_name(Metric metric);

/// One helpfulness-benchmark record.
struct TaskSample {
    std::string id;
    prompting::UserTask task;
    prompting::ExternalDocument doc;
    std::string reference_text;                 // generation reference
    std::optional<std::size_t> reference_label; // classification reference
    Metric metric = Metric::ExactMatch;
};

/// Aggregated benchmark result for one strategy over one dataset.
struct MetricReport {
    defense::Strategy strategy;
    std::string dataset_id;
    std::size_t n = 0;
    double value = 0.0;  // ASR in [0,1] or the task metric
    std::int64_t cost_units = 0;
    // Ratio vs NoDefense; absent until normalize_costs ran over a set of
    // reports that includes the NoDefense baseline.
    std::optional<double> normalized_cost;
    std::size_t failures = 0;  // backend-failed cases, flagged

    struct CaseOutcome {
        std::string id;
        bool success = false;  // safety: the attack's matcher fired
        double score = 0.0;    // helpfulness metric value
        bool failed = false;   // backend failure on this case
        std::int64_t cost_units = 0;
    };
    std::vector<CaseOutcome> cases;  // stable input order
};

/// Returns the document with attack_text placed at the requested position
/// (start: before the benign text, end: after, middle: at the nearest word
/// boundary to the midpoint). Benign content is otherwise unchanged.
prompting::ExternalDocument inject_attack(const AttackCase& attack_case);

struct EvalOptions {
    int workers = 4;
    defense::Options defend;
};

MetricReport run_safety_bench(const std::vector<AttackCase>& cases,
                              const defense::Strategy& strategy, backend::ChatBackend& backend,
                              const EvalOptions& options = {}, std::string_view dataset_id = "");

MetricReport run_helpfulness_bench(const std::vector<TaskSample>& samples,
                                   const defense::Strategy& strategy,
                                   backend::ChatBackend& backend,
                                   const EvalOptions& options = {},
                                   std::string_view dataset_id = "");

/// Scores a hypothesis against a reference in [0,1]. Accuracy/exact match
/// compare normalized strings; token F1 is the harmonic precision/recall
/// mean over whitespace tokens; ROUGE-L is LCS-based F1; BLEU uses up to
/// 4-grams with add-one smoothing and a brevity penalty.
double score(Metric metric, std::string_view hypothesis, std::string_view reference);

/// Case-fold, strip, collapse whitespace, drop one trailing period.
std::string normalize_answer(std::string_view text);

/// Appendix-style cost of one audited request: sum over calls of
/// input_tokens + 4 * output_tokens.
std::int64_t cost_units(const defense::Audit& audit);

/// Fills normalized_cost on every report, dividing by the NoDefense
/// baseline in the same set; does nothing if no baseline is present.
void normalize_costs(std::vector<MetricReport>& reports);

/// Aligned plain-text table: strategy, dataset, n, value, normalized cost.
std::string render_table(const std::vector<MetricReport>& reports);

/// Deterministic results document (stable case order, no timing data).
std::string results_json(const std::vector<MetricReport>& reports, std::string_view bench_kind);

}  // namespace mixenc::eval
