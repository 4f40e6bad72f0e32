#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mixenc/backend.hpp"
#include "mixenc/label_distribution.hpp"
#include "mixenc/prompting.hpp"

namespace mixenc::defense {

enum class StrategyKind { NoDefense, Datamark, Ignoring, Base64Only, CaesarOnly, Mixture };

struct Strategy {
    StrategyKind kind = StrategyKind::Mixture;
    int caesar_shift = 3;  // CaesarOnly and Mixture only
};

std::string_view strategy_name(StrategyKind kind);
/// Parses "none", "datamark", "ignoring", "base64", "caesar", "mixture".
std::optional<Strategy> parse_strategy(std::string_view name, int caesar_shift = 3);

class DimensionMismatch : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Elementwise sum of the three distributions, then argmax. Ties resolve
/// to the lowest label index.
std::size_t aggregate_labels(const LabelDistribution& p1, const LabelDistribution& p2,
                             const LabelDistribution& p3);

/// One backend call as recorded in the audit trail. ok=false flags a failed
/// path that was substituted per the degradation rules.
struct CallRecord {
    std::string prompt;
    std::string response;
    backend::Usage usage;
    bool ok = true;
    std::string error;
    double latency_ms = 0.0;
};

/// Per-request trace: every call with its usage, plus the final answer.
struct Audit {
    Strategy strategy;
    std::vector<CallRecord> calls;
    std::string final_text;
    std::optional<std::size_t> final_label;
    std::int64_t total_input_tokens = 0;
    std::int64_t total_output_tokens = 0;

    std::size_t failed_calls() const;
};

/// Raised when a defense cannot produce an answer at all (the lone call of a
/// single-prompt strategy failed, or the aggregation call did). Carries the
/// audit gathered up to that point so callers can still report the trace.
class DefenseFailure : public backend::BackendError {
  public:
    DefenseFailure(backend::ErrorKind kind, const std::string& message, Audit audit)
        : backend::BackendError(kind, message), audit_(std::move(audit)) {}
    const Audit& audit() const { return audit_; }

  private:
    Audit audit_;
};

struct Options {
    int max_output_tokens = 1024;
    int parallelism = 3;
    // When set, the aggregation prompt is prefixed with the original user
    // instruction (off by default; the base layout carries only the meta
    // prompt and the three responses).
    bool aggregation_includes_instruction = false;
};

/// Prompt(s) a strategy sends: NoDefense/Datamark/Ignoring/Base64Only/
/// CaesarOnly produce one prompt; Mixture produces plaintext, Base64 and
/// Caesar in that order.
std::vector<std::string> apply_strategy_prompt(const prompting::UserTask& task,
                                               const prompting::ExternalDocument& doc,
                                               const Strategy& strategy);

/// Classification defense: per-path label distributions are summed and the
/// argmax label index returned. A path without usable scores contributes a
/// one-hot parsed from its text, or uniform if unparseable; a failed path
/// contributes uniform.
std::pair<std::size_t, Audit> defend_classification(const prompting::UserTask& task,
                                                    const prompting::ExternalDocument& doc,
                                                    const Strategy& strategy,
                                                    backend::ChatBackend& backend,
                                                    const Options& options = {});

/// Generation defense: Mixture gathers the three responses, issues the
/// aggregation prompt and returns its answer (4 calls total); every other
/// strategy returns its single response. A failed encoded path leaves an
/// empty slot and is flagged in the audit.
std::pair<std::string, Audit> defend_generation(const prompting::UserTask& task,
                                                const prompting::ExternalDocument& doc,
                                                const Strategy& strategy,
                                                backend::ChatBackend& backend,
                                                const Options& options = {});

/// The answer string an end user sees: label text for classification,
/// response text for generation.
std::string final_output_text(const prompting::UserTask& task, const Audit& audit);

}  // namespace mixenc::defense
