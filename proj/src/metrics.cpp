#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

#include "mixenc/eval.hpp"

namespace mixenc::eval {

namespace {

std::vector<std::string> whitespace_tokens(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!current.empty()) {
                tokens.push_back(std::move(current));
                current.clear();
            }
        } else {
            current.push_back(c);
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

double token_f1(const std::vector<std::string>& hyp, const std::vector<std::string>& ref) {
    if (hyp.empty() || ref.empty()) return hyp.empty() && ref.empty() ? 1.0 : 0.0;
    std::map<std::string, int> ref_counts;
    for (const auto& token : ref) ++ref_counts[token];
    int overlap = 0;
    for (const auto& token : hyp) {
        auto it = ref_counts.find(token);
        if (it != ref_counts.end() && it->second > 0) {
            --it->second;
            ++overlap;
        }
    }
    if (overlap == 0) return 0.0;
    const double precision = static_cast<double>(overlap) / static_cast<double>(hyp.size());
    const double recall = static_cast<double>(overlap) / static_cast<double>(ref.size());
    return 2.0 * precision * recall / (precision + recall);
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::size_t> prev(b.size() + 1, 0);
    std::vector<std::size_t> curr(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            curr[j] = (a[i - 1] == b[j - 1]) ? prev[j - 1] + 1 : std::max(prev[j], curr[j - 1]);
        }
        std::swap(prev, curr);
    }
    return prev[b.size()];
}

double rouge_l(const std::vector<std::string>& hyp, const std::vector<std::string>& ref) {
    if (hyp.empty() || ref.empty()) return 0.0;
    const auto lcs = static_cast<double>(lcs_length(hyp, ref));
    if (lcs == 0.0) return 0.0;
    const double precision = lcs / static_cast<double>(hyp.size());
    const double recall = lcs / static_cast<double>(ref.size());
    return 2.0 * precision * recall / (precision + recall);
}

int ngram_matches(const std::vector<std::string>& hyp, const std::vector<std::string>& ref,
                  std::size_t n) {
    if (hyp.size() < n) return 0;
    std::map<std::vector<std::string>, int> ref_counts;
    for (std::size_t i = 0; i + n <= ref.size(); ++i) {
        ++ref_counts[std::vector<std::string>(ref.begin() + i, ref.begin() + i + n)];
    }
    int matches = 0;
    for (std::size_t i = 0; i + n <= hyp.size(); ++i) {
        auto it = ref_counts.find(std::vector<std::string>(hyp.begin() + i, hyp.begin() + i + n));
        if (it != ref_counts.end() && it->second > 0) {
            --it->second;
            ++matches;
        }
    }
    return matches;
}

// BLEU-4 with add-one smoothing on every n-gram precision and the usual
// brevity penalty.
double bleu(const std::vector<std::string>& hyp, const std::vector<std::string>& ref) {
    if (hyp.empty()) return 0.0;
    double log_sum = 0.0;
    for (std::size_t n = 1; n <= 4; ++n) {
        const int total = hyp.size() >= n ? static_cast<int>(hyp.size() - n + 1) : 0;
        const int matches = ngram_matches(hyp, ref, n);
        log_sum += 0.25 * std::log((matches + 1.0) / (total + 1.0));
    }
    double brevity = 1.0;
    if (hyp.size() < ref.size()) {
        brevity = std::exp(1.0 - static_cast<double>(ref.size()) / static_cast<double>(hyp.size()));
    }
    return brevity * std::exp(log_sum);
}

}  // namespace

std::string normalize_answer(std::string_view text) {
    std::string folded;
    folded.reserve(text.size());
    for (char c : text) {
        folded.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    const auto tokens = whitespace_tokens(folded);
    std::string out;
    for (const auto& token : tokens) {
        if (!out.empty()) out += ' ';
        out += token;
    }
    if (!out.empty() && out.back() == '.') out.pop_back();
    return out;
}

double score(Metric metric, std::string_view hypothesis, std::string_view reference) {
    if (reference.empty()) throw EmptyReference("metric reference must be non-empty");
    switch (metric) {
        case Metric::Accuracy:
        case Metric::ExactMatch:
            return normalize_answer(hypothesis) == normalize_answer(reference) ? 1.0 : 0.0;
        case Metric::TokenF1:
            return token_f1(whitespace_tokens(normalize_answer(hypothesis)),
                            whitespace_tokens(normalize_answer(reference)));
        case Metric::RougeL:
            return rouge_l(whitespace_tokens(normalize_answer(hypothesis)),
                           whitespace_tokens(normalize_answer(reference)));
        case Metric::Bleu:
            return bleu(whitespace_tokens(normalize_answer(hypothesis)),
                        whitespace_tokens(normalize_answer(reference)));
    }
    throw std::invalid_argument("unknown metric");
}

std::optional<Metric> parse_metric(std::string_view name) {
    if (name == "accuracy") return Metric::Accuracy;
    if (name == "exact_match") return Metric::ExactMatch;
    if (name == "token_f1") return Metric::TokenF1;
    if (name == "rouge_l") return Metric::RougeL;
    if (name == "bleu") return Metric::Bleu;
    return std::nullopt;
}

std::string_view metric_name(Metric metric) {
    switch (metric) {
        case Metric::Accuracy: return "accuracy";
        case Metric::ExactMatch: return "exact_match";
        case Metric::TokenF1: return "token_f1";
        case Metric::RougeL: return "rouge_l";
        case Metric::Bleu: return "bleu";
    }
    return "unknown";
}

}  // namespace mixenc::eval
