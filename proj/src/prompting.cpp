#include "mixenc/prompting.hpp"

#include <unordered_set>

namespace mixenc::prompting {

namespace {

constexpr std::string_view kDatamarkOpen = "«" "DATA»";
constexpr std::string_view kDatamarkClose = "«/DATA»";

// Trailing newlines (and trailing spaces/tabs around them) are dropped so
// the instruction/payload separator is always exactly one blank line.
std::string trim_trailing_newlines(std::string_view text) {
    std::size_t end = text.size();
    while (end > 0) {
        const char c = text[end - 1];
        if (c == '\n' || c == '\r' || c == ' ' || c == '\t') {
            --end;
        } else {
            break;
        }
    }
    return std::string(text.substr(0, end));
}

std::string escape_datamark(std::string_view content) {
    std::string out;
    out.reserve(content.size());
    std::size_t pos = 0;
    while (pos < content.size()) {
        const std::size_t open = content.find(kDatamarkOpen, pos);
        const std::size_t close = content.find(kDatamarkClose, pos);
        const std::size_t hit = std::min(open, close);
        if (hit == std::string_view::npos) {
            out += content.substr(pos);
            break;
        }
        std::string_view marker = (hit == close) ? kDatamarkClose : kDatamarkOpen;
        out += content.substr(pos, hit - pos);
        out += marker;
        out += marker;  // doubled to escape
        pos = hit + marker.size();
    }
    return out;
}

}  // namespace

void validate_task(const UserTask& task) {
    if (task.task_kind == TaskKind::Classification) {
        if (task.label_set.size() < 2) {
            throw PromptError("classification task needs a label set of at least 2 labels");
        }
        std::unordered_set<std::string_view> seen;
        for (const auto& label : task.label_set) {
            if (!seen.insert(label).second) {
                throw PromptError("labels must be pairwise distinct: " + label);
            }
        }
    } else if (!task.label_set.empty()) {
        throw PromptError("generation task must not carry a label set");
    }
}

std::string render_template(
    std::string_view tpl,
    const std::vector<std::pair<std::string_view, std::string_view>>& values) {
    std::string out;
    out.reserve(tpl.size());
    std::size_t pos = 0;
    while (pos < tpl.size()) {
        const std::size_t open = tpl.find('{', pos);
        if (open == std::string_view::npos) {
            out += tpl.substr(pos);
            break;
        }
        out += tpl.substr(pos, open - pos);
        const std::size_t close = tpl.find('}', open);
        if (close == std::string_view::npos) {
            throw PromptError("unterminated placeholder in template");
        }
        const std::string_view name = tpl.substr(open + 1, close - open - 1);
        bool found = false;
        for (const auto& [key, value] : values) {
            if (key == name) {
                out += value;
                found = true;
                break;
            }
        }
        if (!found) {
            throw PromptError("unknown placeholder {" + std::string(name) + "}");
        }
        pos = close + 1;
    }
    return out;
}

std::string meta_prompt_mp1(const encodings::Scheme& scheme) {
    return render_template(templates::kMp1,
                           {{"scheme", encodings::display_name(scheme.kind)}});
}

std::string_view meta_prompt_mp2() { return templates::kMp2; }

std::string build_plain_prompt(const UserTask& task, const ExternalDocument& doc) {
    return render_template(templates::kPlain, {{"instruction", trim_trailing_newlines(task.instruction)},
                                               {"payload", doc.content}});
}

std::string build_encoded_prompt(const UserTask& task, const ExternalDocument& doc,
                                 const encodings::Scheme& scheme, bool allow_plain) {
    if (scheme.kind == encodings::Kind::Plain) {
        if (!allow_plain) {
            throw PromptError("encoded prompt requires a non-plain scheme");
        }
        return build_plain_prompt(task, doc);
    }
    return render_template(templates::kEncoded,
                           {{"instruction", trim_trailing_newlines(task.instruction)},
                            {"mp1", meta_prompt_mp1(scheme)},
                            {"payload", encodings::encode(scheme, doc.content)}});
}

std::string build_aggregation_prompt(std::string_view r1, std::string_view r2,
                                     std::string_view r3, std::string_view instruction) {
    std::string body = render_template(
        templates::kAggregation,
        {{"mp2", templates::kMp2}, {"r1", r1}, {"r2", r2}, {"r3", r3}});
    if (instruction.empty()) return body;
    return trim_trailing_newlines(instruction) + "\n\n" + body;
}

std::string build_datamark_prompt(const UserTask& task, const ExternalDocument& doc) {
    return render_template(templates::kDatamark,
                           {{"instruction", trim_trailing_newlines(task.instruction)},
                            {"announce", templates::kDatamarkAnnounce},
                            {"payload", escape_datamark(doc.content)}});
}

std::string build_ignoring_prompt(const UserTask& task, const ExternalDocument& doc) {
    return render_template(templates::kIgnoring,
                           {{"instruction", trim_trailing_newlines(task.instruction)},
                            {"sentence", templates::kIgnoringSentence},
                            {"payload", doc.content}});
}

PromptBundle build_bundle(const UserTask& task, const ExternalDocument& doc, int caesar_shift) {
    PromptBundle bundle;
    bundle.scheme_p2 = encodings::Scheme::base64();
    bundle.scheme_p3 = encodings::Scheme::caesar(caesar_shift);
    bundle.p1 = build_plain_prompt(task, doc);
    bundle.p2 = build_encoded_prompt(task, doc, bundle.scheme_p2);
    bundle.p3 = build_encoded_prompt(task, doc, bundle.scheme_p3);
    bundle.meta_template = std::string(templates::kMp2);
    return bundle;
}

}  // namespace mixenc::prompting
