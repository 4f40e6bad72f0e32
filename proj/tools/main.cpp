// mixenc — command-line front end for the encoding defense library.
//
// Subcommands map one-to-one onto library operations; this file only does
// argument handling and I/O.

#include <signal.h>
#include <unistd.h>

#include <csignal>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "mixenc/dataset.hpp"
#include "mixenc/defense.hpp"
#include "mixenc/encodings.hpp"
#include "mixenc/eval.hpp"
#include "mixenc/gateway.hpp"
#include "mixenc/mock_backend.hpp"

namespace {

using namespace mixenc;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

std::string read_stdin() {
    std::ios::sync_with_stdio(false);
    return std::string(std::istreambuf_iterator<char>(std::cin),
                       std::istreambuf_iterator<char>());
}

std::string read_file_or_die(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

encodings::Scheme scheme_or_die(const std::string& name, int shift) {
    const auto scheme = encodings::parse_scheme(name, shift);
    if (!scheme.has_value()) {
        throw CLI::ValidationError("--scheme", "unknown scheme \"" + name + "\"");
    }
    encodings::validate_scheme(*scheme);
    return *scheme;
}

defense::Strategy strategy_or_die(const std::string& name, int shift) {
    const auto strategy = defense::parse_strategy(name, shift);
    if (!strategy.has_value()) {
        throw CLI::ValidationError("--strategy", "unknown strategy \"" + name + "\"");
    }
    return *strategy;
}

gateway::Config config_for(const std::string& config_path, const std::string& mock_script) {
    gateway::Config config;
    if (!config_path.empty()) {
        config = gateway::load_config(config_path);
    }
    if (!mock_script.empty()) {
        config.backend_kind = "mock";
        config.mock_script = mock_script;
    }
    return config;
}

struct EncodeArgs {
    std::string scheme;
    int shift = 3;
    bool decode = false;
};

int run_encode(const EncodeArgs& args) {
    const auto scheme = scheme_or_die(args.scheme, args.shift);
    const std::string input = read_stdin();
    std::cout << (args.decode ? encodings::decode(scheme, input)
                              : encodings::encode(scheme, input));
    return kExitOk;
}

struct DefendArgs {
    std::string strategy = "mixture";
    int shift = 3;
    std::string instruction;
    std::string file;
    std::string text;
    std::string task_kind = "generation";
    std::vector<std::string> labels;
    std::string config_path;
    std::string mock_script;
    bool include_audit = false;
    int workers = 3;
};

int run_defend(const DefendArgs& args) {
    prompting::UserTask task;
    task.instruction = args.instruction;
    if (args.task_kind == "classification") {
        task.task_kind = prompting::TaskKind::Classification;
        task.label_set = args.labels;
    } else if (args.task_kind == "generation") {
        task.task_kind = prompting::TaskKind::Generation;
    } else {
        throw CLI::ValidationError("--task-kind", "must be classification or generation");
    }
    prompting::validate_task(task);

    prompting::ExternalDocument doc;
    if (!args.file.empty()) {
        doc.content = read_file_or_die(args.file);
        doc.source_id = args.file;
    } else {
        doc.content = args.text;
    }

    const auto strategy = strategy_or_die(args.strategy, args.shift);
    const auto config = config_for(args.config_path, args.mock_script);
    const auto backend = gateway::make_backend(config);

    defense::Options options;
    options.parallelism = args.workers;
    options.max_output_tokens = config.max_output_tokens;

    defense::Audit audit;
    std::string final_text;
    if (task.task_kind == prompting::TaskKind::Classification) {
        auto [index, out] = defense::defend_classification(task, doc, strategy, *backend, options);
        audit = std::move(out);
        final_text = task.label_set[index];
    } else {
        auto [text, out] = defense::defend_generation(task, doc, strategy, *backend, options);
        audit = std::move(out);
        final_text = std::move(text);
    }

    if (args.include_audit) {
        nlohmann::json body = {{"final", final_text},
                               {"audit", nlohmann::json::parse(gateway::audit_json_text(audit))}};
        std::cout << body.dump(2) << "\n";
    } else {
        std::cout << final_text << "\n";
    }
    return kExitOk;
}

struct BenchArgs {
    std::string cases_path;     // safety
    std::string samples_path;   // helpfulness
    std::string attacks_path;
    std::vector<std::string> strategies;
    int shift = 3;
    int workers = 4;
    std::string config_path;
    std::string mock_script;
    std::string json_out;
    std::string dataset_id;
};

int run_bench(const BenchArgs& args, bool safety) {
    const auto config = config_for(args.config_path, args.mock_script);
    const auto backend = gateway::make_backend(config);

    eval::EvalOptions options;
    options.workers = args.workers;
    options.defend.max_output_tokens = config.max_output_tokens;
    options.defend.parallelism = config.parallelism;

    std::string dataset_id = args.dataset_id;
    std::vector<eval::MetricReport> reports;
    if (safety) {
        dataset::AttackLibrary library;
        const dataset::AttackLibrary* library_ptr = nullptr;
        if (!args.attacks_path.empty()) {
            library = dataset::load_attack_library(args.attacks_path);
            library_ptr = &library;
        }
        const auto cases = dataset::load_attack_cases(args.cases_path, library_ptr);
        if (dataset_id.empty()) dataset_id = args.cases_path;
        for (const auto& name : args.strategies) {
            const auto strategy = strategy_or_die(name, args.shift);
            reports.push_back(
                eval::run_safety_bench(cases, strategy, *backend, options, dataset_id));
        }
    } else {
        const auto samples = dataset::load_task_samples(args.samples_path);
        if (dataset_id.empty()) dataset_id = args.samples_path;
        for (const auto& name : args.strategies) {
            const auto strategy = strategy_or_die(name, args.shift);
            reports.push_back(
                eval::run_helpfulness_bench(samples, strategy, *backend, options, dataset_id));
        }
    }
    eval::normalize_costs(reports);
    std::cout << eval::render_table(reports);
    if (!args.json_out.empty()) {
        std::ofstream out(args.json_out, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + args.json_out);
        out << eval::results_json(reports, safety ? "safety" : "helpfulness");
    }
    return kExitOk;
}

struct CostArgs {
    std::string audit_log;
};

// The audit log is one audit JSON object per line, as emitted by
// `defend --include-audit` (its "audit" field) or the service.
int run_cost_report(const CostArgs& args) {
    const std::string text = read_file_or_die(args.audit_log);
    std::istringstream stream(text);
    std::string line;
    std::size_t line_number = 0;
    std::int64_t total = 0;
    std::size_t audits = 0;
    while (std::getline(stream, line)) {
        ++line_number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw std::runtime_error(args.audit_log + ":" + std::to_string(line_number) +
                                     ": invalid JSON: " + e.what());
        }
        const nlohmann::json& audit_obj = record.contains("audit") ? record["audit"] : record;
        if (!audit_obj.is_object() || !audit_obj.contains("calls") ||
            !audit_obj["calls"].is_array()) {
            throw std::runtime_error(args.audit_log + ":" + std::to_string(line_number) +
                                     ": record has no calls array");
        }
        defense::Audit audit;
        for (const auto& call : audit_obj["calls"]) {
            defense::CallRecord rec;
            rec.usage.input_tokens = call.value("usage", nlohmann::json::object())
                                         .value("input_tokens", std::int64_t{0});
            rec.usage.output_tokens = call.value("usage", nlohmann::json::object())
                                          .value("output_tokens", std::int64_t{0});
            audit.calls.push_back(std::move(rec));
        }
        const std::int64_t cost = eval::cost_units(audit);
        std::cout << line_number << "\t" << cost << "\n";
        total += cost;
        ++audits;
    }
    if (audits == 0) throw std::runtime_error(args.audit_log + ": no audit records");
    std::cout << "total\t" << total << "\n";
    return kExitOk;
}

struct ExpansionArgs {
    std::string scheme;
    int shift = 3;
    std::string corpus_path;
};

int run_expansion(const ExpansionArgs& args) {
    const auto scheme = scheme_or_die(args.scheme, args.shift);
    const std::string text = read_file_or_die(args.corpus_path);
    std::vector<std::string> items;
    std::istringstream stream(text);
    std::string line;
    while (std::getline(stream, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        items.push_back(line);
    }
    const auto report = encodings::expansion_ratio(scheme, items, args.corpus_path);
    std::cout << encodings::kind_name(scheme.kind) << "\t" << report.sample_count << "\t"
              << std::fixed << std::setprecision(4) << report.mean_ratio << "\n";
    return kExitOk;
}

struct ServeArgs {
    std::string config_path;
};

int run_serve(const ServeArgs& args) {
    auto config = gateway::load_config(args.config_path);
    auto backend = gateway::make_backend(config);
    if (!backend->probe()) {
        std::cerr << "warning: backend probe failed; serving anyway\n";
    }

    // Signal handlers cannot safely stop the server (joins, mutexes), so
    // block SIGINT/SIGTERM in every thread and drain them with sigwait on
    // a dedicated thread instead. Blocking before start() makes the
    // server's worker threads inherit the mask.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    gateway::Server server(std::move(config), std::move(backend));
    if (!server.start()) throw std::runtime_error("could not bind listen address");
    std::cerr << "listening on port " << server.port() << "\n";

    std::thread stopper([&] {
        int signal_number = 0;
        sigwait(&signals, &signal_number);
        server.stop();
    });
    server.wait();
    // If the server stopped on its own, nudge the signal thread awake.
    kill(getpid(), SIGTERM);
    stopper.join();
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Encoding-mixture defense toolkit"};
    app.require_subcommand(1);

    EncodeArgs encode_args;
    auto* encode = app.add_subcommand("encode", "Encode or decode stdin to stdout");
    encode->add_option("--scheme", encode_args.scheme,
                       "plain|base64|base32|base58|caesar|atbash|morse|ascii")
        ->required();
    encode->add_option("--shift", encode_args.shift, "Caesar shift (1-25)");
    encode->add_flag("--decode", encode_args.decode, "Decode instead of encode");

    DefendArgs defend_args;
    auto* defend = app.add_subcommand("defend", "Run one defended request");
    defend->add_option("--strategy", defend_args.strategy,
                       "none|datamark|ignoring|base64|caesar|mixture");
    defend->add_option("--shift", defend_args.shift, "Caesar shift (1-25)");
    defend->add_option("--instruction", defend_args.instruction, "Trusted user instruction")
        ->required();
    auto* defend_file = defend->add_option("--file", defend_args.file, "External text file");
    defend->add_option("--text", defend_args.text, "External text inline")
        ->excludes(defend_file);
    defend->add_option("--task-kind", defend_args.task_kind, "classification|generation");
    defend->add_option("--labels", defend_args.labels, "Classification labels")->delimiter(',');
    defend->add_option("--config", defend_args.config_path, "Service config file");
    defend->add_option("--mock-script", defend_args.mock_script, "Mock backend script");
    defend->add_flag("--include-audit", defend_args.include_audit, "Print JSON with audit");
    defend->add_option("--workers", defend_args.workers, "Per-request call parallelism");

    BenchArgs safety_args;
    auto* bench_safety = app.add_subcommand("bench-safety", "Attack-success benchmark");
    bench_safety->add_option("--cases", safety_args.cases_path, "Attack cases JSONL")->required();
    bench_safety->add_option("--attacks", safety_args.attacks_path, "Attack library JSON");
    bench_safety->add_option("--strategy", safety_args.strategies, "Strategy (repeatable)")
        ->required();
    bench_safety->add_option("--shift", safety_args.shift, "Caesar shift (1-25)");
    bench_safety->add_option("--workers", safety_args.workers, "Concurrent cases");
    bench_safety->add_option("--config", safety_args.config_path, "Service config file");
    bench_safety->add_option("--mock-script", safety_args.mock_script, "Mock backend script");
    bench_safety->add_option("--json", safety_args.json_out, "Write results JSON here");
    bench_safety->add_option("--dataset-id", safety_args.dataset_id, "Dataset label in reports");

    BenchArgs help_args;
    auto* bench_help = app.add_subcommand("bench-helpfulness", "Task-quality benchmark");
    bench_help->add_option("--samples", help_args.samples_path, "Task samples JSONL")->required();
    bench_help->add_option("--strategy", help_args.strategies, "Strategy (repeatable)")
        ->required();
    bench_help->add_option("--shift", help_args.shift, "Caesar shift (1-25)");
    bench_help->add_option("--workers", help_args.workers, "Concurrent cases");
    bench_help->add_option("--config", help_args.config_path, "Service config file");
    bench_help->add_option("--mock-script", help_args.mock_script, "Mock backend script");
    bench_help->add_option("--json", help_args.json_out, "Write results JSON here");
    bench_help->add_option("--dataset-id", help_args.dataset_id, "Dataset label in reports");

    CostArgs cost_args;
    auto* cost = app.add_subcommand("cost-report", "Cost units from an audit log");
    cost->add_option("--audit-log", cost_args.audit_log, "Audit JSONL file")->required();

    ExpansionArgs expansion_args;
    auto* expansion = app.add_subcommand("expansion", "Mean length expansion over a corpus");
    expansion->add_option("--scheme", expansion_args.scheme, "Scheme name")->required();
    expansion->add_option("--shift", expansion_args.shift, "Caesar shift (1-25)");
    expansion->add_option("--corpus", expansion_args.corpus_path, "Corpus file, one item per line")
        ->required();

    ServeArgs serve_args;
    auto* serve = app.add_subcommand("serve", "Run the defense HTTP service");
    serve->add_option("--config", serve_args.config_path, "Service config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e) == 0 ? kExitOk : kExitOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (encode->parsed()) return run_encode(encode_args);
        if (defend->parsed()) return run_defend(defend_args);
        if (bench_safety->parsed()) return run_bench(safety_args, /*safety=*/true);
        if (bench_help->parsed()) return run_bench(help_args, /*safety=*/false);
        if (cost->parsed()) return run_cost_report(cost_args);
        if (expansion->parsed()) return run_expansion(expansion_args);
        if (serve->parsed()) return run_serve(serve_args);
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
