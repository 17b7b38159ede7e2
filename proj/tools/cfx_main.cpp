// cfx: command-line front end for the counterfactual explanation engine.

#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "cfx/codec.hpp"
#include "cfx/explain.hpp"
#include "cfx/grammar.hpp"
#include "cfx/service.hpp"
#include "cfx/verify.hpp"

#ifndef CFX_FIXTURES_DIR
#define CFX_FIXTURES_DIR "fixtures"
#endif

namespace {

using cfx::Json;

constexpr int kOk = 0;
constexpr int kDomainError = 1;
constexpr int kUsageError = 2;

/// Raised for unreadable inputs; maps to the usage exit code.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string env_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return (v != nullptr && *v != '\0') ? std::string(v) : fallback;
}

Json load_json(const std::string& path) {
    try {
        return cfx::read_json_file(path);
    } catch (const cfx::Error& e) {
        throw UsageError(e.what());
    }
}

/// A task file or a bare state file; either way the initial state.
cfx::GridState load_initial(const std::string& path) {
    Json j = load_json(path);
    try {
        return cfx::state_from_json(j.contains("initial") ? j["initial"] : j);
    } catch (const cfx::Error& e) {
        throw UsageError(path + ": " + e.what());
    }
}

std::vector<cfx::Action> load_actions(const std::string& path) {
    Json j = load_json(path);
    if (j.is_object() && j.contains("actions")) j = j["actions"];
    return cfx::actions_from_json(j);
}

struct Options {
    std::string format = "text";
    bool structured() const { return format == "structured"; }
};

void print_json(const Json& j) { std::cout << j.dump(2) << '\n'; }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Counterfactual explanations for a grid-world command parser"};
    app.require_subcommand(1);
    Options opts;
    app.add_option("--format", opts.format, "Output format")
        ->check(CLI::IsMember({"text", "structured"}))
        ->capture_default_str();

    const std::string fixtures = env_or("CFX_FIXTURES", CFX_FIXTURES_DIR);
    std::string lexicon_path = env_or("CFX_LEXICON", fixtures + "/lexicon.txt");
    std::string fluency_path = env_or("CFX_FLUENCY_CORPUS", fixtures + "/fluency_corpus.txt");
    std::uint64_t hash_seed = cfx::kDefaultHashSeed;

    // sentences
    int sentences_depth = cfx::kDefaultDepth;
    auto* sentences = app.add_subcommand("sentences", "List the canonical sentences up to a depth");
    sentences->add_option("--depth", sentences_depth, "Maximum number of commands")->check(CLI::PositiveNumber);

    // parse
    std::string parse_text;
    auto* parse = app.add_subcommand("parse", "Parse an utterance into a program");
    parse->add_option("text", parse_text, "Utterance")->required();

    // execute
    std::string execute_task;
    std::string execute_program;
    auto* execute = app.add_subcommand("execute", "Plan a program from a task's initial state");
    execute->add_option("--task", execute_task, "Task or state file")->required();
    execute->add_option("--program", execute_program, "Program in prefix form or as a sentence")->required();

    // explain
    std::string explain_task;
    std::string explain_utterance;
    std::string explain_demo;
    std::string explain_method = "full";
    int explain_depth = cfx::kDefaultDepth;
    std::size_t explain_top = 0;
    auto* explain = app.add_subcommand("explain", "Explain an utterance against a demonstration");
    explain->add_option("--task", explain_task, "Task or state file")->required();
    explain->add_option("--utterance", explain_utterance, "User utterance");
    explain->add_option("--demo", explain_demo, "Demonstration file (action list)");
    explain->add_option("--method", explain_method)->check(CLI::IsMember({"full", "no_demo", "no_utterance"}));
    explain->add_option("--depth", explain_depth)->check(CLI::PositiveNumber);
    explain->add_option("--top", explain_top, "Also list this many ranked candidates");
    explain->add_option("--lexicon", lexicon_path);
    explain->add_option("--fluency-corpus", fluency_path);
    explain->add_option("--hash-seed", hash_seed);

    // gen-tasks
    int gen_n = 17;
    std::uint64_t gen_seed = 7;
    std::string gen_out;
    int gen_width = 8;
    int gen_height = 8;
    auto* gen = app.add_subcommand("gen-tasks", "Generate random solvable tasks");
    gen->add_option("--n", gen_n)->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_seed);
    gen->add_option("--out", gen_out, "Task directory to write into");
    gen->add_option("--width", gen_width);
    gen->add_option("--height", gen_height);

    // corpus
    int corpus_n = 1000;
    std::uint64_t corpus_seed = 0;
    int corpus_depth = cfx::kDefaultDepth;
    auto* corpus = app.add_subcommand("corpus", "Emit (sentence, program) training pairs");
    corpus->add_option("--n", corpus_n)->check(CLI::PositiveNumber);
    corpus->add_option("--seed", corpus_seed);
    corpus->add_option("--depth", corpus_depth)->check(CLI::PositiveNumber);

    // verify
    int verify_depth = cfx::kDefaultDepth;
    std::uint64_t verify_seed = 1;
    auto* verify = app.add_subcommand("verify", "Run the oracle suites");
    verify->add_option("--depth", verify_depth)->check(CLI::PositiveNumber);
    verify->add_option("--seed", verify_seed);
    verify->add_option("--lexicon", lexicon_path);

    // serve
    cfx::ServiceConfig config;
    config.lexicon_path = lexicon_path;
    config.fluency_corpus_path = fluency_path;
    config.apply_environment();
    std::string addr;
    std::string data_dir = config.data_dir.string();
    std::string embed_endpoint;
    auto* serve = app.add_subcommand("serve", "Run the HTTP API");
    serve->add_option("--addr", addr, "host:port to listen on");
    serve->add_option("--data-dir", data_dir);
    serve->add_option("--lexicon", lexicon_path);
    serve->add_option("--fluency-corpus", fluency_path);
    serve->add_option("--embed-endpoint", embed_endpoint, "External embedding service URL");
    serve->add_option("--depth", config.depth_bound)->check(CLI::PositiveNumber);
    serve->add_option("--hash-seed", config.hash_seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsageError;
    }

    std::string op = app.get_subcommands().front()->get_name();
    if (*parse) op += " \"" + parse_text + "\"";
    if (*execute) op += " \"" + execute_program + "\" on " + execute_task;
    if (*explain) op += " \"" + explain_utterance + "\" on " + explain_task;
    try {
        if (*sentences) {
            auto all = cfx::enumerate_sentences(sentences_depth);
            if (opts.structured()) {
                Json arr = Json::array();
                for (const auto& s : all) arr.push_back(s.text());
                print_json(arr);
            } else {
                for (const auto& s : all) std::cout << s.text() << '\n';
            }
        } else if (*parse) {
            cfx::Sentence s = cfx::Sentence::from_text(parse_text);
            try {
                cfx::Program prog = cfx::parse(s);
                if (opts.structured()) {
                    Json j;
                    j["utterance"] = s.text();
                    j["program"] = cfx::to_prefix(prog);
                    j["sentence"] = cfx::unparse(prog).text();
                    print_json(j);
                } else {
                    std::cout << cfx::to_prefix(prog) << '\n';
                }
            } catch (const cfx::ParseError& e) {
                if (opts.structured()) print_json(Json{{"error", cfx::to_json(e)}});
                throw;
            }
        } else if (*execute) {
            cfx::GridState initial = load_initial(execute_task);
            cfx::Program prog = cfx::program_from_text(execute_program);
            cfx::Trajectory traj = cfx::execute(prog, initial);
            if (opts.structured()) {
                Json j;
                j["program"] = cfx::to_prefix(prog);
                j["trajectory"] = cfx::to_json(traj);
                j["final"] = cfx::to_json(cfx::replay(traj).back());
                print_json(j);
            } else {
                for (cfx::Action a : traj.actions) std::cout << cfx::to_string(a) << '\n';
            }
        } else if (*explain) {
            cfx::Method method = *cfx::method_from_string(explain_method);
            cfx::GridState initial = load_initial(explain_task);
            if (method != cfx::Method::no_utterance && explain_utterance.empty()) {
                throw UsageError("--utterance is required for method " + explain_method);
            }
            if (method != cfx::Method::no_demo && explain_demo.empty()) {
                throw UsageError("--demo is required for method " + explain_method);
            }
            cfx::ExplanationResult result;
            if (method == cfx::Method::no_utterance) {
                cfx::Trajectory demo{initial, load_actions(explain_demo)};
                result = cfx::explain_no_utterance(demo, explain_depth, cfx::FluencyModel::load(fluency_path));
            } else {
                cfx::Lexicon lex = cfx::Lexicon::load(lexicon_path, hash_seed);
                cfx::Sentence utterance = cfx::Sentence::from_text(explain_utterance);
                if (method == cfx::Method::no_demo) {
                    result = cfx::explain_no_demo(utterance, explain_depth, lex);
                } else {
                    cfx::Trajectory demo{initial, load_actions(explain_demo)};
                    result = cfx::explain_pruned({utterance, demo, explain_depth}, lex);
                }
            }
            if (opts.structured()) {
                print_json(cfx::to_json(result, explain_top > 0 ? std::optional(explain_top) : std::nullopt));
            } else {
                std::cout << result.explanation.text() << '\n';
                for (std::size_t i = 0; i < std::min(explain_top, result.candidates.size()); ++i) {
                    const auto& c = result.candidates[i];
                    double score = c.similarity ? *c.similarity : *c.perplexity;
                    std::cout << std::fixed << std::setprecision(6) << score << '\t' << c.sentence.text() << '\n';
                }
            }
        } else if (*gen) {
            auto tasks = cfx::generate_tasks(gen_n, gen_seed, {gen_width, gen_height});
            if (!gen_out.empty()) {
                cfx::TaskStore store(gen_out);
                for (const auto& t : tasks) store.put(t);
            }
            if (opts.structured()) {
                Json arr = Json::array();
                for (const auto& t : tasks) arr.push_back(cfx::to_json(t));
                print_json(arr);
            } else {
                for (const auto& t : tasks) {
                    std::cout << t.id << '\t' << cfx::unparse(t.goal).text() << '\n';
                }
            }
        } else if (*corpus) {
            auto pairs = cfx::training_corpus(corpus_n, corpus_seed, corpus_depth);
            if (opts.structured()) {
                Json arr = Json::array();
                for (const auto& [s, p] : pairs) arr.push_back({{"sentence", s.text()}, {"program", cfx::to_prefix(p)}});
                print_json(arr);
            } else {
                for (const auto& [s, p] : pairs) std::cout << s.text() << '\t' << cfx::to_prefix(p) << '\n';
            }
        } else if (*verify) {
            cfx::Lexicon lex = cfx::Lexicon::load(lexicon_path);
            auto reports = cfx::verify::run_all(lex, verify_depth, verify_seed);
            bool ok = true;
            Json arr = Json::array();
            for (const auto& r : reports) {
                ok = ok && r.passed;
                if (opts.structured()) {
                    arr.push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
                } else {
                    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " - " << r.detail << " ("
                              << std::fixed << std::setprecision(2) << r.seconds << " s)\n";
                }
            }
            if (opts.structured()) print_json(arr);
            return ok ? kOk : kDomainError;
        } else if (*serve) {
            if (!addr.empty()) {
                auto colon = addr.rfind(':');
                if (colon == std::string::npos) throw UsageError("--addr must be host:port");
                config.host = addr.substr(0, colon);
                config.port = std::stoi(addr.substr(colon + 1));
            }
            config.data_dir = data_dir;
            config.lexicon_path = lexicon_path;
            config.fluency_corpus_path = fluency_path;
            if (!embed_endpoint.empty()) config.embed_endpoint = embed_endpoint;
            cfx::Service service(config);
            std::cerr << "cfx: serving on " << config.host << ":" << config.port << '\n';
            service.serve();
        }
    } catch (const UsageError& e) {
        std::cerr << "cfx " << op << ": " << e.what() << '\n';
        return kUsageError;
    } catch (const cfx::ParseError& e) {
        std::cerr << "cfx " << op << ": cannot parse: " << e.what() << '\n';
        return kDomainError;
    } catch (const cfx::InvalidState& e) {
        std::cerr << "cfx " << op << ": invalid state: " << e.what() << '\n';
        return kUsageError;
    } catch (const cfx::Error& e) {
        std::cerr << "cfx " << op << ": " << e.what() << '\n';
        return kDomainError;
    } catch (const std::exception& e) {
        std::cerr << "cfx " << op << ": " << e.what() << '\n';
        return kUsageError;
    }
    return kOk;
}
