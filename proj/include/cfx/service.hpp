#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cfx/codec.hpp"
#include "cfx/explain.hpp"
#include "cfx/similarity.hpp"

namespace httplib {
class Server;
}

namespace cfx {

struct Task {
    std::string id;
    GridState initial;
    Program goal;
    Trajectory reference_demo;

    friend bool operator==(const Task&, const Task&) = default;
};

/// Plans the reference demonstration. Throws Unsatisfiable.
Task make_task(std::string id, const GridState& initial, const Program& goal);

Json to_json(const Task& t);
/// Checks that the reference demonstration replays and satisfies the goal.
Task task_from_json(const Json& j);

bool valid_task_id(std::string_view id);

struct GridSize {
    int width = 8;
    int height = 8;
};

/// `n` solvable tasks, deterministic in (n, seed, grid). Odd positions carry
/// two-command goals. Throws GenerationFailed when rejection sampling gives up.
std::vector<Task> generate_tasks(int n, std::uint64_t seed, GridSize grid = {});

/// One file per task, replaced atomically on write.
class TaskStore {
public:
    explicit TaskStore(std::filesystem::path dir);

    void put(const Task& t);
    std::optional<Task> get(const std::string& id) const;
    bool remove(const std::string& id);
    std::vector<std::string> ids() const;

private:
    std::filesystem::path file_for(const std::string& id) const;

    std::filesystem::path dir_;
    mutable std::mutex mu_;
};

enum class EventKind { command, parse_result, demo_recorded, explanation, success_check };
std::string_view to_string(EventKind k);

/// Append-only JSON-lines log, one file per UTC day.
class SessionLog {
public:
    explicit SessionLog(std::filesystem::path dir);

    /// Returns the event as written.
    Json append(const std::string& session, EventKind kind, Json payload);

    /// Every event in every day file, oldest file first.
    std::vector<Json> read_all() const;

private:
    std::filesystem::path dir_;
    mutable std::mutex mu_;
    std::map<std::string, std::chrono::system_clock::time_point> last_seen_;
};

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::filesystem::path data_dir = "data";
    std::filesystem::path lexicon_path = "fixtures/lexicon.txt";
    std::filesystem::path fluency_corpus_path = "fixtures/fluency_corpus.txt";
    std::optional<std::string> embed_endpoint;
    int depth_bound = kDefaultDepth;
    std::uint64_t hash_seed = kDefaultHashSeed;

    /// Overrides fields from CFX_* environment variables when set.
    void apply_environment();
};

struct ApiRequest {
    std::string method;
    std::string path;
    std::map<std::string, std::string> query;
    std::string body;
    std::string session = "anonymous";
};

struct ApiResponse {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

/// Transport-independent HTTP API. Every request, including failed ones,
/// appends exactly one event to the session log.
class Service {
public:
    explicit Service(ServiceConfig config);
    ~Service();

    ApiResponse handle(const ApiRequest& req);

    /// Registers every route on `server`.
    void bind(httplib::Server& server);

    /// Blocks serving on config().host:config().port.
    void serve();

    const ServiceConfig& config() const { return config_; }
    TaskStore& tasks() { return store_; }
    SessionLog& log() { return log_; }

private:
    struct Outcome;
    Outcome route(const ApiRequest& req);
    Outcome get_tasks();
    Outcome get_task(const std::string& id);
    Outcome put_task(const Json& body, std::optional<std::string> id);
    Outcome delete_task(const std::string& id);
    Outcome post_parse(const Json& body);
    Outcome post_execute(const Json& body);
    Outcome post_step(const Json& body);
    Outcome post_explain(const Json& body);
    Outcome post_check(const Json& body);
    Outcome get_sentences(const ApiRequest& req);

    GridState resolve_initial(const Json& body);
    int depth_from(const Json& body) const;

    ServiceConfig config_;
    Lexicon lexicon_;
    FluencyModel fluency_;
    std::unique_ptr<SentenceEncoder> encoder_;
    TaskStore store_;
    SessionLog log_;
};

} // namespace cfx
