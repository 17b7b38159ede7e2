#include "cfx/service.hpp"

#include <algorithm>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>

#include "cfx/grammar.hpp"

namespace cfx {

// ---------------------------------------------------------------------------
// Tasks

Task make_task(std::string id, const GridState& initial, const Program& goal) {
    Trajectory demo = execute(goal, initial);
    return {std::move(id), initial, goal, std::move(demo)};
}

Json to_json(const Task& t) {
    Json j;
    j["id"] = t.id;
    j["initial"] = to_json(t.initial);
    j["goal"] = to_prefix(t.goal);
    j["reference_demo"] = to_json(t.reference_demo);
    return j;
}

Task task_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string()) throw CodecError("task needs a string \"id\"");
    if (!j.contains("goal") || !j["goal"].is_string()) throw CodecError("task needs a string \"goal\"");
    Task t;
    t.id = j["id"].get<std::string>();
    if (!j.contains("initial")) throw CodecError("missing field \"initial\"");
    t.initial = state_from_json(j["initial"]);
    t.goal = program_from_text(j["goal"].get<std::string>());
    if (!j.contains("reference_demo")) throw CodecError("missing field \"reference_demo\"");
    t.reference_demo = trajectory_from_json(j["reference_demo"]);
    if (!(t.reference_demo.initial == t.initial)) throw CodecError("reference_demo starts from another state");
    if (!satisfied(t.goal, replay(t.reference_demo))) {
        throw CodecError("reference_demo of task \"" + t.id + "\" does not achieve its goal");
    }
    return t;
}

bool valid_task_id(std::string_view id) {
    if (id.empty() || id.size() > 128) return false;
    return std::all_of(id.begin(), id.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
    });
}

namespace {

std::size_t below(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

std::optional<GridState> sample_layout(std::mt19937_64& rng, GridSize grid) {
    std::vector<Cell> cells;
    for (int r = 1; r <= grid.height - 2; ++r) {
        for (int c = 1; c <= grid.width - 2; ++c) cells.push_back({c, r});
    }
    if (cells.size() < 3) return std::nullopt;
    for (std::size_t i = cells.size() - 1; i > 0; --i) std::swap(cells[i], cells[below(rng, i + 1)]);

    GridState s;
    s.width = grid.width;
    s.height = grid.height;
    s.agent = {cells[0], static_cast<Direction>(below(rng, 4))};
    std::size_t count = std::min<std::size_t>(2 + below(rng, 4), cells.size() - 1);
    for (std::size_t i = 0; i < count; ++i) {
        s.objects.push_back({static_cast<int>(i + 1), kKinds[below(rng, kKinds.size())],
                             kColors[below(rng, kColors.size())], cells[i + 1]});
    }
    return s;
}

Command sample_command(std::mt19937_64& rng, const GridState& s) {
    auto desc_of = [](const WorldObject& o) { return Descriptor{o.color, o.kind}; };
    const auto& objs = s.objects;
    std::size_t pick = below(rng, objs.size());
    switch (below(rng, 3)) {
    case 0: return Command::go_to(desc_of(objs[pick]));
    case 1: return Command::pick_up(desc_of(objs[pick]));
    default: {
        std::size_t other = (pick + 1 + below(rng, objs.size() - 1)) % objs.size();
        return Command::put_next(desc_of(objs[pick]), desc_of(objs[other]));
    }
    }
}

} // namespace

std::vector<Task> generate_tasks(int n, std::uint64_t seed, GridSize grid) {
    constexpr int kAttempts = 500;
    if (n < 1) throw std::invalid_argument("task count must be positive");
    if (grid.width < 3 || grid.height < 3) throw GenerationFailed("grid must be at least 3x3");
    std::mt19937_64 rng(seed);
    std::vector<Task> out;
    for (int i = 0; i < n; ++i) {
        const std::size_t depth = (i % 2 == 1) ? 2 : 1;
        char id[32];
        std::snprintf(id, sizeof id, "task-%02d", i + 1);
        bool done = false;
        for (int attempt = 0; attempt < kAttempts && !done; ++attempt) {
            auto layout = sample_layout(rng, grid);
            if (!layout || layout->objects.size() < 2) continue;
            std::vector<Command> cmds;
            for (std::size_t k = 0; k < depth; ++k) cmds.push_back(sample_command(rng, *layout));
            try {
                Task t = make_task(id, *layout, Program(std::move(cmds)));
                if (t.reference_demo.actions.empty()) continue;
                out.push_back(std::move(t));
                done = true;
            } catch (const Unsatisfiable&) {
            }
        }
        if (!done) {
            throw GenerationFailed("could not generate a solvable " + std::to_string(depth) + "-command task in a " +
                                   std::to_string(grid.width) + "x" + std::to_string(grid.height) + " room after " +
                                   std::to_string(kAttempts) + " attempts");
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Task store

TaskStore::TaskStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::filesystem::path TaskStore::file_for(const std::string& id) const {
    if (!valid_task_id(id)) throw CodecError("invalid task id \"" + id + "\"");
    return dir_ / (id + ".json");
}

void TaskStore::put(const Task& t) {
    auto target = file_for(t.id);
    auto tmp = dir_ / ("." + t.id + ".json.tmp");
    std::lock_guard lock(mu_);
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << to_json(t).dump(2) << '\n';
        if (!out.flush()) throw Error("cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, target);
}

std::optional<Task> TaskStore::get(const std::string& id) const {
    auto path = file_for(id);
    std::lock_guard lock(mu_);
    if (!std::filesystem::exists(path)) return std::nullopt;
    return task_from_json(read_json_file(path.string()));
}

bool TaskStore::remove(const std::string& id) {
    auto path = file_for(id);
    std::lock_guard lock(mu_);
    return std::filesystem::remove(path);
}

std::vector<std::string> TaskStore::ids() const {
    std::lock_guard lock(mu_);
    std::vector<std::string> out;
    for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
        auto name = entry.path().filename().string();
        if (entry.is_regular_file() && name.front() != '.' && entry.path().extension() == ".json") {
            out.push_back(entry.path().stem().string());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Session log

std::string_view to_string(EventKind k) {
    switch (k) {
    case EventKind::command: return "command";
    case EventKind::parse_result: return "parse_result";
    case EventKind::demo_recorded: return "demo_recorded";
    case EventKind::explanation: return "explanation";
    case EventKind::success_check: return "success_check";
    }
    return "command";
}

SessionLog::SessionLog(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

Json SessionLog::append(const std::string& session, EventKind kind, Json payload) {
    using namespace std::chrono;
    std::lock_guard lock(mu_);
    auto now = system_clock::now();
    auto& last = last_seen_[session];
    if (now < last) now = last;
    last = now;

    std::time_t secs = system_clock::to_time_t(now);
    auto millis = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char day[16];
    char stamp[40];
    std::strftime(day, sizeof day, "%Y-%m-%d", &tm);
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%S", &tm);
    char full[48];
    std::snprintf(full, sizeof full, "%s.%03dZ", stamp, static_cast<int>(millis));

    Json event;
    event["timestamp"] = full;
    event["session"] = session;
    event["kind"] = std::string(to_string(kind));
    event["payload"] = std::move(payload);

    std::ofstream out(dir_ / (std::string(day) + ".jsonl"), std::ios::app);
    if (!out) throw Error("cannot append to session log in " + dir_.string());
    out << event.dump() << '\n';
    out.flush();
    return event;
}

std::vector<Json> SessionLog::read_all() const {
    std::lock_guard lock(mu_);
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
        if (entry.path().extension() == ".jsonl") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<Json> out;
    for (const auto& f : files) {
        std::ifstream in(f);
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty()) out.push_back(Json::parse(line));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Service

void ServiceConfig::apply_environment() {
    auto env = [](const char* name) -> std::optional<std::string> {
        const char* v = std::getenv(name);
        if (v == nullptr || *v == '\0') return std::nullopt;
        return std::string(v);
    };
    if (auto v = env("CFX_HOST")) host = *v;
    if (auto v = env("CFX_PORT")) port = std::stoi(*v);
    if (auto v = env("CFX_DATA_DIR")) data_dir = *v;
    if (auto v = env("CFX_LEXICON")) lexicon_path = *v;
    if (auto v = env("CFX_FLUENCY_CORPUS")) fluency_corpus_path = *v;
    if (auto v = env("CFX_EMBED_ENDPOINT")) embed_endpoint = *v;
    if (auto v = env("CFX_DEPTH")) depth_bound = std::stoi(*v);
    if (auto v = env("CFX_HASH_SEED")) hash_seed = std::stoull(*v, nullptr, 0);
}

struct Service::Outcome {
    int status = 200;
    Json body;
    std::optional<std::string> text;  // plain-text body instead of JSON
    Json summary;
};

namespace {

/// Carries an HTTP status out of a handler.
class HttpError : public Error {
public:
    HttpError(int status, std::string kind, const std::string& message)
        : Error(message), status_(status), kind_(std::move(kind)) {}
    int status() const { return status_; }
    const std::string& kind() const { return kind_; }

private:
    int status_;
    std::string kind_;
};

Json error_body(const std::string& kind, const std::string& message) {
    Json e;
    e["kind"] = kind;
    e["message"] = message;
    return Json{{"error", e}};
}

EventKind event_kind_for(const ApiRequest& req) {
    if (req.method != "POST") return EventKind::command;
    if (req.path == "/parse") return EventKind::parse_result;
    if (req.path == "/step") return EventKind::demo_recorded;
    if (req.path == "/explain") return EventKind::explanation;
    if (req.path == "/check") return EventKind::success_check;
    return EventKind::command;
}

std::string require_string(const Json& body, const char* name) {
    if (!body.is_object() || !body.contains(name) || !body[name].is_string()) {
        throw CodecError(std::string("request needs a string \"") + name + "\"");
    }
    return body[name].get<std::string>();
}

} // namespace

Service::Service(ServiceConfig config)
    : config_(std::move(config)),
      lexicon_(Lexicon::load(config_.lexicon_path.string(), config_.hash_seed)),
      fluency_(FluencyModel::load(config_.fluency_corpus_path.string())),
      store_(config_.data_dir / "tasks"),
      log_(config_.data_dir / "sessions") {
    if (auto missing = lexicon_.missing_terminals(); !missing.empty()) {
        throw Error("lexicon " + config_.lexicon_path.string() + " lacks grammar word \"" + missing.front() + "\"");
    }
    clamp_depth(config_.depth_bound);
    if (config_.embed_endpoint) {
        encoder_ = std::make_unique<RemoteEncoder>(EmbeddingEndpoint::parse(*config_.embed_endpoint),
                                                   lexicon_.dimension());
    } else {
        encoder_ = std::make_unique<LexiconEncoder>(lexicon_);
    }
}

Service::~Service() = default;

ApiResponse Service::handle(const ApiRequest& req) {
    Outcome out;
    try {
        out = route(req);
    } catch (const HttpError& e) {
        out.status = e.status();
        out.body = error_body(e.kind(), e.what());
    } catch (const InvalidTrajectory& e) {
        out.status = 422;
        out.body = error_body("invalid_trajectory", e.what());
        out.body["error"]["index"] = e.index();
    } catch (const ParseError& e) {
        out.status = 422;
        out.body = Json{{"error", to_json(e)}};
    } catch (const IllegalAction& e) {
        out.status = 422;
        out.body = error_body("illegal_action", e.what());
    } catch (const NoValidExplanation& e) {
        out.status = 409;
        out.body = error_body("no_valid_explanation", e.what());
    } catch (const Unsatisfiable& e) {
        out.status = 409;
        out.body = error_body("unsatisfiable", e.what());
    } catch (const ServiceUnreachable& e) {
        out.status = 502;
        out.body = error_body("service_unreachable", e.what());
    } catch (const MalformedResponse& e) {
        out.status = 502;
        out.body = error_body("malformed_response", e.what());
    } catch (const DimensionMismatch& e) {
        out.status = 502;
        out.body = error_body("dimension_mismatch", e.what());
    } catch (const InvalidState& e) {
        out.status = 400;
        out.body = error_body("invalid_state", e.what());
    } catch (const CodecError& e) {
        out.status = 400;
        out.body = error_body("bad_request", e.what());
    } catch (const Json::exception& e) {
        out.status = 400;
        out.body = error_body("bad_request", e.what());
    } catch (const std::invalid_argument& e) {
        out.status = 400;
        out.body = error_body("bad_request", e.what());
    } catch (const std::exception& e) {
        out.status = 500;
        out.body = error_body("internal", e.what());
    }

    Json payload;
    payload["endpoint"] = req.method + " " + req.path;
    payload["status"] = out.status;
    if (out.status < 400) {
        payload["result"] = out.summary;
    } else {
        payload["result"] = out.body["error"];
    }
    log_.append(req.session, event_kind_for(req), std::move(payload));

    ApiResponse res;
    res.status = out.status;
    if (out.text) {
        res.body = *out.text;
        res.content_type = "text/plain";
    } else {
        res.body = out.body.dump();
    }
    return res;
}

Service::Outcome Service::route(const ApiRequest& req) {
    auto json_body = [&req]() -> Json {
        if (req.body.empty()) return Json::object();
        Json j = Json::parse(req.body, nullptr, false);
        if (j.is_discarded()) throw CodecError("request body is not valid JSON");
        return j;
    };
    const std::string& p = req.path;
    const std::string tasks_prefix = "/tasks/";

    if (req.method == "GET" && p == "/health") {
        Outcome o;
        o.body = {{"status", "ok"}};
        o.summary = o.body;
        return o;
    }
    if (p == "/tasks") {
        if (req.method == "GET") return get_tasks();
        if (req.method == "POST") return put_task(json_body(), std::nullopt);
    }
    if (p.starts_with(tasks_prefix) && p.size() > tasks_prefix.size()) {
        std::string id = p.substr(tasks_prefix.size());
        if (req.method == "GET") return get_task(id);
        if (req.method == "PUT") return put_task(json_body(), id);
        if (req.method == "DELETE") return delete_task(id);
    }
    if (req.method == "POST") {
        if (p == "/parse") return post_parse(json_body());
        if (p == "/execute") return post_execute(json_body());
        if (p == "/step") return post_step(json_body());
        if (p == "/explain") return post_explain(json_body());
        if (p == "/check") return post_check(json_body());
    }
    if (req.method == "GET" && p == "/sentences") return get_sentences(req);
    throw HttpError(404, "not_found", "no route for " + req.method + " " + p);
}

Service::Outcome Service::get_tasks() {
    Outcome o;
    Json list = Json::array();
    for (const auto& id : store_.ids()) {
        if (auto t = store_.get(id)) list.push_back(to_json(*t));
    }
    o.summary = {{"count", list.size()}};
    o.body = {{"tasks", std::move(list)}};
    return o;
}

Service::Outcome Service::get_task(const std::string& id) {
    if (!valid_task_id(id)) throw HttpError(404, "not_found", "unknown task \"" + id + "\"");
    auto t = store_.get(id);
    if (!t) throw HttpError(404, "not_found", "unknown task \"" + id + "\"");
    Outcome o;
    o.body = to_json(*t);
    o.summary = {{"task_id", id}};
    return o;
}

Service::Outcome Service::put_task(const Json& body, std::optional<std::string> id) {
    if (!body.is_object()) throw CodecError("task body must be an object");
    if (!id && body.contains("id")) id = require_string(body, "id");
    if (!id) {
        auto existing = store_.ids();
        for (int n = static_cast<int>(existing.size()) + 1;; ++n) {
            std::string candidate = "task-" + std::to_string(n);
            if (!std::binary_search(existing.begin(), existing.end(), candidate)) {
                id = candidate;
                break;
            }
        }
    }
    if (!valid_task_id(*id)) throw CodecError("invalid task id \"" + *id + "\"");
    if (!body.contains("initial")) throw CodecError("missing field \"initial\"");
    GridState initial = state_from_json(body["initial"]);
    Program goal = program_from_text(require_string(body, "goal"));
    Task t;
    if (body.contains("reference_demo")) {
        Json full = body;
        full["id"] = *id;
        t = task_from_json(full);
    } else {
        t = make_task(*id, initial, goal);
    }
    store_.put(t);
    Outcome o;
    o.status = 201;
    o.body = to_json(t);
    o.summary = {{"task_id", t.id}, {"goal", to_prefix(t.goal)}};
    return o;
}

Service::Outcome Service::delete_task(const std::string& id) {
    if (!valid_task_id(id) || !store_.remove(id)) throw HttpError(404, "not_found", "unknown task \"" + id + "\"");
    Outcome o;
    o.body = {{"deleted", id}};
    o.summary = o.body;
    return o;
}

GridState Service::resolve_initial(const Json& body) {
    if (body.contains("task_id")) {
        std::string id = require_string(body, "task_id");
        std::optional<Task> t;
        if (valid_task_id(id)) t = store_.get(id);
        if (!t) throw HttpError(404, "not_found", "unknown task \"" + id + "\"");
        return t->initial;
    }
    if (body.contains("state")) return state_from_json(body["state"]);
    throw CodecError("request needs \"task_id\" or an inline \"state\"");
}

int Service::depth_from(const Json& body) const {
    if (!body.contains("depth")) return config_.depth_bound;
    if (!body["depth"].is_number_integer() || body["depth"].get<int>() < 1) {
        throw CodecError("\"depth\" must be a positive integer");
    }
    return body["depth"].get<int>();
}

Service::Outcome Service::post_parse(const Json& body) {
    Sentence s = Sentence::from_text(require_string(body, "utterance"));
    Program prog = parse(s);
    Outcome o;
    o.body["utterance"] = s.text();
    o.body["program"] = to_prefix(prog);
    o.body["sentence"] = unparse(prog).text();
    o.summary = o.body;
    return o;
}

Service::Outcome Service::post_execute(const Json& body) {
    GridState initial = resolve_initial(body);
    Program prog = program_from_text(require_string(body, "program"));
    Trajectory traj = execute(prog, initial);
    auto states = replay(traj);
    Outcome o;
    o.body["program"] = to_prefix(prog);
    o.body["trajectory"] = to_json(traj);
    o.body["final"] = to_json(states.back());
    o.summary = {{"program", to_prefix(prog)}, {"actions", to_json(traj.actions)}};
    return o;
}

Service::Outcome Service::post_step(const Json& body) {
    if (!body.contains("state")) throw CodecError("missing field \"state\"");
    GridState s = state_from_json(body["state"]);
    std::string name = require_string(body, "action");
    auto action = action_from_string(name);
    if (!action) throw CodecError("unknown action \"" + name + "\"");
    GridState next = step(s, *action);
    Outcome o;
    o.body = to_json(next);
    o.summary = {{"action", name}};
    return o;
}

Service::Outcome Service::post_explain(const Json& body) {
    Method method = Method::full;
    if (body.contains("method")) {
        std::string m = require_string(body, "method");
        auto parsed = method_from_string(m);
        if (!parsed) throw CodecError("unknown method \"" + m + "\"");
        method = *parsed;
    }
    int depth = depth_from(body);
    std::optional<std::size_t> max_candidates;
    if (body.contains("max_candidates")) {
        if (!body["max_candidates"].is_number_unsigned()) throw CodecError("\"max_candidates\" must be a count");
        max_candidates = body["max_candidates"].get<std::size_t>();
    }
    ConstraintMode constraint = ConstraintMode::goal_set;
    if (body.contains("constraint")) {
        std::string c = require_string(body, "constraint");
        if (c == "exact_denotation") {
            constraint = ConstraintMode::exact_denotation;
        } else if (c != "goal_set") {
            throw CodecError("unknown constraint \"" + c + "\"");
        }
    }

    std::optional<Sentence> utterance;
    if (method != Method::no_utterance || body.contains("utterance")) {
        utterance = Sentence::from_text(require_string(body, "utterance"));
    }
    std::optional<Trajectory> demo;
    if (method != Method::no_demo || body.contains("actions")) {
        GridState initial = resolve_initial(body);
        if (!body.contains("actions")) throw CodecError("missing field \"actions\"");
        demo = Trajectory{initial, actions_from_json(body["actions"])};
        replay(*demo);
    }

    ExplanationResult result;
    switch (method) {
    case Method::full:
        result = explain_pruned({*utterance, *demo, depth, constraint}, *encoder_);
        break;
    case Method::no_demo:
        result = explain_no_demo(*utterance, depth, *encoder_);
        break;
    case Method::no_utterance:
        result = explain_no_utterance(*demo, depth, fluency_);
        break;
    }

    Outcome o;
    o.body = to_json(result, max_candidates);
    o.summary["utterance"] = utterance ? Json(utterance->text()) : Json(nullptr);
    o.summary["actions"] = demo ? to_json(demo->actions) : Json(nullptr);
    o.summary["method"] = std::string(to_string(method));
    o.summary["explanation"] = result.explanation.text();
    o.summary["similarity"] = result.similarity ? Json(*result.similarity) : Json(nullptr);
    return o;
}

Service::Outcome Service::post_check(const Json& body) {
    Sentence s = Sentence::from_text(require_string(body, "utterance"));
    int depth = depth_from(body);
    GridState initial = resolve_initial(body);
    if (!body.contains("actions")) throw CodecError("missing field \"actions\"");
    Trajectory demo{initial, actions_from_json(body["actions"])};
    replay(demo);
    Outcome o;
    o.body["utterance"] = s.text();
    o.body["success"] = check_success(s, demo, depth);
    o.summary = o.body;
    return o;
}

Service::Outcome Service::get_sentences(const ApiRequest& req) {
    int depth = config_.depth_bound;
    if (auto it = req.query.find("depth"); it != req.query.end()) {
        try {
            std::size_t used = 0;
            depth = std::stoi(it->second, &used);
            if (used != it->second.size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw CodecError("depth must be a positive integer");
        }
        if (depth < 1) throw CodecError("depth must be a positive integer");
    }
    std::string text;
    for (const auto& s : enumerate_sentences(depth)) {
        text += s.text();
        text += '\n';
    }
    Outcome o;
    o.text = std::move(text);
    o.summary = {{"depth", depth}, {"count", program_count(depth)}};
    return o;
}

} // namespace cfx
