#include <httplib.h>

#include "cfx/service.hpp"

namespace cfx {

void Service::bind(httplib::Server& server) {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
        ApiRequest api;
        api.method = req.method;
        api.path = req.path;
        for (const auto& [k, v] : req.params) api.query.emplace(k, v);
        api.body = req.body;
        if (auto session = req.get_header_value("X-Session-Id"); !session.empty()) api.session = session;
        ApiResponse out = handle(api);
        res.status = out.status;
        res.set_content(out.body, out.content_type);
    };
    server.Get(".*", handler);
    server.Post(".*", handler);
    server.Put(".*", handler);
    server.Delete(".*", handler);
}

void Service::serve() {
    httplib::Server server;
    bind(server);
    if (!server.listen(config_.host, config_.port)) {
        throw Error("cannot listen on " + config_.host + ":" + std::to_string(config_.port));
    }
}

} // namespace cfx
