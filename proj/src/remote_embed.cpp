#include <cmath>

#include <httplib.h>
#include <json.hpp>

#include "cfx/error.hpp"
#include "cfx/similarity.hpp"

namespace cfx {

EmbeddingEndpoint EmbeddingEndpoint::parse(std::string_view url) {
    EmbeddingEndpoint ep;
    if (url.starts_with("http://")) url.remove_prefix(7);
    if (url.starts_with("https://")) throw Error("https embedding endpoints are not supported");
    auto slash = url.find('/');
    std::string_view authority = url.substr(0, slash);
    if (slash != std::string_view::npos) ep.path = std::string(url.substr(slash));
    auto colon = authority.rfind(':');
    if (colon == std::string_view::npos) {
        ep.host = std::string(authority);
    } else {
        ep.host = std::string(authority.substr(0, colon));
        try {
            ep.port = std::stoi(std::string(authority.substr(colon + 1)));
        } catch (const std::exception&) {
            throw Error("bad port in embedding endpoint \"" + std::string(url) + "\"");
        }
    }
    if (ep.host.empty()) throw Error("embedding endpoint has no host");
    return ep;
}

EmbeddingVector remote_embed(const Sentence& s, const EmbeddingEndpoint& endpoint, std::size_t expected_dimension) {
    httplib::Client client(endpoint.host, endpoint.port);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(endpoint.timeout);
    auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(endpoint.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    nlohmann::json request = {{"sentence", s.text()}};
    auto res = client.Post(endpoint.path, request.dump(), "application/json");
    if (!res) {
        throw ServiceUnreachable("embedding service at " + endpoint.host + ":" + std::to_string(endpoint.port) +
                                 " unreachable: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        throw MalformedResponse("embedding service answered HTTP " + std::to_string(res->status));
    }

    nlohmann::json body = nlohmann::json::parse(res->body, nullptr, false);
    if (body.is_discarded() || !body.is_object() || !body.contains("embedding") || !body["embedding"].is_array()) {
        throw MalformedResponse("embedding service response lacks an \"embedding\" array");
    }
    EmbeddingVector v;
    for (const auto& x : body["embedding"]) {
        if (!x.is_number()) throw MalformedResponse("non-numeric embedding entry");
        double d = x.get<double>();
        if (!std::isfinite(d)) throw MalformedResponse("non-finite embedding entry");
        v.values.push_back(d);
    }
    if (v.dimension() != expected_dimension) {
        throw DimensionMismatch("embedding service returned dimension " + std::to_string(v.dimension()) +
                                ", expected " + std::to_string(expected_dimension));
    }
    return v;
}

} // namespace cfx
