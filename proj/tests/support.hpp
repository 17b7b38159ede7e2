#pragma once

#include <chrono>
#include <csignal>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <httplib.h>

#include "cfx/codec.hpp"
#include "cfx/gridworld.hpp"

namespace cfx::test {

inline std::string fixture(const std::string& name) { return std::string(CFX_FIXTURES_DIR) + "/" + name; }

inline GridState example_world() { return state_from_json(read_json_file(fixture("example_world.json"))); }

inline Trajectory example_demo() {
    return {example_world(), actions_from_json(read_json_file(fixture("example_demo.json"))["actions"])};
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("cfx-test-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline int free_port() {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = 0;
    ::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
    socklen_t len = sizeof addr;
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
    int port = ntohs(addr.sin_port);
    ::close(fd);
    return port;
}

/// `cfx serve` in a child process, killed on destruction.
class ServerProcess {
public:
    ServerProcess(const std::string& binary, const std::filesystem::path& data_dir) : port_(free_port()) {
        std::vector<std::string> args = {binary,
                                         "serve",
                                         "--addr",
                                         "127.0.0.1:" + std::to_string(port_),
                                         "--data-dir",
                                         data_dir.string(),
                                         "--lexicon",
                                         fixture("lexicon.txt"),
                                         "--fluency-corpus",
                                         fixture("fluency_corpus.txt")};
        pid_ = ::fork();
        if (pid_ == 0) {
            std::vector<char*> argv;
            for (auto& a : args) argv.push_back(a.data());
            argv.push_back(nullptr);
            ::execv(binary.c_str(), argv.data());
            ::_exit(127);
        }
        httplib::Client probe("127.0.0.1", port_);
        auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(10);
        while (std::chrono::steady_clock::now() < deadline) {
            if (auto res = probe.Get("/health"); res && res->status == 200) return;
            std::this_thread::sleep_for(std::chrono::milliseconds(50));
        }
        stop();
        throw std::runtime_error("server did not come up on port " + std::to_string(port_));
    }
    ~ServerProcess() { stop(); }
    ServerProcess(const ServerProcess&) = delete;
    ServerProcess& operator=(const ServerProcess&) = delete;

    int port() const { return port_; }

private:
    void stop() {
        if (pid_ > 0) {
            ::kill(pid_, SIGTERM);
            ::waitpid(pid_, nullptr, 0);
            pid_ = -1;
        }
    }

    int port_;
    pid_t pid_ = -1;
};

} // namespace cfx::test
