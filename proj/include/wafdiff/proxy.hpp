// Copyright (c) 2026 the wafdiff authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <atomic>
#include <mutex>
#include <thread>
#include <vector>

#include "wafdiff/normalizer.hpp"
#include "wafdiff/result.hpp"

namespace wafdiff {

struct ProxyConfig {
    Bytes listen_host = "127.0.0.1";
    uint16_t listen_port = 0; // 0 picks an ephemeral port
    Bytes upstream_host = "127.0.0.1";
    uint16_t upstream_port = 0;
    NormalizerPolicy policy;
    size_t max_body_bytes = kMaxRequestBytes;
    Bytes log_path; // empty disables logging
    int reject_status = 400;
};

// Reverse proxy that normalizes inbound HTTP/1.1 requests before forwarding.
// Bodies are fully buffered up to max_body_bytes; canonical multipart
// serialization needs the whole body. Keep-alive is supported, pipelining is
// not: leftover bytes after a request close the connection so one inbound
// request maps to at most one upstream request.
class ProxyServer {
public:
    explicit ProxyServer(ProxyConfig cfg);
    ~ProxyServer();

    ProxyServer(const ProxyServer &) = delete;
    ProxyServer &operator=(const ProxyServer &) = delete;

    // Binds and starts the accept loop. Returns an error message on failure.
    Result<bool, Bytes> start();
    void stop();
    uint16_t bound_port() const { return bound_port_; }

private:
    void accept_loop();
    void handle_connection(int fd);
    void log_record(const Bytes &client, const Bytes &outcome,
                    const Bytes &reason, const std::vector<Bytes> &changes,
                    size_t bytes_in, size_t bytes_out);

    ProxyConfig cfg_;
    int listen_fd_ = -1;
    uint16_t bound_port_ = 0;
    std::atomic<bool> stopping_{false};
    std::thread accept_thread_;
    std::mutex workers_mu_;
    std::vector<std::thread> workers_;
    std::mutex log_mu_;
};

// Runs until SIGINT/SIGTERM. Returns 0 on clean shutdown, 2 on config error.
int serve(const ProxyConfig &cfg);

} // namespace wafdiff
