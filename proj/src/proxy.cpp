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

#include "wafdiff/proxy.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <signal.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>
#include <ctime>
#include <fstream>

#include "wafdiff/json_codec.hpp"

namespace wafdiff {

namespace {

constexpr size_t kMaxHeadBytes = 64 * 1024;
constexpr int kIoTimeoutSeconds = 15;

void set_io_timeout(int fd) {
    timeval tv{};
    tv.tv_sec = kIoTimeoutSeconds;
    setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
    setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof(tv));
}

bool send_all(int fd, BytesView data) {
    size_t sent = 0;
    while (sent < data.size()) {
        ssize_t n = ::send(fd, data.data() + sent, data.size() - sent,
                           MSG_NOSIGNAL);
        if (n <= 0)
            return false;
        sent += static_cast<size_t>(n);
    }
    return true;
}

// Blocks until the head terminator is buffered; extra bytes stay in `buf`.
bool read_head(int fd, Bytes &buf, size_t &head_end) {
    while (true) {
        size_t crlf = buf.find("\r\n\r\n");
        if (crlf != Bytes::npos) {
            head_end = crlf + 4;
            return true;
        }
        size_t lf = buf.find("\n\n");
        if (lf != Bytes::npos) {
            head_end = lf + 2;
            return true;
        }
        if (buf.size() > kMaxHeadBytes)
            return false;
        char chunk[4096];
        ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
        if (n <= 0)
            return false;
        buf.append(chunk, static_cast<size_t>(n));
    }
}

std::optional<size_t> head_content_length(BytesView head) {
    size_t pos = 0;
    while (pos < head.size()) {
        size_t eol = head.find('\n', pos);
        if (eol == BytesView::npos)
            break;
        BytesView line = head.substr(pos, eol - pos);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        pos = eol + 1;
        size_t colon = line.find(':');
        if (colon == BytesView::npos)
            continue;
        if (!ascii_ieq(line.substr(0, colon), "Content-Length"))
            continue;
        BytesView value = trim_ows(line.substr(colon + 1));
        size_t out = 0;
        bool any = false;
        for (char c : value) {
            if (!is_digit(c))
                return std::nullopt;
            out = out * 10 + static_cast<size_t>(c - '0');
            any = true;
        }
        if (!any)
            return std::nullopt;
        return out;
    }
    return size_t(0);
}

int connect_to(const Bytes &host, uint16_t port) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo *res = nullptr;
    Bytes port_s = std::to_string(port);
    if (getaddrinfo(host.c_str(), port_s.c_str(), &hints, &res) != 0)
        return -1;
    int fd = -1;
    for (addrinfo *ai = res; ai; ai = ai->ai_next) {
        fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0)
            continue;
        if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0)
            break;
        ::close(fd);
        fd = -1;
    }
    freeaddrinfo(res);
    if (fd >= 0)
        set_io_timeout(fd);
    return fd;
}

Bytes simple_response(int status, BytesView reason, BytesView body,
                      bool close_connection) {
    Bytes out = "HTTP/1.1 " + std::to_string(status) + " " + Bytes(reason) +
                "\r\nContent-Type: text/plain\r\nContent-Length: " +
                std::to_string(body.size()) + "\r\n";
    if (close_connection)
        out += "Connection: close\r\n";
    out += "\r\n";
    out += body;
    return out;
}

} // namespace

ProxyServer::ProxyServer(ProxyConfig cfg) : cfg_(std::move(cfg)) {}

ProxyServer::~ProxyServer() { stop(); }

Result<bool, Bytes> ProxyServer::start() {
    if (cfg_.listen_host == cfg_.upstream_host &&
        cfg_.listen_port != 0 && cfg_.listen_port == cfg_.upstream_port)
        return Bytes("listen and upstream addresses must differ");

    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    hints.ai_flags = AI_PASSIVE;
    addrinfo *res = nullptr;
    Bytes port_s = std::to_string(cfg_.listen_port);
    if (getaddrinfo(cfg_.listen_host.c_str(), port_s.c_str(), &hints, &res) != 0)
        return Bytes("cannot resolve listen address " + cfg_.listen_host);
    int fd = -1;
    for (addrinfo *ai = res; ai; ai = ai->ai_next) {
        fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0)
            continue;
        int one = 1;
        setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
        if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd, 64) == 0)
            break;
        ::close(fd);
        fd = -1;
    }
    freeaddrinfo(res);
    if (fd < 0)
        return Bytes("cannot bind " + cfg_.listen_host + ":" +
                     std::to_string(cfg_.listen_port));

    sockaddr_storage addr{};
    socklen_t alen = sizeof(addr);
    if (getsockname(fd, reinterpret_cast<sockaddr *>(&addr), &alen) == 0) {
        if (addr.ss_family == AF_INET)
            bound_port_ = ntohs(reinterpret_cast<sockaddr_in *>(&addr)->sin_port);
        else if (addr.ss_family == AF_INET6)
            bound_port_ = ntohs(reinterpret_cast<sockaddr_in6 *>(&addr)->sin6_port);
    }
    listen_fd_ = fd;
    stopping_ = false;
    accept_thread_ = std::thread([this] { accept_loop(); });
    return true;
}

void ProxyServer::stop() {
    if (listen_fd_ < 0)
        return;
    stopping_ = true;
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    listen_fd_ = -1;
    if (accept_thread_.joinable())
        accept_thread_.join();
    std::vector<std::thread> workers;
    {
        std::lock_guard<std::mutex> lock(workers_mu_);
        workers.swap(workers_);
    }
    for (auto &w : workers)
        if (w.joinable())
            w.join();
}

void ProxyServer::accept_loop() {
    while (!stopping_) {
        sockaddr_storage addr{};
        socklen_t alen = sizeof(addr);
        int fd = ::accept(listen_fd_, reinterpret_cast<sockaddr *>(&addr), &alen);
        if (fd < 0) {
            if (stopping_)
                break;
            continue;
        }
        set_io_timeout(fd);
        std::lock_guard<std::mutex> lock(workers_mu_);
        workers_.emplace_back([this, fd] { handle_connection(fd); });
    }
}

void ProxyServer::log_record(const Bytes &client, const Bytes &outcome,
                             const Bytes &reason,
                             const std::vector<Bytes> &changes, size_t bytes_in,
                             size_t bytes_out) {
    if (cfg_.log_path.empty())
        return;
    JsonValue o = JsonValue::object();
    o.add("timestamp", JsonValue::number(static_cast<long long>(::time(nullptr))));
    o.add("client", JsonValue::string(client));
    o.add("outcome", JsonValue::string(outcome));
    o.add("reason", JsonValue::string(reason));
    JsonValue ch = JsonValue::array();
    for (const auto &c : changes)
        ch.push(JsonValue::string(c));
    o.add("changes", std::move(ch));
    o.add("bytes_in", JsonValue::number(static_cast<long long>(bytes_in)));
    o.add("bytes_out", JsonValue::number(static_cast<long long>(bytes_out)));

    std::lock_guard<std::mutex> lock(log_mu_);
    std::ofstream log(cfg_.log_path.c_str(), std::ios::app | std::ios::binary);
    if (log)
        log << serialize_json_canonical(o) << "\n";
}

void ProxyServer::handle_connection(int fd) {
    Bytes buf;
    Bytes client = "client";
    {
        sockaddr_storage addr{};
        socklen_t alen = sizeof(addr);
        if (getpeername(fd, reinterpret_cast<sockaddr *>(&addr), &alen) == 0) {
            char host[NI_MAXHOST];
            char port[NI_MAXSERV];
            if (getnameinfo(reinterpret_cast<sockaddr *>(&addr), alen, host,
                            sizeof(host), port, sizeof(port),
                            NI_NUMERICHOST | NI_NUMERICSERV) == 0)
                client = Bytes(host) + ":" + port;
        }
    }

    bool keep_alive = true;
    while (keep_alive && !stopping_) {
        size_t head_end = 0;
        if (!read_head(fd, buf, head_end))
            break;
        auto length = head_content_length(BytesView(buf).substr(0, head_end));
        if (!length) {
            send_all(fd, simple_response(400, "Bad Request",
                                         "malformed Content-Length\n", true));
            break;
        }
        if (*length > cfg_.max_body_bytes) {
            send_all(fd, simple_response(413, "Payload Too Large",
                                         "body exceeds proxy limit\n", true));
            log_record(client, "rejected", "body cap exceeded", {}, head_end, 0);
            break;
        }
        while (buf.size() < head_end + *length) {
            char chunk[8192];
            ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
            if (n <= 0) {
                ::close(fd);
                return;
            }
            buf.append(chunk, static_cast<size_t>(n));
        }
        Bytes request_octets = buf.substr(0, head_end + *length);
        Bytes leftover = buf.substr(head_end + *length);
        buf.clear();

        // Pipelining closes the connection: one inbound request maps to at
        // most one upstream request.
        bool pipelined = !leftover.empty();

        auto parsed = parse_request(request_octets);
        if (!parsed) {
            send_all(fd, simple_response(400, "Bad Request",
                                         "structural error: " +
                                             parsed.error().message + "\n",
                                         true));
            log_record(client, "structural-error", parsed.error().message, {},
                       request_octets.size(), 0);
            break;
        }
        bool client_close = false;
        if (auto conn = parsed->header_value("Connection"))
            client_close = ascii_ieq(trim_ows(*conn), "close");

        NormalizationOutcome outcome = normalize(*parsed, cfg_.policy);

        if (outcome.is_rejected()) {
            const RejectReason &r = outcome.rejected();
            Bytes body = Bytes(to_string(r.category)) + ": " + r.detail + "\n";
            send_all(fd, simple_response(cfg_.reject_status, "Bad Request", body,
                                         client_close || pipelined));
            log_record(client, "rejected", to_string(r.category), {},
                       request_octets.size(), 0);
            keep_alive = !client_close && !pipelined;
            continue;
        }

        Bytes forward;
        std::vector<Bytes> change_kinds;
        Bytes outcome_name;
        if (outcome.is_normalized()) {
            forward = serialize_request(outcome.normalized().request);
            for (const auto &c : outcome.normalized().changes)
                change_kinds.push_back(to_string(c.kind));
            outcome_name = "normalized";
        } else {
            forward = request_octets;
            outcome_name = "passed-through";
        }

        int up = connect_to(cfg_.upstream_host, cfg_.upstream_port);
        if (up < 0 || !send_all(up, forward)) {
            if (up >= 0)
                ::close(up);
            send_all(fd, simple_response(502, "Bad Gateway",
                                         "upstream unreachable\n", true));
            log_record(client, "upstream-error", "connect failed", change_kinds,
                       request_octets.size(), 0);
            break;
        }

        // Relay the upstream response verbatim: Content-Length-bounded when
        // declared, else stream until upstream EOF and close.
        Bytes resp;
        size_t resp_head_end = 0;
        bool have_head = false;
        bool upstream_eof = false;
        while (true) {
            size_t crlf = resp.find("\r\n\r\n");
            if (crlf != Bytes::npos) {
                resp_head_end = crlf + 4;
                have_head = true;
                break;
            }
            char chunk[8192];
            ssize_t n = ::recv(up, chunk, sizeof(chunk), 0);
            if (n <= 0) {
                upstream_eof = true;
                break;
            }
            resp.append(chunk, static_cast<size_t>(n));
        }
        bool close_after = client_close || pipelined;
        if (have_head) {
            auto resp_len =
                head_content_length(BytesView(resp).substr(0, resp_head_end));
            if (resp_len) {
                while (resp.size() < resp_head_end + *resp_len) {
                    char chunk[8192];
                    ssize_t n = ::recv(up, chunk, sizeof(chunk), 0);
                    if (n <= 0)
                        break;
                    resp.append(chunk, static_cast<size_t>(n));
                }
            } else {
                // unframed response: drain until EOF
                char chunk[8192];
                ssize_t n;
                while ((n = ::recv(up, chunk, sizeof(chunk), 0)) > 0)
                    resp.append(chunk, static_cast<size_t>(n));
                close_after = true;
            }
        } else if (upstream_eof && resp.empty()) {
            ::close(up);
            send_all(fd, simple_response(502, "Bad Gateway",
                                         "empty upstream response\n", true));
            log_record(client, "upstream-error", "no response", change_kinds,
                       request_octets.size(), forward.size());
            break;
        }
        ::close(up);
        send_all(fd, resp);
        log_record(client, outcome_name, "", change_kinds, request_octets.size(),
                   forward.size());
        keep_alive = !close_after;
    }
    ::close(fd);
}

int serve(const ProxyConfig &cfg) {
    ProxyServer server(cfg);
    auto started = server.start();
    if (!started) {
        fprintf(stderr, "proxy: %s\n", started.error().c_str());
        return 2;
    }
    fprintf(stderr, "proxy: listening on %s:%u, upstream %s:%u\n",
            cfg.listen_host.c_str(), server.bound_port(),
            cfg.upstream_host.c_str(), cfg.upstream_port);

    sigset_t mask;
    sigemptyset(&mask);
    sigaddset(&mask, SIGINT);
    sigaddset(&mask, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &mask, nullptr);
    int sig = 0;
    sigwait(&mask, &sig);
    server.stop();
    return 0;
}

} // namespace wafdiff
