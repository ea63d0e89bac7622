#include "minimod/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <fstream>
#include <thread>

namespace minimod {

namespace {
constexpr auto kTimeout = std::chrono::seconds(120);
}

// ------------------------------------------------------------------ in-proc

class InProcTransport : public Transport {
public:
    InProcTransport(InProcHub* hub, int rank) : hub_(hub), rank_(rank) {}

    int rank() const override { return rank_; }
    int nranks() const override { return hub_->nranks(); }

    void post_send(int dest, const MsgHeader& header, const float* payload) override {
        // copy-out makes the send complete immediately
        std::vector<float> data(payload, payload + header.count);
        hub_->push({dest, rank_, header.tag()}, {header, std::move(data)});
    }

    void post_recv(int src, std::uint32_t axis, std::uint32_t dir, std::vector<float>& out,
                   MsgHeader* header) override {
        pending_.push_back({src, axis * 2 + dir, &out, header});
    }

    void wait_all() override {
        for (auto& p : pending_) {
            auto [hdr, data] = hub_->pop_blocking({rank_, p.src, p.tag}, rank_);
            *p.out = std::move(data);
            if (p.header) *p.header = hdr;
        }
        pending_.clear();
    }

private:
    struct Pending {
        int src;
        std::uint32_t tag;
        std::vector<float>* out;
        MsgHeader* header;
    };
    InProcHub* hub_;
    int rank_;
    std::vector<Pending> pending_;
};

std::unique_ptr<Transport> InProcHub::endpoint(int rank) {
    return std::make_unique<InProcTransport>(this, rank);
}

void InProcHub::push(const Key& key, Message msg) {
    {
        std::lock_guard lock(mu_);
        queues_[key].push_back(std::move(msg));
    }
    cv_.notify_all();
}

InProcHub::Message InProcHub::pop_blocking(const Key& key, int self_rank) {
    std::unique_lock lock(mu_);
    if (!cv_.wait_for(lock, kTimeout, [&] {
            auto it = queues_.find(key);
            return it != queues_.end() && !it->second.empty();
        }))
        throw std::runtime_error("transport timeout: rank " + std::to_string(self_rank) +
                                 " waiting for message from rank " + std::to_string(key.src) +
                                 " tag " + std::to_string(key.tag));
    auto& q = queues_[key];
    Message m = std::move(q.front());
    q.pop_front();
    return m;
}

// ------------------------------------------------------------------- socket

namespace {

void write_exact(int fd, const void* buf, std::size_t len, int rank, int peer) {
    const char* p = static_cast<const char*>(buf);
    while (len > 0) {
        const ssize_t n = ::send(fd, p, len, MSG_NOSIGNAL);
        if (n <= 0)
            throw std::runtime_error("socket send failed: rank " + std::to_string(rank) +
                                     " -> rank " + std::to_string(peer));
        p += n;
        len -= static_cast<std::size_t>(n);
    }
}

void read_exact(int fd, void* buf, std::size_t len, int rank, int peer) {
    char* p = static_cast<char*>(buf);
    while (len > 0) {
        const ssize_t n = ::recv(fd, p, len, 0);
        if (n <= 0)
            throw std::runtime_error("socket recv failed: rank " + std::to_string(rank) +
                                     " <- rank " + std::to_string(peer));
        p += n;
        len -= static_cast<std::size_t>(n);
    }
}

} // namespace

SocketTransport::SocketTransport(int rank, std::vector<std::pair<std::string, int>> endpoints)
    : rank_(rank), endpoints_(std::move(endpoints)) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw std::runtime_error("cannot create listen socket");
    int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_ANY);
    addr.sin_port = htons(static_cast<std::uint16_t>(endpoints_[rank_].second));
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0)
        throw std::runtime_error("rank " + std::to_string(rank_) + " cannot bind port " +
                                 std::to_string(endpoints_[rank_].second));
    if (::listen(listen_fd_, static_cast<int>(endpoints_.size())) != 0)
        throw std::runtime_error("listen failed on rank " + std::to_string(rank_));
    acceptor_ = std::make_unique<std::jthread>([this] { accept_loop(); });
}

SocketTransport::~SocketTransport() {
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    acceptor_.reset();
    for (auto& [peer, fd] : peer_fd_) ::close(fd);
}

void SocketTransport::accept_loop() {
    for (;;) {
        const int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) return; // listener closed
        try {
            std::uint32_t version = 0, peer = 0;
            read_exact(fd, &version, sizeof(version), rank_, -1);
            read_exact(fd, &peer, sizeof(peer), rank_, -1);
            if (version != kWireVersion) {
                ::close(fd);
                continue;
            }
            int one = 1;
            ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
            {
                std::lock_guard lock(peers_mu_);
                peer_fd_[static_cast<int>(peer)] = fd;
            }
            peers_cv_.notify_all();
        } catch (...) {
            ::close(fd);
        }
    }
}

int SocketTransport::socket_for(int peer) {
    {
        std::unique_lock lock(peers_mu_);
        auto it = peer_fd_.find(peer);
        if (it != peer_fd_.end()) return it->second;
    }
    if (peer < rank_) {
        // the higher rank of a pair always dials; serialize dials so two
        // threads (writer + receiver) cannot open duplicate links to one peer
        std::lock_guard dial_lock(connect_mu_);
        {
            std::unique_lock lock(peers_mu_);
            auto it = peer_fd_.find(peer);
            if (it != peer_fd_.end()) return it->second;
        }
        addrinfo hints{}, *res = nullptr;
        hints.ai_family = AF_INET;
        hints.ai_socktype = SOCK_STREAM;
        const std::string port = std::to_string(endpoints_[peer].second);
        if (::getaddrinfo(endpoints_[peer].first.c_str(), port.c_str(), &hints, &res) != 0 ||
            res == nullptr)
            throw std::runtime_error("cannot resolve host for rank " + std::to_string(peer));
        // a fresh socket per attempt: a failed connect leaves the fd unusable
        int fd = -1;
        const auto deadline = std::chrono::steady_clock::now() + kTimeout;
        for (;;) {
            fd = ::socket(AF_INET, SOCK_STREAM, 0);
            if (fd < 0) {
                ::freeaddrinfo(res);
                throw std::runtime_error("cannot create socket");
            }
            if (::connect(fd, res->ai_addr, res->ai_addrlen) == 0) break;
            ::close(fd);
            fd = -1;
            if (std::chrono::steady_clock::now() >= deadline) break;
            std::this_thread::sleep_for(std::chrono::milliseconds(50));
        }
        ::freeaddrinfo(res);
        if (fd < 0)
            throw std::runtime_error("rank " + std::to_string(rank_) +
                                     " cannot connect to rank " + std::to_string(peer));
        const std::uint32_t version = kWireVersion, self = static_cast<std::uint32_t>(rank_);
        write_exact(fd, &version, sizeof(version), rank_, peer);
        write_exact(fd, &self, sizeof(self), rank_, peer);
        int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
        std::lock_guard lock(peers_mu_);
        peer_fd_[peer] = fd;
        return fd;
    }
    // wait for the lower-ranked side of this link to dial in
    std::unique_lock lock(peers_mu_);
    if (!peers_cv_.wait_for(lock, kTimeout, [&] { return peer_fd_.count(peer) > 0; }))
        throw std::runtime_error("rank " + std::to_string(rank_) +
                                 " timed out waiting for connection from rank " +
                                 std::to_string(peer));
    return peer_fd_[peer];
}

void SocketTransport::post_send(int dest, const MsgHeader& header, const float* payload) {
    sends_.push_back({dest, header, std::vector<float>(payload, payload + header.count)});
}

void SocketTransport::post_recv(int src, std::uint32_t axis, std::uint32_t dir,
                                std::vector<float>& out, MsgHeader* header) {
    recvs_.push_back({src, axis * 2 + dir, &out, header});
}

void SocketTransport::wait_all() {
    std::exception_ptr send_error;
    std::jthread writer([&] {
        try {
            for (auto& s : sends_) {
                const int fd = socket_for(s.dest);
                write_exact(fd, &s.header, sizeof(s.header), rank_, s.dest);
                write_exact(fd, s.payload.data(), s.payload.size() * sizeof(float), rank_, s.dest);
            }
        } catch (...) {
            send_error = std::current_exception();
        }
    });
    // Drain receives per source in posting order; within one source, messages
    // arrive in the peer's posting order and are matched against our pending
    // list by tag.
    std::map<int, std::vector<PendingRecv*>> by_src;
    for (auto& r : recvs_) by_src[r.src].push_back(&r);
    for (auto& [src, pend] : by_src) {
        const int fd = socket_for(src);
        std::vector<bool> done(pend.size(), false);
        for (std::size_t got = 0; got < pend.size(); ++got) {
            MsgHeader hdr;
            read_exact(fd, &hdr, sizeof(hdr), rank_, src);
            std::size_t slot = pend.size();
            for (std::size_t i = 0; i < pend.size(); ++i)
                if (!done[i] && pend[i]->tag == hdr.tag()) {
                    slot = i;
                    break;
                }
            if (slot == pend.size())
                throw std::runtime_error("unexpected message tag " + std::to_string(hdr.tag()) +
                                         " on rank " + std::to_string(rank_) + " from rank " +
                                         std::to_string(src));
            auto& out = *pend[slot]->out;
            out.resize(hdr.count);
            read_exact(fd, out.data(), hdr.count * sizeof(float), rank_, src);
            if (pend[slot]->header) *pend[slot]->header = hdr;
            done[slot] = true;
        }
    }
    writer.join();
    sends_.clear();
    recvs_.clear();
    if (send_error) std::rethrow_exception(send_error);
}

std::vector<std::pair<std::string, int>> parse_hostfile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open host file: " + path);
    std::vector<std::pair<std::string, int>> out;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\r')) line.pop_back();
        std::size_t start = line.find_first_not_of(' ');
        if (start == std::string::npos) continue;
        const auto colon = line.rfind(':');
        if (colon == std::string::npos || colon <= start)
            throw ConfigError("malformed host file line (want host:port): " + line);
        out.emplace_back(line.substr(start, colon - start),
                         std::stoi(line.substr(colon + 1)));
    }
    if (out.empty()) throw ConfigError("host file is empty: " + path);
    return out;
}

} // namespace minimod
