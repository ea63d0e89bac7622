#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "minimod/errors.hpp"

namespace minimod {

/// Wire header for halo and gather messages: little-endian u32 quadruple.
/// `count` is the number of f32 payload words. tag = axis * 2 + dir
/// disambiguates concurrent messages between one rank pair.
struct MsgHeader {
    std::uint32_t step = 0;
    std::uint32_t axis = 0; // 0..2 halo axes; kGatherAxis for trace gather
    std::uint32_t dir = 0;  // 0 = low side, 1 = high side
    std::uint32_t count = 0;

    std::uint32_t tag() const { return axis * 2 + dir; }
};

constexpr std::uint32_t kGatherAxis = 15;
constexpr std::uint32_t kWireVersion = 1; // sent once per connection

/// Non-blocking point-to-point message endpoint. Messages between a pair of
/// ranks are delivered in posting order per tag; wait_all() completes every
/// posted send and receive ("expected message" mode, no overlap with
/// computation).
class Transport {
public:
    virtual ~Transport() = default;
    virtual int rank() const = 0;
    virtual int nranks() const = 0;
    virtual void post_send(int dest, const MsgHeader& header, const float* payload) = 0;
    virtual void post_recv(int src, std::uint32_t axis, std::uint32_t dir,
                           std::vector<float>& out, MsgHeader* header = nullptr) = 0;
    virtual void wait_all() = 0;
};

/// Shared mailbox hub backing the in-process transport: N ranks in one
/// process, used by the correctness oracles and the `inproc` CLI transport.
class InProcHub {
public:
    explicit InProcHub(int nranks) : nranks_(nranks) {}
    std::unique_ptr<Transport> endpoint(int rank);

    int nranks() const { return nranks_; }

private:
    friend class InProcTransport;
    struct Key {
        int dest, src;
        std::uint32_t tag;
        auto operator<=>(const Key&) const = default;
    };
    using Message = std::pair<MsgHeader, std::vector<float>>;

    void push(const Key& key, Message msg);
    Message pop_blocking(const Key& key, int self_rank);

    int nranks_;
    std::mutex mu_;
    std::condition_variable cv_;
    std::map<Key, std::deque<Message>> queues_;
};

/// TCP transport for multi-process runs. Endpoints come from a host file
/// (one "host:port" line per rank, rank order). Connections are established
/// lazily; each connection starts with a u32 wire version and the u32 rank
/// of the connecting side. post_send queues; wait_all writes all queued
/// messages from a helper thread while the caller drains expected receives.
class SocketTransport : public Transport {
public:
    SocketTransport(int rank, std::vector<std::pair<std::string, int>> endpoints);
    ~SocketTransport() override;

    int rank() const override { return rank_; }
    int nranks() const override { return static_cast<int>(endpoints_.size()); }
    void post_send(int dest, const MsgHeader& header, const float* payload) override;
    void post_recv(int src, std::uint32_t axis, std::uint32_t dir, std::vector<float>& out,
                   MsgHeader* header = nullptr) override;
    void wait_all() override;

private:
    struct PendingSend {
        int dest;
        MsgHeader header;
        std::vector<float> payload;
    };
    struct PendingRecv {
        int src;
        std::uint32_t tag;
        std::vector<float>* out;
        MsgHeader* header;
    };

    int socket_for(int peer); // connect or await accept
    void accept_loop();

    int rank_;
    std::vector<std::pair<std::string, int>> endpoints_;
    int listen_fd_ = -1;
    std::mutex connect_mu_; // serializes outbound dials (one link per pair)
    std::mutex peers_mu_;
    std::condition_variable peers_cv_;
    std::map<int, int> peer_fd_;
    std::unique_ptr<std::jthread> acceptor_;
    std::vector<PendingSend> sends_;
    std::vector<PendingRecv> recvs_;
};

/// Parse a host file: one "host:port" per line, rank order; '#' comments.
std::vector<std::pair<std::string, int>> parse_hostfile(const std::string& path);

} // namespace minimod
