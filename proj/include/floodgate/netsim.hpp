// Copyright (c) 2026 The Floodgate developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "floodgate/exchange.hpp"
#include "floodgate/ledger.hpp"
#include "floodgate/message.hpp"
#include "floodgate/policy.hpp"

namespace floodgate {

enum class Topology { Ring, RandomRegular, Complete };

inline std::string_view to_string(Topology t) {
    switch (t) {
    case Topology::Ring: return "ring";
    case Topology::RandomRegular: return "random";
    case Topology::Complete: return "complete";
    }
    return "unknown";
}

inline std::optional<Topology> topology_from_string(std::string_view s) {
    if (s == "ring") return Topology::Ring;
    if (s == "random") return Topology::RandomRegular;
    if (s == "complete") return Topology::Complete;
    return std::nullopt;
}

struct NetConfig {
    std::uint32_t node_count{8};
    Topology topology{Topology::Ring};
    std::uint32_t degree{4};              // for random k-regular graphs
    Duration hop_latency{1};              // per-edge delivery delay
    std::uint64_t bandwidth_budget{1000000}; // relay bytes per node per tick
    Duration tick{1};                     // budget window length
    std::uint64_t seed{1};
};

struct DisconnectedTopology : std::runtime_error {
    DisconnectedTopology() : std::runtime_error("topology is not connected") {}
};

/// One line per simulation event; the rendered form is the determinism
/// witness (identical seeds must reproduce it byte for byte).
struct TraceRecord {
    TimePoint at{0};
    std::int32_t node{-1}; // -1: chain/global scope
    std::string event;     // broadcast | deliver | forward | block | window
    Digest digest;
    std::string decision;  // relay | drop | queue | mined | adjust | send
    RejectReason reason{RejectReason::None};
};

inline std::string render_trace_record(const TraceRecord& r) {
    std::ostringstream os;
    os << "t=" << r.at << " node=" << r.node << " ev=" << r.event
       << " digest=" << r.digest.hex() << " decision=" << r.decision
       << " reason=" << to_string(r.reason);
    return os.str();
}

/// A gossip participant: policy instance, dedup set, offer book, pending
/// relay queue and bandwidth accounting.
struct Node {
    std::uint32_t id{0};
    std::vector<std::uint32_t> peers;
    std::unique_ptr<AdmissionPolicy> policy;
    std::set<Digest> seen;
    std::map<Digest, SellOffer> offer_book;

    struct PendingRelay {
        Rational priority;
        std::uint64_t seq{0};
        P2PMessage msg;
        std::int64_t exclude_peer{-1};
    };
    std::vector<PendingRelay> pending;
    TimePoint budget_window{-1};
    std::uint64_t budget_used{0};
    bool flush_scheduled{false};
    TimePoint tick_scheduled_at{-1};

    // decision counters (reconciled against the trace)
    std::uint64_t admitted{0};
    std::map<RejectReason, std::uint64_t> rejected;
    std::uint64_t window_admitted{0}; // feeds the threshold controller
};

/// Deterministic discrete-event gossip fabric. Every node runs its own
/// policy instance over one shared chain view; messages flood with dedup.
/// Strictly single-threaded; events process in (time, sequence) order.
class Network {
public:
    using Action = std::function<void(Network&, TimePoint)>;
    using AcceptHook =
        std::function<void(Network&, std::uint32_t node, const P2PMessage&, TimePoint)>;

    Network(NetConfig cfg, Ledger& ledger,
            const std::function<std::unique_ptr<AdmissionPolicy>()>& policy_factory)
        : cfg_(cfg), ledger_(ledger) {
        build_topology();
        for (std::uint32_t i = 0; i < cfg_.node_count; ++i) {
            nodes_[i].id = i;
            nodes_[i].policy = policy_factory();
        }
    }

    const NetConfig& config() const { return cfg_; }
    Ledger& ledger() { return ledger_; }
    const Ledger& ledger() const { return ledger_; }
    TimePoint now() const { return now_; }
    Node& node(std::uint32_t i) { return nodes_.at(i); }
    const Node& node(std::uint32_t i) const { return nodes_.at(i); }
    std::size_t node_count() const { return nodes_.size(); }
    const std::vector<TraceRecord>& trace() const { return trace_; }

    void set_accept_hook(AcceptHook hook) { accept_hook_ = std::move(hook); }

    /// Longest shortest path over the topology (for latency bounds).
    std::uint32_t diameter() const {
        std::uint32_t best = 0;
        for (std::uint32_t s = 0; s < nodes_.size(); ++s) {
            auto dist = bfs_distances(s);
            for (auto d : dist) best = std::max(best, d);
        }
        return best;
    }

    void schedule_action(TimePoint at, Action fn) {
        push_event(at, ActionEvent{std::move(fn)});
    }

    /// Schedules block production at `at` (and nothing else; callers lay
    /// out the block cadence).
    void schedule_block(TimePoint at) { push_event(at, BlockEvent{}); }

    /// Origin-side injection: the origin node applies its own policy first;
    /// a rejected message generates no network events.
    void broadcast(std::uint32_t origin, const P2PMessage& msg) {
        process_incoming(origin, msg, -1, "broadcast");
    }

    /// Adversarial send: the origin skips its own policy and pushes the
    /// message straight to its peers. Honest nodes still enforce theirs.
    void inject(std::uint32_t origin, const P2PMessage& msg) {
        Node& n = nodes_[origin];
        trace_.push_back(TraceRecord{now_, static_cast<std::int32_t>(origin), "inject",
                                     msg.digest, "send", RejectReason::None});
        for (std::uint32_t peer : n.peers)
            push_event(now_ + cfg_.hop_latency,
                       DeliverEvent{peer, static_cast<std::int64_t>(origin), msg});
    }

    /// Applies the threshold controller at every node: each node feeds its
    /// own admitted count for the closing window and resets the counter.
    void apply_controller(std::uint64_t target) {
        for (auto& n : nodes_) {
            n.policy->apply_load_signal(n.window_admitted, target);
            n.window_admitted = 0;
        }
        TraceRecord rec{now_, 0, "window", Digest{}, "adjust", RejectReason::None};
        trace_.push_back(rec);
    }

    /// Runs all events with time <= until.
    void run_until(TimePoint until) {
        while (!events_.empty() && events_.top().at <= until) {
            Event ev = events_.top();
            events_.pop();
            now_ = ev.at;
            std::visit([&](auto& kind) { handle(ev, kind); }, ev.kind);
        }
        now_ = std::max(now_, until);
    }

    std::string render_trace() const {
        std::string out;
        for (const auto& r : trace_) {
            out += render_trace_record(r);
            out += '\n';
        }
        return out;
    }

    Digest trace_digest() const { return hash(render_trace()); }

private:
    struct DeliverEvent {
        std::uint32_t to{0};
        std::int64_t from{-1};
        P2PMessage msg;
    };
    struct FlushEvent {
        std::uint32_t node{0};
    };
    struct TickEvent {
        std::uint32_t node{0};
    };
    struct BlockEvent {};
    struct ActionEvent {
        Action fn;
    };
    using EventKind =
        std::variant<DeliverEvent, FlushEvent, TickEvent, BlockEvent, ActionEvent>;

    struct Event {
        TimePoint at{0};
        std::uint64_t seq{0};
        EventKind kind;
    };
    struct EventOrder {
        bool operator()(const Event& a, const Event& b) const {
            if (a.at != b.at) return a.at > b.at;
            return a.seq > b.seq;
        }
    };

    void push_event(TimePoint at, EventKind kind) {
        events_.push(Event{at, next_seq_++, std::move(kind)});
    }

    void handle(const Event&, DeliverEvent& ev) {
        process_incoming(ev.to, ev.msg, ev.from, "deliver");
    }

    void handle(const Event&, FlushEvent& ev) {
        Node& n = nodes_[ev.node];
        n.flush_scheduled = false;
        drain_pending(n);
    }

    void handle(const Event&, TickEvent& ev) {
        Node& n = nodes_[ev.node];
        if (n.tick_scheduled_at == now_) n.tick_scheduled_at = -1;
        drain_pending(n);
    }

    void handle(const Event&, BlockEvent&) {
        const Block& b = ledger_.mine_block(now_);
        Digest id;
        if (!b.txs.empty()) id = b.txs.front().txid();
        trace_.push_back(TraceRecord{now_, -1, "block", id, "mined", RejectReason::None});
        for (const auto& tx : b.txs) {
            Digest txid = tx.txid();
            for (auto& n : nodes_) n.policy->observe_confirmed_tx(ledger_, txid);
        }
    }

    void handle(const Event&, ActionEvent& ev) { ev.fn(*this, now_); }

    /// Shared path for origin broadcasts and peer deliveries.
    void process_incoming(std::uint32_t node_id, const P2PMessage& msg,
                          std::int64_t from, const char* event) {
        Node& n = nodes_[node_id];
        if (n.seen.count(msg.digest)) {
            n.rejected[RejectReason::Duplicate]++;
            trace_.push_back(TraceRecord{now_, static_cast<std::int32_t>(node_id), event,
                                         msg.digest, "drop", RejectReason::Duplicate});
            return;
        }

        // rejected messages are not marked seen: a later redelivery may pass
        // (e.g. once the quota window rolls over), and they are never relayed
        AdmissionDecision probe = n.policy->admit(msg, ledger_, now_, CheckMode::Probe);
        if (!probe.admitted) {
            n.rejected[probe.reason]++;
            trace_.push_back(TraceRecord{now_, static_cast<std::int32_t>(node_id), event,
                                         msg.digest, "drop", probe.reason});
            return;
        }

        // content effects: offers must verify before a node books or relays
        auto type = payload_type(msg.payload);
        if (type == BodyType::Offer) {
            auto offer = SellOffer::decode(payload_body(msg.payload));
            if (!offer || !verify_offer(ledger_, *offer, now_).valid) {
                n.rejected[RejectReason::OfferInvalid]++;
                trace_.push_back(TraceRecord{now_, static_cast<std::int32_t>(node_id),
                                             event, msg.digest, "drop",
                                             RejectReason::OfferInvalid});
                return;
            }
            n.offer_book.emplace(msg.digest, *offer);
        } else if (type == BodyType::Take) {
            if (!PartialTradeTx::decode(payload_body(msg.payload))) {
                n.rejected[RejectReason::InvalidPayload]++;
                trace_.push_back(TraceRecord{now_, static_cast<std::int32_t>(node_id),
                                             event, msg.digest, "drop",
                                             RejectReason::InvalidPayload});
                return;
            }
        }

        // admitted: consume quota/claims, dedup, count, queue for relay
        n.policy->admit(msg, ledger_, now_, CheckMode::Consume);
        n.seen.insert(msg.digest);
        n.admitted++;
        n.window_admitted++;
        trace_.push_back(TraceRecord{now_, static_cast<std::int32_t>(node_id), event,
                                     msg.digest, "relay", RejectReason::None});
        if (accept_hook_) accept_hook_(*this, node_id, msg, now_);

        n.pending.push_back(Node::PendingRelay{probe.priority, next_seq_++, msg, from});
        if (!n.flush_scheduled) {
            n.flush_scheduled = true;
            push_event(now_, FlushEvent{node_id});
        }
    }

    /// Sends queued relays in priority order while this tick's budget
    /// lasts; anything left waits for the next tick boundary.
    void drain_pending(Node& n) {
        TimePoint window = now_ / cfg_.tick;
        if (window != n.budget_window) {
            n.budget_window = window;
            n.budget_used = 0;
        }
        std::sort(n.pending.begin(), n.pending.end(),
                  [](const Node::PendingRelay& a, const Node::PendingRelay& b) {
                      if (a.priority != b.priority) return b.priority < a.priority;
                      return a.seq < b.seq;
                  });
        std::size_t kept = 0;
        for (std::size_t i = 0; i < n.pending.size(); ++i) {
            auto& item = n.pending[i];
            std::uint64_t cost = message_wire_size(item.msg);
            if (n.budget_used + cost <= cfg_.bandwidth_budget) {
                n.budget_used += cost;
                forward(n, item);
            } else {
                n.pending[kept++] = std::move(item);
            }
        }
        n.pending.resize(kept);
        if (!n.pending.empty()) {
            TimePoint next_tick = (window + 1) * cfg_.tick;
            if (n.tick_scheduled_at != next_tick) {
                n.tick_scheduled_at = next_tick;
                push_event(next_tick, TickEvent{n.id});
            }
        }
    }

    void forward(Node& n, const Node::PendingRelay& item) {
        trace_.push_back(TraceRecord{now_, static_cast<std::int32_t>(n.id), "forward",
                                     item.msg.digest, "send", RejectReason::None});
        for (std::uint32_t peer : n.peers) {
            if (static_cast<std::int64_t>(peer) == item.exclude_peer) continue;
            push_event(now_ + cfg_.hop_latency,
                       DeliverEvent{peer, static_cast<std::int64_t>(n.id), item.msg});
        }
    }

    void build_topology() {
        std::uint32_t n = cfg_.node_count;
        if (n == 0) throw DisconnectedTopology();
        nodes_ = std::vector<Node>(n);
        auto link = [&](std::uint32_t a, std::uint32_t b) {
            if (a == b) return;
            auto& pa = nodes_[a].peers;
            auto& pb = nodes_[b].peers;
            if (std::find(pa.begin(), pa.end(), b) == pa.end()) pa.push_back(b);
            if (std::find(pb.begin(), pb.end(), a) == pb.end()) pb.push_back(a);
        };
        switch (cfg_.topology) {
        case Topology::Ring:
            for (std::uint32_t i = 0; i < n; ++i) link(i, (i + 1) % n);
            break;
        case Topology::Complete:
            for (std::uint32_t i = 0; i < n; ++i)
                for (std::uint32_t j = i + 1; j < n; ++j) link(i, j);
            break;
        case Topology::RandomRegular: {
            if (cfg_.degree >= n) throw DisconnectedTopology();
            std::mt19937_64 rng(cfg_.seed);
            bool built = false;
            for (int attempt = 0; attempt < 200 && !built; ++attempt) {
                for (auto& node : nodes_) node.peers.clear();
                if (try_regular_graph(rng)) built = connected();
            }
            if (!built) throw DisconnectedTopology();
            for (auto& node : nodes_) std::sort(node.peers.begin(), node.peers.end());
            break;
        }
        }
        if (!connected()) throw DisconnectedTopology();
    }

    /// Configuration-model attempt at a simple k-regular graph.
    bool try_regular_graph(std::mt19937_64& rng) {
        std::uint32_t n = cfg_.node_count;
        std::uint32_t k = cfg_.degree;
        if ((static_cast<std::uint64_t>(n) * k) % 2 != 0) ++k; // need an even stub count
        std::vector<std::uint32_t> stubs;
        for (std::uint32_t i = 0; i < n; ++i)
            for (std::uint32_t j = 0; j < k; ++j) stubs.push_back(i);
        // explicit Fisher-Yates: std::shuffle is implementation-defined
        for (std::size_t i = stubs.size(); i > 1; --i)
            std::swap(stubs[i - 1], stubs[rng() % i]);
        for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
            std::uint32_t a = stubs[i];
            std::uint32_t b = stubs[i + 1];
            if (a == b) return false;
            auto& pa = nodes_[a].peers;
            if (std::find(pa.begin(), pa.end(), b) != pa.end()) return false;
            pa.push_back(b);
            nodes_[b].peers.push_back(a);
        }
        return true;
    }

    std::vector<std::uint32_t> bfs_distances(std::uint32_t start) const {
        std::vector<std::uint32_t> dist(nodes_.size(), ~std::uint32_t{0});
        std::vector<std::uint32_t> frontier{start};
        dist[start] = 0;
        while (!frontier.empty()) {
            std::vector<std::uint32_t> next;
            for (auto u : frontier)
                for (auto v : nodes_[u].peers)
                    if (dist[v] == ~std::uint32_t{0}) {
                        dist[v] = dist[u] + 1;
                        next.push_back(v);
                    }
            frontier = std::move(next);
        }
        return dist;
    }

    bool connected() const {
        if (nodes_.empty()) return false;
        auto dist = bfs_distances(0);
        return std::all_of(dist.begin(), dist.end(),
                           [](std::uint32_t d) { return d != ~std::uint32_t{0}; });
    }

    NetConfig cfg_;
    Ledger& ledger_;
    std::vector<Node> nodes_;
    std::priority_queue<Event, std::vector<Event>, EventOrder> events_;
    std::uint64_t next_seq_{0};
    TimePoint now_{0};
    std::vector<TraceRecord> trace_;
    AcceptHook accept_hook_;
};

} // namespace floodgate
