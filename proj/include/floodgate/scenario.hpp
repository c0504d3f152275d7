// Copyright (c) 2026 The Floodgate developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "floodgate/netsim.hpp"
#include "floodgate/policy.hpp"

namespace floodgate {

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : ScenarioError {
    ParseError(std::size_t line, const std::string& what)
        : ScenarioError("parse error at line " + std::to_string(line) + ": " + what) {}
};

struct ValidationError : ScenarioError {
    explicit ValidationError(const std::string& field, const std::string& what)
        : ScenarioError("invalid field '" + field + "': " + what), field_path(field) {}
    std::string field_path;
};

struct IoError : ScenarioError {
    using ScenarioError::ScenarioError;
};

enum class AttackStrategy { Flood, SybilSplit, BurstThenWait };

inline std::string_view to_string(AttackStrategy s) {
    switch (s) {
    case AttackStrategy::Flood: return "flood";
    case AttackStrategy::SybilSplit: return "sybil";
    case AttackStrategy::BurstThenWait: return "burst";
    }
    return "unknown";
}

inline std::optional<AttackStrategy> strategy_from_string(std::string_view s) {
    if (s == "flood") return AttackStrategy::Flood;
    if (s == "sybil") return AttackStrategy::SybilSplit;
    if (s == "burst") return AttackStrategy::BurstThenWait;
    return std::nullopt;
}

struct AttackerSpec {
    Amount budget{0}; // 0 disables the attacker
    std::uint64_t rate_per_hour{600};
    AttackStrategy strategy{AttackStrategy::Flood};
    std::uint32_t spam_size{100};
    std::uint64_t max_pow{4096}; // hardest puzzle the attacker can solve
};

struct ActorsSpec {
    std::uint32_t sellers{2};
    std::uint32_t names_per_seller{1};
    Duration offer_interval{86400}; // one offer per name per day
    Amount offer_price{100};
    Amount seller_funds{50};
    std::uint32_t buyers{0};
    Amount buyer_funds{200};
    Duration buy_interval{1800};
    AttackerSpec attacker;
};

/// A complete experiment description: one chain, one gossip network, one
/// policy, scripted honest actors and an optional attacker.
struct Scenario {
    std::uint32_t version{1};
    std::string name{"scenario"};
    std::uint64_t seed{1};
    Duration duration{7200};
    Duration setup_duration{600}; // funding/registration/identity phase

    Amount supply{1000000};
    std::size_t block_capacity{100};
    Duration block_interval{10};
    std::size_t mempool_limit{10000};

    NetConfig net;
    PolicySpec policy;
    ActorsSpec actors;
};

namespace detail {

inline std::uint64_t parse_u64(std::string_view value, std::size_t line) {
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        throw ParseError(line, "expected an unsigned integer, got '" + std::string(value) + "'");
    return out;
}

} // namespace detail

inline void validate_scenario(const Scenario& sc) {
    if (sc.version != 1)
        throw ValidationError("version", "unsupported schema version");
    if (sc.supply == 0) throw ValidationError("ledger.supply", "must be positive");
    if (sc.block_capacity == 0)
        throw ValidationError("ledger.block_capacity", "must be positive");
    if (sc.block_interval < 1)
        throw ValidationError("ledger.block_interval", "must be at least 1 second");
    if (static_cast<unsigned __int128>(sc.supply) * static_cast<std::uint64_t>(sc.duration) >
        ~std::uint64_t{0})
        throw ValidationError("ledger.supply",
                              "supply * duration overflows coinage arithmetic");
    if (sc.net.node_count == 0) throw ValidationError("net.nodes", "must be positive");
    if (sc.net.topology == Topology::RandomRegular && sc.net.degree >= sc.net.node_count)
        throw ValidationError("net.degree", "must be below the node count");
    if (sc.net.hop_latency < 0) throw ValidationError("net.hop_latency", "negative");
    if (sc.net.tick < 1) throw ValidationError("net.tick", "must be at least 1 second");
    if (sc.policy.window < 1)
        throw ValidationError("policy.window", "must be at least 1 second");
    if (sc.duration < sc.policy.window)
        throw ValidationError("duration", "must cover at least one policy window");
    if (sc.setup_duration < 0 || sc.setup_duration >= sc.duration)
        throw ValidationError("setup_duration", "must fit inside the duration");
    if (sc.actors.attacker.budget > sc.supply)
        throw ValidationError("actors.attacker.budget", "exceeds the money supply");
    unsigned __int128 funded =
        static_cast<unsigned __int128>(sc.actors.sellers) * sc.actors.seller_funds +
        static_cast<unsigned __int128>(sc.actors.buyers) * sc.actors.buyer_funds +
        sc.actors.attacker.budget;
    if (funded > sc.supply)
        throw ValidationError("actors", "actor funding exceeds the money supply");
    if (sc.actors.sellers > 0 && sc.actors.names_per_seller == 0)
        throw ValidationError("actors.names_per_seller", "sellers need at least one name");
    if (sc.actors.sellers > 0 && sc.actors.offer_interval < 1)
        throw ValidationError("actors.offer_interval", "must be positive");
    if (sc.actors.attacker.budget > 0 && sc.actors.attacker.spam_size == 0)
        throw ValidationError("actors.attacker.spam_size", "must be positive");
}

/// Parses the scenario text format: `key value` lines, `key {` opening a
/// nested section, `}` closing it, `#` comments. Unknown keys are rejected
/// with their full dotted path.
inline Scenario parse_scenario(std::string_view text) {
    Scenario sc;
    std::vector<std::string> stack;
    std::size_t line_no = 0;

    auto path_of = [&](std::string_view key) {
        std::string path;
        for (const auto& s : stack) path += s + ".";
        path += std::string(key);
        return path;
    };

    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (auto hash_pos = line.find('#'); hash_pos != std::string_view::npos)
            line = line.substr(0, hash_pos);
        while (!line.empty() && (line.front() == ' ' || line.front() == '\t'))
            line.remove_prefix(1);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t' ||
                                 line.back() == '\r'))
            line.remove_suffix(1);
        if (line.empty()) continue;

        if (line == "}") {
            if (stack.empty()) throw ParseError(line_no, "unmatched '}'");
            stack.pop_back();
            continue;
        }

        auto space = line.find(' ');
        if (space == std::string_view::npos)
            throw ParseError(line_no, "expected 'key value' or 'key {'");
        std::string_view key = line.substr(0, space);
        std::string_view value = line.substr(space + 1);
        while (!value.empty() && value.front() == ' ') value.remove_prefix(1);

        if (value == "{") {
            stack.emplace_back(key);
            continue;
        }
        if (value.empty()) throw ParseError(line_no, "missing value");

        std::string path = path_of(key);
        auto u64 = [&] { return detail::parse_u64(value, line_no); };

        if (path == "version") sc.version = static_cast<std::uint32_t>(u64());
        else if (path == "name") sc.name = std::string(value);
        else if (path == "seed") sc.seed = u64();
        else if (path == "duration") sc.duration = static_cast<Duration>(u64());
        else if (path == "setup_duration") sc.setup_duration = static_cast<Duration>(u64());
        else if (path == "ledger.supply") sc.supply = u64();
        else if (path == "ledger.block_capacity") sc.block_capacity = u64();
        else if (path == "ledger.block_interval") sc.block_interval = static_cast<Duration>(u64());
        else if (path == "ledger.mempool_limit") sc.mempool_limit = u64();
        else if (path == "net.nodes") sc.net.node_count = static_cast<std::uint32_t>(u64());
        else if (path == "net.topology") {
            auto t = topology_from_string(value);
            if (!t) throw ValidationError(path, "unknown topology '" + std::string(value) + "'");
            sc.net.topology = *t;
        } else if (path == "net.degree") sc.net.degree = static_cast<std::uint32_t>(u64());
        else if (path == "net.hop_latency") sc.net.hop_latency = static_cast<Duration>(u64());
        else if (path == "net.bandwidth") sc.net.bandwidth_budget = u64();
        else if (path == "net.tick") sc.net.tick = static_cast<Duration>(u64());
        else if (path == "policy.kind") {
            auto k = policy_kind_from_string(value);
            if (!k) throw ValidationError(path, "unknown policy '" + std::string(value) + "'");
            sc.policy.kind = *k;
        } else if (path == "policy.hashcash_floor") sc.policy.hashcash_floor = u64();
        else if (path == "policy.min_rate_millis") sc.policy.min_rate_millis = u64();
        else if (path == "policy.min_fee") sc.policy.min_fee = u64();
        else if (path == "policy.min_coinage") sc.policy.min_coinage = u64();
        else if (path == "policy.min_burn") sc.policy.min_burn = u64();
        else if (path == "policy.min_value") sc.policy.min_value = u64();
        else if (path == "policy.window") sc.policy.window = static_cast<Duration>(u64());
        else if (path == "policy.grants") sc.policy.grants = u64();
        else if (path == "policy.controller_target") sc.policy.controller_target = u64();
        else if (path == "actors.sellers") sc.actors.sellers = static_cast<std::uint32_t>(u64());
        else if (path == "actors.names_per_seller")
            sc.actors.names_per_seller = static_cast<std::uint32_t>(u64());
        else if (path == "actors.offer_interval")
            sc.actors.offer_interval = static_cast<Duration>(u64());
        else if (path == "actors.offer_price") sc.actors.offer_price = u64();
        else if (path == "actors.seller_funds") sc.actors.seller_funds = u64();
        else if (path == "actors.buyers") sc.actors.buyers = static_cast<std::uint32_t>(u64());
        else if (path == "actors.buyer_funds") sc.actors.buyer_funds = u64();
        else if (path == "actors.buy_interval")
            sc.actors.buy_interval = static_cast<Duration>(u64());
        else if (path == "actors.attacker.budget") sc.actors.attacker.budget = u64();
        else if (path == "actors.attacker.rate")
            sc.actors.attacker.rate_per_hour = u64();
        else if (path == "actors.attacker.strategy") {
            auto s = strategy_from_string(value);
            if (!s) throw ValidationError(path, "unknown strategy '" + std::string(value) + "'");
            sc.actors.attacker.strategy = *s;
        } else if (path == "actors.attacker.spam_size")
            sc.actors.attacker.spam_size = static_cast<std::uint32_t>(u64());
        else if (path == "actors.attacker.max_pow")
            sc.actors.attacker.max_pow = u64();
        else
            throw ValidationError(path, "unknown key");
    }
    if (!stack.empty()) throw ParseError(line_no, "unclosed section '" + stack.back() + "'");

    validate_scenario(sc);
    return sc;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

/// Canonical echo with every default filled in; parsing it again yields an
/// identical scenario.
inline std::string render_scenario(const Scenario& sc) {
    std::ostringstream os;
    os << "version " << sc.version << "\n";
    os << "name " << sc.name << "\n";
    os << "seed " << sc.seed << "\n";
    os << "duration " << sc.duration << "\n";
    os << "setup_duration " << sc.setup_duration << "\n";
    os << "ledger {\n";
    os << "  supply " << sc.supply << "\n";
    os << "  block_capacity " << sc.block_capacity << "\n";
    os << "  block_interval " << sc.block_interval << "\n";
    os << "  mempool_limit " << sc.mempool_limit << "\n";
    os << "}\n";
    os << "net {\n";
    os << "  nodes " << sc.net.node_count << "\n";
    os << "  topology " << to_string(sc.net.topology) << "\n";
    os << "  degree " << sc.net.degree << "\n";
    os << "  hop_latency " << sc.net.hop_latency << "\n";
    os << "  bandwidth " << sc.net.bandwidth_budget << "\n";
    os << "  tick " << sc.net.tick << "\n";
    os << "}\n";
    os << "policy {\n";
    os << "  kind " << to_string(sc.policy.kind) << "\n";
    os << "  hashcash_floor " << sc.policy.hashcash_floor << "\n";
    os << "  min_rate_millis " << sc.policy.min_rate_millis << "\n";
    os << "  min_fee " << sc.policy.min_fee << "\n";
    os << "  min_coinage " << sc.policy.min_coinage << "\n";
    os << "  min_burn " << sc.policy.min_burn << "\n";
    os << "  min_value " << sc.policy.min_value << "\n";
    os << "  window " << sc.policy.window << "\n";
    os << "  grants " << sc.policy.grants << "\n";
    os << "  controller_target " << sc.policy.controller_target << "\n";
    os << "}\n";
    os << "actors {\n";
    os << "  sellers " << sc.actors.sellers << "\n";
    os << "  names_per_seller " << sc.actors.names_per_seller << "\n";
    os << "  offer_interval " << sc.actors.offer_interval << "\n";
    os << "  offer_price " << sc.actors.offer_price << "\n";
    os << "  seller_funds " << sc.actors.seller_funds << "\n";
    os << "  buyers " << sc.actors.buyers << "\n";
    os << "  buyer_funds " << sc.actors.buyer_funds << "\n";
    os << "  buy_interval " << sc.actors.buy_interval << "\n";
    os << "  attacker {\n";
    os << "    budget " << sc.actors.attacker.budget << "\n";
    os << "    rate " << sc.actors.attacker.rate_per_hour << "\n";
    os << "    strategy " << to_string(sc.actors.attacker.strategy) << "\n";
    os << "    spam_size " << sc.actors.attacker.spam_size << "\n";
    os << "    max_pow " << sc.actors.attacker.max_pow << "\n";
    os << "  }\n";
    os << "}\n";
    return os.str();
}

} // namespace floodgate
