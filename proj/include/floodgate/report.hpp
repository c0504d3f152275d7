// Copyright (c) 2026 The Floodgate developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "floodgate/message.hpp"
#include "floodgate/rational.hpp"
#include "floodgate/sha256.hpp"

namespace floodgate {

/// Blockchain usage attributable to a policy, classified from measured
/// bytes: nothing at all; transactions only while identities/quota are set
/// up; a transaction per message on the primary (chain) network; or
/// additional per-message transactions on a secondary chain.
enum class ChainUsageClass { None, OnlySetup, PerMessage, Additional };

inline std::string_view to_string(ChainUsageClass c) {
    switch (c) {
    case ChainUsageClass::None: return "none";
    case ChainUsageClass::OnlySetup: return "only-setup";
    case ChainUsageClass::PerMessage: return "per-message";
    case ChainUsageClass::Additional: return "additional";
    }
    return "unknown";
}

/// Confirmed chain bytes bucketed by the purpose of the transaction.
struct ChainBytesReport {
    std::uint64_t total{0};
    std::uint64_t policy_setup{0};
    std::uint64_t policy_per_message{0};
    std::uint64_t exchange{0}; // registrations and settled trades
    std::uint64_t funding{0};  // actor plumbing (splits, refreshes)
};

/// Derives the usage class from measured bytes. `messages_on_chain` is
/// true when the controlled messages are themselves chain transactions
/// (direct fee / direct coinage); the exchange scenarios gossip on a
/// separate network, so their per-message bytes are additional.
inline ChainUsageClass classify_chain_usage(const ChainBytesReport& bytes,
                                            bool messages_on_chain) {
    if (bytes.policy_per_message > 0)
        return messages_on_chain ? ChainUsageClass::PerMessage
                                 : ChainUsageClass::Additional;
    if (bytes.policy_setup > 0) return ChainUsageClass::OnlySetup;
    return ChainUsageClass::None;
}

struct LatencyStats {
    TimePoint p50{0};
    TimePoint p90{0};
    TimePoint max{0};
};

struct AttackerSpendReport {
    Amount fees{0};
    Amount burned{0};
    Coinage coinage_destroyed{0};
    Amount capital_locked{0}; // UTXO identity stake
    std::uint64_t hash_attempts{0};
    std::uint64_t messages_attempted{0};
};

struct NodeCounters {
    std::uint64_t admitted{0};
    std::map<RejectReason, std::uint64_t> rejected;

    std::uint64_t rejected_total() const {
        std::uint64_t n = 0;
        for (const auto& [r, c] : rejected) n += c;
        return n;
    }
};

struct ScenarioReport {
    std::string scenario_name;
    std::string policy;
    std::uint64_t seed{0};
    Duration duration{0};

    std::vector<NodeCounters> nodes;
    std::uint64_t admitted_total{0};
    std::uint64_t rejected_total{0};
    std::uint64_t decisions_total{0}; // relay+drop decisions in the trace

    std::uint64_t honest_sent{0};          // offers and takes broadcast honestly
    std::uint64_t honest_delivered_all{0}; // of those, reached every node
    std::uint64_t trades_settled{0};       // confirmed atomic name trades
    Rational delivery_ratio{0};
    LatencyStats latency;

    std::uint64_t spam_attempts{0};
    std::uint64_t spam_admitted_total{0};     // node-local admissions of spam
    std::uint64_t spam_messages_admitted{0};  // distinct spam messages any node admitted
    std::uint64_t spam_admitted_max_per_node_window{0};

    AttackerSpendReport attacker;
    ChainBytesReport chain;
    ChainUsageClass usage{ChainUsageClass::None};

    std::vector<std::pair<TimePoint, std::uint64_t>> threshold_trajectory;

    Digest trace_digest;
    std::string scenario_echo; // canonical scenario text, defaults filled
};

enum class ReportFormat { StructuredRecord, TabularText };

inline std::optional<ReportFormat> report_format_from_string(std::string_view s) {
    if (s == "structured" || s == "structured-record") return ReportFormat::StructuredRecord;
    if (s == "tabular" || s == "tabular-text") return ReportFormat::TabularText;
    return std::nullopt;
}

namespace detail {

inline void emit_structured(const ScenarioReport& r, std::ostream& os) {
    os << "report.scenario " << r.scenario_name << "\n";
    os << "report.policy " << r.policy << "\n";
    os << "report.seed " << r.seed << "\n";
    os << "report.duration " << r.duration << "\n";
    os << "report.admitted_total " << r.admitted_total << "\n";
    os << "report.rejected_total " << r.rejected_total << "\n";
    os << "report.decisions_total " << r.decisions_total << "\n";
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
        os << "node." << i << ".admitted " << r.nodes[i].admitted << "\n";
        for (const auto& [reason, count] : r.nodes[i].rejected)
            os << "node." << i << ".rejected." << to_string(reason) << " " << count << "\n";
    }
    os << "honest.sent " << r.honest_sent << "\n";
    os << "honest.delivered_all " << r.honest_delivered_all << "\n";
    os << "honest.trades_settled " << r.trades_settled << "\n";
    os << "honest.delivery_ratio " << r.delivery_ratio.str() << "\n";
    os << "honest.latency.p50 " << r.latency.p50 << "\n";
    os << "honest.latency.p90 " << r.latency.p90 << "\n";
    os << "honest.latency.max " << r.latency.max << "\n";
    os << "spam.attempts " << r.spam_attempts << "\n";
    os << "spam.admitted_total " << r.spam_admitted_total << "\n";
    os << "spam.messages_admitted " << r.spam_messages_admitted << "\n";
    os << "spam.admitted_max_per_node_window " << r.spam_admitted_max_per_node_window
       << "\n";
    os << "attacker.fees " << r.attacker.fees << "\n";
    os << "attacker.burned " << r.attacker.burned << "\n";
    os << "attacker.coinage_destroyed " << r.attacker.coinage_destroyed << "\n";
    os << "attacker.capital_locked " << r.attacker.capital_locked << "\n";
    os << "attacker.hash_attempts " << r.attacker.hash_attempts << "\n";
    os << "attacker.messages_attempted " << r.attacker.messages_attempted << "\n";
    os << "chain.bytes.total " << r.chain.total << "\n";
    os << "chain.bytes.policy_setup " << r.chain.policy_setup << "\n";
    os << "chain.bytes.policy_per_message " << r.chain.policy_per_message << "\n";
    os << "chain.bytes.exchange " << r.chain.exchange << "\n";
    os << "chain.bytes.funding " << r.chain.funding << "\n";
    os << "chain.usage " << to_string(r.usage) << "\n";
    for (const auto& [at, knob] : r.threshold_trajectory)
        os << "threshold." << at << " " << knob << "\n";
    os << "trace.digest " << r.trace_digest.hex() << "\n";
    std::istringstream echo(r.scenario_echo);
    std::string line;
    while (std::getline(echo, line)) os << "echo. " << line << "\n";
}

inline void emit_tabular(const ScenarioReport& r, std::ostream& os) {
    os << "scenario: " << r.scenario_name << "  policy: " << r.policy
       << "  seed: " << r.seed << "  duration: " << r.duration << "s\n";
    os << "decisions: " << r.decisions_total << "  admitted: " << r.admitted_total
       << "  rejected: " << r.rejected_total << "\n";
    os << "honest messages: sent " << r.honest_sent << ", delivered-to-all "
       << r.honest_delivered_all << ", trades " << r.trades_settled << ", ratio "
       << r.delivery_ratio.str()
       << ", latency p50/p90/max " << r.latency.p50 << "/" << r.latency.p90 << "/"
       << r.latency.max << "\n";
    os << "spam: attempts " << r.spam_attempts << ", admitted " << r.spam_admitted_total
       << ", max per node-window " << r.spam_admitted_max_per_node_window << "\n";
    os << "attacker spend: fees " << r.attacker.fees << ", burned " << r.attacker.burned
       << ", coinage " << r.attacker.coinage_destroyed << ", locked "
       << r.attacker.capital_locked << ", hashes " << r.attacker.hash_attempts << "\n";
    os << "chain bytes: total " << r.chain.total << " (policy setup "
       << r.chain.policy_setup << ", policy per-message " << r.chain.policy_per_message
       << ", exchange " << r.chain.exchange << ", funding " << r.chain.funding
       << ")  usage: " << to_string(r.usage) << "\n";
    os << std::left << std::setw(6) << "node" << std::setw(10) << "admitted"
       << "rejected\n";
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
        std::ostringstream rej;
        for (const auto& [reason, count] : r.nodes[i].rejected)
            rej << to_string(reason) << "=" << count << " ";
        os << std::left << std::setw(6) << i << std::setw(10) << r.nodes[i].admitted
           << rej.str() << "\n";
    }
    os << "trace digest: " << r.trace_digest.hex() << "\n";
}

} // namespace detail

inline void emit_report(const ScenarioReport& r, ReportFormat format, std::ostream& os) {
    if (format == ReportFormat::StructuredRecord)
        detail::emit_structured(r, os);
    else
        detail::emit_tabular(r, os);
}

inline std::string report_to_string(const ScenarioReport& r, ReportFormat format) {
    std::ostringstream os;
    emit_report(r, format, os);
    return os.str();
}

/// One row of the policy comparison matrix.
struct PolicyRow {
    std::string policy;
    ChainUsageClass usage{ChainUsageClass::None};
    ChainBytesReport chain;
    std::uint64_t spam_admitted_total{0};
    std::uint64_t spam_admitted_max_per_node_window{0};
    Rational delivery_ratio{0};
    Rational attacker_cost_per_admitted{0}; // (fees+burned+locked)/admitted
    std::uint64_t hashes_per_admitted{0};
    Coinage coinage_per_admitted{0};
};

struct ComparisonMatrix {
    std::vector<PolicyRow> rows;
    std::vector<ScenarioReport> reports; // one per policy, in input order
};

inline void emit_matrix(const ComparisonMatrix& m, ReportFormat format, std::ostream& os) {
    if (format == ReportFormat::StructuredRecord) {
        for (const auto& row : m.rows) {
            os << "matrix." << row.policy << ".usage " << to_string(row.usage) << "\n";
            os << "matrix." << row.policy << ".bytes.setup " << row.chain.policy_setup
               << "\n";
            os << "matrix." << row.policy << ".bytes.per_message "
               << row.chain.policy_per_message << "\n";
            os << "matrix." << row.policy << ".spam.admitted " << row.spam_admitted_total
               << "\n";
            os << "matrix." << row.policy << ".spam.max_per_node_window "
               << row.spam_admitted_max_per_node_window << "\n";
            os << "matrix." << row.policy << ".honest.delivery_ratio "
               << row.delivery_ratio.str() << "\n";
            os << "matrix." << row.policy << ".attacker.cost_per_admitted "
               << row.attacker_cost_per_admitted.str() << "\n";
            os << "matrix." << row.policy << ".attacker.hashes_per_admitted "
               << row.hashes_per_admitted << "\n";
            os << "matrix." << row.policy << ".attacker.coinage_per_admitted "
               << row.coinage_per_admitted << "\n";
        }
        return;
    }
    os << std::left << std::setw(14) << "policy" << std::setw(13) << "chain-usage"
       << std::setw(12) << "setup-bytes" << std::setw(12) << "msg-bytes" << std::setw(10)
       << "spam-adm" << std::setw(12) << "spam/nw" << std::setw(10) << "delivery"
       << "atk-cost\n";
    for (const auto& row : m.rows) {
        os << std::left << std::setw(14) << row.policy << std::setw(13)
           << to_string(row.usage) << std::setw(12) << row.chain.policy_setup
           << std::setw(12) << row.chain.policy_per_message << std::setw(10)
           << row.spam_admitted_total << std::setw(12)
           << row.spam_admitted_max_per_node_window << std::setw(10)
           << row.delivery_ratio.str() << row.attacker_cost_per_admitted.str() << "\n";
    }
}

inline std::string matrix_to_string(const ComparisonMatrix& m, ReportFormat format) {
    std::ostringstream os;
    emit_matrix(m, format, os);
    return os.str();
}

} // namespace floodgate
