// Copyright (c) 2026 The Floodgate developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "floodgate/bytes.hpp"
#include "floodgate/crypto.hpp"
#include "floodgate/expected.hpp"
#include "floodgate/rational.hpp"
#include "floodgate/sha256.hpp"

namespace floodgate {

using Amount = std::uint64_t;     // base currency units, exact
using TimePoint = std::int64_t;   // seconds since simulation epoch
using Duration = std::int64_t;    // seconds
using Coinage = std::uint64_t;    // coin-seconds

inline constexpr std::size_t kMaxNameLen = 255;
inline constexpr std::size_t kMaxNameValueLen = 520;

struct CoinKind {
    friend bool operator==(const CoinKind&, const CoinKind&) = default;
};

/// Namecoin-style name output: a unique human-readable name plus its
/// associated value data. Spending it requires a matching name output.
struct NameKind {
    std::string name;  // <= 255 bytes
    std::string value; // <= 520 bytes
    friend bool operator==(const NameKind&, const NameKind&) = default;
};

/// Provably destroyed value carrying a 32-byte commitment. Never enters
/// the spendable UTXO set. The commitment is either a message digest
/// (indirect fee / coinage claim) or an identity digest (proof-of-burn).
struct BurnKind {
    Digest commitment;
    friend bool operator==(const BurnKind&, const BurnKind&) = default;
};

using OutputKind = std::variant<CoinKind, NameKind, BurnKind>;

struct Output {
    Amount value{0};
    Digest owner;
    OutputKind kind{CoinKind{}};

    bool is_name() const { return std::holds_alternative<NameKind>(kind); }
    bool is_burn() const { return std::holds_alternative<BurnKind>(kind); }
    const NameKind* name() const { return std::get_if<NameKind>(&kind); }
    const BurnKind* burn() const { return std::get_if<BurnKind>(&kind); }

    friend bool operator==(const Output&, const Output&) = default;
};

struct Outpoint {
    Digest txid;
    std::uint32_t index{0};

    auto operator<=>(const Outpoint&) const = default;

    Bytes encode() const {
        Bytes out;
        append_bytes(out, txid.v);
        append_u32(out, index);
        return out;
    }
};

struct TxInput {
    Outpoint prevout;
    Signature sig; // placeholder (all-zero) until signed

    friend bool operator==(const TxInput&, const TxInput&) = default;
};

namespace detail {

inline void append_output(Bytes& out, const Output& o) {
    append_u64(out, o.value);
    append_bytes(out, o.owner.v);
    Bytes payload;
    std::uint8_t tag = 0;
    if (const auto* n = std::get_if<NameKind>(&o.kind)) {
        tag = 1;
        append_u8(payload, static_cast<std::uint8_t>(n->name.size()));
        append_bytes(payload, ByteView(reinterpret_cast<const std::uint8_t*>(n->name.data()), n->name.size()));
        append_bytes(payload, ByteView(reinterpret_cast<const std::uint8_t*>(n->value.data()), n->value.size()));
    } else if (const auto* b = std::get_if<BurnKind>(&o.kind)) {
        tag = 2;
        append_bytes(payload, b->commitment.v);
    }
    append_u8(out, tag);
    append_u16(out, static_cast<std::uint16_t>(payload.size()));
    append_bytes(out, payload);
}

inline std::optional<Output> read_output(ByteReader& r) {
    Output o;
    o.value = r.u64();
    o.owner.v = r.take_array<32>();
    std::uint8_t tag = r.u8();
    std::uint16_t len = r.u16();
    Bytes payload = r.take(len);
    if (!r.ok()) return std::nullopt;
    switch (tag) {
    case 0:
        if (!payload.empty()) return std::nullopt;
        o.kind = CoinKind{};
        break;
    case 1: {
        if (payload.empty()) return std::nullopt;
        std::size_t name_len = payload[0];
        if (payload.size() < 1 + name_len) return std::nullopt;
        NameKind n;
        n.name.assign(payload.begin() + 1, payload.begin() + 1 + name_len);
        n.value.assign(payload.begin() + 1 + name_len, payload.end());
        if (n.value.size() > kMaxNameValueLen) return std::nullopt;
        o.kind = std::move(n);
        break;
    }
    case 2: {
        if (payload.size() != 32) return std::nullopt;
        BurnKind b;
        std::copy(payload.begin(), payload.end(), b.commitment.v.begin());
        o.kind = b;
        break;
    }
    default:
        return std::nullopt;
    }
    return o;
}

} // namespace detail

/// Transaction over explicit inputs and outputs. The fee is implicit:
/// sum(inputs) - sum(outputs). `declared_size` is the size the fee-rate
/// model charges for; it is a declared field, not a measured encoding.
struct Transaction {
    std::vector<TxInput> inputs;
    std::vector<Output> outputs;
    std::uint32_t declared_size{1}; // bytes, must stay positive

    /// Canonical field-order serialization: version 0x01, u32 input count,
    /// per input (txid, u32 index), u32 output count, per output (u64
    /// value, owner digest, kind tag 0x00/0x01/0x02, u16-length-prefixed
    /// kind payload), u32 declared size. Signatures are excluded, so this
    /// buffer is both the txid preimage and the signing digest preimage.
    Bytes canonical_bytes() const {
        Bytes out;
        append_u8(out, 0x01);
        append_u32(out, static_cast<std::uint32_t>(inputs.size()));
        for (const auto& in : inputs) {
            append_bytes(out, in.prevout.txid.v);
            append_u32(out, in.prevout.index);
        }
        append_u32(out, static_cast<std::uint32_t>(outputs.size()));
        for (const auto& o : outputs) detail::append_output(out, o);
        append_u32(out, declared_size);
        return out;
    }

    Digest txid() const { return hash(canonical_bytes()); }
    Digest signing_digest() const { return txid(); }

    /// Widened so adversarial values cannot wrap the balance check.
    unsigned __int128 output_total() const {
        unsigned __int128 sum = 0;
        for (const auto& o : outputs) sum += o.value;
        return sum;
    }

    friend bool operator==(const Transaction&, const Transaction&) = default;
};

/// Wire form carried over the gossip network: canonical bytes followed by
/// one 32-byte signature per input.
inline Bytes encode_tx_wire(const Transaction& tx) {
    Bytes out = tx.canonical_bytes();
    for (const auto& in : tx.inputs) append_bytes(out, in.sig.v);
    return out;
}

inline std::optional<Transaction> decode_tx_wire(ByteView data) {
    ByteReader r(data);
    if (r.u8() != 0x01) return std::nullopt;
    Transaction tx;
    std::uint32_t n_in = r.u32();
    if (!r.ok() || n_in > 100000) return std::nullopt;
    tx.inputs.resize(n_in);
    for (auto& in : tx.inputs) {
        in.prevout.txid.v = r.take_array<32>();
        in.prevout.index = r.u32();
    }
    std::uint32_t n_out = r.u32();
    if (!r.ok() || n_out > 100000) return std::nullopt;
    tx.outputs.reserve(n_out);
    for (std::uint32_t i = 0; i < n_out; ++i) {
        auto o = detail::read_output(r);
        if (!o) return std::nullopt;
        tx.outputs.push_back(std::move(*o));
    }
    tx.declared_size = r.u32();
    if (!r.ok() || tx.declared_size == 0) return std::nullopt;
    for (auto& in : tx.inputs) in.sig.v = r.take_array<32>();
    if (!r.ok() || r.remaining() != 0) return std::nullopt;
    return tx;
}

struct Block {
    std::uint64_t height{0};
    TimePoint timestamp{0};
    std::vector<Transaction> txs;
};

enum class TxError {
    MissingInput,
    BadSignature,
    ValueOverflow,
    NameMismatch,
    DuplicateName,
    MempoolFull,
};

inline std::string_view to_string(TxError e) {
    switch (e) {
    case TxError::MissingInput: return "missing-input";
    case TxError::BadSignature: return "bad-signature";
    case TxError::ValueOverflow: return "value-overflow";
    case TxError::NameMismatch: return "name-mismatch";
    case TxError::DuplicateName: return "duplicate-name";
    case TxError::MempoolFull: return "mempool-full";
    }
    return "unknown";
}

struct SubmitResult {
    bool accepted{false};
    std::optional<TxError> reason;

    static SubmitResult ok() { return {true, std::nullopt}; }
    static SubmitResult rejected(TxError e) { return {false, e}; }
};

struct ChainParams {
    Amount money_supply{0};          // M: full supply exists at genesis
    std::size_t block_capacity{100}; // C: max transactions per block
    Duration block_interval{10};
    std::size_t mempool_limit{10000};
    Digest miner; // account credited with block fees
};

struct UtxoEntry {
    Output output;
    TimePoint created_at{0};
};

struct ConfirmedTx {
    Transaction tx;
    std::uint64_t height{0};
    TimePoint confirmed_at{0};
    Amount fee{0};
    Coinage coinage_destroyed{0};
};

struct AllocationMismatch : std::runtime_error {
    AllocationMismatch() : std::runtime_error("genesis allocations do not sum to the money supply") {}
};

struct TooEarly : std::runtime_error {
    TooEarly() : std::runtime_error("block interval has not elapsed") {}
};

/// Simplified Namecoin-style chain: single miner, fixed supply minted at
/// genesis, fee-ordered mempool, name index, burn accounting. All mutation
/// happens on one logical event thread; const refs act as read snapshots.
class Ledger {
public:
    Ledger(ChainParams params, std::shared_ptr<KeyRegistry> keys,
           const std::vector<std::pair<Digest, Amount>>& allocations)
        : params_(std::move(params)), keys_(std::move(keys)) {
        if (params_.block_interval < 1)
            throw std::invalid_argument("block interval must be positive");
        if (params_.block_capacity < 1)
            throw std::invalid_argument("block capacity must be positive");
        unsigned __int128 total = 0;
        for (const auto& [owner, amount] : allocations) total += amount;
        if (total != params_.money_supply) throw AllocationMismatch();

        Transaction genesis;
        for (const auto& [owner, amount] : allocations)
            genesis.outputs.push_back(Output{amount, owner, CoinKind{}});
        genesis.declared_size =
            static_cast<std::uint32_t>(genesis.canonical_bytes().size() + 1);
        Digest id = genesis.txid();
        for (std::uint32_t i = 0; i < genesis.outputs.size(); ++i)
            utxos_.emplace(Outpoint{id, i}, UtxoEntry{genesis.outputs[i], 0});
        confirmed_.emplace(id, ConfirmedTx{std::move(genesis), 0, 0, 0, 0});
        genesis_txid_ = id;
    }

    static Ledger genesis(ChainParams params, std::shared_ptr<KeyRegistry> keys,
                          const std::vector<std::pair<Digest, Amount>>& allocations) {
        return Ledger(std::move(params), std::move(keys), allocations);
    }

    const ChainParams& params() const { return params_; }
    const KeyRegistry& keys() const { return *keys_; }
    const std::map<Outpoint, UtxoEntry>& utxos() const { return utxos_; }
    const std::map<Digest, Transaction>& mempool() const { return mempool_; }
    const std::vector<Block>& blocks() const { return blocks_; }
    Amount burned_total() const { return burned_total_; }
    Amount miner_credits() const { return miner_credits_; }
    Digest genesis_txid() const { return genesis_txid_; }
    std::uint64_t height() const { return blocks_.size(); }
    TimePoint last_block_time() const { return last_block_time_; }
    TimePoint next_block_time() const { return last_block_time_ + params_.block_interval; }

    const ConfirmedTx* confirmed(const Digest& txid) const {
        auto it = confirmed_.find(txid);
        return it == confirmed_.end() ? nullptr : &it->second;
    }

    Amount utxo_total() const {
        Amount sum = 0;
        for (const auto& [op, e] : utxos_) sum += e.output.value;
        return sum;
    }

    /// Bytes confirmed into blocks so far (sum of declared sizes).
    std::uint64_t chain_bytes() const {
        std::uint64_t sum = 0;
        for (const auto& b : blocks_)
            for (const auto& tx : b.txs) sum += tx.declared_size;
        return sum;
    }

    std::optional<TxError> validate_tx(const Transaction& tx) const {
        // inputs: present, unspent, no duplicates within the tx
        std::vector<Outpoint> seen;
        Amount in_total = 0;
        std::vector<std::string> input_names;
        Digest digest = tx.signing_digest();
        for (const auto& in : tx.inputs) {
            if (std::find(seen.begin(), seen.end(), in.prevout) != seen.end())
                return TxError::MissingInput; // second spend of the same outpoint
            seen.push_back(in.prevout);
            auto it = utxos_.find(in.prevout);
            if (it == utxos_.end()) return TxError::MissingInput;
            const Output& spent = it->second.output;
            if (!keys_->verify(spent.owner, digest, in.sig))
                return TxError::BadSignature;
            in_total += spent.value;
            if (const auto* n = spent.name()) input_names.push_back(n->name);
        }

        if (tx.output_total() > in_total) return TxError::ValueOverflow;

        // name continuity: each name input pairs with exactly one same-name
        // output; any other name output is a fresh registration of a
        // not-yet-live name; no two outputs may carry the same name.
        std::vector<std::string> output_names;
        for (const auto& o : tx.outputs) {
            if (const auto* n = o.name()) {
                if (n->name.empty() || n->name.size() > kMaxNameLen ||
                    n->value.size() > kMaxNameValueLen)
                    return TxError::NameMismatch;
                if (std::find(output_names.begin(), output_names.end(), n->name) !=
                    output_names.end())
                    return TxError::DuplicateName;
                output_names.push_back(n->name);
            }
        }
        for (const auto& name : input_names) {
            if (std::count(output_names.begin(), output_names.end(), name) != 1)
                return TxError::NameMismatch;
        }
        for (const auto& name : output_names) {
            bool carried = std::find(input_names.begin(), input_names.end(), name) !=
                           input_names.end();
            if (!carried && names_.count(name) > 0) return TxError::DuplicateName;
        }
        return std::nullopt;
    }

    /// Implicit fee; nullopt when inputs do not resolve.
    std::optional<Amount> fee_of(const Transaction& tx) const {
        Amount in_total = 0;
        for (const auto& in : tx.inputs) {
            auto it = utxos_.find(in.prevout);
            if (it == utxos_.end()) return std::nullopt;
            in_total += it->second.output.value;
        }
        if (tx.output_total() > in_total) return std::nullopt;
        return static_cast<Amount>(in_total - tx.output_total());
    }

    /// f = F / s, exact. Pre: tx validates (fee well-defined).
    std::optional<Rational> fee_rate(const Transaction& tx) const {
        auto fee = fee_of(tx);
        if (!fee) return std::nullopt;
        return Rational(static_cast<std::int64_t>(*fee), tx.declared_size);
    }

    /// Coin-seconds destroyed if `tx` is confirmed at `at`: sum over inputs
    /// of value * (at - created_at).
    Expected<Coinage, TxError> destroyed_coinage(const Transaction& tx, TimePoint at) const {
        Coinage total = 0;
        for (const auto& in : tx.inputs) {
            auto it = utxos_.find(in.prevout);
            if (it == utxos_.end()) return TxError::MissingInput;
            const auto& e = it->second;
            Coinage age = at > e.created_at ? static_cast<Coinage>(at - e.created_at) : 0;
            total += e.output.value * age;
        }
        return total;
    }

    /// Coinage of the full UTXO set at `now`.
    Coinage utxo_coinage(TimePoint now) const {
        Coinage total = 0;
        for (const auto& [op, e] : utxos_) {
            Coinage age = now > e.created_at ? static_cast<Coinage>(now - e.created_at) : 0;
            total += e.output.value * age;
        }
        return total;
    }

    /// Number of spendable UTXOs worth at least `m`. Pre: m > 0.
    std::size_t count_utxos_at_least(Amount m) const {
        std::size_t n = 0;
        for (const auto& [op, e] : utxos_)
            if (e.output.value >= m) ++n;
        return n;
    }

    std::optional<std::pair<Outpoint, Output>> resolve_name(std::string_view name) const {
        auto it = names_.find(std::string(name));
        if (it == names_.end()) return std::nullopt;
        const auto& entry = utxos_.at(it->second);
        return std::make_pair(it->second, entry.output);
    }

    /// Owners the name has had, in order. The live owner is the back.
    const std::vector<Digest>* name_owner_history(std::string_view name) const {
        auto it = name_history_.find(std::string(name));
        return it == name_history_.end() ? nullptr : &it->second;
    }

    /// Mempool admission: validate against the confirmed view, then insert.
    /// Over the size bound the lowest fee-rate entry is evicted; an incoming
    /// tx that is itself the lowest is rejected as MempoolFull. Conflicting
    /// spends of the same outpoint may coexist until mining excludes one.
    SubmitResult submit_tx(const Transaction& tx) {
        if (auto err = validate_tx(tx)) return SubmitResult::rejected(*err);
        Digest id = tx.txid();
        if (mempool_.count(id)) return SubmitResult::ok(); // duplicate resubmit
        mempool_.emplace(id, tx);
        if (mempool_.size() > params_.mempool_limit) {
            auto worst = worst_mempool_entry();
            if (worst == id) {
                mempool_.erase(id);
                return SubmitResult::rejected(TxError::MempoolFull);
            }
            mempool_.erase(worst);
        }
        return SubmitResult::ok();
    }

    /// Mines the next block at `now`: picks the top-C mempool transactions
    /// by fee rate (ties by txid ascending), excluding conflicts greedily,
    /// applies them, and credits total fees to the miner account as a fresh
    /// output (recorded outside the block, mirroring implicit fees).
    const Block& mine_block(TimePoint now) {
        if (now < next_block_time()) throw TooEarly();

        std::vector<Digest> order;
        order.reserve(mempool_.size());
        for (const auto& [id, tx] : mempool_) order.push_back(id);
        std::sort(order.begin(), order.end(), [&](const Digest& a, const Digest& b) {
            Rational ra = *fee_rate(mempool_.at(a));
            Rational rb = *fee_rate(mempool_.at(b));
            if (ra != rb) return rb < ra;
            return a < b;
        });

        Block block;
        block.height = blocks_.size() + 1;
        block.timestamp = now;
        std::vector<Outpoint> consumed;
        std::vector<std::string> registered;
        for (const auto& id : order) {
            if (block.txs.size() >= params_.block_capacity) break;
            const Transaction& tx = mempool_.at(id);
            bool conflict = false;
            for (const auto& in : tx.inputs)
                if (std::find(consumed.begin(), consumed.end(), in.prevout) != consumed.end())
                    conflict = true;
            std::vector<std::string> fresh = fresh_names(tx);
            for (const auto& name : fresh)
                if (std::find(registered.begin(), registered.end(), name) != registered.end())
                    conflict = true;
            if (conflict) continue;
            for (const auto& in : tx.inputs) consumed.push_back(in.prevout);
            for (const auto& name : fresh) registered.push_back(name);
            block.txs.push_back(tx);
        }

        Amount fees = 0;
        for (const auto& tx : block.txs) fees += apply_tx(tx, block.height, now);

        if (fees > 0) credit_miner(fees, block.height, now);

        for (const auto& tx : block.txs) mempool_.erase(tx.txid());
        for (auto it = mempool_.begin(); it != mempool_.end();) {
            if (validate_tx(it->second)) // now invalid against the new view
                it = mempool_.erase(it);
            else
                ++it;
        }

        last_block_time_ = now;
        blocks_.push_back(std::move(block));
        return blocks_.back();
    }

private:
    std::vector<std::string> fresh_names(const Transaction& tx) const {
        std::vector<std::string> input_names;
        for (const auto& in : tx.inputs) {
            auto it = utxos_.find(in.prevout);
            if (it != utxos_.end())
                if (const auto* n = it->second.output.name()) input_names.push_back(n->name);
        }
        std::vector<std::string> fresh;
        for (const auto& o : tx.outputs)
            if (const auto* n = o.name())
                if (std::find(input_names.begin(), input_names.end(), n->name) == input_names.end())
                    fresh.push_back(n->name);
        return fresh;
    }

    Digest worst_mempool_entry() const {
        auto worse = [&](const Digest& a, const Digest& b) {
            Rational ra = *fee_rate(mempool_.at(a));
            Rational rb = *fee_rate(mempool_.at(b));
            if (ra != rb) return ra < rb;
            return a > b; // among equal rates the larger txid loses
        };
        Digest worst = mempool_.begin()->first;
        for (const auto& [id, tx] : mempool_)
            if (worse(id, worst)) worst = id;
        return worst;
    }

    /// Applies one confirmed transaction; returns its fee.
    Amount apply_tx(const Transaction& tx, std::uint64_t height, TimePoint now) {
        Digest id = tx.txid();
        Amount in_total = 0;
        Coinage destroyed = 0;
        for (const auto& in : tx.inputs) {
            auto it = utxos_.find(in.prevout);
            const auto& e = it->second;
            in_total += e.output.value;
            Coinage age = now > e.created_at ? static_cast<Coinage>(now - e.created_at) : 0;
            destroyed += e.output.value * age;
            utxos_.erase(it);
        }
        for (std::uint32_t i = 0; i < tx.outputs.size(); ++i) {
            const Output& o = tx.outputs[i];
            if (o.is_burn()) {
                burned_total_ += o.value;
                continue; // burns never enter the spendable set
            }
            Outpoint op{id, i};
            utxos_.emplace(op, UtxoEntry{o, now});
            if (const auto* n = o.name()) {
                names_[n->name] = op;
                auto& hist = name_history_[n->name];
                if (hist.empty() || hist.back() != o.owner) hist.push_back(o.owner);
            }
        }
        Amount fee = static_cast<Amount>(in_total - tx.output_total());
        confirmed_.emplace(id, ConfirmedTx{tx, height, now, fee, destroyed});
        return fee;
    }

    void credit_miner(Amount fees, std::uint64_t height, TimePoint now) {
        Transaction credit;
        credit.inputs.push_back(TxInput{Outpoint{Digest{}, static_cast<std::uint32_t>(height)}, Signature{}});
        credit.outputs.push_back(Output{fees, params_.miner, CoinKind{}});
        credit.declared_size = static_cast<std::uint32_t>(credit.canonical_bytes().size());
        Digest id = credit.txid();
        utxos_.emplace(Outpoint{id, 0}, UtxoEntry{credit.outputs[0], now});
        confirmed_.emplace(id, ConfirmedTx{std::move(credit), height, now, 0, 0});
        miner_credits_ += fees;
    }

    ChainParams params_;
    std::shared_ptr<KeyRegistry> keys_;
    std::map<Outpoint, UtxoEntry> utxos_;
    std::map<std::string, Outpoint> names_;
    std::map<std::string, std::vector<Digest>> name_history_;
    std::map<Digest, Transaction> mempool_;
    std::map<Digest, ConfirmedTx> confirmed_;
    std::vector<Block> blocks_;
    Amount burned_total_{0};
    Amount miner_credits_{0};
    TimePoint last_block_time_{0};
    Digest genesis_txid_;
};

} // namespace floodgate
