#include "anbp/bip70/ledger.hpp"

namespace anbp {
namespace bip70 {

OutPoint Ledger::genesis_grant(const Address& to, uint64_t amount) {
  Wire w;
  w.put_str("genesis");
  w.put_u64(genesis_counter_++);
  Bytes txid = sha256(w.data());
  TxOutput out{amount, to};
  Transaction tx;
  tx.outputs.push_back(out);
  txs_.emplace(txid, tx);
  unspent_.emplace(OutPoint{txid, 0}, out);
  minted_ += amount;
  return OutPoint{txid, 0};
}

Ledger::SubmitResult Ledger::submit(const Transaction& tx, const SignatureBackend& backend) {
  if (tx.inputs.empty()) return {false, "no inputs"};
  if (tx.outputs.empty()) return {false, "no outputs"};
  uint64_t in_total = 0;
  std::map<OutPoint, TxOutput> consumed;
  for (const TransactionInput& in : tx.inputs) {
    // Inputs reference the previous transaction by digest; single-output
    // funding keeps the index implicit at 0 unless a later vout matches.
    std::optional<OutPoint> found;
    for (const auto& [op, out] : unspent_) {
      if (op.txid != in.prev_tx_digest) continue;
      if (!(out.to == Address::of_key(in.pubkey))) continue;
      if (consumed.count(op)) continue;
      found = op;
      break;
    }
    if (!found) return {false, "input does not reference a spendable output"};
    if (!backend.verify(in.pubkey, in.signed_payload(), in.signature))
      return {false, "bad input signature"};
    consumed.emplace(*found, unspent_.at(*found));
    in_total += unspent_.at(*found).amount;
  }
  uint64_t out_total = 0;
  for (const TxOutput& out : tx.outputs) {
    if (out.amount == 0) return {false, "zero-amount output"};
    out_total += out.amount;
  }
  if (in_total != out_total) return {false, "value not conserved"};

  Bytes txid = tx.id();
  if (txs_.count(txid)) return {false, "duplicate transaction"};
  for (const auto& [op, out] : consumed) unspent_.erase(op);
  txs_.emplace(txid, tx);
  for (uint32_t i = 0; i < tx.outputs.size(); ++i)
    unspent_.emplace(OutPoint{txid, i}, tx.outputs[i]);
  return {true, ""};
}

const Transaction* Ledger::find(const Bytes& txid) const {
  auto it = txs_.find(txid);
  return it == txs_.end() ? nullptr : &it->second;
}

std::optional<TxOutput> Ledger::unspent(const OutPoint& op) const {
  auto it = unspent_.find(op);
  if (it == unspent_.end()) return std::nullopt;
  return it->second;
}

uint64_t Ledger::total_unspent() const {
  uint64_t total = 0;
  for (const auto& [op, out] : unspent_) total += out.amount;
  return total;
}

}  // namespace bip70
}  // namespace anbp
