#pragma once

#include <map>
#include <optional>
#include <string>

#include "anbp/bip70/messages.hpp"

namespace anbp {
namespace bip70 {

struct OutPoint {
  Bytes txid;
  uint32_t vout = 0;
  friend auto operator<=>(const OutPoint&, const OutPoint&) = default;
};

/// Append-only transaction store with an unspent-output index. No blocks, no
/// mining; total satoshis are conserved against the genesis grants.
class Ledger {
 public:
  struct SubmitResult {
    bool ok = false;
    std::string reason;
  };

  /// Mints a funding output out of thin air (scenario setup only).
  OutPoint genesis_grant(const Address& to, uint64_t amount);

  /// Validates and appends: every input must reference an unspent output
  /// whose address matches the embedded public key, carry a valid signature
  /// over (prev digest, pubkey), and input value must equal output value.
  SubmitResult submit(const Transaction& tx, const SignatureBackend& backend);

  const Transaction* find(const Bytes& txid) const;
  std::optional<TxOutput> unspent(const OutPoint& op) const;

  uint64_t total_unspent() const;
  uint64_t total_minted() const { return minted_; }
  size_t transaction_count() const { return txs_.size(); }

 private:
  std::map<Bytes, Transaction> txs_;
  std::map<OutPoint, TxOutput> unspent_;
  uint64_t minted_ = 0;
  uint64_t genesis_counter_ = 0;
};

}  // namespace bip70
}  // namespace anbp
