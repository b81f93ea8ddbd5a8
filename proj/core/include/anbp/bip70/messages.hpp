#pragma once

#include <optional>
#include <string>
#include <vector>

#include "anbp/bip70/crypto.hpp"

namespace anbp {
namespace bip70 {

enum class Variant { Baseline, Endorsed, MerchantBound };
const char* variant_name(Variant v);
std::optional<Variant> variant_from(const std::string& name);
inline bool is_fix(Variant v) { return v != Variant::Baseline; }

/// Canonical deterministic binary serialization: every field is written
/// length-prefixed (u32 little-endian byte count) in declaration order;
/// integers are 8 little-endian bytes, lists are a count field followed by
/// the elements. Digests are computed over this serialization.
class Wire {
 public:
  void put_bytes(const Bytes& b);
  void put_str(const std::string& s);
  void put_u64(uint64_t v);
  void put_u32(uint32_t v);
  const Bytes& data() const { return out_; }

 private:
  Bytes out_;
};

struct TransactionInput {
  Bytes prev_tx_digest;
  Bytes pubkey;
  Bytes signature;  // by the key owner, over (prev_tx_digest, pubkey)

  Bytes signed_payload() const;
  Bytes serialize() const;
  friend bool operator==(const TransactionInput&, const TransactionInput&) = default;
};

struct TxOutput {
  uint64_t amount = 0;  // satoshis, > 0
  Address to;

  Bytes serialize() const;
  friend bool operator==(const TxOutput&, const TxOutput&) = default;
};

struct Transaction {
  std::vector<TransactionInput> inputs;
  std::vector<TxOutput> outputs;

  Bytes serialize() const;
  Bytes id() const;  // digest of serialized content
  friend bool operator==(const Transaction&, const Transaction&) = default;
};

struct PaymentRequest {
  Address merchant_address;  // digest of the fresh per-transaction key
  uint64_t amount = 0;
  uint64_t created = 0;   // t1
  uint64_t expires = 0;   // t2, created < expires
  std::string memo;       // m_M
  std::string payment_url;
  std::string merchant_id;  // z_M
  Bytes signature;          // merchant certificate key, over all fields above

  Bytes signed_payload() const;
  Bytes serialize() const;
  friend bool operator==(const PaymentRequest&, const PaymentRequest&) = default;
};

struct RefundEntry {
  Address refund_address;
  uint64_t refund_amount = 0;
  std::string memo;                  // per-entry memo, empty when absent
  std::optional<Bytes> endorsement;  // absent in Baseline

  Bytes serialize() const;
  friend bool operator==(const RefundEntry&, const RefundEntry&) = default;
};

struct Payment {
  std::string merchant_id;  // z_M
  Transaction transaction;
  std::vector<RefundEntry> refund_entries;
  std::string memo;  // m_C

  uint64_t refund_total() const;
  Bytes serialize() const;
  friend bool operator==(const Payment&, const Payment&) = default;
};

struct PaymentACK {
  Payment payment;   // copy of the accepted Payment
  std::string memo;  // m'_M
  std::optional<Bytes> ack_signature;  // merchant signature in fix variants

  Bytes signed_payload() const;
  Bytes serialize() const;
  friend bool operator==(const PaymentACK&, const PaymentACK&) = default;
};

/// What the endorsement signature covers. Endorsed binds the funding input;
/// MerchantBound binds the merchant identity instead.
Bytes endorsement_payload(Variant v, const std::string& merchant_identity,
                          const TransactionInput& input, const Address& refund_address,
                          uint64_t refund_amount, const std::string& entry_memo,
                          const PaymentRequest& request);

/// Self-contained proof object the merchant stores on accepting a payment;
/// auditable by a third party without any merchant secret.
struct EndorsementEvidence {
  Variant variant = Variant::Baseline;
  std::string merchant_identity;
  PaymentRequest request;
  Payment payment;  // refund entries carry the endorsement signatures

  Bytes serialize() const;
  friend bool operator==(const EndorsementEvidence&, const EndorsementEvidence&) = default;
};

}  // namespace bip70
}  // namespace anbp
