#include "anbp/bip70/messages.hpp"

namespace anbp {
namespace bip70 {

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::Baseline:
      return "baseline";
    case Variant::Endorsed:
      return "endorsed";
    case Variant::MerchantBound:
      return "merchant-bound";
  }
  return "?";
}

std::optional<Variant> variant_from(const std::string& name) {
  if (name == "baseline") return Variant::Baseline;
  if (name == "endorsed") return Variant::Endorsed;
  if (name == "merchant-bound") return Variant::MerchantBound;
  return std::nullopt;
}

void Wire::put_u32(uint32_t v) {
  for (int i = 0; i < 4; ++i) out_.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void Wire::put_bytes(const Bytes& b) {
  put_u32(static_cast<uint32_t>(b.size()));
  out_.insert(out_.end(), b.begin(), b.end());
}

void Wire::put_str(const std::string& s) { put_bytes(Bytes(s.begin(), s.end())); }

void Wire::put_u64(uint64_t v) {
  put_u32(8);
  for (int i = 0; i < 8; ++i) out_.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

namespace {
Bytes address_bytes(const Address& a) { return Bytes(a.digest.begin(), a.digest.end()); }
}  // namespace

Bytes TransactionInput::signed_payload() const {
  Wire w;
  w.put_bytes(prev_tx_digest);
  w.put_bytes(pubkey);
  return w.data();
}

Bytes TransactionInput::serialize() const {
  Wire w;
  w.put_bytes(prev_tx_digest);
  w.put_bytes(pubkey);
  w.put_bytes(signature);
  return w.data();
}

Bytes TxOutput::serialize() const {
  Wire w;
  w.put_u64(amount);
  w.put_bytes(address_bytes(to));
  return w.data();
}

Bytes Transaction::serialize() const {
  Wire w;
  w.put_u32(static_cast<uint32_t>(inputs.size()));
  for (const TransactionInput& in : inputs) w.put_bytes(in.serialize());
  w.put_u32(static_cast<uint32_t>(outputs.size()));
  for (const TxOutput& out : outputs) w.put_bytes(out.serialize());
  return w.data();
}

Bytes Transaction::id() const { return sha256(serialize()); }

Bytes PaymentRequest::signed_payload() const {
  Wire w;
  w.put_bytes(address_bytes(merchant_address));
  w.put_u64(amount);
  w.put_u64(created);
  w.put_u64(expires);
  w.put_str(memo);
  w.put_str(payment_url);
  w.put_str(merchant_id);
  return w.data();
}

Bytes PaymentRequest::serialize() const {
  Wire w;
  w.put_bytes(signed_payload());
  w.put_bytes(signature);
  return w.data();
}

Bytes RefundEntry::serialize() const {
  Wire w;
  w.put_bytes(address_bytes(refund_address));
  w.put_u64(refund_amount);
  w.put_str(memo);
  w.put_u32(endorsement ? 1 : 0);
  if (endorsement) w.put_bytes(*endorsement);
  return w.data();
}

uint64_t Payment::refund_total() const {
  uint64_t total = 0;
  for (const RefundEntry& e : refund_entries) total += e.refund_amount;
  return total;
}

Bytes Payment::serialize() const {
  Wire w;
  w.put_str(merchant_id);
  w.put_bytes(transaction.serialize());
  w.put_u32(static_cast<uint32_t>(refund_entries.size()));
  for (const RefundEntry& e : refund_entries) w.put_bytes(e.serialize());
  w.put_str(memo);
  return w.data();
}

Bytes PaymentACK::signed_payload() const {
  Wire w;
  w.put_bytes(payment.serialize());
  w.put_str(memo);
  return w.data();
}

Bytes PaymentACK::serialize() const {
  Wire w;
  w.put_bytes(signed_payload());
  w.put_u32(ack_signature ? 1 : 0);
  if (ack_signature) w.put_bytes(*ack_signature);
  return w.data();
}

Bytes endorsement_payload(Variant v, const std::string& merchant_identity,
                          const TransactionInput& input, const Address& refund_address,
                          uint64_t refund_amount, const std::string& entry_memo,
                          const PaymentRequest& request) {
  Wire w;
  w.put_str(variant_name(v));
  if (v == Variant::MerchantBound)
    w.put_str(merchant_identity);
  else
    w.put_bytes(input.serialize());
  w.put_bytes(address_bytes(refund_address));
  w.put_u64(refund_amount);
  w.put_str(entry_memo);
  w.put_bytes(request.serialize());
  return w.data();
}

Bytes EndorsementEvidence::serialize() const {
  Wire w;
  w.put_str(variant_name(variant));
  w.put_str(merchant_identity);
  w.put_bytes(request.serialize());
  w.put_bytes(payment.serialize());
  return w.data();
}

}  // namespace bip70
}  // namespace anbp
