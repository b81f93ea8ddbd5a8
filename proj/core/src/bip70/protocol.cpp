#include "anbp/bip70/protocol.hpp"

#include <algorithm>

namespace anbp {
namespace bip70 {

MerchantState make_merchant(std::string identity, const SignatureBackend& backend, Rng& rng) {
  MerchantState m;
  m.identity = std::move(identity);
  m.certificate_key = backend.generate(rng);
  return m;
}

PaymentRequest create_payment_request(MerchantState& merchant, const SignatureBackend& backend,
                                      Rng& rng, uint64_t amount, uint64_t created,
                                      uint64_t expires, const std::string& memo,
                                      const std::string& payment_url,
                                      const std::string& merchant_id) {
  if (created >= expires) throw std::invalid_argument("created must precede expiry");
  if (amount == 0) throw std::invalid_argument("amount must be positive");
  KeyPair tx_key = backend.generate(rng);
  PaymentRequest req;
  req.merchant_address = Address::of_key(tx_key.public_key);
  req.amount = amount;
  req.created = created;
  req.expires = expires;
  req.memo = memo;
  req.payment_url = payment_url;
  req.merchant_id = merchant_id;
  req.signature = backend.sign(merchant.certificate_key.secret_key, req.signed_payload());
  merchant.pending[merchant_id] = MerchantState::Pending{req, std::move(tx_key)};
  return req;
}

VerifyResult verify_payment_request(const PaymentRequest& request, const Bytes& merchant_cert_pub,
                                    uint64_t now, const SignatureBackend& backend) {
  if (!backend.verify(merchant_cert_pub, request.signed_payload(), request.signature))
    return VerifyResult::reject("signature");
  if (now < request.created || now >= request.expires) return VerifyResult::reject("expired");
  return VerifyResult::accept();
}

Contribution make_contribution(const SignatureBackend& backend, const KeyPair& key,
                               const OutPoint& funding, uint64_t funding_amount,
                               const Address& refund_address, uint64_t refund_amount,
                               const std::string& entry_memo, Variant variant,
                               const PaymentRequest& request,
                               const std::string& merchant_identity) {
  Contribution c;
  c.input.prev_tx_digest = funding.txid;
  c.input.pubkey = key.public_key;
  c.input.signature = backend.sign(key.secret_key, c.input.signed_payload());
  c.funding_amount = funding_amount;
  c.refund_address = refund_address;
  c.refund_amount = refund_amount;
  c.entry_memo = entry_memo;
  if (is_fix(variant)) {
    Bytes payload = endorsement_payload(variant, merchant_identity, c.input, refund_address,
                                        refund_amount, entry_memo, request);
    c.endorsement = backend.sign(key.secret_key, payload);
  }
  return c;
}

Payment build_payment(const std::vector<Contribution>& contributions,
                      const PaymentRequest& request, Variant variant,
                      const SignatureBackend& backend, const BuildOptions& opts) {
  (void)backend;
  if (contributions.empty()) throw BuildError("no contributions");
  uint64_t funding = 0;
  for (const Contribution& c : contributions) funding += c.funding_amount;
  if (funding < request.amount) throw BuildError("insufficient funds");
  if (funding > request.amount) throw BuildError("funding must match the amount exactly");

  uint64_t refunds = 0;
  for (const Contribution& c : contributions) refunds += c.refund_amount;
  if (refunds > request.amount) throw BuildError("refunds exceed the payment amount");

  if (opts.honest_wallet) {
    for (const Contribution& c : contributions)
      if (!c.refund_address_owned)
        throw BuildError("refund address not owned by a participating key");
  }

  Payment p;
  p.merchant_id = request.merchant_id;
  for (const Contribution& c : contributions) p.transaction.inputs.push_back(c.input);
  p.transaction.outputs.push_back(TxOutput{request.amount, request.merchant_address});
  for (const Contribution& c : contributions) {
    RefundEntry e;
    e.refund_address = c.refund_address;
    e.refund_amount = c.refund_amount;
    e.memo = c.entry_memo;
    if (is_fix(variant) && !opts.omit_endorsements) e.endorsement = c.endorsement;
    p.refund_entries.push_back(std::move(e));
  }
  p.memo = opts.customer_memo;
  return p;
}

VerifyResult verify_payment(MerchantState& merchant, const Ledger& ledger,
                            const Payment& payment, Variant variant,
                            const SignatureBackend& backend) {
  auto it = merchant.pending.find(payment.merchant_id);
  if (it == merchant.pending.end()) return VerifyResult::reject("unknown merchant id");
  const PaymentRequest& request = it->second.request;
  const Transaction& tx = payment.transaction;

  if (!ledger.find(tx.id())) return VerifyResult::reject("transaction not on the ledger");
  if (tx.inputs.empty()) return VerifyResult::reject("no transaction inputs");
  for (const TransactionInput& in : tx.inputs)
    if (!backend.verify(in.pubkey, in.signed_payload(), in.signature))
      return VerifyResult::reject("bad input signature");

  Address mine = Address::of_key(it->second.tx_key.public_key);
  uint64_t paid = 0;
  for (const TxOutput& out : tx.outputs)
    if (out.to == mine) paid += out.amount;
  if (paid < request.amount) return VerifyResult::reject("underpaid");

  if (payment.refund_total() > request.amount)
    return VerifyResult::reject("refunds exceed the payment amount");

  if (is_fix(variant)) {
    if (payment.refund_entries.size() != tx.inputs.size())
      return VerifyResult::reject("missing endorsement");
    for (size_t i = 0; i < payment.refund_entries.size(); ++i) {
      const RefundEntry& e = payment.refund_entries[i];
      if (!e.endorsement) return VerifyResult::reject("missing endorsement");
      Bytes payload =
          endorsement_payload(variant, merchant.identity, tx.inputs[i], e.refund_address,
                              e.refund_amount, e.memo, request);
      if (!backend.verify(tx.inputs[i].pubkey, payload, *e.endorsement))
        return VerifyResult::reject("invalid endorsement");
    }
  }

  merchant.accepted[payment.merchant_id] = payment;
  EndorsementEvidence ev;
  ev.variant = variant;
  ev.merchant_identity = merchant.identity;
  ev.request = request;
  ev.payment = payment;
  merchant.evidence_store[payment.merchant_id] = std::move(ev);
  return VerifyResult::accept();
}

PaymentACK acknowledge(MerchantState& merchant, const Payment& payment, const std::string& memo,
                       Variant variant, const SignatureBackend& backend) {
  if (!merchant.accepted.count(payment.merchant_id))
    throw BuildError("acknowledging a payment that was not accepted");
  PaymentACK ack;
  ack.payment = payment;
  ack.memo = memo;
  if (is_fix(variant))
    ack.ack_signature = backend.sign(merchant.certificate_key.secret_key, ack.signed_payload());
  return ack;
}

VerifyResult verify_ack(const PaymentACK& ack, const Payment& sent,
                        const Bytes& merchant_cert_pub, Variant variant,
                        const SignatureBackend& backend) {
  if (!(ack.payment == sent)) return VerifyResult::reject("payment copy differs");
  if (is_fix(variant)) {
    if (!ack.ack_signature) return VerifyResult::reject("missing acknowledgement signature");
    if (!backend.verify(merchant_cert_pub, ack.signed_payload(), *ack.ack_signature))
      return VerifyResult::reject("bad acknowledgement signature");
  }
  return VerifyResult::accept();
}

Transaction issue_refund(MerchantState& merchant, Ledger& ledger, const std::string& merchant_id,
                         const SignatureBackend& backend) {
  auto it = merchant.accepted.find(merchant_id);
  if (it == merchant.accepted.end()) throw BuildError("no accepted payment for this id");
  const Payment& payment = it->second;
  const MerchantState::Pending& pend = merchant.pending.at(merchant_id);

  Address mine = Address::of_key(pend.tx_key.public_key);
  Bytes paid_txid = payment.transaction.id();
  uint64_t received = 0;
  for (const TxOutput& out : payment.transaction.outputs)
    if (out.to == mine) received += out.amount;

  Transaction refund;
  TransactionInput in;
  in.prev_tx_digest = paid_txid;
  in.pubkey = pend.tx_key.public_key;
  in.signature = backend.sign(pend.tx_key.secret_key, in.signed_payload());
  refund.inputs.push_back(std::move(in));
  uint64_t refunded = 0;
  for (const RefundEntry& e : payment.refund_entries) {
    refund.outputs.push_back(TxOutput{e.refund_amount, e.refund_address});
    refunded += e.refund_amount;
  }
  if (refunded < received) refund.outputs.push_back(TxOutput{received - refunded, mine});

  Ledger::SubmitResult sub = ledger.submit(refund, backend);
  if (!sub.ok) throw BuildError("refund transaction rejected by the ledger: " + sub.reason);
  merchant.refunds_issued[merchant_id] = refund.id();
  return refund;
}

AuditResult audit(const EndorsementEvidence& evidence, const Address& claimed,
                  const SignatureBackend& backend) {
  if (!is_fix(evidence.variant)) return {false, "no endorsement signature"};
  const std::vector<RefundEntry>& entries = evidence.payment.refund_entries;
  const std::vector<TransactionInput>& inputs = evidence.payment.transaction.inputs;
  for (size_t i = 0; i < entries.size(); ++i) {
    if (!(entries[i].refund_address == claimed)) continue;
    if (!entries[i].endorsement || i >= inputs.size())
      return {false, "no endorsement signature"};
    Bytes payload = endorsement_payload(evidence.variant, evidence.merchant_identity, inputs[i],
                                        entries[i].refund_address, entries[i].refund_amount,
                                        entries[i].memo, evidence.request);
    if (backend.verify(inputs[i].pubkey, payload, *entries[i].endorsement)) return {true, ""};
    return {false, "request mismatch"};
  }
  return {false, "address not in refund entries"};
}

}  // namespace bip70
}  // namespace anbp
