#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "anbp/bip70/ledger.hpp"

namespace anbp {
namespace bip70 {

struct VerifyResult {
  bool ok = false;
  std::string reason;  // machine-readable on reject

  static VerifyResult accept() { return {true, ""}; }
  static VerifyResult reject(std::string why) { return {false, std::move(why)}; }
};

struct BuildError : std::runtime_error {
  explicit BuildError(const std::string& msg) : std::runtime_error(msg) {}
};

struct MerchantState {
  std::string identity;
  KeyPair certificate_key;  // the X.509-certified key, abstracted

  struct Pending {
    PaymentRequest request;
    KeyPair tx_key;  // fresh per-transaction address key
  };
  std::map<std::string, Pending> pending;           // by merchant_id
  std::map<std::string, Payment> accepted;          // by merchant_id
  std::map<std::string, EndorsementEvidence> evidence_store;
  std::map<std::string, Bytes> refunds_issued;      // merchant_id -> refund txid
};

MerchantState make_merchant(std::string identity, const SignatureBackend& backend, Rng& rng);

/// Mints a fresh per-transaction address and signs the request with the
/// certificate key. Throws std::invalid_argument unless created < expires
/// and amount > 0.
PaymentRequest create_payment_request(MerchantState& merchant, const SignatureBackend& backend,
                                      Rng& rng, uint64_t amount, uint64_t created,
                                      uint64_t expires, const std::string& memo,
                                      const std::string& payment_url,
                                      const std::string& merchant_id);

/// Accept iff the signature verifies under the merchant certificate key and
/// created <= now < expires. Rejects with "expired" or "signature".
VerifyResult verify_payment_request(const PaymentRequest& request, const Bytes& merchant_cert_pub,
                                    uint64_t now, const SignatureBackend& backend);

/// One customer's share of a payment: a signed funding input plus the refund
/// entry it vouches for.
struct Contribution {
  TransactionInput input;
  uint64_t funding_amount = 0;
  Address refund_address;
  uint64_t refund_amount = 0;
  std::string entry_memo;
  std::optional<Bytes> endorsement;  // per-variant signature by the input key
  bool refund_address_owned = true;  // wallet-local knowledge
};

/// Signs a funding input and, in fix variants, endorses the refund entry
/// with the same key.
Contribution make_contribution(const SignatureBackend& backend, const KeyPair& key,
                               const OutPoint& funding, uint64_t funding_amount,
                               const Address& refund_address, uint64_t refund_amount,
                               const std::string& entry_memo, Variant variant,
                               const PaymentRequest& request,
                               const std::string& merchant_identity);

struct BuildOptions {
  bool honest_wallet = true;
  bool omit_endorsements = false;  // malicious sub-mode for fix variants
  std::string customer_memo;
};

/// Assembles the payment transaction (one output paying the requested amount
/// to the merchant address) and the refund entry list. Honest wallets refuse
/// entries whose refund address is not owned by a participating key; funding
/// must cover the amount exactly (no fees are modelled).
Payment build_payment(const std::vector<Contribution>& contributions,
                      const PaymentRequest& request, Variant variant,
                      const SignatureBackend& backend, const BuildOptions& opts = {});

/// Merchant-side checks: the transaction is on the ledger and pays the
/// requested amount to the per-transaction address, input signatures verify,
/// refunds do not exceed the payment, and in fix variants every entry
/// carries a valid endorsement under the matching input key over this exact
/// request. On accept the payment and its EndorsementEvidence are persisted.
VerifyResult verify_payment(MerchantState& merchant, const Ledger& ledger,
                            const Payment& payment, Variant variant,
                            const SignatureBackend& backend);

/// Pre: payment accepted. Fix variants sign (payment, memo) with the
/// certificate key; the baseline acknowledgement is unsigned.
PaymentACK acknowledge(MerchantState& merchant, const Payment& payment, const std::string& memo,
                       Variant variant, const SignatureBackend& backend);

/// Customer-side check of an acknowledgement against the payment actually
/// sent: the copy must match, and fix variants must carry a valid merchant
/// signature.
VerifyResult verify_ack(const PaymentACK& ack, const Payment& sent,
                        const Bytes& merchant_cert_pub, Variant variant,
                        const SignatureBackend& backend);

/// Spends the accepted payment's output into one output per refund entry
/// (plus merchant change when refunds do not exhaust the amount); the
/// transaction is submitted to the ledger. Throws BuildError when no
/// accepted payment exists for the id.
Transaction issue_refund(MerchantState& merchant, Ledger& ledger, const std::string& merchant_id,
                         const SignatureBackend& backend);

struct AuditResult {
  bool proven = false;
  std::string reason;  // machine-readable when unproven
};

/// Third-party check using only the stored evidence: Proven iff the claimed
/// address sits in a refund entry whose endorsement verifies under the
/// public key of the funding input, over the exact request in evidence.
AuditResult audit(const EndorsementEvidence& evidence, const Address& claimed,
                  const SignatureBackend& backend);

}  // namespace bip70
}  // namespace anbp
