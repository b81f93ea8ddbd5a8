#pragma once

#include <optional>
#include <string>
#include <vector>

#include "anbp/bip70/protocol.hpp"

namespace anbp {
namespace bip70 {

enum class WalletMode { Honest, Malicious };

enum class ScenarioOutcome {
  AttackCompleted,  // refund reached the trader
  AttackBlocked,    // honest wallet refused to use a foreign refund address
  AttackRejected,   // merchant rejected the payment
};
const char* outcome_name(ScenarioOutcome o);

struct ScenarioStep {
  int index = 0;
  std::string from;
  std::string to;
  std::string label;
  std::string detail;
};

struct ScenarioOptions {
  uint64_t seed = 7;
  /// Malicious sub-mode for fix variants: strip the endorsement instead of
  /// signing the trader address with an owned key.
  bool omit_endorsements = false;
};

struct ScenarioReport {
  Variant variant = Variant::Baseline;
  WalletMode wallet = WalletMode::Malicious;
  ScenarioOutcome outcome = ScenarioOutcome::AttackCompleted;
  std::vector<ScenarioStep> log;

  std::optional<Address> refund_destination;  // tampered entry's destination
  AuditResult audit_verdict{false, "not run"};
  bool deniability = false;  // true iff the refund flowed and audit is unproven

  Address trader_address{};
  Address co_customer_refund_address{};
  std::string reject_reason;  // set when outcome == AttackRejected

  // Structured copies for cross-validation against the symbolic model.
  std::optional<PaymentRequest> trader_request;
  std::optional<PaymentRequest> merchant_request;
  std::optional<Payment> payment_to_merchant;
  std::optional<PaymentACK> merchant_ack;
  std::optional<Transaction> refund_transaction;

  uint64_t ledger_minted = 0;
  uint64_t ledger_unspent = 0;
  bool conserved() const { return ledger_minted == ledger_unspent; }

  /// Structured text, one record per line.
  std::string to_text() const;
};

/// Replays the refund-routing sequence end to end on an in-memory network
/// and ledger: trader request, merchant request, cooperative payment with
/// the co-customer's refund entry redirected to the trader, acknowledgement,
/// cancellation, refund, and the trader-side payment referencing the refund
/// transaction. Deterministic for a fixed seed.
ScenarioReport run_silkroad_scenario(Variant variant, WalletMode wallet,
                                     const SignatureBackend& backend,
                                     const ScenarioOptions& opts = {});

}  // namespace bip70
}  // namespace anbp
