#include "anbp/bip70/scenario.hpp"

#include <sstream>

namespace anbp {
namespace bip70 {

const char* outcome_name(ScenarioOutcome o) {
  switch (o) {
    case ScenarioOutcome::AttackCompleted:
      return "completed";
    case ScenarioOutcome::AttackBlocked:
      return "attack_blocked";
    case ScenarioOutcome::AttackRejected:
      return "attack_rejected";
  }
  return "?";
}

namespace {

struct StepLog {
  std::vector<ScenarioStep>& log;
  void add(const std::string& from, const std::string& to, const std::string& label,
           const std::string& detail = "") {
    log.push_back({static_cast<int>(log.size()), from, to, label, detail});
  }
};

constexpr uint64_t kPrice = 100000;       // merchant asking price
constexpr uint64_t kCustomerShare = 60000;
constexpr uint64_t kCoCustomerShare = 40000;
constexpr uint64_t kNow = 1500;

}  // namespace

ScenarioReport run_silkroad_scenario(Variant variant, WalletMode wallet,
                                     const SignatureBackend& backend,
                                     const ScenarioOptions& opts) {
  ScenarioReport report;
  report.variant = variant;
  report.wallet = wallet;
  StepLog log{report.log};

  Rng rng(opts.seed);
  Ledger ledger;

  MerchantState merchant = make_merchant("M", backend, rng);
  MerchantState trader = make_merchant("SilkroadTrader", backend, rng);

  // Wallet key material: the customer controls two funded outputs, the
  // co-customer one; each party keeps a refund key of its own.
  KeyPair c1_spend_a = backend.generate(rng);
  KeyPair c1_spend_b = backend.generate(rng);
  KeyPair c2_spend = backend.generate(rng);
  KeyPair c1_refund_key = backend.generate(rng);
  KeyPair c2_refund_key = backend.generate(rng);
  Address c1_refund = Address::of_key(c1_refund_key.public_key);
  Address c2_refund = Address::of_key(c2_refund_key.public_key);
  report.co_customer_refund_address = c2_refund;

  OutPoint fund_a = ledger.genesis_grant(Address::of_key(c1_spend_a.public_key), kCustomerShare);
  OutPoint fund_b =
      ledger.genesis_grant(Address::of_key(c1_spend_b.public_key), kCoCustomerShare);
  OutPoint fund_c2 =
      ledger.genesis_grant(Address::of_key(c2_spend.public_key), kCoCustomerShare);

  // 1. The trader issues its own request; its fresh address is the one the
  //    customer will try to launder the refund to.
  PaymentRequest rho_t = create_payment_request(trader, backend, rng, kCoCustomerShare, 1000,
                                                2000, "illicit goods", "https://trader/pay",
                                                "z-T-7");
  report.trader_request = rho_t;
  report.trader_address = rho_t.merchant_address;
  log.add("T", "C1", "payment-request", "trader request " + rho_t.merchant_id);
  if (!verify_payment_request(rho_t, trader.certificate_key.public_key, kNow, backend).ok)
    throw BuildError("trader request failed verification");

  // 2. Pay Now at the honest merchant.
  log.add("C1", "M", "paynow");
  PaymentRequest rho_m = create_payment_request(merchant, backend, rng, kPrice, 1000, 2000,
                                                "order #1017", "https://merchant/pay", "z-M-1");
  report.merchant_request = rho_m;
  log.add("M", "C1", "payment-request", "merchant request " + rho_m.merchant_id);
  if (!verify_payment_request(rho_m, merchant.certificate_key.public_key, kNow, backend).ok)
    throw BuildError("merchant request failed verification");

  // 3. Cooperation: the co-customer shares its refund wish and signed input
  //    (plus its endorsement in fix variants).
  log.add("C1", "C2", "cooperate", "merchant name, request, customer key");
  Contribution c2_share =
      make_contribution(backend, c2_spend, fund_c2, kCoCustomerShare, c2_refund,
                        kCoCustomerShare, "", variant, rho_m, merchant.identity);
  log.add("C2", "C1", "cooperate-reply", "refund address, amount, signed input");

  // 4. The wallet assembles the Payment, redirecting the co-customer's
  //    refund to the trader.
  if (wallet == WalletMode::Honest) {
    // An honest wallet only endorses addresses its keys own; the redirect
    // never leaves the wallet.
    report.outcome = ScenarioOutcome::AttackBlocked;
    log.add("C1", "C1", "abort", "wallet refuses foreign refund address");
    report.audit_verdict = {false, "not run"};
    report.deniability = false;
    report.ledger_minted = ledger.total_minted();
    report.ledger_unspent = ledger.total_unspent();
    return report;
  }

  Contribution own = make_contribution(backend, c1_spend_a, fund_a, kCustomerShare, c1_refund,
                                       kCustomerShare, "", variant, rho_m, merchant.identity);
  std::vector<Contribution> contributions;
  contributions.push_back(own);
  if (!is_fix(variant) || opts.omit_endorsements) {
    // Baseline: swap the co-customer's refund address for the trader's; the
    // entry is not signed, so nothing stops the edit. The omit sub-mode
    // tries the same edit against a fix variant.
    Contribution tampered = c2_share;
    tampered.refund_address = report.trader_address;
    tampered.endorsement.reset();
    tampered.refund_address_owned = false;
    contributions.push_back(tampered);
  } else {
    // Fix variants force a signature by the key funding the entry, so the
    // malicious wallet substitutes its own second key and signs the trader
    // address anyway.
    contributions.push_back(make_contribution(backend, c1_spend_b, fund_b, kCoCustomerShare,
                                              report.trader_address, kCoCustomerShare, "",
                                              variant, rho_m, merchant.identity));
  }

  BuildOptions build_opts;
  build_opts.honest_wallet = false;
  build_opts.omit_endorsements = opts.omit_endorsements;
  build_opts.customer_memo = "thanks";
  Payment payment = build_payment(contributions, rho_m, variant, backend, build_opts);

  Ledger::SubmitResult broadcast = ledger.submit(payment.transaction, backend);
  if (!broadcast.ok) throw BuildError("payment transaction rejected: " + broadcast.reason);
  log.add("C1", "*", "broadcast", "payment transaction");

  report.payment_to_merchant = payment;
  log.add("C1", "M", "payment", "refund entries: own + trader-addressed");

  VerifyResult vr = verify_payment(merchant, ledger, payment, variant, backend);
  if (!vr.ok) {
    report.outcome = ScenarioOutcome::AttackRejected;
    report.reject_reason = vr.reason;
    log.add("M", "C1", "reject", vr.reason);
    report.audit_verdict = {false, "not run"};
    report.deniability = false;
    report.ledger_minted = ledger.total_minted();
    report.ledger_unspent = ledger.total_unspent();
    return report;
  }
  log.add("M", "C1", "accept", "evidence stored");

  PaymentACK ack = acknowledge(merchant, payment, "ack #1017", variant, backend);
  report.merchant_ack = ack;
  log.add("M", "C1", "payment-ack");
  if (!verify_ack(ack, payment, merchant.certificate_key.public_key, variant, backend).ok)
    throw BuildError("acknowledgement failed customer-side verification");

  // 5. Cancel and collect the refund.
  log.add("C1", "M", "cancel", "order cancelled, refund requested");
  Transaction refund = issue_refund(merchant, ledger, rho_m.merchant_id, backend);
  report.refund_transaction = refund;
  log.add("M", "*", "broadcast", "refund transaction");
  for (const TxOutput& out : refund.outputs)
    if (out.to == report.trader_address) report.refund_destination = out.to;

  // 6. Point the trader at the refund transaction.
  Payment to_trader;
  to_trader.merchant_id = rho_t.merchant_id;
  to_trader.transaction = refund;
  to_trader.memo = "payment for z-T-7";
  log.add("C1", "T", "payment", "references the refund transaction");
  uint64_t paid_to_trader = 0;
  for (const TxOutput& out : refund.outputs)
    if (out.to == report.trader_address) paid_to_trader += out.amount;
  if (paid_to_trader >= rho_t.amount)
    log.add("T", "C1", "payment-ack", "illicit goods shipped");
  else
    log.add("T", "C1", "reject", "refund does not cover the price");

  // 7. Third-party audit of the merchant's stored evidence.
  const EndorsementEvidence& ev = merchant.evidence_store.at(rho_m.merchant_id);
  report.audit_verdict = audit(ev, report.trader_address, backend);
  report.outcome = ScenarioOutcome::AttackCompleted;
  report.deniability = !report.audit_verdict.proven;
  report.ledger_minted = ledger.total_minted();
  report.ledger_unspent = ledger.total_unspent();
  return report;
}

std::string ScenarioReport::to_text() const {
  std::ostringstream os;
  os << "scenario variant=" << variant_name(variant)
     << " wallet=" << (wallet == WalletMode::Honest ? "honest" : "malicious")
     << " outcome=" << outcome_name(outcome) << "\n";
  for (const ScenarioStep& s : log) {
    os << "step " << s.index << " from=" << s.from << " to=" << s.to << " label=" << s.label;
    if (!s.detail.empty()) os << " detail=\"" << s.detail << '"';
    os << "\n";
  }
  os << "trader-address " << trader_address.to_hex() << "\n";
  if (refund_destination)
    os << "refund-destination " << refund_destination->to_hex() << "\n";
  else
    os << "refund-destination none\n";
  if (!reject_reason.empty()) os << "reject-reason " << reject_reason << "\n";
  os << "audit " << (audit_verdict.proven ? "proven" : "unproven");
  if (!audit_verdict.proven) os << " reason=\"" << audit_verdict.reason << '"';
  os << "\n";
  os << "deniability " << (deniability ? "true" : "false") << "\n";
  os << "ledger minted=" << ledger_minted << " unspent=" << ledger_unspent
     << " conserved=" << (conserved() ? "true" : "false") << "\n";
  return os.str();
}

}  // namespace bip70
}  // namespace anbp
