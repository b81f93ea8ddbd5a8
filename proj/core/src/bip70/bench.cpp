#include "anbp/bip70/bench.hpp"

#include <chrono>
#include <functional>
#include <map>
#include <sstream>

namespace anbp {
namespace bip70 {

namespace {

double time_ms(int iterations, const std::function<void()>& op) {
  using clock = std::chrono::steady_clock;
  for (int i = 0; i < 3; ++i) op();  // warmup
  auto start = clock::now();
  for (int i = 0; i < iterations; ++i) op();
  auto stop = clock::now();
  std::chrono::duration<double, std::milli> elapsed = stop - start;
  return elapsed.count() / iterations;
}

}  // namespace

const BenchRow* BenchTable::row(const std::string& step) const {
  for (const BenchRow& r : rows)
    if (r.step == step) return &r;
  return nullptr;
}

double BenchTable::customer_total_ms() const {
  double total = 0;
  for (const char* s : {"2", "3", "4a", "6"})
    if (const BenchRow* r = row(s)) total += r->mean_ms;
  return total;
}

double BenchTable::merchant_added_ms() const {
  double total = 0;
  for (const char* s : {"8", "9"})
    if (const BenchRow* r = row(s)) total += r->mean_ms;
  return total;
}

double BenchTable::endorsement_ratio() const {
  double total = customer_total_ms();
  const BenchRow* r = row("6");
  return (r && total > 0) ? r->mean_ms / total : 0.0;
}

std::string BenchTable::to_text() const {
  std::ostringstream os;
  os << "bench backend=" << backend << " iterations=" << iterations << "\n";
  for (const BenchRow& r : rows) {
    os << "row step=" << r.step << " mean_ms=" << r.mean_ms
       << " comparable=" << (r.comparable ? "true" : "false") << " label=\"" << r.label
       << "\"\n";
  }
  os << "derived customer_total_ms=" << customer_total_ms() << "\n";
  os << "derived merchant_added_ms=" << merchant_added_ms() << "\n";
  const BenchRow* pv = row("7");
  os << "derived payment_verify_ms=" << (pv ? pv->mean_ms : 0.0) << "\n";
  os << "derived endorsement_sign_over_customer_total=" << endorsement_ratio() << "\n";
  return os.str();
}

BenchTable bench(int iterations, const SignatureBackend& backend, uint64_t seed) {
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  BenchTable table;
  table.backend = backend.name();
  table.iterations = iterations;

  Rng rng(seed);
  Ledger ledger;
  MerchantState merchant = make_merchant("M", backend, rng);
  KeyPair customer_a = backend.generate(rng);
  KeyPair customer_b = backend.generate(rng);
  KeyPair refund_key = backend.generate(rng);
  Address refund_addr = Address::of_key(refund_key.public_key);
  OutPoint fund_a = ledger.genesis_grant(Address::of_key(customer_a.public_key), 60000);
  OutPoint fund_b = ledger.genesis_grant(Address::of_key(customer_b.public_key), 40000);

  PaymentRequest request = create_payment_request(merchant, backend, rng, 100000, 1000, 2000,
                                                  "bench", "https://merchant/pay", "z-bench");

  Contribution ca = make_contribution(backend, customer_a, fund_a, 60000, refund_addr, 60000,
                                      "", Variant::Endorsed, request, merchant.identity);
  Contribution cb = make_contribution(backend, customer_b, fund_b, 40000, refund_addr, 40000,
                                      "", Variant::Endorsed, request, merchant.identity);
  Payment payment = build_payment({ca, cb}, request, Variant::Endorsed, backend,
                                  BuildOptions{false, false, ""});
  Bytes endorse_payload =
      endorsement_payload(Variant::Endorsed, merchant.identity, ca.input, refund_addr, 60000,
                          "", request);
  Bytes endorse_sig = backend.sign(customer_a.secret_key, endorse_payload);
  Bytes input_payload = ca.input.signed_payload();

  std::vector<Address> pregenerated;
  for (int i = 0; i < 64; ++i) pregenerated.push_back(Address::of_key(rng.bytes(32)));
  std::map<std::string, Address> address_book;
  volatile size_t guard = 0;

  auto add = [&](const std::string& step, const std::string& label, bool comparable,
                 const std::function<void()>& op) {
    table.rows.push_back(BenchRow{step, label, time_ms(iterations, op), comparable});
  };

  add("2", "verify merchant signature on Payment Request", true, [&] {
    if (!backend.verify(merchant.certificate_key.public_key, request.signed_payload(),
                        request.signature))
      throw std::runtime_error("bench: request verify failed");
  });
  add("3", "sign a single transaction input", true,
      [&] { guard = guard + backend.sign(customer_a.secret_key, input_payload).size(); });
  add("4a", "fetch a pre-generated refund address", true, [&] {
    guard = guard + pregenerated[guard % pregenerated.size()].digest[0];
  });
  add("4b", "generate a new refund address", true, [&] {
    KeyPair fresh = backend.generate(rng);
    guard = guard + Address::of_key(fresh.public_key).digest[0];
  });
  add("5", "update wallet address book (bookkeeping placeholder)", false, [&] {
    address_book["r" + std::to_string(static_cast<size_t>(guard) % 97)] = refund_addr;
  });
  add("6", "compute endorsement signature", true,
      [&] { guard = guard + backend.sign(customer_a.secret_key, endorse_payload).size(); });
  add("7", "verify customer payment transaction", true, [&] {
    for (const TransactionInput& in : payment.transaction.inputs)
      if (!backend.verify(in.pubkey, in.signed_payload(), in.signature))
        throw std::runtime_error("bench: input verify failed");
  });
  add("8", "fetch referenced transaction output", true, [&] {
    auto out = ledger.unspent(fund_a);
    guard = guard + (out ? static_cast<size_t>(out->amount & 0xff) : 0);
  });
  add("9", "verify endorsement signature", true, [&] {
    if (!backend.verify(customer_a.public_key, endorse_payload, endorse_sig))
      throw std::runtime_error("bench: endorsement verify failed");
  });
  (void)guard;
  return table;
}

}  // namespace bip70
}  // namespace anbp
