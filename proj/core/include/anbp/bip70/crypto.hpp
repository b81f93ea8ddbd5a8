#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace anbp {
namespace bip70 {

using Bytes = std::vector<uint8_t>;

std::string to_hex(const Bytes& b);
Bytes sha256(const Bytes& data);

/// Deterministic byte source for key generation; tests and scenarios seed it
/// so runs reproduce exactly.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}
  Bytes bytes(size_t n);
  uint64_t next_u64();

 private:
  uint64_t state_;
};

struct KeyPair {
  Bytes public_key;
  Bytes secret_key;
};

/// Hash-of-public-key identifier; equality of addresses is equality of
/// digests.
struct Address {
  std::array<uint8_t, 20> digest{};

  static Address of_key(const Bytes& public_key);
  std::string to_hex() const;
  friend bool operator==(const Address&, const Address&) = default;
  friend auto operator<=>(const Address&, const Address&) = default;
};

/// Narrow sign/verify interface; the security argument upstream is
/// scheme-agnostic, so the curve is a pluggable backend.
class SignatureBackend {
 public:
  virtual ~SignatureBackend() = default;
  virtual std::string name() const = 0;
  virtual KeyPair generate(Rng& rng) const = 0;
  virtual Bytes sign(const Bytes& secret_key, const Bytes& message) const = 0;
  virtual bool verify(const Bytes& public_key, const Bytes& message,
                      const Bytes& signature) const = 0;
};

/// "ed25519": real-curve deterministic signatures via OpenSSL.
/// "toy": fast hash-tag scheme for tests only; verification goes through a
/// process-local key registry and must never leave the test harness.
std::unique_ptr<SignatureBackend> make_backend(const std::string& name);
std::vector<std::string> backend_names();

}  // namespace bip70
}  // namespace anbp
