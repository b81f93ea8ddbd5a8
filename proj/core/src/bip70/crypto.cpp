#include "anbp/bip70/crypto.hpp"

#include <openssl/evp.h>

#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>

namespace anbp {
namespace bip70 {

std::string to_hex(const Bytes& b) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(b.size() * 2);
  for (uint8_t c : b) {
    out.push_back(digits[c >> 4]);
    out.push_back(digits[c & 0xf]);
  }
  return out;
}

Bytes sha256(const Bytes& data) {
  Bytes out(32);
  unsigned int len = 32;
  if (!EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr))
    throw std::runtime_error("sha256 failed");
  return out;
}

Bytes Rng::bytes(size_t n) {
  Bytes out;
  out.reserve(n);
  while (out.size() < n) {
    uint64_t v = next_u64();
    for (int i = 0; i < 8 && out.size() < n; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }
  return out;
}

uint64_t Rng::next_u64() {
  // splitmix64; plenty for deterministic test key material.
  state_ += 0x9e3779b97f4a7c15ULL;
  uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Address Address::of_key(const Bytes& public_key) {
  Bytes tagged;
  const char* tag = "addr";
  tagged.insert(tagged.end(), tag, tag + 4);
  tagged.insert(tagged.end(), public_key.begin(), public_key.end());
  Bytes digest = sha256(tagged);
  Address a;
  std::memcpy(a.digest.data(), digest.data(), a.digest.size());
  return a;
}

std::string Address::to_hex() const {
  return bip70::to_hex(Bytes(digest.begin(), digest.end()));
}

namespace {

struct EvpKeyDeleter {
  void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
};
struct EvpCtxDeleter {
  void operator()(EVP_MD_CTX* c) const { EVP_MD_CTX_free(c); }
};
using EvpKey = std::unique_ptr<EVP_PKEY, EvpKeyDeleter>;
using EvpCtx = std::unique_ptr<EVP_MD_CTX, EvpCtxDeleter>;

class Ed25519Backend : public SignatureBackend {
 public:
  std::string name() const override { return "ed25519"; }

  KeyPair generate(Rng& rng) const override {
    Bytes seed = rng.bytes(32);
    EvpKey key(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, seed.data(), seed.size()));
    if (!key) throw std::runtime_error("ed25519 keygen failed");
    KeyPair kp;
    kp.secret_key = seed;
    size_t publen = 32;
    kp.public_key.resize(publen);
    if (!EVP_PKEY_get_raw_public_key(key.get(), kp.public_key.data(), &publen))
      throw std::runtime_error("ed25519 public key extraction failed");
    kp.public_key.resize(publen);
    return kp;
  }

  Bytes sign(const Bytes& secret_key, const Bytes& message) const override {
    EvpKey key(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, secret_key.data(),
                                            secret_key.size()));
    if (!key) throw std::runtime_error("ed25519 bad secret key");
    EvpCtx ctx(EVP_MD_CTX_new());
    if (!EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr, key.get()))
      throw std::runtime_error("ed25519 sign init failed");
    size_t siglen = 64;
    Bytes sig(siglen);
    if (!EVP_DigestSign(ctx.get(), sig.data(), &siglen, message.data(), message.size()))
      throw std::runtime_error("ed25519 sign failed");
    sig.resize(siglen);
    return sig;
  }

  bool verify(const Bytes& public_key, const Bytes& message,
              const Bytes& signature) const override {
    EvpKey key(EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr, public_key.data(),
                                           public_key.size()));
    if (!key) return false;
    EvpCtx ctx(EVP_MD_CTX_new());
    if (!EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, key.get())) return false;
    return EVP_DigestVerify(ctx.get(), signature.data(), signature.size(), message.data(),
                            message.size()) == 1;
  }
};

// Test-only scheme: sig = H(tag || secret || msg). Verification looks the
// secret up in a process-local registry keyed by public key, so forging still
// requires the secret. Never use outside the test harness.
class ToyBackend : public SignatureBackend {
 public:
  std::string name() const override { return "toy"; }

  KeyPair generate(Rng& rng) const override {
    KeyPair kp;
    kp.secret_key = rng.bytes(32);
    kp.public_key = tagged_hash("toy-pub", kp.secret_key, {});
    std::lock_guard<std::mutex> guard(mutex());
    registry()[kp.public_key] = kp.secret_key;
    return kp;
  }

  Bytes sign(const Bytes& secret_key, const Bytes& message) const override {
    return tagged_hash("toy-sig", secret_key, message);
  }

  bool verify(const Bytes& public_key, const Bytes& message,
              const Bytes& signature) const override {
    Bytes secret;
    {
      std::lock_guard<std::mutex> guard(mutex());
      auto it = registry().find(public_key);
      if (it == registry().end()) return false;
      secret = it->second;
    }
    return tagged_hash("toy-sig", secret, message) == signature;
  }

 private:
  static Bytes tagged_hash(const char* tag, const Bytes& a, const Bytes& b) {
    Bytes in(tag, tag + std::strlen(tag));
    in.insert(in.end(), a.begin(), a.end());
    in.insert(in.end(), b.begin(), b.end());
    return sha256(in);
  }

  static std::map<Bytes, Bytes>& registry() {
    static std::map<Bytes, Bytes> r;
    return r;
  }
  static std::mutex& mutex() {
    static std::mutex m;
    return m;
  }
};

}  // namespace

std::unique_ptr<SignatureBackend> make_backend(const std::string& name) {
  if (name == "ed25519") return std::make_unique<Ed25519Backend>();
  if (name == "toy") return std::make_unique<ToyBackend>();
  return nullptr;
}

std::vector<std::string> backend_names() { return {"ed25519", "toy"}; }

}  // namespace bip70
}  // namespace anbp
