#include "dextt/crypto.hpp"

#include <sodium.h>

#include <algorithm>
#include <cstring>
#include <mutex>
#include <stdexcept>

namespace dextt {
namespace {

void ensure_sodium() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) throw std::runtime_error("libsodium initialization failed");
  });
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string to_hex(ByteView bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

Bytes from_hex(std::string_view hex) {
  if (hex.starts_with("0x")) hex.remove_prefix(2);
  if (hex.size() % 2 != 0) throw std::invalid_argument("odd-length hex string");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = hex_value(hex[2 * i]);
    int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("invalid hex digit");
    out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return out;
}

Digest sha256(ByteView data) {
  ensure_sodium();
  Digest out{};
  crypto_hash_sha256(out.data(), data.data(), data.size());
  return out;
}

Digest sha256(std::string_view text) {
  return sha256(ByteView(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

Signature Signature::from_hex(std::string_view hex) {
  auto raw = dextt::from_hex(hex);
  if (raw.size() != kSize) throw std::invalid_argument("signature must be 64 bytes");
  Signature s;
  std::copy(raw.begin(), raw.end(), s.bytes.begin());
  return s;
}

Signature Signature::with_prefix(std::initializer_list<std::uint8_t> prefix) {
  if (prefix.size() > kSize) throw std::invalid_argument("prefix longer than signature");
  Signature s;
  std::copy(prefix.begin(), prefix.end(), s.bytes.begin());
  return s;
}

KeyPair generate_keypair(std::span<const std::uint8_t, 32> seed) {
  ensure_sodium();
  KeyPair kp;
  std::copy(seed.begin(), seed.end(), kp.private_key.begin());
  crypto_sign_seed_keypair(kp.public_key.bytes.data(), kp.signing_key.data(), kp.private_key.data());
  return kp;
}

KeyPair keypair_from_label(std::string_view label) {
  auto seed = sha256(label);
  return generate_keypair(seed);
}

Signature sign(const KeyPair& key, ByteView message) {
  ensure_sodium();
  Signature sig;
  crypto_sign_detached(sig.bytes.data(), nullptr, message.data(), message.size(),
                       key.signing_key.data());
  return sig;
}

bool verify(const PublicKey& key, ByteView message, const Signature& sig) {
  ensure_sodium();
  return crypto_sign_verify_detached(sig.bytes.data(), message.data(), message.size(),
                                     key.bytes.data()) == 0;
}

bool omega_less(const Signature& a, const Signature& b) {
  auto x = a.omega();
  auto y = b.omega();
  return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end());
}

bool ranks_before(const Contestant& a, const Contestant& b) {
  if (omega_less(a.omega, b.omega)) return true;
  if (omega_less(b.omega, a.omega)) return false;
  return a.wallet < b.wallet;
}

const Verifier& direct_verifier() {
  static const DirectVerifier instance;
  return instance;
}

std::size_t CachingVerifier::DigestHash::operator()(const Digest& d) const noexcept {
  std::size_t h;
  std::memcpy(&h, d.data(), sizeof h);
  return h;
}

bool CachingVerifier::check(const PublicKey& key, ByteView message, const Signature& sig) const {
  ensure_sodium();
  crypto_hash_sha256_state st;
  crypto_hash_sha256_init(&st);
  crypto_hash_sha256_update(&st, key.bytes.data(), key.bytes.size());
  crypto_hash_sha256_update(&st, sig.bytes.data(), sig.bytes.size());
  crypto_hash_sha256_update(&st, message.data(), message.size());
  Digest d;
  crypto_hash_sha256_final(&st, d.data());

  if (auto it = cache_.find(d); it != cache_.end()) {
    ++hits_;
    return it->second;
  }
  ++misses_;
  bool ok = verify(key, message, sig);
  cache_.emplace(d, ok);
  return ok;
}

}  // namespace dextt
