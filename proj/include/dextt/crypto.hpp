#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace dextt {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

using Digest = std::array<std::uint8_t, 32>;

std::string to_hex(ByteView bytes);
Bytes from_hex(std::string_view hex);

Digest sha256(ByteView data);
Digest sha256(std::string_view text);

/// Wallet identifier. The public key is used directly as the wallet address.
struct PublicKey {
  std::array<std::uint8_t, 32> bytes{};

  auto operator<=>(const PublicKey&) const = default;
  std::string hex() const { return to_hex(bytes); }
};

struct KeyPair {
  std::array<std::uint8_t, 32> private_key{};
  PublicKey public_key;
  // libsodium's expanded signing key (seed followed by public key).
  std::array<std::uint8_t, 64> signing_key{};
};

/// Ed25519 signature (R || S). The witness-contest value ω is R read as a
/// 256-bit big-endian unsigned integer.
struct Signature {
  static constexpr std::size_t kSize = 64;
  static constexpr std::size_t kOmegaSize = 32;

  std::array<std::uint8_t, kSize> bytes{};

  std::span<const std::uint8_t, kOmegaSize> omega() const {
    return std::span<const std::uint8_t, kOmegaSize>(bytes.data(), kOmegaSize);
  }

  auto operator<=>(const Signature&) const = default;
  std::string hex() const { return to_hex(bytes); }
  std::string short_hex() const { return to_hex(ByteView(bytes.data(), 6)); }

  static Signature from_hex(std::string_view hex);
  /// Signature whose leading bytes are `prefix` and the rest zero. Used to
  /// reproduce hand-picked ω values such as 0xC1.
  static Signature with_prefix(std::initializer_list<std::uint8_t> prefix);
};

KeyPair generate_keypair(std::span<const std::uint8_t, 32> seed);
/// Seed = SHA-256(label).
KeyPair keypair_from_label(std::string_view label);

Signature sign(const KeyPair& key, ByteView message);
bool verify(const PublicKey& key, ByteView message, const Signature& sig);

/// Strict order on ω (big-endian comparison of the R component).
bool omega_less(const Signature& a, const Signature& b);

/// A contest entry. Lower ω ranks first; equal ω falls back to the wallet.
struct Contestant {
  PublicKey wallet;
  Signature omega;

  bool operator==(const Contestant&) const = default;
};

bool ranks_before(const Contestant& a, const Contestant& b);

/// Signature checking as seen by the contract. Implementations must behave
/// exactly like `verify`.
class Verifier {
 public:
  virtual ~Verifier() = default;
  virtual bool check(const PublicKey& key, ByteView message, const Signature& sig) const = 0;
};

class DirectVerifier final : public Verifier {
 public:
  bool check(const PublicKey& key, ByteView message, const Signature& sig) const override {
    return verify(key, message, sig);
  }
};

const Verifier& direct_verifier();

/// Memoizes verification results keyed by a digest of (key, signature,
/// message). Not thread-safe; give each simulation its own instance.
class CachingVerifier final : public Verifier {
 public:
  bool check(const PublicKey& key, ByteView message, const Signature& sig) const override;

  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }

 private:
  struct DigestHash {
    std::size_t operator()(const Digest& d) const noexcept;
  };
  mutable std::unordered_map<Digest, bool, DigestHash> cache_;
  mutable std::size_t hits_ = 0;
  mutable std::size_t misses_ = 0;
};

}  // namespace dextt
