#pragma once

#include <cstdint>
#include <stdexcept>
#include <string_view>
#include <variant>

#include "dextt/crypto.hpp"

namespace dextt {

/// Token quantity in the smallest indivisible PBT unit.
using Amount = std::uint64_t;
/// Protocol time in whole seconds since the simulation epoch.
using Seconds = std::int64_t;

inline constexpr Amount kDefaultReward = 1;

class ProtocolError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct TransferIntent {
  PublicKey sender;
  PublicKey recipient;
  Amount amount = 0;
  Seconds t0 = 0;
  Seconds t1 = 0;

  bool operator==(const TransferIntent&) const = default;
};

/// Sender-signed (alpha) and recipient-countersigned (beta) intent. alpha
/// identifies the PoI everywhere in the ecosystem.
struct ProofOfIntent {
  TransferIntent intent;
  Signature alpha;
  Signature beta;

  const Signature& id() const { return alpha; }
  bool operator==(const ProofOfIntent&) const = default;
};

// Canonical encoding: a one-byte tag, then each field length-prefixed
// (u32 big-endian) in declaration order. Integers are 8-byte big-endian.
Bytes encode(const TransferIntent& intent);
Bytes encode(const ProofOfIntent& poi);
/// Message signed by a veto contestant. Depends only on the unordered pair
/// {a, b}, so every chain sees the same ω whichever PoI it learned first.
Bytes encode_veto_payload(const Signature& a, const Signature& b);

/// Message the recipient countersigns: encode(intent) || alpha.
Bytes beta_message(const TransferIntent& intent, const Signature& alpha);

ProofOfIntent make_poi(const KeyPair& sender, const KeyPair& recipient, Amount amount,
                       Seconds t0, Seconds t1, Amount reward = kDefaultReward);

bool poi_signatures_valid(const ProofOfIntent& poi, const Verifier& verifier = direct_verifier());

/// Same sender, different alpha, and closed validity windows that overlap.
bool conflicts(const ProofOfIntent& a, const ProofOfIntent& b);

/// max(t1, t1') + max(t1 - t0, t1' - t0'). Throws ProtocolError when the
/// PoIs do not conflict.
Seconds veto_deadline(const ProofOfIntent& a, const ProofOfIntent& b);

/// Unordered pair of PoI ids.
struct VetoKey {
  Signature low;
  Signature high;

  static VetoKey of(const Signature& a, const Signature& b) {
    return a < b ? VetoKey{a, b} : VetoKey{b, a};
  }
  auto operator<=>(const VetoKey&) const = default;
};

// ---- transactions ---------------------------------------------------------

struct Claim {
  ProofOfIntent poi;
  bool operator==(const Claim&) const = default;
};

struct Contest {
  ProofOfIntent poi;
  PublicKey contestant;
  Signature omega;
  bool operator==(const Contest&) const = default;
};

struct Finalize {
  Signature alpha;
  bool operator==(const Finalize&) const = default;
};

struct Veto {
  Signature alpha;
  ProofOfIntent conflicting;
  PublicKey vetoer;
  Signature omega;
  bool operator==(const Veto&) const = default;
};

struct FinalizeVeto {
  Signature alpha;
  Signature alpha_prime;
  bool operator==(const FinalizeVeto&) const = default;
};

using TxBody = std::variant<Claim, Contest, Finalize, Veto, FinalizeVeto>;

enum class TxKind { claim, contest, finalize, veto, finalize_veto };

std::string_view to_string(TxKind kind);

/// A transaction as posted on a chain: body plus the poster's signature over
/// the encoded body.
struct Transaction {
  TxBody body;
  PublicKey poster;
  Signature signature;

  TxKind kind() const { return static_cast<TxKind>(body.index()); }
  bool operator==(const Transaction&) const = default;
};

Bytes encode(const TxBody& body);

Transaction make_claim(const KeyPair& poster, const ProofOfIntent& poi);
/// The contestant's ω is its signature over encode(poi).
Transaction make_contest(const KeyPair& contestant, const ProofOfIntent& poi);
Transaction make_finalize(const KeyPair& poster, const Signature& alpha);
/// alpha is the PoI the target chain already knows; `conflicting` is the other one.
Transaction make_veto(const KeyPair& vetoer, const Signature& alpha, const ProofOfIntent& conflicting);
Transaction make_finalize_veto(const KeyPair& poster, const Signature& alpha,
                               const Signature& alpha_prime);

bool envelope_valid(const Transaction& tx, const Verifier& verifier = direct_verifier());

/// Id of the PoI a transaction is primarily about.
const Signature& subject_alpha(const Transaction& tx);

}  // namespace dextt
