#include "dextt/protocol.hpp"

#include <algorithm>
#include <string>

namespace dextt {
namespace {

enum Tag : std::uint8_t {
  kTagIntent = 0x01,
  kTagPoi = 0x02,
  kTagVeto = 0x03,
  kTagTxClaim = 0x10,
  kTagTxContest = 0x11,
  kTagTxFinalize = 0x12,
  kTagTxVeto = 0x13,
  kTagTxFinalizeVeto = 0x14,
};

class Writer {
 public:
  explicit Writer(std::uint8_t tag) { out_.push_back(tag); }

  Writer& field(ByteView bytes) {
    auto n = static_cast<std::uint32_t>(bytes.size());
    for (int shift = 24; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(n >> shift));
    out_.insert(out_.end(), bytes.begin(), bytes.end());
    return *this;
  }

  Writer& field(std::uint64_t v) {
    std::array<std::uint8_t, 8> be{};
    for (int i = 7; i >= 0; --i) {
      be[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v & 0xff);
      v >>= 8;
    }
    return field(ByteView(be));
  }

  Writer& field(std::int64_t v) { return field(static_cast<std::uint64_t>(v)); }
  Writer& field(const PublicKey& k) { return field(ByteView(k.bytes)); }
  Writer& field(const Signature& s) { return field(ByteView(s.bytes)); }

  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
};

}  // namespace

Bytes encode(const TransferIntent& intent) {
  return Writer(kTagIntent)
      .field(intent.sender)
      .field(intent.recipient)
      .field(static_cast<std::uint64_t>(intent.amount))
      .field(static_cast<std::int64_t>(intent.t0))
      .field(static_cast<std::int64_t>(intent.t1))
      .take();
}

Bytes encode(const ProofOfIntent& poi) {
  auto intent = encode(poi.intent);
  return Writer(kTagPoi).field(ByteView(intent)).field(poi.alpha).field(poi.beta).take();
}

Bytes encode_veto_payload(const Signature& a, const Signature& b) {
  auto key = VetoKey::of(a, b);
  return Writer(kTagVeto).field(key.low).field(key.high).take();
}

Bytes beta_message(const TransferIntent& intent, const Signature& alpha) {
  auto msg = encode(intent);
  msg.insert(msg.end(), alpha.bytes.begin(), alpha.bytes.end());
  return msg;
}

ProofOfIntent make_poi(const KeyPair& sender, const KeyPair& recipient, Amount amount, Seconds t0,
                       Seconds t1, Amount reward) {
  if (t0 >= t1) {
    throw ProtocolError("invalid validity window [" + std::to_string(t0) + ", " +
                        std::to_string(t1) + "]");
  }
  if (amount <= reward) {
    throw ProtocolError("amount " + std::to_string(amount) + " does not exceed reward " +
                        std::to_string(reward));
  }
  ProofOfIntent poi;
  poi.intent = TransferIntent{sender.public_key, recipient.public_key, amount, t0, t1};
  poi.alpha = sign(sender, encode(poi.intent));
  poi.beta = sign(recipient, beta_message(poi.intent, poi.alpha));
  return poi;
}

bool poi_signatures_valid(const ProofOfIntent& poi, const Verifier& verifier) {
  return verifier.check(poi.intent.sender, encode(poi.intent), poi.alpha) &&
         verifier.check(poi.intent.recipient, beta_message(poi.intent, poi.alpha), poi.beta);
}

bool conflicts(const ProofOfIntent& a, const ProofOfIntent& b) {
  const auto& x = a.intent;
  const auto& y = b.intent;
  return x.sender == y.sender && a.alpha != b.alpha && x.t0 <= y.t1 && y.t0 <= x.t1;
}

Seconds veto_deadline(const ProofOfIntent& a, const ProofOfIntent& b) {
  if (!conflicts(a, b)) throw ProtocolError("veto deadline requested for non-conflicting PoIs");
  const auto& x = a.intent;
  const auto& y = b.intent;
  return std::max(x.t1, y.t1) + std::max(x.t1 - x.t0, y.t1 - y.t0);
}

std::string_view to_string(TxKind kind) {
  switch (kind) {
    case TxKind::claim: return "claim";
    case TxKind::contest: return "contest";
    case TxKind::finalize: return "finalize";
    case TxKind::veto: return "veto";
    case TxKind::finalize_veto: return "finalize-veto";
  }
  return "unknown";
}

Bytes encode(const TxBody& body) {
  struct Visitor {
    Bytes operator()(const Claim& c) const {
      auto poi = encode(c.poi);
      return Writer(kTagTxClaim).field(ByteView(poi)).take();
    }
    Bytes operator()(const Contest& c) const {
      auto poi = encode(c.poi);
      return Writer(kTagTxContest).field(ByteView(poi)).field(c.contestant).field(c.omega).take();
    }
    Bytes operator()(const Finalize& f) const { return Writer(kTagTxFinalize).field(f.alpha).take(); }
    Bytes operator()(const Veto& v) const {
      auto poi = encode(v.conflicting);
      return Writer(kTagTxVeto)
          .field(v.alpha)
          .field(ByteView(poi))
          .field(v.vetoer)
          .field(v.omega)
          .take();
    }
    Bytes operator()(const FinalizeVeto& f) const {
      return Writer(kTagTxFinalizeVeto).field(f.alpha).field(f.alpha_prime).take();
    }
  };
  return std::visit(Visitor{}, body);
}

namespace {

Transaction seal(const KeyPair& poster, TxBody body) {
  Transaction tx{std::move(body), poster.public_key, {}};
  tx.signature = sign(poster, encode(tx.body));
  return tx;
}

}  // namespace

Transaction make_claim(const KeyPair& poster, const ProofOfIntent& poi) {
  return seal(poster, Claim{poi});
}

Transaction make_contest(const KeyPair& contestant, const ProofOfIntent& poi) {
  return seal(contestant, Contest{poi, contestant.public_key, sign(contestant, encode(poi))});
}

Transaction make_finalize(const KeyPair& poster, const Signature& alpha) {
  return seal(poster, Finalize{alpha});
}

Transaction make_veto(const KeyPair& vetoer, const Signature& alpha, const ProofOfIntent& conflicting) {
  auto omega = sign(vetoer, encode_veto_payload(alpha, conflicting.alpha));
  return seal(vetoer, Veto{alpha, conflicting, vetoer.public_key, omega});
}

Transaction make_finalize_veto(const KeyPair& poster, const Signature& alpha,
                               const Signature& alpha_prime) {
  return seal(poster, FinalizeVeto{alpha, alpha_prime});
}

bool envelope_valid(const Transaction& tx, const Verifier& verifier) {
  return verifier.check(tx.poster, encode(tx.body), tx.signature);
}

const Signature& subject_alpha(const Transaction& tx) {
  struct Visitor {
    const Signature& operator()(const Claim& c) const { return c.poi.alpha; }
    const Signature& operator()(const Contest& c) const { return c.poi.alpha; }
    const Signature& operator()(const Finalize& f) const { return f.alpha; }
    const Signature& operator()(const Veto& v) const { return v.alpha; }
    const Signature& operator()(const FinalizeVeto& f) const { return f.alpha; }
  };
  return std::visit(Visitor{}, tx.body);
}

}  // namespace dextt
