#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>

#include "dextt/protocol.hpp"

using namespace dextt;

namespace {

const KeyPair& ws() {
  static const auto k = keypair_from_label("proto/W_s");
  return k;
}
const KeyPair& wd() {
  static const auto k = keypair_from_label("proto/W_d");
  return k;
}
const KeyPair& we() {
  static const auto k = keypair_from_label("proto/W_e");
  return k;
}

}  // namespace

TEST_CASE("make_poi signs intent and countersignature") {
  auto poi = make_poi(ws(), wd(), 20, 1, 61);
  CHECK(poi.intent.t0 == 1);
  CHECK(poi.intent.t1 == 61);
  CHECK(poi.intent.amount == 20);
  CHECK(verify(ws().public_key, encode(poi.intent), poi.alpha));
  CHECK(verify(wd().public_key, beta_message(poi.intent, poi.alpha), poi.beta));
  CHECK(poi_signatures_valid(poi));
  CHECK(poi.id() == poi.alpha);

  auto small = make_poi(ws(), wd(), 2, 0, 10);
  CHECK(poi_signatures_valid(small));
}

TEST_CASE("make_poi rejects degenerate input") {
  CHECK_THROWS_AS(make_poi(ws(), wd(), kDefaultReward, 1, 61), ProtocolError);
  CHECK_THROWS_AS(make_poi(ws(), wd(), 0, 1, 61), ProtocolError);
  CHECK_THROWS_AS(make_poi(ws(), wd(), 20, 61, 61), ProtocolError);
  CHECK_THROWS_AS(make_poi(ws(), wd(), 20, 70, 61), ProtocolError);
}

TEST_CASE("tampered PoIs fail verification") {
  auto poi = make_poi(ws(), wd(), 20, 1, 61);
  auto more = poi;
  more.intent.amount = 21;
  CHECK_FALSE(poi_signatures_valid(more));
  auto beta = poi;
  beta.beta.bytes[0] ^= 1;
  CHECK_FALSE(poi_signatures_valid(beta));
}

TEST_CASE("intent encoding is injective on sampled pairs") {
  // A small value domain forces many repeated intents, so both directions
  // of "same bytes iff same intent" are exercised.
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> small(0, 3);
  const std::array<PublicKey, 2> keys{ws().public_key, wd().public_key};
  std::map<Bytes, std::tuple<PublicKey, PublicKey, Amount, Seconds, Seconds>> seen;
  std::size_t repeats = 0;
  for (int i = 0; i < 100'000; ++i) {
    TransferIntent in{keys[static_cast<std::size_t>(small(rng) % 2)], keys[static_cast<std::size_t>(small(rng) % 2)],
                      static_cast<Amount>(small(rng)), small(rng) - 1, small(rng) + 300};
    auto fields = std::make_tuple(in.sender, in.recipient, in.amount, in.t0, in.t1);
    auto [it, inserted] = seen.emplace(encode(in), fields);
    if (!inserted) {
      ++repeats;
      REQUIRE(it->second == fields);
    }
  }
  // 2*2*4*4*4 = 256 distinct intents
  CHECK(seen.size() == 256);
  CHECK(repeats == 100'000 - 256);
}

TEST_CASE("encoding is deterministic and field-sensitive") {
  TransferIntent a{ws().public_key, wd().public_key, 0, 1, 61};
  auto b = a;
  b.amount = 1;
  CHECK(encode(a) == encode(a));
  CHECK(encode(a) != encode(b));
  auto poi = make_poi(ws(), wd(), 20, 1, 61);
  CHECK(encode(poi) != encode(poi.intent));
  CHECK(encode(poi.intent)[0] != encode(poi)[0]);
}

TEST_CASE("conflicts") {
  auto a = make_poi(ws(), wd(), 8, 1, 61);
  auto b = make_poi(ws(), we(), 8, 30, 90);
  auto later = make_poi(ws(), we(), 8, 62, 120);
  auto touching = make_poi(ws(), we(), 8, 61, 120);
  auto other_sender = make_poi(wd(), we(), 8, 30, 90);

  CHECK(conflicts(a, b));
  CHECK(conflicts(b, a));
  CHECK_FALSE(conflicts(a, a));
  CHECK_FALSE(conflicts(a, later));
  CHECK(conflicts(a, touching));
  CHECK_FALSE(conflicts(a, other_sender));
}

TEST_CASE("conflicts is symmetric on random windows") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<Seconds> t(0, 100);
  for (int i = 0; i < 200; ++i) {
    Seconds a0 = t(rng), b0 = t(rng);
    auto a = make_poi(ws(), wd(), 5, a0, a0 + 1 + t(rng));
    auto b = make_poi(ws(), we(), 5, b0, b0 + 1 + t(rng));
    bool overlap = a.intent.t0 <= b.intent.t1 && b.intent.t0 <= a.intent.t1;
    CHECK(conflicts(a, b) == overlap);
    CHECK(conflicts(b, a) == overlap);
  }
}

TEST_CASE("veto deadline takes the later expiry plus the longer window") {
  auto a = make_poi(ws(), wd(), 8, 1, 61);
  auto b = make_poi(ws(), we(), 8, 30, 90);
  CHECK(veto_deadline(a, b) == 90 + 60);
  CHECK(veto_deadline(b, a) == 150);
  auto c = make_poi(ws(), we(), 8, 0, 100);
  CHECK(veto_deadline(a, c) == 100 + 100);
  CHECK_THROWS_AS(veto_deadline(a, make_poi(ws(), we(), 8, 70, 90)), ProtocolError);
}

TEST_CASE("veto payload and key do not depend on argument order") {
  auto a = make_poi(ws(), wd(), 8, 1, 61);
  auto b = make_poi(ws(), we(), 8, 30, 90);
  CHECK(encode_veto_payload(a.alpha, b.alpha) == encode_veto_payload(b.alpha, a.alpha));
  CHECK(VetoKey::of(a.alpha, b.alpha) == VetoKey::of(b.alpha, a.alpha));
  CHECK_FALSE(omega_less(VetoKey::of(a.alpha, b.alpha).high, VetoKey::of(a.alpha, b.alpha).low));
}

TEST_CASE("transaction builders") {
  auto poi = make_poi(ws(), wd(), 20, 1, 61);
  auto observer = keypair_from_label("proto/W_u");

  auto claim = make_claim(wd(), poi);
  CHECK(claim.kind() == TxKind::claim);
  CHECK(envelope_valid(claim));
  CHECK(subject_alpha(claim) == poi.alpha);

  auto contest = make_contest(observer, poi);
  const auto& body = std::get<Contest>(contest.body);
  CHECK(body.contestant == observer.public_key);
  CHECK(body.omega == sign(observer, encode(poi)));
  CHECK(verify(observer.public_key, encode(poi), body.omega));
  CHECK(envelope_valid(contest));

  auto forged = contest;
  forged.poster = ws().public_key;
  CHECK_FALSE(envelope_valid(forged));

  auto b = make_poi(ws(), we(), 8, 30, 90);
  auto veto = make_veto(observer, poi.alpha, b);
  CHECK(verify(observer.public_key, encode_veto_payload(poi.alpha, b.alpha), std::get<Veto>(veto.body).omega));
  CHECK(to_string(veto.kind()) == "veto");
  CHECK(to_string(make_finalize_veto(observer, poi.alpha, b.alpha).kind()) == "finalize-veto");
}
