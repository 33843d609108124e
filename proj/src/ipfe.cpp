#include "privaflow/ipfe.hpp"

#include <string>

#include "privaflow/errors.hpp"

namespace privaflow::ipfe {

using group::exp;
using group::exp_g;
using group::mul;

const MasterSecret::Record& MasterSecret::at(DriverId id) const {
  if (id == 0 || id > records.size()) throw UnknownDriver("unknown driver " + std::to_string(id));
  return records[id - 1];
}

std::pair<MasterPublic, MasterSecret> setup(const GroupParams& params, std::size_t n_drivers, Rng& rng) {
  MasterPublic mpk;
  MasterSecret msk;
  mpk.params = params;
  mpk.records.reserve(n_drivers);
  msk.records.reserve(n_drivers);
  for (std::size_t i = 0; i < n_drivers; ++i) {
    MasterSecret::Record s;
    s.a = Scalar::random(rng);
    s.w = {Scalar::random(rng), Scalar::random(rng)};
    s.u = Scalar::random(rng);
    mpk.records.push_back({{GroupElement::generator(), exp_g(s.a)}, exp_g(s.w_dot_a())});
    msk.records.push_back(s);
  }
  return {std::move(mpk), std::move(msk)};
}

DriverKey derive_driver_key(const MasterPublic& mpk, const MasterSecret& msk, DriverId id) {
  if (id == 0 || id > mpk.records.size() || mpk.records.size() != msk.records.size()) {
    throw UnknownDriver("unknown driver " + std::to_string(id));
  }
  const auto& pub = mpk.records[id - 1];
  return DriverKey{id, mpk.params, pub.avec, pub.wa, msk.records[id - 1].u};
}

FunctionalKey derive_functional_key(const MasterSecret& msk, std::span<const Scalar> y) {
  if (y.size() != msk.n_drivers()) {
    throw LengthMismatch("functional key vector has " + std::to_string(y.size()) + " entries, expected " +
                         std::to_string(msk.n_drivers()));
  }
  FunctionalKey dk;
  dk.y.assign(y.begin(), y.end());
  dk.d.reserve(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const auto& rec = msk.records[i];
    dk.d.push_back({y[i] * rec.w[0], y[i] * rec.w[1]});
    dk.z += y[i] * rec.u;
  }
  return dk;
}

std::vector<Scalar> ones(std::size_t n) { return std::vector<Scalar>(n, Scalar::one()); }

CellCiphertext encrypt(const DriverKey& key, std::uint64_t plaintext, Rng& rng, CellId cell_id) {
  const Scalar r = Scalar::random(rng);
  CellCiphertext ct;
  ct.driver_id = key.driver_id;
  ct.cell_id = cell_id;
  ct.t = {exp(key.avec[0], r), exp(key.avec[1], r)};
  ct.c = mul(exp_g(Scalar::from_u64(plaintext) + key.u), exp(key.wa, r));
  return ct;
}

Encryptor::Encryptor(DriverKey key)
    : key_(std::move(key)), gu_(exp_g(key_.u)), avec1_(key_.avec[1], 7), wa_(key_.wa, 7) {
  if (!(key_.avec[0] == GroupElement::generator())) avec0_.emplace(key_.avec[0], 7);
}

CellCiphertext Encryptor::encrypt(std::uint64_t plaintext, Rng& rng, CellId cell_id) const {
  const Scalar r = Scalar::random(rng);
  CellCiphertext ct;
  ct.driver_id = key_.driver_id;
  ct.cell_id = cell_id;
  ct.t = {avec0_ ? avec0_->exp(r) : exp_g(r), avec1_.exp(r)};
  GroupElement masked = gu_;
  if (plaintext == 1) masked = mul(masked, GroupElement::generator());
  else if (plaintext != 0) masked = mul(masked, exp_g(Scalar::from_u64(plaintext)));
  ct.c = mul(masked, wa_.exp(r));
  return ct;
}

GroupElement aggregate_element(const FunctionalKey& dk, std::span<const CellCiphertext> cts) {
  const std::size_t n = dk.n_drivers();
  std::vector<const CellCiphertext*> slot(n, nullptr);
  for (const auto& ct : cts) {
    if (ct.driver_id == 0 || ct.driver_id > n) {
      throw UnknownDriver("ciphertext from unknown driver " + std::to_string(ct.driver_id));
    }
    auto& s = slot[ct.driver_id - 1];
    if (s != nullptr) throw DuplicateDriver("two ciphertexts from driver " + std::to_string(ct.driver_id));
    s = &ct;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (slot[i] == nullptr) throw MissingDriver("no ciphertext from driver " + std::to_string(i + 1));
  }

  std::vector<GroupElement> bases;
  std::vector<Scalar> exps;
  bases.reserve(3 * n + 1);
  exps.reserve(3 * n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const CellCiphertext& ct = *slot[i];
    bases.push_back(ct.c);
    exps.push_back(dk.y[i]);
    bases.push_back(ct.t[0]);
    exps.push_back(-dk.d[i][0]);
    bases.push_back(ct.t[1]);
    exps.push_back(-dk.d[i][1]);
  }
  bases.push_back(GroupElement::generator());
  exps.push_back(-dk.z);
  return group::multi_exp(bases, exps);
}

std::uint64_t aggregate_decrypt(const FunctionalKey& dk, std::span<const CellCiphertext> cts,
                                const group::DlogTable& table) {
  return table.recover(aggregate_element(dk, cts));
}

std::uint64_t aggregate_decrypt(const FunctionalKey& dk, std::span<const CellCiphertext> cts,
                                std::uint64_t bound) {
  return aggregate_decrypt(dk, cts, group::DlogTable(bound));
}

// ---- wire formats ----

namespace {

void put(wire::Writer& w, const GroupElement& e) { w.bytes(e.serialize()); }
void put(wire::Writer& w, const Scalar& s) { w.bytes(s.bytes()); }
GroupElement get_element(wire::Reader& r) { return GroupElement::deserialize(r.bytes(32)); }
Scalar get_scalar(wire::Reader& r) { return Scalar::from_bytes(r.bytes(32)); }

}  // namespace

void write_ciphertext(wire::Writer& out, const CellCiphertext& ct) {
  out.u8(wire::kVersion);
  out.u32(ct.driver_id);
  out.u16(ct.cell_id);
  put(out, ct.t[0]);
  put(out, ct.t[1]);
  put(out, ct.c);
}

CellCiphertext read_ciphertext(wire::Reader& in) {
  in.expect_version("ciphertext");
  CellCiphertext ct;
  ct.driver_id = in.u32();
  ct.cell_id = in.u16();
  ct.t[0] = get_element(in);
  ct.t[1] = get_element(in);
  ct.c = get_element(in);
  return ct;
}

std::vector<std::uint8_t> serialize(const CellCiphertext& ct) {
  wire::Writer w;
  write_ciphertext(w, ct);
  return std::move(w).take();
}

CellCiphertext deserialize_ciphertext(std::span<const std::uint8_t> bytes) {
  wire::Reader r(bytes);
  auto ct = read_ciphertext(r);
  r.expect_end("ciphertext");
  return ct;
}

std::vector<std::uint8_t> serialize(const DriverKey& key) {
  wire::Writer w;
  w.u8(wire::kVersion);
  w.u32(key.driver_id);
  put(w, key.avec[0]);
  put(w, key.avec[1]);
  put(w, key.wa);
  put(w, key.u);
  return std::move(w).take();
}

DriverKey deserialize_driver_key(std::span<const std::uint8_t> bytes) {
  wire::Reader r(bytes);
  r.expect_version("driver key");
  DriverKey key;
  key.params = group::group_gen(128);
  key.driver_id = r.u32();
  key.avec[0] = get_element(r);
  key.avec[1] = get_element(r);
  key.wa = get_element(r);
  key.u = get_scalar(r);
  r.expect_end("driver key");
  return key;
}

std::vector<std::uint8_t> serialize(const FunctionalKey& dk) {
  wire::Writer w;
  w.u8(wire::kVersion);
  w.u32(static_cast<std::uint32_t>(dk.n_drivers()));
  for (std::size_t i = 0; i < dk.n_drivers(); ++i) {
    put(w, dk.y[i]);
    put(w, dk.d[i][0]);
    put(w, dk.d[i][1]);
  }
  put(w, dk.z);
  return std::move(w).take();
}

FunctionalKey deserialize_functional_key(std::span<const std::uint8_t> bytes) {
  wire::Reader r(bytes);
  r.expect_version("functional key");
  const std::uint32_t n = r.u32();
  if (r.remaining() != std::size_t{n} * 96 + 32) throw DecodeError("functional key: length mismatch");
  FunctionalKey dk;
  dk.y.reserve(n);
  dk.d.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    dk.y.push_back(get_scalar(r));
    const Scalar d0 = get_scalar(r);
    dk.d.push_back({d0, get_scalar(r)});
  }
  dk.z = get_scalar(r);
  r.expect_end("functional key");
  return dk;
}

std::vector<std::uint8_t> serialize(const MasterPublic& mpk) {
  wire::Writer w;
  w.u8(wire::kVersion);
  w.u32(static_cast<std::uint32_t>(mpk.n_drivers()));
  for (const auto& rec : mpk.records) {
    put(w, rec.avec[0]);
    put(w, rec.avec[1]);
    put(w, rec.wa);
  }
  return std::move(w).take();
}

MasterPublic deserialize_master_public(std::span<const std::uint8_t> bytes) {
  wire::Reader r(bytes);
  r.expect_version("master public key");
  const std::uint32_t n = r.u32();
  if (r.remaining() != std::size_t{n} * 96) throw DecodeError("master public key: length mismatch");
  MasterPublic mpk;
  mpk.params = group::group_gen(128);
  mpk.records.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    MasterPublic::Record rec;
    rec.avec[0] = get_element(r);
    rec.avec[1] = get_element(r);
    rec.wa = get_element(r);
    mpk.records.push_back(rec);
  }
  r.expect_end("master public key");
  return mpk;
}

}  // namespace privaflow::ipfe
