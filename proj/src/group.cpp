#include "privaflow/group.hpp"

#include <sodium.h>

#include <algorithm>
#include <cmath>
#include <cstring>

#include "privaflow/errors.hpp"

namespace privaflow::group {

namespace {

// l = 2^252 + 27742317777372353535851937790883648493
constexpr Bytes32 kOrder = {0xed, 0xd3, 0xf5, 0x5c, 0x1a, 0x63, 0x12, 0x58, 0xd6, 0x9c, 0xf7,
                            0xa2, 0xde, 0xf9, 0xde, 0x14, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00,
                            0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x10};

constexpr Bytes32 kGeneratorEncoding = {0xe2, 0xf2, 0xae, 0x0a, 0x6a, 0xbc, 0x4e, 0x71, 0xa8, 0x84, 0xa9,
                                        0x61, 0xc5, 0x00, 0x51, 0x5f, 0x58, 0xe3, 0x0b, 0x6a, 0xa5, 0x82,
                                        0xdd, 0x8d, 0xb6, 0xa6, 0x59, 0x45, 0xe0, 0x8d, 0x2d, 0x76};

// little-endian comparison a < b
bool less_le(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  for (std::size_t i = a.size(); i-- > 0;) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

const detail::FixedBaseComb& generator_comb() {
  static const detail::FixedBaseComb comb(GroupElement::generator().point(), 8);
  return comb;
}

}  // namespace

unsigned GroupParams::order_bits() const {
  for (std::size_t i = order_le.size(); i-- > 0;) {
    if (order_le[i] != 0) {
      unsigned bits = 0;
      for (std::uint8_t v = order_le[i]; v != 0; v >>= 1) ++bits;
      return static_cast<unsigned>(8 * i) + bits;
    }
  }
  return 0;
}

std::string GroupParams::order_decimal() const {
  std::vector<std::uint8_t> n(order_le.rbegin(), order_le.rend());  // big endian
  std::string digits;
  while (std::any_of(n.begin(), n.end(), [](std::uint8_t b) { return b != 0; })) {
    unsigned rem = 0;
    for (auto& b : n) {
      const unsigned cur = (rem << 8) | b;
      b = static_cast<std::uint8_t>(cur / 10);
      rem = cur % 10;
    }
    digits.push_back(static_cast<char>('0' + rem));
  }
  if (digits.empty()) digits = "0";
  std::reverse(digits.begin(), digits.end());
  return digits;
}

GroupParams group_gen(unsigned security_level) {
  if (security_level != 128) {
    throw UnsupportedSecurityLevel("unsupported security level " + std::to_string(security_level) +
                                   " (supported: 128)");
  }
  GroupParams p;
  p.group_id = "ristretto255";
  p.security_bits = 128;
  p.order_le = kOrder;
  p.generator = kGeneratorEncoding;
  return p;
}

// ---- Scalar ----

Scalar Scalar::from_u64(std::uint64_t v) {
  Scalar s;
  for (int i = 0; i < 8; ++i) s.bytes_[i] = static_cast<std::uint8_t>(v >> (8 * i));
  return s;  // 2^64 < p, already reduced
}

Scalar Scalar::random(Rng& rng) {
  std::array<std::uint8_t, 64> wide;
  rng.fill(wide);
  return from_wide(wide);
}

Scalar Scalar::from_wide(std::span<const std::uint8_t, 64> wide) {
  ensure_sodium();
  Scalar s;
  crypto_core_ristretto255_scalar_reduce(s.bytes_.data(), wide.data());
  return s;
}

Scalar Scalar::from_bytes(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kScalarLen) throw DecodeError("scalar must be 32 bytes");
  if (!less_le(bytes, kOrder)) throw DecodeError("scalar encoding is not reduced mod p");
  Scalar s;
  std::copy(bytes.begin(), bytes.end(), s.bytes_.begin());
  return s;
}

bool Scalar::is_zero() const {
  return std::all_of(bytes_.begin(), bytes_.end(), [](std::uint8_t b) { return b == 0; });
}

std::optional<std::uint64_t> Scalar::to_u64() const {
  if (!std::all_of(bytes_.begin() + 8, bytes_.end(), [](std::uint8_t b) { return b == 0; })) {
    return std::nullopt;
  }
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | bytes_[i];
  return v;
}

Scalar operator+(const Scalar& a, const Scalar& b) {
  Scalar r;
  crypto_core_ristretto255_scalar_add(r.bytes_.data(), a.bytes_.data(), b.bytes_.data());
  return r;
}

Scalar operator-(const Scalar& a, const Scalar& b) {
  Scalar r;
  crypto_core_ristretto255_scalar_sub(r.bytes_.data(), a.bytes_.data(), b.bytes_.data());
  return r;
}

Scalar operator*(const Scalar& a, const Scalar& b) {
  Scalar r;
  crypto_core_ristretto255_scalar_mul(r.bytes_.data(), a.bytes_.data(), b.bytes_.data());
  return r;
}

Scalar Scalar::operator-() const {
  Scalar r;
  crypto_core_ristretto255_scalar_negate(r.bytes_.data(), bytes_.data());
  return r;
}

// ---- GroupElement ----

GroupElement GroupElement::generator() {
  static const GroupElement g = deserialize(kGeneratorEncoding);
  return g;
}

GroupElement GroupElement::deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kElementLen) throw DecodeError("group element must be 32 bytes");
  auto p = detail::EdwardsPoint::ristretto_decode(bytes.first<32>());
  if (!p) throw DecodeError("invalid ristretto255 encoding");
  return GroupElement(*p);
}

GroupElement mul(const GroupElement& a, const GroupElement& b) { return GroupElement(a.point() + b.point()); }

GroupElement div(const GroupElement& a, const GroupElement& b) { return GroupElement(a.point() - b.point()); }

GroupElement inverse(const GroupElement& a) { return GroupElement(a.point().negate()); }

GroupElement exp(const GroupElement& base, const Scalar& s) {
  return GroupElement(detail::variable_base_mul(base.point(), s.bytes()));
}

GroupElement exp_g(const Scalar& s) { return GroupElement(generator_comb().mul(s.bytes())); }

GroupElement multi_exp(std::span<const GroupElement> bases, std::span<const Scalar> exponents) {
  if (bases.size() != exponents.size()) throw LengthMismatch("multi_exp: bases and exponents differ in length");
  std::vector<detail::EdwardsPoint> points;
  std::vector<Bytes32> scalars;
  points.reserve(bases.size());
  scalars.reserve(bases.size());
  detail::EdwardsPoint unit_sum = detail::EdwardsPoint::identity();
  const Scalar one = Scalar::one();
  for (std::size_t i = 0; i < bases.size(); ++i) {
    if (exponents[i].is_zero()) continue;
    if (exponents[i] == one) {
      unit_sum = unit_sum + bases[i].point();
      continue;
    }
    points.push_back(bases[i].point());
    scalars.push_back(exponents[i].bytes());
  }
  return GroupElement(unit_sum + detail::multiscalar_mul(scalars, points));
}

FixedBase::FixedBase(const GroupElement& base, unsigned window_bits)
    : comb_(std::make_shared<detail::FixedBaseComb>(base.point(), window_bits)) {}

// ---- discrete log ----

std::size_t DlogTable::Hash::operator()(const Bytes32& b) const noexcept {
  std::uint64_t h;
  std::memcpy(&h, b.data(), 8);
  return static_cast<std::size_t>(h);
}

DlogTable::DlogTable(std::uint64_t bound) : bound_(bound) {
  table_.reserve(bound + 1);
  const detail::CachedPoint step = GroupElement::generator().point().to_cached();
  detail::EdwardsPoint cur = detail::EdwardsPoint::identity();
  for (std::uint64_t m = 0; m <= bound; ++m) {
    table_.emplace(cur.ristretto_encode(), m);
    cur += step;
  }
}

std::optional<std::uint64_t> DlogTable::find(const GroupElement& target) const {
  const auto it = table_.find(target.serialize());
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t DlogTable::recover(const GroupElement& target) const {
  if (auto m = find(target)) return *m;
  throw NotInRange("discrete log not in [0, " + std::to_string(bound_) + "]");
}

std::uint64_t dlog_recover(const GroupElement& target, std::uint64_t bound) {
  return DlogTable(bound).recover(target);
}

std::uint64_t dlog_recover_bsgs(const GroupElement& target, std::uint64_t bound) {
  auto steps = static_cast<std::uint64_t>(std::ceil(std::sqrt(static_cast<double>(bound) + 1.0)));
  while (steps * steps < bound + 1) ++steps;

  const DlogTable baby(steps - 1);
  const GroupElement giant = inverse(exp_g(Scalar::from_u64(steps)));
  GroupElement cur = target;
  for (std::uint64_t i = 0; i < steps; ++i) {
    if (auto j = baby.find(cur)) {
      const std::uint64_t m = i * steps + *j;
      if (m <= bound) return m;
      break;
    }
    cur = mul(cur, giant);
  }
  throw NotInRange("discrete log not in [0, " + std::to_string(bound) + "]");
}

}  // namespace privaflow::group
