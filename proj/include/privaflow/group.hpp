#pragma once

// Prime-order group used by the encryption scheme: ristretto255, a
// prime-order quotient of edwards25519 with canonical 32-byte encodings.
//
// The scheme is written multiplicatively ([x] = g^x), so the free functions
// follow that vocabulary: mul / div combine elements, exp raises to a Scalar.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "privaflow/detail/edwards.hpp"
#include "privaflow/rng.hpp"

namespace privaflow::group {

inline constexpr std::size_t kElementLen = 32;
inline constexpr std::size_t kScalarLen = 32;

using Bytes32 = std::array<std::uint8_t, 32>;

struct GroupParams {
  std::string group_id;
  unsigned security_bits = 0;
  Bytes32 order_le{};      // group order p, little endian
  Bytes32 generator{};     // canonical encoding of g
  std::size_t element_len = kElementLen;
  std::size_t scalar_len = kScalarLen;

  unsigned order_bits() const;
  std::string order_decimal() const;
  friend bool operator==(const GroupParams&, const GroupParams&) = default;
};

// Fixed named group for a security level. Only 128 is supported.
GroupParams group_gen(unsigned security_level);

// Element of Z_p, always reduced.
class Scalar {
 public:
  Scalar() = default;

  static Scalar zero() { return {}; }
  static Scalar one() { return from_u64(1); }
  static Scalar from_u64(std::uint64_t v);
  static Scalar random(Rng& rng);
  // Reduces 64 uniform bytes mod p.
  static Scalar from_wide(std::span<const std::uint8_t, 64> wide);
  // Rejects encodings >= p with DecodeError.
  static Scalar from_bytes(std::span<const std::uint8_t> bytes);

  const Bytes32& bytes() const { return bytes_; }
  bool is_zero() const;
  // Value if it fits in 64 bits.
  std::optional<std::uint64_t> to_u64() const;

  friend Scalar operator+(const Scalar& a, const Scalar& b);
  friend Scalar operator-(const Scalar& a, const Scalar& b);
  friend Scalar operator*(const Scalar& a, const Scalar& b);
  Scalar operator-() const;
  Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
  friend bool operator==(const Scalar&, const Scalar&) = default;

 private:
  Bytes32 bytes_{};
};

class GroupElement {
 public:
  // identity
  GroupElement() = default;
  explicit GroupElement(const detail::EdwardsPoint& p) : p_(p) {}

  static GroupElement identity() { return {}; }
  static GroupElement generator();

  Bytes32 serialize() const { return p_.ristretto_encode(); }
  // Throws DecodeError on non-canonical or off-group encodings.
  static GroupElement deserialize(std::span<const std::uint8_t> bytes);

  bool is_identity() const { return p_.ristretto_eq(detail::EdwardsPoint::identity()); }
  const detail::EdwardsPoint& point() const { return p_; }

  friend bool operator==(const GroupElement& a, const GroupElement& b) { return a.p_.ristretto_eq(b.p_); }

 private:
  detail::EdwardsPoint p_{};
};

GroupElement mul(const GroupElement& a, const GroupElement& b);
GroupElement div(const GroupElement& a, const GroupElement& b);
GroupElement inverse(const GroupElement& a);
GroupElement exp(const GroupElement& base, const Scalar& s);
// g^s through a shared precomputed table.
GroupElement exp_g(const Scalar& s);

// prod_i bases[i]^exponents[i]; throws LengthMismatch on size mismatch.
GroupElement multi_exp(std::span<const GroupElement> bases, std::span<const Scalar> exponents);

// Table of base^(k * 2^(w*i)) for repeated exponentiation of one base.
class FixedBase {
 public:
  explicit FixedBase(const GroupElement& base, unsigned window_bits = 8);
  GroupElement exp(const Scalar& s) const { return GroupElement(comb_->mul(s.bytes())); }
  std::size_t memory_bytes() const { return comb_->memory_bytes(); }

 private:
  std::shared_ptr<const detail::FixedBaseComb> comb_;
};

// Lookup table g^0..g^bound keyed by element encoding. Build once, then
// read-only and safe to share across threads.
class DlogTable {
 public:
  explicit DlogTable(std::uint64_t bound);

  std::uint64_t bound() const { return bound_; }
  std::optional<std::uint64_t> find(const GroupElement& target) const;
  // Throws NotInRange when target is not g^m for some m <= bound.
  std::uint64_t recover(const GroupElement& target) const;

 private:
  struct Hash {
    std::size_t operator()(const Bytes32& b) const noexcept;
  };
  std::uint64_t bound_;
  std::unordered_map<Bytes32, std::uint64_t, Hash> table_;
};

// m in [0, bound] with g^m = target, via a freshly built lookup table.
std::uint64_t dlog_recover(const GroupElement& target, std::uint64_t bound);
// Same contract via baby-step giant-step with ceil(sqrt(bound+1)) baby steps.
std::uint64_t dlog_recover_bsgs(const GroupElement& target, std::uint64_t bound);

}  // namespace privaflow::group
