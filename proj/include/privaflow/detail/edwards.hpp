#pragma once

// Twisted Edwards curve -x^2 + y^2 = 1 + d x^2 y^2 (edwards25519) in extended
// coordinates, with the ristretto255 quotient encoding on top.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "privaflow/detail/field25519.hpp"

namespace privaflow::detail {

// (Y+X, Y-X, Z, 2dT)
struct CachedPoint {
  Fe y_plus_x, y_minus_x, z, t2d;
};

// (y+x, y-x, 2dxy) with Z = 1
struct AffineNielsPoint {
  Fe y_plus_x, y_minus_x, xy2d;
};

struct CompletedPoint {
  Fe x, y, z, t;
};

struct ProjectivePoint {
  Fe x, y, z;
};

struct EdwardsPoint {
  Fe x = Fe::zero(), y = Fe::one(), z = Fe::one(), t = Fe::zero();

  static EdwardsPoint identity() { return {}; }

  static EdwardsPoint from_completed(const CompletedPoint& c) {
    return {c.x * c.t, c.y * c.z, c.z * c.t, c.x * c.y};
  }

  CachedPoint to_cached() const {
    return {y + x, y - x, z, t * fe_constants::kEdwardsD2};
  }

  ProjectivePoint to_projective() const { return {x, y, z}; }

  EdwardsPoint negate() const { return {-x, y, z, -t}; }

  CompletedPoint add(const CachedPoint& q) const {
    const Fe pp = (y + x) * q.y_plus_x;
    const Fe mm = (y - x) * q.y_minus_x;
    const Fe tt2d = t * q.t2d;
    const Fe zz = z * q.z;
    const Fe zz2 = zz + zz;
    return {pp - mm, pp + mm, zz2 + tt2d, zz2 - tt2d};
  }

  CompletedPoint sub(const CachedPoint& q) const {
    const Fe pm = (y + x) * q.y_minus_x;
    const Fe mp = (y - x) * q.y_plus_x;
    const Fe tt2d = t * q.t2d;
    const Fe zz = z * q.z;
    const Fe zz2 = zz + zz;
    return {pm - mp, pm + mp, zz2 - tt2d, zz2 + tt2d};
  }

  CompletedPoint add(const AffineNielsPoint& q) const {
    const Fe pp = (y + x) * q.y_plus_x;
    const Fe mm = (y - x) * q.y_minus_x;
    const Fe txy2d = t * q.xy2d;
    const Fe z2 = z + z;
    return {pp - mm, pp + mm, z2 + txy2d, z2 - txy2d};
  }

  CompletedPoint sub(const AffineNielsPoint& q) const {
    const Fe pm = (y + x) * q.y_minus_x;
    const Fe mp = (y - x) * q.y_plus_x;
    const Fe txy2d = t * q.xy2d;
    const Fe z2 = z + z;
    return {pm - mp, pm + mp, z2 - txy2d, z2 + txy2d};
  }

  EdwardsPoint operator+(const EdwardsPoint& q) const { return from_completed(add(q.to_cached())); }
  EdwardsPoint operator-(const EdwardsPoint& q) const { return from_completed(sub(q.to_cached())); }
  EdwardsPoint& operator+=(const CachedPoint& q) { return *this = from_completed(add(q)); }
  EdwardsPoint& operator-=(const CachedPoint& q) { return *this = from_completed(sub(q)); }
  EdwardsPoint& operator+=(const AffineNielsPoint& q) { return *this = from_completed(add(q)); }
  EdwardsPoint& operator-=(const AffineNielsPoint& q) { return *this = from_completed(sub(q)); }

  EdwardsPoint dbl() const;
  // 2^k * P
  EdwardsPoint mul_by_pow2(unsigned k) const;

  // Equality in the ristretto quotient group.
  bool ristretto_eq(const EdwardsPoint& o) const {
    return (x * o.y == y * o.x) || (y * o.y == x * o.x);
  }

  std::array<std::uint8_t, 32> ristretto_encode() const;
  static std::optional<EdwardsPoint> ristretto_decode(std::span<const std::uint8_t, 32> bytes);
};

inline CompletedPoint projective_double(const ProjectivePoint& p) {
  const Fe xx = p.x.square();
  const Fe yy = p.y.square();
  const Fe zz = p.z.square();
  const Fe zz2 = zz + zz;
  const Fe x_plus_y_sq = (p.x + p.y).square();
  const Fe yy_plus_xx = yy + xx;
  const Fe yy_minus_xx = yy - xx;
  return {x_plus_y_sq - yy_plus_xx, yy_plus_xx, yy_minus_xx, zz2 - yy_minus_xx};
}

inline ProjectivePoint completed_to_projective(const CompletedPoint& c) {
  return {c.x * c.t, c.y * c.z, c.z * c.t};
}

inline EdwardsPoint EdwardsPoint::dbl() const {
  return from_completed(projective_double(to_projective()));
}

inline EdwardsPoint EdwardsPoint::mul_by_pow2(unsigned k) const {
  if (k == 0) return *this;
  ProjectivePoint p = to_projective();
  for (unsigned i = 0; i + 1 < k; ++i) p = completed_to_projective(projective_double(p));
  return from_completed(projective_double(p));
}

// Converts extended points to affine Niels form with one shared inversion.
std::vector<AffineNielsPoint> batch_to_affine_niels(std::span<const EdwardsPoint> points);

// Signed radix-2^w digits of a little-endian 256-bit scalar below 2^255.
// Digits lie in [-2^(w-1), 2^(w-1)); the result has ceil(256/w)+1 entries.
std::vector<std::int32_t> signed_radix_digits(std::span<const std::uint8_t, 32> scalar, unsigned w);

EdwardsPoint variable_base_mul(const EdwardsPoint& p, std::span<const std::uint8_t, 32> scalar);

// Precomputed multiples (k+1) * 2^(w*i) * B in affine form. Evaluating a
// scalar costs one mixed addition per nonzero digit and no doublings.
class FixedBaseComb {
 public:
  explicit FixedBaseComb(const EdwardsPoint& base, unsigned window_bits = 8);

  EdwardsPoint mul(std::span<const std::uint8_t, 32> scalar) const;
  unsigned window_bits() const { return w_; }
  std::size_t memory_bytes() const { return table_.size() * sizeof(AffineNielsPoint); }

 private:
  unsigned w_;
  std::size_t windows_;
  std::size_t per_window_;
  std::vector<AffineNielsPoint> table_;
};

// Sum of scalar_i * P_i via Pippenger's bucket method.
EdwardsPoint multiscalar_mul(std::span<const std::array<std::uint8_t, 32>> scalars,
                             std::span<const EdwardsPoint> points);

}  // namespace privaflow::detail
