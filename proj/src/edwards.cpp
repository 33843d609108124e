#include "privaflow/detail/edwards.hpp"

#include <algorithm>
#include <cstring>

namespace privaflow::detail {

std::array<std::uint8_t, 32> EdwardsPoint::ristretto_encode() const {
  using namespace fe_constants;
  const Fe u1 = (z + y) * (z - y);
  const Fe u2 = x * y;
  const Fe invsqrt = sqrt_ratio_m1(Fe::one(), u1 * u2.square()).root;
  const Fe i1 = invsqrt * u1;
  const Fe i2 = invsqrt * u2;
  const Fe z_inv = i1 * (i2 * t);
  Fe den_inv = i2;

  Fe xx = x;
  Fe yy = y;
  if ((t * z_inv).is_negative()) {
    xx = y * kSqrtM1;
    yy = x * kSqrtM1;
    den_inv = i1 * kInvSqrtAMinusD;
  }
  if ((xx * z_inv).is_negative()) yy = -yy;
  return fe_abs(den_inv * (z - yy)).to_bytes();
}

std::optional<EdwardsPoint> EdwardsPoint::ristretto_decode(std::span<const std::uint8_t, 32> bytes) {
  const Fe s = Fe::from_bytes(bytes);
  const auto canonical = s.to_bytes();
  if (!std::equal(canonical.begin(), canonical.end(), bytes.begin())) return std::nullopt;
  if (s.is_negative()) return std::nullopt;

  const Fe ss = s.square();
  const Fe u1 = Fe::one() - ss;
  const Fe u2 = Fe::one() + ss;
  const Fe u2_sqr = u2.square();
  const Fe v = -(fe_constants::kEdwardsD * u1.square()) - u2_sqr;
  const auto [ok, invsqrt] = sqrt_ratio_m1(Fe::one(), v * u2_sqr);
  const Fe den_x = invsqrt * u2;
  const Fe den_y = invsqrt * den_x * v;
  const Fe px = fe_abs((s + s) * den_x);
  const Fe py = u1 * den_y;
  const Fe pt = px * py;
  if (!ok || pt.is_negative() || py.is_zero()) return std::nullopt;
  return EdwardsPoint{px, py, Fe::one(), pt};
}

std::vector<AffineNielsPoint> batch_to_affine_niels(std::span<const EdwardsPoint> points) {
  const std::size_t n = points.size();
  std::vector<AffineNielsPoint> out(n);
  if (n == 0) return out;
  std::vector<Fe> prefix(n);
  Fe acc = Fe::one();
  for (std::size_t i = 0; i < n; ++i) {
    prefix[i] = acc;
    acc = acc * points[i].z;
  }
  Fe inv = acc.invert();
  for (std::size_t i = n; i-- > 0;) {
    const Fe zinv = inv * prefix[i];
    inv = inv * points[i].z;
    const Fe px = points[i].x * zinv;
    const Fe py = points[i].y * zinv;
    out[i] = {py + px, py - px, px * py * fe_constants::kEdwardsD2};
  }
  return out;
}

std::vector<std::int32_t> signed_radix_digits(std::span<const std::uint8_t, 32> scalar, unsigned w) {
  std::array<std::uint64_t, 5> words{};
  std::memcpy(words.data(), scalar.data(), 32);
  const std::size_t count = (256 + w - 1) / w + 1;
  const std::uint64_t mask = (std::uint64_t{1} << w) - 1;
  const std::int64_t radix = std::int64_t{1} << w;
  const std::int64_t half = radix / 2;

  std::vector<std::int32_t> digits(count);
  std::int64_t carry = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t bit = i * w;
    std::uint64_t raw = 0;
    if (bit < 256) {
      const std::size_t word = bit / 64;
      const std::size_t off = bit % 64;
      raw = words[word] >> off;
      if (off + w > 64) raw |= words[word + 1] << (64 - off);
      raw &= mask;
    }
    const std::int64_t v = static_cast<std::int64_t>(raw) + carry;
    if (v >= half) {
      digits[i] = static_cast<std::int32_t>(v - radix);
      carry = 1;
    } else {
      digits[i] = static_cast<std::int32_t>(v);
      carry = 0;
    }
  }
  return digits;
}

EdwardsPoint variable_base_mul(const EdwardsPoint& p, std::span<const std::uint8_t, 32> scalar) {
  std::array<CachedPoint, 8> table;
  EdwardsPoint multiple = p;
  table[0] = p.to_cached();
  for (std::size_t k = 1; k < table.size(); ++k) {
    multiple += table[0];
    table[k] = multiple.to_cached();
  }
  const auto digits = signed_radix_digits(scalar, 4);
  EdwardsPoint q = EdwardsPoint::identity();
  for (std::size_t i = digits.size(); i-- > 0;) {
    q = q.mul_by_pow2(4);
    const int d = digits[i];
    if (d > 0) q += table[d - 1];
    else if (d < 0) q -= table[-d - 1];
  }
  return q;
}

FixedBaseComb::FixedBaseComb(const EdwardsPoint& base, unsigned window_bits)
    : w_(window_bits),
      windows_((256 + window_bits - 1) / window_bits + 1),
      per_window_(std::size_t{1} << (window_bits - 1)) {
  std::vector<EdwardsPoint> multiples;
  multiples.reserve(windows_ * per_window_);
  EdwardsPoint window_base = base;
  for (std::size_t i = 0; i < windows_; ++i) {
    const CachedPoint step = window_base.to_cached();
    EdwardsPoint m = window_base;
    for (std::size_t k = 0; k < per_window_; ++k) {
      multiples.push_back(m);
      m += step;
    }
    window_base = window_base.mul_by_pow2(w_);
  }
  table_ = batch_to_affine_niels(multiples);
}

EdwardsPoint FixedBaseComb::mul(std::span<const std::uint8_t, 32> scalar) const {
  const auto digits = signed_radix_digits(scalar, w_);
  EdwardsPoint acc = EdwardsPoint::identity();
  for (std::size_t i = 0; i < windows_; ++i) {
    const int d = digits[i];
    if (d > 0) acc += table_[i * per_window_ + static_cast<std::size_t>(d - 1)];
    else if (d < 0) acc -= table_[i * per_window_ + static_cast<std::size_t>(-d - 1)];
  }
  return acc;
}

namespace {

unsigned pippenger_window(std::size_t n) {
  if (n < 32) return 4;
  if (n < 128) return 5;
  if (n < 500) return 6;
  if (n < 800) return 7;
  return 8;
}

}  // namespace

EdwardsPoint multiscalar_mul(std::span<const std::array<std::uint8_t, 32>> scalars,
                             std::span<const EdwardsPoint> points) {
  const std::size_t n = std::min(scalars.size(), points.size());
  if (n == 0) return EdwardsPoint::identity();
  if (n <= 2) {
    EdwardsPoint acc = EdwardsPoint::identity();
    for (std::size_t i = 0; i < n; ++i) acc = acc + variable_base_mul(points[i], scalars[i]);
    return acc;
  }

  const unsigned c = pippenger_window(n);
  const std::size_t windows = (256 + c - 1) / c + 1;
  std::vector<std::int16_t> digits(n * windows);
  std::size_t top = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto d = signed_radix_digits(scalars[i], c);
    for (std::size_t w = 0; w < windows; ++w) {
      digits[i * windows + w] = static_cast<std::int16_t>(d[w]);
      if (d[w] != 0) top = std::max(top, w + 1);
    }
  }
  if (top == 0) return EdwardsPoint::identity();

  const auto affine = batch_to_affine_niels(points.first(n));
  std::vector<EdwardsPoint> buckets(std::size_t{1} << (c - 1));
  EdwardsPoint result = EdwardsPoint::identity();
  for (std::size_t w = top; w-- > 0;) {
    std::fill(buckets.begin(), buckets.end(), EdwardsPoint::identity());
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
      const int d = digits[i * windows + w];
      if (d > 0) {
        buckets[static_cast<std::size_t>(d - 1)] += affine[i];
        any = true;
      } else if (d < 0) {
        buckets[static_cast<std::size_t>(-d - 1)] -= affine[i];
        any = true;
      }
    }
    if (w + 1 != top) result = result.mul_by_pow2(c);
    if (!any) continue;
    EdwardsPoint running = buckets.back();
    EdwardsPoint window_sum = running;
    for (std::size_t j = buckets.size() - 1; j-- > 0;) {
      running += buckets[j].to_cached();
      window_sum += running.to_cached();
    }
    result += window_sum.to_cached();
  }
  return result;
}

}  // namespace privaflow::detail
