#pragma once

// Arithmetic in GF(2^255 - 19) with five 51-bit limbs.
//
// Every operation leaves limbs below 2^52, which keeps products inside the
// 128-bit accumulators of mul/square. Nothing here is constant time.

#include <array>
#include <cstdint>
#include <cstring>
#include <span>

namespace privaflow::detail {

class Fe {
 public:
  using u64 = std::uint64_t;
  using u128 = unsigned __int128;
  static constexpr u64 kMask = (u64{1} << 51) - 1;

  constexpr Fe() = default;
  constexpr explicit Fe(std::array<u64, 5> limbs) : l_(limbs) {}

  static constexpr Fe zero() { return Fe{{0, 0, 0, 0, 0}}; }
  static constexpr Fe one() { return Fe{{1, 0, 0, 0, 0}}; }

  // Loads 255 bits; the top bit of byte 31 is ignored.
  static Fe from_bytes(std::span<const std::uint8_t, 32> b) {
    auto load8 = [&](int i) {
      u64 v;
      std::memcpy(&v, b.data() + i, 8);
      return v;
    };
    Fe r;
    r.l_[0] = load8(0) & kMask;
    r.l_[1] = (load8(6) >> 3) & kMask;
    r.l_[2] = (load8(12) >> 6) & kMask;
    r.l_[3] = (load8(19) >> 1) & kMask;
    r.l_[4] = (load8(24) >> 12) & kMask;
    return r;
  }

  // Canonical little-endian encoding of the fully reduced value.
  std::array<std::uint8_t, 32> to_bytes() const {
    Fe t = weak_reduced();
    u64 q = (t.l_[0] + 19) >> 51;
    q = (t.l_[1] + q) >> 51;
    q = (t.l_[2] + q) >> 51;
    q = (t.l_[3] + q) >> 51;
    q = (t.l_[4] + q) >> 51;
    t.l_[0] += 19 * q;
    t.l_[1] += t.l_[0] >> 51;
    t.l_[0] &= kMask;
    t.l_[2] += t.l_[1] >> 51;
    t.l_[1] &= kMask;
    t.l_[3] += t.l_[2] >> 51;
    t.l_[2] &= kMask;
    t.l_[4] += t.l_[3] >> 51;
    t.l_[3] &= kMask;
    t.l_[4] &= kMask;

    std::array<std::uint8_t, 32> out{};
    const u64 w0 = t.l_[0] | (t.l_[1] << 51);
    const u64 w1 = (t.l_[1] >> 13) | (t.l_[2] << 38);
    const u64 w2 = (t.l_[2] >> 26) | (t.l_[3] << 25);
    const u64 w3 = (t.l_[3] >> 39) | (t.l_[4] << 12);
    std::memcpy(out.data(), &w0, 8);
    std::memcpy(out.data() + 8, &w1, 8);
    std::memcpy(out.data() + 16, &w2, 8);
    std::memcpy(out.data() + 24, &w3, 8);
    return out;
  }

  bool is_zero() const {
    const auto b = to_bytes();
    std::uint8_t acc = 0;
    for (auto x : b) acc |= x;
    return acc == 0;
  }
  bool is_negative() const { return (to_bytes()[0] & 1) != 0; }
  friend bool operator==(const Fe& a, const Fe& b) { return a.to_bytes() == b.to_bytes(); }

  friend Fe operator+(const Fe& a, const Fe& b) {
    Fe r;
    for (int i = 0; i < 5; ++i) r.l_[i] = a.l_[i] + b.l_[i];
    return r.weak_reduced();
  }

  friend Fe operator-(const Fe& a, const Fe& b) {
    // a + 16p - b keeps every limb non-negative.
    constexpr u64 k16p0 = 36028797018963664ULL;
    constexpr u64 k16pi = 36028797018963952ULL;
    Fe r;
    r.l_[0] = (a.l_[0] + k16p0) - b.l_[0];
    for (int i = 1; i < 5; ++i) r.l_[i] = (a.l_[i] + k16pi) - b.l_[i];
    return r.weak_reduced();
  }

  Fe operator-() const { return zero() - *this; }

  friend Fe operator*(const Fe& a, const Fe& b) {
    const u64* x = a.l_.data();
    const u64* y = b.l_.data();
    const u64 y1_19 = 19 * y[1], y2_19 = 19 * y[2], y3_19 = 19 * y[3], y4_19 = 19 * y[4];
    const u128 c0 = m(x[0], y[0]) + m(x[4], y1_19) + m(x[3], y2_19) + m(x[2], y3_19) + m(x[1], y4_19);
    u128 c1 = m(x[1], y[0]) + m(x[0], y[1]) + m(x[4], y2_19) + m(x[3], y3_19) + m(x[2], y4_19);
    u128 c2 = m(x[2], y[0]) + m(x[1], y[1]) + m(x[0], y[2]) + m(x[4], y3_19) + m(x[3], y4_19);
    u128 c3 = m(x[3], y[0]) + m(x[2], y[1]) + m(x[1], y[2]) + m(x[0], y[3]) + m(x[4], y4_19);
    u128 c4 = m(x[4], y[0]) + m(x[3], y[1]) + m(x[2], y[2]) + m(x[1], y[3]) + m(x[0], y[4]);
    return carry(c0, c1, c2, c3, c4);
  }

  Fe square() const {
    const u64* x = l_.data();
    const u64 x3_19 = 19 * x[3], x4_19 = 19 * x[4];
    const u64 x0_2 = 2 * x[0], x1_2 = 2 * x[1];
    const u128 c0 = m(x[0], x[0]) + m(2 * x[1], x4_19) + m(2 * x[2], x3_19);
    const u128 c1 = m(x[3], x3_19) + m(x0_2, x[1]) + m(2 * x[2], x4_19);
    const u128 c2 = m(x[1], x[1]) + m(x0_2, x[2]) + m(2 * x[3], x4_19);
    const u128 c3 = m(x[4], x4_19) + m(x0_2, x[3]) + m(x1_2, x[2]);
    const u128 c4 = m(x[2], x[2]) + m(x0_2, x[4]) + m(x1_2, x[3]);
    return carry(c0, c1, c2, c3, c4);
  }

  Fe pow2k(unsigned k) const {
    Fe r = *this;
    for (unsigned i = 0; i < k; ++i) r = r.square();
    return r;
  }

  // Returns (z^(2^250 - 1), z^11), shared by invert and pow22523.
  std::pair<Fe, Fe> pow22501() const {
    const Fe& z = *this;
    const Fe z2 = z.square();
    const Fe z9 = z2.pow2k(2) * z;
    const Fe z11 = z9 * z2;
    const Fe z_5_0 = z11.square() * z9;
    const Fe z_10_0 = z_5_0.pow2k(5) * z_5_0;
    const Fe z_20_0 = z_10_0.pow2k(10) * z_10_0;
    const Fe z_40_0 = z_20_0.pow2k(20) * z_20_0;
    const Fe z_50_0 = z_40_0.pow2k(10) * z_10_0;
    const Fe z_100_0 = z_50_0.pow2k(50) * z_50_0;
    const Fe z_200_0 = z_100_0.pow2k(100) * z_100_0;
    const Fe z_250_0 = z_200_0.pow2k(50) * z_50_0;
    return {z_250_0, z11};
  }

  // z^(p-2); zero maps to zero.
  Fe invert() const {
    auto [t, z11] = pow22501();
    return t.pow2k(5) * z11;
  }

  // z^((p-5)/8)
  Fe pow22523() const {
    auto [t, unused] = pow22501();
    (void)unused;
    return t.pow2k(2) * (*this);
  }

  const std::array<u64, 5>& limbs() const { return l_; }

 private:
  static u128 m(u64 a, u64 b) { return static_cast<u128>(a) * b; }

  static Fe carry(u128 c0, u128 c1, u128 c2, u128 c3, u128 c4) {
    c1 += static_cast<u64>(c0 >> 51);
    c2 += static_cast<u64>(c1 >> 51);
    c3 += static_cast<u64>(c2 >> 51);
    c4 += static_cast<u64>(c3 >> 51);
    Fe r;
    r.l_[0] = static_cast<u64>(c0) & kMask;
    r.l_[1] = static_cast<u64>(c1) & kMask;
    r.l_[2] = static_cast<u64>(c2) & kMask;
    r.l_[3] = static_cast<u64>(c3) & kMask;
    r.l_[4] = static_cast<u64>(c4) & kMask;
    r.l_[0] += static_cast<u64>(c4 >> 51) * 19;
    r.l_[1] += r.l_[0] >> 51;
    r.l_[0] &= kMask;
    return r;
  }

  Fe weak_reduced() const {
    Fe r = *this;
    const u64 c0 = r.l_[0] >> 51, c1 = r.l_[1] >> 51, c2 = r.l_[2] >> 51, c3 = r.l_[3] >> 51,
              c4 = r.l_[4] >> 51;
    r.l_[0] = (r.l_[0] & kMask) + c4 * 19;
    r.l_[1] = (r.l_[1] & kMask) + c0;
    r.l_[2] = (r.l_[2] & kMask) + c1;
    r.l_[3] = (r.l_[3] & kMask) + c2;
    r.l_[4] = (r.l_[4] & kMask) + c3;
    return r;
  }

  std::array<u64, 5> l_{};
};

namespace fe_constants {
inline constexpr Fe kEdwardsD{{0x34dca135978a3, 0x1a8283b156ebd, 0x5e7a26001c029, 0x739c663a03cbb,
                               0x52036cee2b6ff}};
inline constexpr Fe kEdwardsD2{{0x69b9426b2f159, 0x35050762add7a, 0x3cf44c0038052,
                                0x6738cc7407977, 0x2406d9dc56dff}};
inline constexpr Fe kSqrtM1{{0x61b274a0ea0b0, 0xd5a5fc8f189d, 0x7ef5e9cbd0c60, 0x78595a6804c9e,
                             0x2b8324804fc1d}};
inline constexpr Fe kInvSqrtAMinusD{{0xfdaa805d40ea, 0x2eb482e57d339, 0x7610274bc58,
                                     0x6510b613dc8ff, 0x786c8905cfaff}};
}  // namespace fe_constants

inline Fe fe_abs(const Fe& x) { return x.is_negative() ? -x : x; }

struct SqrtRatio {
  bool was_square;
  Fe root;
};

// sqrt(u/v) or sqrt(i*u/v), with a non-negative root.
inline SqrtRatio sqrt_ratio_m1(const Fe& u, const Fe& v) {
  using fe_constants::kSqrtM1;
  const Fe v3 = v.square() * v;
  const Fe v7 = v3.square() * v;
  Fe r = (u * v3) * (u * v7).pow22523();
  const Fe check = v * r.square();
  const Fe neg_u = -u;
  const bool correct = check == u;
  const bool flipped = check == neg_u;
  const bool flipped_i = check == neg_u * kSqrtM1;
  if (flipped || flipped_i) r = r * kSqrtM1;
  return {correct || flipped, fe_abs(r)};
}

}  // namespace privaflow::detail
