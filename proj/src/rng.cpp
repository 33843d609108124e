#include "privaflow/rng.hpp"

#include <sodium.h>

#include <cstring>
#include <stdexcept>

namespace privaflow {

void ensure_sodium() {
  static const bool ok = sodium_init() >= 0;
  if (!ok) throw std::runtime_error("libsodium initialization failed");
}

namespace {

std::array<std::uint8_t, 32> derive_key(std::span<const std::uint8_t> parent, std::uint64_t a,
                                        std::uint64_t b) {
  static constexpr char kTag[] = "privaflow/rng/v1";
  crypto_hash_sha256_state st;
  crypto_hash_sha256_init(&st);
  crypto_hash_sha256_update(&st, reinterpret_cast<const unsigned char*>(kTag), sizeof(kTag) - 1);
  crypto_hash_sha256_update(&st, parent.data(), parent.size());
  std::array<std::uint8_t, 16> ab{};
  for (int i = 0; i < 8; ++i) {
    ab[i] = static_cast<std::uint8_t>(a >> (8 * i));
    ab[8 + i] = static_cast<std::uint8_t>(b >> (8 * i));
  }
  crypto_hash_sha256_update(&st, ab.data(), ab.size());
  std::array<std::uint8_t, 32> key{};
  crypto_hash_sha256_final(&st, key.data());
  return key;
}

}  // namespace

Rng Rng::seeded(std::uint64_t seed, std::uint64_t stream) {
  ensure_sodium();
  Rng r;
  r.key_ = derive_key({}, seed, stream);
  return r;
}

Rng Rng::os() {
  ensure_sodium();
  Rng r;
  r.deterministic_ = false;
  return r;
}

Rng Rng::fork(std::uint64_t stream) const {
  if (!deterministic_) return os();
  Rng r;
  r.key_ = derive_key(key_, 0xf0f0f0f0ULL, stream);
  return r;
}

void Rng::refill() {
  if (deterministic_) {
    static constexpr std::array<std::uint8_t, 8> kNonce{};
    static constexpr std::array<std::uint8_t, 256> kZeros{};
    crypto_stream_chacha20_xor_ic(buf_.data(), kZeros.data(), buf_.size(), kNonce.data(), block_,
                                  key_.data());
    block_ += buf_.size() / 64;
  } else {
    randombytes_buf(buf_.data(), buf_.size());
  }
  pos_ = 0;
}

void Rng::fill(std::span<std::uint8_t> out) {
  std::size_t done = 0;
  while (done < out.size()) {
    if (pos_ == buf_.size()) refill();
    const std::size_t n = std::min(out.size() - done, buf_.size() - pos_);
    std::memcpy(out.data() + done, buf_.data() + pos_, n);
    pos_ += n;
    done += n;
  }
}

std::uint64_t Rng::next_u64() {
  std::array<std::uint8_t, 8> b;
  fill(b);
  std::uint64_t v;
  std::memcpy(&v, b.data(), 8);
  return v;
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t n) {
  // rejection sampling on the largest multiple of n
  const std::uint64_t limit = max() - max() % n;
  for (;;) {
    const std::uint64_t v = next_u64();
    if (v < limit) return v % n;
  }
}

}  // namespace privaflow
