#pragma once

// Multi-client inner-product functional encryption over a prime-order group.
//
// Each driver i holds pk_i = ([a_i], [W_i a_i], u_i) with a_i = (1, a_i)^T and
// encrypts one value per cell as
//
//   t = [a_i r],   c = [l + u_i + W_i a_i r]      (fresh r per ciphertext)
//
// The holder of dk = ({d_i = y_i W_i}, z = sum y_i u_i) combines exactly one
// ciphertext per driver into
//
//   prod_i [y_i c_i] / [d_i . t_i]  /  [z]  =  [sum_i y_i l_i]
//
// and recovers the (small) exponent with a discrete-log lookup.

#include <array>
#include <optional>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "privaflow/group.hpp"
#include "privaflow/rng.hpp"
#include "privaflow/wire.hpp"

namespace privaflow::ipfe {

using group::GroupElement;
using group::GroupParams;
using group::Scalar;

// 1-based driver index.
using DriverId = std::uint32_t;
using CellId = std::uint16_t;

// Cell id carried by ciphertexts that are not bound to a cell (zero pool).
inline constexpr CellId kUnassignedCell = 0xFFFF;

struct MasterSecret {
  struct Record {
    Scalar a;
    std::array<Scalar, 2> w;  // W_i, a 1x2 row
    Scalar u;

    std::array<Scalar, 2> avec() const { return {Scalar::one(), a}; }
    // W_i a_i = w[0] + w[1] a
    Scalar w_dot_a() const { return w[0] + w[1] * a; }
  };
  std::vector<Record> records;

  std::size_t n_drivers() const { return records.size(); }
  const Record& at(DriverId id) const;
};

struct MasterPublic {
  struct Record {
    std::array<GroupElement, 2> avec;  // [a_i]; avec[0] == g
    GroupElement wa;                   // [W_i a_i]
  };
  GroupParams params;
  std::vector<Record> records;

  std::size_t n_drivers() const { return records.size(); }
};

struct DriverKey {
  DriverId driver_id = 0;
  GroupParams params;
  std::array<GroupElement, 2> avec;
  GroupElement wa;
  Scalar u;
};

struct FunctionalKey {
  std::vector<Scalar> y;
  std::vector<std::array<Scalar, 2>> d;  // d_i = y_i W_i
  Scalar z;

  std::size_t n_drivers() const { return y.size(); }
};

struct CellCiphertext {
  DriverId driver_id = 0;
  CellId cell_id = kUnassignedCell;
  std::array<GroupElement, 2> t;
  GroupElement c;
};

std::pair<MasterPublic, MasterSecret> setup(const GroupParams& params, std::size_t n_drivers, Rng& rng);

// Throws UnknownDriver unless 1 <= id <= n_drivers.
DriverKey derive_driver_key(const MasterPublic& mpk, const MasterSecret& msk, DriverId id);

// Throws LengthMismatch unless y has one entry per driver.
FunctionalKey derive_functional_key(const MasterSecret& msk, std::span<const Scalar> y);

std::vector<Scalar> ones(std::size_t n);

// Reference encryption straight from the key (variable-base exponentiations).
CellCiphertext encrypt(const DriverKey& key, std::uint64_t plaintext, Rng& rng,
                       CellId cell_id = kUnassignedCell);

// Driver-side encryptor with precomputed tables for the key's fixed bases.
// Produces exactly what encrypt() produces for the same rng state.
class Encryptor {
 public:
  explicit Encryptor(DriverKey key);

  CellCiphertext encrypt(std::uint64_t plaintext, Rng& rng, CellId cell_id = kUnassignedCell) const;
  const DriverKey& key() const { return key_; }
  DriverId driver_id() const { return key_.driver_id; }

 private:
  DriverKey key_;
  GroupElement gu_;  // g^u
  std::optional<group::FixedBase> avec0_;  // unset when avec[0] == g
  group::FixedBase avec1_;
  group::FixedBase wa_;
};

// prod_i [y_i c_i] / [d_i . t_i] / [z], before the discrete log. Requires
// exactly one ciphertext per driver 1..n (any order); throws MissingDriver,
// DuplicateDriver or UnknownDriver otherwise.
GroupElement aggregate_element(const FunctionalKey& dk, std::span<const CellCiphertext> cts);

// sum_i y_i l_i, or NotInRange if it exceeds the table bound.
std::uint64_t aggregate_decrypt(const FunctionalKey& dk, std::span<const CellCiphertext> cts,
                                const group::DlogTable& table);
std::uint64_t aggregate_decrypt(const FunctionalKey& dk, std::span<const CellCiphertext> cts,
                                std::uint64_t bound);

// ---- wire formats ----
//
// DriverKey:      [u8 version][u32 driver_id][2x32 avec][32 Wa][32 u]
// CellCiphertext: [u8 version][u32 driver_id][u16 cell_id][3x32 t0 t1 c]
// FunctionalKey:  [u8 version][u32 n][n x (32 y, 32 d0, 32 d1)][32 z]
// MasterPublic:   [u8 version][u32 n][n x (32 avec0, 32 avec1, 32 Wa)]

inline constexpr std::size_t kDriverKeyWireLen = 1 + 4 + 2 * 32 + 32 + 32;
inline constexpr std::size_t kCiphertextElements = 3;
inline constexpr std::size_t kCellCiphertextWireLen = 1 + 4 + 2 + kCiphertextElements * 32;

std::vector<std::uint8_t> serialize(const DriverKey& key);
std::vector<std::uint8_t> serialize(const CellCiphertext& ct);
std::vector<std::uint8_t> serialize(const FunctionalKey& dk);
std::vector<std::uint8_t> serialize(const MasterPublic& mpk);
void write_ciphertext(wire::Writer& out, const CellCiphertext& ct);

DriverKey deserialize_driver_key(std::span<const std::uint8_t> bytes);
CellCiphertext deserialize_ciphertext(std::span<const std::uint8_t> bytes);
FunctionalKey deserialize_functional_key(std::span<const std::uint8_t> bytes);
MasterPublic deserialize_master_public(std::span<const std::uint8_t> bytes);

CellCiphertext read_ciphertext(wire::Reader& in);

}  // namespace privaflow::ipfe
