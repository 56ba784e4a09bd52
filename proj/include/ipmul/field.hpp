#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ipmul {

using u64 = std::uint64_t;
using u128 = unsigned __int128;
using i64 = std::int64_t;

struct ZeroInverse : std::domain_error {
    ZeroInverse() : std::domain_error("inverse of zero") {}
};
struct NoSuchRoot : std::domain_error {
    explicit NoSuchRoot(const std::string& what) : std::domain_error(what) {}
};
struct NotPrime : std::invalid_argument {
    explicit NotPrime(u64 n)
        : std::invalid_argument("modulus " + std::to_string(n) + " is not an odd prime") {}
};
struct ShapeMismatch : std::invalid_argument {
    explicit ShapeMismatch(const std::string& msg) : std::invalid_argument(msg) {}
};
struct OverlappingViews : std::invalid_argument {
    explicit OverlappingViews(const std::string& msg) : std::invalid_argument(msg) {}
};
struct UnsupportedCharacteristic : std::invalid_argument {
    explicit UnsupportedCharacteristic(const std::string& msg) : std::invalid_argument(msg) {}
};

// (a, b) with a^2 + b^2 = -1 (mod p) and a != 0.  b may be 0 when -1 is a
// square, in which case the associated 2x2 matrix degenerates to a*I.
struct SkewUnitaryPair {
    u64 a;
    u64 b;
};

// Running tally of field operations, used by the CLI bench and the cost
// tests.  `mul` counts bilinear element products, `sca` scalings by
// constants, `add` additions/subtractions.
struct FieldOpTally {
    u64 mul = 0;
    u64 add = 0;
    u64 sca = 0;
};

FieldOpTally& field_tally();
void reset_field_tally();

// Arithmetic of Z/pZ for an odd prime p that fits a machine word
// (p < 2^63 so that signed reduction stays simple).  All residues are
// canonical, in [0, p).  The context is immutable and freely shareable.
class FieldCtx {
  public:
    explicit FieldCtx(u64 p);

    u64 p() const { return p_; }
    unsigned two_adicity() const { return two_adicity_; }

    u64 add(u64 x, u64 y) const {
        ++field_tally().add;
        u64 s = x + y;
        return s >= p_ ? s - p_ : s;
    }
    u64 sub(u64 x, u64 y) const {
        ++field_tally().add;
        return x >= y ? x - y : x + p_ - y;
    }
    u64 neg(u64 x) const { return x == 0 ? 0 : p_ - x; }
    u64 mul(u64 x, u64 y) const {
        ++field_tally().mul;
        return static_cast<u64>(u128(x) * y % p_);
    }
    // Same arithmetic as mul(), but tallied as a scaling by a constant.
    u64 scale(u64 x, u64 c) const {
        ++field_tally().sca;
        return static_cast<u64>(u128(x) * c % p_);
    }
    // Untallied product, for table setup and oracles.
    u64 mul_raw(u64 x, u64 y) const { return static_cast<u64>(u128(x) * y % p_); }

    u64 pow(u64 base, u64 exp) const;
    u64 inv(u64 x) const;

    // Canonical residue of a (possibly negative) signed value.
    u64 from_signed(i64 v) const {
        i64 r = v % static_cast<i64>(p_);
        if (r < 0) r += static_cast<i64>(p_);
        return static_cast<u64>(r);
    }

    bool is_one_or_minus_one(u64 x) const { return x == 1 || x == p_ - 1; }

    // Principal N-th root of unity for a power of two N: w^N = 1 and
    // w^(N/2) = -1.  Deterministic (smallest witness in ascending order).
    // Throws NoSuchRoot when N does not divide p-1.
    u64 principal_root(u64 n) const;

    // Smallest a >= 1 such that -1 - a^2 is a square; b is the smaller of
    // the two square roots.  Such a pair always exists for odd prime p.
    SkewUnitaryPair skew_unitary_pair() const;

  private:
    u64 p_;
    unsigned two_adicity_;
};

bool is_prime_u64(u64 n);

// Tonelli-Shanks; returns the smaller square root of a (mod p), or p if a
// is not a quadratic residue.
u64 sqrt_mod(u64 a, const FieldCtx& f);

}  // namespace ipmul
