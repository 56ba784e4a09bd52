#include "ipmul/field.hpp"

namespace ipmul {

FieldOpTally& field_tally() {
    thread_local FieldOpTally tally;
    return tally;
}

void reset_field_tally() { field_tally() = FieldOpTally{}; }

namespace {

u64 pow_mod(u64 base, u64 exp, u64 mod) {
    u128 r = 1;
    u128 b = base % mod;
    while (exp) {
        if (exp & 1) r = r * b % mod;
        b = b * b % mod;
        exp >>= 1;
    }
    return static_cast<u64>(r);
}

}  // namespace

bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    for (u64 q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % q == 0) return n == q;
    }
    // Deterministic Miller-Rabin for 64-bit inputs with the first 12 primes.
    u64 d = n - 1;
    unsigned s = 0;
    while ((d & 1) == 0) d >>= 1, ++s;
    for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        u64 x = pow_mod(a % n, d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (unsigned i = 1; i < s; ++i) {
            x = static_cast<u64>(u128(x) * x % n);
            if (x == n - 1) {
                witness = false;
                break;
            }
        }
        if (witness) return false;
    }
    return true;
}

FieldCtx::FieldCtx(u64 p) : p_(p) {
    if (p < 3 || p >= (1ull << 63) || !is_prime_u64(p)) throw NotPrime(p);
    two_adicity_ = 0;
    for (u64 m = p - 1; (m & 1) == 0; m >>= 1) ++two_adicity_;
}

u64 FieldCtx::pow(u64 base, u64 exp) const { return pow_mod(base % p_, exp, p_); }

u64 FieldCtx::inv(u64 x) const {
    if (x % p_ == 0) throw ZeroInverse();
    return pow(x, p_ - 2);
}

u64 FieldCtx::principal_root(u64 n) const {
    if (n == 0 || (n & (n - 1)) != 0)
        throw NoSuchRoot("root order must be a power of two, got " + std::to_string(n));
    if ((p_ - 1) % n != 0)
        throw NoSuchRoot(std::to_string(n) + " does not divide p-1 for p=" + std::to_string(p_));
    if (n == 1) return 1;
    for (u64 c = 2; c < p_; ++c) {
        u64 w = pow(c, (p_ - 1) / n);
        // Order divides n (a power of two); it equals n iff w^(n/2) != 1,
        // and then w^(n/2) = -1, i.e. w is principal.
        if (pow(w, n / 2) == p_ - 1) return w;
    }
    throw NoSuchRoot("no principal root found");  // unreachable for prime p
}

u64 sqrt_mod(u64 a, const FieldCtx& f) {
    const u64 p = f.p();
    a %= p;
    if (a == 0) return 0;
    if (f.pow(a, (p - 1) / 2) != 1) return p;
    u64 r;
    if (p % 4 == 3) {
        r = f.pow(a, (p + 1) / 4);
    } else {
        // Tonelli-Shanks.
        u64 q = p - 1;
        unsigned s = 0;
        while ((q & 1) == 0) q >>= 1, ++s;
        u64 z = 2;
        while (f.pow(z, (p - 1) / 2) != p - 1) ++z;
        u64 m = s;
        u64 c = f.pow(z, q);
        u64 t = f.pow(a, q);
        r = f.pow(a, (q + 1) / 2);
        while (t != 1) {
            u64 t2 = t;
            u64 i = 0;
            while (t2 != 1) {
                t2 = f.mul_raw(t2, t2);
                ++i;
            }
            u64 b = c;
            for (u64 j = 0; j + i + 1 < m; ++j) b = f.mul_raw(b, b);
            m = i;
            c = f.mul_raw(b, b);
            t = f.mul_raw(t, c);
            r = f.mul_raw(r, b);
        }
    }
    return r <= p - r ? r : p - r;
}

SkewUnitaryPair FieldCtx::skew_unitary_pair() const {
    for (u64 a = 1; a < p_; ++a) {
        u64 target = sub(p_ - 1, mul_raw(a, a));  // -1 - a^2
        if (target == 0) return {a, 0};
        u64 b = sqrt_mod(target, *this);
        if (b != p_) return {a, b};
    }
    throw std::logic_error("no skew-unitary pair");  // unreachable for odd prime p
}

}  // namespace ipmul
