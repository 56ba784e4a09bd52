#pragma once

#include <cstddef>
#include <span>

#include "ipmul/field.hpp"

namespace ipmul::fft {

// Root context for transforms: omega has order exactly 2^p_exp.
struct TwiddleCtx {
    FieldCtx field;
    unsigned p_exp;
    u64 omega;
    u64 omega_inv;

    TwiddleCtx(const FieldCtx& f, unsigned p_exp_)
        : field(f),
          p_exp(p_exp_),
          omega(f.principal_root(u64(1) << p_exp_)),
          omega_inv(f.inv(omega)) {}
};

// Counters for forward/inverse transform invocations, kept per thread.
struct TransformStats {
    u64 calls = 0;
    u64 by_log2[32] = {};
    unsigned first_log2 = 0;  // size of the first and last invocation
    unsigned last_log2 = 0;
    u64 poly_iterations = 0;  // while-loop trips of the general product
    void reset() { *this = TransformStats{}; }
};
TransformStats& transform_stats();

std::size_t bitrev(std::size_t i, unsigned bits);

// In-array DIF transform: f of length 2^l is replaced by the evaluations
// (F(w^[0]), ..., F(w^[2^l-1])) in bit-reversed exponent order, no
// permutation pass, no scratch.  2^l must divide 2^p_exp.
void brdft_overplace(std::span<u64> f, const TwiddleCtx& ctx, unsigned l);

// Exact inverse (DIT on w^-1 plus the 1/2^l scaling).
void brdft_inverse_overplace(std::span<u64> f, const TwiddleCtx& ctx, unsigned l);

// Window transform: replaces the first 2^l entries of f by
// F(w^[k*2^l]), ..., F(w^[(k+1)*2^l - 1]) via twiddle, fold and a prefix
// transform; parttft_inv undoes it exactly.  Needs 2^l <= f.size() and
// (k+1)*2^l <= 2^p_exp.
void parttft(std::span<u64> f, std::size_t k, unsigned l, const TwiddleCtx& ctx);
void parttft_inv(std::span<u64> f, std::size_t k, unsigned l, const TwiddleCtx& ctx);

// Truncated transform of the array's own length r: c <- (C(w^[0]), ...,
// C(w^[r-1])), computed in the length-r array with O(1) extra state.
// Butterflies whose high leg falls beyond r are skipped; the values those
// legs would carry are recomputed on demand from the surviving cells.
// The inverse runs the reversed schedule and restores the coefficients.
void brtft_overplace(std::span<u64> c, const TwiddleCtx& ctx);
void brtft_inverse_overplace(std::span<u64> c, const TwiddleCtx& ctx);

// c <- C + A*B for a, b of power-of-two length n and c of length 2n,
// restoring a and b.  Exactly ten transforms: two of size 2n on c and
// eight of size n on a and b (forward/inverse, plain and twiddled).
void pm_acc_fft_pow2(const FieldCtx& f, std::span<u64> a, std::span<u64> b, std::span<u64> c);

// c <- C + A*B for arbitrary lengths m, n with c of length m+n-1,
// restoring a and b.  Walks the result in bit-reversed windows, pairing
// parttft windows of a and b against the truncated transform of c.
void pm_acc_fft(const FieldCtx& f, std::span<u64> a, std::span<u64> b, std::span<u64> c);

}  // namespace ipmul::fft
