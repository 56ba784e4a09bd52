#include "ipmul/polymul.hpp"

#include <map>
#include <vector>

#include "ipmul/bilinear.hpp"
#include "ipmul/slp.hpp"

namespace ipmul::poly {

namespace {

thread_local KernelStats* g_stats = nullptr;
thread_local std::size_t g_depth = 0;

struct DepthGuard {
    DepthGuard() { ++g_depth; }
    ~DepthGuard() { --g_depth; }
};

// dst[i] (+|-)= src[i] over min(len) coefficients.
void half_add(const FieldCtx& f, std::span<u64> dst, std::span<const u64> src, int sign) {
    std::size_t w = std::min(dst.size(), src.size());
    for (std::size_t i = 0; i < w; ++i)
        dst[i] = sign > 0 ? f.add(dst[i], src[i]) : f.sub(dst[i], src[i]);
}

}  // namespace

void pm_acc_classic(const FieldCtx& f, std::span<const u64> a, std::span<const u64> b,
                    std::span<u64> c, int sign) {
    if (a.empty() || b.empty()) throw ShapeMismatch("empty polynomial");
    if (c.size() < a.size() + b.size() - 1) throw ShapeMismatch("result too short");
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) {
            u64 p = f.mul(a[i], b[j]);
            c[i + j] = sign > 0 ? f.add(c[i + j], p) : f.sub(c[i + j], p);
        }
}

void pm_acc_karatsuba(const FieldCtx& f, std::span<u64> a, std::span<u64> b, std::span<u64> c,
                      int sign, std::size_t threshold) {
    if (a.empty() || b.empty()) throw ShapeMismatch("empty polynomial");
    if (c.size() != a.size() + b.size() - 1) throw ShapeMismatch("result length");
    if (a.size() < b.size()) std::swap(a, b);
    const std::size_t m = a.size() - 1, n = b.size() - 1;  // degrees, m >= n

    if (b.size() <= threshold || threshold == 0 || b.size() == 1) {
        pm_acc_classic(f, a, b, c, sign);
        return;
    }

    if (m > n) {
        // A = A0 + X^(n+1) A1 with deg A0 = n; one balanced product and one
        // smaller unbalanced one, overlapping on c[n+1 .. 2n].
        std::span<u64> a0 = a.subspan(0, n + 1);
        std::span<u64> a1 = a.subspan(n + 1);
        DepthGuard depth;
        pm_acc_karatsuba(f, a0, b, c.subspan(0, 2 * n + 1), sign, threshold);
        if (m >= 2 * n)
            pm_acc_karatsuba(f, a1, b, c.subspan(n + 1, m), sign, threshold);
        else
            pm_acc_karatsuba(f, b, a1, c.subspan(n + 1, m), sign, threshold);
        return;
    }

    // Balanced split at delta: C = c00 + c01 X^d + c10 X^2d + c11 X^3d.
    // The two top blocks are clipped to the 2n+1 coefficients that exist;
    // every pre/post pair below is clipped identically, so the unwinding
    // still cancels coefficientwise.
    const std::size_t delta = (2 * n + 1 + 3) / 4;  // ceil((2n+1)/4)
    // Split invariants: the top block fits below the split (d-1 >= 2n-3d)
    // and the high half is no longer than the low one (d > n-d).
    if (!(4 * delta >= 2 * n + 1 && 2 * delta > n))
        throw std::logic_error("karatsuba split invariant violated");
    std::span<u64> a0 = a.subspan(0, delta), a1 = a.subspan(delta);
    std::span<u64> b0 = b.subspan(0, delta), b1 = b.subspan(delta);
    std::span<u64> c00 = c.subspan(0, delta);
    std::span<u64> c01 = c.subspan(delta, delta);
    std::span<u64> c10 = c.subspan(2 * delta, std::min(delta, c.size() - 2 * delta));
    std::span<u64> c11 = c.size() > 3 * delta ? c.subspan(3 * delta) : std::span<u64>{};
    const std::size_t tail = c11.size();  // 2n - 3*delta + 1 when positive

    u64 adds = 0;
    auto add_clipped = [&](std::span<u64> dst, std::span<const u64> src, int s) {
        if (dst.empty() || src.empty()) return;
        half_add(f, dst, src, s);
        ++adds;
    };

    add_clipped(c01, c00, -1);
    add_clipped(c10, c01, -1);
    {
        DepthGuard depth;
        pm_acc_karatsuba(f, a0, b0, c.subspan(0, 2 * delta - 1), sign, threshold);  // m0
    }
    add_clipped(c11, c10.subspan(0, tail), -1);
    {
        DepthGuard depth;
        pm_acc_karatsuba(f, a1, b1, c.subspan(delta, a1.size() + b1.size() - 1), sign,
                         threshold);  // m1
    }
    add_clipped(c11, c10.subspan(0, tail), +1);
    add_clipped(c10, c01, +1);
    add_clipped(c01, c00, +1);
    add_clipped(a0, a1, -1);
    add_clipped(b0, b1, -1);
    {
        DepthGuard depth;
        pm_acc_karatsuba(f, a0, b0, c.subspan(delta, 2 * delta - 1), -sign, threshold);  // m2
    }
    add_clipped(b0, b1, +1);
    add_clipped(a0, a1, +1);

    if (g_stats) g_stats->note(g_depth, adds, 3);
}

KernelStats karatsuba_level_counts(const FieldCtx& f, std::size_t size, std::size_t threshold) {
    std::vector<u64> a(size), b(size), c(2 * size - 1, 0);
    for (std::size_t i = 0; i < size; ++i) {
        a[i] = (i * 17 + 1) % f.p();
        b[i] = (i * 23 + 2) % f.p();
    }
    KernelStats stats;
    KernelStats* prev = g_stats;
    g_stats = &stats;
    pm_acc_karatsuba(f, a, b, c, 1, threshold);
    g_stats = prev;
    return stats;
}

namespace {

const slp::Program& toom3_program(const FieldCtx& f) {
    thread_local std::map<u64, slp::Program> cache;
    auto it = cache.find(f.p());
    if (it == cache.end()) {
        gen::BilinearRep2 rep2 = gen::to_rep2(gen::toom3_rep(f));
        it = cache.emplace(f.p(), gen::generate_inplace_2d(f, rep2)).first;
    }
    return it->second;
}

}  // namespace

void pm_acc_toom3(const FieldCtx& f, std::span<u64> a, std::span<u64> b, std::span<u64> c,
                  int sign, std::size_t threshold) {
    if (f.p() == 3) throw UnsupportedCharacteristic("Toom-3 needs 2, 3 and 6 invertible");
    if (a.empty() || b.empty()) throw ShapeMismatch("empty polynomial");
    if (a.size() != b.size() || a.size() % 3 != 0)
        throw ShapeMismatch("Toom-3 wants equal lengths divisible by 3");
    if (c.size() != a.size() + b.size() - 1) throw ShapeMismatch("result length");

    const slp::Program& prog = toom3_program(f);
    const std::uint32_t d = static_cast<std::uint32_t>(a.size() / 3);

    slp::BlockBank ba{a.data(), 3, {}, {}};
    slp::BlockBank bb{b.data(), 3, {}, {}};
    slp::BlockBank bc{c.data(), 6, {}, {}};
    for (std::uint32_t i = 0; i < 3; ++i) {
        ba.off[i] = bb.off[i] = i * d;
        ba.wid[i] = bb.wid[i] = d;
    }
    for (std::uint32_t i = 0; i < 6; ++i) {
        bc.off[i] = i * d;
        bc.wid[i] = d;
    }
    bc.wid[5] = d - 1;  // C has 6d-1 coefficients; the top block is short

    slp::execute_blocks(prog, f, ba, bb, bc, sign,
                        [&](std::span<u64> lhs, std::span<u64> rhs, std::span<u64> dst, int s) {
                            pm_acc_karatsuba(f, lhs, rhs,
                                             dst.subspan(0, lhs.size() + rhs.size() - 1), s,
                                             threshold);
                        });
}

}  // namespace ipmul::poly
