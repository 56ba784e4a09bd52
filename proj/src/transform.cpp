#include "ipmul/transform.hpp"

#include <bit>

namespace ipmul::fft {

TransformStats& transform_stats() {
    thread_local TransformStats stats;
    return stats;
}

std::size_t bitrev(std::size_t i, unsigned bits) {
    std::size_t r = 0;
    for (unsigned j = 0; j < bits; ++j) r |= ((i >> j) & 1) << (bits - 1 - j);
    return r;
}

namespace {

unsigned ceil_log2(std::size_t n) {
    unsigned l = 0;
    while ((std::size_t(1) << l) < n) ++l;
    return l;
}

// Gentleman-Sande stages over a length-2^l range: natural input order,
// bit-reversed output order.  root must have order exactly 2^l.
void dif_core(const FieldCtx& f, u64* x, unsigned l, u64 root) {
    std::size_t n = std::size_t(1) << l;
    u64 stage_root = root;
    for (std::size_t half = n >> 1; half >= 1; half >>= 1) {
        for (std::size_t start = 0; start < n; start += 2 * half) {
            u64 w = 1;
            for (std::size_t j = 0; j < half; ++j) {
                u64 u = x[start + j];
                u64 v = x[start + j + half];
                x[start + j] = f.add(u, v);
                x[start + j + half] = f.scale(f.sub(u, v), w);
                w = f.mul_raw(w, stage_root);
            }
        }
        stage_root = f.mul_raw(stage_root, stage_root);
    }
}

// Cooley-Tukey stages on the inverse root plus the 1/2^l scaling: exact
// inverse of dif_core.
void dit_core(const FieldCtx& f, u64* x, unsigned l, u64 root) {
    std::size_t n = std::size_t(1) << l;
    u64 root_inv = f.inv(root);
    for (std::size_t half = 1; half < n; half <<= 1) {
        u64 stage_root = f.pow(root_inv, n / (2 * half));
        for (std::size_t start = 0; start < n; start += 2 * half) {
            u64 w = 1;
            for (std::size_t j = 0; j < half; ++j) {
                u64 u = x[start + j];
                u64 v = f.scale(x[start + j + half], w);
                x[start + j] = f.add(u, v);
                x[start + j + half] = f.sub(u, v);
                w = f.mul_raw(w, stage_root);
            }
        }
    }
    u64 ninv = f.inv(n % f.p());
    for (std::size_t i = 0; i < n; ++i) x[i] = f.scale(x[i], ninv);
}

u64 subrange_root(const FieldCtx& f, const TwiddleCtx& ctx, unsigned l) {
    if (l > ctx.p_exp) throw NoSuchRoot("transform size exceeds the root order");
    return f.pow(ctx.omega, u64(1) << (ctx.p_exp - l));
}

void note_call(unsigned l) {
    TransformStats& s = transform_stats();
    if (s.calls == 0) s.first_log2 = l;
    s.last_log2 = l;
    ++s.calls;
    if (l < 32) ++s.by_log2[l];
}

}  // namespace

void brdft_overplace(std::span<u64> f, const TwiddleCtx& ctx, unsigned l) {
    if (f.size() != (std::size_t(1) << l)) throw ShapeMismatch("brdft length");
    note_call(l);
    if (l == 0) return;
    dif_core(ctx.field, f.data(), l, subrange_root(ctx.field, ctx, l));
}

void brdft_inverse_overplace(std::span<u64> f, const TwiddleCtx& ctx, unsigned l) {
    if (f.size() != (std::size_t(1) << l)) throw ShapeMismatch("brdft length");
    note_call(l);
    if (l == 0) return;
    dit_core(ctx.field, f.data(), l, subrange_root(ctx.field, ctx, l));
}

void parttft(std::span<u64> f, std::size_t k, unsigned l, const TwiddleCtx& ctx) {
    const FieldCtx& fd = ctx.field;
    const std::size_t w = std::size_t(1) << l;
    if (w > f.size() || (k + 1) * w > (std::size_t(1) << ctx.p_exp))
        throw ShapeMismatch("parttft window");
    const u64 tw = fd.pow(ctx.omega, bitrev(k * w, ctx.p_exp));
    u64 t = 1;
    for (std::size_t i = 0; i < f.size(); ++i) {
        f[i] = fd.scale(f[i], t);
        t = fd.mul_raw(t, tw);
    }
    // Fold mod X^w - 1, high to low so longer tails cascade down.
    for (std::size_t i = f.size(); i-- > w;) f[i - w] = fd.add(f[i - w], f[i]);
    dif_core(fd, f.data(), l, subrange_root(fd, ctx, l));
}

void parttft_inv(std::span<u64> f, std::size_t k, unsigned l, const TwiddleCtx& ctx) {
    const FieldCtx& fd = ctx.field;
    const std::size_t w = std::size_t(1) << l;
    if (w > f.size() || (k + 1) * w > (std::size_t(1) << ctx.p_exp))
        throw ShapeMismatch("parttft window");
    dit_core(fd, f.data(), l, subrange_root(fd, ctx, l));
    for (std::size_t i = w; i < f.size(); ++i) f[i - w] = fd.sub(f[i - w], f[i]);
    const u64 tw = fd.inv(fd.pow(ctx.omega, bitrev(k * w, ctx.p_exp)));
    u64 t = 1;
    for (std::size_t i = 0; i < f.size(); ++i) {
        f[i] = fd.scale(f[i], t);
        t = fd.mul_raw(t, tw);
    }
}

namespace {

// Value of a virtual input of the truncated network.  Virtual cells start
// as zeros at the top level; below a split they are either sums of two
// parent inputs (fold) or recomputed butterfly high legs reading live
// cells of the parent frame (derived).
struct Ghost {
    enum Kind { zero, fold, derived } kind = zero;
    const Ghost* parent = nullptr;
    const u64* cells = nullptr;  // parent frame base (derived)
    std::size_t half = 0;        // parent frame half-size
    u64 root = 0;                // parent frame root (derived)

    u64 eval(const FieldCtx& f, std::size_t idx) const {
        switch (kind) {
            case zero:
                return 0;
            case fold:
                return f.add(parent->eval(f, idx), parent->eval(f, idx + half));
            default: {
                u64 v = f.sub(cells[idx], parent->eval(f, idx + half));
                return f.mul_raw(v, f.pow(root, idx));
            }
        }
    }
};

// Forward truncated network: cells holds inputs 0..r-1 of a virtual
// size-2^l transform whose inputs r..2^l-1 are given by `g`; on return the
// cells hold outputs 0..r-1.
void tft_fwd(const FieldCtx& f, u64* cells, std::size_t r, unsigned l, u64 root, const Ghost& g) {
    const std::size_t n = std::size_t(1) << l;
    if (r == n) {
        if (l > 0) dif_core(f, cells, l, root);
        return;
    }
    const std::size_t h = n >> 1;
    const u64 root2 = f.mul_raw(root, root);
    if (r <= h) {
        for (std::size_t j = 0; j < r; ++j) cells[j] = f.add(cells[j], g.eval(f, j + h));
        Ghost g2{Ghost::fold, &g, nullptr, h, 0};
        tft_fwd(f, cells, r, l - 1, root2, g2);
        return;
    }
    // Full butterflies while both legs live.
    u64 w = 1;
    for (std::size_t j = 0; j < r - h; ++j) {
        u64 u = cells[j];
        u64 v = cells[j + h];
        cells[j] = f.add(u, v);
        cells[j + h] = f.scale(f.sub(u, v), w);
        w = f.mul_raw(w, root);
    }
    // High sub-network first: its missing inputs read the still-unchanged
    // low cells of this frame.
    Ghost g2{Ghost::derived, &g, cells, h, root};
    tft_fwd(f, cells + h, r - h, l - 1, root2, g2);
    // Complete the low legs whose high partner is virtual, then the low
    // sub-network is a full transform.
    for (std::size_t j = r - h; j < h; ++j) cells[j] = f.add(cells[j], g.eval(f, j + h));
    if (l > 1) dif_core(f, cells, l - 1, root2);
}

void tft_inv(const FieldCtx& f, u64* cells, std::size_t r, unsigned l, u64 root, const Ghost& g) {
    const std::size_t n = std::size_t(1) << l;
    if (r == n) {
        if (l > 0) dit_core(f, cells, l, root);
        return;
    }
    const std::size_t h = n >> 1;
    const u64 root2 = f.mul_raw(root, root);
    if (r <= h) {
        Ghost g2{Ghost::fold, &g, nullptr, h, 0};
        tft_inv(f, cells, r, l - 1, root2, g2);
        for (std::size_t j = 0; j < r; ++j) cells[j] = f.sub(cells[j], g.eval(f, j + h));
        return;
    }
    if (l > 1) dit_core(f, cells, l - 1, root2);
    for (std::size_t j = r - h; j < h; ++j) cells[j] = f.sub(cells[j], g.eval(f, j + h));
    Ghost g2{Ghost::derived, &g, cells, h, root};
    tft_inv(f, cells + h, r - h, l - 1, root2, g2);
    const u64 inv2 = f.inv(2);
    const u64 root_inv = f.inv(root);
    u64 w = 1;
    for (std::size_t j = 0; j < r - h; ++j) {
        u64 x = cells[j];
        u64 y = f.scale(cells[j + h], w);
        cells[j] = f.scale(f.add(x, y), inv2);
        cells[j + h] = f.scale(f.sub(x, y), inv2);
        w = f.mul_raw(w, root_inv);
    }
}

}  // namespace

void brtft_overplace(std::span<u64> c, const TwiddleCtx& ctx) {
    if (c.empty()) throw ShapeMismatch("empty truncated transform");
    unsigned l = ceil_log2(c.size());
    note_call(l);
    Ghost zero;
    tft_fwd(ctx.field, c.data(), c.size(), l, subrange_root(ctx.field, ctx, l), zero);
}

void brtft_inverse_overplace(std::span<u64> c, const TwiddleCtx& ctx) {
    if (c.empty()) throw ShapeMismatch("empty truncated transform");
    unsigned l = ceil_log2(c.size());
    note_call(l);
    Ghost zero;
    tft_inv(ctx.field, c.data(), c.size(), l, subrange_root(ctx.field, ctx, l), zero);
}

void pm_acc_fft_pow2(const FieldCtx& f, std::span<u64> a, std::span<u64> b, std::span<u64> c) {
    const std::size_t n = a.size();
    if (n == 0 || b.size() != n || (n & (n - 1)) != 0) throw ShapeMismatch("lengths");
    if (c.size() != 2 * n) throw ShapeMismatch("result must have length 2n");
    const unsigned l = ceil_log2(n);
    TwiddleCtx ctx(f, l + 1);  // may throw NoSuchRoot
    TwiddleCtx half(f, l);     // same field, omega^2

    brdft_overplace(c, ctx, l + 1);
    brdft_overplace(a, half, l);
    brdft_overplace(b, half, l);
    for (std::size_t i = 0; i < n; ++i) c[i] = f.add(c[i], f.mul(a[i], b[i]));
    brdft_inverse_overplace(a, half, l);
    brdft_inverse_overplace(b, half, l);
    u64 t = 1;
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = f.scale(a[i], t);
        b[i] = f.scale(b[i], t);
        t = f.mul_raw(t, ctx.omega);
    }
    brdft_overplace(a, half, l);
    brdft_overplace(b, half, l);
    for (std::size_t i = 0; i < n; ++i) c[i + n] = f.add(c[i + n], f.mul(a[i], b[i]));
    brdft_inverse_overplace(a, half, l);
    brdft_inverse_overplace(b, half, l);
    t = 1;
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = f.scale(a[i], t);
        b[i] = f.scale(b[i], t);
        t = f.mul_raw(t, ctx.omega_inv);
    }
    brdft_inverse_overplace(c, ctx, l + 1);
}

void pm_acc_fft(const FieldCtx& f, std::span<u64> a, std::span<u64> b, std::span<u64> c) {
    if (a.empty() || b.empty()) throw ShapeMismatch("empty polynomial");
    if (c.size() != a.size() + b.size() - 1) throw ShapeMismatch("result length");
    if (a.size() > b.size()) std::swap(a, b);
    const std::size_t m = a.size(), n = b.size();
    const std::size_t len = m + n - 1;
    const unsigned p = ceil_log2(len);
    TwiddleCtx ctx(f, p);  // may throw NoSuchRoot

    brtft_overplace(c, ctx);
    std::size_t r = len;
    while (r > 0) {
        ++transform_stats().poly_iterations;
        unsigned l = std::bit_width(std::min(r, m)) - 1;
        unsigned t = std::bit_width(std::min(r, n)) - 1 - l;
        const std::size_t done = len - r;
        const std::size_t kb = done >> (l + t);
        parttft(b, kb, l + t, ctx);
        for (std::size_t s = 0; s < (std::size_t(1) << t); ++s) {
            parttft(a, (kb << t) + s, l, ctx);
            for (std::size_t i = 0; i < (std::size_t(1) << l); ++i) {
                std::size_t pos = done + (s << l) + i;
                c[pos] = f.add(c[pos], f.mul(a[i], b[i + (s << l)]));
            }
            parttft_inv(a, (kb << t) + s, l, ctx);
        }
        parttft_inv(b, kb, l + t, ctx);
        r -= std::size_t(1) << (l + t);
    }
    brtft_inverse_overplace(c, ctx);
}

}  // namespace ipmul::fft
