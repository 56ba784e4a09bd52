#include "ipmul/matmul.hpp"

#include <vector>

namespace ipmul::mat {

namespace {

thread_local KernelStats* g_stats = nullptr;
thread_local std::size_t g_depth = 0;

struct DepthGuard {
    DepthGuard() { ++g_depth; }
    ~DepthGuard() { --g_depth; }
};

void check_disjoint(const MatView& x, const MatView& y, const char* what) {
    if (x.data == nullptr || y.data == nullptr) return;
    if (x.lo_addr() <= y.hi_addr() && y.lo_addr() <= x.hi_addr())
        throw OverlappingViews(what);
}

}  // namespace

void KernelStats::note(std::size_t depth, u64 adds, u64 products) {
    if (depth >= kMaxDepth) return;
    LevelTally& t = level[depth];
    t.block_adds += adds;
    t.product_calls += products;
    t.calls += 1;
    if (adds > t.max_adds_one_call) t.max_adds_one_call = adds;
    if (depth + 1 > depth_seen) depth_seen = depth + 1;
}

ScopedStats::ScopedStats(KernelStats& s) : prev_(g_stats) { g_stats = &s; }
ScopedStats::~ScopedStats() { g_stats = prev_; }

namespace {

// dst += sign * src over whole blocks.
void block_acc(const FieldCtx& f, MatView dst, MatView src, int sign) {
    for (std::size_t i = 0; i < dst.rows; ++i)
        for (std::size_t j = 0; j < dst.cols; ++j)
            dst.at(i, j) = sign > 0 ? f.add(dst.at(i, j), src.at(i, j))
                                    : f.sub(dst.at(i, j), src.at(i, j));
}

}  // namespace

void mm_acc_classic(const FieldCtx& f, MatView a, MatView b, MatView c, int sign) {
    if (a.cols != b.rows || c.rows != a.rows || c.cols != b.cols)
        throw ShapeMismatch("mm_acc_classic dimensions");
    check_disjoint(c, a, "C overlaps A");
    check_disjoint(c, b, "C overlaps B");
    for (std::size_t i = 0; i < c.rows; ++i)
        for (std::size_t j = 0; j < c.cols; ++j) {
            u64 acc = 0;
            for (std::size_t k = 0; k < a.cols; ++k)
                acc = f.add(acc, f.mul(a.at(i, k), b.at(k, j)));
            c.at(i, j) = sign > 0 ? f.add(c.at(i, j), acc) : f.sub(c.at(i, j), acc);
        }
}

void mm_acc_strassen(const FieldCtx& f, MatView a, MatView b, MatView c, int sign,
                     std::size_t threshold) {
    if (a.rows != a.cols || b.rows != b.cols || c.rows != c.cols || a.rows != b.rows ||
        a.rows != c.rows)
        throw ShapeMismatch("mm_acc_strassen needs equal square operands");
    const std::size_t n = a.rows;
    if (n <= threshold || n % 2 != 0 || threshold == 0) {
        if (g_stats) g_stats->note(g_depth, 0, 0);
        mm_acc_classic(f, a, b, c, sign);
        return;
    }
    check_disjoint(a, b, "A overlaps B");
    check_disjoint(c, a, "C overlaps A");
    check_disjoint(c, b, "C overlaps B");

    MatView a11 = a.quad(0, 0), a12 = a.quad(0, 1), a21 = a.quad(1, 0), a22 = a.quad(1, 1);
    MatView b11 = b.quad(0, 0), b12 = b.quad(0, 1), b21 = b.quad(1, 0), b22 = b.quad(1, 1);
    MatView c11 = c.quad(0, 0), c12 = c.quad(0, 1), c21 = c.quad(1, 0), c22 = c.quad(1, 1);

    if (g_stats) g_stats->note(g_depth, 18, 7);
    DepthGuard depth;
    auto rec = [&](MatView x, MatView y, MatView z, int s) {
        mm_acc_strassen(f, x, y, z, s, threshold);
    };

    block_acc(f, a21, a11, -1);  // A21 -= A11
    block_acc(f, b12, b22, -1);  // B12 -= B22
    block_acc(f, c21, c22, -1);  // C21 -= C22
    rec(a21, b12, c22, sign);    // C22 += (A21)(B12)
    block_acc(f, a21, a22, +1);
    block_acc(f, b12, b11, -1);
    block_acc(f, c12, c22, -1);
    rec(a21, b12, c22, -sign);   // C22 -= (A21)(B12)
    block_acc(f, c11, c22, -1);
    rec(a11, b11, c22, sign);    // C22 += A11 B11
    block_acc(f, c11, c22, +1);
    block_acc(f, b12, b21, +1);
    block_acc(f, c21, c22, +1);
    rec(a22, b12, c21, sign);    // C21 += A22 (B12)
    block_acc(f, b12, b22, +1);
    block_acc(f, b12, b21, -1);
    block_acc(f, a21, a12, -1);
    rec(a21, b22, c12, -sign);   // C12 -= (A21) B22
    block_acc(f, a21, a12, +1);
    block_acc(f, a21, a11, +1);
    rec(a21, b12, c22, sign);    // C22 += (A21)(B12)
    block_acc(f, c12, c22, +1);
    block_acc(f, b12, b11, +1);
    block_acc(f, a21, a22, -1);
    rec(a12, b21, c11, sign);    // C11 += A12 B21
}

void mm_acc(const FieldCtx& f, MatView a, MatView b, MatView c, int sign, std::size_t threshold) {
    bool square = a.rows == a.cols && b.rows == b.cols && a.rows == b.rows;
    bool alias = a.data && b.data && a.lo_addr() <= b.hi_addr() && b.lo_addr() <= a.hi_addr();
    if (square && !alias && a.rows > threshold && a.rows % 2 == 0 && threshold > 0)
        mm_acc_strassen(f, a, b, c, sign, threshold);
    else
        mm_acc_classic(f, a, b, c, sign);
}

KernelStats strassen_level_counts(const FieldCtx& f, std::size_t n, std::size_t threshold) {
    std::vector<u64> a(n * n, 1), b(n * n, 1), c(n * n, 0);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = (i * 37 + 5) % f.p();
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = (i * 61 + 3) % f.p();
    KernelStats stats;
    {
        ScopedStats capture(stats);
        mm_acc_strassen(f, MatView::full(a.data(), n, n), MatView::full(b.data(), n, n),
                        MatView::full(c.data(), n, n), 1, threshold);
    }
    return stats;
}

void apply_skew_unitary(const FieldCtx& f, VecView u1, VecView u2, SkewUnitaryPair y,
                        bool inverse) {
    if (u1.len != u2.len) throw ShapeMismatch("skew-unitary on unequal views");
    if (y.a == 0) throw ShapeMismatch("skew-unitary pair needs a != 0");
    const u64 a = y.a, b = y.b;
    if (b == 0) {
        const u64 s = inverse ? f.inv(a) : a;
        for (std::size_t i = 0; i < u1.len; ++i) {
            u1.at(i) = f.scale(u1.at(i), s);
            u2.at(i) = f.scale(u2.at(i), s);
        }
        return;
    }
    // Forward: u1 *= a; u1 += b u2; u2 *= yc; u2 += x u1, with x = -b/a and
    // yc = a + b^2/a.  The inverse runs the undo sequence in reverse.
    const u64 ainv = f.inv(a);
    const u64 x = f.neg(f.mul_raw(b, ainv));
    const u64 yc = f.add(a, f.mul_raw(f.mul_raw(b, b), ainv));
    if (!inverse) {
        for (std::size_t i = 0; i < u1.len; ++i) {
            u64& v1 = u1.at(i);
            u64& v2 = u2.at(i);
            v1 = f.scale(v1, a);
            v1 = f.add(v1, f.scale(v2, b));
            v2 = f.scale(v2, yc);
            v2 = f.add(v2, f.scale(v1, x));
        }
    } else {
        const u64 yinv = f.inv(yc);
        for (std::size_t i = 0; i < u1.len; ++i) {
            u64& v1 = u1.at(i);
            u64& v2 = u2.at(i);
            v2 = f.sub(v2, f.scale(v1, x));
            v2 = f.scale(v2, yinv);
            v1 = f.sub(v1, f.scale(v2, b));
            v1 = f.scale(v1, ainv);
        }
    }
}

namespace {

// Right-multiplication of a block by Y = [[a, b], [-b, a]] (x) I acting on
// column halves: (u, v) <- (a u - b v, b u + a v).
void right_mul_skew(const FieldCtx& f, MatView m, SkewUnitaryPair y, bool inverse) {
    if (y.b == 0) {
        const u64 s = inverse ? f.inv(y.a) : y.a;
        for (std::size_t i = 0; i < m.rows; ++i)
            for (std::size_t j = 0; j < m.cols; ++j) m.at(i, j) = f.scale(m.at(i, j), s);
        return;
    }
    if (m.cols % 2 != 0) throw ShapeMismatch("skew-unitary block needs an even column count");
    const std::size_t h = m.cols / 2;
    // Columns (q, q+h) transform by [[a, -b], [b, a]], the transpose effect
    // of the right multiplication.
    SkewUnitaryPair t{y.a, f.neg(y.b)};
    for (std::size_t i = 0; i < m.rows; ++i) {
        VecView u1{&m.at(i, 0), h, m.cstride};
        VecView u2{&m.at(i, h), h, m.cstride};
        apply_skew_unitary(f, u1, u2, t, inverse);
    }
}

// Triangular semi-additions.  Low includes the diagonal, Up is strict.
void low_acc(const FieldCtx& f, MatView dst, MatView src, int sign, bool transpose_src) {
    for (std::size_t i = 0; i < dst.rows; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            u64 s = transpose_src ? src.at(j, i) : src.at(i, j);
            dst.at(i, j) = sign > 0 ? f.add(dst.at(i, j), s) : f.sub(dst.at(i, j), s);
        }
}

void up_acc_t(const FieldCtx& f, MatView dst, MatView src, int sign) {
    for (std::size_t i = 0; i < dst.rows; ++i)
        for (std::size_t j = i + 1; j < dst.cols; ++j) {
            u64 s = src.at(j, i);
            dst.at(i, j) = sign > 0 ? f.add(dst.at(i, j), s) : f.sub(dst.at(i, j), s);
        }
}

void syrk_classic(const FieldCtx& f, MatView a, MatView c) {
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            u64 acc = 0;
            for (std::size_t k = 0; k < a.cols; ++k)
                acc = f.add(acc, f.mul(a.at(i, k), a.at(j, k)));
            c.at(i, j) = f.add(c.at(i, j), acc);
        }
}

}  // namespace

void syrk_acc(const FieldCtx& f, MatView a, MatView c, SkewUnitaryPair y, std::size_t threshold) {
    if (c.rows != a.rows || c.cols != a.rows) throw ShapeMismatch("syrk output must be m x m");
    const std::size_t m = a.rows, w = a.cols;
    const bool splittable =
        m > threshold && threshold > 0 && m % 2 == 0 && w % 2 == 0 && w >= 2 &&
        (y.b == 0 || (w / 2) % 2 == 0);
    if (!splittable) {
        syrk_classic(f, a, c);
        return;
    }
    const std::size_t n = w / 2;
    MatView a11 = a.sub(0, 0, m / 2, n), a12 = a.sub(0, n, m / 2, n);
    MatView a21 = a.sub(m / 2, 0, m / 2, n), a22 = a.sub(m / 2, n, m / 2, n);
    MatView c11 = c.quad(0, 0), c21 = c.quad(1, 0), c22 = c.quad(1, 1);

    // Products: with S1 = (A21-A11)Y, S2 = A22-A21*Y, S3 = S1-A22 and
    // S4 = S3+A12, the block result is C11 += P1+P2, C21 += P1+P4+P5+P3,
    // C22 += P1+P4+P4^T+P5 for P4 = S1*S2^T, P5 = S3*S3^T, P3 = A22*S4^T.
    // The registers track -S1..-S4; the squares in P4 and P5 cancel the
    // signs and P3 accumulates negatively.
    low_acc(f, c22, c11, -1, false);   // Low(C22) -= Low(C11)
    low_acc(f, c21, c11, -1, false);   // Low(C21) -= Low(C11)
    up_acc_t(f, c21, c11, -1);         // Up(C21) -= Low(C11)^T
    syrk_acc(f, a11, c11, y, threshold);            // P1
    up_acc_t(f, c21, c11, +1);
    low_acc(f, c21, c11, +1, false);
    low_acc(f, c22, c11, +1, false);
    syrk_acc(f, a12, c11, y, threshold);            // P2
    right_mul_skew(f, a11, y, false);  // A11 *= Y
    right_mul_skew(f, a21, y, false);  // A21 *= Y
    block_acc(f, a11, a21, -1);        // A11 = -S1
    block_acc(f, a21, a22, -1);        // A21 = -S2
    low_acc(f, c22, c21, -1, false);
    low_acc(f, c22, c21, -1, true);    // Low(C22) -= Low(C21^T)
    mm_acc(f, a11, a21.transposed(), c21, +1, threshold);   // P4
    low_acc(f, c22, c21, +1, true);
    block_acc(f, a11, a22, +1);        // A11 = -S3
    up_acc_t(f, c21, c21, -1);         // Up(C21) -= Low(C21)^T
    syrk_acc(f, a11, c21, y, threshold);            // P5
    up_acc_t(f, c21, c21, +1);
    low_acc(f, c22, c21, +1, false);
    block_acc(f, a11, a12, -1);        // A11 = -S4
    mm_acc(f, a22, a11.transposed(), c21, -1, threshold);   // P3
    block_acc(f, a11, a12, +1);
    block_acc(f, a11, a22, -1);
    block_acc(f, a21, a22, +1);
    block_acc(f, a11, a21, +1);
    right_mul_skew(f, a21, y, true);   // A21 *= Y^-1
    right_mul_skew(f, a11, y, true);   // A11 *= Y^-1
}

void square_acc(const FieldCtx& f, MatView a, MatView c, int sign, std::size_t threshold) {
    if (a.rows != a.cols || c.rows != c.cols || a.rows != c.rows)
        throw ShapeMismatch("square_acc needs square operands");
    const std::size_t n = a.rows;
    if (n <= threshold || n % 2 != 0 || threshold == 0) {
        mm_acc_classic(f, a, a, c, sign);
        return;
    }
    check_disjoint(c, a, "C overlaps A");

    MatView a11 = a.quad(0, 0), a12 = a.quad(0, 1), a21 = a.quad(1, 0), a22 = a.quad(1, 1);
    MatView c11 = c.quad(0, 0), c12 = c.quad(0, 1), c21 = c.quad(1, 0), c22 = c.quad(1, 1);
    auto sq = [&](MatView x, MatView z, int s) { square_acc(f, x, z, s, threshold); };
    auto mm = [&](MatView x, MatView y, MatView z, int s) { mm_acc(f, x, y, z, s, threshold); };

    block_acc(f, a22, a21, -1);
    block_acc(f, c12, c22, +1);
    sq(a22, c22, sign);            // C22 += (A22)^2
    block_acc(f, a22, a12, +1);
    block_acc(f, a22, a11, -1);
    mm(a22, a12, c12, -sign);      // C12 -= (A22) A12
    mm(a21, a22, c21, -sign);      // C21 -= A21 (A22)
    block_acc(f, c21, c22, -1);
    block_acc(f, a22, a11, +1);
    sq(a22, c22, -sign);           // C22 -= (A22)^2
    block_acc(f, c11, c22, +1);
    mm(a12, a21, c22, -sign);      // C22 -= A12 A21
    block_acc(f, a22, a21, +1);
    block_acc(f, c12, c22, -1);
    block_acc(f, c11, c22, -1);
    sq(a22, c22, sign);            // C22 += (A22)^2
    block_acc(f, a22, a12, -1);
    block_acc(f, c21, c22, +1);
    sq(a11, c11, sign);            // C11 += (A11)^2
}

}  // namespace ipmul::mat
