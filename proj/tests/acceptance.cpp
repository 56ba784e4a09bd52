// Acceptance suite: each numbered check prints one pass/fail line and the
// binary exits nonzero if any fails.  Runtime is a few seconds.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <new>
#include <random>
#include <vector>

#include "ipmul/bilinear.hpp"
#include "ipmul/io.hpp"
#include "ipmul/matmul.hpp"
#include "ipmul/polymul.hpp"
#include "ipmul/slp.hpp"
#include "ipmul/transform.hpp"

using namespace ipmul;

// ---- allocation counter (criterion 10) -------------------------------------

static thread_local long long g_alloc_count = 0;
static thread_local bool g_alloc_tracking = false;

void* operator new(std::size_t sz) {
    if (g_alloc_tracking) ++g_alloc_count;
    if (void* p = std::malloc(sz ? sz : 1)) return p;
    throw std::bad_alloc();
}
void* operator new[](std::size_t sz) { return ::operator new(sz); }
void operator delete(void* p) noexcept { std::free(p); }
void operator delete[](void* p) noexcept { std::free(p); }
void operator delete(void* p, std::size_t) noexcept { std::free(p); }
void operator delete[](void* p, std::size_t) noexcept { std::free(p); }

namespace {

int g_failures = 0;

void report(int criterion, const char* name, bool ok, const std::string& detail = "") {
    std::printf("criterion %2d %-44s %s%s%s\n", criterion, name, ok ? "PASS" : "FAIL",
                detail.empty() ? "" : "  -- ", detail.c_str());
    if (!ok) ++g_failures;
}

std::vector<u64> random_vec(std::size_t n, u64 p, std::mt19937_64& rng) {
    std::uniform_int_distribution<u64> pick(0, p - 1);
    std::vector<u64> v(n);
    for (auto& x : v) x = pick(rng);
    return v;
}

std::vector<u64> conv(const FieldCtx& f, std::span<const u64> a, std::span<const u64> b) {
    std::vector<u64> c(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            c[i + j] = f.add(c[i + j], f.mul_raw(a[i], b[j]));
    return c;
}

std::vector<u64> mat_prod(const FieldCtx& f, const std::vector<u64>& a, const std::vector<u64>& b,
                          std::size_t n, std::size_t k, std::size_t m) {
    std::vector<u64> c(n * m, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t kk = 0; kk < k; ++kk)
            for (std::size_t j = 0; j < m; ++j)
                c[i * m + j] = f.add(c[i * m + j], f.mul_raw(a[i * k + kk], b[kk * m + j]));
    return c;
}

// ---- criterion 1 and 9 ------------------------------------------------------

void criterion_strassen_schedule() {
    FieldCtx f(101);
    mat::KernelStats s = mat::strassen_level_counts(f, 4, 2);
    bool ok = s.level[0].block_adds == 18 && s.level[0].product_calls == 7 &&
              s.level[0].calls == 1 && s.level[1].block_adds == 0;
    report(1, "one recursion level: 18 adds, 7 products", ok,
           "n=4 threshold=2: adds=" + std::to_string(s.level[0].block_adds) +
               " products=" + std::to_string(s.level[0].product_calls));
    report(9, "18 + 7 = 25 additions per level", s.level[0].block_adds + s.level[0].product_calls == 25,
           "meets the lower bound with equality");
}

// ---- criterion 2 ------------------------------------------------------------

void criterion_thm1_counts() {
    FieldCtx f101(101);
    slp::OpCounts strassen = slp::count_ops(gen::generate_inplace(f101, gen::strassen_rep(f101)));
    bool ok = strassen == slp::OpCounts{7, 49, 0} &&
              gen::predicted_counts(f101, gen::strassen_rep(f101)) == slp::OpCounts{7, 49, 0};

    FieldCtx f7(7);
    std::mt19937_64 rng(20240);
    std::uniform_int_distribution<std::size_t> tdist(1, 6), ddist(1, 5);
    std::uniform_int_distribution<u64> edist(0, 6);
    int tested = 0;
    while (tested < 25) {
        gen::BilinearRep rep{gen::Mat(tdist(rng), ddist(rng)), gen::Mat(0, 0), gen::Mat(0, 0)};
        rep.beta = gen::Mat(rep.alpha.rows(), ddist(rng));
        rep.mu = gen::Mat(ddist(rng), rep.alpha.rows());
        for (auto* m : {&rep.alpha, &rep.beta, &rep.mu})
            for (std::size_t r = 0; r < m->rows(); ++r)
                for (std::size_t c = 0; c < m->cols(); ++c) m->at(r, c) = edist(rng);
        try {
            gen::validate(rep);
        } catch (const std::invalid_argument&) {
            continue;
        }
        ++tested;
        if (slp::count_ops(gen::generate_inplace(f7, rep)) != gen::predicted_counts(f7, rep))
            ok = false;
    }
    report(2, "cost formula exact: pinned (7,49,0) + 25 random", ok);
}

// ---- criterion 3 ------------------------------------------------------------

void criterion_thm5_counts() {
    FieldCtx f(101);
    gen::BilinearRep2 kara = gen::to_rep2(gen::karatsuba_rep(f));
    slp::OpCounts bound = gen::predicted_counts_2d(f, kara);
    slp::OpCounts got = slp::count_ops(gen::generate_inplace_2d(f, kara));
    bool kara_ok = bound == slp::OpCounts{3, 30, 12} && got == gen::emitted_counts_2d(f, kara) &&
                   got.add <= bound.add && got.sca <= bound.sca;
    report(3, "two-register cost statement: Karatsuba (3,30,12)", kara_ok,
           "emitted (3," + std::to_string(got.add) + "," + std::to_string(got.sca) +
               ") within the statement");

    gen::BilinearRep2 toom = gen::to_rep2(gen::toom3_rep(f));
    slp::OpCounts nr = gen::nonrecursive_counts_2d(f, toom);
    slp::OpCounts tg = slp::count_ops(gen::generate_inplace_2d(f, toom));
    bool toom_ok = nr.add == 68 && nr.sca == 52 && tg.add - 2 * tg.mul == 68 && tg.sca == 52;
    report(3, "Toom-3 non-recursive ops: ADD 68, SCA 52", toom_ok);
}

// ---- criterion 4 ------------------------------------------------------------

void criterion_restoration_sweep() {
    bool ok = true;
    std::string what;

    // Matrix kernels.
    {
        FieldCtx f(65521);
        SkewUnitaryPair y = f.skew_unitary_pair();
        std::mt19937_64 rng(40);
        for (std::size_t n : {1, 2, 3, 4, 5, 6, 7, 8, 9, 16, 32, 64}) {
            for (int t = 0; t < 100; ++t) {
                std::vector<u64> a = random_vec(n * n, f.p(), rng);
                std::vector<u64> b = random_vec(n * n, f.p(), rng);
                std::vector<u64> c = random_vec(n * n, f.p(), rng);
                std::vector<u64> a0 = a, b0 = b, c0 = c;
                std::vector<u64> ab = mat_prod(f, a, b, n, n, n);

                auto av = mat::MatView::full(a.data(), n, n);
                auto bv = mat::MatView::full(b.data(), n, n);
                auto cv = mat::MatView::full(c.data(), n, n);
                mat::mm_acc_strassen(f, av, bv, cv, 1, 4);
                for (std::size_t i = 0; i < c.size(); ++i)
                    if (c[i] != f.add(c0[i], ab[i])) ok = false;
                if (a != a0 || b != b0) ok = false;
                if (!ok) { what = "strassen n=" + std::to_string(n); break; }

                // classic cross-check on the same data
                c = c0;
                mat::mm_acc_classic(f, av, bv, cv, 1);
                for (std::size_t i = 0; i < c.size(); ++i)
                    if (c[i] != f.add(c0[i], ab[i])) { ok = false; what = "classic"; }

                // square
                c = c0;
                std::vector<u64> aa = mat_prod(f, a, a, n, n, n);
                mat::square_acc(f, av, cv, 1, 4);
                for (std::size_t i = 0; i < c.size(); ++i)
                    if (c[i] != f.add(c0[i], aa[i])) { ok = false; what = "square"; }
                if (a != a0) { ok = false; what = "square restore"; }

                // syrk (symmetric c)
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j < i; ++j) c0[j * n + i] = c0[i * n + j];
                c = c0;
                std::vector<u64> at(n * n);
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j < n; ++j) at[j * n + i] = a[i * n + j];
                std::vector<u64> gram = mat_prod(f, a, at, n, n, n);
                mat::syrk_acc(f, av, cv, y, 4);
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j <= i; ++j)
                        if (c[i * n + j] != f.add(c0[i * n + j], gram[i * n + j]))
                            { ok = false; what = "syrk"; }
                if (a != a0) { ok = false; what = "syrk restore"; }
                if (!ok) break;
            }
            if (!ok) break;
        }
    }

    // Polynomial kernels: sampled (m, n) pairs up to 40.
    if (ok) {
        FieldCtx f(65537);
        std::mt19937_64 rng(41);
        for (std::size_t la = 1; la <= 40 && ok; la += 3)
            for (std::size_t lb = 1; lb <= 40 && ok; lb += 5) {
                for (int t = 0; t < 4; ++t) {
                    std::vector<u64> a = random_vec(la, f.p(), rng);
                    std::vector<u64> b = random_vec(lb, f.p(), rng);
                    std::vector<u64> c = random_vec(la + lb - 1, f.p(), rng);
                    std::vector<u64> a0 = a, b0 = b, want = c;
                    std::vector<u64> prod = conv(f, a, b);
                    for (std::size_t i = 0; i < prod.size(); ++i)
                        want[i] = f.add(want[i], prod[i]);

                    std::vector<u64> c1 = c;
                    poly::pm_acc_karatsuba(f, a, b, c1, 1, 4);
                    if (c1 != want || a != a0 || b != b0) { ok = false; what = "karatsuba"; }

                    c1 = c;
                    fft::pm_acc_fft(f, a, b, c1);
                    if (c1 != want || a != a0 || b != b0) { ok = false; what = "tft"; }

                    if (la == lb && la % 3 == 0) {
                        c1 = c;
                        poly::pm_acc_toom3(f, a, b, c1, 1, 4);
                        if (c1 != want || a != a0 || b != b0) { ok = false; what = "toom3"; }
                    }
                    if (!ok) break;
                }
            }
        // FFT power-of-two lengths up to 512.
        for (std::size_t n = 1; n <= 512 && ok; n *= 2) {
            for (int t = 0; t < 100; ++t) {
                std::vector<u64> a = random_vec(n, f.p(), rng);
                std::vector<u64> b = random_vec(n, f.p(), rng);
                std::vector<u64> c = random_vec(2 * n, f.p(), rng);
                std::vector<u64> a0 = a, b0 = b, want = c;
                std::vector<u64> prod = conv(f, a, b);
                for (std::size_t i = 0; i < prod.size(); ++i) want[i] = f.add(want[i], prod[i]);
                fft::pm_acc_fft_pow2(f, a, b, c);
                if (c != want || a != a0 || b != b0) { ok = false; what = "fft-pow2"; break; }
            }
        }
    }
    report(4, "restoration + oracle sweep over all kernels", ok, what);
}

// ---- criterion 5 ------------------------------------------------------------

void criterion_karatsuba_levels() {
    FieldCtx f(101);
    bool ok = true;
    for (std::size_t size : {6, 10, 16, 23, 40, 64}) {
        mat::KernelStats s = poly::karatsuba_level_counts(f, size, 2);
        bool any = false;
        for (std::size_t d = 0; d < s.depth_seen; ++d) {
            if (s.level[d].calls == 0) continue;
            any = true;
            if (s.level[d].product_calls != 3 * s.level[d].calls) ok = false;
            if (s.level[d].max_adds_one_call > 10) ok = false;
        }
        if (!any) ok = false;
    }
    report(5, "balanced level: 3 calls, <= 10 half-block adds", ok);
}

// ---- criterion 6 ------------------------------------------------------------

void criterion_fft_budget() {
    FieldCtx f(65537);
    std::mt19937_64 rng(60);
    bool ok = true;
    for (std::size_t n : {2, 8, 64, 256}) {
        std::vector<u64> a = random_vec(n, f.p(), rng), b = random_vec(n, f.p(), rng);
        std::vector<u64> c = random_vec(2 * n, f.p(), rng);
        fft::transform_stats().reset();
        fft::pm_acc_fft_pow2(f, a, b, c);
        unsigned l = 0;
        while ((std::size_t(1) << l) < n) ++l;
        const auto& s = fft::transform_stats();
        if (s.calls != 10 || s.by_log2[l + 1] != 2 || s.by_log2[l] != 8) ok = false;
        if (s.first_log2 != l + 1 || s.last_log2 != l + 1) ok = false;
    }
    report(6, "power-of-two product uses exactly 10 transforms", ok,
           "sizes {2n:2, n:8}, the 2n pair first and last");
}

// ---- criterion 7 ------------------------------------------------------------

void criterion_tft_iterations() {
    FieldCtx f(65537);
    std::mt19937_64 rng(70);
    bool ok = true;
    for (std::size_t m = 1; m <= 48 && ok; m += 1)
        for (std::size_t n = m; n <= 48; n += 3) {
            std::vector<u64> a = random_vec(m, f.p(), rng), b = random_vec(n, f.p(), rng);
            std::vector<u64> c = random_vec(m + n - 1, f.p(), rng);
            fft::transform_stats().reset();
            fft::pm_acc_fft(f, a, b, c);
            unsigned lg = 0;
            while ((std::size_t(1) << lg) < n) ++lg;
            if (fft::transform_stats().poly_iterations > 3 + lg) { ok = false; break; }
        }
    report(7, "general product: iterations <= 3 + ceil(log2 n)", ok);
}

// ---- criterion 8 ------------------------------------------------------------

void criterion_exponents() {
    FieldCtx f(65521);
    std::mt19937_64 rng(80);
    bool ok = true;
    std::vector<std::pair<double, double>> spts, kpts;
    u64 expected = 1;
    for (std::size_t n = 2; n <= 256; n *= 2) {
        expected *= 7;
        std::vector<u64> a = random_vec(n * n, f.p(), rng), b = random_vec(n * n, f.p(), rng);
        std::vector<u64> c = random_vec(n * n, f.p(), rng);
        reset_field_tally();
        mat::mm_acc_strassen(f, mat::MatView::full(a.data(), n, n),
                             mat::MatView::full(b.data(), n, n),
                             mat::MatView::full(c.data(), n, n), 1, 1);
        if (field_tally().mul != expected) ok = false;
        spts.push_back({std::log2(double(n)), std::log2(double(field_tally().mul))});
    }
    expected = 1;
    for (std::size_t n = 2; n <= 256; n *= 2) {
        expected *= 3;
        std::vector<u64> a = random_vec(n, f.p(), rng), b = random_vec(n, f.p(), rng);
        std::vector<u64> c = random_vec(2 * n - 1, f.p(), rng);
        reset_field_tally();
        poly::pm_acc_karatsuba(f, a, b, c, 1, 1);
        if (field_tally().mul != expected) ok = false;
        kpts.push_back({std::log2(double(n)), std::log2(double(field_tally().mul))});
    }
    auto slope = [](const std::vector<std::pair<double, double>>& pts) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0, n = double(pts.size());
        for (auto [x, y] : pts) { sx += x; sy += y; sxx += x * x; sxy += x * y; }
        return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    };
    double se = slope(spts), ke = slope(kpts);
    if (!(se >= 2.75 && se <= 2.85)) ok = false;
    if (!(ke >= 1.53 && ke <= 1.65)) ok = false;
    char buf[96];
    std::snprintf(buf, sizeof buf, "7^k and 3^k exact; exponents %.3f / %.3f", se, ke);
    report(8, "product-count growth exponents", ok, buf);
}

// ---- criterion 10 -----------------------------------------------------------

void criterion_zero_alloc() {
    FieldCtx f(65537);
    SkewUnitaryPair y = f.skew_unitary_pair();
    std::mt19937_64 rng(100);
    const std::size_t n = 16;
    std::vector<u64> a = random_vec(n * n, f.p(), rng), b = random_vec(n * n, f.p(), rng);
    std::vector<u64> c = random_vec(n * n, f.p(), rng);
    std::vector<u64> pa = random_vec(24, f.p(), rng), pb = random_vec(24, f.p(), rng);
    std::vector<u64> pc = random_vec(47, f.p(), rng);
    std::vector<u64> fa = random_vec(32, f.p(), rng), fb = random_vec(32, f.p(), rng);
    std::vector<u64> fc = random_vec(64, f.p(), rng);
    std::vector<u64> ta = random_vec(21, f.p(), rng), tb = random_vec(21, f.p(), rng);
    std::vector<u64> tc = random_vec(41, f.p(), rng);
    slp::Program prog = gen::generate_inplace(f, gen::strassen_rep(f));
    std::vector<u64> sa = random_vec(4, f.p(), rng), sb = random_vec(4, f.p(), rng);
    std::vector<u64> sc = random_vec(4, f.p(), rng);
    // Warm the per-modulus program cache outside the tracked window.
    poly::pm_acc_toom3(f, ta, tb, tc, 1, 2);

    g_alloc_count = 0;
    g_alloc_tracking = true;
    mat::mm_acc_strassen(f, mat::MatView::full(a.data(), n, n),
                         mat::MatView::full(b.data(), n, n),
                         mat::MatView::full(c.data(), n, n), 1, 2);
    mat::square_acc(f, mat::MatView::full(a.data(), n, n), mat::MatView::full(c.data(), n, n), 1,
                    2);
    mat::syrk_acc(f, mat::MatView::full(a.data(), n, n), mat::MatView::full(c.data(), n, n), y, 2);
    poly::pm_acc_karatsuba(f, pa, pb, pc, 1, 2);
    poly::pm_acc_toom3(f, ta, tb, tc, 1, 2);
    fft::pm_acc_fft_pow2(f, fa, fb, fc);
    fft::pm_acc_fft(f, pa, pb, pc);
    slp::execute(prog, f, sa, sb, sc);
    g_alloc_tracking = false;
    long long count = g_alloc_count;
    report(10, "kernel call trees allocate nothing", count == 0,
           "heap allocations during kernels: " + std::to_string(count));
}

}  // namespace

int main() {
    auto t0 = std::chrono::steady_clock::now();
    criterion_strassen_schedule();
    criterion_thm1_counts();
    criterion_thm5_counts();
    criterion_restoration_sweep();
    criterion_karatsuba_levels();
    criterion_fft_budget();
    criterion_tft_iterations();
    criterion_exponents();
    criterion_zero_alloc();
    auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0);
    std::printf("%s (%d failure%s, %.1f s)\n", g_failures == 0 ? "ALL PASS" : "FAILURES",
                g_failures, g_failures == 1 ? "" : "s", ms.count() / 1000.0);
    return g_failures == 0 ? 0 : 1;
}
