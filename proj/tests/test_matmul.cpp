#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <vector>

#include "ipmul/matmul.hpp"

using namespace ipmul;
using namespace ipmul::mat;

namespace {

struct TestMat {
    std::size_t n_rows, n_cols;
    std::vector<u64> v;
    TestMat(std::size_t r, std::size_t c) : n_rows(r), n_cols(c), v(r * c, 0) {}
    MatView view() { return MatView::full(v.data(), n_rows, n_cols); }
    u64& at(std::size_t r, std::size_t c) { return v[r * n_cols + c]; }
};

TestMat random_mat(std::size_t r, std::size_t c, u64 p, std::mt19937_64& rng) {
    TestMat m(r, c);
    std::uniform_int_distribution<u64> pick(0, p - 1);
    for (auto& x : m.v) x = pick(rng);
    return m;
}

// Independent reference, written index-first so it shares nothing with the
// library's classic kernel.
std::vector<u64> ref_product(const FieldCtx& f, const TestMat& a, const TestMat& b) {
    std::vector<u64> c(a.n_rows * b.n_cols, 0);
    for (std::size_t k = 0; k < a.n_cols; ++k)
        for (std::size_t i = 0; i < a.n_rows; ++i) {
            u64 aik = a.v[i * a.n_cols + k];
            for (std::size_t j = 0; j < b.n_cols; ++j)
                c[i * b.n_cols + j] =
                    f.add(c[i * b.n_cols + j], f.mul_raw(aik, b.v[k * b.n_cols + j]));
        }
    return c;
}

}  // namespace

TEST_CASE("classic kernel") {
    FieldCtx f(7);
    TestMat a(1, 1), b(1, 1), c(1, 1);
    a.at(0, 0) = 2;
    b.at(0, 0) = 3;
    c.at(0, 0) = 1;
    mm_acc_classic(f, a.view(), b.view(), c.view());
    CHECK(c.at(0, 0) == 0);

    // identity A: C += B
    FieldCtx f101(101);
    TestMat id(2, 2), bb(2, 2), cc(2, 2);
    id.at(0, 0) = id.at(1, 1) = 1;
    bb.v = {5, 6, 7, 8};
    cc.v = {1, 1, 1, 1};
    mm_acc_classic(f101, id.view(), bb.view(), cc.view());
    CHECK(cc.v == std::vector<u64>{6, 7, 8, 9});

    std::mt19937_64 rng(1);
    TestMat ra = random_mat(3, 3, 101, rng), rb = random_mat(3, 3, 101, rng), rc(3, 3);
    mm_acc_classic(f101, ra.view(), rb.view(), rc.view());
    CHECK(rc.v == ref_product(f101, ra, rb));

    TestMat bad(2, 3);
    CHECK_THROWS_AS(mm_acc_classic(f101, ra.view(), rb.view(), bad.view()), ShapeMismatch);
    CHECK_THROWS_AS(mm_acc_classic(f101, ra.view(), rb.view(), ra.view()), OverlappingViews);
}

TEST_CASE("strassen reproduces the classic product and restores inputs") {
    FieldCtx f(65521);
    std::mt19937_64 rng(2);

    // n=2, threshold=1: all 16 standard-basis pairs.
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            TestMat a(2, 2), b(2, 2), c(2, 2);
            a.v[i] = 1;
            b.v[j] = 1;
            mm_acc_strassen(f, a.view(), b.view(), c.view(), 1, 1);
            CHECK(c.v == ref_product(f, a, b));
            TestMat ea(2, 2), eb(2, 2);
            ea.v[i] = 1;
            eb.v[j] = 1;
            CHECK(a.v == ea.v);
            CHECK(b.v == eb.v);
        }

    for (std::size_t n : {1, 2, 3, 5, 6, 8, 16, 64}) {
        TestMat a = random_mat(n, n, f.p(), rng);
        TestMat b = random_mat(n, n, f.p(), rng);
        TestMat c = random_mat(n, n, f.p(), rng);
        std::vector<u64> a0 = a.v, b0 = b.v, c_want = c.v;
        std::vector<u64> prod = ref_product(f, a, b);
        for (std::size_t i = 0; i < c_want.size(); ++i) c_want[i] = f.add(c_want[i], prod[i]);
        mm_acc_strassen(f, a.view(), b.view(), c.view(), 1, 2);
        CHECK(c.v == c_want);
        CHECK(a.v == a0);
        CHECK(b.v == b0);
    }
}

TEST_CASE("sign duality") {
    FieldCtx f(101);
    std::mt19937_64 rng(3);
    TestMat a = random_mat(8, 8, 101, rng), b = random_mat(8, 8, 101, rng);
    TestMat c = random_mat(8, 8, 101, rng);
    std::vector<u64> c0 = c.v;
    mm_acc_strassen(f, a.view(), b.view(), c.view(), 1, 2);
    mm_acc_strassen(f, a.view(), b.view(), c.view(), -1, 2);
    CHECK(c.v == c0);
}

TEST_CASE("per-level schedule: 18 additions, 7 products") {
    FieldCtx f(101);
    KernelStats one = strassen_level_counts(f, 4, 2);
    REQUIRE(one.depth_seen >= 1);
    CHECK(one.level[0].block_adds == 18);
    CHECK(one.level[0].product_calls == 7);
    CHECK(one.level[1].block_adds == 0);  // children run classic

    KernelStats two = strassen_level_counts(f, 8, 2);
    CHECK(two.level[0].block_adds == 18);
    CHECK(two.level[0].product_calls == 7);
    CHECK(two.level[1].block_adds == 7 * 18);
    CHECK(two.level[1].product_calls == 7 * 7);
    CHECK(two.level[1].calls == 7);

    KernelStats none = strassen_level_counts(f, 4, 8);
    CHECK(none.level[0].block_adds == 0);
    CHECK(none.level[0].product_calls == 0);
}

TEST_CASE("skew-unitary application") {
    FieldCtx f(13);
    SkewUnitaryPair y{3, 4};
    std::vector<u64> u{1}, v{0};
    apply_skew_unitary(f, {u.data(), 1, 1}, {v.data(), 1, 1}, y, false);
    CHECK(u[0] == 3);
    CHECK(v[0] == 9);  // -4 mod 13

    // b = 0 degenerates to a scaling.
    FieldCtx f5(5);
    std::vector<u64> x{1, 2}, z{3, 4};
    apply_skew_unitary(f5, {x.data(), 2, 1}, {z.data(), 2, 1}, {2, 0}, false);
    CHECK(x == std::vector<u64>{2, 4});
    CHECK(z == std::vector<u64>{1, 3});

    // apply then inverse-apply is the identity.
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<u64> pick(0, 12);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<u64> r1(5), r2(5);
        for (auto& t : r1) t = pick(rng);
        for (auto& t : r2) t = pick(rng);
        std::vector<u64> s1 = r1, s2 = r2;
        apply_skew_unitary(f, {r1.data(), 5, 1}, {r2.data(), 5, 1}, y, false);
        apply_skew_unitary(f, {r1.data(), 5, 1}, {r2.data(), 5, 1}, y, true);
        CHECK(r1 == s1);
        CHECK(r2 == s2);
    }
}

TEST_CASE("syrk updates the lower triangle only") {
    FieldCtx f(13);
    SkewUnitaryPair y = f.skew_unitary_pair();
    std::mt19937_64 rng(5);

    auto run = [&](std::size_t m, std::size_t k, std::size_t threshold, int trial) {
        std::mt19937_64 local(100 * m + k + trial);
        TestMat a = random_mat(m, k, 13, local);
        TestMat c = random_mat(m, m, 13, local);
        // Symmetric C on entry.
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < i; ++j) c.at(j, i) = c.at(i, j);
        std::vector<u64> a0 = a.v, c0 = c.v;
        syrk_acc(f, a.view(), c.view(), y, threshold);
        CHECK(a.v == a0);
        TestMat at(k, m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < k; ++j) at.at(j, i) = a0[i * k + j];
        TestMat acopy(m, k);
        acopy.v = a0;
        std::vector<u64> gram = ref_product(f, acopy, at);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                u64 want = j <= i ? f.add(c0[i * m + j], gram[i * m + j]) : c0[i * m + j];
                CHECK(c.at(i, j) == want);
            }
    };

    run(2, 2, 8, 0);   // base case
    run(2, 2, 1, 0);   // one split level (m=2 odd halves -> classic anyway)
    for (int trial = 0; trial < 50; ++trial) run(8, 8, 2, trial);
    run(4, 4, 1, 1);
    run(8, 4, 2, 2);
    run(6, 6, 2, 3);   // odd halves fall back mid-recursion
    run(16, 16, 2, 4);

    // A = 0 leaves C unchanged.
    TestMat za(4, 4), zc(4, 4);
    zc.v = std::vector<u64>(16, 7 % 13);
    std::vector<u64> before = zc.v;
    syrk_acc(f, za.view(), zc.view(), y, 1);
    CHECK(zc.v == before);
    (void)rng;
}

TEST_CASE("syrk over a prime with b = 0") {
    // -1 is a square mod 5, so the skew pair degenerates and odd column
    // halves are fine.
    FieldCtx f(5);
    SkewUnitaryPair y = f.skew_unitary_pair();
    CHECK(y.b == 0);
    for (int trial = 0; trial < 20; ++trial) {
        std::mt19937_64 rng(trial);
        TestMat a = random_mat(6, 6, 5, rng);
        TestMat c = random_mat(6, 6, 5, rng);
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = 0; j < i; ++j) c.at(j, i) = c.at(i, j);
        std::vector<u64> a0 = a.v, c0 = c.v;
        syrk_acc(f, a.view(), c.view(), y, 2);
        CHECK(a.v == a0);
        TestMat at(6, 6), acopy(6, 6);
        acopy.v = a0;
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = 0; j < 6; ++j) at.at(j, i) = a0[i * 6 + j];
        std::vector<u64> gram = ref_product(f, acopy, at);
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = 0; j <= i; ++j)
                CHECK(c.at(i, j) == f.add(c0[i * 6 + j], gram[i * 6 + j]));
    }
}

TEST_CASE("matrix square") {
    FieldCtx f(101);
    TestMat a(2, 2), c(2, 2);
    a.at(0, 0) = a.at(1, 1) = 1;
    square_acc(f, a.view(), c.view(), 1, 1);
    CHECK(c.v == std::vector<u64>{1, 0, 0, 1});

    std::mt19937_64 rng(6);
    for (std::size_t n : {3, 4, 5, 8, 16}) {
        TestMat m = random_mat(n, n, 101, rng);
        TestMat out = random_mat(n, n, 101, rng);
        std::vector<u64> m0 = m.v, want = out.v;
        std::vector<u64> sq = ref_product(f, m, m);
        for (std::size_t i = 0; i < want.size(); ++i) want[i] = f.add(want[i], sq[i]);
        square_acc(f, m.view(), out.view(), 1, 2);
        CHECK(out.v == want);
        CHECK(m.v == m0);
    }
}

TEST_CASE("restoration sweep over many sizes") {
    FieldCtx f(65521);
    SkewUnitaryPair y = f.skew_unitary_pair();
    std::mt19937_64 rng(7);
    for (std::size_t n : {1, 2, 3, 4, 5, 6, 7, 8, 9, 16, 32}) {
        for (int trial = 0; trial < 10; ++trial) {
            TestMat a = random_mat(n, n, f.p(), rng);
            TestMat b = random_mat(n, n, f.p(), rng);
            TestMat c = random_mat(n, n, f.p(), rng);
            std::vector<u64> a0 = a.v, b0 = b.v;
            mm_acc_strassen(f, a.view(), b.view(), c.view(), 1, 4);
            CHECK(a.v == a0);
            CHECK(b.v == b0);
            square_acc(f, a.view(), c.view(), 1, 4);
            CHECK(a.v == a0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < i; ++j) c.at(j, i) = c.at(i, j);
            syrk_acc(f, a.view(), c.view(), y, 4);
            CHECK(a.v == a0);
        }
    }
}
