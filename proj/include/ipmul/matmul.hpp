#pragma once

#include <array>
#include <cstddef>

#include "ipmul/field.hpp"

namespace ipmul::mat {

// Zero-copy strided view into a caller-owned array.  A transposed view
// swaps the strides; quadrants share the storage.  Kernels never allocate:
// all intermediate values live in the viewed banks.
struct MatView {
    u64* data = nullptr;
    std::size_t rows = 0, cols = 0;
    std::size_t rstride = 0, cstride = 1;

    static MatView full(u64* d, std::size_t r, std::size_t c) { return {d, r, c, c, 1}; }

    u64& at(std::size_t r, std::size_t c) const { return data[r * rstride + c * cstride]; }

    MatView sub(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
        return {data + r0 * rstride + c0 * cstride, nr, nc, rstride, cstride};
    }
    // Quadrants of an even-dimensioned view, qi/qj in {0, 1}.
    MatView quad(int qi, int qj) const {
        return sub(qi * (rows / 2), qj * (cols / 2), rows / 2, cols / 2);
    }
    MatView transposed() const { return {data, cols, rows, cstride, rstride}; }

    const u64* lo_addr() const { return data; }
    const u64* hi_addr() const {
        return data + (rows ? (rows - 1) * rstride : 0) + (cols ? (cols - 1) * cstride : 0);
    }
};

// Per-recursion-level tallies captured while a kernel runs.
struct LevelTally {
    u64 block_adds = 0;      // full-block additions/subtractions
    u64 product_calls = 0;   // recursive/sub product invocations
    u64 calls = 0;           // kernel invocations recorded at this depth
    u64 max_adds_one_call = 0;
};

struct KernelStats {
    static constexpr std::size_t kMaxDepth = 64;
    std::array<LevelTally, kMaxDepth> level{};
    std::size_t depth_seen = 0;

    void note(std::size_t depth, u64 adds, u64 products);
};

// Installs a capture target for the duration of a scope (thread-local).
class ScopedStats {
  public:
    explicit ScopedStats(KernelStats& s);
    ~ScopedStats();
    ScopedStats(const ScopedStats&) = delete;
    ScopedStats& operator=(const ScopedStats&) = delete;

  private:
    KernelStats* prev_;
};

// C += sign * A * B by the cubic triple loop; A and B are untouched (they
// may alias each other, but not C).
void mm_acc_classic(const FieldCtx& f, MatView a, MatView b, MatView c, int sign = 1);

// C += sign * A * B for square matrices.  A and B are mutated during the
// run and restored bit-exactly; per recursion level the schedule performs
// 18 quadrant additions and 7 quadrant products.  Odd or small sizes fall
// back to the classic loop.
void mm_acc_strassen(const FieldCtx& f, MatView a, MatView b, MatView c, int sign = 1,
                     std::size_t threshold = 8);

// Dispatcher: Strassen when square, even-dimensioned, above threshold and
// alias-free; classic otherwise.
void mm_acc(const FieldCtx& f, MatView a, MatView b, MatView c, int sign = 1,
            std::size_t threshold = 8);

// Runs one instrumented multiplication of size n and returns the per-level
// (block_adds, product_calls) tallies.
KernelStats strassen_level_counts(const FieldCtx& f, std::size_t n, std::size_t threshold);

// (u1, u2) <- [[a, b], [-b, a]] (u1, u2) elementwise over two equal-length
// strided views; inverse = true applies the inverse map.  Works for b = 0.
struct VecView {
    u64* data;
    std::size_t len;
    std::size_t stride;
    u64& at(std::size_t i) const { return data[i * stride]; }
};
void apply_skew_unitary(const FieldCtx& f, VecView u1, VecView u2, SkewUnitaryPair y,
                        bool inverse);

// Low(C) += Low(A A^T) for A (m x k) and C (m x m, full storage).  A is
// restored; C's strictly upper triangle is never touched.  Recurses with 3
// half-size calls, 2 general products and 4 skew-unitary applications.
void syrk_acc(const FieldCtx& f, MatView a, MatView c, SkewUnitaryPair y,
              std::size_t threshold = 8);

// C += sign * A^2; A restored.  Seven quadrant products per level.
void square_acc(const FieldCtx& f, MatView a, MatView c, int sign = 1, std::size_t threshold = 8);

}  // namespace ipmul::mat
