#pragma once

#include <cstddef>
#include <span>

#include "ipmul/field.hpp"
#include "ipmul/matmul.hpp"  // KernelStats / ScopedStats

namespace ipmul::poly {

using mat::KernelStats;
using mat::ScopedStats;

// Coefficient views are plain spans in ascending order; sub-views of C are
// taken by the schedules and may intentionally alias each other.

// C[i+j] += sign * A[i] * B[j].  Needs c.size() >= a.size() + b.size() - 1.
void pm_acc_classic(const FieldCtx& f, std::span<const u64> a, std::span<const u64> b,
                    std::span<u64> c, int sign = 1);

// C += sign * A * B with A, B restored bit-exactly.  Balanced inputs split
// at delta = ceil((2n+1)/4); three recursive calls (the third with flipped
// sign) and at most ten half-block additions per balanced level.
// Unbalanced inputs peel the larger operand.  c must have exactly
// a.size() + b.size() - 1 coefficients.
void pm_acc_karatsuba(const FieldCtx& f, std::span<u64> a, std::span<u64> b, std::span<u64> c,
                      int sign = 1, std::size_t threshold = 4);

// Records per-level (half-block adds, recursive calls) of one balanced
// multiplication of the given size.
KernelStats karatsuba_level_counts(const FieldCtx& f, std::size_t size, std::size_t threshold);

// C += sign * A * B via one Toom-3 split (interpolation at 0, 1, -1, 2,
// infinity), sub-products by pm_acc_karatsuba.  Needs a.size() == b.size()
// divisible by 3 and characteristic > 3.
void pm_acc_toom3(const FieldCtx& f, std::span<u64> a, std::span<u64> b, std::span<u64> c,
                  int sign = 1, std::size_t threshold = 4);

}  // namespace ipmul::poly
