#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <vector>

#include "ipmul/slp.hpp"

namespace ipmul::gen {

struct ZeroRow : std::invalid_argument {
    ZeroRow(const char* which, std::size_t row)
        : std::invalid_argument(std::string("zero row ") + std::to_string(row) + " in " + which) {}
};
struct ZeroColumn : std::invalid_argument {
    ZeroColumn(const char* which, std::size_t col)
        : std::invalid_argument(std::string("zero column ") + std::to_string(col) + " in " +
                                which) {}
};
struct RankDeficientPair : std::invalid_argument {
    explicit RankDeficientPair(std::size_t pair)
        : std::invalid_argument("column pair " + std::to_string(pair) +
                                " has no invertible 2x2 sub-matrix") {}
};
struct SingularBlock : std::invalid_argument {
    SingularBlock() : std::invalid_argument("2x2 block is singular") {}
};

// Small dense matrix of canonical residues.
class Mat {
  public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), v_(rows * cols, 0) {}
    static Mat from_signed(const FieldCtx& f, std::size_t rows, std::size_t cols,
                           std::initializer_list<i64> entries);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    u64& at(std::size_t r, std::size_t c) { return v_[r * cols_ + c]; }
    u64 at(std::size_t r, std::size_t c) const { return v_[r * cols_ + c]; }

    std::size_t nonzeros() const;
    // Entries outside {0, 1, -1}.
    std::size_t nontrivial(const FieldCtx& f) const;

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<u64> v_;
};

// A bilinear algorithm c += mu * ((alpha a) .* (beta b)) given by its
// coefficient matrices: alpha is t x m, beta is t x n, mu is s x t.
struct BilinearRep {
    Mat alpha, beta, mu;
    std::size_t products() const { return alpha.rows(); }
};

// Variant whose products each span two consecutive result registers;
// mu2 is s x 2t, read as column pairs M_1 ... M_t.
struct BilinearRep2 {
    Mat alpha, beta, mu2;
    std::size_t products() const { return alpha.rows(); }
};

// Rejects zero rows in alpha/beta/mu and zero columns in mu (a zero mu
// column would leave a product with nowhere to accumulate).
void validate(const BilinearRep& rep);
void validate(const BilinearRep2& rep);

// Compiles the representation into an in-place accumulating program.  One
// product per main-loop iteration: fold a and b rows onto pivot registers,
// pre-divide/pre-subtract the results, one MulAcc, then unwind.  `order`,
// when given, permutes the product loop (the iterations are independent).
slp::Program generate_inplace(const FieldCtx& f, const BilinearRep& rep,
                              const std::vector<std::size_t>* order = nullptr);

// mul = t, add = 2(#alpha+#beta+#mu) - 5t, sca = 2(*alpha+*beta+*mu),
// where # counts nonzeros and * counts entries outside {0,1,-1}.  The
// generated program hits these numbers exactly.
slp::OpCounts predicted_counts(const FieldCtx& f, const BilinearRep& rep);

// Duplicates mu into the (s+1) x 2t matrix with out(i,2j) = out(i+1,2j+1)
// = mu(i,j): each product's low/high halves get interleaved columns.
// Requires mu to have no zero column.
Mat expand_mu(const Mat& mu);

struct PivotPair {
    std::size_t k, f;  // rows of the invertible 2x2 sub-matrix
};

// For each column pair of mu2, the topmost row pair (k, f) whose 2x2
// sub-matrix is invertible (a row swap inside the emitter covers a zero
// upper-left entry).  Throws RankDeficientPair if a pair has none.
std::vector<PivotPair> check_column_pairs(const FieldCtx& f, const Mat& mu2);

// Ops realizing (u, v) <- M (u, v) for invertible M, four steps at most
// plus a possible Swap; inverse = true emits the exact undo sequence.
std::vector<slp::ElementaryOp> emit_apply_2x2(const FieldCtx& f, const std::array<u64, 4>& m,
                                              slp::RegRef u, slp::RegRef v, bool inverse);

slp::Program generate_inplace_2d(const FieldCtx& f, const BilinearRep2& rep);

// The generic double-width cost statement: mul = t,
// add = 2(#alpha+#beta+#mu2-t), sca = 2(*alpha+*beta+*mu2+2t).  This is a
// worst-case bookkeeping that charges every 2x2 application a flat
// 2 ADD + 4 SCA; the emitted program never exceeds it (see
// emitted_counts_2d for the sharp value).
slp::OpCounts predicted_counts_2d(const FieldCtx& f, const BilinearRep2& rep);

// Cost of the pre/post machinery only, products and their two-register
// distribution excluded: add = 2(#alpha+#beta-2t) + 2(#mu2-2t),
// sca = 2(*alpha+*beta+*mu2).  For expanded-mu representations the
// emitted program minus its product ops lands exactly here.
slp::OpCounts nonrecursive_counts_2d(const FieldCtx& f, const BilinearRep2& rep);

// Structural walk of the emission rules; equals count_ops of the
// generated program exactly, computed without building it.
slp::OpCounts emitted_counts_2d(const FieldCtx& f, const BilinearRep2& rep);

// Dense out-of-place references for verify_restoration.
std::vector<u64> oracle_bilinear(const FieldCtx& f, const BilinearRep& rep,
                                 std::span<const u64> a, std::span<const u64> b,
                                 std::span<const u64> c);
std::vector<u64> oracle_bilinear_2d(const FieldCtx& f, const BilinearRep2& rep,
                                    std::span<const u64> a, std::span<const u64> b,
                                    std::span<const u64> c);

// Stock representations.
BilinearRep strassen_rep(const FieldCtx& f);    // 2x2 matrix product, 7 multiplications
BilinearRep karatsuba_rep(const FieldCtx& f);   // degree-1 polynomial product, 3 multiplications
BilinearRep toom3_rep(const FieldCtx& f);       // degree-2 polynomial product, 5 multiplications
BilinearRep identity_rep(const FieldCtx& f);    // single product c0 += a0*b0

BilinearRep2 to_rep2(const BilinearRep& rep);   // expand_mu applied to rep.mu

}  // namespace ipmul::gen
