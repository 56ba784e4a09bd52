#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ipmul/field.hpp"

namespace ipmul::slp {

enum class Bank : std::uint8_t { A, B, C };

struct RegRef {
    Bank bank;
    std::uint32_t index;
    friend bool operator==(const RegRef&, const RegRef&) = default;
};

// dst += coeff * src   (dst != src)
struct AddMul {
    RegRef dst, src;
    u64 coeff;
    friend bool operator==(const AddMul&, const AddMul&) = default;
};
// dst *= coeff   (coeff != 0)
struct Scale {
    RegRef dst;
    u64 coeff;
    friend bool operator==(const Scale&, const Scale&) = default;
};
// dst /= coeff   (coeff != 0)
struct ScaleInv {
    RegRef dst;
    u64 coeff;
    friend bool operator==(const ScaleInv&, const ScaleInv&) = default;
};
struct SwapOp {
    RegRef r1, r2;
    friend bool operator==(const SwapOp&, const SwapOp&) = default;
};
// dst += lhs * rhs   (the bilinear product step)
struct MulAcc {
    RegRef dst, lhs, rhs;
    friend bool operator==(const MulAcc&, const MulAcc&) = default;
};
// (dst_lo, dst_hi) += lhs * rhs, a product spanning two result registers.
struct MulAcc2 {
    RegRef dst_lo, dst_hi, lhs, rhs;
    friend bool operator==(const MulAcc2&, const MulAcc2&) = default;
};

using ElementaryOp = std::variant<AddMul, Scale, ScaleInv, SwapOp, MulAcc, MulAcc2>;

struct OpCounts {
    u64 mul = 0;
    u64 add = 0;
    u64 sca = 0;
    friend bool operator==(const OpCounts&, const OpCounts&) = default;
};

struct ParseError : std::runtime_error {
    std::size_t line;
    ParseError(std::size_t line_, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

// A straight-line program over three register banks a, b, c.  Ops are
// validated on append (index ranges, nonzero scale coefficients,
// dst != src for AddMul).  Immutable once built, safe to share.
class Program {
  public:
    Program(u64 modulus, std::size_t a_size, std::size_t b_size, std::size_t c_size)
        : p_(modulus), sizes_{a_size, b_size, c_size} {}

    void push(ElementaryOp op);

    u64 modulus() const { return p_; }
    std::size_t bank_size(Bank b) const { return sizes_[static_cast<std::size_t>(b)]; }
    const std::vector<ElementaryOp>& ops() const { return ops_; }
    std::size_t size() const { return ops_.size(); }

    friend bool operator==(const Program&, const Program&) = default;

  private:
    u64 p_;
    std::array<std::size_t, 3> sizes_;
    std::vector<ElementaryOp> ops_;
};

// Runs the program over scalar banks.  The interpreter's state is the three
// spans, the op cursor, and one product scratch; nothing else.  A MulAcc2
// accumulates the same scalar product into both destinations (the split into
// low/high halves only exists for block registers; see execute_blocks).
void execute(const Program& prog, const FieldCtx& f, std::span<u64> a, std::span<u64> b,
             std::span<u64> c);

OpCounts count_ops(const Program& prog);

std::string render(const Program& prog);
Program parse(const std::string& text, u64 modulus);

using Oracle =
    std::function<std::vector<u64>(std::span<const u64>, std::span<const u64>, std::span<const u64>)>;

struct VerifyReport {
    bool pass = true;
    u64 trials_run = 0;
    std::string failure;  // empty when pass; otherwise a description of the
                          // first counterexample, banks included
};

// Checks, over `trials` random bank fillings, that execute() restores banks
// a and b bit-exactly and leaves c equal to oracle(a0, b0, c0).
VerifyReport verify_restoration(const Program& prog, const FieldCtx& f, const Oracle& oracle,
                                u64 trials, u64 seed);

// --- block execution -------------------------------------------------------
//
// The same program can drive registers that are polynomial coefficient
// blocks.  Scale/AddMul/Swap act coefficientwise (truncated to the narrower
// block), and MulAcc2 accumulates a full product of two blocks across its
// two consecutive destination blocks.

inline constexpr std::size_t kMaxBlockRegs = 32;

struct BlockBank {
    u64* base = nullptr;
    std::uint32_t count = 0;
    std::array<std::uint32_t, kMaxBlockRegs> off{};
    std::array<std::uint32_t, kMaxBlockRegs> wid{};
};

// Runs a two-register-product program over block banks; `product`
// accumulates sign * lhs * rhs into a contiguous destination span covering
// the MulAcc2 pair (pm_acc_toom3 plugs a recursive multiplier in here).
// Callable inline so kernel paths stay allocation-free.
template <class Product>
void execute_blocks(const Program& prog, const FieldCtx& f, const BlockBank& a, const BlockBank& b,
                    const BlockBank& c, int sign, Product&& product) {
    if (a.count != prog.bank_size(Bank::A) || b.count != prog.bank_size(Bank::B) ||
        c.count != prog.bank_size(Bank::C))
        throw ShapeMismatch("block bank register counts do not match program");
    auto pick = [&](RegRef r) -> std::span<u64> {
        const BlockBank& bank = r.bank == Bank::A ? a : r.bank == Bank::B ? b : c;
        return {bank.base + bank.off[r.index], bank.wid[r.index]};
    };
    for (const ElementaryOp& op : prog.ops()) {
        std::visit(
            [&](const auto& o) {
                using T = std::decay_t<decltype(o)>;
                if constexpr (std::is_same_v<T, AddMul>) {
                    auto dst = pick(o.dst), src = pick(o.src);
                    std::size_t w = std::min(dst.size(), src.size());
                    for (std::size_t i = 0; i < w; ++i)
                        dst[i] = f.add(dst[i], f.scale(src[i], o.coeff));
                } else if constexpr (std::is_same_v<T, Scale>) {
                    for (u64& x : pick(o.dst)) x = f.scale(x, o.coeff);
                } else if constexpr (std::is_same_v<T, ScaleInv>) {
                    u64 ci = f.inv(o.coeff);
                    for (u64& x : pick(o.dst)) x = f.scale(x, ci);
                } else if constexpr (std::is_same_v<T, SwapOp>) {
                    auto r1 = pick(o.r1), r2 = pick(o.r2);
                    if (r1.size() != r2.size()) throw ShapeMismatch("swap of unequal blocks");
                    for (std::size_t i = 0; i < r1.size(); ++i) std::swap(r1[i], r2[i]);
                } else if constexpr (std::is_same_v<T, MulAcc>) {
                    throw ShapeMismatch("scalar MulAcc in a block program");
                } else {
                    auto lo = pick(o.dst_lo), hi = pick(o.dst_hi), lhs = pick(o.lhs),
                         rhs = pick(o.rhs);
                    if (o.dst_hi.bank != o.dst_lo.bank || lo.data() + lo.size() != hi.data())
                        throw ShapeMismatch("MulAcc2 destinations must be adjacent blocks");
                    std::span<u64> dst{lo.data(), lo.size() + hi.size()};
                    if (lhs.size() + rhs.size() - 1 > dst.size())
                        throw ShapeMismatch("product does not fit its destination pair");
                    product(lhs, rhs, dst, sign);
                }
            },
            op);
    }
}

}  // namespace ipmul::slp
