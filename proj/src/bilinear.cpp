#include "ipmul/bilinear.hpp"

#include <array>
#include <numeric>

namespace ipmul::gen {

using slp::AddMul;
using slp::Bank;
using slp::ElementaryOp;
using slp::MulAcc;
using slp::MulAcc2;
using slp::OpCounts;
using slp::Program;
using slp::RegRef;
using slp::Scale;
using slp::ScaleInv;
using slp::SwapOp;

Mat Mat::from_signed(const FieldCtx& f, std::size_t rows, std::size_t cols,
                     std::initializer_list<i64> entries) {
    if (entries.size() != rows * cols) throw ShapeMismatch("entry count");
    Mat m(rows, cols);
    std::size_t i = 0;
    for (i64 v : entries) m.v_[i++] = f.from_signed(v);
    return m;
}

std::size_t Mat::nonzeros() const {
    std::size_t n = 0;
    for (u64 x : v_) n += x != 0;
    return n;
}

std::size_t Mat::nontrivial(const FieldCtx& f) const {
    std::size_t n = 0;
    for (u64 x : v_) n += x != 0 && !f.is_one_or_minus_one(x);
    return n;
}

namespace {

void require_no_zero_rows(const Mat& m, const char* name) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        bool any = false;
        for (std::size_t c = 0; c < m.cols(); ++c) any |= m.at(r, c) != 0;
        if (!any) throw ZeroRow(name, r);
    }
}

void require_no_zero_cols(const Mat& m, const char* name) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
        bool any = false;
        for (std::size_t r = 0; r < m.rows(); ++r) any |= m.at(r, c) != 0;
        if (!any) throw ZeroColumn(name, c);
    }
}

// Smallest row index with a nonzero entry, preferring +-1 coefficients.
std::size_t pick_pivot_in_row(const FieldCtx& f, const Mat& m, std::size_t row) {
    std::size_t fallback = m.cols();
    for (std::size_t c = 0; c < m.cols(); ++c) {
        u64 v = m.at(row, c);
        if (v == 0) continue;
        if (f.is_one_or_minus_one(v)) return c;
        if (fallback == m.cols()) fallback = c;
    }
    return fallback;
}

std::size_t pick_pivot_in_col(const FieldCtx& f, const Mat& m, std::size_t col) {
    std::size_t fallback = m.rows();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        u64 v = m.at(r, col);
        if (v == 0) continue;
        if (f.is_one_or_minus_one(v)) return r;
        if (fallback == m.rows()) fallback = r;
    }
    return fallback;
}

}  // namespace

void validate(const BilinearRep& rep) {
    if (rep.products() == 0) throw ShapeMismatch("representation has no products");
    if (rep.beta.rows() != rep.products() || rep.mu.cols() != rep.products())
        throw ShapeMismatch("alpha/beta/mu product counts disagree");
    require_no_zero_rows(rep.alpha, "alpha");
    require_no_zero_rows(rep.beta, "beta");
    require_no_zero_rows(rep.mu, "mu");
    require_no_zero_cols(rep.mu, "mu");
}

void validate(const BilinearRep2& rep) {
    if (rep.products() == 0) throw ShapeMismatch("representation has no products");
    if (rep.beta.rows() != rep.products() || rep.mu2.cols() != 2 * rep.products())
        throw ShapeMismatch("alpha/beta/mu2 product counts disagree");
    require_no_zero_rows(rep.alpha, "alpha");
    require_no_zero_rows(rep.beta, "beta");
    require_no_zero_rows(rep.mu2, "mu2");
}

namespace {

// Emits the fold of row `row` of `m` onto its pivot register and returns the
// pivot index; with undo = true emits the mirror sequence instead.
std::size_t emit_fold(Program& prog, const FieldCtx& f, const Mat& m, std::size_t row, Bank bank,
                      bool undo) {
    std::size_t piv = pick_pivot_in_row(f, m, row);
    RegRef pr{bank, static_cast<std::uint32_t>(piv)};
    u64 pc = m.at(row, piv);
    if (!undo) {
        if (pc != 1) prog.push(Scale{pr, pc});
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c == piv || m.at(row, c) == 0) continue;
            prog.push(AddMul{pr, {bank, static_cast<std::uint32_t>(c)}, m.at(row, c)});
        }
    } else {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c == piv || m.at(row, c) == 0) continue;
            prog.push(AddMul{pr, {bank, static_cast<std::uint32_t>(c)}, f.neg(m.at(row, c))});
        }
        if (pc != 1) prog.push(ScaleInv{pr, pc});
    }
    return piv;
}

}  // namespace

slp::Program generate_inplace(const FieldCtx& f, const BilinearRep& rep,
                              const std::vector<std::size_t>* order) {
    validate(rep);
    const Mat &al = rep.alpha, &be = rep.beta, &mu = rep.mu;
    const std::size_t t = rep.products();
    Program prog(f.p(), al.cols(), be.cols(), mu.rows());

    std::vector<std::size_t> seq(t);
    std::iota(seq.begin(), seq.end(), 0);
    if (order) seq = *order;

    for (std::size_t l : seq) {
        std::size_t i = emit_fold(prog, f, al, l, Bank::A, false);
        std::size_t j = emit_fold(prog, f, be, l, Bank::B, false);

        std::size_t k = pick_pivot_in_col(f, mu, l);
        RegRef ck{Bank::C, static_cast<std::uint32_t>(k)};
        u64 mk = mu.at(k, l);
        if (mk != 1) prog.push(ScaleInv{ck, mk});
        for (std::size_t r = 0; r < mu.rows(); ++r) {
            if (r == k || mu.at(r, l) == 0) continue;
            prog.push(AddMul{{Bank::C, static_cast<std::uint32_t>(r)}, ck, f.neg(mu.at(r, l))});
        }

        prog.push(MulAcc{ck,
                         {Bank::A, static_cast<std::uint32_t>(i)},
                         {Bank::B, static_cast<std::uint32_t>(j)}});

        for (std::size_t r = 0; r < mu.rows(); ++r) {
            if (r == k || mu.at(r, l) == 0) continue;
            prog.push(AddMul{{Bank::C, static_cast<std::uint32_t>(r)}, ck, mu.at(r, l)});
        }
        if (mk != 1) prog.push(Scale{ck, mk});

        emit_fold(prog, f, be, l, Bank::B, true);
        emit_fold(prog, f, al, l, Bank::A, true);
    }
    return prog;
}

slp::OpCounts predicted_counts(const FieldCtx& f, const BilinearRep& rep) {
    validate(rep);
    const u64 t = rep.products();
    u64 nz = rep.alpha.nonzeros() + rep.beta.nonzeros() + rep.mu.nonzeros();
    u64 nt = rep.alpha.nontrivial(f) + rep.beta.nontrivial(f) + rep.mu.nontrivial(f);
    return {t, 2 * nz - 5 * t, 2 * nt};
}

Mat expand_mu(const Mat& mu) {
    require_no_zero_cols(mu, "mu");
    Mat out(mu.rows() + 1, 2 * mu.cols());
    for (std::size_t i = 0; i < mu.rows(); ++i) {
        for (std::size_t j = 0; j < mu.cols(); ++j) {
            out.at(i, 2 * j) = mu.at(i, j);
            out.at(i + 1, 2 * j + 1) = mu.at(i, j);
        }
    }
    return out;
}

std::vector<PivotPair> check_column_pairs(const FieldCtx& f, const Mat& mu2) {
    if (mu2.cols() % 2 != 0) throw ShapeMismatch("mu2 must have an even column count");
    std::vector<PivotPair> out;
    for (std::size_t l = 0; l < mu2.cols() / 2; ++l) {
        bool found = false;
        for (std::size_t k = 0; k < mu2.rows() && !found; ++k) {
            for (std::size_t ff = k + 1; ff < mu2.rows() && !found; ++ff) {
                u64 det = f.sub(f.mul_raw(mu2.at(k, 2 * l), mu2.at(ff, 2 * l + 1)),
                                f.mul_raw(mu2.at(k, 2 * l + 1), mu2.at(ff, 2 * l)));
                if (det != 0) {
                    out.push_back({k, ff});
                    found = true;
                }
            }
        }
        if (!found) throw RankDeficientPair(l);
    }
    return out;
}

std::vector<slp::ElementaryOp> emit_apply_2x2(const FieldCtx& f, const std::array<u64, 4>& m,
                                              slp::RegRef u, slp::RegRef v, bool inverse) {
    u64 a = m[0], b = m[1], c = m[2], d = m[3];
    u64 det = f.sub(f.mul_raw(a, d), f.mul_raw(b, c));
    if (det == 0) throw SingularBlock();

    std::vector<ElementaryOp> ops;
    bool permuted = false;
    if (a == 0) {
        // M = J * [[c, d], [0, b]]: run the triangular part, then swap the
        // rows at the end.
        permuted = true;
        std::swap(a, c);
        std::swap(b, d);
    }
    if (b == 0 && c == 0) {
        if (a != 1) ops.push_back(Scale{u, a});
        if (d != 1) ops.push_back(Scale{v, d});
    } else if (b == 0) {
        // Lower triangular: v <- c u + d v, then u <- a u.
        if (d != 1) ops.push_back(Scale{v, d});
        ops.push_back(AddMul{v, u, c});
        if (a != 1) ops.push_back(Scale{u, a});
    } else if (c == 0) {
        // Upper triangular: u <- a u + b v, then v <- d v.
        if (a != 1) ops.push_back(Scale{u, a});
        ops.push_back(AddMul{u, v, b});
        if (d != 1) ops.push_back(Scale{v, d});
    } else {
        // Dense block: u *= a; u += b v; v *= y; v += x u,
        // with x = c/a and y = d - x b.
        u64 x = f.mul_raw(c, f.inv(a));
        u64 y = f.sub(d, f.mul_raw(x, b));
        if (a != 1) ops.push_back(Scale{u, a});
        ops.push_back(AddMul{u, v, b});
        if (y != 1) ops.push_back(Scale{v, y});
        ops.push_back(AddMul{v, u, x});
    }
    if (permuted) ops.push_back(SwapOp{u, v});
    if (!inverse) return ops;

    // The inverse application is the reversed sequence with each op undone.
    std::vector<ElementaryOp> inv;
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
        std::visit(
            [&](const auto& o) {
                using T = std::decay_t<decltype(o)>;
                if constexpr (std::is_same_v<T, Scale>)
                    inv.push_back(ScaleInv{o.dst, o.coeff});
                else if constexpr (std::is_same_v<T, ScaleInv>)
                    inv.push_back(Scale{o.dst, o.coeff});
                else if constexpr (std::is_same_v<T, AddMul>)
                    inv.push_back(AddMul{o.dst, o.src, f.neg(o.coeff)});
                else
                    inv.push_back(o);
            },
            *it);
    }
    return inv;
}

slp::Program generate_inplace_2d(const FieldCtx& f, const BilinearRep2& rep) {
    validate(rep);
    const Mat &al = rep.alpha, &be = rep.beta, &mu = rep.mu2;
    const std::size_t t = rep.products();
    std::vector<PivotPair> pairs = check_column_pairs(f, mu);
    Program prog(f.p(), al.cols(), be.cols(), mu.rows());

    for (std::size_t l = 0; l < t; ++l) {
        std::size_t i = emit_fold(prog, f, al, l, Bank::A, false);
        std::size_t j = emit_fold(prog, f, be, l, Bank::B, false);

        const auto [k, fi] = pairs[l];
        RegRef ck{Bank::C, static_cast<std::uint32_t>(k)};
        RegRef cf{Bank::C, static_cast<std::uint32_t>(fi)};
        std::array<u64, 4> m{mu.at(k, 2 * l), mu.at(k, 2 * l + 1), mu.at(fi, 2 * l),
                             mu.at(fi, 2 * l + 1)};

        for (const auto& op : emit_apply_2x2(f, m, ck, cf, true)) prog.push(op);
        for (std::size_t r = 0; r < mu.rows(); ++r) {
            if (r == k || r == fi || mu.at(r, 2 * l) == 0) continue;
            prog.push(AddMul{{Bank::C, static_cast<std::uint32_t>(r)}, ck, f.neg(mu.at(r, 2 * l))});
        }
        for (std::size_t r = 0; r < mu.rows(); ++r) {
            if (r == k || r == fi || mu.at(r, 2 * l + 1) == 0) continue;
            prog.push(
                AddMul{{Bank::C, static_cast<std::uint32_t>(r)}, cf, f.neg(mu.at(r, 2 * l + 1))});
        }

        prog.push(MulAcc2{ck, cf,
                          {Bank::A, static_cast<std::uint32_t>(i)},
                          {Bank::B, static_cast<std::uint32_t>(j)}});

        for (std::size_t r = 0; r < mu.rows(); ++r) {
            if (r == k || r == fi || mu.at(r, 2 * l + 1) == 0) continue;
            prog.push(AddMul{{Bank::C, static_cast<std::uint32_t>(r)}, cf, mu.at(r, 2 * l + 1)});
        }
        for (std::size_t r = 0; r < mu.rows(); ++r) {
            if (r == k || r == fi || mu.at(r, 2 * l) == 0) continue;
            prog.push(AddMul{{Bank::C, static_cast<std::uint32_t>(r)}, ck, mu.at(r, 2 * l)});
        }
        for (const auto& op : emit_apply_2x2(f, m, ck, cf, false)) prog.push(op);

        emit_fold(prog, f, be, l, Bank::B, true);
        emit_fold(prog, f, al, l, Bank::A, true);
    }
    return prog;
}

slp::OpCounts predicted_counts_2d(const FieldCtx& f, const BilinearRep2& rep) {
    validate(rep);
    const u64 t = rep.products();
    u64 nz = rep.alpha.nonzeros() + rep.beta.nonzeros() + rep.mu2.nonzeros();
    u64 nt = rep.alpha.nontrivial(f) + rep.beta.nontrivial(f) + rep.mu2.nontrivial(f);
    return {t, 2 * (nz - t), 2 * (nt + 2 * t)};
}

slp::OpCounts nonrecursive_counts_2d(const FieldCtx& f, const BilinearRep2& rep) {
    validate(rep);
    const u64 t = rep.products();
    u64 ab = rep.alpha.nonzeros() + rep.beta.nonzeros();
    return {0, 2 * (ab - 2 * t) + 2 * (rep.mu2.nonzeros() - 2 * t),
            2 * (rep.alpha.nontrivial(f) + rep.beta.nontrivial(f) + rep.mu2.nontrivial(f))};
}

slp::OpCounts emitted_counts_2d(const FieldCtx& f, const BilinearRep2& rep) {
    validate(rep);
    const Mat& mu = rep.mu2;
    std::vector<PivotPair> pairs = check_column_pairs(f, mu);
    OpCounts n;
    n.mul = rep.products();
    n.add = 2 * n.mul;  // each MulAcc2 accumulates into two registers
    // Folds: one AddMul per non-pivot nonzero, twice (do + undo).
    auto fold_costs = [&](const Mat& m) {
        for (std::size_t r = 0; r < m.rows(); ++r) {
            std::size_t piv = pick_pivot_in_row(f, m, r);
            for (std::size_t c = 0; c < m.cols(); ++c) {
                u64 v = m.at(r, c);
                if (v == 0) continue;
                if (c == piv) {
                    if (!f.is_one_or_minus_one(v)) n.sca += 2;
                } else {
                    n.add += 2;
                    if (!f.is_one_or_minus_one(v)) n.sca += 2;
                }
            }
        }
    };
    fold_costs(rep.alpha);
    fold_costs(rep.beta);
    for (std::size_t l = 0; l < rep.products(); ++l) {
        const auto [k, fi] = pairs[l];
        for (std::size_t c = 2 * l; c <= 2 * l + 1; ++c) {
            for (std::size_t r = 0; r < mu.rows(); ++r) {
                u64 v = mu.at(r, c);
                if (v == 0 || r == k || r == fi) continue;
                n.add += 2;
                if (!f.is_one_or_minus_one(v)) n.sca += 2;
            }
        }
        std::array<u64, 4> m{mu.at(k, 2 * l), mu.at(k, 2 * l + 1), mu.at(fi, 2 * l),
                             mu.at(fi, 2 * l + 1)};
        for (bool inverse : {true, false}) {
            auto ops = emit_apply_2x2(f, m, {Bank::C, 0}, {Bank::C, 1}, inverse);
            Program tmp(f.p(), 0, 0, 2);
            for (const auto& op : ops) tmp.push(op);
            OpCounts oc = count_ops(tmp);
            n.add += oc.add;
            n.sca += oc.sca;
        }
    }
    return n;
}

std::vector<u64> oracle_bilinear(const FieldCtx& f, const BilinearRep& rep,
                                 std::span<const u64> a, std::span<const u64> b,
                                 std::span<const u64> c) {
    std::vector<u64> out(c.begin(), c.end());
    for (std::size_t l = 0; l < rep.products(); ++l) {
        u64 la = 0, lb = 0;
        for (std::size_t i = 0; i < a.size(); ++i) la = f.add(la, f.mul_raw(rep.alpha.at(l, i), a[i]));
        for (std::size_t j = 0; j < b.size(); ++j) lb = f.add(lb, f.mul_raw(rep.beta.at(l, j), b[j]));
        u64 m = f.mul_raw(la, lb);
        for (std::size_t k = 0; k < out.size(); ++k)
            out[k] = f.add(out[k], f.mul_raw(rep.mu.at(k, l), m));
    }
    return out;
}

std::vector<u64> oracle_bilinear_2d(const FieldCtx& f, const BilinearRep2& rep,
                                    std::span<const u64> a, std::span<const u64> b,
                                    std::span<const u64> c) {
    std::vector<u64> out(c.begin(), c.end());
    for (std::size_t l = 0; l < rep.products(); ++l) {
        u64 la = 0, lb = 0;
        for (std::size_t i = 0; i < a.size(); ++i) la = f.add(la, f.mul_raw(rep.alpha.at(l, i), a[i]));
        for (std::size_t j = 0; j < b.size(); ++j) lb = f.add(lb, f.mul_raw(rep.beta.at(l, j), b[j]));
        u64 m = f.mul_raw(la, lb);
        // Scalar model: the product's low and high halves coincide.
        for (std::size_t k = 0; k < out.size(); ++k) {
            out[k] = f.add(out[k], f.mul_raw(rep.mu2.at(k, 2 * l), m));
            out[k] = f.add(out[k], f.mul_raw(rep.mu2.at(k, 2 * l + 1), m));
        }
    }
    return out;
}

BilinearRep strassen_rep(const FieldCtx& f) {
    BilinearRep r;
    r.mu = Mat::from_signed(f, 4, 7,
                            {1, 1, 0, 0, 0, 0, 0,    //
                             1, 0, -1, 0, 1, 0, -1,  //
                             1, 0, 0, 1, 0, 1, -1,   //
                             1, 0, 0, 0, 1, 1, -1});
    r.alpha = Mat::from_signed(f, 7, 4,
                               {1, 0, 0, 0,    //
                                0, 1, 0, 0,    //
                                -1, -1, 1, 1,  //
                                0, 0, 0, 1,    //
                                0, 0, 1, 1,    //
                                -1, 0, 1, 0,   //
                                -1, 0, 1, 1});
    r.beta = Mat::from_signed(f, 7, 4,
                              {1, 0, 0, 0,    //
                               0, 0, 1, 0,    //
                               0, 0, 0, 1,    //
                               -1, 1, 1, -1,  //
                               -1, 1, 0, 0,   //
                               0, 1, 0, -1,   //
                               -1, 1, 0, -1});
    return r;
}

BilinearRep karatsuba_rep(const FieldCtx& f) {
    BilinearRep r;
    r.mu = Mat::from_signed(f, 3, 3, {1, 0, 0, 1, 1, -1, 0, 1, 0});
    r.alpha = Mat::from_signed(f, 3, 2, {1, 0, 0, 1, 1, -1});
    r.beta = r.alpha;
    return r;
}

BilinearRep toom3_rep(const FieldCtx& f) {
    if (f.p() == 3) throw UnsupportedCharacteristic("Toom-3 needs 2, 3 and 6 invertible");
    BilinearRep r;
    // Interpolation at 0, 1, -1, 2, infinity; mu is the inverse of the
    // Vandermonde matrix of those points.
    const u64 i2 = f.inv(2), i3 = f.inv(3), i6 = f.inv(6);
    auto neg = [&](u64 x) { return f.neg(x); };
    r.mu = Mat(5, 5);
    const u64 entries[5][5] = {
        {1, 0, 0, 0, 0},
        {neg(i2), 1, neg(i3), neg(i6), 2},
        {f.p() - 1, i2, i2, 0, f.p() - 1},
        {i2, neg(i2), neg(i6), i6, f.p() - 2},
        {0, 0, 0, 0, 1},
    };
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) r.mu.at(i, j) = entries[i][j];
    r.alpha = Mat::from_signed(f, 5, 3, {1, 0, 0, 1, 1, 1, 1, -1, 1, 1, 2, 4, 0, 0, 1});
    r.beta = r.alpha;
    return r;
}

BilinearRep identity_rep(const FieldCtx& f) {
    BilinearRep r;
    r.mu = Mat::from_signed(f, 1, 1, {1});
    r.alpha = r.mu;
    r.beta = r.mu;
    return r;
}

BilinearRep2 to_rep2(const BilinearRep& rep) {
    return {rep.alpha, rep.beta, expand_mu(rep.mu)};
}

}  // namespace ipmul::gen
