#include "ipmul/slp.hpp"

#include <charconv>
#include <random>
#include <sstream>

namespace ipmul::slp {

namespace {

const char* bank_letter(Bank b) {
    switch (b) {
        case Bank::A: return "a";
        case Bank::B: return "b";
        default: return "c";
    }
}

std::string reg_name(RegRef r) { return bank_letter(r.bank) + std::to_string(r.index); }

}  // namespace

void Program::push(ElementaryOp op) {
    auto check = [&](RegRef r) {
        if (r.index >= bank_size(r.bank))
            throw ShapeMismatch("register " + reg_name(r) + " out of range");
    };
    std::visit(
        [&](const auto& o) {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, AddMul>) {
                check(o.dst);
                check(o.src);
                if (o.dst == o.src) throw ShapeMismatch("AddMul dst == src");
            } else if constexpr (std::is_same_v<T, Scale> || std::is_same_v<T, ScaleInv>) {
                check(o.dst);
                if (o.coeff % p_ == 0) throw ZeroInverse();
            } else if constexpr (std::is_same_v<T, SwapOp>) {
                check(o.r1);
                check(o.r2);
            } else if constexpr (std::is_same_v<T, MulAcc>) {
                check(o.dst);
                check(o.lhs);
                check(o.rhs);
            } else {
                check(o.dst_lo);
                check(o.dst_hi);
                check(o.lhs);
                check(o.rhs);
            }
        },
        op);
    ops_.push_back(op);
}

void execute(const Program& prog, const FieldCtx& f, std::span<u64> a, std::span<u64> b,
             std::span<u64> c) {
    if (a.size() != prog.bank_size(Bank::A) || b.size() != prog.bank_size(Bank::B) ||
        c.size() != prog.bank_size(Bank::C))
        throw ShapeMismatch("bank lengths do not match program");
    auto reg = [&](RegRef r) -> u64& {
        switch (r.bank) {
            case Bank::A: return a[r.index];
            case Bank::B: return b[r.index];
            default: return c[r.index];
        }
    };
    u64 prod = 0;  // the single scratch of the register model
    for (const ElementaryOp& op : prog.ops()) {
        std::visit(
            [&](const auto& o) {
                using T = std::decay_t<decltype(o)>;
                if constexpr (std::is_same_v<T, AddMul>) {
                    reg(o.dst) = f.add(reg(o.dst), f.scale(reg(o.src), o.coeff));
                } else if constexpr (std::is_same_v<T, Scale>) {
                    reg(o.dst) = f.scale(reg(o.dst), o.coeff);
                } else if constexpr (std::is_same_v<T, ScaleInv>) {
                    reg(o.dst) = f.scale(reg(o.dst), f.inv(o.coeff));
                } else if constexpr (std::is_same_v<T, SwapOp>) {
                    std::swap(reg(o.r1), reg(o.r2));
                } else if constexpr (std::is_same_v<T, MulAcc>) {
                    prod = f.mul(reg(o.lhs), reg(o.rhs));
                    reg(o.dst) = f.add(reg(o.dst), prod);
                } else {
                    prod = f.mul(reg(o.lhs), reg(o.rhs));
                    reg(o.dst_lo) = f.add(reg(o.dst_lo), prod);
                    reg(o.dst_hi) = f.add(reg(o.dst_hi), prod);
                }
            },
            op);
    }
}

OpCounts count_ops(const Program& prog) {
    OpCounts n;
    const u64 p = prog.modulus();
    auto is_unit = [&](u64 c) { return c == 1 || c == p - 1; };
    for (const ElementaryOp& op : prog.ops()) {
        std::visit(
            [&](const auto& o) {
                using T = std::decay_t<decltype(o)>;
                if constexpr (std::is_same_v<T, AddMul>) {
                    n.add += 1;
                    if (!is_unit(o.coeff)) n.sca += 1;
                } else if constexpr (std::is_same_v<T, Scale> || std::is_same_v<T, ScaleInv>) {
                    if (!is_unit(o.coeff)) n.sca += 1;
                } else if constexpr (std::is_same_v<T, SwapOp>) {
                    // free: variable-switching is never priced
                } else if constexpr (std::is_same_v<T, MulAcc>) {
                    n.mul += 1;
                    n.add += 1;
                } else {
                    n.mul += 1;
                    n.add += 2;
                }
            },
            op);
    }
    return n;
}

std::string render(const Program& prog) {
    std::ostringstream out;
    const u64 p = prog.modulus();
    out << "# banks " << prog.bank_size(Bank::A) << ' ' << prog.bank_size(Bank::B) << ' '
        << prog.bank_size(Bank::C) << '\n';
    for (const ElementaryOp& op : prog.ops()) {
        std::visit(
            [&](const auto& o) {
                using T = std::decay_t<decltype(o)>;
                if constexpr (std::is_same_v<T, AddMul>) {
                    if (o.coeff == 1)
                        out << reg_name(o.dst) << " += " << reg_name(o.src);
                    else if (o.coeff == p - 1)
                        out << reg_name(o.dst) << " -= " << reg_name(o.src);
                    else
                        out << reg_name(o.dst) << " += " << o.coeff << '*' << reg_name(o.src);
                } else if constexpr (std::is_same_v<T, Scale>) {
                    out << reg_name(o.dst) << " *= " << o.coeff;
                } else if constexpr (std::is_same_v<T, ScaleInv>) {
                    out << reg_name(o.dst) << " /= " << o.coeff;
                } else if constexpr (std::is_same_v<T, SwapOp>) {
                    out << "swap " << reg_name(o.r1) << ' ' << reg_name(o.r2);
                } else if constexpr (std::is_same_v<T, MulAcc>) {
                    out << reg_name(o.dst) << " += " << reg_name(o.lhs) << '*' << reg_name(o.rhs);
                } else {
                    out << '(' << reg_name(o.dst_lo) << ',' << reg_name(o.dst_hi)
                        << ") += " << reg_name(o.lhs) << '*' << reg_name(o.rhs);
                }
            },
            op);
        out << '\n';
    }
    return out.str();
}

namespace {

struct Cursor {
    std::string_view s;
    std::size_t line;

    void skip_ws() {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    }
    bool eat(char c) {
        skip_ws();
        if (!s.empty() && s.front() == c) {
            s.remove_prefix(1);
            return true;
        }
        return false;
    }
    bool eat(std::string_view tok) {
        skip_ws();
        if (s.substr(0, tok.size()) == tok) {
            s.remove_prefix(tok.size());
            return true;
        }
        return false;
    }
    std::optional<RegRef> reg() {
        skip_ws();
        if (s.empty()) return std::nullopt;
        Bank bank;
        switch (s.front()) {
            case 'a': bank = Bank::A; break;
            case 'b': bank = Bank::B; break;
            case 'c': bank = Bank::C; break;
            default: return std::nullopt;
        }
        std::size_t i = 1;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        if (i == 1) return std::nullopt;
        std::uint32_t idx = 0;
        std::from_chars(s.data() + 1, s.data() + i, idx);
        s.remove_prefix(i);
        return RegRef{bank, idx};
    }
    std::optional<u64> number() {
        skip_ws();
        std::size_t i = 0;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        if (i == 0) return std::nullopt;
        u64 v = 0;
        std::from_chars(s.data(), s.data() + i, v);
        s.remove_prefix(i);
        return v;
    }
    [[noreturn]] void fail(const std::string& msg) { throw ParseError(line, msg); }
};

}  // namespace

Program parse(const std::string& text, u64 modulus) {
    const u64 p = modulus;
    std::size_t a_size = 0, b_size = 0, c_size = 0;
    bool sized = false;
    struct Pending {
        ElementaryOp op;
        std::size_t line;
    };
    std::vector<Pending> pend;
    auto bump = [&](RegRef r) {
        std::size_t need = r.index + 1;
        auto& sz = r.bank == Bank::A ? a_size : r.bank == Bank::B ? b_size : c_size;
        if (sz < need) sz = need;
    };

    std::istringstream in(text);
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        Cursor c{raw, lineno};
        c.skip_ws();
        if (c.s.empty()) continue;
        if (c.s.front() == '#') {
            std::istringstream hdr{std::string(c.s.substr(1))};
            std::string word;
            if (hdr >> word && word == "banks") {
                if (hdr >> a_size >> b_size >> c_size) sized = true;
            }
            continue;
        }
        if (c.eat("swap")) {
            auto r1 = c.reg();
            auto r2 = c.reg();
            if (!r1 || !r2) c.fail("expected 'swap <reg> <reg>'");
            bump(*r1);
            bump(*r2);
            pend.push_back({SwapOp{*r1, *r2}, lineno});
            continue;
        }
        if (c.eat('(')) {
            auto lo = c.reg();
            if (!lo || !c.eat(',')) c.fail("expected '(<reg>,<reg>)'");
            auto hi = c.reg();
            if (!hi || !c.eat(')')) c.fail("expected '(<reg>,<reg>)'");
            if (!c.eat("+=")) c.fail("expected '+=' after pair");
            auto lhs = c.reg();
            if (!lhs || !c.eat('*')) c.fail("expected '<reg>*<reg>'");
            auto rhs = c.reg();
            if (!rhs) c.fail("expected '<reg>*<reg>'");
            bump(*lo);
            bump(*hi);
            bump(*lhs);
            bump(*rhs);
            pend.push_back({MulAcc2{*lo, *hi, *lhs, *rhs}, lineno});
            continue;
        }
        auto dst = c.reg();
        if (!dst) c.fail("expected a register");
        bump(*dst);
        auto accum_rhs = [&](bool minus) {
            if (auto n = c.number()) {
                // '<reg> (+|-)= <coeff>*<reg>'
                if (!c.eat('*')) c.fail("expected '*' after coefficient");
                auto src = c.reg();
                if (!src) c.fail("expected source register");
                bump(*src);
                u64 coeff = *n % p;
                if (minus && coeff != 0) coeff = p - coeff;
                pend.push_back({AddMul{*dst, *src, coeff}, lineno});
            } else if (auto r1 = c.reg()) {
                bump(*r1);
                if (c.eat('*')) {
                    auto r2 = c.reg();
                    if (!r2) c.fail("expected rhs register");
                    bump(*r2);
                    if (minus) c.fail("'-=' cannot take a product");
                    pend.push_back({MulAcc{*dst, *r1, *r2}, lineno});
                } else {
                    pend.push_back({AddMul{*dst, *r1, minus ? p - 1 : 1}, lineno});
                }
            } else {
                c.fail("expected coefficient or register");
            }
        };
        if (c.eat("+=")) {
            accum_rhs(false);
        } else if (c.eat("-=")) {
            accum_rhs(true);
        } else if (c.eat("*=")) {
            auto n = c.number();
            if (!n) c.fail("expected coefficient");
            pend.push_back({Scale{*dst, *n % p}, lineno});
        } else if (c.eat("/=")) {
            auto n = c.number();
            if (!n) c.fail("expected coefficient");
            pend.push_back({ScaleInv{*dst, *n % p}, lineno});
        } else {
            c.fail("expected one of += -= *= /=");
        }
    }

    Program prog(p, a_size, b_size, c_size);
    (void)sized;
    for (const Pending& q : pend) {
        try {
            prog.push(q.op);
        } catch (const std::exception& e) {
            throw ParseError(q.line, e.what());
        }
    }
    return prog;
}

VerifyReport verify_restoration(const Program& prog, const FieldCtx& f, const Oracle& oracle,
                                u64 trials, u64 seed) {
    VerifyReport rep;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<u64> pick(0, f.p() - 1);
    std::vector<u64> a(prog.bank_size(Bank::A)), b(prog.bank_size(Bank::B)),
        c(prog.bank_size(Bank::C));
    auto dump = [](std::span<const u64> v) {
        std::string s = "[";
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
        return s + "]";
    };
    for (u64 t = 0; t < trials; ++t) {
        for (auto& x : a) x = pick(rng);
        for (auto& x : b) x = pick(rng);
        for (auto& x : c) x = pick(rng);
        std::vector<u64> a0 = a, b0 = b, c0 = c;
        execute(prog, f, a, b, c);
        std::vector<u64> want = oracle(a0, b0, c0);
        rep.trials_run = t + 1;
        std::string what;
        if (a != a0)
            what = "bank a not restored: before " + dump(a0) + " after " + dump(a);
        else if (b != b0)
            what = "bank b not restored: before " + dump(b0) + " after " + dump(b);
        else if (c != want)
            what = "bank c mismatch: inputs a=" + dump(a0) + " b=" + dump(b0) + " c=" + dump(c0) +
                   " got " + dump(c) + " want " + dump(want);
        if (!what.empty()) {
            rep.pass = false;
            rep.failure = "trial " + std::to_string(t) + ": " + what;
            return rep;
        }
    }
    return rep;
}

}  // namespace ipmul::slp
