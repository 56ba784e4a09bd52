#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>

#include "CLI11.hpp"
#include "ipmul/bilinear.hpp"
#include "ipmul/io.hpp"
#include "ipmul/matmul.hpp"
#include "ipmul/polymul.hpp"
#include "ipmul/slp.hpp"
#include "ipmul/transform.hpp"

using namespace ipmul;

namespace {

// Exit codes: 0 ok, 1 input error, 2 count mismatch, 3 verification
// failure, 4 required root of unity unavailable.
enum ExitCode { kOk = 0, kInputError = 1, kCountMismatch = 2, kVerifyFail = 3, kNoRoot = 4 };

struct HmOptions {
    std::string file;
    u64 modulus = 101;
    bool two_d = false;
};

// Loads the file and normalizes to either a 1D or 2D representation.
struct LoadedRep {
    bool is_2d;
    gen::BilinearRep rep;
    gen::BilinearRep2 rep2;
};

LoadedRep load_rep(const HmOptions& opt, const FieldCtx& f) {
    io::HmFile hm = io::load_hm(opt.file, f);
    LoadedRep out{opt.two_d || hm.mu_is_2d, {}, {}};
    if (hm.mu_is_2d) {
        out.rep2 = {hm.alpha, hm.beta, hm.mu};
        gen::validate(out.rep2);
    } else if (opt.two_d) {
        out.rep = {hm.alpha, hm.beta, hm.mu};
        gen::validate(out.rep);
        out.rep2 = gen::to_rep2(out.rep);
    } else {
        out.rep = {hm.alpha, hm.beta, hm.mu};
        gen::validate(out.rep);
    }
    return out;
}

void print_counts_row(const char* label, const slp::OpCounts& n) {
    std::printf("%-22s MUL %6llu  ADD %6llu  SCA %6llu\n", label,
                (unsigned long long)n.mul, (unsigned long long)n.add, (unsigned long long)n.sca);
}

int cmd_generate(const HmOptions& opt) {
    FieldCtx f(opt.modulus);
    LoadedRep lr = load_rep(opt, f);
    slp::Program prog =
        lr.is_2d ? gen::generate_inplace_2d(f, lr.rep2) : gen::generate_inplace(f, lr.rep);
    std::fputs(slp::render(prog).c_str(), stdout);
    return kOk;
}

int cmd_counts(const HmOptions& opt) {
    FieldCtx f(opt.modulus);
    LoadedRep lr = load_rep(opt, f);
    if (!lr.is_2d) {
        slp::OpCounts want = gen::predicted_counts(f, lr.rep);
        slp::OpCounts got = slp::count_ops(gen::generate_inplace(f, lr.rep));
        print_counts_row("predicted", want);
        print_counts_row("measured", got);
        return want == got ? kOk : kCountMismatch;
    }
    slp::OpCounts bound = gen::predicted_counts_2d(f, lr.rep2);
    slp::OpCounts want = gen::emitted_counts_2d(f, lr.rep2);
    slp::OpCounts got = slp::count_ops(gen::generate_inplace_2d(f, lr.rep2));
    slp::OpCounts generic = gen::nonrecursive_counts_2d(f, lr.rep2);
    slp::OpCounts got_nr{0, got.add - 2 * got.mul, got.sca};  // products excluded
    print_counts_row("cost-statement bound", bound);
    print_counts_row("predicted", want);
    print_counts_row("measured", got);
    print_counts_row("predicted non-rec", generic);
    print_counts_row("measured non-rec", got_nr);
    bool ok = want == got;
    if (opt.two_d) ok = ok && generic.add == got_nr.add && generic.sca == got_nr.sca;
    return ok ? kOk : kCountMismatch;
}

int cmd_verify(const HmOptions& opt, u64 trials, u64 seed) {
    FieldCtx f(opt.modulus);
    LoadedRep lr = load_rep(opt, f);
    slp::Program prog =
        lr.is_2d ? gen::generate_inplace_2d(f, lr.rep2) : gen::generate_inplace(f, lr.rep);
    slp::Oracle oracle;
    if (lr.is_2d)
        oracle = [&](auto a, auto b, auto c) { return gen::oracle_bilinear_2d(f, lr.rep2, a, b, c); };
    else
        oracle = [&](auto a, auto b, auto c) { return gen::oracle_bilinear(f, lr.rep, a, b, c); };
    slp::VerifyReport rep = slp::verify_restoration(prog, f, oracle, trials, seed);
    if (rep.pass) {
        std::printf("pass: %llu trials, inputs restored, outputs match the dense evaluation\n",
                    (unsigned long long)rep.trials_run);
        return kOk;
    }
    std::printf("FAIL: %s\n", rep.failure.c_str());
    return kVerifyFail;
}

std::vector<u64> random_residues(std::size_t n, u64 p, std::mt19937_64& rng) {
    std::uniform_int_distribution<u64> pick(0, p - 1);
    std::vector<u64> v(n);
    for (auto& x : v) x = pick(rng);
    return v;
}

// 0 means "not given": 8 for matrix kernels, 4 for polynomial ones.
std::size_t pick_threshold(std::size_t threshold, const std::string& algo) {
    if (threshold != 0) return threshold;
    bool poly = algo == "karatsuba" || algo == "toom3" || algo == "fft" || algo == "tft";
    return poly ? 4 : 8;
}

int cmd_mul(const std::string& algo, const std::string& a_path, const std::string& b_path,
            const std::string& c_path, const std::string& hm_path, u64 modulus,
            std::size_t threshold_arg, int sign) {
    FieldCtx f(modulus);
    const std::size_t threshold = pick_threshold(threshold_arg, algo);
    reset_field_tally();

    auto finish_matrix = [&](const io::MatrixData& c) {
        io::save_matrix(c_path, c);
        const FieldOpTally& t = field_tally();
        std::printf("MUL %llu ADD %llu SCA %llu\n", (unsigned long long)t.mul,
                    (unsigned long long)t.add, (unsigned long long)t.sca);
        return kOk;
    };
    auto finish_poly = [&](const std::vector<u64>& c) {
        io::save_poly(c_path, c);
        const FieldOpTally& t = field_tally();
        std::printf("MUL %llu ADD %llu SCA %llu\n", (unsigned long long)t.mul,
                    (unsigned long long)t.add, (unsigned long long)t.sca);
        return kOk;
    };

    bool matrix_domain = algo == "strassen" || algo == "syrk" || algo == "square" ||
                         (algo == "classic" && io::looks_like_matrix(a_path));

    if (algo == "bilinear" || algo == "bilinear2d") {
        LoadedRep lr = load_rep({hm_path, modulus, algo == "bilinear2d"}, f);
        std::vector<u64> a = io::load_poly(a_path, f);
        std::vector<u64> b = io::load_poly(b_path, f);
        std::vector<u64> c = io::load_poly(c_path, f);
        slp::Program prog =
            lr.is_2d ? gen::generate_inplace_2d(f, lr.rep2) : gen::generate_inplace(f, lr.rep);
        slp::execute(prog, f, a, b, c);
        return finish_poly(c);
    }

    if (matrix_domain) {
        io::MatrixData am = io::load_matrix(a_path, f);
        io::MatrixData cm = io::load_matrix(c_path, f);
        mat::MatView av = mat::MatView::full(am.v.data(), am.rows, am.cols);
        mat::MatView cv = mat::MatView::full(cm.v.data(), cm.rows, cm.cols);
        if (algo == "syrk") {
            mat::syrk_acc(f, av, cv, f.skew_unitary_pair(), threshold);
            return finish_matrix(cm);
        }
        if (algo == "square") {
            mat::square_acc(f, av, cv, sign, threshold);
            return finish_matrix(cm);
        }
        io::MatrixData bm = io::load_matrix(b_path, f);
        mat::MatView bv = mat::MatView::full(bm.v.data(), bm.rows, bm.cols);
        if (algo == "strassen")
            mat::mm_acc_strassen(f, av, bv, cv, sign, threshold);
        else
            mat::mm_acc_classic(f, av, bv, cv, sign);
        return finish_matrix(cm);
    }

    std::vector<u64> a = io::load_poly(a_path, f);
    std::vector<u64> b = io::load_poly(b_path, f);
    std::vector<u64> c = io::load_poly(c_path, f);
    if (algo == "classic")
        poly::pm_acc_classic(f, a, b, c, sign);
    else if (algo == "karatsuba")
        poly::pm_acc_karatsuba(f, a, b, c, sign, threshold);
    else if (algo == "toom3")
        poly::pm_acc_toom3(f, a, b, c, sign, threshold);
    else if (algo == "fft")
        fft::pm_acc_fft_pow2(f, a, b, c);
    else if (algo == "tft")
        fft::pm_acc_fft(f, a, b, c);
    else
        throw CLI::ValidationError("unknown algorithm '" + algo + "'");
    return finish_poly(c);
}

double fit_log2_slope(const std::vector<std::pair<double, double>>& pts) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double n = double(pts.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

int cmd_bench(const std::string& algo, const std::vector<std::size_t>& sizes, u64 modulus,
              std::size_t threshold_arg, u64 seed) {
    FieldCtx f(modulus);
    const std::size_t threshold = pick_threshold(threshold_arg, algo);
    std::mt19937_64 rng(seed);
    std::vector<std::pair<double, double>> mul_pts;
    std::printf("%8s %12s %12s %12s %10s\n", "size", "MUL", "ADD", "SCA", "ms");
    for (std::size_t n : sizes) {
        using clock = std::chrono::steady_clock;
        reset_field_tally();
        auto t0 = clock::now();
        if (algo == "strassen" || algo == "classic" || algo == "square" || algo == "syrk") {
            std::vector<u64> a = random_residues(n * n, f.p(), rng);
            std::vector<u64> b = random_residues(n * n, f.p(), rng);
            std::vector<u64> c = random_residues(n * n, f.p(), rng);
            auto av = mat::MatView::full(a.data(), n, n);
            auto bv = mat::MatView::full(b.data(), n, n);
            auto cv = mat::MatView::full(c.data(), n, n);
            if (algo == "strassen")
                mat::mm_acc_strassen(f, av, bv, cv, 1, threshold);
            else if (algo == "classic")
                mat::mm_acc_classic(f, av, bv, cv, 1);
            else if (algo == "square")
                mat::square_acc(f, av, cv, 1, threshold);
            else
                mat::syrk_acc(f, av, cv, f.skew_unitary_pair(), threshold);
        } else if (algo == "karatsuba" || algo == "toom3") {
            std::vector<u64> a = random_residues(n, f.p(), rng);
            std::vector<u64> b = random_residues(n, f.p(), rng);
            std::vector<u64> c = random_residues(2 * n - 1, f.p(), rng);
            if (algo == "karatsuba")
                poly::pm_acc_karatsuba(f, a, b, c, 1, threshold);
            else
                poly::pm_acc_toom3(f, a, b, c, 1, threshold);
        } else if (algo == "fft" || algo == "tft") {
            std::vector<u64> a = random_residues(n, f.p(), rng);
            std::vector<u64> b = random_residues(n, f.p(), rng);
            fft::transform_stats().reset();
            if (algo == "fft") {
                std::vector<u64> c = random_residues(2 * n, f.p(), rng);
                fft::pm_acc_fft_pow2(f, a, b, c);
            } else {
                std::vector<u64> c = random_residues(2 * n - 1, f.p(), rng);
                fft::pm_acc_fft(f, a, b, c);
            }
        } else {
            throw CLI::ValidationError("unknown algorithm '" + algo + "'");
        }
        auto ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
        const FieldOpTally& t = field_tally();
        std::printf("%8zu %12llu %12llu %12llu %10.3f", n, (unsigned long long)t.mul,
                    (unsigned long long)t.add, (unsigned long long)t.sca, ms);
        if (algo == "fft")
            std::printf("   transforms %llu", (unsigned long long)fft::transform_stats().calls);
        std::printf("\n");
        if (t.mul > 0 && n > 1) mul_pts.push_back({std::log2(double(n)), std::log2(double(t.mul))});
    }
    if (mul_pts.size() >= 2)
        std::printf("fitted MUL exponent: %.4f\n", fit_log2_slope(mul_pts));
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"in-place accumulating multiplication kernels over prime fields"};
    app.require_subcommand(1);

    HmOptions hm;
    u64 trials = 100, seed = 42;
    std::string algo = "classic", a_path, b_path, c_path, hm_path, sizes_arg = "16,32,64,128";
    std::size_t threshold = 0;  // per-domain default
    int sign = 1;

    auto add_hm = [&](CLI::App* sub, bool need_hm) {
        sub->add_option("--hm", hm.file, "coefficient-matrix file")->required(need_hm);
        sub->add_option("--modulus", hm.modulus, "odd prime modulus");
        sub->add_flag("--two-d", hm.two_d, "expand mu for two-register products");
    };
    CLI::App* g = app.add_subcommand("generate", "print the in-place program for a formula");
    add_hm(g, true);
    CLI::App* cnt = app.add_subcommand("counts", "predicted vs measured operation counts");
    add_hm(cnt, true);
    CLI::App* ver = app.add_subcommand("verify", "check restoration against the dense oracle");
    add_hm(ver, true);
    ver->add_option("--trials", trials);
    ver->add_option("--seed", seed);

    CLI::App* mul = app.add_subcommand("mul", "accumulate a product into a data file");
    mul->add_option("--algo", algo,
                    "classic|strassen|syrk|square|karatsuba|toom3|fft|tft|bilinear|bilinear2d");
    mul->add_option("-a", a_path)->required();
    mul->add_option("-b", b_path);
    mul->add_option("-c", c_path)->required();
    mul->add_option("--hm", hm_path, "formula file for bilinear/bilinear2d");
    mul->add_option("--modulus", hm.modulus);
    mul->add_option("--threshold", threshold, "recursion cutoff (default 8 matrix, 4 polynomial)");
    mul->add_option("--sign", sign)->check(CLI::IsMember({1, -1}));

    CLI::App* bench = app.add_subcommand("bench", "operation counts and wall time per size");
    bench->add_option("--algo", algo);
    bench->add_option("--sizes", sizes_arg, "comma-separated sizes");
    bench->add_option("--modulus", hm.modulus);
    bench->add_option("--threshold", threshold);
    bench->add_option("--seed", seed);

    CLI11_PARSE(app, argc, argv);

    try {
        if (g->parsed()) return cmd_generate(hm);
        if (cnt->parsed()) return cmd_counts(hm);
        if (ver->parsed()) return cmd_verify(hm, trials, seed);
        if (mul->parsed())
            return cmd_mul(algo, a_path, b_path, c_path, hm_path, hm.modulus, threshold, sign);
        if (bench->parsed()) {
            std::vector<std::size_t> sizes;
            std::stringstream ss(sizes_arg);
            std::string tok;
            while (std::getline(ss, tok, ',')) sizes.push_back(std::stoul(tok));
            return cmd_bench(algo, sizes, hm.modulus, threshold, seed);
        }
    } catch (const NoSuchRoot& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kNoRoot;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kInputError;
    }
    return kOk;
}
