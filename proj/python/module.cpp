#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ipmul/bilinear.hpp"
#include "ipmul/matmul.hpp"
#include "ipmul/polymul.hpp"
#include "ipmul/slp.hpp"
#include "ipmul/transform.hpp"

namespace py = pybind11;
using namespace ipmul;

namespace {

using Rows = std::vector<std::vector<long long>>;

gen::Mat mat_from_rows(const FieldCtx& f, const Rows& rows) {
    if (rows.empty()) throw ShapeMismatch("empty matrix");
    gen::Mat m(rows.size(), rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != rows[0].size()) throw ShapeMismatch("ragged matrix");
        for (std::size_t c = 0; c < rows[r].size(); ++c) m.at(r, c) = f.from_signed(rows[r][c]);
    }
    return m;
}

gen::BilinearRep builtin_rep(const FieldCtx& f, const std::string& name) {
    if (name == "strassen") return gen::strassen_rep(f);
    if (name == "karatsuba") return gen::karatsuba_rep(f);
    if (name == "toom3") return gen::toom3_rep(f);
    if (name == "identity") return gen::identity_rep(f);
    throw py::value_error("unknown formula '" + name + "'");
}

py::dict counts_dict(const slp::OpCounts& n) {
    py::dict d;
    d["mul"] = n.mul;
    d["add"] = n.add;
    d["sca"] = n.sca;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "in-place accumulating multiplication kernels over prime fields";

    py::register_exception<ShapeMismatch>(m, "ShapeMismatchError", PyExc_ValueError);
    py::register_exception<NoSuchRoot>(m, "NoSuchRootError", PyExc_ValueError);

    py::class_<FieldCtx>(m, "Field")
        .def(py::init<u64>(), py::arg("p"))
        .def_property_readonly("p", &FieldCtx::p)
        .def_property_readonly("two_adicity", &FieldCtx::two_adicity)
        .def("add", &FieldCtx::add)
        .def("sub", &FieldCtx::sub)
        .def("mul", &FieldCtx::mul)
        .def("inv", &FieldCtx::inv)
        .def("pow", &FieldCtx::pow)
        .def("principal_root", &FieldCtx::principal_root)
        .def("skew_unitary_pair",
             [](const FieldCtx& f) {
                 auto [a, b] = f.skew_unitary_pair();
                 return std::make_pair(a, b);
             })
        .def("__repr__", [](const FieldCtx& f) { return "Field(" + std::to_string(f.p()) + ")"; });

    m.def(
        "generate_program",
        [](const FieldCtx& f, const std::string& name, bool two_d) {
            gen::BilinearRep rep = builtin_rep(f, name);
            slp::Program prog =
                two_d ? gen::generate_inplace_2d(f, gen::to_rep2(rep)) : gen::generate_inplace(f, rep);
            return slp::render(prog);
        },
        py::arg("field"), py::arg("formula"), py::arg("two_d") = false,
        "Render the in-place program for a built-in formula.");

    m.def(
        "generate_program_from",
        [](const FieldCtx& f, const Rows& alpha, const Rows& beta, const Rows& mu, bool two_d) {
            gen::BilinearRep rep{mat_from_rows(f, alpha), mat_from_rows(f, beta),
                                 mat_from_rows(f, mu)};
            slp::Program prog =
                two_d ? gen::generate_inplace_2d(f, gen::to_rep2(rep)) : gen::generate_inplace(f, rep);
            return slp::render(prog);
        },
        py::arg("field"), py::arg("alpha"), py::arg("beta"), py::arg("mu"),
        py::arg("two_d") = false);

    m.def(
        "predicted_counts",
        [](const FieldCtx& f, const std::string& name) {
            return counts_dict(gen::predicted_counts(f, builtin_rep(f, name)));
        },
        py::arg("field"), py::arg("formula"));

    m.def(
        "program_counts",
        [](const FieldCtx& f, const std::string& name, bool two_d) {
            gen::BilinearRep rep = builtin_rep(f, name);
            slp::Program prog =
                two_d ? gen::generate_inplace_2d(f, gen::to_rep2(rep)) : gen::generate_inplace(f, rep);
            return counts_dict(slp::count_ops(prog));
        },
        py::arg("field"), py::arg("formula"), py::arg("two_d") = false);

    m.def(
        "run_program",
        [](const FieldCtx& f, const std::string& text, std::vector<u64> a, std::vector<u64> b,
           std::vector<u64> c) {
            slp::Program prog = slp::parse(text, f.p());
            slp::execute(prog, f, a, b, c);
            return py::make_tuple(a, b, c);
        },
        py::arg("field"), py::arg("program"), py::arg("a"), py::arg("b"), py::arg("c"),
        "Execute a rendered program on three scalar banks.");

    m.def(
        "mat_mul_acc",
        [](const FieldCtx& f, Rows a, Rows b, Rows c, int sign, std::size_t threshold,
           const std::string& algo) {
            auto flat = [&](const Rows& rows) {
                std::vector<u64> v;
                for (const auto& r : rows)
                    for (long long x : r) v.push_back(f.from_signed(x));
                return v;
            };
            std::size_t n = a.size(), k = a.empty() ? 0 : a[0].size(), mcols = b.empty() ? 0 : b[0].size();
            std::vector<u64> av = flat(a), bv = flat(b), cv = flat(c);
            auto aw = mat::MatView::full(av.data(), n, k);
            auto bw = mat::MatView::full(bv.data(), b.size(), mcols);
            auto cw = mat::MatView::full(cv.data(), c.size(), c.empty() ? 0 : c[0].size());
            if (algo == "strassen")
                mat::mm_acc_strassen(f, aw, bw, cw, sign, threshold);
            else if (algo == "classic")
                mat::mm_acc_classic(f, aw, bw, cw, sign);
            else if (algo == "square")
                mat::square_acc(f, aw, cw, sign, threshold);
            else if (algo == "syrk")
                mat::syrk_acc(f, aw, cw, f.skew_unitary_pair(), threshold);
            else
                throw py::value_error("unknown algo '" + algo + "'");
            Rows out(c.size(), std::vector<long long>(c.empty() ? 0 : c[0].size()));
            for (std::size_t i = 0; i < out.size(); ++i)
                for (std::size_t j = 0; j < out[i].size(); ++j)
                    out[i][j] = static_cast<long long>(cv[i * out[i].size() + j]);
            return out;
        },
        py::arg("field"), py::arg("a"), py::arg("b"), py::arg("c"), py::arg("sign") = 1,
        py::arg("threshold") = 8, py::arg("algo") = "strassen",
        "C += sign * A * B (or A*A^T / A^2 depending on algo); returns the new C.");

    m.def(
        "poly_mul_acc",
        [](const FieldCtx& f, std::vector<u64> a, std::vector<u64> b, std::vector<u64> c, int sign,
           std::size_t threshold, const std::string& algo) {
            if (algo == "karatsuba")
                poly::pm_acc_karatsuba(f, a, b, c, sign, threshold);
            else if (algo == "classic")
                poly::pm_acc_classic(f, a, b, c, sign);
            else if (algo == "toom3")
                poly::pm_acc_toom3(f, a, b, c, sign, threshold);
            else if (algo == "fft")
                fft::pm_acc_fft_pow2(f, a, b, c);
            else if (algo == "tft")
                fft::pm_acc_fft(f, a, b, c);
            else
                throw py::value_error("unknown algo '" + algo + "'");
            return c;
        },
        py::arg("field"), py::arg("a"), py::arg("b"), py::arg("c"), py::arg("sign") = 1,
        py::arg("threshold") = 4, py::arg("algo") = "karatsuba",
        "C += sign * A * B on coefficient vectors; returns the new C.");

    m.def(
        "brdft",
        [](const FieldCtx& f, std::vector<u64> v, unsigned p_exp, bool inverse) {
            fft::TwiddleCtx ctx(f, p_exp);
            unsigned l = 0;
            while ((std::size_t(1) << l) < v.size()) ++l;
            if (inverse)
                fft::brdft_inverse_overplace(v, ctx, l);
            else
                fft::brdft_overplace(v, ctx, l);
            return v;
        },
        py::arg("field"), py::arg("values"), py::arg("p_exp"), py::arg("inverse") = false,
        "Bit-reversed-order transform of a power-of-two-length vector.");
}
