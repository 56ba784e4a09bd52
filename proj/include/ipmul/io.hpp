#pragma once

#include <string>
#include <vector>

#include "ipmul/bilinear.hpp"

namespace ipmul::io {

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Coefficient-matrix file: three blocks headed by lines '#alpha', '#beta'
// and '#mu' (or '#mu2'); each block is '<rows> <cols>' followed by
// row-major decimal entries.  Negative entries are reduced mod p on load.
struct HmFile {
    gen::Mat alpha, beta, mu;
    bool mu_is_2d = false;
};
HmFile load_hm(const std::string& path, const FieldCtx& f);

// Matrix data file: '<rows> <cols>' then row-major entries.
struct MatrixData {
    std::size_t rows = 0, cols = 0;
    std::vector<u64> v;
};
MatrixData load_matrix(const std::string& path, const FieldCtx& f);
void save_matrix(const std::string& path, const MatrixData& m);

// Polynomial data file: '<len>' then ascending coefficients.
std::vector<u64> load_poly(const std::string& path, const FieldCtx& f);
void save_poly(const std::string& path, const std::vector<u64>& coeffs);

// Dispatch helper for operand files: a matrix file holds rows*cols + 2
// numbers, a polynomial file len + 1; the counts never coincide.
bool looks_like_matrix(const std::string& path);

}  // namespace ipmul::io
