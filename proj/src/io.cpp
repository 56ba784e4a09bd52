#include "ipmul/io.hpp"

#include <array>
#include <fstream>
#include <sstream>

namespace ipmul::io {

namespace {

std::string read_all(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<i64> numbers_of(const std::string& text) {
    std::vector<i64> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.front() == '#') continue;
        std::istringstream ls(line);
        i64 v;
        while (ls >> v) out.push_back(v);
    }
    return out;
}

gen::Mat mat_from(const std::vector<i64>& nums, std::size_t& pos, const FieldCtx& f,
                  const std::string& what) {
    if (pos + 2 > nums.size()) throw IoError("missing dimensions for " + what);
    i64 rows = nums[pos];
    i64 cols = nums[pos + 1];
    pos += 2;
    if (rows <= 0 || cols <= 0) throw IoError("bad dimensions for " + what);
    if (pos + std::size_t(rows * cols) > nums.size())
        throw IoError("missing entries for " + what);
    gen::Mat m(rows, cols);
    for (i64 r = 0; r < rows; ++r)
        for (i64 c = 0; c < cols; ++c) m.at(r, c) = f.from_signed(nums[pos++]);
    return m;
}

}  // namespace

HmFile load_hm(const std::string& path, const FieldCtx& f) {
    std::string text = read_all(path);
    // Split on the three marker lines.
    std::istringstream in(text);
    std::string line;
    int section = -1;
    std::array<std::string, 3> body;
    bool mu2 = false;
    while (std::getline(in, line)) {
        std::string t = line;
        while (!t.empty() && (t.back() == ' ' || t.back() == '\r' || t.back() == '\t'))
            t.pop_back();
        if (t == "#alpha") {
            section = 0;
            continue;
        }
        if (t == "#beta") {
            section = 1;
            continue;
        }
        if (t == "#mu" || t == "#mu2") {
            section = 2;
            mu2 = t == "#mu2";
            continue;
        }
        if (section >= 0) body[section] += line + "\n";
    }
    if (section < 2) throw IoError(path + ": expected #alpha, #beta and #mu blocks");
    HmFile out;
    out.mu_is_2d = mu2;
    for (int s = 0; s < 3; ++s) {
        std::vector<i64> nums = numbers_of(body[s]);
        std::size_t pos = 0;
        gen::Mat m = mat_from(nums, pos, f, s == 0 ? "alpha" : s == 1 ? "beta" : "mu");
        if (pos != nums.size()) throw IoError(path + ": trailing numbers in a block");
        (s == 0 ? out.alpha : s == 1 ? out.beta : out.mu) = m;
    }
    return out;
}

MatrixData load_matrix(const std::string& path, const FieldCtx& f) {
    std::vector<i64> nums = numbers_of(read_all(path));
    if (nums.size() < 2) throw IoError(path + ": expected '<rows> <cols>' header");
    i64 rows = nums[0], cols = nums[1];
    if (rows <= 0 || cols <= 0 || nums.size() != std::size_t(rows * cols) + 2)
        throw IoError(path + ": entry count does not match the header");
    MatrixData m{std::size_t(rows), std::size_t(cols), {}};
    m.v.reserve(rows * cols);
    for (std::size_t i = 2; i < nums.size(); ++i) m.v.push_back(f.from_signed(nums[i]));
    return m;
}

void save_matrix(const std::string& path, const MatrixData& m) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << m.rows << ' ' << m.cols << '\n';
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t c = 0; c < m.cols; ++c)
            out << m.v[r * m.cols + c] << (c + 1 == m.cols ? '\n' : ' ');
    }
}

std::vector<u64> load_poly(const std::string& path, const FieldCtx& f) {
    std::vector<i64> nums = numbers_of(read_all(path));
    if (nums.empty()) throw IoError(path + ": expected '<len>' header");
    i64 len = nums[0];
    if (len <= 0 || nums.size() != std::size_t(len) + 1)
        throw IoError(path + ": coefficient count does not match the header");
    std::vector<u64> coeffs;
    coeffs.reserve(len);
    for (std::size_t i = 1; i < nums.size(); ++i) coeffs.push_back(f.from_signed(nums[i]));
    return coeffs;
}

void save_poly(const std::string& path, const std::vector<u64>& coeffs) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << coeffs.size() << '\n';
    for (std::size_t i = 0; i < coeffs.size(); ++i)
        out << coeffs[i] << (i + 1 == coeffs.size() ? '\n' : ' ');
}

bool looks_like_matrix(const std::string& path) {
    std::vector<i64> nums = numbers_of(read_all(path));
    if (nums.size() >= 2 && nums[0] > 0 && nums[1] > 0 &&
        nums.size() == std::size_t(nums[0] * nums[1]) + 2)
        return true;
    return false;
}

}  // namespace ipmul::io
