#include "mmv/matrix.hpp"

#include "mmv/errors.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace mmv {

namespace {

std::uint64_t magnitude(std::int64_t v) noexcept {
    return v < 0 ? ~static_cast<std::uint64_t>(v) + 1 : static_cast<std::uint64_t>(v);
}

u128 sat_mul(u128 a, u128 b) noexcept {
    if (a != 0 && b > ~u128{0} / a) {
        return ~u128{0};
    }
    return a * b;
}

u128 sat_add(u128 a, u128 b) noexcept {
    return a > ~u128{0} - b ? ~u128{0} : a + b;
}

std::int64_t narrow(i128 v) {
    if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min()) {
        throw ResourceError("product entry does not fit in 64 bits");
    }
    return static_cast<std::int64_t>(v);
}

} // namespace

DenseIntMatrix::DenseIntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
    if (rows == 0 || cols == 0) {
        throw UsageError("matrix dimensions must be at least 1");
    }
    data_.assign(rows * cols, 0);
}

DenseIntMatrix DenseIntMatrix::identity(std::size_t n) {
    DenseIntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m.set(i, i, 1);
    }
    return m;
}

DenseIntMatrix DenseIntMatrix::from_rows(const std::vector<std::vector<std::int64_t>>& rows) {
    if (rows.empty()) {
        throw UsageError("matrix dimensions must be at least 1");
    }
    DenseIntMatrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.cols()) {
            throw UsageError("ragged rows");
        }
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            m.set(i, j, rows[i][j]);
        }
    }
    return m;
}

DenseIntMatrix DenseIntMatrix::from_rows(std::initializer_list<std::initializer_list<std::int64_t>> rows) {
    std::vector<std::vector<std::int64_t>> v;
    for (const auto& r : rows) {
        v.emplace_back(r);
    }
    return from_rows(v);
}

void DenseIntMatrix::set(std::size_t i, std::size_t j, std::int64_t v) noexcept {
    data_[i * cols_ + j] = v;
    max_abs_ = std::max(max_abs_, magnitude(v));
}

DenseIntMatrix DenseIntMatrix::transposed() const {
    DenseIntMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
            t.data_[j * rows_ + i] = data_[i * cols_ + j];
        }
    }
    t.max_abs_ = max_abs_;
    return t;
}

std::vector<Elem> DenseIntMatrix::reduced(const FieldCtx& ctx) const {
    std::vector<Elem> out(data_.size());
    for (std::size_t i = 0; i < data_.size(); ++i) {
        out[i] = ctx.from_int(data_[i]);
    }
    return out;
}

std::vector<Elem> DenseIntMatrix::reduced_transposed(const FieldCtx& ctx) const {
    std::vector<Elem> out(data_.size());
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
            out[j * rows_ + i] = ctx.from_int(data_[i * cols_ + j]);
        }
    }
    return out;
}

std::size_t DenseIntMatrix::count_differences(const DenseIntMatrix& other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw UsageError("dimension mismatch");
    }
    std::size_t count = 0;
    for (std::size_t i = 0; i < data_.size(); ++i) {
        count += data_[i] != other.data_[i] ? 1 : 0;
    }
    return count;
}

AugmentedPair::AugmentedPair(const DenseIntMatrix& a, const DenseIntMatrix& b, const DenseIntMatrix& c)
    : a_(&a), b_(&b), c_(&c) {
    if (a.cols() != b.rows() || a.rows() != c.rows() || b.cols() != c.cols() || !c.is_square()) {
        throw UsageError("augment needs A l x n, B n x l, C l x l");
    }
}

i128 AugmentedPair::inner_product(std::size_t i, std::size_t j) const {
    // Entries are below 2^63 in magnitude, so each product fits; only the
    // running sum can overflow, and only for absurd inputs.
    const auto row = a_->row(i);
    i128 acc = 0;
    for (std::size_t k = 0; k < row.size(); ++k) {
        const i128 term = static_cast<i128>(row[k]) * b_->at(k, j);
        if (__builtin_add_overflow(acc, term, &acc)) {
            throw ResourceError("inner product overflows 128 bits");
        }
    }
    return acc;
}

u128 AugmentedPair::magnitude_bound() const noexcept {
    return sat_add(sat_mul(sat_mul(n(), a_->max_abs()), b_->max_abs()), c_->max_abs());
}

DenseIntMatrix AugmentedPair::materialize_a() const {
    DenseIntMatrix m(ell(), inner());
    for (std::size_t i = 0; i < ell(); ++i) {
        for (std::size_t k = 0; k < inner(); ++k) {
            m.set(i, k, a_prime(i, k));
        }
    }
    return m;
}

DenseIntMatrix AugmentedPair::materialize_b() const {
    DenseIntMatrix m(inner(), ell());
    for (std::size_t k = 0; k < inner(); ++k) {
        for (std::size_t j = 0; j < ell(); ++j) {
            m.set(k, j, b_prime(k, j));
        }
    }
    return m;
}

std::array<SubmatrixId, 4> SubmatrixId::split() const {
    if (side < 2) {
        throw UsageError("cannot split a 1x1 submatrix");
    }
    const std::size_t h = side / 2;
    return {SubmatrixId{i_start, j_start, h}, SubmatrixId{i_start, j_start + h, h},
            SubmatrixId{i_start + h, j_start, h}, SubmatrixId{i_start + h, j_start + h, h}};
}

SubmatrixId SubmatrixId::child(std::size_t index) const {
    return split()[index];
}

std::size_t SubmatrixId::child_index(std::size_t i, std::size_t j) const noexcept {
    const std::size_t h = side / 2;
    return (i - i_start >= h ? 2 : 0) + (j - j_start >= h ? 1 : 0);
}

std::string to_string(const SubmatrixId& s) {
    std::ostringstream os;
    os << "rows " << s.i_start + 1 << "-" << s.i_start + s.side << " cols " << s.j_start + 1 << "-" << s.j_start + s.side;
    return os.str();
}

PaddedTriple pad_to_pow2(const DenseIntMatrix& a, const DenseIntMatrix& b, const DenseIntMatrix& c) {
    const std::size_t n = a.rows();
    if (!a.is_square() || !b.is_square() || !c.is_square() || b.rows() != n || c.rows() != n) {
        throw UsageError("pad_to_pow2 needs square matrices of one dimension");
    }
    const std::size_t np = std::bit_ceil(n);
    auto pad = [&](const DenseIntMatrix& m) {
        if (np == n) {
            return m;
        }
        DenseIntMatrix out(np, np);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                out.set(i, j, m.at(i, j));
            }
        }
        return out;
    };
    return {pad(a), pad(b), pad(c), np};
}

namespace {

std::vector<std::string_view> tokens(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) {
            ++i;
        }
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') {
            ++j;
        }
        if (j > i) {
            out.push_back(line.substr(i, j - i));
        }
        i = j;
    }
    return out;
}

std::int64_t parse_int(std::string_view tok, std::size_t line) {
    std::string_view digits = tok;
    if (digits.size() > 1 && digits.front() == '+' && digits[1] != '-') {
        digits.remove_prefix(1);
    }
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty()) {
        throw ParseError(line, "not an integer: '" + std::string(tok) + "'");
    }
    return v;
}

} // namespace

DenseIntMatrix read_matrix(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        auto tok = tokens(line);
        if (!tok.empty() && tok.front().front() == '#') {
            continue;
        }
        if (tok.size() != 2) {
            throw ParseError(line_no, "expected header \"ROWS COLS\"");
        }
        const std::int64_t r = parse_int(tok[0], line_no);
        const std::int64_t c = parse_int(tok[1], line_no);
        if (r < 1 || c < 1) {
            throw ParseError(line_no, "dimensions must be positive");
        }
        if (static_cast<std::uint64_t>(r) * static_cast<std::uint64_t>(c) > (std::uint64_t{1} << 32)) {
            throw ParseError(line_no, "matrix too large");
        }
        rows = static_cast<std::size_t>(r);
        cols = static_cast<std::size_t>(c);
        have_header = true;
        break;
    }
    if (!have_header) {
        throw ParseError(line_no + 1, "missing header");
    }
    DenseIntMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!std::getline(in, line)) {
            throw ParseError(line_no + 1, "expected " + std::to_string(rows) + " rows, got " + std::to_string(i));
        }
        ++line_no;
        auto tok = tokens(line);
        if (tok.size() != cols) {
            throw ParseError(line_no, "expected " + std::to_string(cols) + " entries, got " +
                                          std::to_string(tok.size()));
        }
        for (std::size_t j = 0; j < cols; ++j) {
            const std::int64_t v = parse_int(tok[j], line_no);
            if (v >= kMaxParsedEntry || v <= -kMaxParsedEntry) {
                throw ParseError(line_no, "entry magnitude must be below 2^40");
            }
            m.set(i, j, v);
        }
    }
    while (std::getline(in, line)) {
        ++line_no;
        if (!tokens(line).empty()) {
            throw ParseError(line_no, "unexpected content after the last row");
        }
    }
    return m;
}

DenseIntMatrix read_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot open " + path);
    }
    return read_matrix(in);
}

void write_matrix(std::ostream& out, const DenseIntMatrix& m) {
    out << m.rows() << ' ' << m.cols() << '\n';
    std::string buf;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        buf.clear();
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) {
                buf += ' ';
            }
            buf += std::to_string(m.at(i, j));
        }
        buf += '\n';
        out << buf;
    }
}

void write_matrix(const std::string& path, const DenseIntMatrix& m) {
    std::ofstream out(path);
    if (!out) {
        throw UsageError("cannot write " + path);
    }
    write_matrix(out, m);
    if (!out) {
        throw ResourceError("write failed: " + path);
    }
}

DenseIntMatrix naive_multiply(const DenseIntMatrix& a, const DenseIntMatrix& b) {
    if (a.cols() != b.rows()) {
        throw UsageError("inner dimensions differ");
    }
    const std::size_t rows = a.rows();
    const std::size_t inner = a.cols();
    const std::size_t cols = b.cols();
    const u128 bound = sat_mul(sat_mul(inner, a.max_abs()), b.max_abs());
    const bool safe = bound < (u128{1} << 126);

    DenseIntMatrix out(rows, cols);
    std::vector<i128> acc(cols);
    for (std::size_t i = 0; i < rows; ++i) {
        std::fill(acc.begin(), acc.end(), 0);
        for (std::size_t k = 0; k < inner; ++k) {
            const std::int64_t aik = a.at(i, k);
            if (aik == 0) {
                continue;
            }
            const auto brow = b.row(k);
            if (safe) {
                for (std::size_t j = 0; j < cols; ++j) {
                    acc[j] += static_cast<i128>(aik) * brow[j];
                }
            } else {
                for (std::size_t j = 0; j < cols; ++j) {
                    if (__builtin_add_overflow(acc[j], static_cast<i128>(aik) * brow[j], &acc[j])) {
                        throw ResourceError("128-bit accumulation overflow");
                    }
                }
            }
        }
        for (std::size_t j = 0; j < cols; ++j) {
            out.set(i, j, narrow(acc[j]));
        }
    }
    return out;
}

} // namespace mmv
