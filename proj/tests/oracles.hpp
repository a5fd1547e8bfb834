#pragma once

// Reference implementations used as test oracles. Deliberately simple and
// independent of the library's arithmetic (no Barrett, no transforms).

#include "mmv/matrix.hpp"
#include "mmv/random.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <vector>

namespace oracle {

using boost::multiprecision::cpp_int;
using u64 = std::uint64_t;

inline u64 mulmod(u64 a, u64 b, u64 p) { return static_cast<u64>((static_cast<unsigned __int128>(a) * b) % p); }

inline u64 powmod(u64 b, u64 e, u64 p) {
    u64 r = 1 % p;
    b %= p;
    while (e) {
        if (e & 1) {
            r = mulmod(r, b, p);
        }
        b = mulmod(b, b, p);
        e >>= 1;
    }
    return r;
}

inline bool is_prime(u64 n) {
    if (n < 2) {
        return false;
    }
    for (u64 d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            return false;
        }
    }
    return true;
}

/// Multiplicative order by repeated multiplication.
inline u64 order_of(u64 g, u64 p) {
    u64 x = g % p;
    u64 k = 1;
    while (x != 1) {
        x = mulmod(x, g, p);
        ++k;
        if (k > p) {
            return 0;
        }
    }
    return k;
}

inline u64 reduce_signed(std::int64_t x, u64 p) {
    const std::int64_t r = x % static_cast<std::int64_t>(p);
    return static_cast<u64>(r < 0 ? r + static_cast<std::int64_t>(p) : r);
}

inline u64 horner(const std::vector<u64>& c, u64 x, u64 p) {
    u64 acc = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        acc = (mulmod(acc, x, p) + *it) % p;
    }
    return acc;
}

inline std::vector<u64> convolve(const std::vector<u64>& a, const std::vector<u64>& b, u64 p) {
    if (a.empty() || b.empty()) {
        return {};
    }
    std::vector<u64> out(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            out[i + j] = (out[i + j] + mulmod(a[i], b[j], p)) % p;
        }
    }
    return out;
}

/// Exact product with big-integer accumulation.
inline std::vector<std::vector<cpp_int>> product(const mmv::DenseIntMatrix& a, const mmv::DenseIntMatrix& b) {
    std::vector<std::vector<cpp_int>> out(a.rows(), std::vector<cpp_int>(b.cols()));
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            cpp_int s = 0;
            for (std::size_t k = 0; k < a.cols(); ++k) {
                s += cpp_int(a.at(i, k)) * b.at(k, j);
            }
            out[i][j] = s;
        }
    }
    return out;
}

inline bool equals(const std::vector<std::vector<cpp_int>>& x, const mmv::DenseIntMatrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (x[i][j] != m.at(i, j)) {
                return false;
            }
        }
    }
    return true;
}

/// Coefficients of g for D = AB - C restricted to rows/cols [i0, i0+ell) x
/// [j0, j0+ell): coefficient of X^(i + ell j) is D[i0+i][j0+j] mod p.
inline std::vector<u64> g_coefficients(const mmv::DenseIntMatrix& a, const mmv::DenseIntMatrix& b,
                                       const mmv::DenseIntMatrix* c, u64 p, std::size_t i0 = 0, std::size_t j0 = 0,
                                       std::size_t ell = 0) {
    if (ell == 0) {
        ell = a.rows();
    }
    const auto ab = product(a, b);
    std::vector<u64> g(ell * ell, 0);
    for (std::size_t i = 0; i < ell; ++i) {
        for (std::size_t j = 0; j < ell; ++j) {
            cpp_int d = ab[i0 + i][j0 + j];
            if (c) {
                d -= c->at(i0 + i, j0 + j);
            }
            cpp_int r = d % p;
            if (r < 0) {
                r += p;
            }
            g[i + ell * j] = static_cast<u64>(r);
        }
    }
    return g;
}

/// Nonzero count of (AB - C) over a block.
inline std::size_t block_nonzeros(const std::vector<std::vector<cpp_int>>& ab, const mmv::DenseIntMatrix& c,
                                  std::size_t i0, std::size_t j0, std::size_t side) {
    std::size_t z = 0;
    for (std::size_t i = i0; i < i0 + side && i < c.rows(); ++i) {
        for (std::size_t j = j0; j < j0 + side && j < c.cols(); ++j) {
            z += ab[i][j] != c.at(i, j);
        }
    }
    return z;
}

inline mmv::DenseIntMatrix random_matrix(mmv::SplitRng& rng, std::size_t rows, std::size_t cols, std::int64_t lo,
                                         std::int64_t hi) {
    mmv::DenseIntMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            m.set(i, j, rng.between(lo, hi));
        }
    }
    return m;
}

inline mmv::DenseIntMatrix to_matrix(const std::vector<std::vector<cpp_int>>& x) {
    mmv::DenseIntMatrix m(x.size(), x.front().size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = 0; j < x[i].size(); ++j) {
            m.set(i, j, static_cast<std::int64_t>(x[i][j]));
        }
    }
    return m;
}

/// Boolean product.
inline mmv::DenseIntMatrix bool_product(const mmv::DenseIntMatrix& a, const mmv::DenseIntMatrix& b) {
    const std::size_t n = a.rows();
    mmv::DenseIntMatrix c(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < n; ++k) {
                if (a.at(i, k) && b.at(k, j)) {
                    c.set(i, j, 1);
                    break;
                }
            }
        }
    }
    return c;
}

} // namespace oracle
