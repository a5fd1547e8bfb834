#pragma once

// Seeded instance generator: random A, B and a candidate C with an exact
// number of planted wrong entries.

#include "mmv/matrix.hpp"

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace mmv {

struct GeneratedInstance {
    DenseIntMatrix a;
    DenseIntMatrix b;
    DenseIntMatrix c;
    DenseIntMatrix product;  // exact AB
    std::vector<std::pair<std::size_t, std::size_t>> planted;  // distinct, in generation order
};

struct GenerateOptions {
    std::int64_t lo = -9;
    std::int64_t hi = 9;
    /// Keep only this many nonzero columns of B (0 keeps all); sparse
    /// products for output-sensitive runs.
    std::size_t b_columns = 0;
};

/// n x n instance with z distinct entries of C perturbed by nonzero deltas.
/// UsageError when z > n^2.
GeneratedInstance generate_instance(std::size_t n, std::size_t z, std::uint64_t seed, const GenerateOptions& opts = {});

/// z distinct values below m (Floyd's sampling), in selection order.
std::vector<std::uint64_t> sample_distinct(std::uint64_t m, std::size_t z, std::uint64_t seed);

} // namespace mmv
