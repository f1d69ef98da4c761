#pragma once

#include "fraclap/banded_op.hpp"

#include <stdexcept>
#include <vector>

namespace fraclap {

/// Point functional applied to a Chebyshev T series.
struct BoundaryFunctional {
    BoundaryKind kind = BoundaryKind::Value;
    int endpoint = -1;
};

/// Banded operator plus dense boundary rows placed on top of the materialized matrix.
struct AlmostBandedSystem {
    BandedOp op;
    std::vector<BoundaryFunctional> boundary;
    ChebSeries rhs;       // in op.range_basis()
    CVec rhs_boundary;    // one value per boundary functional
};

/// Raised when the materialized system is numerically singular.
class SingularSystemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dense n x n matrix of the truncated system: boundary rows on top, then the
/// first n - (#boundary) rows of the operator.
struct DenseSystem {
    std::vector<CVec> rows;  // row-major, each of length n
    CVec rhs;
};
[[nodiscard]] DenseSystem materialize_dense(const AlmostBandedSystem& sys, Index n);

/// Structure-respecting Givens QR solve at truncation n. Cost is linear in n for fixed bandwidth.
[[nodiscard]] ChebSeries solve_almost_banded(const AlmostBandedSystem& sys, Index n);

/// Dense LU solve of the same truncated system (cross-check path, n <= 512).
[[nodiscard]] ChebSeries solve_almost_banded_dense(const AlmostBandedSystem& sys, Index n);

/// Coefficient residual vector of the infinite system applied to a finite candidate:
/// boundary mismatches first, then operator rows 0..max(n_extended, len(rhs))-1.
[[nodiscard]] CVec residual_vector(const AlmostBandedSystem& sys, const ChebSeries& candidate, Index n_extended);

/// l2 norm of residual_vector.
[[nodiscard]] double residual_norm(const AlmostBandedSystem& sys, const ChebSeries& candidate, Index n_extended);

}  // namespace fraclap
