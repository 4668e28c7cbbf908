#pragma once

#include <vector>

#include "jdgsvd/sparse_matrix.hpp"

namespace jdgsvd {

/// Dense diagnostics of a pair, for small problems only.
struct ProbeReport {
    double stack_condition = 0.0;  ///< kappa([A; B])
    bool regular = false;          ///< [A; B] numerically full column rank
    /// Finite nonzero generalized singular values, ascending.
    std::vector<double> sigmas;
    Index zero_count = 0;
    Index infinite_count = 0;

    double sigma_max() const { return sigmas.empty() ? 0.0 : sigmas.back(); }
    double sigma_min() const { return sigmas.empty() ? 0.0 : sigmas.front(); }
    /// Value at the given fraction (0..1) of the sorted nontrivial spectrum.
    double percentile(double fraction) const;
};

/// Throws DimensionError when n exceeds max_n.
ProbeReport probe_pair(const MatrixPair& pair, Index max_n = 3000);

}  // namespace jdgsvd
