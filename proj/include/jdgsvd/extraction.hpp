#pragma once

#include <limits>
#include <vector>

#include "jdgsvd/core.hpp"
#include "jdgsvd/subspace.hpp"

namespace jdgsvd {

/// A coefficient vector for X together with the value it approximates.
/// Candidates are listed in order of preference; restarts keep the first
/// linearly independent ones.
struct Candidate {
    double theta = 0.0;
    Vector d;
};

/// Approximate GSVD component drawn from a subspace, with x = X d / delta,
/// e = R_A d, f = R_B d.
struct ExtractionResult {
    double alpha = 0.0;
    double beta = 0.0;
    double theta = 0.0;
    Vector u;
    Vector v;
    Vector x;
    Vector d;
    Vector e;
    Vector f;
    double delta = 0.0;

    Vector atu;  ///< A^T u
    Vector btv;  ///< B^T v
    Vector residual;
    double residual_norm = 0.0;

    /// Harmonic value (phi) before the Rayleigh-quotient replacement; NaN for
    /// the standard extraction.
    double harmonic_value = std::numeric_limits<double>::quiet_NaN();
    /// True when a harmonic extraction fell back to the standard one.
    bool fallback = false;
    /// Harmonic candidates dropped because their value was not a positive
    /// real number.
    Index skipped = 0;

    std::vector<Candidate> candidates;
};

/// Builds the full approximation from a coefficient vector. Throws
/// NumericalBreakdown when R_A d or R_B d vanishes (trivial value 0 or inf).
ExtractionResult assemble(const MatrixPair& pair, const SubspaceState& s, const Vector& d);

ExtractionResult extract_standard(const MatrixPair& pair, const SubspaceState& s, double tau);
ExtractionResult extract_cpf_harmonic(const MatrixPair& pair, const SubspaceState& s, double tau);
ExtractionResult extract_if_harmonic(const MatrixPair& pair, const SubspaceState& s, double tau);
ExtractionResult extract(const MatrixPair& pair, const SubspaceState& s, Method method, double tau);

/// The two projected pencils, exposed for tests.
struct Pencil {
    Matrix g;
    Matrix h;
};
Pencil cpf_pencil(const SubspaceState& s, double tau);
Pencil if_pencil(const SubspaceState& s, double tau);

struct ResidualTest {
    double residual_norm = 0.0;
    /// beta ‖A‖_1 + alpha ‖B‖_1
    double scale = 0.0;
    bool converged = false;

    double relative() const { return scale > 0.0 ? residual_norm / scale : residual_norm; }
};

ResidualTest residual_and_test(const ExtractionResult& res, const MatrixPair& pair, double tol);

}  // namespace jdgsvd
