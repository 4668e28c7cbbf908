#include "jdgsvd/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "jdgsvd/dense.hpp"
#include "jdgsvd/errors.hpp"
#include "jdgsvd/sparse_kernels.hpp"

namespace jdgsvd {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Whether d yields a nontrivial approximation (both R_A d and R_B d nonzero).
bool nontrivial(const SubspaceState& s, const Vector& d) {
    const double ne = (s.r_a * d).norm();
    const double nf = (s.r_b * d).norm();
    const double scale = std::hypot(ne, nf);
    const double floor = 1e-15 * scale;
    return scale > 0.0 && ne > floor && nf > floor;
}

ExtractionResult standard_fallback(const MatrixPair& pair, const SubspaceState& s, double tau) {
    ExtractionResult r = extract_standard(pair, s, tau);
    r.fallback = true;
    return r;
}

}  // namespace

ExtractionResult assemble(const MatrixPair& pair, const SubspaceState& s, const Vector& d) {
    ExtractionResult r;
    r.d = d;
    r.e = s.r_a * d;
    r.f = s.r_b * d;
    const double ne = r.e.norm();
    const double nf = r.f.norm();
    r.delta = std::hypot(ne, nf);
    if (!(ne > 0.0) || !(nf > 0.0)) {
        throw NumericalBreakdown("approximation has a trivial generalized singular value");
    }
    r.alpha = ne / r.delta;
    r.beta = nf / r.delta;
    r.theta = ne / nf;
    r.x = s.x * d / r.delta;
    r.u = s.u * r.e / ne;
    r.v = s.v * r.f / nf;
    r.atu = spmv_transpose(pair.a, r.u);
    r.btv = spmv_transpose(pair.b, r.v);
    r.residual = r.beta * r.atu - r.alpha * r.btv;
    r.residual_norm = r.residual.norm();
    return r;
}

ExtractionResult extract_standard(const MatrixPair& pair, const SubspaceState& s, double tau) {
    const SmallGsvd g = small_gsvd(s.r_a, s.r_b);
    const Index k = s.k();
    std::vector<double> sig(static_cast<std::size_t>(k));
    for (Index i = 0; i < k; ++i) sig[i] = g.betas[i] > 0.0 ? g.alphas[i] / g.betas[i] : kInf;

    // order_by_target expects finite values; push infinite ones to the end.
    std::vector<double> finite_sig;
    std::vector<Index> finite_idx;
    std::vector<Index> infinite_idx;
    for (Index i = 0; i < k; ++i) {
        if (std::isfinite(sig[i])) {
            finite_sig.push_back(sig[i]);
            finite_idx.push_back(i);
        } else {
            infinite_idx.push_back(i);
        }
    }
    std::vector<Candidate> cands;
    for (Index j : order_by_target(finite_sig, tau)) {
        const Index i = finite_idx[j];
        cands.push_back({sig[i], g.d_vectors.col(i)});
    }
    for (Index i : infinite_idx) cands.push_back({kInf, g.d_vectors.col(i)});

    for (const Candidate& c : cands) {
        if (!std::isfinite(c.theta) || !nontrivial(s, c.d)) continue;
        ExtractionResult r = assemble(pair, s, c.d);
        r.candidates = std::move(cands);
        return r;
    }
    throw NumericalBreakdown("subspace holds no nontrivial Ritz approximation");
}

Pencil cpf_pencil(const SubspaceState& s, double tau) {
    if (!s.h_ab_dag) throw PreconditionError("CPF-harmonic extraction needs the H_{A,B+} cache");
    const Index k = s.k();
    const Matrix btb = s.r_b.transpose() * s.r_b;
    Pencil p{Matrix(2 * k, 2 * k), Matrix(2 * k, 2 * k)};
    p.g << -tau * btb, s.r_a.transpose(), s.r_a, -tau * Matrix::Identity(k, k);
    p.h << s.r_a.transpose() * s.r_a + tau * tau * btb, -2.0 * tau * s.r_a.transpose(),
        -2.0 * tau * s.r_a, *s.h_ab_dag + tau * tau * Matrix::Identity(k, k);
    p.g = 0.5 * (p.g + p.g.transpose());
    p.h = 0.5 * (p.h + p.h.transpose());
    return p;
}

ExtractionResult extract_cpf_harmonic(const MatrixPair& pair, const SubspaceState& s, double tau) {
    const Index k = s.k();
    const Pencil pen = cpf_pencil(s, tau);
    SymmetricEigen eig;
    try {
        eig = sym_definite_geig(pen.g, pen.h);
    } catch (const NotPositiveDefiniteError&) {
        return standard_fallback(pair, s, tau);
    }

    std::vector<Index> order(static_cast<std::size_t>(2 * k));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) {
        return std::abs(eig.values[i]) > std::abs(eig.values[j]);
    });

    std::vector<Candidate> cands;
    std::vector<double> phis;
    Index skipped = 0;
    for (Index i : order) {
        const double mu = eig.values[i];
        const double phi = mu != 0.0 ? tau + 1.0 / mu : kInf;
        Vector d = eig.vectors.col(i).head(k);
        const double nd = d.norm();
        if (!(nd > 0.0)) continue;
        d /= nd;
        if (!(phi > 0.0) || !std::isfinite(phi)) {
            ++skipped;
            cands.push_back({kInf, std::move(d)});
            phis.push_back(kInf);
            continue;
        }
        cands.push_back({phi, std::move(d)});
        phis.push_back(phi);
    }
    for (std::size_t c = 0; c < cands.size(); ++c) {
        if (!std::isfinite(phis[c]) || !nontrivial(s, cands[c].d)) continue;
        ExtractionResult r = assemble(pair, s, cands[c].d);
        r.harmonic_value = phis[c];
        r.skipped = skipped;
        r.candidates = std::move(cands);
        return r;
    }
    ExtractionResult r = standard_fallback(pair, s, tau);
    r.skipped = skipped;
    return r;
}

Pencil if_pencil(const SubspaceState& s, double tau) {
    if (!s.h_a || !s.h_b || !s.h_ab) {
        throw PreconditionError("IF-harmonic extraction needs the H_A, H_B, H_AB caches");
    }
    const double t2 = tau * tau;
    const Matrix& ha = *s.h_a;
    const Matrix& hb = *s.h_b;
    const Matrix& hab = *s.h_ab;
    Pencil p;
    p.g = hab - t2 * hb;
    p.h = ha + (t2 * t2) * hb - t2 * (hab.transpose() + hab);
    p.h = 0.5 * (p.h + p.h.transpose());
    return p;
}

ExtractionResult extract_if_harmonic(const MatrixPair& pair, const SubspaceState& s, double tau) {
    const Pencil pen = if_pencil(s, tau);
    std::vector<ComplexEigenpair> eig;
    try {
        eig = real_geig(pen.g, pen.h);
    } catch (const NotPositiveDefiniteError&) {
        return standard_fallback(pair, s, tau);
    }

    std::vector<std::size_t> real_idx;
    std::vector<std::size_t> complex_idx;
    for (std::size_t i = 0; i < eig.size(); ++i) {
        const std::complex<double> nu = eig[i].value;
        if (std::abs(nu.imag()) <= 1e-10 * std::abs(nu)) {
            real_idx.push_back(i);
        } else {
            complex_idx.push_back(i);
        }
    }
    std::stable_sort(real_idx.begin(), real_idx.end(), [&](std::size_t i, std::size_t j) {
        return std::abs(eig[i].value.real()) > std::abs(eig[j].value.real());
    });

    const double t2 = tau * tau;
    std::vector<Candidate> cands;
    std::vector<bool> usable;
    Index skipped = 0;
    for (std::size_t i : real_idx) {
        const double nu = eig[i].value.real();
        const double phi2 = nu != 0.0 ? t2 + 1.0 / nu : kInf;
        Vector d = eig[i].vector.real();
        const double nd = d.norm();
        if (!(nd > 0.0)) continue;
        d /= nd;
        const bool ok = phi2 > 0.0 && std::isfinite(phi2);
        if (!ok) ++skipped;
        cands.push_back({ok ? std::sqrt(phi2) : kInf, std::move(d)});
        usable.push_back(ok);
    }
    // Complex pairs cannot be selected, but their real and imaginary parts
    // still carry subspace information worth keeping at a restart.
    for (std::size_t i : complex_idx) {
        for (const Vector& part : {Vector(eig[i].vector.real()), Vector(eig[i].vector.imag())}) {
            const double np = part.norm();
            if (np > 0.0) {
                cands.push_back({kInf, part / np});
                usable.push_back(false);
            }
        }
    }

    for (std::size_t c = 0; c < cands.size(); ++c) {
        if (!usable[c] || !nontrivial(s, cands[c].d)) continue;
        ExtractionResult r = assemble(pair, s, cands[c].d);
        r.harmonic_value = cands[c].theta;
        r.skipped = skipped;
        r.candidates = std::move(cands);
        return r;
    }
    ExtractionResult r = standard_fallback(pair, s, tau);
    r.skipped = skipped;
    return r;
}

ExtractionResult extract(const MatrixPair& pair, const SubspaceState& s, Method method, double tau) {
    switch (method) {
        case Method::standard: return extract_standard(pair, s, tau);
        case Method::cpf_harmonic: return extract_cpf_harmonic(pair, s, tau);
        case Method::if_harmonic: return extract_if_harmonic(pair, s, tau);
    }
    throw Error("unknown extraction method");
}

ResidualTest residual_and_test(const ExtractionResult& res, const MatrixPair& pair, double tol) {
    ResidualTest t;
    t.residual_norm = res.residual_norm;
    t.scale = res.beta * pair.a.one_norm() + res.alpha * pair.b.one_norm();
    t.converged = t.residual_norm <= t.scale * tol;
    return t;
}

}  // namespace jdgsvd
