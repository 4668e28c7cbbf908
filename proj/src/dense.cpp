#include "jdgsvd/dense.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "jdgsvd/errors.hpp"

namespace jdgsvd {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxJacobiSweeps = 100;

void check_square(const Matrix& m, const char* what) {
    if (m.rows() != m.cols()) throw DimensionError(std::string(what) + ": matrix must be square");
}

}  // namespace

OrthoStep orthogonalize(const Matrix& q, const Vector& v, double rel_tol) {
    if (q.cols() > 0 && q.rows() != v.size()) throw DimensionError("orthogonalize: length mismatch");
    OrthoStep out;
    out.coeffs = Vector::Zero(q.cols());
    Vector w = v;
    const double vnorm = v.norm();
    for (int pass = 0; pass < 2 && q.cols() > 0; ++pass) {
        const Vector h = q.transpose() * w;
        w.noalias() -= q * h;
        out.coeffs += h;
    }
    out.gamma = w.norm();
    out.in_span = !(out.gamma > rel_tol * vnorm) || vnorm == 0.0;
    out.q = out.in_span ? Vector::Zero(v.size()) : Vector(w / out.gamma);
    return out;
}

Vector complement_vector(const Matrix& q) {
    const Index n = q.rows();
    if (q.cols() >= n) throw RankDeficiencyError("no orthogonal complement left", q.cols());
    // Try coordinate directions, starting with those least represented in q.
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    if (q.cols() > 0) {
        const Vector weight = q.rowwise().squaredNorm();
        std::stable_sort(order.begin(), order.end(),
                         [&](Index i, Index j) { return weight[i] < weight[j]; });
    }
    for (Index i : order) {
        const OrthoStep s = orthogonalize(q, Vector::Unit(n, i), 0.5);
        if (!s.in_span) return orthogonalize(q, s.q).q;
    }
    throw RankDeficiencyError("no orthogonal complement found", q.cols());
}

ThinQr thin_qr(const Matrix& x, RankPolicy policy) {
    const Index n = x.rows();
    const Index k = x.cols();
    if (k > n) throw DimensionError("thin_qr needs at least as many rows as columns");
    ThinQr f{Matrix::Zero(n, k), Matrix::Zero(k, k)};
    for (Index j = 0; j < k; ++j) {
        const OrthoStep s = orthogonalize(f.q.leftCols(j), x.col(j));
        f.r.col(j).head(j) = s.coeffs;
        if (s.in_span) {
            if (policy == RankPolicy::raise) {
                throw RankDeficiencyError("thin_qr: numerically rank-deficient input", j);
            }
            f.q.col(j) = complement_vector(f.q.leftCols(j));
            f.r(j, j) = 0.0;
        } else {
            f.q.col(j) = s.q;
            f.r(j, j) = s.gamma;
        }
    }
    return f;
}

QrAppend qr_append(const ThinQr& f, const Vector& new_col) {
    const OrthoStep s = orthogonalize(f.q, new_col);
    if (s.in_span) throw InSpanError("qr_append: column lies in the span of Q");
    const Index k = f.q.cols();
    QrAppend out;
    out.gamma = s.gamma;
    out.r_new = s.coeffs;
    out.q_new = s.q;
    out.factor.q.resize(f.q.rows(), k + 1);
    out.factor.q << f.q, s.q;
    out.factor.r = Matrix::Zero(k + 1, k + 1);
    out.factor.r.topLeftCorner(k, k) = f.r;
    out.factor.r.col(k).head(k) = s.coeffs;
    out.factor.r(k, k) = s.gamma;
    return out;
}

Matrix cholesky_lower(const Matrix& h) {
    check_square(h, "cholesky_lower");
    const Index k = h.rows();
    Matrix l = Matrix::Zero(k, k);
    const double scale = h.diagonal().cwiseAbs().maxCoeff();
    for (Index j = 0; j < k; ++j) {
        double d = h(j, j) - l.row(j).head(j).squaredNorm();
        if (!(d > static_cast<double>(k) * kEps * scale)) {
            throw NotPositiveDefiniteError("matrix is not positive definite", j);
        }
        l(j, j) = std::sqrt(d);
        for (Index i = j + 1; i < k; ++i) {
            l(i, j) = (h(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / l(j, j);
        }
    }
    return l;
}

SymmetricEigen sym_eig(const Matrix& s) {
    check_square(s, "sym_eig");
    const Index k = s.rows();
    Matrix a = 0.5 * (s + s.transpose());
    Matrix v = Matrix::Identity(k, k);
    const double fro = a.norm();

    for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
        double off = 0.0;
        for (Index q = 1; q < k; ++q) off += a.col(q).head(q).squaredNorm();
        if (std::sqrt(off) <= kEps * fro * 1e-2 || off == 0.0) break;
        for (Index p = 0; p < k - 1; ++p) {
            for (Index q = p + 1; q < k; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= std::numeric_limits<double>::min()) continue;
                const double zeta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = c * t;
                // A <- J^T A J with J the rotation in the (p, q) plane.
                for (Index i = 0; i < k; ++i) {
                    const double aip = a(i, p);
                    const double aiq = a(i, q);
                    a(i, p) = c * aip - sn * aiq;
                    a(i, q) = sn * aip + c * aiq;
                }
                for (Index i = 0; i < k; ++i) {
                    const double api = a(p, i);
                    const double aqi = a(q, i);
                    a(p, i) = c * api - sn * aqi;
                    a(q, i) = sn * api + c * aqi;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (Index i = 0; i < k; ++i) {
                    const double vip = v(i, p);
                    const double viq = v(i, q);
                    v(i, p) = c * vip - sn * viq;
                    v(i, q) = sn * vip + c * viq;
                }
            }
        }
    }

    std::vector<Index> order(static_cast<std::size_t>(k));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) { return a(i, i) < a(j, j); });
    SymmetricEigen out{Vector(k), Matrix(k, k)};
    for (Index i = 0; i < k; ++i) {
        out.values[i] = a(order[i], order[i]);
        out.vectors.col(i) = v.col(order[i]);
    }
    return out;
}

namespace {

/// L^{-1} G L^{-T} for lower triangular L.
Matrix congruence_reduce(const Matrix& l, const Matrix& g) {
    const auto lt = l.triangularView<Eigen::Lower>();
    Matrix c = lt.solve(g);
    c = lt.solve(c.transpose()).transpose();
    return c;
}

}  // namespace

SymmetricEigen sym_definite_geig(const Matrix& g, const Matrix& h) {
    check_square(g, "sym_definite_geig");
    check_square(h, "sym_definite_geig");
    if (g.rows() != h.rows()) throw DimensionError("sym_definite_geig: size mismatch");
    const Matrix l = cholesky_lower(h);
    Matrix c = congruence_reduce(l, g);
    c = 0.5 * (c + c.transpose());
    SymmetricEigen e = sym_eig(c);
    e.vectors = l.transpose().triangularView<Eigen::Upper>().solve(e.vectors);
    return e;
}

std::vector<ComplexEigenpair> real_geig(const Matrix& g, const Matrix& h) {
    check_square(g, "real_geig");
    check_square(h, "real_geig");
    if (g.rows() != h.rows()) throw DimensionError("real_geig: size mismatch");
    const Matrix l = cholesky_lower(h);
    const Matrix c = congruence_reduce(l, g);
    Eigen::EigenSolver<Matrix> es(c, true);
    if (es.info() != Eigen::Success) {
        throw ConvergenceError("Hessenberg QR iteration did not converge", 0.0);
    }
    const auto lt_upper = l.transpose().triangularView<Eigen::Upper>();
    const Eigen::MatrixXcd y = es.eigenvectors();
    std::vector<ComplexEigenpair> out;
    out.reserve(static_cast<std::size_t>(g.rows()));
    for (Index i = 0; i < g.rows(); ++i) {
        const Vector re = lt_upper.solve(Vector(y.col(i).real()));
        const Vector im = lt_upper.solve(Vector(y.col(i).imag()));
        ComplexVector w(g.rows());
        w.real() = re;
        w.imag() = im;
        const double nrm = w.norm();
        if (nrm > 0.0) w /= nrm;
        out.push_back({es.eigenvalues()[i], std::move(w)});
    }
    return out;
}

SmallSvd small_svd(const Matrix& m) {
    const Index j = m.rows();
    const Index k = m.cols();
    if (j < k) throw DimensionError("small_svd needs rows >= cols");
    Matrix u = m;
    Matrix v = Matrix::Identity(k, k);

    for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
        bool rotated = false;
        for (Index p = 0; p < k - 1; ++p) {
            for (Index q = p + 1; q < k; ++q) {
                const double alpha = u.col(p).squaredNorm();
                const double beta = u.col(q).squaredNorm();
                const double gamma = u.col(p).dot(u.col(q));
                if (!(std::abs(gamma) > kEps * std::sqrt(alpha * beta))) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (Index i = 0; i < j; ++i) {
                    const double up = u(i, p);
                    const double uq = u(i, q);
                    u(i, p) = c * up - s * uq;
                    u(i, q) = s * up + c * uq;
                }
                for (Index i = 0; i < k; ++i) {
                    const double vp = v(i, p);
                    const double vq = v(i, q);
                    v(i, p) = c * vp - s * vq;
                    v(i, q) = s * vp + c * vq;
                }
            }
        }
        if (!rotated) break;
    }

    Vector sigma(k);
    for (Index i = 0; i < k; ++i) sigma[i] = u.col(i).norm();
    std::vector<Index> order(static_cast<std::size_t>(k));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return sigma[a] > sigma[b]; });

    SmallSvd out{Vector(k), Matrix::Zero(j, k), Matrix(k, k)};
    const double tiny = sigma.size() > 0 ? sigma.maxCoeff() * kEps * static_cast<double>(j) : 0.0;
    for (Index i = 0; i < k; ++i) {
        const Index src = order[i];
        out.values[i] = sigma[src];
        out.v.col(i) = v.col(src);
        if (sigma[src] > tiny && sigma[src] > 0.0) {
            out.u.col(i) = u.col(src) / sigma[src];
        }
    }
    // Left vectors of (numerically) zero singular values span the complement.
    for (Index i = 0; i < k; ++i) {
        if (!(out.values[i] > tiny && out.values[i] > 0.0)) {
            Matrix others(j, k - 1);
            Index c = 0;
            for (Index t = 0; t < k; ++t) {
                if (t != i) others.col(c++) = out.u.col(t);
            }
            // Drop zero columns before completing.
            std::vector<Index> keep;
            for (Index t = 0; t < others.cols(); ++t) {
                if (others.col(t).squaredNorm() > 0.0) keep.push_back(t);
            }
            Matrix basis(j, static_cast<Index>(keep.size()));
            for (std::size_t t = 0; t < keep.size(); ++t) basis.col(static_cast<Index>(t)) = others.col(keep[t]);
            out.u.col(i) = complement_vector(basis);
        }
    }
    return out;
}

SmallGsvd small_gsvd(const Matrix& r_a, const Matrix& r_b) {
    check_square(r_a, "small_gsvd");
    check_square(r_b, "small_gsvd");
    const Index k = r_a.rows();
    if (r_b.rows() != k) throw DimensionError("small_gsvd: size mismatch");

    Matrix stacked(2 * k, k);
    stacked << r_a, r_b;
    const ThinQr qr = thin_qr(stacked, RankPolicy::raise);
    const Matrix q1 = qr.q.topRows(k);
    const Matrix q2 = qr.q.bottomRows(k);

    // CS decomposition: Q1 = U1 C W^T and Q2 = U2 S W^T with C^2 + S^2 = I.
    // Directions with small cosine are taken from the SVD of Q1 and directions
    // with small sine from the SVD of Q2, so both small quantities come out with
    // full relative accuracy.
    const SmallSvd svd1 = small_svd(q1);
    const SmallSvd svd2 = small_svd(q2);
    const double split = std::sqrt(0.5);
    Index from_q1 = 0;
    for (Index i = 0; i < k; ++i) {
        if (svd1.values[i] <= split) ++from_q1;
    }
    const Index from_q2 = k - from_q1;

    struct Entry {
        double alpha, beta;
        Vector e, f, d;
    };
    std::vector<Entry> entries;
    entries.reserve(static_cast<std::size_t>(k));
    const auto r_upper = qr.r.triangularView<Eigen::Upper>();

    // Smallest cosines sit at the end of svd1 (descending order).
    for (Index t = 0; t < from_q1; ++t) {
        const Index i = k - 1 - t;
        const Vector w = svd1.v.col(i);
        const double c = svd1.values[i];
        const Vector b = q2 * w;
        const double s = b.norm();
        const double h = std::hypot(c, s);
        Entry en{c / h, s / h, svd1.u.col(i), b / s, r_upper.solve(w) / h};
        entries.push_back(std::move(en));
    }
    for (Index t = 0; t < from_q2; ++t) {
        const Index i = k - 1 - t;
        const Vector w = svd2.v.col(i);
        const double s = svd2.values[i];
        const Vector a = q1 * w;
        const double c = a.norm();
        const double h = std::hypot(c, s);
        Entry en{c / h, s / h, a / c, svd2.u.col(i), r_upper.solve(w) / h};
        entries.push_back(std::move(en));
    }

    std::stable_sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
        // alpha/beta ascending, compared without dividing.
        return x.alpha * y.beta < y.alpha * x.beta;
    });

    SmallGsvd out{Vector(k), Vector(k), Matrix(k, k), Matrix(k, k), Matrix(k, k)};
    for (Index i = 0; i < k; ++i) {
        const Entry& en = entries[static_cast<std::size_t>(i)];
        out.alphas[i] = en.alpha;
        out.betas[i] = en.beta;
        out.e_vectors.col(i) = en.e;
        out.f_vectors.col(i) = en.f;
        out.d_vectors.col(i) = en.d;
    }
    return out;
}

Matrix orthogonal_complement(const Vector& d) {
    const Index k = d.size();
    if (k == 0) return Matrix(0, 0);
    const double nrm = d.norm();
    if (nrm == 0.0) throw DimensionError("orthogonal_complement of a zero vector");
    // Householder reflector H = I - 2 w w^T / (w^T w) with H d = -sign(d_0) ‖d‖ e_1.
    Vector w = d;
    w[0] += (d[0] >= 0.0 ? 1.0 : -1.0) * nrm;
    const double ww = w.squaredNorm();
    Matrix h = Matrix::Identity(k, k) - (2.0 / ww) * w * w.transpose();
    return h.rightCols(k - 1);
}

}  // namespace jdgsvd
