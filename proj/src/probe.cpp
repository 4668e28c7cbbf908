#include "jdgsvd/probe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "jdgsvd/errors.hpp"

namespace jdgsvd {

double ProbeReport::percentile(double fraction) const {
    if (sigmas.empty()) throw Error("pair has no nontrivial generalized singular values");
    const double pos = std::clamp(fraction, 0.0, 1.0) * static_cast<double>(sigmas.size() - 1);
    return sigmas[static_cast<std::size_t>(std::lround(pos))];
}

ProbeReport probe_pair(const MatrixPair& pair, Index max_n) {
    const Index n = pair.n();
    if (n > max_n) throw DimensionError("probe is dense; n exceeds the limit " + std::to_string(max_n));
    const Matrix a = pair.a.to_dense();
    const Matrix b = pair.b.to_dense();
    Matrix stacked(a.rows() + b.rows(), n);
    stacked << a, b;

    ProbeReport rep;
    const Eigen::BDCSVD<Matrix> svd(stacked);
    const Vector sv = svd.singularValues();
    const double smax = sv.size() ? sv[0] : 0.0;
    const double smin = sv.size() ? sv[sv.size() - 1] : 0.0;
    const double eps = std::numeric_limits<double>::epsilon();
    rep.regular = smin > static_cast<double>(std::max(stacked.rows(), n)) * eps * smax;
    rep.stack_condition = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    if (!rep.regular) return rep;

    // CS route: [A; B] = [Q1; Q2] R, then the singular values of Q1 and Q2
    // are the cosines and sines.
    Eigen::HouseholderQR<Matrix> qr(stacked);
    const Matrix q = qr.householderQ() * Matrix::Identity(stacked.rows(), n);
    const Vector c = Eigen::JacobiSVD<Matrix>(q.topRows(a.rows())).singularValues();
    const Vector s = Eigen::JacobiSVD<Matrix>(q.bottomRows(b.rows())).singularValues();
    // c is descending and s descending; pair the largest cosine with the
    // smallest sine. Short blocks are padded with zeros.
    const double tiny = 1e3 * eps;
    for (Index i = 0; i < n; ++i) {
        const double ci = i < c.size() ? c[i] : 0.0;
        const Index js = n - 1 - i;
        const double si = js < s.size() ? s[js] : 0.0;
        if (ci <= tiny) {
            ++rep.zero_count;
        } else if (si <= tiny) {
            ++rep.infinite_count;
        } else {
            rep.sigmas.push_back(ci / si);
        }
    }
    std::sort(rep.sigmas.begin(), rep.sigmas.end());
    return rep;
}

}  // namespace jdgsvd
