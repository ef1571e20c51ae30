#include "wzw/linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace wzw::lin {

Mat cholesky(const Mat& gram) {
    Eigen::LLT<Mat> llt(gram);
    if (llt.info() != Eigen::Success)
        throw ValidationError("cholesky: Gram matrix not positive definite");
    return llt.matrixL();
}

Mat whiten_endo(const Mat& a, const Mat& chol_lower) {
    // w = L^H a L^{-H}: similar to a, Hermitian when a is H-Hermitian.
    Mat right = chol_lower.triangularView<Eigen::Lower>().solve(a.adjoint()).adjoint();
    return chol_lower.adjoint() * right;
}

RealVec h_spectrum(const Mat& a, const Mat& gram) {
    const Mat w = hermitize(whiten_endo(a, cholesky(gram)));
    Eigen::SelfAdjointEigenSolver<Mat> es(w, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

double loewner_min_eig(const Mat& a, const Mat& b, const Mat& gram) {
    return h_spectrum(b - a, gram).minCoeff();
}

double gram_order_min_eig(const Mat& g0, const Mat& g1) {
    const Mat l = cholesky(g0);
    Mat tmp = l.triangularView<Eigen::Lower>().solve(g1 - g0);
    Mat w = l.triangularView<Eigen::Lower>().solve(tmp.adjoint()).adjoint();
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(w), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

Mat h_matrix_function(const Mat& a, const Mat& gram, double (*f)(double)) {
    const Mat l = cholesky(gram);
    const Mat w = hermitize(whiten_endo(a, l));
    Eigen::SelfAdjointEigenSolver<Mat> es(w);
    RealVec d = es.eigenvalues();
    for (int i = 0; i < d.size(); ++i) d[i] = f(d[i]);
    const Mat fw = es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
    // unwhiten: a = L^{-H} w L^{H}
    Mat tmp = l.adjoint().triangularView<Eigen::Upper>().solve(fw);
    return tmp * l.adjoint();
}

double trace_abs(const Mat& a, const Mat& gram) {
    const Mat w = whiten_endo(a, cholesky(gram));
    Eigen::BDCSVD<Mat> svd(w);
    return svd.singularValues().sum();
}

double op_norm(const Mat& a, const Mat& gram) {
    const Mat w = whiten_endo(a, cholesky(gram));
    Eigen::BDCSVD<Mat> svd(w);
    return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

Complex permanent(const Mat& a) {
    const int n = static_cast<int>(a.rows());
    if (n == 0) return Complex(1, 0);
    if (n == 1) return a(0, 0);
    // Ryser with Gray-code subset enumeration.
    Vec row_sum = Vec::Zero(n);
    Complex total(0, 0);
    unsigned long prev = 0;
    const unsigned long full = (1ul << n);
    for (unsigned long g = 1; g < full; ++g) {
        const unsigned long gray = g ^ (g >> 1);
        const unsigned long diff = gray ^ prev;
        int j = 0;
        while (!((diff >> j) & 1ul)) ++j;
        if (gray & diff)
            row_sum += a.col(j);
        else
            row_sum -= a.col(j);
        prev = gray;
        Complex prod(1, 0);
        for (int i = 0; i < n; ++i) prod *= row_sum[i];
        const int bits = __builtin_popcountll(gray);
        total += ((n - bits) % 2 == 0) ? prod : -prod;
    }
    return total;
}

Mat col_space(const Mat& a, double rel_tol) {
    Eigen::ColPivHouseholderQR<Mat> qr(a);
    qr.setThreshold(rel_tol);
    const int rank = static_cast<int>(qr.rank());
    Mat q = qr.householderQ() * Mat::Identity(a.rows(), rank);
    return q;
}

bool contained_in(const Mat& sub, const Mat& space, double tol) {
    const Mat q = col_space(space, 1e-12);
    for (int j = 0; j < sub.cols(); ++j) {
        const Vec v = sub.col(j);
        const double norm = v.norm();
        if (norm == 0.0) continue;
        const Vec res = v - q * (q.adjoint() * v);
        if (res.norm() > tol * norm) return false;
    }
    return true;
}

}  // namespace wzw::lin
