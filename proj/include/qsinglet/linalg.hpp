#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "qsinglet/errors.hpp"
#include "qsinglet/rng.hpp"

namespace qsinglet {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

inline bool is_unitary(const Matrix& u, double tol = 1e-10) {
    if (u.rows() != u.cols() || u.rows() == 0) return false;
    Matrix gram = u.adjoint() * u;
    gram -= Matrix::Identity(u.rows(), u.cols());
    return max_abs(gram) <= tol;
}

inline bool is_hermitian(const Matrix& m, double tol = 1e-10) {
    if (m.rows() != m.cols()) return false;
    return max_abs(Matrix(m - m.adjoint())) <= tol;
}

// In-project Householder QR for small complex matrices. Used for Haar
// sampling so that the sampled stream does not depend on the platform's
// LAPACK; input sizes are the local dimension (d <= ~10).
inline void householder_qr(const Matrix& a, Matrix& q, Matrix& r) {
    const Eigen::Index n = a.rows();
    const Eigen::Index m = a.cols();
    r = a;
    q = Matrix::Identity(n, n);
    for (Eigen::Index j = 0; j < std::min(n, m); ++j) {
        Vector x = r.block(j, j, n - j, 1);
        const double xnorm = x.norm();
        if (xnorm < 1e-300) continue;
        // Reflect x onto -phase(x0) * |x| * e1 for numerical stability.
        Complex phase = (std::abs(x(0)) > 0.0) ? x(0) / std::abs(x(0)) : Complex(1.0, 0.0);
        Vector v = x;
        v(0) += phase * xnorm;
        const double vnorm = v.norm();
        if (vnorm < 1e-300) continue;
        v /= vnorm;
        r.block(j, 0, n - j, m) -= 2.0 * v * (v.adjoint() * r.block(j, 0, n - j, m));
        q.block(0, j, n, n - j) -= 2.0 * (q.block(0, j, n, n - j) * v) * v.adjoint();
    }
}

struct LanczosOptions {
    int max_iterations = 300;
    double residual_tolerance = 1e-10;  // absolute, on ||H v - theta v||
    std::uint64_t seed = 0;
};

struct LanczosResult {
    std::vector<double> eigenvalues;               // ascending
    std::vector<Eigen::VectorXd> eigenvectors;     // matching order
    int iterations = 0;                            // total matvec count
};

namespace detail {

// One Lanczos run with full reorthogonalization against both the Krylov
// basis and a set of deflated (already converged) vectors. Returns the
// lowest Ritz pair.
template <typename MatVec>
bool lanczos_single(const MatVec& apply, Eigen::Index dim,
                    const std::vector<Eigen::VectorXd>& deflated,
                    const LanczosOptions& opt, Rng& rng,
                    double& eigenvalue, Eigen::VectorXd& eigenvector,
                    int& matvecs) {
    const int max_iter = static_cast<int>(std::min<Eigen::Index>(opt.max_iterations, dim));
    std::vector<Eigen::VectorXd> basis;
    basis.reserve(max_iter);
    std::vector<double> alpha, beta;

    auto orthogonalize = [&](Eigen::VectorXd& v) {
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& d : deflated) v -= d.dot(v) * d;
            for (const auto& b : basis) v -= b.dot(v) * b;
        }
    };

    Eigen::VectorXd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = rng.gaussian();
    orthogonalize(v);
    double vnorm = v.norm();
    if (vnorm < 1e-12) return false;  // space exhausted by deflation
    v /= vnorm;
    basis.push_back(v);

    Eigen::VectorXd w(dim);
    for (int it = 0; it < max_iter; ++it) {
        apply(basis.back(), w);
        ++matvecs;
        const double a = basis.back().dot(w);
        alpha.push_back(a);
        w -= a * basis.back();
        if (it > 0) w -= beta.back() * basis[basis.size() - 2];
        orthogonalize(w);
        const double b = w.norm();

        // Ritz extraction from the current tridiagonal.
        const int m = static_cast<int>(alpha.size());
        Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            tri(i, i) = alpha[i];
            if (i + 1 < m) tri(i, i + 1) = tri(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
        const double theta = es.eigenvalues()(0);
        const Eigen::VectorXd y = es.eigenvectors().col(0);
        const double residual = std::abs(b * y(m - 1));

        if (residual <= opt.residual_tolerance || b < 1e-13 || m == static_cast<int>(dim)) {
            eigenvector = Eigen::VectorXd::Zero(dim);
            for (int i = 0; i < m; ++i) eigenvector += y(i) * basis[i];
            // Deflation and rounding can leave a slightly non-normalized vector.
            eigenvector.normalize();
            eigenvalue = theta;
            return true;
        }
        beta.push_back(b);
        basis.push_back(w / b);
    }
    throw ConvergenceError("Lanczos failed to converge", matvecs);
}

}  // namespace detail

// Lowest k eigenpairs of a real symmetric operator, found by repeated
// Lanczos runs with sequential deflation (so genuine degeneracies up to
// multiplicity k are resolved, which a single Krylov run cannot do).
template <typename MatVec>
LanczosResult lanczos_lowest(const MatVec& apply, Eigen::Index dim, int k,
                             const LanczosOptions& opt = {}) {
    LanczosResult result;
    Rng rng(opt.seed);
    for (int j = 0; j < k && j < dim; ++j) {
        double value = 0.0;
        Eigen::VectorXd vec;
        if (!detail::lanczos_single(apply, dim, result.eigenvectors, opt, rng,
                                    value, vec, result.iterations)) {
            break;  // deflation exhausted the space
        }
        result.eigenvalues.push_back(value);
        result.eigenvectors.push_back(std::move(vec));
    }
    // Deflated runs can return values out of order when clusters are tight.
    for (std::size_t i = 1; i < result.eigenvalues.size(); ++i) {
        for (std::size_t j = i; j > 0 && result.eigenvalues[j] < result.eigenvalues[j - 1]; --j) {
            std::swap(result.eigenvalues[j], result.eigenvalues[j - 1]);
            std::swap(result.eigenvectors[j], result.eigenvectors[j - 1]);
        }
    }
    return result;
}

}  // namespace qsinglet
