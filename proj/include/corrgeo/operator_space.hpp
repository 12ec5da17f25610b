#pragma once

// Finite Hermitian operators, eigenvalue signatures, membership in the
// bounded-signature operator set, Hilbert-Schmidt geometry, and the
// dimension of the regular stratum.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <random>
#include <utility>
#include <vector>

#include "corrgeo/errors.hpp"

namespace corrgeo {

using Complex = std::complex<double>;
using MatrixC = Eigen::MatrixXcd;
using MatrixR = Eigen::MatrixXd;
using VectorC = Eigen::VectorXcd;
using VectorR = Eigen::VectorXd;

struct Signature {
    int n_pos = 0;
    int n_neg = 0;
    int n_zero = 0;

    int dim() const { return n_pos + n_neg + n_zero; }
    bool operator==(const Signature&) const = default;
};

struct SignatureBound {
    int p = 0;
    int q = 0;

    bool operator==(const SignatureBound&) const = default;
};

// Hermitian matrix with eagerly computed spectrum (descending order).
// Entries are symmetrized (x + x*)/2 on construction, which guards
// against asymmetric rounding from upstream quadrature.
class HermitianOperator {
public:
    explicit HermitianOperator(const MatrixC& entries) {
        if (entries.rows() != entries.cols() || entries.rows() < 1)
            throw InvalidOperator("matrix must be square and nonempty");
        if (!entries.allFinite())
            throw InvalidOperator("non-finite entries");
        entries_ = 0.5 * (entries + entries.adjoint().eval());
        Eigen::SelfAdjointEigenSolver<MatrixC> es(entries_);
        if (es.info() != Eigen::Success)
            throw NumericalFailure("eigendecomposition failed");
        // Eigen returns ascending order; store descending.
        spectrum_ = es.eigenvalues().reverse();
    }

    int dim() const { return static_cast<int>(entries_.rows()); }
    const MatrixC& entries() const { return entries_; }
    const VectorR& spectrum() const { return spectrum_; }

    // Spectral norm.
    double norm() const {
        return std::max(std::abs(spectrum_(0)),
                        std::abs(spectrum_(spectrum_.size() - 1)));
    }

    double hs_norm() const { return entries_.norm(); }

private:
    MatrixC entries_;
    VectorR spectrum_;
};

// Eigenvalues within tol * spectral-norm of zero count as zero; the
// relative threshold keeps the signature stable under rescaling of
// units. For the zero operator tol is used as an absolute cutoff.
inline Signature signature(const HermitianOperator& op, double tol) {
    if (tol < 0)
        throw InvalidArgs("tol must be nonnegative");
    double scale = op.norm();
    double cut = (scale > 0) ? tol * scale : tol;
    Signature sig;
    for (Eigen::Index i = 0; i < op.spectrum().size(); ++i) {
        double lam = op.spectrum()(i);
        if (lam > cut)
            ++sig.n_pos;
        else if (lam < -cut)
            ++sig.n_neg;
        else
            ++sig.n_zero;
    }
    return sig;
}

struct FpqMembership {
    bool member = false;
    bool regular = false;
    Signature sig;
};

inline FpqMembership in_fpq(const HermitianOperator& op,
                            const SignatureBound& bound, double tol) {
    FpqMembership r;
    r.sig = signature(op, tol);
    r.member = r.sig.n_pos <= bound.p && r.sig.n_neg <= bound.q;
    r.regular = r.sig.n_pos == bound.p && r.sig.n_neg == bound.q;
    return r;
}

inline double hs_inner(const HermitianOperator& a, const HermitianOperator& b) {
    if (a.dim() != b.dim())
        throw DimMismatch("hs_inner dims " + std::to_string(a.dim()) + " vs " +
                          std::to_string(b.dim()));
    return (a.entries() * b.entries()).trace().real();
}

inline double hs_dist(const HermitianOperator& a, const HermitianOperator& b) {
    if (a.dim() != b.dim())
        throw DimMismatch("hs_dist dims differ");
    return (a.entries() - b.entries()).norm();
}

inline bool is_unitary(const MatrixC& u, double tol = 1e-10) {
    if (u.rows() != u.cols())
        return false;
    MatrixC d = u * u.adjoint() - MatrixC::Identity(u.rows(), u.cols());
    return d.norm() <= tol * static_cast<double>(u.rows());
}

inline HermitianOperator conjugate(const MatrixC& u, const HermitianOperator& op) {
    if (u.rows() != op.dim())
        throw DimMismatch("conjugate: unitary dim != operator dim");
    if (!is_unitary(u))
        throw NotUnitary("conjugate called with non-unitary matrix");
    return HermitianOperator(u * op.entries() * u.adjoint());
}

// Dimension of the regular stratum: operators with exactly p positive
// and q negative eigenvalues on a Hilbert space of dimension f form a
// smooth manifold of dimension 2 f (p+q) - (p+q)^2.
inline long fpq_dimension(int f, const SignatureBound& bound) {
    int r = bound.p + bound.q;
    if (r < 1 || f < r)
        throw InvalidArgs("need f >= p+q >= 1");
    return 2L * f * r - 1L * r * r;
}

namespace detail {

// Real coordinates of a Hermitian matrix: diagonal, then re/im of the
// strict upper triangle. f^2 reals in total.
inline VectorR hermitian_coords(const MatrixC& h) {
    const Eigen::Index f = h.rows();
    VectorR v(f * f);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < f; ++i)
        v(k++) = h(i, i).real();
    for (Eigen::Index i = 0; i < f; ++i)
        for (Eigen::Index j = i + 1; j < f; ++j) {
            v(k++) = h(i, j).real();
            v(k++) = h(i, j).imag();
        }
    return v;
}

} // namespace detail

// Numerically measures the rank of the differential of the
// parametrization (V, d) -> V diag(d) V^* at a random regular point,
// where V is f x (p+q) and d carries p positive and q negative entries.
// The measured rank must equal fpq_dimension.
inline long fpq_rank_check(int f, const SignatureBound& bound, int trials,
                           unsigned seed) {
    const int r = bound.p + bound.q;
    if (r < 1 || f < r)
        throw InvalidArgs("need f >= p+q >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> mag(0.5, 1.5);

    for (int attempt = 0; attempt < std::max(1, trials); ++attempt) {
        MatrixC z(f, r);
        for (int i = 0; i < f; ++i)
            for (int j = 0; j < r; ++j)
                z(i, j) = Complex(gauss(rng), gauss(rng));
        Eigen::HouseholderQR<MatrixC> qr(z);
        MatrixC v = qr.householderQ() * MatrixC::Identity(f, r);
        VectorR d(r);
        for (int j = 0; j < r; ++j)
            d(j) = (j < bound.p ? 1.0 : -1.0) * mag(rng);

        const int n_params = 2 * f * r + r;
        const double h = 1e-5;
        MatrixR jac(f * f, n_params);
        auto eval = [&](const MatrixC& vv, const VectorR& dd) {
            return detail::hermitian_coords(vv * dd.asDiagonal() * vv.adjoint());
        };
        int col = 0;
        for (int i = 0; i < f; ++i)
            for (int j = 0; j < r; ++j)
                for (int part = 0; part < 2; ++part) {
                    Complex dz = (part == 0) ? Complex(h, 0) : Complex(0, h);
                    MatrixC vp = v, vm = v;
                    vp(i, j) += dz;
                    vm(i, j) -= dz;
                    jac.col(col++) = (eval(vp, d) - eval(vm, d)) / (2 * h);
                }
        for (int j = 0; j < r; ++j) {
            VectorR dp = d, dm = d;
            dp(j) += h;
            dm(j) -= h;
            jac.col(col++) = (eval(v, dp) - eval(v, dm)) / (2 * h);
        }

        Eigen::JacobiSVD<MatrixR> svd(jac);
        const VectorR& sv = svd.singularValues();
        if (sv(0) <= 0)
            continue; // degenerate draw, retry
        long rank = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i)
            if (sv(i) > 1e-6 * sv(0))
                ++rank;
        return rank;
    }
    throw NumericalFailure("fpq_rank_check: all random draws degenerate");
}

} // namespace corrgeo
