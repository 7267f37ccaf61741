#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "xchan/error.hpp"

namespace xchan {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;
using RealMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Absolute entrywise tolerances shared by all modules.
namespace tol {
inline constexpr double herm = 1e-10;
inline constexpr double unitary = 1e-10;
inline constexpr double recon = 1e-10;
inline constexpr double psd = 1e-10;
inline constexpr double rank = 1e-10;  // relative to the largest singular value
inline constexpr double trace = 1e-10;
inline constexpr double tp = 1e-9;
inline constexpr double orth = 1e-9;
}  // namespace tol

namespace pauli {

inline ComplexMatrix identity() { return ComplexMatrix::Identity(2, 2); }

inline ComplexMatrix sigma1() {
    ComplexMatrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

inline ComplexMatrix sigma2() {
    const Complex i{0.0, 1.0};
    ComplexMatrix m(2, 2);
    m << 0.0, -i, i, 0.0;
    return m;
}

inline ComplexMatrix sigma3() {
    ComplexMatrix m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

/// sigma(0) is the identity, sigma(1..3) the Pauli matrices.
inline ComplexMatrix sigma(int index) {
    switch (index) {
        case 0: return identity();
        case 1: return sigma1();
        case 2: return sigma2();
        case 3: return sigma3();
        default: throw InvalidArgument("Pauli index must be 0..3");
    }
}

}  // namespace pauli

/// Largest absolute entry.
inline double max_abs(const ComplexMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError("max_abs_diff: shape mismatch");
    }
    return max_abs(a - b);
}

inline bool is_finite(const ComplexMatrix& m) {
    return std::all_of(m.data(), m.data() + m.size(), [](const Complex& z) {
        return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
}

inline void require_finite(const ComplexMatrix& m, const char* what) {
    if (m.rows() < 1 || m.cols() < 1) {
        throw DimensionError(std::string(what) + ": empty matrix");
    }
    if (!is_finite(m)) {
        throw NonFiniteError(std::string(what) + ": non-finite entry");
    }
}

inline void require_square(const ComplexMatrix& m, const char* what) {
    if (m.rows() != m.cols()) {
        throw DimensionError(std::string(what) + ": matrix is " + std::to_string(m.rows()) +
                             "x" + std::to_string(m.cols()) + ", expected square");
    }
}

inline double hermiticity_residual(const ComplexMatrix& h) {
    return max_abs(h - h.adjoint());
}

inline double unitarity_residual(const ComplexMatrix& u) {
    return max_abs(u.adjoint() * u - ComplexMatrix::Identity(u.cols(), u.cols()));
}

/// Hilbert-Schmidt inner product Tr[a^dagger b].
inline Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
    return (a.adjoint() * b).trace();
}

inline ComplexMatrix diagonal_matrix(std::span<const double> d) {
    ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(d.size()),
                                          static_cast<Eigen::Index>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) {
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = d[i];
    }
    return m;
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

enum class TraceOut { sys, env };

/// Partial trace of an operator on sys (x) env, sys being the left Kronecker factor.
inline ComplexMatrix partial_trace(const ComplexMatrix& m, std::size_t dim_sys,
                                   std::size_t dim_env, TraceOut over) {
    const auto ds = static_cast<Eigen::Index>(dim_sys);
    const auto de = static_cast<Eigen::Index>(dim_env);
    if (ds < 1 || de < 1 || m.rows() != ds * de || m.cols() != ds * de) {
        throw DimensionError("partial_trace: matrix is " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()) + ", expected " +
                             std::to_string(ds * de) + " square");
    }
    if (over == TraceOut::env) {
        ComplexMatrix out = ComplexMatrix::Zero(ds, ds);
        for (Eigen::Index i = 0; i < ds; ++i)
            for (Eigen::Index j = 0; j < ds; ++j)
                for (Eigen::Index e = 0; e < de; ++e) out(i, j) += m(i * de + e, j * de + e);
        return out;
    }
    ComplexMatrix out = ComplexMatrix::Zero(de, de);
    for (Eigen::Index a = 0; a < de; ++a)
        for (Eigen::Index b = 0; b < de; ++b)
            for (Eigen::Index s = 0; s < ds; ++s) out(a, b) += m(s * de + a, s * de + b);
    return out;
}

struct HermEig {
    std::vector<double> values;  // descending
    ComplexMatrix vectors;       // eigenvectors as columns, same order as values
};

namespace detail {

// Indices of `values` ordered by descending value; ties keep input order.
inline std::vector<Eigen::Index> descending_order(const Eigen::VectorXd& values) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(values.size()));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return values(a) > values(b); });
    return idx;
}

}  // namespace detail

inline HermEig herm_eig(const ComplexMatrix& h, double tol_herm = tol::herm) {
    require_finite(h, "herm_eig");
    require_square(h, "herm_eig");
    const double res = hermiticity_residual(h);
    if (res > tol_herm) {
        throw NotHermitianError("herm_eig: input is not Hermitian", res);
    }
    const Eigen::MatrixXcd sym = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(sym);
    const auto order = detail::descending_order(solver.eigenvalues());
    HermEig out;
    out.values.reserve(order.size());
    out.vectors.resize(h.rows(), h.cols());
    for (std::size_t k = 0; k < order.size(); ++k) {
        out.values.push_back(solver.eigenvalues()(order[k]));
        out.vectors.col(static_cast<Eigen::Index>(k)) = solver.eigenvectors().col(order[k]);
    }
    return out;
}

/// Applies f to the spectrum of a Hermitian matrix.
template <typename F>
ComplexMatrix spectral_map(const HermEig& eig, F&& f) {
    const auto n = static_cast<Eigen::Index>(eig.values.size());
    ComplexMatrix scaled = eig.vectors;
    for (Eigen::Index k = 0; k < n; ++k) {
        scaled.col(k) *= f(eig.values[static_cast<std::size_t>(k)]);
    }
    return scaled * eig.vectors.adjoint();
}

/// Hermitian PSD square root. Eigenvalues in [-tol_psd, 0] are clamped to zero.
inline ComplexMatrix psd_sqrt(const ComplexMatrix& p, double tol_psd = tol::psd) {
    const HermEig eig = herm_eig(p);
    const double smallest = eig.values.back();
    if (smallest < -tol_psd) {
        throw NotPsdError("psd_sqrt: negative eigenvalue", -smallest);
    }
    return spectral_map(eig, [](double x) { return std::sqrt(std::max(x, 0.0)); });
}

/// m = u * diag(d) * v with d descending.
struct Svd {
    ComplexMatrix u;
    std::vector<double> d;
    ComplexMatrix v;
};

inline Svd svd(const ComplexMatrix& m) {
    require_finite(m, "svd");
    require_square(m, "svd");
    Eigen::JacobiSVD<Eigen::MatrixXcd> solver(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Svd out;
    out.u = solver.matrixU();
    out.v = solver.matrixV().adjoint();
    const auto& s = solver.singularValues();
    out.d.assign(s.data(), s.data() + s.size());
    return out;
}

/// Singular values (descending) of an arbitrary real or complex matrix.
template <typename Derived>
std::vector<double> singular_values(const Eigen::MatrixBase<Derived>& m) {
    using Plain = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    Eigen::JacobiSVD<Plain> solver{Plain(m)};
    const auto& s = solver.singularValues();
    return {s.data(), s.data() + s.size()};
}

/// Count of singular values strictly above tol_rel times the largest.
inline std::size_t numerical_rank(const std::vector<double>& sv, double tol_rel) {
    if (sv.empty() || sv.front() == 0.0) return 0;
    const double cut = tol_rel * sv.front();
    return static_cast<std::size_t>(
        std::count_if(sv.begin(), sv.end(), [cut](double s) { return s > cut; }));
}

/// Column-stacked vectorization.
inline ComplexVector vec(const ComplexMatrix& m) {
    ComplexVector out(m.size());
    Eigen::Index k = 0;
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r) out(k++) = m(r, c);
    return out;
}

/// Rank of the span of a set of equally-shaped matrices.
inline std::size_t matrix_rank(std::span<const ComplexMatrix> mats, double tol_rank = tol::rank) {
    if (mats.empty()) {
        throw InvalidArgument("matrix_rank: empty list");
    }
    const auto rows = mats.front().rows();
    const auto cols = mats.front().cols();
    Eigen::MatrixXcd stacked(rows * cols, static_cast<Eigen::Index>(mats.size()));
    for (std::size_t k = 0; k < mats.size(); ++k) {
        if (mats[k].rows() != rows || mats[k].cols() != cols) {
            throw DimensionError("matrix_rank: matrices differ in shape");
        }
        stacked.col(static_cast<Eigen::Index>(k)) = vec(mats[k]);
    }
    return numerical_rank(singular_values(stacked), tol_rank);
}

}  // namespace xchan
