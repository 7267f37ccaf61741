#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>

#include "xchan/matrix_core.hpp"

namespace xchan {

/// Hermitian, unit-trace, positive semidefinite state. Only obtainable through validation.
class DensityMatrix {
public:
    std::size_t dim() const noexcept { return static_cast<std::size_t>(mat_.rows()); }
    const ComplexMatrix& matrix() const noexcept { return mat_; }

private:
    explicit DensityMatrix(ComplexMatrix m) : mat_(std::move(m)) {}
    friend DensityMatrix validate_density(const ComplexMatrix& m);

    ComplexMatrix mat_;
};

inline DensityMatrix validate_density(const ComplexMatrix& m) {
    require_finite(m, "validate_density");
    require_square(m, "validate_density");
    const double herm_res = hermiticity_residual(m);
    if (herm_res > tol::herm) {
        throw NotHermitianError("density matrix is not Hermitian", herm_res);
    }
    const double trace_res = std::abs(m.trace() - Complex{1.0, 0.0});
    if (trace_res > tol::trace) {
        throw NotUnitTraceError("density matrix does not have unit trace", trace_res);
    }
    const double smallest = herm_eig(m).values.back();
    if (smallest < -tol::psd) {
        throw NotPsdError("density matrix is not positive semidefinite", -smallest);
    }
    return DensityMatrix(m);
}

struct BlochVector {
    std::array<double, 3> w{};

    double norm() const { return std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]); }
};

/// rho = (I + w . sigma) / 2
inline DensityMatrix bloch_to_rho(const BlochVector& b) {
    const double n = b.norm();
    if (!(n <= 1.0 + 1e-10)) {
        throw InvalidArgument("bloch_to_rho: |w| = " + std::to_string(n) + " exceeds 1");
    }
    ComplexMatrix rho = pauli::identity();
    for (int i = 0; i < 3; ++i) rho += b.w[static_cast<std::size_t>(i)] * pauli::sigma(i + 1);
    return validate_density(0.5 * rho);
}

/// w_i = Tr[sigma_i rho]
inline BlochVector rho_to_bloch(const DensityMatrix& rho) {
    if (rho.dim() != 2) {
        throw DimensionError("rho_to_bloch: state is not a qubit");
    }
    BlochVector b;
    for (int i = 0; i < 3; ++i) {
        b.w[static_cast<std::size_t>(i)] = (pauli::sigma(i + 1) * rho.matrix()).trace().real();
    }
    return b;
}

/// Seeded standard complex Gaussian matrix.
inline ComplexMatrix gaussian_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    ComplexMatrix g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        g.data()[i] = Complex{re, im};
    }
    return g;
}

/// g^dagger g / Tr[g^dagger g] with a seeded Gaussian g.
inline DensityMatrix random_density(std::size_t dim, std::uint64_t seed) {
    if (dim < 1) {
        throw InvalidArgument("random_density: dim must be >= 1");
    }
    std::mt19937_64 rng(seed);
    const ComplexMatrix g = gaussian_matrix(dim, dim, rng);
    ComplexMatrix rho = g.adjoint() * g;
    rho /= rho.trace().real();
    // exact Hermiticity; the product is Hermitian only up to rounding
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return validate_density(rho);
}

}  // namespace xchan
