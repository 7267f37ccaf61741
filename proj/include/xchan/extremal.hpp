#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "xchan/channel.hpp"
#include "xchan/matrix_core.hpp"

namespace xchan {

/// Diagonal factors D_1..D_N of an extremal channel C_i = U_i D_i.
///
/// Every column m satisfies sum_i D_i[m]^2 = 1, so sum_i C_i^dagger C_i = I for any
/// unitaries U_i. The right singular vectors are absorbed into the ordering of each
/// D_i's entries, so no V factor is stored.
class ExtremalParams {
public:
    static ExtremalParams from_diagonals(std::vector<std::vector<double>> diagonals) {
        const std::size_t n = diagonals.size();
        if (n < 2) throw InvalidArgument("ExtremalParams: need N >= 2 diagonals");
        for (const auto& d : diagonals) {
            if (d.size() != n) {
                throw DimensionError("ExtremalParams: each diagonal must have N entries");
            }
            for (double x : d) {
                if (!(x >= 0.0 && x <= 1.0)) {
                    throw InvalidArgument("ExtremalParams: entry outside [0, 1]");
                }
            }
        }
        for (std::size_t m = 0; m < n; ++m) {
            double s = 0.0;
            for (const auto& d : diagonals) s += d[m] * d[m];
            if (std::abs(s - 1.0) > 1e-10) {
                throw ValidationError("ExtremalParams: column " + std::to_string(m) +
                                          " squares do not sum to 1",
                                      std::abs(s - 1.0));
            }
        }
        return ExtremalParams(std::move(diagonals));
    }

    std::size_t n() const noexcept { return diagonals_.size(); }
    const std::vector<std::vector<double>>& diagonals() const noexcept { return diagonals_; }
    const std::vector<double>& diagonal(std::size_t i) const { return diagonals_[i]; }

private:
    explicit ExtremalParams(std::vector<std::vector<double>> d) : diagonals_(std::move(d)) {}

    std::vector<std::vector<double>> diagonals_;
};

/// Unitaries whose pairwise products U_i^dagger U_j (i != j) have zero diagonal,
/// which makes Tr[D_j D_i U_i^dagger U_j] vanish for every choice of diagonals.
struct CanonicalUnitaries {
    std::size_t n;
    std::vector<ComplexMatrix> us;
};

namespace detail {

inline ComplexMatrix permutation_matrix(const std::vector<int>& image) {
    // column m carries e_m to e_{image[m]}
    const auto n = static_cast<Eigen::Index>(image.size());
    ComplexMatrix p = ComplexMatrix::Zero(n, n);
    for (Eigen::Index m = 0; m < n; ++m) p(image[static_cast<std::size_t>(m)], m) = 1.0;
    return p;
}

}  // namespace detail

/// Largest |diag(U_i^dagger U_j)| over i != j.
inline double zero_diagonal_residual(const CanonicalUnitaries& cu) {
    double worst = 0.0;
    for (std::size_t i = 0; i < cu.us.size(); ++i)
        for (std::size_t j = 0; j < cu.us.size(); ++j)
            if (i != j) {
                const ComplexMatrix p = cu.us[i].adjoint() * cu.us[j];
                worst = std::max(worst, p.diagonal().cwiseAbs().maxCoeff());
            }
    return worst;
}

/// N = 2: {I, sigma1}. N = 3: the three transpositions. N = 4: {I, I(x)s1, s1(x)I, s1(x)s1}.
/// N > 4: powers of the cyclic shift S e_m = e_{m+1 mod N}.
inline CanonicalUnitaries canonical_unitaries(std::size_t n) {
    if (n < 2) throw InvalidArgument("canonical_unitaries: n must be >= 2");
    CanonicalUnitaries out{n, {}};
    if (n == 2) {
        out.us = {pauli::identity(), pauli::sigma1()};
    } else if (n == 3) {
        out.us = {detail::permutation_matrix({0, 2, 1}), detail::permutation_matrix({2, 1, 0}),
                  detail::permutation_matrix({1, 0, 2})};
    } else if (n == 4) {
        const ComplexMatrix id = pauli::identity();
        const ComplexMatrix x = pauli::sigma1();
        out.us = {kron(id, id), kron(id, x), kron(x, id), kron(x, x)};
    } else {
        std::vector<int> shift(n);
        for (std::size_t m = 0; m < n; ++m) shift[m] = static_cast<int>((m + 1) % n);
        const ComplexMatrix s = detail::permutation_matrix(shift);
        ComplexMatrix power = ComplexMatrix::Identity(static_cast<Eigen::Index>(n),
                                                      static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            out.us.push_back(power);
            power = (s * power).eval();
        }
    }
    return out;
}

/// Radicands below this are rounding noise from 1 - sum d^2 and are set to zero.
inline constexpr double kCompletionFloor = 1e-14;

/// Fills D_N[m] = sqrt(1 - sum_{i<N} D_i[m]^2).
inline ExtremalParams complete_last_diagonal(std::vector<std::vector<double>> partials) {
    const std::size_t n = partials.size() + 1;
    if (n < 2) throw InvalidArgument("complete_last_diagonal: need at least one diagonal");
    std::vector<double> last(n);
    for (const auto& d : partials) {
        if (d.size() != n) {
            throw DimensionError("complete_last_diagonal: each diagonal must have " +
                                 std::to_string(n) + " entries");
        }
    }
    for (std::size_t m = 0; m < n; ++m) {
        double s = 0.0;
        for (const auto& d : partials) s += d[m] * d[m];
        const double radicand = 1.0 - s;
        if (radicand < -tol::psd) throw ColumnOverflowError(m, -radicand);
        last[m] = radicand <= kCompletionFloor ? 0.0 : std::sqrt(radicand);
    }
    partials.push_back(std::move(last));
    return ExtremalParams::from_diagonals(std::move(partials));
}

/// C_i = U_i diag(D_i); operators with an all-zero D_i are dropped.
inline KrausChannel build_extremal(const ExtremalParams& p, const CanonicalUnitaries& cu) {
    if (p.n() != cu.n || cu.us.size() != p.n()) {
        throw DimensionError("build_extremal: parameter and unitary dimensions differ");
    }
    std::vector<ComplexMatrix> ops;
    for (std::size_t i = 0; i < p.n(); ++i) {
        const auto& d = p.diagonal(i);
        if (std::all_of(d.begin(), d.end(), [](double x) { return x == 0.0; })) continue;
        ops.push_back(cu.us[i] * diagonal_matrix(d));
    }
    return KrausChannel(std::move(ops));
}

struct SampledExtremal {
    ExtremalParams params;
    KrausChannel channel;
};

/// Squared column entries drawn from a flat Dirichlet distribution.
inline ExtremalParams sample_extremal_params(std::size_t n, std::mt19937_64& rng) {
    std::exponential_distribution<double> expo(1.0);
    std::vector<std::vector<double>> diag(n, std::vector<double>(n));
    for (std::size_t m = 0; m < n; ++m) {
        std::vector<double> draws(n);
        double total = 0.0;
        for (auto& x : draws) {
            x = expo(rng);
            total += x;
        }
        for (std::size_t i = 0; i < n; ++i) diag[i][m] = std::sqrt(draws[i] / total);
    }
    return ExtremalParams::from_diagonals(std::move(diag));
}

inline SampledExtremal sample_extremal(std::size_t n, std::uint64_t seed) {
    if (n < 2) throw InvalidArgument("sample_extremal: n must be >= 2");
    std::mt19937_64 rng(seed);
    ExtremalParams p = sample_extremal_params(n, rng);
    KrausChannel ch = build_extremal(p, canonical_unitaries(n));
    return {std::move(p), std::move(ch)};
}

namespace detail {

// Choi matrix of the canonical channel whose first N-1 diagonals have the given squares.
inline ComplexMatrix choi_from_squares(std::size_t n, const std::vector<double>& squares,
                                       const CanonicalUnitaries& cu) {
    std::vector<std::vector<double>> diag(n, std::vector<double>(n));
    for (std::size_t m = 0; m < n; ++m) {
        double s = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double x = squares[i * n + m];
            diag[i][m] = std::sqrt(x);
            s += x;
        }
        diag[n - 1][m] = std::sqrt(1.0 - s);
    }
    ComplexMatrix j = ComplexMatrix::Zero(static_cast<Eigen::Index>(n * n),
                                          static_cast<Eigen::Index>(n * n));
    for (std::size_t i = 0; i < n; ++i) {
        const ComplexVector v = vec(cu.us[i] * diagonal_matrix(diag[i]));
        j += v * v.adjoint();
    }
    return j;
}

}  // namespace detail

inline constexpr double kInteriorMargin = 1e-3;

/// Numerical rank of d(Choi)/d(free parameters) by central differences.
///
/// The free parameters are the N^2 - N squared entries of D_1..D_{N-1}; D_N is
/// completed. The Choi matrix is embedded in R^{2 N^4} through its real and imaginary parts.
inline std::size_t parameter_jacobian_rank(const ExtremalParams& p, double h = 1e-5,
                                           double tol_rank = tol::rank) {
    const std::size_t n = p.n();
    for (const auto& d : p.diagonals())
        for (double x : d)
            if (!(x > kInteriorMargin && x < 1.0 - kInteriorMargin)) {
                throw BoundaryParameterError("parameter_jacobian_rank: entry " +
                                             std::to_string(x) + " is not interior");
            }
    if (!(h > 0.0)) throw InvalidArgument("parameter_jacobian_rank: step must be positive");

    const CanonicalUnitaries cu = canonical_unitaries(n);
    std::vector<double> base((n - 1) * n);
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t m = 0; m < n; ++m) base[i * n + m] = p.diagonal(i)[m] * p.diagonal(i)[m];

    const auto rows = static_cast<Eigen::Index>(2 * n * n * n * n);
    RealMatrix jac(rows, static_cast<Eigen::Index>(base.size()));
    for (std::size_t k = 0; k < base.size(); ++k) {
        // Near the interior margin a squared entry (or the completed one) can be smaller
        // than h; the step shrinks so both stencil points stay inside the simplex.
        const std::size_t col = k % n;
        const double completed = p.diagonal(n - 1)[col] * p.diagonal(n - 1)[col];
        const double step = std::min({h, 0.5 * base[k], 0.5 * completed});
        auto plus = base;
        auto minus = base;
        plus[k] += step;
        minus[k] -= step;
        const ComplexMatrix diff =
            (detail::choi_from_squares(n, plus, cu) - detail::choi_from_squares(n, minus, cu)) /
            (2.0 * step);
        const Eigen::Index half = diff.size();
        for (Eigen::Index e = 0; e < half; ++e) {
            jac(e, static_cast<Eigen::Index>(k)) = diff.data()[e].real();
            jac(half + e, static_cast<Eigen::Index>(k)) = diff.data()[e].imag();
        }
    }
    return numerical_rank(singular_values(jac), tol_rank);
}

struct PairReduction {
    ComplexMatrix m;                   // (I - A_drop)^{-1/2}
    std::vector<ComplexMatrix> reduced;  // M A_i M for i != drop
};

/// One induction step: conjugating the remaining terms by (I - A_drop)^{-1/2}
/// yields a family that again sums to the identity.
inline PairReduction pair_reduction_step(std::span<const ComplexMatrix> a_list,
                                         std::size_t drop_index) {
    if (a_list.size() < 2) throw InvalidArgument("pair_reduction_step: need at least two terms");
    if (drop_index >= a_list.size()) throw InvalidArgument("pair_reduction_step: bad drop index");
    const auto n = a_list.front().rows();
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    ComplexMatrix sum = ComplexMatrix::Zero(n, n);
    for (const auto& a : a_list) {
        require_square(a, "pair_reduction_step");
        if (a.rows() != n) throw DimensionError("pair_reduction_step: dimensions differ");
        sum += a;
    }
    const double res = max_abs(sum - id);
    if (res > tol::tp) throw ValidationError("pair_reduction_step: terms do not sum to I", res);

    const HermEig eig = herm_eig(id - a_list[drop_index]);
    if (eig.values.back() <= 1e-8) throw SingularComplementError(eig.values.back());

    PairReduction out;
    out.m = spectral_map(eig, [](double x) { return 1.0 / std::sqrt(x); });
    for (std::size_t i = 0; i < a_list.size(); ++i) {
        if (i != drop_index) out.reduced.push_back(out.m * a_list[i] * out.m);
    }
    return out;
}

}  // namespace xchan
