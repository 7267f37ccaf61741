#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "xchan/channel.hpp"
#include "xchan/density.hpp"
#include "xchan/extremal.hpp"

namespace xchan {

/// Compression factors of an extremal qubit channel; the third is nu1 * nu2.
struct NuParams {
    double nu1;
    double nu2;

    double nu3() const noexcept { return nu1 * nu2; }
};

inline void validate(const NuParams& p) {
    auto in_range = [](double v) { return v > 0.0 && v <= 1.0; };
    if (!in_range(p.nu1) || !in_range(p.nu2)) {
        throw InvalidArgument("NuParams: nu1, nu2 must lie in (0, 1]");
    }
}

struct QubitDiagonal {
    double a;
    double b;
};

/// a = mu0 + mu3, b = mu0 - mu3 with
///   mu0 = 1/2 sqrt(1 + nu1 + nu2 + nu3),  mu3 = 1/2 sqrt(1 + nu3 - nu1 - nu2).
/// The 1/2 prefactor is what makes D_1 = diag(a, b) satisfy 2ab = nu1 + nu2 and
/// a^2 + b^2 = 1 + nu3; a prefactor of 1/4 misses both by a factor of 4.
inline QubitDiagonal nu_to_diagonals(const NuParams& p) {
    validate(p);
    const double nu3 = p.nu3();
    const double r0 = 1.0 + p.nu1 + p.nu2 + nu3;
    double r3 = 1.0 + nu3 - p.nu1 - p.nu2;
    if (r3 < -1e-12) {
        throw InvalidArgument("nu_to_diagonals: negative mu3 radicand " + std::to_string(r3));
    }
    r3 = std::max(r3, 0.0);
    const double mu0 = 0.5 * std::sqrt(r0);
    const double mu3 = 0.5 * std::sqrt(r3);
    return {std::min(mu0 + mu3, 1.0), mu0 - mu3};
}

/// C_1 = diag(a, b), C_2 = U_2 sqrt(I - C_1^2).
///
/// With U_2 = sigma1 the channel compresses sigma1 by max(nu1, nu2) and sigma2 by
/// min(nu1, nu2). For nu1 < nu2 the diagonal phase V = diag(1, -1) is absorbed into
/// U_2 = sigma1 V, which swaps the two compressions and leaves the sigma3 part alone.
inline KrausChannel channel_from_nu(const NuParams& p) {
    const QubitDiagonal d = nu_to_diagonals(p);
    ExtremalParams params = complete_last_diagonal({{d.a, d.b}});
    CanonicalUnitaries cu = canonical_unitaries(2);
    if (p.nu1 < p.nu2) {
        ComplexMatrix phase = ComplexMatrix::Identity(2, 2);
        phase(1, 1) = -1.0;
        cu.us[1] = pauli::sigma1() * phase;
    }
    return build_extremal(params, cu);
}

/// Action w -> linear * w + translation on Bloch vectors.
struct BlochAffine {
    std::array<std::array<double, 3>, 3> linear{};
    std::array<double, 3> translation{};

    std::array<double, 3> operator()(const std::array<double, 3>& w) const {
        std::array<double, 3> out = translation;
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) out[i] += linear[i][j] * w[j];
        return out;
    }
};

/// linear[i][j] = 1/2 Tr[sigma_i B(sigma_j)], translation[i] = 1/2 Tr[sigma_i B(I)].
inline BlochAffine bloch_affine(const KrausChannel& ch) {
    if (ch.dim() != 2) throw DimensionError("bloch_affine: channel is not a qubit channel");
    require_trace_preserving(ch, "bloch_affine");
    BlochAffine out;
    const ComplexMatrix image_of_identity = ch.act(pauli::identity());
    for (int i = 0; i < 3; ++i) {
        const ComplexMatrix si = pauli::sigma(i + 1);
        const auto ui = static_cast<std::size_t>(i);
        out.translation[ui] = 0.5 * (si * image_of_identity).trace().real();
        for (int j = 0; j < 3; ++j) {
            out.linear[ui][static_cast<std::size_t>(j)] =
                0.5 * (si * ch.act(pauli::sigma(j + 1))).trace().real();
        }
    }
    return out;
}

/// t3 = sqrt((1 - nu3)^2 - (nu1 - nu2)^2) with nu3 = nu1 nu2.
inline double predicted_translation(const NuParams& p) {
    validate(p);
    const double nu3 = p.nu3();
    const double radicand = (1.0 - nu3) * (1.0 - nu3) - (p.nu1 - p.nu2) * (p.nu1 - p.nu2);
    if (radicand < -1e-12) {
        throw InvalidArgument("predicted_translation: negative radicand");
    }
    return std::sqrt(std::max(radicand, 0.0));
}

struct EllipsoidSample {
    std::array<double, 3> w_in;
    std::array<double, 3> w_out;
};

/// Value of (x/nu1)^2 + (y/nu2)^2 + ((z - t3)/(nu1 nu2))^2 - 1 at w.
inline double ellipsoid_residual(const NuParams& p, const std::array<double, 3>& w) {
    const double t3 = predicted_translation(p);
    const double x = w[0] / p.nu1;
    const double y = w[1] / p.nu2;
    const double z = (w[2] - t3) / p.nu3();
    return x * x + y * y + z * z - 1.0;
}

/// Seeded uniform points on the Bloch sphere and their images under channel_from_nu(p).
inline std::vector<EllipsoidSample> ellipsoid_samples(const NuParams& p, std::size_t count,
                                                      std::uint64_t seed) {
    if (count < 1) throw InvalidArgument("ellipsoid_samples: count must be >= 1");
    const BlochAffine affine = bloch_affine(channel_from_nu(p));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<EllipsoidSample> out;
    out.reserve(count);
    while (out.size() < count) {
        std::array<double, 3> w{normal(rng), normal(rng), normal(rng)};
        const double r = std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
        if (r < 1e-12) continue;
        for (auto& x : w) x /= r;
        out.push_back({w, affine(w)});
    }
    return out;
}

}  // namespace xchan
