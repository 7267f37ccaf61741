#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "xchan/qubit_geometry.hpp"

using namespace xchan;

namespace {

NuParams random_nu(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double a = 0.0, b = 0.0;
    while (a == 0.0) a = 1.0 - u(rng);  // (0, 1]
    while (b == 0.0) b = 1.0 - u(rng);
    return {a, b};
}

}  // namespace

TEST(NuToDiagonals, Identity) {
    const auto d = nu_to_diagonals({1.0, 1.0});
    EXPECT_DOUBLE_EQ(d.a, 1.0);
    EXPECT_DOUBLE_EQ(d.b, 1.0);
}

TEST(NuToDiagonals, ScalarOracle) {
    const auto d = nu_to_diagonals({0.8, 0.5});
    const double mu0 = 0.5 * std::sqrt(2.7), mu3 = 0.5 * std::sqrt(0.1);
    EXPECT_NEAR(d.a, mu0 + mu3, 1e-15);
    EXPECT_NEAR(d.b, mu0 - mu3, 1e-15);
    EXPECT_NEAR(d.a, 0.9797, 5e-5);
    EXPECT_NEAR(d.b, 0.6635, 5e-5);
}

TEST(NuToDiagonals, AlgebraicIdentities) {
    std::mt19937_64 rng(1);
    for (int k = 0; k < 200; ++k) {
        const NuParams p = random_nu(rng);
        const auto d = nu_to_diagonals(p);
        EXPECT_NEAR(2 * d.a * d.b, p.nu1 + p.nu2, 1e-12);
        EXPECT_NEAR(d.a * d.a + d.b * d.b, 1 + p.nu1 * p.nu2, 1e-12);
        EXPECT_GE(d.a, d.b);
        EXPECT_LE(d.a, 1.0);
        EXPECT_GE(d.b, 0.0);
    }
}

TEST(NuToDiagonals, QuarterPrefactorBreaksIdentities) {
    // mu0 = 1/4 sqrt(...), mu3 = 1/4 sqrt(...) scales a, b by 1/2 and both identities by 1/4
    const NuParams p{0.8, 0.5};
    const double mu0 = 0.25 * std::sqrt(1 + 0.8 + 0.5 + 0.4);
    const double mu3 = 0.25 * std::sqrt(1 + 0.4 - 0.8 - 0.5);
    const double a = mu0 + mu3, b = mu0 - mu3;
    EXPECT_NEAR((p.nu1 + p.nu2) / (2 * a * b), 4.0, 1e-12);
    EXPECT_NEAR((1 + p.nu3()) / (a * a + b * b), 4.0, 1e-12);
}

TEST(NuParams, Domain) {
    EXPECT_THROW(nu_to_diagonals({0.0, 0.5}), InvalidArgument);
    EXPECT_THROW(nu_to_diagonals({0.5, 1.5}), InvalidArgument);
    EXPECT_THROW(channel_from_nu({-0.2, 0.5}), InvalidArgument);
}

TEST(ChannelFromNu, IdentityChannel) {
    const KrausChannel ch = channel_from_nu({1.0, 1.0});
    ASSERT_EQ(ch.size(), 1u);
    EXPECT_LT(max_abs_diff(ch[0], pauli::identity()), 1e-15);
}

TEST(ChannelFromNu, PassesChecks) {
    std::mt19937_64 rng(2);
    for (int k = 0; k < 200; ++k) {
        const NuParams p = random_nu(rng);
        const KrausChannel ch = channel_from_nu(p);
        EXPECT_LT(check_trace_preserving(ch).residual, 1e-12);
        EXPECT_TRUE(check_trace_orthogonal(ch).ok);
        if (p.nu1 < 0.999 || p.nu2 < 0.999) EXPECT_TRUE(check_extremal(ch).extremal);
    }
}

TEST(BlochAffine, IdentityAndBitFlip) {
    auto aff = bloch_affine(KrausChannel({pauli::identity()}));
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(aff.linear[i][j], i == j ? 1.0 : 0.0);
        EXPECT_EQ(aff.translation[i], 0.0);
    }
    aff = bloch_affine(KrausChannel({pauli::sigma1()}));
    EXPECT_EQ(aff.linear[0][0], 1.0);
    EXPECT_EQ(aff.linear[1][1], -1.0);
    EXPECT_EQ(aff.linear[2][2], -1.0);
    EXPECT_THROW(bloch_affine(sample_extremal(3, 0).channel), DimensionError);
}

TEST(BlochAffine, ExampleChannel) {
    const BlochAffine aff = bloch_affine(channel_from_nu({0.8, 0.5}));
    const double expected[3] = {0.8, 0.5, 0.4};
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j)
            EXPECT_NEAR(aff.linear[i][j], i == j ? expected[i] : 0.0, 1e-12);
    }
    EXPECT_NEAR(aff.translation[0], 0.0, 1e-12);
    EXPECT_NEAR(aff.translation[1], 0.0, 1e-12);
    EXPECT_NEAR(aff.translation[2], std::sqrt(0.27), 1e-12);
    EXPECT_NEAR(aff.translation[2], 0.5196, 5e-5);
}

TEST(BlochAffine, ConsistentWithStateAction) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 50; ++k) {
        const KrausChannel ch = k % 2 ? channel_from_nu(random_nu(rng))
                                      : sample_extremal(2, static_cast<std::uint64_t>(k)).channel;
        const BlochAffine aff = bloch_affine(ch);
        for (int s = 0; s < 50; ++s) {
            BlochVector w{{g(rng), g(rng), g(rng)}};
            const double scale = u(rng) / w.norm();
            for (auto& x : w.w) x *= scale;
            const auto via_state = rho_to_bloch(apply(ch, bloch_to_rho(w)));
            const auto via_affine = aff(w.w);
            for (int i = 0; i < 3; ++i) EXPECT_NEAR(via_state.w[i], via_affine[i], 1e-10);
        }
    }
}

TEST(PredictedTranslation, Examples) {
    EXPECT_EQ(predicted_translation({1.0, 1.0}), 0.0);
    EXPECT_NEAR(predicted_translation({0.8, 0.5}), std::sqrt(0.6 * 0.6 - 0.3 * 0.3), 1e-15);
    EXPECT_NEAR(predicted_translation({0.8, 0.5}), 0.5196, 5e-5);
}

TEST(PredictedTranslation, MatchesPipeline) {
    std::mt19937_64 rng(4);
    for (int k = 0; k < 200; ++k) {
        const NuParams p = random_nu(rng);
        EXPECT_NEAR(std::abs(bloch_affine(channel_from_nu(p)).translation[2]),
                    predicted_translation(p), 1e-10);
    }
}

TEST(Geometry, LinearPartIsDiagonalWithProductConstraint) {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 500; ++k) {
        const NuParams p = random_nu(rng);
        const BlochAffine aff = bloch_affine(channel_from_nu(p));
        const double expected[3] = {p.nu1, p.nu2, p.nu1 * p.nu2};
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j)
                EXPECT_NEAR(aff.linear[i][j], i == j ? expected[i] : 0.0, 1e-10);
        EXPECT_GE(aff.translation[2], 0.0);
    }
}

TEST(Geometry, DegenerateLine) {
    for (double nu : {0.1, 0.3, 0.5, 0.9, 0.99}) {
        EXPECT_NEAR(predicted_translation({nu, nu}), 1 - nu * nu, 1e-14);
        const auto ex = check_extremal(channel_from_nu({nu, nu}));
        EXPECT_TRUE(ex.extremal);
        EXPECT_EQ(ex.gram_rank, 4u);
    }
}

TEST(EllipsoidSamples, IdentityFixesSphere) {
    for (const auto& s : ellipsoid_samples({1.0, 1.0}, 100, 1)) {
        for (int i = 0; i < 3; ++i) EXPECT_NEAR(s.w_out[i], s.w_in[i], 1e-15);
    }
}

TEST(EllipsoidSamples, NorthPole) {
    const BlochAffine aff = bloch_affine(channel_from_nu({0.8, 0.5}));
    const auto img = aff({0.0, 0.0, 1.0});
    EXPECT_NEAR(img[0], 0.0, 1e-12);
    EXPECT_NEAR(img[1], 0.0, 1e-12);
    EXPECT_NEAR(img[2], 0.4 + std::sqrt(0.27), 1e-12);
    EXPECT_NEAR(img[2], 0.9196, 5e-5);
}

TEST(EllipsoidSamples, OnEllipsoidInsideBall) {
    std::mt19937_64 rng(6);
    for (int k = 0; k < 20; ++k) {
        const NuParams p = random_nu(rng);
        const auto samples = ellipsoid_samples(p, 200, static_cast<std::uint64_t>(k));
        ASSERT_EQ(samples.size(), 200u);
        for (const auto& s : samples) {
            EXPECT_NEAR(std::hypot(s.w_in[0], s.w_in[1], s.w_in[2]), 1.0, 1e-14);
            EXPECT_LT(std::abs(ellipsoid_residual(p, s.w_out)), 1e-8);
            EXPECT_LE(std::hypot(s.w_out[0], s.w_out[1], s.w_out[2]), 1.0 + 1e-9);
        }
    }
    EXPECT_THROW(ellipsoid_samples({0.5, 0.5}, 0, 0), InvalidArgument);
}
