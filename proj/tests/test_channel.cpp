#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "xchan/channel.hpp"
#include "xchan/extremal.hpp"
#include "xchan/qubit_geometry.hpp"

using namespace xchan;

namespace {

// Full amplitude damping: {diag(1,0), |0><1|}.
KrausChannel damping() {
    ComplexMatrix c0 = ComplexMatrix::Zero(2, 2), c1 = ComplexMatrix::Zero(2, 2);
    c0(0, 0) = 1.0;
    c1(0, 1) = 1.0;
    return KrausChannel({c0, c1});
}

// Choi matrix assembled block by block from the channel action on matrix units.
ComplexMatrix choi_by_blocks(const KrausChannel& ch) {
    const auto n = static_cast<Eigen::Index>(ch.dim());
    ComplexMatrix j = ComplexMatrix::Zero(n * n, n * n);
    for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index l = 0; l < n; ++l) {
            ComplexMatrix e = ComplexMatrix::Zero(n, n);
            e(k, l) = 1.0;
            j += kron(e, ch.act(e));
        }
    return j;
}

ComplexMatrix pure(double p0) {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 0) = p0;
    m(1, 1) = 1.0 - p0;
    return m;
}

}  // namespace

TEST(KrausChannel, ShapeChecks) {
    EXPECT_THROW(KrausChannel({}), InvalidArgument);
    EXPECT_THROW(KrausChannel({ComplexMatrix::Zero(2, 3)}), DimensionError);
    EXPECT_THROW(KrausChannel({pauli::identity(), ComplexMatrix::Identity(3, 3)}), DimensionError);
}

TEST(Apply, Examples) {
    const KrausChannel id({pauli::identity()});
    const DensityMatrix rho = random_density(2, 1);
    EXPECT_LT(max_abs_diff(apply(id, rho).matrix(), rho.matrix()), 1e-15);

    const DensityMatrix mixed = validate_density(0.5 * pauli::identity());
    EXPECT_LT(max_abs_diff(apply(damping(), mixed).matrix(), pure(1.0)), 1e-15);

    const KrausChannel flip({pauli::sigma1()});
    EXPECT_LT(max_abs_diff(apply(flip, validate_density(pure(1.0))).matrix(), pure(0.0)), 1e-15);
}

TEST(Apply, Refusals) {
    const KrausChannel half({std::sqrt(0.5) * pauli::identity()});
    EXPECT_THROW(apply(half, random_density(2, 0)), ValidationError);
    EXPECT_THROW(apply(damping(), random_density(3, 0)), DimensionError);
}

TEST(Apply, PreservesTraceAndHermiticity) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const std::size_t n = 2 + seed % 4;
        const KrausChannel ch = sample_extremal(n, seed).channel;
        const DensityMatrix out = apply(ch, random_density(n, seed + 500));
        EXPECT_LT(std::abs(out.matrix().trace() - Complex(1.0)), 1e-10);
        EXPECT_LT(hermiticity_residual(out.matrix()), 1e-10);
    }
}

TEST(TracePreserving, Examples) {
    auto r = check_trace_preserving(KrausChannel({pauli::identity()}));
    EXPECT_TRUE(r.ok);
    EXPECT_EQ(r.residual, 0.0);
    const double s = 1.0 / std::sqrt(2.0);
    EXPECT_TRUE(check_trace_preserving(KrausChannel({s * pauli::sigma1(), s * pauli::sigma3()})).ok);
    r = check_trace_preserving(KrausChannel({pure(1.0)}));
    EXPECT_FALSE(r.ok);
    EXPECT_EQ(r.residual, 1.0);
}

TEST(TraceOrthogonal, Examples) {
    EXPECT_TRUE(check_trace_orthogonal(KrausChannel({pauli::identity(), pauli::sigma1()})).ok);
    const double s = 1.0 / std::sqrt(2.0);
    const auto r = check_trace_orthogonal(KrausChannel({s * pauli::identity(), s * pauli::identity()}));
    EXPECT_FALSE(r.ok);
    EXPECT_NEAR(r.residual, 1.0, 1e-15);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        EXPECT_TRUE(check_trace_orthogonal(sample_extremal(3, seed).channel).ok);
    }
}

TEST(Choi, IdentityAndDamping) {
    const ChoiMatrix ji = choi(KrausChannel({pauli::identity()}));
    EXPECT_NEAR(ji.matrix().trace().real(), 2.0, 1e-15);
    EXPECT_EQ(numerical_rank(herm_eig(ji.matrix()).values, tol::rank), 1u);

    const ChoiMatrix jd = choi(damping());
    EXPECT_LT(max_abs_diff(jd.matrix(), choi_by_blocks(damping())), 1e-15);
    EXPECT_NEAR(jd.matrix().trace().real(), 2.0, 1e-15);
    EXPECT_EQ(numerical_rank(herm_eig(jd.matrix()).values, tol::rank), 2u);
    EXPECT_EQ(jd.psd_violation(), 0.0);
}

TEST(Choi, AgreesWithBlockAssembly) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const KrausChannel ch = sample_extremal(2 + seed % 3, seed).channel;
        EXPECT_LT(max_abs_diff(choi(ch).matrix(), choi_by_blocks(ch)), 1e-14);
    }
}

TEST(Choi, RankBoundedByKrausCount) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const KrausChannel ch = sample_extremal(2 + seed % 4, seed).channel;
        const auto values = herm_eig(choi(ch).matrix()).values;
        const auto positive = std::count_if(values.begin(), values.end(),
                                            [](double v) { return v > tol::rank; });
        EXPECT_GT(positive, 0);
        EXPECT_LE(static_cast<std::size_t>(positive), ch.size());
    }
}

TEST(Choi, TpResidualAgreesWithKrausCheck) {
    const KrausChannel tp = sample_extremal(3, 4).channel;
    EXPECT_LT(choi(tp).tp_residual(), 1e-9);
    EXPECT_TRUE(check_trace_preserving(tp).ok);

    const KrausChannel not_tp({pure(1.0)});
    EXPECT_GT(choi(not_tp).tp_residual(), 1e-9);
    EXPECT_FALSE(check_trace_preserving(not_tp).ok);
    EXPECT_NEAR(choi(not_tp).tp_residual(), check_trace_preserving(not_tp).residual, 1e-15);
}

TEST(KrausFromChoi, Examples) {
    const KrausChannel back = kraus_from_choi(choi(KrausChannel({pauli::identity()})));
    ASSERT_EQ(back.size(), 1u);
    const Complex phase = back[0](0, 0);
    EXPECT_NEAR(std::abs(phase), 1.0, 1e-14);
    EXPECT_LT(max_abs_diff(back[0], phase * pauli::identity()), 1e-14);

    EXPECT_EQ(kraus_from_choi(choi(damping())).size(), 2u);
}

TEST(KrausFromChoi, RoundTripOnExtremalSamples) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const std::size_t n = 2 + seed % 3;
        const KrausChannel ch = sample_extremal(n, seed).channel;
        const KrausChannel back = kraus_from_choi(choi(ch));
        EXPECT_LT(max_abs_diff(choi(back).matrix(), choi(ch).matrix()), 1e-9);
        EXPECT_TRUE(check_trace_orthogonal(back).ok);
        EXPECT_LE(back.size(), n);
    }
}

TEST(KrausFromChoi, RejectsNonPsd) {
    ComplexMatrix j = ComplexMatrix::Identity(4, 4);
    j(3, 3) = -0.5;
    EXPECT_THROW(kraus_from_choi(ChoiMatrix(2, j)), NotPsdError);
}

TEST(Extremal, Examples) {
    const auto unitary = check_extremal(KrausChannel({pauli::sigma2()}));
    EXPECT_TRUE(unitary.extremal);
    EXPECT_EQ(unitary.gram_rank, 1u);

    // {I/2, s1/2, s1/2, I/2} spans a 2-dimensional space
    const double s = 1.0 / std::sqrt(2.0);
    const auto mix = check_extremal(KrausChannel({s * pauli::identity(), s * pauli::sigma1()}));
    EXPECT_FALSE(mix.extremal);
    EXPECT_EQ(mix.gram_rank, 2u);
    EXPECT_EQ(mix.expected, 4u);

    const auto qubit = check_extremal(channel_from_nu({0.8, 0.5}));
    EXPECT_TRUE(qubit.extremal);
    EXPECT_EQ(qubit.gram_rank, 4u);
}

TEST(Unital, Examples) {
    EXPECT_TRUE(check_unital(KrausChannel({pauli::sigma3()})).ok);
    const auto r = check_unital(damping());
    EXPECT_FALSE(r.ok);
    EXPECT_NEAR(r.residual, 1.0, 1e-15);  // sum C C^dagger = diag(2, 0)
    const double s = 1.0 / std::sqrt(2.0);
    EXPECT_TRUE(check_unital(KrausChannel({s * pauli::sigma1(), s * pauli::sigma3()})).ok);
}

TEST(ConvexCombine, Examples) {
    const KrausChannel ch = sample_extremal(3, 8).channel;
    const std::vector<KrausChannel> one{ch};
    const std::vector<double> w1{1.0};
    EXPECT_LT(choi_distance(convex_combine(one, w1), ch), 1e-12);

    const std::vector<KrausChannel> pair{KrausChannel({pauli::identity()}),
                                         KrausChannel({pauli::sigma1()})};
    const std::vector<double> half{0.5, 0.5};
    const KrausChannel mix = convex_combine(pair, half);
    EXPECT_EQ(mix.size(), 2u);
    EXPECT_FALSE(check_extremal(mix).extremal);

    const std::vector<double> bad{0.3, 0.8};
    EXPECT_THROW(convex_combine(pair, bad), InvalidArgument);
    const std::vector<double> negative{-0.5, 1.5};
    EXPECT_THROW(convex_combine(pair, negative), InvalidArgument);
    const std::vector<KrausChannel> mixed_dims{KrausChannel({pauli::identity()}),
                                               sample_extremal(3, 0).channel};
    EXPECT_THROW(convex_combine(mixed_dims, half), DimensionError);
}

TEST(ConvexCombine, ChoiIsLinear) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const std::vector<KrausChannel> chs{sample_extremal(3, seed).channel,
                                            sample_extremal(3, seed + 1000).channel,
                                            sample_extremal(3, seed + 2000).channel};
        const std::vector<double> w{0.2, 0.5, 0.3};
        ComplexMatrix expected = ComplexMatrix::Zero(9, 9);
        for (std::size_t j = 0; j < chs.size(); ++j) expected += w[j] * choi(chs[j]).matrix();
        EXPECT_LT(max_abs_diff(choi(convex_combine(chs, w)).matrix(), expected), 1e-10);
    }
}

TEST(ChannelEquality, EqualChoiMeansEqualAction) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const KrausChannel ch = sample_extremal(3, seed).channel;
        const KrausChannel other = kraus_from_choi(choi(ch));
        ASSERT_LT(choi_distance(ch, other), 1e-9);
        for (std::uint64_t s = 0; s < 50; ++s) {
            const DensityMatrix rho = random_density(3, s * 101 + seed);
            EXPECT_LT(max_abs_diff(apply(ch, rho).matrix(), apply(other, rho).matrix()), 1e-9);
        }
    }
}
