#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "xchan/density.hpp"
#include "xchan/matrix_core.hpp"

namespace xchan {

/// Ordered Kraus operators of a common square dimension.
///
/// Construction checks shapes only. Completeness is verified by the operations
/// that need it, so an unvalidated set can still be inspected.
class KrausChannel {
public:
    explicit KrausChannel(std::vector<ComplexMatrix> ops) : ops_(std::move(ops)) {
        if (ops_.empty()) {
            throw InvalidArgument("KrausChannel: at least one operator is required");
        }
        for (const auto& c : ops_) {
            require_finite(c, "KrausChannel");
            require_square(c, "KrausChannel");
            if (c.rows() != ops_.front().rows()) {
                throw DimensionError("KrausChannel: operators differ in dimension");
            }
        }
    }

    std::size_t dim() const noexcept { return static_cast<std::size_t>(ops_.front().rows()); }
    std::size_t size() const noexcept { return ops_.size(); }
    const std::vector<ComplexMatrix>& operators() const noexcept { return ops_; }
    const ComplexMatrix& operator[](std::size_t i) const { return ops_[i]; }

    /// B(x) = sum_i C_i x C_i^dagger on an arbitrary operator x.
    ComplexMatrix act(const ComplexMatrix& x) const {
        ComplexMatrix out = ComplexMatrix::Zero(x.rows(), x.cols());
        for (const auto& c : ops_) out += c * x * c.adjoint();
        return out;
    }

private:
    std::vector<ComplexMatrix> ops_;
};

struct CheckResult {
    bool ok;
    double residual;
};

inline CheckResult check_trace_preserving(const KrausChannel& ch, double tol_tp = tol::tp) {
    const auto n = static_cast<Eigen::Index>(ch.dim());
    ComplexMatrix sum = -ComplexMatrix::Identity(n, n);
    for (const auto& c : ch.operators()) sum += c.adjoint() * c;
    const double r = max_abs(sum);
    return {r <= tol_tp, r};
}

inline CheckResult check_unital(const KrausChannel& ch, double tol_tp = tol::tp) {
    const auto n = static_cast<Eigen::Index>(ch.dim());
    ComplexMatrix sum = -ComplexMatrix::Identity(n, n);
    for (const auto& c : ch.operators()) sum += c * c.adjoint();
    const double r = max_abs(sum);
    return {r <= tol_tp, r};
}

/// Largest |Tr[C_i^dagger C_j]| over i != j; zero for a single operator.
inline CheckResult check_trace_orthogonal(const KrausChannel& ch, double tol_orth = tol::orth) {
    double worst = 0.0;
    for (std::size_t i = 0; i < ch.size(); ++i)
        for (std::size_t j = 0; j < ch.size(); ++j)
            if (i != j) worst = std::max(worst, std::abs(hs_inner(ch[i], ch[j])));
    return {worst <= tol_orth, worst};
}

inline void require_trace_preserving(const KrausChannel& ch, const char* what,
                                     double tol_tp = tol::tp) {
    const auto tp = check_trace_preserving(ch, tol_tp);
    if (!tp.ok) {
        throw ValidationError(std::string(what) + ": channel is not trace preserving",
                              tp.residual);
    }
}

/// rho' = sum_i C_i rho C_i^dagger. Refuses channels failing completeness.
inline DensityMatrix apply(const KrausChannel& ch, const DensityMatrix& rho) {
    if (ch.dim() != rho.dim()) {
        throw DimensionError("apply: channel dim " + std::to_string(ch.dim()) +
                             " vs state dim " + std::to_string(rho.dim()));
    }
    require_trace_preserving(ch, "apply");
    return validate_density(ch.act(rho.matrix()));
}

/// Unnormalized Choi matrix J = sum_{kl} E_kl (x) B(E_kl), trace N.
class ChoiMatrix {
public:
    /// Checks shape and Hermiticity; positivity is checked by consumers.
    ChoiMatrix(std::size_t dim, ComplexMatrix mat) : dim_(dim), mat_(std::move(mat)) {
        const auto d2 = static_cast<Eigen::Index>(dim * dim);
        if (dim < 1 || mat_.rows() != d2 || mat_.cols() != d2) {
            throw DimensionError("ChoiMatrix: expected a " + std::to_string(d2) +
                                 " square matrix");
        }
        require_finite(mat_, "ChoiMatrix");
        const double h = hermiticity_residual(mat_);
        if (h > tol::herm) throw NotHermitianError("ChoiMatrix: not Hermitian", h);
    }

    std::size_t dim() const noexcept { return dim_; }
    const ComplexMatrix& matrix() const noexcept { return mat_; }

    /// Most negative eigenvalue magnitude (0 if PSD).
    double psd_violation() const { return std::max(0.0, -herm_eig(mat_).values.back()); }

    /// Partial trace over the output factor minus identity, max entry.
    double tp_residual() const {
        const auto n = static_cast<Eigen::Index>(dim_);
        return max_abs(partial_trace(mat_, dim_, dim_, TraceOut::env) -
                       ComplexMatrix::Identity(n, n));
    }

private:
    std::size_t dim_;
    ComplexMatrix mat_;
};

inline ChoiMatrix choi(const KrausChannel& ch) {
    const auto n = static_cast<Eigen::Index>(ch.dim());
    ComplexMatrix j = ComplexMatrix::Zero(n * n, n * n);
    // With v_i = vec(C_i) column-stacked, J = sum_i v_i v_i^dagger.
    for (const auto& c : ch.operators()) {
        const ComplexVector v = vec(c);
        j += v * v.adjoint();
    }
    return ChoiMatrix(ch.dim(), j);
}

/// Max-entry distance between Choi matrices; the notion of channel equality.
inline double choi_distance(const KrausChannel& a, const KrausChannel& b) {
    if (a.dim() != b.dim()) {
        throw DimensionError("choi_distance: channel dimensions differ");
    }
    return max_abs_diff(choi(a).matrix(), choi(b).matrix());
}

/// One operator per Choi eigenvalue above tol_rank; the result is trace orthogonal.
inline KrausChannel kraus_from_choi(const ChoiMatrix& j, double tol_rank = tol::rank) {
    const HermEig eig = herm_eig(j.matrix());
    if (eig.values.back() < -tol::psd) {
        throw NotPsdError("kraus_from_choi: Choi matrix is not PSD", -eig.values.back());
    }
    const auto n = static_cast<Eigen::Index>(j.dim());
    std::vector<ComplexMatrix> ops;
    for (std::size_t k = 0; k < eig.values.size(); ++k) {
        if (eig.values[k] <= tol_rank) break;
        const double scale = std::sqrt(eig.values[k]);
        const auto col = eig.vectors.col(static_cast<Eigen::Index>(k));
        ComplexMatrix c(n, n);
        for (Eigen::Index in = 0; in < n; ++in)
            for (Eigen::Index out = 0; out < n; ++out) c(out, in) = scale * col(in * n + out);
        ops.push_back(std::move(c));
    }
    if (ops.empty()) {
        throw InvalidArgument("kraus_from_choi: Choi matrix has no eigenvalue above tolerance");
    }
    return KrausChannel(std::move(ops));
}

struct ExtremalityReport {
    bool extremal;
    std::size_t gram_rank;
    std::size_t expected;
};

/// Extremal iff {C_i^dagger C_j} is linearly independent (rank k^2).
inline ExtremalityReport check_extremal(const KrausChannel& ch, double tol_rank = tol::rank,
                                        double tol_tp = tol::tp) {
    require_trace_preserving(ch, "check_extremal", tol_tp);
    std::vector<ComplexMatrix> products;
    products.reserve(ch.size() * ch.size());
    for (const auto& ci : ch.operators())
        for (const auto& cj : ch.operators()) products.push_back(ci.adjoint() * cj);
    const std::size_t rank = matrix_rank(products, tol_rank);
    const std::size_t expected = ch.size() * ch.size();
    return {rank == expected, rank, expected};
}

/// Kraus set of sum_j w_j B_j: concatenation of sqrt(w_j) C_i^(j).
inline KrausChannel convex_combine(std::span<const KrausChannel> channels,
                                   std::span<const double> weights) {
    if (channels.empty() || channels.size() != weights.size()) {
        throw InvalidArgument("convex_combine: need one weight per channel");
    }
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw InvalidArgument("convex_combine: negative weight");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw InvalidArgument("convex_combine: weights sum to " + std::to_string(total));
    }
    std::vector<ComplexMatrix> ops;
    for (std::size_t j = 0; j < channels.size(); ++j) {
        if (channels[j].dim() != channels.front().dim()) {
            throw DimensionError("convex_combine: channel dimensions differ");
        }
        if (weights[j] == 0.0) continue;
        const double s = std::sqrt(weights[j]);
        for (const auto& c : channels[j].operators()) ops.push_back(s * c);
    }
    return KrausChannel(std::move(ops));
}

}  // namespace xchan
