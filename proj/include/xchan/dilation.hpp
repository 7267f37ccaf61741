#pragma once

#include <cstddef>
#include <vector>

#include "xchan/channel.hpp"
#include "xchan/density.hpp"

namespace xchan {

/// Unitary on system (x) environment; the environment starts in |0>.
struct DilationModel {
    std::size_t dim_sys;
    std::size_t dim_env;
    ComplexMatrix u;
};

namespace detail {

// Remove from v its components along the given columns of u (two passes).
inline void project_out(ComplexVector& v, const ComplexMatrix& u,
                        const std::vector<Eigen::Index>& filled) {
    for (int pass = 0; pass < 2; ++pass)
        for (Eigen::Index c : filled) v -= u.col(c) * (u.col(c).adjoint() * v)(0);
}

}  // namespace detail

/// Columns (s, 0) of u hold the isometry sum_i C_i (x) |i>; the remaining columns are
/// an orthonormal completion drawn from the standard basis, largest residual norm first.
inline DilationModel stinespring(const KrausChannel& ch) {
    require_trace_preserving(ch, "stinespring");
    const auto n = static_cast<Eigen::Index>(ch.dim());
    const auto k = static_cast<Eigen::Index>(ch.size());
    const Eigen::Index total = n * k;
    ComplexMatrix u = ComplexMatrix::Zero(total, total);
    std::vector<Eigen::Index> filled;
    for (Eigen::Index s = 0; s < n; ++s) {
        for (Eigen::Index i = 0; i < k; ++i)
            for (Eigen::Index out = 0; out < n; ++out)
                u(out * k + i, s * k) = ch[static_cast<std::size_t>(i)](out, s);
        filled.push_back(s * k);
    }

    for (Eigen::Index s = 0; s < n; ++s) {
        for (Eigen::Index e = 1; e < k; ++e) {
            ComplexVector best;
            double best_norm = -1.0;
            for (Eigen::Index j = 0; j < total; ++j) {
                ComplexVector cand = ComplexVector::Unit(total, j);
                detail::project_out(cand, u, filled);
                const double nrm = cand.norm();
                if (nrm > best_norm + 1e-12) {
                    best_norm = nrm;
                    best = std::move(cand);
                }
            }
            const Eigen::Index col = s * k + e;
            u.col(col) = best / best_norm;
            filled.push_back(col);
        }
    }
    return {ch.dim(), ch.size(), std::move(u)};
}

/// Tr_env[u (rho (x) |0><0|) u^dagger].
inline DensityMatrix evolve_via_dilation(const DilationModel& m, const DensityMatrix& rho) {
    if (rho.dim() != m.dim_sys) {
        throw DimensionError("evolve_via_dilation: state dim " + std::to_string(rho.dim()) +
                             " vs system dim " + std::to_string(m.dim_sys));
    }
    const auto de = static_cast<Eigen::Index>(m.dim_env);
    if (m.u.rows() != static_cast<Eigen::Index>(m.dim_sys) * de || m.u.cols() != m.u.rows()) {
        throw DimensionError("evolve_via_dilation: unitary has the wrong size");
    }
    ComplexMatrix env = ComplexMatrix::Zero(de, de);
    env(0, 0) = 1.0;
    const ComplexMatrix joint = m.u * kron(rho.matrix(), env) * m.u.adjoint();
    return validate_density(partial_trace(joint, m.dim_sys, m.dim_env, TraceOut::env));
}

}  // namespace xchan
