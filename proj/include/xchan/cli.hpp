#pragma once

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "xchan/io.hpp"

namespace xchan::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsage = 2 };

/// Report tolerance: XCHAN_TOL when set, otherwise the given default.
inline double report_tolerance(double fallback) {
    const char* env = std::getenv("XCHAN_TOL");
    if (env == nullptr || *env == '\0') return fallback;
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(env, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != std::string(env).size() || !(v > 0.0)) {
        throw CLI::ValidationError("XCHAN_TOL", "expected a positive decimal, got '" +
                                                    std::string(env) + "'");
    }
    return v;
}

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CLI::FileError::Missing(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << text << '\n';
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw CLI::FileError("cannot write " + path);
    f << text << '\n';
}

inline std::string fmt(double x) {
    std::ostringstream ss;
    ss << std::setprecision(6) << x;
    return ss.str();
}

inline std::string pass(bool ok) { return ok ? "ok" : "FAIL"; }

}  // namespace detail

/// Runs one subcommand; `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Construct, apply and verify extremal quantum channels", "xchan"};
    app.require_subcommand(1);

    // build
    auto* build = app.add_subcommand("build", "Build an extremal channel document");
    std::string params_path, out_path, name;
    double nu1 = 0.0, nu2 = 0.0;
    auto* params_opt = build->add_option("--params", params_path, "Diagonal parameters file");
    auto* nu1_opt = build->add_option("--nu1", nu1, "Qubit compression nu1 in (0, 1]");
    auto* nu2_opt = build->add_option("--nu2", nu2, "Qubit compression nu2 in (0, 1]");
    nu1_opt->needs(nu2_opt);
    nu2_opt->needs(nu1_opt);
    params_opt->excludes(nu1_opt)->excludes(nu2_opt);
    build->add_option("-o,--output", out_path, "Output file (default stdout)");
    build->add_option("--name", name, "Name stored in the document");

    // check
    auto* check = app.add_subcommand("check", "Report channel properties");
    std::string channel_path;
    std::vector<std::string> required{"tp", "orth", "cp", "extremal"};
    check->add_option("channel", channel_path, "Channel document")->required();
    check->add_option("--require", required, "Checks that decide the exit code")
        ->check(CLI::IsMember({"tp", "orth", "cp", "unital", "extremal"}))
        ->delimiter(',');

    // apply
    auto* apply_cmd = app.add_subcommand("apply", "Apply a channel to a state");
    std::string state_path;
    apply_cmd->add_option("channel", channel_path, "Channel document")->required();
    apply_cmd->add_option("state", state_path, "State document")->required();
    apply_cmd->add_option("-o,--output", out_path, "Output file (default stdout)");

    // sample
    auto* sample = app.add_subcommand("sample", "Sample a random extremal channel");
    std::size_t n = 2;
    std::uint64_t seed = 0;
    std::string params_out;
    sample->add_option("--n", n, "Dimension N >= 2")->required()->check(CLI::Range(2, 64));
    sample->add_option("--seed", seed, "RNG seed")->required();
    sample->add_option("-o,--output", out_path, "Output file (default stdout)");
    sample->add_option("--params-out", params_out, "Also write the diagonal parameters");

    // bloch
    auto* bloch = app.add_subcommand("bloch", "Qubit Bloch-ellipsoid report");
    std::string csv_path;
    std::size_t count = 1000;
    bloch->add_option("--nu1", nu1, "Compression nu1 in (0, 1]")->required();
    bloch->add_option("--nu2", nu2, "Compression nu2 in (0, 1]")->required();
    bloch->add_option("--ellipsoid", csv_path, "Write sampled sphere/ellipsoid points as CSV");
    bloch->add_option("--count", count, "Number of samples")->check(CLI::PositiveNumber);
    bloch->add_option("--seed", seed, "RNG seed");

    // dilate
    auto* dilate = app.add_subcommand("dilate", "Emit a dilation unitary and its residual");
    dilate->add_option("channel", channel_path, "Channel document")->required();
    dilate->add_option("--state", state_path, "State for the round trip (default random)");
    dilate->add_option("--seed", seed, "Seed of the random round-trip state");
    dilate->add_option("-o,--output", out_path, "Output file for the unitary (default stdout)");

    // jacobian
    auto* jacobian = app.add_subcommand("jacobian", "Parameter-count check by finite differences");
    double step = 1e-5;
    jacobian->add_option("--n", n, "Dimension N >= 2")->check(CLI::Range(2, 16));
    jacobian->add_option("--seed", seed, "Seed of the random interior point");
    jacobian->add_option("--params", params_path, "Parameter point file instead of a sample");
    jacobian->add_option("--step", step, "Finite-difference step")->check(CLI::PositiveNumber);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*build) {
            io::ChannelMetadata meta;
            if (!name.empty()) meta.name = name;
            if (!params_path.empty()) {
                const ExtremalParams p = io::parse_params(detail::read_file(params_path));
                detail::emit(io::serialize_channel(build_extremal(p, canonical_unitaries(p.n())),
                                                   meta),
                             out_path, out);
            } else if (*nu1_opt) {
                const NuParams p{nu1, nu2};
                meta.nu = p;
                detail::emit(io::serialize_channel(channel_from_nu(p), meta), out_path, out);
            } else {
                err << "build: give --params or --nu1/--nu2\n" << build->help();
                return kUsage;
            }
            return kOk;
        }

        if (*check) {
            const double tol_tp = report_tolerance(tol::tp);
            const double tol_orth = report_tolerance(tol::orth);
            const io::ChannelDocument doc =
                io::parse_channel_document(detail::read_file(channel_path));
            const KrausChannel& ch = doc.channel;
            const auto tp = check_trace_preserving(ch, tol_tp);
            const auto orth = check_trace_orthogonal(ch, tol_orth);
            const auto unital = check_unital(ch, tol_tp);
            const double cp_violation = choi(ch).psd_violation();
            const bool cp_ok = cp_violation <= tol::psd;
            out << "dim: " << ch.dim() << "  operators: " << ch.size() << '\n';
            out << "trace_preserving: " << detail::pass(tp.ok)
                << "  residual=" << detail::fmt(tp.residual) << '\n';
            out << "trace_orthogonal: " << detail::pass(orth.ok)
                << "  max_overlap=" << detail::fmt(orth.residual) << '\n';
            out << "completely_positive: " << detail::pass(cp_ok)
                << "  choi_psd_violation=" << detail::fmt(cp_violation) << '\n';
            out << "unital: " << (unital.ok ? "yes" : "no")
                << "  residual=" << detail::fmt(unital.residual) << '\n';
            bool extremal_ok = false;
            if (tp.ok) {
                const auto ex = check_extremal(ch, tol::rank, tol_tp);
                extremal_ok = ex.extremal;
                out << "extremal: " << (ex.extremal ? "yes" : "no") << "  gram_rank=" << ex.gram_rank
                    << " expected=" << ex.expected << '\n';
            } else {
                out << "extremal: n/a (not trace preserving)\n";
            }
            bool all = true;
            for (const auto& r : required) {
                if (r == "tp") all = all && tp.ok;
                if (r == "orth") all = all && orth.ok;
                if (r == "cp") all = all && cp_ok;
                if (r == "unital") all = all && unital.ok;
                if (r == "extremal") all = all && extremal_ok;
            }
            out << "result: " << (all ? "PASS" : "FAIL") << '\n';
            return all ? kOk : kCheckFailed;
        }

        if (*apply_cmd) {
            const KrausChannel ch = io::parse_channel(detail::read_file(channel_path));
            const DensityMatrix rho = io::parse_state(detail::read_file(state_path));
            detail::emit(io::serialize_state(apply(ch, rho)), out_path, out);
            return kOk;
        }

        if (*sample) {
            const SampledExtremal s = sample_extremal(n, seed);
            io::ChannelMetadata meta;
            meta.seed = seed;
            meta.name = "sample_extremal(" + std::to_string(n) + ")";
            detail::emit(io::serialize_channel(s.channel, meta), out_path, out);
            if (!params_out.empty()) detail::emit(io::serialize_params(s.params), params_out, out);
            return kOk;
        }

        if (*bloch) {
            const double tol_report = report_tolerance(1e-10);
            const NuParams p{nu1, nu2};
            const QubitDiagonal d = nu_to_diagonals(p);
            const BlochAffine aff = bloch_affine(channel_from_nu(p));
            const double t3 = predicted_translation(p);
            out << std::setprecision(10);
            out << "a=" << d.a << "  b=" << d.b << '\n';
            out << "linear: diag(" << aff.linear[0][0] << ", " << aff.linear[1][1] << ", "
                << aff.linear[2][2] << ")\n";
            out << "expected: diag(" << p.nu1 << ", " << p.nu2 << ", " << p.nu3() << ")\n";
            out << "translation: (" << aff.translation[0] << ", " << aff.translation[1] << ", "
                << aff.translation[2] << ")\n";
            out << "t3 predicted=" << t3 << '\n';
            double dev = std::abs(aff.translation[2] - t3);
            dev = std::max({dev, std::abs(aff.translation[0]), std::abs(aff.translation[1])});
            const double expected_diag[3] = {p.nu1, p.nu2, p.nu3()};
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    const double want = i == j ? expected_diag[i] : 0.0;
                    dev = std::max(dev, std::abs(aff.linear[static_cast<std::size_t>(i)]
                                                           [static_cast<std::size_t>(j)] -
                                                 want));
                }
            out << "max_deviation=" << dev << '\n';
            if (!csv_path.empty()) {
                std::ofstream f(csv_path, std::ios::binary);
                if (!f) throw CLI::FileError("cannot write " + csv_path);
                f << "x_in,y_in,z_in,x_out,y_out,z_out\n" << std::setprecision(17);
                for (const auto& s : ellipsoid_samples(p, count, seed)) {
                    f << s.w_in[0] << ',' << s.w_in[1] << ',' << s.w_in[2] << ',' << s.w_out[0]
                      << ',' << s.w_out[1] << ',' << s.w_out[2] << '\n';
                }
                out << "wrote " << count << " samples to " << csv_path << '\n';
            }
            return dev <= tol_report ? kOk : kCheckFailed;
        }

        if (*dilate) {
            const double tol_report = report_tolerance(1e-10);
            const KrausChannel ch = io::parse_channel(detail::read_file(channel_path));
            const DilationModel model = stinespring(ch);
            const DensityMatrix rho = state_path.empty()
                                          ? random_density(ch.dim(), seed)
                                          : io::parse_state(detail::read_file(state_path));
            const double unitarity = unitarity_residual(model.u);
            const double round_trip =
                max_abs_diff(evolve_via_dilation(model, rho).matrix(), apply(ch, rho).matrix());
            detail::emit(io::serialize_dilation(model), out_path, out);
            std::ostream& report = out_path.empty() ? err : out;
            report << "unitarity_residual=" << detail::fmt(unitarity)
                   << "  round_trip_residual=" << detail::fmt(round_trip) << '\n';
            return unitarity <= tol_report && round_trip <= tol_report ? kOk : kCheckFailed;
        }

        if (*jacobian) {
            ExtremalParams p = [&] {
                if (!params_path.empty()) return io::parse_params(detail::read_file(params_path));
                std::mt19937_64 rng(seed);
                for (;;) {
                    ExtremalParams cand = sample_extremal_params(n, rng);
                    bool interior = true;
                    for (const auto& d : cand.diagonals())
                        for (double x : d)
                            interior = interior && x > kInteriorMargin && x < 1 - kInteriorMargin;
                    if (interior) return cand;
                }
            }();
            const std::size_t rank = parameter_jacobian_rank(p, step);
            const std::size_t expected = p.n() * p.n() - p.n();
            out << "N=" << p.n() << "  jacobian_rank=" << rank << "  expected=" << expected
                << '\n';
            return rank == expected ? kOk : kCheckFailed;
        }
    } catch (const CLI::Error& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const io::SyntaxError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const io::SchemaError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        // failed validation of a well-formed input
        err << "error: " << e.what() << '\n';
        return kCheckFailed;
    }
    return kUsage;
}

}  // namespace xchan::cli
