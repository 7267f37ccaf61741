#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "xchan/channel.hpp"
#include "xchan/density.hpp"
#include "xchan/dilation.hpp"
#include "xchan/extremal.hpp"
#include "xchan/qubit_geometry.hpp"

namespace xchan::io {

using nlohmann::json;

class SyntaxError : public Error {
public:
    SyntaxError(const std::string& what, std::size_t position)
        : Error("syntax error at byte " + std::to_string(position) + ": " + what),
          position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

class SchemaError : public Error {
public:
    SchemaError(const std::string& field, const std::string& what)
        : Error("schema error in '" + field + "': " + what), field_(field) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct ChannelMetadata {
    std::optional<std::string> name;
    std::optional<std::uint64_t> seed;
    std::optional<NuParams> nu;
};

/// Channel plus the optional metadata carried by a channel document.
struct ChannelDocument {
    KrausChannel channel;
    ChannelMetadata metadata;
};

// Matrices are encoded as a list of rows, each entry a [re, im] pair.
inline json matrix_to_json(const ComplexMatrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

inline ComplexMatrix matrix_from_json(const json& j, std::size_t dim, const std::string& field) {
    if (!j.is_array() || j.size() != dim) {
        throw SchemaError(field, "expected " + std::to_string(dim) + " rows");
    }
    const auto n = static_cast<Eigen::Index>(dim);
    ComplexMatrix m(n, n);
    for (std::size_t r = 0; r < dim; ++r) {
        const json& row = j[r];
        const std::string rf = field + "[" + std::to_string(r) + "]";
        if (!row.is_array() || row.size() != dim) {
            throw SchemaError(rf, "expected " + std::to_string(dim) + " entries");
        }
        for (std::size_t c = 0; c < dim; ++c) {
            const json& z = row[c];
            if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number()) {
                throw SchemaError(rf + "[" + std::to_string(c) + "]", "expected [re, im]");
            }
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                Complex{z[0].get<double>(), z[1].get<double>()};
        }
    }
    if (!is_finite(m)) throw SchemaError(field, "non-finite entry");
    return m;
}

inline json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw SyntaxError(e.what(), e.byte);
    }
}

inline std::size_t read_dim(const json& doc, const char* field) {
    if (!doc.is_object()) throw SchemaError("<root>", "expected an object");
    if (!doc.contains(field)) throw SchemaError(field, "missing");
    const json& d = doc.at(field);
    if (!d.is_number_integer() || d.get<long long>() < 1) {
        throw SchemaError(field, "expected a positive integer");
    }
    return d.get<std::size_t>();
}

/// Parses a channel document without checking completeness.
inline ChannelDocument parse_channel_document(const std::string& text) {
    const json doc = parse_json(text);
    const std::size_t dim = read_dim(doc, "dim");
    if (!doc.contains("kraus") || !doc["kraus"].is_array() || doc["kraus"].empty()) {
        throw SchemaError("kraus", "expected a non-empty list of matrices");
    }
    std::vector<ComplexMatrix> ops;
    for (std::size_t i = 0; i < doc["kraus"].size(); ++i) {
        ops.push_back(matrix_from_json(doc["kraus"][i], dim, "kraus[" + std::to_string(i) + "]"));
    }
    ChannelMetadata meta;
    if (doc.contains("name")) {
        if (!doc["name"].is_string()) throw SchemaError("name", "expected a string");
        meta.name = doc["name"].get<std::string>();
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) throw SchemaError("seed", "expected an integer");
        meta.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("nu")) {
        const json& nu = doc["nu"];
        if (!nu.is_object() || !nu.contains("nu1") || !nu.contains("nu2") ||
            !nu["nu1"].is_number() || !nu["nu2"].is_number()) {
            throw SchemaError("nu", "expected {\"nu1\": x, \"nu2\": y}");
        }
        meta.nu = NuParams{nu["nu1"].get<double>(), nu["nu2"].get<double>()};
    }
    return {KrausChannel(std::move(ops)), std::move(meta)};
}

/// Parses a channel document and checks completeness.
inline KrausChannel parse_channel(const std::string& text) {
    ChannelDocument doc = parse_channel_document(text);
    require_trace_preserving(doc.channel, "parse_channel");
    return std::move(doc.channel);
}

inline json channel_to_json(const KrausChannel& ch, const ChannelMetadata& meta = {}) {
    json doc;
    doc["dim"] = ch.dim();
    doc["kraus"] = json::array();
    for (const auto& c : ch.operators()) doc["kraus"].push_back(matrix_to_json(c));
    if (meta.name) doc["name"] = *meta.name;
    if (meta.seed) doc["seed"] = *meta.seed;
    if (meta.nu) doc["nu"] = {{"nu1", meta.nu->nu1}, {"nu2", meta.nu->nu2}};
    return doc;
}

/// nlohmann::json prints doubles with 17 significant digits, so values round-trip exactly.
inline std::string serialize_channel(const KrausChannel& ch, const ChannelMetadata& meta = {}) {
    return channel_to_json(ch, meta).dump(2);
}

inline DensityMatrix parse_state(const std::string& text) {
    const json doc = parse_json(text);
    const std::size_t dim = read_dim(doc, "dim");
    if (!doc.contains("rho")) throw SchemaError("rho", "missing");
    return validate_density(matrix_from_json(doc["rho"], dim, "rho"));
}

inline std::string serialize_state(const DensityMatrix& rho) {
    json doc;
    doc["dim"] = rho.dim();
    doc["rho"] = matrix_to_json(rho.matrix());
    return doc.dump(2);
}

/// {"n": N, "diagonals": [...]} with N rows, or N - 1 rows to have the last completed.
inline ExtremalParams parse_params(const std::string& text) {
    const json doc = parse_json(text);
    const std::size_t n = read_dim(doc, "n");
    if (!doc.contains("diagonals") || !doc["diagonals"].is_array()) {
        throw SchemaError("diagonals", "expected a list of lists");
    }
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < doc["diagonals"].size(); ++i) {
        const json& row = doc["diagonals"][i];
        const std::string f = "diagonals[" + std::to_string(i) + "]";
        if (!row.is_array() || row.size() != n) {
            throw SchemaError(f, "expected " + std::to_string(n) + " numbers");
        }
        std::vector<double> d;
        for (const json& x : row) {
            if (!x.is_number()) throw SchemaError(f, "expected numbers");
            d.push_back(x.get<double>());
        }
        rows.push_back(std::move(d));
    }
    if (rows.size() + 1 == n) return complete_last_diagonal(std::move(rows));
    if (rows.size() == n) return ExtremalParams::from_diagonals(std::move(rows));
    throw SchemaError("diagonals", "expected N or N - 1 rows");
}

inline std::string serialize_params(const ExtremalParams& p) {
    json doc;
    doc["n"] = p.n();
    doc["diagonals"] = p.diagonals();
    return doc.dump(2);
}

inline std::string serialize_dilation(const DilationModel& m) {
    json doc;
    doc["dim_sys"] = m.dim_sys;
    doc["dim_env"] = m.dim_env;
    doc["u"] = matrix_to_json(m.u);
    return doc.dump(2);
}

}  // namespace xchan::io
