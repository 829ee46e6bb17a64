#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "pvfree/errors.hpp"
#include "pvfree/fields.hpp"
#include "pvfree/free_energy.hpp"
#include "pvfree/multipliers.hpp"
#include "pvfree/pv_scheme.hpp"

namespace pvfree {

using ordered_json = nlohmann::ordered_json;

/// Number formatted with 17 significant digits.
inline std::string format17(double x) {
    if (!std::isfinite(x)) throw invalid_data_error("cannot serialise a non-finite number");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace detail {

inline void emit_json(const ordered_json& j, std::string& out, int indent, int depth) {
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close(static_cast<std::size_t>(indent * depth), ' ');
    switch (j.type()) {
        case ordered_json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                out += pad + ordered_json(it.key()).dump() + ": ";
                emit_json(it.value(), out, indent, depth + 1);
            }
            out += "\n" + close + "}";
            return;
        }
        case ordered_json::value_t::array: {
            out += "[";
            bool first = true;
            for (const auto& v : j) {
                if (!first) out += ", ";
                first = false;
                emit_json(v, out, indent, depth + 1);
            }
            out += "]";
            return;
        }
        case ordered_json::value_t::number_float:
            out += format17(j.get<double>());
            return;
        default:
            out += j.dump();
    }
}

}  // namespace detail

/// Pretty JSON with every floating-point number at 17 significant digits.
inline std::string dump_json(const ordered_json& j) {
    std::string out;
    detail::emit_json(j, out, 2, 0);
    out += "\n";
    return out;
}

inline ordered_json scheme_to_json(const PauliVillarsScheme& s) {
    ordered_json j;
    j["m"] = {s.m[0], s.m[1], s.m[2]};
    j["c"] = {s.c[0], s.c[1], s.c[2]};
    j["cutoff"] = s.cutoff;
    return j;
}

/// Rebuilds a scheme from its masses; stored coefficients must agree with the closed forms.
inline PauliVillarsScheme scheme_from_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw malformed_payload_error(std::string("scheme document is not valid JSON: ") + e.what());
    }
    try {
        const auto& m = j.at("m");
        if (!m.is_array() || m.size() != 3) throw malformed_payload_error("scheme 'm' must hold three masses");
        const auto s = scheme_from_masses(m[0].get<double>(), m[1].get<double>(), m[2].get<double>());
        if (j.contains("c")) {
            const auto& c = j["c"];
            if (!c.is_array() || c.size() != 3) throw malformed_payload_error("scheme 'c' must hold three coefficients");
            for (int i = 0; i < 3; ++i)
                if (std::abs(c[i].get<double>() - s.c[i]) > 1e-12 * std::max(1.0, std::abs(s.c[i])))
                    throw invalid_data_error("scheme coefficients do not match the masses");
        }
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw malformed_payload_error(std::string("scheme document has an invalid structure: ") + e.what());
    }
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

/// CSV with header k,M0,MT,Gamma,Gamma_over_k2,err; unrequested columns stay empty.
inline std::string table_csv(const MultiplierTable& t) {
    std::string out = "k,M0,MT,Gamma,Gamma_over_k2,err\n";
    for (const auto& s : t.samples) {
        out += format17(s.k);
        out += ',';
        if (s.quantities & quantity_m_zero) out += format17(s.m_zero);
        out += ',';
        if (s.quantities & quantity_m_thermal) out += format17(s.m_thermal);
        out += ',';
        if (s.quantities & quantity_gamma) out += format17(s.gamma_total);
        out += ',';
        if ((s.quantities & quantity_gamma) && s.k > 0.0) out += format17(s.gamma_total / (s.k * s.k));
        out += ',';
        out += format17(s.error_estimate);
        out += '\n';
    }
    return out;
}

inline ordered_json report_to_json(const FreeEnergyReport& r, const PauliVillarsScheme& s, const SpectralField& grid) {
    ordered_json j;
    j["f2_total"] = r.f2_total;
    j["magnetic_electric_part"] = r.magnetic_electric_part;
    j["gamma_part"] = r.gamma_part;
    j["remainder_factor_4"] = r.remainder_factor_4;
    j["remainder_factor_6"] = r.remainder_factor_6;
    j["remainder_bound"] = r.remainder_bound;
    j["kappa"] = r.kappa;
    j["beta"] = r.beta;
    j["l2_F_squared"] = r.l2_F_squared;
    j["l1_E"] = r.l1_E;
    const auto& d = r.quadrature_diagnostics;
    ordered_json q;
    q["distinct_magnitudes"] = d.distinct_magnitudes;
    q["multiplier_nodes"] = d.multiplier_nodes;
    q["interpolated"] = d.interpolated;
    q["gauss_points"] = d.gauss_points;
    q["k_max"] = d.k_max;
    q["sentinel_k"] = d.sentinel_k;
    q["richardson_max_abs"] = d.richardson_max_abs;
    q["richardson_max_rel"] = d.richardson_max_rel;
    q["max_error_estimate"] = d.max_error_estimate;
    j["quadrature_diagnostics"] = q;
    j["scheme"] = scheme_to_json(s);
    j["grid"]["n"] = {grid.n[0], grid.n[1], grid.n[2]};
    j["grid"]["box_length"] = {grid.box_length[0], grid.box_length[1], grid.box_length[2]};
    return j;
}

}  // namespace pvfree
