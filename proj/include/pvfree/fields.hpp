#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <iostream>
#include <mutex>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include <fftw3.h>
#include "json.hpp"

#include "pvfree/errors.hpp"

namespace pvfree {

using Grid3 = std::array<std::size_t, 3>;
using Box3 = std::array<double, 3>;
using cplx = std::complex<double>;

/// Real four-potential (V, A) on a periodic grid, x-fastest storage.
struct GridField {
    Grid3 n{};
    Box3 box_length{};
    std::vector<double> v;
    std::array<std::vector<double>, 3> a;

    std::size_t size() const { return n[0] * n[1] * n[2]; }
    std::size_t index(std::size_t ix, std::size_t iy, std::size_t iz) const { return ix + n[0] * (iy + n[1] * iz); }

    /// Grid coordinate along an axis; the origin sits at index n/2.
    double coordinate(int axis, std::size_t i) const {
        const double dx = box_length[axis] / static_cast<double>(n[axis]);
        return (static_cast<double>(i) - static_cast<double>(n[axis] / 2)) * dx;
    }

    double cell_volume() const {
        return box_length[0] * box_length[1] * box_length[2] / static_cast<double>(size());
    }

    void validate() const {
        for (int d = 0; d < 3; ++d) {
            if (n[d] == 0) throw domain_error("grid dimensions must be positive");
            if (!(box_length[d] > 0.0)) throw domain_error("box lengths must be positive");
        }
        const std::size_t N = size();
        if (v.size() != N) throw invalid_data_error("scalar potential has the wrong length");
        for (const auto& c : a)
            if (c.size() != N) throw invalid_data_error("vector potential component has the wrong length");
        auto finite = [](const std::vector<double>& x) {
            for (double y : x)
                if (!std::isfinite(y)) return false;
            return true;
        };
        if (!finite(v) || !finite(a[0]) || !finite(a[1]) || !finite(a[2]))
            throw invalid_data_error("field contains non-finite values");
    }
};

/// Fourier representation of a GridField under the unitary convention.
struct SpectralField {
    Grid3 n{};
    Box3 box_length{};
    std::vector<cplx> v_hat;
    std::array<std::vector<cplx>, 3> a_hat;
    bool gauge_projected = false;

    std::size_t size() const { return n[0] * n[1] * n[2]; }

    /// Signed integer frequency of a storage index along one axis.
    long frequency(int axis, std::size_t i) const {
        const long N = static_cast<long>(n[axis]);
        const long m = static_cast<long>(i);
        return m <= (N - 1) / 2 ? m : m - N;
    }

    /// Wavevector at a flat storage index.
    std::array<double, 3> wavevector(std::size_t idx) const {
        const std::size_t ix = idx % n[0];
        const std::size_t iy = (idx / n[0]) % n[1];
        const std::size_t iz = idx / (n[0] * n[1]);
        return {2.0 * std::numbers::pi * frequency(0, ix) / box_length[0],
                2.0 * std::numbers::pi * frequency(1, iy) / box_length[1],
                2.0 * std::numbers::pi * frequency(2, iz) / box_length[2]};
    }

    double k_cell_volume() const {
        const double t = 2.0 * std::numbers::pi;
        return t * t * t / (box_length[0] * box_length[1] * box_length[2]);
    }
};

namespace detail {

inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

// In-place 3D DFT with sign -1 (forward) or +1 (backward), x-fastest layout.
inline void dft3(std::vector<cplx>& data, const Grid3& n, int sign) {
    fftw_plan plan;
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        plan = fftw_plan_dft_3d(static_cast<int>(n[2]), static_cast<int>(n[1]), static_cast<int>(n[0]), p, p,
                                sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
}

// Phase exp(i k . x0) aligning the DFT with grid coordinates that start at x0 = -(n/2) dx.
inline std::vector<cplx> origin_phase(const SpectralField& s) {
    std::array<std::vector<cplx>, 3> axis;
    for (int d = 0; d < 3; ++d) {
        axis[d].resize(s.n[d]);
        const double shift = static_cast<double>(s.n[d] / 2) / static_cast<double>(s.n[d]);
        for (std::size_t i = 0; i < s.n[d]; ++i) {
            const double ang = 2.0 * std::numbers::pi * static_cast<double>(s.frequency(d, i)) * shift;
            axis[d][i] = {std::cos(ang), std::sin(ang)};
        }
    }
    std::vector<cplx> ph(s.size());
    std::size_t idx = 0;
    for (std::size_t iz = 0; iz < s.n[2]; ++iz)
        for (std::size_t iy = 0; iy < s.n[1]; ++iy)
            for (std::size_t ix = 0; ix < s.n[0]; ++ix) ph[idx++] = axis[0][ix] * axis[1][iy] * axis[2][iz];
    return ph;
}

inline std::vector<cplx> forward(const std::vector<double>& f, const SpectralField& meta, const std::vector<cplx>& ph,
                                 double scale) {
    std::vector<cplx> out(f.begin(), f.end());
    dft3(out, meta.n, -1);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= scale * ph[i];
    return out;
}

}  // namespace detail

/// f_hat(k) = (dx1 dx2 dx3 / (2 pi)^(3/2)) sum_x f(x) exp(-i k.x).
inline SpectralField spectral_transform(const GridField& field) {
    field.validate();
    SpectralField s;
    s.n = field.n;
    s.box_length = field.box_length;
    const auto ph = detail::origin_phase(s);
    const double scale = field.cell_volume() / std::pow(2.0 * std::numbers::pi, 1.5);
    s.v_hat = detail::forward(field.v, s, ph, scale);
    for (int c = 0; c < 3; ++c) s.a_hat[c] = detail::forward(field.a[c], s, ph, scale);
    return s;
}

/// Inverse of spectral_transform for one component; returns the real part.
inline std::vector<double> inverse_transform(const std::vector<cplx>& f_hat, const SpectralField& meta) {
    const auto ph = detail::origin_phase(meta);
    std::vector<cplx> work(f_hat.size());
    for (std::size_t i = 0; i < work.size(); ++i) work[i] = f_hat[i] * std::conj(ph[i]);
    detail::dft3(work, meta.n, +1);
    const double scale = meta.k_cell_volume() / std::pow(2.0 * std::numbers::pi, 1.5);
    std::vector<double> out(work.size());
    for (std::size_t i = 0; i < work.size(); ++i) out[i] = scale * work[i].real();
    return out;
}

/// Transverse projection a_hat <- a_hat - (k.a_hat) k / |k|^2 for k != 0.
inline SpectralField coulomb_project(SpectralField s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto k = s.wavevector(i);
        const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if (k2 == 0.0) continue;
        const cplx dot = k[0] * s.a_hat[0][i] + k[1] * s.a_hat[1][i] + k[2] * s.a_hat[2][i];
        for (int c = 0; c < 3; ++c) s.a_hat[c][i] -= dot * (k[c] / k2);
    }
    s.gauge_projected = true;
    return s;
}

struct FieldSpectra {
    std::vector<double> e_spectrum;
    std::vector<double> b_spectrum;
    double l2_F_squared = 0.0;
    double l1_E = 0.0;
};

/// |E_hat|^2 and |B_hat|^2 on the lattice with E_hat = -i k v_hat, B_hat = i k x a_hat,
/// the L2 norm of F and the real-space L1 norm of E.
inline FieldSpectra field_spectra_and_norms(const SpectralField& s) {
    if (!s.gauge_projected) throw gauge_precondition_error("field spectra require a Coulomb-gauge projected field");
    const std::size_t N = s.size();
    FieldSpectra out;
    out.e_spectrum.resize(N);
    out.b_spectrum.resize(N);
    std::array<std::vector<cplx>, 3> e_hat;
    for (auto& e : e_hat) e.resize(N);
    const cplx I(0.0, 1.0);
    double l2 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const auto k = s.wavevector(i);
        const cplx* a[3] = {&s.a_hat[0][i], &s.a_hat[1][i], &s.a_hat[2][i]};
        const std::array<cplx, 3> b = {I * (k[1] * *a[2] - k[2] * *a[1]), I * (k[2] * *a[0] - k[0] * *a[2]),
                                       I * (k[0] * *a[1] - k[1] * *a[0])};
        double e2 = 0.0, b2 = 0.0;
        for (int c = 0; c < 3; ++c) {
            e_hat[c][i] = -I * k[c] * s.v_hat[i];
            e2 += std::norm(e_hat[c][i]);
            b2 += std::norm(b[c]);
        }
        out.e_spectrum[i] = e2;
        out.b_spectrum[i] = b2;
        l2 += e2 + b2;
    }
    out.l2_F_squared = l2 * s.k_cell_volume();
    std::array<std::vector<double>, 3> e;
    for (int c = 0; c < 3; ++c) e[c] = inverse_transform(e_hat[c], s);
    double l1 = 0.0;
    for (std::size_t i = 0; i < N; ++i) l1 += std::sqrt(e[0][i] * e[0][i] + e[1][i] * e[1][i] + e[2][i] * e[2][i]);
    const double dx3 = s.box_length[0] * s.box_length[1] * s.box_length[2] / static_cast<double>(N);
    out.l1_E = l1 * dx3;
    return out;
}

/// V(x) = amplitude exp(-|x - shift|^2 / (2 width^2)) around the box centre, A = 0.
inline GridField gaussian_test_field(double amplitude, double width, const Grid3& n, const Box3& box_length,
                                     const Box3& shift = {0.0, 0.0, 0.0}) {
    if (!(width > 0.0)) throw domain_error("width must be positive");
    GridField f;
    f.n = n;
    f.box_length = box_length;
    for (int d = 0; d < 3; ++d) {
        if (n[d] == 0 || !(box_length[d] > 0.0)) throw domain_error("grid and box must be positive");
        if (box_length[d] < 10.0 * width)
            std::clog << "warning: box length " << box_length[d] << " is below 10 widths\n";
    }
    const std::size_t N = f.size();
    f.v.resize(N);
    for (auto& c : f.a) c.assign(N, 0.0);
    std::array<std::vector<double>, 3> g;
    for (int d = 0; d < 3; ++d) {
        g[d].resize(n[d]);
        for (std::size_t i = 0; i < n[d]; ++i) {
            const double x = f.coordinate(d, i) - shift[d];
            g[d][i] = std::exp(-x * x / (2.0 * width * width));
        }
    }
    std::size_t idx = 0;
    for (std::size_t iz = 0; iz < n[2]; ++iz)
        for (std::size_t iy = 0; iy < n[1]; ++iy)
            for (std::size_t ix = 0; ix < n[0]; ++ix) f.v[idx++] = amplitude * g[0][ix] * g[1][iy] * g[2][iz];
    return f;
}

namespace detail {

inline constexpr char b64_alphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

inline std::string base64_encode(const std::vector<std::uint8_t>& in) {
    std::string out;
    out.reserve((in.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 2 < in.size(); i += 3) {
        const std::uint32_t t = (in[i] << 16) | (in[i + 1] << 8) | in[i + 2];
        out += b64_alphabet[(t >> 18) & 63];
        out += b64_alphabet[(t >> 12) & 63];
        out += b64_alphabet[(t >> 6) & 63];
        out += b64_alphabet[t & 63];
    }
    if (i < in.size()) {
        std::uint32_t t = in[i] << 16;
        if (i + 1 < in.size()) t |= in[i + 1] << 8;
        out += b64_alphabet[(t >> 18) & 63];
        out += b64_alphabet[(t >> 12) & 63];
        out += i + 1 < in.size() ? b64_alphabet[(t >> 6) & 63] : '=';
        out += '=';
    }
    return out;
}

inline std::vector<std::uint8_t> base64_decode(std::string_view in) {
    auto value = [](char c) -> int {
        if (c >= 'A' && c <= 'Z') return c - 'A';
        if (c >= 'a' && c <= 'z') return c - 'a' + 26;
        if (c >= '0' && c <= '9') return c - '0' + 52;
        if (c == '+') return 62;
        if (c == '/') return 63;
        return -1;
    };
    if (in.size() % 4 != 0) throw malformed_payload_error("base64 payload length is not a multiple of 4");
    std::vector<std::uint8_t> out;
    out.reserve(in.size() / 4 * 3);
    for (std::size_t i = 0; i < in.size(); i += 4) {
        int v[4];
        int pad = 0;
        for (int j = 0; j < 4; ++j) {
            const char c = in[i + j];
            if (c == '=' && i + 4 == in.size() && j >= 2) {
                v[j] = 0;
                ++pad;
            } else {
                if (pad > 0) throw malformed_payload_error("invalid base64 padding");
                v[j] = value(c);
                if (v[j] < 0) throw malformed_payload_error("invalid base64 character");
            }
        }
        const std::uint32_t t = (v[0] << 18) | (v[1] << 12) | (v[2] << 6) | v[3];
        out.push_back(static_cast<std::uint8_t>(t >> 16));
        if (pad < 2) out.push_back(static_cast<std::uint8_t>((t >> 8) & 0xff));
        if (pad < 1) out.push_back(static_cast<std::uint8_t>(t & 0xff));
    }
    return out;
}

inline std::string encode_doubles(const std::vector<double>& x) {
    std::vector<std::uint8_t> bytes(x.size() * 8);
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::uint64_t u = std::bit_cast<std::uint64_t>(x[i]);
        for (int b = 0; b < 8; ++b) bytes[8 * i + b] = static_cast<std::uint8_t>(u >> (8 * b));
    }
    return base64_encode(bytes);
}

inline std::vector<double> decode_doubles(std::string_view text, std::size_t count, const char* name) {
    const auto bytes = base64_decode(text);
    if (bytes.size() != 8 * count)
        throw malformed_payload_error(std::string("array '") + name + "' has " + std::to_string(bytes.size()) +
                                      " bytes, expected " + std::to_string(8 * count));
    std::vector<double> x(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::uint64_t u = 0;
        for (int b = 0; b < 8; ++b) u |= static_cast<std::uint64_t>(bytes[8 * i + b]) << (8 * b);
        x[i] = std::bit_cast<double>(u);
        if (!std::isfinite(x[i])) throw invalid_data_error(std::string("array '") + name + "' has a non-finite value");
    }
    return x;
}

}  // namespace detail

/// Serialises a field to the versioned JSON document with base64 binary64 arrays.
inline std::string write_grid_field(const GridField& f) {
    f.validate();
    nlohmann::ordered_json doc;
    doc["version"] = 1;
    doc["grid"]["n"] = {f.n[0], f.n[1], f.n[2]};
    doc["grid"]["box_length"] = {f.box_length[0], f.box_length[1], f.box_length[2]};
    doc["units"] = "natural";
    doc["v"] = detail::encode_doubles(f.v);
    doc["a"] = {detail::encode_doubles(f.a[0]), detail::encode_doubles(f.a[1]), detail::encode_doubles(f.a[2])};
    return doc.dump();
}

inline GridField load_grid_field(std::string_view document) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(document);
    } catch (const nlohmann::json::exception& e) {
        throw malformed_payload_error(std::string("field document is not valid JSON: ") + e.what());
    }
    try {
        if (!doc.contains("version") || !doc["version"].is_number_integer())
            throw malformed_payload_error("field document lacks an integer version");
        if (doc["version"].get<long>() != 1)
            throw unsupported_version_error("unsupported field document version " + doc["version"].dump());
        GridField f;
        const auto& grid = doc.at("grid");
        for (int d = 0; d < 3; ++d) {
            const long nd = grid.at("n").at(d).get<long>();
            if (nd <= 0) throw malformed_payload_error("grid dimensions must be positive");
            f.n[d] = static_cast<std::size_t>(nd);
            f.box_length[d] = grid.at("box_length").at(d).get<double>();
            if (!(f.box_length[d] > 0.0)) throw invalid_data_error("box lengths must be positive");
        }
        if (grid.at("n").size() != 3 || grid.at("box_length").size() != 3)
            throw malformed_payload_error("grid must have three dimensions");
        const std::size_t N = f.size();
        f.v = detail::decode_doubles(doc.at("v").get<std::string>(), N, "v");
        const auto& a = doc.at("a");
        if (!a.is_array() || a.size() != 3) throw malformed_payload_error("'a' must hold three arrays");
        const char* names[3] = {"ax", "ay", "az"};
        for (int c = 0; c < 3; ++c) f.a[c] = detail::decode_doubles(a.at(c).get<std::string>(), N, names[c]);
        return f;
    } catch (const nlohmann::json::exception& e) {
        throw malformed_payload_error(std::string("field document has an invalid structure: ") + e.what());
    }
}

}  // namespace pvfree
