#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tilie/eigen_support.hpp"
#include "tilie/error.hpp"
#include "tilie/rational.hpp"

namespace tilie {

enum class SectorKind { Fermion, Boson, Spin };

struct Sector {
    SectorKind kind = SectorKind::Fermion;
    int local_dim = 2;  // only meaningful for spin

    static Sector fermion() { return {SectorKind::Fermion, 2}; }
    static Sector boson() { return {SectorKind::Boson, 2}; }
    static Sector spin(int D) {
        if (D < 2) throw ValidationError("spin sector needs local dimension >= 2");
        return {SectorKind::Spin, D};
    }

    friend bool operator==(const Sector& a, const Sector& b) {
        return a.kind == b.kind && (a.kind != SectorKind::Spin || a.local_dim == b.local_dim);
    }
    friend bool operator!=(const Sector& a, const Sector& b) { return !(a == b); }

    std::string str() const {
        switch (kind) {
            case SectorKind::Fermion: return "fermion";
            case SectorKind::Boson: return "boson";
            default: return "spin(" + std::to_string(local_dim) + ")";
        }
    }
};

/// Cubic periodic lattice: d dimensions, edge length m, N = m^d sites.
struct LatticeSpec {
    int d = 1;
    int m = 2;
    std::int64_t N = 2;
    Sector sector = Sector::fermion();

    LatticeSpec() = default;
    LatticeSpec(int d_, int m_, Sector s) : d(d_), m(m_), sector(s) {
        if (d < 1) throw ValidationError("lattice dimension must be >= 1");
        if (m < 2) throw ValidationError("edge length must be >= 2");
        N = 1;
        for (int i = 0; i < d; ++i) {
            if (N > (std::int64_t{1} << 40) / m)
                throw ValidationError("lattice too large: m^d overflows the supported range");
            N *= m;
        }
    }

    friend bool operator==(const LatticeSpec& a, const LatticeSpec& b) {
        return a.d == b.d && a.m == b.m && a.sector == b.sector;
    }
    friend bool operator!=(const LatticeSpec& a, const LatticeSpec& b) { return !(a == b); }

    bool same_geometry(const LatticeSpec& o) const { return d == o.d && m == o.m; }
};

/// Lattice offset, stored componentwise in the canonical range [0, m).
using Offset = std::vector<int>;

inline Offset canonical_offset(Offset v, const LatticeSpec& lat) {
    if (static_cast<int>(v.size()) != lat.d)
        throw ValidationError("offset has wrong dimension");
    for (auto& c : v) {
        c %= lat.m;
        if (c < 0) c += lat.m;
    }
    return v;
}

inline Offset offset_add(const Offset& a, const Offset& b, const LatticeSpec& lat) {
    Offset r(lat.d);
    for (int i = 0; i < lat.d; ++i) r[i] = (a[i] + b[i]) % lat.m;
    return r;
}

inline Offset offset_neg(const Offset& a, const LatticeSpec& lat) {
    Offset r(lat.d);
    for (int i = 0; i < lat.d; ++i) r[i] = (lat.m - a[i]) % lat.m;
    return r;
}

inline Offset offset_sub(const Offset& a, const Offset& b, const LatticeSpec& lat) {
    Offset r(lat.d);
    for (int i = 0; i < lat.d; ++i) {
        r[i] = (a[i] - b[i]) % lat.m;
        if (r[i] < 0) r[i] += lat.m;
    }
    return r;
}

inline bool offset_is_zero(const Offset& a) {
    return std::all_of(a.begin(), a.end(), [](int c) { return c == 0; });
}

/// v with 2v == 0 (mod m): at even m these offsets are their own negatives.
inline bool offset_self_inverse(const Offset& a, const LatticeSpec& lat) {
    return std::all_of(a.begin(), a.end(), [&](int c) { return (2 * c) % lat.m == 0; });
}

inline Offset unit_offset(int axis, const LatticeSpec& lat) {
    if (axis < 1 || axis > lat.d) throw ValidationError("axis out of range");
    Offset e(lat.d, 0);
    e[axis - 1] = 1 % lat.m;
    return e;
}

/// Row-major flattening of an offset: index = v_1 * m^(d-1) + ... + v_d.
inline std::int64_t offset_index(const Offset& v, const LatticeSpec& lat) {
    std::int64_t idx = 0;
    for (int i = 0; i < lat.d; ++i) idx = idx * lat.m + v[i];
    return idx;
}

inline Offset offset_from_index(std::int64_t idx, const LatticeSpec& lat) {
    Offset v(lat.d);
    for (int i = lat.d - 1; i >= 0; --i) {
        v[i] = static_cast<int>(idx % lat.m);
        idx /= lat.m;
    }
    return v;
}

inline std::int64_t dense_cap() {
    if (const char* s = std::getenv("TILIE_DENSE_CAP")) {
        char* end = nullptr;
        long long v = std::strtoll(s, &end, 10);
        if (end && *end == '\0' && v > 0) return v;
    }
    return 4096;
}

/// Coefficient map of a circulant matrix: G = sum_v entries[v] * M^(v) with
/// M^(v)_{kl} = delta_{l,k+v}, i.e. G_{kl} = entries[l - k].
///
/// Entries with zero coefficient are pruned, so equality of maps is equality
/// of matrices. S is the scalar kind (exact Rational or double).
template <typename S>
struct CirculantCoeffs {
    LatticeSpec lattice;
    std::map<Offset, S> entries;

    CirculantCoeffs() = default;
    explicit CirculantCoeffs(const LatticeSpec& lat) : lattice(lat) {}

    static CirculantCoeffs zero(const LatticeSpec& lat) { return CirculantCoeffs(lat); }
    static CirculantCoeffs identity(const LatticeSpec& lat) {
        CirculantCoeffs g(lat);
        g.entries[Offset(lat.d, 0)] = scalar_traits<S>::from_int(1);
        return g;
    }

    bool is_zero() const { return entries.empty(); }

    S at(const Offset& v) const {
        auto it = entries.find(v);
        return it == entries.end() ? S{} : it->second;
    }

    void add_at(const Offset& v, const S& c) {
        auto it = entries.find(v);
        if (it == entries.end()) {
            if (!scalar_traits<S>::is_zero(c)) entries.emplace(v, c);
        } else {
            it->second += c;
            if (scalar_traits<S>::is_zero(it->second)) entries.erase(it);
        }
    }

    friend CirculantCoeffs operator+(const CirculantCoeffs& a, const CirculantCoeffs& b) {
        require_same_lattice(a, b);
        CirculantCoeffs r = a;
        for (const auto& [v, c] : b.entries) r.add_at(v, c);
        return r;
    }
    friend CirculantCoeffs operator-(const CirculantCoeffs& a, const CirculantCoeffs& b) {
        require_same_lattice(a, b);
        CirculantCoeffs r = a;
        for (const auto& [v, c] : b.entries) r.add_at(v, -c);
        return r;
    }
    friend CirculantCoeffs operator*(const S& s, const CirculantCoeffs& a) {
        CirculantCoeffs r(a.lattice);
        if (scalar_traits<S>::is_zero(s)) return r;
        for (const auto& [v, c] : a.entries) r.add_at(v, s * c);
        return r;
    }
    friend CirculantCoeffs operator-(const CirculantCoeffs& a) {
        return scalar_traits<S>::from_int(-1) * a;
    }

    /// Transpose: G^T has coefficients at negated offsets.
    CirculantCoeffs transpose() const {
        CirculantCoeffs r(lattice);
        for (const auto& [v, c] : entries) r.entries[offset_neg(v, lattice)] = c;
        return r;
    }

    bool is_symmetric() const {
        for (const auto& [v, c] : entries)
            if (!scalar_traits<S>::is_zero(c - at(offset_neg(v, lattice)))) return false;
        return true;
    }
    bool is_antisymmetric() const {
        for (const auto& [v, c] : entries)
            if (!scalar_traits<S>::is_zero(c + at(offset_neg(v, lattice)))) return false;
        return true;
    }

    friend bool operator==(const CirculantCoeffs& a, const CirculantCoeffs& b) {
        return a.lattice == b.lattice && a.entries == b.entries;
    }
    friend bool operator!=(const CirculantCoeffs& a, const CirculantCoeffs& b) {
        return !(a == b);
    }

    static void require_same_lattice(const CirculantCoeffs& a, const CirculantCoeffs& b) {
        if (!a.lattice.same_geometry(b.lattice))
            throw LatticeMismatchError("circulant operands live on different lattices");
    }
};

/// Coefficient map of the shift matrix M^(v): a single entry {v: 1}.
template <typename S = Rational>
CirculantCoeffs<S> shift_coeffs(const LatticeSpec& lat, const Offset& v) {
    CirculantCoeffs<S> g(lat);
    g.entries[canonical_offset(v, lat)] = scalar_traits<S>::from_int(1);
    return g;
}

/// M^(v) + M^(-v); collapses to 2*M^(v) at self-inverse offsets.
template <typename S = Rational>
CirculantCoeffs<S> shift_plus(const LatticeSpec& lat, const Offset& v) {
    auto a = shift_coeffs<S>(lat, v);
    return a + a.transpose();
}

/// M^(v) - M^(-v); the zero map at self-inverse offsets.
template <typename S = Rational>
CirculantCoeffs<S> shift_minus(const LatticeSpec& lat, const Offset& v) {
    auto a = shift_coeffs<S>(lat, v);
    return a - a.transpose();
}

/// Coefficient map of the matrix product of two circulants (offset convolution).
template <typename S>
CirculantCoeffs<S> convolve(const CirculantCoeffs<S>& a, const CirculantCoeffs<S>& b) {
    CirculantCoeffs<S>::require_same_lattice(a, b);
    CirculantCoeffs<S> r(a.lattice);
    for (const auto& [va, ca] : a.entries)
        for (const auto& [vb, cb] : b.entries)
            r.add_at(offset_add(va, vb, a.lattice), ca * cb);
    return r;
}

/// Fourier symbol: component at l equals sum_k entries[k] exp(-2*pi*i*k.l/m).
template <typename S>
std::vector<std::complex<double>> fourier_symbol(const CirculantCoeffs<S>& g) {
    const LatticeSpec& lat = g.lattice;
    std::vector<std::complex<double>> sym(static_cast<std::size_t>(lat.N), {0.0, 0.0});
    for (std::int64_t li = 0; li < lat.N; ++li) {
        Offset l = offset_from_index(li, lat);
        std::complex<double> acc(0.0, 0.0);
        for (const auto& [k, c] : g.entries) {
            std::int64_t dot = 0;
            for (int i = 0; i < lat.d; ++i) dot += static_cast<std::int64_t>(k[i]) * l[i];
            double phase = -2.0 * std::numbers::pi * static_cast<double>(dot % lat.m) / lat.m;
            acc += scalar_traits<S>::to_double(c) * std::complex<double>(std::cos(phase), std::sin(phase));
        }
        sym[static_cast<std::size_t>(li)] = acc;
    }
    return sym;
}

/// Dense N x N realization with G_{kl} = entries[l - k]. Guarded by the size cap.
template <typename S>
Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> dense_realize(const CirculantCoeffs<S>& g) {
    const LatticeSpec& lat = g.lattice;
    if (lat.N > dense_cap())
        throw SizeCapError("dense realization of size " + std::to_string(lat.N) +
                           " exceeds the cap " + std::to_string(dense_cap()));
    const auto n = static_cast<Eigen::Index>(lat.N);
    Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> mat(n, n);
    mat.setConstant(S{});
    for (std::int64_t k = 0; k < lat.N; ++k) {
        Offset ko = offset_from_index(k, lat);
        for (const auto& [v, c] : g.entries) {
            Offset lo = offset_add(ko, v, lat);
            mat(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(offset_index(lo, lat))) = c;
        }
    }
    return mat;
}

}  // namespace tilie
