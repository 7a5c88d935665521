#pragma once

#include <string>
#include <utility>

#include "tilie/lattice.hpp"

namespace tilie {

// Translationally invariant quadratic generators, stored as the circulant
// coefficient triple (X, Y, W). The dense block forms are fixed once and
// pinned by tests against structured commutators:
//
//   fermion:  L = [[ X,  W ], [ -W^T,  Y  ]]   X, Y antisymmetric circulant
//   boson:    L = [[ -W, Y ], [ -X,  W^T  ]]   X, Y symmetric circulant
//
// The bosonic form follows the generator display for L = H sigma^T; tunneling
// parameters of nearest-neighbor generators enter the W block as
// w M^(v) - w~ M^(-v) so that every structured commutator below reproduces
// the dense matrix commutator exactly (see tests/test_quadratic.cpp).

template <typename S>
struct QuadraticElement {
    LatticeSpec lattice;
    CirculantCoeffs<S> X, Y, W;

    QuadraticElement() = default;
    QuadraticElement(const LatticeSpec& lat, CirculantCoeffs<S> x, CirculantCoeffs<S> y,
                     CirculantCoeffs<S> w)
        : lattice(lat), X(std::move(x)), Y(std::move(y)), W(std::move(w)) {
        if (lattice.sector.kind == SectorKind::Spin)
            throw SectorError("quadratic elements exist only in the fermion/boson sectors");
        validate();
    }

    static QuadraticElement zero(const LatticeSpec& lat) {
        return {lat, CirculantCoeffs<S>(lat), CirculantCoeffs<S>(lat), CirculantCoeffs<S>(lat)};
    }

    bool is_fermion() const { return lattice.sector.kind == SectorKind::Fermion; }
    bool is_zero() const { return X.is_zero() && Y.is_zero() && W.is_zero(); }

    void validate() const {
        if (is_fermion()) {
            if (!X.is_antisymmetric() || !Y.is_antisymmetric())
                throw ValidationError("fermion X/Y blocks must be antisymmetric circulants");
        } else {
            if (!X.is_symmetric() || !Y.is_symmetric())
                throw ValidationError("boson X/Y blocks must be symmetric circulants");
        }
    }

    friend QuadraticElement operator+(const QuadraticElement& a, const QuadraticElement& b) {
        require_compatible(a, b);
        return {a.lattice, a.X + b.X, a.Y + b.Y, a.W + b.W};
    }
    friend QuadraticElement operator-(const QuadraticElement& a, const QuadraticElement& b) {
        require_compatible(a, b);
        return {a.lattice, a.X - b.X, a.Y - b.Y, a.W - b.W};
    }
    friend QuadraticElement operator*(const S& s, const QuadraticElement& a) {
        return {a.lattice, s * a.X, s * a.Y, s * a.W};
    }
    friend QuadraticElement operator-(const QuadraticElement& a) {
        return scalar_traits<S>::from_int(-1) * a;
    }

    friend bool operator==(const QuadraticElement& a, const QuadraticElement& b) {
        return a.lattice == b.lattice && a.X == b.X && a.Y == b.Y && a.W == b.W;
    }
    friend bool operator!=(const QuadraticElement& a, const QuadraticElement& b) {
        return !(a == b);
    }

    /// Equality modulo the on-site directions (offset-0 coefficients); for
    /// fermions this quotients exactly by the E direction W(0).
    friend bool equal_modulo_onsite(const QuadraticElement& a, const QuadraticElement& b) {
        require_compatible(a, b);
        auto strip = [](CirculantCoeffs<S> g) {
            g.entries.erase(Offset(g.lattice.d, 0));
            return g;
        };
        return strip(a.X) == strip(b.X) && strip(a.Y) == strip(b.Y) && strip(a.W) == strip(b.W);
    }

    static void require_compatible(const QuadraticElement& a, const QuadraticElement& b) {
        if (a.lattice.sector != b.lattice.sector)
            throw SectorError("mixed quadratic sectors");
        if (!a.lattice.same_geometry(b.lattice))
            throw LatticeMismatchError("quadratic elements live on different lattices");
    }
};

// ---- fermion generator constructors ----------------------------------------

/// The on-site generator E: X = Y = 0, W = identity. E^2 = -1 densely.
template <typename S = Rational>
QuadraticElement<S> fermion_onsite(const LatticeSpec& lat) {
    if (lat.sector.kind != SectorKind::Fermion)
        throw SectorError("fermion_onsite requires the fermion sector");
    return {lat, CirculantCoeffs<S>(lat), CirculantCoeffs<S>(lat),
            CirculantCoeffs<S>::identity(lat)};
}

enum class FermionKind { HX, HWPlus, HWMinus, HW };

inline std::string to_string(FermionKind k) {
    switch (k) {
        case FermionKind::HX: return "HX";
        case FermionKind::HWPlus: return "HW+";
        case FermionKind::HWMinus: return "HW-";
        default: return "HW";
    }
}

template <typename S>
struct FermionNamed {
    QuadraticElement<S> element;
    /// Set when a self-inverse offset collapsed the element to zero.
    bool degenerate = false;
};

/// Named basis generators H_X^(v), H_{W+-}^(v), H_W^(v).
template <typename S = Rational>
FermionNamed<S> fermion_named(const LatticeSpec& lat, FermionKind kind, const Offset& v_in) {
    if (lat.sector.kind != SectorKind::Fermion)
        throw SectorError("fermion_named requires the fermion sector");
    Offset v = canonical_offset(v_in, lat);
    const bool self_inv = offset_self_inverse(v, lat);
    CirculantCoeffs<S> zerog(lat);
    switch (kind) {
        case FermionKind::HX: {
            if (offset_is_zero(v))
                throw ValidationError("H_X at offset 0 is identically zero");
            auto mm = shift_minus<S>(lat, v);
            return {{lat, mm, -mm, zerog}, self_inv};
        }
        case FermionKind::HWPlus:
            return {{lat, zerog, zerog, shift_plus<S>(lat, v)}, false};
        case FermionKind::HWMinus: {
            if (offset_is_zero(v))
                throw ValidationError("H_W- at offset 0 is identically zero");
            return {{lat, zerog, zerog, shift_minus<S>(lat, v)}, self_inv};
        }
        default:
            return {{lat, zerog, zerog, shift_coeffs<S>(lat, v)}, false};
    }
}

/// Nearest-neighbor generator along axis i:
/// X = x M_-^(e_i), Y = y M_-^(e_i), W = w M^(e_i) + w~ M^(-e_i).
template <typename S = Rational>
QuadraticElement<S> fermion_nn(const LatticeSpec& lat, int axis, const S& x, const S& y,
                               const S& w, const S& wt) {
    if (lat.sector.kind != SectorKind::Fermion)
        throw SectorError("fermion_nn requires the fermion sector");
    Offset e = unit_offset(axis, lat);
    auto mw = w * shift_coeffs<S>(lat, e) + wt * shift_coeffs<S>(lat, offset_neg(e, lat));
    return {lat, x * shift_minus<S>(lat, e), y * shift_minus<S>(lat, e), mw};
}

/// Structured fermionic commutator (exact in coefficient space):
///   X'' = W' W^T - W W'^T,  W'' = W (Y' - X') - W' (Y - X),  Y'' = -X''.
template <typename S>
QuadraticElement<S> fermion_commutator(const QuadraticElement<S>& a,
                                       const QuadraticElement<S>& b) {
    QuadraticElement<S>::require_compatible(a, b);
    if (!a.is_fermion()) throw SectorError("fermion_commutator requires fermion operands");
    auto xpp = convolve(b.W, a.W.transpose()) - convolve(a.W, b.W.transpose());
    auto wpp = convolve(a.W, b.Y - b.X) - convolve(b.W, a.Y - a.X);
    return {a.lattice, xpp, -xpp, wpp};
}

// ---- boson generator constructors -------------------------------------------

/// On-site generator E_(x,y,w): all three blocks proportional to the identity.
template <typename S = Rational>
QuadraticElement<S> boson_onsite(const LatticeSpec& lat, const S& x, const S& y, const S& w) {
    if (lat.sector.kind != SectorKind::Boson)
        throw SectorError("boson_onsite requires the boson sector");
    auto id = CirculantCoeffs<S>::identity(lat);
    return {lat, x * id, y * id, w * id};
}

enum class BosonKind { LX, LY, LW };

inline std::string to_string(BosonKind k) {
    switch (k) {
        case BosonKind::LX: return "LX";
        case BosonKind::LY: return "LY";
        default: return "LW";
    }
}

/// Named single-block generators: L_X^(v), L_Y^(v) carry M_+^(v) in the X/Y
/// block, L_W^(v) carries M_+^(v) in the W block.
template <typename S = Rational>
QuadraticElement<S> boson_named(const LatticeSpec& lat, BosonKind kind, const Offset& v_in) {
    if (lat.sector.kind != SectorKind::Boson)
        throw SectorError("boson_named requires the boson sector");
    Offset v = canonical_offset(v_in, lat);
    auto mp = shift_plus<S>(lat, v);
    CirculantCoeffs<S> zerog(lat);
    switch (kind) {
        case BosonKind::LX: return {lat, mp, zerog, zerog};
        case BosonKind::LY: return {lat, zerog, mp, zerog};
        default: return {lat, zerog, zerog, mp};
    }
}

/// Nearest-neighbor generator along direction v (components in {0, +-1}):
/// X = x M_+^(v), Y = y M_+^(v), W = w M^(v) - w~ M^(-v).
template <typename S = Rational>
QuadraticElement<S> boson_nn(const LatticeSpec& lat, const Offset& v_in, const S& x, const S& y,
                             const S& w, const S& wt) {
    if (lat.sector.kind != SectorKind::Boson)
        throw SectorError("boson_nn requires the boson sector");
    for (int c : v_in)
        if (c < -1 || c > 1)
            throw ValidationError("boson_nn direction components must lie in {0,+-1}");
    Offset v = canonical_offset(v_in, lat);
    if (offset_is_zero(v))
        throw ValidationError("boson_nn requires a nonzero direction; use boson_onsite");
    auto mw = w * shift_coeffs<S>(lat, v) - wt * shift_coeffs<S>(lat, offset_neg(v, lat));
    return {lat, x * shift_plus<S>(lat, v), y * shift_plus<S>(lat, v), mw};
}

/// Structured bosonic commutator (exact in coefficient space):
///   X'' = X'(W + W^T) - X(W' + W'^T)
///   Y'' = Y (W' + W'^T) - Y'(W + W^T)
///   W'' = X' Y - X Y'            (always a symmetric circulant)
template <typename S>
QuadraticElement<S> boson_commutator(const QuadraticElement<S>& a, const QuadraticElement<S>& b) {
    QuadraticElement<S>::require_compatible(a, b);
    if (a.is_fermion()) throw SectorError("boson_commutator requires boson operands");
    auto wsym_a = a.W + a.W.transpose();
    auto wsym_b = b.W + b.W.transpose();
    auto xpp = convolve(b.X, wsym_a) - convolve(a.X, wsym_b);
    auto ypp = convolve(a.Y, wsym_b) - convolve(b.Y, wsym_a);
    auto wpp = convolve(b.X, a.Y) - convolve(a.X, b.Y);
    return {a.lattice, xpp, ypp, wpp};
}

/// Sector-independent entry point.
template <typename S>
QuadraticElement<S> quadratic_commutator(const QuadraticElement<S>& a,
                                         const QuadraticElement<S>& b) {
    return a.is_fermion() ? fermion_commutator(a, b) : boson_commutator(a, b);
}

// ---- dense realization -------------------------------------------------------

/// 2N x 2N dense generator matrix in the fixed block convention.
template <typename S>
DenseMatrix<S> dense_realize(const QuadraticElement<S>& el) {
    const auto n = static_cast<Eigen::Index>(el.lattice.N);
    DenseMatrix<S> out(2 * n, 2 * n);
    out.setConstant(S{});
    DenseMatrix<S> x = dense_realize(el.X);
    DenseMatrix<S> y = dense_realize(el.Y);
    DenseMatrix<S> w = dense_realize(el.W);
    if (el.is_fermion()) {
        out.topLeftCorner(n, n) = x;
        out.topRightCorner(n, n) = w;
        out.bottomLeftCorner(n, n) = -w.transpose();
        out.bottomRightCorner(n, n) = y;
    } else {
        out.topLeftCorner(n, n) = -w;
        out.topRightCorner(n, n) = y;
        out.bottomLeftCorner(n, n) = -x;
        out.bottomRightCorner(n, n) = w.transpose();
    }
    return out;
}

// ---- sector symmetry ----------------------------------------------------------

enum class SectorSymmetry { FermionR, BosonP, None };

inline std::string to_string(SectorSymmetry s) {
    switch (s) {
        case SectorSymmetry::FermionR: return "fermion-R";
        case SectorSymmetry::BosonP: return "boson-P";
        default: return "none";
    }
}

/// Exact symmetry-sector classification: fermions with Y = -X lie in the real
/// hopping space, bosons with symmetric W in the point symmetric space.
template <typename S>
SectorSymmetry sector_symmetry(const QuadraticElement<S>& el) {
    if (el.is_fermion())
        return (el.Y + el.X).is_zero() ? SectorSymmetry::FermionR : SectorSymmetry::None;
    return el.W.is_symmetric() ? SectorSymmetry::BosonP : SectorSymmetry::None;
}

// ---- creation/annihilation representation ------------------------------------

/// Quadratic Hamiltonian in the creation/annihilation representation,
/// with complex circulant coefficient blocks A, B, C, D.
template <typename S>
struct QuadraticHamiltonianAB {
    using CS = typename complex_of<S>::type;
    LatticeSpec lattice;
    CirculantCoeffs<CS> A, B, C, D;
};

namespace detail {

template <typename S>
bool map_is_hermitian(const CirculantCoeffs<typename complex_of<S>::type>& g) {
    for (const auto& [v, c] : g.entries) {
        auto other = g.at(offset_neg(v, g.lattice));
        if (!scalar_traits<typename complex_of<S>::type>::is_zero(c - complex_of<S>::conj(other)))
            return false;
    }
    return true;
}

template <typename S>
CirculantCoeffs<S> real_part_map(const CirculantCoeffs<typename complex_of<S>::type>& g,
                                 const char* what) {
    CirculantCoeffs<S> out(g.lattice);
    for (const auto& [v, c] : g.entries) {
        if (!scalar_traits<S>::is_zero(complex_of<S>::imag(c)))
            throw ValidationError(std::string("representation conversion: ") + what +
                                  " acquired an imaginary part; Hermiticity constraints violated");
        out.add_at(v, complex_of<S>::real(c));
    }
    return out;
}

template <typename S>
CirculantCoeffs<typename complex_of<S>::type> complexify(const CirculantCoeffs<S>& g) {
    CirculantCoeffs<typename complex_of<S>::type> out(g.lattice);
    for (const auto& [v, c] : g.entries) out.add_at(v, complex_of<S>::make(c, S{}));
    return out;
}

}  // namespace detail

/// Convert (A, B, C, D) to the Majorana/quadrature triple (X, Y, W).
///
/// Validates the Hermiticity relations B = B^dag, C = C^dag, A = D^dag, then
/// symmetrizes (A -> (A + tau A^T)/2, B/C balanced via B = tau C^T), which
/// discards identity multiples, and inverts the block relation between the
/// two representations.
template <typename S>
QuadraticElement<S> convert_representation(const QuadraticHamiltonianAB<S>& h) {
    using CS = typename complex_of<S>::type;
    using CT = scalar_traits<CS>;
    const LatticeSpec& lat = h.lattice;
    const bool fermion = lat.sector.kind == SectorKind::Fermion;
    const CS tau = CT::from_int(fermion ? -1 : 1);
    const CS half = complex_of<S>::make(scalar_traits<S>::from_int(1) / scalar_traits<S>::from_int(2), S{});

    auto conj_map = [&](const CirculantCoeffs<CS>& g) {
        CirculantCoeffs<CS> out(g.lattice);
        for (const auto& [v, c] : g.entries) out.add_at(v, complex_of<S>::conj(c));
        return out;
    };

    if (!detail::map_is_hermitian<S>(h.B))
        throw ValidationError("representation conversion: B = B^dag violated");
    if (!detail::map_is_hermitian<S>(h.C))
        throw ValidationError("representation conversion: C = C^dag violated");
    // A = D^dag as coefficient maps: A[v] == conj(D[-v]).
    {
        auto ddag = conj_map(h.D).transpose();
        bool ok = true;
        for (const auto& [v, c] : h.A.entries)
            if (!CT::is_zero(c - ddag.at(v))) ok = false;
        for (const auto& [v, c] : ddag.entries)
            if (!CT::is_zero(c - h.A.at(v))) ok = false;
        if (!ok) throw ValidationError("representation conversion: A = D^dag violated");
    }

    // Symmetrize: exploits the (anti)commutation reshuffle and drops constants.
    auto a_s = half * (h.A + tau * h.A.transpose());
    auto d_s = half * (h.D + tau * h.D.transpose());
    auto b_s = half * (h.B + tau * h.C.transpose());
    auto c_s = half * (h.C + tau * h.B.transpose());

    // X - Y = (2/sqrt(tau))(A + D); X + Y = (2/sqrt(tau))(B + C);
    // W + tau W^T = -2i (D - A)/sqrt(tau); W - tau W^T = -2i (B - C)/sqrt(tau).
    const CS inv_sqrt_tau =
        fermion ? complex_of<S>::make(S{}, scalar_traits<S>::from_int(-1))  // 1/i = -i
                : CT::from_int(1);
    const CS minus_i = complex_of<S>::make(S{}, scalar_traits<S>::from_int(-1));

    auto x_c = inv_sqrt_tau * (a_s + d_s + b_s + c_s);
    auto y_c = inv_sqrt_tau * (b_s + c_s - a_s - d_s);
    auto w_c = minus_i * inv_sqrt_tau * (d_s - a_s + b_s - c_s);

    return {lat, detail::real_part_map<S>(x_c, "X"), detail::real_part_map<S>(y_c, "Y"),
            detail::real_part_map<S>(w_c, "W")};
}

/// Inverse conversion: (X, Y, W) to the symmetrized (A, B, C, D) blocks.
template <typename S>
QuadraticHamiltonianAB<S> convert_representation_inverse(const QuadraticElement<S>& el) {
    using CS = typename complex_of<S>::type;
    const bool fermion = el.is_fermion();
    const S one = scalar_traits<S>::from_int(1);
    const S quarter = one / scalar_traits<S>::from_int(4);
    // sqrt(tau)/4: i/4 for fermions, 1/4 for bosons.
    const CS pref = fermion ? complex_of<S>::make(S{}, quarter) : complex_of<S>::make(quarter, S{});
    const CS tau = scalar_traits<CS>::from_int(fermion ? -1 : 1);
    const CS iu = complex_of<S>::make(S{}, one);

    auto x = detail::complexify(el.X);
    auto y = detail::complexify(el.Y);
    auto w = detail::complexify(el.W);
    auto wt = w.transpose();

    QuadraticHamiltonianAB<S> h;
    h.lattice = el.lattice;
    h.A = pref * (x - y - iu * (w + tau * wt));
    h.B = pref * (x + y + iu * (w - tau * wt));
    h.C = pref * (x + y - iu * (w - tau * wt));
    h.D = pref * (x - y + iu * (w + tau * wt));
    return h;
}

}  // namespace tilie
