#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tilie/lattice.hpp"

namespace tilie {

// Exact algebra of translationally symmetrized Pauli strings on a ring of m
// sites with local dimension D. Elements store H with the algebra element
// being iH; all coefficients stay real rationals and every commutator is
// evaluated without ever forming a D^m dimensional matrix.

/// A length-m word over {0,1,2,3}; 0 is the identity letter. For D > 2 each
/// site additionally carries an embedding slot (the two levels the Pauli
/// matrix acts on); slots are empty for D = 2.
struct PauliString {
    std::vector<std::uint8_t> letters;
    std::vector<std::array<std::uint8_t, 2>> slots;  // empty unless D > 2

    std::size_t size() const { return letters.size(); }
    bool is_identity() const {
        for (auto l : letters)
            if (l != 0) return false;
        return true;
    }
    int weight() const {
        int w = 0;
        for (auto l : letters) w += l != 0;
        return w;
    }

    friend bool operator<(const PauliString& a, const PauliString& b) {
        if (a.letters != b.letters) return a.letters < b.letters;
        return a.slots < b.slots;
    }
    friend bool operator==(const PauliString& a, const PauliString& b) {
        return a.letters == b.letters && a.slots == b.slots;
    }
    friend bool operator!=(const PauliString& a, const PauliString& b) { return !(a == b); }

    /// The string conjugated by the shift of r sites: site j holds the letter
    /// previously at j - r.
    PauliString rotated(int r) const {
        const int m = static_cast<int>(letters.size());
        r = ((r % m) + m) % m;
        PauliString out;
        out.letters.resize(letters.size());
        if (!slots.empty()) out.slots.resize(slots.size());
        for (int j = 0; j < m; ++j) {
            int src = (j - r + m) % m;
            out.letters[j] = letters[src];
            if (!slots.empty()) out.slots[j] = slots[src];
        }
        return out;
    }

    std::string str() const {
        static const char* names = "1XYZ";
        std::string s;
        for (auto l : letters) s += names[l];
        return s;
    }
};

/// Smallest positive rotation fixing the string; equals the number of
/// distinct rotations and always divides m.
inline int string_period(const PauliString& s) {
    const int m = static_cast<int>(s.size());
    for (int p = 1; p <= m; ++p)
        if (m % p == 0 && s.rotated(p) == s) return p;
    return m;
}

/// Lexicographically minimal rotation of the string.
inline PauliString canonical_rotation(const PauliString& s) {
    PauliString best = s;
    const int m = static_cast<int>(s.size());
    for (int r = 1; r < m; ++r) {
        PauliString cand = s.rotated(r);
        if (cand < best) best = cand;
    }
    return best;
}

/// Cyclic equivalence class of a Pauli string.
struct Necklace {
    PauliString canonical;
    int period = 1;

    static Necklace of(const PauliString& s) {
        return {canonical_rotation(s), string_period(s)};
    }
};

/// Sitewise Pauli product. Returns the accumulated power of i and the
/// resulting string. Embedded letters multiply only within one slot.
inline std::pair<int, PauliString> pauli_product(const PauliString& a, const PauliString& b) {
    if (a.size() != b.size()) throw ValidationError("pauli_product: length mismatch");
    const bool slotted = !a.slots.empty() || !b.slots.empty();
    PauliString out;
    out.letters.resize(a.size());
    if (slotted) out.slots.resize(a.size());
    int phase = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const int la = a.letters[i], lb = b.letters[i];
        std::array<std::uint8_t, 2> slot{0, 1};
        if (slotted) {
            auto sa = a.slots.empty() ? std::array<std::uint8_t, 2>{0, 1} : a.slots[i];
            auto sb = b.slots.empty() ? std::array<std::uint8_t, 2>{0, 1} : b.slots[i];
            if (la != 0 && lb != 0 && sa != sb)
                throw ValidationError(
                    "pauli_product: mixed embedding slots at one site are not closed "
                    "under multiplication");
            slot = la != 0 ? sa : sb;
        }
        int lo;
        if (la == 0) {
            lo = lb;
        } else if (lb == 0) {
            lo = la;
        } else if (la == lb) {
            lo = 0;
        } else {
            lo = 6 - la - lb;
            // cyclic (1,2),(2,3),(3,1) pick up +i, the transpositions -i
            bool cyc = (la == 1 && lb == 2) || (la == 2 && lb == 3) || (la == 3 && lb == 1);
            phase += cyc ? 1 : 3;
        }
        out.letters[i] = static_cast<std::uint8_t>(lo);
        if (slotted) out.slots[i] = lo != 0 ? slot : std::array<std::uint8_t, 2>{0, 1};
    }
    return {phase % 4, out};
}

/// TI spin operator: sum of rational coefficients over necklaces. The stored
/// operator is H (Hermitian); the Lie algebra element is iH.
struct SpinElement {
    LatticeSpec lattice;
    std::map<PauliString, Rational> terms;  // keys are canonical rotations

    SpinElement() = default;
    explicit SpinElement(const LatticeSpec& lat) : lattice(lat) {
        if (lat.sector.kind != SectorKind::Spin)
            throw SectorError("spin elements require the spin sector");
        if (lat.d != 1)
            throw SectorError("spin elements are defined on rings (d = 1)");
    }

    static SpinElement zero(const LatticeSpec& lat) { return SpinElement(lat); }

    bool is_zero() const { return terms.empty(); }

    void add_term(const PauliString& s, const Rational& c) {
        if (c.is_zero()) return;
        PauliString key = canonical_rotation(s);
        auto it = terms.find(key);
        if (it == terms.end()) {
            terms.emplace(std::move(key), c);
        } else {
            it->second += c;
            if (it->second.is_zero()) terms.erase(it);
        }
    }

    friend SpinElement operator+(const SpinElement& a, const SpinElement& b) {
        require_compatible(a, b);
        SpinElement r = a;
        for (const auto& [s, c] : b.terms) r.add_term(s, c);
        return r;
    }
    friend SpinElement operator-(const SpinElement& a, const SpinElement& b) {
        require_compatible(a, b);
        SpinElement r = a;
        for (const auto& [s, c] : b.terms) r.add_term(s, -c);
        return r;
    }
    friend SpinElement operator*(const Rational& k, const SpinElement& a) {
        SpinElement r(a.lattice);
        if (k.is_zero()) return r;
        for (const auto& [s, c] : a.terms) r.terms.emplace(s, k * c);
        return r;
    }
    friend SpinElement operator-(const SpinElement& a) { return Rational(-1) * a; }

    friend bool operator==(const SpinElement& a, const SpinElement& b) {
        return a.lattice == b.lattice && a.terms == b.terms;
    }
    friend bool operator!=(const SpinElement& a, const SpinElement& b) { return !(a == b); }

    static void require_compatible(const SpinElement& a, const SpinElement& b) {
        if (a.lattice != b.lattice)
            throw LatticeMismatchError("spin elements live on different lattices");
    }
};

/// One letter placed at a lattice offset (with an optional embedding slot).
struct PlacedLetter {
    int offset = 0;
    std::uint8_t letter = 0;
    std::array<std::uint8_t, 2> slot{0, 1};
};

/// tau symmetrizer: sum over all m translates of the local operator given by
/// the placed letters. The result is (m / period) times the necklace class.
inline SpinElement tau_symmetrize(const LatticeSpec& lat, const std::vector<PlacedLetter>& placed) {
    SpinElement out(lat);
    PauliString s;
    s.letters.assign(static_cast<std::size_t>(lat.m), 0);
    const bool slotted = lat.sector.local_dim > 2;
    if (slotted) s.slots.assign(static_cast<std::size_t>(lat.m), {0, 1});
    for (const auto& p : placed) {
        if (p.offset < 0 || p.offset >= lat.m)
            throw ValidationError("tau_symmetrize: offset outside [0, m)");
        if (p.letter > 3) throw ValidationError("tau_symmetrize: letter outside {0,1,2,3}");
        if (s.letters[p.offset] != 0)
            throw ValidationError("tau_symmetrize: two letters placed at one site");
        if (p.letter != 0) {
            s.letters[p.offset] = p.letter;
            if (slotted) {
                if (p.slot[0] >= p.slot[1] || p.slot[1] >= lat.sector.local_dim)
                    throw ValidationError("tau_symmetrize: invalid embedding slot");
                s.slots[p.offset] = p.slot;
            }
        }
    }
    out.add_term(s, Rational(lat.m / string_period(s)));
    return out;
}

namespace detail {

/// Integer structure constants of the necklace bracket in the stored-H
/// convention: i[R(a), R(b)] as a map from canonical strings to integers,
/// where R(x) is the sum of the distinct rotations of x.
inline std::map<PauliString, std::int64_t> necklace_bracket(const PauliString& a,
                                                            const PauliString& b) {
    std::map<PauliString, std::int64_t> acc;
    const int pa = string_period(a), pb = string_period(b);
    for (int i = 0; i < pa; ++i) {
        PauliString ai = a.rotated(i);
        for (int j = 0; j < pb; ++j) {
            PauliString bj = b.rotated(j);
            auto [p1, u] = pauli_product(ai, bj);
            if (p1 % 2 == 0) continue;  // commuting pair: [s,t] = 0
            // i[s,t] = i (i^p1 - i^(p1+2)) u = 2 i^(p1+1) u, real by p1 odd.
            std::int64_t c = (p1 % 4 == 1) ? -2 : 2;
            auto it = acc.emplace(std::move(u), 0).first;
            it->second += c;
            if (it->second == 0) acc.erase(it);
        }
    }
    // The total is TI: keep one representative per class.
    std::map<PauliString, std::int64_t> out;
    for (const auto& [s, c] : acc)
        if (s == canonical_rotation(s)) out.emplace(s, c);
    return out;
}

}  // namespace detail

/// Commutator in the stored-H convention: returns the H part of i[H_A, H_B].
/// Exact rational arithmetic; the result is TI by construction.
inline SpinElement spin_commutator(const SpinElement& a, const SpinElement& b) {
    SpinElement::require_compatible(a, b);
    SpinElement out(a.lattice);
    for (const auto& [sa, ca] : a.terms) {
        for (const auto& [sb, cb] : b.terms) {
            Rational f = ca * cb;
            for (const auto& [s, c] : detail::necklace_bracket(sa, sb))
                out.add_term(s, f * Rational(c));
        }
    }
    return out;
}

// ---- dense realization ----------------------------------------------------

/// The D x D matrix of one embedded Pauli letter.
template <typename CS>
DenseMatrix<CS> pauli_matrix(std::uint8_t letter, std::array<std::uint8_t, 2> slot, int D) {
    DenseMatrix<CS> m(D, D);
    m.setConstant(CS{});
    if (letter == 0) {
        for (int i = 0; i < D; ++i) m(i, i) = scalar_traits<CS>::from_int(1);
        return m;
    }
    const int p = slot[0], q = slot[1];
    switch (letter) {
        case 1:
            m(p, q) = scalar_traits<CS>::from_int(1);
            m(q, p) = scalar_traits<CS>::from_int(1);
            break;
        case 2:
            if constexpr (std::is_same_v<CS, GaussianRational>) {
                m(p, q) = GaussianRational(Rational(0), Rational(-1));
                m(q, p) = GaussianRational(Rational(0), Rational(1));
            } else {
                m(p, q) = CS(0.0, -1.0);
                m(q, p) = CS(0.0, 1.0);
            }
            break;
        default:
            m(p, p) = scalar_traits<CS>::from_int(1);
            m(q, q) = scalar_traits<CS>::from_int(-1);
            break;
    }
    return m;
}

template <typename CS>
DenseMatrix<CS> kron(const DenseMatrix<CS>& a, const DenseMatrix<CS>& b) {
    DenseMatrix<CS> out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
                [&] {
                    DenseMatrix<CS> blk(b.rows(), b.cols());
                    for (Eigen::Index r = 0; r < b.rows(); ++r)
                        for (Eigen::Index c = 0; c < b.cols(); ++c) blk(r, c) = a(i, j) * b(r, c);
                    return blk;
                }();
    return out;
}

template <typename CS>
DenseMatrix<CS> dense_realize_string(const PauliString& s, int D) {
    DenseMatrix<CS> out = pauli_matrix<CS>(
        s.letters[0], s.slots.empty() ? std::array<std::uint8_t, 2>{0, 1} : s.slots[0], D);
    for (std::size_t i = 1; i < s.size(); ++i)
        out = kron(out, pauli_matrix<CS>(
                            s.letters[i],
                            s.slots.empty() ? std::array<std::uint8_t, 2>{0, 1} : s.slots[i], D));
    return out;
}

/// Exact dense Hermitian matrix of a spin element (size D^m). CS selects the
/// complex scalar kind: GaussianRational (exact) or std::complex<double>.
template <typename CS = GaussianRational>
DenseMatrix<CS> dense_realize_spin(const SpinElement& el) {
    const int D = el.lattice.sector.local_dim;
    const int m = el.lattice.m;
    std::int64_t dim = 1;
    for (int i = 0; i < m; ++i) {
        dim *= D;
        if (dim > dense_cap())
            throw SizeCapError("dense spin realization exceeds the cap " +
                               std::to_string(dense_cap()));
    }
    DenseMatrix<CS> out(dim, dim);
    out.setConstant(CS{});
    for (const auto& [s, c] : el.terms) {
        const int p = string_period(s);
        CS coeff;
        if constexpr (std::is_same_v<CS, GaussianRational>) {
            coeff = GaussianRational(c);
        } else {
            coeff = CS(c.to_double(), 0.0);
        }
        for (int r = 0; r < p; ++r) {
            DenseMatrix<CS> d = dense_realize_string<CS>(s.rotated(r), D);
            for (Eigen::Index i = 0; i < dim; ++i)
                for (Eigen::Index j = 0; j < dim; ++j) out(i, j) += coeff * d(i, j);
        }
    }
    return out;
}

}  // namespace tilie
