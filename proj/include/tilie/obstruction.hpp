#pragma once

#include <map>
#include <numeric>
#include <string>
#include <variant>
#include <vector>

#include "tilie/spin.hpp"

namespace tilie {

// No-go certificates for spin systems. A Casimir built from powers of the
// lattice translation T annihilates (in trace pairing) every commutator; if
// it also annihilates every generator, anything it pairs nonzero against is
// unreachable. All pairings are evaluated exactly over Gaussian rationals by
// contracting traces of letter products, never forming D^m matrices.

/// C = sum_k gamma_k T^k with exponents k in [1, m] (T^m = identity,
/// T^dagger = T^(m-1)).
struct CasimirSpec {
    int m = 2;
    std::map<int, GaussianRational> gammas;

    static int normalize_exponent(int k, int m) {
        k %= m;
        if (k <= 0) k += m;
        return k;
    }

    void add(int k, const GaussianRational& g) {
        if (g.is_zero()) return;
        int kk = normalize_exponent(k, m);
        auto it = gammas.find(kk);
        if (it == gammas.end()) {
            gammas.emplace(kk, g);
        } else {
            it->second += g;
            if (it->second.is_zero()) gammas.erase(it);
        }
    }

    /// C = T^f.
    static CasimirSpec shift_power(int m, int f) {
        CasimirSpec c;
        c.m = m;
        c.add(f, GaussianRational(1));
        return c;
    }

    /// C = T - T^dagger; identically zero at m = 2.
    static CasimirSpec shift_minus_adjoint(int m) {
        CasimirSpec c;
        c.m = m;
        c.add(1, GaussianRational(1));
        c.add(m - 1, GaussianRational(-1));
        return c;
    }

    std::string str() const {
        if (gammas.empty()) return "0";
        std::string s;
        for (const auto& [k, g] : gammas) {
            if (!s.empty()) s += " + ";
            s += "(" + g.str() + ")*T^" + std::to_string(k);
        }
        return s;
    }
};

namespace detail {

inline GaussianRational pauli_letter_trace_product(const PauliString& s, int D,
                                                   const std::vector<int>& positions) {
    // trace of the ordered product of the letters at the given positions
    DenseMatrix<GaussianRational> acc = pauli_matrix<GaussianRational>(
        s.letters[positions[0]],
        s.slots.empty() ? std::array<std::uint8_t, 2>{0, 1} : s.slots[positions[0]], D);
    for (std::size_t i = 1; i < positions.size(); ++i) {
        auto next = pauli_matrix<GaussianRational>(
            s.letters[positions[i]],
            s.slots.empty() ? std::array<std::uint8_t, 2>{0, 1} : s.slots[positions[i]], D);
        acc = DenseMatrix<GaussianRational>(acc * next);
    }
    GaussianRational tr{};
    for (Eigen::Index i = 0; i < acc.rows(); ++i) tr += acc(i, i);
    return tr;
}

/// tr[T^k sigma_{j_1} x ... x sigma_{j_m}] via cycle contraction: the shift
/// permutation splits into gcd(k, m) cycles, each contributing the trace of
/// the letter product along the cycle.
inline GaussianRational shifted_trace(int k, const PauliString& s, int D) {
    const int m = static_cast<int>(s.size());
    k = CasimirSpec::normalize_exponent(k, m);
    const int g = std::gcd(k, m);
    GaussianRational out(1);
    for (int beta = 0; beta < g; ++beta) {
        std::vector<int> cycle;
        for (int alpha = 0; alpha < m / g; ++alpha) cycle.push_back((beta + alpha * k) % m);
        out *= pauli_letter_trace_product(s, D, cycle);
        if (out.is_zero()) return out;
    }
    return out;
}

}  // namespace detail

/// tr[T^f s] for a divisor f of m, evaluated by trace contraction.
inline GaussianRational contracted_trace(int f, const PauliString& s, int D) {
    const int m = static_cast<int>(s.size());
    if (f <= 0 || m % f != 0)
        throw ValidationError("contracted_trace: f must be a positive divisor of m");
    return detail::shifted_trace(f, s, D);
}

/// tr[C dense(A)], exactly, summing over the distinct rotations of each
/// necklace before contraction.
inline GaussianRational casimir_pairing(const CasimirSpec& c, const SpinElement& a) {
    if (c.m != a.lattice.m)
        throw LatticeMismatchError("casimir_pairing: ring sizes differ");
    const int D = a.lattice.sector.local_dim;
    GaussianRational out{};
    for (const auto& [k, gamma] : c.gammas) {
        GaussianRational acc{};
        for (const auto& [s, coeff] : a.terms) {
            const int p = string_period(s);
            GaussianRational rot_sum{};
            for (int r = 0; r < p; ++r) rot_sum += detail::shifted_trace(k, s.rotated(r), D);
            acc += GaussianRational(coeff) * rot_sum;
        }
        out += gamma * acc;
    }
    return out;
}

struct NoGoCertificate {
    CasimirSpec casimir;
    std::vector<GaussianRational> generator_pairings;  // all zero
    GaussianRational target_pairing;                   // nonzero
    std::string conclusion;
};

struct NoGoRejection {
    /// index of a generator with nonzero pairing, or -1 when the target
    /// itself pairs to zero
    int offending_generator = -1;
    GaussianRational offending_value;
    std::string reason;
};

using NoGoOutcome = std::variant<NoGoCertificate, NoGoRejection>;

/// Lemma-style certificate: valid iff the pairing vanishes on every generator
/// and is nonzero on the target; then the target is outside the generated
/// algebra.
inline NoGoOutcome certify_no_go(const CasimirSpec& c, const std::vector<SpinElement>& generators,
                                 const SpinElement& target) {
    std::vector<GaussianRational> pairings;
    pairings.reserve(generators.size());
    for (std::size_t i = 0; i < generators.size(); ++i) {
        GaussianRational v = casimir_pairing(c, generators[i]);
        if (!v.is_zero()) {
            return NoGoRejection{static_cast<int>(i), v,
                                 "generator " + std::to_string(i) +
                                     " pairs nonzero against the Casimir; the conserved-trace "
                                     "argument does not apply"};
        }
        pairings.push_back(v);
    }
    GaussianRational tv = casimir_pairing(c, target);
    if (tv.is_zero()) {
        return NoGoRejection{-1, tv,
                             "target pairs to zero against the Casimir; no obstruction from this "
                             "functional"};
    }
    return NoGoCertificate{
        c, std::move(pairings), tv,
        "every generator is annihilated by the trace functional tr[C .] while the target is "
        "not; the target cannot lie in the generated algebra"};
}

}  // namespace tilie
