#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tilie/quadratic.hpp"
#include "tilie/spin.hpp"
#include "tilie/word.hpp"

namespace tilie {

// Generic Lie-closure computation. Elements are mapped to sparse coordinate
// vectors over a growing key registry; the exact engine maintains an integer
// reduced-echelon basis (machine integers with a big-integer fallback), the
// floating engine an orthonormal one. Both record a commutator word per basis
// element, kept in sync under basis updates so that expanding a word always
// reproduces its reported basis element.

struct ClosureOptions {
    double tol = 1e-9;
    std::int64_t max_dim = -1;  // -1: ambient TI dimension of the lattice
};

template <typename Element, typename S>
struct ClosureReport {
    LatticeSpec lattice;
    std::vector<Element> basis;
    std::vector<WordPtr<S>> words;
    int dimension = 0;
    bool converged = false;
    ClosureOptions options;       // resolved: max_dim filled in
    std::int64_t ambient_dim = 0;
};

namespace detail {

// ---- integer scalar plumbing -------------------------------------------------

template <typename I>
struct int_ops;

template <>
struct int_ops<std::int64_t> {
    static std::int64_t add(std::int64_t a, std::int64_t b) {
        std::int64_t r;
        if (__builtin_add_overflow(a, b, &r)) throw IntOverflowError("int64 add overflow");
        return r;
    }
    static std::int64_t sub(std::int64_t a, std::int64_t b) {
        std::int64_t r;
        if (__builtin_sub_overflow(a, b, &r)) throw IntOverflowError("int64 sub overflow");
        return r;
    }
    static std::int64_t mul(std::int64_t a, std::int64_t b) {
        std::int64_t r;
        if (__builtin_mul_overflow(a, b, &r)) throw IntOverflowError("int64 mul overflow");
        return r;
    }
    static std::int64_t gcd(std::int64_t a, std::int64_t b) {
        return std::gcd(a, b);
    }
    static std::int64_t div_exact(std::int64_t a, std::int64_t b) { return a / b; }
    static bool is_zero(std::int64_t a) { return a == 0; }
    static int sign(std::int64_t a) { return a > 0 ? 1 : (a < 0 ? -1 : 0); }
    static bool large(std::int64_t a) { return a > (std::int64_t{1} << 32) || a < -(std::int64_t{1} << 32); }
    static Rational to_rational(std::int64_t a) { return Rational(a); }
    static std::int64_t from_rational_numerator(const Rational& r) {
        mpz_class n = r.to_mpq().get_num();
        if (!mpz_fits_slong_p(n.get_mpz_t())) throw IntOverflowError("numerator exceeds int64");
        return mpz_get_si(n.get_mpz_t());
    }
    static std::int64_t from_int64(std::int64_t v) { return v; }
};

template <>
struct int_ops<mpz_class> {
    static mpz_class add(const mpz_class& a, const mpz_class& b) { return a + b; }
    static mpz_class sub(const mpz_class& a, const mpz_class& b) { return a - b; }
    static mpz_class mul(const mpz_class& a, const mpz_class& b) { return a * b; }
    static mpz_class gcd(const mpz_class& a, const mpz_class& b) {
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
        return g;
    }
    static mpz_class div_exact(const mpz_class& a, const mpz_class& b) {
        mpz_class q;
        mpz_divexact(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
        return q;
    }
    static bool is_zero(const mpz_class& a) { return mpz_sgn(a.get_mpz_t()) == 0; }
    static int sign(const mpz_class& a) { return mpz_sgn(a.get_mpz_t()); }
    static bool large(const mpz_class& a) { return mpz_sizeinbase(a.get_mpz_t(), 2) > 96; }
    static Rational to_rational(const mpz_class& a) { return Rational(mpq_class(a)); }
    static mpz_class from_rational_numerator(const Rational& r) { return r.to_mpq().get_num(); }
    static mpz_class from_int64(std::int64_t v) { return mpz_class(static_cast<long>(v)); }
};

template <typename I>
using IntRow = std::vector<std::pair<std::uint32_t, I>>;  // sorted by index

template <typename I>
void strip_content(IntRow<I>& row) {
    if (row.empty()) return;
    I g{};
    bool lead_negative = int_ops<I>::sign(row.front().second) < 0;
    for (const auto& [idx, v] : row) {
        g = int_ops<I>::gcd(g, v);
        (void)idx;
    }
    if (lead_negative) g = int_ops<I>::sub(I{}, g);
    for (auto& [idx, v] : row) v = int_ops<I>::div_exact(v, g);
}

/// row := a*row - b*other, merged by index, zero entries dropped.
template <typename I>
IntRow<I> row_combine(const IntRow<I>& row, const I& a, const I& b, const IntRow<I>& other) {
    IntRow<I> out;
    out.reserve(row.size() + other.size());
    std::size_t i = 0, j = 0;
    while (i < row.size() || j < other.size()) {
        if (j >= other.size() || (i < row.size() && row[i].first < other[j].first)) {
            out.emplace_back(row[i].first, int_ops<I>::mul(a, row[i].second));
            ++i;
        } else if (i >= row.size() || other[j].first < row[i].first) {
            I v = int_ops<I>::mul(b, other[j].second);
            out.emplace_back(other[j].first, int_ops<I>::sub(I{}, v));
            ++j;
        } else {
            I v = int_ops<I>::sub(int_ops<I>::mul(a, row[i].second),
                                  int_ops<I>::mul(b, other[j].second));
            if (!int_ops<I>::is_zero(v)) out.emplace_back(row[i].first, v);
            ++i;
            ++j;
        }
    }
    return out;
}

template <typename I>
bool row_is_large(const IntRow<I>& row) {
    for (const auto& [idx, v] : row) {
        (void)idx;
        if (int_ops<I>::large(v)) return true;
    }
    return false;
}

}  // namespace detail

// ---- coordinate spaces ---------------------------------------------------------

/// Coordinate adapter for quadratic elements: keys are (block, offset).
template <typename S>
class QuadraticSpace {
  public:
    using Element = QuadraticElement<S>;
    using Scalar = S;
    using Key = std::pair<int, Offset>;  // block: 0 = X, 1 = Y, 2 = W

    explicit QuadraticSpace(const LatticeSpec& lat) : lattice_(lat) {
        if (lat.sector.kind == SectorKind::Spin)
            throw SectorError("QuadraticSpace requires a fermion or boson lattice");
    }

    const LatticeSpec& lattice() const { return lattice_; }

    std::int64_t ambient_dim() const {
        std::int64_t self_inv = 1;
        for (int i = 0; i < lattice_.d; ++i) self_inv *= (lattice_.m % 2 == 0) ? 2 : 1;
        const std::int64_t n = lattice_.N;
        if (lattice_.sector.kind == SectorKind::Fermion)
            return 2 * ((n - self_inv) / 2) + n;
        return 2 * ((n + self_inv) / 2) + n;
    }

    std::size_t key_count() const { return keys_.size(); }

    std::vector<std::pair<std::uint32_t, S>> to_coords(const Element& el) {
        std::vector<std::pair<std::uint32_t, S>> out;
        auto push = [&](int block, const CirculantCoeffs<S>& g) {
            for (const auto& [v, c] : g.entries) out.emplace_back(index_of({block, v}), c);
        };
        push(0, el.X);
        push(1, el.Y);
        push(2, el.W);
        std::sort(out.begin(), out.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        return out;
    }

    Element from_coords(const std::vector<std::pair<std::uint32_t, S>>& vec) const {
        CirculantCoeffs<S> x(lattice_), y(lattice_), w(lattice_);
        for (const auto& [idx, c] : vec) {
            const Key& k = keys_[idx];
            (k.first == 0 ? x : k.first == 1 ? y : w).add_at(k.second, c);
        }
        return Element(lattice_, std::move(x), std::move(y), std::move(w));
    }

    Element bracket(const Element& a, const Element& b) const { return quadratic_commutator(a, b); }

  private:
    std::uint32_t index_of(const Key& k) {
        auto it = lookup_.find(k);
        if (it != lookup_.end()) return it->second;
        auto idx = static_cast<std::uint32_t>(keys_.size());
        keys_.push_back(k);
        lookup_.emplace(k, idx);
        return idx;
    }

    LatticeSpec lattice_;
    std::vector<Key> keys_;
    std::map<Key, std::uint32_t> lookup_;
};

/// Coordinate adapter for spin elements: keys are canonical Pauli strings.
/// Brackets of coordinate rows use a cached integer structure-constant table.
class SpinSpace {
  public:
    using Element = SpinElement;
    using Scalar = Rational;

    explicit SpinSpace(const LatticeSpec& lat) : lattice_(lat) {
        if (lat.sector.kind != SectorKind::Spin)
            throw SectorError("SpinSpace requires a spin lattice");
        if (lat.d != 1) throw SectorError("spin closures are defined on rings (d = 1)");
    }

    const LatticeSpec& lattice() const { return lattice_; }

    std::int64_t ambient_dim() const {
        // Necklace count over the letter alphabet (Burnside).
        const int D = lattice_.sector.local_dim;
        const std::int64_t q = 1 + 3ll * D * (D - 1) / 2;
        const int m = lattice_.m;
        std::int64_t total = 0;
        for (int j = 1; j <= m; ++j) {
            if (m % j != 0) continue;
            int phi = 0;
            for (int t = 1; t <= j; ++t) phi += std::gcd(t, j) == 1;
            std::int64_t p = 1;
            for (int t = 0; t < m / j; ++t) p *= q;
            total += phi * p;
        }
        return total / m;
    }

    std::size_t key_count() const { return keys_.size(); }

    std::vector<std::pair<std::uint32_t, Rational>> to_coords(const Element& el) {
        std::vector<std::pair<std::uint32_t, Rational>> out;
        for (const auto& [s, c] : el.terms) out.emplace_back(index_of(s), c);
        std::sort(out.begin(), out.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        return out;
    }

    Element from_coords(const std::vector<std::pair<std::uint32_t, Rational>>& vec) const {
        Element el(lattice_);
        for (const auto& [idx, c] : vec) el.terms.emplace(keys_[idx], c);
        return el;
    }

    Element bracket(const Element& a, const Element& b) const { return spin_commutator(a, b); }

    /// Integer-row bracket via cached structure constants: for rows u, v the
    /// result is exactly the bracket of the corresponding integer elements.
    template <typename I>
    detail::IntRow<I> bracket_rows(const detail::IntRow<I>& u, const detail::IntRow<I>& v) {
        using ops = detail::int_ops<I>;
        std::vector<I> accum(keys_.size(), I{});
        std::vector<std::uint32_t> touched;
        for (const auto& [ia, ca] : u) {
            for (const auto& [ib, cb] : v) {
                const auto* entries = table_entry(ia, ib);
                if (!entries) continue;
                I f = ops::mul(ca, cb);
                for (const auto& [ic, sc] : *entries) {
                    if (accum.size() <= ic) accum.resize(keys_.size(), I{});
                    if (ops::is_zero(accum[ic])) touched.push_back(ic);
                    accum[ic] = ops::add(accum[ic], ops::mul(f, ops::from_int64(sc)));
                }
            }
        }
        std::sort(touched.begin(), touched.end());
        detail::IntRow<I> out;
        out.reserve(touched.size());
        for (auto idx : touched)
            if (!ops::is_zero(accum[idx])) out.emplace_back(idx, accum[idx]);
        return out;
    }

  private:
    const std::vector<std::pair<std::uint32_t, std::int64_t>>* table_entry(std::uint32_t a,
                                                                           std::uint32_t b) {
        if (a == b) return nullptr;
        const bool flip = a > b;
        const std::uint64_t key = (static_cast<std::uint64_t>(std::min(a, b)) << 32) | std::max(a, b);
        auto it = table_.find(key);
        if (it == table_.end()) {
            auto bracket_map = detail::necklace_bracket(keys_[std::min(a, b)], keys_[std::max(a, b)]);
            std::vector<std::pair<std::uint32_t, std::int64_t>> row;
            row.reserve(bracket_map.size());
            for (const auto& [s, c] : bracket_map) row.emplace_back(index_of(s), c);
            std::sort(row.begin(), row.end(),
                      [](const auto& x, const auto& y) { return x.first < y.first; });
            it = table_.emplace(key, std::move(row)).first;
        }
        if (it->second.empty()) return nullptr;
        if (!flip) return &it->second;
        flipped_ = it->second;
        for (auto& [idx, c] : flipped_) c = -c;
        return &flipped_;
    }

    std::uint32_t index_of(const PauliString& s) {
        auto it = lookup_.find(s);
        if (it != lookup_.end()) return it->second;
        auto idx = static_cast<std::uint32_t>(keys_.size());
        keys_.push_back(s);
        lookup_.emplace(s, idx);
        return idx;
    }

    LatticeSpec lattice_;
    std::vector<PauliString> keys_;
    std::map<PauliString, std::uint32_t> lookup_;
    std::unordered_map<std::uint64_t, std::vector<std::pair<std::uint32_t, std::int64_t>>> table_;
    std::vector<std::pair<std::uint32_t, std::int64_t>> flipped_;
};

namespace detail {

template <typename Space, typename I>
concept HasBracketRows = requires(Space s, IntRow<I> r) {
    { s.template bracket_rows<I>(r, r) } -> std::same_as<IntRow<I>>;
};

// ---- exact engine -----------------------------------------------------------

template <typename I>
const I* row_at(const IntRow<I>& row, std::uint32_t col) {
    auto it = std::lower_bound(
        row.begin(), row.end(), col,
        [](const std::pair<std::uint32_t, I>& e, std::uint32_t c) { return e.first < c; });
    if (it == row.end() || it->first != col) return nullptr;
    return &it->second;
}

template <typename Space, typename I>
class ExactCloser {
  public:
    using Element = typename Space::Element;
    using S = typename Space::Scalar;
    static_assert(std::is_same_v<S, Rational>, "exact closures use rational scalars");

    ExactCloser(Space& space, std::span<const Element> gens, const ClosureOptions& opt)
        : space_(space), gens_(gens), opt_(opt) {}

    ClosureReport<Element, S> run() {
        const std::int64_t ambient = space_.ambient_dim();
        const std::int64_t max_dim =
            opt_.max_dim > 0 ? std::min<std::int64_t>(opt_.max_dim, ambient) : ambient;

        for (std::size_t gi = 0; gi < gens_.size() && rank() < max_dim; ++gi)
            insert_candidate(space_.to_coords(gens_[gi]), Word<S>::leaf(static_cast<int>(gi)));
        while (rank() < max_dim && !queue_.empty()) {
            auto [k, j] = queue_.front();
            queue_.pop_front();
            IntRow<I> fast = bracket_rows_generic(rows_[k], rows_[j]);
            reduce_fast(fast);
            if (fast.empty()) continue;
            // Independent: redo with exact tracking on the true bracket.
            Element c = space_.bracket(element_of(k), element_of(j));
            insert_candidate(space_.to_coords(c), Word<S>::bracket(words_[k], words_[j]));
        }
        const bool truncated = !queue_.empty();

        ClosureReport<Element, S> rep;
        rep.lattice = space_.lattice();
        rep.options = opt_;
        rep.options.max_dim = max_dim;
        rep.ambient_dim = ambient;
        rep.dimension = static_cast<int>(rows_.size());
        rep.converged = !truncated || rank() >= ambient;
        rep.words = words_;
        rep.basis.reserve(rows_.size());
        for (std::size_t i = 0; i < rows_.size(); ++i) rep.basis.push_back(element_of(i));
        return rep;
    }

  private:
    std::int64_t rank() const { return static_cast<std::int64_t>(rows_.size()); }

    const I& pivot_value(std::size_t i) const {
        const I* p = row_at(rows_[i], pivcol_[i]);
        return *p;
    }

    Element element_of(std::size_t i) const {
        std::vector<std::pair<std::uint32_t, S>> vec;
        Rational pivot = int_ops<I>::to_rational(pivot_value(i));
        vec.reserve(rows_[i].size());
        for (const auto& [idx, v] : rows_[i])
            vec.emplace_back(idx, int_ops<I>::to_rational(v) / pivot);
        return space_.from_coords(vec);
    }

    IntRow<I> bracket_rows_generic(const IntRow<I>& u, const IntRow<I>& v) {
        if constexpr (HasBracketRows<Space, I>) {
            return space_.template bracket_rows<I>(u, v);
        } else {
            auto to_q = [&](const IntRow<I>& r) {
                std::vector<std::pair<std::uint32_t, S>> q;
                q.reserve(r.size());
                for (const auto& [idx, val] : r) q.emplace_back(idx, int_ops<I>::to_rational(val));
                return q;
            };
            Element c = space_.bracket(space_.from_coords(to_q(u)), space_.from_coords(to_q(v)));
            return integerize(space_.to_coords(c)).first;
        }
    }

    /// Clear denominators and strip content; returns (row, scale) with
    /// row = scale * input for a positive rational scale.
    std::pair<IntRow<I>, Rational> integerize(const std::vector<std::pair<std::uint32_t, S>>& vec) {
        mpz_class den(1);
        for (const auto& [idx, c] : vec) {
            (void)idx;
            mpz_class d = c.to_mpq().get_den();
            mpz_class g;
            mpz_gcd(g.get_mpz_t(), den.get_mpz_t(), d.get_mpz_t());
            den = den / g * d;
        }
        Rational scale{mpq_class(den)};
        IntRow<I> row;
        row.reserve(vec.size());
        for (const auto& [idx, c] : vec) {
            Rational v = c * scale;
            row.emplace_back(idx, int_ops<I>::from_rational_numerator(v));
        }
        if (row.empty()) return {row, scale};
        I g{};
        for (const auto& [idx, v] : row) {
            (void)idx;
            g = int_ops<I>::gcd(g, v);
        }
        for (auto& [idx, v] : row) v = int_ops<I>::div_exact(v, g);
        scale = scale / int_ops<I>::to_rational(g);
        return {row, scale};
    }

    /// Integer reduction against the current reduced-echelon rows (no tracking).
    void reduce_fast(IntRow<I>& x) {
        while (!x.empty()) {
            bool hit = false;
            for (const auto& [idx, val] : x) {
                auto it = pivot_row_.find(idx);
                if (it == pivot_row_.end()) continue;
                const IntRow<I>& r = rows_[it->second];
                const I& p = pivot_value(it->second);
                I g = int_ops<I>::gcd(p, val);
                x = row_combine(x, int_ops<I>::div_exact(p, g), int_ops<I>::div_exact(val, g), r);
                if (row_is_large(x)) strip_content(x);
                hit = true;
                break;
            }
            if (!hit) break;
        }
    }

    void insert_candidate(const std::vector<std::pair<std::uint32_t, S>>& coords, WordPtr<S> word) {
        // Tracked reduction over the reported (pivot-normalized) basis rows.
        std::map<std::uint32_t, Rational> x;
        for (const auto& [idx, c] : coords)
            if (!c.is_zero()) x.emplace(idx, c);
        std::vector<std::pair<std::size_t, Rational>> used;
        for (const auto& [pcol, rowidx] : pivot_row_) {
            auto it = x.find(pcol);
            if (it == x.end()) continue;
            Rational mu = it->second;
            const IntRow<I>& r = rows_[rowidx];
            Rational pinv = Rational(1) / int_ops<I>::to_rational(pivot_value(rowidx));
            for (const auto& [cidx, cval] : r) {
                Rational delta = mu * int_ops<I>::to_rational(cval) * pinv;
                auto jt = x.find(cidx);
                if (jt == x.end()) {
                    if (!delta.is_zero()) x.emplace(cidx, -delta);
                } else {
                    jt->second -= delta;
                    if (jt->second.is_zero()) x.erase(jt);
                }
            }
            used.emplace_back(rowidx, mu);
        }
        if (x.empty()) return;

        std::vector<std::pair<std::uint32_t, S>> residual(x.begin(), x.end());
        auto [row, scale] = integerize(residual);
        const std::uint32_t pivot_col = row.front().first;  // first nonzero coordinate
        if (int_ops<I>::sign(row.front().second) < 0) {
            for (auto& [idx, v] : row) v = int_ops<I>::sub(I{}, v);
            scale = -scale;
        }
        Rational pivot_val = int_ops<I>::to_rational(row.front().second);
        // reported element b_new = row / pivot = (scale / pivot) * residual
        Rational alpha = scale / pivot_val;

        std::vector<std::pair<S, WordPtr<S>>> combo;
        combo.emplace_back(alpha, std::move(word));
        for (const auto& [rowidx, mu] : used) combo.emplace_back(-(alpha * mu), words_[rowidx]);
        WordPtr<S> new_word = combo.size() == 1 && combo.front().first == Rational(1)
                                  ? combo.front().second
                                  : Word<S>::combo(std::move(combo));

        const std::size_t new_idx = rows_.size();

        // Back-substitute the new pivot out of the older rows.
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            const I* hit = row_at(rows_[i], pivot_col);
            if (!hit) continue;
            I c = *hit;
            const I& p_old = pivot_value(i);
            words_[i] = Word<S>::combo(
                {{Rational(1), words_[i]},
                 {-(int_ops<I>::to_rational(c) / int_ops<I>::to_rational(p_old)), new_word}});
            I pnew = row.front().second;
            I g = int_ops<I>::gcd(pnew, c);
            rows_[i] = row_combine(rows_[i], int_ops<I>::div_exact(pnew, g),
                                   int_ops<I>::div_exact(c, g), row);
            strip_content(rows_[i]);
            if (int_ops<I>::sign(*row_at(rows_[i], pivcol_[i])) < 0)
                for (auto& [idx, v] : rows_[i]) v = int_ops<I>::sub(I{}, v);
        }

        rows_.push_back(std::move(row));
        pivcol_.push_back(pivot_col);
        words_.push_back(std::move(new_word));
        pivot_row_.emplace(pivot_col, new_idx);
        for (std::size_t j = 0; j < new_idx; ++j) queue_.emplace_back(new_idx, j);
    }

    Space& space_;
    std::span<const Element> gens_;
    ClosureOptions opt_;
    std::vector<IntRow<I>> rows_;
    std::vector<std::uint32_t> pivcol_;
    std::vector<WordPtr<S>> words_;
    std::map<std::uint32_t, std::size_t> pivot_row_;
    std::deque<std::pair<std::size_t, std::size_t>> queue_;
};

// ---- floating engine ---------------------------------------------------------

template <typename Space>
class FloatCloser {
  public:
    using Element = typename Space::Element;
    using S = typename Space::Scalar;
    static_assert(std::is_same_v<S, double>, "floating closures use double scalars");

    FloatCloser(Space& space, std::span<const Element> gens, const ClosureOptions& opt)
        : space_(space), gens_(gens), opt_(opt) {}

    ClosureReport<Element, S> run() {
        const std::int64_t ambient = space_.ambient_dim();
        const std::int64_t max_dim =
            opt_.max_dim > 0 ? std::min<std::int64_t>(opt_.max_dim, ambient) : ambient;

        bool truncated = false;
        for (std::size_t gi = 0; gi < gens_.size() && !truncated; ++gi) {
            insert_candidate(gens_[gi], Word<S>::leaf(static_cast<int>(gi)));
            truncated = rank() >= max_dim && !queue_.empty();
        }
        while (!truncated && !queue_.empty()) {
            auto [k, j] = queue_.front();
            queue_.pop_front();
            Element c = space_.bracket(elements_[k], elements_[j]);
            insert_candidate(c, Word<S>::bracket(words_[k], words_[j]));
            truncated = rank() >= max_dim && !queue_.empty();
        }

        ClosureReport<Element, S> rep;
        rep.lattice = space_.lattice();
        rep.options = opt_;
        rep.options.max_dim = max_dim;
        rep.ambient_dim = ambient;
        rep.dimension = static_cast<int>(basis_.size());
        rep.converged = !truncated || rank() >= ambient;
        rep.words = words_;
        rep.basis = elements_;
        return rep;
    }

  private:
    std::int64_t rank() const { return static_cast<std::int64_t>(basis_.size()); }

    static double norm(const std::vector<double>& v) {
        double s = 0;
        for (double x : v) s += x * x;
        return std::sqrt(s);
    }

    std::vector<double> densify(const std::vector<std::pair<std::uint32_t, double>>& sp) const {
        std::vector<double> v(space_size_, 0.0);
        for (const auto& [idx, c] : sp) {
            if (v.size() <= idx) v.resize(idx + 1, 0.0);
            v[idx] += c;
        }
        return v;
    }

    void insert_candidate(const Element& el, WordPtr<S> word) {
        auto sp = space_.to_coords(el);
        space_size_ = std::max(space_size_, space_.key_count());
        std::vector<double> v = densify(sp);
        v.resize(space_size_, 0.0);
        for (auto& b : basis_) b.resize(space_size_, 0.0);

        double n0 = norm(v);
        if (n0 <= opt_.tol) return;
        for (double& x : v) x /= n0;

        std::vector<double> coeff(basis_.size(), 0.0);
        for (int pass = 0; pass < 2; ++pass) {  // one reorthogonalization pass
            for (std::size_t i = 0; i < basis_.size(); ++i) {
                double d = 0;
                for (std::size_t t = 0; t < space_size_; ++t) d += basis_[i][t] * v[t];
                coeff[i] += d;
                for (std::size_t t = 0; t < space_size_; ++t) v[t] -= d * basis_[i][t];
            }
        }
        double r = norm(v);
        if (r <= opt_.tol) return;
        for (double& x : v) x /= r;

        std::vector<std::pair<S, WordPtr<S>>> combo;
        combo.emplace_back(1.0 / (n0 * r), std::move(word));
        for (std::size_t i = 0; i < basis_.size(); ++i)
            if (coeff[i] != 0.0) combo.emplace_back(-coeff[i] / r, words_[i]);
        WordPtr<S> new_word = Word<S>::combo(std::move(combo));

        std::vector<std::pair<std::uint32_t, double>> spv;
        for (std::size_t t = 0; t < space_size_; ++t)
            if (v[t] != 0.0) spv.emplace_back(static_cast<std::uint32_t>(t), v[t]);
        const std::size_t new_idx = basis_.size();
        basis_.push_back(std::move(v));
        elements_.push_back(space_.from_coords(spv));
        words_.push_back(std::move(new_word));
        for (std::size_t j = 0; j < new_idx; ++j) queue_.emplace_back(new_idx, j);
    }

    Space& space_;
    std::span<const Element> gens_;
    ClosureOptions opt_;
    std::size_t space_size_ = 0;
    std::vector<std::vector<double>> basis_;  // orthonormal coordinate rows
    std::vector<Element> elements_;
    std::vector<WordPtr<S>> words_;
    std::deque<std::pair<std::size_t, std::size_t>> queue_;
};

}  // namespace detail

/// Lie closure of a generator set. Deterministic: the worklist is FIFO over
/// (new, existing) pairs with existing elements in basis order.
template <typename Space>
ClosureReport<typename Space::Element, typename Space::Scalar> close(
    Space& space, std::span<const typename Space::Element> generators,
    const ClosureOptions& options = {}) {
    if (generators.empty()) throw ValidationError("close: empty generator list");
    for (const auto& g : generators)
        if (!g.lattice.same_geometry(space.lattice()) || g.lattice.sector != space.lattice().sector)
            throw LatticeMismatchError("close: generator lattice differs from the space lattice");
    if constexpr (scalar_traits<typename Space::Scalar>::exact) {
        try {
            return detail::ExactCloser<Space, std::int64_t>(space, generators, options).run();
        } catch (const IntOverflowError&) {
            return detail::ExactCloser<Space, mpz_class>(space, generators, options).run();
        }
    } else {
        return detail::FloatCloser<Space>(space, generators, options).run();
    }
}

namespace detail {

/// Incremental exact row reduction (kept in reduced-echelon form) with
/// coefficient tracking over the originally inserted vectors. Used for
/// membership tests and as shared machinery in test oracles.
class RationalReducer {
  public:
    using SparseVec = std::vector<std::pair<std::uint32_t, Rational>>;

    /// Returns true when the vector was independent (rank grew).
    bool insert(const SparseVec& vec) {
        auto [x, mults] = reduce(vec);
        const std::size_t orig_index = n_inserted_++;
        if (x.empty()) return false;
        const auto pivot = x.begin()->first;
        Rational pval = x.begin()->second;
        std::map<std::uint32_t, Rational> row;
        for (auto& [idx, c] : x) row.emplace(idx, c / pval);
        std::map<std::size_t, Rational> expr;  // stored row over original vectors
        expr[orig_index] = Rational(1) / pval;
        for (std::size_t i = 0; i < mults.size(); ++i) {
            if (mults[i].is_zero()) continue;
            for (const auto& [oi, oc] : exprs_[i]) {
                expr[oi] -= mults[i] * oc / pval;
                if (expr[oi].is_zero()) expr.erase(oi);
            }
        }
        // Back-substitute the new pivot out of the existing rows (full RREF).
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            auto it = rows_[i].find(pivot);
            if (it == rows_[i].end()) continue;
            Rational c = it->second;
            rows_[i].erase(it);
            for (const auto& [cidx, cval] : row) {
                if (cidx == pivot) continue;
                auto jt = rows_[i].find(cidx);
                if (jt == rows_[i].end()) {
                    rows_[i].emplace(cidx, -(c * cval));
                } else {
                    jt->second -= c * cval;
                    if (jt->second.is_zero()) rows_[i].erase(jt);
                }
            }
            for (const auto& [oi, oc] : expr) {
                auto jt = exprs_[i].find(oi);
                if (jt == exprs_[i].end()) {
                    exprs_[i].emplace(oi, -(c * oc));
                } else {
                    jt->second -= c * oc;
                    if (jt->second.is_zero()) exprs_[i].erase(jt);
                }
            }
        }
        rows_.push_back(std::move(row));
        exprs_.push_back(std::move(expr));
        pivots_.emplace(pivot, rows_.size() - 1);
        return true;
    }

    /// Reduce a vector against the RREF rows; returns residual + multipliers.
    std::pair<std::map<std::uint32_t, Rational>, std::vector<Rational>> reduce(
        const SparseVec& vec) const {
        std::map<std::uint32_t, Rational> x;
        for (const auto& [idx, c] : vec) {
            if (c.is_zero()) continue;
            x[idx] += c;
            if (x[idx].is_zero()) x.erase(idx);
        }
        std::vector<Rational> mults(rows_.size(), Rational(0));
        for (const auto& [pcol, rowidx] : pivots_) {
            auto it = x.find(pcol);
            if (it == x.end()) continue;
            Rational mu = it->second;
            mults[rowidx] = mu;
            for (const auto& [cidx, cval] : rows_[rowidx]) {
                auto jt = x.find(cidx);
                if (jt == x.end()) {
                    x.emplace(cidx, -(mu * cval));
                } else {
                    jt->second -= mu * cval;
                    if (jt->second.is_zero()) x.erase(jt);
                }
            }
        }
        return {std::move(x), std::move(mults)};
    }

    /// Coefficients over the ORIGINAL inserted vectors for a target in span.
    std::pair<bool, std::vector<Rational>> project(const SparseVec& vec) const {
        auto [x, mults] = reduce(vec);
        std::vector<Rational> coeffs(n_inserted_, Rational(0));
        if (!x.empty()) return {false, std::move(coeffs)};
        for (std::size_t i = 0; i < mults.size(); ++i) {
            if (mults[i].is_zero()) continue;
            for (const auto& [oi, oc] : exprs_[i]) coeffs[oi] += mults[i] * oc;
        }
        return {true, std::move(coeffs)};
    }

    std::size_t rank() const { return rows_.size(); }

  private:
    std::vector<std::map<std::uint32_t, Rational>> rows_;  // pivot-normalized RREF
    std::vector<std::map<std::size_t, Rational>> exprs_;
    std::map<std::uint32_t, std::size_t> pivots_;
    std::size_t n_inserted_ = 0;
};

}  // namespace detail

template <typename Element, typename S>
struct MemberResult {
    bool in_span = false;
    std::vector<S> coefficients;  // over report.basis when in span
    double residual_norm = 0.0;
    WordPtr<S> word;  // synthesized combination word when in span
};

/// Exact or least-squares projection of a target onto a closure report basis.
template <typename Space>
MemberResult<typename Space::Element, typename Space::Scalar> member(
    Space& space, const typename Space::Element& target,
    const ClosureReport<typename Space::Element, typename Space::Scalar>& report) {
    using S = typename Space::Scalar;
    MemberResult<typename Space::Element, S> res;
    if (!target.lattice.same_geometry(report.lattice) ||
        target.lattice.sector != report.lattice.sector)
        throw LatticeMismatchError("member: target lattice differs from the report lattice");

    if constexpr (scalar_traits<S>::exact) {
        detail::RationalReducer red;
        for (const auto& b : report.basis) red.insert(space.to_coords(b));
        auto tcoords = space.to_coords(target);
        auto [in_span, coeffs] = red.project(tcoords);
        res.coefficients = std::move(coeffs);
        if (in_span) {
            res.in_span = true;
            std::vector<std::pair<S, WordPtr<S>>> combo;
            for (std::size_t i = 0; i < res.coefficients.size(); ++i)
                if (!res.coefficients[i].is_zero())
                    combo.emplace_back(res.coefficients[i], report.words[i]);
            if (combo.empty() && !report.words.empty())
                combo.emplace_back(S{}, report.words[0]);  // the zero element
            if (!combo.empty()) res.word = Word<S>::combo(std::move(combo));
        } else {
            auto [residual, mults] = red.reduce(tcoords);
            (void)mults;
            double s = 0;
            for (const auto& [idx, c] : residual) {
                (void)idx;
                double d = scalar_traits<S>::to_double(c);
                s += d * d;
            }
            res.residual_norm = std::sqrt(s);
            res.coefficients.clear();
        }
        return res;
    } else {
        // Orthonormal basis: projection coefficients are inner products.
        std::size_t n = space.key_count();
        auto densify = [&](const typename Space::Element& e) {
            auto sp = space.to_coords(e);
            n = std::max(n, space.key_count());
            std::vector<double> v(n, 0.0);
            for (const auto& [idx, c] : sp) {
                if (v.size() <= idx) v.resize(idx + 1, 0.0);
                v[idx] += c;
            }
            return v;
        };
        std::vector<double> t = densify(target);
        double tnorm = 0;
        for (double v : t) tnorm += v * v;
        tnorm = std::sqrt(tnorm);
        res.coefficients.assign(report.basis.size(), 0.0);
        std::vector<std::vector<double>> rows;
        for (const auto& b : report.basis) rows.push_back(densify(b));
        for (auto& r : rows) r.resize(n, 0.0);
        t.resize(n, 0.0);
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t i = 0; i < rows.size(); ++i) {
                double d = 0;
                for (std::size_t k = 0; k < n; ++k) d += rows[i][k] * t[k];
                res.coefficients[i] += d;
                for (std::size_t k = 0; k < n; ++k) t[k] -= d * rows[i][k];
            }
        }
        double r = 0;
        for (double v : t) r += v * v;
        res.residual_norm = std::sqrt(r);
        if (res.residual_norm <= report.options.tol * std::max(1.0, tnorm)) {
            res.in_span = true;
            std::vector<std::pair<double, WordPtr<double>>> combo;
            for (std::size_t i = 0; i < res.coefficients.size(); ++i)
                if (res.coefficients[i] != 0.0) combo.emplace_back(res.coefficients[i], report.words[i]);
            if (!combo.empty()) res.word = Word<double>::combo(std::move(combo));
        }
        return res;
    }
}

}  // namespace tilie
