#pragma once

#include <Eigen/Core>

#include "tilie/rational.hpp"

// Eigen scalar glue for the exact types. Both are registered as "real"
// scalars: products, sums and transposes are all we use on exact matrices;
// conjugation of GaussianRational matrices is done entry-wise by callers.

namespace Eigen {

template <>
struct NumTraits<tilie::Rational> {
    using Real = tilie::Rational;
    using NonInteger = tilie::Rational;
    using Literal = tilie::Rational;
    using Nested = tilie::Rational;
    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 2,
        AddCost = 10,
        MulCost = 10,
    };
    static inline Real epsilon() { return tilie::Rational(0); }
    static inline Real dummy_precision() { return tilie::Rational(0); }
    static inline int digits10() { return 0; }
};

template <>
struct NumTraits<tilie::GaussianRational> {
    using Real = tilie::GaussianRational;
    using NonInteger = tilie::GaussianRational;
    using Literal = tilie::GaussianRational;
    using Nested = tilie::GaussianRational;
    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 4,
        AddCost = 20,
        MulCost = 40,
    };
    static inline Real epsilon() { return tilie::GaussianRational(0); }
    static inline Real dummy_precision() { return tilie::GaussianRational(0); }
    static inline int digits10() { return 0; }
};

}  // namespace Eigen

namespace tilie {

template <typename S>
using DenseMatrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

/// Entry-wise complex conjugate of an exact complex matrix.
inline DenseMatrix<GaussianRational> conj_entries(const DenseMatrix<GaussianRational>& m) {
    DenseMatrix<GaussianRational> r(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) r(i, j) = m(i, j).conj();
    return r;
}

}  // namespace tilie
