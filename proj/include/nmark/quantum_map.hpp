// quantum_map.hpp — Choi matrices of the amplitude-damping family on {|+>, |->, |00>}
//
// The reduced dynamics is fixed by the channel amplitudes a_k (r1, r2 for two atoms,
// r for one atom) plus the ground state |g>:
//   E(|i><j|) = a_i a_j* |i><j|,  E(|i><i|) += (1 - |a_i|^2) |g><g|,  a_g = 1.
// Choi matrices use system (x) ancilla ordering, row = sys * n + anc, and the
// normalized maximally entangled state n^{-1/2} sum |k>|k>.

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "nmark/errors.hpp"
#include "nmark/model.hpp"
#include "nmark/volterra.hpp"

namespace nmark {

template <typename Scalar>
using ComplexMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using ComplexVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

/// Channel amplitudes at time t. Two atoms: (r1, r2); one atom: (r).
template <typename Scalar = double>
struct ChannelSnapshot {
    ComplexVector<Scalar> amplitudes;
    Scalar t{0};

    ChannelSnapshot() = default;
    ChannelSnapshot(std::complex<Scalar> r1, std::complex<Scalar> r2, Scalar time = 0)
        : amplitudes(2), t(time) {
        amplitudes << r1, r2;
    }

    static ChannelSnapshot single(std::complex<Scalar> r, Scalar time = 0) {
        ChannelSnapshot s;
        s.amplitudes.resize(1);
        s.amplitudes << r;
        s.t = time;
        return s;
    }

    std::complex<Scalar> r1() const { return amplitudes(0); }
    std::complex<Scalar> r2() const { return amplitudes(1); }
    Eigen::Index channels() const { return amplitudes.size(); }
};

template <typename Scalar = double>
struct ChoiMatrix {
    ComplexMatrix<Scalar> entries;
    std::string label;

    Eigen::Index dim() const { return entries.rows(); }
};

template <typename Scalar>
struct HermitianEigs {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values;  // ascending
    ComplexMatrix<Scalar> vectors;                    // columns, orthonormal
};

/// Eigen-decomposition of a Hermitian matrix, ascending eigenvalues.
template <typename Derived>
HermitianEigs<typename Eigen::NumTraits<typename Derived::Scalar>::Real> hermitian_eigs(
    const Eigen::MatrixBase<Derived>& M) {
    using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
    if (M.rows() != M.cols()) throw Error(Errc::NotHermitian, "matrix is not square");
    const Real scale = std::max(Real(1), M.cwiseAbs().maxCoeff());
    if ((M - M.adjoint()).cwiseAbs().maxCoeff() > Real(1e-10) * scale) {
        throw Error(Errc::NotHermitian, "matrix deviates from its adjoint");
    }
    const ComplexMatrix<Real> H = M.template cast<std::complex<Real>>();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix<Real>> es(H);
    if (es.info() != Eigen::Success) throw Error(Errc::NumericalInstability, "eigensolver failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

namespace detail {

template <typename Scalar>
ComplexMatrix<Scalar> choi_from_amplitudes(const ComplexVector<Scalar>& a) {
    const Eigen::Index k = a.size();
    const Eigen::Index n = k + 1;  // excited channels plus the ground state
    ComplexVector<Scalar> amp(n);
    amp.head(k) = a;
    amp(k) = Scalar(1);
    ComplexMatrix<Scalar> C = ComplexMatrix<Scalar>::Zero(n * n, n * n);
    // |psi> = sum_i a_i |i>|i>
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) C(i * n + i, j * n + j) = amp(i) * std::conj(amp(j));
    }
    // population leaking to the ground state: |g, i><g, i|
    for (Eigen::Index i = 0; i < k; ++i) C(k * n + i, k * n + i) += Scalar(1) - std::norm(amp(i));
    return C / Scalar(n);
}

}  // namespace detail

/// Choi matrix of E_(t,0).
template <typename Scalar>
ChoiMatrix<Scalar> choi(const ChannelSnapshot<Scalar>& ch) {
    for (Eigen::Index i = 0; i < ch.channels(); ++i) {
        if (std::abs(ch.amplitudes(i)) > Scalar(1) + Scalar(1e-6)) {
            throw Error(Errc::DomainError, "channel amplitude exceeds 1");
        }
    }
    return {detail::choi_from_amplitudes<Scalar>(ch.amplitudes), "E(t,0)"};
}

/// Choi matrix of E_(t,s) = E_(t,0) E_(s,0)^{-1}: same structure with amplitude ratios.
template <typename Scalar>
ChoiMatrix<Scalar> intermediate_choi(const ChannelSnapshot<Scalar>& later,
                                     const ChannelSnapshot<Scalar>& earlier) {
    if (later.channels() != earlier.channels()) {
        throw Error(Errc::DomainError, "snapshots have different channel counts");
    }
    if (earlier.t > later.t) throw Error(Errc::DomainError, "earlier snapshot is later in time");
    ComplexVector<Scalar> ratio(later.channels());
    for (Eigen::Index i = 0; i < later.channels(); ++i) {
        if (std::abs(earlier.amplitudes(i)) < Scalar(kZeroTol)) {
            throw Error(Errc::SingularIntermediateMap, "amplitude vanishes at the earlier time");
        }
        ratio(i) = later.amplitudes(i) / earlier.amplitudes(i);
    }
    return {detail::choi_from_amplitudes<Scalar>(ratio), "E(t,s)"};
}

/// Sum of |eigenvalues| of a Hermitian matrix.
template <typename Derived>
auto trace_norm(const Eigen::MatrixBase<Derived>& M) {
    return hermitian_eigs(M).values.cwiseAbs().sum();
}

template <typename Scalar>
Scalar trace_norm(const ChoiMatrix<Scalar>& M) {
    return trace_norm(M.entries);
}

namespace detail {

/// sqrt of eigenvalues with round-off zeros (below 64 eps max|v|) mapped to exactly 0;
/// sqrt would otherwise turn a 1e-17 residue into a 3e-9 contribution.
template <typename Vec>
Vec clipped_roots(const Vec& v) {
    using Scalar = typename Vec::Scalar;
    const Scalar floor = Scalar(64) * std::numeric_limits<Scalar>::epsilon() *
                         (v.size() > 0 ? v.cwiseAbs().maxCoeff() : Scalar(0));
    return v.unaryExpr([floor](Scalar x) { return x > floor ? std::sqrt(x) : Scalar(0); });
}

template <typename Scalar>
ComplexMatrix<Scalar> psd_sqrt(const ComplexMatrix<Scalar>& A) {
    const auto e = hermitian_eigs(A);
    if (e.values.size() > 0 && e.values.minCoeff() < Scalar(-1e-8)) {
        throw Error(Errc::NotPSD, "matrix has a negative eigenvalue");
    }
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> root = clipped_roots(e.values);
    return e.vectors * root.template cast<std::complex<Scalar>>().asDiagonal() * e.vectors.adjoint();
}

}  // namespace detail

/// Uhlmann fidelity against a fixed reference; keeps sqrt(reference) between calls.
template <typename Scalar = double>
class FidelityReference {
public:
    explicit FidelityReference(const ComplexMatrix<Scalar>& reference)
        : root_(detail::psd_sqrt<Scalar>(reference)) {}

    Scalar operator()(const ComplexMatrix<Scalar>& A) const {
        const auto e = hermitian_eigs(A);
        if (e.values.minCoeff() < Scalar(-1e-8)) throw Error(Errc::NotPSD, "matrix has a negative eigenvalue");
        // ||sqrt(A) sqrt(B)||_1 = Tr sqrt(sqrt(B) A sqrt(B))
        const ComplexMatrix<Scalar> M = root_ * A * root_;
        const ComplexMatrix<Scalar> H = Scalar(0.5) * (M + M.adjoint());
        const auto m = hermitian_eigs(H);
        const Scalar tr = detail::clipped_roots(m.values).sum();
        return tr * tr;
    }

private:
    ComplexMatrix<Scalar> root_;
};

/// F(A, B) = ||sqrt(A) sqrt(B)||_1^2; both arguments must be PSD.
template <typename Scalar>
Scalar fidelity(const ComplexMatrix<Scalar>& A, const ComplexMatrix<Scalar>& B) {
    return FidelityReference<Scalar>(B)(A);
}

template <typename Scalar>
Scalar fidelity(const ChoiMatrix<Scalar>& A, const ChoiMatrix<Scalar>& B) {
    return fidelity(A.entries, B.entries);
}

/// Kronecker product; the result is ordered (sys_a anc_a) (x) (sys_b anc_b).
template <typename Scalar>
ChoiMatrix<Scalar> kron(const ChoiMatrix<Scalar>& A, const ChoiMatrix<Scalar>& B) {
    ComplexMatrix<Scalar> K = Eigen::kroneckerProduct(A.entries, B.entries);
    return {std::move(K), A.label + " (x) " + B.label};
}

enum class AsymptoticKind { Total, Uncorrelated };

/// Long-time Choi matrix. Both channels relax for d > 0 (including the infinite
/// distance); at d = 0 the antisymmetric channel is dark, so r2 stays 1. The product
/// (uncorrelated) dynamics has amplitude sqrt(r1 r2) -> 0 in every case.
template <typename Scalar = double>
ChoiMatrix<Scalar> choi_asymptotic(const CavityParams& p, AsymptoticKind kind = AsymptoticKind::Total) {
    const bool dark = p.coincident() && kind == AsymptoticKind::Total;
    ChannelSnapshot<Scalar> limit(Scalar(0), dark ? Scalar(1) : Scalar(0));
    auto c = choi(limit);
    c.label = "E(inf,0)";
    return c;
}

/// (||Choi(E_(t2,t1))||_1 - 1) / (t2 - t1).
template <typename Scalar>
Scalar g_numeric(const ChannelSnapshot<Scalar>& first, const ChannelSnapshot<Scalar>& second) {
    const Scalar eps = second.t - first.t;
    if (!(eps > 0)) throw Error(Errc::DomainError, "second snapshot must be later");
    const Scalar excess = trace_norm(intermediate_choi(second, first)) - Scalar(1);
    return std::max(Scalar(0), excess) / eps;
}

/// g_numeric at t for eps, eps/10, eps/100, Richardson-extrapolated to eps -> 0.
/// `snapshot` maps a time to a ChannelSnapshot.
template <typename SnapshotFn>
double g_numeric_extrapolated(SnapshotFn&& snapshot, double t, double eps = 1e-2) {
    const auto base = snapshot(t);
    std::vector<double> g;
    for (double e : {eps, eps / 10.0, eps / 100.0}) g.push_back(g_numeric(base, snapshot(t + e)));
    // Two rounds for ratio-10 steps: remove the O(eps) and O(eps^2) terms.
    const double a1 = (10.0 * g[1] - g[0]) / 9.0;
    const double a2 = (10.0 * g[2] - g[1]) / 9.0;
    return (100.0 * a2 - a1) / 99.0;
}

}  // namespace nmark
