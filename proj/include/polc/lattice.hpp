#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "polc/bands.hpp"
#include "polc/errors.hpp"
#include "polc/io.hpp"
#include "polc/params.hpp"

namespace polc {

// Dense real symmetric matrix, row-major full storage. Assembly writes both
// (i,j) and (j,i) so the matrix is symmetric bit-exactly, never symmetrized
// after the fact.
struct SymmetricMatrix {
    std::size_t n = 0;
    std::vector<double> a;  // n*n entries

    SymmetricMatrix() = default;
    explicit SymmetricMatrix(std::size_t dim) : n(dim), a(dim * dim, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }

    void set_sym(std::size_t i, std::size_t j, double v) {
        (*this)(i, j) = v;
        (*this)(j, i) = v;
    }

    double trace() const {
        double t = 0.0;
        for (std::size_t i = 0; i < n; ++i) t += (*this)(i, i);
        return t;
    }
};

// Real-space single-excitation Hamiltonian of the M-cell periodic ring.
// Basis ordering: photon modes of cells 0..M-1, then collective atomic
// excitations of cells 0..M-1. Entries in rad/s.
struct SingleExcitationHamiltonian {
    std::size_t dim = 0;  // = 2M
    SymmetricMatrix matrix;
};

// Photon block: diagonal omega_ph, nearest-neighbour -alpha with periodic
// wrap; atomic block: diagonal omega_ab, nearest-neighbour -beta; cross
// block: g on the same-cell diagonal. Each bond carries the full -alpha
// (-beta): the site sum contributes -alpha/2 per direction and the Hermitian
// conjugate supplies the other half.
inline SingleExcitationHamiltonian build_hamiltonian(const CrystalParams& p) {
    validate_params(p);
    const std::size_t m = static_cast<std::size_t>(p.M);
    SingleExcitationHamiltonian h{2 * m, SymmetricMatrix(2 * m)};
    for (std::size_t c = 0; c < m; ++c) {
        const std::size_t next = (c + 1) % m;
        h.matrix(c, c) = p.omega_ph;
        h.matrix(m + c, m + c) = p.omega_ab;
        h.matrix.set_sym(c, next, -p.alpha);
        h.matrix.set_sym(m + c, m + next, -p.beta);
        h.matrix.set_sym(c, m + c, p.g);
    }
    return h;
}

struct JacobiOptions {
    double rel_tol = 1e-12;  // off-diagonal vs diagonal Frobenius norm
    int max_sweeps = 100;
};

namespace detail {

inline double offdiag_frobenius(const SymmetricMatrix& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.n; ++i)
        for (std::size_t j = i + 1; j < m.n; ++j) s += 2.0 * m(i, j) * m(i, j);
    return std::sqrt(s);
}

inline double diag_frobenius(const SymmetricMatrix& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.n; ++i) s += m(i, i) * m(i, i);
    return std::sqrt(s);
}

}  // namespace detail

// Cyclic Jacobi diagonalization: sweep all (p,q) pairs, annihilating each
// off-diagonal entry with a Givens rotation, until the off-diagonal Frobenius
// norm drops below rel_tol times the diagonal Frobenius norm. Converges
// quadratically once sweeps start overlapping; 100 sweeps is far beyond what
// any matrix in this library needs (a failure indicates corrupted input).
// Returns all eigenvalues in ascending order.
inline std::vector<double> jacobi_eigenvalues(SymmetricMatrix m, JacobiOptions opt = {}) {
    const std::size_t n = m.n;
    if (n == 0) return {};
    if (m.a.size() != n * n) throw std::invalid_argument("matrix storage size mismatch");

    auto converged = [&] {
        const double off = detail::offdiag_frobenius(m);
        const double diag = detail::diag_frobenius(m);
        return off <= opt.rel_tol * diag;
    };

    int sweep = 0;
    for (; sweep < opt.max_sweeps && !converged(); ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = m(p, q);
                if (apq == 0.0) continue;
                // rotation angle from the standard stable formulas
                const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
                double t;
                if (std::abs(theta) > 1e150) {
                    t = 1.0 / (2.0 * theta);  // avoid theta^2 overflow
                } else {
                    t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                    if (theta < 0.0) t = -t;
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                const double app = m(p, p);
                const double aqq = m(q, q);
                m(p, p) = app - t * apq;
                m(q, q) = aqq + t * apq;
                m(p, q) = 0.0;
                m(q, p) = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (i == p || i == q) continue;
                    const double aip = m(i, p);
                    const double aiq = m(i, q);
                    const double new_ip = aip - s * (aiq + tau * aip);
                    const double new_iq = aiq + s * (aip - tau * aiq);
                    m(i, p) = new_ip;
                    m(p, i) = new_ip;
                    m(i, q) = new_iq;
                    m(q, i) = new_iq;
                }
            }
        }
    }
    if (!converged()) {
        throw numerical_error("jacobi eigensolver failed to converge after " +
                              std::to_string(opt.max_sweeps) +
                              " sweeps (off-diagonal residual = " +
                              fmt_g17(detail::offdiag_frobenius(m)) + ", threshold = " +
                              fmt_g17(opt.rel_tol * detail::diag_frobenius(m)) + ")");
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = m(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

inline std::vector<double> eigenvalues(const SingleExcitationHamiltonian& h,
                                       JacobiOptions opt = {}) {
    return jacobi_eigenvalues(h.matrix, opt);
}

// Oracle spectrum vs the analytic branches at the ring's discrete
// quasi-momenta k_j l = 2 pi j / M.
struct SpectrumComparison {
    std::vector<double> eigenvalues;  // oracle, ascending [rad/s]
    std::vector<double> analytic;     // {Omega_1(k_j), Omega_2(k_j)}, ascending [rad/s]
    double max_rel_dev = 0.0;
};

// Agreement threshold for compare_to_analytic; the deviation metric is
// regularized by omega_ab because absolute frequencies ~3e15 rad/s leave
// ~1e-1 rad/s of double-precision noise in any eigensolver.
inline constexpr double spectrum_pass_threshold = 1e-9;

inline SpectrumComparison compare_to_analytic(const CrystalParams& p, JacobiOptions opt = {}) {
    validate_params(p);
    SpectrumComparison cmp;
    cmp.eigenvalues = eigenvalues(build_hamiltonian(p), opt);
    cmp.analytic.reserve(2 * static_cast<std::size_t>(p.M));
    for (int j = 0; j < p.M; ++j) {
        const double k = 2.0 * std::numbers::pi * j / (p.M * p.l);
        const auto [o1, o2] = branch_frequencies(p, k);
        cmp.analytic.push_back(o1);
        cmp.analytic.push_back(o2);
    }
    std::sort(cmp.analytic.begin(), cmp.analytic.end());
    for (std::size_t i = 0; i < cmp.analytic.size(); ++i) {
        const double dev = std::abs(cmp.eigenvalues[i] - cmp.analytic[i]) /
                           (std::abs(cmp.analytic[i]) + p.omega_ab);
        cmp.max_rel_dev = std::max(cmp.max_rel_dev, dev);
    }
    return cmp;
}

inline void write_spectrum_csv(std::ostream& os, const SpectrumComparison& cmp) {
    os << "oracle_rad_s,analytic_rad_s\n";
    for (std::size_t i = 0; i < cmp.eigenvalues.size(); ++i)
        os << fmt_g17(cmp.eigenvalues[i]) << ',' << fmt_g17(cmp.analytic[i]) << '\n';
    os << "# max_rel_dev = " << fmt_g17(cmp.max_rel_dev) << '\n';
}

}  // namespace polc
