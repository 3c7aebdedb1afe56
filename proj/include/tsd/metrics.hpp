#pragma once

#include "tsd/basis.hpp"
#include "tsd/types.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tsd {

inline ComplexMatrix ideal_cnot() {
    ComplexMatrix u = ComplexMatrix::Zero(4, 4);
    u(0, 0) = u(1, 1) = u(2, 3) = u(3, 2) = 1.0;
    return u;
}

// 1 - (|Tr(U^dag W)|^2 + Tr(U^dag W W^dag U)) / 20. Leakage shows up through the second trace.
inline double rotation_error(const ComplexMatrix& u_realized, const ComplexMatrix& u_ideal) {
    if (u_realized.rows() != 4 || u_realized.cols() != 4 || u_ideal.rows() != 4 || u_ideal.cols() != 4)
        throw std::invalid_argument("rotation_error expects 4x4 matrices");
    const ComplexMatrix a = u_ideal.adjoint() * u_realized;
    const double tr = std::norm(a.trace());
    const double tr2 = (a * a.adjoint()).trace().real();
    return 1.0 - (tr + tr2) / 20.0;
}

namespace detail {
inline void require_four(const Eigen::Ref<const ComplexVector>& psi) {
    if (psi.size() != 4) throw std::invalid_argument("expected amplitudes over {00, 01, 10, 11}");
}
}  // namespace detail

// 1 - |<Phi|psi>|^2, Phi = (|00> + |11>)/sqrt2; sensitive to the relative 00/11 phase.
inline double bell_error(const Eigen::Ref<const ComplexVector>& computational) {
    detail::require_four(computational);
    using C = basis::Computational;
    return 1.0 - 0.5 * std::norm(computational(C::s00) + computational(C::s11));
}

// Best overlap over the relative phase of the target state: 1 - (|a00| + |a11|)^2 / 2.
inline double bell_error_phase_corrected(const Eigen::Ref<const ComplexVector>& computational) {
    detail::require_four(computational);
    using C = basis::Computational;
    const double s = std::abs(computational(C::s00)) + std::abs(computational(C::s11));
    return 1.0 - 0.5 * s * s;
}

inline double bell_error(const AtomState& psi) {
    switch (psi.kind()) {
        case basis::Kind::computational: return bell_error(psi.amplitudes());
        case basis::Kind::bell_blockaded:
        case basis::Kind::bell_full: {
            const Eigen::Index off = basis::C0::dim;
            const bool blk = psi.kind() == basis::Kind::bell_blockaded;
            Eigen::Vector4cd c(psi[basis::C0::s00], psi[basis::C0::s01],
                               psi[off + basis::c1_index(blk, basis::C1Full::s10)],
                               psi[off + basis::c1_index(blk, basis::C1Full::s11)]);
            return bell_error(c);
        }
        default: throw std::invalid_argument("state basis does not contain the computational states");
    }
}

inline double truth_table_error(const ComplexMatrix& u_realized, const ComplexMatrix& u_ideal) {
    if (u_realized.rows() != 4 || u_realized.cols() != 4) throw std::invalid_argument("expected a 4x4 gate map");
    double worst = 1.0;
    for (Eigen::Index j = 0; j < 4; ++j) worst = std::min(worst, std::norm(u_ideal.col(j).dot(u_realized.col(j))));
    return 1.0 - worst;
}

inline double truth_table_error(const ComplexMatrix& u_realized) {
    return truth_table_error(u_realized, ideal_cnot());
}

inline double rotation_error(const ComplexMatrix& u_realized) { return rotation_error(u_realized, ideal_cnot()); }

inline double figure_of_merit(double t_coherence, double t_gate) {
    if (!(t_coherence > 0.0) || !(t_gate > 0.0)) throw std::invalid_argument("times must be positive");
    return t_coherence / t_gate;
}

// sqrt(6) pi / Omega_t, excluding the phase-change gap.
inline double gate_duration(double omega_t) {
    if (!(omega_t > 0.0)) throw std::invalid_argument("omega_t must be positive");
    return std::sqrt(6.0) * pi / omega_t;
}

}  // namespace tsd
