#pragma once

#include "tsd/basis.hpp"
#include "tsd/types.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace tsd {

namespace detail {

inline void require_unit_phase(cplx phase) {
    if (std::abs(std::abs(phase) - 1.0) > 1e-12) throw std::invalid_argument("phase must have unit modulus");
}

inline void set_coupling(ComplexMatrix& h, Eigen::Index upper, Eigen::Index lower, cplx value) {
    h(upper, lower) = value;
    h(lower, upper) = std::conj(value);
}

}  // namespace detail

// Control qubit in |0>: target couples |00>,|01> to |0r>. Basis {00, 01, 0r}.
// The upward element carries conj(phase), so a tone e^{itkv} appears as e^{-itkv} on <0r|H|0x>.
inline ComplexMatrix build_hc0(double omega_t0, double omega_t1, cplx phase0, cplx phase1) {
    if (omega_t0 == 0.0 || omega_t1 == 0.0 || !std::isfinite(omega_t0) || !std::isfinite(omega_t1))
        throw std::invalid_argument("target Rabi frequencies must be non-zero and finite");
    detail::require_unit_phase(phase0);
    detail::require_unit_phase(phase1);
    using B = basis::C0;
    ComplexMatrix h = ComplexMatrix::Zero(B::dim, B::dim);
    detail::set_coupling(h, B::s0r, B::s00, 0.5 * omega_t0 * std::conj(phase0));
    detail::set_coupling(h, B::s0r, B::s01, 0.5 * omega_t1 * std::conj(phase1));
    return h;
}

inline ComplexMatrix build_hc0(double omega_t, cplx phase = 1.0) {
    if (!(omega_t > 0.0)) throw std::invalid_argument("omega_t must be positive");
    return build_hc0(omega_t, omega_t, phase, phase);
}

// Control qubit in |1>, |rr> excluded. Basis {1r, r1, r0, 11, 10}.
// Signed target amplitudes carry the spin-echo flip.
inline ComplexMatrix build_hc1_blockaded(double omega_c, double omega_t0, double omega_t1) {
    if (!(omega_c > 0.0)) throw std::invalid_argument("omega_c must be positive");
    if (omega_t0 == 0.0 || omega_t1 == 0.0) throw std::invalid_argument("target Rabi frequencies must be non-zero");
    using B = basis::C1Blockaded;
    ComplexMatrix h = ComplexMatrix::Zero(B::dim, B::dim);
    detail::set_coupling(h, B::s1r, B::s11, 0.5 * omega_t1);
    detail::set_coupling(h, B::s1r, B::s10, 0.5 * omega_t0);
    detail::set_coupling(h, B::sr1, B::s11, 0.5 * omega_c);
    detail::set_coupling(h, B::sr0, B::s10, 0.5 * omega_c);
    return h;
}

inline ComplexMatrix build_hc1_blockaded(double omega_c, double omega_t) {
    return build_hc1_blockaded(omega_c, omega_t, omega_t);
}

// Doppler tone rates (rad/s) seen by each channel during one segment.
struct ToneRates {
    double control = 0.0;
    double target0 = 0.0;
    double target1 = 0.0;
};

inline ToneRates tone_rates(const GateChannelConfig& cfg, const KSigns& k_signs, double v_c, double v_t) {
    const double k = cfg.wavevector_k;
    return {k * v_c * k_signs[0], k * v_t * k_signs[1], k * v_t * k_signs[2] * cfg.target2_k_sign};
}

namespace detail {

// Lab-frame c1 block: <upper|H|lower> = (Omega/2) e^{+i t k v sigma}.
inline ComplexMatrix c1_lab(const GateChannelConfig& cfg, int omega_t_sign, const ToneRates& w, double t,
                            bool with_rr) {
    using F = basis::C1Full;
    const Eigen::Index off = with_rr ? 0 : 1;
    const Eigen::Index dim = F::dim - off;
    const double s = static_cast<double>(omega_t_sign);
    const cplx pc = std::polar(1.0, w.control * t);
    const cplx p0 = std::polar(1.0, w.target0 * t);
    const cplx p1 = std::polar(1.0, w.target1 * t);
    const cplx ac = 0.5 * cfg.omega_c;
    const cplx a0 = 0.5 * s * cfg.target_rabi(0);
    const cplx a1 = 0.5 * s * cfg.target_rabi(1);
    ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
    auto at = [off](Eigen::Index i) { return i - off; };
    if (with_rr) {
        h(F::srr, F::srr) = cfg.v_interaction;
        set_coupling(h, F::srr, F::s1r, ac * pc);
        set_coupling(h, F::srr, F::sr1, a1 * p1);
        set_coupling(h, F::srr, F::sr0, a0 * p0);
    }
    set_coupling(h, at(F::s1r), at(F::s11), a1 * p1);
    set_coupling(h, at(F::s1r), at(F::s10), a0 * p0);
    set_coupling(h, at(F::sr1), at(F::s11), ac * pc);
    set_coupling(h, at(F::sr0), at(F::s10), ac * pc);
    return h;
}

}  // namespace detail

// Full c1 block with |rr> at energy V and time-dependent Doppler tones. Basis {rr, 1r, r1, r0, 11, 10}.
inline ComplexMatrix build_hc1_full(const GateChannelConfig& cfg, int omega_t_sign, double v_c, double v_t, double t,
                                    const KSigns& channel_k_signs) {
    cfg.validate();
    if (cfg.blockaded()) throw std::invalid_argument("infinite blockade: use build_hc1_blockaded");
    if (!(t >= 0.0)) throw std::invalid_argument("time must be non-negative");
    PulseSegment{0.0, omega_t_sign, channel_k_signs, 0.0}.validate();
    return detail::c1_lab(cfg, omega_t_sign, tone_rates(cfg, channel_k_signs, v_c, v_t), t, true);
}

// Lab-frame Hamiltonians at absolute time t during a driven segment.
inline ComplexMatrix c0_lab_hamiltonian(const GateChannelConfig& cfg, const PulseSegment& seg, double v_c, double v_t,
                                        double t) {
    (void)v_c;
    const ToneRates w = tone_rates(cfg, seg.channel_k_signs, v_c, v_t);
    const double s = static_cast<double>(seg.omega_t_sign);
    return build_hc0(s * cfg.target_rabi(0), s * cfg.target_rabi(1), std::polar(1.0, w.target0 * t),
                     std::polar(1.0, w.target1 * t));
}

inline ComplexMatrix c1_lab_hamiltonian(const GateChannelConfig& cfg, const PulseSegment& seg, double v_c, double v_t,
                                        double t) {
    return detail::c1_lab(cfg, seg.omega_t_sign, tone_rates(cfg, seg.channel_k_signs, v_c, v_t), t, !cfg.blockaded());
}

// Symbolic eigenvectors of the blockaded c1 block for equal target amplitudes.
// Order: {+Omega_c/2, -Omega_c/2, +Omega_bar/2, -Omega_bar/2}; the zero mode is omitted.
struct C1Eigenbasis {
    std::array<double, 4> eigenvalues;
    std::array<ComplexVector, 4> vectors;
    double omega_bar;
};

inline C1Eigenbasis hc1_eigenbasis(double omega_c, double omega_t) {
    if (!(omega_c > 0.0) || omega_t == 0.0) throw std::invalid_argument("Rabi frequencies must be non-zero");
    using B = basis::C1Blockaded;
    const double ob = std::sqrt(omega_c * omega_c + 2.0 * omega_t * omega_t);
    C1Eigenbasis e{{0.5 * omega_c, -0.5 * omega_c, 0.5 * ob, -0.5 * ob}, {}, ob};
    for (int k = 0; k < 2; ++k) {
        const double pm = k == 0 ? 1.0 : -1.0;
        ComplexVector v = ComplexVector::Zero(B::dim);
        v(B::sr1) = 0.5;
        v(B::sr0) = -0.5;
        v(B::s11) = 0.5 * pm;
        v(B::s10) = -0.5 * pm;
        e.vectors[static_cast<std::size_t>(k)] = v;
    }
    for (int k = 0; k < 2; ++k) {
        const double pm = k == 0 ? 1.0 : -1.0;
        ComplexVector v = ComplexVector::Zero(B::dim);
        v(B::sr1) = omega_c;
        v(B::sr0) = omega_c;
        v(B::s11) = pm * ob;
        v(B::s10) = pm * ob;
        v(B::s1r) = 2.0 * omega_t;
        e.vectors[static_cast<std::size_t>(k + 2)] = v / (2.0 * ob);
    }
    return e;
}

// Slow-down demonstration: basis {11, 1r, r1}; control coupling toggled per interval.
inline ComplexMatrix build_two_state(double omega_c, double omega_t, bool control_on) {
    if (!(omega_t > 0.0) || !(omega_c >= 0.0)) throw std::invalid_argument("invalid two-state Rabi frequencies");
    using B = basis::TwoState;
    ComplexMatrix h = ComplexMatrix::Zero(B::dim, B::dim);
    detail::set_coupling(h, B::s1r, B::s11, 0.5 * omega_t);
    if (control_on) detail::set_coupling(h, B::sr1, B::s11, 0.5 * omega_c);
    return h;
}

}  // namespace tsd
