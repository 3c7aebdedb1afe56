#pragma once

#include "tsd/basis.hpp"
#include "tsd/hamiltonians.hpp"
#include "tsd/metrics.hpp"
#include "tsd/propagator.hpp"
#include "tsd/types.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace tsd {

inline constexpr double design_ratio = 1.2247448713915890491;  // sqrt(6)/2

inline GateChannelConfig design_config(double omega_c, double v_interaction = INFINITE_BLOCKADE) {
    GateChannelConfig cfg;
    cfg.omega_c = omega_c;
    cfg.omega_t = design_ratio * omega_c;
    cfg.v_interaction = v_interaction;
    return cfg;
}

struct SequenceOptions {
    int case_id = 1;
    double epsilon = 0.0;
    Case2Flip case2_flip = Case2Flip::target_only;
    bool allow_ratio_override = false;
    // population samples per pulse in GateResult records; 0 disables records
    std::size_t samples_per_pulse = 512;

    void validate() const {
        if (case_id != 1 && case_id != 2) throw std::invalid_argument("case_id must be 1 or 2");
        if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("epsilon must be >= 0");
    }
};

inline void require_design_ratio(const GateChannelConfig& cfg, const SequenceOptions& opt) {
    if (opt.allow_ratio_override) return;
    if (std::abs(cfg.omega_t / cfg.omega_c - design_ratio) > 1e-9 * design_ratio)
        throw std::invalid_argument("omega_t/omega_c differs from sqrt(6)/2; set the ratio override to allow it");
}

inline double pi_pulse_time(const GateChannelConfig& cfg) { return pi / cfg.omega_c; }

// Pulse 1 at +Omega_t, gap epsilon, pulse 2 at -Omega_t. Case 2 reverses beams in pulse 2.
inline std::vector<PulseSegment> tsd_pulse_sequence(const GateChannelConfig& cfg, const SequenceOptions& opt) {
    opt.validate();
    const double tp = pi_pulse_time(cfg);
    KSigns second{1, 1, 1};
    if (opt.case_id == 2) second = opt.case2_flip == Case2Flip::target_only ? KSigns{1, -1, -1} : KSigns{-1, -1, -1};
    return {PulseSegment{tp, +1, {1, 1, 1}, 0.0, 0.0}, PulseSegment{tp, -1, second, opt.epsilon, tp + opt.epsilon}};
}

struct BlockPropagators {
    ComplexMatrix c0;
    ComplexMatrix c1;
};

// Exact route: each segment is a constant Hamiltonian in its co-rotating frame.
inline BlockPropagators sequence_propagators(const GateChannelConfig& cfg, double v_c, double v_t,
                                             const SequenceOptions& opt) {
    cfg.validate();
    require_design_ratio(cfg, opt);
    BlockPropagators out;
    for (Block block : {Block::c0, Block::c1}) {
        ComplexMatrix u;
        for (const PulseSegment& seg : tsd_pulse_sequence(cfg, opt)) {
            const ComplexMatrix step = rotating_frame(cfg, seg, v_c, v_t, block).propagator(seg.start_time, seg.end_time());
            const ComplexMatrix gap = free_evolution(cfg, block, seg.gap_before);
            u = u.size() == 0 ? ComplexMatrix(step * gap) : ComplexMatrix(step * gap * u);
        }
        (block == Block::c0 ? out.c0 : out.c1) = std::move(u);
    }
    return out;
}

// Independent route: midpoint-sampled exponentials of the lab-frame Hamiltonians.
inline BlockPropagators sequence_propagators_direct(const GateChannelConfig& cfg, double v_c, double v_t,
                                                    const SequenceOptions& opt, const TimedepOptions& topt = {}) {
    cfg.validate();
    require_design_ratio(cfg, opt);
    BlockPropagators out;
    for (Block block : {Block::c0, Block::c1}) {
        ComplexMatrix u;
        for (const PulseSegment& seg : tsd_pulse_sequence(cfg, opt)) {
            auto h = [&](double t) {
                return block == Block::c0 ? c0_lab_hamiltonian(cfg, seg, v_c, v_t, t)
                                          : c1_lab_hamiltonian(cfg, seg, v_c, v_t, t);
            };
            const ComplexMatrix step = propagator_timedep(h, seg.start_time, seg.end_time(), topt);
            const ComplexMatrix gap = free_evolution(cfg, block, seg.gap_before);
            u = u.size() == 0 ? ComplexMatrix(step * gap) : ComplexMatrix(step * gap * u);
        }
        (block == Block::c0 ? out.c0 : out.c1) = std::move(u);
    }
    return out;
}

// Projects the block propagators onto {00, 01, 10, 11}; leaked amplitude is dropped.
inline ComplexMatrix assemble_gate(const BlockPropagators& p) {
    using C = basis::Computational;
    const bool blockaded = p.c1.rows() == basis::C1Blockaded::dim;
    const Eigen::Index i10 = basis::c1_index(blockaded, basis::C1Full::s10);
    const Eigen::Index i11 = basis::c1_index(blockaded, basis::C1Full::s11);
    ComplexMatrix u = ComplexMatrix::Zero(C::dim, C::dim);
    u(C::s00, C::s00) = p.c0(basis::C0::s00, basis::C0::s00);
    u(C::s00, C::s01) = p.c0(basis::C0::s00, basis::C0::s01);
    u(C::s01, C::s00) = p.c0(basis::C0::s01, basis::C0::s00);
    u(C::s01, C::s01) = p.c0(basis::C0::s01, basis::C0::s01);
    u(C::s10, C::s10) = p.c1(i10, i10);
    u(C::s10, C::s11) = p.c1(i10, i11);
    u(C::s11, C::s10) = p.c1(i11, i10);
    u(C::s11, C::s11) = p.c1(i11, i11);
    return u;
}

inline ComplexMatrix realized_gate(const GateChannelConfig& cfg, double v_c, double v_t,
                                   const SequenceOptions& opt = {}) {
    return assemble_gate(sequence_propagators(cfg, v_c, v_t, opt));
}

struct GateResult {
    ComplexMatrix u_realized;
    std::array<PropagationRecord, 4> records;
    // per input, in computational order: integral of the Rydberg populations entering the decay estimate
    std::array<double, 4> rydberg_time_integrals{};
    double gate_time = 0.0;
};

// Rydberg states weighted in the decay estimate: |0r> for c0 inputs, |1r>,|r1>,|r0> for c1 inputs.
inline std::vector<Eigen::Index> decay_states(Block block, bool blockaded) {
    if (block == Block::c0) return {basis::C0::s0r};
    return {basis::c1_index(blockaded, basis::C1Full::s1r), basis::c1_index(blockaded, basis::C1Full::sr1),
            basis::c1_index(blockaded, basis::C1Full::sr0)};
}

namespace detail {

inline PropagationRecord sampled_block_record(const GateChannelConfig& cfg, double v_c, double v_t,
                                              const SequenceOptions& opt, Block block, Eigen::Index input) {
    const bool blockaded = cfg.blockaded();
    const basis::Kind kind = block == Block::c0 ? basis::Kind::c0 : basis::c1_kind(blockaded);
    ComplexVector psi = AtomState::basis_state(kind, input).amplitudes();
    PropagationRecord rec;
    rec.kind = kind;
    ComplexMatrix total = ComplexMatrix::Identity(psi.size(), psi.size());
    double t = 0.0;
    rec.push(t, psi);
    const std::size_t n = std::max<std::size_t>(opt.samples_per_pulse, 1);
    for (const PulseSegment& seg : tsd_pulse_sequence(cfg, opt)) {
        if (seg.gap_before > 0.0) {
            const ComplexMatrix gap = free_evolution(cfg, block, seg.gap_before);
            psi = gap * psi;
            total = gap * total;
            rec.push(seg.start_time, psi);
        }
        const RotatingFrame frame = rotating_frame(cfg, seg, v_c, v_t, block);
        const SpectralPropagator sp(frame.hamiltonian);
        const ComplexVector phi0 = frame.gauge(seg.start_time).conjugate().asDiagonal() * psi;
        for (std::size_t j = 1; j <= n; ++j) {
            const double tj = seg.start_time + seg.duration * static_cast<double>(j) / static_cast<double>(n);
            rec.push(tj, frame.gauge(tj).asDiagonal() * sp.apply(tj - seg.start_time, phi0));
        }
        total = frame.propagator(seg.start_time, seg.end_time()) * total;
        psi = frame.gauge(seg.end_time()).asDiagonal() * sp.apply(seg.duration, phi0);
    }
    rec.final_unitary = std::move(total);
    return rec;
}

}  // namespace detail

inline GateResult run_tsd_cnot(const GateChannelConfig& cfg, double v_c, double v_t, const SequenceOptions& opt = {}) {
    GateResult r;
    r.u_realized = realized_gate(cfg, v_c, v_t, opt);
    const auto segs = tsd_pulse_sequence(cfg, opt);
    r.gate_time = segs.back().end_time();
    if (opt.samples_per_pulse == 0) return r;
    const bool blockaded = cfg.blockaded();
    const std::array<std::pair<Block, Eigen::Index>, 4> inputs{{
        {Block::c0, basis::C0::s00},
        {Block::c0, basis::C0::s01},
        {Block::c1, basis::c1_index(blockaded, basis::C1Full::s10)},
        {Block::c1, basis::c1_index(blockaded, basis::C1Full::s11)},
    }};
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const auto [block, idx] = inputs[i];
        r.records[i] = detail::sampled_block_record(cfg, v_c, v_t, opt, block, idx);
        const auto states = decay_states(block, blockaded);
        r.rydberg_time_integrals[i] = r.records[i].time_integral(states);
    }
    return r;
}

struct SpinEchoResidual {
    double input_10 = 0.0;
    double input_11 = 0.0;
    double max() const { return std::max(input_10, input_11); }
};

// || e^{-i t_pi H(Oc, Ot)} psi - e^{-i t_pi H(Oc, -Ot)} psi || for psi = |10>, |11>, blockaded model.
inline SpinEchoResidual spin_echo_key_relation_check(const GateChannelConfig& cfg) {
    cfg.validate();
    using B = basis::C1Blockaded;
    const double tp = pi_pulse_time(cfg);
    const ComplexMatrix up = expm_hermitian(build_hc1_blockaded(cfg.omega_c, cfg.omega_t), tp);
    const ComplexMatrix down = expm_hermitian(build_hc1_blockaded(cfg.omega_c, -cfg.omega_t), tp);
    const ComplexMatrix diff = up - down;
    return {diff.col(B::s10).norm(), diff.col(B::s11).norm()};
}

struct BellOutcome {
    AtomState joint;              // union basis: c0 block then c1 block
    Eigen::Vector4cd computational;  // projection onto {00, 01, 10, 11}
};

// Evolves (|00> + |10>)/sqrt(2) coherently through both blocks.
inline BellOutcome prepare_bell(const GateChannelConfig& cfg, double v_c, double v_t, const SequenceOptions& opt = {}) {
    const BlockPropagators p = sequence_propagators(cfg, v_c, v_t, opt);
    const bool blockaded = cfg.blockaded();
    const Eigen::Index n0 = p.c0.rows(), n1 = p.c1.rows();
    const double s = 1.0 / std::sqrt(2.0);
    const Eigen::Index i10 = basis::c1_index(blockaded, basis::C1Full::s10);
    const Eigen::Index i11 = basis::c1_index(blockaded, basis::C1Full::s11);
    ComplexVector joint(n0 + n1);
    joint.head(n0) = s * p.c0.col(basis::C0::s00);
    joint.tail(n1) = s * p.c1.col(i10);
    Eigen::Vector4cd comp;
    comp << joint(basis::C0::s00), joint(basis::C0::s01), joint(n0 + i10), joint(n0 + i11);
    return {AtomState::evolved(blockaded ? basis::Kind::bell_blockaded : basis::Kind::bell_full, std::move(joint)),
            comp};
}

struct TwoStateReport {
    double revival_overlap = 0.0;       // |<psi(t0)|psi(t0 + t1)>|
    double ground_revival_defect = 0.0;  // | P11(t0 + t1) - P11(t0) |
    double population_1r_at_t1 = 0.0;
    double final_population_1r = 0.0;   // at 2 t1
    PropagationRecord record;
};

// Omega_c/Omega_t giving Omega_bar t1 = 2 pi n.
inline double revival_alpha(int n) {
    if (n < 1) throw std::invalid_argument("revival index must be >= 1");
    return std::sqrt(4.0 * n * n - 1.0);
}

// Target drive on [0, 2 t1), control drive on [t0, t0 + t1), t1 = pi/Omega_t. Time in units of 1/Omega_t.
inline TwoStateReport two_state_tsd_demo(double alpha, double t0_fraction = 0.5, std::size_t samples = 400) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be >= 0");
    if (!(t0_fraction >= 0.0 && t0_fraction < 1.0)) throw std::invalid_argument("t0 fraction must lie in [0, 1)");
    using B = basis::TwoState;
    const double omega_t = 1.0;
    const double t1 = pi / omega_t;
    const double t0 = t0_fraction * t1;
    const ComplexMatrix h_off = build_two_state(alpha * omega_t, omega_t, false);
    const ComplexMatrix h_on = build_two_state(alpha * omega_t, omega_t, true);
    struct Interval {
        double begin, end;
        const ComplexMatrix* h;
    };
    const std::array<Interval, 3> plan{{{0.0, t0, &h_off}, {t0, t0 + t1, &h_on}, {t0 + t1, 2.0 * t1, &h_off}}};

    TwoStateReport rep;
    rep.record.kind = basis::Kind::two_state;
    ComplexVector psi = AtomState::basis_state(basis::Kind::two_state, B::s11).amplitudes();
    ComplexVector at_t0 = psi, at_end_of_control = psi;
    ComplexMatrix total = ComplexMatrix::Identity(B::dim, B::dim);
    rep.record.push(0.0, psi);
    const double dt_sample = 2.0 * t1 / static_cast<double>(std::max<std::size_t>(samples, 1));
    for (const Interval& iv : plan) {
        const SpectralPropagator sp(*iv.h);
        const ComplexVector start = psi;
        for (double t = iv.begin + dt_sample; t < iv.end; t += dt_sample) rep.record.push(t, sp.apply(t - iv.begin, start));
        if (t1 >= iv.begin && t1 <= iv.end) rep.population_1r_at_t1 = std::norm(sp.apply(t1 - iv.begin, start)(B::s1r));
        psi = sp.apply(iv.end - iv.begin, start);
        total = sp.at(iv.end - iv.begin) * total;
        rep.record.push(iv.end, psi);
        if (iv.end == t0) at_t0 = psi;
        if (iv.end == t0 + t1) at_end_of_control = psi;
    }
    rep.record.final_unitary = total;
    rep.revival_overlap = std::abs(at_t0.dot(at_end_of_control));
    rep.ground_revival_defect = std::abs(std::norm(at_end_of_control(B::s11)) - std::norm(at_t0(B::s11)));
    rep.final_population_1r = std::norm(psi(B::s1r));
    return rep;
}

// W = I (x) R, R columns |0bar> = (|0>-|1>)/sqrt2, |1bar> = (|0>+|1>)/sqrt2.
inline ComplexMatrix barred_basis_transform() {
    const double s = 1.0 / std::sqrt(2.0);
    Eigen::Matrix2cd r;
    r << s, s, -s, s;
    ComplexMatrix w = ComplexMatrix::Zero(4, 4);
    w.block(0, 0, 2, 2) = r;
    w.block(2, 2, 2, 2) = r;
    return w;
}

inline double rotated_basis_identity_check(double third_diagonal = -1.0) {
    Eigen::Vector4cd d(1.0, 1.0, third_diagonal, 1.0);
    const ComplexMatrix w = barred_basis_transform();
    return max_abs(w * d.asDiagonal() * w.adjoint() - ideal_cnot());
}

// Realized gate expressed in the barred target basis.
inline ComplexMatrix to_barred_basis(const ComplexMatrix& u) {
    const ComplexMatrix w = barred_basis_transform();
    return w.adjoint() * u * w;
}

}  // namespace tsd
