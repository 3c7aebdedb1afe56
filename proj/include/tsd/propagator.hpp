#pragma once

#include "tsd/basis.hpp"
#include "tsd/hamiltonians.hpp"
#include "tsd/types.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <iomanip>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace tsd {

inline void require_hermitian(const ComplexMatrix& h) {
    const double scale = std::max(1.0, max_abs(h));
    if (hermiticity_defect(h) > 1e-12 * scale) throw std::invalid_argument("Hamiltonian is not Hermitian");
}

// exp(-i t h) for Hermitian h, via one eigendecomposition reused across times.
class SpectralPropagator {
public:
    explicit SpectralPropagator(const ComplexMatrix& h) : solver_(h) {
        if (solver_.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
    }

    ComplexMatrix at(double t) const {
        const auto& q = solver_.eigenvectors();
        const Eigen::VectorXcd phases = (cplx(0.0, -t) * solver_.eigenvalues().cast<cplx>()).array().exp();
        return q * phases.asDiagonal() * q.adjoint();
    }

    ComplexVector apply(double t, const ComplexVector& psi) const {
        const auto& q = solver_.eigenvectors();
        const Eigen::VectorXcd phases = (cplx(0.0, -t) * solver_.eigenvalues().cast<cplx>()).array().exp();
        return q * (phases.asDiagonal() * (q.adjoint() * psi));
    }

    const Eigen::VectorXd& eigenvalues() const { return solver_.eigenvalues(); }

private:
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver_;
};

inline ComplexMatrix expm_hermitian(const ComplexMatrix& h, double t) {
    require_hermitian(h);
    return SpectralPropagator(h).at(t);
}

inline AtomState evolve_constant(const ComplexMatrix& h, double t, const AtomState& psi0) {
    if (!(t >= 0.0)) throw std::invalid_argument("evolution time must be non-negative");
    if (h.rows() != psi0.dim()) throw std::invalid_argument("Hamiltonian and state dimensions differ");
    require_hermitian(h);
    if (t == 0.0) return psi0;
    return AtomState::evolved(psi0.kind(), SpectralPropagator(h).apply(t, psi0.amplitudes()));
}

// Population samples: row i holds |<n|psi(times[i])>|^2.
struct PropagationRecord {
    basis::Kind kind = basis::Kind::computational;
    std::vector<double> times;
    std::vector<Eigen::VectorXd> populations;
    ComplexMatrix final_unitary;

    void push(double t, const ComplexVector& psi) {
        times.push_back(t);
        populations.push_back(psi.cwiseAbs2());
    }

    // Appends a later record, dropping a duplicated junction sample.
    void append(const PropagationRecord& later) {
        std::size_t first = 0;
        if (!times.empty() && !later.times.empty() && later.times.front() == times.back()) first = 1;
        for (std::size_t i = first; i < later.times.size(); ++i) {
            times.push_back(later.times[i]);
            populations.push_back(later.populations[i]);
        }
    }

    // Trapezoidal integral of the summed populations of the given states.
    double time_integral(std::span<const Eigen::Index> states) const {
        double acc = 0.0;
        for (std::size_t i = 1; i < times.size(); ++i) {
            double a = 0.0, b = 0.0;
            for (Eigen::Index s : states) {
                a += populations[i - 1](s);
                b += populations[i](s);
            }
            acc += 0.5 * (a + b) * (times[i] - times[i - 1]);
        }
        return acc;
    }

    double max_norm_drift() const {
        double d = 0.0;
        for (const auto& p : populations) d = std::max(d, std::abs(p.sum() - 1.0));
        return d;
    }
};

inline void write_record_csv(std::ostream& os, const PropagationRecord& rec) {
    os << "time_s";
    for (auto label : basis::labels(rec.kind)) os << ",P_" << label;
    os << '\n' << std::setprecision(17);
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
        os << rec.times[i];
        for (Eigen::Index s = 0; s < rec.populations[i].size(); ++s) os << ',' << rec.populations[i](s);
        os << '\n';
    }
}

template <class F>
concept HamiltonianSource = std::invocable<const F&, double> &&
                            std::convertible_to<std::invoke_result_t<const F&, double>, ComplexMatrix>;

struct TimedepOptions {
    double tol = 1e-10;
    std::size_t initial_steps = 64;
    std::size_t max_steps = std::size_t{1} << 20;
    bool record = true;
};

struct TimedepResult {
    AtomState state;
    PropagationRecord record;
    std::size_t steps = 0;
    double last_distance = 0.0;
};

namespace detail {

struct MidpointPass {
    ComplexMatrix unitary;
    PropagationRecord record;
};

template <HamiltonianSource F>
MidpointPass midpoint_pass(const F& h_of_t, double t0, double t1, std::size_t steps, const ComplexVector* psi0,
                           basis::Kind kind, bool record) {
    const double dt = (t1 - t0) / static_cast<double>(steps);
    MidpointPass pass;
    pass.record.kind = kind;
    ComplexMatrix u;
    for (std::size_t n = 0; n < steps; ++n) {
        const double tm = t0 + (static_cast<double>(n) + 0.5) * dt;
        const ComplexMatrix h = h_of_t(tm);
        if (n == 0) {
            u = ComplexMatrix::Identity(h.rows(), h.cols());
            if (record && psi0) pass.record.push(t0, *psi0);
        }
        u = SpectralPropagator(h).at(dt) * u;
        if (record && psi0) pass.record.push(t0 + static_cast<double>(n + 1) * dt, u * *psi0);
    }
    pass.unitary = std::move(u);
    pass.record.final_unitary = pass.unitary;
    return pass;
}

template <HamiltonianSource F>
TimedepResult timedep_core(const F& h_of_t, double t0, double t1, const ComplexVector* psi0, basis::Kind kind,
                           const TimedepOptions& opt) {
    if (!(t1 >= t0)) throw std::invalid_argument("t1 must not precede t0");
    if (!(opt.tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    if (opt.initial_steps == 0 || opt.initial_steps > opt.max_steps)
        throw std::invalid_argument("invalid step limits");
    const Eigen::Index dim = h_of_t(t0).rows();
    if (t1 == t0) {
        TimedepResult r{psi0 ? AtomState::evolved(kind, *psi0)
                             : AtomState::basis_state(kind, 0),
                        {}, 0, 0.0};
        r.record.kind = kind;
        r.record.final_unitary = ComplexMatrix::Identity(dim, dim);
        if (opt.record && psi0) r.record.push(t0, *psi0);
        return r;
    }
    auto observed = [&](const ComplexMatrix& u) -> ComplexMatrix {
        return psi0 ? ComplexMatrix(u * *psi0) : u;
    };
    std::size_t steps = opt.initial_steps;
    MidpointPass prev = midpoint_pass(h_of_t, t0, t1, steps, psi0, kind, opt.record);
    double distance = std::numeric_limits<double>::infinity();
    while (steps * 2 <= opt.max_steps) {
        steps *= 2;
        MidpointPass next = midpoint_pass(h_of_t, t0, t1, steps, psi0, kind, opt.record);
        distance = max_abs(observed(next.unitary) - observed(prev.unitary));
        prev = std::move(next);
        if (distance < opt.tol) {
            TimedepResult r{psi0 ? AtomState::evolved(kind, prev.unitary * *psi0) : AtomState::basis_state(kind, 0),
                            std::move(prev.record), steps, distance};
            return r;
        }
    }
    throw ConvergenceFailure("time-dependent propagation did not converge within " + std::to_string(opt.max_steps) +
                                 " steps (last distance " + std::to_string(distance) + ")",
                             distance, steps);
}

}  // namespace detail

// Fixed-step midpoint exponentials with step doubling until the final state moves by < tol (max-norm).
template <HamiltonianSource F>
TimedepResult evolve_timedep(const F& h_of_t, double t0, double t1, const AtomState& psi0,
                             const TimedepOptions& opt = {}) {
    return detail::timedep_core(h_of_t, t0, t1, &psi0.amplitudes(), psi0.kind(), opt);
}

// Same scheme applied to the identity; convergence judged on the whole propagator.
template <HamiltonianSource F>
ComplexMatrix propagator_timedep(const F& h_of_t, double t0, double t1, TimedepOptions opt = {}) {
    opt.record = false;
    const basis::Kind dummy = basis::Kind::computational;
    return detail::timedep_core(h_of_t, t0, t1, nullptr, dummy, opt).record.final_unitary;
}

enum class Block { c0, c1 };

// Constant Hamiltonian h + diag(theta) of the co-rotating frame psi = D(t) phi, D = diag(e^{i theta t}).
// c1 rates (full order rr,1r,r1,r0,11,10): (wc+w0, w0, wc+w0-w1, wc, w0-w1, 0); c0 (00,01,0r): (0, w1-w0, -w0).
struct RotatingFrame {
    ComplexMatrix hamiltonian;
    Eigen::VectorXd rates;

    ComplexVector gauge(double t) const {
        return (cplx(0.0, t) * rates.cast<cplx>()).array().exp().matrix();
    }

    // Lab-frame propagator from t_start to t_end.
    ComplexMatrix propagator(double t_start, double t_end) const {
        const ComplexMatrix core = SpectralPropagator(hamiltonian).at(t_end - t_start);
        return gauge(t_end).asDiagonal() * core * gauge(t_start).conjugate().asDiagonal();
    }
};

inline Eigen::VectorXd gauge_rates(const GateChannelConfig& cfg, const PulseSegment& seg, double v_c, double v_t,
                                   Block block) {
    const ToneRates w = tone_rates(cfg, seg.channel_k_signs, v_c, v_t);
    if (block == Block::c0) {
        Eigen::VectorXd r(basis::C0::dim);
        r << 0.0, w.target1 - w.target0, -w.target0;
        return r;
    }
    Eigen::VectorXd full(basis::C1Full::dim);
    full << w.control + w.target0, w.target0, w.control + w.target0 - w.target1, w.control, w.target0 - w.target1, 0.0;
    if (!cfg.blockaded()) return full;
    return full.tail(basis::C1Blockaded::dim).eval();
}

inline RotatingFrame rotating_frame(const GateChannelConfig& cfg, const PulseSegment& seg, double v_c, double v_t,
                                    Block block) {
    cfg.validate();
    seg.validate();
    PulseSegment at_origin = seg;
    ComplexMatrix h0 = block == Block::c0 ? c0_lab_hamiltonian(cfg, at_origin, v_c, v_t, 0.0)
                                          : c1_lab_hamiltonian(cfg, at_origin, v_c, v_t, 0.0);
    Eigen::VectorXd rates = gauge_rates(cfg, seg, v_c, v_t, block);
    h0.diagonal() += rates.cast<cplx>();
    return {std::move(h0), std::move(rates)};
}

inline ComplexMatrix rotating_frame_equivalent(const GateChannelConfig& cfg, const PulseSegment& seg, double v_c,
                                               double v_t, Block block = Block::c1) {
    return rotating_frame(cfg, seg, v_c, v_t, block).hamiltonian;
}

// Drives off: only the |rr> energy acts.
inline ComplexMatrix free_evolution(const GateChannelConfig& cfg, Block block, double duration) {
    if (block == Block::c0) return ComplexMatrix::Identity(basis::C0::dim, basis::C0::dim);
    if (cfg.blockaded()) return ComplexMatrix::Identity(basis::C1Blockaded::dim, basis::C1Blockaded::dim);
    ComplexMatrix u = ComplexMatrix::Identity(basis::C1Full::dim, basis::C1Full::dim);
    u(basis::C1Full::srr, basis::C1Full::srr) = std::polar(1.0, -cfg.v_interaction * duration);
    return u;
}

}  // namespace tsd
