#pragma once

#include "tsd/constants.hpp"
#include "tsd/metrics.hpp"
#include "tsd/parallel.hpp"
#include "tsd/sequence.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace tsd {

// Equally spaced speeds with unnormalized Gaussian weights; only weight ratios matter.
struct VelocityGrid {
    std::vector<double> values;
    std::vector<double> weights;
    double temperature = 0.0;

    static std::vector<double> speeds(std::size_t points = 101, double v_max = 0.5) {
        if (points < 2) throw std::invalid_argument("velocity grid needs at least two points");
        if (!(v_max > 0.0)) throw std::invalid_argument("velocity range must be positive");
        std::vector<double> v(points);
        const double n = static_cast<double>(points - 1);
        for (std::size_t i = 0; i < points; ++i) v[i] = -v_max + 2.0 * v_max * static_cast<double>(i) / n;
        return v;
    }

    static VelocityGrid thermal(double temperature_kelvin, std::size_t points = 101, double v_max = 0.5) {
        VelocityGrid g;
        g.temperature = temperature_kelvin;
        g.values = speeds(points, v_max);
        const double sv = thermal_velocity_width(temperature_kelvin);
        g.weights.resize(points);
        for (std::size_t i = 0; i < points; ++i) {
            const double v = g.values[i];
            g.weights[i] = sv > 0.0 ? std::exp(-v * v / (2.0 * sv * sv)) : (v == 0.0 ? 1.0 : 0.0);
        }
        return g;
    }
};

// Multiplicative offsets n*sigma, n = -5..5, with Gaussian weights exp(-n^2/2).
struct AmplitudeGrid {
    double sigma = 0.0;
    std::array<double, 11> offsets{};
    std::array<double, 11> weights{};

    explicit AmplitudeGrid(double sigma_rel) : sigma(sigma_rel) {
        if (!(sigma_rel >= 0.0) || sigma_rel >= 0.2) throw std::invalid_argument("sigma must lie in [0, 0.2)");
        for (int n = -5; n <= 5; ++n) {
            offsets[static_cast<std::size_t>(n + 5)] = n * sigma_rel;
            weights[static_cast<std::size_t>(n + 5)] = std::exp(-0.5 * n * n);
        }
    }
};

struct EnsembleOptions {
    std::size_t grid_points = 101;
    double v_max = 0.5;
    std::size_t workers = 0;  // 0: auto
};

// Per-velocity-pair errors; row index v_c, column index v_t.
struct ErrorSurface {
    std::vector<double> speeds;
    Eigen::MatrixXd rotation;
    Eigen::MatrixXd bell;               // phase-corrected Bell infidelity
    Eigen::MatrixXd bell_phase_sensitive;

    // Sum(E w w) / Sum(w w), accumulated in ascending v_c then v_t.
    double average(const Eigen::MatrixXd& surface, const VelocityGrid& grid) const {
        if (grid.values.size() != speeds.size()) throw std::invalid_argument("grid does not match the surface");
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < speeds.size(); ++i)
            for (std::size_t j = 0; j < speeds.size(); ++j) {
                const double w = grid.weights[i] * grid.weights[j];
                num += surface(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * w;
                den += w;
            }
        if (!(den > 0.0)) throw std::invalid_argument("velocity weights vanish");
        return num / den;
    }

    double average_rotation(double temperature) const { return average(rotation, grid(temperature)); }
    double average_bell(double temperature) const { return average(bell, grid(temperature)); }

    VelocityGrid grid(double temperature) const {
        return VelocityGrid::thermal(temperature, speeds.size(), speeds.back());
    }

    // max |E(v_c, v_t) - E(-v_c, -v_t)|
    double reversal_asymmetry() const {
        const Eigen::Index n = rotation.rows();
        double d = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) d = std::max(d, std::abs(rotation(i, j) - rotation(n - 1 - i, n - 1 - j)));
        return d;
    }

    // The grid may be halved only when the reversal symmetry holds to 1e-10.
    bool reversal_symmetry_exploitable() const { return reversal_asymmetry() <= 1e-10; }
};

namespace detail {

[[noreturn]] inline void rethrow_at_point(double v_c, double v_t) {
    std::ostringstream where;
    where << "grid point (v_c=" << v_c << " m/s, v_t=" << v_t << " m/s): ";
    try {
        throw;
    } catch (const ConvergenceFailure& e) {
        throw ConvergenceFailure(where.str() + e.what(), e.last_distance(), e.steps());
    } catch (const std::exception& e) {
        throw std::runtime_error(where.str() + e.what());
    }
}

}  // namespace detail

// The c0 block depends on v_t only, so it is evaluated once per column.
inline ErrorSurface doppler_error_surface(const GateChannelConfig& cfg, const SequenceOptions& seq,
                                          const EnsembleOptions& eo = {}) {
    cfg.validate();
    seq.validate();
    require_design_ratio(cfg, seq);
    ErrorSurface s;
    s.speeds = VelocityGrid::speeds(eo.grid_points, eo.v_max);
    const std::size_t n = s.speeds.size();
    const Eigen::Index ni = static_cast<Eigen::Index>(n);
    const std::size_t workers = resolve_workers(eo.workers);
    const auto segments = tsd_pulse_sequence(cfg, seq);

    auto block_propagator = [&](Block block, double v_c, double v_t) {
        ComplexMatrix u;
        for (const PulseSegment& seg : segments) {
            const ComplexMatrix step = rotating_frame(cfg, seg, v_c, v_t, block).propagator(seg.start_time, seg.end_time());
            const ComplexMatrix gap = free_evolution(cfg, block, seg.gap_before);
            u = u.size() == 0 ? ComplexMatrix(step * gap) : ComplexMatrix(step * gap * u);
        }
        return u;
    };

    std::vector<ComplexMatrix> c0(n);
    parallel_for(n, workers, [&](std::size_t j) {
        try {
            c0[j] = block_propagator(Block::c0, 0.0, s.speeds[j]);
        } catch (...) {
            detail::rethrow_at_point(0.0, s.speeds[j]);
        }
    });

    s.rotation.resize(ni, ni);
    s.bell.resize(ni, ni);
    s.bell_phase_sensitive.resize(ni, ni);
    const ComplexMatrix ideal = ideal_cnot();
    const bool blockaded = cfg.blockaded();
    const Eigen::Index i10 = basis::c1_index(blockaded, basis::C1Full::s10);
    const Eigen::Index i11 = basis::c1_index(blockaded, basis::C1Full::s11);
    parallel_for(n * n, workers, [&](std::size_t k) {
        const std::size_t i = k / n, j = k % n;
        try {
            BlockPropagators p{c0[j], block_propagator(Block::c1, s.speeds[i], s.speeds[j])};
            const Eigen::Index r = static_cast<Eigen::Index>(i), c = static_cast<Eigen::Index>(j);
            s.rotation(r, c) = rotation_error(assemble_gate(p), ideal);
            const double h = 1.0 / std::sqrt(2.0);
            Eigen::Vector4cd bell(h * p.c0(basis::C0::s00, basis::C0::s00), h * p.c0(basis::C0::s01, basis::C0::s00),
                                  h * p.c1(i10, i10), h * p.c1(i11, i10));
            s.bell(r, c) = bell_error_phase_corrected(bell);
            s.bell_phase_sensitive(r, c) = bell_error(bell);
        } catch (...) {
            detail::rethrow_at_point(s.speeds[i], s.speeds[j]);
        }
    });
    return s;
}

inline double doppler_averaged_rotation_error(const GateChannelConfig& cfg, double temperature,
                                              const SequenceOptions& seq = {}, const EnsembleOptions& eo = {}) {
    if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be positive");
    return doppler_error_surface(cfg, seq, eo).average_rotation(temperature);
}

inline double doppler_averaged_bell_error(const GateChannelConfig& cfg, double temperature,
                                          const SequenceOptions& seq = {}, const EnsembleOptions& eo = {}) {
    if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be positive");
    return doppler_error_surface(cfg, seq, eo).average_bell(temperature);
}

struct InteractionRow {
    double v_interaction;
    double temperature;
    double rotation_error;
};

// Cartesian product, V outer and temperature inner; one surface per V.
inline std::vector<InteractionRow> interaction_sweep(GateChannelConfig cfg, const std::vector<double>& v_list,
                                                     const std::vector<double>& t_list, const SequenceOptions& seq = {},
                                                     const EnsembleOptions& eo = {}) {
    std::vector<InteractionRow> rows;
    for (double v : v_list) {
        if (!std::isfinite(v)) throw std::invalid_argument("interaction sweep needs finite V values");
        cfg.v_interaction = v;
        const ErrorSurface s = doppler_error_surface(cfg, seq, eo);
        for (double t : t_list) {
            if (!(t > 0.0)) throw std::invalid_argument("temperature must be positive");
            rows.push_back({v, t, s.average_rotation(t)});
        }
    }
    return rows;
}

// Gaussian average of the rotation error over 121 target Rabi-amplitude pairs at v = 0.
inline double amplitude_fluctuation_error(const GateChannelConfig& cfg, double sigma, const SequenceOptions& seq = {}) {
    const AmplitudeGrid g(sigma);
    double num = 0.0, den = 0.0;
    for (std::size_t a = 0; a < g.offsets.size(); ++a)
        for (std::size_t b = 0; b < g.offsets.size(); ++b) {
            GateChannelConfig c = cfg;
            c.target_scale = {cfg.target_scale[0] * (1.0 + g.offsets[a]), cfg.target_scale[1] * (1.0 + g.offsets[b])};
            const double w = g.weights[a] * g.weights[b];
            num += rotation_error(realized_gate(c, 0.0, 0.0, seq)) * w;
            den += w;
        }
    return num / den;
}

// Sum over the four inputs of the time-integrated Rydberg population at v = 0, seconds.
inline double decay_integral(const GateChannelConfig& cfg, SequenceOptions seq = {}) {
    if (seq.samples_per_pulse == 0) seq.samples_per_pulse = 512;
    const GateResult r = run_tsd_cnot(cfg, 0.0, 0.0, seq);
    double sum = 0.0;
    for (double x : r.rydberg_time_integrals) sum += x;
    return sum;
}

// Perturbative decay estimate (1/4 tau) Sum int P_Rydberg dt; no damping acts during propagation.
inline double decay_error(const GateChannelConfig& cfg, double tau, const SequenceOptions& seq = {}) {
    if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
    return decay_integral(cfg, seq) / (4.0 * tau);
}

// E_decay * tau / t_g with t_g = 2 pi / Omega_c.
inline double decay_coefficient(const GateChannelConfig& cfg, const SequenceOptions& seq = {}) {
    return decay_integral(cfg, seq) / (4.0 * two_pi / cfg.omega_c);
}

}  // namespace tsd
