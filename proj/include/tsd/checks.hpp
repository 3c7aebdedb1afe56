#pragma once

// Runtime invariant suite shared by the `check` subcommand and the acceptance run.

#include "tsd/csv.hpp"
#include "tsd/ensembles.hpp"
#include "tsd/hamiltonians.hpp"
#include "tsd/metrics.hpp"
#include "tsd/propagator.hpp"
#include "tsd/sequence.hpp"

#include <chrono>
#include <cstring>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace tsd {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct CheckOptions {
    std::size_t route_draws = 20;
    double route_tol = 1e-8;
    bool include_refinement = true;
    std::size_t workers = 0;
};

namespace detail {

inline std::string sci(double x) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << x;
    return os.str();
}

inline CheckResult timed(const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r{name, false, {}, 0.0};
    try {
        auto [ok, detail] = body();
        r.passed = ok;
        r.detail = std::move(detail);
    } catch (const std::exception& e) {
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

inline bool bitwise_equal(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() &&
           std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

}  // namespace detail

inline std::vector<CheckResult> run_invariant_suite(const CheckOptions& opt = {}) {
    std::vector<CheckResult> out;
    const double oc = mhz_to_rad_per_s(3.5);
    const GateChannelConfig finite = design_config(oc, mhz_to_rad_per_s(500.0));
    const GateChannelConfig blockaded = design_config(oc);
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> speed(-0.5, 0.5);

    out.push_back(detail::timed("hermiticity", [&] {
        double worst = 0.0;
        for (int n = 0; n < 50; ++n) {
            const double vc = speed(rng), vt = speed(rng), t = 1e-9 * (n + 1) * 3.7;
            const KSigns ks{n % 2 ? 1 : -1, 1, n % 3 ? 1 : -1};
            worst = std::max(worst, hermiticity_defect(build_hc1_full(finite, n % 2 ? 1 : -1, vc, vt, t, ks)));
            const PulseSegment seg{1e-7, n % 2 ? 1 : -1, ks, 0.0, 0.0};
            worst = std::max(worst, hermiticity_defect(c0_lab_hamiltonian(finite, seg, vc, vt, t)));
            worst = std::max(worst, hermiticity_defect(c1_lab_hamiltonian(blockaded, seg, vc, vt, t)));
            worst = std::max(worst, hermiticity_defect(rotating_frame_equivalent(finite, seg, vc, vt)));
        }
        return std::pair{worst <= 1e-12, "max |H - H^dag| = " + detail::sci(worst)};
    }));

    out.push_back(detail::timed("unitarity", [&] {
        double worst = 0.0;
        for (int n = 0; n < 50; ++n) {
            SequenceOptions so;
            so.case_id = 1 + n % 2;
            so.epsilon = n % 3 == 0 ? 9.7e-9 : 0.0;
            const auto p = sequence_propagators(n % 4 ? finite : blockaded, speed(rng), speed(rng), so);
            worst = std::max({worst, unitarity_defect(p.c0), unitarity_defect(p.c1)});
        }
        return std::pair{worst <= 1e-9, "max |U^dag U - I| = " + detail::sci(worst)};
    }));

    out.push_back(detail::timed("norm conservation", [&] {
        double worst = 0.0;
        SequenceOptions so;
        so.epsilon = 9.7e-9;
        const GateResult g = run_tsd_cnot(finite, 0.3, -0.2, so);
        for (const auto& rec : g.records) worst = std::max(worst, rec.max_norm_drift());
        const auto td = evolve_timedep([&](double t) { return c1_lab_hamiltonian(finite, tsd_pulse_sequence(finite, so)[0], 0.3, -0.2, t); },
                                       0.0, pi_pulse_time(finite), AtomState::basis_state(basis::Kind::c1_full, basis::C1Full::s10),
                                       TimedepOptions{1e-8});
        worst = std::max(worst, td.record.max_norm_drift());
        return std::pair{worst <= 1e-9, "max |sum P - 1| = " + detail::sci(worst)};
    }));

    out.push_back(detail::timed("time reversal", [&] {
        double worst = 0.0;
        for (int n = 0; n < 20; ++n) {
            const PulseSegment seg{1e-7, n % 2 ? 1 : -1, {1, 1, 1}, 0.0, 0.0};
            const ComplexMatrix h = c1_lab_hamiltonian(finite, seg, speed(rng), speed(rng), 5e-8);
            const AtomState psi0 = AtomState::basis_state(basis::Kind::c1_full, basis::C1Full::s10);
            const AtomState fwd = evolve_constant(h, 1.3e-7, psi0);
            const AtomState back = evolve_constant(-h, 1.3e-7, fwd);
            worst = std::max(worst, (back.amplitudes() - psi0.amplitudes()).cwiseAbs().maxCoeff());
        }
        return std::pair{worst <= 1e-9, "max |psi_back - psi0| = " + detail::sci(worst)};
    }));

    out.push_back(detail::timed("composition", [&] {
        const PulseSegment seg = tsd_pulse_sequence(finite, {})[0];
        auto h = [&](double t) { return c1_lab_hamiltonian(finite, seg, 0.3, -0.2, t); };
        const AtomState psi0 = AtomState::basis_state(basis::Kind::c1_full, basis::C1Full::s11);
        const double tp = seg.duration;
        const TimedepOptions to{1e-10};
        const auto whole = evolve_timedep(h, 0.0, tp, psi0, to);
        const auto first = evolve_timedep(h, 0.0, 0.5 * tp, psi0, to);
        const auto second = evolve_timedep(h, 0.5 * tp, tp, first.state, to);
        const double d = (whole.state.amplitudes() - second.state.amplitudes()).cwiseAbs().maxCoeff();
        const AtomState c0 = AtomState::basis_state(basis::Kind::c1_full, basis::C1Full::s11);
        const ComplexMatrix hc = h(0.0);
        const double dc = (evolve_constant(hc, tp, c0).amplitudes() -
                           evolve_constant(hc, 0.5 * tp, evolve_constant(hc, 0.5 * tp, c0)).amplitudes())
                              .cwiseAbs()
                              .maxCoeff();
        return std::pair{d <= 1e-9 && dc <= 1e-9, "time-dependent " + detail::sci(d) + ", constant " + detail::sci(dc)};
    }));

    out.push_back(detail::timed("route cross-validation", [&] {
        double worst = 0.0;
        std::uniform_real_distribution<double> v(-0.5, 0.5);
        for (std::size_t n = 0; n < opt.route_draws; ++n) {
            const double vc = n == 0 ? 0.3 : v(rng), vt = n == 0 ? -0.2 : v(rng);
            SequenceOptions so;
            so.case_id = 1 + static_cast<int>(n % 2);
            GateChannelConfig cfg = finite;
            cfg.target2_k_sign = n % 3 == 2 ? -1 : 1;
            const auto exact = sequence_propagators(cfg, vc, vt, so);
            const auto direct = sequence_propagators_direct(cfg, vc, vt, so, TimedepOptions{1e-9});
            worst = std::max({worst, max_abs(exact.c0 - direct.c0), max_abs(exact.c1 - direct.c1)});
        }
        return std::pair{worst <= opt.route_tol, std::to_string(opt.route_draws) + " draws, max amplitude difference " +
                                                     detail::sci(worst)};
    }));

    if (opt.include_refinement) {
        out.push_back(detail::timed("grid refinement", [&] {
            double worst = 0.0;
            for (int c : {1, 2}) {
                SequenceOptions so;
                so.case_id = c;
                const ErrorSurface coarse = doppler_error_surface(finite, so, {101, 0.5, opt.workers});
                const ErrorSurface fine = doppler_error_surface(finite, so, {201, 0.5, opt.workers});
                for (double t : {5e-6, 10e-6, 15e-6, 20e-6, 50e-6}) {
                    const double a = coarse.average_rotation(t), b = fine.average_rotation(t);
                    worst = std::max(worst, std::abs(b - a) / a);
                }
            }
            return std::pair{worst < 0.10, "max relative change 101 -> 201 points: " + detail::sci(worst)};
        }));
    }

    out.push_back(detail::timed("bitwise reproducibility", [&] {
        SequenceOptions so;
        const EnsembleOptions one{31, 0.5, 1}, many{31, 0.5, 4};
        const ErrorSurface a = doppler_error_surface(finite, so, one);
        const ErrorSurface b = doppler_error_surface(finite, so, one);
        const ErrorSurface c = doppler_error_surface(finite, so, many);
        const bool surfaces = detail::bitwise_equal(a.rotation, b.rotation) && detail::bitwise_equal(a.rotation, c.rotation) &&
                              detail::bitwise_equal(a.bell, c.bell);
        auto render = [](const ErrorSurface& s) {
            std::ostringstream os;
            csv::Writer w(os);
            for (double t : {5e-6, 50e-6}) w.row({t, s.average_rotation(t), s.average_bell(t)});
            return os.str();
        };
        const bool text = render(a) == render(c);
        return std::pair{surfaces && text, std::string("repeat and 1 vs 4 workers ") + (surfaces && text ? "identical" : "differ")};
    }));

    return out;
}

}  // namespace tsd
