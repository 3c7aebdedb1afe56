#pragma once

#include "tsd/constants.hpp"
#include "tsd/types.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tsd {

namespace detail {

// Twice an angular-momentum quantum number; throws unless 2x is an integer.
inline int twice(double x, const char* what) {
    const double t = 2.0 * x;
    const double r = std::round(t);
    if (!std::isfinite(t) || std::abs(t - r) > 1e-9) throw std::invalid_argument(std::string(what) + " must be a multiple of 1/2");
    return static_cast<int>(r);
}

inline long double factorial(int n) {
    static const auto table = [] {
        std::array<long double, 171> f{};
        f[0] = 1.0L;
        for (std::size_t i = 1; i < f.size(); ++i) f[i] = f[i - 1] * static_cast<long double>(i);
        return f;
    }();
    if (n < 0 || n >= static_cast<int>(table.size())) throw std::out_of_range("factorial argument out of range");
    return table[static_cast<std::size_t>(n)];
}

}  // namespace detail

// <j1 m1; j2 m2 | j m>, Condon-Shortley phases, Racah's closed form.
// Malformed input (negative j, non-half-integer values, m of the wrong parity for its j) throws;
// a well-formed coefficient forbidden by a selection rule (|m| > j, m != m1 + m2, triangle) is 0.
inline double clebsch_gordan(double j1, double j2, double j, double m1, double m2, double m) {
    const int tj1 = detail::twice(j1, "j1"), tj2 = detail::twice(j2, "j2"), tj = detail::twice(j, "j");
    const int tm1 = detail::twice(m1, "m1"), tm2 = detail::twice(m2, "m2"), tm = detail::twice(m, "m");
    if (tj1 < 0 || tj2 < 0 || tj < 0) throw std::invalid_argument("angular momenta must be non-negative");
    if ((tj1 + tm1) % 2 != 0 || (tj2 + tm2) % 2 != 0 || (tj + tm) % 2 != 0)
        throw std::invalid_argument("projection does not match the integer/half-integer character of its j");
    if (std::abs(tm1) > tj1 || std::abs(tm2) > tj2 || std::abs(tm) > tj) return 0.0;
    if (tm1 + tm2 != tm) return 0.0;
    if (tj > tj1 + tj2 || tj < std::abs(tj1 - tj2) || (tj1 + tj2 + tj) % 2 != 0) return 0.0;

    // all arguments below are integers since the parities were checked
    const int a = (tj1 + tj2 - tj) / 2, b = (tj1 - tj2 + tj) / 2, c = (-tj1 + tj2 + tj) / 2;
    const int big = (tj1 + tj2 + tj) / 2 + 1;
    using detail::factorial;
    const long double pre = std::sqrt(static_cast<long double>(tj + 1) * factorial(a) * factorial(b) * factorial(c) /
                                      factorial(big)) *
                            std::sqrt(factorial((tj + tm) / 2) * factorial((tj - tm) / 2) * factorial((tj1 - tm1) / 2) *
                                      factorial((tj1 + tm1) / 2) * factorial((tj2 - tm2) / 2) * factorial((tj2 + tm2) / 2));
    const int k_min = std::max({0, (tj2 - tj - tm1) / 2, (tj1 - tj + tm2) / 2});
    const int k_max = std::min({a, (tj1 - tm1) / 2, (tj2 + tm2) / 2});
    long double sum = 0.0L;
    for (int k = k_min; k <= k_max; ++k) {
        const long double den = factorial(k) * factorial(a - k) * factorial((tj1 - tm1) / 2 - k) *
                                factorial((tj2 + tm2) / 2 - k) * factorial((tj - tj2 + tm1) / 2 + k) *
                                factorial((tj - tj1 - tm2) / 2 + k);
        sum += (k % 2 == 0 ? 1.0L : -1.0L) / den;
    }
    return static_cast<double>(pre * sum);
}

// One qubit state |F, m_F> of a ground level with electron spin j_e and nuclear spin I, coupled by a
// photon of helicity q from an intermediate level with angular momentum j_p.
struct QubitCouplingSpec {
    double j_intermediate = 0.5;
    double photon_q = 1.0;
    double j_electron = 0.5;
    double nuclear_spin = 3.5;
    double f = 4.0;
    double m_f = 4.0;
};

// Sum_{mJ, mI} ( Sum_{me} C^{jp,1,je}_{mJ,q,me} C^{je,I,F}_{me,mI,mF} )^2
inline double coupling_strength(const QubitCouplingSpec& s) {
    const int tjp = detail::twice(s.j_intermediate, "j_intermediate");
    const int tje = detail::twice(s.j_electron, "j_electron");
    const int ti = detail::twice(s.nuclear_spin, "nuclear_spin");
    double total = 0.0;
    for (int tmj = -tjp; tmj <= tjp; tmj += 2)
        for (int tmi = -ti; tmi <= ti; tmi += 2) {
            double inner = 0.0;
            for (int tme = -tje; tme <= tje; tme += 2)
                inner += clebsch_gordan(s.j_intermediate, 1.0, s.j_electron, tmj / 2.0, s.photon_q, tme / 2.0) *
                         clebsch_gordan(s.j_electron, s.nuclear_spin, s.f, tme / 2.0, tmi / 2.0, s.m_f);
            total += inner * inner;
        }
    return total;
}

// Squared coupling of |0> relative to |1>.
inline double c_factor_squared(const QubitCouplingSpec& state0, const QubitCouplingSpec& state1) {
    const double den = coupling_strength(state1);
    if (!(den > 0.0)) throw std::invalid_argument("state |1> does not couple to the intermediate manifold");
    return coupling_strength(state0) / den;
}

// Cs clock pair: |0> = |F=4, mF=4>, |1> = |F=3, mF=3>, sigma+ light from an S1/2-like manifold.
inline std::array<QubitCouplingSpec, 2> cesium_qubit_states() {
    return {QubitCouplingSpec{0.5, 1.0, 0.5, 3.5, 4.0, 4.0}, QubitCouplingSpec{0.5, 1.0, 0.5, 3.5, 3.0, 3.0}};
}

inline constexpr double cesium_hyperfine = two_pi * 9.192631770e9;   // rad/s
inline constexpr double rubidium_hyperfine = two_pi * 6.834682611e9;  // rad/s

// Detuning at which the resonant shifts of |0> and |1> coincide: C^2 = 1 + omega_q / Delta.
inline double solve_compensation(double omega_q, double c_factor_sq) {
    if (!(omega_q > 0.0)) throw std::invalid_argument("qubit splitting must be positive");
    if (!(c_factor_sq > 1.0)) throw NoSolution("C^2 <= 1: the off-resonant shift cannot be balanced");
    return omega_q / (c_factor_sq - 1.0);
}

// Reduced single-chain balance: Dbar (rho r^2 - 1) = c, Dbar = Delta * 1e-9 s, c in the same scaled units.
struct FieldRatioRelation {
    double polarizability_ratio = 16.3;    // |alpha2 / alpha1|
    double resonant_coefficient = 2.98e9;  // rad/s; 2.98 after the 1e-9 s scaling
};

inline double solve_field_ratio(double delta, const FieldRatioRelation& rel = {}) {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw std::invalid_argument("delta must be positive");
    if (!(rel.polarizability_ratio > 0.0)) throw NoSolution("polarizability ratio must be positive");
    const double radicand = (rel.resonant_coefficient / delta + 1.0) / rel.polarizability_ratio;
    if (!(radicand >= 0.0)) throw NoSolution("field-ratio relation has no real solution");
    return std::sqrt(radicand);
}

// Dbar (rho r^2 - 1) - c in the scaled units of the relation.
inline double field_ratio_residual(double delta, double ratio, const FieldRatioRelation& rel = {}) {
    return delta * 1e-9 * (rel.polarizability_ratio * ratio * ratio - 1.0) - rel.resonant_coefficient * 1e-9;
}

struct TwoPhotonDrive {
    double omega1 = 0.0, omega2 = 0.0;  // laser angular frequencies, rad/s
    double e1 = 0.0, e2 = 0.0;          // field amplitudes, V/m
    double delta = 0.0;                 // intermediate detuning, rad/s
    double rabi1 = 0.0, rabi2 = 0.0;    // rad/s
    double alpha1 = 0.0, alpha2 = 0.0;  // ground-state polarizabilities, C m^2 / V
    double omega_q = 0.0;
    double c_factor_sq = 1.0;

    void validate() const {
        if (delta == 0.0 || delta + omega_q == 0.0) throw std::invalid_argument("resonant denominators vanish");
        if (omega1 == 0.0 || omega2 == 0.0) throw std::invalid_argument("laser frequencies must be non-zero");
    }
};

struct StarkShifts {
    double delta_r = 0.0;
    double delta_q1 = 0.0;
    double delta_q0 = 0.0;
};

inline StarkShifts stark_shifts(const TwoPhotonDrive& d) {
    d.validate();
    const auto pc = physical_constants();
    const double e = pc.elementary_charge.value, me = pc.electron_mass.value, hbar = pc.hbar.value;
    const double ponderomotive =
        e * e / (4.0 * me * hbar) * (d.e1 * d.e1 / (d.omega1 * d.omega1) + d.e2 * d.e2 / (d.omega2 * d.omega2));
    const double polarizability = (d.alpha1 * d.e1 * d.e1 + d.alpha2 * d.e2 * d.e2) / (4.0 * hbar);
    return {d.rabi2 * d.rabi2 / (4.0 * d.delta) - ponderomotive,
            d.rabi1 * d.rabi1 / (4.0 * d.delta) - polarizability,
            d.c_factor_sq * d.rabi1 * d.rabi1 / (4.0 * (d.delta + d.omega_q)) - polarizability};
}

inline double effective_rabi(double rabi1, double rabi2, double delta) { return rabi1 * rabi2 / (2.0 * delta); }

// Target qubit driven by two chains: A addresses |1> at detuning delta_a, B addresses |0> at delta_b
// (so |1> sits delta_b - omega_q from B's intermediate level). Shifts are in units of |alpha1|/(4 hbar)
// with lower/upper intensities a = E1^2, b = E2^2. Unknowns (b_A, a_B, b_B) for fixed a_A:
//   F1 = c a_A/dA + c a_B/(dB - wq) + (a_A + a_B) - rho (b_A + b_B)          (|1> shift)
//   F0 = c C2 a_A/(dA + wq) + c C2 a_B/dB + (a_A + a_B) - rho (b_A + b_B)    (|0> shift)
//   F2 = a_A b_A - C2 a_B b_B (dA/dB)^2                                       (equal two-photon Rabi)
struct BalanceProblem {
    double omega_q = cesium_hyperfine;
    double c_factor_sq = 8.0;
    double delta_a = 0.0;
    double delta_b = 0.0;
    double intensity_a = 1.0;
    FieldRatioRelation relation{};

    // delta_a 20% above compensation, delta_b midway through the window (wq, wq C2/(C2-1)).
    static BalanceProblem defaults_for(double omega_q, double c_factor_sq) {
        BalanceProblem p;
        p.omega_q = omega_q;
        p.c_factor_sq = c_factor_sq;
        const double comp = solve_compensation(omega_q, c_factor_sq);
        p.delta_a = 1.2 * comp;
        p.delta_b = omega_q + 0.5 * comp;
        return p;
    }

    void validate() const {
        if (!(omega_q > 0.0) || !(c_factor_sq > 0.0) || !(intensity_a > 0.0)) throw std::invalid_argument("invalid balance problem");
        if (!(delta_a > 0.0) || !(delta_b > 0.0) || delta_b == omega_q) throw std::invalid_argument("invalid detunings");
    }
};

struct BalanceSolution {
    double b_a = 0.0, a_b = 0.0, b_b = 0.0;
    Eigen::Vector3d residuals = Eigen::Vector3d::Zero();
    int iterations = 0;
};

inline Eigen::Vector3d balance_residuals(const BalanceProblem& p, const Eigen::Vector3d& x) {
    const double c = p.relation.resonant_coefficient, rho = p.relation.polarizability_ratio, c2 = p.c_factor_sq;
    const double aa = p.intensity_a, ba = x(0), ab = x(1), bb = x(2);
    const double off = aa + ab - rho * (ba + bb);
    const double r = p.delta_a / p.delta_b;
    return {c * aa / p.delta_a + c * ab / (p.delta_b - p.omega_q) + off,
            c * c2 * aa / (p.delta_a + p.omega_q) + c * c2 * ab / p.delta_b + off, aa * ba - c2 * ab * bb * r * r};
}

inline Eigen::Matrix3d balance_jacobian(const BalanceProblem& p, const Eigen::Vector3d& x) {
    const double c = p.relation.resonant_coefficient, rho = p.relation.polarizability_ratio, c2 = p.c_factor_sq;
    const double r = p.delta_a / p.delta_b;
    Eigen::Matrix3d j;
    j << -rho, c / (p.delta_b - p.omega_q) + 1.0, -rho,
         -rho, c * c2 / p.delta_b + 1.0, -rho,
         p.intensity_a, -c2 * x(2) * r * r, -c2 * x(1) * r * r;
    return j;
}

// Damped Newton from the single-chain point (a_B = a_A, b_A = b_B = single-chain ratio^2 a_A).
inline BalanceSolution solve_target_balance(const BalanceProblem& p, int max_iterations = 100) {
    p.validate();
    const double ratio = solve_field_ratio(p.delta_a, p.relation);
    Eigen::Vector3d x(ratio * ratio * p.intensity_a, p.intensity_a, ratio * ratio * p.intensity_a);
    Eigen::Vector3d f = balance_residuals(p, x);
    for (int it = 1; it <= max_iterations; ++it) {
        const Eigen::Vector3d step = balance_jacobian(p, x).fullPivLu().solve(-f);
        double lambda = 1.0;
        Eigen::Vector3d trial = x + step;
        Eigen::Vector3d ft = balance_residuals(p, trial);
        while ((trial.minCoeff() <= 0.0 || ft.norm() >= f.norm()) && lambda > 1e-12) {
            lambda *= 0.5;
            trial = x + lambda * step;
            ft = balance_residuals(p, trial);
        }
        if (trial.minCoeff() <= 0.0 || !(ft.norm() <= f.norm()))
            throw NoSolution("target-qubit balance has no positive-intensity solution for these detunings");
        const double moved = (trial - x).cwiseAbs().cwiseQuotient(trial.cwiseAbs()).maxCoeff();
        x = trial;
        f = ft;
        if (moved < 1e-12 || f.cwiseAbs().maxCoeff() < 1e-14) return {x(0), x(1), x(2), f, it};
    }
    throw NoSolution("target-qubit balance did not converge");
}

}  // namespace tsd
