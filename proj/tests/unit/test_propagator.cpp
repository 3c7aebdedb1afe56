#include "tsd/tsd.hpp"

#include <gtest/gtest.h>

using namespace tsd;

namespace {

const double oc = mhz_to_rad_per_s(3.5);
const GateChannelConfig finite_v = design_config(oc, mhz_to_rad_per_s(500.0));

double max_diff(const ComplexVector& a, const ComplexVector& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Constant, PreservesNormAndMatchesClosedForm) {
    const ComplexMatrix h = build_hc0(design_ratio * oc);
    const AtomState psi0 = AtomState::basis_state(basis::Kind::c0, basis::C0::s00);
    const AtomState psi = evolve_constant(h, 1.234e-7, psi0);
    EXPECT_NEAR(psi.amplitudes().norm(), 1.0, 1e-12);
    const ComplexVector viaExpm = expm_hermitian(h, 1.234e-7) * psi0.amplitudes();
    EXPECT_LE(max_diff(psi.amplitudes(), viaExpm), 1e-14);
}

TEST(Constant, RejectsNonHermitianAndNegativeTime) {
    ComplexMatrix h = build_hc0(1.0);
    const AtomState psi0 = AtomState::basis_state(basis::Kind::c0, 0);
    EXPECT_THROW(evolve_constant(h, -1.0, psi0), std::invalid_argument);
    h(0, 2) += cplx(0.0, 0.1);
    EXPECT_THROW(evolve_constant(h, 1.0, psi0), std::invalid_argument);
}

TEST(Timedep, ConstantHamiltonianAgreesWithSpectralRoute) {
    const ComplexMatrix h = build_hc1_blockaded(oc, design_ratio * oc);
    const AtomState psi0 = AtomState::basis_state(basis::Kind::c1_blockaded, basis::C1Blockaded::s10);
    const auto td = evolve_timedep([&](double) { return h; }, 0.0, 1.4e-7, psi0);
    EXPECT_LE(max_diff(td.state.amplitudes(), evolve_constant(h, 1.4e-7, psi0).amplitudes()), 1e-10);
}

TEST(Timedep, DirectIntegrationMatchesRotatingFrame) {
    SequenceOptions so;
    const auto seg = tsd_pulse_sequence(finite_v, so);
    for (Block block : {Block::c0, Block::c1}) {
        auto h = [&](double t) {
            return block == Block::c0 ? c0_lab_hamiltonian(finite_v, seg[0], 0.3, -0.2, t)
                                      : c1_lab_hamiltonian(finite_v, seg[0], 0.3, -0.2, t);
        };
        const ComplexMatrix direct = propagator_timedep(h, seg[0].start_time, seg[0].end_time(), TimedepOptions{1e-9});
        const ComplexMatrix exact = rotating_frame(finite_v, seg[0], 0.3, -0.2, block).propagator(seg[0].start_time,
                                                                                                seg[0].end_time());
        EXPECT_LE(max_abs(direct - exact), 1e-8);
    }
}

TEST(Timedep, SequenceRoutesAgreeOnRandomDraws) {
    const double draws[3][2] = {{0.3, -0.2}, {-0.41, 0.07}, {0.12, 0.45}};
    for (int c : {1, 2}) {
        SequenceOptions so;
        so.case_id = c;
        so.epsilon = 7e-9;
        for (const auto& d : draws) {
            const auto exact = sequence_propagators(finite_v, d[0], d[1], so);
            const auto direct = sequence_propagators_direct(finite_v, d[0], d[1], so, TimedepOptions{1e-9});
            EXPECT_LE(max_abs(exact.c1 - direct.c1), 1e-8);
            EXPECT_LE(max_abs(exact.c0 - direct.c0), 1e-8);
        }
    }
}

TEST(Timedep, NormDriftOverFullSequence) {
    SequenceOptions so;
    so.epsilon = 5e-9;
    const GateResult g = run_tsd_cnot(finite_v, 0.3, -0.2, so);
    for (const auto& rec : g.records) {
        EXPECT_LE(rec.max_norm_drift(), 1e-9);
        EXPECT_LE(unitarity_defect(rec.final_unitary), 1e-9);
    }
}

TEST(Timedep, TimeReversalReturnsInitialState) {
    const PulseSegment seg{1e-7, 1, {1, 1, 1}, 0.0, 0.0};
    const ComplexMatrix h = c1_lab_hamiltonian(finite_v, seg, 0.2, 0.1, 3e-8);
    const AtomState psi0 = AtomState::basis_state(basis::Kind::c1_full, basis::C1Full::s11);
    const AtomState back = evolve_constant(-h, 2e-7, evolve_constant(h, 2e-7, psi0));
    EXPECT_LE(max_diff(back.amplitudes(), psi0.amplitudes()), 1e-9);
}

TEST(Timedep, CompositionOfSubintervals) {
    const PulseSegment seg = tsd_pulse_sequence(finite_v, {})[0];
    auto h = [&](double t) { return c1_lab_hamiltonian(finite_v, seg, 0.3, -0.2, t); };
    const AtomState psi0 = AtomState::basis_state(basis::Kind::c1_full, basis::C1Full::s10);
    const TimedepOptions opt{1e-10};
    const double tp = seg.duration;
    const auto whole = evolve_timedep(h, 0.0, tp, psi0, opt);
    const auto half = evolve_timedep(h, 0.5 * tp, tp, evolve_timedep(h, 0.0, 0.5 * tp, psi0, opt).state, opt);
    EXPECT_LE(max_diff(whole.state.amplitudes(), half.state.amplitudes()), 1e-9);
}

TEST(Timedep, ConvergenceFailureCarriesLastDistance) {
    const PulseSegment seg = tsd_pulse_sequence(finite_v, {})[0];
    auto h = [&](double t) { return c1_lab_hamiltonian(finite_v, seg, 0.5, 0.5, t); };
    TimedepOptions opt{1e-15, 4, 16};
    try {
        propagator_timedep(h, 0.0, seg.duration, opt);
        FAIL() << "expected ConvergenceFailure";
    } catch (const ConvergenceFailure& e) {
        EXPECT_GT(e.last_distance(), 1e-15);
        EXPECT_GE(e.steps(), 16u);
    }
}

TEST(Timedep, HalvingStepMovesPopulationsBelowTolerance) {
    const PulseSegment seg = tsd_pulse_sequence(finite_v, {})[0];
    auto h = [&](double t) { return c1_lab_hamiltonian(finite_v, seg, 0.3, -0.2, t); };
    const AtomState psi0 = AtomState::basis_state(basis::Kind::c1_full, basis::C1Full::s11);
    const auto r = evolve_timedep(h, 0.0, seg.duration, psi0, TimedepOptions{1e-9});
    EXPECT_LT(r.last_distance, 1e-9);
    TimedepOptions finer{1e-9, r.steps * 2, r.steps * 8};
    const auto r2 = evolve_timedep(h, 0.0, seg.duration, psi0, finer);
    const Eigen::VectorXd dp = r.state.amplitudes().cwiseAbs2() - r2.state.amplitudes().cwiseAbs2();
    EXPECT_LE(dp.cwiseAbs().maxCoeff(), 1e-9);
}

TEST(RotatingFrame, GaugedHamiltonianIsHermitianAndTimeIndependent) {
    const PulseSegment seg = tsd_pulse_sequence(finite_v, {})[1];
    const ComplexMatrix h = rotating_frame_equivalent(finite_v, seg, 0.3, -0.2);
    EXPECT_LE(hermiticity_defect(h), 1e-12);
    const RotatingFrame rf = rotating_frame(finite_v, seg, 0.3, -0.2, Block::c1);
    EXPECT_LE(unitarity_defect(rf.propagator(seg.start_time, seg.end_time())), 1e-9);
}

TEST(FreeEvolution, OnlyDoublyExcitedStateAcquiresPhase) {
    const ComplexMatrix u = free_evolution(finite_v, Block::c1, 1e-8);
    EXPECT_NEAR(std::arg(u(basis::C1Full::srr, basis::C1Full::srr)), std::remainder(-finite_v.v_interaction * 1e-8, two_pi),
                1e-9);
    for (Eigen::Index i = 1; i < 6; ++i) EXPECT_EQ(u(i, i), cplx(1.0));
    EXPECT_LE(max_abs(free_evolution(finite_v, Block::c0, 1e-8) - ComplexMatrix::Identity(3, 3)), 0.0);
}

TEST(Record, CsvHasLabelledHeader) {
    PropagationRecord rec;
    rec.kind = basis::Kind::c0;
    rec.push(0.0, AtomState::basis_state(basis::Kind::c0, 0).amplitudes());
    std::ostringstream os;
    write_record_csv(os, rec);
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "time_s,P_00,P_01,P_0r");
}
