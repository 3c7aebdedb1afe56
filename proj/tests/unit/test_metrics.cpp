#include "tsd/tsd.hpp"

#include <gtest/gtest.h>

using namespace tsd;

namespace {

Eigen::Vector4cd bell_like(cplx a00, cplx a11) { return Eigen::Vector4cd(a00, 0.0, 0.0, a11); }

}  // namespace

TEST(RotationError, PerfectGateAndGlobalPhase) {
    EXPECT_NEAR(rotation_error(ideal_cnot()), 0.0, 1e-15);
    for (double phi : {0.3, 1.9, -2.7}) EXPECT_NEAR(rotation_error(std::polar(1.0, phi) * ideal_cnot()), 0.0, 1e-15);
}

TEST(RotationError, OneWrongSign) {
    Eigen::Vector4cd d(1.0, 1.0, 1.0, -1.0);
    EXPECT_NEAR(rotation_error(ComplexMatrix(d.asDiagonal()) * ideal_cnot()), 0.6, 1e-15);
}

TEST(RotationError, LeakageAndRange) {
    ComplexMatrix u = ideal_cnot();
    u.col(3) *= std::sqrt(0.9);
    const double e = rotation_error(u);
    EXPECT_GT(e, 0.0);
    EXPECT_LE(e, 1.0);
    EXPECT_NEAR(rotation_error(ComplexMatrix::Zero(4, 4)), 1.0, 0.0);
    EXPECT_THROW(rotation_error(ComplexMatrix::Identity(3, 3)), std::invalid_argument);
}

TEST(BellError, Examples) {
    const double s = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(bell_error(bell_like(s, s)), 0.0, 1e-15);
    EXPECT_NEAR(bell_error(bell_like(s, -s)), 1.0, 1e-15);
    Eigen::Vector4cd in(s, 0.0, s, 0.0);
    EXPECT_NEAR(bell_error(Eigen::Vector4cd(ideal_cnot() * in)), 0.0, 1e-12);
}

TEST(BellError, RelativePhaseSensitivityAndGlobalPhaseInvariance) {
    const double s = 1.0 / std::sqrt(2.0);
    for (double th : {0.0, 0.4, 1.3, 3.0}) {
        EXPECT_NEAR(bell_error(bell_like(s, s * std::polar(1.0, th))), (1.0 - std::cos(th)) / 2.0, 1e-14);
        EXPECT_NEAR(bell_error(std::polar(1.0, 0.77) * bell_like(s, s * std::polar(1.0, th))),
                    (1.0 - std::cos(th)) / 2.0, 1e-14);
        EXPECT_NEAR(bell_error_phase_corrected(bell_like(s, s * std::polar(1.0, th))), 0.0, 1e-14);
    }
}

TEST(BellError, AtomStateOverloads) {
    const double s = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(bell_error(AtomState(basis::Kind::computational, Eigen::Vector4cd(s, 0, 0, s))), 0.0, 1e-15);
    EXPECT_THROW(bell_error(AtomState::basis_state(basis::Kind::c0, 0)), std::invalid_argument);
    EXPECT_THROW(bell_error(Eigen::Vector3cd(1, 0, 0)), std::invalid_argument);
}

TEST(TruthTable, Examples) {
    EXPECT_NEAR(truth_table_error(ideal_cnot()), 0.0, 1e-15);
    EXPECT_NEAR(truth_table_error(ComplexMatrix::Identity(4, 4)), 1.0, 1e-15);
    ComplexMatrix u = ideal_cnot();
    u(3, 2) = std::sqrt(1.0 - 1e-6);
    u(2, 2) = 1e-3;
    EXPECT_NEAR(truth_table_error(u), 1e-6, 1e-12);
}

TEST(FigureOfMerit, Examples) {
    EXPECT_NEAR(figure_of_merit(7.0, 0.3e-6), 2.3e7, 0.05e7);
    EXPECT_NEAR(figure_of_merit(60.0, 27.4e-6), 2.2e6, 0.05e6);
    EXPECT_DOUBLE_EQ(figure_of_merit(3.0, 3.0), 1.0);
    EXPECT_THROW(figure_of_merit(0.0, 1.0), std::invalid_argument);
}

TEST(GateDuration, Examples) {
    EXPECT_NEAR(gate_duration(mhz_to_rad_per_s(4.6)) * 1e6, 0.27, 0.005);
    EXPECT_NEAR(gate_duration(mhz_to_rad_per_s(3.5)) * 1e6, 0.35, 0.005);
    EXPECT_NEAR(gate_duration(2.0e7), 0.5 * gate_duration(1.0e7), 1e-20);
}
