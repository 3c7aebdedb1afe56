#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tsd {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

// Interaction energy sentinel: drops |rr> from the model.
inline constexpr double INFINITE_BLOCKADE = std::numeric_limits<double>::infinity();

// Effective two-photon wavevector of the 420.3 nm + 1012.7 nm ladder, rad/m.
inline constexpr double two_photon_wavevector = two_pi * (1.0 / 420.3e-9 - 1.0 / 1012.7e-9);

inline constexpr double mhz_to_rad_per_s(double mhz) { return two_pi * mhz * 1e6; }
inline constexpr double rad_per_s_to_mhz(double w) { return w / (two_pi * 1e6); }

// Adaptive stepping exhausted its budget.
class ConvergenceFailure : public std::runtime_error {
public:
    ConvergenceFailure(const std::string& what, double last_distance, std::size_t steps)
        : std::runtime_error(what), last_distance_(last_distance), steps_(steps) {}
    double last_distance() const noexcept { return last_distance_; }
    std::size_t steps() const noexcept { return steps_; }

private:
    double last_distance_;
    std::size_t steps_;
};

// A requested compensation or balance condition has no physical solution.
class NoSolution : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Channel order used by every k-sign triple and Rabi-scale pair.
enum class Channel : int { control = 0, target0 = 1, target1 = 2 };

using KSigns = std::array<int, 3>;

// How pulse 2 reverses beam directions in the case-2 sequence.
enum class Case2Flip { target_only, all_channels };

struct GateChannelConfig {
    double omega_c = mhz_to_rad_per_s(3.5);
    double omega_t = std::sqrt(1.5) * mhz_to_rad_per_s(3.5);
    double v_interaction = INFINITE_BLOCKADE;
    double wavevector_k = two_photon_wavevector;
    int target2_k_sign = +1;
    // multiplicative Rabi scale on the target |0>-r and |1>-r channels
    std::array<double, 2> target_scale{1.0, 1.0};

    bool blockaded() const noexcept { return std::isinf(v_interaction); }
    double target_rabi(int which) const { return omega_t * target_scale.at(static_cast<std::size_t>(which)); }

    void validate() const {
        if (!(omega_c > 0.0) || !std::isfinite(omega_c))
            throw std::invalid_argument("omega_c must be positive and finite");
        if (!(omega_t > 0.0) || !std::isfinite(omega_t))
            throw std::invalid_argument("omega_t must be positive and finite");
        if (std::isnan(v_interaction) || v_interaction == -INFINITE_BLOCKADE)
            throw std::invalid_argument("v_interaction must be a number or INFINITE_BLOCKADE");
        if (!std::isfinite(wavevector_k))
            throw std::invalid_argument("wavevector_k must be finite");
        if (target2_k_sign != 1 && target2_k_sign != -1)
            throw std::invalid_argument("target2_k_sign must be +1 or -1");
        for (double s : target_scale)
            if (!(s > 0.0) || !std::isfinite(s))
                throw std::invalid_argument("target channel scales must be positive");
    }
};

struct PulseSegment {
    double duration = 0.0;
    int omega_t_sign = +1;
    KSigns channel_k_signs{1, 1, 1};
    double gap_before = 0.0;
    // Absolute drive-on time; Doppler tones are referenced to t = 0, not to the segment start.
    double start_time = 0.0;

    double end_time() const noexcept { return start_time + duration; }

    void validate() const {
        if (!(duration >= 0.0) || !(gap_before >= 0.0) || !(start_time >= 0.0))
            throw std::invalid_argument("segment duration and gap must be non-negative");
        if (omega_t_sign != 1 && omega_t_sign != -1)
            throw std::invalid_argument("omega_t_sign must be +1 or -1");
        for (int s : channel_k_signs)
            if (s != 1 && s != -1) throw std::invalid_argument("channel k-signs must be +1 or -1");
    }
};

inline double max_abs(const ComplexMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double hermiticity_defect(const ComplexMatrix& h) {
    if (h.rows() != h.cols()) throw std::invalid_argument("matrix is not square");
    return max_abs(h - h.adjoint());
}

inline double unitarity_defect(const ComplexMatrix& u) {
    if (u.rows() != u.cols()) throw std::invalid_argument("matrix is not square");
    return max_abs(u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols()));
}

}  // namespace tsd
