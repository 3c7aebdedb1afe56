// Compares Doppler-averaged errors of the two beam geometries over a temperature scan.
// Worker count follows TSD_WORKERS when set.

#include "tsd/tsd.hpp"

#include <cstdio>

int main() {
    using namespace tsd;
    const GateChannelConfig cfg = design_config(mhz_to_rad_per_s(3.5), mhz_to_rad_per_s(500.0));
    SequenceOptions case1, case2;
    case2.case_id = 2;
    const ErrorSurface s1 = doppler_error_surface(cfg, case1);
    const ErrorSurface s2 = doppler_error_surface(cfg, case2);

    std::printf("%8s  %12s  %12s  %12s  %12s\n", "T (uK)", "rot case1", "rot case2", "bell case1", "bell case2");
    for (double t_uk : {1.0, 2.0, 5.0, 10.0, 20.0, 50.0}) {
        const double t = t_uk * 1e-6;
        std::printf("%8g  %12.4e  %12.4e  %12.4e  %12.4e\n", t_uk, s1.average_rotation(t), s2.average_rotation(t),
                    s1.average_bell(t), s2.average_bell(t));
    }
    std::printf("reversal asymmetry max |E(v) - E(-v)| = %.3e\n", s1.reversal_asymmetry());
}
