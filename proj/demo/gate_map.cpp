// Prints the realized gate for an atom pair at rest and in motion, in the computational and barred bases.

#include "tsd/tsd.hpp"

#include <iomanip>
#include <iostream>

namespace {

void print(const char* title, const tsd::ComplexMatrix& u) {
    std::cout << title << '\n' << std::fixed << std::setprecision(4);
    for (Eigen::Index r = 0; r < u.rows(); ++r) {
        for (Eigen::Index c = 0; c < u.cols(); ++c)
            std::cout << std::setw(9) << u(r, c).real() << std::showpos << u(r, c).imag() << std::noshowpos << "i ";
        std::cout << '\n';
    }
    std::cout << std::defaultfloat;
}

}  // namespace

int main() {
    using namespace tsd;
    const GateChannelConfig cfg = design_config(mhz_to_rad_per_s(3.5), mhz_to_rad_per_s(500.0));

    const ComplexMatrix at_rest = realized_gate(cfg, 0.0, 0.0);
    print("at rest", at_rest);
    print("at rest, barred basis", to_barred_basis(at_rest));
    std::cout << "rotation error " << rotation_error(at_rest) << "\n\n";

    const ComplexMatrix moving = realized_gate(cfg, 0.2, -0.1);
    print("v_c = 0.2 m/s, v_t = -0.1 m/s", moving);
    std::cout << "rotation error " << rotation_error(moving) << '\n';
}
