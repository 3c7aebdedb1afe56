#pragma once

// Fixed basis orderings. Every other header indexes states through these.

#include "tsd/types.hpp"

#include <array>
#include <span>
#include <stdexcept>
#include <string_view>

namespace tsd::basis {

enum class Kind { c0, c1_blockaded, c1_full, computational, two_state, bell_blockaded, bell_full };

struct C0 {
    static constexpr Eigen::Index dim = 3;
    static constexpr Eigen::Index s00 = 0, s01 = 1, s0r = 2;
    static constexpr std::array<std::string_view, 3> labels{"00", "01", "0r"};
};

struct C1Blockaded {
    static constexpr Eigen::Index dim = 5;
    static constexpr Eigen::Index s1r = 0, sr1 = 1, sr0 = 2, s11 = 3, s10 = 4;
    static constexpr std::array<std::string_view, 5> labels{"1r", "r1", "r0", "11", "10"};
};

struct C1Full {
    static constexpr Eigen::Index dim = 6;
    static constexpr Eigen::Index srr = 0, s1r = 1, sr1 = 2, sr0 = 3, s11 = 4, s10 = 5;
    static constexpr std::array<std::string_view, 6> labels{"rr", "1r", "r1", "r0", "11", "10"};
};

struct Computational {
    static constexpr Eigen::Index dim = 4;
    static constexpr Eigen::Index s00 = 0, s01 = 1, s10 = 2, s11 = 3;
    static constexpr std::array<std::string_view, 4> labels{"00", "01", "10", "11"};
};

// Target-only model of the slow-down demonstration.
struct TwoState {
    static constexpr Eigen::Index dim = 3;
    static constexpr Eigen::Index s11 = 0, s1r = 1, sr1 = 2;
    static constexpr std::array<std::string_view, 3> labels{"11", "1r", "r1"};
};

// Bell preparation evolves the c0 block followed by the c1 block in one vector.
struct BellBlockaded {
    static constexpr Eigen::Index dim = C0::dim + C1Blockaded::dim;
    static constexpr Eigen::Index c1_offset = C0::dim;
    static constexpr std::array<std::string_view, 8> labels{"00", "01", "0r", "1r", "r1", "r0", "11", "10"};
};

struct BellFull {
    static constexpr Eigen::Index dim = C0::dim + C1Full::dim;
    static constexpr Eigen::Index c1_offset = C0::dim;
    static constexpr std::array<std::string_view, 9> labels{"00", "01", "0r", "rr", "1r", "r1", "r0", "11", "10"};
};

inline std::span<const std::string_view> labels(Kind k) {
    switch (k) {
        case Kind::c0: return C0::labels;
        case Kind::c1_blockaded: return C1Blockaded::labels;
        case Kind::c1_full: return C1Full::labels;
        case Kind::computational: return Computational::labels;
        case Kind::two_state: return TwoState::labels;
        case Kind::bell_blockaded: return BellBlockaded::labels;
        case Kind::bell_full: return BellFull::labels;
    }
    throw std::invalid_argument("unknown basis kind");
}

inline Eigen::Index dimension(Kind k) { return static_cast<Eigen::Index>(labels(k).size()); }

inline Kind c1_kind(bool blockaded) { return blockaded ? Kind::c1_blockaded : Kind::c1_full; }

// Position of a c1 state label in the 5- or 6-dim ordering.
inline Eigen::Index c1_index(bool blockaded, Eigen::Index full_index) {
    if (!blockaded) return full_index;
    if (full_index == C1Full::srr) throw std::invalid_argument("|rr> is absent from the blockaded basis");
    return full_index - 1;
}

}  // namespace tsd::basis

namespace tsd {

// Normalized state tagged with its basis.
class AtomState {
public:
    AtomState(basis::Kind kind, ComplexVector amplitudes) : kind_(kind), amps_(std::move(amplitudes)) {
        if (amps_.size() != basis::dimension(kind_))
            throw std::invalid_argument("amplitude count does not match basis dimension");
        if (std::abs(amps_.norm() - 1.0) > 1e-12) throw std::invalid_argument("state is not normalized");
    }

    static AtomState basis_state(basis::Kind kind, Eigen::Index index) {
        ComplexVector v = ComplexVector::Zero(basis::dimension(kind));
        if (index < 0 || index >= v.size()) throw std::out_of_range("basis index out of range");
        v(index) = 1.0;
        return AtomState(kind, std::move(v));
    }

    basis::Kind kind() const noexcept { return kind_; }
    const ComplexVector& amplitudes() const noexcept { return amps_; }
    Eigen::Index dim() const noexcept { return amps_.size(); }
    cplx operator[](Eigen::Index i) const { return amps_(i); }
    double population(Eigen::Index i) const { return std::norm(amps_(i)); }

    // Skips the normalization check; for results of unitary evolution.
    static AtomState evolved(basis::Kind kind, ComplexVector amplitudes) {
        AtomState s(kind);
        s.amps_ = std::move(amplitudes);
        return s;
    }

private:
    explicit AtomState(basis::Kind kind) : kind_(kind) {}
    basis::Kind kind_;
    ComplexVector amps_;
};

}  // namespace tsd
