#pragma once

#include "steercert/errors.hpp"

namespace steercert {

/// Steering scenario dimensions: one trusted party (Alice, Hilbert dimension
/// dimA) and two untrusted parties with outB/outC outcomes per setting and
/// setB/setC settings.
struct Scenario {
    int dimA = 2;
    int outB = 2;
    int outC = 2;
    int setB = 2;
    int setC = 2;

    void validate() const {
        if (dimA < 1 || outB < 1 || outC < 1 || setB < 1 || setC < 1)
            throw InvalidInput("Scenario: all dimensions must be >= 1");
    }

    bool operator==(const Scenario&) const = default;
};

/// The paper's example scenario: qubit Alice, two binary settings per party.
inline Scenario qubit_222_scenario() { return Scenario{2, 2, 2, 2, 2}; }

} // namespace steercert
