#pragma once

// The rate (Liouville) superoperator Gamma(t) of the dissipative two-level
// atom, d rho / dt = Gamma(t) rho. Two independent constructions are provided:
// the composite-algebra form and the literal Lindblad sandwich form.

#include "tlsdyn/schedule.hpp"
#include "tlsdyn/superalgebra.hpp"

namespace tlsdyn {

struct RateOperator {
    SuperOp superop;
    /// -(gamma/2)(2 nbar + 1), the multiple of the identity inside superop.
    complex scalar_part;
};

/// Gamma = -i w0 U0 + g n J+ + g (n+1) J- - (g/2) J0 - (g/2)(2n+1).
RateOperator build_rate_superop(const Params& p);
RateOperator build_rate_superop(const ParamSchedule& p, double t);

/// The master-equation right-hand side assembled from sigma_z commutator and
/// sigma_+- sandwich terms using left_rep/right_rep only.
SuperOp lindblad_superop_direct(const Params& p);
SuperOp lindblad_superop_direct(const ParamSchedule& p, double t);

}  // namespace tlsdyn
