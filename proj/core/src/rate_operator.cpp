#include "tlsdyn/rate_operator.hpp"

namespace tlsdyn {

RateOperator build_rate_superop(const Params& p) {
    static const CompositeAlgebra g = composite_generators();
    const double gamma = p.gamma;
    const double n = p.nbar;
    RateOperator r;
    r.scalar_part = -0.5 * gamma * (2.0 * n + 1.0);
    r.superop = complex(0.0, -p.omega0) * g.U0 + (gamma * n) * g.Jplus + (gamma * (n + 1.0)) * g.Jminus +
                (-0.5 * gamma) * g.J0 + r.scalar_part * SuperOp::identity();
    return r;
}

RateOperator build_rate_superop(const ParamSchedule& p, double t) { return build_rate_superop(p.at(t)); }

SuperOp lindblad_superop_direct(const Params& p) {
    const SuperOp lz = left_rep(Pauli::z);
    const SuperOp rz = right_rep(Pauli::z);
    const SuperOp lp = left_rep(Pauli::plus);
    const SuperOp lm = left_rep(Pauli::minus);
    const SuperOp rp = right_rep(Pauli::plus);
    const SuperOp rm = right_rep(Pauli::minus);

    // -(i/2) w0 [sigma_z, rho]
    SuperOp out = complex(0.0, -0.5 * p.omega0) * (lz - rz);
    // -(g/2)(n+1)(s+s- rho + rho s+s- - 2 s- rho s+)
    // Right multiplications compose in reverse order: rho s+ s- is rm * rp.
    out += (-0.5 * p.gamma * (p.nbar + 1.0)) * (lp * lm + rm * rp - 2.0 * (lm * rp));
    // -(g/2) n (s-s+ rho + rho s-s+ - 2 s+ rho s-)
    out += (-0.5 * p.gamma * p.nbar) * (lm * lp + rp * rm - 2.0 * (lp * rm));
    return out;
}

SuperOp lindblad_superop_direct(const ParamSchedule& p, double t) { return lindblad_superop_direct(p.at(t)); }

}  // namespace tlsdyn
