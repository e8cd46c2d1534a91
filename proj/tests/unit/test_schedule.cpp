#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "support.hpp"
#include "tlsdyn/errors.hpp"
#include "tlsdyn/schedule.hpp"

using namespace tlsdyn;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("thermal occupation") {
    CHECK(thermal_occupation(1.0, 0.0) == 0.0);
    CHECK_THAT(thermal_occupation(std::log(2.0), 1.0), WithinRel(1.0, 1e-14));
    CHECK_THAT(thermal_occupation(std::log(1.5), 1.0), WithinRel(2.0, 1e-13));
    CHECK_THROWS_AS(thermal_occupation(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(thermal_occupation(-1.0, 1.0), DomainError);
    CHECK_THROWS_AS(thermal_occupation(1.0, -0.1), DomainError);
    // High temperature: n ~ T / w0 - 1/2.
    CHECK_THAT(thermal_occupation(1.0, 1e4), WithinRel(1e4 - 0.5, 1e-8));
}

TEST_CASE("gamma from couplings") {
    const double w = 0.2;
    const std::vector<double> g1{1.0}, f1{3.0};
    CHECK_THAT(gamma_from_couplings(g1, f1, 3.0, w), WithinRel(2.0 * std::numbers::pi / (w * std::sqrt(2.0 * std::numbers::pi)), 1e-14));
    CHECK(gamma_from_couplings({}, {}, 3.0, w) == 0.0);

    // Two modes placed symmetrically about w0 give twice one off-resonant mode.
    const std::vector<double> g2{0.7, 0.7}, f2{3.0 - 0.15, 3.0 + 0.15};
    const std::vector<double> g_one{0.7}, f_one{3.0 - 0.15};
    const double d = 0.15 / w;
    const double direct = 2.0 * std::numbers::pi * 2.0 * 0.49 * std::exp(-0.5 * d * d) / (w * std::sqrt(2.0 * std::numbers::pi));
    CHECK_THAT(gamma_from_couplings(g2, f2, 3.0, w), WithinRel(2.0 * gamma_from_couplings(g_one, f_one, 3.0, w), 1e-14));
    CHECK_THAT(gamma_from_couplings(g2, f2, 3.0, w), WithinRel(direct, 1e-13));

    const std::vector<double> bad{1.0, 2.0};
    CHECK_THROWS_AS(gamma_from_couplings(bad, f1, 3.0, w), ValidationError);
    CHECK_THROWS_AS(gamma_from_couplings(g1, f1, 3.0, 0.0), ValidationError);
}

TEST_CASE("table schedule") {
    const Schedule s(TableLinear{{0.0, 1.0, 3.0}, {2.0, 4.0, 0.0}});
    CHECK(s(0.0) == 2.0);
    CHECK(s(1.0) == 4.0);
    CHECK(s(3.0) == 0.0);
    CHECK(s(0.5) == 3.0);
    CHECK(s(2.0) == 2.0);
    CHECK_THROWS_AS(s(3.5), DomainError);
    CHECK_THROWS_AS(s(-0.5), DomainError);
    CHECK(s.covers(0.0, 3.0));
    CHECK_FALSE(s.covers(0.0, 3.1));
    CHECK(s.breakpoints(0.0, 3.0) == std::vector<double>{1.0});
    const auto [lo, hi] = s.range(0.0, 3.0);
    CHECK(lo == 0.0);
    CHECK(hi == 4.0);

    // Continuity at nodes.
    for (double node : {1.0}) {
        CHECK_THAT(s(node - 1e-9), WithinAbs(s(node), 1e-8));
        CHECK_THAT(s(node + 1e-9), WithinAbs(s(node), 1e-8));
    }

    CHECK_THROWS_AS(Schedule(TableLinear{{0.0, 0.0}, {1.0, 2.0}}), ValidationError);
    CHECK_THROWS_AS(Schedule(TableLinear{{0.0, 1.0}, {1.0}}), ValidationError);
    CHECK_THROWS_AS(Schedule(TableLinear{{}, {}}), ValidationError);
    CHECK_THROWS_AS(Schedule(Constant{NAN}), ValidationError);
}

TEST_CASE("exponential approach") {
    const Schedule s(ExponentialApproach{2.0, 0.5, 3.0});
    CHECK(s(0.0) == 2.0);
    CHECK_THAT(s(1.0), WithinRel(0.5 + 1.5 * std::exp(-3.0), 1e-15));
    CHECK_THAT(s(100.0), WithinRel(0.5, 1e-15));
    CHECK(std::isinf(s.domain_end()));
    CHECK_THROWS_AS(s(-1.0), DomainError);
    CHECK_THROWS_AS(Schedule(ExponentialApproach{1.0, 0.0, -1.0}), ValidationError);
}

TEST_CASE("param schedule") {
    const auto c = ParamSchedule::constant(1.0, 0.5, 2.0);
    const Params p = c.at(7.0);
    CHECK(p.gamma == 1.0);
    CHECK(p.nbar == 0.5);
    CHECK(p.omega0 == 2.0);
    CHECK(c.is_constant());
    CHECK_NOTHROW(c.validate(1e6));

    const auto temp = ParamSchedule::with_temperature(Schedule::constant(1.0), Schedule(ExponentialApproach{0.0, 1.0, 1.0}),
                                                      Schedule::constant(std::log(2.0)));
    CHECK(temp.at(0.0).nbar == 0.0);
    CHECK_THAT(temp.at(50.0).nbar, WithinRel(1.0, 1e-12));
    CHECK_THAT(temp.at(1.0).nbar, WithinRel(1.0 / std::expm1(std::log(2.0) / (1.0 - std::exp(-1.0))), 1e-14));
    CHECK_FALSE(temp.is_constant());

    const auto neg = ParamSchedule::with_nbar(Schedule(TableLinear{{0.0, 2.0}, {1.0, -1.0}}), Schedule::constant(0.0),
                                              Schedule::constant(1.0));
    CHECK_NOTHROW(neg.validate(0.5));
    CHECK_THROWS_AS(neg.validate(2.0), ValidationError);
    CHECK_THROWS_AS(neg.validate(3.0), DomainError);

    const auto cold = ParamSchedule::with_temperature(Schedule::constant(1.0), Schedule::constant(1.0), Schedule::constant(0.0));
    CHECK_THROWS_AS(cold.validate(1.0), ValidationError);

    const auto kinks = ParamSchedule::with_nbar(Schedule(TableLinear{{0.0, 1.0, 2.0}, {1, 2, 3}}),
                                                Schedule(TableLinear{{0.0, 0.5, 1.0, 2.0}, {0, 1, 0, 0}}), Schedule::constant(1.0));
    CHECK(kinks.breakpoints(0.0, 2.0) == std::vector<double>{0.5, 1.0});
    CHECK(kinks == kinks);
    CHECK_FALSE(kinks == c);
}
