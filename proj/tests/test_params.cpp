#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "noisecool/io.hpp"
#include "noisecool/params.hpp"

using namespace noisecool;

namespace {

constexpr double two_pi = 2.0 * M_PI;

SystemParams canonical_params() {
    SystemParams p;
    p.omega_m = two_pi * 9.22e6;
    p.gamma = two_pi * 120.0;
    p.kappa = two_pi * 1.06e6;
    p.g0 = two_pi * 39.0;
    p.n_th = 24.0;
    p.probe_cooperativity = 2.2;
    return p;
}

bool has_code(const std::vector<Violation>& v, ViolationCode code) {
    return std::any_of(v.begin(), v.end(),
                       [&](const Violation& x) { return x.code == code; });
}

} // namespace

TEST_SUITE_BEGIN("params");

TEST_CASE("thermal occupancy at the canonical operating point") {
    double n = thermal_occupancy(10.6e-3, two_pi * 9.22e6);
    CHECK(n == doctest::Approx(23.4588).epsilon(1e-4)); // quoted device value ~24
}

TEST_CASE("thermal occupancy analytic identity at x = ln 2") {
    // hbar w / kB T = ln 2  =>  occupancy exactly 1
    double omega = 2.0e7;
    double temperature = constants::hbar * omega / (constants::k_boltzmann * std::log(2.0));
    CHECK(thermal_occupancy(temperature, omega) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("thermal occupancy high-temperature asymptote") {
    for (double ratio : {100.0, 300.0, 1000.0}) {
        double omega = 1.0e8;
        double temperature = constants::hbar * omega * ratio / constants::k_boltzmann;
        double n = thermal_occupancy(temperature, omega);
        CHECK(std::abs(n - ratio) / ratio < 5e-3);
    }
}

TEST_CASE("thermal occupancy rejects non-positive inputs") {
    CHECK_THROWS_AS(thermal_occupancy(0.0, 1.0e7), std::invalid_argument);
    CHECK_THROWS_AS(thermal_occupancy(-1.0, 1.0e7), std::invalid_argument);
    CHECK_THROWS_AS(thermal_occupancy(0.01, 0.0), std::invalid_argument);
}

TEST_CASE("thermal occupancy is monotone in both arguments") {
    double prev = thermal_occupancy(1e-3, two_pi * 1e6);
    for (double t = 2e-3; t < 1.0; t *= 1.7) {
        double n = thermal_occupancy(t, two_pi * 1e6);
        CHECK(n > prev);
        prev = n;
    }
    prev = thermal_occupancy(10e-3, two_pi * 1e5);
    for (double f = 2e5; f < 1e9; f *= 2.3) {
        double n = thermal_occupancy(10e-3, two_pi * f);
        CHECK(n < prev);
        prev = n;
    }
}

TEST_CASE("probe renormalization") {
    SystemParams p = canonical_params();

    SUBCASE("C_d = 0 is the identity") {
        p.probe_cooperativity = 0.0;
        SystemParams r = renormalize_for_probe(p);
        CHECK(r.gamma == p.gamma);
        CHECK(r.n_th == p.n_th);
    }
    SUBCASE("probe at C_d = 2.2") {
        SystemParams r = renormalize_for_probe(p);
        CHECK(r.gamma == doctest::Approx(3.2 * p.gamma).epsilon(1e-14));
        CHECK(r.n_th == doctest::Approx(7.5).epsilon(1e-14));
        CHECK(r.probe_cooperativity == 0.0);
        // applying twice must be a no-op
        SystemParams rr = renormalize_for_probe(r);
        CHECK(rr.gamma == r.gamma);
        CHECK(rr.n_th == r.n_th);
    }
    SUBCASE("C_d = 1 doubles gamma") {
        p.probe_cooperativity = 1.0;
        CHECK(renormalize_for_probe(p).gamma ==
              doctest::Approx(two_pi * 240.0).epsilon(1e-14));
    }
    SUBCASE("heat load gamma * n_th is preserved") {
        for (double cd : {0.3, 1.0, 2.2, 17.5}) {
            p.probe_cooperativity = cd;
            SystemParams r = renormalize_for_probe(p);
            CHECK(r.gamma * r.n_th ==
                  doctest::Approx(p.gamma * p.n_th).epsilon(1e-14));
        }
    }
}

TEST_CASE("canonical parameter set validates") {
    SystemParams p = canonical_params();
    NoiseDrive d{7.735e14, two_pi * 2e5, 0.0, 1};
    SimConfig c{1e-8, 1e-3, 1e-4, 4, 10};
    CHECK(validate(p, d, c).empty());
}

TEST_CASE("validation flags the named violations") {
    SystemParams p = canonical_params();
    NoiseDrive d{1e12, two_pi * 2e5, 0.0, 1};

    SUBCASE("unresolved sideband") {
        p.kappa = 2.0 * p.omega_m;
        CHECK(has_code(validate(p), ViolationCode::resolved_sideband_violated));
    }
    SUBCASE("sigma = 0") {
        d.sigma = 0.0;
        CHECK(has_code(validate(p, d), ViolationCode::sigma_nonpositive));
    }
    SUBCASE("box leaking past the cavity line") {
        d.sigma = 1.9 * p.omega_m;
        d.center_detuning = 0.2 * p.omega_m;
        CHECK(has_code(validate(p, d), ViolationCode::blue_sideband_leak));
    }
    SUBCASE("stability gate") {
        SimConfig c{1.0 / p.kappa, 1e-3, 1e-4, 4, 1};
        CHECK(has_code(validate(p, d, c), ViolationCode::dt_stability_gate));
    }
    SUBCASE("burn-in not below total") {
        SimConfig c{1e-8, 1e-3, 1e-3, 4, 1};
        CHECK(has_code(validate(p, d, c), ViolationCode::burn_not_below_total));
    }
    SUBCASE("validation never throws") {
        SystemParams junk;
        junk.omega_m = -1.0;
        junk.gamma = 0.0;
        junk.kappa = -5.0;
        junk.g0 = 0.0;
        junk.n_th = -2.0;
        junk.kappa_ext_fraction = 7.0;
        CHECK_NOTHROW(validate(junk));
        CHECK(!validate(junk).empty());
    }
}

TEST_CASE("JSON parameter round trip in Hz") {
    SystemParams p = canonical_params();
    SystemParams q = io::system_params_from_json(io::system_params_to_json(p));
    CHECK(q.omega_m == doctest::Approx(p.omega_m).epsilon(1e-14));
    CHECK(q.gamma == doctest::Approx(p.gamma).epsilon(1e-14));
    CHECK(q.kappa == doctest::Approx(p.kappa).epsilon(1e-14));
    CHECK(q.g0 == doctest::Approx(p.g0).epsilon(1e-14));
    CHECK(q.n_th == p.n_th);
    CHECK(q.probe_cooperativity == p.probe_cooperativity);
}

TEST_CASE("JSON accepts temperature_mk instead of n_th") {
    nlohmann::json j = {{"omega_m_hz", 9.22e6}, {"gamma_hz", 120.0},
                        {"kappa_hz", 1.06e6},   {"g0_hz", 39.0},
                        {"temperature_mk", 10.6}};
    SystemParams p = io::system_params_from_json(j);
    CHECK(p.n_th == doctest::Approx(23.4588).epsilon(1e-4));
    j["n_th"] = 24.0;
    CHECK_THROWS_AS(io::system_params_from_json(j), std::invalid_argument);
}

TEST_CASE("bundled parameter files load and validate") {
    SystemParams paper = io::load_system_params(NOISECOOL_CONFIG_DIR "/paper_params.json");
    CHECK(paper.omega_m == doctest::Approx(two_pi * 9.22e6));
    CHECK(paper.n_th == 24.0);
    CHECK(paper.probe_cooperativity == doctest::Approx(2.2));
    CHECK(validate(paper).empty());

    SystemParams desk = io::load_system_params(NOISECOOL_CONFIG_DIR "/desk_params.json");
    CHECK(desk.omega_m / desk.kappa == doctest::Approx(10.0));
    CHECK(desk.kappa / desk.gamma == doctest::Approx(1e3));
    CHECK(validate(desk).empty());
}

TEST_SUITE_END();
