// Copyright 2026 The risqkd Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#include <doctest.h>

#include <stdexcept>

#include "risqkd/geometry.hpp"

using namespace risqkd;

TEST_SUITE("geometry") {

TEST_CASE("slant range reference values") {
    GeometryParams g;
    CHECK(slant_range(deg_to_rad(90), g) == doctest::Approx(500.0).epsilon(1e-12));
    CHECK(slant_range(0.0, g) == doctest::Approx(2573.1303892).epsilon(1e-9));
    CHECK(slant_range(deg_to_rad(30), g) == doctest::Approx(909.42493826).epsilon(1e-9));
}

TEST_CASE("atmospheric and rain paths") {
    GeometryParams g;
    CHECK(atmospheric_path(deg_to_rad(90), g) == doctest::Approx(4.9960821164).epsilon(1e-9));
    CHECK(atmospheric_path(deg_to_rad(10), g) == doctest::Approx(28.081081727).epsilon(1e-9));
    CHECK(rain_path(deg_to_rad(90), g) == doctest::Approx(1.4996470034).epsilon(1e-9));
    CHECK(rain_path(deg_to_rad(10), g) == doctest::Approx(8.5717416222).epsilon(1e-9));
    CHECK(layer_path(deg_to_rad(45), 0.0, g.earth_radius_km) == 0.0);
}

TEST_CASE("out-of-range elevation is a domain error") {
    GeometryParams g;
    CHECK_THROWS_AS(slant_range(deg_to_rad(-1), g), std::domain_error);
    CHECK_THROWS_AS(slant_range(deg_to_rad(91), g), std::domain_error);
    CHECK_THROWS_AS(make_link_geometry(0.0, g), std::domain_error);
    CHECK_NOTHROW(make_link_geometry(deg_to_rad(90), g));
}

TEST_CASE("parameter validation") {
    GeometryParams g;
    g.atm_height_km = 600;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g = {};
    g.earth_radius_km = 0;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}

TEST_CASE("distances decrease strictly with elevation") {
    GeometryParams g;
    double prev_d = 1e300, prev_a = 1e300;
    for (int k = 1; k <= 900; ++k) {
        const double t = deg_to_rad(0.1 * k);
        const LinkGeometry lg = make_link_geometry(t, g);
        CHECK(lg.slant_range_km < prev_d);
        CHECK(lg.atm_path_km < prev_a);
        CHECK(lg.slant_range_km >= g.sat_altitude_km * (1 - 1e-12));
        CHECK(lg.atm_path_km > 0);
        prev_d = lg.slant_range_km;
        prev_a = lg.atm_path_km;
    }
}

}
