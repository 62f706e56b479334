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

#include "risqkd/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace risqkd {

namespace {

// Tolerates the rounding in deg_to_rad(90).
constexpr double kElevationSlack = 1e-12;

void check_elevation(double theta_rad, bool allow_horizon) {
    const bool low = allow_horizon ? theta_rad < 0.0 : theta_rad <= 0.0;
    if (!std::isfinite(theta_rad) || low || theta_rad > kPi / 2 + kElevationSlack) {
        throw std::domain_error("elevation out of range: " +
                                std::to_string(rad_to_deg(theta_rad)) + " deg");
    }
}

}  // namespace

void GeometryParams::validate() const {
    if (!(earth_radius_km > 0) || !(sat_altitude_km > 0) || !(atm_height_km > 0) ||
        !(rain_height_km > 0)) {
        throw std::invalid_argument("geometry: all heights and radii must be positive");
    }
    if (atm_height_km >= sat_altitude_km) {
        throw std::invalid_argument("geometry: atm_height_km must be below sat_altitude_km");
    }
}

double slant_range(double theta_rad, const GeometryParams& geo) {
    check_elevation(theta_rad, true);
    const double re = geo.earth_radius_km;
    const double rs = re + geo.sat_altitude_km;
    const double c = re * std::cos(theta_rad);
    return std::sqrt(rs * rs - c * c) - re * std::sin(theta_rad);
}

double layer_path(double theta_rad, double layer_height_km, double earth_radius_km) {
    check_elevation(theta_rad, true);
    if (layer_height_km <= 0.0) return 0.0;
    const double s = std::sin(theta_rad);
    return layer_height_km / (s + std::sqrt(s * s + 2.0 * layer_height_km / earth_radius_km));
}

double atmospheric_path(double theta_rad, const GeometryParams& geo) {
    return layer_path(theta_rad, geo.atm_height_km, geo.earth_radius_km);
}

double rain_path(double theta_rad, const GeometryParams& geo) {
    return layer_path(theta_rad, geo.rain_height_km, geo.earth_radius_km);
}

LinkGeometry make_link_geometry(double theta_rad, const GeometryParams& geo) {
    check_elevation(theta_rad, false);
    return LinkGeometry{theta_rad, slant_range(theta_rad, geo), atmospheric_path(theta_rad, geo),
                        rain_path(theta_rad, geo)};
}

}  // namespace risqkd
