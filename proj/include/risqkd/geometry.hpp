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

#pragma once

namespace risqkd {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

inline constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Earth/orbit/atmosphere heights shared by both bands. All lengths in km.
struct GeometryParams {
    double earth_radius_km = 6371.0;
    double sat_altitude_km = 500.0;
    double atm_height_km = 10.0;
    double rain_height_km = 3.0;

    /// Throws std::invalid_argument when a field is non-positive or the
    /// atmosphere is not below the satellite.
    void validate() const;
};

/// Elevation-dependent distances for one pointing of the link.
struct LinkGeometry {
    double elevation_rad = 0.0;
    double slant_range_km = 0.0;
    double atm_path_km = 0.0;
    double rain_path_km = 0.0;
};

/// Line-of-sight distance between ground station and satellite at elevation
/// `theta_rad`. Elevations outside [0, pi/2] raise std::domain_error.
double slant_range(double theta_rad, const GeometryParams& geo);

/// Effective path length through a layer of height `layer_height_km`:
/// h / (sin θ + sqrt(sin²θ + 2h/R_E)). Note this gives ≈h/2 at zenith.
double layer_path(double theta_rad, double layer_height_km, double earth_radius_km);

double atmospheric_path(double theta_rad, const GeometryParams& geo);

/// Rain path uses the same functional form with the rain height.
double rain_path(double theta_rad, const GeometryParams& geo);

/// Bundles the three distances. Requires theta in (0, pi/2].
LinkGeometry make_link_geometry(double theta_rad, const GeometryParams& geo);

}  // namespace risqkd
