#pragma once

namespace plasmapath::constants {

inline constexpr const char* kVersion = "0.1.0";

// Geometry and gravity
inline constexpr double kSpeedOfLightKmS = 299792.458;   // km/s
inline constexpr double kSpeedOfLightMS = 299792458.0;   // m/s
inline constexpr double kEarthRadiusKm = 6378.137;       // km
inline constexpr double kMoonRadiusKm = 1737.4;          // km
inline constexpr double kGmEarthKm3S2 = 398600.4418;     // km^3/s^2
inline constexpr double kGmMoonKm3S2 = 4902.800066;      // km^3/s^2

// Electron properties (CODATA)
inline constexpr double kElectronChargeC = 1.602176634e-19;   // C
inline constexpr double kElectronMassKg = 9.1093837015e-31;   // kg
inline constexpr double kVacuumPermittivity = 8.8541878128e-12;  // F/m

// Dispersive-delay coefficients.  First-order term uses the conventional
// rounded 40.3; the higher-order coefficients are for B in Tesla, n_e in
// electrons/m^3 and path element in meters.
inline constexpr double kFirstOrderCoeff = 40.3;        // m^3 Hz^2 / e
inline constexpr double kSecondOrderCoeff = -2.2566e12; // q = coeff * int(n_e B cos(theta) ds)
inline constexpr double kThirdOrderNe2Coeff = 2437.0;
inline constexpr double kThirdOrderB2Coeff = 4.74e22;

// GNSS carrier frequencies
inline constexpr double kFreqL1Hz = 1575.42e6;
inline constexpr double kFreqL5Hz = 1176.45e6;
inline constexpr double kFreqE1Hz = 1575.42e6;

}  // namespace plasmapath::constants
