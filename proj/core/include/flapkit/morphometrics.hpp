#pragma once

// Morphometric calculators: aspect ratio, wing loading, Reynolds number and
// reduced frequency.  S is the area of a single forewing-hindwing pair; the
// angular rate in the reduced frequency is the flapping rate 2*pi*f.

namespace flapkit::morpho {

struct MorphoConfig {
    double m = 0.026;        // body mass, kg
    double b = 0.60;         // wingspan, m
    double S = 0.0549168;    // single-wing area, m^2
    double c_bar = 0.0886;   // mean aerodynamic chord, m
    double V = 1.03;         // characteristic speed, m/s
    double f = 10.0;         // flapping frequency, Hz
    double nu = 1.63e-5;     // kinematic viscosity, m^2/s
    double g = 9.81;         // m/s^2
};

void validate(const MorphoConfig& cfg);

struct Morphometrics {
    double aspect_ratio = 0.0;   // b^2 / (2S)
    double wing_loading = 0.0;   // m g / (2S), N/m^2
    double reynolds = 0.0;       // V c_bar / nu
    double reduced_frequency = 0.0;  // (2 pi f) c_bar / (2 U) at U = V
};

Morphometrics morphometrics(const MorphoConfig& cfg);

// Reduced frequency at an arbitrary forward speed U.
double reduced_frequency(const MorphoConfig& cfg, double U);

}  // namespace flapkit::morpho
