#include "flapkit/morphometrics.hpp"

#include "flapkit/error.hpp"

namespace flapkit::morpho {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

void validate(const MorphoConfig& cfg) {
    const bool ok = cfg.m > 0 && cfg.b > 0 && cfg.S > 0 && cfg.c_bar > 0 &&
                    cfg.V > 0 && cfg.f > 0 && cfg.nu > 0 && cfg.g > 0;
    if (!ok) throw ValidationError("morphometric config: all quantities must be positive");
}

double reduced_frequency(const MorphoConfig& cfg, double U) {
    if (!(U > 0)) throw ValidationError("reduced frequency needs a positive speed U");
    return 2.0 * kPi * cfg.f * cfg.c_bar / (2.0 * U);
}

Morphometrics morphometrics(const MorphoConfig& cfg) {
    validate(cfg);
    Morphometrics m;
    m.aspect_ratio = cfg.b * cfg.b / (2.0 * cfg.S);
    m.wing_loading = cfg.m * cfg.g / (2.0 * cfg.S);
    m.reynolds = cfg.V * cfg.c_bar / cfg.nu;
    m.reduced_frequency = reduced_frequency(cfg, cfg.V);
    return m;
}

}  // namespace flapkit::morpho
