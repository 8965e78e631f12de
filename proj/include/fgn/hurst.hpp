#ifndef FGN_HURST_HPP
#define FGN_HURST_HPP

#include <cmath>
#include <stdexcept>

namespace fgn {

// H = 1/2 + (1/2) * logistic(h); h = -inf is the white-noise limit.

inline double hurst_from_h(double h) { return 0.5 + 0.5 / (1.0 + std::exp(-h)); }

inline double h_from_hurst(double H) {
    const double s = 2.0 * H - 1.0;
    return std::log(s) - std::log1p(-s);
}

/// dH/dh, used for delta-method standard errors.
inline double hurst_jacobian(double h) {
    const double s = 1.0 / (1.0 + std::exp(-h));
    return 0.5 * s * (1.0 - s);
}

inline void check_hurst(double H) {
    if (!(H >= 0.5 && H < 1.0)) {
        throw std::domain_error("Hurst exponent must lie in [0.5, 1), got " + std::to_string(H));
    }
}

struct HurstParams {
    double H = 0.5;
    double sigma = 1.0;

    double h() const { return h_from_hurst(H); }

    static HurstParams from_h(double h, double sigma = 1.0) { return {hurst_from_h(h), sigma}; }

    void validate() const {
        check_hurst(H);
        if (!(sigma > 0.0) || !std::isfinite(sigma)) {
            throw std::domain_error("sigma must be positive and finite");
        }
    }
};

} // namespace fgn

#endif
