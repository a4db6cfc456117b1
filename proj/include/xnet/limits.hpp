#pragma once

#include <cmath>

#include "xnet/error.hpp"

namespace xnet {

// Numerical guard rails for forward and backward passes. The paper-level
// quantities are V (output clamp) and [G_min, G_max] (gradient band); the
// epsilons keep division and log/sqrt total.
struct NumericLimits {
    double v_max = 1e6;       // node outputs clamped to [-v_max, +v_max]
    double g_max = 1e3;       // gradient magnitude ceiling
    double g_min = 1e-8;      // gradient magnitude floor (nonzero gradients only)
    double div_eps = 1e-12;   // denominator magnitude floor
    double domain_eps = 1e-12; // log/sqrt argument floor

    void validate() const
    {
        if (!(v_max > 0) || !(g_max > 0) || !(g_min > 0) || !(div_eps > 0) || !(domain_eps > 0))
            throw ConfigError("numeric limits must all be positive");
        if (!(g_min < g_max))
            throw ConfigError("g_min must be below g_max");
    }
};

// |e| >= v_max collapses to sign(e)*v_max; non-finite values are pinned the
// same way so evaluation stays total.
inline double clamp_output(double e, const NumericLimits& lim)
{
    if (std::isnan(e))
        return lim.v_max;
    if (std::fabs(e) >= lim.v_max)
        return std::copysign(lim.v_max, e);
    return e;
}

// Magnitude band [g_min, g_max], sign preserved, exact zeros preserved.
inline double clamp_gradient(double g, const NumericLimits& lim)
{
    if (g == 0.0)
        return 0.0;
    if (std::isnan(g))
        return 0.0;
    double mag = std::fabs(g);
    if (mag >= lim.g_max)
        return std::copysign(lim.g_max, g);
    if (mag <= lim.g_min)
        return std::copysign(lim.g_min, g);
    return g;
}

// Denominator with a signed magnitude floor; sign(0) counts as positive.
inline double guard_denominator(double r, const NumericLimits& lim)
{
    double mag = std::fabs(r);
    if (mag >= lim.div_eps)
        return r;
    return r < 0.0 ? -lim.div_eps : lim.div_eps;
}

inline double guard_domain(double v, const NumericLimits& lim)
{
    return v < lim.domain_eps ? lim.domain_eps : v;
}

} // namespace xnet
