#include "cvx/fxp.hpp"

namespace cvx {

q16 round_shift_sat(acc32 acc, const FxpConfig& cfg, bool* saturated) {
    if (!cfg.valid())
        throw std::invalid_argument("round_shift_sat: invalid config");

    int64_t v = acc;
    int s = cfg.frac_shift;
    int64_t r;
    if (s == 0) {
        r = v;
    } else {
        int64_t floor_q = v >> s;               // arithmetic shift == floor
        int64_t rem = v - (floor_q << s);       // 0 <= rem < 2^s
        int64_t half = int64_t(1) << (s - 1);
        switch (cfg.rounding) {
            case Rounding::truncate:
                r = floor_q;
                break;
            case Rounding::nearest_even:
                if (rem > half)
                    r = floor_q + 1;
                else if (rem < half)
                    r = floor_q;
                else
                    r = floor_q + (floor_q & 1);
                break;
            case Rounding::nearest_away:
            default:
                // ties move away from zero: for the exact .5 case the result
                // of floor+1 is away from zero iff v > 0; for v < 0 the tie
                // stays at floor (which is further from zero).
                if (rem > half)
                    r = floor_q + 1;
                else if (rem < half)
                    r = floor_q;
                else
                    r = (v > 0) ? floor_q + 1 : floor_q;
                break;
        }
    }

    if (r > 32767) {
        if (saturated) *saturated = true;
        return 32767;
    }
    if (r < -32768) {
        if (saturated) *saturated = true;
        return -32768;
    }
    return static_cast<q16>(r);
}

}  // namespace cvx
