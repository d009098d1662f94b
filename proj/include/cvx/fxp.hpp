#pragma once

#include <cstdint>
#include <stdexcept>

namespace cvx {

// 16-bit two's-complement fixed-point element. The binary point is supplied
// per operation via FxpConfig::frac_shift, not stored with the value.
using q16 = int16_t;

// 32-bit lane accumulator (one lane of a 512-bit accumulator register).
using acc32 = int32_t;

enum class Rounding : uint8_t {
    truncate = 0,      // arithmetic right shift (floor)
    nearest_even = 1,  // round half to even
    nearest_away = 2,  // round half away from zero
};

struct FxpConfig {
    uint8_t frac_shift = 0;  // 0..31
    Rounding rounding = Rounding::nearest_even;
    uint8_t gate_bits = 16;  // 1..16, 16 = gating disabled

    bool valid() const {
        return frac_shift <= 31 && gate_bits >= 1 && gate_bits <= 16 &&
               static_cast<uint8_t>(rounding) <= 2;
    }
};

// Zero the (16 - bits) least-significant bits, keeping sign and magnitude
// range intact. bits == 16 is the identity.
inline q16 gate(q16 a, int bits) {
    if (bits < 1 || bits > 16)
        throw std::invalid_argument("gate: bits out of range");
    uint16_t mask = static_cast<uint16_t>(0xFFFFu << (16 - bits));
    return static_cast<q16>(static_cast<uint16_t>(a) & mask);
}

// Exact widening multiply of the raw values. |product| <= 2^30, so no
// overflow is possible in 32 bits.
inline acc32 mul_full(q16 a, q16 b) {
    return static_cast<acc32>(a) * static_cast<acc32>(b);
}

// Round acc / 2^frac_shift under cfg.rounding, then saturate to q16 range.
// If saturation occurred, *saturated is set (sticky: never cleared here).
q16 round_shift_sat(acc32 acc, const FxpConfig& cfg, bool* saturated = nullptr);

}  // namespace cvx
