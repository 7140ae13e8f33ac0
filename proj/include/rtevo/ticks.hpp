#pragma once

#include <cstdint>

#include "rtevo/error.hpp"

namespace rtevo {

// All times are non-negative integer ticks; one tick is the smallest
// representable duration. Intermediate arithmetic is signed 64-bit with
// explicit overflow detection, never silent wraparound.
using Ticks = std::int64_t;

inline Ticks checked_add(Ticks a, Ticks b) {
    Ticks r;
    if (__builtin_add_overflow(a, b, &r))
        throw Error(Errc::overflow, "add");
    return r;
}

inline Ticks checked_sub(Ticks a, Ticks b) {
    Ticks r;
    if (__builtin_sub_overflow(a, b, &r))
        throw Error(Errc::overflow, "sub");
    return r;
}

inline Ticks checked_mul(Ticks a, Ticks b) {
    Ticks r;
    if (__builtin_mul_overflow(a, b, &r))
        throw Error(Errc::overflow, "mul");
    return r;
}

// Floor toward -inf; divisor must be positive.
inline Ticks floor_div(Ticks a, Ticks b) {
    Ticks q = a / b;
    if (a % b != 0 && a < 0)
        --q;
    return q;
}

// Ceiling toward +inf; divisor must be positive.
inline Ticks ceil_div(Ticks a, Ticks b) {
    Ticks q = a / b;
    if (a % b != 0 && a > 0)
        ++q;
    return q;
}

} // namespace rtevo
