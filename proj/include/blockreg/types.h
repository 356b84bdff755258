#pragma once

#include <cmath>
#include <cstdint>

namespace blockreg {

struct int3 {
    int x = 0;
    int y = 0;
    int z = 0;

    friend bool operator==(const int3&, const int3&) = default;
};

inline int3 operator+(const int3& a, const int3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline int3 operator-(const int3& a, const int3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }

struct double3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend bool operator==(const double3&, const double3&) = default;
};

inline double3 operator+(const double3& a, const double3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline double3 operator-(const double3& a, const double3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline double3 operator*(double s, const double3& v) { return {s * v.x, s * v.y, s * v.z}; }

// Squared Euclidean norm with a fixed evaluation order. Every code path that
// scores a displacement difference must agree bit-for-bit, so this is the one
// place the reduction order is defined.
inline double norm_sq(const double3& v) {
    return (v.x * v.x + v.y * v.y) + v.z * v.z;
}

inline double norm(const double3& v) { return std::sqrt(norm_sq(v)); }

// Kahan-Babuska-Neumaier compensated accumulator. Long sums of energy terms
// carry an (hi, lo) pair so that differences of large totals remain meaningful
// down at the move-tolerance scale.
struct CompensatedSum {
    double hi = 0.0;
    double lo = 0.0;

    void add(double x) {
        double t = hi + x;
        if (std::abs(hi) >= std::abs(x)) {
            lo += (hi - t) + x;
        } else {
            lo += (x - t) + hi;
        }
        hi = t;
    }

    void add(const CompensatedSum& other) {
        add(other.hi);
        add(other.lo);
    }

    double value() const { return hi + lo; }

    // Difference evaluated in long double so that the compensation survives
    // the subtraction of two near-equal totals.
    static double difference(const CompensatedSum& a, const CompensatedSum& b) {
        long double d = ((long double)a.hi - (long double)b.hi) +
                        ((long double)a.lo - (long double)b.lo);
        return (double)d;
    }
};

} // namespace blockreg
