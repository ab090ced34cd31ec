#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace pcgl {

/// A point value of the two-component state (the planar encoding of a
/// complex amplitude: u1 + i*u2 <-> (u1, u2)).
struct Vec2 {
    double u1 = 0.0;
    double u2 = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.u1 + b.u1, a.u2 + b.u2}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.u1 - b.u1, a.u2 - b.u2}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.u1, s * a.u2}; }
    Vec2& operator+=(Vec2 b) { u1 += b.u1; u2 += b.u2; return *this; }
    Vec2& operator-=(Vec2 b) { u1 -= b.u1; u2 -= b.u2; return *this; }
};

inline double dot(Vec2 a, Vec2 b) { return a.u1 * b.u1 + a.u2 * b.u2; }
inline double norm2(Vec2 a) { return std::sqrt(dot(a, a)); }

/// Quarter-turn rotation, the planar stand-in for multiplication by i.
inline Vec2 rot90(Vec2 a) { return {-a.u2, a.u1}; }

/// Neumaier-compensated accumulator. All norms and pairings in the
/// library run through this so that inequality margins are dominated by
/// the mathematics, not by summation order.
class KahanSum {
  public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double sqr(double x) { return x * x; }

[[noreturn]] inline void fail_domain(const std::string& msg) {
    throw std::domain_error(msg);
}

[[noreturn]] inline void fail_invalid(const std::string& msg) {
    throw std::invalid_argument(msg);
}

} // namespace pcgl
