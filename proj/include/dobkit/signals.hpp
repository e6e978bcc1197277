#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "dobkit/matrix.hpp"

namespace dobkit {

/// Scalar exogenous signal with an analytic derivative. Covers the
/// reference and disturbance families accepted by the scenario schema.
class Signal {
public:
    enum class Kind { Constant, Sin, Cos, Poly };

    static Signal constant(double value) { return Signal(Kind::Constant, {value}); }
    /// amp * sin(freq * t + phase)
    static Signal sine(double amp, double freq, double phase = 0.0) {
        return Signal(Kind::Sin, {amp, freq, phase});
    }
    static Signal cosine(double amp, double freq, double phase = 0.0) {
        return Signal(Kind::Cos, {amp, freq, phase});
    }
    /// coeffs[0] + coeffs[1]*t + ... (ascending powers)
    static Signal poly(Vec coeffs) {
        if (coeffs.empty()) coeffs.push_back(0.0);
        return Signal(Kind::Poly, std::move(coeffs));
    }

    double value(double t) const {
        switch (kind_) {
            case Kind::Constant: return p_[0];
            case Kind::Sin: return p_[0] * std::sin(p_[1] * t + p_[2]);
            case Kind::Cos: return p_[0] * std::cos(p_[1] * t + p_[2]);
            case Kind::Poly: {
                double v = 0.0;
                for (size_t k = p_.size(); k-- > 0;) v = v * t + p_[k];
                return v;
            }
        }
        return 0.0;
    }

    double derivative(double t) const {
        switch (kind_) {
            case Kind::Constant: return 0.0;
            case Kind::Sin: return p_[0] * p_[1] * std::cos(p_[1] * t + p_[2]);
            case Kind::Cos: return -p_[0] * p_[1] * std::sin(p_[1] * t + p_[2]);
            case Kind::Poly: {
                double v = 0.0;
                for (size_t k = p_.size(); k-- > 1;) v = v * t + p_[k] * static_cast<double>(k);
                return v;
            }
        }
        return 0.0;
    }

    Kind kind() const { return kind_; }
    const Vec& params() const { return p_; }

private:
    Signal(Kind kind, Vec p) : kind_(kind), p_(std::move(p)) {}
    Kind kind_;
    Vec p_;
};

/// State-dependent disturbance f(x, z, t) with analytic partials, needed
/// because the transform derivatives require d/dt of the lumped
/// disturbance along trajectories.
class StateDisturbance {
public:
    enum class Kind { None, SinX1 };

    static StateDisturbance none() { return StateDisturbance(Kind::None, 0.0); }
    /// amp * sin(x1)
    static StateDisturbance sin_x1(double amp) { return StateDisturbance(Kind::SinX1, amp); }

    double value(const Vec& x, const Vec&, double) const {
        switch (kind_) {
            case Kind::None: return 0.0;
            case Kind::SinX1: return amp_ * std::sin(x[0]);
        }
        return 0.0;
    }

    /// Directional time derivative along (xdot, zdot) at (x, z, t).
    double total_derivative(const Vec& x, const Vec&, double, const Vec& xdot,
                            const Vec&) const {
        switch (kind_) {
            case Kind::None: return 0.0;
            case Kind::SinX1: return amp_ * std::cos(x[0]) * xdot[0];
        }
        return 0.0;
    }

    Kind kind() const { return kind_; }
    double amplitude() const { return amp_; }

private:
    StateDisturbance(Kind kind, double amp) : kind_(kind), amp_(amp) {}
    Kind kind_;
    double amp_;
};

}  // namespace dobkit
