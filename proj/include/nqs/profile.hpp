#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "nqs/error.hpp"

namespace nqs {

using cplx = std::complex<double>;

/// Level-decay factor λ(k̃), k̃ = 1, 2, ...
struct LevelDecay {
    enum class Kind { exponential, power, table, inverse_log };

    Kind kind = Kind::power;
    double delta_P = 2.0;  // exponential: λ = scale · δ_P^{-(k̃ - shift)}
    double alpha_P = 1.0;  // power:       λ = scale · k̃^{-α_P}
    double scale = 1.0;    // inverse_log: λ² = scale² / ((k̃+1) ln²(k̃+1))
    double shift = 0.0;
    std::vector<double> table;  // table: λ(k̃) = table[k̃-1], zero past the end

    static LevelDecay exponential(double delta_P, double scale = 1.0, double shift = 0.0) {
        LevelDecay d;
        d.kind = Kind::exponential;
        d.delta_P = delta_P;
        d.scale = scale;
        d.shift = shift;
        return d;
    }
    static LevelDecay power(double alpha_P, double scale = 1.0) {
        LevelDecay d;
        d.kind = Kind::power;
        d.alpha_P = alpha_P;
        d.scale = scale;
        return d;
    }
    static LevelDecay from_table(std::vector<double> values) {
        LevelDecay d;
        d.kind = Kind::table;
        d.table = std::move(values);
        return d;
    }
    static LevelDecay inverse_log(double scale = 1.0) {
        LevelDecay d;
        d.kind = Kind::inverse_log;
        d.scale = scale;
        return d;
    }

    [[nodiscard]] double operator()(int k) const {
        detail::require(k >= 1, "LevelDecay: level index must be >= 1");
        switch (kind) {
            case Kind::exponential: return scale * std::pow(delta_P, -(k - shift));
            case Kind::power: return scale * std::pow(static_cast<double>(k), -alpha_P);
            case Kind::inverse_log: {
                const double x = k + 1.0;
                return scale / (std::sqrt(x) * std::log(x));
            }
            case Kind::table:
                return k <= static_cast<int>(table.size()) ? table[k - 1] : 0.0;
        }
        return 0.0;
    }

    /// Levels available without extrapolation (unbounded for analytic kinds).
    [[nodiscard]] int max_level() const {
        return kind == Kind::table ? static_cast<int>(table.size()) : std::numeric_limits<int>::max();
    }

    [[nodiscard]] std::string name() const {
        switch (kind) {
            case Kind::exponential: return "exponential";
            case Kind::power: return "power";
            case Kind::table: return "table";
            case Kind::inverse_log: return "inverse_log";
        }
        return "?";
    }

    void validate() const {
        switch (kind) {
            case Kind::exponential:
                if (!(delta_P > 1.0)) throw ArgumentError("exponential level decay needs delta_P > 1");
                break;
            case Kind::power:
                if (!(alpha_P > 0.5)) throw ArgumentError("power level decay needs alpha_P > 1/2");
                break;
            case Kind::inverse_log: break;
            case Kind::table:
                for (std::size_t i = 0; i < table.size(); ++i) {
                    detail::require(std::isfinite(table[i]) && table[i] >= 0.0,
                                    "level table entries must be finite and nonnegative");
                    if (i > 0) detail::require(table[i] <= table[i - 1], "level table must be nonincreasing");
                }
                break;
        }
        detail::require(std::isfinite(scale) && scale >= 0.0, "level decay scale must be nonnegative");
    }
};

/// Orbital factor μ(r), r = 0, 1, ... (circular distance from the center spin).
struct OrbitalDecay {
    enum class Kind { power, constant, table };

    Kind kind = Kind::power;
    double delta_Q = 0.1;  // power: μ(0) = δ_Q, μ(r) = ½ δ_Q r^{-α_Q}
    double alpha_Q = 1.0;
    double mu0 = 0.1;      // constant: μ(r) = μ₀
    std::vector<double> table;

    static OrbitalDecay power(double delta_Q, double alpha_Q) {
        OrbitalDecay d;
        d.kind = Kind::power;
        d.delta_Q = delta_Q;
        d.alpha_Q = alpha_Q;
        return d;
    }
    static OrbitalDecay constant(double mu0) {
        OrbitalDecay d;
        d.kind = Kind::constant;
        d.mu0 = mu0;
        return d;
    }
    static OrbitalDecay from_table(std::vector<double> values) {
        OrbitalDecay d;
        d.kind = Kind::table;
        d.table = std::move(values);
        return d;
    }

    [[nodiscard]] double operator()(int r) const {
        detail::require(r >= 0, "OrbitalDecay: distance must be >= 0");
        switch (kind) {
            case Kind::power:
                return r == 0 ? delta_Q : 0.5 * delta_Q * std::pow(static_cast<double>(r), -alpha_Q);
            case Kind::constant: return mu0;
            case Kind::table:
                if (r >= static_cast<int>(table.size()))
                    throw ArgumentError("orbital table too short for requested distance");
                return table[r];
        }
        return 0.0;
    }

    [[nodiscard]] int max_distance() const {
        return kind == Kind::table ? static_cast<int>(table.size()) - 1 : std::numeric_limits<int>::max();
    }

    [[nodiscard]] std::string name() const {
        switch (kind) {
            case Kind::power: return "power";
            case Kind::constant: return "constant";
            case Kind::table: return "table";
        }
        return "?";
    }

    void validate() const {
        switch (kind) {
            case Kind::power:
                detail::require(std::isfinite(delta_Q) && delta_Q >= 0.0, "delta_Q must be nonnegative");
                detail::require(std::isfinite(alpha_Q) && alpha_Q >= 0.0, "alpha_Q must be nonnegative");
                break;
            case Kind::constant:
                detail::require(std::isfinite(mu0) && mu0 >= 0.0, "mu0 must be nonnegative");
                break;
            case Kind::table:
                detail::require(!table.empty(), "orbital table must not be empty");
                for (std::size_t i = 0; i < table.size(); ++i) {
                    detail::require(std::isfinite(table[i]) && table[i] >= 0.0,
                                    "orbital table entries must be finite and nonnegative");
                    if (i > 0) detail::require(table[i] <= table[i - 1], "orbital table must be nonincreasing");
                }
                break;
        }
    }
};

/// λ(k̃), μ(r) and the complex prefactors of an LRFD family.
struct DecayProfile {
    LevelDecay lambda;
    OrbitalDecay mu;
    cplx c_w{1.0, 0.0};
    cplx c_b{0.0, 0.0};
    cplx a0{0.0, 0.0};

    void validate() const {
        lambda.validate();
        mu.validate();
        for (cplx c : {c_w, c_b, a0})
            detail::require(std::isfinite(c.real()) && std::isfinite(c.imag()), "profile constants must be finite");
        detail::require(std::abs(c_b) <= std::abs(c_w) * (1.0 + 1e-15), "profile needs |c_b| <= |c_w|");
    }

    /// Smallest s with |Re W|, |Im W| ≤ s λ μ and |Re b|, |Im b| ≤ s λ μ(0).
    [[nodiscard]] double bound_scale() const {
        return std::max({std::abs(c_w.real()), std::abs(c_w.imag()), std::abs(c_b.real()), std::abs(c_b.imag())});
    }
};

}  // namespace nqs
