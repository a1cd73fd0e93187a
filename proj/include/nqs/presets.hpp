#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "nqs/bounds.hpp"
#include "nqs/error.hpp"
#include "nqs/profile.hpp"

namespace nqs {

/// Named parameter sets for the standard experiments.
///   lrfd              plain LRFD RBM of `profile`
///   perturbed_cluster cluster level followed by LRFD levels of `profile`
///   kron              Kronecker-delta RBM, λ(k̃) = δ_P^{1-k̃} for δ_P in `sweep`
struct Preset {
    std::string name;
    std::string kind;
    std::string summary;
    DecayProfile profile;
    int L = 0;
    int alpha = 0;              // LRFD levels (composite levels for perturbed_cluster)
    std::vector<double> sweep;  // alpha_Q values (fig3) or delta_P values (fig5)
    double mu0 = 0.0;           // kron only

    [[nodiscard]] LrfdFamily family() const { return {profile, kind == "perturbed_cluster" ? 1 : 0}; }
};

namespace detail {

inline Preset make_perturbed(const std::string& name, LevelDecay lambda, const std::string& summary) {
    Preset p;
    p.name = name;
    p.kind = "perturbed_cluster";
    p.summary = summary;
    p.profile.lambda = lambda;
    p.profile.mu = OrbitalDecay::power(0.1, 3.0);
    p.profile.c_w = {1.0, 1.0};
    p.profile.c_b = {1.0, 1.0};
    p.L = 11;
    p.alpha = 60;
    return p;
}

}  // namespace detail

inline std::vector<Preset> all_presets() {
    std::vector<Preset> out;
    {
        Preset p;
        p.name = "fig1b";
        p.kind = "lrfd";
        p.summary = "LRFD eta surface: lambda=k^-0.75, mu(0)=delta_Q=0.5, mu(r)=delta_Q/2 r^-1.5, c_w=1+i, c_b=0, a0=0, L=11";
        p.profile.lambda = LevelDecay::power(0.75);
        p.profile.mu = OrbitalDecay::power(0.5, 1.5);
        p.profile.c_w = {1.0, 1.0};
        p.L = 11;
        p.alpha = 20;
        out.push_back(p);
    }
    out.push_back(detail::make_perturbed(
        "fig2a", LevelDecay::exponential(1.5, 0.2, 1.0),
        "perturbed cluster, lambda=0.2*1.5^-(k-1), mu(0)=delta_Q=0.1, alpha_Q=3, c_w=c_b=1+i, a0=0, L=11"));
    out.push_back(detail::make_perturbed(
        "fig2b", LevelDecay::power(3.0),
        "perturbed cluster, lambda=k^-3, mu(0)=delta_Q=0.1, alpha_Q=3, c_w=c_b=1+i, a0=0, L=11"));
    {
        auto p = detail::make_perturbed(
            "fig2d", LevelDecay::power(3.0),
            "Nh* scaling in L for the fig2b parameters, eps0 in {1e-7, 1e-10}, bound inset eps0=1e-3");
        out.push_back(p);
    }
    {
        Preset p;
        p.name = "fig3";
        p.kind = "lrfd";
        p.summary = "z correlations: lambda=k^-3.5, mu(0)=delta_Q=0.2, mu(r)=delta_Q/2 r^-alpha_Q, c_w=1, c_b=0, a0=0, L=22, Nh=5L";
        p.profile.lambda = LevelDecay::power(3.5);
        p.profile.mu = OrbitalDecay::power(0.2, 1.0);
        p.profile.c_w = {1.0, 0.0};
        p.L = 22;
        p.alpha = 5;
        p.sweep = {0.5, 1.0, 2.0};
        out.push_back(p);
    }
    {
        Preset p;
        p.name = "fig5";
        p.kind = "kron";
        p.summary = "Kronecker delta RBM: W=b=mu0*lambda, mu0=0.1, lambda=delta_P^(1-k), L=13";
        p.profile.lambda = LevelDecay::exponential(2.0, 1.0, 1.0);
        p.profile.mu = OrbitalDecay::constant(0.1);
        p.mu0 = 0.1;
        p.L = 13;
        p.sweep = {3.0, 2.0, 1.5, 1.2, 1.1};
        out.push_back(p);
    }
    return out;
}

/// Looks up a preset by name; unknown names are a configuration error.
inline Preset preset(const std::string& name) {
    for (auto& p : all_presets())
        if (p.name == name) return p;
    throw ArgumentError("unknown preset '" + name + "'");
}

/// Number of levels after which δ_P^{1-k̃} drops below `floor`.
inline int kron_levels(double delta_P, double floor = 1e-10) {
    detail::require(delta_P > 1.0, "kron_levels: delta_P must be > 1");
    return 1 + static_cast<int>(std::ceil(std::log(1.0 / floor) / std::log(delta_P)));
}

}  // namespace nqs
