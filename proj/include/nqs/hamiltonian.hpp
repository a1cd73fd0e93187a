#pragma once

#include <string>

#include "nqs/error.hpp"
#include "nqs/spinspace.hpp"

namespace nqs {

/// Periodic spin-chain Hamiltonians in the σ^z basis.
///
/// cluster: -Σ σ^z_{j-1} σ^x_j σ^z_{j+1}
/// tfim:    -Σ σ^z_j σ^z_{j+1} - B_x Σ σ^x_j
/// xxz:      Σ (-σ^x_j σ^x_{j+1} - σ^y_j σ^y_{j+1} + J_z σ^z_j σ^z_{j+1})
struct HamiltonianSpec {
    enum class Kind { cluster, tfim, xxz };
    Kind kind = Kind::tfim;
    int L = 3;
    double field = 0.0;  // B_x for tfim, J_z for xxz

    static HamiltonianSpec cluster(int L) { return {Kind::cluster, L, 0.0}; }
    static HamiltonianSpec tfim(int L, double Bx) { return {Kind::tfim, L, Bx}; }
    static HamiltonianSpec xxz(int L, double Jz) { return {Kind::xxz, L, Jz}; }

    void validate() const { detail::require(L >= 3 && L <= kMaxSites, "Hamiltonian needs 3 <= L <= 30"); }

    [[nodiscard]] std::string name() const {
        switch (kind) {
            case Kind::cluster: return "cluster";
            case Kind::tfim: return "tfim";
            case Kind::xxz: return "xxz";
        }
        return "?";
    }
};

/// Calls emit(bits', H_{s', s}) for every nonzero element of column s. The
/// diagonal element is emitted first (possibly zero). Off-diagonal moves
/// are single flips (cluster, tfim) or nearest-neighbor pair flips (xxz).
template <class Emit>
void for_each_element(const HamiltonianSpec& h, std::uint32_t bits, Emit&& emit) {
    const int L = h.L;
    auto sp = [bits](int j) { return ((bits >> j) & 1u) ? 1 : -1; };
    switch (h.kind) {
        case HamiltonianSpec::Kind::cluster: {
            emit(bits, 0.0);
            for (int j = 0; j < L; ++j) {
                const int l = (j + L - 1) % L;
                const int r = (j + 1) % L;
                emit(bits ^ (1u << j), -static_cast<double>(sp(l) * sp(r)));
            }
            break;
        }
        case HamiltonianSpec::Kind::tfim: {
            int zz = 0;
            for (int j = 0; j < L; ++j) zz += sp(j) * sp((j + 1) % L);
            emit(bits, -static_cast<double>(zz));
            if (h.field != 0.0)
                for (int j = 0; j < L; ++j) emit(bits ^ (1u << j), -h.field);
            break;
        }
        case HamiltonianSpec::Kind::xxz: {
            int zz = 0;
            for (int j = 0; j < L; ++j) zz += sp(j) * sp((j + 1) % L);
            emit(bits, h.field * zz);
            for (int j = 0; j < L; ++j) {
                const int r = (j + 1) % L;
                if (sp(j) != sp(r)) emit(bits ^ (1u << j) ^ (1u << r), -2.0);
            }
            break;
        }
    }
}

}  // namespace nqs
