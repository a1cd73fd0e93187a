#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nqs/error.hpp"
#include "nqs/exact.hpp"
#include "nqs/hamiltonian.hpp"
#include "nqs/parallel.hpp"

namespace nqs {

struct LanczosOptions {
    int max_krylov = 200;
    int max_restarts = 60;
    double residual_tol = 1e-9;
    std::uint64_t seed = 12345;
    bool probe_degeneracy = true;
    double degeneracy_tol = 1e-8;
    std::size_t memory_budget = std::size_t{1} << 30;  // bytes for the Krylov basis
};

struct GroundState {
    double energy = 0.0;
    StateVector state;
    double residual = 0.0;
    int matvecs = 0;
    bool degenerate = false;
    double next_energy = 0.0;  // lowest eigenvalue orthogonal to the ground space found
    std::vector<StateVector> ground_space;
};

/// y = H x over the full basis (H real symmetric in the σ^z basis).
inline void apply_hamiltonian(const HamiltonianSpec& h, const std::vector<double>& x, std::vector<double>& y) {
    const std::size_t dim = std::size_t{1} << h.L;
    y.assign(dim, 0.0);
    parallel_for(dim, 4096, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            double acc = 0.0;
            for_each_element(h, static_cast<std::uint32_t>(i), [&](std::uint32_t t, double v) { acc += v * x[t]; });
            y[i] = acc;
        }
    });
}

/// Dense matrix of H; test oracle for small L.
inline Eigen::MatrixXd dense_hamiltonian(const HamiltonianSpec& h) {
    h.validate();
    if (h.L > 12) throw CapacityError("dense_hamiltonian: L must be <= 12");
    const std::size_t dim = std::size_t{1} << h.L;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i)
        for_each_element(h, static_cast<std::uint32_t>(i), [&](std::uint32_t t, double v) {
            H(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)) += v;
        });
    return H;
}

/// ⟨ψ|H|ψ⟩ / ⟨ψ|ψ⟩ for a complex state.
inline double energy(const HamiltonianSpec& h, const StateVector& st) {
    detail::require(st.L == h.L, "energy: length mismatch");
    const double n2 = st.norm2();
    if (!(n2 > 0.0)) throw NumericalError("energy: zero state");
    const std::size_t dim = st.dim();
    const double num = parallel_reduce<double>(
        dim, 1024, 0.0,
        [&](std::size_t lo, std::size_t hi) {
            cplx acc{};
            for (std::size_t i = lo; i < hi; ++i)
                for_each_element(h, static_cast<std::uint32_t>(i),
                                 [&](std::uint32_t t, double v) { acc += std::conj(st.amp[t]) * v * st.amp[i]; });
            return acc.real();
        },
        [](double a, double b) { return a + b; });
    return num / n2;
}

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long double>(a[i]) * b[i];
    return static_cast<double>(s);
}

inline void axpy(double a, const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

inline void project_out(const std::vector<std::vector<double>>& basis, std::vector<double>& w) {
    for (const auto& v : basis) axpy(-dot(v, w), v, w);
}

struct LanczosPair {
    double value = 0.0;
    std::vector<double> vector;
    double residual = 0.0;
    int matvecs = 0;
};

/// Lowest eigenpair of H restricted to the complement of `deflate`.
inline LanczosPair lanczos_lowest(const HamiltonianSpec& h, const std::vector<std::vector<double>>& deflate,
                                  const LanczosOptions& opt, std::uint64_t seed) {
    const std::size_t dim = std::size_t{1} << h.L;
    const int m_mem = static_cast<int>(std::max<std::size_t>(20, opt.memory_budget / (8 * dim)));
    const int m_max = static_cast<int>(std::min<std::size_t>({static_cast<std::size_t>(opt.max_krylov),
                                                              static_cast<std::size_t>(m_mem), dim}));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v0(dim);
    for (auto& x : v0) x = u(rng);
    LanczosPair out;
    double prev_value = std::numeric_limits<double>::infinity();
    for (int restart = 0; restart <= opt.max_restarts; ++restart) {
        project_out(deflate, v0);
        const double n0 = std::sqrt(dot(v0, v0));
        if (!(n0 > 0.0)) throw NumericalError("lanczos: start vector vanished after deflation");
        for (auto& x : v0) x /= n0;
        std::vector<std::vector<double>> V{v0};
        std::vector<double> alpha, beta;
        std::vector<double> w;
        Eigen::VectorXd y;
        double theta = 0.0;
        double resid = 0.0;
        bool invariant = false;
        for (int j = 0; j < m_max; ++j) {
            apply_hamiltonian(h, V[j], w);
            ++out.matvecs;
            project_out(deflate, w);
            const double a = dot(V[j], w);
            alpha.push_back(a);
            axpy(-a, V[j], w);
            if (j > 0) axpy(-beta[j - 1], V[j - 1], w);
            for (int pass = 0; pass < 2; ++pass) {
                project_out(V, w);
                project_out(deflate, w);
            }
            const double b = std::sqrt(dot(w, w));
            const int m = j + 1;
            Eigen::VectorXd d = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
            Eigen::VectorXd e(std::max(m - 1, 0));
            for (int i = 0; i + 1 < m; ++i) e[i] = beta[i];
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
            es.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
            theta = es.eigenvalues()[0];
            y = es.eigenvectors().col(0);
            resid = std::abs(b * y[m - 1]);
            const double scale = std::max(1.0, std::abs(theta));
            if (b <= 1e-13 * scale) {
                invariant = true;
                resid = 0.0;
                break;
            }
            if (resid <= opt.residual_tol * scale) break;
            beta.push_back(b);
            if (j + 1 < m_max) {
                for (auto& x : w) x /= b;
                V.push_back(w);
            }
        }
        std::vector<double> ritz(dim, 0.0);
        for (int i = 0; i < static_cast<int>(y.size()); ++i) axpy(y[i], V[i], ritz);
        const double nr = std::sqrt(dot(ritz, ritz));
        for (auto& x : ritz) x /= nr;
        out.value = theta;
        out.vector = std::move(ritz);
        out.residual = resid;
        const double scale = std::max(1.0, std::abs(theta));
        if (invariant || resid <= opt.residual_tol * scale) return out;
        if (restart > 4 && std::abs(prev_value - theta) < 1e-15 * scale && resid < 1e-6 * scale) return out;
        prev_value = theta;
        v0 = out.vector;
    }
    throw NumericalError("lanczos: no convergence, residual " + std::to_string(out.residual));
}

inline StateVector to_state(int L, std::vector<double> v) {
    std::size_t big = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (std::abs(v[i]) > std::abs(v[big]) * (1.0 + 1e-12)) big = i;
    const double sign = v[big] < 0 ? -1.0 : 1.0;
    StateVector s;
    s.L = L;
    s.amp.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) s.amp[i] = sign * v[i];
    return s;
}

}  // namespace detail

/// Lowest eigenpair by restarted Lanczos with full reorthogonalization.
/// With probe_degeneracy, further runs deflated against the vectors found so
/// far collect the whole (numerically) degenerate ground space.
inline GroundState ground_state(const HamiltonianSpec& h, const LanczosOptions& opt = {}) {
    h.validate();
    detail::check_exact_size(h.L);
    std::vector<std::vector<double>> found;
    auto first = detail::lanczos_lowest(h, found, opt, opt.seed);
    GroundState g;
    g.energy = first.value;
    g.residual = first.residual;
    g.matvecs = first.matvecs;
    found.push_back(first.vector);
    const std::size_t dim = std::size_t{1} << h.L;
    if (opt.probe_degeneracy) {
        const double tol = opt.degeneracy_tol * std::max(1.0, std::abs(g.energy));
        while (found.size() < std::min<std::size_t>(dim, 8)) {
            auto next = detail::lanczos_lowest(h, found, opt, opt.seed + 7919 * found.size());
            g.matvecs += next.matvecs;
            g.next_energy = next.value;
            if (next.value - g.energy > tol) break;
            found.push_back(std::move(next.vector));
        }
        g.degenerate = found.size() > 1;
    }
    for (auto& v : found) g.ground_space.push_back(detail::to_state(h.L, v));
    g.state = g.ground_space.front();
    return g;
}

}  // namespace nqs
