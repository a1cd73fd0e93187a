#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "nqs/bounds.hpp"
#include "nqs/error.hpp"
#include "nqs/exact.hpp"
#include "nqs/hamiltonian.hpp"
#include "nqs/profile.hpp"
#include "nqs/rbm.hpp"
#include "nqs/vmc.hpp"

namespace nqs {

inline constexpr const char* kVersion = "0.1.0";

using json = nlohmann::json;

namespace io {

inline json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx cplx_from(const json& j, const char* what) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ArgumentError(std::string(what) + ": complex numbers are encoded as [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

template <class T>
T field(const json& j, const char* key, const char* what) {
    if (!j.is_object() || !j.contains(key)) throw ArgumentError(std::string(what) + ": missing key '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ArgumentError(std::string(what) + ": bad value for '" + key + "': " + e.what());
    }
}

template <class T>
T field_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ArgumentError(std::string("bad value for '") + key + "': " + e.what());
    }
}

inline json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ArgumentError("cannot parse " + path.string() + ": " + e.what());
    }
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

inline void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace io

// RBM parameters

inline json to_json(const RbmParams& p) {
    json a = json::array(), b = json::array(), W = json::array();
    for (Eigen::Index j = 0; j < p.a.size(); ++j) a.push_back(io::cplx_json(p.a[j]));
    for (Eigen::Index k = 0; k < p.b.size(); ++k) b.push_back(io::cplx_json(p.b[k]));
    for (Eigen::Index j = 0; j < p.W.rows(); ++j) {
        json row = json::array();
        for (Eigen::Index k = 0; k < p.W.cols(); ++k) row.push_back(io::cplx_json(p.W(j, k)));
        W.push_back(std::move(row));
    }
    return {{"L", p.L}, {"Nh", p.Nh()}, {"a", a}, {"b", b}, {"W", W}};
}

inline json to_json(const TranslationInvariantRbm& t) {
    json b = json::array(), f = json::array();
    for (Eigen::Index k = 0; k < t.b_level.size(); ++k) b.push_back(io::cplx_json(t.b_level[k]));
    for (Eigen::Index k = 0; k < t.filters.rows(); ++k) {
        json row = json::array();
        for (Eigen::Index r = 0; r < t.filters.cols(); ++r) row.push_back(io::cplx_json(t.filters(k, r)));
        f.push_back(std::move(row));
    }
    return {{"L", t.L}, {"alpha", t.alpha()}, {"a0", io::cplx_json(t.a0)}, {"b_level", b}, {"filters", f}};
}

inline bool is_translation_invariant_json(const json& j) { return j.is_object() && j.contains("filters"); }

inline TranslationInvariantRbm ti_from_json(const json& j) {
    const int L = io::field<int>(j, "L", "rbm");
    const int alpha = io::field<int>(j, "alpha", "rbm");
    detail::require(L >= 1 && L <= kMaxSites && alpha >= 0, "rbm: bad L or alpha");
    auto t = TranslationInvariantRbm::zeros(L, alpha);
    t.a0 = io::cplx_from(io::field<json>(j, "a0", "rbm"), "a0");
    const auto b = io::field<json>(j, "b_level", "rbm");
    const auto f = io::field<json>(j, "filters", "rbm");
    detail::require(b.is_array() && static_cast<int>(b.size()) == alpha, "rbm: b_level must have alpha entries");
    detail::require(f.is_array() && static_cast<int>(f.size()) == alpha, "rbm: filters must have alpha rows");
    for (int k = 0; k < alpha; ++k) {
        t.b_level[k] = io::cplx_from(b[k], "b_level");
        detail::require(f[k].is_array() && static_cast<int>(f[k].size()) == L, "rbm: filter rows must have L entries");
        for (int r = 0; r < L; ++r) t.filters(k, r) = io::cplx_from(f[k][r], "filters");
    }
    t.validate();
    return t;
}

inline RbmParams rbm_from_json(const json& j) {
    if (is_translation_invariant_json(j)) return expand(ti_from_json(j));
    const int L = io::field<int>(j, "L", "rbm");
    const int Nh = io::field<int>(j, "Nh", "rbm");
    detail::require(L >= 1 && L <= kMaxSites && Nh >= 0, "rbm: bad L or Nh");
    auto p = RbmParams::zeros(L, Nh);
    const auto a = io::field<json>(j, "a", "rbm");
    const auto b = io::field<json>(j, "b", "rbm");
    const auto W = io::field<json>(j, "W", "rbm");
    detail::require(a.is_array() && static_cast<int>(a.size()) == L, "rbm: a must have L entries");
    detail::require(b.is_array() && static_cast<int>(b.size()) == Nh, "rbm: b must have Nh entries");
    detail::require(W.is_array() && static_cast<int>(W.size()) == L, "rbm: W must have L rows");
    for (int i = 0; i < L; ++i) p.a[i] = io::cplx_from(a[i], "a");
    for (int k = 0; k < Nh; ++k) p.b[k] = io::cplx_from(b[k], "b");
    for (int i = 0; i < L; ++i) {
        detail::require(W[i].is_array() && static_cast<int>(W[i].size()) == Nh, "rbm: W rows must have Nh entries");
        for (int k = 0; k < Nh; ++k) p.W(i, k) = io::cplx_from(W[i][k], "W");
    }
    p.validate();
    return p;
}

// Decay profiles

inline json to_json(const LevelDecay& d) {
    json j{{"kind", d.name()}};
    switch (d.kind) {
        case LevelDecay::Kind::exponential: j["delta_P"] = d.delta_P; j["shift"] = d.shift; break;
        case LevelDecay::Kind::power: j["alpha_P"] = d.alpha_P; break;
        case LevelDecay::Kind::table: j["table"] = d.table; return j;
        case LevelDecay::Kind::inverse_log: break;
    }
    j["scale"] = d.scale;
    return j;
}

inline LevelDecay level_decay_from_json(const json& j) {
    const auto kind = io::field<std::string>(j, "kind", "lambda");
    LevelDecay d;
    if (kind == "exponential")
        d = LevelDecay::exponential(io::field<double>(j, "delta_P", "lambda"), io::field_or(j, "scale", 1.0),
                                    io::field_or(j, "shift", 0.0));
    else if (kind == "power")
        d = LevelDecay::power(io::field<double>(j, "alpha_P", "lambda"), io::field_or(j, "scale", 1.0));
    else if (kind == "table")
        d = LevelDecay::from_table(io::field<std::vector<double>>(j, "table", "lambda"));
    else if (kind == "inverse_log")
        d = LevelDecay::inverse_log(io::field_or(j, "scale", 1.0));
    else
        throw ArgumentError("lambda: unknown kind '" + kind + "'");
    d.validate();
    return d;
}

inline json to_json(const OrbitalDecay& d) {
    json j{{"kind", d.name()}};
    switch (d.kind) {
        case OrbitalDecay::Kind::power: j["delta_Q"] = d.delta_Q; j["alpha_Q"] = d.alpha_Q; break;
        case OrbitalDecay::Kind::constant: j["mu0"] = d.mu0; break;
        case OrbitalDecay::Kind::table: j["table"] = d.table; break;
    }
    return j;
}

inline OrbitalDecay orbital_decay_from_json(const json& j) {
    const auto kind = io::field<std::string>(j, "kind", "mu");
    OrbitalDecay d;
    if (kind == "power")
        d = OrbitalDecay::power(io::field<double>(j, "delta_Q", "mu"), io::field<double>(j, "alpha_Q", "mu"));
    else if (kind == "constant")
        d = OrbitalDecay::constant(io::field<double>(j, "mu0", "mu"));
    else if (kind == "table")
        d = OrbitalDecay::from_table(io::field<std::vector<double>>(j, "table", "mu"));
    else
        throw ArgumentError("mu: unknown kind '" + kind + "'");
    d.validate();
    return d;
}

inline json to_json(const DecayProfile& p) {
    return {{"lambda", to_json(p.lambda)},
            {"mu", to_json(p.mu)},
            {"c_w", io::cplx_json(p.c_w)},
            {"c_b", io::cplx_json(p.c_b)},
            {"a0", io::cplx_json(p.a0)}};
}

inline DecayProfile profile_from_json(const json& j) {
    DecayProfile p;
    p.lambda = level_decay_from_json(io::field<json>(j, "lambda", "profile"));
    p.mu = orbital_decay_from_json(io::field<json>(j, "mu", "profile"));
    p.c_w = j.contains("c_w") ? io::cplx_from(j["c_w"], "c_w") : cplx{1.0, 0.0};
    p.c_b = j.contains("c_b") ? io::cplx_from(j["c_b"], "c_b") : cplx{0.0, 0.0};
    p.a0 = j.contains("a0") ? io::cplx_from(j["a0"], "a0") : cplx{0.0, 0.0};
    try {
        p.validate();
    } catch (const Error& e) {
        throw ArgumentError(std::string("profile: ") + e.what());
    }
    return p;
}

// Hamiltonians and training configs

inline json to_json(const HamiltonianSpec& h) { return {{"kind", h.name()}, {"L", h.L}, {"field", h.field}}; }

inline HamiltonianSpec hamiltonian_from_json(const json& j) {
    const auto kind = io::field<std::string>(j, "kind", "hamiltonian");
    const int L = io::field<int>(j, "L", "hamiltonian");
    HamiltonianSpec h;
    if (kind == "cluster") h = HamiltonianSpec::cluster(L);
    else if (kind == "tfim") h = HamiltonianSpec::tfim(L, io::field<double>(j, "field", "hamiltonian"));
    else if (kind == "xxz") h = HamiltonianSpec::xxz(L, io::field<double>(j, "field", "hamiltonian"));
    else throw ArgumentError("hamiltonian: unknown kind '" + kind + "'");
    h.validate();
    return h;
}

inline json to_json(const VmcConfig& c) {
    return {{"n_chains", c.n_chains},
            {"sweeps_per_sample", c.sweeps_per_sample},
            {"n_samples", c.n_samples},
            {"burn_in", c.burn_in},
            {"learning_rate", c.learning_rate},
            {"lr_decay_start", c.lr_decay_start},
            {"sr_shift", c.sr_shift},
            {"sr_shift_min", c.sr_shift_min},
            {"sr_shift_decay", c.sr_shift_decay},
            {"n_iterations", c.n_iterations},
            {"init_scale", c.init_scale},
            {"seed", c.seed},
            {"checkpoint_every", c.checkpoint_every}};
}

inline VmcConfig vmc_config_from_json(const json& j) {
    const char* w = "vmc";
    VmcConfig c;
    c.n_chains = io::field<int>(j, "n_chains", w);
    c.sweeps_per_sample = io::field<int>(j, "sweeps_per_sample", w);
    c.n_samples = io::field<int>(j, "n_samples", w);
    c.burn_in = io::field<int>(j, "burn_in", w);
    c.learning_rate = io::field<double>(j, "learning_rate", w);
    c.lr_decay_start = io::field<int>(j, "lr_decay_start", w);
    c.sr_shift = io::field<double>(j, "sr_shift", w);
    c.sr_shift_min = io::field<double>(j, "sr_shift_min", w);
    c.sr_shift_decay = io::field<double>(j, "sr_shift_decay", w);
    c.n_iterations = io::field<int>(j, "n_iterations", w);
    c.init_scale = io::field<double>(j, "init_scale", w);
    c.seed = io::field<std::uint64_t>(j, "seed", w);
    c.checkpoint_every = io::field_or(j, "checkpoint_every", 0);
    try {
        c.validate();
    } catch (const Error& e) {
        throw ArgumentError(e.what());
    }
    return c;
}

// Bounds reports

inline json to_json(const TruncationReport& r) {
    auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    return {{"L", r.L},           {"Nh", r.Nh},
            {"x", r.x},           {"P_tail", r.P_tail},
            {"Q", r.Q},           {"scale", r.scale},
            {"bound1", r.bound1}, {"bound2", r.bound2},
            {"exact1", num(r.exact1)},
            {"exact2", num(r.exact2())},
            {"exact2_zz", num(r.exact2_zz)},
            {"exact2_xx", num(r.exact2_xx)},
            {"R1", r.R1},         {"R2", r.R2},
            {"Theta", r.Theta},   {"n_theta", r.n_theta},
            {"n_I", r.n_I},       {"n_I_bound", r.n_I_bound},
            {"n_I_exact", r.n_I_exact}};
}

// State vectors

/// Little-endian: int64 L, then 2^L (re, im) doubles.
inline void save_state(const std::filesystem::path& path, const StateVector& st) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    const std::int64_t L = st.L;
    out.write(reinterpret_cast<const char*>(&L), sizeof L);
    for (const auto& z : st.amp) {
        const double re = z.real(), im = z.imag();
        out.write(reinterpret_cast<const char*>(&re), sizeof re);
        out.write(reinterpret_cast<const char*>(&im), sizeof im);
    }
}

inline StateVector load_state(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArgumentError("cannot open " + path.string());
    std::int64_t L = 0;
    in.read(reinterpret_cast<char*>(&L), sizeof L);
    if (!in || L < 1 || L > kMaxExactSites) throw ArgumentError("state file: bad header in " + path.string());
    StateVector st;
    st.L = static_cast<int>(L);
    st.amp.resize(std::size_t{1} << L);
    for (auto& z : st.amp) {
        double re = 0, im = 0;
        in.read(reinterpret_cast<char*>(&re), sizeof re);
        in.read(reinterpret_cast<char*>(&im), sizeof im);
        z = {re, im};
    }
    if (!in) throw ArgumentError("state file: truncated " + path.string());
    return st;
}

inline json to_json(const StateVector& st) {
    if (st.L > 12) throw CapacityError("state JSON export is limited to L <= 12");
    json amp = json::array();
    for (const auto& z : st.amp) amp.push_back(io::cplx_json(z));
    return {{"L", st.L}, {"amp", amp}};
}

// CSV

/// Formats a double with 17 significant digits; ints print as integers.
inline std::string format_value(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class CsvTable {
public:
    using Cell = std::variant<std::int64_t, double, std::string>;

    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add(std::vector<Cell> row) {
        detail::require(row.size() == header_.size(), "CsvTable: row width does not match header");
        rows_.push_back(std::move(row));
    }

    [[nodiscard]] std::size_t size() const noexcept { return rows_.size(); }

    /// Numeric cell by row and column name.
    [[nodiscard]] double number(std::size_t row, const std::string& column) const {
        detail::require(row < rows_.size(), "CsvTable: row out of range");
        const auto it = std::find(header_.begin(), header_.end(), column);
        detail::require(it != header_.end(), "CsvTable: no column '" + column + "'");
        const auto& c = rows_[row][static_cast<std::size_t>(it - header_.begin())];
        if (const auto* d = std::get_if<double>(&c)) return *d;
        if (const auto* n = std::get_if<std::int64_t>(&c)) return static_cast<double>(*n);
        throw ArgumentError("CsvTable: column '" + column + "' is not numeric");
    }

    [[nodiscard]] std::string str() const {
        std::string out;
        for (std::size_t i = 0; i < header_.size(); ++i) out += (i ? "," : "") + header_[i];
        out += '\n';
        for (const auto& row : rows_) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) out += ',';
                std::visit(
                    [&](const auto& v) {
                        using T = std::decay_t<decltype(v)>;
                        if constexpr (std::is_same_v<T, double>) out += format_value(v);
                        else if constexpr (std::is_same_v<T, std::int64_t>) out += std::to_string(v);
                        else out += v;
                    },
                    row[i]);
            }
            out += '\n';
        }
        return out;
    }

    void save(const std::filesystem::path& path) const { io::write_text(path, str()); }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<Cell>> rows_;
};

/// Writes `csv` and `csv`.meta.json holding the resolved config.
inline void save_with_meta(const std::filesystem::path& path, const CsvTable& t, const json& config) {
    t.save(path);
    io::write_json(path.string() + ".meta.json", {{"config", config}, {"library_version", kVersion}, {"rows", t.size()}});
}

}  // namespace nqs
