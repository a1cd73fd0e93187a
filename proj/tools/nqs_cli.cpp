// Experiment driver: one subcommand per experiment, CSV + JSON sidecar output.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nqs/nqs.hpp"

namespace fs = std::filesystem;
using namespace nqs;

namespace {

struct Globals {
    std::string config;
    std::uint64_t seed = 1;
    std::string out = "out";
    unsigned threads = 1;
    bool seed_given = false;
};

json base_meta(const Globals& g, const std::string& cmd) {
    return {{"command", cmd}, {"seed", g.seed}, {"threads", g.threads}, {"config_path", g.config}};
}

fs::path out_path(const Globals& g, const std::string& name) { return fs::path(g.out) / name; }

Preset preset_for(const std::string& name, const std::vector<std::string>& allowed) {
    auto p = preset(name);
    if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), name) == allowed.end())
        throw ArgumentError("preset '" + name + "' is not valid for this subcommand");
    return p;
}

DecayProfile profile_source(const Globals& g, const std::string& preset_name, int& L) {
    if (!preset_name.empty()) {
        auto p = preset(preset_name);
        if (p.kind == "kron") throw ArgumentError("preset '" + preset_name + "' has no LRFD profile");
        if (L <= 0) L = p.L;
        return p.profile;
    }
    if (g.config.empty()) throw ArgumentError("need --preset or --config with a profile");
    auto j = io::read_json(g.config);
    if (j.contains("profile")) j = j["profile"];
    if (L <= 0) throw ArgumentError("--L is required with a profile file");
    return profile_from_json(j);
}

void cmd_presets(const Globals& g) {
    CsvTable t({"name", "kind", "L", "alpha", "summary"});
    json list = json::array();
    for (const auto& p : all_presets()) {
        t.add({p.name, p.kind, static_cast<std::int64_t>(p.L), static_cast<std::int64_t>(p.alpha),
               "\"" + p.summary + "\""});
        json e{{"name", p.name}, {"kind", p.kind}, {"summary", p.summary}, {"L", p.L}, {"alpha", p.alpha}};
        if (p.kind != "kron") e["profile"] = to_json(p.profile);
        if (!p.sweep.empty()) e["sweep"] = p.sweep;
        list.push_back(e);
    }
    save_with_meta(out_path(g, "presets.csv"), t, base_meta(g, "presets"));
    io::write_json(out_path(g, "presets.json"), list);
    for (const auto& p : all_presets()) std::cout << p.name << "  " << p.summary << "\n";
}

void cmd_trunc_sweep(const Globals& g, const std::string& name, int L, int nh_max, int proxy) {
    const auto p = preset_for(name, {"fig2a", "fig2b"});
    if (L <= 0) L = p.L;
    const auto r = run_trunc_sweep(p, L, nh_max, proxy);
    auto meta = base_meta(g, "trunc-sweep");
    meta.update({{"preset", name}, {"L", L}, {"nh_max", nh_max}, {"proxy_levels", proxy}, {"n_theta", r.n_theta},
                 {"min_nh", r.min_nh}, {"status", r.status}, {"profile", to_json(p.profile)}});
    save_with_meta(out_path(g, "trunc_sweep_" + name + ".csv"), r.table, meta);
    std::cout << "trunc-sweep " << name << " L=" << L << ": " << r.table.size() << " rows, " << r.status << "\n";
}

void cmd_nh_scaling(const Globals& g, const std::string& name, const std::vector<double>& eps, int lo, int hi,
                    int proxy) {
    const auto p = preset_for(name, {"fig2b", "fig2d"});
    const auto t = run_nh_scaling(p, eps, lo, hi, proxy);
    auto meta = base_meta(g, "nh-scaling");
    meta.update({{"preset", name}, {"eps", eps}, {"L_min", lo}, {"L_max", hi}, {"proxy_levels", proxy}});
    save_with_meta(out_path(g, "nh_scaling.csv"), t, meta);
    std::cout << t.str();
}

void cmd_correlations(const Globals& g, const std::string& name, const std::vector<double>& aq,
                      const std::vector<int>& Ls) {
    const auto p = preset_for(name, {"fig3"});
    const auto t = run_correlations(p, aq.empty() ? p.sweep : aq, Ls);
    auto meta = base_meta(g, "correlations");
    meta.update({{"preset", name}, {"alpha_Q", aq.empty() ? p.sweep : aq}, {"L", Ls}});
    save_with_meta(out_path(g, "correlations.csv"), t, meta);
    std::cout << "correlations: " << t.size() << " rows\n";
}

void cmd_eta(const Globals& g, const std::string& name, const std::string& checkpoint) {
    TranslationInvariantRbm t;
    auto meta = base_meta(g, "eta");
    if (!checkpoint.empty()) {
        t = ti_from_json(io::read_json(checkpoint));
        meta["checkpoint"] = checkpoint;
    } else {
        const auto p = preset_for(name, {"fig1b"});
        t = build_lrfd(p.profile, p.L, p.alpha);
        meta["preset"] = name;
    }
    if (t.L % 2 == 0) throw ArgumentError("eta: L must be odd");
    const auto r = run_eta(t);
    meta.update({{"ridge_slope", r.fit.slope}, {"ridge_slope_skip1", r.fit_skip1.slope}});
    save_with_meta(out_path(g, "eta_grid.csv"), r.grid, meta);
    save_with_meta(out_path(g, "eta_ridge.csv"), r.ridge, meta);
    std::cout << "ridge slope " << format_value(r.fit.slope) << " (levels >= 2: " << format_value(r.fit_skip1.slope)
              << ")\n";
}

void cmd_kron(const Globals& g, const std::string& name, const std::vector<double>& deltas) {
    const auto p = preset_for(name, {"fig5"});
    const auto d = deltas.empty() ? p.sweep : deltas;
    const auto r = run_kron(p, d);
    auto meta = base_meta(g, "kron");
    meta.update({{"preset", name}, {"delta_P", d}, {"mu0", p.mu0}, {"L", p.L}, {"beta3", r.beta3.beta3},
                 {"beta3_x0", r.beta3.x0}, {"beta3_grid", r.beta3.grid}});
    save_with_meta(out_path(g, "kron_spectra.csv"), r.spectra, meta);
    save_with_meta(out_path(g, "kron_ratios.csv"), r.ratios, meta);
    std::cout << r.ratios.str();
}

void cmd_ed(const Globals& g, const std::string& model, int L, double field, const std::string& state_path) {
    HamiltonianSpec h;
    if (model == "cluster") h = HamiltonianSpec::cluster(L);
    else if (model == "tfim") h = HamiltonianSpec::tfim(L, field);
    else if (model == "xxz") h = HamiltonianSpec::xxz(L, field);
    else throw ArgumentError("unknown model '" + model + "'");
    h.validate();
    LanczosOptions opt;
    opt.seed = g.seed;
    const auto gs = ground_state(h, opt);
    json rep{{"hamiltonian", to_json(h)},     {"energy", gs.energy},         {"residual", gs.residual},
             {"matvecs", gs.matvecs},         {"degenerate", gs.degenerate}, {"ground_space_dim", gs.ground_space.size()},
             {"next_energy", gs.next_energy}, {"seed", g.seed}};
    if (!state_path.empty()) {
        save_state(state_path, gs.state);
        rep["state_file"] = state_path;
    }
    io::write_json(out_path(g, "ed.json"), rep);
    std::cout << "E0 = " << format_value(gs.energy) << "\n";
}

void cmd_bound_eval(const Globals& g, const std::string& name, int L, int Nh, bool exact, int proxy) {
    const DecayProfile prof = profile_source(g, name, L);
    LrfdFamily f{prof, 0};
    std::optional<Preset> p;
    if (!name.empty()) {
        p = preset(name);
        f = p->family();
    }
    if (Nh <= 0) Nh = (n_theta(f, L) + 1) * L;
    auto rep = truncation_error_bounds(f, L, Nh);
    if (exact) {
        const Preset src = p ? *p : Preset{"file", "lrfd", "", prof, L, proxy, {}, 0.0};
        const TruncationLadder ladder(preset_rbm(src, L, proxy));
        const int n = Nh / L;
        detail::require(n < proxy, "bound-eval: Nh/L must be below the proxy level count");
        rep.exact1 = ladder.error_l2(proxy, n);
        rep.exact2_zz = ladder.error_expectation(proxy, n, nn_pair(L, 3));
        rep.exact2_xx = ladder.error_expectation(proxy, n, nn_pair(L, 1));
    }
    CsvTable t({"L", "Nh", "x", "P_tail", "Q", "bound1", "bound2", "exact1", "exact2", "R1", "R2", "Theta", "n_theta",
                "n_I"});
    t.add({static_cast<std::int64_t>(rep.L), static_cast<std::int64_t>(rep.Nh), rep.x, rep.P_tail, rep.Q, rep.bound1,
           rep.bound2, rep.exact1, rep.exact2(), rep.R1, rep.R2, rep.Theta, static_cast<std::int64_t>(rep.n_theta),
           static_cast<std::int64_t>(rep.n_I)});
    auto meta = base_meta(g, "bound-eval");
    meta.update({{"profile", to_json(prof)}, {"leading_levels", f.leading_levels}, {"proxy_levels", proxy}});
    save_with_meta(out_path(g, "bound_report.csv"), t, meta);
    io::write_json(out_path(g, "bound_report.json"), to_json(rep));
    std::cout << to_json(rep).dump(2) << "\n";
}

void cmd_classify(const Globals& g, const std::string& name, int L, double eps) {
    const DecayProfile prof = profile_source(g, name, L);
    const auto c = classify_manifold(prof);
    json rep{{"tag", c.tag},
             {"index", c.index},
             {"complexity", c.complexity},
             {"bound_not_tight", c.bound_not_tight},
             {"L", L},
             {"eps", eps},
             {"estimate", c.index ? json(complexity_estimate(c, prof, L, eps)) : json(nullptr)},
             {"profile", to_json(prof)}};
    io::write_json(out_path(g, "classify.json"), rep);
    std::cout << rep.dump(2) << "\n";
}

void cmd_train(const Globals& g) {
    if (g.config.empty()) throw ArgumentError("train needs --config");
    const auto j = io::read_json(g.config);
    const auto h = hamiltonian_from_json(io::field<json>(j, "hamiltonian", "train config"));
    const int alpha = io::field<int>(j, "alpha", "train config");
    auto cfg = vmc_config_from_json(io::field<json>(j, "vmc", "train config"));
    if (g.seed_given) cfg.seed = g.seed;
    const fs::path ck_dir = out_path(g, "checkpoints");
    auto res = train(h, alpha, cfg, [&](int it, const TranslationInvariantRbm& t) {
        io::write_json(ck_dir / ("iter_" + std::to_string(it) + ".json"), to_json(t));
    });
    json meta{{"command", "train"}, {"hamiltonian", to_json(h)}, {"alpha", alpha}, {"vmc", to_json(cfg)},
              {"threads", g.threads}};
    CsvTable trace({"iter", "mean", "stderr", "acceptance"});
    for (std::size_t i = 0; i < res.energy_trace.size(); ++i) {
        const auto& e = res.energy_trace[i];
        trace.add({static_cast<std::int64_t>(i + 1), e.mean, e.stderr_, e.acceptance});
    }
    save_with_meta(out_path(g, "energy_trace.csv"), trace, meta);
    io::write_json(out_path(g, "final_params.json"), to_json(res.final_params));
    json summary{{"final_energy_estimate", res.energy_trace.empty() ? json(nullptr) : json(res.energy_trace.back().mean)},
                 {"exact_energy_of_params", std::isfinite(res.exact_energy) ? json(res.exact_energy) : json(nullptr)},
                 {"fitted_alpha_P", res.fitted_alpha_P},
                 {"fitted_alpha_P_skip1", res.fitted_alpha_P_skip1},
                 {"ridge_slope", res.ridge_slope}};
    if (alpha >= 1 && h.L % 2 == 1) {
        const auto r = run_eta(res.final_params);
        save_with_meta(out_path(g, "eta_grid.csv"), r.grid, meta);
        save_with_meta(out_path(g, "eta_ridge.csv"), r.ridge, meta);
    }
    if (h.L <= 16) {
        LanczosOptions opt;
        opt.seed = cfg.seed;
        const auto gs = ground_state(h, opt);
        summary["lanczos_energy"] = gs.energy;
        if (std::isfinite(res.exact_energy))
            summary["relative_energy_error"] = std::abs(res.exact_energy - gs.energy) / std::abs(gs.energy);
        if (alpha >= 1) save_with_meta(out_path(g, "corr_errors.csv"), truncation_corr_errors(res.final_params, gs.state), meta);
    }
    io::write_json(out_path(g, "train_summary.json"), summary);
    std::cout << summary.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RBM quantum-state experiments"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config, "JSON config (training config, or a decay profile)");
    app.add_option("--seed", g.seed, "master seed");
    app.add_option("--out", g.out, "output directory");
    app.add_option("--threads", g.threads, "worker threads")->check(CLI::Range(1u, 256u));

    auto* presets = app.add_subcommand("presets", "list named parameter sets");

    std::string ts_preset = "fig2b";
    int ts_L = 0, ts_nh = 220, ts_proxy = 60;
    auto* ts = app.add_subcommand("trunc-sweep", "exact vs bound truncation errors over Nh");
    ts->add_option("--preset", ts_preset);
    ts->add_option("--L", ts_L);
    ts->add_option("--nh-max", ts_nh);
    ts->add_option("--proxy", ts_proxy);

    std::string ns_preset = "fig2d";
    std::vector<double> ns_eps{1e-7, 1e-10};
    int ns_lo = 5, ns_hi = 15, ns_proxy = 60;
    auto* ns = app.add_subcommand("nh-scaling", "Nh* against L");
    ns->add_option("--preset", ns_preset);
    ns->add_option("--eps", ns_eps)->delimiter(',');
    ns->add_option("--L-min", ns_lo);
    ns->add_option("--L-max", ns_hi);
    ns->add_option("--proxy", ns_proxy);

    std::string co_preset = "fig3";
    std::vector<double> co_aq;
    std::vector<int> co_L{10, 12, 14, 16, 18, 20, 22};
    auto* co = app.add_subcommand("correlations", "z correlations against distance");
    co->add_option("--preset", co_preset);
    co->add_option("--alpha-Q", co_aq)->delimiter(',');
    co->add_option("--L", co_L)->delimiter(',');

    std::string eta_preset = "fig1b", eta_ck;
    auto* eta = app.add_subcommand("eta", "importance measure surface and ridge");
    eta->add_option("--preset", eta_preset);
    eta->add_option("--checkpoint", eta_ck, "translation-invariant RBM JSON");

    std::string kr_preset = "fig5";
    std::vector<double> kr_d;
    auto* kr = app.add_subcommand("kron", "Kronecker-delta RBM spectra and ratio bound");
    kr->add_option("--preset", kr_preset);
    kr->add_option("--delta-P", kr_d)->delimiter(',');

    auto* tr = app.add_subcommand("train", "VMC training from --config");

    std::string ed_model = "tfim", ed_state;
    int ed_L = 9;
    double ed_field = 1.0;
    auto* ed = app.add_subcommand("ed", "Lanczos ground state");
    ed->add_option("--model", ed_model)->check(CLI::IsMember({"cluster", "tfim", "xxz"}));
    ed->add_option("--L", ed_L);
    ed->add_option("--field", ed_field, "B_x (tfim) or J_z (xxz)");
    ed->add_option("--save-state", ed_state, "binary state vector output");

    std::string be_preset;
    int be_L = 0, be_Nh = 0, be_proxy = 60;
    bool be_exact = false;
    auto* be = app.add_subcommand("bound-eval", "truncation bounds for one (L, Nh)");
    be->add_option("--preset", be_preset);
    be->add_option("--L", be_L);
    be->add_option("--Nh", be_Nh);
    be->add_flag("--exact", be_exact, "also evaluate exact errors against the proxy");
    be->add_option("--proxy", be_proxy);

    std::string cl_preset;
    int cl_L = 0;
    double cl_eps = 1e-3;
    auto* cl = app.add_subcommand("classify", "complexity class of a decay profile");
    cl->add_option("--preset", cl_preset);
    cl->add_option("--L", cl_L);
    cl->add_option("--eps", cl_eps);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        g.seed_given = app.get_option("--seed")->count() > 0;
        set_thread_count(g.threads);
        if (*presets) cmd_presets(g);
        else if (*ts) cmd_trunc_sweep(g, ts_preset, ts_L, ts_nh, ts_proxy);
        else if (*ns) cmd_nh_scaling(g, ns_preset, ns_eps, ns_lo, ns_hi, ns_proxy);
        else if (*co) cmd_correlations(g, co_preset, co_aq, co_L);
        else if (*eta) cmd_eta(g, eta_preset, eta_ck);
        else if (*kr) cmd_kron(g, kr_preset, kr_d);
        else if (*tr) cmd_train(g);
        else if (*ed) cmd_ed(g, ed_model, ed_L, ed_field, ed_state);
        else if (*be) cmd_bound_eval(g, be_preset, be_L, be_Nh, be_exact, be_proxy);
        else if (*cl) cmd_classify(g, cl_preset, cl_L, cl_eps);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
