#include "scatpoles/cli.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace scatpoles::cli {

namespace {

using json = nlohmann::json;
using ordered = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

constexpr const char* kVersion = "scatpoles 1.0";
constexpr double kPairTol = 1e-6;

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!ok.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
}

cplx complex_from(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw ConfigError(where + " must be a [re, im] pair");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<cplx> complex_list(const json& j, const std::string& where) {
    if (!j.is_array()) throw ConfigError(where + " must be an array of [re, im] pairs");
    std::vector<cplx> out;
    for (const auto& e : j) out.push_back(complex_from(e, where));
    return out;
}

ordered complex_json(cplx z) { return ordered::array({z.real(), z.imag()}); }

geometry::CurveKind curve_kind(const std::string& s) {
    if (s == "disk") return geometry::CurveKind::disk;
    if (s == "peanut") return geometry::CurveKind::peanut;
    if (s == "acorn") return geometry::CurveKind::acorn;
    if (s == "radial_trig") return geometry::CurveKind::radial_trig;
    throw ConfigError("unknown curve kind '" + s + "'");
}

template <typename T>
void read(const json& j, const char* key, T& into) {
    if (j.contains(key)) into = j.at(key).get<T>();
}

std::string format_pole(cplx k) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.15f %c %.15fi", k.real(), k.imag() < 0.0 ? '-' : '+', std::abs(k.imag()));
    return buf;
}

struct Output {
    std::string name;
    std::string content;
};

class Run {
public:
    Run(const RunConfig& config, std::string command) : config_(config), command_(std::move(command)) {}

    void time(const std::string& stage, Clock::time_point since) {
        timings_[stage] = std::chrono::duration<double>(Clock::now() - since).count();
    }
    void note(std::string s) { notes_.push_back(std::move(s)); }
    void warn(std::string s) { warnings_.push_back(std::move(s)); }
    void add(std::string suffix, std::string content) {
        outputs_.push_back({config_.prefix + "_" + suffix, std::move(content)});
    }
    ordered& extra() { return extra_; }

    // Result files first, then the manifest naming them.
    void write(int exit_code) const {
        const std::filesystem::path dir(config_.out_dir);
        std::filesystem::create_directories(dir);
        ordered manifest;
        manifest["tool"] = kVersion;
        manifest["command"] = command_;
        manifest["exit_code"] = exit_code;
        manifest["seed"] = config_.seed;
        manifest["config"] = config_.to_json();
        manifest["outputs"] = ordered::array();
        for (const Output& o : outputs_) {
            std::ofstream f(dir / o.name, std::ios::binary);
            f << o.content;
            if (!f) throw std::runtime_error("cannot write " + (dir / o.name).string());
            manifest["outputs"].push_back(o.name);
        }
        manifest["timings_s"] = ordered::object();
        for (const auto& [k, v] : timings_) manifest["timings_s"][k] = v;
        manifest["notes"] = notes_;
        manifest["warnings"] = warnings_;
        for (auto it = extra_.begin(); it != extra_.end(); ++it) manifest[it.key()] = it.value();
        std::ofstream f(dir / (config_.prefix + "_" + command_ + "_manifest.json"), std::ios::binary);
        f << manifest.dump(2) << "\n";
    }

private:
    const RunConfig& config_;
    std::string command_;
    std::map<std::string, double> timings_;
    std::vector<std::string> notes_, warnings_;
    std::vector<Output> outputs_;
    ordered extra_ = ordered::object();
};

std::string flavor_label(OperatorFlavor f) { return f == OperatorFlavor::S_n ? "single" : "double"; }

// Pairs S_n and I + D_n poles by distance; unmatched entries stay alone.
struct PoleRow {
    std::optional<nepsolve::PoleEstimate> s, d;
};

std::vector<PoleRow> pair_flavors(const std::vector<nepsolve::PoleEstimate>& poles, double tol) {
    std::vector<PoleRow> rows;
    std::vector<nepsolve::PoleEstimate> d;
    for (const auto& p : poles) {
        if (p.flavor == OperatorFlavor::S_n) {
            rows.push_back({p, std::nullopt});
        } else {
            d.push_back(p);
        }
    }
    std::vector<bool> used(d.size(), false);
    for (PoleRow& r : rows) {
        double best = tol;
        int pick = -1;
        for (std::size_t k = 0; k < d.size(); ++k) {
            const double dist = std::abs(d[k].kappa - r.s->kappa);
            if (!used[k] && dist < best) {
                best = dist;
                pick = static_cast<int>(k);
            }
        }
        if (pick >= 0) {
            used[pick] = true;
            r.d = d[pick];
        }
    }
    for (std::size_t k = 0; k < d.size(); ++k) {
        if (!used[k]) rows.push_back({std::nullopt, d[k]});
    }
    auto key = [](const PoleRow& r) { return r.s ? r.s->kappa : r.d->kappa; };
    std::stable_sort(rows.begin(), rows.end(), [&](const PoleRow& a, const PoleRow& b) {
        const cplx ka = key(a), kb = key(b);
        return ka.real() != kb.real() ? ka.real() < kb.real() : ka.imag() < kb.imag();
    });
    return rows;
}

int fail(std::ostream& log, int code, const std::string& what) {
    log << "error: " << what << "\n";
    return code;
}

}  // namespace

geometry::Curve CurveSpec::build() const {
    switch (kind) {
        case geometry::CurveKind::disk:
            return geometry::Curve::disk(radius);
        case geometry::CurveKind::peanut:
            return geometry::Curve::peanut();
        case geometry::CurveKind::acorn:
            return geometry::Curve::acorn();
        case geometry::CurveKind::radial_trig:
            return geometry::Curve::radial_trig(cosine, sine);
    }
    throw ConfigError("bad curve kind");
}

std::vector<OperatorFlavor> RunConfig::flavors() const {
    if (flavor == "single") return {OperatorFlavor::S_n};
    if (flavor == "double") return {OperatorFlavor::I_plus_D_n};
    return {OperatorFlavor::S_n, OperatorFlavor::I_plus_D_n};
}

void RunConfig::validate() const {
    try {
        (void)curve.build();
        region.validate();
        indicator.validate();
        refine.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (flavor != "single" && flavor != "double" && flavor != "both") {
        throw ConfigError("flavor must be single, double or both");
    }
    if (n < 2 || n > 256) throw ConfigError("n must lie in [2, 256]");
    for (int k : n_list) {
        if (k < 2 || k > 256) throw ConfigError("n_list entries must lie in [2, 256]");
    }
    if (scan_n < 0 || scan_n == 1 || scan_n > 256) throw ConfigError("scan_n must be 0 or lie in [2, 256]");
    if (reference_n < 0 || reference_n == 1 || reference_n > 256) {
        throw ConfigError("reference_n must be 0 or lie in [2, 256]");
    }
    if (!std::isfinite(candidate_threshold)) throw ConfigError("candidate_threshold must be finite");
    if (nu_max < 2 || nu_max > specfun::kMaxRecurrenceOrder) throw ConfigError("nu_max must lie in [2, 40]");
    if (oracle_seeds < 1 || oracle_seeds > 1000) throw ConfigError("oracle_seeds must lie in [1, 1000]");
    if (threads < 1 || threads > 1024) throw ConfigError("threads must lie in [1, 1024]");
    if (prefix.empty() || prefix.find('/') != std::string::npos) throw ConfigError("output prefix must be a plain name");
    if (out_dir.empty()) throw ConfigError("output dir must not be empty");
    for (cplx z : candidates) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw ConfigError("candidates must be finite");
    }
    for (cplx z : targets) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw ConfigError("targets must be finite");
    }
}

ordered RunConfig::to_json() const {
    ordered j;
    j["curve"] = {{"kind", geometry::to_string(curve.kind)}};
    if (curve.kind == geometry::CurveKind::disk) j["curve"]["radius"] = curve.radius;
    if (curve.kind == geometry::CurveKind::radial_trig) {
        j["curve"]["cos"] = curve.cosine;
        j["curve"]["sin"] = curve.sine;
    }
    j["flavor"] = flavor;
    j["n"] = n;
    j["n_list"] = n_list;
    j["scan_n"] = scan_n;
    j["reference_n"] = reference_n;
    j["region"] = {{"re_min", region.re_min}, {"re_max", region.re_max}, {"im_min", region.im_min}, {"im_max", region.im_max}};
    j["grid"] = {{"n_re", region.n_re}, {"n_im", region.n_im}};
    j["indicator"] = {{"r", indicator.radius}, {"m", indicator.m}, {"center", complex_json(indicator.center)}};
    j["candidate_threshold"] = candidate_threshold;
    j["refine"] = {{"R", refine.radius},
                   {"m_prime", refine.nodes},
                   {"block", refine.block},
                   {"rank_tol", refine.rank_tol},
                   {"accept_residual", refine.accept_residual},
                   {"polish", refine.polish}};
    j["candidates"] = ordered::array();
    for (cplx z : candidates) j["candidates"].push_back(complex_json(z));
    j["targets"] = ordered::array();
    for (cplx z : targets) j["targets"].push_back(complex_json(z));
    j["nu_max"] = nu_max;
    j["oracle_seeds"] = oracle_seeds;
    j["seed"] = seed;
    j["threads"] = threads;
    j["output"] = {{"dir", out_dir}, {"prefix", prefix}};
    return j;
}

RunConfig config_from_json(const json& j) {
    RunConfig c;
    try {
        check_keys(j, "config",
                   {"curve", "flavor", "n", "n_list", "scan_n", "reference_n", "region", "grid", "indicator",
                    "candidate_threshold", "refine", "candidates", "targets", "nu_max", "oracle_seeds", "seed",
                    "threads", "output"});
        if (j.contains("curve")) {
            const json& cj = j.at("curve");
            check_keys(cj, "curve", {"kind", "radius", "cos", "sin"});
            if (cj.contains("kind")) c.curve.kind = curve_kind(cj.at("kind").get<std::string>());
            read(cj, "radius", c.curve.radius);
            read(cj, "cos", c.curve.cosine);
            read(cj, "sin", c.curve.sine);
        }
        read(j, "flavor", c.flavor);
        read(j, "n", c.n);
        read(j, "n_list", c.n_list);
        read(j, "scan_n", c.scan_n);
        read(j, "reference_n", c.reference_n);
        if (j.contains("region")) {
            const json& r = j.at("region");
            check_keys(r, "region", {"re_min", "re_max", "im_min", "im_max"});
            read(r, "re_min", c.region.re_min);
            read(r, "re_max", c.region.re_max);
            read(r, "im_min", c.region.im_min);
            read(r, "im_max", c.region.im_max);
        }
        if (j.contains("grid")) {
            const json& g = j.at("grid");
            check_keys(g, "grid", {"n_re", "n_im"});
            read(g, "n_re", c.region.n_re);
            read(g, "n_im", c.region.n_im);
        }
        if (j.contains("indicator")) {
            const json& ind = j.at("indicator");
            check_keys(ind, "indicator", {"r", "m", "center"});
            read(ind, "r", c.indicator.radius);
            read(ind, "m", c.indicator.m);
            if (ind.contains("center")) c.indicator.center = complex_from(ind.at("center"), "indicator.center");
        }
        read(j, "candidate_threshold", c.candidate_threshold);
        if (j.contains("refine")) {
            const json& r = j.at("refine");
            check_keys(r, "refine", {"R", "m_prime", "block", "rank_tol", "accept_residual", "polish"});
            read(r, "R", c.refine.radius);
            read(r, "m_prime", c.refine.nodes);
            read(r, "block", c.refine.block);
            read(r, "rank_tol", c.refine.rank_tol);
            read(r, "accept_residual", c.refine.accept_residual);
            read(r, "polish", c.refine.polish);
        }
        if (j.contains("candidates")) c.candidates = complex_list(j.at("candidates"), "candidates");
        if (j.contains("targets")) c.targets = complex_list(j.at("targets"), "targets");
        read(j, "nu_max", c.nu_max);
        read(j, "oracle_seeds", c.oracle_seeds);
        read(j, "seed", c.seed);
        read(j, "threads", c.threads);
        if (j.contains("output")) {
            const json& o = j.at("output");
            check_keys(o, "output", {"dir", "prefix"});
            read(o, "dir", c.out_dir);
            read(o, "prefix", c.prefix);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return config_from_json(j);
}

void apply_overrides(RunConfig& config, const Overrides& flags, const char* env_threads) {
    if (env_threads != nullptr && *env_threads != '\0') {
        char* end = nullptr;
        const long v = std::strtol(env_threads, &end, 10);
        if (*end != '\0' || v < 1 || v > 1024) throw ConfigError(std::string(kThreadsEnv) + " must be an integer in [1, 1024]");
        config.threads = static_cast<int>(v);
    }
    if (flags.n) config.n = *flags.n;
    if (flags.flavor) config.flavor = *flags.flavor;
    if (flags.threads) config.threads = *flags.threads;
    if (flags.seed) config.seed = *flags.seed;
    if (flags.out_dir) config.out_dir = *flags.out_dir;
    if (flags.prefix) config.prefix = *flags.prefix;
    if (flags.nu_max) config.nu_max = *flags.nu_max;
    config.validate();
}

void write_pole_table(std::ostream& out, const std::vector<nepsolve::PoleEstimate>& poles) {
    const auto rows = pair_flavors(poles, 1e-4);
    const int n = poles.empty() ? 0 : poles.front().n;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-4s | %-8s | %-38s | %-38s\n", "#", "n", "S_n(kappa)", "I+D_n(kappa)");
    out << buf << std::string(96, '-') << "\n";
    int index = 1;
    for (const PoleRow& r : rows) {
        const std::string s = r.s ? format_pole(r.s->kappa) : "-";
        const std::string d = r.d ? format_pole(r.d->kappa) : "-";
        std::snprintf(buf, sizeof buf, "%-4d | %-8d | %-38s | %-38s\n", index++, r.s ? r.s->n : (r.d ? r.d->n : n),
                      s.c_str(), d.c_str());
        out << buf;
    }
}

int cmd_scan(const RunConfig& config, std::ostream& log) {
    Run run(config, "scan");
    const geometry::Curve curve = config.curve.build();
    const int n = config.scan_n > 0 ? config.scan_n : config.n;
    int code = kExitOk;
    for (OperatorFlavor f : config.flavors()) {
        const auto t0 = Clock::now();
        const auto field = nepsolve::scan_region(curve, n, f, config.region, config.indicator, config.seed, config.threads);
        run.time("scan_" + flavor_label(f), t0);
        std::ostringstream csv;
        nepsolve::write_field_csv(csv, field);
        run.add("scan_" + flavor_label(f) + ".csv", csv.str());
        const auto failed = std::count_if(field.errors.begin(), field.errors.end(), [](const std::string& e) { return !e.empty(); });
        run.note(flavor_label(f) + ": " + std::to_string(field.rim.size()) + " points at n = " + std::to_string(n) +
                 ", max log10 RIM " + std::to_string(field.max_log10()));
        for (std::size_t k = 0; k < field.errors.size(); ++k) {
            if (!field.errors[k].empty()) run.warn(flavor_label(f) + " point " + std::to_string(k) + ": " + field.errors[k]);
        }
        if (failed == static_cast<long>(field.rim.size())) code = kExitNumerical;
    }
    run.write(code);
    if (code != kExitOk) log << "error: every scan point failed\n";
    return code;
}

int cmd_poles(const RunConfig& config, std::ostream& log) {
    Run run(config, "poles");
    const geometry::Curve curve = config.curve.build();
    nepsolve::RefineOptions opt = config.refine;
    opt.seed = config.seed;
    opt.threads = config.threads;
    std::vector<nepsolve::PoleEstimate> poles;
    ordered candidates_json = ordered::object();
    try {
        for (OperatorFlavor f : config.flavors()) {
            std::vector<nepsolve::Candidate> cands;
            if (!config.candidates.empty()) {
                for (cplx z : config.candidates) cands.push_back({z, 0.0});
                run.note(flavor_label(f) + ": " + std::to_string(cands.size()) + " candidates supplied by config");
            } else {
                const auto t0 = Clock::now();
                const auto field = nepsolve::scan_region(curve, config.effective_scan_n(), f, config.region, config.indicator,
                                                         config.seed, config.threads);
                run.time("scan_" + flavor_label(f), t0);
                cands = nepsolve::find_candidates(field, config.candidate_threshold);
                run.note(flavor_label(f) + ": scan at n = " + std::to_string(config.effective_scan_n()) + " gave " +
                         std::to_string(cands.size()) + " candidates");
            }
            candidates_json[flavor_label(f)] = ordered::array();
            for (const auto& c : cands) candidates_json[flavor_label(f)].push_back(complex_json(c.kappa));
            const auto t1 = Clock::now();
            const auto refined = nepsolve::refine_poles(curve, config.n, f, cands, config.region, opt);
            run.time("refine_" + flavor_label(f), t1);
            for (const auto& w : refined.warnings) run.warn(flavor_label(f) + ": " + w);
            poles.insert(poles.end(), refined.poles.begin(), refined.poles.end());
        }
    } catch (const nepsolve::IllConditionedError& e) {
        run.warn(e.what());
        run.write(kExitNumerical);
        return fail(log, kExitNumerical, e.what());
    } catch (const nepsolve::SingularShiftError& e) {
        run.warn(e.what());
        run.write(kExitNumerical);
        return fail(log, kExitNumerical, e.what());
    }
    run.extra()["candidates"] = candidates_json;

    if (config.flavors().size() == 2) {
        double worst = 0.0;
        int unmatched = 0;
        for (const PoleRow& r : pair_flavors(poles, kPairTol)) {
            if (r.s && r.d) {
                worst = std::max(worst, std::abs(r.s->kappa - r.d->kappa));
            } else {
                ++unmatched;
            }
        }
        run.extra()["flavor_agreement"] = {{"max_difference", worst}, {"unmatched", unmatched}};
        if (unmatched > 0) run.warn(std::to_string(unmatched) + " poles found by one flavor only");
    }

    std::ostringstream js, table;
    nepsolve::write_poles_json(js, poles, config.seed);
    write_pole_table(table, poles);
    run.add("poles.json", js.str());
    run.add("poles.txt", table.str());
    run.note(std::to_string(poles.size()) + " poles");
    run.write(kExitOk);
    return kExitOk;
}

int cmd_convergence(const RunConfig& config, std::ostream& log) {
    if (config.n_list.empty()) return fail(log, kExitConfig, "convergence needs a non-empty n_list");
    const bool disk = config.curve.kind == geometry::CurveKind::disk && config.curve.radius == 1.0;
    if (config.targets.empty() && !disk) return fail(log, kExitConfig, "convergence needs targets for this curve");

    Run run(config, "convergence");
    const geometry::Curve curve = config.curve.build();
    nepsolve::RefineOptions opt = config.refine;
    opt.seed = config.seed;
    opt.threads = config.threads;
    const double radius = opt.radius > 0.0 ? opt.radius : config.region.cell_diagonal();

    std::vector<cplx> targets = config.targets;
    std::vector<diskoracle::HankelZero> zeros;
    if (disk) {
        const auto t0 = Clock::now();
        diskoracle::OracleOptions oo;
        oo.seeds_re = oo.seeds_im = config.oracle_seeds;
        oo.threads = config.threads;
        zeros = diskoracle::hankel_zeros_in_region(config.nu_max, config.region, oo).zeros;
        run.time("oracle", t0);
        if (targets.empty()) {
            for (const auto& z : zeros) targets.push_back(z.kappa);
        }
    }

    // nearest refined pole to `near` within the refinement radius
    auto solve = [&](int n, OperatorFlavor f, cplx near) -> std::optional<cplx> {
        const auto r = nepsolve::refine_poles(curve, n, f, {{near, 0.0}}, config.region, opt);
        std::optional<cplx> best;
        for (const auto& p : r.poles) {
            if (std::abs(p.kappa - near) < radius && (!best || std::abs(p.kappa - near) < std::abs(*best - near))) best = p.kappa;
        }
        return best;
    };

    const auto flavors = config.flavors();
    const int ref_n = config.reference_n > 0 ? config.reference_n : *std::max_element(config.n_list.begin(), config.n_list.end());
    std::ostringstream csv, table;
    csv << "target,n,ref_re,ref_im,S_re,S_im,ae_S,D_re,D_im,ae_D\n";
    char buf[512];
    try {
        const auto t0 = Clock::now();
        for (std::size_t t = 0; t < targets.size(); ++t) {
            std::map<OperatorFlavor, cplx> ref;
            for (OperatorFlavor f : flavors) {
                if (disk) {
                    if (zeros.empty()) throw NumericalFailure("no Hankel zero available as reference");
                    const auto z = std::min_element(zeros.begin(), zeros.end(), [&](const auto& a, const auto& b) {
                        return std::abs(a.kappa - targets[t]) < std::abs(b.kappa - targets[t]);
                    });
                    if (std::abs(z->kappa - targets[t]) > radius) throw NumericalFailure("target has no nearby Hankel zero");
                    ref[f] = z->kappa;
                } else {
                    const auto r = solve(ref_n, f, targets[t]);
                    if (!r) throw NumericalFailure("no reference pole near target at n = " + std::to_string(ref_n));
                    ref[f] = *r;
                }
            }
            table << "target " << t + 1 << "\n";
            std::snprintf(buf, sizeof buf, "%-6s | %-38s | %-38s\n", "n", "S_n(kappa)", "I+D_n(kappa)");
            table << buf << std::string(88, '-') << "\n";
            for (int n : config.n_list) {
                std::map<OperatorFlavor, cplx> got;
                for (OperatorFlavor f : flavors) {
                    const auto r = solve(n, f, ref[f]);
                    if (!r) throw NumericalFailure("no pole near target " + std::to_string(t + 1) + " at n = " + std::to_string(n));
                    got[f] = *r;
                }
                const cplx rk = ref.begin()->second;
                auto col = [&](OperatorFlavor f, std::string& re, std::string& im, std::string& ae) {
                    if (!got.count(f)) {
                        re = im = ae = "nan";
                        return;
                    }
                    char b[64];
                    std::snprintf(b, sizeof b, "%.17g", got[f].real());
                    re = b;
                    std::snprintf(b, sizeof b, "%.17g", got[f].imag());
                    im = b;
                    std::snprintf(b, sizeof b, "%.17g", std::abs(got[f] - ref[f]));
                    ae = b;
                };
                std::string sre, sim, sae, dre, dim, dae;
                col(OperatorFlavor::S_n, sre, sim, sae);
                col(OperatorFlavor::I_plus_D_n, dre, dim, dae);
                std::snprintf(buf, sizeof buf, "%zu,%d,%.17g,%.17g,%s,%s,%s,%s,%s,%s\n", t + 1, n, rk.real(), rk.imag(),
                              sre.c_str(), sim.c_str(), sae.c_str(), dre.c_str(), dim.c_str(), dae.c_str());
                csv << buf;
                const std::string s = got.count(OperatorFlavor::S_n) ? format_pole(got[OperatorFlavor::S_n]) : "-";
                const std::string d = got.count(OperatorFlavor::I_plus_D_n) ? format_pole(got[OperatorFlavor::I_plus_D_n]) : "-";
                std::snprintf(buf, sizeof buf, "%-6d | %-38s | %-38s\n", n, s.c_str(), d.c_str());
                table << buf;
            }
            table << "\n";
        }
        run.time("refine", t0);
    } catch (const NumericalFailure& e) {
        run.warn(e.what());
        run.write(kExitNumerical);
        return fail(log, kExitNumerical, e.what());
    } catch (const nepsolve::IllConditionedError& e) {
        run.warn(e.what());
        run.write(kExitNumerical);
        return fail(log, kExitNumerical, e.what());
    } catch (const nepsolve::SingularShiftError& e) {
        run.warn(e.what());
        run.write(kExitNumerical);
        return fail(log, kExitNumerical, e.what());
    }
    run.note(disk ? "reference: Hankel zeros" : "reference: n = " + std::to_string(ref_n));
    run.add("convergence.csv", csv.str());
    run.add("convergence.txt", table.str());
    run.write(kExitOk);
    return kExitOk;
}

int cmd_disk_oracle(const RunConfig& config, std::ostream& log) {
    Run run(config, "disk-oracle");
    if (config.curve.kind != geometry::CurveKind::disk || config.curve.radius != 1.0) {
        run.warn("curve setting ignored: the oracle is the unit disk");
    }
    diskoracle::OracleOptions oo;
    oo.seeds_re = oo.seeds_im = config.oracle_seeds;
    oo.threads = config.threads;
    const auto t0 = Clock::now();
    const auto found = diskoracle::hankel_zeros_in_region(config.nu_max, config.region, oo);
    run.time("newton", t0);
    int code = kExitOk;
    ordered rows = ordered::array();
    try {
        const auto t1 = Clock::now();
        for (const auto& r : diskoracle::completeness(found.zeros, config.nu_max, config.region)) {
            rows.push_back({{"nu", r.nu}, {"newton", r.newton}, {"argument_principle", r.counted}});
            if (r.newton != r.counted) {
                code = kExitNumerical;
                run.warn("completeness mismatch for nu = " + std::to_string(r.nu));
            }
        }
        run.time("argument_principle", t1);
    } catch (const std::exception& e) {
        code = kExitNumerical;
        run.warn(e.what());
    }
    run.extra()["completeness"] = rows;
    run.note(std::to_string(found.zeros.size()) + " zeros, " + std::to_string(found.dropped) + " seeds dropped");
    std::ostringstream js;
    diskoracle::write_zeros_json(js, found.zeros);
    run.add("zeros.json", js.str());
    run.write(code);
    if (code != kExitOk) log << "error: completeness check failed\n";
    return code;
}

int main(int argc, char** argv) {
    CLI::App app{"Scattering poles of sound-soft obstacles by Fourier-Galerkin boundary integral matrices"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    std::string config_path;
    Overrides flags;
    int n = 0, threads = 0, nu_max = 0;
    std::uint64_t seed = 0;
    std::string flavor, out_dir, prefix;

    const std::vector<std::pair<std::string, std::string>> commands{
        {"scan", "indicator heat map over the search region"},
        {"poles", "scan, refine and tabulate poles"},
        {"convergence", "pole error against n"},
        {"disk-oracle", "zeros of H_nu for the unit disk"}};
    std::vector<CLI::App*> subs;
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("-c,--config", config_path, "JSON run configuration");
        sub->add_option("--n", n, "truncation order");
        sub->add_option("--flavor", flavor, "single, double or both");
        sub->add_option("--threads", threads, "worker threads");
        sub->add_option("--seed", seed, "RNG seed");
        sub->add_option("--out-dir", out_dir, "output directory");
        sub->add_option("--prefix", prefix, "output file prefix");
        sub->add_option("--nu-max", nu_max, "highest Hankel order for the oracle");
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    CLI::App* chosen = nullptr;
    for (CLI::App* s : subs) {
        if (s->parsed()) chosen = s;
    }
    auto given = [&](const char* opt) { return chosen->count(opt) > 0; };
    if (given("--n")) flags.n = n;
    if (given("--flavor")) flags.flavor = flavor;
    if (given("--threads")) flags.threads = threads;
    if (given("--seed")) flags.seed = seed;
    if (given("--out-dir")) flags.out_dir = out_dir;
    if (given("--prefix")) flags.prefix = prefix;
    if (given("--nu-max")) flags.nu_max = nu_max;

    RunConfig config;
    try {
        if (!config_path.empty()) config = load_config(config_path);
        apply_overrides(config, flags, std::getenv(kThreadsEnv));
    } catch (const ConfigError& e) {
        return fail(std::cerr, kExitConfig, e.what());
    }

    const std::string name = chosen->get_name();
    try {
        if (name == "scan") return cmd_scan(config, std::cerr);
        if (name == "poles") return cmd_poles(config, std::cerr);
        if (name == "convergence") return cmd_convergence(config, std::cerr);
        return cmd_disk_oracle(config, std::cerr);
    } catch (const ConfigError& e) {
        return fail(std::cerr, kExitConfig, e.what());
    } catch (const std::exception& e) {
        return fail(std::cerr, kExitNumerical, e.what());
    }
}

}  // namespace scatpoles::cli
