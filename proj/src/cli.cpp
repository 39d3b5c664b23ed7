#include "rb/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rb/distances.hpp"
#include "rb/engine.hpp"
#include "rb/estimate.hpp"
#include "rb/flicker.hpp"
#include "rb/leakage.hpp"
#include "rb/noise.hpp"
#include "rb/ptm.hpp"

namespace rb::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Typed field access with unknown-key rejection.
class Fields {
  public:
    Fields(const json& j, std::string context)
        : j_(j), ctx_(std::move(context)) {
        if (!j_.is_object()) throw SchemaError(ctx_ + ": expected an object");
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key) && !j_[key].is_null();
    }

    template <typename T>
    T require(const std::string& key) {
        seen_.insert(key);
        if (!j_.contains(key) || j_[key].is_null())
            throw SchemaError(ctx_ + ": missing required field '" + key + "'");
        return get<T>(key);
    }

    template <typename T>
    T optional(const std::string& key, T fallback) {
        if (!has(key)) return fallback;
        return get<T>(key);
    }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        return j_.at(key);
    }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.count(key))
                throw SchemaError(ctx_ + ": unknown field '" + key + "'");
        }
    }

  private:
    template <typename T>
    T get(const std::string& key) {
        try {
            return j_.at(key).get<T>();
        } catch (const json::exception&) {
            throw SchemaError(ctx_ + ": field '" + key + "' has the wrong type");
        }
    }

    const json& j_;
    std::string ctx_;
    std::set<std::string> seen_;
};

json normalize_noise(const json& raw, const std::string& ctx,
                     bool leakage_expected) {
    Fields f(raw, ctx);
    json out;
    const std::string kind_name = f.require<std::string>("kind");
    NoiseKind kind;
    try {
        kind = noise_kind_from_name(kind_name);
    } catch (const std::invalid_argument& e) {
        throw SchemaError(ctx + ": " + e.what());
    }
    const bool is_leakage =
        kind == NoiseKind::leakage_fixed || kind == NoiseKind::leakage_random;
    if (leakage_expected && !is_leakage)
        throw SchemaError(ctx + ": kind must be a leakage model");
    if (!leakage_expected && is_leakage)
        throw SchemaError(ctx + ": leakage kinds belong to the leakage subcommand");
    out["kind"] = kind_name;
    const double r = f.optional<double>("r", 0.0);
    if (r < 0.0) throw SchemaError(ctx + ": field 'r' must be >= 0");
    if (kind != NoiseKind::none && !(r > 0.0) &&
        !(kind == NoiseKind::depolarizing))
        throw SchemaError(ctx + ": field 'r' must be > 0 for this kind");
    out["r"] = r;
    out["seed"] = f.optional<std::uint64_t>("seed", 0);
    out["n_steps"] = f.optional<long>("n_steps", 2000000L);
    if (out["n_steps"].get<long>() < 1)
        throw SchemaError(ctx + ": field 'n_steps' must be >= 1");
    f.finish();
    return out;
}

NoiseModelConfig noise_from_json(const json& j) {
    NoiseModelConfig cfg;
    cfg.kind = noise_kind_from_name(j.at("kind").get<std::string>());
    cfg.r = j.at("r").get<double>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.n_steps = j.at("n_steps").get<long>();
    return cfg;
}

json normalize_m_grid(Fields& f, const std::string& ctx) {
    if (f.has("m_grid")) {
        if (f.has("m_max"))
            throw SchemaError(ctx + ": give either 'm_grid' or 'm_max', not both");
        auto grid = f.raw("m_grid");
        if (!grid.is_array() || grid.empty())
            throw SchemaError(ctx + ": field 'm_grid' must be a nonempty array");
        std::vector<int> out;
        for (const auto& v : grid) {
            if (!v.is_number_integer() || v.get<int>() < 1)
                throw SchemaError(ctx + ": field 'm_grid' entries must be positive integers");
            out.push_back(v.get<int>());
        }
        for (size_t i = 1; i < out.size(); ++i)
            if (out[i] <= out[i - 1])
                throw SchemaError(ctx + ": field 'm_grid' must be strictly increasing");
        return json(out);
    }
    const int m_max = f.optional<int>("m_max", 4096);
    if (m_max < 1) throw SchemaError(ctx + ": field 'm_max' must be >= 1");
    return json(default_m_grid(m_max));
}

std::uint64_t require_seed(Fields& f, const std::string& ctx) {
    // reproducibility contract: no wall-clock fallback
    if (!f.has("seed"))
        throw SchemaError(ctx + ": missing required field 'seed'");
    return f.require<std::uint64_t>("seed");
}

json normalize_plan(const std::string& subcommand, const json& raw) {
    json out;
    out["subcommand"] = subcommand;
    Fields f(raw, "plan");
    out["seed"] = require_seed(f, "plan");

    if (subcommand == "srb" || subcommand == "irb" || subcommand == "leakage") {
        const int k = f.optional<int>("k", 10000);
        if (k < 1) throw SchemaError("plan: field 'k' must be >= 1");
        out["k"] = k;
        out["m_grid"] = normalize_m_grid(f, "plan");
        if (f.has("shots")) {
            const long shots = f.require<long>("shots");
            if (shots < 1) throw SchemaError("plan: field 'shots' must be >= 1");
            out["shots"] = shots;
        } else {
            out["shots"] = nullptr;
        }
        out["noise"] = normalize_noise(f.raw("noise"), "plan.noise",
                                       subcommand == "leakage");
        if (subcommand == "irb") {
            Fields fi(f.raw("interleaved"), "plan.interleaved");
            json inter;
            const int gate = fi.optional<int>("gate", 16);
            if (gate < 0 || gate > 23)
                throw SchemaError("plan.interleaved: field 'gate' must be 0..23");
            inter["gate"] = gate;
            inter["noise"] = normalize_noise(fi.raw("noise"),
                                             "plan.interleaved.noise", false);
            fi.finish();
            out["interleaved"] = inter;
        }
    } else if (subcommand == "flicker-ramsey") {
        if (f.has("a_prime") == f.has("target_r"))
            throw SchemaError("plan: give exactly one of 'a_prime' or 'target_r'");
        if (f.has("a_prime")) out["a_prime"] = f.require<double>("a_prime");
        if (f.has("target_r")) {
            const double r = f.require<double>("target_r");
            if (!(r > 0.0)) throw SchemaError("plan: field 'target_r' must be > 0");
            out["target_r"] = r;
        }
        const long n_steps = f.optional<long>("n_steps", 1200L);
        if (n_steps < 40) throw SchemaError("plan: field 'n_steps' must be >= 40");
        out["n_steps"] = n_steps;
        const int ensemble = f.optional<int>("ensemble", 2000);
        if (ensemble < 1) throw SchemaError("plan: field 'ensemble' must be >= 1");
        out["ensemble"] = ensemble;
        const int psd_tracks = f.optional<int>("psd_tracks", 100);
        if (psd_tracks < 0) throw SchemaError("plan: field 'psd_tracks' must be >= 0");
        out["psd_tracks"] = psd_tracks;
    } else if (subcommand == "flicker-rb") {
        if (f.has("a_prime") == f.has("target_r"))
            throw SchemaError("plan: give exactly one of 'a_prime' or 'target_r'");
        if (f.has("a_prime")) out["a_prime"] = f.require<double>("a_prime");
        if (f.has("target_r")) {
            const double r = f.require<double>("target_r");
            if (!(r > 0.0)) throw SchemaError("plan: field 'target_r' must be > 0");
            out["target_r"] = r;
        }
        const int k = f.optional<int>("k", 2500);
        if (k < 1) throw SchemaError("plan: field 'k' must be >= 1");
        out["k"] = k;
        out["m_grid"] = normalize_m_grid(f, "plan");
        out["identity_gates"] = f.optional<bool>("identity_gates", false);
    } else if (subcommand == "distances") {
        json rates = json::array({1e-4, 1e-3, 1e-2});
        if (f.has("rates")) {
            rates = f.raw("rates");
            if (!rates.is_array() || rates.empty())
                throw SchemaError("plan: field 'rates' must be a nonempty array");
            for (const auto& v : rates)
                if (!v.is_number() || !(v.get<double>() > 0.0))
                    throw SchemaError("plan: field 'rates' entries must be > 0");
        }
        out["rates"] = rates;
        const int draws = f.optional<int>("draws", 1);
        if (draws < 1) throw SchemaError("plan: field 'draws' must be >= 1");
        out["draws"] = draws;
        out["check_brute_force"] = f.optional<bool>("check_brute_force", false);
        // depolarizing comparator: the generated channel's own exact rate,
        // or the nominal target rate
        const std::string comparator =
            f.optional<std::string>("comparator", "exact_r");
        if (comparator != "exact_r" && comparator != "target_r")
            throw SchemaError(
                "plan: field 'comparator' must be exact_r or target_r");
        out["comparator"] = comparator;
    } else if (subcommand == "sweep") {
        json ks = json::array({10, 30, 100, 300, 1000, 3000, 10000});
        if (f.has("k_values")) {
            ks = f.raw("k_values");
            if (!ks.is_array() || ks.empty())
                throw SchemaError("plan: field 'k_values' must be a nonempty array");
            for (const auto& v : ks)
                if (!v.is_number_integer() || v.get<int>() < 1)
                    throw SchemaError("plan: field 'k_values' entries must be >= 1");
        }
        out["k_values"] = ks;
        out["m_grid"] = normalize_m_grid(f, "plan");
        out["noise"] = normalize_noise(f.raw("noise"), "plan.noise", false);
        out["repeats"] = f.optional<int>("repeats", 1);
        if (out["repeats"].get<int>() < 1)
            throw SchemaError("plan: field 'repeats' must be >= 1");
    } else {
        throw SchemaError("unknown subcommand '" + subcommand + "'");
    }
    f.finish();
    return out;
}

// --- output helpers --------------------------------------------------------

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot open " + path.string());
    out << content;
    if (!out) throw std::ios_base::failure("write failed for " + path.string());
}

std::string series_payload(const DecaySeries& s, const std::string& format) {
    if (format == "csv") return to_csv(s);
    json j;
    j["m"] = s.m;
    j["f_mean"] = s.f_mean;
    j["f_stderr"] = s.f_stderr;
    j["k"] = s.k;
    j["meta"] = s.meta.empty() ? json() : json::parse(s.meta);
    return j.dump(2);
}

std::string series_name(const std::string& stem, const std::string& format) {
    return stem + (format == "csv" ? ".csv" : ".json");
}

struct Artifacts {
    fs::path dir;
    json manifest_files = json::array();

    void add(const std::string& name, const std::string& content) {
        write_file(dir / name, content);
        manifest_files.push_back(name);
    }
};

ExperimentPlan engine_plan(const json& plan, std::uint64_t seed) {
    ExperimentPlan p;
    p.protocol =
        plan["subcommand"] == "irb" ? Protocol::irb : Protocol::srb;
    p.k = plan["k"].get<int>();
    p.m_grid = plan["m_grid"].get<std::vector<int>>();
    if (!plan["shots"].is_null()) p.shots = plan["shots"].get<long>();
    p.noise = noise_from_json(plan["noise"]);
    if (plan.contains("interleaved")) {
        InterleavedSpec spec;
        spec.gate = plan["interleaved"]["gate"].get<int>();
        spec.noise = noise_from_json(plan["interleaved"]["noise"]);
        p.interleaved = spec;
    }
    p.seed = seed;
    return p;
}

// --- subcommand drivers ------------------------------------------------------

int run_srb_cmd(const json& plan, const RunConfig& cfg, Artifacts& art) {
    ExperimentPlan p = engine_plan(plan, plan["seed"].get<std::uint64_t>());
    const NoiseModel model = NoiseModel::build(p.noise, p.k);
    DecaySeries s = run_srb(p, cfg.threads);
    art.add(series_name("series", cfg.format), series_payload(s, cfg.format));
    const bool leakage = plan["subcommand"] == "leakage";
    FitResult f = fit(s, leakage ? ModelKind::dual_exponential
                                 : ModelKind::exponential);
    const double true_r = model.true_average_error();
    art.add("fit.json",
            fit_result_to_json(f, true_r > 0.0 ? std::optional<double>(true_r)
                                               : std::nullopt));
    return f.converged ? kOk : kFitError;
}

int run_irb_cmd(const json& plan, const RunConfig& cfg, Artifacts& art) {
    ExperimentPlan p = engine_plan(plan, plan["seed"].get<std::uint64_t>());
    auto [reference, interleaved] = run_irb(p, cfg.threads);
    art.add(series_name("reference", cfg.format),
            series_payload(reference, cfg.format));
    art.add(series_name("interleaved", cfg.format),
            series_payload(interleaved, cfg.format));
    FitResult fr = fit(reference, ModelKind::exponential);
    FitResult fi = fit(interleaved, ModelKind::exponential);
    const NoiseModel int_model = NoiseModel::build(p.interleaved->noise, p.k);
    const double true_int = int_model.true_average_error();
    art.add("fit_reference.json", fit_result_to_json(fr));
    art.add("fit_interleaved.json", fit_result_to_json(fi));

    const double r_int = irb_estimate_r(fr.alpha(), fi.alpha());
    // error propagation through r = (1 - a_int/a)(d-1)/d at 90% interval
    const double da = fr.ci90_half(0), dai = fi.ci90_half(0);
    const double ratio = fi.alpha() / fr.alpha();
    const double dr = 0.5 * ratio *
                      std::sqrt(std::pow(dai / fi.alpha(), 2) +
                                std::pow(da / fr.alpha(), 2));
    json j;
    j["alpha_reference"] = fr.alpha();
    j["alpha_interleaved"] = fi.alpha();
    j["r_int_estimate"] = r_int;
    j["r_int_ci90"] = dr;
    j["negative"] = r_int < 0.0;
    // the estimate is unreliable once its own interval reaches zero
    j["reliable"] = r_int > dr;
    if (true_int > 0.0) {
        j["true_r_int"] = true_int;
        if (r_int > 0.0) j["mu_int"] = std::log10(r_int / true_int);
    }
    art.add("irb_estimate.json", j.dump(2));
    return fr.converged && fi.converged ? kOk : kFitError;
}

int run_flicker_ramsey_cmd(const json& plan, const RunConfig& cfg,
                           Artifacts& art) {
    const std::uint64_t seed = plan["seed"].get<std::uint64_t>();
    RamseyConfig rc;
    rc.n_steps = plan["n_steps"].get<long>();
    rc.ensemble = plan["ensemble"].get<int>();
    rc.seed = seed;
    rc.a_prime = plan.contains("a_prime")
                     ? plan["a_prime"].get<double>()
                     : calibrate_flicker_amplitude_ramsey(
                           plan["target_r"].get<double>(), rc.n_steps,
                           child_seed(seed, 1), cfg.threads);
    RamseyResult rr = ramsey(rc, cfg.threads);

    std::ostringstream coh;
    coh << "t,sigma\n";
    for (size_t i = 0; i < rr.time.size(); ++i)
        coh << format_double(rr.time[i]) << ','
            << format_double(rr.coherence[i]) << '\n';
    art.add("coherence.csv", coh.str());

    const int psd_tracks = plan["psd_tracks"].get<int>();
    if (psd_tracks > 0) {
        std::vector<std::vector<double>> tracks;
        for (int i = 0; i < psd_tracks; ++i) {
            Rng rng(child_seed(seed, i, 0x9D));
            tracks.push_back(
                sample_flicker(rc.a_prime, 1.0, rc.n_steps, 50, rng).xi);
        }
        PsdEstimate psd = average_periodogram(tracks, 1.0);
        std::ostringstream ps;
        ps << "f,S\n";
        for (size_t i = 0; i < psd.freq.size(); ++i)
            ps << format_double(psd.freq[i]) << ','
               << format_double(psd.power[i]) << '\n';
        art.add("psd.csv", ps.str());
    }

    json j;
    j["a_prime"] = rc.a_prime;
    j["t2_crossing"] = rr.t2_crossing;
    j["crossed"] = rr.crossed;
    j["t2_gaussian"] = rr.t2_gaussian;
    j["t2_exponential"] = rr.t2_exponential;
    j["gaussian_rms"] = rr.gaussian_rms;
    j["exponential_rms"] = rr.exponential_rms;
    j["gate_fidelity"] = rr.gate_fidelity;
    j["gate_error"] = 1.0 - rr.gate_fidelity;
    art.add("ramsey.json", j.dump(2));
    return kOk;
}

int run_flicker_rb_cmd(const json& plan, const RunConfig& cfg,
                       Artifacts& art) {
    const std::uint64_t seed = plan["seed"].get<std::uint64_t>();
    FlickerRbConfig fc;
    fc.k = plan["k"].get<int>();
    fc.m_grid = plan["m_grid"].get<std::vector<int>>();
    fc.identity_gates = plan["identity_gates"].get<bool>();
    fc.seed = seed;
    fc.a_prime = plan.contains("a_prime")
                     ? plan["a_prime"].get<double>()
                     : calibrate_flicker_amplitude_rb(
                           plan["target_r"].get<double>(), fc.m_grid,
                           child_seed(seed, 1), cfg.threads);
    DecaySeries s = run_flicker_rb(fc, cfg.threads);
    art.add(series_name("series", cfg.format), series_payload(s, cfg.format));

    FitResult fe = fit(s, ModelKind::exponential);
    art.add("fit.json", fit_result_to_json(fe));
    json extra;
    extra["a_prime"] = fc.a_prime;
    if (fc.identity_gates) {
        FitResult fg = fit(s, ModelKind::gaussian);
        art.add("fit_gaussian.json", fit_result_to_json(fg));
        extra["gaussian_rms"] =
            std::sqrt(fg.residuals.squaredNorm() / fg.residuals.size());
        extra["exponential_rms"] =
            std::sqrt(fe.residuals.squaredNorm() / fe.residuals.size());
    }
    art.add("flicker_rb.json", extra.dump(2));
    return fe.converged ? kOk : kFitError;
}

int run_distances_cmd(const json& plan, const RunConfig& cfg, Artifacts& art) {
    const std::uint64_t seed = plan["seed"].get<std::uint64_t>();
    const int draws = plan["draws"].get<int>();
    const bool check_brute = plan["check_brute_force"].get<bool>();
    const bool exact_comparator = plan["comparator"] == "exact_r";
    std::ostringstream csv;
    csv << "r,model,distance,draws\n";
    double worst_gap = 0.0;
    for (const auto& rv : plan["rates"]) {
        const double r = rv.get<double>();
        int model_idx = 0;
        for (const char* model : {"unitary", "cptp", "amplitude_damping"}) {
            double acc = 0.0;
            for (int d = 0; d < draws; ++d) {
                Rng rng(child_seed(seed, model_idx, d,
                                   static_cast<std::uint64_t>(r * 1e9)));
                Ptm channel = Ptm::identity(2);
                if (model_idx == 0) channel = random_unitary_error(r, rng);
                if (model_idx == 1) channel = random_cptp(r, rng);
                if (model_idx == 2)
                    channel = amplitude_damping_generators(r, 2000)[0];
                const double r_dep =
                    exact_comparator ? error_rate(channel) : r;
                const Ptm dep = Ptm::depolarizing(2, 1.0 - 2.0 * r_dep);
                const DiamondResult sdp = diamond_distance(channel, dep);
                acc += sdp.value;
                if (check_brute) {
                    const DiamondResult brute = diamond_distance(
                        channel, dep, DiamondMethod::brute_force);
                    worst_gap =
                        std::max(worst_gap, std::abs(sdp.value - brute.value));
                }
            }
            csv << format_double(r) << ',' << model << ','
                << format_double(acc / draws) << ',' << draws << '\n';
            ++model_idx;
        }
    }
    art.add("distances.csv", csv.str());
    if (check_brute) {
        json j;
        j["max_sdp_brute_gap"] = worst_gap;
        art.add("method_check.json", j.dump(2));
    }
    return kOk;
}

int run_sweep_cmd(const json& plan, const RunConfig& cfg, Artifacts& art) {
    const std::uint64_t seed = plan["seed"].get<std::uint64_t>();
    const int repeats = plan["repeats"].get<int>();
    ExperimentPlan base;
    base.protocol = Protocol::srb;
    base.m_grid = plan["m_grid"].get<std::vector<int>>();
    base.noise = noise_from_json(plan["noise"]);
    const NoiseModel model = NoiseModel::build(base.noise, 1);
    const double true_r = model.true_average_error();

    std::ostringstream csv;
    csv << "K,mu,C,r_hat,converged\n";
    std::optional<int> smallest_good_k;
    bool all_converged = true;
    for (const auto& kv : plan["k_values"]) {
        const int k = kv.get<int>();
        double mu_acc = 0.0, c_acc = 0.0, r_acc = 0.0;
        int mu_count = 0;
        bool converged = true;
        for (int rep = 0; rep < repeats; ++rep) {
            ExperimentPlan p = base;
            p.k = k;
            p.seed = child_seed(seed, static_cast<std::uint64_t>(k), rep);
            DecaySeries s = run_srb(p, cfg.threads);
            FitResult f = fit(s, ModelKind::exponential);
            converged = converged && f.converged;
            const auto ac = accuracy_and_confidence(f, true_r);
            if (ac.mu) {
                mu_acc += *ac.mu;
                ++mu_count;
            }
            c_acc += ac.confidence;
            r_acc += f.r_hat();
        }
        all_converged = all_converged && converged;
        const double mu = mu_count ? mu_acc / mu_count : 0.0;
        const double c = c_acc / repeats;
        csv << k << ',' << (mu_count ? format_double(mu) : "nan") << ','
            << format_double(c) << ',' << format_double(r_acc / repeats) << ','
            << (converged ? 1 : 0) << '\n';
        if (!smallest_good_k && mu_count == repeats && std::abs(mu) <= 0.3)
            smallest_good_k = k;
    }
    art.add("sweep.csv", csv.str());

    json j;
    j["true_r"] = true_r;
    // worst-case per-point count from the concentration bound, for contrast
    // with the joint-fit K that already reaches a factor-of-two estimate
    j["hoeffding_k"] = hoeffding_k(0.1, 1e-4, 1.0);
    j["hoeffding_delta"] = 0.1;
    j["hoeffding_epsilon"] = 1e-4;
    if (smallest_good_k)
        j["smallest_k_within_factor_two"] = *smallest_good_k;
    else
        j["smallest_k_within_factor_two"] = nullptr;
    art.add("sweep.json", j.dump(2));
    return all_converged ? kOk : kFitError;
}

}  // namespace

std::string validate_plan(const std::string& subcommand,
                          const std::string& plan_text) {
    json raw;
    try {
        raw = json::parse(plan_text);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("plan: invalid JSON: ") + e.what());
    }
    return normalize_plan(subcommand, raw).dump(2);
}

std::string plan_hash(const std::string& normalized_plan) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : normalized_plan) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(h));
    return std::string(buf);
}

int run(const RunConfig& cfg) {
    if (cfg.threads < 1) {
        std::cerr << "error: --threads must be >= 1\n";
        return kSchemaError;
    }
    if (cfg.format != "csv" && cfg.format != "json") {
        std::cerr << "error: --format must be csv or json\n";
        return kSchemaError;
    }

    std::string plan_text;
    {
        std::ifstream in(cfg.plan_path, std::ios::binary);
        if (!in) {
            std::cerr << "error: cannot read plan file '" << cfg.plan_path
                      << "'\n";
            return kIoError;
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        plan_text = buf.str();
    }

    json plan;
    try {
        json raw = json::parse(plan_text);
        if (cfg.seed_override) raw["seed"] = *cfg.seed_override;
        plan = json::parse(validate_plan(cfg.subcommand, raw.dump()));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kSchemaError;
    }

    const std::string normalized = plan.dump(2);
    const std::string hash = plan_hash(normalized);

    try {
        Artifacts art;
        art.dir = fs::path(cfg.out_dir) / hash;
        fs::create_directories(art.dir);
        art.add("plan.json", normalized);

        int code = kOk;
        if (cfg.subcommand == "srb" || cfg.subcommand == "leakage") {
            code = run_srb_cmd(plan, cfg, art);
        } else if (cfg.subcommand == "irb") {
            code = run_irb_cmd(plan, cfg, art);
        } else if (cfg.subcommand == "flicker-ramsey") {
            code = run_flicker_ramsey_cmd(plan, cfg, art);
        } else if (cfg.subcommand == "flicker-rb") {
            code = run_flicker_rb_cmd(plan, cfg, art);
        } else if (cfg.subcommand == "distances") {
            code = run_distances_cmd(plan, cfg, art);
        } else if (cfg.subcommand == "sweep") {
            code = run_sweep_cmd(plan, cfg, art);
        }

        json manifest;
        manifest["version"] = kVersion;
        manifest["subcommand"] = cfg.subcommand;
        manifest["plan_hash"] = hash;
        manifest["plan"] = plan;
        manifest["threads"] = cfg.threads;
        manifest["format"] = cfg.format;
        manifest["exit_code"] = code;
        manifest["outputs"] = art.manifest_files;
        write_file(art.dir / "manifest.json", manifest.dump(2));
        std::cout << art.dir.string() << '\n';
        return code;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return kIoError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kSchemaError;
    }
}

}  // namespace rb::cli
