#include "cograd/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "cograd/bounds.hpp"
#include "cograd/rng.hpp"

namespace cograd::harness {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Config plumbing: schema-checked merge of user JSON over the defaults.
// ---------------------------------------------------------------------------

void merge_checked(json& base, const json& user, const std::string& path) {
    if (!user.is_object())
        throw ConfigError("expected an object at " + (path.empty() ? "<root>" : path));
    for (const auto& [key, value] : user.items()) {
        const std::string here = path.empty() ? key : path + "." + key;
        if (!base.contains(key)) throw ConfigError("unknown config key: " + here);
        if (base[key].is_object() && !base[key].empty()) {
            merge_checked(base[key], value, here);
        } else {
            base[key] = value;
        }
    }
}

double num(const json& j, const std::string& key) {
    if (!j.contains(key) || !j[key].is_number())
        throw ConfigError("expected number at " + key);
    return j[key].get<double>();
}

long integer(const json& j, const std::string& key) {
    const double v = num(j, key);
    if (v != std::floor(v)) throw ConfigError(key + " must be an integer");
    return static_cast<long>(v);
}

Eigen::Vector2d vec2(const json& j, const std::string& key) {
    if (!j.contains(key) || !j[key].is_array() || j[key].size() != 2)
        throw ConfigError(key + " must be a 2-element array");
    return {j[key][0].get<double>(), j[key][1].get<double>()};
}

Eigen::Vector4d vec4(const json& j, const std::string& key) {
    if (!j.contains(key) || !j[key].is_array() || j[key].size() != 4)
        throw ConfigError(key + " must be a 4-element array");
    Eigen::Vector4d v;
    for (int i = 0; i < 4; ++i) v(i) = j[key][i].get<double>();
    return v;
}

Eigen::Matrix2d mat2(const json& j, const std::string& key) {
    if (!j.contains(key) || !j[key].is_array() || j[key].size() != 2 ||
        !j[key][0].is_array() || j[key][0].size() != 2 || j[key][1].size() != 2)
        throw ConfigError(key + " must be a 2x2 array of rows");
    Eigen::Matrix2d m;
    for (int h = 0; h < 2; ++h)
        for (int k = 0; k < 2; ++k) m(h, k) = j[key][h][k].get<double>();
    return m;
}

std::string sanitize(std::string s) {
    for (char& c : s) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        else if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'))) c = '_';
    }
    return s;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace

json ScenarioConfig::default_json() {
    json j;
    j["experiment"] = "spectrum";
    j["trials"] = 200;
    j["seed"] = 1;

    j["spectrum"] = {
        {"a_true", {{0.9, 0.1}, {0.1, 0.9}}},  // rows of the column-stochastic A
        {"pi_true", {0.5, 0.5}},
        {"detector", {{"n_samples", 16}, {"noise_power", 1.0}, {"pfa", 0.1}}},
        {"busy_snr_db", 0.0},
        {"lambda", 0.65},
        {"lambda_grid", {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.65, 0.7, 0.8, 0.9, 1.0}},
        {"pris", 10000},
        {"window", 200},
        {"max_iters", 20},
        {"tol", 1e-6},
        {"warmup_pris", 1000},
        {"block_pris", 500},
    };

    j["tracking"] = {
        {"dwells", 100},
        {"dt", 0.5},
        {"accel_noise_psd", 1.0},
        {"wavelength_m", 0.3},
        {"pfa", 1e-4},
        {"range_var_coeff", 0.81 * 100.0 * 100.0 * 128.0},
        {"velocity_var_coeff", 1.0},
        {"initial_truth", {20000.0, -60.0, 0.0, 30.0}},
        {"initial_cov_diag", {400.0, 16.0, 400.0, 16.0}},
        {"goals",
         {{"range_rmse_goal_m", 10.0},
          {"velocity_rmse_goal_mps", 1.0},
          {"doppler_upper", 0.5},
          {"clutter_lower", 0.05}}},
        {"prf_grid_hz", {2000, 3000, 4000, 5000, 6000, 8000, 10000}},
        {"pulse_count_grid", {32, 64, 128, 256, 512}},
        {"fixed", {{"prf_hz", 6000.0}, {"n_pulses", 128}}},
        {"sinr_db_nominal", 20.0},
        {"sinr_dips",
         {{{"from_dwell", 30}, {"to_dwell", 41}, {"sinr_db", 10.0}},
          {{"from_dwell", 60}, {"to_dwell", 71}, {"sinr_db", 10.0}}}},
    };

    j["passive_selection"] = {
        {"steps", 505},
        {"dt", 1.0},
        {"initial_state", {6500.0, -11.90, 2500.0, -6.05}},
        {"prior_cov_diag", {400.0, 1.0, 400.0, 1.0}},
        {"receiver", {0.0, 0.0}},
        {"channels",
         {{{"id", 1},
           {"waveform", "UMTS"},
           {"tx", {320.32, -320.32}},
           {"wavelength_m", 0.143},
           {"range_std_m", 5.0},
           {"velocity_std_mps", 0.3},
           {"ref_snr_db", 10.0},
           {"ref_range_product_m2", 8.0e5},
           {"pfa", 1e-4}},
          {{"id", 2},
           {"waveform", "FM"},
           {"tx", {25455.8, 25455.8}},
           {"wavelength_m", 3.0},
           {"range_std_m", 10.0},
           {"velocity_std_mps", 1.0},
           {"ref_snr_db", 25.0},
           {"ref_range_product_m2", 6.0e7},  // keeps the FM channel usable along the whole run
           {"pfa", 1e-4}}}},
    };

    j["symbiotic"] = {
        {"n_cpes", 32},
        {"receiver", {0.0, 100.0}},
        {"m_ideal", 8},
        {"n_max", 4},
        {"lambda_sym", 0.95},
        {"p_active", 0.05},
        {"steps", 123},
        {"dt", 1.0},
        {"filter_accel_psd", 0.005},
        {"start", {-400.0, 400.0}},
        {"stop", {400.0, -250.0}},
        {"speed_mps", 8.33},
        {"initial_cov_diag", {9.0, 0.09, 9.0, 0.09}},
        {"placement", {{"radius_m", 600.0}, {"min_range_m", 30.0}}},
        {"cpe",
         {{"wavelength_m", 0.5},
          {"range_std_m", 20.0},
          {"velocity_std_mps", 1.0},
          {"ref_snr_db", 20.0},
          {"ref_range_product_m2", 2.0e4},
          {"pfa", 1e-4}}},
        {"beam_hpbw_deg", 0.0},
    };
    return j;
}

ScenarioConfig ScenarioConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("JSON parse error: ") + e.what());
    }
    return from_json(j);
}

ScenarioConfig ScenarioConfig::from_json(const json& user) {
    json j = default_json();
    merge_checked(j, user, "");

    ScenarioConfig c;
    c.raw = j;
    c.experiment = j["experiment"].get<std::string>();
    if (c.experiment != "spectrum" && c.experiment != "tracking" &&
        c.experiment != "passive_selection" && c.experiment != "symbiotic")
        throw ConfigError("unknown experiment: " + c.experiment);
    c.trials = static_cast<int>(integer(j, "trials"));
    if (c.trials < 1) throw ConfigError("trials must be >= 1");
    c.seed = static_cast<std::uint64_t>(integer(j, "seed"));

    // spectrum -----------------------------------------------------------
    {
        const json& s = j["spectrum"];
        auto& sp = c.spectrum;
        sp.a_true = mat2(s, "a_true");
        const Eigen::Vector2d pi = vec2(s, "pi_true");
        sp.pi_true = pi;
        sp.detector_n_samples = static_cast<int>(integer(s["detector"], "n_samples"));
        sp.detector_noise_power = num(s["detector"], "noise_power");
        sp.detector_pfa = num(s["detector"], "pfa");
        sp.busy_snr_db = num(s, "busy_snr_db");
        sp.lambda = num(s, "lambda");
        sp.lambda_grid.clear();
        for (const auto& v : s["lambda_grid"]) sp.lambda_grid.push_back(v.get<double>());
        if (sp.lambda_grid.empty()) throw ConfigError("lambda_grid must be non-empty");
        sp.pris = integer(s, "pris");
        sp.window = static_cast<int>(integer(s, "window"));
        sp.max_iters = static_cast<int>(integer(s, "max_iters"));
        sp.tol = num(s, "tol");
        sp.warmup_pris = integer(s, "warmup_pris");
        sp.block_pris = integer(s, "block_pris");
        if (sp.pris < 1 || sp.window < 2 || sp.block_pris < 1)
            throw ConfigError("spectrum section: pris >= 1, window >= 2, block_pris >= 1");
    }

    // tracking -----------------------------------------------------------
    {
        const json& t = j["tracking"];
        auto& tr = c.tracking;
        const long dwells = integer(t, "dwells");
        if (dwells < 1) throw ConfigError("tracking.dwells must be >= 1");
        tr.model = tracking::MotionModel::constant_velocity(num(t, "dt"),
                                                            num(t, "accel_noise_psd"));
        tr.radar.wavelength_m = num(t, "wavelength_m");
        tr.radar.pfa = num(t, "pfa");
        tr.radar.range_var_coeff = num(t, "range_var_coeff");
        tr.radar.velocity_var_coeff = num(t, "velocity_var_coeff");
        tr.initial_truth = vec4(t, "initial_truth");
        tr.initial_estimate = tr.initial_truth;
        tr.initial_cov = vec4(t, "initial_cov_diag").asDiagonal();
        tr.goals.range_rmse_goal_m = num(t["goals"], "range_rmse_goal_m");
        tr.goals.velocity_rmse_goal_mps = num(t["goals"], "velocity_rmse_goal_mps");
        tr.goals.doppler_upper = num(t["goals"], "doppler_upper");
        tr.goals.clutter_lower = num(t["goals"], "clutter_lower");
        tr.grids.prfs_hz.clear();
        for (const auto& v : t["prf_grid_hz"]) tr.grids.prfs_hz.push_back(v.get<double>());
        tr.grids.pulse_counts.clear();
        for (const auto& v : t["pulse_count_grid"])
            tr.grids.pulse_counts.push_back(v.get<int>());
        tr.fixed_params.prf_hz = num(t["fixed"], "prf_hz");
        tr.fixed_params.n_pulses = static_cast<int>(integer(t["fixed"], "n_pulses"));
        tr.sinr_db_timeline.assign(static_cast<std::size_t>(dwells),
                                   num(t, "sinr_db_nominal"));
        for (const auto& dip : t["sinr_dips"]) {
            const long a = integer(dip, "from_dwell");
            const long b = integer(dip, "to_dwell");
            if (a < 0 || b > dwells || a >= b)
                throw ConfigError("sinr dip interval out of range");
            for (long k = a; k < b; ++k)
                tr.sinr_db_timeline[static_cast<std::size_t>(k)] = num(dip, "sinr_db");
        }
        tr.seed = c.seed;
    }

    // passive_selection --------------------------------------------------
    {
        const json& p = j["passive_selection"];
        auto& ps = c.passive;
        ps.steps = static_cast<int>(integer(p, "steps"));
        ps.dt = num(p, "dt");
        ps.initial_state = vec4(p, "initial_state");
        ps.prior_cov = vec4(p, "prior_cov_diag").asDiagonal();
        const Eigen::Vector2d rx = vec2(p, "receiver");
        ps.channels.clear();
        if (!p["channels"].is_array() || p["channels"].empty())
            throw ConfigError("passive_selection.channels must be a non-empty array");
        static const std::set<std::string> chan_keys = {
            "id", "waveform", "tx", "wavelength_m", "range_std_m", "velocity_std_mps",
            "ref_snr_db", "ref_range_product_m2", "pfa"};
        for (const auto& cj : p["channels"]) {
            for (const auto& [key, _] : cj.items())
                if (!chan_keys.count(key))
                    throw ConfigError("unknown channel key: " + key);
            tracking::BistaticChannel ch;
            ch.id = static_cast<int>(integer(cj, "id"));
            ch.waveform = cj["waveform"].get<std::string>();
            ch.tx = vec2(cj, "tx");
            ch.rx = rx;
            ch.wavelength = num(cj, "wavelength_m");
            const double sr = num(cj, "range_std_m");
            const double sv = num(cj, "velocity_std_mps");
            ch.r0 = Eigen::Vector2d(sr * sr, sv * sv).asDiagonal();
            ch.ref_snr = db_to_linear(num(cj, "ref_snr_db"));
            ch.ref_range_product = num(cj, "ref_range_product_m2");
            ch.pfa = num(cj, "pfa");
            ch.validate();
            ps.channels.push_back(ch);
        }
        if (ps.steps < 1) throw ConfigError("passive_selection.steps must be >= 1");
    }

    // symbiotic ----------------------------------------------------------
    {
        const json& s = j["symbiotic"];
        auto& sy = c.sym;
        const int n = static_cast<int>(integer(s, "n_cpes"));
        const Eigen::Vector2d rx = vec2(s, "receiver");
        sy.network = symbiotic::CpeNetwork::random_disc(
            n, rx, num(s["placement"], "radius_m"), num(s["placement"], "min_range_m"),
            derive_seed(c.seed, 9001));
        sy.network.ideal_size = static_cast<int>(integer(s, "m_ideal"));
        sy.network.n_max = static_cast<int>(integer(s, "n_max"));
        const json& cpe = s["cpe"];
        for (auto& ch : sy.network.cpes) {
            ch.wavelength = num(cpe, "wavelength_m");
            const double sr = num(cpe, "range_std_m");
            const double sv = num(cpe, "velocity_std_mps");
            ch.r0 = Eigen::Vector2d(sr * sr, sv * sv).asDiagonal();
            ch.ref_snr = db_to_linear(num(cpe, "ref_snr_db"));
            ch.ref_range_product = num(cpe, "ref_range_product_m2");
            ch.pfa = num(cpe, "pfa");
        }
        sy.model = tracking::MotionModel::constant_velocity(num(s, "dt"),
                                                            num(s, "filter_accel_psd"));
        const Eigen::Vector2d start = vec2(s, "start");
        const Eigen::Vector2d stop = vec2(s, "stop");
        const double speed = num(s, "speed_mps");
        if (speed <= 0.0) throw ConfigError("symbiotic.speed_mps must be positive");
        const Eigen::Vector2d dir = (stop - start).normalized();
        sy.initial_truth << start(0), speed * dir(0), start(1), speed * dir(1);
        sy.initial_cov = vec4(s, "initial_cov_diag").asDiagonal();
        sy.lambda_sym = num(s, "lambda_sym");
        sy.p_active = num(s, "p_active");
        sy.steps = static_cast<int>(integer(s, "steps"));
        sy.trials = c.trials;
        sy.seed = c.seed;
        sy.beam_hpbw_rad = num(s, "beam_hpbw_deg") * M_PI / 180.0;
        sy.network.validate();
    }

    return c;
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

namespace {

struct Welford {
    // Fixed-order accumulation keeps aggregation bit-reproducible.
    double sum = 0.0, sumsq = 0.0;
    long n = 0;
    void add(double x) { sum += x; sumsq += x * x; ++n; }
    double mean() const { return n ? sum / n : 0.0; }
    double se() const {
        if (n < 2) return 0.0;
        const double m = mean();
        const double var = std::max(0.0, (sumsq - n * m * m) / (n - 1));
        return std::sqrt(var / n);
    }
};

}  // namespace

RunReport run_spectrum_experiment(const ScenarioConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto& sp = config.spectrum;

    spectrum::HmmModel truth_model;
    truth_model.A = sp.a_true;
    truth_model.B = Eigen::Matrix2d::Identity();
    truth_model.pi = sp.pi_true;
    truth_model.gamma = sp.pi_true;
    truth_model.validate();

    const auto det = sensing::EnergyDetector::from_pfa(
        sp.detector_n_samples, sp.detector_noise_power, sp.detector_pfa);
    const double busy_snr = db_to_linear(sp.busy_snr_db);
    const double busy_power = busy_snr * sp.detector_noise_power;
    const Eigen::Matrix2d B = sensing::roc_to_emission(det, busy_snr);

    const std::size_t n_lambda = sp.lambda_grid.size();
    std::vector<Welford> e0_rate(n_lambda), e1_rate(n_lambda);
    Welford busy_rate;

    const long n_blocks = (sp.pris + sp.block_pris - 1) / sp.block_pris;
    std::vector<double> block_e0(static_cast<std::size_t>(n_blocks), 0.0);
    std::vector<double> block_e1(static_cast<std::size_t>(n_blocks), 0.0);

    for (int trial = 0; trial < config.trials; ++trial) {
        const std::uint64_t trial_seed = derive_seed(config.seed, trial);
        Rng state_rng = make_rng(derive_seed(trial_seed, 0));
        Rng det_rng = make_rng(derive_seed(trial_seed, 1));
        std::uniform_real_distribution<double> unif(0.0, 1.0);

        spectrum::HmmModel model = spectrum::HmmModel::uniform_prior(B);
        spectrum::ObservationWindow window(static_cast<std::size_t>(sp.window));

        std::vector<long> e0(n_lambda, 0), e1(n_lambda, 0);
        long busy_count = 0;

        int s = unif(state_rng) < sp.pi_true(0) ? 0 : 1;
        for (long t = 0; t < sp.pris; ++t) {
            if (t > 0) s = unif(state_rng) < sp.a_true(0, s) ? 0 : 1;
            busy_count += s;

            const int obs = sensing::detect(det, s == 1 ? busy_power : 0.0, det_rng);
            window.push(obs);
            if (window.size() >= 2) {
                const auto bw = spectrum::baum_welch_update(window, B, model,
                                                            sp.max_iters, sp.tol);
                model.A = spectrum::clamp_stochastic(bw.A);
                model.pi = bw.pi;
            }
            spectrum::filter_update(model, obs);
            const double p_so = spectrum::spectrum_opportunity(model);

            for (std::size_t li = 0; li < n_lambda; ++li) {
                const auto d = spectrum::transmit_decision(p_so, sp.lambda_grid[li]);
                const auto ev = spectrum::classify_event(d, s);
                if (ev == spectrum::ErrorEvent::e0) ++e0[li];
                else if (ev == spectrum::ErrorEvent::e1) ++e1[li];
            }
            {
                const auto d = spectrum::transmit_decision(p_so, sp.lambda);
                const auto ev = spectrum::classify_event(d, s);
                const std::size_t b = static_cast<std::size_t>(t / sp.block_pris);
                if (ev == spectrum::ErrorEvent::e0) block_e0[b] += 1.0;
                else if (ev == spectrum::ErrorEvent::e1) block_e1[b] += 1.0;
            }
        }

        const double inv = 1.0 / static_cast<double>(sp.pris);
        for (std::size_t li = 0; li < n_lambda; ++li) {
            e0_rate[li].add(e0[li] * inv);
            e1_rate[li].add(e1[li] * inv);
        }
        busy_rate.add(busy_count * inv);
    }

    RunReport rep;
    rep.experiment = "spectrum";
    rep.seed = config.seed;
    rep.trials = config.trials;
    rep.config_echo = config.raw;

    Table sweep;
    sweep.name = "spectrum";
    sweep.columns = {"lambda", "pr_e0", "se_e0", "pr_e1", "se_e1", "pr_busy"};
    for (std::size_t li = 0; li < n_lambda; ++li)
        sweep.rows.push_back({sp.lambda_grid[li], e0_rate[li].mean(), e0_rate[li].se(),
                              e1_rate[li].mean(), e1_rate[li].se(), busy_rate.mean()});
    rep.tables.push_back(std::move(sweep));

    Table ts;
    ts.name = "timeseries";
    ts.columns = {"block_start_pri", "pr_e0", "pr_e1"};
    for (long b = 0; b < n_blocks; ++b) {
        const long start = b * sp.block_pris;
        const long len = std::min(sp.block_pris, sp.pris - start);
        const double denom = static_cast<double>(len) * config.trials;
        ts.rows.push_back({static_cast<double>(start),
                           block_e0[static_cast<std::size_t>(b)] / denom,
                           block_e1[static_cast<std::size_t>(b)] / denom});
    }
    rep.tables.push_back(std::move(ts));

    rep.elapsed_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

RunReport run_tracking_experiment(const ScenarioConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();

    RunReport rep;
    rep.experiment = "tracking";
    rep.seed = config.seed;
    rep.trials = 1;
    rep.config_echo = config.raw;

    const std::vector<std::string> cols = {
        "time_s", "prf_hz", "n_pulses", "pred_rmse_r", "act_err_r", "pred_rmse_v",
        "act_err_v", "norm_doppler_mean", "norm_doppler_max", "sinr_db"};

    for (auto [mode, name] : {std::pair{controller::Mode::cognitive, "tracking"},
                              std::pair{controller::Mode::fixed, "fixed"}}) {
        const auto log = controller::run_cognitive_track(config.tracking, mode);
        Table t;
        t.name = name;
        t.columns = cols;
        for (const auto& d : log)
            t.rows.push_back({d.time_s, d.prf_hz, static_cast<double>(d.n_pulses),
                              d.pred_rmse_r, d.act_err_r, d.pred_rmse_v, d.act_err_v,
                              d.norm_doppler_mean, d.norm_doppler_max, d.sinr_db});
        rep.tables.push_back(std::move(t));
    }

    rep.elapsed_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

RunReport run_passive_selection_experiment(const ScenarioConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto& ps = config.passive;

    const auto model = tracking::MotionModel::constant_velocity(ps.dt, 0.0);
    const auto dynamic = bounds::fim_track_with_selection(
        ps.initial_state, model, ps.channels, ps.prior_cov, ps.steps);

    std::vector<std::vector<bounds::SelectionStep>> fixed;
    for (const auto& ch : ps.channels)
        fixed.push_back(bounds::fim_track_fixed(ps.initial_state, model, ch,
                                                ps.prior_cov, ps.steps));

    RunReport rep;
    rep.experiment = "passive_selection";
    rep.seed = config.seed;
    rep.trials = 1;
    rep.config_echo = config.raw;

    Table t;
    t.name = "passive_selection";
    t.columns = {"step", "selected_channel", "sqrt_pcrlb_x", "sqrt_pcrlb_y"};
    for (const auto& ch : ps.channels)
        t.columns.push_back("score_" + sanitize(ch.waveform));
    for (const auto& ch : ps.channels) {
        t.columns.push_back(sanitize(ch.waveform) + "_sqrt_pcrlb_x");
        t.columns.push_back(sanitize(ch.waveform) + "_sqrt_pcrlb_y");
    }
    for (std::size_t k = 0; k < dynamic.size(); ++k) {
        std::vector<double> row = {static_cast<double>(dynamic[k].step),
                                   static_cast<double>(dynamic[k].selected_channel),
                                   dynamic[k].sqrt_pcrlb_x, dynamic[k].sqrt_pcrlb_y};
        for (double s : dynamic[k].scores) row.push_back(s);
        for (const auto& series : fixed) {
            row.push_back(series[k].sqrt_pcrlb_x);
            row.push_back(series[k].sqrt_pcrlb_y);
        }
        t.rows.push_back(std::move(row));
    }
    rep.tables.push_back(std::move(t));

    rep.elapsed_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

RunReport run_symbiotic_experiment(const ScenarioConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();

    auto cfg = config.sym;
    const auto with_lambda = symbiotic::run_symbiotic_scenario(
        cfg, symbiotic::SchedulerMode::symbiotic);
    auto cfg0 = cfg;
    cfg0.lambda_sym = 0.0;
    const auto passive_only = symbiotic::run_symbiotic_scenario(
        cfg0, symbiotic::SchedulerMode::symbiotic);
    const auto ideal = symbiotic::run_symbiotic_scenario(
        cfg, symbiotic::SchedulerMode::ideal_set);

    RunReport rep;
    rep.experiment = "symbiotic";
    rep.seed = config.seed;
    rep.trials = config.trials;
    rep.config_echo = config.raw;

    Table t;
    t.name = "symbiotic";
    t.columns = {"step",           "rmse_pos_m",       "mean_n",
                 "trace_achieved", "trace_ideal",      "rmse_pos_lambda0",
                 "rmse_pos_ideal"};
    for (std::size_t k = 0; k < with_lambda.size(); ++k)
        t.rows.push_back({static_cast<double>(with_lambda[k].step),
                          with_lambda[k].rmse_pos_m, with_lambda[k].mean_n,
                          with_lambda[k].mean_trace_achieved,
                          with_lambda[k].mean_trace_ideal, passive_only[k].rmse_pos_m,
                          ideal[k].rmse_pos_m});
    rep.tables.push_back(std::move(t));

    rep.elapsed_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

RunReport run_experiment(const ScenarioConfig& config) {
    if (config.experiment == "spectrum") return run_spectrum_experiment(config);
    if (config.experiment == "tracking") return run_tracking_experiment(config);
    if (config.experiment == "passive_selection")
        return run_passive_selection_experiment(config);
    if (config.experiment == "symbiotic") return run_symbiotic_experiment(config);
    throw ConfigError("unknown experiment: " + config.experiment);
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

std::string to_csv(const Table& table) {
    std::string out;
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out += ',';
        out += table.columns[i];
    }
    out += '\n';
    char buf[40];
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size())
            throw NumericalError("CSV row width mismatch");
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            std::snprintf(buf, sizeof buf, "%.17g", row[i]);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

std::vector<std::string> write_report(const RunReport& report, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    std::vector<std::string> paths;
    for (const auto& table : report.tables) {
        std::string name = report.experiment;
        if (table.name != report.experiment) name += "_" + table.name;
        name += "_" + std::to_string(report.seed) + ".csv";
        const fs::path p = fs::path(dir) / name;
        std::ofstream out(p, std::ios::binary);
        if (!out) throw ConfigError("cannot write " + p.string());
        out << to_csv(table);
        paths.push_back(p.string());
    }

    json meta;
    meta["experiment"] = report.experiment;
    meta["seed"] = report.seed;
    meta["trials"] = report.trials;
    meta["elapsed_s"] = report.elapsed_s;
    meta["outputs"] = paths;
    meta["config"] = report.config_echo;
    const fs::path rp = fs::path(dir) / "report.json";
    std::ofstream out(rp, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + rp.string());
    out << meta.dump(2) << '\n';
    paths.push_back(rp.string());
    return paths;
}

}  // namespace cograd::harness
