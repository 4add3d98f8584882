#include <cmath>
#include <fstream>
#include <sstream>

#include "dscm/harness.hpp"

namespace dscm {

namespace {

double to_double(const std::string& key, const std::string& v) {
    if (v == "inf" || v == "+inf") return std::numeric_limits<double>::infinity();
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config: bad number for " + key + ": '" + v + "'");
    }
}

long long to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long i = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer for " + key + ": '" + v + "'");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config: bad boolean for " + key + ": '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(key, item));
    if (out.empty()) throw ConfigError("config: empty list for " + key);
    return out;
}

constexpr double kDeg = 0.017453292519943295;

} // namespace

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    // schema
    if (key == "config_version") {
        if (to_int(key, value) != 1) throw ConfigError("config: unsupported config_version");
    }
    // run control
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(to_int(key, value));
    else if (key == "trials") cfg.trials = static_cast<int>(to_int(key, value));
    else if (key == "sc_index") cfg.sc_index = static_cast<int>(to_int(key, value));
    else if (key == "godard_bins") cfg.godard_bins = static_cast<int>(to_int(key, value));
    else if (key == "payload_symbols")
        cfg.payload_symbols = static_cast<std::size_t>(to_int(key, value));
    else if (key == "out_csv") cfg.out_csv = value;
    else if (key == "use_known_offset") cfg.use_known_offset = to_bool(key, value);
    else if (key == "ber_sc_indices") {
        cfg.ber_sc_indices.clear();
        for (double d : to_list(key, value)) cfg.ber_sc_indices.push_back(static_cast<int>(d));
    }
    // training frame
    else if (key == "baud_hz") {
        cfg.tfit.baud_rate_hz = to_double(key, value);
        cfg.subcarriers.per_sc_baud_hz = cfg.tfit.baud_rate_hz;
        cfg.tfit.tone_f1_hz = cfg.tfit.baud_rate_hz / 4.0;
        cfg.tfit.tone_f2_hz = cfg.tfit.baud_rate_hz / 2.0;
    }
    else if (key == "tone_f1_hz") cfg.tfit.tone_f1_hz = to_double(key, value);
    else if (key == "tone_f2_hz") cfg.tfit.tone_f2_hz = to_double(key, value);
    else if (key == "slot_symbols") cfg.tfit.slot_len_symbols = static_cast<int>(to_int(key, value));
    else if (key == "blocks") cfg.tfit.n_blocks = static_cast<int>(to_int(key, value));
    else if (key == "tone_amplitude") cfg.tfit.tone_amplitude = to_double(key, value);
    else if (key == "samples_per_symbol")
        cfg.tfit.samples_per_symbol_gen = static_cast<int>(to_int(key, value));
    else if (key == "tone_phase_f1_deg") cfg.tfit.tone_phase_f1_rad = to_double(key, value) * kDeg;
    else if (key == "tone_phase_f2_deg") cfg.tfit.tone_phase_f2_rad = to_double(key, value) * kDeg;
    // subcarrier plan
    else if (key == "sc_centers_hz") {
        cfg.subcarriers.centers_hz = to_list(key, value);
        cfg.subcarriers.n_sc = static_cast<int>(cfg.subcarriers.centers_hz.size());
    }
    else if (key == "rrc_rolloff") cfg.subcarriers.rrc_rolloff = to_double(key, value);
    // channel
    else if (key == "freq_offset_hz") cfg.channel.freq_offset_hz = to_double(key, value);
    else if (key == "linewidth_hz") cfg.channel.linewidth_hz = to_double(key, value);
    else if (key == "osnr_db") cfg.channel.osnr_db = to_double(key, value);
    else if (key == "fiber_km") cfg.channel.fiber_km = to_double(key, value);
    else if (key == "dispersion_ps_nm_km") cfg.channel.dispersion_ps_nm_km = to_double(key, value);
    else if (key == "enable_cd") cfg.channel.enable_cd = to_bool(key, value);
    // impairment presets (applied to both polarizations)
    else if (key == "tx_skew_ps")
        cfg.presets.tx_x.skew_s = cfg.presets.tx_y.skew_s = to_double(key, value) * 1e-12;
    else if (key == "tx_imb_db") {
        const double g = std::pow(10.0, to_double(key, value) / 20.0);
        cfg.presets.tx_x.gain = cfg.presets.tx_y.gain = g;
    }
    else if (key == "tx_quad_deg")
        cfg.presets.tx_x.quad_error_rad = cfg.presets.tx_y.quad_error_rad =
            to_double(key, value) * kDeg;
    else if (key == "rx_skew_ps")
        cfg.presets.rx_x.skew_s = cfg.presets.rx_y.skew_s = to_double(key, value) * 1e-12;
    else if (key == "rx_imb_db") {
        const double g = std::pow(10.0, to_double(key, value) / 20.0);
        cfg.presets.rx_x.gain = cfg.presets.rx_y.gain = g;
    }
    else if (key == "rx_quad_deg")
        cfg.presets.rx_x.quad_error_rad = cfg.presets.rx_y.quad_error_rad =
            to_double(key, value) * kDeg;
    // sweep grid
    else if (key == "axis") cfg.grid.axis = axis_from_string(value);
    else if (key == "sweep_start") cfg.grid.start = to_double(key, value);
    else if (key == "sweep_stop") cfg.grid.stop = to_double(key, value);
    else if (key == "sweep_step") cfg.grid.step = to_double(key, value);
    else
        throw ConfigError("config: unknown key '" + key + "'");
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("config: cannot open " + path);
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) + " is not key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        apply_setting(cfg, key, value);
    }
    return cfg;
}

} // namespace dscm
