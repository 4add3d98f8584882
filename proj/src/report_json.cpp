#include "dscm/report_json.hpp"

#include <fstream>

#include <json.hpp>

namespace dscm {

namespace {

using nlohmann::json;

json pol_to_json(const PolarizationReport& p) {
    json samples_rx_skew = json::array();
    for (const auto& s : p.rx_skew_samples)
        samples_rx_skew.push_back({{"block", s.block},
                                   {"slot", to_string(s.slot)},
                                   {"tone_hz", s.tone_hz},
                                   {"tau_s", s.tau_s},
                                   {"tone_snr_db", s.tone_snr_db}});
    json samples_rx_imb = json::array();
    for (const auto& s : p.rx_imbalance_samples)
        samples_rx_imb.push_back({{"block", s.block},
                                  {"slot", to_string(s.slot)},
                                  {"tone_hz", s.tone_hz},
                                  {"ratio_db", s.ratio_db}});
    json samples_tx_skew = json::array();
    for (const auto& s : p.tx_skew_samples)
        samples_tx_skew.push_back({{"block", s.block},
                                   {"tau_slot_first_s", s.tau_slot_first_s},
                                   {"tau_slot_second_s", s.tau_slot_second_s},
                                   {"tau_s", s.tau_s}});
    json samples_tx_imb = json::array();
    for (const auto& s : p.tx_imbalance_samples)
        samples_tx_imb.push_back(
            {{"block", s.block}, {"f1_ratio_db", s.f1_ratio_db}, {"f2_ratio_db", s.f2_ratio_db}});

    return {{"rx_skew_s", p.rx_skew_s},
            {"rx_imbalance_db", p.rx_imbalance_db},
            {"tx_skew_s", p.tx_skew_s},
            {"tx_imbalance_db", p.tx_imbalance_db},
            {"tx_skew_slot_first_s", p.tx_skew_slot_first_s},
            {"tx_skew_slot_second_s", p.tx_skew_slot_second_s},
            {"min_tone_snr_db", p.min_tone_snr_db},
            {"rx_skew_samples", samples_rx_skew},
            {"rx_imbalance_samples", samples_rx_imb},
            {"tx_skew_samples", samples_tx_skew},
            {"tx_imbalance_samples", samples_tx_imb}};
}

SlotId slot_from_string(const std::string& s) {
    if (s == "t1") return SlotId::t1;
    if (s == "t2") return SlotId::t2;
    if (s == "t3") return SlotId::t3;
    if (s == "t4") return SlotId::t4;
    throw IoError("report: bad slot id: " + s);
}

PolarizationReport pol_from_json(const json& j) {
    PolarizationReport p;
    p.rx_skew_s = j.at("rx_skew_s").get<double>();
    p.rx_imbalance_db = j.at("rx_imbalance_db").get<double>();
    p.tx_skew_s = j.at("tx_skew_s").get<double>();
    p.tx_imbalance_db = j.at("tx_imbalance_db").get<double>();
    p.tx_skew_slot_first_s = j.at("tx_skew_slot_first_s").get<double>();
    p.tx_skew_slot_second_s = j.at("tx_skew_slot_second_s").get<double>();
    p.min_tone_snr_db = j.at("min_tone_snr_db").get<double>();
    for (const auto& s : j.at("rx_skew_samples"))
        p.rx_skew_samples.push_back({s.at("block").get<int>(),
                                     slot_from_string(s.at("slot").get<std::string>()),
                                     s.at("tone_hz").get<double>(), s.at("tau_s").get<double>(),
                                     s.at("tone_snr_db").get<double>()});
    for (const auto& s : j.at("rx_imbalance_samples"))
        p.rx_imbalance_samples.push_back({s.at("block").get<int>(),
                                          slot_from_string(s.at("slot").get<std::string>()),
                                          s.at("tone_hz").get<double>(),
                                          s.at("ratio_db").get<double>()});
    for (const auto& s : j.at("tx_skew_samples"))
        p.tx_skew_samples.push_back(
            {s.at("block").get<int>(), s.at("tau_slot_first_s").get<double>(),
             s.at("tau_slot_second_s").get<double>(), s.at("tau_s").get<double>()});
    for (const auto& s : j.at("tx_imbalance_samples"))
        p.tx_imbalance_samples.push_back({s.at("block").get<int>(),
                                          s.at("f1_ratio_db").get<double>(),
                                          s.at("f2_ratio_db").get<double>()});
    return p;
}

} // namespace

std::string report_to_json(const EstimateReport& report) {
    json j = {{"schema", "estimate-report/1"},
              {"n_blocks_used", report.n_blocks_used},
              {"baud_rate_hz", report.baud_rate_hz},
              {"sc_center_hz", report.sc_center_hz},
              {"x", pol_to_json(report.x)},
              {"y", pol_to_json(report.y)}};
    return j.dump(2);
}

EstimateReport report_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw IoError(std::string("report: parse failure: ") + e.what());
    }
    if (j.value("schema", "") != std::string("estimate-report/1"))
        throw IoError("report: unknown schema");
    EstimateReport r;
    r.n_blocks_used = j.at("n_blocks_used").get<int>();
    r.baud_rate_hz = j.at("baud_rate_hz").get<double>();
    r.sc_center_hz = j.at("sc_center_hz").get<double>();
    r.x = pol_from_json(j.at("x"));
    r.y = pol_from_json(j.at("y"));
    return r;
}

void write_report(const std::string& path, const EstimateReport& report) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw IoError("report: cannot open for writing: " + path);
    os << report_to_json(report) << "\n";
    if (!os) throw IoError("report: write failed: " + path);
}

EstimateReport read_report(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("report: cannot open: " + path);
    std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return report_from_json(text);
}

} // namespace dscm
