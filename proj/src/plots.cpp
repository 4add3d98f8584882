#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "dscm/harness.hpp"

// SVG rendering of sweep results: estimate-versus-preset panels with a y=x
// reference and an error strip, or BER curves for the BER sweeps. Plots are
// derived artifacts; the CSV stays the source of truth.
namespace dscm {

namespace {

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int col(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    }
    int col_prefix(const std::string& prefix) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i].rfind(prefix, 0) == 0) return static_cast<int>(i);
        return -1;
    }
};

Csv read_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("plot: cannot open CSV: " + path);
    Csv csv;
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (first) {
            csv.header = std::move(cells);
            first = false;
        } else {
            csv.rows.push_back(std::move(cells));
        }
    }
    if (csv.header.empty()) throw ConfigError("plot: CSV has no header: " + path);
    if (csv.rows.empty()) throw ConfigError("plot: CSV has no data rows: " + path);
    return csv;
}

struct Series {
    std::vector<double> x;
    std::vector<double> y;
};

class SvgCanvas {
public:
    SvgCanvas(int width, int height) : w_(width), h_(height) {
        os_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w_ << "\" height=\"" << h_
            << "\" viewBox=\"0 0 " << w_ << " " << h_ << "\">\n"
            << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    }
    void line(double x1, double y1, double x2, double y2, const std::string& color,
              double width = 1.0, bool dashed = false) {
        os_ << "<line x1=\"" << x1 << "\" y1=\"" << y1 << "\" x2=\"" << x2 << "\" y2=\"" << y2
            << "\" stroke=\"" << color << "\" stroke-width=\"" << width << "\"";
        if (dashed) os_ << " stroke-dasharray=\"5,4\"";
        os_ << "/>\n";
    }
    void circle(double x, double y, double r, const std::string& color) {
        os_ << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"" << r << "\" fill=\"" << color
            << "\" fill-opacity=\"0.75\"/>\n";
    }
    void text(double x, double y, const std::string& s, int size = 12,
              const std::string& anchor = "start") {
        os_ << "<text x=\"" << x << "\" y=\"" << y << "\" font-family=\"sans-serif\" font-size=\""
            << size << "\" text-anchor=\"" << anchor << "\">" << s << "</text>\n";
    }
    void save(const std::string& path) {
        os_ << "</svg>\n";
        std::ofstream f(path, std::ios::trunc);
        if (!f) throw IoError("plot: cannot write " + path);
        f << os_.str();
    }

private:
    int w_, h_;
    std::ostringstream os_;
};

struct Frame {
    double x0, y0, x1, y1;  // pixel box
    double xmin, xmax, ymin, ymax;
    double px(double x) const { return x0 + (x - xmin) / (xmax - xmin + 1e-300) * (x1 - x0); }
    double py(double y) const { return y1 - (y - ymin) / (ymax - ymin + 1e-300) * (y1 - y0); }
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

void draw_axes(SvgCanvas& svg, const Frame& f, const std::string& xlabel,
               const std::string& ylabel) {
    svg.line(f.x0, f.y1, f.x1, f.y1, "black");
    svg.line(f.x0, f.y0, f.x0, f.y1, "black");
    svg.text((f.x0 + f.x1) / 2, f.y1 + 28, xlabel, 12, "middle");
    svg.text(f.x0 - 6, f.y0 - 8, ylabel);
    svg.text(f.x0, f.y1 + 14, num(f.xmin), 10, "middle");
    svg.text(f.x1, f.y1 + 14, num(f.xmax), 10, "middle");
    svg.text(f.x0 - 4, f.y1, num(f.ymin), 10, "end");
    svg.text(f.x0 - 4, f.y0 + 8, num(f.ymax), 10, "end");
}

void span(const std::vector<double>& v, double& lo, double& hi, double pad_frac) {
    lo = *std::min_element(v.begin(), v.end());
    hi = *std::max_element(v.begin(), v.end());
    if (lo == hi) {
        lo -= 1.0;
        hi += 1.0;
    }
    const double pad = (hi - lo) * pad_frac;
    lo -= pad;
    hi += pad;
}

std::string estimate_panel(const std::string& out_dir, const std::string& stem,
                           const std::string& label, const std::string& unit, const Series& est,
                           const Series& err) {
    SvgCanvas svg(560, 620);
    Frame top{70, 40, 520, 380, 0, 0, 0, 0};
    span(est.x, top.xmin, top.xmax, 0.06);
    double ylo, yhi;
    span(est.y, ylo, yhi, 0.06);
    top.ymin = std::min(ylo, top.xmin);
    top.ymax = std::max(yhi, top.xmax);
    svg.text(280, 22, label + " estimate vs preset", 14, "middle");
    draw_axes(svg, top, "preset (" + unit + ")", "estimate (" + unit + ")");
    svg.line(top.px(top.xmin), top.py(top.xmin), top.px(top.xmax), top.py(top.xmax), "#888", 1.0,
             true);
    for (std::size_t i = 0; i < est.x.size(); ++i)
        svg.circle(top.px(est.x[i]), top.py(est.y[i]), 3.0, "#1f77b4");

    Frame bot{70, 430, 520, 580, top.xmin, top.xmax, 0, 0};
    span(err.y, bot.ymin, bot.ymax, 0.2);
    bot.ymin = std::min(bot.ymin, -std::abs(bot.ymax));
    bot.ymax = std::max(bot.ymax, std::abs(bot.ymin));
    draw_axes(svg, bot, "preset (" + unit + ")", "error (" + unit + ")");
    svg.line(bot.px(bot.xmin), bot.py(0.0), bot.px(bot.xmax), bot.py(0.0), "#888", 1.0, true);
    for (std::size_t i = 0; i < err.x.size(); ++i)
        svg.circle(bot.px(err.x[i]), bot.py(err.y[i]), 3.0, "#d62728");

    const std::string path = out_dir + "/" + stem + ".svg";
    svg.save(path);
    return path;
}

std::string ber_panel(const std::string& out_dir, const std::string& stem, const std::string& unit,
                      int sc_index, const Series& wo, const Series& w) {
    SvgCanvas svg(560, 420);
    auto log10v = [](const std::vector<double>& v) {
        std::vector<double> o(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) o[i] = std::log10(std::max(v[i], 1e-7));
        return o;
    };
    const auto lwo = log10v(wo.y);
    const auto lw = log10v(w.y);
    Frame f{70, 40, 520, 360, 0, 0, 0, 0};
    span(wo.x, f.xmin, f.xmax, 0.06);
    std::vector<double> all = lwo;
    all.insert(all.end(), lw.begin(), lw.end());
    span(all, f.ymin, f.ymax, 0.1);
    svg.text(280, 22, "SC-" + std::to_string(sc_index + 1) + " BER (log10)", 14, "middle");
    draw_axes(svg, f, "preset (" + unit + ")", "log10 BER");
    for (std::size_t i = 0; i < wo.x.size(); ++i)
        svg.circle(f.px(wo.x[i]), f.py(lwo[i]), 3.5, "#d62728");
    for (std::size_t i = 0; i < w.x.size(); ++i)
        svg.circle(f.px(w.x[i]), f.py(lw[i]), 3.5, "#2ca02c");
    svg.text(90, 395, "red: no compensation, green: compensated", 11);

    const std::string path = out_dir + "/" + stem + ".svg";
    svg.save(path);
    return path;
}

} // namespace

std::vector<std::string> emit_plots(const std::string& csv_path, const std::string& out_dir) {
    const Csv csv = read_csv(csv_path);
    std::vector<std::string> written;

    const int axis_col = csv.col("axis");
    const int preset_col = csv.col_prefix("preset_value_");
    if (axis_col < 0 || preset_col < 0)
        throw ConfigError("plot: CSV schema mismatch (missing axis/preset columns)");
    const std::string unit = csv.header[static_cast<std::size_t>(preset_col)].substr(13);

    if (csv.col("ber_no_comp") >= 0) {
        // BER schema: one panel per (axis, subcarrier).
        const int sc_col = csv.col("sc_index");
        const int wo_col = csv.col("ber_no_comp");
        const int w_col = csv.col("ber_comp");
        std::map<std::pair<std::string, int>, std::pair<Series, Series>> panels;
        for (const auto& r : csv.rows) {
            const double x = std::stod(r[static_cast<std::size_t>(preset_col)]);
            const int sc = std::stoi(r[static_cast<std::size_t>(sc_col)]);
            auto& p = panels[{r[static_cast<std::size_t>(axis_col)], sc}];
            p.first.x.push_back(x);
            p.first.y.push_back(std::stod(r[static_cast<std::size_t>(wo_col)]));
            p.second.x.push_back(x);
            p.second.y.push_back(std::stod(r[static_cast<std::size_t>(w_col)]));
        }
        for (const auto& [key, series] : panels)
            written.push_back(ber_panel(out_dir, "ber_" + key.first + "_sc" +
                                                     std::to_string(key.second + 1),
                                        unit, key.second, series.first, series.second));
        return written;
    }

    // Estimation schema: panels per (axis, polarization) for the swept quantity.
    const std::map<std::string, std::pair<std::string, std::string>> quantity = {
        {"rx-skew", {"est_rx_skew_", "err_rx_skew_"}},
        {"rx-imbalance", {"est_rx_imb_", "err_rx_imb_"}},
        {"tx-skew", {"est_tx_skew_", "err_tx_skew_"}},
        {"tx-imbalance", {"est_tx_imb_", "err_tx_imb_"}},
    };
    std::map<std::string, std::map<std::string, std::pair<Series, Series>>> panels;
    for (const auto& r : csv.rows) {
        const std::string axis = r[static_cast<std::size_t>(axis_col)];
        const auto q = quantity.find(axis);
        if (q == quantity.end()) throw ConfigError("plot: unknown axis in CSV: " + axis);
        const std::string suffix = (axis == "rx-skew" || axis == "tx-skew") ? "ps" : "db";
        for (const std::string pol : {"x", "y"}) {
            const int est_col = csv.col(q->second.first + pol + "_" + suffix);
            const int err_col = csv.col(q->second.second + pol + "_" + suffix);
            if (est_col < 0 || err_col < 0)
                throw ConfigError("plot: CSV schema mismatch for axis " + axis);
            const int status_col = csv.col("status");
            if (status_col >= 0 && r[static_cast<std::size_t>(status_col)] != "ok") continue;
            const double x = std::stod(r[static_cast<std::size_t>(preset_col)]);
            auto& p = panels[axis][pol];
            p.first.x.push_back(x);
            p.first.y.push_back(std::stod(r[static_cast<std::size_t>(est_col)]));
            p.second.x.push_back(x);
            p.second.y.push_back(std::stod(r[static_cast<std::size_t>(err_col)]));
        }
    }
    for (const auto& [axis, pols] : panels)
        for (const auto& [pol, series] : pols) {
            if (series.first.x.empty()) continue;
            written.push_back(estimate_panel(out_dir, axis + "_" + pol, axis + " (" + pol + " pol)",
                                             unit, series.first, series.second));
        }
    if (written.empty()) throw ConfigError("plot: no plottable rows in " + csv_path);
    return written;
}

} // namespace dscm
