#include "madlab/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "madlab/errors.hpp"

namespace madlab {

std::string to_string(PlotKind kind) {
    switch (kind) {
        case PlotKind::cs_path: return "cs_path";
        case PlotKind::width_grid: return "width_grid";
        case PlotKind::power_bars: return "power_bars";
        case PlotKind::allocation: return "allocation";
    }
    return "unknown";
}

PlotKind plot_kind_from_string(const std::string& name) {
    if (name == "cs_path") return PlotKind::cs_path;
    if (name == "width_grid") return PlotKind::width_grid;
    if (name == "power_bars") return PlotKind::power_bars;
    if (name == "allocation") return PlotKind::allocation;
    throw ConfigError("unknown plot kind '" + name + "'");
}

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};
constexpr double kPanelW = 480.0;
constexpr double kPanelH = 320.0;
constexpr double kMarginL = 64.0;
constexpr double kMarginR = 16.0;
constexpr double kMarginT = 32.0;
constexpr double kMarginB = 48.0;

const char* color(std::size_t i) { return kPalette[i % std::size(kPalette)]; }

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    void finish(bool include_zero) {
        if (!std::isfinite(lo)) {
            lo = 0.0;
            hi = 1.0;
        }
        if (include_zero) {
            lo = std::min(lo, 0.0);
            hi = std::max(hi, 0.0);
        }
        if (hi - lo < 1e-12) {
            lo -= 0.5;
            hi += 0.5;
        }
        const double pad = 0.05 * (hi - lo);
        lo -= include_zero && lo == 0.0 ? 0.0 : pad;
        hi += pad;
    }
};

class Svg {
public:
    Svg(double width, double height) : width_(width), height_(height) {}

    void line(double x1, double y1, double x2, double y2, const std::string& stroke, double w = 1.0,
              bool dashed = false) {
        body_ << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2) << "\" y2=\""
              << num(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\"" << num(w) << "\""
              << (dashed ? " stroke-dasharray=\"4 3\"" : "") << "/>\n";
    }
    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke,
                  bool dashed = false) {
        if (pts.empty()) {
            return;
        }
        body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\""
              << (dashed ? " stroke-dasharray=\"4 3\"" : "") << " points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i) {
            body_ << (i ? " " : "") << num(pts[i].first) << ',' << num(pts[i].second);
        }
        body_ << "\"/>\n";
    }
    void rect(double x, double y, double w, double h, const std::string& fill) {
        body_ << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w) << "\" height=\""
              << num(h) << "\" fill=\"" << fill << "\"/>\n";
    }
    void text(double x, double y, const std::string& s, const char* anchor = "middle", int size = 11,
              bool vertical = false) {
        body_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-size=\"" << size
              << "\" text-anchor=\"" << anchor << "\"";
        if (vertical) {
            body_ << " transform=\"rotate(-90 " << num(x) << ' ' << num(y) << ")\"";
        }
        body_ << ">" << escape(s) << "</text>\n";
    }
    std::string str() const {
        std::ostringstream out;
        out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
            << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width_) << "\" height=\""
            << num(height_) << "\" viewBox=\"0 0 " << num(width_) << ' ' << num(height_)
            << "\" font-family=\"sans-serif\">\n"
            << "<rect x=\"0\" y=\"0\" width=\"" << num(width_) << "\" height=\"" << num(height_)
            << "\" fill=\"white\"/>\n"
            << body_.str() << "</svg>\n";
        return out.str();
    }

private:
    double width_;
    double height_;
    std::ostringstream body_;
};

// Plot area of one panel, mapping data coordinates to pixels.
struct Frame {
    double x0, y0, w, h;
    Range xr, yr;

    double px(double x) const { return x0 + (x - xr.lo) / (xr.hi - xr.lo) * w; }
    double py(double y) const {
        const double v = std::clamp(y, yr.lo, yr.hi);
        return y0 + h - (v - yr.lo) / (yr.hi - yr.lo) * h;
    }
};

Frame panel_frame(double ox, double oy) {
    return Frame{ox + kMarginL, oy + kMarginT, kPanelW - kMarginL - kMarginR, kPanelH - kMarginT - kMarginB, {},
                 {}};
}

void draw_axes(Svg& svg, const Frame& f, const std::string& title, const std::string& xlabel,
               const std::string& ylabel, bool numeric_x) {
    svg.line(f.x0, f.y0 + f.h, f.x0 + f.w, f.y0 + f.h, "black");
    svg.line(f.x0, f.y0, f.x0, f.y0 + f.h, "black");
    for (int i = 0; i <= 4; ++i) {
        const double v = f.yr.lo + (f.yr.hi - f.yr.lo) * i / 4.0;
        const double y = f.py(v);
        svg.line(f.x0 - 4, y, f.x0, y, "black");
        svg.text(f.x0 - 6, y + 4, tick_label(v), "end", 10);
        if (numeric_x) {
            const double xv = f.xr.lo + (f.xr.hi - f.xr.lo) * i / 4.0;
            const double x = f.px(xv);
            svg.line(x, f.y0 + f.h, x, f.y0 + f.h + 4, "black");
            svg.text(x, f.y0 + f.h + 16, tick_label(xv), "middle", 10);
        }
    }
    svg.text(f.x0 + f.w / 2, f.y0 - 12, title, "middle", 13);
    svg.text(f.x0 + f.w / 2, f.y0 + f.h + 36, xlabel);
    svg.text(f.x0 - 48, f.y0 + f.h / 2, ylabel, "middle", 11, true);
}

void draw_legend(Svg& svg, const Frame& f, const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) {
        const double y = f.y0 + 8 + 14.0 * static_cast<double>(i);
        svg.rect(f.x0 + f.w - 120, y - 8, 10, 10, color(i));
        svg.text(f.x0 + f.w - 104, y + 1, names[i], "start", 10);
    }
}

// Categories on x, one bar per series within each category.
void draw_bars(Svg& svg, Frame f, const std::string& title, const std::string& xlabel,
               const std::string& ylabel, const std::vector<std::string>& categories,
               const std::vector<std::string>& series, const std::vector<std::vector<double>>& values) {
    f.xr = Range{0.0, static_cast<double>(categories.size())};
    for (const auto& row : values) {
        for (double v : row) {
            f.yr.add(v);
        }
    }
    f.yr.finish(true);
    draw_axes(svg, f, title, xlabel, ylabel, false);
    const double slot = f.w / static_cast<double>(categories.size());
    const double bar = slot * 0.8 / static_cast<double>(std::max<std::size_t>(series.size(), 1));
    for (std::size_t c = 0; c < categories.size(); ++c) {
        const double left = f.x0 + slot * static_cast<double>(c) + slot * 0.1;
        for (std::size_t s = 0; s < series.size(); ++s) {
            const double v = values[s][c];
            if (!std::isfinite(v)) {
                continue;
            }
            const double top = f.py(std::max(v, 0.0));
            const double base = f.py(std::min(v, 0.0));
            svg.rect(left + bar * static_cast<double>(s), top, bar, std::max(base - top, 0.0), color(s));
        }
        svg.text(f.x0 + slot * (static_cast<double>(c) + 0.5), f.y0 + f.h + 16, categories[c], "middle", 10);
    }
    draw_legend(svg, f, series);
}

std::string series_key(const std::string& dgp, const std::string& config, bool multi_dgp) {
    return multi_dgp ? dgp + ":" + config : config;
}

struct SummaryRows {
    std::vector<std::string> series;  // first-appearance order
    std::vector<std::size_t> arms;
    std::map<std::pair<std::string, std::size_t>, std::size_t> row_of;
};

SummaryRows index_summary(const CsvTable& t, bool treatment_only) {
    const std::size_t c_dgp = t.column("dgp");
    const std::size_t c_config = t.column("config");
    const std::size_t c_arm = t.column("arm");
    std::set<std::string> dgps;
    for (const auto& row : t.rows) {
        dgps.insert(row[c_dgp]);
    }
    SummaryRows s;
    std::set<std::size_t> arms;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto arm = static_cast<std::size_t>(t.number(r, c_arm));
        if (treatment_only && arm == 0) {
            continue;
        }
        const std::string key = series_key(t.rows[r][c_dgp], t.rows[r][c_config], dgps.size() > 1);
        if (std::find(s.series.begin(), s.series.end(), key) == s.series.end()) {
            s.series.push_back(key);
        }
        arms.insert(arm);
        s.row_of[{key, arm}] = r;
    }
    s.arms.assign(arms.begin(), arms.end());
    if (s.series.empty()) {
        throw InputError("summary table has no rows to plot");
    }
    return s;
}

std::vector<std::vector<double>> gather(const CsvTable& t, const SummaryRows& s, const std::string& column) {
    const std::size_t col = t.column(column);
    std::vector<std::vector<double>> values(s.series.size(),
                                            std::vector<double>(s.arms.size(), std::nan("")));
    for (std::size_t i = 0; i < s.series.size(); ++i) {
        for (std::size_t a = 0; a < s.arms.size(); ++a) {
            const auto it = s.row_of.find({s.series[i], s.arms[a]});
            if (it != s.row_of.end()) {
                values[i][a] = t.number(it->second, col);
            }
        }
    }
    return values;
}

std::vector<std::string> arm_names(const std::vector<std::size_t>& arms) {
    std::vector<std::string> out;
    for (auto a : arms) {
        out.push_back("arm " + std::to_string(a));
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> plot_cs_path(const CsvTable& t) {
    t.require({"dgp", "config", "replication", "t", "center_1", "lower_1", "upper_1"});
    if (t.rows.empty()) {
        throw InputError("trajectory is empty; nothing to plot");
    }
    std::size_t pairs = 0;
    while (t.has("center_" + std::to_string(pairs + 1))) {
        ++pairs;
    }
    const std::size_t c_dgp = t.column("dgp");
    const std::size_t c_config = t.column("config");
    const std::size_t c_rep = t.column("replication");
    const std::size_t c_t = t.column("t");
    std::set<std::string> dgps;
    for (const auto& row : t.rows) {
        dgps.insert(row[c_dgp]);
    }

    // First replication seen for each series.
    std::vector<std::string> series;
    std::map<std::string, std::string> rep_of;
    std::map<std::string, std::vector<std::size_t>> rows_of;
    double t_max = 0.0;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const std::string key = series_key(t.rows[r][c_dgp], t.rows[r][c_config], dgps.size() > 1);
        auto [it, inserted] = rep_of.emplace(key, t.rows[r][c_rep]);
        if (inserted) {
            series.push_back(key);
        }
        if (it->second == t.rows[r][c_rep]) {
            rows_of[key].push_back(r);
            t_max = std::max(t_max, t.number(r, c_t));
        }
    }

    std::vector<std::pair<std::string, std::string>> files;
    for (std::size_t p = 1; p <= pairs; ++p) {
        const std::size_t c_center = t.column("center_" + std::to_string(p));
        const std::size_t c_lower = t.column("lower_" + std::to_string(p));
        const std::size_t c_upper = t.column("upper_" + std::to_string(p));
        Frame f = panel_frame(0, 0);
        f.xr.add(0.0);
        f.xr.add(t_max);
        f.xr.finish(false);
        f.xr.lo = 0.0;
        // Early radii are huge; scale the y axis to the later part of the path.
        for (const auto& key : series) {
            for (auto r : rows_of[key]) {
                if (t.number(r, c_t) >= t_max / 20.0) {
                    f.yr.add(t.number(r, c_lower));
                    f.yr.add(t.number(r, c_upper));
                }
            }
        }
        f.yr.finish(true);
        Svg svg(kPanelW, kPanelH);
        draw_axes(svg, f, "Arm " + std::to_string(p) + " vs control", "t", "ATE", true);
        svg.line(f.x0, f.py(0.0), f.x0 + f.w, f.py(0.0), "#888888", 1.0, true);
        for (std::size_t s = 0; s < series.size(); ++s) {
            std::vector<std::pair<double, double>> center, lower, upper;
            for (auto r : rows_of[series[s]]) {
                const double x = f.px(t.number(r, c_t));
                center.emplace_back(x, f.py(t.number(r, c_center)));
                lower.emplace_back(x, f.py(t.number(r, c_lower)));
                upper.emplace_back(x, f.py(t.number(r, c_upper)));
            }
            svg.polyline(center, color(s));
            svg.polyline(lower, color(s), true);
            svg.polyline(upper, color(s), true);
        }
        draw_legend(svg, f, series);
        files.emplace_back("cs_path_arm" + std::to_string(p) + ".svg", svg.str());
    }
    return files;
}

std::vector<std::pair<std::string, std::string>> plot_width_grid(const CsvTable& t) {
    t.require({"gamma", "n_irrelevant", "config", "arm", "width_mean"});
    const std::size_t c_gamma = t.column("gamma");
    const std::size_t c_irr = t.column("n_irrelevant");
    const std::size_t c_config = t.column("config");
    const std::size_t c_arm = t.column("arm");
    const std::size_t c_width = t.column("width_mean");

    // (n_irrelevant, config, gamma) -> mean width over treatment arms.
    std::vector<double> irr_levels;
    std::vector<std::string> configs;
    std::map<std::tuple<double, std::string, double>, std::pair<double, int>> acc;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        if (t.number(r, c_arm) == 0.0) {
            continue;
        }
        const double irr = t.number(r, c_irr);
        const std::string& config = t.rows[r][c_config];
        if (std::find(irr_levels.begin(), irr_levels.end(), irr) == irr_levels.end()) {
            irr_levels.push_back(irr);
        }
        if (std::find(configs.begin(), configs.end(), config) == configs.end()) {
            configs.push_back(config);
        }
        auto& cell = acc[{irr, config, t.number(r, c_gamma)}];
        cell.first += t.number(r, c_width);
        cell.second += 1;
    }
    if (acc.empty()) {
        throw InputError("summary table has no treatment-arm rows to plot");
    }
    std::sort(irr_levels.begin(), irr_levels.end());
    Svg svg(kPanelW * static_cast<double>(irr_levels.size()), kPanelH);
    for (std::size_t p = 0; p < irr_levels.size(); ++p) {
        Frame f = panel_frame(kPanelW * static_cast<double>(p), 0);
        for (const auto& [key, cell] : acc) {
            if (std::get<0>(key) == irr_levels[p]) {
                f.xr.add(std::get<2>(key));
                f.yr.add(cell.first / cell.second);
            }
        }
        f.xr.finish(false);
        f.yr.finish(true);
        draw_axes(svg, f, "irrelevant covariates = " + tick_label(irr_levels[p]), "gamma", "mean CS width",
                  true);
        for (std::size_t c = 0; c < configs.size(); ++c) {
            std::vector<std::pair<double, double>> pts;
            for (const auto& [key, cell] : acc) {
                if (std::get<0>(key) == irr_levels[p] && std::get<1>(key) == configs[c]) {
                    pts.emplace_back(f.px(std::get<2>(key)), f.py(cell.first / cell.second));
                }
            }
            svg.polyline(pts, color(c));
        }
        draw_legend(svg, f, configs);
    }
    return {{"width_grid.svg", svg.str()}};
}

std::vector<std::pair<std::string, std::string>> plot_power_bars(const CsvTable& t) {
    t.require({"dgp", "config", "arm", "type2", "width_mean"});
    const SummaryRows s = index_summary(t, true);
    Svg svg(2 * kPanelW, kPanelH);
    draw_bars(svg, panel_frame(0, 0), "Type II error", "arm", "rate", arm_names(s.arms), s.series,
              gather(t, s, "type2"));
    draw_bars(svg, panel_frame(kPanelW, 0), "Final CS width", "arm", "width", arm_names(s.arms), s.series,
              gather(t, s, "width_mean"));
    return {{"power_bars.svg", svg.str()}};
}

std::vector<std::pair<std::string, std::string>> plot_allocation(const CsvTable& t) {
    t.require({"dgp", "config", "arm", "sample_share_mean"});
    const SummaryRows s = index_summary(t, false);
    Svg svg(kPanelW, kPanelH);
    draw_bars(svg, panel_frame(0, 0), "Sample allocation", "arm", "share", arm_names(s.arms), s.series,
              gather(t, s, "sample_share_mean"));
    return {{"allocation.svg", svg.str()}};
}

}  // namespace

std::vector<std::pair<std::string, std::string>> build_plots(const CsvTable& table, PlotKind kind) {
    switch (kind) {
        case PlotKind::cs_path: return plot_cs_path(table);
        case PlotKind::width_grid: return plot_width_grid(table);
        case PlotKind::power_bars: return plot_power_bars(table);
        case PlotKind::allocation: return plot_allocation(table);
    }
    throw InputError("unknown plot kind");
}

std::vector<std::string> render_plots(const CsvTable& table, PlotKind kind, const std::string& out_dir) {
    const auto files = build_plots(table, kind);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        throw IoError("cannot create directory '" + out_dir + "': " + ec.message());
    }
    std::vector<std::string> written;
    for (const auto& [name, svg] : files) {
        const std::string path = (std::filesystem::path(out_dir) / name).string();
        write_file(path, svg);
        written.push_back(path);
    }
    return written;
}

}  // namespace madlab
