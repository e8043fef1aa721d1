#include "causalfm/eval/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>

#include "causalfm/core/error.hpp"

namespace causalfm::eval {

namespace {

constexpr double kPanelW = 320.0;
constexpr double kPanelH = 240.0;
constexpr double kMargin = 48.0;
constexpr const char *kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace

void write_curves_svg(std::ostream &out, const ExperimentReport &report, const std::vector<std::string> &metrics,
                      const std::string &x_label) {
    std::vector<std::string> methods;
    std::map<std::string, std::map<std::string, std::vector<std::pair<double, double>>>> curves;
    std::set<double> xs;
    for (const auto &s : report.aggregates) {
        if (std::find(methods.begin(), methods.end(), s.method) == methods.end()) methods.push_back(s.method);
        if (!s.param || !std::isfinite(s.mean)) continue;
        curves[s.metric][s.method].emplace_back(*s.param, s.mean);
        xs.insert(*s.param);
    }
    const double x_lo = xs.empty() ? 0.0 : *xs.begin();
    const double x_hi = xs.empty() || *xs.rbegin() == x_lo ? x_lo + 1.0 : *xs.rbegin();

    const std::size_t cols = std::min<std::size_t>(2, std::max<std::size_t>(1, metrics.size()));
    const std::size_t rows = (metrics.size() + cols - 1) / cols;
    const double cell_w = kPanelW + 2 * kMargin;
    const double cell_h = kPanelH + 2 * kMargin;
    const double legend_h = 24.0 * static_cast<double>(methods.size()) + 16.0;
    const double width = cell_w * static_cast<double>(cols);
    const double height = cell_h * static_cast<double>(rows) + legend_h;

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
        << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (std::size_t k = 0; k < metrics.size(); ++k) {
        const double ox = cell_w * static_cast<double>(k % cols) + kMargin;
        const double oy = cell_h * static_cast<double>(k / cols) + kMargin;
        const auto px = [&](double x) { return ox + (x - x_lo) / (x_hi - x_lo) * kPanelW; };
        const auto py = [&](double y) { return oy + (1.0 - std::clamp(y, 0.0, 1.0)) * kPanelH; };

        out << "<g>\n<text x=\"" << num(ox + kPanelW / 2) << "\" y=\"" << num(oy - 12)
            << "\" text-anchor=\"middle\" font-size=\"13\">" << metrics[k] << "</text>\n";
        out << "<rect x=\"" << num(ox) << "\" y=\"" << num(oy) << "\" width=\"" << num(kPanelW) << "\" height=\""
            << num(kPanelH) << "\" fill=\"none\" stroke=\"#444\"/>\n";
        for (double y = 0.0; y <= 1.0001; y += 0.25) {
            out << "<line x1=\"" << num(ox) << "\" x2=\"" << num(ox + kPanelW) << "\" y1=\"" << num(py(y))
                << "\" y2=\"" << num(py(y)) << "\" stroke=\"#ddd\"/>\n";
            out << "<text x=\"" << num(ox - 6) << "\" y=\"" << num(py(y) + 4) << "\" text-anchor=\"end\">" << tick(y)
                << "</text>\n";
        }
        for (const double x : xs) {
            out << "<text x=\"" << num(px(x)) << "\" y=\"" << num(oy + kPanelH + 16)
                << "\" text-anchor=\"middle\">" << tick(x) << "</text>\n";
        }
        out << "<text x=\"" << num(ox + kPanelW / 2) << "\" y=\"" << num(oy + kPanelH + 34)
            << "\" text-anchor=\"middle\">" << x_label << "</text>\n";

        for (std::size_t m = 0; m < methods.size(); ++m) {
            const auto mit = curves.find(metrics[k]);
            if (mit == curves.end()) continue;
            const auto cit = mit->second.find(methods[m]);
            if (cit == mit->second.end()) continue;
            auto pts = cit->second;
            std::sort(pts.begin(), pts.end());
            const char *color = kColors[m % std::size(kColors)];
            out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
            for (const auto &[x, y] : pts) out << num(px(x)) << ',' << num(py(y)) << ' ';
            out << "\"/>\n";
            for (const auto &[x, y] : pts) {
                out << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y)) << "\" r=\"3\" fill=\"" << color
                    << "\"/>\n";
            }
        }
        out << "</g>\n";
    }

    const double ly = cell_h * static_cast<double>(rows) + 8.0;
    for (std::size_t m = 0; m < methods.size(); ++m) {
        const double y = ly + 24.0 * static_cast<double>(m);
        out << "<rect x=\"" << num(kMargin) << "\" y=\"" << num(y) << "\" width=\"14\" height=\"14\" fill=\""
            << kColors[m % std::size(kColors)] << "\"/>\n";
        out << "<text x=\"" << num(kMargin + 20) << "\" y=\"" << num(y + 11) << "\">" << methods[m] << "</text>\n";
    }
    out << "</svg>\n";
}

void write_curves_svg(const std::filesystem::path &path, const ExperimentReport &report,
                      const std::vector<std::string> &metrics, const std::string &x_label) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write plot '" + path.string() + "'");
    write_curves_svg(out, report, metrics, x_label);
}

}  // namespace causalfm::eval
