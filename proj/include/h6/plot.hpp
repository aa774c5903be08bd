#pragma once

// Minimal log-log line plot as standalone SVG.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace h6 {

inline void write_loglog_svg(std::ostream& os, const std::vector<double>& x, const std::vector<double>& y, const std::string& title,
                             const std::string& xlabel, const std::string& ylabel) {
    const double W = 480, H = 360, L = 70, R = 20, T = 40, B = 50;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] > 0 && y[i] > 0) {
            lx.push_back(std::log10(x[i]));
            ly.push_back(std::log10(y[i]));
        }
    auto range = [](const std::vector<double>& v) {
        if (v.empty()) return std::pair{0.0, 1.0};
        auto [a, b] = std::minmax_element(v.begin(), v.end());
        double lo = *a, hi = *b;
        if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
        return std::pair{lo, hi};
    };
    const auto [x0, x1] = range(lx);
    const auto [y0, y1] = range(ly);
    auto px = [&](double v) { return L + (v - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double v) { return H - B - (v - y0) / (y1 - y0) * (H - T - B); };
    char buf[128];
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">log10 "
       << xlabel << "</text>\n";
    os << "<text x=\"16\" y=\"" << H / 2 << "\" transform=\"rotate(-90 16 " << H / 2
       << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">log10 " << ylabel << "</text>\n";
    for (double v : {x0, x1}) {
        std::snprintf(buf, sizeof buf, "%.3g", v);
        os << "<text x=\"" << px(v) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
           << buf << "</text>\n";
    }
    for (double v : {y0, y1}) {
        std::snprintf(buf, sizeof buf, "%.3g", v);
        os << "<text x=\"" << L - 6 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
           << buf << "</text>\n";
    }
    os << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < lx.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", i ? " " : "", px(lx[i]), py(ly[i]));
        os << buf;
    }
    os << "\"/>\n";
    for (std::size_t i = 0; i < lx.size(); ++i) {
        std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"steelblue\"/>\n", px(lx[i]), py(ly[i]));
        os << buf;
    }
    os << "</svg>\n";
}

}  // namespace h6
