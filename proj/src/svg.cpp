#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "fkdv/branch_io.hpp"

namespace fkdv {

namespace {

constexpr double kWidth = 700.0, kHeight = 600.0;
constexpr double kLeft = 75.0, kRight = 25.0, kTop = 25.0, kBottom = 60.0;

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string fmtg(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

// ~6 round tick values covering [lo, hi].
std::vector<double> nice_ticks(double lo, double hi) {
    double span = hi - lo;
    if (span <= 0) span = 1.0;
    double raw = span / 5.0;
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double norm = raw / mag;
    double step = (norm < 1.5 ? 1.0 : norm < 3.5 ? 2.0 : norm < 7.5 ? 5.0 : 10.0) * mag;
    std::vector<double> ticks;
    double t = std::ceil(lo / step) * step;
    for (; t <= hi + 1e-9 * span; t += step) ticks.push_back(t);
    return ticks;
}

struct Mapper {
    double xlo, xhi, ylo, yhi;
    double px(double x) const {
        return kLeft + (x - xlo) / (xhi - xlo) * (kWidth - kLeft - kRight);
    }
    double py(double y) const {
        return kHeight - kBottom - (y - ylo) / (yhi - ylo) * (kHeight - kTop - kBottom);
    }
};

const char* marker_color(VerdictKind v) {
    switch (v) {
        case VerdictKind::stable: return "#1f77b4";
        case VerdictKind::marginally_stable: return "#ff7f0e";
        case VerdictKind::unstable: return "#d62728";
        case VerdictKind::degenerate_kernel: return "#9467bd";
    }
    return "#000000";
}

}  // namespace

void emit_plot(const std::string& csv_path, PlotKind kind, const std::string& svg_path) {
    std::ifstream is(csv_path);
    if (!is) throw std::runtime_error("emit_plot: cannot open " + csv_path);
    BranchCsv data = read_branch_csv(is);
    if (data.points.empty()) throw std::runtime_error("emit_plot: no data rows in " + csv_path);

    const bool momentum_plane = (kind == PlotKind::mu_vs_omega);
    std::vector<double> xs, ys;
    for (const BranchPoint& p : data.points) {
        xs.push_back(momentum_plane ? p.omega : p.c);
        ys.push_back(momentum_plane ? p.mu : p.b);
    }
    double xlo = *std::min_element(xs.begin(), xs.end());
    double xhi = *std::max_element(xs.begin(), xs.end());
    double ylo = *std::min_element(ys.begin(), ys.end());
    double yhi = *std::max_element(ys.begin(), ys.end());
    if (momentum_plane) {
        // make room for the constant branch mu = omega^2
        ylo = std::min(ylo, xlo * xlo);
        yhi = std::max(yhi, xhi * xhi);
    }
    double xpad = 0.05 * std::max(xhi - xlo, 1e-12);
    double ypad = 0.05 * std::max(yhi - ylo, 1e-12);
    Mapper map{xlo - xpad, xhi + xpad, ylo - ypad, yhi + ypad};

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"700\" height=\"600\" "
           "viewBox=\"0 0 700 600\">\n";
    svg << "<rect width=\"700\" height=\"600\" fill=\"white\"/>\n";

    for (double t : nice_ticks(map.xlo, map.xhi)) {
        double px = map.px(t);
        svg << "<line x1=\"" << fmt2(px) << "\" y1=\"" << fmt2(kHeight - kBottom)
            << "\" x2=\"" << fmt2(px) << "\" y2=\"" << fmt2(kHeight - kBottom + 6)
            << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << fmt2(px) << "\" y=\"" << fmt2(kHeight - kBottom + 20)
            << "\" font-size=\"12\" text-anchor=\"middle\">" << fmtg(t) << "</text>\n";
    }
    for (double t : nice_ticks(map.ylo, map.yhi)) {
        double py = map.py(t);
        svg << "<line x1=\"" << fmt2(kLeft - 6) << "\" y1=\"" << fmt2(py) << "\" x2=\""
            << fmt2(kLeft) << "\" y2=\"" << fmt2(py) << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << fmt2(kLeft - 10) << "\" y=\"" << fmt2(py + 4)
            << "\" font-size=\"12\" text-anchor=\"end\">" << fmtg(t) << "</text>\n";
    }
    // axes
    svg << "<line x1=\"" << fmt2(kLeft) << "\" y1=\"" << fmt2(kHeight - kBottom)
        << "\" x2=\"" << fmt2(kWidth - kRight) << "\" y2=\"" << fmt2(kHeight - kBottom)
        << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << fmt2(kLeft) << "\" y1=\"" << fmt2(kTop) << "\" x2=\""
        << fmt2(kLeft) << "\" y2=\"" << fmt2(kHeight - kBottom) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << fmt2(0.5 * (kLeft + kWidth - kRight)) << "\" y=\""
        << fmt2(kHeight - 15) << "\" font-size=\"15\" text-anchor=\"middle\">"
        << (momentum_plane ? "omega" : "c") << "</text>\n";
    svg << "<text x=\"20\" y=\"" << fmt2(0.5 * (kTop + kHeight - kBottom))
        << "\" font-size=\"15\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
        << fmt2(0.5 * (kTop + kHeight - kBottom)) << ")\">" << (momentum_plane ? "mu" : "b")
        << "</text>\n";

    if (momentum_plane) {
        // constant-solution curve mu = omega^2
        svg << "<path d=\"";
        for (int i = 0; i <= 200; ++i) {
            double w = map.xlo + (map.xhi - map.xlo) * i / 200.0;
            double mu = w * w;
            if (mu < map.ylo || mu > map.yhi) {
                if (i == 0) svg << "M";
                continue;
            }
            svg << (i == 0 ? "M" : "L") << fmt2(map.px(w)) << " " << fmt2(map.py(mu)) << " ";
        }
        svg << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.2\"/>\n";
        svg << "<text x=\"" << fmt2(kWidth - kRight - 10) << "\" y=\"" << fmt2(kTop + 16)
            << "\" font-size=\"12\" text-anchor=\"end\">constant branch mu = omega^2"
               "</text>\n";
    }

    svg << "<path d=\"";
    for (size_t i = 0; i < xs.size(); ++i)
        svg << (i == 0 ? "M" : "L") << fmt2(map.px(xs[i])) << " " << fmt2(map.py(ys[i]))
            << " ";
    svg << "\" fill=\"none\" stroke=\"#555555\" stroke-width=\"1\"/>\n";

    for (size_t i = 0; i < xs.size(); ++i) {
        double px = map.px(xs[i]), py = map.py(ys[i]);
        const char* color = marker_color(data.points[i].verdict);
        if (data.points[i].verdict == VerdictKind::unstable) {
            svg << "<path d=\"M" << fmt2(px - 3) << " " << fmt2(py - 3) << " L"
                << fmt2(px + 3) << " " << fmt2(py + 3) << " M" << fmt2(px - 3) << " "
                << fmt2(py + 3) << " L" << fmt2(px + 3) << " " << fmt2(py - 3)
                << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
        } else {
            svg << "<circle cx=\"" << fmt2(px) << "\" cy=\"" << fmt2(py)
                << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
        }
    }
    svg << "</svg>\n";

    std::ofstream os(svg_path);
    if (!os) throw std::runtime_error("emit_plot: cannot write " + svg_path);
    os << svg.str();
}

}  // namespace fkdv
