#include "wavebench/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "wavebench/common.hpp"

namespace wavebench {

namespace {

constexpr int kW = 800, kH = 480;
constexpr int kMarginL = 70, kMarginR = 20, kMarginT = 40, kMarginB = 40;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

}  // namespace

void svg_line_plot(const std::filesystem::path& out_path, const std::string& title,
                   const std::vector<SvgSeries>& series, bool log_y) {
    std::ofstream out(out_path);
    if (!out) throw IoError("cannot open svg: " + out_path.string());

    double ymin = 1e300, ymax = -1e300;
    std::size_t nmax = 1;
    for (const auto& s : series) {
        nmax = std::max(nmax, s.y.size());
        for (double y : s.y) {
            if (!std::isfinite(y)) continue;
            const double yy = log_y ? (y > 0 ? std::log10(y) : 0.0) : y;
            ymin = std::min(ymin, yy);
            ymax = std::max(ymax, yy);
        }
    }
    if (ymin > ymax) {
        ymin = 0;
        ymax = 1;
    }
    if (ymax - ymin < 1e-300) ymax = ymin + 1;

    const double px = kW - kMarginL - kMarginR;
    const double py = kH - kMarginT - kMarginB;
    auto X = [&](std::size_t i) {
        return kMarginL + px * static_cast<double>(i) / std::max<std::size_t>(1, nmax - 1);
    };
    auto Y = [&](double y) {
        const double yy = log_y ? (y > 0 ? std::log10(y) : ymin) : y;
        return kMarginT + py * (1.0 - (yy - ymin) / (ymax - ymin));
    };

    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kW << "' height='" << kH
        << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
    out << "<text x='" << kW / 2 << "' y='20' text-anchor='middle' font-size='15'>" << esc(title)
        << "</text>\n";
    out << "<line x1='" << kMarginL << "' y1='" << kMarginT << "' x2='" << kMarginL << "' y2='"
        << kH - kMarginB << "' stroke='black'/>\n";
    out << "<line x1='" << kMarginL << "' y1='" << kH - kMarginB << "' x2='" << kW - kMarginR
        << "' y2='" << kH - kMarginB << "' stroke='black'/>\n";
    for (int tick = 0; tick <= 4; ++tick) {
        const double v = ymin + (ymax - ymin) * tick / 4.0;
        const double yy = kMarginT + py * (1.0 - tick / 4.0);
        out << "<text x='" << kMarginL - 6 << "' y='" << yy + 4
            << "' text-anchor='end' font-size='11'>" << (log_y ? "1e" : "")
            << (log_y ? std::to_string(v) : std::to_string(v)) << "</text>\n";
    }

    int ci = 0;
    for (const auto& s : series) {
        out << "<polyline fill='none' stroke='" << kColors[ci % 6] << "' stroke-width='1.5' points='";
        for (std::size_t i = 0; i < s.y.size(); ++i)
            if (std::isfinite(s.y[i])) out << X(i) << ',' << Y(s.y[i]) << ' ';
        out << "'/>\n";
        out << "<text x='" << kW - kMarginR - 150 << "' y='" << kMarginT + 16 * (ci + 1)
            << "' fill='" << kColors[ci % 6] << "' font-size='12'>" << esc(s.name) << "</text>\n";
        ++ci;
    }
    out << "</svg>\n";
    if (!out) throw IoError("failed writing svg: " + out_path.string());
}

void svg_bar_chart(const std::filesystem::path& out_path, const std::string& title,
                   const std::vector<std::string>& labels, const std::vector<double>& values,
                   const std::vector<double>& errors) {
    std::ofstream out(out_path);
    if (!out) throw IoError("cannot open svg: " + out_path.string());
    double ymax = 1e-300;
    for (std::size_t i = 0; i < values.size(); ++i)
        ymax = std::max(ymax, values[i] + (i < errors.size() ? errors[i] : 0.0));

    const double px = kW - kMarginL - kMarginR;
    const double py = kH - kMarginT - kMarginB;
    const std::size_t n = std::max<std::size_t>(1, values.size());
    const double bw = px / (2.0 * n);

    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kW << "' height='" << kH
        << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
    out << "<text x='" << kW / 2 << "' y='20' text-anchor='middle' font-size='15'>" << esc(title)
        << "</text>\n";
    out << "<line x1='" << kMarginL << "' y1='" << kH - kMarginB << "' x2='" << kW - kMarginR
        << "' y2='" << kH - kMarginB << "' stroke='black'/>\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double x = kMarginL + px * (2.0 * i + 0.5) / (2.0 * n);
        const double h = py * values[i] / ymax;
        out << "<rect x='" << x << "' y='" << kH - kMarginB - h << "' width='" << bw
            << "' height='" << h << "' fill='" << kColors[i % 6] << "'/>\n";
        if (i < errors.size() && errors[i] > 0.0) {
            const double he = py * errors[i] / ymax;
            const double cx = x + bw / 2;
            out << "<line x1='" << cx << "' y1='" << kH - kMarginB - h - he << "' x2='" << cx
                << "' y2='" << std::min<double>(kH - kMarginB, kH - kMarginB - h + he)
                << "' stroke='black'/>\n";
        }
        out << "<text x='" << x + bw / 2 << "' y='" << kH - kMarginB + 14
            << "' text-anchor='middle' font-size='11'>" << esc(labels[i]) << "</text>\n";
        out << "<text x='" << x + bw / 2 << "' y='" << kH - kMarginB - h - 6
            << "' text-anchor='middle' font-size='10'>" << values[i] << "</text>\n";
    }
    out << "</svg>\n";
    if (!out) throw IoError("failed writing svg: " + out_path.string());
}

}  // namespace wavebench
