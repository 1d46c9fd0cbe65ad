#include "qmeta/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace qmeta {

std::string format_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string render_csv(const CsvTable& table) {
    std::string out;
    for (const auto& c : table.header_comments) {
        out += "# ";
        out += c;
        out += '\n';
    }
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out += ',';
        out += table.columns[i];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += row[i];
        }
        out += '\n';
    }
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    f << content;
}

namespace {

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

} // namespace

std::string render_svg(const PlotSpec& spec) {
    const double W = 800, H = 600;
    const double L = 90, R = 30, T = 50, B = 70; // margins
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : spec.series) {
        for (auto [x, y] : s.points) {
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            if (spec.logy && y <= 0.0) continue;
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            const double yy = spec.logy ? std::log10(y) : y;
            ymin = std::min(ymin, yy);
            ymax = std::max(ymax, yy);
        }
    }
    if (!(xmax > xmin)) {
        xmin -= 1;
        xmax += 1;
    }
    if (!(ymax > ymin)) {
        ymin -= 1;
        ymax += 1;
    }
    const double xpad = 0.02 * (xmax - xmin), ypad = 0.05 * (ymax - ymin);
    xmin -= xpad;
    xmax += xpad;
    ymin -= ypad;
    ymax += ypad;
    auto X = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
    auto Y = [&](double y) {
        const double yy = spec.logy ? std::log10(y) : y;
        return H - B - (yy - ymin) / (ymax - ymin) * (H - T - B);
    };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" "
           "viewBox=\"0 0 800 600\">\n";
    svg += "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
    svg += "<text x=\"400\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"18\">" + spec.title + "</text>\n";
    // axes
    svg += "<line x1=\"" + fmt2(L) + "\" y1=\"" + fmt2(H - B) + "\" x2=\"" + fmt2(W - R) +
           "\" y2=\"" + fmt2(H - B) + "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + fmt2(L) + "\" y1=\"" + fmt2(T) + "\" x2=\"" + fmt2(L) +
           "\" y2=\"" + fmt2(H - B) + "\" stroke=\"black\"/>\n";
    // ticks
    for (int i = 0; i <= 5; ++i) {
        const double fx = xmin + (xmax - xmin) * i / 5.0;
        const double px = X(fx);
        svg += "<line x1=\"" + fmt2(px) + "\" y1=\"" + fmt2(H - B) + "\" x2=\"" + fmt2(px) +
               "\" y2=\"" + fmt2(H - B + 6) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + fmt2(px) + "\" y=\"" + fmt2(H - B + 24) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
               fmt_tick(fx) + "</text>\n";
        const double fyv = ymin + (ymax - ymin) * i / 5.0;
        const double fy = spec.logy ? std::pow(10.0, fyv) : fyv;
        const double py = H - B - (fyv - ymin) / (ymax - ymin) * (H - T - B);
        svg += "<line x1=\"" + fmt2(L - 6) + "\" y1=\"" + fmt2(py) + "\" x2=\"" + fmt2(L) +
               "\" y2=\"" + fmt2(py) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + fmt2(L - 10) + "\" y=\"" + fmt2(py + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" +
               fmt_tick(fy) + "</text>\n";
    }
    svg += "<text x=\"" + fmt2((L + W - R) / 2) + "\" y=\"" + fmt2(H - 20) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" +
           spec.xlabel + "</text>\n";
    svg += "<text x=\"22\" y=\"" + fmt2((T + H - B) / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" "
           "transform=\"rotate(-90 22 " + fmt2((T + H - B) / 2) + ")\">" +
           spec.ylabel + "</text>\n";
    // series
    int li = 0;
    for (const auto& s : spec.series) {
        std::string pts;
        bool open = false;
        std::string path;
        for (auto [x, y] : s.points) {
            const bool ok = std::isfinite(x) && std::isfinite(y) && (!spec.logy || y > 0.0);
            if (!ok) {
                open = false;
                continue;
            }
            path += open ? " L " : " M ";
            path += fmt2(X(x)) + " " + fmt2(Y(y));
            open = true;
        }
        svg += "<path d=\"" + path + "\" fill=\"none\" stroke=\"" + s.color +
               "\" stroke-width=\"1.5\"/>\n";
        svg += "<text x=\"" + fmt2(W - R - 10) + "\" y=\"" + fmt2(T + 18 + 18 * li) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"13\" fill=\"" +
               s.color + "\">" + s.name + "</text>\n";
        ++li;
        (void)pts;
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace qmeta
