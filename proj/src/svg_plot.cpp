#include "koper/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "koper/csv_io.hpp"

namespace koper {

namespace {

constexpr int kWidth = 720;
constexpr int kHeight = 480;
constexpr int kMargin = 48;

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    void pad() {
        if (!(hi > lo)) {
            lo -= 1.0;
            hi += 1.0;
        }
        double d = 0.05 * (hi - lo);
        lo -= d;
        hi += d;
    }
    double map(double v, double out_lo, double out_hi) const {
        return out_lo + (v - lo) / (hi - lo) * (out_hi - out_lo);
    }
};

std::ofstream open_svg(const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot open for writing: " + file.string());
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
        << kHeight << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    return out;
}

void close_svg(std::ofstream& out) { out << "</svg>\n"; }

std::string escape_xml(const std::string& s) {
    std::string r;
    for (char c : s) {
        switch (c) {
            case '&': r += "&amp;"; break;
            case '<': r += "&lt;"; break;
            case '>': r += "&gt;"; break;
            default: r += c;
        }
    }
    return r;
}

void draw_title(std::ofstream& out, const std::string& title) {
    out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << escape_xml(title)
        << "</text>\n";
}

void draw_frame(std::ofstream& out) {
    out << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\""
        << kWidth - 2 * kMargin << "\" height=\"" << kHeight - 2 * kMargin
        << "\" fill=\"none\" stroke=\"#444\"/>\n";
}

void draw_polyline(std::ofstream& out, const std::vector<double>& xs,
                   const std::vector<double>& ys, const std::string& color) {
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1\" points=\"";
    // Cap vertex count to keep files small.
    std::size_t n = xs.size();
    std::size_t stride = std::max<std::size_t>(1, n / 20000);
    for (std::size_t i = 0; i < n; i += stride)
        out << format_number(xs[i]) << ',' << format_number(ys[i]) << ' ';
    if (n > 0 && (n - 1) % stride != 0)
        out << format_number(xs[n - 1]) << ',' << format_number(ys[n - 1]);
    out << "\"/>\n";
}

}  // namespace

void write_timeseries_svg(const std::filesystem::path& file,
                          const std::vector<double>& times,
                          const std::vector<Series>& series,
                          const std::string& title) {
    Range rx, ry;
    for (double t : times) rx.add(t);
    for (const auto& s : series)
        for (double v : *s.values) ry.add(v);
    rx.pad();
    ry.pad();

    auto out = open_svg(file);
    draw_title(out, title);
    draw_frame(out);
    int legend_y = kMargin + 16;
    for (const auto& s : series) {
        std::vector<double> xs(times.size()), ys(s.values->size());
        for (std::size_t i = 0; i < times.size(); ++i) {
            xs[i] = rx.map(times[i], kMargin, kWidth - kMargin);
            ys[i] = ry.map((*s.values)[i], kHeight - kMargin, kMargin);
        }
        draw_polyline(out, xs, ys, s.color);
        out << "<text x=\"" << kWidth - kMargin - 80 << "\" y=\"" << legend_y
            << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << s.color
            << "\">" << escape_xml(s.label) << "</text>\n";
        legend_y += 16;
    }
    close_svg(out);
}

void write_path3d_svg(const std::filesystem::path& file, const Trajectory& traj,
                      const std::string& title) {
    const double c = std::sqrt(3.0) / 2.0;
    std::vector<double> us(traj.states.size()), vs(traj.states.size());
    Range ru, rv;
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const State& s = traj.states[i];
        us[i] = (s.x - s.y) * c;
        vs[i] = (s.x + s.y) / 2.0 - s.z;
        ru.add(us[i]);
        rv.add(vs[i]);
    }
    ru.pad();
    rv.pad();
    auto out = open_svg(file);
    draw_title(out, title);
    draw_frame(out);
    std::vector<double> xs(us.size()), ys(vs.size());
    for (std::size_t i = 0; i < us.size(); ++i) {
        xs[i] = ru.map(us[i], kMargin, kWidth - kMargin);
        ys[i] = rv.map(vs[i], kHeight - kMargin, kMargin);
    }
    draw_polyline(out, xs, ys, "#1f4e9e");
    close_svg(out);
}

void write_heatmap_svg(const std::filesystem::path& file, const ManifoldGraph& g,
                       const std::string& title) {
    Range rh;
    for (const auto& row : g.h_values)
        for (double h : row) rh.add(h);
    if (!(rh.hi > rh.lo)) {
        rh.lo -= 1.0;
        rh.hi += 1.0;
    }
    auto out = open_svg(file);
    draw_title(out, title);
    draw_frame(out);
    double cell_w = static_cast<double>(kWidth - 2 * kMargin) / g.y_grid.size();
    double cell_h = static_cast<double>(kHeight - 2 * kMargin) / g.z_grid.size();
    for (std::size_t i = 0; i < g.y_grid.size(); ++i)
        for (std::size_t j = 0; j < g.z_grid.size(); ++j) {
            double h = g.h_values[i][j];
            int shade = std::isnan(h)
                            ? 0
                            : static_cast<int>(255.0 * (h - rh.lo) / (rh.hi - rh.lo));
            shade = std::clamp(shade, 0, 255);
            out << "<rect x=\"" << format_number(kMargin + i * cell_w) << "\" y=\""
                << format_number(kHeight - kMargin - (j + 1) * cell_h)
                << "\" width=\"" << format_number(cell_w) << "\" height=\""
                << format_number(cell_h) << "\" fill=\"rgb(" << shade << ','
                << (255 - shade) << ",128)\"/>\n";
        }
    close_svg(out);
}

}  // namespace koper
