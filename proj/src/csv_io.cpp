#include "koper/csv_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace koper {

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot open for writing: " + file.string());
    return out;
}

}  // namespace

void write_path_csv(const std::filesystem::path& file, const StablePath& path) {
    auto out = open_out(file);
    out << "t,value\n";
    for (std::size_t i = 0; i < path.size(); ++i)
        out << format_number(path.time(i)) << ',' << format_number(path.value_at(i))
            << '\n';
}

StablePath read_path_csv(const std::filesystem::path& file, double alpha,
                         std::uint64_t seed) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open for reading: " + file.string());
    std::string line;
    if (!std::getline(in, line) || line != "t,value")
        throw std::runtime_error("path csv: missing 't,value' header");
    std::vector<double> grid, values;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("path csv: malformed row: " + line);
        grid.push_back(std::stod(line.substr(0, comma)));
        values.push_back(std::stod(line.substr(comma + 1)));
    }
    return import_path(grid, values, alpha, seed);
}

void write_trajectory_csv(const std::filesystem::path& file, const Trajectory& traj) {
    auto out = open_out(file);
    out << "t,x,y,z\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const State& s = traj.states[i];
        out << format_number(traj.times[i]) << ',' << format_number(s.x) << ','
            << format_number(s.y) << ',' << format_number(s.z) << '\n';
    }
}

void write_manifold_csv(const std::filesystem::path& file, const ManifoldGraph& g) {
    auto out = open_out(file);
    out << "y0,z0,h\n";
    for (std::size_t i = 0; i < g.y_grid.size(); ++i)
        for (std::size_t j = 0; j < g.z_grid.size(); ++j)
            out << format_number(g.y_grid[i]) << ',' << format_number(g.z_grid[j])
                << ',' << format_number(g.h_values[i][j]) << '\n';
}

void write_equilibrium_csv(const std::filesystem::path& file,
                           const std::vector<EquilibriumRow>& rows) {
    auto out = open_out(file);
    out << "eps,trace,det,re1,im1,re2,im2,re3,im3,stable\n";
    for (const auto& r : rows) {
        out << format_number(r.eps) << ',' << format_number(r.cls.trace) << ','
            << format_number(r.cls.det);
        for (const auto& ev : r.cls.eigenvalues)
            out << ',' << format_number(ev.real()) << ',' << format_number(ev.imag());
        out << ',' << (r.cls.stable ? 1 : 0) << '\n';
    }
}

void write_series_csv(const std::filesystem::path& file,
                      const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& columns) {
    if (header.size() != columns.size())
        throw std::invalid_argument("write_series_csv: header/column mismatch");
    auto out = open_out(file);
    for (std::size_t i = 0; i < header.size(); ++i)
        out << (i ? "," : "") << header[i];
    out << '\n';
    std::size_t rows = columns.empty() ? 0 : columns[0].size();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c)
            out << (c ? "," : "") << format_number(columns[c][r]);
        out << '\n';
    }
}

}  // namespace koper
