#include "gdfractal/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gdfractal {

namespace {

std::ofstream open_out(const std::string& path, std::ios_base::openmode mode = std::ios::out) {
    std::ofstream f(path, mode);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    return f;
}

}  // namespace

void write_pgm(const std::string& path, int width, int height,
               const std::vector<std::uint8_t>& bytes) {
    if (static_cast<std::size_t>(width) * height != bytes.size())
        throw std::invalid_argument("write_pgm: size mismatch");
    auto f = open_out(path, std::ios::binary);
    f << "P5\n" << width << " " << height << "\n255\n";
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void read_pgm(const std::string& path, int& width, int& height, std::vector<std::uint8_t>& bytes) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for reading: " + path);
    std::string magic;
    int maxval = 0;
    f >> magic >> width >> height >> maxval;
    if (magic != "P5" || width <= 0 || height <= 0 || maxval != 255)
        throw std::runtime_error("read_pgm: not a supported P5 file: " + path);
    f.get();  // single whitespace after the header
    bytes.resize(static_cast<std::size_t>(width) * height);
    f.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw std::runtime_error("read_pgm: truncated file: " + path);
}

void write_ppm_channel(const std::string& path, const BasinGrid& grid, const Vec& channel,
                       double lo, double hi) {
    const int nx = grid.spec.nx, ny = grid.spec.ny;
    if (channel.size() != grid.labels.size())
        throw std::invalid_argument("write_ppm_channel: channel size mismatch");
    auto f = open_out(path, std::ios::binary);
    f << "P6\n" << nx << " " << ny << "\n255\n";
    const double span = hi > lo ? hi - lo : 1.0;
    std::vector<std::uint8_t> row(static_cast<std::size_t>(nx) * 3);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const std::size_t k = static_cast<std::size_t>(j) * nx + i;
            std::uint8_t r = 96, g = 96, b = 96;  // gray: non-converged or undefined
            if (grid.labels[k] != 0 && std::isfinite(channel[k])) {
                double t = (channel[k] - lo) / span;
                t = std::clamp(t, 0.0, 1.0);
                // Blue -> cyan -> yellow -> red ramp.
                const double r4 = std::clamp(1.5 - std::abs(4.0 * t - 3.0), 0.0, 1.0);
                const double g4 = std::clamp(1.5 - std::abs(4.0 * t - 2.0), 0.0, 1.0);
                const double b4 = std::clamp(1.5 - std::abs(4.0 * t - 1.0), 0.0, 1.0);
                r = static_cast<std::uint8_t>(255.0 * r4);
                g = static_cast<std::uint8_t>(255.0 * g4);
                b = static_cast<std::uint8_t>(255.0 * b4);
            }
            row[3 * i] = r;
            row[3 * i + 1] = g;
            row[3 * i + 2] = b;
        }
        f.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
}

void write_basin_csv(const std::string& path, const BasinGrid& grid,
                     const std::vector<std::pair<std::string, Vec>>& extra_columns,
                     const std::string& meta) {
    for (const auto& [name, col] : extra_columns)
        if (col.size() != grid.labels.size())
            throw std::invalid_argument("write_basin_csv: column size mismatch: " + name);
    auto f = open_out(path);
    f << "# gdfractal csv schema=1 kind=basin nx=" << grid.spec.nx << " ny=" << grid.spec.ny
      << " x_min=" << grid.spec.x_min << " x_max=" << grid.spec.x_max
      << " y_min=" << grid.spec.y_min << " y_max=" << grid.spec.y_max;
    if (!meta.empty()) f << " " << meta;
    f << "\n";
    f << "x,y,label";
    for (const auto& [name, col] : extra_columns) f << "," << name;
    f << "\n";
    f.precision(17);
    for (int j = 0; j < grid.spec.ny; ++j)
        for (int i = 0; i < grid.spec.nx; ++i) {
            const std::size_t k = static_cast<std::size_t>(j) * grid.spec.nx + i;
            f << grid.spec.cell_x(i) << "," << grid.spec.cell_y(j) << ","
              << static_cast<int>(grid.labels[k]);
            for (const auto& [name, col] : extra_columns) f << "," << col[k];
            f << "\n";
        }
}

BasinGrid read_basin_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(f, line) || line.rfind("# gdfractal csv schema=1", 0) != 0)
        throw std::runtime_error("read_basin_csv: missing schema line: " + path);

    BasinGrid g;
    std::istringstream hdr(line);
    std::string tok;
    while (hdr >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = tok.substr(0, eq);
        const std::string val = tok.substr(eq + 1);
        if (key == "nx") g.spec.nx = std::stoi(val);
        else if (key == "ny") g.spec.ny = std::stoi(val);
        else if (key == "x_min") g.spec.x_min = std::stod(val);
        else if (key == "x_max") g.spec.x_max = std::stod(val);
        else if (key == "y_min") g.spec.y_min = std::stod(val);
        else if (key == "y_max") g.spec.y_max = std::stod(val);
    }
    g.spec.validate();
    g.meta = line;
    std::getline(f, line);  // header row
    g.labels.assign(static_cast<std::size_t>(g.spec.nx) * g.spec.ny, 0);
    std::size_t k = 0;
    while (std::getline(f, line) && k < g.labels.size()) {
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw std::runtime_error("read_basin_csv: malformed row");
        auto c3 = line.find(',', c2 + 1);
        if (c3 == std::string::npos) c3 = line.size();
        g.labels[k++] = static_cast<std::uint8_t>(std::stoi(line.substr(c2 + 1, c3 - c2 - 1)));
    }
    if (k != g.labels.size()) throw std::runtime_error("read_basin_csv: row count mismatch");
    return g;
}

void write_points_csv(const std::string& path, const std::vector<Point2>& points,
                      const std::string& meta) {
    auto f = open_out(path);
    f << "# gdfractal csv schema=1 kind=points n=" << points.size();
    if (!meta.empty()) f << " " << meta;
    f << "\nx,y\n";
    f.precision(17);
    for (const auto& p : points) f << p[0] << "," << p[1] << "\n";
}

std::string dimension_fit_json(const DimensionFit& fit, const std::string& meta) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["dimension"] = fit.dimension;
    j["intercept"] = fit.intercept;
    j["r_squared"] = fit.r_squared;
    j["box_widths"] = fit.box_widths;
    j["counts"] = fit.counts;
    if (!meta.empty()) j["meta"] = meta;
    return j.dump(2);
}

}  // namespace gdfractal
