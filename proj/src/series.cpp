#include "alame/series.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace alame {

void GridSeries::add_column(const std::string& name, std::vector<double> values) {
    columns.emplace_back(name, std::move(values));
}

void GridSeries::add_meta(const std::string& key, const std::string& value) {
    meta.emplace_back(key, value);
}

void GridSeries::add_meta(const std::string& key, double value) {
    meta.emplace_back(key, format_number(value));
}

void GridSeries::validate() const {
    if (xs.size() < 2) throw std::invalid_argument("GridSeries: need at least 2 samples");
    const double h = (xs.back() - xs.front()) / double(xs.size() - 1);
    if (!(h > 0.0)) throw std::invalid_argument("GridSeries: xs must be increasing");
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        if (std::abs(xs[i + 1] - xs[i] - h) > 1e-12 * std::max(1.0, std::abs(xs[i])))
            throw std::invalid_argument("GridSeries: xs not uniform");
    }
    for (const auto& [name, col] : columns) {
        if (col.size() != xs.size())
            throw std::invalid_argument("GridSeries: column '" + name + "' length mismatch");
    }
}

std::vector<double> uniform_grid(double xmin, double xmax, int samples) {
    if (samples < 2) throw std::invalid_argument("uniform_grid: samples must be >= 2");
    if (!(xmin < xmax)) throw std::invalid_argument("uniform_grid: xmin must be < xmax");
    std::vector<double> xs(samples);
    const double h = (xmax - xmin) / double(samples - 1);
    for (int i = 0; i < samples; ++i) xs[i] = xmin + i * h;
    xs.back() = xmax;
    return xs;
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string to_csv(const GridSeries& s) {
    s.validate();
    std::string out;
    out.reserve(64 * s.xs.size());
    for (const auto& [k, v] : s.meta) out += "# " + k + "=" + v + "\n";
    out += "x";
    for (const auto& [name, col] : s.columns) out += "," + name;
    out += "\n";
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
        out += format_number(s.xs[i]);
        for (const auto& [name, col] : s.columns) out += "," + format_number(col[i]);
        out += "\n";
    }
    return out;
}

std::string to_json(const GridSeries& s) {
    s.validate();
    nlohmann::ordered_json j;
    j["meta"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : s.meta) j["meta"][k] = v;
    j["x"] = s.xs;
    j["columns"] = nlohmann::ordered_json::object();
    for (const auto& [name, col] : s.columns) j["columns"][name] = col;
    return j.dump(2) + "\n";
}

namespace {

const char* kPalette[] = {"#999999", "#000000", "#cc3311", "#0077bb", "#33bb55", "#ee7733"};

std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

} // namespace

std::string to_svg(const GridSeries& s) {
    s.validate();
    const int W = 900, H = 560, ML = 70, MR = 20, MT = 20, MB = 50;
    double lo = 1e300, hi = -1e300;
    for (const auto& [name, col] : s.columns) {
        for (double v : col) {
            if (!std::isfinite(v)) continue;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (!(lo < hi)) {
        lo -= 1.0;
        hi += 1.0;
    }
    const double xpad = 0.0, ypad = 0.04 * (hi - lo);
    const double x0 = s.xs.front() - xpad, x1 = s.xs.back() + xpad;
    const double y0 = lo - ypad, y1 = hi + ypad;
    auto px = [&](double x) { return ML + (x - x0) / (x1 - x0) * (W - ML - MR); };
    auto py = [&](double y) { return H - MB - (y - y0) / (y1 - y0) * (H - MT - MB); };

    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"900\" height=\"560\" "
                      "viewBox=\"0 0 900 560\">\n";
    out += "<rect x=\"" + svg_num(ML) + "\" y=\"" + svg_num(MT) + "\" width=\"" +
           svg_num(W - ML - MR) + "\" height=\"" + svg_num(H - MT - MB) +
           "\" fill=\"none\" stroke=\"#333333\"/>\n";
    for (int t = 0; t <= 5; ++t) {
        const double xv = x0 + (x1 - x0) * t / 5.0, yv = y0 + (y1 - y0) * t / 5.0;
        out += "<line x1=\"" + svg_num(px(xv)) + "\" y1=\"" + svg_num(H - MB) + "\" x2=\"" +
               svg_num(px(xv)) + "\" y2=\"" + svg_num(H - MB + 6) + "\" stroke=\"#333333\"/>\n";
        out += "<text x=\"" + svg_num(px(xv)) + "\" y=\"" + svg_num(H - MB + 22) +
               "\" font-size=\"13\" text-anchor=\"middle\">" + svg_num(xv) + "</text>\n";
        out += "<line x1=\"" + svg_num(ML - 6) + "\" y1=\"" + svg_num(py(yv)) + "\" x2=\"" +
               svg_num(ML) + "\" y2=\"" + svg_num(py(yv)) + "\" stroke=\"#333333\"/>\n";
        out += "<text x=\"" + svg_num(ML - 10) + "\" y=\"" + svg_num(py(yv) + 4) +
               "\" font-size=\"13\" text-anchor=\"end\">" + svg_num(yv) + "</text>\n";
    }
    int ci = 0;
    for (const auto& [name, col] : s.columns) {
        const char* color = kPalette[ci % 6];
        std::string pts;
        bool open = false;
        for (std::size_t i = 0; i < s.xs.size(); ++i) {
            if (!std::isfinite(col[i])) {
                if (open) {
                    out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
                           "\" stroke-width=\"1.4\" points=\"" + pts + "\"/>\n";
                    pts.clear();
                    open = false;
                }
                continue;
            }
            pts += svg_num(px(s.xs[i])) + "," + svg_num(py(col[i])) + " ";
            open = true;
        }
        if (open)
            out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
                   "\" stroke-width=\"1.4\" points=\"" + pts + "\"/>\n";
        out += "<text x=\"" + svg_num(W - MR - 8) + "\" y=\"" + svg_num(MT + 18 + 16 * ci) +
               "\" font-size=\"13\" text-anchor=\"end\" fill=\"" + color + "\">" + name +
               "</text>\n";
        ++ci;
    }
    out += "</svg>\n";
    return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open '" + tmp + "' for writing");
        os.write(content.data(), std::streamsize(content.size()));
        os.flush();
        if (!os) {
            os.close();
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw std::runtime_error("failed writing '" + tmp + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw std::runtime_error("failed to move temporary file onto '" + path + "'");
    }
}

} // namespace alame
