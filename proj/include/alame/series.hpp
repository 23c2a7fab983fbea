#pragma once

#include <string>
#include <utility>
#include <vector>

namespace alame {

/// Uniformly sampled named columns plus ordered metadata; the unit of all
/// file output. Formatting is fixed (17 significant digits, '.' decimal,
/// '\n' line endings) so identical inputs give byte-identical files.
struct GridSeries {
    std::vector<double> xs;
    std::vector<std::pair<std::string, std::vector<double>>> columns;
    std::vector<std::pair<std::string, std::string>> meta;

    void add_column(const std::string& name, std::vector<double> values);
    void add_meta(const std::string& key, const std::string& value);
    void add_meta(const std::string& key, double value);
    /// xs strictly increasing and uniform to 1e-12; columns same length as xs.
    void validate() const;
};

std::vector<double> uniform_grid(double xmin, double xmax, int samples);

/// %.17g with the C locale.
std::string format_number(double v);

std::string to_csv(const GridSeries& s);
std::string to_json(const GridSeries& s);
/// Minimal line plot: polylines and axes only.
std::string to_svg(const GridSeries& s);

/// Write via a temporary file and rename, so an error never leaves a
/// partially written file behind.
void write_file_atomic(const std::string& path, const std::string& content);

} // namespace alame
