#pragma once

#include "sudest/numkernel.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace sudest {

/// Output directory precedence: explicit flag, then SUDEST_OUT_DIR, then the
/// working directory. Created if missing.
std::filesystem::path resolve_output_dir(const std::string& flag_value);

/// RFC 4180 CSV with `#`-prefixed provenance lines (tool version, resolved
/// config, seed). Timing never goes into CSV so fixed-seed reruns are
/// byte-identical.
class CsvWriter {
public:
    CsvWriter(std::string version, const nlohmann::json& config, std::uint64_t seed);

    void header(const std::vector<std::string>& columns);
    void row(const std::vector<std::string>& cells);

    const std::string& text() const { return text_; }
    void write(const std::filesystem::path& path) const;

private:
    std::string text_;
};

std::string csv_cell(double value);
std::string csv_cell(std::int64_t value);

struct SvgSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

/// Minimal self-contained line chart.
std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<SvgSeries>& series);

/// Histogram of samples with an optional vertical marker.
std::string svg_histogram(const std::string& title, const std::string& x_label,
                          const std::vector<double>& samples, int bins, double marker);

void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Report envelope shared by every JSON artifact: version, resolved config,
/// seed, wall-clock duration.
nlohmann::json report_envelope(const nlohmann::json& config, std::uint64_t seed,
                               double duration_ms);

}  // namespace sudest
