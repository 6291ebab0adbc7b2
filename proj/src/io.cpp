#include "sudest/io.hpp"

#include "sudest/version.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace sudest {

std::filesystem::path resolve_output_dir(const std::string& flag_value) {
    std::filesystem::path dir;
    if (!flag_value.empty()) {
        dir = flag_value;
    } else if (const char* env = std::getenv("SUDEST_OUT_DIR"); env && *env) {
        dir = env;
    } else {
        dir = ".";
    }
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw ValidationError("resolve_output_dir: cannot create '" + dir.string() +
                              "': " + ec.message());
    return dir;
}

namespace {

std::string escape_cell(const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

CsvWriter::CsvWriter(std::string version, const nlohmann::json& config, std::uint64_t seed) {
    text_ += "# sudest " + version + "\n";
    text_ += "# config " + config.dump() + "\n";
    text_ += "# seed " + std::to_string(seed) + "\n";
}

void CsvWriter::header(const std::vector<std::string>& columns) { row(columns); }

void CsvWriter::row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) text_ += ',';
        text_ += escape_cell(cells[i]);
    }
    text_ += '\n';
}

void CsvWriter::write(const std::filesystem::path& path) const { write_text_file(path, text_); }

std::string csv_cell(double value) {
    std::ostringstream os;
    os.precision(17);
    os << value;
    return os.str();
}

std::string csv_cell(std::int64_t value) { return std::to_string(value); }

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("write_text_file: cannot open '" + path.string() + "'");
    out << text;
    if (!out) throw ValidationError("write_text_file: write failed for '" + path.string() + "'");
}

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 440.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 25.0;
constexpr double kMarginTop = 45.0;
constexpr double kMarginBottom = 55.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

struct Range {
    double lo = 0.0;
    double hi = 1.0;
};

Range pad(Range r) {
    if (r.hi <= r.lo) {
        r.lo -= 0.5;
        r.hi += 0.5;
    }
    const double span = r.hi - r.lo;
    r.lo -= 0.05 * span;
    r.hi += 0.05 * span;
    return r;
}

std::string num(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

void axes(std::ostringstream& svg, const std::string& title, const std::string& x_label,
          const std::string& y_label, const Range& xr, const Range& yr) {
    const double x0 = kMarginLeft, x1 = kWidth - kMarginRight;
    const double y0 = kHeight - kMarginBottom, y1 = kMarginTop;
    svg << "<rect width='" << kWidth << "' height='" << kHeight << "' fill='white'/>\n";
    svg << "<text x='" << kWidth / 2 << "' y='24' text-anchor='middle' font-size='16'>"
        << title << "</text>\n";
    svg << "<line x1='" << x0 << "' y1='" << y0 << "' x2='" << x1 << "' y2='" << y0
        << "' stroke='black'/>\n";
    svg << "<line x1='" << x0 << "' y1='" << y0 << "' x2='" << x0 << "' y2='" << y1
        << "' stroke='black'/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double f = i / 4.0;
        const double xv = xr.lo + f * (xr.hi - xr.lo);
        const double yv = yr.lo + f * (yr.hi - yr.lo);
        const double xp = x0 + f * (x1 - x0);
        const double yp = y0 - f * (y0 - y1);
        svg << "<line x1='" << xp << "' y1='" << y0 << "' x2='" << xp << "' y2='" << y0 + 5
            << "' stroke='black'/>\n";
        svg << "<text x='" << xp << "' y='" << y0 + 20 << "' text-anchor='middle' font-size='11'>"
            << num(xv) << "</text>\n";
        svg << "<line x1='" << x0 - 5 << "' y1='" << yp << "' x2='" << x0 << "' y2='" << yp
            << "' stroke='black'/>\n";
        svg << "<text x='" << x0 - 8 << "' y='" << yp + 4 << "' text-anchor='end' font-size='11'>"
            << num(yv) << "</text>\n";
    }
    svg << "<text x='" << (x0 + x1) / 2 << "' y='" << kHeight - 12
        << "' text-anchor='middle' font-size='13'>" << x_label << "</text>\n";
    svg << "<text x='18' y='" << (y0 + y1) / 2
        << "' text-anchor='middle' font-size='13' transform='rotate(-90 18 " << (y0 + y1) / 2
        << ")'>" << y_label << "</text>\n";
}

double map_x(double v, const Range& r) {
    return kMarginLeft + (v - r.lo) / (r.hi - r.lo) * (kWidth - kMarginLeft - kMarginRight);
}

double map_y(double v, const Range& r) {
    return kHeight - kMarginBottom -
           (v - r.lo) / (r.hi - r.lo) * (kHeight - kMarginTop - kMarginBottom);
}

}  // namespace

std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<SvgSeries>& series) {
    Range xr{1e300, -1e300}, yr{1e300, -1e300};
    for (const SvgSeries& s : series) {
        for (double v : s.x) {
            xr.lo = std::min(xr.lo, v);
            xr.hi = std::max(xr.hi, v);
        }
        for (double v : s.y) {
            yr.lo = std::min(yr.lo, v);
            yr.hi = std::max(yr.hi, v);
        }
    }
    xr = pad(xr);
    yr = pad(yr);

    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='" << kHeight
        << "'>\n";
    axes(svg, title, x_label, y_label, xr, yr);
    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = kPalette[i % 6];
        std::ostringstream points;
        for (std::size_t k = 0; k < series[i].x.size(); ++k) {
            if (k) points << ' ';
            points << map_x(series[i].x[k], xr) << ',' << map_y(series[i].y[k], yr);
        }
        svg << "<polyline fill='none' stroke='" << color << "' stroke-width='2' points='"
            << points.str() << "'/>\n";
        for (std::size_t k = 0; k < series[i].x.size(); ++k)
            svg << "<circle cx='" << map_x(series[i].x[k], xr) << "' cy='"
                << map_y(series[i].y[k], yr) << "' r='3' fill='" << color << "'/>\n";
        svg << "<text x='" << kWidth - kMarginRight - 8 << "' y='"
            << kMarginTop + 18.0 * static_cast<double>(i + 1)
            << "' text-anchor='end' font-size='12' fill='" << color << "'>" << series[i].name
            << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

std::string svg_histogram(const std::string& title, const std::string& x_label,
                          const std::vector<double>& samples, int bins, double marker) {
    Range xr{1e300, -1e300};
    for (double v : samples) {
        xr.lo = std::min(xr.lo, v);
        xr.hi = std::max(xr.hi, v);
    }
    xr.lo = std::min(xr.lo, marker);
    xr.hi = std::max(xr.hi, marker);
    xr = pad(xr);

    std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
    const double width = (xr.hi - xr.lo) / bins;
    for (double v : samples) {
        int b = static_cast<int>((v - xr.lo) / width);
        b = std::clamp(b, 0, bins - 1);
        counts[static_cast<std::size_t>(b)] += 1.0;
    }
    Range yr{0.0, *std::max_element(counts.begin(), counts.end())};
    yr = pad(yr);
    yr.lo = 0.0;

    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='" << kHeight
        << "'>\n";
    axes(svg, title, x_label, "count", xr, yr);
    for (int b = 0; b < bins; ++b) {
        const double lo = xr.lo + b * width;
        const double x = map_x(lo, xr);
        const double w = map_x(lo + width, xr) - x;
        const double y = map_y(counts[static_cast<std::size_t>(b)], yr);
        const double y0 = map_y(0.0, yr);
        svg << "<rect x='" << x << "' y='" << y << "' width='" << w * 0.92 << "' height='"
            << y0 - y << "' fill='#1f77b4'/>\n";
    }
    const double mx = map_x(marker, xr);
    svg << "<line x1='" << mx << "' y1='" << map_y(yr.lo, yr) << "' x2='" << mx << "' y2='"
        << map_y(yr.hi, yr) << "' stroke='#d62728' stroke-width='2' stroke-dasharray='6,4'/>\n";
    svg << "</svg>\n";
    return svg.str();
}

nlohmann::json report_envelope(const nlohmann::json& config, std::uint64_t seed,
                               double duration_ms) {
    nlohmann::json j;
    j["version"] = kVersion;
    j["config"] = config;
    j["seed"] = seed;
    j["duration_ms"] = duration_ms;
    return j;
}

}  // namespace sudest
