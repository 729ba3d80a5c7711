#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "maxop/verify.hpp"

namespace maxop {

/// 17 significant digits, round-trip safe.
std::string format_sig17(double v);

/// RFC 4180 writer: CRLF row endings, quoting of fields containing commas,
/// quotes or line breaks.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void row(const std::vector<std::string>& fields);

private:
    struct Impl;
    Impl* impl_;
};

struct SvgSeries {
    std::vector<double> x;
    std::vector<double> y;
    std::string label;
    std::string color = "#1f77b4";
};

/// Minimal self-contained SVG line plot (polylines, axes, tick labels,
/// legend); log-log switches both axes to log10 with decade ticks.
void write_svg_plot(const std::string& path, const std::vector<SvgSeries>& series,
                    const std::string& title, const std::string& xlabel,
                    const std::string& ylabel, bool loglog = false);

void write_report_json(const std::string& path, const PropertyReport& report);
void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace maxop
