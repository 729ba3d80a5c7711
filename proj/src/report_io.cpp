#include "maxop/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace maxop {

std::string format_sig17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct CsvWriter::Impl {
    std::ofstream out;
};

CsvWriter::CsvWriter(const std::string& path) : impl_(new Impl) {
    impl_->out.open(path, std::ios::binary);
    if (!impl_->out) throw std::runtime_error("CsvWriter: cannot open " + path);
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) impl_->out << ',';
        const std::string& f = fields[i];
        if (f.find_first_of(",\"\r\n") != std::string::npos) {
            impl_->out << '"';
            for (char c : f) {
                if (c == '"') impl_->out << '"';
                impl_->out << c;
            }
            impl_->out << '"';
        } else {
            impl_->out << f;
        }
    }
    impl_->out << "\r\n";
}

namespace {

struct Mapper {
    double lo, hi;
    double plo, phi;
    bool log;
    double operator()(double v) const {
        double t = log ? std::log10(std::max(v, 1e-300)) : v;
        return plo + (t - lo) / (hi - lo) * (phi - plo);
    }
};

std::string trim_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

}  // namespace

void write_svg_plot(const std::string& path, const std::vector<SvgSeries>& series,
                    const std::string& title, const std::string& xlabel,
                    const std::string& ylabel, bool loglog) {
    const double W = 800, H = 500, ML = 70, MR = 20, MT = 40, MB = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            double xv = s.x[i], yv = s.y[i];
            if (loglog) {
                if (xv <= 0 || yv <= 0) continue;
                xv = std::log10(xv);
                yv = std::log10(yv);
            }
            xmin = std::min(xmin, xv);
            xmax = std::max(xmax, xv);
            ymin = std::min(ymin, yv);
            ymax = std::max(ymax, yv);
        }
    if (xmin > xmax) { xmin = 0; xmax = 1; }
    if (ymin > ymax) { ymin = 0; ymax = 1; }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    Mapper mx{xmin, xmax, ML, W - MR, loglog};
    Mapper my{ymin, ymax, H - MB, MT, loglog};  // y inverted

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    svg << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    svg << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"16\">" << title << "</text>\n";
    // axes
    svg << "<line x1=\"" << ML << "\" y1=\"" << H - MB << "\" x2=\"" << W - MR << "\" y2=\""
        << H - MB << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << ML << "\" y1=\"" << MT << "\" x2=\"" << ML << "\" y2=\"" << H - MB
        << "\" stroke=\"black\"/>\n";
    // ticks
    for (int i = 0; i <= 5; ++i) {
        double tx = xmin + (xmax - xmin) * i / 5.0;
        double px = ML + (W - ML - MR) * i / 5.0;
        svg << "<line x1=\"" << px << "\" y1=\"" << H - MB << "\" x2=\"" << px << "\" y2=\""
            << H - MB + 5 << "\" stroke=\"black\"/>\n";
        double label = loglog ? std::pow(10.0, tx) : tx;
        svg << "<text x=\"" << px << "\" y=\"" << H - MB + 20
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << trim_num(label) << "</text>\n";
        double ty = ymin + (ymax - ymin) * i / 5.0;
        double py = H - MB - (H - MB - MT) * i / 5.0;
        svg << "<line x1=\"" << ML - 5 << "\" y1=\"" << py << "\" x2=\"" << ML << "\" y2=\"" << py
            << "\" stroke=\"black\"/>\n";
        label = loglog ? std::pow(10.0, ty) : ty;
        svg << "<text x=\"" << ML - 8 << "\" y=\"" << py + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << trim_num(label) << "</text>\n";
    }
    svg << "<text x=\"" << (ML + W - MR) / 2 << "\" y=\"" << H - 10
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << xlabel
        << "</text>\n";
    svg << "<text x=\"16\" y=\"" << (MT + H - MB) / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
           "transform=\"rotate(-90 16 " << (MT + H - MB) / 2 << ")\">" << ylabel << "</text>\n";

    double legend_y = MT + 10;
    for (const auto& s : series) {
        svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            double xv = s.x[i], yv = s.y[i];
            if (loglog && (xv <= 0 || yv <= 0)) continue;
            svg << mx(xv) << "," << my(yv) << " ";
        }
        svg << "\"/>\n";
        if (!s.label.empty()) {
            svg << "<line x1=\"" << W - MR - 150 << "\" y1=\"" << legend_y << "\" x2=\""
                << W - MR - 120 << "\" y2=\"" << legend_y << "\" stroke=\"" << s.color
                << "\" stroke-width=\"1.5\"/>\n";
            svg << "<text x=\"" << W - MR - 114 << "\" y=\"" << legend_y + 4
                << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label << "</text>\n";
            legend_y += 18;
        }
    }
    svg << "</svg>\n";

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_svg_plot: cannot open " + path);
    out << svg.str();
}

void write_report_json(const std::string& path, const PropertyReport& report) {
    nlohmann::json j;
    to_json(j, report);
    write_json_file(path, j);
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_json_file: cannot open " + path);
    out << j.dump(2) << "\n";
}

}  // namespace maxop
