#include "latalign/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace latalign {

namespace {

const char* const kLight[] = {"#9ecae1", "#fdae6b"};
const char* const kDark[] = {"#1f77b4", "#e6550d"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Frame {
    double x, y, w, h;
    double x0, x1, y0, y1;

    double px(double v) const { return x + (x1 > x0 ? (v - x0) / (x1 - x0) : 0.5) * w; }
    double py(double v) const { return y + h - (y1 > y0 ? (v - y0) / (y1 - y0) : 0.5) * h; }
};

void axes(std::string& out, const Frame& f, const std::string& xlabel, const std::string& ylabel) {
    out += "<rect x=\"" + num(f.x) + "\" y=\"" + num(f.y) + "\" width=\"" + num(f.w) + "\" height=\"" + num(f.h) +
           "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double vx = f.x0 + (f.x1 - f.x0) * i / 4.0;
        const double vy = f.y0 + (f.y1 - f.y0) * i / 4.0;
        out += "<text x=\"" + num(f.px(vx)) + "\" y=\"" + num(f.y + f.h + 14) +
               "\" font-size=\"10\" text-anchor=\"middle\">" + num(vx) + "</text>\n";
        out += "<text x=\"" + num(f.x - 4) + "\" y=\"" + num(f.py(vy) + 3) +
               "\" font-size=\"10\" text-anchor=\"end\">" + num(vy) + "</text>\n";
    }
    out += "<text x=\"" + num(f.x + f.w / 2) + "\" y=\"" + num(f.y + f.h + 30) +
           "\" font-size=\"11\" text-anchor=\"middle\">" + escape(xlabel) + "</text>\n";
    out += "<text x=\"" + num(f.x - 36) + "\" y=\"" + num(f.y + f.h / 2) + "\" font-size=\"11\" text-anchor=\"middle\" "
           "transform=\"rotate(-90 " + num(f.x - 36) + " " + num(f.y + f.h / 2) + ")\">" + escape(ylabel) + "</text>\n";
}

std::string header(double w, double h) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) + "\" height=\"" + num(h) +
           "\" viewBox=\"0 0 " + num(w) + " " + num(h) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

}  // namespace

std::string scatter_svg(const std::vector<AlignmentMetrics>& metrics, std::size_t dim, const std::string& title) {
    double hi = 0.0;
    for (const auto& m : metrics) hi = std::max({hi, m.delta_rs.at(dim), m.delta_ode.at(dim)});
    if (hi <= 0.0) hi = 1.0;
    hi *= 1.05;
    const Frame f{60, 30, 360, 360, 0.0, hi, 0.0, hi};
    std::string out = header(450, 440);
    out += "<text x=\"240\" y=\"18\" font-size=\"13\" text-anchor=\"middle\">" + escape(title) + "</text>\n";
    axes(out, f, "delta R,S", "delta ODE");
    out += "<line x1=\"" + num(f.px(0)) + "\" y1=\"" + num(f.py(0)) + "\" x2=\"" + num(f.px(hi)) + "\" y2=\"" +
           num(f.py(hi)) + "\" stroke=\"#888\" stroke-dasharray=\"4 3\"/>\n";
    for (const auto& m : metrics) {
        out += "<circle cx=\"" + num(f.px(m.delta_rs[dim])) + "\" cy=\"" + num(f.py(m.delta_ode[dim])) +
               "\" r=\"2.5\" fill=\"" + std::string(kDark[dim % 2]) + "\" fill-opacity=\"0.6\"/>\n";
    }
    out += "</svg>\n";
    return out;
}

std::string trajectory_svg(const std::vector<TrajectoryExport>& exports, const std::string& title) {
    const std::size_t cols = std::min<std::size_t>(4, std::max<std::size_t>(exports.size(), 1));
    const std::size_t rows = (exports.size() + cols - 1) / cols;
    const double pw = 260, ph = 200;
    std::string out = header(cols * pw + 20, rows * ph + 40);
    out += "<text x=\"" + num((cols * pw + 20) / 2) + "\" y=\"18\" font-size=\"13\" text-anchor=\"middle\">" +
           escape(title) + "</text>\n";
    for (std::size_t i = 0; i < exports.size(); ++i) {
        const auto& e = exports[i];
        double lo = 0.0, hi = 0.0;
        bool first = true;
        auto extend = [&](double v) {
            lo = first ? v : std::min(lo, v);
            hi = first ? v : std::max(hi, v);
            first = false;
        };
        for (const auto* s : {&e.r, &e.s})
            for (const auto& m : s->means)
                for (double v : m) extend(v);
        for (const auto& m : e.samples)
            for (double v : m) extend(v);
        const double pad = std::max(1e-6, 0.05 * (hi - lo));
        const double t0 = e.sample_times.empty() ? 0.0 : e.sample_times.front();
        const double t1 = e.sample_times.empty() ? 1.0 : e.sample_times.back();
        const Frame f{(i % cols) * pw + 60, (i / cols) * ph + 40, pw - 70, ph - 60, t0, t1, lo - pad, hi + pad};
        axes(out, f, "months", "latent");
        out += "<text x=\"" + num(f.x + f.w / 2) + "\" y=\"" + num(f.y - 4) +
               "\" font-size=\"10\" text-anchor=\"middle\">" + escape(e.patient_id) + "</text>\n";
        const std::size_t d = e.samples.empty() ? 0 : e.samples.front().size();
        for (std::size_t k = 0; k < d; ++k) {
            std::string pts;
            for (std::size_t j = 0; j < e.sample_times.size(); ++j)
                pts += num(f.px(e.sample_times[j])) + "," + num(f.py(e.samples[j][k])) + " ";
            out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + kDark[k % 2] + "\"/>\n";
            for (std::size_t j = 0; j < e.r.times.size(); ++j) {
                out += "<rect x=\"" + num(f.px(e.r.times[j]) - 3) + "\" y=\"" + num(f.py(e.r.means[j][k]) - 3) +
                       "\" width=\"6\" height=\"6\" fill=\"" + kLight[k % 2] + "\"/>\n";
            }
            for (std::size_t j = 0; j < e.s.times.size(); ++j) {
                out += "<circle cx=\"" + num(f.px(e.s.times[j])) + "\" cy=\"" + num(f.py(e.s.means[j][k])) +
                       "\" r=\"3\" fill=\"" + kDark[k % 2] + "\"/>\n";
            }
        }
    }
    out += "</svg>\n";
    return out;
}

}  // namespace latalign
