#include "morl/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "morl/core.hpp"

namespace morl::plots {

using nlohmann::json;

namespace {

constexpr double width = 720, height = 440;
constexpr double left = 70, right = 150, top = 40, bottom = 60;
constexpr const char *palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v == 0.0 ? 0.0 : v);
    return buf;
}

std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-12 ? 0.0 : v);
    return buf;
}

std::string escape(const std::string &s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Frame {
    double y_lo, y_hi;
    double plot_w() const { return width - left - right; }
    double plot_h() const { return height - top - bottom; }
    double y(double v) const { return top + plot_h() * (1.0 - (v - y_lo) / (y_hi - y_lo)); }
};

Frame make_frame(double lo, double hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-9) lo -= 0.5, hi += 0.5;
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
}

void open_svg(std::ostringstream &o, const std::string &title, const std::string &y_label, const Frame &f) {
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
      << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << num(width / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"15\">" << escape(title) << "</text>\n";
    o << "<text transform=\"translate(16," << num(top + f.plot_h() / 2) << ") rotate(-90)\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"12\">" << escape(y_label) << "</text>\n";
    o << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(f.plot_w()) << "\" height=\""
      << num(f.plot_h()) << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double v = f.y_lo + (f.y_hi - f.y_lo) * i / 4.0;
        const double y = f.y(v);
        o << "<line x1=\"" << num(left - 4) << "\" y1=\"" << num(y) << "\" x2=\"" << num(left + f.plot_w())
          << "\" y2=\"" << num(y) << "\" stroke=\"#dddddd\"/>\n";
        o << "<text x=\"" << num(left - 6) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\" "
          << "font-family=\"sans-serif\" font-size=\"10\">" << tick(v) << "</text>\n";
    }
}

void x_tick(std::ostringstream &o, double x, const std::string &label) {
    o << "<text x=\"" << num(x) << "\" y=\"" << num(height - bottom + 16) << "\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"10\">" << escape(label) << "</text>\n";
}

} // namespace

std::string line_chart(const std::string &title, const std::string &x_label, const std::string &y_label,
                       const std::vector<std::string> &x_ticks, const std::vector<Series> &series) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto &s : series)
        for (std::size_t i = 0; i < s.mean.size(); ++i) {
            const double sd = i < s.stddev.size() ? s.stddev[i] : 0.0;
            lo = std::min(lo, s.mean[i] - sd);
            hi = std::max(hi, s.mean[i] + sd);
        }
    const Frame f = make_frame(lo, hi);
    std::ostringstream o;
    open_svg(o, title, y_label, f);
    const std::size_t n = x_ticks.size();
    auto x_at = [&](std::size_t i) { return left + f.plot_w() * (n <= 1 ? 0.5 : (i + 0.5) / static_cast<double>(n)); };
    for (std::size_t i = 0; i < n; ++i) x_tick(o, x_at(i), x_ticks[i]);
    o << "<text x=\"" << num(left + f.plot_w() / 2) << "\" y=\"" << num(height - 18) << "\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"12\">" << escape(x_label) << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto &s = series[k];
        const char *color = palette[k % std::size(palette)];
        if (s.mean.empty()) continue;
        std::string band;
        for (std::size_t i = 0; i < s.mean.size(); ++i)
            band += num(x_at(i)) + "," + num(f.y(s.mean[i] + (i < s.stddev.size() ? s.stddev[i] : 0.0))) + " ";
        for (std::size_t i = s.mean.size(); i-- > 0;)
            band += num(x_at(i)) + "," + num(f.y(s.mean[i] - (i < s.stddev.size() ? s.stddev[i] : 0.0))) + " ";
        o << "<polygon points=\"" << band << "\" fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
        std::string line;
        for (std::size_t i = 0; i < s.mean.size(); ++i) line += num(x_at(i)) + "," + num(f.y(s.mean[i])) + " ";
        o << "<polyline points=\"" << line << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        const double ly = top + 16 + 18 * static_cast<double>(k);
        o << "<line x1=\"" << num(width - right + 12) << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << num(width - right + 32)
          << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        o << "<text x=\"" << num(width - right + 38) << "\" y=\"" << num(ly) << "\" font-family=\"sans-serif\" "
          << "font-size=\"11\">" << escape(s.name) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

std::string bar_chart(const std::string &title, const std::string &y_label, const std::vector<Bar> &bars) {
    double lo = 0.0, hi = 0.0;
    for (const auto &b : bars) {
        lo = std::min(lo, b.value - b.error);
        hi = std::max(hi, b.value + b.error);
    }
    const Frame f = make_frame(lo, hi);
    std::ostringstream o;
    open_svg(o, title, y_label, f);
    const double slot = f.plot_w() / static_cast<double>(std::max<std::size_t>(bars.size(), 1));
    for (std::size_t i = 0; i < bars.size(); ++i) {
        const auto &b = bars[i];
        const double cx = left + slot * (i + 0.5);
        const double y0 = f.y(0.0), y1 = f.y(b.value);
        o << "<rect x=\"" << num(cx - slot * 0.3) << "\" y=\"" << num(std::min(y0, y1)) << "\" width=\""
          << num(slot * 0.6) << "\" height=\"" << num(std::abs(y1 - y0)) << "\" fill=\"" << palette[i % std::size(palette)]
          << "\"/>\n";
        o << "<line x1=\"" << num(cx) << "\" y1=\"" << num(f.y(b.value - b.error)) << "\" x2=\"" << num(cx)
          << "\" y2=\"" << num(f.y(b.value + b.error)) << "\" stroke=\"black\"/>\n";
        x_tick(o, cx, b.label);
    }
    o << "</svg>\n";
    return o.str();
}

std::string box_plot(const std::string &title, const std::string &y_label, const std::vector<Box> &boxes) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto &b : boxes)
        for (double v : b.samples) lo = std::min(lo, v), hi = std::max(hi, v);
    const Frame f = make_frame(lo, hi);
    std::ostringstream o;
    open_svg(o, title, y_label, f);
    const double slot = f.plot_w() / static_cast<double>(std::max<std::size_t>(boxes.size(), 1));
    auto quantile = [](std::vector<double> xs, double q) {
        std::sort(xs.begin(), xs.end());
        const double pos = q * static_cast<double>(xs.size() - 1);
        const auto i = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(i);
        return i + 1 < xs.size() ? xs[i] * (1 - frac) + xs[i + 1] * frac : xs[i];
    };
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        const auto &b = boxes[i];
        const double cx = left + slot * (i + 0.5);
        x_tick(o, cx, b.label);
        if (b.samples.empty()) continue;
        const double q1 = quantile(b.samples, 0.25), q2 = quantile(b.samples, 0.5), q3 = quantile(b.samples, 0.75);
        const double mn = *std::min_element(b.samples.begin(), b.samples.end());
        const double mx = *std::max_element(b.samples.begin(), b.samples.end());
        o << "<line x1=\"" << num(cx) << "\" y1=\"" << num(f.y(mn)) << "\" x2=\"" << num(cx) << "\" y2=\""
          << num(f.y(mx)) << "\" stroke=\"black\"/>\n";
        o << "<rect x=\"" << num(cx - slot * 0.3) << "\" y=\"" << num(f.y(q3)) << "\" width=\"" << num(slot * 0.6)
          << "\" height=\"" << num(f.y(q1) - f.y(q3)) << "\" fill=\"#9ecae1\" stroke=\"black\"/>\n";
        o << "<line x1=\"" << num(cx - slot * 0.3) << "\" y1=\"" << num(f.y(q2)) << "\" x2=\"" << num(cx + slot * 0.3)
          << "\" y2=\"" << num(f.y(q2)) << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
    }
    o << "</svg>\n";
    return o.str();
}

namespace {

void write_file(const std::filesystem::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

std::vector<double> field(const json &rows, const char *key) {
    std::vector<double> out;
    for (const auto &r : rows) out.push_back(r.at(key).get<double>());
    return out;
}

} // namespace

std::vector<std::filesystem::path> emit_plots(const json &summary, const std::filesystem::path &out_dir,
                                              std::ostream &warn) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> written;
    const std::string env = summary.value("env", "");
    const std::string mode = summary.value("mode", "");

    if (summary.contains("algorithms") && !summary.at("algorithms").empty()) {
        const auto &algos = summary.at("algorithms");
        std::vector<std::string> ticks;
        for (std::size_t k = 0; k < summary.at("preferences").size(); ++k) ticks.push_back("P" + std::to_string(k + 1));
        std::vector<Series> gamma;
        for (const auto &a : algos)
            gamma.push_back({a.at("name").get<std::string>(), field(a.at("gamma_c"), "mean"), field(a.at("gamma_c"), "std")});
        const auto gamma_path = out_dir / "gamma_c.svg";
        write_file(gamma_path, line_chart("Average return after convergence (" + env + ", " + mode + ")", "preference",
                                          "mean return, last 50 episodes", ticks, gamma));
        written.push_back(gamma_path);

        std::vector<Series> loss;
        bool any_loss = false;
        for (const auto &a : algos) {
            loss.push_back({a.at("name").get<std::string>(), field(a.at("loss"), "mean"), field(a.at("loss"), "std")});
            any_loss = any_loss || !a.at("loss").empty();
        }
        if (any_loss) {
            std::vector<std::string> tticks;
            for (std::size_t k = 0; k + 1 < ticks.size(); ++k) tticks.push_back(ticks[k] + ">" + ticks[k + 1]);
            const auto loss_path = out_dir / "loss.svg";
            write_file(loss_path, line_chart("Average loss after preference change (" + env + ", " + mode + ")",
                                             "transition", "loss", tticks, loss));
            written.push_back(loss_path);
        } else {
            warn << "warning: summary has no loss values; loss plot omitted\n";
        }
    }

    if (summary.contains("phi_sweep")) {
        std::vector<Box> boxes;
        for (const auto &p : summary.at("phi_sweep"))
            boxes.push_back({tick(p.at("phi").get<double>()), p.at("losses").get<std::vector<double>>()});
        const auto path = out_dir / "phi_sweep.svg";
        write_file(path, box_plot("Loss after preference change per phi (" + env + ")", "loss", boxes));
        written.push_back(path);
    }

    if (summary.contains("variants")) {
        const auto &v = summary.at("variants");
        std::vector<Bar> bars;
        for (const auto &e : v.at("entries"))
            bars.push_back({e.at("name").get<std::string>(), e.at("mean").get<double>(), e.at("std").get<double>()});
        const std::string axis = v.value("axis", "variant");
        const auto path = out_dir / ("variants_" + axis + ".svg");
        write_file(path, bar_chart("Sum of per-preference median returns by " + axis + " (" + env + ")",
                                   "mean over runs", bars));
        written.push_back(path);
    }
    return written;
}

} // namespace morl::plots
