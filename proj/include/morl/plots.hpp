#pragma once

// Plain-text SVG charts for experiment summaries.

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace morl::plots {

struct Series {
    std::string name;
    std::vector<double> mean;
    std::vector<double> stddev;
};

struct Bar {
    std::string label;
    double value;
    double error;
};

struct Box {
    std::string label;
    std::vector<double> samples;
};

std::string line_chart(const std::string &title, const std::string &x_label, const std::string &y_label,
                       const std::vector<std::string> &x_ticks, const std::vector<Series> &series);
std::string bar_chart(const std::string &title, const std::string &y_label, const std::vector<Bar> &bars);
std::string box_plot(const std::string &title, const std::string &y_label, const std::vector<Box> &boxes);

/// Writes one SVG per analysis present in the summary into out_dir and
/// returns the written paths. Warnings (omitted plots) go to `warn`.
std::vector<std::filesystem::path> emit_plots(const nlohmann::json &summary, const std::filesystem::path &out_dir,
                                              std::ostream &warn);

} // namespace morl::plots
