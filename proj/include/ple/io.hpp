#pragma once

#include <string>
#include <vector>

#include "ple/autophagy.hpp"
#include "ple/density.hpp"
#include "ple/estimators.hpp"
#include "ple/gmm_lab.hpp"
#include "ple/hypernet.hpp"

#include <json.hpp>

namespace ple::io {

/// %.17g — round-trips doubles exactly, so reruns are byte-identical.
std::string format_double(double v);

/// Generation curve in the x,y,error layout plotting tools consume directly.
void write_xye_csv(const std::string& path, const std::vector<double>& x,
                   const std::vector<double>& y, const std::vector<double>& err);

struct BiasRow {
    std::string estimator;
    std::string parameter;
    bool has_analytic = false;
    double analytic = 0.0;
    double mc_bias = 0.0;
    double mc_stderr = 0.0;
    bool pass = false;
};
void write_bias_csv(const std::string& path, const std::vector<BiasRow>& rows);

void write_grid_csv(const std::string& path, const GridResult& grid);

void write_density_csv(const std::string& path, const DensityGrid& grid);

/// Histogram densities at bin centers, same two-column layout.
void write_histogram_csv(const std::string& path, const std::vector<double>& centers,
                         const std::vector<double>& densities);

void write_loss_curve_csv(const std::string& path, const std::vector<TrainStep>& curve);
void write_checkpoint_csv(const std::string& path, const HyperNet& net);

/// Simple self-contained SVG line plot with error bars, one series per call
/// plus an optional flat reference line.
void write_line_plot_svg(const std::string& path, const std::vector<double>& x,
                         const std::vector<double>& y, const std::vector<double>& err,
                         const std::string& title);

/// Diverging heatmap of d_mean (blue where PLE wins, red where it loses).
void write_grid_heatmap_svg(const std::string& path, const GridResult& grid);

/// Everything needed to reproduce a CLI invocation byte for byte.
struct RunManifest {
    std::string subcommand;
    std::string tool_version;
    std::uint64_t seed = 0;
    nlohmann::json config;
    std::vector<std::string> outputs;
    double duration_seconds = 0.0;
};

void save_manifest(const std::string& path, const RunManifest& manifest);
RunManifest load_manifest(const std::string& path);

}  // namespace ple::io
