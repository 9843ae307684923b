#include "ple/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace ple::io {

namespace {
std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary: keep Unix newlines everywhere
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    return out;
}
}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_xye_csv(const std::string& path, const std::vector<double>& x,
                   const std::vector<double>& y, const std::vector<double>& err) {
    std::ofstream out = open_out(path);
    out << "x,y,error\n";
    for (std::size_t i = 0; i < x.size(); ++i)
        out << format_double(x[i]) << ',' << format_double(y[i]) << ',' << format_double(err[i])
            << '\n';
}

void write_bias_csv(const std::string& path, const std::vector<BiasRow>& rows) {
    std::ofstream out = open_out(path);
    out << "estimator,parameter,analytic_bias,mc_bias,mc_stderr,pass\n";
    for (const BiasRow& r : rows) {
        out << r.estimator << ',' << r.parameter << ','
            << (r.has_analytic ? format_double(r.analytic) : std::string("none")) << ','
            << format_double(r.mc_bias) << ',' << format_double(r.mc_stderr) << ','
            << (r.pass ? "pass" : "fail") << '\n';
    }
}

void write_grid_csv(const std::string& path, const GridResult& grid) {
    std::ofstream out = open_out(path);
    out << "weight,n,kl_mle_mean,kl_ple_mean,d_mean,d_stderr,rfair_mle,rfair_ple\n";
    for (const GridCell& c : grid.cells) {
        out << format_double(c.weight) << ',' << c.n << ',' << format_double(c.kl_mle_mean) << ','
            << format_double(c.kl_ple_mean) << ',' << format_double(c.d_mean) << ','
            << format_double(c.d_stderr) << ',' << format_double(c.rfair_mle) << ','
            << format_double(c.rfair_ple) << '\n';
    }
}

void write_density_csv(const std::string& path, const DensityGrid& grid) {
    std::ofstream out = open_out(path);
    out << "node,density\n";
    for (std::size_t i = 0; i < grid.count(); ++i)
        out << format_double(grid.node(i)) << ',' << format_double(grid.values[i]) << '\n';
}

void write_histogram_csv(const std::string& path, const std::vector<double>& centers,
                         const std::vector<double>& densities) {
    std::ofstream out = open_out(path);
    out << "node,density\n";
    for (std::size_t i = 0; i < centers.size(); ++i)
        out << format_double(centers[i]) << ',' << format_double(densities[i]) << '\n';
}

void write_loss_curve_csv(const std::string& path, const std::vector<TrainStep>& curve) {
    std::ofstream out = open_out(path);
    out << "step,nll,penalty\n";
    for (const TrainStep& s : curve)
        out << s.step << ',' << format_double(s.nll) << ',' << format_double(s.penalty) << '\n';
}

void write_checkpoint_csv(const std::string& path, const HyperNet& net) {
    std::ofstream out = open_out(path);
    out << "tensor,index,value\n";
    for (const auto& [name, tensor] : net.named_tensors()) {
        for (std::size_t i = 0; i < tensor->size(); ++i)
            out << name << ',' << i << ',' << format_double((*tensor)[i]) << '\n';
    }
}

namespace {

struct PlotScale {
    double lo, hi, px0, px1;
    double operator()(double v) const { return px0 + (v - lo) / (hi - lo) * (px1 - px0); }
};

std::string fmt_px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace

void write_line_plot_svg(const std::string& path, const std::vector<double>& x,
                         const std::vector<double>& y, const std::vector<double>& err,
                         const std::string& title) {
    const double width = 640, height = 420, margin = 60;
    double xlo = x.front(), xhi = x.back();
    double ylo = 0.0, yhi = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        ylo = std::min(ylo, y[i] - err[i]);
        yhi = std::max(yhi, y[i] + err[i]);
    }
    if (yhi <= ylo) yhi = ylo + 1.0;
    yhi += 0.05 * (yhi - ylo);
    PlotScale sx{xlo, xhi > xlo ? xhi : xlo + 1.0, margin, width - margin};
    PlotScale sy{ylo, yhi, height - margin, margin};

    std::ofstream out = open_out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
        << title << "</text>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin
        << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\""
        << height - margin << "\" stroke=\"black\"/>\n";

    out << "<polyline fill=\"none\" stroke=\"teal\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < x.size(); ++i)
        out << fmt_px(sx(x[i])) << ',' << fmt_px(sy(y[i])) << ' ';
    out << "\"/>\n";
    for (std::size_t i = 0; i < x.size(); ++i) {
        double px = sx(x[i]);
        out << "<line x1=\"" << fmt_px(px) << "\" y1=\"" << fmt_px(sy(y[i] - err[i])) << "\" x2=\""
            << fmt_px(px) << "\" y2=\"" << fmt_px(sy(y[i] + err[i]))
            << "\" stroke=\"teal\" stroke-width=\"1\"/>\n";
        out << "<circle cx=\"" << fmt_px(px) << "\" cy=\"" << fmt_px(sy(y[i]))
            << "\" r=\"2.5\" fill=\"teal\"/>\n";
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        out << "<text x=\"" << fmt_px(sx(x[i])) << "\" y=\"" << height - margin + 18
            << "\" text-anchor=\"middle\" font-size=\"11\">" << format_double(x[i]) << "</text>\n";
    }
    out << "<text x=\"" << margin - 8 << "\" y=\"" << fmt_px(sy(ylo))
        << "\" text-anchor=\"end\" font-size=\"11\">" << format_double(ylo) << "</text>\n";
    out << "<text x=\"" << margin - 8 << "\" y=\"" << fmt_px(sy(yhi))
        << "\" text-anchor=\"end\" font-size=\"11\">" << format_double(yhi) << "</text>\n";
    out << "</svg>\n";
}

void write_grid_heatmap_svg(const std::string& path, const GridResult& grid) {
    const auto& weights = grid.spec.weights;
    const auto& sizes = grid.spec.sizes;
    const double cell = 64, margin = 70;
    const double width = margin * 2 + cell * static_cast<double>(sizes.size());
    const double height = margin * 2 + cell * static_cast<double>(weights.size());

    double dmax = 1e-12;
    for (const GridCell& c : grid.cells) dmax = std::max(dmax, std::fabs(c.d_mean));

    std::ofstream out = open_out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2
        << "\" y=\"28\" text-anchor=\"middle\" font-size=\"15\">KL(MLE) - KL(PLE), blue = PLE "
           "wins</text>\n";

    for (std::size_t wi = 0; wi < weights.size(); ++wi) {
        for (std::size_t ni = 0; ni < sizes.size(); ++ni) {
            const GridCell& c = grid.cells[wi * sizes.size() + ni];
            double t = c.d_mean / dmax;  // [-1, 1]
            int r, g, b;
            if (t >= 0.0) {  // PLE wins: towards blue
                r = static_cast<int>(255 * (1.0 - t));
                g = static_cast<int>(255 * (1.0 - 0.6 * t));
                b = 255;
            } else {
                r = 255;
                g = static_cast<int>(255 * (1.0 + 0.6 * t));
                b = static_cast<int>(255 * (1.0 + t));
            }
            double px = margin + cell * static_cast<double>(ni);
            double py = margin + cell * static_cast<double>(wi);
            out << "<rect x=\"" << px << "\" y=\"" << py << "\" width=\"" << cell << "\" height=\""
                << cell << "\" fill=\"rgb(" << r << ',' << g << ',' << b
                << ")\" stroke=\"gray\"/>\n";
            char label[32];
            std::snprintf(label, sizeof(label), "%.3g", c.d_mean);
            out << "<text x=\"" << px + cell / 2 << "\" y=\"" << py + cell / 2 + 4
                << "\" text-anchor=\"middle\" font-size=\"11\">" << label << "</text>\n";
        }
    }
    for (std::size_t ni = 0; ni < sizes.size(); ++ni)
        out << "<text x=\"" << margin + cell * (static_cast<double>(ni) + 0.5) << "\" y=\""
            << margin - 10 << "\" text-anchor=\"middle\" font-size=\"12\">n=" << sizes[ni]
            << "</text>\n";
    for (std::size_t wi = 0; wi < weights.size(); ++wi)
        out << "<text x=\"" << margin - 8 << "\" y=\""
            << margin + cell * (static_cast<double>(wi) + 0.5) + 4
            << "\" text-anchor=\"end\" font-size=\"12\">w=" << format_double(weights[wi])
            << "</text>\n";
    out << "</svg>\n";
}

void save_manifest(const std::string& path, const RunManifest& manifest) {
    nlohmann::json j;
    j["subcommand"] = manifest.subcommand;
    j["tool_version"] = manifest.tool_version;
    j["seed"] = manifest.seed;
    j["config"] = manifest.config;
    j["outputs"] = manifest.outputs;
    j["duration_seconds"] = manifest.duration_seconds;
    std::ofstream out = open_out(path);
    out << j.dump(2) << '\n';
}

RunManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open manifest: " + path);
    nlohmann::json j;
    in >> j;
    RunManifest m;
    m.subcommand = j.at("subcommand").get<std::string>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.config = j.at("config");
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
    m.duration_seconds = j.value("duration_seconds", 0.0);
    return m;
}

}  // namespace ple::io
