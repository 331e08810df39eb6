#pragma once

#include <algorithm>
#include <cstdio>
#include <string>

#include "medsynth/eval/pca.hpp"

namespace medsynth {

inline constexpr const char* kRealColor = "#2e7d32";       // green
inline constexpr const char* kSyntheticColor = "#1565c0";  // blue

// Standalone SVG scatter plot: real points green, synthetic blue, axes box
// scaled to the data bounding box plus a 5% margin. Coordinates are printed
// with two decimals, so equal datasets render byte-identically.
inline std::string render_scatter_svg(const ScatterDataset& dataset, int width = 640,
                                      int height = 480) {
    double xlo = 0.0, xhi = 1.0, ylo = 0.0, yhi = 1.0;
    if (!dataset.points.empty()) {
        xlo = xhi = dataset.points.front().pc1;
        ylo = yhi = dataset.points.front().pc2;
        for (const auto& p : dataset.points) {
            xlo = std::min(xlo, p.pc1);
            xhi = std::max(xhi, p.pc1);
            ylo = std::min(ylo, p.pc2);
            yhi = std::max(yhi, p.pc2);
        }
    }
    auto widen = [](double& lo, double& hi) {
        if (hi - lo < 1e-12) {
            lo -= 0.5;
            hi += 0.5;
        }
        const double margin = 0.05 * (hi - lo);
        lo -= margin;
        hi += margin;
    };
    widen(xlo, xhi);
    widen(ylo, yhi);

    const double frame_left = 50.0, frame_top = 15.0;
    const double frame_w = static_cast<double>(width) - frame_left - 15.0;
    const double frame_h = static_cast<double>(height) - frame_top - 35.0;

    char buf[256];
    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    std::snprintf(buf, sizeof(buf),
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
                  "viewBox=\"0 0 %d %d\">\n",
                  width, height, width, height);
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<rect width=\"%d\" height=\"%d\" fill=\"#ffffff\"/>\n", width, height);
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" "
                  "fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n",
                  frame_left, frame_top, frame_w, frame_h);
    svg += buf;
    for (const auto& p : dataset.points) {
        const double cx = frame_left + (p.pc1 - xlo) / (xhi - xlo) * frame_w;
        const double cy = frame_top + (yhi - p.pc2) / (yhi - ylo) * frame_h;
        std::snprintf(buf, sizeof(buf),
                      "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"%s\"/>\n", cx, cy,
                      p.source == PointSource::Real ? kRealColor : kSyntheticColor);
        svg += buf;
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace medsynth
