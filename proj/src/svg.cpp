// kdph: persistent homology for the k-distance under random projections.
// Released under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#include "kdph/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "kdph/errors.hpp"

namespace kdph {

namespace {

constexpr double kSize = 420.0;
constexpr double kMargin = 50.0;
constexpr double kPlot = kSize - 2.0 * kMargin;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void line(std::string& s, double x1, double y1, double x2, double y2,
          const std::string& style) {
  s += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) +
       "\" y2=\"" + num(y2) + "\" " + style + "/>\n";
}

}  // namespace

std::string diagram_svg(const PersistenceDiagram& D, double beta,
                        const std::string& title) {
  double top = 0.0;
  for (const PersistencePair& p : D.pairs) {
    top = std::max(top, p.birth);
    if (!p.infinite) top = std::max(top, p.death);
  }
  const double axis_max = top > 0.0 ? 1.15 * top : 1.0;
  const auto X = [&](double v) { return kMargin + v / axis_max * kPlot; };
  const auto Y = [&](double v) {
    return kMargin + kPlot - v / axis_max * kPlot;
  };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kSize) +
       "\" height=\"" + num(kSize) + "\" viewBox=\"0 0 " + num(kSize) + " " +
       num(kSize) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Axes.
  line(s, kMargin, kMargin, kMargin, kMargin + kPlot,
       "stroke=\"black\" stroke-width=\"1\"");
  line(s, kMargin, kMargin + kPlot, kMargin + kPlot, kMargin + kPlot,
       "stroke=\"black\" stroke-width=\"1\"");

  // Diagonal and the multiplicative beta band around it, clipped to the box.
  line(s, X(0.0), Y(0.0), X(axis_max), Y(axis_max),
       "stroke=\"#888888\" stroke-width=\"1\"");
  if (beta > 1.0) {
    const double bx = axis_max / beta;  // upper band line y = beta x
    line(s, X(0.0), Y(0.0), X(bx), Y(axis_max),
         "stroke=\"#2ca02c\" stroke-width=\"1\" stroke-dasharray=\"4 3\"");
    line(s, X(0.0), Y(0.0), X(axis_max), Y(axis_max / beta),
         "stroke=\"#2ca02c\" stroke-width=\"1\" stroke-dasharray=\"4 3\"");
  }

  for (const PersistencePair& p : D.pairs) {
    if (p.infinite) {
      const double x = X(p.birth);
      const double y = kMargin;
      s += "<polygon points=\"" + num(x) + "," + num(y - 5) + " " +
           num(x - 5) + "," + num(y + 4) + " " + num(x + 5) + "," +
           num(y + 4) + "\" fill=\"#d62728\"/>\n";
    } else {
      s += "<circle cx=\"" + num(X(p.birth)) + "\" cy=\"" + num(Y(p.death)) +
           "\" r=\"3\" fill=\"#1f77b4\" fill-opacity=\"0.8\"/>\n";
    }
  }

  s += "<text x=\"" + num(kSize / 2) +
       "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"14\">" +
       title + "</text>\n";
  s += "<text x=\"" + num(kMargin + kPlot / 2) + "\" y=\"" +
       num(kSize - 12) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"12\">birth</text>\n";
  s += "<text x=\"16\" y=\"" + num(kMargin + kPlot / 2) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"12\" transform=\"rotate(-90 16 " +
       num(kMargin + kPlot / 2) + ")\">death</text>\n";
  s += "</svg>\n";
  return s;
}

void write_diagram_svgs(std::span<const PersistenceDiagram> before,
                        std::span<const PersistenceDiagram> after, double beta,
                        const std::string& dir) {
  if (before.size() != after.size()) {
    throw ContractViolation("svg: diagram lists of different lengths");
  }
  std::filesystem::create_directories(dir);
  for (std::size_t q = 0; q < before.size(); ++q) {
    const std::string deg = std::to_string(before[q].degree);
    {
      std::ofstream out(dir + "/h" + deg + "_before.svg");
      out << diagram_svg(before[q], beta, "H" + deg + " before");
    }
    {
      std::ofstream out(dir + "/h" + deg + "_after.svg");
      out << diagram_svg(after[q], beta, "H" + deg + " after");
    }
  }
}

}  // namespace kdph
