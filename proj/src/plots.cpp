// Apache License, Version 2.0, refer to LICENSE.txt

#include "hbmlab/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "hbmlab/errors.hpp"
#include "hbmlab/textio.hpp"

namespace hbmlab {

namespace {

struct Row {
  std::string family;
  unsigned complexity;
  double param_count;
  double sample_size;
  double total, bias, variance;
};

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<Row> parse_rows(const std::string& csv) {
  std::istringstream stream(csv);
  std::string line;
  if (!std::getline(stream, line)) fail(ErrorKind::kIo, "results CSV is empty");
  const auto header = split_csv(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const char* needed : {"family", "complexity", "param_count", "sample_size",
                             "bias_nats", "variance_nats", "total_nats"})
    if (!col.count(needed))
      fail(ErrorKind::kIo, std::string("results CSV lacks column '") + needed + "'");
  std::vector<Row> rows;
  while (std::getline(stream, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != header.size()) fail(ErrorKind::kIo, "ragged results CSV row");
    rows.push_back({f[col["family"]], parse_unsigned(f[col["complexity"]]),
                    parse_double(f[col["param_count"]]),
                    parse_double(f[col["sample_size"]]),
                    parse_double(f[col["total_nats"]]),
                    parse_double(f[col["bias_nats"]]),
                    parse_double(f[col["variance_nats"]])});
  }
  return rows;
}

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

struct Panel {
  std::string title;
  std::string x_label;
  std::vector<Series> series;
};

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string fmt(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.2f", v);
  return buffer;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

struct LogRange {
  double lo, hi;  // decades
};

LogRange log_range(const std::vector<double>& values) {
  double lo = HUGE_VAL, hi = -HUGE_VAL;
  for (double v : values)
    if (v > 0.0) {
      lo = std::min(lo, std::log10(v));
      hi = std::max(hi, std::log10(v));
    }
  if (lo > hi) return {-12.0, 0.0};
  lo = std::floor(lo);
  hi = std::ceil(hi);
  if (hi <= lo) hi = lo + 1.0;
  return {lo, hi};
}

void draw_panel(std::ostringstream& svg, const Panel& panel, double x0, double y0,
                double width, double height) {
  const double left = x0 + 70, right = x0 + width - 20;
  const double top = y0 + 30, bottom = y0 + height - 60;

  std::vector<double> xs, ys;
  for (const auto& s : panel.series)
    for (const auto& [x, y] : s.points) {
      xs.push_back(x);
      ys.push_back(y);
    }
  const LogRange xr = log_range(xs), yr = log_range(ys);
  auto px = [&](double x) {
    const double lx = x > 0.0 ? std::log10(x) : xr.lo;
    return left + (lx - xr.lo) / (xr.hi - xr.lo) * (right - left);
  };
  auto py = [&](double y) {
    const double ly = y > 0.0 ? std::max(std::log10(y), yr.lo) : yr.lo;
    return bottom - (ly - yr.lo) / (yr.hi - yr.lo) * (bottom - top);
  };

  svg << "<text x=\"" << fmt((left + right) / 2) << "\" y=\"" << fmt(y0 + 18)
      << "\" text-anchor=\"middle\" font-size=\"14\">" << escape(panel.title)
      << "</text>\n";
  svg << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\""
      << fmt(right - left) << "\" height=\"" << fmt(bottom - top)
      << "\" fill=\"none\" stroke=\"#000\"/>\n";
  for (double d = xr.lo; d <= xr.hi + 1e-9; d += 1.0) {
    const double x = left + (d - xr.lo) / (xr.hi - xr.lo) * (right - left);
    svg << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(bottom) << "\" x2=\""
        << fmt(x) << "\" y2=\"" << fmt(bottom + 5) << "\" stroke=\"#000\"/>"
        << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(bottom + 18)
        << "\" text-anchor=\"middle\" font-size=\"10\">1e" << static_cast<int>(d)
        << "</text>\n";
  }
  for (double d = yr.lo; d <= yr.hi + 1e-9; d += 1.0) {
    const double y = bottom - (d - yr.lo) / (yr.hi - yr.lo) * (bottom - top);
    svg << "<line x1=\"" << fmt(left - 5) << "\" y1=\"" << fmt(y) << "\" x2=\""
        << fmt(left) << "\" y2=\"" << fmt(y) << "\" stroke=\"#000\"/>"
        << "<text x=\"" << fmt(left - 8) << "\" y=\"" << fmt(y + 3)
        << "\" text-anchor=\"end\" font-size=\"10\">1e" << static_cast<int>(d)
        << "</text>\n";
  }
  svg << "<text x=\"" << fmt((left + right) / 2) << "\" y=\"" << fmt(bottom + 34)
      << "\" text-anchor=\"middle\" font-size=\"11\">" << escape(panel.x_label)
      << "</text>\n";
  svg << "<text x=\"" << fmt(x0 + 14) << "\" y=\"" << fmt((top + bottom) / 2)
      << "\" text-anchor=\"middle\" font-size=\"11\" transform=\"rotate(-90 "
      << fmt(x0 + 14) << ' ' << fmt((top + bottom) / 2) << ")\">KL (nats)</text>\n";

  for (std::size_t s = 0; s < panel.series.size(); ++s) {
    const auto& series = panel.series[s];
    const char* color = kPalette[s % std::size(kPalette)];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < series.points.size(); ++i) {
      if (i) svg << ' ';
      svg << fmt(px(series.points[i].first)) << ',' << fmt(py(series.points[i].second));
    }
    svg << "\"/>\n";
    for (const auto& [x, y] : series.points)
      svg << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y))
          << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
    const double ly = bottom + 48;
    const double lx = left + static_cast<double>(s) * 90.0;
    svg << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly) << "\" x2=\""
        << fmt(lx + 14) << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/><text x=\"" << fmt(lx + 18) << "\" y=\""
        << fmt(ly + 4) << "\" font-size=\"10\">" << escape(series.label)
        << "</text>\n";
  }
}

PlotFile figure(const std::string& name, const std::string& title,
                const std::vector<Panel>& panels) {
  constexpr double kPanelWidth = 380, kPanelHeight = 300;
  const std::size_t cols = std::min<std::size_t>(4, std::max<std::size_t>(1, panels.size()));
  const std::size_t rows = (panels.size() + cols - 1) / cols;
  const double width = kPanelWidth * static_cast<double>(cols);
  const double height = 40 + kPanelHeight * static_cast<double>(std::max<std::size_t>(1, rows));
  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width)
      << "\" height=\"" << fmt(height) << "\" viewBox=\"0 0 " << fmt(width) << ' '
      << fmt(height) << "\" font-family=\"sans-serif\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n"
      << "<text x=\"" << fmt(width / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
      << escape(title) << "</text>\n";
  for (std::size_t i = 0; i < panels.size(); ++i)
    draw_panel(svg, panels[i], kPanelWidth * static_cast<double>(i % cols),
               40 + kPanelHeight * static_cast<double>(i / cols), kPanelWidth,
               kPanelHeight);
  svg << "</svg>\n";
  return {name, svg.str()};
}

std::string complexity_label(const std::string& family, unsigned c) {
  return family == "hbm" ? "order " + std::to_string(c)
                         : std::to_string(c) + " hidden";
}

std::string count_label(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.0f", v);
  return buffer;
}

}  // namespace

std::vector<PlotFile> render_plots(const std::string& results_csv) {
  const auto rows = parse_rows(results_csv);
  std::set<std::string> families;
  for (const auto& r : rows) families.insert(r.family);

  std::vector<PlotFile> files;
  for (const auto& family : families) {
    std::vector<const Row*> mine;
    for (const auto& r : rows)
      if (r.family == family) mine.push_back(&r);
    std::set<unsigned> complexities;
    std::set<double> sizes;
    for (const auto* r : mine) {
      complexities.insert(r->complexity);
      sizes.insert(r->sample_size);
    }
    const std::string upper = family == "hbm" ? "HBM" : family == "rbm" ? "RBM" : family;

    // Components against N, one line per complexity.
    std::vector<Panel> by_component;
    const std::pair<const char*, double Row::*> components[] = {
        {"Total error", &Row::total}, {"Bias", &Row::bias}, {"Variance", &Row::variance}};
    for (const auto& [title, member] : components) {
      Panel panel{title, "sample size N", {}};
      for (unsigned c : complexities) {
        Series s{complexity_label(family, c), {}};
        for (const auto* r : mine)
          if (r->complexity == c) s.points.emplace_back(r->sample_size, r->*member);
        panel.series.push_back(std::move(s));
      }
      by_component.push_back(std::move(panel));
    }
    files.push_back(figure(family + "_error_vs_sample_size.svg",
                           upper + ": error components against sample size", by_component));

    // One panel per complexity holding every error term.
    std::vector<Panel> per_complexity;
    for (unsigned c : complexities) {
      Panel panel{complexity_label(family, c), "sample size N", {}};
      for (const auto& [title, member] : components) {
        Series s{title, {}};
        for (const auto* r : mine)
          if (r->complexity == c) s.points.emplace_back(r->sample_size, r->*member);
        panel.series.push_back(std::move(s));
      }
      per_complexity.push_back(std::move(panel));
    }
    files.push_back(figure(family + "_by_complexity.svg",
                           upper + ": error per model complexity", per_complexity));

    // One panel per N against parameter count.
    std::vector<Panel> per_size;
    for (double size : sizes) {
      Panel panel{count_label(size) + " samples", "number of parameters", {}};
      for (const auto& [title, member] : components) {
        Series s{title, {}};
        for (const auto* r : mine)
          if (r->sample_size == size) s.points.emplace_back(r->param_count, r->*member);
        std::sort(s.points.begin(), s.points.end());
        panel.series.push_back(std::move(s));
      }
      per_size.push_back(std::move(panel));
    }
    files.push_back(figure(family + "_by_sample_size.svg",
                           upper + ": error per sample size", per_size));
  }

  if (families.size() > 1) {
    std::set<double> sizes;
    for (const auto& r : rows) sizes.insert(r.sample_size);
    std::vector<Panel> panels;
    for (double size : sizes) {
      Panel panel{count_label(size) + " samples", "number of parameters", {}};
      for (const auto& family : families) {
        Series s{family == "hbm" ? "HBM total" : family == "rbm" ? "RBM total" : family, {}};
        for (const auto& r : rows)
          if (r.family == family && r.sample_size == size)
            s.points.emplace_back(r.param_count, r.total);
        std::sort(s.points.begin(), s.points.end());
        panel.series.push_back(std::move(s));
      }
      panels.push_back(std::move(panel));
    }
    files.push_back(figure("total_vs_param_count.svg",
                           "Total error against number of parameters", panels));
  }
  return files;
}

}  // namespace hbmlab
