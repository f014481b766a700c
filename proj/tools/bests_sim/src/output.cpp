#include "bests_sim/output.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "bests_sim/config.hpp"

namespace bests::sim {

namespace {

constexpr std::array<const char*, 6> kPalette{"#1f77b4", "#d62728", "#2ca02c",
                                              "#ff7f0e", "#9467bd", "#8c564b"};

std::string escape_xml(const std::string& s) {
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

std::string escape_csv(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string px(double v) { return fmt::format("{:.2f}", v); }

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void include(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }

  void settle() {
    if (!(lo <= hi)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

// 1-2-5 tick spacing giving about `target` ticks.
double tick_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

std::string svg_open(double w, double h) {
  return fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"12\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      w, h);
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0.0 ? "inf" : "-inf";
  if (value == 0.0) return "0";
  return fmt::format("{}", value);
}

CsvTable::CsvTable(std::vector<std::string> header) : columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) text_ += ',';
    text_ += escape_csv(header[i]);
  }
  text_ += '\n';
}

void CsvTable::next_cell() {
  if (cells_in_row_ == columns_) throw std::logic_error("CSV row has too many cells");
  if (cells_in_row_++) text_ += ',';
}

CsvTable& CsvTable::add(double value) {
  next_cell();
  text_ += format_number(value);
  return *this;
}

CsvTable& CsvTable::add(bool value) {
  next_cell();
  text_ += value ? '1' : '0';
  return *this;
}

CsvTable& CsvTable::add(const std::string& value) {
  next_cell();
  text_ += escape_csv(value);
  return *this;
}

void CsvTable::end_row() {
  if (cells_in_row_ != columns_) throw std::logic_error("CSV row is incomplete");
  text_ += '\n';
  cells_in_row_ = 0;
  ++rows_;
}

std::string CsvTable::str() const { return text_; }

std::string render_svg(const LineChart& chart) {
  const double width = 720.0;
  const double height = 480.0;
  double left = 70.0;
  double right = 160.0;
  double top = 40.0;
  double bottom = 50.0;

  Range xr;
  Range yr;
  for (const auto& s : chart.series) {
    for (double v : s.x) xr.include(v);
    for (double v : s.y) yr.include(v);
  }
  xr.settle();
  yr.settle();

  double plot_w = width - left - right;
  double plot_h = height - top - bottom;
  if (chart.equal_aspect) {
    const double scale = std::min(plot_w / (xr.hi - xr.lo), plot_h / (yr.hi - yr.lo));
    const double extra_w = plot_w - scale * (xr.hi - xr.lo);
    const double extra_h = plot_h - scale * (yr.hi - yr.lo);
    left += 0.5 * extra_w;
    right += 0.5 * extra_w;
    top += 0.5 * extra_h;
    bottom += 0.5 * extra_h;
    plot_w = width - left - right;
    plot_h = height - top - bottom;
  }
  auto sx = [&](double x) { return left + plot_w * (x - xr.lo) / (xr.hi - xr.lo); };
  auto sy = [&](double y) { return top + plot_h * (1.0 - (y - yr.lo) / (yr.hi - yr.lo)); };

  std::string svg = svg_open(width, height);
  svg += fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
                     px(width / 2.0), escape_xml(chart.title));
  svg += fmt::format(
      "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\"/>\n",
      px(left), px(top), px(plot_w), px(plot_h));

  const double xs = tick_step(xr.hi - xr.lo, 6);
  for (double t = std::ceil(xr.lo / xs) * xs; t <= xr.hi + 1e-9 * xs; t += xs) {
    svg += fmt::format(
        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#ddd\"/>"
        "<text x=\"{0}\" y=\"{3}\" text-anchor=\"middle\">{4}</text>\n",
        px(sx(t)), px(top), px(top + plot_h), px(top + plot_h + 16),
        format_number(std::abs(t) < 1e-12 * xs ? 0.0 : t));
  }
  const double ys = tick_step(yr.hi - yr.lo, 6);
  for (double t = std::ceil(yr.lo / ys) * ys; t <= yr.hi + 1e-9 * ys; t += ys) {
    svg += fmt::format(
        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"#ddd\"/>"
        "<text x=\"{3}\" y=\"{4}\" text-anchor=\"end\">{5}</text>\n",
        px(left), px(sy(t)), px(left + plot_w), px(left - 6), px(sy(t) + 4),
        format_number(std::abs(t) < 1e-12 * ys ? 0.0 : t));
  }
  svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                     px(left + plot_w / 2.0), px(height - 12), escape_xml(chart.x_label));
  svg += fmt::format(
      "<text x=\"18\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {0})\">{1}</text>\n",
      px(top + plot_h / 2.0), escape_xml(chart.y_label));

  for (std::size_t i = 0; i < chart.series.size(); ++i) {
    const Series& s = chart.series[i];
    const char* color = kPalette[i % kPalette.size()];
    std::string points;
    for (std::size_t j = 0; j < std::min(s.x.size(), s.y.size()); ++j) {
      if (!std::isfinite(s.x[j]) || !std::isfinite(s.y[j])) continue;
      points += px(sx(s.x[j])) + "," + px(sy(s.y[j])) + " ";
    }
    svg += fmt::format(
        "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.8\" points=\"{}\"/>\n", color,
        points);
    const double ly = 50.0 + 18.0 * static_cast<double>(i);
    svg += fmt::format(
        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" stroke-width=\"3\"/>"
        "<text x=\"{4}\" y=\"{5}\">{6}</text>\n",
        px(width - 150), px(ly), px(width - 128), color, px(width - 122), px(ly + 4),
        escape_xml(s.label));
  }
  svg += "</svg>\n";
  return svg;
}

std::string render_svg(const BarChart& chart) {
  const double width = 820.0;
  const double row_h = 22.0;
  const double left = 60.0;
  const double right = 130.0;
  const double top = 40.0;
  const double plot_h = row_h * static_cast<double>(std::max<std::size_t>(1, chart.rows.size()));
  const double height = top + plot_h + 50.0;
  const double plot_w = width - left - right;
  const double x_max = chart.x_max > 0.0 ? chart.x_max : 1.0;
  auto sx = [&](double x) { return left + plot_w * x / x_max; };

  std::string svg = svg_open(width, height);
  svg += fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
                     px(width / 2.0), escape_xml(chart.title));
  for (std::size_t r = 0; r < chart.rows.size(); ++r) {
    const double y = top + row_h * static_cast<double>(r);
    svg += fmt::format(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>"
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#eee\"/>\n",
        px(left - 6), px(y + row_h * 0.65), escape_xml(chart.rows[r]), px(left),
        px(y + row_h), px(left + plot_w), px(y + row_h));
  }
  for (const Bar& b : chart.bars) {
    const double y = top + row_h * static_cast<double>(b.row) + 3.0;
    svg += fmt::format(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n", px(sx(b.start)),
        px(y), px(std::max(0.5, sx(b.end) - sx(b.start))), px(row_h - 6.0),
        kPalette[static_cast<std::size_t>(b.style) % kPalette.size()]);
  }
  svg += fmt::format(
      "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\"/>\n",
      px(left), px(top), px(plot_w), px(plot_h));
  const double xs = tick_step(x_max, 8);
  for (double t = 0.0; t <= x_max + 1e-9 * xs; t += xs) {
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", px(sx(t)),
                       px(top + plot_h + 16), format_number(t));
  }
  svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                     px(left + plot_w / 2.0), px(height - 10), escape_xml(chart.x_label));
  for (std::size_t i = 0; i < chart.style_labels.size(); ++i) {
    const double ly = top + 18.0 * static_cast<double>(i);
    svg += fmt::format(
        "<rect x=\"{}\" y=\"{}\" width=\"14\" height=\"10\" fill=\"{}\"/>"
        "<text x=\"{}\" y=\"{}\">{}</text>\n",
        px(width - 120), px(ly), kPalette[i % kPalette.size()], px(width - 100), px(ly + 10),
        escape_xml(chart.style_labels[i]));
  }
  svg += "</svg>\n";
  return svg;
}

ArtifactWriter::ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

void ArtifactWriter::write(const std::string& name, const std::string& content) {
  const std::filesystem::path path = dir_ / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  out.close();
  if (!out) throw std::runtime_error("failed writing " + path.string());
  manifest_.push_back({name, content.size(), fnv1a64(content)});
}

}  // namespace bests::sim
