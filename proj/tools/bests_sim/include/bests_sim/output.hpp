#pragma once

// CSV tables, standalone SVG charts and the artifact manifest.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace bests::sim {

// Shortest text that reads back to the same double ("nan"/"inf" spelled
// out). Locale independent.
std::string format_number(double value);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  CsvTable& add(double value);
  CsvTable& add(bool value);
  CsvTable& add(const std::string& value);
  CsvTable& add(const char* value) { return add(std::string(value)); }
  void end_row();

  std::size_t rows() const { return rows_; }
  std::string str() const;

 private:
  void next_cell();

  std::size_t columns_;
  std::string text_;
  std::size_t cells_in_row_ = 0;
  std::size_t rows_ = 0;
};

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  bool equal_aspect = false;  // same scale on both axes (path plots)
};

std::string render_svg(const LineChart& chart);

struct Bar {
  std::size_t row;
  double start;
  double end;
  int style;  // index into a small palette
};

// Horizontal bars per row over a shared time axis.
struct BarChart {
  std::string title;
  std::string x_label;
  std::vector<std::string> rows;
  std::vector<std::string> style_labels;
  std::vector<Bar> bars;
  double x_max = 1.0;
};

std::string render_svg(const BarChart& chart);

struct ManifestEntry {
  std::string file;
  std::uintmax_t bytes;
  std::uint64_t fnv1a64;
};

// Writes files into one directory and records what it wrote.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  void write(const std::string& name, const std::string& content);
  const std::vector<ManifestEntry>& manifest() const { return manifest_; }

 private:
  std::filesystem::path dir_;
  std::vector<ManifestEntry> manifest_;
};

}  // namespace bests::sim
