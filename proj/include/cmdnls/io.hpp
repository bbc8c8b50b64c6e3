#pragma once

#include <json.hpp>
#include <string>
#include <vector>

namespace cmdnls {

using json = nlohmann::json;

// Decimal text with 17 significant digits (round-trip exact for doubles).
std::string num17(double v);

// JSON text in which every floating-point number is printed via num17.
std::string dump_json(const json& j, int indent = 2);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

// Minimal CSV writer: header line plus rows of preformatted cells.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<std::string>& cells);
  std::string str() const { return text_; }
  void save(const std::string& path) const { write_text(path, text_); }

 private:
  size_t columns_;
  std::string text_;
};

// Path helper: directory + "/" + name (creates the directory if needed).
std::string join_path(const std::string& dir, const std::string& name);

}  // namespace cmdnls
