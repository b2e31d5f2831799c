/*
 * snakuscule - swarms of concentric active contours for blob localization
 *
 * Copyright 2026 The snakuscule authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "detections.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace snk {

void append_number(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    std::string_view cell = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
    while (!cell.empty() && cell.back() == ' ') cell.remove_suffix(1);
    out.push_back(cell);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_io("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_detections_csv(const DetectionSet& set) {
  std::string out = set.dim == 2 ? "x,y" : "x,y,z";
  out += ",radius,energy,iterations,converged\n";
  for (const Detection& d : set.items) {
    for (int i = 0; i < set.dim; ++i) {
      append_number(out, d.center[i]);
      out += ',';
    }
    append_number(out, d.radius);
    out += ',';
    append_number(out, d.energy);
    out += ',';
    out += std::to_string(d.iterations);
    out += d.converged ? ",1\n" : ",0\n";
  }
  return out;
}

namespace {

double parse_double(std::string_view cell, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
    throw_io("detections CSV line " + std::to_string(line) + ": bad number '" + std::string(cell) + "'");
  return v;
}

}  // namespace

DetectionSet parse_detections_csv(std::string_view text) {
  DetectionSet set;
  std::size_t pos = 0, line_no = 0;
  bool header = true;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    const auto cells = split_csv_line(line);
    if (cells.size() == 1 && cells[0].empty()) continue;
    if (header) {
      header = false;
      if (cells.size() == 6 && cells[0] == "x" && cells[1] == "y" && cells[2] == "radius")
        set.dim = 2;
      else if (cells.size() == 7 && cells[0] == "x" && cells[1] == "y" && cells[2] == "z" && cells[3] == "radius")
        set.dim = 3;
      else
        throw_io("detections CSV: unexpected header '" + std::string(line) + "'");
      continue;
    }
    if (static_cast<int>(cells.size()) != set.dim + 4)
      throw_io("detections CSV line " + std::to_string(line_no) + ": wrong number of fields");
    Detection d;
    for (int i = 0; i < set.dim; ++i) d.center[i] = parse_double(cells[i], line_no);
    d.radius = parse_double(cells[set.dim], line_no);
    d.energy = parse_double(cells[set.dim + 1], line_no);
    d.iterations = static_cast<int>(parse_double(cells[set.dim + 2], line_no));
    d.converged = parse_double(cells[set.dim + 3], line_no) != 0.0;
    d.id = static_cast<std::uint32_t>(set.items.size());
    set.items.push_back(d);
  }
  if (header) throw_io("detections CSV: missing header");
  return set;
}

void write_detections_csv(const DetectionSet& set, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_io("cannot write '" + path.string() + "'");
  out << format_detections_csv(set);
  if (!out) throw_io("failed writing '" + path.string() + "'");
}

DetectionSet read_detections_csv(const std::filesystem::path& path) {
  return parse_detections_csv(read_text_file(path));
}

}  // namespace snk
