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

#include "metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <tuple>

#include <json.hpp>

#include "error.hpp"

namespace snk {

double f_measure(double precision, double recall) {
  const double sum = precision + recall;
  return sum > 0.0 ? 2.0 * precision * recall / sum : 0.0;
}

void finalize_scores(EvalResult& r) {
  r.precision = r.tp + r.fp > 0 ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp) : 0.0;
  r.recall = r.tp + r.fn > 0 ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn) : 0.0;
  r.f_measure = f_measure(r.precision, r.recall);
}

EvalResult match_detections(const DetectionSet& dets, const PointSet& truth, double tau) {
  if (!(tau > 0.0)) throw_config("matching distance tau must be > 0");
  if (dets.dim != truth.dim)
    throw_config("detections are " + std::to_string(dets.dim) + "D but ground truth is " +
                 std::to_string(truth.dim) + "D");
  const int dim = dets.empty() ? truth.dim : dets.dim;

  std::vector<Match> pairs;
  for (std::size_t i = 0; i < dets.items.size(); ++i)
    for (std::size_t j = 0; j < truth.points.size(); ++j) {
      double d2 = 0.0;
      for (int a = 0; a < dim; ++a) {
        const double t = dets.items[i].center[a] - truth.points[j][a];
        d2 += t * t;
      }
      const double d = std::sqrt(d2);
      if (d <= tau) pairs.push_back({i, j, d});
    }
  std::sort(pairs.begin(), pairs.end(), [](const Match& a, const Match& b) {
    return std::tie(a.distance, a.detection, a.truth) < std::tie(b.distance, b.detection, b.truth);
  });

  EvalResult r;
  std::vector<bool> det_used(dets.items.size(), false), truth_used(truth.points.size(), false);
  for (const Match& m : pairs) {
    if (det_used[m.detection] || truth_used[m.truth]) continue;
    det_used[m.detection] = truth_used[m.truth] = true;
    r.matches.push_back(m);
  }
  r.tp = r.matches.size();
  r.fp = dets.items.size() - r.tp;
  r.fn = truth.points.size() - r.tp;
  finalize_scores(r);
  return r;
}

PointSet parse_points_csv(std::string_view text) {
  PointSet ps;
  std::size_t pos = 0, line_no = 0;
  bool header = true, with_radius = false;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto cells = split_csv_line(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (cells.size() == 1 && cells[0].empty()) continue;
    if (header) {
      header = false;
      std::size_t n = cells.size();
      with_radius = n > 0 && cells[n - 1] == "r0";
      if (with_radius) --n;
      if (n == 2 && cells[0] == "x" && cells[1] == "y")
        ps.dim = 2;
      else if (n == 3 && cells[0] == "x" && cells[1] == "y" && cells[2] == "z")
        ps.dim = 3;
      else
        throw_io("truth CSV: header must be x,y or x,y,z, optionally followed by r0");
      continue;
    }
    const int fields = ps.dim + (with_radius ? 1 : 0);
    if (static_cast<int>(cells.size()) != fields)
      throw_io("truth CSV line " + std::to_string(line_no) + ": expected " + std::to_string(fields) + " fields");
    std::array<double, 4> v{};
    for (int a = 0; a < fields; ++a) {
      const auto res = std::from_chars(cells[a].data(), cells[a].data() + cells[a].size(), v[a]);
      if (res.ec != std::errc() || res.ptr != cells[a].data() + cells[a].size())
        throw_io("truth CSV line " + std::to_string(line_no) + ": bad number '" + std::string(cells[a]) + "'");
    }
    ps.points.push_back({v[0], v[1], ps.dim == 3 ? v[2] : 0.0});
    if (with_radius) ps.radii.push_back(v[ps.dim]);
  }
  if (header) throw_io("truth CSV: missing header");
  return ps;
}

PointSet read_points_csv(const std::filesystem::path& path) {
  return parse_points_csv(read_text_file(path));
}

std::string format_points_csv(const PointSet& ps) {
  const bool with_radius = !ps.radii.empty();
  if (with_radius && ps.radii.size() != ps.points.size()) throw_config("point set: radii and points differ in count");
  std::string out = ps.dim == 2 ? "x,y" : "x,y,z";
  out += with_radius ? ",r0\n" : "\n";
  for (std::size_t i = 0; i < ps.points.size(); ++i) {
    for (int a = 0; a < ps.dim; ++a) {
      if (a) out += ',';
      append_number(out, ps.points[i][a]);
    }
    if (with_radius) {
      out += ',';
      append_number(out, ps.radii[i]);
    }
    out += '\n';
  }
  return out;
}

double nominal_tau(const PointSet& truth) {
  if (truth.radii.empty()) throw_config("no matching distance given and the truth set has no radii");
  return *std::min_element(truth.radii.begin(), truth.radii.end());
}

std::string format_report(const EvalResult& r, double tau) {
  nlohmann::json j;
  j["tp"] = r.tp;
  j["fp"] = r.fp;
  j["fn"] = r.fn;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f_measure"] = r.f_measure;
  j["tau"] = tau;
  j["matches"] = nlohmann::json::array();
  for (const Match& m : r.matches)
    j["matches"].push_back({{"detection", m.detection}, {"truth", m.truth}, {"distance", m.distance}});
  return j.dump(2) + "\n";
}

EvalResult evaluate_run(const DetectionSet& dets, const std::filesystem::path& truth_csv, double tau,
                        const std::filesystem::path& report) {
  const PointSet truth = read_points_csv(truth_csv);
  EvalResult r = match_detections(dets, truth, tau);
  if (!report.empty()) {
    std::ofstream out(report);
    if (!out) throw_io("cannot write '" + report.string() + "'");
    out << format_report(r, tau);
  }
  return r;
}

}  // namespace snk
