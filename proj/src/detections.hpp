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

#ifndef SNK_DETECTIONS_HPP
#define SNK_DETECTIONS_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace snk {

/// A surviving contour. Coordinates are voxels; `energy` is normalized.
struct Detection {
  std::array<double, 3> center{};
  double radius = 0.0;
  double energy = 0.0;
  int iterations = 0;
  bool converged = false;
  std::uint32_t id = 0;
};

struct DetectionSet {
  int dim = 3;
  std::vector<Detection> items;

  std::size_t size() const { return items.size(); }
  bool empty() const { return items.empty(); }
};

/// Version of the detections CSV layout, recorded in run manifests.
inline constexpr int kDetectionsCsvVersion = 1;

/// Header `x,y[,z],radius,energy,iterations,converged`; one row per
/// detection in set order. Numbers use the shortest round-trip form, so the
/// text is a pure function of the values.
std::string format_detections_csv(const DetectionSet& set);
DetectionSet parse_detections_csv(std::string_view text);

void write_detections_csv(const DetectionSet& set, const std::filesystem::path& path);
DetectionSet read_detections_csv(const std::filesystem::path& path);

/// Appends the shortest decimal form that parses back to `v`.
void append_number(std::string& out, double v);

/// Splits one CSV line on commas, trimming spaces and a trailing CR.
std::vector<std::string_view> split_csv_line(std::string_view line);

/// Reads a whole text file; throws an I/O error if it cannot be opened.
std::string read_text_file(const std::filesystem::path& path);

}  // namespace snk

#endif  // SNK_DETECTIONS_HPP
