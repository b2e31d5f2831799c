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

#ifndef SNK_METRICS_HPP
#define SNK_METRICS_HPP

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "detections.hpp"

namespace snk {

struct Match {
  std::size_t detection = 0;
  std::size_t truth = 0;
  double distance = 0.0;
};

struct EvalResult {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
  std::vector<Match> matches;
};

/// Ground-truth centres in voxel units. `radii` is either empty or holds
/// the nominal radius of every point.
struct PointSet {
  int dim = 3;
  std::vector<std::array<double, 3>> points;
  std::vector<double> radii;
};

/// Smallest nominal radius, the default matching distance for phantoms.
/// Config error when the set carries no radii.
double nominal_tau(const PointSet& truth);

/// Harmonic mean 2PR / (P + R), zero when P + R is zero.
double f_measure(double precision, double recall);

/// Fills precision, recall and F from the counts. Empty denominators give 0.
void finalize_scores(EvalResult& r);

/// Greedy one-to-one matching: all (detection, truth) pairs within `tau`
/// are visited by ascending distance, ties by (detection, truth) index, and
/// accepted while both ends are unmatched.
EvalResult match_detections(const DetectionSet& dets, const PointSet& truth, double tau);

/// CSV with header `x,y[,z][,r0]`, one centre per row.
PointSet parse_points_csv(std::string_view text);
PointSet read_points_csv(const std::filesystem::path& path);
std::string format_points_csv(const PointSet& points);

/// JSON report with counts, scores, tau and the accepted matches.
std::string format_report(const EvalResult& r, double tau);

/// Reads the truth CSV, matches, and writes the report when a path is given.
EvalResult evaluate_run(const DetectionSet& dets, const std::filesystem::path& truth_csv, double tau,
                        const std::filesystem::path& report = {});

}  // namespace snk

#endif  // SNK_METRICS_HPP
