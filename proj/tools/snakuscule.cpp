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

// Command-line front end. Everything goes through the C interface so the
// tool exercises the same surface as any other client of the library.

#include <snk/snk.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Bumped whenever the detections CSV layout changes.
constexpr int kCsvSchema = 1;
// Replayed run produced different detections.
constexpr int kExitMismatch = 1;

struct Failure {
  int code;
  std::string message;
};

void check(snk_status s) {
  if (s != SNK_OK) throw Failure{static_cast<int>(s), snk_last_error()};
}

[[noreturn]] void fail(snk_status s, std::string msg) { throw Failure{static_cast<int>(s), std::move(msg)}; }

struct VolumeDel {
  void operator()(snk_volume* v) const { snk_volume_free(v); }
};
struct PointsDel {
  void operator()(snk_points* p) const { snk_points_free(p); }
};
struct DetsDel {
  void operator()(snk_detections* d) const { snk_detections_free(d); }
};
using Volume = std::unique_ptr<snk_volume, VolumeDel>;
using Points = std::unique_ptr<snk_points, PointsDel>;
using Dets = std::unique_ptr<snk_detections, DetsDel>;

using Clock = std::chrono::steady_clock;
double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(SNK_ERR_IO, "cannot open " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out || !out.write(text.data(), static_cast<std::streamsize>(text.size())))
    fail(SNK_ERR_IO, "cannot write " + p.string());
}

std::uint64_t fnv1a(const std::string& bytes, std::uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

bool is_tiff(const fs::path& p) {
  const std::string e = p.extension().string();
  return e == ".tif" || e == ".tiff" || e == ".TIF" || e == ".TIFF";
}

// Hash of everything the loader reads: the data file plus the sidecar for
// raw volumes.
std::string input_hash(const fs::path& p) {
  std::uint64_t h = fnv1a(read_file(p));
  if (!is_tiff(p)) {
    fs::path side = p;
    side.replace_extension(".json");
    if (fs::exists(side)) h = fnv1a(read_file(side), h);
  }
  return hex(h);
}

// Options shared by segment, bench and replay.
struct RunOptions {
  snk_config cfg{};
  std::optional<int> dim;
  double smooth_sigma = 1.0;
  bool invert = false;
  double resample = 0.0;  // 0: only when the spacing is anisotropic
  std::vector<double> spacing;
};

const char* mode_name(snk_mode m) { return m == SNK_MODE_GRID ? "grid" : "mc"; }
const char* schedule_name(snk_schedule s) { return s == SNK_SCHEDULE_INTRA_SNAKE ? "intra-snake" : "per-snake"; }
const char* ramp_name(snk_ramp r) { return r == SNK_RAMP_FIXED_VOXELS ? "fixed" : "proportional"; }

struct FlagStrings {
  std::string mode;
  std::string schedule;
  std::string ramp_mode;
  bool no_grad_normalize = false;
  bool freeze_samples = false;
  int dim = 0;
};

void add_run_flags(CLI::App* cmd, RunOptions& o, FlagStrings& f) {
  snk_config_default(&o.cfg, 3);
  f.mode = mode_name(o.cfg.mode);
  f.schedule = schedule_name(o.cfg.schedule);
  f.ramp_mode = ramp_name(o.cfg.ramp_mode);
  cmd->add_option("--dim", f.dim, "Image dimensionality (2 or 3); defaults to the volume's")
      ->check(CLI::IsMember({2, 3}));
  cmd->add_option("--r0", o.cfg.r0, "Initial contour radius in voxels")->capture_default_str();
  cmd->add_option("--eps0", o.cfg.eps0, "Gradient step scale")->capture_default_str();
  cmd->add_option("--max-iters", o.cfg.max_iters, "Iteration limit per contour")->capture_default_str();
  cmd->add_option("--e0", o.cfg.e0, "Energy threshold for keeping a contour")->capture_default_str();
  cmd->add_option("--mode", f.mode, "Integration: grid or mc")->check(CLI::IsMember({"grid", "mc"}))->capture_default_str();
  cmd->add_option("--samples", o.cfg.n_samples, "Monte-Carlo samples per energy evaluation")->capture_default_str();
  cmd->add_option("--seed", o.cfg.seed, "Random seed")->capture_default_str();
  cmd->add_option("--workers", o.cfg.workers, "Worker threads, 0 for all cores")->capture_default_str();
  cmd->add_option("--schedule", f.schedule, "per-snake or intra-snake")
      ->check(CLI::IsMember({"per-snake", "intra-snake"}))
      ->capture_default_str();
  cmd->add_option("--ramp-width", o.cfg.ramp_width, "Edge ramp width")->capture_default_str();
  cmd->add_option("--ramp-mode", f.ramp_mode, "proportional (fraction of R) or fixed (voxels)")
      ->check(CLI::IsMember({"proportional", "fixed"}))
      ->capture_default_str();
  cmd->add_option("--cull-every", o.cfg.cull_every, "Cull every N iterations, 0 only at the end")->capture_default_str();
  cmd->add_option("--min-extent", o.cfg.min_extent, "Collapse threshold on ||p-q||")->capture_default_str();
  cmd->add_option("--tol", o.cfg.convergence_tol, "Convergence threshold on the point displacement")->capture_default_str();
  cmd->add_flag("--no-grad-normalize", f.no_grad_normalize, "Do not divide gradients by the peak intensity");
  cmd->add_flag("--freeze-samples", f.freeze_samples, "Reuse one Monte-Carlo sample set for all iterations");
  cmd->add_option("--smooth-sigma", o.smooth_sigma, "Gaussian pre-smoothing in voxels, 0 to disable")->capture_default_str();
  cmd->add_flag("--invert", o.invert, "Look for dark blobs");
  cmd->add_option("--resample", o.resample, "Isotropic resampling target spacing");
  cmd->add_option("--spacing", o.spacing, "Override the stored voxel spacing")->expected(2, 3);
}

void finish_flags(RunOptions& o, const FlagStrings& f) {
  if (f.dim != 0) o.dim = f.dim;
  o.cfg.mode = f.mode == "grid" ? SNK_MODE_GRID : SNK_MODE_MC;
  o.cfg.schedule = f.schedule == "intra-snake" ? SNK_SCHEDULE_INTRA_SNAKE : SNK_SCHEDULE_PER_SNAKE;
  o.cfg.ramp_mode = f.ramp_mode == "fixed" ? SNK_RAMP_FIXED_VOXELS : SNK_RAMP_PROPORTIONAL;
  o.cfg.normalize_gradient = f.no_grad_normalize ? 0 : 1;
  o.cfg.redraw_samples = f.freeze_samples ? 0 : 1;
}

json config_json(const snk_config& c) {
  return {{"dim", c.dim},
          {"r0", c.r0},
          {"eps0", c.eps0},
          {"max_iters", c.max_iters},
          {"e0", c.e0},
          {"n_samples", c.n_samples},
          {"mode", mode_name(c.mode)},
          {"seed", c.seed},
          {"min_extent", c.min_extent},
          {"convergence_tol", c.convergence_tol},
          {"ramp_mode", ramp_name(c.ramp_mode)},
          {"ramp_width", c.ramp_width},
          {"normalize_gradient", c.normalize_gradient != 0},
          {"redraw_samples", c.redraw_samples != 0},
          {"cull_every", c.cull_every},
          {"schedule", schedule_name(c.schedule)},
          {"workers", c.workers}};
}

snk_config config_from_json(const json& j) {
  snk_config c{};
  snk_config_default(&c, j.at("dim").get<int>());
  c.r0 = j.at("r0").get<double>();
  c.eps0 = j.at("eps0").get<double>();
  c.max_iters = j.at("max_iters").get<int>();
  c.e0 = j.at("e0").get<double>();
  c.n_samples = j.at("n_samples").get<int>();
  c.mode = j.at("mode").get<std::string>() == "grid" ? SNK_MODE_GRID : SNK_MODE_MC;
  c.seed = j.at("seed").get<std::uint64_t>();
  c.min_extent = j.at("min_extent").get<double>();
  c.convergence_tol = j.at("convergence_tol").get<double>();
  c.ramp_mode = j.at("ramp_mode").get<std::string>() == "fixed" ? SNK_RAMP_FIXED_VOXELS : SNK_RAMP_PROPORTIONAL;
  c.ramp_width = j.at("ramp_width").get<double>();
  c.normalize_gradient = j.at("normalize_gradient").get<bool>() ? 1 : 0;
  c.redraw_samples = j.at("redraw_samples").get<bool>() ? 1 : 0;
  c.cull_every = j.at("cull_every").get<int>();
  c.schedule = j.at("schedule").get<std::string>() == "intra-snake" ? SNK_SCHEDULE_INTRA_SNAKE : SNK_SCHEDULE_PER_SNAKE;
  c.workers = j.at("workers").get<unsigned>();
  return c;
}

struct Prepared {
  Volume volume;
  double resampled_to = 0.0;
  double load_ms = 0.0;
  double preprocess_ms = 0.0;
};

// Load, resample, smooth and optionally invert; fixes cfg.dim.
Prepared prepare(const std::string& path, RunOptions& o) {
  Prepared out;
  auto t0 = Clock::now();
  snk_volume* raw = nullptr;
  std::vector<double> spacing = o.spacing;
  if (!spacing.empty()) spacing.resize(3, spacing.back());
  check(snk_volume_load(path.c_str(), spacing.empty() ? nullptr : spacing.data(), &raw));
  Volume v(raw);
  out.load_ms = ms_since(t0);

  t0 = Clock::now();
  snk_volume_info info{};
  check(snk_volume_info_get(v.get(), &info));
  if (o.dim && *o.dim != info.dim)
    fail(SNK_ERR_CONFIG, "--dim " + std::to_string(*o.dim) + " does not match the " + std::to_string(info.dim) +
                             "-D input");
  o.cfg.dim = info.dim;

  double target = o.resample;
  if (target == 0.0) {
    double lo = info.spacing[0], hi = info.spacing[0];
    for (int i = 1; i < info.dim; ++i) {
      lo = std::min(lo, info.spacing[i]);
      hi = std::max(hi, info.spacing[i]);
    }
    if (hi != lo) target = lo;
  }
  if (target != 0.0) {
    snk_volume* r = nullptr;
    check(snk_volume_resample_isotropic(v.get(), target, &r));
    v.reset(r);
    out.resampled_to = target;
  }
  if (o.smooth_sigma > 0.0) {
    snk_volume* s = nullptr;
    check(snk_volume_smooth(v.get(), o.smooth_sigma, &s));
    v.reset(s);
  } else if (o.smooth_sigma < 0.0) {
    fail(SNK_ERR_CONFIG, "--smooth-sigma must be >= 0");
  }
  if (o.invert) {
    snk_volume* s = nullptr;
    check(snk_volume_invert(v.get(), &s));
    v.reset(s);
  }
  out.preprocess_ms = ms_since(t0);
  out.volume = std::move(v);
  return out;
}

json stats_json(const snk_run_stats& s) {
  return {{"snakes_initial", s.snakes_initial}, {"collapsed", s.collapsed},
          {"runaway", s.runaway},               {"below_threshold", s.below_threshold},
          {"detections", s.detections},         {"iterations_total", s.iterations_total}};
}

fs::path default_manifest(const fs::path& out) {
  fs::path m = out;
  m.replace_extension(".manifest.json");
  return m;
}

struct SegmentArgs {
  std::string input;
  std::string out = "detections.csv";
  std::string manifest;
};

int cmd_segment(const SegmentArgs& a, RunOptions o) {
  const auto t_start = Clock::now();
  Prepared prep = prepare(a.input, o);
  check(snk_config_validate(&o.cfg));

  snk_detections* raw = nullptr;
  snk_run_stats stats{};
  const auto t0 = Clock::now();
  check(snk_segment(prep.volume.get(), &o.cfg, &raw, &stats));
  Dets dets(raw);
  const double segment_ms = ms_since(t0);

  const std::string csv = snk_detections_csv(dets.get());
  write_file(a.out, csv);

  json m;
  m["tool"] = "snakuscule";
  m["version"] = snk_version();
  m["command"] = "segment";
  m["csv_schema"] = kCsvSchema;
  m["input"] = {{"path", fs::absolute(a.input).string()},
                {"format", is_tiff(a.input) ? "tiff" : "raw"},
                {"fnv1a64", input_hash(a.input)}};
  m["preprocess"] = {{"smooth_sigma", o.smooth_sigma},
                     {"invert", o.invert},
                     {"resample", prep.resampled_to},
                     {"spacing", o.spacing}};
  m["config"] = config_json(o.cfg);
  m["seed"] = o.cfg.seed;
  m["workers"] = o.cfg.workers == 0 ? snk_hardware_workers() : o.cfg.workers;
  m["outputs"] = {{"detections", fs::absolute(a.out).string()}, {"detections_fnv1a64", hex(fnv1a(csv))}};
  m["stats"] = stats_json(stats);
  m["timings_ms"] = {{"load", prep.load_ms},        {"preprocess", prep.preprocess_ms}, {"init", stats.init_ms},
                     {"evolve", stats.evolve_ms},   {"cull", stats.cull_ms},            {"segment", segment_ms},
                     {"total", ms_since(t_start)}};
  const fs::path mpath = a.manifest.empty() ? default_manifest(a.out) : fs::path(a.manifest);
  write_file(mpath, m.dump(2) + "\n");

  std::cerr << snk_detections_count(dets.get()) << " detections from " << stats.snakes_initial << " contours ("
            << stats.collapsed << " collapsed, " << stats.runaway << " ran away, " << stats.below_threshold
            << " below e0 before overlap culling)\n";
  return 0;
}

struct ReplayArgs {
  std::string manifest;
  std::string out;
};

int cmd_replay(const ReplayArgs& a) {
  json m;
  try {
    m = json::parse(read_file(a.manifest));
  } catch (const json::exception& e) {
    fail(SNK_ERR_CONFIG, std::string("malformed manifest: ") + e.what());
  }
  RunOptions o;
  std::string input, recorded_hash, expected;
  try {
    if (m.at("csv_schema").get<int>() != kCsvSchema) fail(SNK_ERR_CONFIG, "manifest has an unknown CSV schema");
    o.cfg = config_from_json(m.at("config"));
    const json& pre = m.at("preprocess");
    o.smooth_sigma = pre.at("smooth_sigma").get<double>();
    o.invert = pre.at("invert").get<bool>();
    o.resample = pre.at("resample").get<double>();
    o.spacing = pre.at("spacing").get<std::vector<double>>();
    input = m.at("input").at("path").get<std::string>();
    recorded_hash = m.at("input").at("fnv1a64").get<std::string>();
    expected = m.at("outputs").at("detections_fnv1a64").get<std::string>();
  } catch (const json::exception& e) {
    fail(SNK_ERR_CONFIG, std::string("malformed manifest: ") + e.what());
  }
  if (input_hash(input) != recorded_hash) fail(SNK_ERR_IO, "input " + input + " changed since the recorded run");

  Prepared prep = prepare(input, o);
  snk_detections* raw = nullptr;
  check(snk_segment(prep.volume.get(), &o.cfg, &raw, nullptr));
  Dets dets(raw);
  const std::string csv = snk_detections_csv(dets.get());
  if (!a.out.empty()) write_file(a.out, csv);
  if (hex(fnv1a(csv)) != expected) {
    std::cerr << "replay differs from the recorded detections\n";
    return kExitMismatch;
  }
  std::cerr << "replay identical (" << snk_detections_count(dets.get()) << " detections)\n";
  return 0;
}

struct PhantomArgs {
  std::string spec;
  std::string out = "phantom.raw";
  std::string truth;
  std::optional<std::uint64_t> seed;
  std::string dtype = "f32";
};

int cmd_phantom(const PhantomArgs& a) {
  const std::string text = read_file(a.spec);
  if (!is_tiff(a.out)) {
    fs::path side = a.out;
    side.replace_extension(".json");
    if (fs::weakly_canonical(side) == fs::weakly_canonical(a.spec))
      fail(SNK_ERR_CONFIG, "the sidecar of " + a.out + " would overwrite the phantom description");
  }
  snk_volume* vraw = nullptr;
  snk_points* praw = nullptr;
  std::size_t warnings = 0;
  check(snk_phantom_generate(text.c_str(), a.seed ? &*a.seed : nullptr, &vraw, &praw, &warnings));
  Volume v(vraw);
  Points truth(praw);
  const snk_dtype dt = a.dtype == "u8" ? SNK_DTYPE_U8 : a.dtype == "u16" ? SNK_DTYPE_U16 : SNK_DTYPE_F32;
  if (is_tiff(a.out))
    check(snk_volume_save_tiff(v.get(), a.out.c_str(), dt));
  else
    check(snk_volume_save(v.get(), a.out.c_str(), dt));
  fs::path tpath = a.truth;
  if (tpath.empty()) {
    tpath = a.out;
    tpath.replace_filename(tpath.stem().string() + "_truth.csv");
  }
  check(snk_points_write_csv(truth.get(), tpath.string().c_str()));
  if (warnings > 0) std::cerr << "warning: " << warnings << " overlapping sphere pair(s)\n";
  std::cerr << snk_points_count(truth.get()) << " spheres written to " << a.out << ", truth in " << tpath.string()
            << "\n";
  return 0;
}

struct EvalArgs {
  std::string dets;
  std::string truth;
  double tau = 0.0;
  std::string report;
};

int cmd_eval(const EvalArgs& a) {
  snk_detections* draw = nullptr;
  check(snk_detections_read_csv(a.dets.c_str(), &draw));
  Dets dets(draw);
  snk_points* praw = nullptr;
  check(snk_points_read_csv(a.truth.c_str(), &praw));
  Points truth(praw);
  snk_eval_result r{};
  check(snk_evaluate(dets.get(), truth.get(), a.tau, a.report.empty() ? nullptr : a.report.c_str(), &r));
  std::printf("tp=%zu fp=%zu fn=%zu precision=%.4f recall=%.4f f=%.4f\n", r.tp, r.fp, r.fn, r.precision, r.recall,
              r.f_measure);
  return 0;
}

struct BenchArgs {
  std::string input;
  std::string phantom;
  std::vector<double> r0s{15.0};
  std::vector<std::string> modes{"grid", "mc"};
  std::vector<std::string> schedules{"per-snake"};
  std::vector<unsigned> workers{1, 0};
  int repeat = 1;
  std::string out;
};

int cmd_bench(const BenchArgs& a, RunOptions o) {
  Volume v;
  if (!a.phantom.empty()) {
    if (!a.input.empty()) fail(SNK_ERR_CONFIG, "give either an input volume or --phantom, not both");
    const std::string text = read_file(a.phantom);
    snk_volume* raw = nullptr;
    check(snk_phantom_generate(text.c_str(), nullptr, &raw, nullptr, nullptr));
    v.reset(raw);
    snk_volume_info info{};
    check(snk_volume_info_get(v.get(), &info));
    o.cfg.dim = info.dim;
    if (o.smooth_sigma > 0.0) {
      check(snk_volume_smooth(v.get(), o.smooth_sigma, &raw));
      v.reset(raw);
    }
  } else if (!a.input.empty()) {
    v = prepare(a.input, o).volume;
  } else {
    fail(SNK_ERR_CONFIG, "bench needs an input volume or --phantom");
  }

  std::ofstream file;
  if (!a.out.empty()) {
    file.open(a.out);
    if (!file) fail(SNK_ERR_IO, "cannot write " + a.out);
  }
  std::ostream& os = a.out.empty() ? std::cout : file;
  os << "snake_count,mode,scheduling,workers,wall_ms,iterations_total\n";
  for (double r0 : a.r0s)
    for (const auto& mode : a.modes)
      for (const auto& sched : a.schedules)
        for (unsigned w : a.workers)
          for (int rep = 0; rep < a.repeat; ++rep) {
            snk_config c = o.cfg;
            c.r0 = r0;
            c.mode = mode == "grid" ? SNK_MODE_GRID : SNK_MODE_MC;
            c.schedule = sched == "intra-snake" ? SNK_SCHEDULE_INTRA_SNAKE : SNK_SCHEDULE_PER_SNAKE;
            c.workers = w;
            check(snk_config_validate(&c));
            snk_detections* raw = nullptr;
            snk_run_stats st{};
            const auto t0 = Clock::now();
            check(snk_segment(v.get(), &c, &raw, &st));
            const double wall = ms_since(t0);
            snk_detections_free(raw);
            os << st.snakes_initial << ',' << mode << ',' << sched << ','
               << (w == 0 ? snk_hardware_workers() : w) << ',' << wall << ',' << st.iterations_total << '\n';
            os.flush();
          }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blob localization with swarms of concentric active contours"};
  app.set_version_flag("--version", std::string(snk_version()));
  app.require_subcommand(1);

  RunOptions seg_opts, bench_opts;
  FlagStrings seg_flags, bench_flags;

  SegmentArgs seg;
  auto* c_seg = app.add_subcommand("segment", "Detect blobs in a volume");
  c_seg->add_option("input", seg.input, "Raw volume (with .json sidecar) or TIFF stack")->required();
  c_seg->add_option("--out", seg.out, "Detections CSV")->capture_default_str();
  c_seg->add_option("--manifest", seg.manifest, "Run manifest (default: next to --out)");
  add_run_flags(c_seg, seg_opts, seg_flags);

  PhantomArgs ph;
  auto* c_ph = app.add_subcommand("phantom", "Render a synthetic sphere phantom");
  c_ph->add_option("spec", ph.spec, "Phantom description (JSON)")->required();
  c_ph->add_option("--out", ph.out, "Volume path (.raw or .tif)")->capture_default_str();
  c_ph->add_option("--truth", ph.truth, "Ground-truth CSV (default: <out>_truth.csv)");
  c_ph->add_option("--seed", ph.seed, "Noise seed, overriding the description");
  c_ph->add_option("--dtype", ph.dtype, "Stored sample type")->check(CLI::IsMember({"u8", "u16", "f32"}))->capture_default_str();

  EvalArgs ev;
  auto* c_ev = app.add_subcommand("eval", "Score detections against ground truth");
  c_ev->add_option("detections", ev.dets, "Detections CSV")->required();
  c_ev->add_option("truth", ev.truth, "Ground-truth CSV")->required();
  c_ev->add_option("--tau", ev.tau, "Match distance in voxels, 0 for the default");
  c_ev->add_option("--report", ev.report, "Per-detection JSON report");

  BenchArgs be;
  auto* c_be = app.add_subcommand("bench", "Time segmentation runs over a parameter sweep");
  c_be->add_option("input", be.input, "Volume to segment");
  c_be->add_option("--phantom", be.phantom, "Phantom description to render instead of an input volume");
  c_be->add_option("--r0-list", be.r0s, "Initial radii; each one sets a snake count")->delimiter(',');
  c_be->add_option("--modes", be.modes, "Integration modes")->delimiter(',')->check(CLI::IsMember({"grid", "mc"}));
  c_be->add_option("--schedules", be.schedules, "Scheduling variants")
      ->delimiter(',')
      ->check(CLI::IsMember({"per-snake", "intra-snake"}));
  c_be->add_option("--worker-list", be.workers, "Worker counts, 0 for all cores")->delimiter(',');
  c_be->add_option("--repeat", be.repeat, "Runs per combination")->check(CLI::PositiveNumber);
  c_be->add_option("--csv", be.out, "Output CSV (default: stdout)");
  add_run_flags(c_be, bench_opts, bench_flags);

  ReplayArgs rp;
  auto* c_rp = app.add_subcommand("replay", "Re-run a segmentation from its manifest and compare");
  c_rp->add_option("manifest", rp.manifest, "Manifest written by segment")->required();
  c_rp->add_option("--out", rp.out, "Write the replayed detections here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return SNK_ERR_CONFIG;
  }

  try {
    if (c_seg->parsed()) {
      finish_flags(seg_opts, seg_flags);
      return cmd_segment(seg, seg_opts);
    }
    if (c_ph->parsed()) return cmd_phantom(ph);
    if (c_ev->parsed()) return cmd_eval(ev);
    if (c_be->parsed()) {
      finish_flags(bench_opts, bench_flags);
      return cmd_bench(be, bench_opts);
    }
    if (c_rp->parsed()) return cmd_replay(rp);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return SNK_ERR_INTERNAL;
  }
  return SNK_ERR_INTERNAL;
}
