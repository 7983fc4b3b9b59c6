#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kinevent/io.hpp"
#include "kinevent/pipeline.hpp"

using namespace kinevent;

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return in;
}

// "-" means stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path != "-") {
      file_.open(path);
      if (!file_) throw InputError("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

struct RunArgs {
  std::string tracks, calibration, config, events = "-", collisions, distances;
  bool serial = false;
};

int cmd_run(const RunArgs& a) {
  PipelineConfig config = a.config.empty() ? PipelineConfig{} : load_config_file(a.config);
  const CameraModel camera = camera_from_json(read_json_file(a.calibration));
  auto in = open_in(a.tracks);
  const auto tracks = parse_tracks(in, config.fps);
  PipelineOptions opts;
  opts.parallel = !a.serial;
  opts.record_distances = !a.distances.empty();
  const auto result = run_pipeline(config, camera, tracks, opts);
  {
    Output out(a.events);
    write_events_jsonl(out.stream(), result.events);
  }
  if (!a.collisions.empty()) {
    Output out(a.collisions);
    write_collisions_jsonl(out.stream(), result.collisions);
  }
  if (!a.distances.empty()) {
    Output out(a.distances);
    write_pair_distances_csv(out.stream(), result.pair_distances);
  }
  std::cerr << tracks.size() << " track points, " << result.events.size() << " events, "
            << result.collisions.size() << " collision alerts\n";
  return 0;
}

struct SimulateArgs {
  std::string scenario, tracks = "-", annotations, expected, video_id = "synthetic";
  std::uint64_t seed = 0;
};

int cmd_simulate(const SimulateArgs& a) {
  const SyntheticScenario s = scenario_from_json(read_json_file(a.scenario));
  const auto tracks = generate_scenario(s, a.seed);
  {
    Output out(a.tracks);
    write_tracks_csv(out.stream(), tracks);
  }
  if (!a.annotations.empty()) {
    Output out(a.annotations);
    write_annotations_jsonl(out.stream(), ground_truth_events(s, a.video_id));
  }
  if (!a.expected.empty()) {
    Output out(a.expected);
    write_events_jsonl(out.stream(), s.expected_events);
  }
  return 0;
}

struct ScoreArgs {
  std::string events, annotations, timelines, video_id, report = "-", det_csv;
  double fps = 30.0;
  std::int64_t n_frames = -1;
  double threshold = 0.2;
};

int cmd_score(const ScoreArgs& a) {
  auto ein = open_in(a.events);
  auto dets = read_events_jsonl(ein);
  auto gin = open_in(a.annotations);
  auto gts = read_annotations_jsonl(gin);
  std::vector<VideoTimeline> timelines;
  if (!a.timelines.empty()) {
    timelines = timelines_from_json(read_json_file(a.timelines));
  } else {
    if (a.n_frames < 0) throw InputError("give --timelines or --n-frames");
    timelines.push_back({a.video_id, a.fps, a.n_frames});
    for (auto& d : dets) {
      if (d.video_id.empty()) d.video_id = a.video_id;
    }
    for (auto& g : gts) {
      if (g.video_id.empty()) g.video_id = a.video_id;
    }
  }
  const MetricsReport report = evaluate(dets, gts, timelines, a.threshold);
  {
    Output out(a.report);
    out.stream() << report_to_json(report).dump(2) << '\n';
  }
  if (!a.det_csv.empty()) {
    Output out(a.det_csv);
    write_det_csv(out.stream(), report);
  }
  return 0;
}

struct PlotArgs {
  std::string det_csv, out = "-";
  bool time_based = false;
};

int cmd_plot(const PlotArgs& a) {
  auto in = open_in(a.det_csv);
  const auto curves = read_det_csv(in);
  Output out(a.out);
  out.stream() << det_plot_svg(curves, a.time_based);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kinematic traffic-event detection from vehicle tracks"};
  app.require_subcommand(1);

  RunArgs run;
  auto* r = app.add_subcommand("run", "tracks + calibration + config -> events and collisions");
  r->add_option("--tracks", run.tracks, "track file (CSV or JSON lines)")->required();
  r->add_option("--calibration", run.calibration, "calibration JSON")->required();
  r->add_option("--config", run.config, "key = value parameter file");
  r->add_option("--events", run.events, "event JSON-lines output ('-' for stdout)");
  r->add_option("--collisions", run.collisions, "collision JSON-lines output");
  r->add_option("--distances", run.distances, "per-pair distance CSV output");
  r->add_flag("--serial", run.serial, "disable OpenMP across tracks");

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "scenario -> synthetic tracks");
  s->add_option("--scenario", sim.scenario, "scenario JSON")->required();
  s->add_option("--seed", sim.seed, "noise seed");
  s->add_option("--tracks", sim.tracks, "track CSV output ('-' for stdout)");
  s->add_option("--annotations", sim.annotations, "ground-truth annotation JSON-lines output");
  s->add_option("--expected-events", sim.expected, "scripted events as event JSON lines");
  s->add_option("--video-id", sim.video_id, "video id written into annotations");

  ScoreArgs score;
  auto* sc = app.add_subcommand("score", "events + annotations -> metrics");
  sc->add_option("--events", score.events, "detected events JSON lines")->required();
  sc->add_option("--annotations", score.annotations, "annotation JSON lines")->required();
  sc->add_option("--timelines", score.timelines, "JSON list of {video_id, fps, n_frames}");
  sc->add_option("--video-id", score.video_id, "single-video id (with --n-frames)");
  sc->add_option("--fps", score.fps, "single-video frame rate");
  sc->add_option("--n-frames", score.n_frames, "single-video frame count");
  sc->add_option("--match-threshold", score.threshold, "temporal IoU needed for a match");
  sc->add_option("--report", score.report, "metrics JSON output ('-' for stdout)");
  sc->add_option("--det-csv", score.det_csv, "DET samples CSV output");

  PlotArgs plot;
  auto* p = app.add_subcommand("plot", "DET CSV -> SVG");
  p->add_option("--det-csv", plot.det_csv, "DET CSV from score")->required();
  p->add_option("--out", plot.out, "SVG output ('-' for stdout)");
  p->add_flag("--time-based", plot.time_based, "plot against T_fa instead of R_fa");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*r) return cmd_run(run);
    if (*s) return cmd_simulate(sim);
    if (*sc) return cmd_score(score);
    if (*p) return cmd_plot(plot);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
