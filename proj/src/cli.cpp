#include "tis/cli.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tis/ensemble.hpp"
#include "tis/error.hpp"
#include "tis/metrics.hpp"
#include "tis/raster_io.hpp"
#include "tis/refine.hpp"
#include "tis/sequence.hpp"
#include "tis/tis0.hpp"

namespace fs = std::filesystem;

namespace tis::cli {
namespace {

std::shared_ptr<spdlog::logger> logger() {
  static const auto log = [] {
    auto l = spdlog::stderr_logger_mt("tis");
    l->set_pattern("[%l] %v");
    auto level = spdlog::level::warn;
    if (const char* env = std::getenv("TIS_LOG")) level = spdlog::level::from_str(env);
    l->set_level(level);
    return l;
  }();
  return log;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Files written during one command. Unless commit() is called, everything
// written is removed again, including the output directory if it was created
// here.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {
    if (!fs::exists(dir_)) {
      fs::create_directories(dir_);
      created_dir_ = true;
    } else if (!fs::is_directory(dir_)) {
      throw Error("output path is not a directory: " + dir_.string());
    }
  }
  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;

  ~OutputSet() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& f : files_) fs::remove(f, ec);
    if (created_dir_) fs::remove_all(dir_, ec);
  }

  const fs::path& dir() const { return dir_; }

  void write_masks(const std::vector<BinaryMask>& masks) {
    for (std::size_t t = 0; t < masks.size(); ++t) {
      const fs::path p = dir_ / frame_filename(t, "pgm");
      files_.push_back(p);
      write_mask(p, masks[t]);
    }
  }

  void write_text(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    files_.push_back(p);
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot create " + p.string());
    out << text;
    if (!out) throw Error("write error on " + p.string());
  }

  void commit() { committed_ = true; }

 private:
  fs::path dir_;
  std::vector<fs::path> files_;
  bool created_dir_ = false;
  bool committed_ = false;
};

struct Tis0Flags {
  double k_fences = kTukeyK;
  double min_flow_scale = 0.5;
  std::vector<double> exponents{1.0, 1.0 / 2.0, 1.0 / 3.0};
  int connectivity = 8;

  Tis0Config config() const {
    Tis0Config c;
    c.k_fences = k_fences;
    c.min_flow_scale = min_flow_scale;
    c.vs_exponents = exponents;
    c.connectivity = connectivity;
    c.validate();
    return c;
  }
};

void add_tis0_flags(CLI::App* cmd, Tis0Flags& f) {
  cmd->add_option("--k-fences", f.k_fences, "Tukey fence constant")->capture_default_str();
  cmd->add_option("--min-flow-scale", f.min_flow_scale, "Minimum flow outlier scale")->capture_default_str();
  cmd->add_option("--vs-exponents", f.exponents, "Visual saliency exponents")->delimiter(',');
  cmd->add_option("--connectivity", f.connectivity, "Segment connectivity (4 or 8)")
      ->check(CLI::IsMember({4, 8}))
      ->capture_default_str();
}

std::string tis0_report_csv(const Tis0Result& r) {
  std::ostringstream out;
  out << "frame,component,q1,q2,q3,o1,o3,outliers,alpha\n";
  for (std::size_t t = 0; t < r.reports.size(); ++t) {
    for (std::size_t c = 0; c < kFlowComponents; ++c) {
      const auto& rep = r.reports[t][c];
      out << t << ',' << component_name(static_cast<FlowComponent>(c)) << ',' << fmt_double(rep.q.q1) << ','
          << fmt_double(rep.q.q2) << ',' << fmt_double(rep.q.q3) << ',' << fmt_double(rep.fences.o1) << ','
          << fmt_double(rep.fences.o3) << ',' << rep.outlier_count << ',' << fmt_double(rep.alpha) << '\n';
    }
  }
  return out.str();
}

std::string consensus_csv(const RefineResult& r) {
  std::ostringstream out;
  out << "id,pixels,label_sum,f_local,f_nonlocal\n";
  for (std::size_t i = 0; i < r.supervoxels.size(); ++i) {
    const auto& s = r.supervoxels[i];
    const auto& e = r.consensus.at(s.id);
    out << s.id << ',' << s.pixel_count << ',' << s.label_sum << ',' << fmt_double(e.f_local) << ','
        << fmt_double(e.f_nonlocal) << '\n';
  }
  return out.str();
}

void require_dir(const fs::path& p, const std::string& what) {
  if (!fs::is_directory(p)) throw Error(what + " not found: " + p.string());
}

int cmd_tis0(const fs::path& input, const fs::path& output, const Tis0Flags& flags, int jobs) {
  require_dir(input, "input sequence");
  const Tis0Config cfg = flags.config();
  const FrameSequence seq = open_sequence(input);
  logger()->info("tis0: {} ({} frames, {}x{})", seq.name, seq.frame_count, seq.width, seq.height);
  const Tis0Result r = run_tis0(seq, cfg, jobs);

  OutputSet out(output);
  out.write_masks(r.masks);
  out.write_text("alpha.csv", tis0_report_csv(r));
  out.commit();
  return 0;
}

int cmd_refine(const fs::path& input, const fs::path& output, const std::string& masks_dir,
               const Tis0Flags& flags, const RefineConfig& rcfg, int jobs) {
  require_dir(input, "input sequence");
  rcfg.validate();
  const Tis0Config cfg = flags.config();
  const FrameSequence seq = open_sequence(input);
  if (!seq.has_labels()) throw Error("sequence " + seq.name + ": missing supervoxel labels (svx/)");
  if (!seq.has_frames()) throw Error("sequence " + seq.name + ": missing RGB frames (frames/)");

  std::vector<BinaryMask> initial;
  std::vector<ScalarField> f;
  if (!masks_dir.empty()) {
    initial = read_mask_directory(masks_dir);
    if (initial.size() != seq.frame_count) {
      throw Error("mismatched frame counts: " + masks_dir + " has " + std::to_string(initial.size()) +
                  " masks, sequence has " + std::to_string(seq.frame_count) + " frames");
    }
    for (const auto& m : initial) {
      require_same_shape(m, seq.labels[0], "initial mask vs sequence");
      f.emplace_back(m.width, m.height);
    }
  } else {
    Tis0Result r = run_tis0(seq, cfg, jobs);
    initial = std::move(r.masks);
    f = std::move(r.foregroundness);
  }
  logger()->info("refine: {} ({} frames)", seq.name, seq.frame_count);
  const RefineResult r = refine_sequence(seq, initial, f, rcfg, jobs);

  OutputSet out(output);
  out.write_masks(r.masks);
  out.write_text("consensus.csv", consensus_csv(r));
  out.commit();
  return 0;
}

// Each input is either a video directory with masks/<method>/ or a single
// method directory of indexed PGM masks.
std::vector<std::pair<std::string, std::vector<BinaryMask>>> load_methods(const std::vector<std::string>& inputs) {
  std::vector<std::pair<std::string, std::vector<BinaryMask>>> methods;
  for (const auto& in : inputs) {
    const fs::path p(in);
    require_dir(p, "method directory");
    if (fs::is_directory(p / "masks")) {
      const FrameSequence seq = open_sequence(p);
      for (const auto& [name, masks] : seq.masks) methods.emplace_back(name, masks);
    } else {
      std::string name = p.filename().string();
      if (name.empty()) name = p.parent_path().filename().string();
      methods.emplace_back(name, read_mask_directory(p));
    }
  }
  if (methods.empty()) throw Error("no method masks found");
  const std::size_t t = methods[0].second.size();
  for (const auto& [name, masks] : methods) {
    if (masks.size() != t) {
      throw Error("mismatched frame counts: method " + name + " has " + std::to_string(masks.size()) +
                  " frames, " + methods[0].first + " has " + std::to_string(t));
    }
  }
  return methods;
}

int cmd_combine(const std::vector<std::string>& inputs, const fs::path& output, const std::string& strategy_flag,
                double k, int jobs) {
  const FusionStrategy strategy = parse_strategy(strategy_flag);
  const auto methods = load_methods(inputs);
  const std::size_t t_count = methods[0].second.size();
  std::vector<EnsembleFrameInput> frames(t_count);
  for (std::size_t t = 0; t < t_count; ++t) {
    for (const auto& [name, masks] : methods) {
      frames[t].masks.push_back(masks[t]);
      frames[t].methods.push_back(name);
    }
  }
  logger()->info("combine: {} methods, {} frames, strategy {}", methods.size(), t_count, strategy_flag);
  const FusedSequence fused = fuse_sequence(frames, strategy, k, jobs);

  OutputSet out(output);
  out.write_masks(fused.masks);
  std::ostringstream csv;
  write_fusion_csv(csv, fused.report);
  out.write_text("alpha.csv", csv.str());
  out.commit();
  return 0;
}

int cmd_eval(const fs::path& input, const fs::path& gt, const std::string& output, double tolerance, int jobs,
             std::ostream& stdout_stream) {
  const DatasetScore scores = evaluate_dataset(input, gt, tolerance, jobs);
  std::ostringstream csv;
  write_scores_csv(csv, scores);
  if (output.empty()) {
    stdout_stream << csv.str();
    return 0;
  }
  const fs::path out_path(output);
  if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
  const std::string text = csv.str();
  write_file(out_path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tukey-inspired video object segmentation"};
  app.name("tis");
  app.require_subcommand(1);

  int jobs = 1;
  app.add_option("--jobs,-j", jobs, "Worker threads for parallel stages")
      ->check(CLI::Range(1, 1024))
      ->capture_default_str();

  std::string input;
  std::string output;
  Tis0Flags tis0_flags;

  auto* tis0 = app.add_subcommand("tis0", "Segment a sequence from flow and saliency outliers");
  tis0->add_option("--input", input, "Sequence directory")->required();
  tis0->add_option("--output", output, "Output mask directory")->required();
  add_tis0_flags(tis0, tis0_flags);

  std::string mode = "nonlocal";
  std::string masks_dir;
  RefineConfig rcfg;
  auto* refine = app.add_subcommand("refine", "Refine TIS0 masks with supervoxel consensus");
  refine->add_option("--input", input, "Sequence directory with frames/ and svx/")->required();
  refine->add_option("--output", output, "Output mask directory")->required();
  refine->add_option("--mode", mode, "Consensus mode")
      ->check(CLI::IsMember({"local", "nonlocal"}))
      ->capture_default_str();
  refine->add_option("--masks", masks_dir, "Initial masks to refine instead of running TIS0 (foregroundness 0)");
  refine->add_option("--neighbors", rcfg.neighbors, "Colour neighbours per supervoxel (0: ceil(N/100))")
      ->capture_default_str();
  refine->add_option("--epsilon", rcfg.epsilon_r, "Floor on LAB distance")->capture_default_str();
  add_tis0_flags(refine, tis0_flags);

  std::vector<std::string> inputs;
  std::string strategy = "tism";
  auto* combine = app.add_subcommand("combine", "Fuse masks from several methods");
  combine->add_option("--input", inputs, "Method directory, or sequence directory with masks/<method>/")
      ->required();
  combine->add_option("--output", output, "Output mask directory")->required();
  combine->add_option("--strategy", strategy, "Fusion strategy")
      ->check(CLI::IsMember({"tism", "mean", "median"}))
      ->capture_default_str();
  combine->add_option("--k-fences", tis0_flags.k_fences, "Tukey fence constant")->capture_default_str();

  std::string gt;
  double tolerance = -1.0;
  auto* eval = app.add_subcommand("eval", "Score predicted masks against ground truth");
  eval->add_option("--input", input, "Prediction root (one directory per sequence)")->required();
  eval->add_option("--gt", gt, "Ground-truth root (one directory per sequence)")->required();
  eval->add_option("--output", output, "CSV file (default: stdout)");
  eval->add_option("--tolerance", tolerance, "Contour tolerance in pixels (default: 0.75% of diagonal)");

  for (auto* sub : {tis0, refine, combine, eval}) {
    sub->add_option("--jobs,-j", jobs, "Worker threads for parallel stages")->check(CLI::Range(1, 1024));
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*tis0) return cmd_tis0(input, output, tis0_flags, jobs);
    if (*refine) {
      rcfg.mode = mode == "local" ? ConsensusMode::kLocalOnly : ConsensusMode::kLocalNonlocal;
      return cmd_refine(input, output, masks_dir, tis0_flags, rcfg, jobs);
    }
    if (*combine) return cmd_combine(inputs, output, strategy, tis0_flags.k_fences, jobs);
    if (*eval) return cmd_eval(input, gt, output, tolerance, jobs, out);
  } catch (const std::exception& e) {
    err << "tis: " << e.what() << '\n';
    logger()->debug("failed: {}", e.what());
    return 1;
  }
  return 1;
}

}  // namespace tis::cli
