// rzsr command line. Everything goes through the C API in rzsr.h; this
// binary only parses flags and maps them onto config keys.
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rzsr.h"

namespace {

struct ConfigHandle {
  rzsr_config_t* cfg = nullptr;
  ConfigHandle() { rzsr_config_create(&cfg); }
  ~ConfigHandle() { rzsr_config_free(cfg); }
};

// exit codes: 0 ok, 1 usage, 2 runtime
int finish(rzsr_status st, const char* command) {
  if (st == RZSR_OK) return 0;
  std::fprintf(stderr, "rzsr %s: %s error: %s\n", command, rzsr_status_name(st),
               rzsr_last_error());
  if (st == RZSR_ERROR_INVALID_ARGUMENT || st == RZSR_ERROR_CONFIG) return 1;
  return 2;
}

class FlagSet {
 public:
  FlagSet(CLI::App* app, rzsr_config_t* cfg) : app_(app), cfg_(cfg) {}

  void add(const std::string& flag, const std::string& key,
           const std::string& help) {
    auto holder = std::make_shared<std::string>();
    app_->add_option_function<std::string>(
        flag,
        [this, key, holder](const std::string& v) {
          *holder = v;
          pending_.emplace_back(key, *holder);
        },
        help);
  }

  void add_flag(const std::string& flag, const std::string& key,
                const std::string& help) {
    app_->add_flag_callback(
        flag, [this, key]() { pending_.emplace_back(key, "true"); }, help);
  }

  void config_file(const std::string& flag) {
    app_->add_option_function<std::string>(
        flag,
        [this](const std::string& path) {
          pending_.emplace_back("@file", path);
        },
        "config file with key = value lines (flags override it)");
  }

  rzsr_status apply() {
    // file first so explicit flags win
    for (const auto& [k, v] : pending_)
      if (k == "@file") {
        rzsr_status st = rzsr_config_load_file(cfg_, v.c_str());
        if (st != RZSR_OK) return st;
      }
    for (const auto& [k, v] : pending_) {
      if (k == "@file") continue;
      rzsr_status st = rzsr_config_set(cfg_, k.c_str(), v.c_str());
      if (st != RZSR_OK) return st;
    }
    return RZSR_OK;
  }

 private:
  CLI::App* app_;
  rzsr_config_t* cfg_;
  std::vector<std::pair<std::string, std::string>> pending_;
};

void add_common(FlagSet& fs) {
  fs.config_file("--config");
  fs.add("--seed", "seed", "RNG seed recorded in the manifest");
  fs.add("--scale", "scale", "integer scale factor >= 2 (default 2)");
  fs.add("--patch-side", "patch_side", "patch side M (default 48)");
  fs.add("--tile-stride", "tile_stride", "inference tile stride s (default 4)");
  fs.add("--threshold", "threshold", "retrieval threshold T (default 0.9)");
  fs.add("--depth-bins", "depth_bins", "depth range count D (default 5)");
  fs.add("--k-divisor", "k_divisor", "cluster rule divisor (default 100)");
  fs.add("--db-stride", "db_stride", "candidate lattice stride (default 2)");
  fs.add("--mode", "mode", "full | reference-free | single-scale");
  fs.add("--retrieval", "retrieval",
         "database | exhaustive | exhaustive-no-depth | none");
  fs.add("--descriptor", "descriptor",
         "pixel | gradient-pyramid | external-file");
  fs.add("--channels", "channels", "network width (default 128)");
  fs.add("--bp-iters", "bp_iters", "back-projection iterations (default 8)");
  fs.add("--iters", "max_iters", "training iterations cap (default 3000)");
  fs.add("--lr", "lr", "initial learning rate (default 0.001)");
  fs.add("--augment", "augment", "dihedral augmentation (default true)");
  fs.add("--features", "features", "external FMAP path (or prefix for sr)");
  fs.add_flag("--ensemble", "ensemble", "geometric self-ensemble at inference");
  fs.add_flag("--audit", "audit", "write the per-tile retrieval audit CSV");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rzsr: reference-based zero-shot super-resolution"};
  app.set_version_flag("--version", []() { return std::string(rzsr_version()); });
  app.require_subcommand(1);

  ConfigHandle cfg;
  if (!cfg.cfg) {
    std::fprintf(stderr, "rzsr: cannot allocate config\n");
    return 2;
  }

  struct Cmd {
    CLI::App* app;
    std::unique_ptr<FlagSet> flags;
    rzsr_status (*run)(const rzsr_config_t*);
    const char* name;
  };
  std::vector<Cmd> cmds;

  auto make = [&](const char* name, const char* help,
                  rzsr_status (*run)(const rzsr_config_t*)) -> FlagSet& {
    CLI::App* sub = app.add_subcommand(name, help);
    cmds.push_back({sub, std::make_unique<FlagSet>(sub, cfg.cfg), run, name});
    return *cmds.back().flags;
  };

  {
    FlagSet& fs = make("sr", "super-resolve one image", rzsr_run_sr);
    add_common(fs);
    fs.add("--image", "image", "input LR image (PNG)");
    fs.add("--depth", "depth", "depth map (PGM P5 or DPT raw; optional)");
    fs.add("--kernel", "kernel", "blur kernel file for blind degradations");
    fs.add("--out", "out", "output PNG path");
  }
  {
    FlagSet& fs = make("degrade", "make LR images from HR inputs",
                       rzsr_run_degrade);
    fs.config_file("--config");
    fs.add("--image", "image", "HR image file or directory");
    fs.add("--out", "out", "output directory");
    fs.add("--degrade-mode", "degrade_mode",
           "bicubic | random-kernel | file-kernel");
    fs.add("--factor", "factor", "downsampling factor (default 2)");
    fs.add("--kernel", "kernel", "kernel file for file-kernel mode");
    fs.add("--noise-sigma", "noise_sigma", "additive noise after blurring");
    fs.add("--seed", "seed", "seed for the random kernels");
  }
  {
    FlagSet& fs = make("eval", "Y-channel PSNR/SSIM report", rzsr_run_eval);
    fs.config_file("--config");
    fs.add("--reference", "reference", "ground-truth image or directory");
    fs.add("--test", "test", "test image or directory");
    fs.add("--scale", "scale", "border shave in pixels (default 2)");
    fs.add("--out", "out", "report base path (default eval_report)");
  }
  {
    FlagSet& fs = make("build-db", "build and serialize a patch database",
                       rzsr_run_build_db);
    add_common(fs);
    fs.add("--image", "image", "source image (PNG)");
    fs.add("--depth", "depth", "depth map (optional)");
    fs.add("--out", "out", "output .rzdb path");
  }
  {
    FlagSet& fs = make("ablate", "run the four model/retrieval variants",
                       rzsr_run_ablate);
    add_common(fs);
    fs.add("--image", "image", "HR image file or directory");
    fs.add("--depth", "depth", "depth map (single-image mode)");
    fs.add("--factor", "factor", "degradation factor (default 2)");
    fs.add("--out", "out", "output directory");
  }
  {
    FlagSet& fs = make("kernel-gen", "write an anisotropic Gaussian kernel",
                       rzsr_run_kernel_gen);
    fs.config_file("--config");
    fs.add("--seed", "seed", "seed for random draws");
    fs.add("--lambda1", "lambda1", "major-axis sigma (with --lambda2/--theta)");
    fs.add("--lambda2", "lambda2", "minor-axis sigma");
    fs.add("--theta", "theta", "rotation in radians");
    fs.add("--out", "out", "output kernel file");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;  // --help exits 0; any parse problem is usage
  }

  for (const auto& c : cmds) {
    if (!c.app->parsed()) continue;
    rzsr_status st = c.flags->apply();
    if (st != RZSR_OK) return finish(st, c.name);
    return finish(c.run(cfg.cfg), c.name);
  }
  return 1;
}
