#include <cstdio>

#include "common.hpp"
#include "reefforge/evalbench.hpp"
#include "reefforge/fsio.hpp"

namespace reefforge::cli {

int run_report(const PipelineConfig& cfg, const std::filesystem::path& bundle_path) {
  auto bundle = evalbench::load_bundle_json(bundle_path);
  auto tables = evalbench::render_tables(bundle);

  ensure_directory(cfg.out_dir);
  write_text_file_atomic(cfg.out_dir / "tables.txt", tables.text);
  write_text_file_atomic(cfg.out_dir / "models.csv", tables.csv_models);
  if (!tables.csv_ablation.empty())
    write_text_file_atomic(cfg.out_dir / "ablation.csv", tables.csv_ablation);

  std::fputs(tables.text.c_str(), stdout);
  std::fprintf(stderr, "[report] tables written to %s\n", cfg.out_dir.string().c_str());
  return 0;
}

}  // namespace reefforge::cli
