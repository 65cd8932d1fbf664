// Command-line experiment runner. Subcommands:
//   prepare-data  load a raw benchmark CSV, report marginals, dump the
//                 canonical encoded form
//   synth-data    write seeded synthetic stand-ins for the benchmark CSVs
//   run           full experiment grid from a config file -> JSON report
//   detect        filtering-only detection table (manipulated fraction)
//   ablate        detection table per filtering variant
//   report        convert a JSON report to csv / plotdata
// Errors leave on stderr as one machine-readable JSON object, exit code 1.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "flea/harness.hpp"
#include "flea/synthdata.hpp"

namespace {

using namespace flea;

void apply_overrides(harness::ExperimentConfig& cfg, const std::vector<std::string>& sets) {
  for (const auto& s : sets) {
    auto eq = s.find('=');
    require(eq != std::string::npos, "config", "--set expects key=value, got: " + s);
    harness::apply_setting(cfg, csv::trim(s.substr(0, eq)), csv::trim(s.substr(eq + 1)));
  }
}

// Generates any missing fixture files for the configured datasets, then
// points the config at that directory.
void ensure_synth_dir(harness::ExperimentConfig& cfg, const std::string& dir,
                      std::uint64_t seed) {
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
  for (const auto& ds : cfg.datasets) {
    std::string path = dir + "/" + ds + ".csv";
    if (!std::filesystem::exists(path)) synthdata::write_fixture(ds, path, seed);
  }
  cfg.data_dir = dir;
}

harness::ExperimentConfig load_config(const std::string& path,
                                      const std::vector<std::string>& sets,
                                      const std::string& synth_dir, std::uint64_t synth_seed) {
  harness::ExperimentConfig cfg = harness::config_from_file(path);
  apply_overrides(cfg, sets);
  ensure_synth_dir(cfg, synth_dir, synth_seed);
  cfg.check();
  return cfg;
}

void write_json_file(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), "io", "cannot write " + path);
  out << j.dump(2) << "\n";
  require(out.good(), "io", "write failed: " + path);
}

void print_table(const csv::Table& t) {
  std::vector<std::size_t> width(t.header.size());
  for (std::size_t c = 0; c < t.header.size(); ++c) width[c] = t.header[c].size();
  for (const auto& row : t.rows)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  auto print_row = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c)
      std::printf("%-*s%s", static_cast<int>(width[c]), row[c].c_str(),
                  c + 1 == row.size() ? "\n" : "  ");
  };
  print_row(t.header);
  for (const auto& row : t.rows) print_row(row);
}

int cmd_prepare_data(const std::string& dataset, const std::string& csv_path,
                     const std::string& out) {
  Dataset d = tabular::load_dataset(dataset, csv_path);
  nlohmann::json j;
  j["dataset"] = dataset;
  j["rows"] = d.n();
  j["feature_dim"] = d.dim();
  j["protected_fraction"] = d.group_fraction();
  j["positive_fraction"] = d.label_fraction();
  j["feature_names"] = d.schema->feature_names();
  std::cout << j.dump(2) << "\n";
  if (!out.empty()) {
    write_canonical_csv(d, out);
    std::cerr << "wrote " << out << "\n";
  }
  return 0;
}

int cmd_synth_data(const std::string& dataset, const std::string& dir, std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> ids;
  if (dataset == "all") {
    ids = harness::known_datasets();
  } else {
    ids.push_back(dataset);
  }
  for (const auto& id : ids) {
    std::string path = dir + "/" + id + ".csv";
    synthdata::write_fixture(id, path, seed);
    std::cerr << "wrote " << path << "\n";
  }
  return 0;
}

int cmd_run(const harness::ExperimentConfig& cfg, const std::string& out,
            const std::string& csv_out, const std::string& plot_out) {
  harness::ExperimentReport rep = harness::run_experiment(cfg);
  harness::emit_report(rep, "json", out);
  std::cerr << "wrote " << out << "\n";
  if (!csv_out.empty()) {
    harness::emit_report(rep, "csv", csv_out);
    std::cerr << "wrote " << csv_out << "\n";
  }
  if (!plot_out.empty()) {
    harness::emit_report(rep, "plotdata", plot_out);
    std::cerr << "wrote " << plot_out << "\n";
  }
  print_table(harness::report_to_csv(rep));
  return 0;
}

int cmd_detect(const harness::ExperimentConfig& cfg, const std::string& out,
               const std::string& json_out) {
  auto table = harness::run_detection_table(cfg);
  csv::Table t = harness::detection_to_csv(table);
  if (!out.empty()) {
    csv::write_file(out, t);
    std::cerr << "wrote " << out << "\n";
  }
  if (!json_out.empty()) write_json_file(harness::detection_to_json(table), json_out);
  print_table(t);
  return 0;
}

int cmd_ablate(const harness::ExperimentConfig& cfg, const std::string& out,
               const std::string& json_out) {
  auto table = harness::run_ablation(cfg);
  csv::Table t = harness::ablation_to_csv(table);
  if (!out.empty()) {
    csv::write_file(out, t);
    std::cerr << "wrote " << out << "\n";
  }
  if (!json_out.empty()) write_json_file(harness::ablation_to_json(table), json_out);
  print_table(t);
  return 0;
}

int cmd_report(const std::string& report_path, const std::string& format,
               const std::string& out) {
  std::ifstream in(report_path);
  require(in.good(), "io", "cannot open report: " + report_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail("schema", std::string("bad report JSON: ") + e.what());
  }
  harness::ExperimentReport rep = harness::report_from_json(j);
  if (!out.empty()) {
    harness::emit_report(rep, format, out);
    std::cerr << "wrote " << out << "\n";
    return 0;
  }
  if (format == "json") {
    std::cout << harness::report_to_json(rep).dump(2) << "\n";
  } else if (format == "csv") {
    print_table(harness::report_to_csv(rep));
  } else if (format == "plotdata") {
    print_table(harness::report_to_plotdata(rep));
  } else {
    fail("config", "unknown report format: " + format);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"robust fairness-aware learning from multiple data sources"};
  app.require_subcommand(1);

  std::string dataset, csv_path, out, json_out, csv_out, plot_out, config_path, format = "csv";
  std::string synth_dir, dir = ".";
  std::uint64_t seed = flea::synthdata::kDefaultSeed;
  std::vector<std::string> sets;

  auto* prep = app.add_subcommand("prepare-data", "load a raw benchmark CSV and summarize it");
  prep->add_option("dataset", dataset, "dataset id (compas, adult, germancredit, drugs)")
      ->required();
  prep->add_option("csv", csv_path, "path to the raw CSV file")->required();
  prep->add_option("--out", out, "write the canonical encoded CSV here");

  auto* synth = app.add_subcommand("synth-data", "write synthetic benchmark stand-ins");
  synth->add_option("dataset", dataset, "dataset id or 'all'")->required();
  synth->add_option("--dir", dir, "output directory (default: current)");
  synth->add_option("--seed", seed, "generator seed");

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "flat key=value config file")->required();
    sub->add_option("--set", sets, "override a config key, e.g. --set repeats=3");
    sub->add_option("--synth", synth_dir,
                    "generate missing synthetic data into this directory and use it");
    sub->add_option("--synth-seed", seed, "seed for --synth generation");
  };

  auto* run = app.add_subcommand("run", "run the configured experiment grid");
  add_common(run);
  run->add_option("--out", out, "JSON report path")->default_val("report.json");
  run->add_option("--csv", csv_out, "also write aggregate CSV here");
  run->add_option("--plotdata", plot_out, "also write bar-chart CSV here");

  auto* detect = app.add_subcommand("detect", "filtering-only detection table");
  add_common(detect);
  detect->add_option("--out", out, "CSV table path")->default_val("detection.csv");
  detect->add_option("--json", json_out, "also write the table as JSON");

  auto* ablate = app.add_subcommand("ablate", "detection table per filtering variant");
  add_common(ablate);
  ablate->add_option("--out", out, "CSV table path")->default_val("ablation.csv");
  ablate->add_option("--json", json_out, "also write the table as JSON");

  auto* report = app.add_subcommand("report", "convert a JSON report");
  report->add_option("json", config_path, "report JSON produced by run")->required();
  report->add_option("--format", format, "json, csv, or plotdata")->default_val("csv");
  report->add_option("--out", out, "output path (default: print to stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    nlohmann::json err = {{"error", {{"type", "usage"}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return 1;
  }

  try {
    if (prep->parsed()) return cmd_prepare_data(dataset, csv_path, out);
    if (synth->parsed()) return cmd_synth_data(dataset, dir, seed);
    if (report->parsed()) return cmd_report(config_path, format, out);
    flea::harness::ExperimentConfig cfg = load_config(config_path, sets, synth_dir, seed);
    if (run->parsed()) return cmd_run(cfg, out, csv_out, plot_out);
    if (detect->parsed()) return cmd_detect(cfg, out, json_out);
    if (ablate->parsed()) return cmd_ablate(cfg, out, json_out);
    flea::fail("state", "no subcommand dispatched");
  } catch (const flea::Error& e) {
    nlohmann::json err = {{"error", {{"type", e.kind()}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    nlohmann::json err = {{"error", {{"type", "internal"}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 0;
}
