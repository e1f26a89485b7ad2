// sleeptda: command-line driver for the coherence -> persistence -> landscape
// -> permutation-test pipeline.
//
// Exit codes: 0 success, 2 usage, 3 validation/data error, 4 I/O error.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "sleeptda/sleeptda.hpp"

namespace fs = std::filesystem;
using namespace sleeptda;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitIo = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
  std::string output;
  bool print_config = false;
};

PipelineConfig load_config(const GlobalOptions& g) {
  PipelineConfig config;
  if (!g.config_path.empty()) {
    std::ifstream in(g.config_path);
    require(in.good(), ErrorKind::MissingFile, "config file '" + g.config_path + "' not found");
    config = parse_config(in);
  }
  if (g.seed) config.seed = *g.seed;
  return config;
}

fs::path require_output(const GlobalOptions& g, const char* command) {
  if (g.output.empty()) throw UsageError(std::string(command) + ": --output is required");
  return g.output;
}

std::vector<fs::path> read_list(const std::string& list_path) {
  std::ifstream in(list_path);
  require(in.good(), ErrorKind::MissingFile, "manifest list '" + list_path + "' not found");
  const fs::path base = fs::path(list_path).parent_path();
  std::vector<fs::path> out;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const fs::path p(t);
    out.push_back(p.is_absolute() ? p : base / p);
  }
  return out;
}

void print_preprocess_summary(const pipeline::PreprocessSummary& s) {
  for (const auto& w : s.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << "studies\t" << s.studies << "\nepochs\t" << s.epochs << "\nmatrices\t" << s.matrices
            << "\ndropped_nonfinite_epochs\t" << s.dropped_nonfinite << "\nskipped_awake_epochs\t"
            << s.skipped_awake << '\n';
  for (const auto& [group, n] : s.groups) std::cout << "group\t" << to_string(group) << '\t' << n << '\n';
  std::cout << "stage\tband\tmatrices\n";
  for (const auto& [key, n] : s.counts)
    std::cout << to_string(key.first) << '\t' << to_string(key.second) << '\t' << n << '\n';
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  require(out.good(), ErrorKind::Io, "cannot write '" + path.string() + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topological analysis of EEG coherence networks for two-group sleep cohorts"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config_path, "Pipeline configuration file (key = value)");
  app.add_option("--seed", g.seed, "RNG seed (overrides the config)");
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("-o,--output", g.output, "Output directory (or file for plot)");
  app.add_flag("--print-config", g.print_config, "Print the effective configuration and exit");

  cohort::SyntheticCohortConfig sim;
  auto* simulate = app.add_subcommand("simulate", "Write a synthetic two-group cohort of studies");
  simulate->add_option("--studies-per-group", sim.n_studies_per_group)->check(CLI::PositiveNumber);
  simulate->add_option("--channels", sim.channels);
  simulate->add_option("--sample-rate", sim.sample_rate);
  simulate->add_option("--duration", sim.duration_s, "Seconds per study");
  simulate->add_option("--coupling-apnea", sim.coupling_apnea);
  simulate->add_option("--coupling-control", sim.coupling_control);
  simulate->add_option("--noise", sim.noise_level);
  simulate->add_option("--line-noise", sim.line_noise_amplitude, "60 Hz mains amplitude");

  std::vector<std::string> manifests;
  std::string manifest_list;
  auto* preprocess = app.add_subcommand("preprocess", "Studies -> band distance matrix archive");
  preprocess->add_option("manifests", manifests, "Study manifest files");
  preprocess->add_option("--list", manifest_list, "File with one manifest path per line");

  std::string input;
  auto* persist = app.add_subcommand("persist", "Matrix archive -> persistence diagram archive");
  persist->add_option("input", input, "Matrix archive directory")->required();

  auto* land = app.add_subcommand("landscape", "Diagram archive -> landscape archive");
  land->add_option("input", input, "Diagram archive directory")->required();

  std::string groups_path;
  auto* test = app.add_subcommand("test", "Permutation tests per band and sleep stage");
  test->add_option("input", input, "Landscape archive directory")->required();
  test->add_option("--groups", groups_path, "CSV study_id,group overriding archive groups");

  std::string record;
  auto* plot_cmd = app.add_subcommand("plot", "Render one diagram or landscape record as SVG");
  plot_cmd->add_option("input", input, "Diagram or landscape archive directory")->required();
  plot_cmd->add_option("--record", record, "Record name, e.g. study_000.e0003.delta")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    const PipelineConfig config = load_config(g);
    if (g.print_config) {
      write_config(std::cout, config);
      return 0;
    }
    if (app.get_subcommands().empty()) throw UsageError("a subcommand is required (see --help)");

    if (simulate->parsed()) {
      const fs::path out = require_output(g, "simulate");
      sim.seed = config.seed;
      std::ofstream list_file;
      std::string listing;
      for (const auto& study : cohort::generate_synthetic_cohort(sim)) {
        const fs::path manifest = cohort::write_study(study, out / study.study_id);
        listing += fs::relative(manifest, out).string() + "\n";
      }
      write_file(out / "manifests.txt", listing);
      std::cout << "wrote " << 2 * sim.n_studies_per_group << " studies to " << out.string() << '\n';
    } else if (preprocess->parsed()) {
      const fs::path out = require_output(g, "preprocess");
      std::vector<fs::path> paths(manifests.begin(), manifests.end());
      if (!manifest_list.empty()) {
        const auto listed = read_list(manifest_list);
        paths.insert(paths.end(), listed.begin(), listed.end());
      }
      if (paths.empty()) throw UsageError("preprocess: no study manifests given");
      print_preprocess_summary(pipeline::preprocess_manifests(paths, config, out, g.jobs));
    } else if (persist->parsed()) {
      const auto n = pipeline::persist_archive(input, require_output(g, "persist"), config, g.jobs);
      std::cout << "diagrams\t" << n << '\n';
    } else if (land->parsed()) {
      const auto n = pipeline::landscape_archive(input, require_output(g, "landscape"), config, g.jobs);
      std::cout << "landscapes\t" << n << '\n';
    } else if (test->parsed()) {
      const auto groups = groups_path.empty() ? std::map<std::string, Group>{}
                                              : pipeline::read_groups_file(groups_path);
      const auto table = pipeline::test_archive(input, config, g.jobs, groups);
      std::ostringstream t, d;
      inference::write_table(t, table);
      inference::write_details(d, table);
      std::cout << t.str();
      if (!g.output.empty()) {
        write_file(fs::path(g.output) / "ptable.tsv", t.str());
        write_file(fs::path(g.output) / "ptable_details.tsv", d.str());
      }
    } else if (plot_cmd->parsed()) {
      const fs::path out = require_output(g, "plot");
      const auto index = archive::read_index(input);
      const auto* key = index.find(record);
      require(key != nullptr, ErrorKind::Lookup, "no record '" + record + "' in '" + input + "'");
      std::istringstream is(archive::read_record(input, *key));
      const std::string title = record + " (" + std::string(to_string(key->stage)) + ")";
      if (index.kind == archive::Kind::Diagrams)
        write_file(out, plot::diagram_svg(persistence::read_diagram(is), title));
      else if (index.kind == archive::Kind::Landscapes)
        write_file(out, plot::landscape_svg(landscape::read_landscape(is), title));
      else
        fail(ErrorKind::InvalidInput, "plot needs a diagram or landscape archive");
      std::cout << "wrote " << out.string() << '\n';
    }
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.is_io() ? kExitIo : kExitValidation;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
}
