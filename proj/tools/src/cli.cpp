// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsica authors

#include "cli.hpp"

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "raster.hpp"
#include "tsica/component_analysis.hpp"
#include "tsica/error.hpp"
#include "tsica/pipeline.hpp"
#include "tsica/simgen.hpp"
#include "tsica/text_io.hpp"
#include "tsica/volume_io.hpp"

namespace tsica::cli {

namespace fs = std::filesystem;

namespace {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::io_error:
    case ErrorCode::unrecognized_format:
    case ErrorCode::unsupported_datatype:
    case ErrorCode::truncated_header:
    case ErrorCode::truncated_data:
    case ErrorCode::size_mismatch:
      return kExitIo;
    case ErrorCode::invalid_argument:
    case ErrorCode::header_volume_mismatch:
    case ErrorCode::shape_mismatch:
    case ErrorCode::extent_mismatch:
    case ErrorCode::empty_mask:
    case ErrorCode::index_out_of_range:
      return kExitUsage;
    default:
      return kExitNumerical;
  }
}

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

FormatKind parse_format(const std::string& name) {
  if (name == "nii") return FormatKind::nifti_single;
  if (name == "pair") return FormatKind::nifti_pair;
  if (name == "analyze") return FormatKind::analyze75;
  throw UsageError("unknown format '" + name + "' (expected nii, pair or analyze)");
}

Orientation parse_orientation(const std::string& name) {
  if (name == "spatial") return Orientation::spatial;
  if (name == "temporal") return Orientation::temporal;
  throw UsageError("unknown orientation '" + name + "' (expected spatial or temporal)");
}

ComponentCountMode parse_components(const std::string& text) {
  if (text == "auto") return ComponentCountMode::auto_rule();
  try {
    std::size_t used = 0;
    const long m = std::stol(text, &used);
    if (used == text.size() && m >= 1) return ComponentCountMode::fixed_count(static_cast<std::size_t>(m));
  } catch (const std::exception&) {
  }
  throw UsageError("--components expects 'auto' or a positive integer, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> values;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(std::string(what) + ": '" + item + "' is not a number");
    }
  }
  return values;
}

std::string component_label(Eigen::Index k) {
  std::ostringstream s;
  s << "component_" << std::setw(2) << std::setfill('0') << k + 1;
  return s.str();
}

std::string join_floats(const auto& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i)
    out += (i ? " " : "") + format_double(static_cast<double>(values[i]));
  return out;
}

void print_header(std::ostream& out, const VolumeHeader& h) {
  const auto ext = h.extents();
  out << "format: " << to_string(h.format) << '\n';
  out << "endianness: " << to_string(h.endianness) << '\n';
  out << "ndim: " << h.ndim << '\n';
  out << "dims: " << ext[0] << ' ' << ext[1] << ' ' << ext[2] << ' ' << ext[3] << '\n';
  out << "datatype: " << to_string(h.datatype) << " (" << static_cast<int>(h.datatype) << ")\n";
  out << "bitpix: " << bits_per_sample(h.datatype) << '\n';
  out << "voxel_size: " << join_floats(std::vector<float>{h.pixdim[1], h.pixdim[2], h.pixdim[3]}) << '\n';
  out << "time_step: " << format_double(h.pixdim[4]) << '\n';
  out << "pixdim: " << join_floats(h.pixdim) << '\n';
  out << "vox_offset: " << format_double(h.vox_offset) << '\n';
  out << "scale_slope: " << format_double(h.scale_slope) << '\n';
  out << "scale_intercept: " << format_double(h.scale_intercept) << '\n';
  out << "xyzt_units: " << static_cast<int>(h.xyzt_units) << '\n';
  out << "qform_code: " << h.qform_code << '\n';
  out << "sform_code: " << h.sform_code << '\n';
  out << "quatern_bcd: " << join_floats(h.quatern) << '\n';
  out << "qoffset_xyz: " << join_floats(h.qoffset) << '\n';
  out << "srow_x: " << join_floats(h.srow[0]) << '\n';
  out << "srow_y: " << join_floats(h.srow[1]) << '\n';
  out << "srow_z: " << join_floats(h.srow[2]) << '\n';
  out << "description: " << h.description << '\n';
  out << "extension_bytes: " << h.extension.size() << '\n';
  for (const auto& note : h.notes) out << "note: " << note << '\n';
}

// key=value lines from --config become "--key=value" arguments placed before
// the user's own, so flags given on the command line win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  std::optional<fs::path> config;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a file");
      config = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config = args[i].substr(9);
    } else {
      out.push_back(args[i]);
    }
  }
  if (!config) return out;
  if (out.empty()) throw UsageError("--config needs a subcommand");
  std::vector<std::string> injected;
  for (const auto& [key, value] : read_key_values(*config)) injected.push_back("--" + key + "=" + value);
  // Position 0 is the subcommand name.
  out.insert(out.begin() + 1, injected.begin(), injected.end());
  return out;
}

struct HeaderArgs {
  std::string path;
};

struct SimulateArgs {
  std::string variant;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "nii";
};

struct IcaArgs {
  std::string input;
  std::string mask;
  std::string orientation = "temporal";
  std::string components = "auto";
  std::uint64_t seed = 0;
  std::string fwhm;
  std::string out;
  std::string format = "nii";
  std::string scheme = "deflation";
  int max_iter = 1000;
  double tol = 1e-8;
  bool standardize = false;
};

struct AnalyzeArgs {
  std::string dir;
  std::string references;
  std::string assign = "pearson";
  std::string quantiles;
  double q_high = 0.9;
  double q_low = 0.1;
  double q_abs = 0.95;
  std::string report;
  std::string format = "nii";
};

struct ExportArgs {
  std::string input;
  std::string axis = "axial";
  long slice = -1;
  std::size_t frame = 0;
  std::string overlay;
  bool diverging = false;
  std::string timecourses;
  std::string column;
  std::string out;
};

int cmd_header(const HeaderArgs& args, std::ostream& out) {
  print_header(out, read_header(args.path));
  return kExitOk;
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out) {
  Simulation sim;
  if (args.variant == "multisignal") {
    sim = simulate_multisignal(args.seed);
  } else if (args.variant == "event") {
    sim = simulate_event_related(args.seed);
  } else if (args.variant == "wave") {
    sim = simulate_traveling_wave(args.seed);
  } else {
    throw UsageError("unknown variant '" + args.variant + "' (expected multisignal, event or wave)");
  }
  const auto files = write_simulation(sim, args.out, parse_format(args.format));
  const auto& e = sim.volume.extents;
  out << "variant: " << args.variant << '\n';
  out << "seed: " << args.seed << '\n';
  out << "extents: " << e[0] << ' ' << e[1] << ' ' << e[2] << ' ' << e[3] << '\n';
  out << "volume: " << files.volume.string() << '\n';
  out << "signals: " << files.signals.string() << '\n';
  out << "labels: " << files.labels.string() << '\n';
  for (const auto& [label, count] : region_counts(sim.truth)) out << "region " << label << ": " << count << '\n';
  if (args.variant == "event")
    for (std::size_t i = 0; i < 4; ++i) out << "events tube" << i + 1 << ": " << sim.truth.event_counts[i] << '\n';
  return kExitOk;
}

int cmd_ica(const IcaArgs& args, std::ostream& out) {
  IcaRunConfig config;
  config.orientation = parse_orientation(args.orientation);
  config.count = parse_components(args.components);
  config.seed = args.seed;
  config.standardize = args.standardize;
  config.ica.max_iterations = args.max_iter;
  config.ica.tolerance = args.tol;
  if (args.scheme == "deflation") {
    config.ica.scheme = FastIcaScheme::deflation;
  } else if (args.scheme == "symmetric") {
    config.ica.scheme = FastIcaScheme::symmetric;
  } else {
    throw UsageError("unknown scheme '" + args.scheme + "' (expected deflation or symmetric)");
  }
  if (!args.fwhm.empty()) {
    auto f = parse_list(args.fwhm, "--fwhm");
    if (f.size() == 1) f = {f[0], f[0], f[0]};
    if (f.size() != 3) throw UsageError("--fwhm expects X,Y,Z or a single value");
    if (f[0] < 0 || f[1] < 0 || f[2] < 0) throw UsageError("--fwhm values must be >= 0");
    config.fwhm_mm = {f[0], f[1], f[2]};
  }
  const FormatKind format = parse_format(args.format);

  const LoadedVolume input = read_volume(args.input);
  MaskVolume mask = MaskVolume::all(input.volume.spatial_extents());
  if (!args.mask.empty()) {
    const LoadedVolume m = read_volume(args.mask);
    if (m.volume.spatial_extents() != input.volume.spatial_extents())
      fail(ErrorCode::extent_mismatch, "mask extents differ from the input volume");
    mask = MaskVolume::from_volume(m.volume);
  }

  const IcaDecomposition d = run_ica(input.volume, mask, config);
  const auto files = write_decomposition(d, input.volume, args.out, format);
  out << "orientation: " << to_string(d.orientation) << '\n';
  out << "components: " << d.component_count() << '\n';
  out << "voxels: " << d.voxel_map.size() << '\n';
  std::size_t converged = 0;
  for (std::size_t k = 0; k < d.convergence.size(); ++k) {
    const auto& c = d.convergence[k];
    converged += c.converged;
    out << component_label(static_cast<Eigen::Index>(k)) << ": iterations " << c.iterations
        << (c.converged ? " converged" : " not-converged") << '\n';
  }
  out << "converged: " << converged << "/" << d.convergence.size() << '\n';
  for (const auto& w : d.warnings) out << "warning: " << w << '\n';
  out << "metadata: " << files.metadata.string() << '\n';
  return kExitOk;
}

int cmd_analyze(const AnalyzeArgs& args, std::ostream& out, std::ostream& err) {
  const fs::path dir = args.dir;
  const auto meta = to_map(read_key_values(dir / "metadata.txt"));
  const Table tcs = read_table(dir / "timecourses.tsv");
  double dt = 1.0;
  if (auto it = meta.find("time_step"); it != meta.end()) dt = std::stod(it->second);
  const Eigen::Index m = tcs.values.cols();
  const FormatKind format = parse_format(args.format);

  KeyValues report;
  report.emplace_back("components", std::to_string(m));
  report.emplace_back("sample_period", format_double(dt));
  bool degenerate = false;
  for (Eigen::Index k = 0; k < m; ++k) {
    const std::string name = component_label(k);
    try {
      const FrequencyPhase fp = dominant_frequency_phase(tcs.values.col(k), dt);
      report.emplace_back(name + ".frequency", format_double(fp.frequency));
      report.emplace_back(name + ".bin", std::to_string(fp.bin));
      report.emplace_back(name + ".phase", format_double(fp.phase));
      report.emplace_back(name + ".magnitude", format_double(fp.magnitude));
    } catch (const Error& e) {
      degenerate = true;
      report.emplace_back(name + ".error", e.what());
      err << name << ": " << e.what() << '\n';
    }
  }

  // Threshold direction per component: +1 upper tail, -1 lower tail, 0 |v|.
  std::vector<int> direction(static_cast<std::size_t>(m), 0);
  if (!args.references.empty()) {
    const Table refs = read_table(args.references);
    if (refs.values.rows() != tcs.values.rows())
      throw UsageError("references have " + std::to_string(refs.values.rows()) + " rows, time courses " +
                       std::to_string(tcs.values.rows()));
    std::vector<double> q_src;
    if (!args.quantiles.empty()) {
      q_src = parse_list(args.quantiles, "--quantiles");
    } else {
      for (Eigen::Index j = 0; j < refs.values.cols(); ++j) {
        const double events = static_cast<double>((refs.values.col(j).array() != 0.0).count());
        q_src.push_back(1.0 - events / static_cast<double>(refs.values.rows()));
      }
    }
    if (q_src.size() != static_cast<std::size_t>(refs.values.cols()))
      throw UsageError("--quantiles needs one value per reference column");

    std::vector<SignedPart> parts;
    for (Eigen::Index k = 0; k < m; ++k) {
      try {
        parts.push_back(select_signed_part(tcs.values.col(k)));
      } catch (const Error&) {
        parts.push_back({Eigen::VectorXd::Zero(tcs.values.rows()), +1});
      }
    }

    Assignment assignment;
    if (args.assign == "pearson") {
      assignment = pearson_assign(tcs.values, refs.values);
    } else if (args.assign == "binary") {
      assignment = binary_assign(tcs.values, refs.values, q_src);
    } else {
      throw UsageError("unknown assignment '" + args.assign + "' (expected pearson or binary)");
    }
    for (const auto& p : assignment.pairs) {
      const std::string name = component_label(p.component);
      report.emplace_back(name + ".source", refs.names[static_cast<std::size_t>(p.source)]);
      report.emplace_back(name + "." + args.assign, format_double(p.score));
      int dir_sign = p.score >= 0.0 ? +1 : -1;
      if (args.assign == "binary") dir_sign *= parts[static_cast<std::size_t>(p.component)].polarity;
      direction[static_cast<std::size_t>(p.component)] = dir_sign;
    }
    const ResolvedAssignment resolved = resolve_conflicts(assignment, parts, q_src);
    for (const auto& c : resolved.conflicts) {
      const std::string source = refs.names[static_cast<std::size_t>(c.source)];
      std::string candidates;
      for (const auto k : c.candidates) candidates += (candidates.empty() ? "" : ",") + component_label(k);
      report.emplace_back("conflict." + source + ".candidates", candidates);
      for (std::size_t r = 0; r < c.rounds.size(); ++r) {
        const std::string round = "conflict." + source + ".round" + std::to_string(r + 1);
        report.emplace_back(round + ".energy", format_double(c.rounds[r].e1) + "," + format_double(c.rounds[r].e2));
      }
      report.emplace_back("conflict." + source + ".winner", component_label(c.winner));
    }
    std::string unassigned;
    for (const auto k : resolved.assignment.unassigned)
      unassigned += (unassigned.empty() ? "" : ",") + component_label(k);
    report.emplace_back("unassigned", unassigned);
    std::string missing;
    for (Eigen::Index j = 0; j < refs.values.cols(); ++j)
      if (resolved.assignment.components_for(j).empty())
        missing += (missing.empty() ? "" : ",") + refs.names[static_cast<std::size_t>(j)];
    report.emplace_back("sources_without_component", missing);
  }

  for (Eigen::Index k = 0; k < m; ++k) {
    const std::string name = component_label(k);
    const LoadedVolume map = read_volume(dir / name);
    const Eigen::Map<const Eigen::VectorXd> values(map.volume.samples.data(),
                                                   static_cast<Eigen::Index>(map.volume.samples.size()));
    const int d = direction[static_cast<std::size_t>(k)];
    const ThresholdSpec spec =
        d == 0 ? ThresholdSpec::abs_quantile(args.q_abs) : ThresholdSpec::two_sided(d, args.q_high, args.q_low);
    const auto keep = threshold_map(values, spec);
    Volume4D mask(map.volume.extents);
    mask.voxel_size = map.volume.voxel_size;
    std::size_t kept = 0;
    for (std::size_t v = 0; v < keep.size(); ++v) {
      mask.samples[v] = keep[v];
      kept += keep[v];
    }
    const auto files = write_volume(mask, make_header(mask, Datatype::u8, format), dir / ("mask_" + name.substr(10)), format);
    report.emplace_back(name + ".mask_voxels", std::to_string(kept));
    report.emplace_back(name + ".mask", files.files.front().filename().string());
  }

  const fs::path report_path = args.report.empty() ? dir / "report.txt" : fs::path(args.report);
  write_key_values(report_path, report);
  for (const auto& [key, value] : report) out << key << '=' << value << '\n';
  return degenerate ? kExitNumerical : kExitOk;
}

int cmd_export(const ExportArgs& args, std::ostream& out) {
  if (args.input.empty() == args.timecourses.empty())
    throw UsageError("export needs exactly one of --input or --timecourses");
  if (!args.timecourses.empty()) {
    const Table table = read_table(args.timecourses);
    Eigen::Index col = -1;
    for (std::size_t j = 0; j < table.names.size(); ++j)
      if (table.names[j] == args.column) col = static_cast<Eigen::Index>(j);
    if (col < 0) {
      try {
        std::size_t used = 0;
        const long idx = std::stol(args.column, &used);
        if (used == args.column.size()) col = idx;
      } catch (const std::exception&) {
      }
    }
    if (col < 0 || col >= table.values.cols()) throw UsageError("no time-course column '" + args.column + "'");
    const fs::path image = args.out;
    write_plot(image, table.values.col(col));
    Table single;
    single.names = {table.names[static_cast<std::size_t>(col)]};
    single.values = table.values.col(col);
    fs::path tsv = image;
    tsv.replace_extension(".tsv");
    write_table(tsv, single);
    out << "plot: " << image.string() << '\n' << "table: " << tsv.string() << '\n';
    return kExitOk;
  }

  const LoadedVolume input = read_volume(args.input);
  const SliceAxis axis = parse_axis(args.axis);
  const std::size_t length = axis_length(input.volume, axis);
  const std::size_t index = args.slice < 0 ? length / 2 : static_cast<std::size_t>(args.slice);
  if (index >= length)
    throw UsageError("slice " + std::to_string(index) + " outside [0, " + std::to_string(length) + ")");
  if (args.frame >= input.volume.frames())
    throw UsageError("frame " + std::to_string(args.frame) + " outside [0, " +
                     std::to_string(input.volume.frames()) + ")");
  SliceImage image = extract_slice(input.volume, axis, index, args.frame);
  if (!args.overlay.empty()) {
    const LoadedVolume mask = read_volume(args.overlay);
    if (mask.volume.spatial_extents() != input.volume.spatial_extents())
      fail(ErrorCode::extent_mismatch, "overlay extents differ from the input volume");
    image.overlay = extract_mask_slice(mask.volume, axis, index);
  }
  write_slice(args.out, image, args.diverging);
  out << "image: " << args.out << '\n';
  out << "size: " << image.width << 'x' << image.height << '\n';
  return kExitOk;
}

void apply_thread_env() {
  if (const char* env = std::getenv("TSICA_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n >= 1) set_thread_count(static_cast<unsigned>(n));
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  apply_thread_env();
  CLI::App app{"Spatial and temporal ICA for 4D volumes", "tsica"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  HeaderArgs header_args;
  auto* header = app.add_subcommand("header", "Print every parsed header field");
  header->add_option("path", header_args.path, "Volume (.nii, .hdr or .img)")->required();

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "Write a tube phantom with ground truth");
  simulate->add_option("--variant", sim_args.variant, "multisignal, event or wave")->required();
  simulate->add_option("--seed", sim_args.seed, "Random seed");
  simulate->add_option("--out", sim_args.out, "Output directory")->required();
  simulate->add_option("--format", sim_args.format, "nii, pair or analyze");

  IcaArgs ica_args;
  auto* ica = app.add_subcommand("ica", "Run spatial or temporal ICA");
  ica->add_option("--input", ica_args.input, "4D input volume")->required();
  ica->add_option("--mask", ica_args.mask, "Mask volume (non-zero voxels kept)");
  ica->add_option("--orientation", ica_args.orientation, "spatial or temporal");
  ica->add_option("--components", ica_args.components, "auto or a positive count");
  ica->add_option("--seed", ica_args.seed, "FastICA seed");
  ica->add_option("--fwhm", ica_args.fwhm, "Smoothing FWHM in mm: X,Y,Z");
  ica->add_option("--out", ica_args.out, "Output directory")->required();
  ica->add_option("--format", ica_args.format, "nii, pair or analyze");
  ica->add_option("--scheme", ica_args.scheme, "deflation or symmetric");
  ica->add_option("--max-iter", ica_args.max_iter, "FastICA iteration cap")->check(CLI::PositiveNumber);
  ica->add_option("--tol", ica_args.tol, "FastICA convergence tolerance")->check(CLI::PositiveNumber);
  ica->add_flag("--standardize", ica_args.standardize, "Whiten the correlation instead of the covariance");

  AnalyzeArgs an_args;
  auto* analyze = app.add_subcommand("analyze", "Characterize the components of a decomposition");
  analyze->add_option("--dir", an_args.dir, "Decomposition directory written by 'ica'")->required();
  analyze->add_option("--references", an_args.references, "Reference signals (TSV with header row)");
  analyze->add_option("--assign", an_args.assign, "pearson or binary");
  analyze->add_option("--quantiles", an_args.quantiles, "Per-reference event quantiles q1,q2,...");
  analyze->add_option("--q-high", an_args.q_high, "Upper-tail map quantile");
  analyze->add_option("--q-low", an_args.q_low, "Lower-tail map quantile");
  analyze->add_option("--q-abs", an_args.q_abs, "|value| quantile for unassigned maps");
  analyze->add_option("--report", an_args.report, "Report path (default DIR/report.txt)");
  analyze->add_option("--format", an_args.format, "nii, pair or analyze for the masks");

  ExportArgs ex_args;
  auto* exp = app.add_subcommand("export", "Write a slice image or a time-course plot");
  exp->add_option("--input", ex_args.input, "Volume to slice");
  exp->add_option("--axis", ex_args.axis, "axial, coronal or sagittal");
  exp->add_option("--slice", ex_args.slice, "Slice index (default: middle)");
  exp->add_option("--frame", ex_args.frame, "Frame of a 4D volume");
  exp->add_option("--overlay", ex_args.overlay, "Mask drawn over the slice");
  exp->add_flag("--diverging", ex_args.diverging, "Signed blue-white-red colouring");
  exp->add_option("--timecourses", ex_args.timecourses, "TSV table to plot");
  exp->add_option("--column", ex_args.column, "Column name or index");
  exp->add_option("--out", ex_args.out, "Output image (.pgm or .ppm)")->required();

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(args);
    std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "tsica: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "tsica: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "tsica: " << e.what() << '\n';
    return exit_code_for(e.code());
  }

  try {
    if (*header) return cmd_header(header_args, out);
    if (*simulate) return cmd_simulate(sim_args, out);
    if (*ica) return cmd_ica(ica_args, out);
    if (*analyze) return cmd_analyze(an_args, out, err);
    if (*exp) return cmd_export(ex_args, out);
  } catch (const UsageError& e) {
    err << "tsica: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "tsica: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "tsica: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}

}  // namespace tsica::cli
