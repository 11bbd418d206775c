// qmeasure: reproducible experiment runner for random quantum-correlation
// ensembles. Subcommands: sample, entropy-scan, compare, metric-check.
// Exit codes: 0 success, 2 usage error, 3 statistical failure, 4 I/O error.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "qmeasure/analytic.hpp"
#include "qmeasure/linalg.hpp"
#include "qmeasure/rng.hpp"
#include "qmeasure/samplers.hpp"
#include "qmeasure/stats.hpp"

namespace {

using json = nlohmann::json;
using namespace qmeasure;

constexpr int kSchemaVersion = 1;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string format_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (!std::cout) throw IoError("failed writing to stdout");
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

/// Runs fn(i) for i in [0, n) across `workers` threads on contiguous
/// ranges. Each sample owns the stream with stream_id = i, so the result
/// is identical for any worker count.
template <typename Fn>
void parallel_samples(std::int64_t n, int workers, const Fn& fn) {
  workers = std::max(1, std::min<int>(workers, static_cast<int>(std::min<std::int64_t>(n, 64))));
  if (workers == 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> threads;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const std::int64_t chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const std::int64_t lo = w * chunk;
    const std::int64_t hi = std::min<std::int64_t>(n, lo + chunk);
    if (lo >= hi) break;
    threads.emplace_back([lo, hi, &fn, &first_error, &error_mutex] {
      try {
        for (std::int64_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct CommonOptions {
  std::uint64_t seed = 0;
  int workers = 1;
  std::string out;
  std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool with_format = true) {
  cmd->add_option("--seed", opts.seed, "Master seed (fallback: QMEASURE_DEFAULT_SEED)")
      ->envname("QMEASURE_DEFAULT_SEED");
  cmd->add_option("--workers", opts.workers, "Worker threads")->check(CLI::Range(1, 256));
  cmd->add_option("--out", opts.out, "Output path ('-' or empty: stdout)");
  if (with_format) {
    cmd->add_option("--format", opts.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
  }
  cmd->set_config("--config", "", "Flat key=value config file (flags win)");
}

// ---------------------------------------------------------------------------
// sample

struct SampleRow {
  std::vector<double> lambdas;
  double entropy_bits = 0.0;
  std::optional<BlochVector> bloch;
};

std::vector<SampleRow> generate_rows(const EnsembleSpec& spec, std::int64_t n,
                                     std::uint64_t seed, int workers) {
  std::vector<SampleRow> rows(static_cast<size_t>(n));
  parallel_samples(n, workers, [&](std::int64_t i) {
    RngStream rng(seed, static_cast<std::uint64_t>(i));
    EnsembleSample sample = draw_sample(spec, rng);
    SampleRow& row = rows[static_cast<size_t>(i)];
    row.lambdas = sample.spectrum.values();
    row.entropy_bits = entanglement_entropy_bits(sample.spectrum);
    row.bloch = sample.bloch;
  });
  return rows;
}

std::vector<std::string> sample_columns(const EnsembleSpec& spec) {
  std::vector<std::string> cols;
  for (int k = 1; k <= spec.spectrum_size(); ++k) {
    cols.push_back("lambda_" + std::to_string(k));
  }
  cols.emplace_back("entropy_bits");
  if (spec.has_bloch()) {
    cols.emplace_back("bloch_x");
    cols.emplace_back("bloch_y");
    cols.emplace_back("bloch_z");
  }
  return cols;
}

std::string rows_to_csv(const EnsembleSpec& spec, const std::vector<SampleRow>& rows,
                        std::uint64_t seed, int workers) {
  std::string text;
  text += "# ensemble=" + spec.str() + " seed=" + std::to_string(seed) +
          " generator=" + RngStream::generator_name() + " stream=per-sample n=" +
          std::to_string(rows.size()) + " workers=" + std::to_string(workers) +
          " schema_version=" + std::to_string(kSchemaVersion) + "\n";
  const auto cols = sample_columns(spec);
  for (size_t c = 0; c < cols.size(); ++c) {
    text += (c ? "," : "") + cols[c];
  }
  text += "\n";
  for (const SampleRow& row : rows) {
    bool first = true;
    for (double l : row.lambdas) {
      text += (first ? "" : ",") + format_g17(l);
      first = false;
    }
    text += "," + format_g17(row.entropy_bits);
    if (row.bloch) {
      text += "," + format_g17(row.bloch->x);
      text += "," + format_g17(row.bloch->y);
      text += "," + format_g17(row.bloch->z);
    }
    text += "\n";
  }
  return text;
}

std::string rows_to_json(const EnsembleSpec& spec, const std::vector<SampleRow>& rows,
                         std::uint64_t seed, int workers) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "samples";
  j["metadata"] = {{"ensemble", spec.str()},
                   {"seed", seed},
                   {"generator", RngStream::generator_name()},
                   {"stream", "per-sample"},
                   {"n", rows.size()},
                   {"workers", workers},
                   {"timestamp", utc_timestamp()}};
  j["columns"] = sample_columns(spec);
  json data = json::array();
  for (const SampleRow& row : rows) {
    json r = json::array();
    for (double l : row.lambdas) r.push_back(l);
    r.push_back(row.entropy_bits);
    if (row.bloch) {
      r.push_back(row.bloch->x);
      r.push_back(row.bloch->y);
      r.push_back(row.bloch->z);
    }
    data.push_back(std::move(r));
  }
  j["rows"] = std::move(data);
  return j.dump(2) + "\n";
}

int cmd_sample(const std::string& ensemble_text, std::int64_t n, const CommonOptions& opts) {
  const EnsembleSpec spec = EnsembleSpec::parse(ensemble_text);
  const auto rows = generate_rows(spec, n, opts.seed, opts.workers);
  const std::string text = (opts.format == "json")
                               ? rows_to_json(spec, rows, opts.seed, opts.workers)
                               : rows_to_csv(spec, rows, opts.seed, opts.workers);
  write_text(opts.out, text);
  return 0;
}

// ---------------------------------------------------------------------------
// entropy-scan

std::vector<int> parse_n_list(const std::string& text) {
  std::vector<int> out;
  size_t pos = 0;
  while (pos <= text.size()) {
    const size_t comma = std::min(text.find(',', pos), text.size());
    const std::string piece = text.substr(pos, comma - pos);
    if (piece.empty()) throw std::invalid_argument("bad --n-list entry");
    const size_t dots = piece.find("..");
    if (dots != std::string::npos) {
      const int lo = std::stoi(piece.substr(0, dots));
      const int hi = std::stoi(piece.substr(dots + 2));
      if (lo > hi) throw std::invalid_argument("bad --n-list range " + piece);
      for (int v = lo; v <= hi; ++v) out.push_back(v);
    } else {
      out.push_back(std::stoi(piece));
    }
    pos = comma + 1;
    if (comma == text.size()) break;
  }
  if (out.empty()) throw std::invalid_argument("--n-list is empty");
  return out;
}

int cmd_entropy_scan(int m, const std::string& n_list_text, std::int64_t n_samples,
                     const CommonOptions& opts) {
  if (m < 1) throw std::invalid_argument("--m must be >= 1");
  if (n_samples < 2) throw std::invalid_argument("--n must be >= 2");
  const std::vector<int> n_list = parse_n_list(n_list_text);

  struct ScanRow {
    int n;
    double analytic, mc_mean, mc_stderr, z;
  };
  std::vector<ScanRow> table;

  for (size_t idx = 0; idx < n_list.size(); ++idx) {
    const int n = n_list[idx];
    if (n < 1) throw std::invalid_argument("--n-list entries must be >= 1");
    const double analytic = avg_entropy_bits(std::min(m, n), std::max(m, n));

    std::vector<double> entropies(static_cast<size_t>(n_samples));
    const CompositeShape shape(m, n);
    const std::uint64_t stream_base =
        static_cast<std::uint64_t>(idx) * static_cast<std::uint64_t>(n_samples);
    parallel_samples(n_samples, opts.workers, [&](std::int64_t i) {
      RngStream rng(opts.seed, stream_base + static_cast<std::uint64_t>(i));
      const DensityMatrix rho = sample_induced(shape, rng);
      entropies[static_cast<size_t>(i)] =
          entanglement_entropy_bits(eig_hermitian(rho).spectrum);
    });
    const auto [mean, stderr_] = mean_with_stderr(entropies);
    const double z = (stderr_ > 0.0) ? (mean - analytic) / stderr_ : 0.0;
    table.push_back({n, analytic, mean, stderr_, z});
  }

  std::string text;
  if (opts.format == "json") {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "entropy-scan";
    j["metadata"] = {{"m", m},
                     {"n_samples", n_samples},
                     {"seed", opts.seed},
                     {"generator", RngStream::generator_name()},
                     {"workers", opts.workers},
                     {"timestamp", utc_timestamp()}};
    json rows = json::array();
    for (const auto& row : table) {
      rows.push_back({{"n", row.n},
                      {"analytic_bits", row.analytic},
                      {"mc_mean_bits", row.mc_mean},
                      {"mc_stderr_bits", row.mc_stderr},
                      {"z", row.z}});
    }
    j["rows"] = std::move(rows);
    text = j.dump(2) + "\n";
  } else {
    text += "# m=" + std::to_string(m) + " n_samples=" + std::to_string(n_samples) +
            " seed=" + std::to_string(opts.seed) +
            " generator=" + RngStream::generator_name() +
            " schema_version=" + std::to_string(kSchemaVersion) + "\n";
    text += "n,analytic_bits,mc_mean_bits,mc_stderr_bits,z\n";
    for (const auto& row : table) {
      text += std::to_string(row.n) + "," + format_g17(row.analytic) + "," +
              format_g17(row.mc_mean) + "," + format_g17(row.mc_stderr) + "," +
              format_g17(row.z) + "\n";
    }
  }
  write_text(opts.out, text);
  return 0;
}

// ---------------------------------------------------------------------------
// compare

std::function<double(double)> radial_cdf_for(const std::string& density_id) {
  if (density_id == "hs") return [](double r) { return radial_cdf_hs(r); };
  if (density_id == "bures") return [](double r) { return radial_cdf_bures(r); };
  if (density_id.rfind("induced:", 0) == 0) {
    const int n = std::stoi(density_id.substr(8));
    if (n < 2) throw std::invalid_argument("induced radial law requires n >= 2");
    return [n](double r) { return radial_cdf_induced(r, n); };
  }
  throw std::invalid_argument("unknown density id '" + density_id +
                              "' (expected hs | bures | induced:<n>)");
}

EigenDensity simplex_density_for(const std::string& density_id, int m) {
  if (density_id == "hs") return EigenDensity::hilbert_schmidt(m);
  if (density_id == "bures") return EigenDensity::bures(m);
  if (density_id.rfind("induced:", 0) == 0) {
    const int n = std::stoi(density_id.substr(8));
    return EigenDensity::induced(std::min(m, n), std::max(m, n));
  }
  throw std::invalid_argument("unknown density id '" + density_id +
                              "' (expected hs | bures | induced:<n>)");
}

int cmd_compare(const std::string& ensemble_text, const std::string& density_id,
                std::int64_t n, int bins, const CommonOptions& opts) {
  const EnsembleSpec spec = EnsembleSpec::parse(ensemble_text);
  const int m = spec.spectrum_size();
  if (m != 2 && m != 3) {
    throw std::invalid_argument("compare supports ensembles with 2- or 3-point spectra");
  }
  const auto rows = generate_rows(spec, n, opts.seed, opts.workers);

  GofReport report;
  if (m == 2) {
    std::vector<double> r_values(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
      r_values[i] = rows[i].lambdas[0] - rows[i].lambdas[1];
    }
    report = ks_test(r_values, radial_cdf_for(density_id));
  } else {
    const EigenDensity density = simplex_density_for(density_id, m);
    if (density.dim() != m) {
      throw std::invalid_argument("density '" + density_id + "' has dimension " +
                                  std::to_string(density.dim()) + ", ensemble needs " +
                                  std::to_string(m));
    }
    std::vector<Spectrum> spectra;
    spectra.reserve(rows.size());
    for (const auto& row : rows) spectra.emplace_back(row.lambdas);
    report = chi_square_simplex(spectra, density, bins > 0 ? bins : 12);
  }

  json j = json::parse(report.to_json());
  j["metadata"] = {{"ensemble", spec.str()},
                   {"density", density_id},
                   {"seed", opts.seed},
                   {"generator", RngStream::generator_name()},
                   {"workers", opts.workers},
                   {"timestamp", utc_timestamp()}};
  write_text(opts.out, j.dump(2) + "\n");
  return report.pass ? 0 : 3;
}

// ---------------------------------------------------------------------------
// metric-check

int cmd_metric_check(std::int64_t trials, const std::string& dims_text,
                     const CommonOptions& opts) {
  if (trials < 1) throw std::invalid_argument("--trials must be >= 1");
  const std::vector<int> dims = parse_n_list(dims_text);
  constexpr double scale = 1e-4;
  constexpr double tolerance = 1e-6;

  double max_rel_error = 0.0;
  json per_dim = json::array();
  for (size_t d_idx = 0; d_idx < dims.size(); ++d_idx) {
    const int d = dims[d_idx];
    if (d < 2 || d > 8) throw std::invalid_argument("--dims entries must be in [2, 8]");
    double dim_max = 0.0;
    for (std::int64_t t = 0; t < trials; ++t) {
      RngStream rng(opts.seed,
                    (static_cast<std::uint64_t>(d_idx) << 32) + static_cast<std::uint64_t>(t));
      const DensityMatrix rho = sample_induced(CompositeShape(d, d), rng);
      const SpectralDecomposition eig = eig_hermitian(rho);

      MetricPerturbation pert;
      pert.dlambda.resize(d);
      pert.dx = Eigen::MatrixXd::Zero(d, d);
      pert.dy = Eigen::MatrixXd::Zero(d, d);
      double mean = 0.0;
      for (int j = 0; j < d; ++j) {
        pert.dlambda(j) = rng.next_gaussian();
        mean += pert.dlambda(j);
      }
      mean /= d;
      for (int j = 0; j < d; ++j) pert.dlambda(j) = scale * (pert.dlambda(j) - mean);
      for (int j = 0; j < d; ++j) {
        for (int k = j + 1; k < d; ++k) {
          pert.dx(j, k) = scale * rng.next_gaussian();
          pert.dy(j, k) = scale * rng.next_gaussian();
        }
      }

      std::vector<double> lambda(eig.spectrum.values());
      const Matrix drho = perturbation_matrix(eig.unitary, lambda, pert);
      const double direct = bures_line_element(rho, drho);
      const double decomposed = bures_quadratic_form(lambda, pert);
      if (decomposed <= 0.0 || !std::isfinite(direct) || !std::isfinite(decomposed)) {
        continue;  // singular draw; nothing to compare at this perturbation
      }
      dim_max = std::max(dim_max, std::abs(direct - decomposed) / decomposed);
    }
    per_dim.push_back({{"dim", d}, {"max_rel_error", dim_max}});
    max_rel_error = std::max(max_rel_error, dim_max);
  }

  const bool pass = max_rel_error <= tolerance;
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "metric-check";
  j["trials"] = trials;
  j["scale"] = scale;
  j["tolerance"] = tolerance;
  j["max_rel_error"] = max_rel_error;
  j["per_dim"] = std::move(per_dim);
  j["pass"] = pass;
  j["metadata"] = {{"seed", opts.seed},
                   {"generator", RngStream::generator_name()},
                   {"timestamp", utc_timestamp()}};
  write_text(opts.out, j.dump(2) + "\n");
  return pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random quantum-correlation ensembles: samplers and analytic cross-checks"};
  app.require_subcommand(1);

  std::string ensemble;
  std::string density;
  std::string n_list = "2,3,5,10";
  std::string dims = "2,3";
  std::int64_t n = 1000;
  std::int64_t trials = 1000;
  int m = 2;
  int bins = 0;

  CommonOptions sample_opts, scan_opts, compare_opts, metric_opts;

  CLI::App* sample = app.add_subcommand("sample", "Sample an ensemble, write one row per draw");
  sample->add_option("--ensemble", ensemble,
                     "induced:M,N | bures-qubit | hs-qubit | simplex:M,ID")
      ->required();
  sample->add_option("--n", n, "Number of samples")->check(CLI::PositiveNumber);
  add_common(sample, sample_opts);

  CLI::App* scan = app.add_subcommand("entropy-scan",
                                      "Average entanglement entropy: analytic vs Monte-Carlo");
  scan->add_option("--m", m, "System dimension M");
  scan->add_option("--n-list", n_list, "Ancilla dimensions, e.g. 2,3,5 or 2..10");
  scan->add_option("--n", n, "Samples per point")->check(CLI::PositiveNumber);
  add_common(scan, scan_opts);

  CLI::App* compare = app.add_subcommand("compare",
                                         "Goodness-of-fit of an ensemble against a density");
  compare->add_option("--ensemble", ensemble, "Ensemble to sample")->required();
  compare->add_option("--density", density, "hs | bures | induced:<n>")->required();
  compare->add_option("--n", n, "Number of samples")->check(CLI::PositiveNumber);
  compare->add_option("--bins", bins, "Chi-square bins (m = 3 grid size); 0 = auto");
  add_common(compare, compare_opts);

  CLI::App* metric = app.add_subcommand("metric-check",
                                        "Line-element identity check at perturbation scale 1e-4");
  metric->add_option("--trials", trials, "Trials per dimension")->check(CLI::PositiveNumber);
  metric->add_option("--dims", dims, "Dimensions to test, e.g. 2,3");
  add_common(metric, metric_opts, /*with_format=*/false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (sample->parsed()) return cmd_sample(ensemble, n, sample_opts);
    if (scan->parsed()) return cmd_entropy_scan(m, n_list, n, scan_opts);
    if (compare->parsed()) return cmd_compare(ensemble, density, n, bins, compare_opts);
    if (metric->parsed()) return cmd_metric_check(trials, dims, metric_opts);
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 4;
  } catch (const EfficiencyError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
