// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "safeml/datasets.hpp"
#include "safeml/distances.hpp"
#include "safeml/error_bound.hpp"
#include "safeml/harness.hpp"
#include "safeml/monitor.hpp"
#include "safeml/random.hpp"
#include "safeml/stats.hpp"
#include "test_util.hpp"

namespace {

namespace fs = std::filesystem;
using safeml::Algorithm;
using safeml::Ecdf;
using safeml::Measure;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

constexpr std::size_t ksd = safeml::index_of(Measure::KSD);
constexpr std::size_t wd = safeml::index_of(Measure::WD);

// --- 1 -----------------------------------------------------------------------

Outcome distance_oracle() {
  oracle::SampleGen gen(1001);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto a = gen.sample(2, 50);
    const auto b = gen.sample(2, 50);
    const auto d = safeml::all_distances(Ecdf(a), Ecdf(b));
    const double expected[] = {oracle::ks(a, b), oracle::kuiper(a, b), oracle::anderson_darling(a, b),
                               oracle::wasserstein(a, b), oracle::wad(a, b)};
    for (Measure m : safeml::kAllMeasures) {
      worst = std::max(worst, std::abs(d[safeml::index_of(m)].value - expected[safeml::index_of(m)]));
    }
  }
  return {worst <= 1e-9, fmt("max |library - brute force| = %.3g over 1000 pairs x 5 measures", worst)};
}

// --- 2 -----------------------------------------------------------------------

Outcome distance_axioms() {
  oracle::SampleGen gen(1002);
  constexpr double tol = 1e-9;
  constexpr int cases = 500;
  std::map<std::string, int> failures;
  auto values = [](const std::vector<double>& a, const std::vector<double>& b) {
    return safeml::all_distances(Ecdf(a), Ecdf(b));
  };
  for (int i = 0; i < cases; ++i) {
    const auto a = gen.sample();
    const auto b = gen.sample();
    const auto ab = values(a, b);
    const auto ba = values(b, a);
    const auto aa = values(a, a);
    for (std::size_t m = 0; m < safeml::kMeasureCount; ++m) {
      if (std::abs(aa[m].value) > tol) ++failures["identity"];
      if (std::abs(ab[m].value - ba[m].value) > tol) ++failures["symmetry"];
    }
    const double ks = ab[ksd].value;
    const double kuiper = ab[safeml::index_of(Measure::Kuiper)].value;
    if (ks > kuiper + tol || kuiper > 2.0 * ks + tol) ++failures["ks-kuiper"];

    const double c = gen.uniform(-10.0, 10.0);
    std::vector<double> shifted;
    for (double v : a) shifted.push_back(v + c);
    if (std::abs(values(a, shifted)[wd].value - std::abs(c)) > tol) ++failures["translation"];

    std::vector<double> ta;
    std::vector<double> tb;
    for (double v : a) ta.push_back(std::exp(0.3 * v) + v);
    for (double v : b) tb.push_back(std::exp(0.3 * v) + v);
    const auto t = values(ta, tb);
    for (Measure m : {Measure::KSD, Measure::Kuiper, Measure::ADD}) {
      const auto k = safeml::index_of(m);
      if (std::abs(t[k].value - ab[k].value) > tol) ++failures["monotone"];
    }
  }
  int total = 0;
  std::string detail = fmt("%d cases per property", cases);
  for (const auto& [name, n] : failures) {
    total += n;
    detail += "; " + name + " failures " + std::to_string(n);
  }
  return {total == 0, detail};
}

// --- 3 -----------------------------------------------------------------------

safeml::GaussianSummary gauss1d(double mu, double var) {
  safeml::GaussianSummary s;
  s.mean = Eigen::VectorXd::Constant(1, mu);
  s.cov = Eigen::MatrixXd::Constant(1, 1, var);
  s.count = 100;
  return s;
}

Outcome chernoff_bound() {
  const auto a = gauss1d(0.0, 1.0);
  const auto b = gauss1d(2.0, 1.0);
  const double theta = safeml::theta(0.5, a, b);
  const double p_error = safeml::chernoff_bound({0.5, 0.5, a, b, 0.5}).p_error;
  const double theta_dev = std::abs(theta - 0.5);
  const double p_dev = std::abs(p_error - 0.5 * std::exp(-0.5));
  double margin = 1.0;
  for (double dmu : {0.0, 0.5, 1.0, 2.0, 4.0}) {
    for (double sd : {0.5, 0.75, 1.0, 1.5, 2.0}) {
      const double bound = safeml::chernoff_bound({0.5, 0.5, a, gauss1d(dmu, sd * sd), 0.5}).p_error;
      margin = std::min(margin, bound - oracle::bayes_error(0.0, 1.0, dmu, sd));
    }
  }
  const bool ok = theta_dev <= 1e-12 && p_dev <= 1e-12 && margin >= -1e-6;
  return {ok, fmt("|theta-0.5| = %.2g, |p_error-0.5e^-0.5| = %.2g, min(bound-Bayes) over 5x5 grid = %.3g", theta_dev,
                  p_dev, margin)};
}

// --- 4 -----------------------------------------------------------------------

Outcome xor_benchmark() {
  bool ok = true;
  std::string detail;
  double knn_lo = 1.0, cart_lo = 1.0, lda_lo = 1.0, lda_hi = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto data = safeml::generate("xor", safeml::kDefaultBenchmarkSize, std::nullopt, seed);
    safeml::BenchmarkConfig config;
    config.seed = seed;
    config.hyper.seed = seed;
    const auto result = safeml::run_benchmark(data, config);
    for (const auto& s : result.summary) {
      if (s.classifier == Algorithm::KNN || s.classifier == Algorithm::CART) {
        ok = ok && s.min_true_accuracy >= 0.92 && s.min_true_accuracy <= 1.0;
        (s.classifier == Algorithm::KNN ? knn_lo : cart_lo) =
            std::min(s.classifier == Algorithm::KNN ? knn_lo : cart_lo, s.min_true_accuracy);
      }
      if (s.classifier == Algorithm::LDA) {
        ok = ok && s.average_true_accuracy >= 0.45 && s.average_true_accuracy <= 0.70;
        lda_lo = std::min(lda_lo, s.average_true_accuracy);
        lda_hi = std::max(lda_hi, s.average_true_accuracy);
      }
    }
  }
  return {ok, fmt("seeds 1-5: lowest KNN MTA %.4f, lowest CART MTA %.4f, LDA ATA in [%.4f, %.4f]", knn_lo, cart_lo,
                  lda_lo, lda_hi)};
}

// --- 5 -----------------------------------------------------------------------

Outcome drift_response() {
  std::vector<double> deltas;
  for (int k = 0; k <= 10; ++k) deltas.push_back(0.2 * k);
  const auto make = [](std::uint64_t s) { return safeml::gen_xor(2000, safeml::kDefaultXorNoise, s); };
  const auto points = safeml::drift_sweep(make, deltas, 30, Algorithm::KNN, 0.7, {}, 2024);
  std::vector<double> distance;
  std::vector<double> accuracy;
  std::vector<double> mean_by_delta(deltas.size(), 0.0);
  for (const auto& p : points) {
    distance.push_back(p.record.distance[ksd]);
    accuracy.push_back(p.record.true_accuracy);
    const auto k = static_cast<std::size_t>(std::lround(p.delta / 0.2));
    mean_by_delta[k] += p.record.distance[ksd] / 30.0;
  }
  const double r = safeml::pearson(distance, accuracy).r;
  const double rho = safeml::spearman(deltas, mean_by_delta).r;
  return {r <= -0.7 && rho >= 0.99,
          fmt("%zu runs: Pearson r(KSD, accuracy) = %.4f, Spearman rho(delta, mean KSD) = %.4f", points.size(), r,
              rho)};
}

// --- 6 -----------------------------------------------------------------------

Eigen::MatrixXd resample(const Eigen::MatrixXd& x, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Eigen::Index> pick(0, x.rows() - 1);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), x.cols());
  for (Eigen::Index i = 0; i < out.rows(); ++i) out.row(i) = x.row(pick(rng));
  return out;
}

safeml::MonitorVerdict feed(safeml::Monitor& m, const Eigen::MatrixXd& rows) {
  safeml::MonitorVerdict last;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const Eigen::RowVectorXd r = rows.row(i);
    last = m.observe(std::span<const double>(r.data(), static_cast<std::size_t>(r.size())));
  }
  return last;
}

Outcome monitor_end_to_end() {
  int trusted = 0;
  int intervene = 0;
  double lowest = 1.0;
  safeml::MonitorConfig config;
  config.buffer_size = 500;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const std::uint64_t seed = safeml::derive_seed(6, s);
    const auto raw = safeml::gen_xor(2000, safeml::kDefaultXorNoise, seed);
    auto scaler = safeml::fit_scaler(raw);
    const auto scaled = safeml::apply_scaler(scaler, raw);
    auto model = safeml::fit(Algorithm::KNN, {}, scaled);
    const auto profile = std::make_shared<const safeml::TrainingProfile>(
        safeml::build_profile(scaled, std::move(model), std::move(scaler)));

    safeml::Monitor same(profile, config);
    const auto v = feed(same, resample(raw.features, 500, seed + 1));
    const double est = v.estimated_accuracy(Measure::KSD);
    lowest = std::min(lowest, est);
    trusted += v.state == safeml::MonitorState::Trusted && est >= 0.9 ? 1 : 0;

    const Eigen::RowVectorXd sigma = safeml::summarize(raw.features).cov.diagonal().cwiseSqrt().transpose();
    Eigen::MatrixXd shifted = resample(raw.features, 500, seed + 2);
    shifted.rowwise() += 5.0 * sigma;
    safeml::Monitor drifted(profile, config);
    intervene += feed(drifted, shifted).state == safeml::MonitorState::Intervene ? 1 : 0;
  }
  return {trusted >= 95 && intervene == 100,
          fmt("resample: %d/100 Trusted with estimate >= 0.9 (lowest estimate %.4f); +5 sigma: %d/100 Intervene",
              trusted, lowest, intervene)};
}

// --- 7 -----------------------------------------------------------------------

double mann_whitney_u(const std::vector<double>& x, const std::vector<double>& y) {
  double u = 0.0;
  for (double a : x) {
    for (double b : y) u += a > b ? 1.0 : (a == b ? 0.5 : 0.0);
  }
  return u;
}

Outcome holdout_study() {
  const auto data = safeml::gen_circle(2000, 0.05, 7);
  safeml::HoldoutConfig config;
  config.iterations = 100;
  config.seed = 7;
  config.shift = [](safeml::LabeledDataset& test, std::size_t i) {
    if (i % 2 == 0) return false;
    safeml::shift_features(test, 0.15);
    return true;
  };
  const auto study = safeml::iterate_holdout(data, config);
  testutil::TempDir dir("acceptance-holdout");
  safeml::write_holdout_reports(dir.path(), "circle", 7, study, config);
  const auto csv = testutil::read_file(dir.path() / "iterate_circle_7.csv");
  const auto rows = std::count(csv.begin(), csv.end(), '\n');

  std::vector<double> pooled;
  std::vector<bool> is_shifted;
  for (const auto& r : study.records) {
    pooled.push_back(r.distance[ksd]);
    is_shifted.push_back(r.shifted);
  }
  auto split = [&](const std::vector<bool>& mask) {
    std::pair<std::vector<double>, std::vector<double>> out;
    for (std::size_t i = 0; i < pooled.size(); ++i) (mask[i] ? out.first : out.second).push_back(pooled[i]);
    return out;
  };
  const auto [shifted, plain] = split(is_shifted);
  const double observed = mann_whitney_u(shifted, plain);
  std::mt19937_64 rng(77);
  std::vector<bool> perm = is_shifted;
  int extreme = 0;
  for (int i = 0; i < 10000; ++i) {
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto [a, b] = split(perm);
    extreme += mann_whitney_u(a, b) >= observed ? 1 : 0;
  }
  const double p = (1.0 + extreme) / 10001.0;
  const double med_shifted = safeml::five_number_summary(shifted).median;
  const double med_plain = safeml::five_number_summary(plain).median;
  const bool ok = rows == 6 && study.records.size() == 100 && med_shifted > med_plain && p < 0.01;
  return {ok, fmt("box-plot CSV rows %ld; median KSD shifted %.4f vs unshifted %.4f; permutation p = %.2g", rows - 1,
                  med_shifted, med_plain, p)};
}

// --- 8 -----------------------------------------------------------------------

Outcome sliding_trace() {
  constexpr std::size_t window = 1500;
  constexpr std::size_t switch_at = 10000;
  const auto stream = safeml::gen_regime_stream(20000, 4, switch_at, 2.0, 8);
  const auto trace = safeml::sliding_window_trace(stream, window);
  std::vector<double> pre_ksd;
  std::vector<double> pre_wd;
  const safeml::TraceRecord* at_switch = nullptr;
  for (const auto& t : trace) {
    if (t.start + window <= switch_at) {
      pre_ksd.push_back(t.distance[ksd]);
      pre_wd.push_back(t.distance[wd]);
    } else if (t.start <= switch_at) {
      at_switch = &t;
    }
  }
  if (at_switch == nullptr || pre_ksd.empty()) return {false, "no switch window in trace"};
  const double rk = at_switch->distance[ksd] / safeml::five_number_summary(pre_ksd).median;
  const double rw = at_switch->distance[wd] / safeml::five_number_summary(pre_wd).median;
  return {rk >= 5.0 && rw >= 5.0,
          fmt("switch window starts at %zu; ratio to pre-switch median: KSD %.2f, WD %.2f", at_switch->start, rk, rw)};
}

// --- 9 -----------------------------------------------------------------------

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

int run_shell(const std::string& command) {
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

Outcome cli_determinism() {
  testutil::TempDir root("acceptance-cli");
  const std::string cli = quote(SAFEML_CLI_PATH);
  std::vector<std::map<std::string, std::uint64_t>> hashes;
  std::string failed;
  for (int run = 0; run < 3; ++run) {
    const fs::path d = root.path() / ("run" + std::to_string(run));
    fs::create_directories(d);
    auto out = [&](const std::string& name) { return quote(d / name); };
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"generate", "generate xor --n 2000 --seed 11 -o " + out("train.csv") + " > " + out("generate.out")},
        {"generate", "generate xor --n 1000 --seed 12 -o " + out("field.csv")},
        {"train", "train --data " + out("train.csv") + " -a rf --seed 11 -o " + out("profile.json") + " > " +
                      out("train.out")},
        {"monitor", "monitor -p " + out("profile.json") + " -f " + out("field.csv") + " -n 500 > " +
                        out("verdicts.jsonl")},
        {"bench", "bench --seed 11 --out-dir " + quote(d) + " > " + out("bench.out")},
        {"iterate", "iterate --seed 11 --shift 0.3 --out-dir " + quote(d) + " > " + out("iterate.out")},
        {"correlate", "correlate -i " + out("iterate-records_xor_11.csv") + " --dataset xor --seed 11 --out-dir " +
                          quote(d) + " > " + out("correlate.out")},
        {"trace", "trace --seed 11 --out-dir " + quote(d) + " > " + out("trace.out")},
    };
    for (const auto& [name, args] : commands) {
      const int code = run_shell(cli + " " + args + " 2>/dev/null");
      if (code != 0 && !(name == "monitor" && code == 2)) failed += " " + name + "(exit " + std::to_string(code) + ")";
    }
    std::map<std::string, std::uint64_t> h;
    for (const auto& entry : fs::directory_iterator(d)) {
      h[entry.path().filename().string()] = fnv1a(testutil::read_file(entry.path()));
    }
    hashes.push_back(std::move(h));
  }
  if (!failed.empty()) return {false, "commands failed:" + failed};
  std::size_t differing = 0;
  for (const auto& [file, h] : hashes[0]) {
    for (int run = 1; run < 3; ++run) {
      const auto it = hashes[run].find(file);
      if (it == hashes[run].end() || it->second != h) ++differing;
    }
  }
  const bool same_sets = hashes[0].size() == hashes[1].size() && hashes[0].size() == hashes[2].size();
  return {differing == 0 && same_sets && hashes[0].size() >= 20,
          fmt("8 commands x 3 runs; %zu output files per run; %zu mismatching hashes", hashes[0].size(), differing)};
}

// --- 10 ----------------------------------------------------------------------

Outcome csv_robustness() {
  const fs::path data_dir = SAFEML_TEST_DATA_DIR;
  const auto loaded = safeml::load_csv(data_dir / "cicids_fixture.csv", {});
  const auto& d = loaded.data;
  std::vector<std::size_t> counts(d.num_classes(), 0);
  bool dense = true;
  for (auto y : d.labels) {
    dense = dense && y >= 0 && static_cast<std::size_t>(y) < counts.size();
    if (dense) ++counts[static_cast<std::size_t>(y)];
  }
  for (auto c : counts) dense = dense && c > 0;
  const std::vector<std::string> names = {"BENIGN", "DoS Hulk", "DoS slowloris", "DoS Slowhttptest"};
  const std::vector<std::size_t> expected_counts = {25, 8, 6, 4};
  const bool load_ok = loaded.rows_read == 50 && loaded.rows_dropped == 7 && d.size() == 43 && dense &&
                       d.class_names == names && counts == expected_counts && d.dim() == 5;

  testutil::TempDir tmp("acceptance-csv");
  const int code = run_shell(quote(SAFEML_CLI_PATH) + " train --data " + quote(data_dir / "malformed_header.csv") +
                             " --label Label -o " + quote(tmp.path() / "p.json") + " > /dev/null 2>&1");
  return {load_ok && code == 3, fmt("rows read %zu, dropped %zu, kept %zu, %zu dense classes; malformed header exit %d",
                                    loaded.rows_read, loaded.rows_dropped, d.size(), d.num_classes(), code)};
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;  // 0: no runtime limit
  std::function<Outcome()> check;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "distance oracle equivalence", 10.0, distance_oracle},
      {2, "distance axioms", 0.0, distance_axioms},
      {3, "Chernoff bound correctness", 5.0, chernoff_bound},
      {4, "XOR benchmark band", 60.0, xor_benchmark},
      {5, "drift response", 120.0, drift_response},
      {6, "monitor end to end", 60.0, monitor_end_to_end},
      {7, "hold-out study", 120.0, holdout_study},
      {8, "sliding-window trace", 30.0, sliding_trace},
      {9, "CLI determinism", 0.0, cli_determinism},
      {10, "CSV robustness", 0.0, csv_robustness},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.budget_seconds == 0.0 || seconds < c.budget_seconds;
    const bool pass = o.pass && in_time;
    failures += pass ? 0 : 1;
    std::string timing = fmt("%.2f s", seconds);
    if (c.budget_seconds > 0.0) timing += fmt(", limit %.0f s", c.budget_seconds);
    std::printf("%s [%d] %s: %s (%s)\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), timing.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
