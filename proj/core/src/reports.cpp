#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "safeml/error.hpp"
#include "safeml/harness.hpp"

namespace safeml {

using json = nlohmann::ordered_json;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string num(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%" PRIu64, v);
  return buf;
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string{}; }

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json measures_json(const MeasureArray& values) {
  json out = json::object();
  for (Measure m : kAllMeasures) out[std::string(to_string(m))] = values[index_of(m)];
  return out;
}

std::string measure_header(std::string_view prefix = {}) {
  std::string out;
  for (Measure m : kAllMeasures) {
    out += ',';
    out += prefix;
    out += to_string(m);
  }
  return out;
}

std::string measure_cells(const MeasureArray& values) {
  std::string out;
  for (double v : values) out += ',' + num(v);
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write to '" + path.string() + "' failed");
}

json record_json(const BenchmarkRecord& r) {
  return {{"classifier", std::string(to_string(r.classifier))},
          {"index", r.index},
          {"seed", r.seed},
          {"shifted", r.shifted},
          {"true_accuracy", r.true_accuracy},
          {"kappa", r.kappa},
          {"bhattacharyya_p_correct", opt_json(r.bhattacharyya)},
          {"distance", measures_json(r.distance)},
          {"estimated_accuracy", measures_json(r.estimated)}};
}

json header_json(std::string_view experiment, std::string_view dataset, std::uint64_t seed) {
  return {{"experiment", experiment}, {"dataset", dataset}, {"seed", seed}};
}

json kappa_json(const KappaOverrides& overrides) {
  MeasureArray k = default_kappa();
  for (std::size_t m = 0; m < kMeasureCount; ++m) {
    if (overrides[m]) k[m] = *overrides[m];
  }
  return measures_json(k);
}

std::filesystem::path report_path(const std::filesystem::path& dir, std::string_view experiment,
                                  std::string_view dataset, std::uint64_t seed, std::string_view ext) {
  return dir / (report_stem(experiment, dataset, seed) + std::string(ext));
}

}  // namespace

std::string report_stem(std::string_view experiment, std::string_view dataset, std::uint64_t seed) {
  return std::string(experiment) + "_" + std::string(dataset) + "_" + num(seed);
}

std::vector<std::filesystem::path> write_benchmark_reports(const std::filesystem::path& dir,
                                                           std::string_view dataset, std::uint64_t seed,
                                                           const BenchmarkResult& result,
                                                           const BenchmarkConfig& config) {
  std::string table = "classifier,runs,MTA,ATA,max_accuracy,mean_kappa" + measure_header() + ",BD\n";
  json summary = json::array();
  for (const auto& s : result.summary) {
    table += std::string(to_string(s.classifier)) + ',' + num(std::uint64_t{s.runs}) + ',' +
             num(s.min_true_accuracy) + ',' + num(s.average_true_accuracy) + ',' + num(s.max_true_accuracy) + ',' +
             num(s.mean_kappa) + measure_cells(s.mean_estimated) + ',' + opt_num(s.mean_bhattacharyya) + '\n';
    summary.push_back({{"classifier", std::string(to_string(s.classifier))},
                       {"runs", s.runs},
                       {"MTA", s.min_true_accuracy},
                       {"ATA", s.average_true_accuracy},
                       {"max_accuracy", s.max_true_accuracy},
                       {"mean_kappa", s.mean_kappa},
                       {"mean_estimated_accuracy", measures_json(s.mean_estimated)},
                       {"mean_bhattacharyya_p_correct", opt_json(s.mean_bhattacharyya)}});
  }

  std::string diff_table = "classifier" + measure_header() + ",BD\n";
  json differences = json::array();
  for (const auto& row : difference_table(result.records)) {
    diff_table += std::string(to_string(row.classifier)) + measure_cells(row.difference) + ',' +
                  opt_num(row.bhattacharyya) + '\n';
    differences.push_back({{"classifier", std::string(to_string(row.classifier))},
                           {"difference", measures_json(row.difference)},
                           {"bhattacharyya", opt_json(row.bhattacharyya)}});
  }

  json classifiers = json::array();
  for (Algorithm a : config.classifiers) classifiers.push_back(std::string(to_string(a)));
  json doc = header_json("bench", dataset, seed);
  doc["cv"] = config.cv.to_string();
  doc["classifiers"] = std::move(classifiers);
  doc["kappa"] = kappa_json(config.kappa);
  doc["summary"] = std::move(summary);
  doc["differences"] = std::move(differences);
  json records = json::array();
  for (const auto& r : result.records) records.push_back(record_json(r));
  doc["records"] = std::move(records);

  const std::vector<std::filesystem::path> paths = {report_path(dir, "bench", dataset, seed, ".csv"),
                                                    report_path(dir, "diff", dataset, seed, ".csv"),
                                                    report_path(dir, "bench", dataset, seed, ".json")};
  write_text(paths[0], table);
  write_text(paths[1], diff_table);
  write_text(paths[2], doc.dump(2) + '\n');
  return paths;
}

std::vector<std::filesystem::path> write_holdout_reports(const std::filesystem::path& dir, std::string_view dataset,
                                                         std::uint64_t seed, const HoldoutStudy& study,
                                                         const HoldoutConfig& config) {
  std::string quartiles = "measure,min,q1,median,q3,max\n";
  json boxes = json::object();
  for (Measure m : kAllMeasures) {
    const auto& q = study.distance_quartiles[index_of(m)];
    quartiles += std::string(to_string(m)) + ',' + num(q.min) + ',' + num(q.q1) + ',' + num(q.median) + ',' +
                 num(q.q3) + ',' + num(q.max) + '\n';
    boxes[std::string(to_string(m))] = {
        {"min", q.min}, {"q1", q.q1}, {"median", q.median}, {"q3", q.q3}, {"max", q.max}};
  }

  std::string records = "iteration,seed,shifted,true_accuracy,kappa,BD" + measure_header() +
                        measure_header("est_") + '\n';
  json rows = json::array();
  for (const auto& r : study.records) {
    records += num(std::uint64_t{r.index}) + ',' + num(r.seed) + ',' + (r.shifted ? "1" : "0") + ',' +
               num(r.true_accuracy) + ',' + num(r.kappa) + ',' + opt_num(r.bhattacharyya) +
               measure_cells(r.distance) + measure_cells(r.estimated) + '\n';
    rows.push_back(record_json(r));
  }

  json doc = header_json("iterate", dataset, seed);
  doc["classifier"] = std::string(to_string(config.classifier));
  doc["iterations"] = config.iterations;
  doc["ratio"] = config.ratio;
  doc["kappa"] = kappa_json(config.kappa);
  doc["distance_quartiles"] = std::move(boxes);
  doc["records"] = std::move(rows);

  const std::vector<std::filesystem::path> paths = {report_path(dir, "iterate", dataset, seed, ".csv"),
                                                    report_path(dir, "iterate-records", dataset, seed, ".csv"),
                                                    report_path(dir, "iterate", dataset, seed, ".json")};
  write_text(paths[0], quartiles);
  write_text(paths[1], records);
  write_text(paths[2], doc.dump(2) + '\n');
  return paths;
}

std::vector<std::filesystem::path> write_trace_reports(const std::filesystem::path& dir, std::string_view dataset,
                                                       std::uint64_t seed, std::span<const TraceRecord> trace,
                                                       std::size_t window) {
  std::string csv = "window,start,dominant_label" + measure_header() + '\n';
  json rows = json::array();
  for (const auto& t : trace) {
    csv += num(std::uint64_t{t.window}) + ',' + num(std::uint64_t{t.start}) + ',' +
           (t.dominant_label ? std::to_string(*t.dominant_label) : std::string{}) + measure_cells(t.distance) +
           '\n';
    rows.push_back({{"window", t.window},
                    {"start", t.start},
                    {"dominant_label", t.dominant_label ? json(*t.dominant_label) : json(nullptr)},
                    {"distance", measures_json(t.distance)}});
  }
  json doc = header_json("trace", dataset, seed);
  doc["window"] = window;
  doc["windows"] = std::move(rows);

  const std::vector<std::filesystem::path> paths = {report_path(dir, "trace", dataset, seed, ".csv"),
                                                    report_path(dir, "trace", dataset, seed, ".json")};
  write_text(paths[0], csv);
  write_text(paths[1], doc.dump(2) + '\n');
  return paths;
}

std::vector<std::filesystem::path> write_correlation_reports(const std::filesystem::path& dir,
                                                             std::string_view dataset, std::uint64_t seed,
                                                             const CorrelationReport& report) {
  std::string csv = "measure,target,r,p_value,n,ordinal_caveat" + measure_header("r_") + '\n';
  json rows = json::array();
  for (Measure m : kAllMeasures) {
    const std::size_t i = index_of(m);
    const auto& c = report.versus_target[i];
    MeasureArray between{};
    for (std::size_t o = 0; o < kMeasureCount; ++o) between[o] = report.between_measures[i][o];
    csv += std::string(to_string(m)) + ',' + report.target + ',' + num(c.r) + ',' + num(c.p_value) + ',' +
           num(std::uint64_t{c.n}) + ',' + (report.ordinal_caveat ? "1" : "0") + measure_cells(between) + '\n';
    rows.push_back({{"measure", std::string(to_string(m))},
                    {"r", c.r},
                    {"p_value", c.p_value},
                    {"n", c.n},
                    {"between_measures", measures_json(between)}});
  }
  json doc = header_json("correlate", dataset, seed);
  doc["target"] = report.target;
  doc["ordinal_caveat"] = report.ordinal_caveat;
  if (report.ordinal_caveat) {
    doc["note"] = "class ids were treated as ordinal numbers; r depends on the label encoding";
  }
  doc["measures"] = std::move(rows);

  const std::vector<std::filesystem::path> paths = {report_path(dir, "correlate", dataset, seed, ".csv"),
                                                    report_path(dir, "correlate", dataset, seed, ".json")};
  write_text(paths[0], csv);
  write_text(paths[1], doc.dump(2) + '\n');
  return paths;
}

CorrelationReport correlation_from_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::MalformedCsv, path.string() + ": missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  auto find = [&](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    return std::nullopt;
  };

  std::array<std::size_t, kMeasureCount> measure_col{};
  for (Measure m : kAllMeasures) {
    const auto col = find(to_string(m));
    if (!col) {
      throw Error(ErrorCode::MalformedCsv, path.string() + ": no '" + std::string(to_string(m)) + "' column");
    }
    measure_col[index_of(m)] = *col;
  }
  const auto accuracy_col = find("true_accuracy");
  const auto label_col = find("dominant_label");
  if (!accuracy_col && !label_col) {
    throw Error(ErrorCode::MalformedCsv,
                path.string() + ": expected a true_accuracy (iterate-records) or dominant_label (trace) column");
  }
  const std::size_t target_col = accuracy_col ? *accuracy_col : *label_col;

  std::vector<MeasureArray> distances;
  std::vector<double> target;
  std::size_t line_no = 1;
  auto parse = [&](const std::string& cell) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used == 0 || used != cell.size()) {
      throw Error(ErrorCode::MalformedCsv,
                  path.string() + ":" + std::to_string(line_no) + ": '" + cell + "' is not a number");
    }
    return v;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::MalformedCsv, path.string() + ":" + std::to_string(line_no) + ": expected " +
                                               std::to_string(header.size()) + " fields");
    }
    if (cells[target_col].empty()) continue;
    MeasureArray row{};
    for (std::size_t m = 0; m < kMeasureCount; ++m) row[m] = parse(cells[measure_col[m]]);
    distances.push_back(row);
    target.push_back(parse(cells[target_col]));
  }
  return accuracy_col ? correlation_report(distances, target, "true_accuracy", false)
                      : correlation_report(distances, target, "class_label", true);
}

}  // namespace safeml
