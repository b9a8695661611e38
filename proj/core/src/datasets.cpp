#include "safeml/datasets.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <set>
#include <unordered_map>

#include "safeml/error.hpp"

namespace safeml {

namespace {

void require_count(std::size_t n) {
  if (n < 4) {
    throw Error(ErrorCode::InvalidCount, "generators need n >= 4, got " + std::to_string(n));
  }
}

void require_noise(double noise) {
  if (!(noise >= 0.0) || !std::isfinite(noise)) {
    throw Error(ErrorCode::InvalidArgument, "noise must be a finite value >= 0");
  }
}

LabeledDataset two_feature_dataset(std::size_t n) {
  LabeledDataset d;
  d.features.resize(static_cast<Eigen::Index>(n), 2);
  d.labels.resize(n);
  d.feature_names = {"x1", "x2"};
  d.class_names = {"0", "1"};
  return d;
}

// std::normal_distribution cannot take sigma = 0.
double jitter(std::mt19937_64& rng, double sigma) {
  if (sigma == 0.0) return 0.0;
  return std::normal_distribution<double>(0.0, sigma)(rng);
}

}  // namespace

ClassId xor_label(double x1, double x2) noexcept {
  return (x1 > 0.0 && x2 < 0.0) || (x1 < 0.0 && x2 > 0.0) ? 1 : 0;
}

LabeledDataset gen_xor(std::size_t n, double noise, std::uint64_t seed) {
  require_count(n);
  require_noise(noise);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  auto d = two_feature_dataset(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x1 = uniform(rng);
    const double x2 = uniform(rng);
    const auto row = static_cast<Eigen::Index>(i);
    d.labels[i] = xor_label(x1, x2);
    d.features(row, 0) = x1 + jitter(rng, noise);
    d.features(row, 1) = x2 + jitter(rng, noise);
  }
  return d;
}

LabeledDataset gen_spiral(std::size_t n, double noise, std::uint64_t seed) {
  require_count(n);
  require_noise(noise);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 3.0 * std::numbers::pi);
  auto d = two_feature_dataset(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto cls = static_cast<ClassId>(i % 2);
    const double t = angle(rng);
    const double r = t / (2.0 * std::numbers::pi);
    const double phase = t + std::numbers::pi * cls;
    const auto row = static_cast<Eigen::Index>(i);
    d.labels[i] = cls;
    d.features(row, 0) = r * std::cos(phase) + jitter(rng, noise);
    d.features(row, 1) = r * std::sin(phase) + jitter(rng, noise);
  }
  return d;
}

LabeledDataset gen_circle(std::size_t n, double noise, std::uint64_t seed) {
  require_count(n);
  require_noise(noise);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  auto d = two_feature_dataset(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto cls = static_cast<ClassId>(i % 2);
    const double u = unit(rng);
    // Area-uniform radius: r^2 uniform on [r_lo^2, r_hi^2].
    double r = cls == 0 ? 0.5 * std::sqrt(u) : std::sqrt(0.49 + u * (1.0 - 0.49));
    r = std::fabs(r + jitter(rng, noise));
    const double phi = angle(rng);
    const auto row = static_cast<Eigen::Index>(i);
    d.labels[i] = cls;
    d.features(row, 0) = r * std::cos(phi);
    d.features(row, 1) = r * std::sin(phi);
  }
  return d;
}

LabeledDataset generate(const std::string& name, std::size_t n, std::optional<double> noise,
                        std::uint64_t seed) {
  if (name == "xor") return gen_xor(n, noise.value_or(kDefaultXorNoise), seed);
  if (name == "spiral") return gen_spiral(n, noise.value_or(kDefaultSpiralNoise), seed);
  if (name == "circle") return gen_circle(n, noise.value_or(kDefaultCircleNoise), seed);
  throw Error(ErrorCode::InvalidArgument, "unknown dataset '" + name + "' (expected xor, spiral or circle)");
}

// --- CSV ----------------------------------------------------------------------

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

enum class CellKind { Finite, NonFinite, Blank, Text };

struct Cell {
  CellKind kind = CellKind::Text;
  double value = 0.0;
};

Cell classify(const std::string& text) {
  if (text.empty()) return {CellKind::Blank, 0.0};
  const std::string l = lower(text);
  static const std::set<std::string> non_finite = {"nan",  "+nan",      "-nan",      "inf",
                                                   "+inf", "-inf",      "infinity",  "+infinity",
                                                   "-infinity"};
  if (non_finite.count(l) > 0) return {CellKind::NonFinite, 0.0};
  std::string_view view = text;
  if (view.front() == '+') view.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(view.data(), view.data() + view.size(), value);
  if (ec != std::errc() || ptr != view.data() + view.size()) return {CellKind::Text, 0.0};
  if (!std::isfinite(value)) return {CellKind::NonFinite, 0.0};
  return {CellKind::Finite, value};
}

std::optional<long long> parse_integer(const std::string& text) {
  long long value = 0;
  std::string_view view = text;
  if (!view.empty() && view.front() == '+') view.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(view.data(), view.data() + view.size(), value);
  if (view.empty() || ec != std::errc() || ptr != view.data() + view.size()) return std::nullopt;
  return value;
}

bool getline_stripped(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

[[noreturn]] void malformed(std::size_t line_no, const std::string& what) {
  throw Error(ErrorCode::MalformedCsv, "line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

std::optional<double> parse_finite_cell(const std::string& cell) {
  const Cell c = classify(trim(cell));
  if (c.kind != CellKind::Finite) return std::nullopt;
  return c.value;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(trim(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(trim(current));
  return fields;
}

CsvLoadResult load_csv(std::istream& in, const CsvLoadOptions& options) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (getline_stripped(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    header = split_csv_line(line);
    break;
  }
  if (header.empty()) malformed(line_no, "missing header row");
  const std::size_t header_line = line_no;

  std::unordered_map<std::string, std::size_t> column_index;
  bool all_numeric = true;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c].empty()) malformed(header_line, "empty column name at position " + std::to_string(c + 1));
    if (!column_index.emplace(header[c], c).second) malformed(header_line, "duplicate column '" + header[c] + "'");
    if (classify(header[c]).kind != CellKind::Finite) all_numeric = false;
  }
  if (all_numeric) malformed(header_line, "first row is numeric; a header row is required");

  const auto label_it = column_index.find(options.label_column);
  if (label_it == column_index.end()) {
    throw Error(ErrorCode::MissingLabelColumn, "label column '" + options.label_column + "' not found");
  }
  const std::size_t label_col = label_it->second;

  // Read every record first; column types are decided on the full file.
  std::vector<std::vector<std::string>> records;
  std::vector<std::size_t> record_lines;
  while (getline_stripped(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      malformed(line_no, "expected " + std::to_string(header.size()) + " fields, found " +
                             std::to_string(fields.size()));
    }
    records.push_back(std::move(fields));
    record_lines.push_back(line_no);
  }

  CsvLoadResult result;
  std::vector<std::size_t> feature_cols;
  if (!options.feature_columns.empty()) {
    for (const auto& name : options.feature_columns) {
      const auto it = column_index.find(name);
      if (it == column_index.end()) {
        throw Error(ErrorCode::InvalidArgument, "feature column '" + name + "' not found");
      }
      if (it->second == label_col) {
        throw Error(ErrorCode::InvalidArgument, "label column cannot also be a feature");
      }
      feature_cols.push_back(it->second);
    }
  } else {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c == label_col) continue;
      bool numeric = true;
      bool any_value = false;
      for (const auto& rec : records) {
        const auto kind = classify(rec[c]).kind;
        if (kind == CellKind::Text) {
          numeric = false;
          break;
        }
        any_value = any_value || kind == CellKind::Finite;
      }
      if (numeric && any_value) {
        feature_cols.push_back(c);
      } else {
        result.skipped_columns.push_back(header[c]);
      }
    }
  }
  if (feature_cols.empty()) {
    throw Error(ErrorCode::NoUsableRows, "no numeric feature columns");
  }

  std::vector<std::vector<double>> rows;
  std::vector<std::string> raw_labels;
  for (const auto& rec : records) {
    ++result.rows_read;
    std::vector<double> values;
    values.reserve(feature_cols.size());
    bool usable = !rec[label_col].empty();
    for (std::size_t c : feature_cols) {
      if (!usable) break;
      const Cell cell = classify(rec[c]);
      if (cell.kind != CellKind::Finite) {
        usable = false;
      } else {
        values.push_back(cell.value);
      }
    }
    if (!usable) {
      ++result.rows_dropped;
      continue;
    }
    rows.push_back(std::move(values));
    raw_labels.push_back(rec[label_col]);
  }
  if (rows.empty()) {
    throw Error(ErrorCode::NoUsableRows,
                "all " + std::to_string(result.rows_read) + " data rows were dropped");
  }

  // Label ids: numeric order for integer labels, first appearance otherwise.
  std::vector<std::string> names;
  std::unordered_map<std::string, ClassId> ids;
  const bool integer_labels = std::all_of(raw_labels.begin(), raw_labels.end(),
                                          [](const std::string& s) { return parse_integer(s).has_value(); });
  if (integer_labels) {
    std::map<long long, std::string> by_value;
    for (const auto& s : raw_labels) by_value.emplace(*parse_integer(s), s);
    for (const auto& [value, text] : by_value) {
      (void)value;
      ids.emplace(text, static_cast<ClassId>(names.size()));
      names.push_back(text);
    }
    // Different spellings of one integer ("01" vs "1") share its id.
    for (const auto& s : raw_labels) {
      if (ids.count(s) == 0) ids.emplace(s, ids.at(by_value.at(*parse_integer(s))));
    }
  } else {
    for (const auto& s : raw_labels) {
      if (ids.emplace(s, static_cast<ClassId>(names.size())).second) names.push_back(s);
    }
  }

  auto& data = result.data;
  data.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(feature_cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < feature_cols.size(); ++j) {
      data.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    data.labels.push_back(ids.at(raw_labels[i]));
  }
  for (std::size_t c : feature_cols) data.feature_names.push_back(header[c]);
  data.class_names = std::move(names);
  return result;
}

CsvLoadResult load_csv(const std::filesystem::path& path, const CsvLoadOptions& options) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  }
  return load_csv(in, options);
}

namespace {

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos && trim(s) == s) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

void write_csv(std::ostream& out, const LabeledDataset& data, const std::string& label_column) {
  data.validate();
  for (const auto& name : data.feature_names) out << quote_if_needed(name) << ',';
  out << quote_if_needed(label_column) << '\n';
  char buf[32];
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (Eigen::Index j = 0; j < data.features.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", data.features(static_cast<Eigen::Index>(i), j));
      out << buf << ',';
    }
    out << quote_if_needed(data.class_names[static_cast<std::size_t>(data.labels[i])]) << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const LabeledDataset& data, const std::string& label_column) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  }
  write_csv(out, data, label_column);
  if (!out) {
    throw Error(ErrorCode::Io, "write to '" + path.string() + "' failed");
  }
}

// --- Scaling ------------------------------------------------------------------

ScalerParams fit_scaler(const Eigen::Ref<const Eigen::MatrixXd>& train) {
  if (train.rows() == 0) {
    throw Error(ErrorCode::EmptySample, "cannot fit a scaler on zero rows");
  }
  return {train.colwise().minCoeff().transpose(), train.colwise().maxCoeff().transpose()};
}

void apply_scaler_inplace(const ScalerParams& params, std::span<double> sample) {
  if (sample.size() != params.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "sample dimension differs from scaler");
  }
  for (std::size_t j = 0; j < sample.size(); ++j) {
    const double lo = params.min[static_cast<Eigen::Index>(j)];
    const double hi = params.max[static_cast<Eigen::Index>(j)];
    if (!(hi > lo)) {
      sample[j] = 0.5;
      continue;
    }
    sample[j] = std::clamp((sample[j] - lo) / (hi - lo), kFieldClampLow, kFieldClampHigh);
  }
}

Eigen::MatrixXd apply_scaler(const ScalerParams& params, const Eigen::Ref<const Eigen::MatrixXd>& rows) {
  if (static_cast<std::size_t>(rows.cols()) != params.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "data dimension differs from scaler");
  }
  // Row-major copy so each sample is contiguous.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> out = rows;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    apply_scaler_inplace(params, std::span<double>(out.row(i).data(), static_cast<std::size_t>(out.cols())));
  }
  return out;
}

LabeledDataset apply_scaler(const ScalerParams& params, const LabeledDataset& data) {
  LabeledDataset out = data;
  out.features = apply_scaler(params, data.features);
  return out;
}

// --- Splitting ----------------------------------------------------------------

namespace {

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  return idx;
}

}  // namespace

Split split_holdout(std::size_t n, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw Error(ErrorCode::InvalidSplit, "hold-out ratio must lie strictly between 0 and 1");
  }
  const auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
  if (n_train == 0 || n_train >= n) {
    throw Error(ErrorCode::InvalidSplit, "hold-out split of " + std::to_string(n) + " samples leaves an empty side");
  }
  const auto idx = shuffled_indices(n, seed);
  Split s;
  s.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  return s;
}

std::vector<Split> kfold(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2 || n < k) {
    throw Error(ErrorCode::InvalidSplit,
                "k-fold needs 2 <= k <= n (k=" + std::to_string(k) + ", n=" + std::to_string(n) + ")");
  }
  const auto idx = shuffled_indices(n, seed);
  std::vector<Split> folds(k);
  std::size_t start = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = n / k + (f < n % k ? 1 : 0);
    for (std::size_t i = 0; i < n; ++i) {
      (i >= start && i < start + size ? folds[f].test : folds[f].train).push_back(idx[i]);
    }
    start += size;
  }
  return folds;
}

std::pair<LabeledDataset, LabeledDataset> split_holdout(const LabeledDataset& data, double ratio,
                                                        std::uint64_t seed) {
  const auto s = split_holdout(data.size(), ratio, seed);
  return {data.subset(s.train), data.subset(s.test)};
}

// --- Streams --------------------------------------------------------------------

std::vector<StreamRecord> to_stream(const LabeledDataset& data) {
  std::vector<StreamRecord> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    out[i].index = i;
    out[i].features.resize(data.dim());
    for (std::size_t j = 0; j < data.dim(); ++j) {
      out[i].features[j] = data.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    out[i].true_label = data.labels[i];
  }
  return out;
}

std::vector<StreamRecord> gen_regime_stream(std::size_t n, std::size_t dim, std::size_t switch_at,
                                            double shift, std::uint64_t seed) {
  if (n == 0 || dim == 0) {
    throw Error(ErrorCode::InvalidCount, "regime stream needs n > 0 and dim > 0");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<StreamRecord> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool second = i >= switch_at;
    out[i].index = i;
    out[i].true_label = second ? 1 : 0;
    out[i].features.resize(dim);
    for (auto& v : out[i].features) v = normal(rng) + (second ? shift : 0.0);
  }
  return out;
}

}  // namespace safeml
