#include "safeml/serialization.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "safeml/error.hpp"

namespace safeml {

using json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kProfileFormat = "safeml-profile";

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

Eigen::VectorXd vector_from(const json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j.at(i).get<double>();
  return v;
}

Eigen::MatrixXd matrix_from(const json& j, Eigen::Index cols_if_empty = 0) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = rows > 0 ? static_cast<Eigen::Index>(j.at(0).size()) : cols_if_empty;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw Error(ErrorCode::InvalidArgument, "ragged matrix in profile");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

json measures_json(const MeasureArray& values) {
  json out = json::object();
  for (Measure m : kAllMeasures) out[std::string(to_string(m))] = values[index_of(m)];
  return out;
}

MeasureArray measures_from(const json& j) {
  MeasureArray out{};
  for (Measure m : kAllMeasures) out[index_of(m)] = j.at(std::string(to_string(m))).get<double>();
  return out;
}

json tree_json(const CartParams& tree) {
  json nodes = json::array();
  for (const auto& n : tree.nodes) {
    nodes.push_back({{"feature", n.feature},
                     {"threshold", n.threshold},
                     {"left", n.left},
                     {"right", n.right},
                     {"counts", n.class_counts}});
  }
  return {{"num_classes", tree.num_classes}, {"dim", tree.dim}, {"nodes", std::move(nodes)}};
}

CartParams tree_from(const json& j) {
  CartParams tree;
  tree.num_classes = j.at("num_classes").get<int>();
  tree.dim = j.at("dim").get<int>();
  for (const auto& n : j.at("nodes")) {
    CartNode node;
    node.feature = n.at("feature").get<int>();
    node.threshold = n.at("threshold").get<double>();
    node.left = n.at("left").get<int>();
    node.right = n.at("right").get<int>();
    node.class_counts = n.at("counts").get<std::vector<std::size_t>>();
    tree.nodes.push_back(std::move(node));
  }
  const auto count = static_cast<int>(tree.nodes.size());
  if (count == 0) throw Error(ErrorCode::InvalidArgument, "decision tree without nodes");
  for (const auto& n : tree.nodes) {
    const bool leaf = n.feature < 0;
    if (!leaf && (n.feature >= tree.dim || n.left <= 0 || n.left >= count || n.right <= 0 || n.right >= count)) {
      throw Error(ErrorCode::InvalidArgument, "decision tree node references are out of range");
    }
    if (static_cast<int>(n.class_counts.size()) != tree.num_classes) {
      throw Error(ErrorCode::InvalidArgument, "decision tree leaf counts have the wrong length");
    }
  }
  return tree;
}

json model_json(const TrainedModel& model) {
  json out = {{"algorithm", std::string(to_string(model.algorithm()))}};
  struct Writer {
    json& out;
    void operator()(const LdaParams& p) const {
      out["means"] = matrix_json(p.means);
      out["pooled_cov"] = matrix_json(p.pooled_cov);
      out["priors"] = vector_json(p.priors);
    }
    void operator()(const GnbParams& p) const {
      out["means"] = matrix_json(p.means);
      out["variances"] = matrix_json(p.variances);
      out["priors"] = vector_json(p.priors);
    }
    void operator()(const KnnParams& p) const {
      out["k"] = p.k;
      out["num_classes"] = p.num_classes;
      out["labels"] = p.labels;
      out["points"] = matrix_json(p.points);
    }
    void operator()(const CartParams& p) const { out["tree"] = tree_json(p); }
    void operator()(const ForestParams& p) const {
      out["num_classes"] = p.num_classes;
      out["dim"] = p.dim;
      json trees = json::array();
      for (const auto& t : p.trees) trees.push_back(tree_json(t));
      out["trees"] = std::move(trees);
    }
  };
  std::visit(Writer{out}, model.params());
  return out;
}

TrainedModel model_from(const json& j, Eigen::Index dim) {
  const auto name = j.at("algorithm").get<std::string>();
  const auto algorithm = parse_algorithm(name);
  if (!algorithm) throw Error(ErrorCode::UnknownAlgorithm, "unknown algorithm '" + name + "' in profile");
  switch (*algorithm) {
    case Algorithm::LDA:
      return TrainedModel(LdaParams{matrix_from(j.at("means")), matrix_from(j.at("pooled_cov")),
                                    vector_from(j.at("priors"))});
    case Algorithm::GNB:
      return TrainedModel(GnbParams{matrix_from(j.at("means")), matrix_from(j.at("variances")),
                                    vector_from(j.at("priors"))});
    case Algorithm::KNN: {
      KnnParams p{matrix_from(j.at("points"), dim), j.at("labels").get<std::vector<ClassId>>(),
                  j.at("k").get<int>(), j.at("num_classes").get<int>()};
      if (static_cast<std::size_t>(p.points.rows()) != p.labels.size()) {
        throw Error(ErrorCode::InvalidArgument, "KNN points and labels differ in count");
      }
      return TrainedModel(std::move(p));
    }
    case Algorithm::CART: return TrainedModel(tree_from(j.at("tree")));
    case Algorithm::RF: {
      ForestParams p;
      p.num_classes = j.at("num_classes").get<int>();
      p.dim = j.at("dim").get<int>();
      for (const auto& t : j.at("trees")) p.trees.push_back(tree_from(t));
      return TrainedModel(std::move(p));
    }
  }
  throw Error(ErrorCode::UnknownAlgorithm, "unknown algorithm in profile");
}

}  // namespace

std::string profile_to_json(const TrainingProfile& profile) {
  json classes = json::array();
  for (std::size_t k = 0; k < profile.num_classes(); ++k) {
    json ecdfs = json::array();
    for (const auto& e : profile.ecdfs[k]) {
      ecdfs.push_back(std::vector<double>(e.values().begin(), e.values().end()));
    }
    const auto& s = profile.summaries[k];
    classes.push_back({{"id", k},
                       {"name", profile.class_names[k]},
                       {"prior", profile.priors[k]},
                       {"summary", {{"count", s.count}, {"mean", vector_json(s.mean)}, {"cov", matrix_json(s.cov)}}},
                       {"ecdf", std::move(ecdfs)}});
  }
  json doc = {{"format", kProfileFormat},
              {"version", kProfileVersion},
              {"feature_names", profile.feature_names},
              {"class_names", profile.class_names},
              {"source_columns", profile.source_columns},
              {"kappa", measures_json(profile.kappa)},
              {"scaler", {{"min", vector_json(profile.scaler.min)}, {"max", vector_json(profile.scaler.max)}}},
              {"model", model_json(profile.model)},
              {"classes", std::move(classes)}};
  return doc.dump(1);
}

TrainingProfile profile_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("profile is not valid JSON: ") + e.what());
  }
  try {
    if (!doc.is_object() || doc.value("format", std::string{}) != kProfileFormat) {
      throw Error(ErrorCode::InvalidArgument, "document is not a training profile");
    }
    if (!doc.contains("version") || doc.at("version").get<int>() != kProfileVersion) {
      throw Error(ErrorCode::UnsupportedVersion,
                  "unsupported profile version (this build reads version " + std::to_string(kProfileVersion) + ")");
    }
    auto feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    auto class_names = doc.at("class_names").get<std::vector<std::string>>();
    const auto dim = static_cast<Eigen::Index>(feature_names.size());
    ScalerParams scaler{vector_from(doc.at("scaler").at("min")), vector_from(doc.at("scaler").at("max"))};
    TrainedModel model = model_from(doc.at("model"), dim);

    TrainingProfile p{.feature_names = std::move(feature_names),
                      .class_names = std::move(class_names),
                      .ecdfs = {},
                      .summaries = {},
                      .priors = {},
                      .scaler = std::move(scaler),
                      .model = std::move(model),
                      .kappa = measures_from(doc.at("kappa")),
                      .source_columns = doc.value("source_columns", std::vector<std::string>{})};
    for (const auto& c : doc.at("classes")) {
      std::vector<Ecdf> per_feature;
      for (const auto& e : c.at("ecdf")) per_feature.emplace_back(e.get<std::vector<double>>());
      p.ecdfs.push_back(std::move(per_feature));
      const auto& s = c.at("summary");
      p.summaries.push_back({vector_from(s.at("mean")), matrix_from(s.at("cov")), s.at("count").get<std::size_t>()});
      p.priors.push_back(c.at("prior").get<double>());
    }

    const std::size_t d = p.dim();
    bool consistent = p.ecdfs.size() == p.num_classes() && p.scaler.dim() == d &&
                      p.scaler.max.size() == p.scaler.min.size() && p.model.dim() == d &&
                      p.model.num_classes() == p.num_classes();
    for (std::size_t k = 0; consistent && k < p.ecdfs.size(); ++k) {
      consistent = p.ecdfs[k].size() == d && static_cast<std::size_t>(p.summaries[k].dim()) == d;
    }
    if (!consistent) {
      throw Error(ErrorCode::InvalidArgument, "profile sections disagree on class or feature counts");
    }
    return p;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed profile: ") + e.what());
  }
}

void save_profile(const std::filesystem::path& path, const TrainingProfile& profile) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  out << profile_to_json(profile) << '\n';
  if (!out) throw Error(ErrorCode::Io, "write to '" + path.string() + "' failed");
}

TrainingProfile load_profile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return profile_from_json(buffer.str());
}

std::string verdict_to_json_line(const MonitorVerdict& verdict, const TrainingProfile& profile) {
  json out = {{"version", kVerdictVersion},
              {"state", std::string(to_string(verdict.state))},
              {"evaluated", verdict.evaluation.has_value()},
              {"samples_seen", verdict.samples_seen},
              {"buffer_occupancy", verdict.buffer_occupancy},
              {"buffer_target", verdict.buffer_target}};
  if (const auto& eval = verdict.evaluation) {
    out["estimated_accuracy"] = measures_json(eval->estimated_accuracy);
    out["bhattacharyya_p_correct"] =
        eval->bhattacharyya_p_correct ? json(*eval->bhattacharyya_p_correct) : json(nullptr);
    out["kappa"] = measures_json(eval->kappa);
    out["overall_distance"] = measures_json(eval->report.overall);
    json classes = json::array();
    for (const auto& c : eval->report.classes) {
      json features = json::array();
      for (std::size_t f = 0; f < c.per_feature.size(); ++f) {
        MeasureArray values{};
        for (std::size_t m = 0; m < kMeasureCount; ++m) values[m] = c.per_feature[f][m].value;
        json entry = {{"feature", profile.feature_names[f]}};
        entry.update(measures_json(values));
        features.push_back(std::move(entry));
      }
      classes.push_back({{"id", c.cls},
                         {"name", profile.class_names[static_cast<std::size_t>(c.cls)]},
                         {"count", c.count},
                         {"distance", measures_json(c.aggregate)},
                         {"bhattacharyya_p_correct",
                          c.bhattacharyya_p_correct ? json(*c.bhattacharyya_p_correct) : json(nullptr)},
                         {"features", std::move(features)}});
    }
    out["classes"] = std::move(classes);
    json absent = json::array();
    for (ClassId id : eval->report.absent_classes) absent.push_back(profile.class_names[static_cast<std::size_t>(id)]);
    out["absent_classes"] = std::move(absent);
  }
  return out.dump();
}

}  // namespace safeml
