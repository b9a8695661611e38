#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "error_code.hpp"
#include "safeml/datasets.hpp"
#include "safeml/random.hpp"

namespace {

using safeml::ErrorCode;
using safeml::LabeledDataset;
using testutil::code_of;

const std::string kDataDir = SAFEML_TEST_DATA_DIR;

bool same(const LabeledDataset& a, const LabeledDataset& b) {
  return a.features == b.features && a.labels == b.labels && a.feature_names == b.feature_names &&
         a.class_names == b.class_names;
}

TEST(Generators, XorQuadrantRule) {
  EXPECT_EQ(safeml::xor_label(0.5, 0.5), 0);
  EXPECT_EQ(safeml::xor_label(-0.5, 0.5), 1);
  EXPECT_EQ(safeml::xor_label(0.5, -0.5), 1);
  EXPECT_EQ(safeml::xor_label(-0.5, -0.5), 0);
  const auto d = safeml::gen_xor(500, 0.0, 3);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    EXPECT_EQ(d.labels[i], safeml::xor_label(d.features(r, 0), d.features(r, 1)));
  }
}

TEST(Generators, Deterministic) {
  EXPECT_TRUE(same(safeml::gen_xor(400, 0.1, 7), safeml::gen_xor(400, 0.1, 7)));
  EXPECT_FALSE(same(safeml::gen_xor(400, 0.1, 7), safeml::gen_xor(400, 0.1, 8)));
  EXPECT_TRUE(same(safeml::gen_spiral(300, 0.05, 2), safeml::gen_spiral(300, 0.05, 2)));
  EXPECT_TRUE(same(safeml::gen_circle(300, 0.05, 2), safeml::gen_circle(300, 0.05, 2)));
}

TEST(Generators, XorClassBalance) {
  const std::size_t n = 400;
  // sqrt(n) is two binomial standard deviations: expect about 95% of seeds inside.
  const double band = std::sqrt(static_cast<double>(n));
  int inside = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto counts = safeml::gen_xor(n, 0.1, s).class_counts();
    const double deviation = std::abs(static_cast<double>(counts[1]) - n / 2.0);
    inside += deviation <= band ? 1 : 0;
    EXPECT_LE(deviation, 2.0 * band) << s;
  }
  EXPECT_GE(inside, 90);
}

TEST(Generators, CircleRadii) {
  const auto d = safeml::gen_circle(1000, 0.0, 5);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const double radius = std::hypot(d.features(r, 0), d.features(r, 1));
    if (d.labels[i] == 0) {
      EXPECT_LE(radius, 0.5 + 1e-12);
    } else {
      EXPECT_GE(radius, 0.7 - 1e-12);
      EXPECT_LE(radius, 1.0 + 1e-12);
    }
  }
}

TEST(Generators, SpiralArmsDisjoint) {
  const auto d = safeml::gen_spiral(600, 0.0, 6);
  double closest = 1e9;
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = 0; j < d.size(); ++j) {
      if (d.labels[i] == d.labels[j]) continue;
      const auto a = static_cast<Eigen::Index>(i);
      const auto b = static_cast<Eigen::Index>(j);
      closest = std::min(closest, (d.features.row(a) - d.features.row(b)).norm());
    }
  }
  EXPECT_GT(closest, 0.0);
}

TEST(Generators, InvariantsAndErrors) {
  for (const char* name : {"xor", "spiral", "circle"}) {
    const auto d = safeml::generate(name, 100, std::nullopt, 1);
    EXPECT_NO_THROW(d.validate());
    EXPECT_EQ(d.dim(), 2u);
    EXPECT_EQ(d.num_classes(), 2u);
  }
  EXPECT_EQ(code_of([] { (void)safeml::gen_xor(3, 0.1, 1); }), ErrorCode::InvalidCount);
  EXPECT_EQ(code_of([] { (void)safeml::gen_circle(0, 0.1, 1); }), ErrorCode::InvalidCount);
  EXPECT_EQ(code_of([] { (void)safeml::generate("moons", 100, std::nullopt, 1); }), ErrorCode::InvalidArgument);
}

safeml::CsvLoadResult load_text(const std::string& text, const std::string& label = "Label") {
  std::istringstream in(text);
  safeml::CsvLoadOptions options;
  options.label_column = label;
  return safeml::load_csv(in, options);
}

TEST(LoadCsv, DropsNonFiniteRows) {
  const auto r = load_text("a,b,Label\n1,2,x\n3,Infinity,y\n5,6,x\n");
  EXPECT_EQ(r.rows_read, 3u);
  EXPECT_EQ(r.rows_dropped, 1u);
  EXPECT_EQ(r.data.size(), 2u);
}

TEST(LoadCsv, FirstAppearanceLabels) {
  const auto r = load_text("f,Label\n1,BENIGN\n2,DoS\n3,BENIGN\n");
  EXPECT_EQ(r.data.labels, (std::vector<safeml::ClassId>{0, 1, 0}));
  EXPECT_EQ(r.data.class_names, (std::vector<std::string>{"BENIGN", "DoS"}));
}

TEST(LoadCsv, Errors) {
  EXPECT_EQ(code_of([] { (void)load_text(""); }), ErrorCode::MalformedCsv);
  EXPECT_EQ(code_of([] { (void)load_text("1,2,3\n4,5,6\n"); }), ErrorCode::MalformedCsv);
  EXPECT_EQ(code_of([] { (void)load_text("a,a,Label\n1,2,x\n"); }), ErrorCode::MalformedCsv);
  EXPECT_EQ(code_of([] { (void)load_text("a,Label\n1,x,extra\n"); }), ErrorCode::MalformedCsv);
  EXPECT_EQ(code_of([] { (void)load_text("a,b\n1,2\n"); }), ErrorCode::MissingLabelColumn);
  EXPECT_EQ(code_of([] { (void)load_text("a,Label\nNaN,x\n"); }), ErrorCode::NoUsableRows);
  try {
    (void)load_text("a,Label\n1,x\n2\n");
    FAIL();
  } catch (const safeml::Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  try {
    (void)load_text("a,b\n1,2\n", "Attack");
    FAIL();
  } catch (const safeml::Error& e) {
    EXPECT_NE(std::string(e.what()).find("Attack"), std::string::npos) << e.what();
  }
}

TEST(LoadCsv, CicidsFixture) {
  safeml::CsvLoadOptions options;
  const auto r = safeml::load_csv(kDataDir + "/cicids_fixture.csv", options);
  EXPECT_EQ(r.rows_read, 50u);
  EXPECT_EQ(r.rows_dropped, 7u);
  EXPECT_EQ(r.data.size(), 43u);
  EXPECT_EQ(r.data.feature_names, (std::vector<std::string>{"Destination Port", "Flow Duration",
                                                            "Total Fwd Packets", "Flow Bytes/s",
                                                            "Flow Packets/s"}));
  EXPECT_EQ(r.skipped_columns, (std::vector<std::string>{"Timestamp"}));
  EXPECT_EQ(r.data.class_names,
            (std::vector<std::string>{"BENIGN", "DoS Hulk", "DoS slowloris", "DoS Slowhttptest"}));
  EXPECT_EQ(r.data.class_counts(), (std::vector<std::size_t>{25, 8, 6, 4}));
  EXPECT_NO_THROW(r.data.validate());
}

TEST(LoadCsv, MalformedHeaderFixture) {
  EXPECT_EQ(code_of([] { (void)safeml::load_csv(kDataDir + "/malformed_header.csv", {}); }),
            ErrorCode::MalformedCsv);
}

TEST(LoadCsv, ExplicitFeatureColumns) {
  std::istringstream in("a,b,c,Label\n1,2,3,x\n4,NaN,6,y\n");
  safeml::CsvLoadOptions options;
  options.feature_columns = {"c", "a"};
  const auto r = safeml::load_csv(in, options);
  EXPECT_EQ(r.data.feature_names, (std::vector<std::string>{"c", "a"}));
  EXPECT_EQ(r.data.size(), 2u);
  EXPECT_EQ(r.data.features(1, 0), 6.0);
}

TEST(CsvProperty, WriteLoadRoundTripsBitExactly) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto d = safeml::generate(s % 2 == 0 ? "spiral" : "circle", 200, 0.3, s);
    std::stringstream buffer;
    safeml::write_csv(buffer, d);
    safeml::CsvLoadOptions options;
    options.label_column = "label";
    const auto back = safeml::load_csv(buffer, options).data;
    EXPECT_TRUE(same(d, back)) << s;
  }
}

TEST(Scaler, Examples) {
  Eigen::MatrixXd train(3, 2);
  train << 10, 4, 20, 4, 15, 4;
  const auto p = safeml::fit_scaler(train);
  Eigen::MatrixXd field(2, 2);
  field << 15, 4, 30, 100;
  const auto scaled = safeml::apply_scaler(p, field);
  EXPECT_EQ(scaled(0, 0), 0.5);
  EXPECT_EQ(scaled(1, 0), 1.5);
  EXPECT_EQ(scaled(0, 1), 0.5);
  EXPECT_EQ(scaled(1, 1), 0.5);
}

TEST(ScalerProperty, TrainingDataMapsIntoUnitBox) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto d = safeml::gen_spiral(100 + s, 0.5, s);
    const auto scaled = safeml::apply_scaler(safeml::fit_scaler(d.features), d.features);
    EXPECT_GE(scaled.minCoeff(), 0.0);
    EXPECT_LE(scaled.maxCoeff(), 1.0);
    EXPECT_EQ(scaled.colwise().minCoeff(), Eigen::RowVector2d(0.0, 0.0));
    EXPECT_EQ(scaled.colwise().maxCoeff(), Eigen::RowVector2d(1.0, 1.0));
  }
}

TEST(Splits, HoldoutAndKfold) {
  const auto h = safeml::split_holdout(10, 0.7, 3);
  EXPECT_EQ(h.train.size(), 7u);
  EXPECT_EQ(h.test.size(), 3u);
  const auto folds = safeml::kfold(10, 10, 3);
  ASSERT_EQ(folds.size(), 10u);
  for (const auto& f : folds) EXPECT_EQ(f.test.size(), 1u);
  EXPECT_EQ(safeml::split_holdout(10, 0.7, 3).train, h.train);
  EXPECT_EQ(code_of([] { (void)safeml::split_holdout(10, 1.0, 1); }), ErrorCode::InvalidSplit);
  EXPECT_EQ(code_of([] { (void)safeml::split_holdout(1, 0.5, 1); }), ErrorCode::InvalidSplit);
  EXPECT_EQ(code_of([] { (void)safeml::kfold(5, 6, 1); }), ErrorCode::InvalidSplit);
  EXPECT_EQ(code_of([] { (void)safeml::kfold(5, 1, 1); }), ErrorCode::InvalidSplit);
}

TEST(SplitProperty, PartitionsAreDisjointAndExhaustive) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const std::size_t n = 20 + s * 7;
    const auto h = safeml::split_holdout(n, 0.3 + 0.01 * static_cast<double>(s), s);
    std::vector<std::size_t> all = h.train;
    all.insert(all.end(), h.test.begin(), h.test.end());
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(all[i], i);

    const std::size_t k = 2 + s % 9;
    const auto folds = safeml::kfold(n, k, s);
    std::vector<std::size_t> seen;
    std::size_t smallest = n;
    std::size_t largest = 0;
    for (const auto& f : folds) {
      EXPECT_EQ(f.train.size() + f.test.size(), n);
      seen.insert(seen.end(), f.test.begin(), f.test.end());
      smallest = std::min(smallest, f.test.size());
      largest = std::max(largest, f.test.size());
    }
    std::sort(seen.begin(), seen.end());
    for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(seen[i], i);
    EXPECT_LE(largest - smallest, 1u);
  }
}

TEST(Streams, RegimeStream) {
  const auto s = safeml::gen_regime_stream(200, 3, 120, 4.0, 1);
  ASSERT_EQ(s.size(), 200u);
  for (std::size_t i = 1; i < s.size(); ++i) EXPECT_GT(s[i].index, s[i - 1].index);
  EXPECT_EQ(s[119].true_label, 0);
  EXPECT_EQ(s[120].true_label, 1);
  EXPECT_EQ(s[0].features.size(), 3u);
}

TEST(Seeds, DeriveSeedIsStableAndSpreads) {
  static_assert(safeml::derive_seed(1, 0) == safeml::derive_seed(1, 0));
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(safeml::derive_seed(42, i));
  EXPECT_EQ(seen.size(), 1000u);
}

}  // namespace
