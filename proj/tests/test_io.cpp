// tests/test_io.cpp
//
// Copyright 2026 The ulnn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "ulnn/ulnn.hpp"

namespace ulnn {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("ulnn_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string bytes_of(const Matrix& m) {
  std::ostringstream out;
  io::write_matrix(out, m);
  return out.str();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

TEST(MatrixFile, BinaryLayout) {
  Matrix m(1, 2);
  m << 1.0, -2.5;
  const std::string b = bytes_of(m);
  ASSERT_EQ(b.size(), 8u + 8u + 16u);
  EXPECT_EQ(b.substr(0, 8), "ULNNMAT1");
  EXPECT_EQ(b.substr(8, 8), std::string("\x01\0\0\0\x02\0\0\0", 8));
  double first = 0.0;
  std::memcpy(&first, b.data() + 16, 8);
  EXPECT_EQ(first, 1.0);  // little-endian host
}

TEST(MatrixFile, RoundTripIsBitwise) {
  std::mt19937_64 rng(1);
  Matrix m = standard_normal_matrix(7, 5, rng);
  m(0, 0) = std::numeric_limits<double>::denorm_min();
  m(1, 1) = -0.0;
  m(2, 2) = std::numeric_limits<double>::max();
  std::istringstream in(bytes_of(m));
  const Matrix back = io::read_matrix(in);
  ASSERT_EQ(back.rows(), 7);
  ASSERT_EQ(back.cols(), 5);
  EXPECT_EQ(std::memcmp(back.data(), m.data(), sizeof(double) * 35), 0);
  EXPECT_EQ(bytes_of(back), bytes_of(m));
  const Matrix empty(0, 3);
  std::istringstream e(bytes_of(empty));
  EXPECT_EQ(io::read_matrix(e).cols(), 3);
}

TEST(MatrixFile, TruncationNamesByteCounts) {
  std::string b = bytes_of(Matrix::Ones(3, 2));
  b.resize(b.size() - 5);
  std::istringstream in(b);
  try {
    io::read_matrix(in, "m.bin");
    FAIL();
  } catch (const FormatError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("expected 48"), std::string::npos) << what;
    EXPECT_NE(what.find("got 43"), std::string::npos) << what;
  }
  std::istringstream header(std::string("ULNNMAT1\x01\0", 10));
  EXPECT_THROW(io::read_matrix(header), FormatError);
}

TEST(MatrixFile, MagicMismatchAndNonFinite) {
  std::istringstream wrong(std::string("ULNNXXXX") + std::string(8, '\0'));
  EXPECT_THROW(io::read_matrix(wrong), FormatError);
  std::istringstream binary(std::string("\x01\x02\x03\x04\x05\x06\x07\x08", 8));
  EXPECT_THROW(io::read_matrix(binary), FormatError);
  Matrix m = Matrix::Ones(2, 2);
  m(1, 0) = std::numeric_limits<double>::quiet_NaN();
  std::istringstream nan(bytes_of(m));
  EXPECT_THROW(io::read_matrix(nan), NonFiniteError);
  std::istringstream csv("1,inf\n");
  EXPECT_THROW(io::read_matrix(csv), NonFiniteError);
  EXPECT_THROW(io::read_matrix(std::string("/nonexistent/file.bin")), DataError);
}

TEST(MatrixFile, Csv) {
  std::istringstream in("1,2\n3,4\n");
  const Matrix m = io::read_matrix(in);
  EXPECT_EQ(m, (Matrix(2, 2) << 1, 2, 3, 4).finished());
  std::istringstream header("a,b\r\n 1.5 , -2e3\r\n\n");
  EXPECT_EQ(io::read_matrix(header), (Matrix(1, 2) << 1.5, -2000).finished());
  std::istringstream ragged("1,2\n3\n");
  EXPECT_THROW(io::read_matrix(ragged), FormatError);
  std::istringstream text("1,2\nx,4\n");
  EXPECT_THROW(io::read_matrix(text), FormatError);
  std::ostringstream out;
  std::mt19937_64 rng(2);
  const Matrix r = standard_normal_matrix(3, 3, rng);
  io::write_csv_matrix(out, r);
  std::istringstream back(out.str());
  EXPECT_EQ(io::read_matrix(back), r);
}

TEST(ModelFile, RoundTripAndErrors) {
  io::ModelFile f;
  f.kind = "test";
  f.set("alpha", 0.1);
  f.set("name", std::string("x y"));
  f.set("count", 7LL);
  f.matrices["m"] = Matrix::Identity(2, 3);
  std::stringstream buf;
  io::write_model(buf, f);
  const io::ModelFile g = io::read_model(buf);
  EXPECT_EQ(g.kind, "test");
  EXPECT_EQ(g.number("alpha"), 0.1);
  EXPECT_EQ(g.integer("count"), 7);
  EXPECT_EQ(g.attribute("name"), "x y");
  EXPECT_EQ(g.matrix("m"), f.matrices["m"]);
  EXPECT_THROW(g.matrix("missing"), FormatError);
  EXPECT_THROW(g.integer("name"), FormatError);
  std::istringstream bad(std::string("ULNNMAT1") + std::string(8, '\0'));
  EXPECT_THROW(io::read_model(bad), FormatError);
  std::string s = buf.str();
  s.resize(s.size() - 3);
  std::istringstream cut(s);
  EXPECT_THROW(io::read_model(cut), FormatError);
  EXPECT_THROW(io::expect_kind(g, "cca", "file"), FormatError);
}

template <typename T>
io::ModelFile reload(const T& model_file) {
  std::stringstream buf;
  io::write_model(buf, model_file);
  return io::read_model(buf);
}

TEST(Models, PipelineModelsRoundTripToIdenticalPredictions) {
  ZeroShotWorldSpec spec;
  spec.seen = 10;
  spec.unseen = 5;
  spec.attribute_dim = 6;
  spec.train_per_class = 40;
  spec.test_per_class = 10;
  const ZeroShotWorld w = generate_zeroshot_world(spec);
  TaxonomyGraph g;
  for (const auto& [p, c] : w.edges) g.add_edge(p, c);
  g.set_classes(w.classes);

  const Matrix rows = apply_transform_rows(w.train.logits, OutputTransform::normalized());
  const WhiteningModel wm = WhiteningModel::fit_rows(rows, 5);
  const WhiteningModel wm2 = io::whitening_from_model(reload(io::to_model(wm, "normalized-logits")));
  EXPECT_EQ(wm2.whitening_matrix(), wm.whitening_matrix());
  EXPECT_EQ(wm2.mean(), wm.mean());

  IcaConfig ic;
  ic.epochs = 3;
  ic.batch_size = 50;
  const IcaModel ica = train_ica(rows, wm, ic);
  const IcaModel ica2 = io::ica_from_model(reload(io::to_model(ica, "normalized-logits")));
  EXPECT_EQ(ica2.demixing, ica.demixing);
  EXPECT_EQ(ica2.trace.size(), 3u);
  EXPECT_EQ(ica2.trace[2].objective, ica.trace[2].objective);
  EXPECT_EQ(ica2.config.correction, ica.config.correction);

  const SemanticEmbedding emb = classical_mds(distance_matrix(g), 15);
  const CenteredSemantic sem = center_semantic(emb.coordinates.leftCols(10), emb.coordinates.rightCols(5));
  const VisualFeatures visual{ica.demixing, VisualKind::ica};
  const CcaModel cca = fit_cca(visual_class_matrix(visual.matrix).f, sem.seen, 5);
  const io::ModelFile cf = reload(io::to_model(cca, visual));
  const CcaModel cca2 = io::cca_from_model(cf);
  EXPECT_EQ(io::visual_features_from_model(cf).matrix, visual.matrix);
  const ZeroShotIndex a = build_index(cca, visual.matrix, sem.seen, sem.unseen);
  const ZeroShotIndex b = build_index(cca2, visual.matrix, sem.seen, sem.unseen);
  const ZeroShotIndex c = io::index_from_model(reload(io::to_model(a)));
  const Matrix queries = apply_transform_rows(w.test_unseen.logits, OutputTransform::softmax_at(1.0));
  for (Index r = 0; r < queries.rows(); ++r) {
    const auto pa = predict(a, queries.row(r).transpose(), 15, Pool::both).ranked;
    const auto pb = predict(b, queries.row(r).transpose(), 15, Pool::both).ranked;
    const auto pc = predict(c, queries.row(r).transpose(), 15, Pool::both).ranked;
    for (std::size_t i = 0; i < pa.size(); ++i) {
      EXPECT_EQ(pa[i].cls, pb[i].cls);
      EXPECT_EQ(pa[i].score, pb[i].score);
      EXPECT_EQ(pa[i].cls, pc[i].cls);
      EXPECT_EQ(pa[i].score, pc[i].score);
    }
  }
  EXPECT_EQ(io::visual_features_from_model(reload(io::to_model(wm, "x"))).matrix, wm.pca_matrix());
}

TEST(TextFormats, Labels) {
  std::istringstream in("3\n# note\n0\r\n12\n");
  EXPECT_EQ(io::read_labels(in, "l"), (std::vector<Index>{3, 0, 12}));
  std::istringstream bad("1\n-2\n");
  EXPECT_THROW(io::read_labels(bad, "l"), FormatError);
  std::istringstream junk("1x\n");
  EXPECT_THROW(io::read_labels(junk, "l"), FormatError);
}

TEST(TextFormats, Results) {
  std::vector<HitResult> r = {{Pool::unseen, 5, 3, 4}};
  std::ostringstream out;
  io::write_results(out, r);
  EXPECT_EQ(out.str(), "pool,k,hits,total,accuracy\nunseen,5,3,4,0.75\n");
  EXPECT_NE(io::format_results_table(r).find("75.00%"), std::string::npos);
}

TEST(Config, ParseOverrideAndReject) {
  std::istringstream in("# run\nseed = 7\nwhiten_dim=12\nvisual = ica\npools = unseen, both\ntopk = 1,5\nica.epochs = 4\n");
  io::RunConfig cfg = io::parse_config(in, "run.cfg");
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_EQ(cfg.whiten_dim, 12);
  EXPECT_EQ(cfg.visual, VisualKind::ica);
  EXPECT_EQ(cfg.pools, (std::vector<Pool>{Pool::unseen, Pool::both}));
  EXPECT_EQ(cfg.topk, (std::vector<Index>{1, 5}));
  EXPECT_EQ(cfg.ica.epochs, 4);
  cfg.set("whiten_dim", "20");
  EXPECT_EQ(cfg.whiten_dim, 20);
  EXPECT_THROW(cfg.set("whiten_dimension", "3"), UsageError);
  EXPECT_THROW(cfg.set("seed", "seven"), UsageError);
  EXPECT_THROW(cfg.set("class_means", "maybe"), UsageError);
  std::istringstream unknown("colour = blue\n");
  try {
    io::parse_config(unknown, "x.cfg");
    FAIL();
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("x.cfg line 1"), std::string::npos);
  }
  io::RunConfig bad;
  bad.fit_transform = "temperature-rescale";
  EXPECT_THROW(bad.validate(), UsageError);
  bad = {};
  bad.topk = {0};
  EXPECT_THROW(bad.validate(), UsageError);
}

TEST(Config, TextRoundTripAndRelativePaths) {
  TempDir dir;
  io::RunConfig cfg;
  cfg.seed = 3;
  cfg.visual = VisualKind::random;
  cfg.ica.correction = CorrectionForm::transpose_v;
  cfg.cca_ridge = 1e-4;
  cfg.train_outputs = "train.bin";
  cfg.out_dir = "/abs/out";
  {
    std::ofstream out(dir / "c.cfg");
    out << cfg.to_text();
  }
  const io::RunConfig back = io::load_config(dir / "c.cfg");
  EXPECT_EQ(back.to_text(), cfg.to_text());
  EXPECT_EQ(back.resolve(back.train_outputs), dir / "train.bin");
  EXPECT_EQ(back.resolve(back.out_dir), "/abs/out");
  EXPECT_THROW(io::load_config(dir / "missing.cfg"), UsageError);
}

TEST(PlotData, Shapes) {
  std::mt19937_64 rng(3);
  const Matrix f = standard_normal_matrix(20, 7, rng);
  const std::vector<std::string> labels = {"a", "b,c", "d\"e"};
  std::ostringstream scatter;
  write_embedding_scatter(scatter, f, labels, 0, 3);
  std::istringstream s(scatter.str());
  std::string line;
  std::getline(s, line);
  EXPECT_EQ(line, "class_id,label,comp_0,comp_3");
  int rows = 0;
  while (std::getline(s, line)) ++rows;
  EXPECT_EQ(rows, 7);
  EXPECT_NE(scatter.str().find("1,\"b,c\","), std::string::npos);
  EXPECT_NE(scatter.str().find("2,\"d\"\"e\","), std::string::npos);
  EXPECT_THROW(write_embedding_scatter(scatter, f, labels, 0, 20), UsageError);

  std::ostringstream bars;
  write_component_bars(bars, f, labels, {0, 4, 6}, 20);
  std::istringstream b(bars.str());
  std::getline(b, line);
  EXPECT_EQ(std::count(line.begin(), line.end(), ','), 21);
  rows = 0;
  while (std::getline(b, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 21);
  }
  EXPECT_EQ(rows, 3);
  EXPECT_THROW(write_component_bars(bars, f, labels, {9}, 20), UsageError);
  EXPECT_THROW(write_component_bars(bars, f, labels, {0}, 21), UsageError);

  Matrix samples = standard_normal_matrix(100, 3, rng);
  samples.col(2).setConstant(1.0);
  std::ostringstream hist;
  write_kurtosis_hist(hist, kurtosis_per_class(samples), {});
  std::istringstream h(hist.str());
  std::getline(h, line);
  EXPECT_EQ(line, "class_id,label,kurtosis");
  rows = 0;
  while (std::getline(h, line)) ++rows;
  EXPECT_EQ(rows, 3);
  EXPECT_NE(hist.str().find("2,2,undefined"), std::string::npos);
  EXPECT_THROW(parse_plot_kind("pie-chart"), UsageError);
  EXPECT_EQ(parse_plot_kind(to_string(PlotKind::component_bars)), PlotKind::component_bars);
}

TEST(Pipeline, WritesArtifactsAndChecksEmbeddingOrder) {
  TempDir dir;
  ZeroShotWorldSpec spec;
  spec.seen = 10;
  spec.unseen = 4;
  spec.attribute_dim = 6;
  spec.train_per_class = 30;
  spec.test_per_class = 10;
  io::RunConfig cfg = write_zeroshot_world(generate_zeroshot_world(spec), dir.path().string());
  cfg.whiten_dim = 5;
  cfg.visual = VisualKind::ica;
  cfg.ica.epochs = 2;
  cfg.ica.batch_size = 50;
  const PipelineResult r = run_pipeline(cfg);
  for (const char* name : {"pca.model", "ica.model", "embedding.bin", "embedding.bin.classes", "cca.model",
                           "index.model", "results.csv"})
    EXPECT_TRUE(fs::exists(dir.path() / "run" / name)) << name;
  EXPECT_EQ(r.results.size(), 12u);
  EXPECT_EQ(r.correlations.size(), 5);
  EXPECT_LE(r.semantic_dim, 14);

  const TaxonomyGraph g = load_taxonomy(dir / "taxonomy.tsv", dir / "registry.tsv");
  EXPECT_EQ(read_embedding(dir / "run/embedding.bin", g).cols(), 14);
  auto ids = io::read_lines(dir / "run/embedding.bin.classes");
  std::swap(ids[0], ids[1]);
  io::write_lines(ids, dir / "run/embedding.bin.classes");
  EXPECT_THROW(read_embedding(dir / "run/embedding.bin", g), DataError);

  const io::RunConfig from_file = io::load_config(dir / "world.cfg");
  EXPECT_EQ(from_file.train_outputs, "train_outputs.bin");
  EXPECT_EQ(from_file.resolve(from_file.taxonomy), dir / "taxonomy.tsv");

  io::RunConfig missing = cfg;
  missing.out_dir.clear();
  EXPECT_THROW(run_pipeline(missing), UsageError);
  io::RunConfig too_wide = cfg;
  too_wide.whiten_dim = 10;
  EXPECT_THROW(run_pipeline(too_wide), DataError);
}

TEST(Pipeline, ClassMeansFromDataAndRepeatability) {
  TempDir dir;
  ZeroShotWorldSpec spec;
  spec.seen = 8;
  spec.unseen = 4;
  spec.attribute_dim = 6;
  spec.train_per_class = 30;
  spec.test_per_class = 10;
  io::RunConfig cfg = write_zeroshot_world(generate_zeroshot_world(spec), dir.path().string());
  cfg.whiten_dim = 4;
  cfg.class_means_from_data = true;
  cfg.out_dir = "a";
  run_pipeline(cfg);
  cfg.out_dir = "b";
  cfg.threads = 3;
  run_pipeline(cfg);
  for (const char* name : {"pca.model", "cca.model", "index.model", "results.csv"})
    EXPECT_EQ(slurp(dir / (std::string("a/") + name)), slurp(dir / (std::string("b/") + name))) << name;
}

}  // namespace
}  // namespace ulnn
