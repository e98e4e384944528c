// tools/ulnn.cpp
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

// ulnn command line: every pipeline stage as a subcommand over the binary
// matrix, model, taxonomy and registry files.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ulnn/ulnn.hpp"

namespace {

using namespace ulnn;

struct Context {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
  std::vector<std::string> sets;
  bool quiet = false;
  io::RunConfig cfg;

  std::ostream* log() const { return quiet ? nullptr : &std::cerr; }

  void load() {
    if (!config_path.empty()) cfg = io::load_config(config_path);
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    for (const auto& [k, v] : overrides) cfg.set(k, v);
    cfg.validate();
  }
};

/// Adds a flag whose value is applied to RunConfig key `key` after the
/// config file has been read.
CLI::Option* config_option(CLI::App* app, Context& ctx, const std::string& flag, const std::string& key,
                           const std::string& help) {
  return app->add_option_function<std::string>(
      flag, [&ctx, key](const std::string& v) { ctx.overrides.emplace_back(key, v); }, help);
}

std::vector<std::string> registry_labels(const std::string& path) {
  std::vector<std::string> labels;
  if (path.empty()) return labels;
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  for (const auto& c : read_registry(in)) labels.push_back(c.label.empty() ? c.node : c.label);
  return labels;
}

std::string label_of(const std::vector<std::string>& labels, Index c) {
  return c < static_cast<Index>(labels.size()) ? labels[static_cast<std::size_t>(c)] : std::to_string(c);
}

void with_output(const std::string& path, const std::function<void(std::ostream&)>& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  fn(out);
}

std::vector<Index> parse_index_list(const std::string& s) {
  std::vector<Index> out;
  std::stringstream is(s);
  std::string item;
  while (std::getline(is, item, ',')) {
    try {
      out.push_back(static_cast<Index>(std::stoll(item)));
    } catch (const std::exception&) {
      throw UsageError("expected a comma separated index list, got '" + s + "'");
    }
  }
  return out;
}

IcaModel run_ica(const Matrix& rows, const WhiteningModel& wm, const Context& ctx) {
  IcaConfig ic = ctx.cfg.ica;
  ic.seed = ctx.cfg.seed;
  std::ostream* log = ctx.log();
  return train_ica(rows, wm, ic, [log](const EpochTrace& t, const Matrix&) {
    if (log)
      *log << "epoch " << t.epoch << " lr " << t.learning_rate << " objective " << t.objective << " |VV'-I| "
           << t.orthogonality << " (max " << t.max_orthogonality << ")\n";
  });
}

VisualFeatures load_visual(const std::string& path) {
  return io::visual_features_from_model(io::read_model(path));
}

}  // namespace

int main(int argc, char** argv) {
  Context ctx;
  CLI::App app{"ulnn: unsupervised analysis of classifier outputs and zero-shot transfer"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", ctx.config_path, "key = value run configuration file")->check(CLI::ExistingFile);
  config_option(&app, ctx, "--seed", "seed", "random seed");
  config_option(&app, ctx, "--threads", "threads", "worker threads");
  app.add_option("--set", ctx.sets, "override any config key (key=value)");
  app.add_flag("--quiet,-q", ctx.quiet, "no progress output on stderr");

  std::function<void()> run;
  auto subcommand = [&](const std::string& name, const std::string& help) {
    CLI::App* sub = app.add_subcommand(name, help);
    return sub;
  };

  // transform
  std::string in_path, out_path, kind = "softmax";
  double temperature = 1.0;
  {
    auto* sub = subcommand("transform", "apply softmax, normalized-logits or temperature-rescale to each row");
    sub->add_option("-i,--input", in_path, "input matrix (rows = samples)")->required();
    sub->add_option("-o,--output", out_path, "output matrix")->required();
    sub->add_option("--kind", kind, "softmax | normalized-logits | temperature-rescale");
    sub->add_option("--temperature,-T", temperature, "temperature");
    sub->callback([&] {
      run = [&] {
        const Matrix x = io::read_matrix(in_path);
        io::write_matrix(apply_transform_rows(x, OutputTransform::parse(kind, temperature)), out_path);
      };
    });
  }

  // stats
  std::optional<std::string> stats_kind;
  {
    auto* sub = subcommand("stats", "per-class excess kurtosis of output rows");
    sub->add_option("-i,--input", in_path, "input matrix")->required();
    sub->add_option("-o,--output", out_path, "CSV destination (default stdout)");
    sub->add_option("--transform", stats_kind, "transform rows first");
    sub->add_option("--temperature,-T", temperature, "temperature for the transform");
    sub->callback([&] {
      run = [&] {
        Matrix x = io::read_matrix(in_path);
        if (stats_kind) x = apply_transform_rows(x, OutputTransform::parse(*stats_kind, temperature));
        const KurtosisReport r = kurtosis_per_class(x);
        with_output(out_path, [&](std::ostream& os) {
          os.precision(17);
          os << "class_id,mean,variance,kurtosis\n";
          for (Index j = 0; j < r.mean.size(); ++j) {
            os << j << ',' << r.mean[j] << ',' << r.variance[j] << ',';
            if (r.kurtosis[static_cast<std::size_t>(j)])
              os << *r.kurtosis[static_cast<std::size_t>(j)];
            else
              os << "undefined";
            os << '\n';
          }
        });
      };
    });
  }

  // pca
  {
    auto* sub = subcommand("pca", "fit the PCA whitening model");
    sub->add_option("-i,--input", in_path, "training outputs (rows = samples)")->required();
    sub->add_option("-o,--output", out_path, "whitening model")->required();
    config_option(sub, ctx, "--dim,-d", "whiten_dim", "retained dimension d");
    config_option(sub, ctx, "--transform", "fit_transform", "softmax | normalized-logits");
    config_option(sub, ctx, "--temperature,-T", "fit_temperature", "softmax temperature");
    config_option(sub, ctx, "--chunk-rows", "chunk_rows", "rows per accumulation chunk");
    sub->callback([&] {
      run = [&] {
        const Matrix x = apply_transform_rows(io::read_matrix(in_path), ctx.cfg.fit());
        const auto wm = WhiteningModel::fit_rows(x, ctx.cfg.whiten_dim, ctx.cfg.chunk_rows, ctx.cfg.threads);
        io::write_model(io::to_model(wm, ctx.cfg.fit().tag()), out_path);
        if (auto* log = ctx.log())
          *log << "kept " << wm.dim() << " of " << wm.valid_rank() << " valid dimensions, top eigenvalue "
               << wm.eigenvalues()[0] << '\n';
      };
    });
  }

  // ica
  std::string whitening_path, trace_path;
  {
    auto* sub = subcommand("ica", "learn the ICA demixing matrix");
    sub->add_option("-i,--input", in_path, "training outputs (rows = samples)")->required();
    sub->add_option("-o,--output", out_path, "ICA model")->required();
    sub->add_option("--whitening", whitening_path, "existing whitening model (else fit one)");
    sub->add_option("--trace", trace_path, "per-epoch CSV trace");
    config_option(sub, ctx, "--dim,-d", "whiten_dim", "retained dimension d");
    config_option(sub, ctx, "--transform", "fit_transform", "softmax | normalized-logits");
    config_option(sub, ctx, "--temperature,-T", "fit_temperature", "softmax temperature");
    config_option(sub, ctx, "--epochs", "ica.epochs", "training epochs");
    config_option(sub, ctx, "--batch-size", "ica.batch_size", "mini-batch size");
    config_option(sub, ctx, "--lr0", "ica.lr0", "initial learning rate");
    config_option(sub, ctx, "--halving-period", "ica.halving_period", "epochs between learning rate halvings");
    config_option(sub, ctx, "--reorthogonalize-every", "ica.reorthogonalize_every", "steps between projections");
    config_option(sub, ctx, "--correction", "ica.correction", "right-v | transpose-v");
    sub->callback([&] {
      run = [&] {
        const Matrix x = apply_transform_rows(io::read_matrix(in_path), ctx.cfg.fit());
        const WhiteningModel wm =
            whitening_path.empty() ? WhiteningModel::fit_rows(x, ctx.cfg.whiten_dim, ctx.cfg.chunk_rows, ctx.cfg.threads)
                                   : io::whitening_from_model(io::read_model(whitening_path));
        const IcaModel model = run_ica(x, wm, ctx);
        io::write_model(io::to_model(model, ctx.cfg.fit().tag()), out_path);
        if (!trace_path.empty())
          with_output(trace_path, [&](std::ostream& os) {
            os.precision(17);
            os << "epoch,learning_rate,objective,orthogonality,max_orthogonality\n";
            for (const auto& t : model.trace)
              os << t.epoch << ',' << t.learning_rate << ',' << t.objective << ',' << t.orthogonality << ','
                 << t.max_orthogonality << '\n';
          });
      };
    });
  }

  // mds
  std::string taxonomy_path, registry_path, distances_path;
  {
    auto* sub = subcommand("mds", "semantic class embedding from the taxonomy");
    sub->add_option("--taxonomy", taxonomy_path, "parent<TAB>child edge list")->required();
    sub->add_option("--registry", registry_path, "class registry")->required();
    sub->add_option("-o,--output", out_path, "embedding matrix (dims x classes)")->required();
    sub->add_option("--distances", distances_path, "also write the class distance matrix");
    config_option(sub, ctx, "--max-dim", "mds_max_dim", "maximum dimensions (0 = all positive)");
    sub->callback([&] {
      run = [&] {
        const TaxonomyGraph graph = load_taxonomy(taxonomy_path, registry_path);
        const Matrix d = distance_matrix(graph, ctx.cfg.threads);
        if (!distances_path.empty()) io::write_matrix(d, distances_path);
        const Index max_dim = ctx.cfg.mds_max_dim > 0 ? ctx.cfg.mds_max_dim : graph.class_count();
        const SemanticEmbedding e = classical_mds(d, max_dim);
        write_embedding(e, graph, out_path);
        if (auto* log = ctx.log())
          *log << "retained " << e.retained << " dimensions, max distance error " << e.reconstruction_error << '\n';
      };
    });
  }

  // cca
  std::string visual_path, embedding_path, labels_path;
  bool random_visual = false;
  {
    auto* sub = subcommand("cca", "fit the visual-semantic CCA bridge");
    auto* vis = sub->add_option("--visual", visual_path, "pca, ica or visual model providing W1");
    sub->add_flag("--random", random_visual, "use a seeded random semi-orthogonal W1")->excludes(vis);
    sub->add_option("--embedding", embedding_path, "semantic embedding")->required();
    sub->add_option("--taxonomy", taxonomy_path, "edge list")->required();
    sub->add_option("--registry", registry_path, "class registry")->required();
    sub->add_option("-o,--output", out_path, "CCA model")->required();
    sub->add_option("--train-outputs", in_path, "training outputs for class_means = data");
    sub->add_option("--train-labels", labels_path, "training labels for class_means = data");
    config_option(sub, ctx, "--dims,-c", "cca_dims", "common space dimension (0 = rows of W1)");
    config_option(sub, ctx, "--ridge", "cca_ridge", "relative ridge");
    config_option(sub, ctx, "--dim,-d", "whiten_dim", "rows of the random W1");
    config_option(sub, ctx, "--class-means", "class_means", "identity | data");
    sub->callback([&] {
      run = [&] {
        if (visual_path.empty() && !random_visual) throw UsageError("cca needs --visual or --random");
        const TaxonomyGraph graph = load_taxonomy(taxonomy_path, registry_path);
        const Index n = graph.seen_count();
        const VisualFeatures visual = random_visual
                                          ? VisualFeatures{random_semi_orthogonal(ctx.cfg.whiten_dim, n, ctx.cfg.seed),
                                                           VisualKind::random}
                                          : load_visual(visual_path);
        if (visual.matrix.cols() != n)
          throw DimensionError("W1 has " + std::to_string(visual.matrix.cols()) + " columns, registry has " +
                               std::to_string(n) + " seen classes");
        const Matrix coords = read_embedding(embedding_path, graph);
        const CenteredSemantic sem = center_semantic(coords.leftCols(n), coords.rightCols(graph.unseen_count()));
        ClassMeans means;
        if (ctx.cfg.class_means_from_data) {
          if (in_path.empty() || labels_path.empty())
            throw UsageError("class_means = data needs --train-outputs and --train-labels");
          means = class_means(apply_transform_rows(io::read_matrix(in_path), ctx.cfg.query()),
                              io::read_labels(labels_path), n);
        }
        const Index c = ctx.cfg.cca_dims > 0 ? ctx.cfg.cca_dims : visual.matrix.rows();
        const CcaModel cca = fit_cca(visual_class_matrix(visual.matrix, means).f, sem.seen, c, ctx.cfg.cca_ridge);
        io::write_model(io::to_model(cca, visual), out_path);
        if (auto* log = ctx.log()) {
          *log << "canonical correlations:";
          for (Index i = 0; i < cca.correlations.size(); ++i) *log << ' ' << cca.correlations[i];
          *log << '\n';
        }
      };
    });
  }

  // index
  std::string cca_path;
  {
    auto* sub = subcommand("index", "precompute the prediction index");
    sub->add_option("--cca", cca_path, "CCA model")->required();
    sub->add_option("--embedding", embedding_path, "semantic embedding")->required();
    sub->add_option("--taxonomy", taxonomy_path, "edge list")->required();
    sub->add_option("--registry", registry_path, "class registry")->required();
    sub->add_option("-o,--output", out_path, "index model")->required();
    sub->callback([&] {
      run = [&] {
        const io::ModelFile m = io::read_model(cca_path);
        const CcaModel cca = io::cca_from_model(m);
        const TaxonomyGraph graph = load_taxonomy(taxonomy_path, registry_path);
        const Index n = graph.seen_count();
        const Matrix coords = read_embedding(embedding_path, graph);
        const CenteredSemantic sem = center_semantic(coords.leftCols(n), coords.rightCols(graph.unseen_count()));
        io::write_model(io::to_model(build_index(cca, m.matrix("w1"), sem.seen, sem.unseen, ctx.log())), out_path);
      };
    });
  }

  // predict
  std::string index_path;
  Index top_k = 5;
  std::string pool_name = "both";
  {
    auto* sub = subcommand("predict", "rank classes for each output row");
    sub->add_option("--index", index_path, "index model")->required();
    sub->add_option("-i,--input", in_path, "raw outputs (rows = samples)")->required();
    sub->add_option("-o,--output", out_path, "CSV destination (default stdout)");
    sub->add_option("--top-k,-k", top_k, "ranked entries per row");
    sub->add_option("--pool", pool_name, "seen | unseen | both");
    sub->add_option("--registry", registry_path, "class registry for labels");
    config_option(sub, ctx, "--transform", "query_transform", "softmax | normalized-logits");
    config_option(sub, ctx, "--temperature,-T", "query_temperature", "softmax temperature");
    sub->callback([&] {
      run = [&] {
        if (top_k < 1) throw UsageError("--top-k must be at least 1");
        const ZeroShotIndex index = io::index_from_model(io::read_model(index_path));
        const Matrix x = apply_transform_rows(io::read_matrix(in_path), ctx.cfg.query());
        const Pool pool = parse_pool(pool_name);
        const auto labels = registry_labels(registry_path);
        with_output(out_path, [&](std::ostream& os) {
          os.precision(17);
          os << "sample,rank,class_id,label,score\n";
          for (Index r = 0; r < x.rows(); ++r) {
            const Prediction p = predict(index, x.row(r).transpose(), top_k, pool);
            for (std::size_t k = 0; k < p.ranked.size(); ++k)
              os << r << ',' << k + 1 << ',' << p.ranked[k].cls << ','
                 << detail::csv_field(label_of(labels, p.ranked[k].cls)) << ',' << p.ranked[k].score << '\n';
          }
        });
      };
    });
  }

  // evaluate
  {
    auto* sub = subcommand("evaluate", "flat hit@k of labelled outputs");
    sub->add_option("--index", index_path, "index model")->required();
    sub->add_option("-i,--input", in_path, "raw outputs (rows = samples)")->required();
    sub->add_option("--labels", labels_path, "true class index per row")->required();
    sub->add_option("-o,--output", out_path, "results CSV (default stdout)");
    config_option(sub, ctx, "--pools", "pools", "comma separated pools");
    config_option(sub, ctx, "--topk", "topk", "comma separated k values");
    config_option(sub, ctx, "--transform", "query_transform", "softmax | normalized-logits");
    config_option(sub, ctx, "--temperature,-T", "query_temperature", "softmax temperature");
    sub->callback([&] {
      run = [&] {
        const ZeroShotIndex index = io::index_from_model(io::read_model(index_path));
        const Matrix x = apply_transform_rows(io::read_matrix(in_path), ctx.cfg.query());
        const auto labels = io::read_labels(labels_path);
        std::vector<HitResult> results;
        for (Pool p : ctx.cfg.pools) {
          const auto r = topk_accuracy(index, x, labels, ctx.cfg.topk, p, ctx.cfg.threads);
          results.insert(results.end(), r.begin(), r.end());
        }
        with_output(out_path, [&](std::ostream& os) { io::write_results(os, results); });
        if (auto* log = ctx.log(); log && !out_path.empty()) *log << io::format_results_table(results);
      };
    });
  }

  // rank
  std::string model_path;
  Index component = 0;
  Index top = 5;
  bool table = false;
  {
    auto* sub = subcommand("rank", "classes ranked by a single visual component");
    sub->add_option("--model", model_path, "pca, ica or visual model")->required();
    sub->add_option("--component", component, "component (row) index");
    sub->add_flag("--table", table, "per-component top classes for components that dominate some class");
    sub->add_option("--top", top, "classes per component");
    sub->add_option("--registry", registry_path, "class registry for labels");
    sub->add_option("-o,--output", out_path, "CSV destination (default stdout)");
    sub->callback([&] {
      run = [&] {
        const Matrix w = load_visual(model_path).matrix;
        const auto labels = registry_labels(registry_path);
        std::vector<Index> comps{component};
        if (table) {
          comps.clear();
          for (const auto& [comp, count] : component_table(w)) comps.push_back(comp);
        }
        with_output(out_path, [&](std::ostream& os) {
          os.precision(17);
          os << "component,rank,class_id,label,value\n";
          for (Index comp : comps) {
            const auto ranked = rank_classes_by_component(w, comp, top);
            for (std::size_t k = 0; k < ranked.size(); ++k)
              os << comp << ',' << k + 1 << ',' << ranked[k].cls << ','
                 << detail::csv_field(label_of(labels, ranked[k].cls)) << ',' << ranked[k].score << '\n';
          }
        });
      };
    });
  }

  // neighbors
  std::string class_key, space = "visual";
  {
    auto* sub = subcommand("neighbors", "nearest classes by visual cosine or taxonomy similarity");
    sub->add_option("--class", class_key, "class index, node id or label")->required();
    sub->add_option("--space", space, "visual | semantic");
    sub->add_option("--model", model_path, "visual model (visual space)");
    sub->add_option("--taxonomy", taxonomy_path, "edge list (semantic space)");
    sub->add_option("--registry", registry_path, "class registry");
    sub->add_option("--top", top, "neighbors to list");
    sub->add_option("-o,--output", out_path, "CSV destination (default stdout)");
    sub->callback([&] {
      run = [&] {
        std::vector<ScoredClass> ranked;
        std::vector<std::string> labels = registry_labels(registry_path);
        auto resolve_index = [&](const TaxonomyGraph* g) -> Index {
          if (g) return g->find_class(class_key);
          for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == class_key) return static_cast<Index>(i);
          try {
            return static_cast<Index>(std::stoll(class_key));
          } catch (const std::exception&) {
            throw UsageError("unknown class '" + class_key + "'");
          }
        };
        if (space == "visual") {
          if (model_path.empty()) throw UsageError("visual neighbors need --model");
          const Matrix w = load_visual(model_path).matrix;
          ranked = nearest_classes_visual(resolve_index(nullptr), w, top);
        } else if (space == "semantic") {
          if (taxonomy_path.empty() || registry_path.empty())
            throw UsageError("semantic neighbors need --taxonomy and --registry");
          const TaxonomyGraph graph = load_taxonomy(taxonomy_path, registry_path);
          ranked = nearest_classes_semantic(resolve_index(&graph), graph, top);
        } else {
          throw UsageError("--space must be visual or semantic");
        }
        with_output(out_path, [&](std::ostream& os) {
          os.precision(17);
          os << "rank,class_id,label,score\n";
          for (std::size_t k = 0; k < ranked.size(); ++k)
            os << k + 1 << ',' << ranked[k].cls << ',' << detail::csv_field(label_of(labels, ranked[k].cls)) << ','
               << ranked[k].score << '\n';
        });
      };
    });
  }

  // synth-ica
  IcaWorldSpec ica_spec;
  std::string mixing_path, sources_path;
  {
    auto* sub = subcommand("synth-ica", "Laplace sources mixed by a conditioned random matrix");
    sub->add_option("-o,--output", out_path, "mixed data (rows = samples)")->required();
    sub->add_option("--mixing", mixing_path, "write the mixing matrix A");
    sub->add_option("--sources-out", sources_path, "write the sources");
    sub->add_option("--sources", ica_spec.sources, "source count");
    sub->add_option("--samples", ica_spec.samples, "sample count");
    sub->add_option("--condition", ica_spec.condition_bound, "condition number bound");
    sub->add_option("--max-tries", ica_spec.max_tries, "resampling limit");
    sub->add_flag("--identity", ica_spec.identity_mixing, "use A = I");
    sub->callback([&] {
      run = [&] {
        ica_spec.seed = ctx.cfg.seed;
        const IcaWorld w = generate_ica_world(ica_spec);
        io::write_matrix(w.data, out_path);
        if (!mixing_path.empty()) io::write_matrix(w.mixing, mixing_path);
        if (!sources_path.empty()) io::write_matrix(w.sources, sources_path);
      };
    });
  }

  // synth-world
  ZeroShotWorldSpec world_spec;
  {
    auto* sub = subcommand("synth-world", "synthetic zero-shot world with outputs, taxonomy and registry");
    sub->add_option("-o,--output", out_path, "output directory")->required();
    sub->add_option("--attribute-dim", world_spec.attribute_dim, "latent attribute dimension");
    sub->add_option("--seen", world_spec.seen, "seen classes");
    sub->add_option("--unseen", world_spec.unseen, "unseen classes");
    sub->add_option("--noise", world_spec.noise, "per-sample attribute noise std");
    sub->add_option("--logit-noise", world_spec.logit_noise, "per-logit noise std");
    sub->add_option("--logit-scale", world_spec.logit_scale, "logit scale");
    sub->add_option("--branching", world_spec.branching, "taxonomy branching factor");
    sub->add_option("--latent-branching", world_spec.latent_branching, "latent hierarchy fan-out");
    sub->add_option("--spread", world_spec.spread, "first hierarchy step std");
    sub->add_option("--decay", world_spec.decay, "per-level step decay");
    sub->add_option("--train-per-class", world_spec.train_per_class, "training rows per seen class");
    sub->add_option("--test-per-class", world_spec.test_per_class, "test rows per class");
    sub->callback([&] {
      run = [&] {
        world_spec.seed = ctx.cfg.seed;
        const ZeroShotWorld w = generate_zeroshot_world(world_spec);
        write_zeroshot_world(w, out_path);
        if (w.spearman < 0.5)
          std::cerr << "warning: taxonomy/attribute Spearman correlation " << w.spearman << " is below 0.5\n";
        else if (auto* log = ctx.log())
          *log << "taxonomy/attribute Spearman correlation " << w.spearman << '\n';
      };
    });
  }

  // plotdata
  std::string plot_kind, components = "0,1", class_list;
  std::optional<std::string> plot_transform;
  Index bar_dims = 0;
  {
    auto* sub = subcommand("plotdata", "CSV tables for external plotting");
    sub->add_option("--kind", plot_kind, "embedding-scatter | component-bars | kurtosis-hist")->required();
    sub->add_option("-o,--output", out_path, "CSV destination")->required();
    sub->add_option("--model", model_path, "visual model (scatter, bars)");
    sub->add_option("--embedding", embedding_path, "any dims x classes matrix instead of a model");
    sub->add_option("--components", components, "two component indices for the scatter");
    sub->add_option("--classes", class_list, "comma separated classes for the bars");
    sub->add_option("--dims", bar_dims, "components per bar row (0 = all)");
    sub->add_option("-i,--input", in_path, "outputs for kurtosis-hist");
    sub->add_option("--transform", plot_transform, "transform for kurtosis-hist input (default none)");
    sub->add_option("--temperature,-T", temperature, "temperature for the transform");
    sub->add_option("--registry", registry_path, "class registry for labels");
    sub->callback([&] {
      run = [&] {
        const PlotKind pk = parse_plot_kind(plot_kind);
        const auto labels = registry_labels(registry_path);
        auto features = [&] {
          if (!embedding_path.empty()) return io::read_matrix(embedding_path);
          if (model_path.empty()) throw UsageError(plot_kind + " needs --model or --embedding");
          return load_visual(model_path).matrix;
        };
        with_output(out_path, [&](std::ostream& os) {
          switch (pk) {
            case PlotKind::embedding_scatter: {
              const auto comps = parse_index_list(components);
              if (comps.size() != 2) throw UsageError("--components needs exactly two indices");
              write_embedding_scatter(os, features(), labels, comps[0], comps[1]);
              break;
            }
            case PlotKind::component_bars: {
              const Matrix f = features();
              std::vector<Index> classes = parse_index_list(class_list);
              if (classes.empty()) throw UsageError("component-bars needs --classes");
              write_component_bars(os, f, labels, classes, bar_dims > 0 ? bar_dims : f.rows());
              break;
            }
            case PlotKind::kurtosis_hist: {
              if (in_path.empty()) throw UsageError("kurtosis-hist needs --input");
              Matrix x = io::read_matrix(in_path);
              if (plot_transform) x = apply_transform_rows(x, OutputTransform::parse(*plot_transform, temperature));
              write_kurtosis_hist(os, kurtosis_per_class(x), labels);
              break;
            }
          }
        });
      };
    });
  }

  // pipeline
  {
    auto* sub = subcommand("pipeline", "run every stage from one config file");
    config_option(sub, ctx, "--out-dir,-o", "out_dir", "output directory");
    config_option(sub, ctx, "--visual", "visual", "pca | ica | random");
    sub->callback([&] {
      run = [&] {
        const PipelineResult r = run_pipeline(ctx.cfg, ctx.log());
        if (ctx.quiet) return;
        std::cout << io::format_results_table(r.results);
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    ctx.load();
    if (run) run();
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
