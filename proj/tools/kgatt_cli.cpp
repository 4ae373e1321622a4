#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "kgatt/attention.hpp"
#include "kgatt/checkpoint.hpp"
#include "kgatt/evaluation.hpp"
#include "kgatt/graph_store.hpp"
#include "kgatt/interpret.hpp"
#include "kgatt/perturbation.hpp"
#include "kgatt/reports.hpp"
#include "kgatt/text_io.hpp"
#include "kgatt/training.hpp"

namespace fs = std::filesystem;
using namespace kgatt;

namespace {

constexpr int kUsageError = 2;

/// Raised for bad user input that should exit with the usage code.
struct UsageError : Error {
  using Error::Error;
};

struct Globals {
  std::uint64_t seed = 0;
  std::string config_path;
  std::size_t threads = 0;
};

/// key = value lines; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> read_config_file(const fs::path& path) {
  auto in = open_input(path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t line_no = 0;
  auto trim = [](std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return std::string();
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
  };
  while (read_line(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const std::string body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value in " + path.string(), line_no);
    out.emplace_back(trim(std::string_view(body).substr(0, eq)), trim(std::string_view(body).substr(eq + 1)));
  }
  return out;
}

/// Training options: config file first, then explicit flags on top.
struct TrainFlags {
  std::optional<std::size_t> dim, negatives, epochs, batch_size, validate_every, validation_triples;
  std::optional<double> embedding_dropout, link_dropout, learning_rate;
  std::optional<std::string> decoder, attention;
  std::optional<bool> use_bias;
};

void add_train_flags(CLI::App* cmd, TrainFlags& f) {
  cmd->add_option("--dim", f.dim, "embedding dimension");
  cmd->add_option("--negatives", f.negatives, "negatives per positive");
  cmd->add_option("--epochs", f.epochs, "training epochs");
  cmd->add_option("--batch-size", f.batch_size, "positives per batch");
  cmd->add_option("--embedding-dropout", f.embedding_dropout, "embedding dropout probability");
  cmd->add_option("--link-dropout", f.link_dropout, "link dropout probability");
  cmd->add_option("--learning-rate", f.learning_rate, "Adam learning rate");
  cmd->add_option("--decoder", f.decoder, "distmult or complex");
  cmd->add_option("--attention", f.attention, "learned or fixed");
  cmd->add_option("--use-bias", f.use_bias, "per-entity bias (true/false)");
  cmd->add_option("--validate-every", f.validate_every, "epochs between validation checks (0 = never)");
  cmd->add_option("--validation-triples", f.validation_triples, "cap on validation triples (0 = all)");
}

TrainConfig resolve_config(const Globals& g, const TrainFlags& f) {
  TrainConfig c;
  if (!g.config_path.empty()) {
    for (const auto& [k, v] : read_config_file(g.config_path)) {
      if (!set_config_value(c, k, v)) throw UsageError("unknown config key '" + k + "' in " + g.config_path);
    }
  }
  c.seed = g.seed;
  if (f.dim) c.dim = *f.dim;
  if (f.negatives) c.negatives = *f.negatives;
  if (f.epochs) c.epochs = *f.epochs;
  if (f.batch_size) c.batch_size = *f.batch_size;
  if (f.validate_every) c.validate_every = *f.validate_every;
  if (f.validation_triples) c.validation_triples = *f.validation_triples;
  if (f.embedding_dropout) c.embedding_dropout = *f.embedding_dropout;
  if (f.link_dropout) c.link_dropout = *f.link_dropout;
  if (f.learning_rate) c.learning_rate = *f.learning_rate;
  if (f.decoder) c.decoder = parse_decoder(*f.decoder);
  if (f.attention) c.attention = parse_attention_mode(*f.attention);
  if (f.use_bias) c.use_bias = *f.use_bias;
  c.validate();
  return c;
}

void write_config_echo(const fs::path& path, const std::vector<std::pair<std::string, std::string>>& kv) {
  auto out = open_output(path);
  for (const auto& [k, v] : kv) out << k << " = " << v << "\n";
}

fs::path snapshot_path(const fs::path& graph) {
  return fs::is_directory(graph) ? graph / "graph.snapshot" : graph;
}

struct Run {
  KnowledgeGraph kg;
  Checkpoint checkpoint;
  std::vector<double> coefficients;
};

Run load_run(const fs::path& dir) {
  if (!fs::exists(dir / "checkpoint.txt")) throw Error("no checkpoint.txt in run directory " + dir.string());
  if (!fs::exists(dir / "graph.snapshot")) throw Error("no graph.snapshot in run directory " + dir.string());
  Run run;
  run.kg = load_snapshot(dir / "graph.snapshot");
  if (!run.kg.indexed()) throw Error("graph snapshot in " + dir.string() + " is not indexed");
  run.checkpoint = load_checkpoint(dir / "checkpoint.txt");
  check_dimensions(run.checkpoint.params, run.kg);
  run.coefficients = attention_coefficients(run.checkpoint.params, run.kg, run.checkpoint.config.attention);
  return run;
}

Triple resolve_triple(const KnowledgeGraph& kg, const std::string& s, const std::string& r, const std::string& o) {
  const auto& v = kg.vocabulary();
  const auto si = v.find_entity(s), oi = v.find_entity(o);
  const auto ri = v.find_relation(r);
  if (!si) throw UsageError("unknown entity '" + s + "'");
  if (!ri) throw UsageError("unknown relation '" + r + "'");
  if (!oi) throw UsageError("unknown entity '" + o + "'");
  return {*si, *ri, *oi};
}

// ---------------------------------------------------------------------------

int cmd_prepare(const Globals& g, const fs::path& triples, const std::string& condition_name, double fraction,
                const fs::path& out) {
  ConditionKind kind;
  try {
    kind = parse_condition(condition_name);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  std::vector<LoadReport> reports;
  const auto source = load_dataset(triples, &reports);
  Rng rng(g.seed);
  const auto condition = build_condition(source, kind, fraction, rng);
  auto kg = apply_condition(source, condition);
  kg.build_index(true);
  save_snapshot(out / "graph.snapshot", kg);
  {
    auto f = open_output(out / "edges.tsv");
    for (const auto& fact : kg.facts()) {
      const auto& v = kg.vocabulary();
      f << v.entity_name(fact.triple.subject) << '\t' << v.relation_name(fact.triple.relation) << '\t'
        << v.entity_name(fact.triple.object) << '\n';
    }
  }
  {
    auto f = open_output(out / "provenance.csv");
    write_provenance_csv(f, kg);
  }
  write_config_echo(out / "config.txt", {{"command", "prepare"},
                                         {"triples", triples.string()},
                                         {"condition", std::string(to_string(kind))},
                                         {"fraction", format_double(condition.fraction)},
                                         {"seed", std::to_string(g.seed)}});
  std::size_t targets = 0;
  for (const auto& f : kg.facts()) targets += f.flags.train_target ? 1 : 0;
  std::cout << "condition " << to_string(kind) << ": " << kg.facts().size() << " edges (" << targets
            << " targets) from " << source.split(Split::train).size() << " train triples\n";
  return 0;
}

int cmd_gen_dd(const Globals& g, double p, double q, std::size_t nodes, double gold_frac, double add_frac,
               const fs::path& out) {
  Rng rng(g.seed);
  const auto graph = generate_dd(p, q, nodes, rng);
  const auto split = split_dd(graph, gold_frac, add_frac, rng);
  const auto kg = dd_knowledge_graph(graph, split);
  save_snapshot(out / "graph.snapshot", kg);
  {
    auto f = open_output(out / "edges.tsv");
    auto emit = [&](const auto& edges, std::string_view tag) {
      for (const auto& [a, b] : edges) f << 'n' << a << "\tn" << b << '\t' << tag << '\n';
    };
    emit(split.gold, tags::gold);
    emit(split.add, tags::add);
    emit(split.noise, tags::noise);
  }
  {
    auto f = open_output(out / "provenance.csv");
    write_provenance_csv(f, kg);
  }
  {
    auto f = open_output(out / "trace.csv");
    f << "node,parent\n";
    for (std::size_t i = 0; i < graph.parent.size(); ++i) {
      f << i << ',';
      if (graph.parent[i] == DDGraph::kNoParent) f << "";
      else f << graph.parent[i];
      f << '\n';
    }
  }
  const std::string stats = "nodes " + std::to_string(graph.num_nodes) + " edges " +
                            std::to_string(graph.edges.size()) + " edge_vertex_ratio " +
                            format_double(edge_vertex_ratio(graph)) + " gold " + std::to_string(split.gold.size()) +
                            " add " + std::to_string(split.add.size()) + " noise " +
                            std::to_string(split.noise.size());
  {
    auto f = open_output(out / "stats.txt");
    f << stats << '\n';
  }
  write_config_echo(out / "config.txt", {{"command", "gen-dd"},
                                         {"p", format_double(p)},
                                         {"q", format_double(q)},
                                         {"nodes", std::to_string(nodes)},
                                         {"gold_frac", format_double(gold_frac)},
                                         {"add_frac", format_double(add_frac)},
                                         {"seed", std::to_string(g.seed)}});
  std::cout << stats << '\n';
  return 0;
}

int cmd_train(const Globals& g, const TrainFlags& flags, const fs::path& graph, const fs::path& run) {
  const auto config = resolve_config(g, flags);
  const auto kg = load_snapshot(snapshot_path(graph));
  if (!kg.indexed()) throw Error("graph snapshot is not indexed; run prepare first");
  write_config_echo(run / "config.txt", to_key_values(config));
  const auto result = train(config, kg, [](const EpochStats& s) {
    std::cerr << "epoch " << s.epoch << " loss " << format_double(s.loss);
    if (s.validation_mrr == s.validation_mrr) std::cerr << " val_mrr " << format_double(s.validation_mrr);
    std::cerr << '\n';
  });
  save_checkpoint(run / "checkpoint.txt", Checkpoint{config, result.params});
  save_snapshot(run / "graph.snapshot", kg);
  {
    auto f = open_output(run / "train_log.csv");
    write_train_log(f, result.report);
  }
  std::cout << "trained " << result.report.epochs.size() << " epochs; snapshot " << result.report.snapshot_id
            << " (best epoch " << result.report.best_epoch << ")\n";
  return 0;
}

int cmd_evaluate(const fs::path& run_dir, const std::string& split_name, std::size_t max_triples, fs::path out) {
  const auto run = load_run(run_dir);
  Split split;
  if (split_name == "test") split = Split::test;
  else if (split_name == "valid") split = Split::valid;
  else if (split_name == "train") split = Split::train;
  else throw UsageError("unknown split '" + split_name + "' (expected train, valid or test)");
  if (out.empty()) out = run_dir;
  EvalOptions opts;
  opts.max_triples = max_triples;
  const auto report = evaluate(run.checkpoint.params, run.kg, split, run.checkpoint.config.decoder,
                               run.coefficients, opts);
  {
    auto f = open_output(out / "report.txt");
    f << "split = " << to_string(split) << "\n";
    write_eval_summary(f, report);
  }
  {
    auto f = open_output(out / "ranks.csv");
    write_ranks_csv(f, run.kg, report);
  }
  std::cout << "mrr " << format_double(report.mrr_filtered) << " (filtered), " << format_double(report.mrr_raw)
            << " (raw); hits@10 " << format_double(report.hits_filtered[2]) << " (filtered)\n";
  return 0;
}

int cmd_interrogate(const fs::path& run_dir, const std::vector<fs::path>& extra_runs,
                    const std::vector<std::string>& triple, const std::string& mode_name, fs::path out) {
  const auto run = load_run(run_dir);
  const Triple target = resolve_triple(run.kg, triple[0], triple[1], triple[2]);
  OcclusionOptions opts;
  opts.decoder = run.checkpoint.config.decoder;
  opts.attention = run.checkpoint.config.attention;
  if (mode_name == "renormalize") opts.mode = OcclusionMode::renormalize;
  else if (mode_name == "freeze") opts.mode = OcclusionMode::freeze_siblings;
  else throw UsageError("unknown occlusion mode '" + mode_name + "' (expected renormalize or freeze)");
  std::vector<ModelParameters> params{run.checkpoint.params};
  for (const auto& extra : extra_runs) {
    auto other = load_checkpoint(extra / "checkpoint.txt");
    check_dimensions(other.params, run.kg);
    params.push_back(std::move(other.params));
  }
  const auto report = occlusion_scan(params, run.kg, target, opts);
  if (out.empty()) out = run_dir;
  auto f = open_output(out / "occlusion.csv");
  write_occlusion_csv(f, run.kg, report);
  std::cout << "baseline probability " << format_double(report.baseline) << "; " << report.rows.size()
            << " edges scanned\n";
  return 0;
}

int cmd_influencers(const fs::path& run_dir, const std::vector<fs::path>& extra_runs, const std::string& entity,
                    std::size_t k, fs::path out) {
  const auto run = load_run(run_dir);
  const auto id = run.kg.vocabulary().find_entity(entity);
  if (!id) throw UsageError("unknown entity '" + entity + "'");
  std::vector<std::vector<double>> runs{run.coefficients};
  for (const auto& extra : extra_runs) {
    const auto other = load_checkpoint(extra / "checkpoint.txt");
    check_dimensions(other.params, run.kg);
    runs.push_back(attention_coefficients(other.params, run.kg, other.config.attention));
  }
  const auto report = rank_influencers(runs, run.kg, *id, k);
  if (out.empty()) out = run_dir;
  auto f = open_output(out / "influencers.csv");
  write_influencers_csv(f, run.kg, report);
  if (!report.notice.empty()) std::cout << report.notice << '\n';
  return 0;
}

int cmd_export_weights(const fs::path& run_dir, fs::path out) {
  const auto run = load_run(run_dir);
  if (out.empty()) out = run_dir;
  auto f = open_output(out / "weights.csv");
  write_weights_csv(f, run.kg, run.checkpoint.params.attention.values, run.coefficients);
  return 0;
}

int cmd_export_embeddings(const fs::path& run_dir, fs::path out) {
  const auto run = load_run(run_dir);
  if (out.empty()) out = run_dir;
  const auto emb = encode_all(run.checkpoint.params, run.kg, run.coefficients);
  auto f = open_output(out / "embeddings.csv");
  write_embeddings_csv(f, run.kg, emb);
  return 0;
}

struct AnalyzeFlags {
  std::size_t bins = 20;
  double fraction = 0.1;
  std::string group = "flags";
  std::string scale = "normalized";
  fs::path compare;
  fs::path labels;
  double low_score = 0.5;
  std::vector<double> label_fractions = {0.05, 0.1, 0.2, 0.3, 0.4, 0.5};
  std::vector<std::string> tags;
};

int cmd_analyze_weights(const fs::path& run_dir, const AnalyzeFlags& a, fs::path out) {
  const auto run = load_run(run_dir);
  if (out.empty()) out = run_dir;
  GroupBy group;
  if (a.group == "flags") group = GroupBy::flags;
  else if (a.group == "provenance") group = GroupBy::provenance;
  else throw UsageError("unknown grouping '" + a.group + "' (expected flags or provenance)");
  WeightScale scale;
  if (a.scale == "normalized") scale = WeightScale::normalized;
  else if (a.scale == "degree-relative") scale = WeightScale::degree_relative;
  else throw UsageError("unknown scale '" + a.scale + "' (expected normalized or degree-relative)");

  {
    auto f = open_output(out / "histograms.csv");
    write_histograms_csv(f, run.kg, relation_weight_distributions(run.coefficients, run.kg, a.bins, group, scale));
  }
  const auto flagged = flag_low_weight_edges(run.coefficients, run.kg, a.fraction);
  {
    auto f = open_output(out / "flagged.csv");
    write_flagged_csv(f, run.kg, flagged);
  }
  auto summary = open_output(out / "weights_summary.txt");
  summary << "flagged = " << flagged.edges.size() << "\n";
  summary << "flag_fraction = " << format_double(a.fraction) << "\n";
  summary << "low_confidence = " << (flagged.low_confidence ? "true" : "false") << "\n";
  for (const auto& tag : a.tags) {
    const auto en = tag_enrichment(run.coefficients, run.kg, a.fraction, tag);
    summary << "enrichment." << tag << ".bottom_rate = " << format_double(en.bottom_rate) << "\n";
    summary << "enrichment." << tag << ".top_rate = " << format_double(en.top_rate) << "\n";
    summary << "enrichment." << tag << ".ratio = " << format_double(en.ratio) << "\n";
  }
  if (!a.compare.empty()) {
    const auto other = load_checkpoint(a.compare / "checkpoint.txt");
    check_dimensions(other.params, run.kg);
    const auto other_c = attention_coefficients(other.params, run.kg, other.config.attention);
    const auto sim = weight_self_similarity(run.coefficients, other_c);
    auto f = open_output(out / "self_similarity.csv");
    write_self_similarity_csv(f, run.kg, sim);
    summary << "self_similarity.pearson = " << (sim.pearson ? format_double(*sim.pearson) : "undefined") << "\n";
  }
  if (!a.labels.empty()) {
    auto in = open_input(a.labels);
    std::size_t skipped = 0;
    const auto labels = read_external_labels(in, run.kg.vocabulary(), &skipped);
    const auto points = external_label_ratio(run.coefficients, run.kg, labels, a.low_score, a.label_fractions);
    auto f = open_output(out / "label_ratio.csv");
    write_label_ratio_csv(f, points);
    summary << "labels.used = " << labels.size() << "\n";
    summary << "labels.skipped = " << skipped << "\n";
  }
  std::cout << "flagged " << flagged.edges.size() << " edges" << (flagged.low_confidence ? " (low confidence)" : "")
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Knowledge-graph link prediction with learned edge attention"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "random seed")->capture_default_str();
  app.add_option("--config", g.config_path, "key = value training config file");
  app.add_option("--threads", g.threads, "worker thread cap (0 = hardware)");

  int status = 0;
  std::function<int()> action;

  // prepare
  fs::path prep_triples, prep_out;
  std::string prep_condition = "full";
  double prep_fraction = 0.0;
  auto* prepare = app.add_subcommand("prepare", "build an experimental condition from a triple directory");
  prepare->add_option("--triples", prep_triples, "directory with train.txt (valid.txt, test.txt optional)")
      ->required();
  prepare->add_option("--condition", prep_condition, "full, half, skip, noised or sweep")->capture_default_str();
  prepare->add_option("--fraction", prep_fraction, "noise fraction for sweep");
  prepare->add_option("--out", prep_out, "output directory")->required();
  prepare->callback([&] { action = [&] { return cmd_prepare(g, prep_triples, prep_condition, prep_fraction, prep_out); }; });

  // gen-dd
  double dd_p = 0.75, dd_q = 0.0, dd_gold = 0.5, dd_add = 0.25;
  std::size_t dd_nodes = 1000;
  fs::path dd_out;
  auto* gen_dd = app.add_subcommand("gen-dd", "generate a duplication-divergence graph with Gold/Add/Noise split");
  gen_dd->add_option("--p", dd_p, "neighbour inheritance probability")->capture_default_str();
  gen_dd->add_option("--q", dd_q, "parent link probability")->capture_default_str();
  gen_dd->add_option("--nodes", dd_nodes, "target node count")->capture_default_str();
  gen_dd->add_option("--gold-frac", dd_gold, "fraction of true edges used as training targets")->capture_default_str();
  gen_dd->add_option("--add-frac", dd_add, "fraction of true edges added as adjacency only")->capture_default_str();
  gen_dd->add_option("--out", dd_out, "output directory")->required();
  gen_dd->callback([&] { action = [&] { return cmd_gen_dd(g, dd_p, dd_q, dd_nodes, dd_gold, dd_add, dd_out); }; });

  // train
  TrainFlags train_flags;
  fs::path train_graph, train_run;
  auto* train_cmd = app.add_subcommand("train", "train a model on a prepared graph");
  train_cmd->add_option("--graph", train_graph, "graph directory or snapshot file")->required();
  train_cmd->add_option("--run", train_run, "run directory to create")->required();
  add_train_flags(train_cmd, train_flags);
  train_cmd->callback([&] { action = [&] { return cmd_train(g, train_flags, train_graph, train_run); }; });

  // evaluate
  fs::path eval_run, eval_out;
  std::string eval_split = "test";
  std::size_t eval_max = 0;
  auto* eval_cmd = app.add_subcommand("evaluate", "rank held-out triples with a trained run");
  eval_cmd->add_option("--run", eval_run, "run directory")->required();
  eval_cmd->add_option("--split", eval_split, "train, valid or test")->capture_default_str();
  eval_cmd->add_option("--max-triples", eval_max, "evaluate at most this many triples (0 = all)");
  eval_cmd->add_option("--out", eval_out, "output directory (default: the run directory)");
  eval_cmd->callback([&] { action = [&] { return cmd_evaluate(eval_run, eval_split, eval_max, eval_out); }; });

  // interrogate
  fs::path inter_run, inter_out;
  std::vector<fs::path> inter_extra;
  std::vector<std::string> inter_triple;
  std::string inter_mode = "renormalize";
  auto* inter = app.add_subcommand("interrogate", "occlusion scan of one triple");
  inter->add_option("triple", inter_triple, "subject relation object")->required()->expected(3);
  inter->add_option("--run", inter_run, "run directory")->required();
  inter->add_option("--also", inter_extra, "further run directories over the same graph (for standard errors)");
  inter->add_option("--mode", inter_mode, "renormalize or freeze")->capture_default_str();
  inter->add_option("--out", inter_out, "output directory (default: the run directory)");
  inter->callback([&] { action = [&] { return cmd_interrogate(inter_run, inter_extra, inter_triple, inter_mode, inter_out); }; });

  // influencers
  fs::path infl_run, infl_out;
  std::vector<fs::path> infl_extra;
  std::string infl_entity;
  std::size_t infl_k = 6;
  auto* infl = app.add_subcommand("influencers", "top and bottom weighted incoming edges of an entity");
  infl->add_option("--run", infl_run, "run directory")->required();
  infl->add_option("--entity", infl_entity, "entity name")->required();
  infl->add_option("--k", infl_k, "edges per side")->capture_default_str();
  infl->add_option("--also", infl_extra, "further run directories over the same graph (for standard errors)");
  infl->add_option("--out", infl_out, "output directory (default: the run directory)");
  infl->callback([&] { action = [&] { return cmd_influencers(infl_run, infl_extra, infl_entity, infl_k, infl_out); }; });

  // export-weights / export-embeddings
  fs::path xw_run, xw_out, xe_run, xe_out;
  auto* xw = app.add_subcommand("export-weights", "write every edge record's raw and normalized weight");
  xw->add_option("--run", xw_run, "run directory")->required();
  xw->add_option("--out", xw_out, "output directory (default: the run directory)");
  xw->callback([&] { action = [&] { return cmd_export_weights(xw_run, xw_out); }; });
  auto* xe = app.add_subcommand("export-embeddings", "write encoded entity embeddings");
  xe->add_option("--run", xe_run, "run directory")->required();
  xe->add_option("--out", xe_out, "output directory (default: the run directory)");
  xe->callback([&] { action = [&] { return cmd_export_embeddings(xe_run, xe_out); }; });

  // analyze-weights
  fs::path aw_run, aw_out;
  AnalyzeFlags aw;
  auto* analyze = app.add_subcommand("analyze-weights", "weight histograms, low-weight flags and comparisons");
  analyze->add_option("--run", aw_run, "run directory")->required();
  analyze->add_option("--bins", aw.bins, "histogram bins")->capture_default_str();
  analyze->add_option("--fraction", aw.fraction, "bottom fraction to flag, in (0, 0.5]")->capture_default_str();
  analyze->add_option("--group", aw.group, "histogram grouping: flags or provenance")->capture_default_str();
  analyze->add_option("--scale", aw.scale, "normalized or degree-relative")->capture_default_str();
  analyze->add_option("--compare", aw.compare, "second run directory for self-similarity");
  analyze->add_option("--labels", aw.labels, "CSV subject,relation,object,score of external labels");
  analyze->add_option("--low-score", aw.low_score, "external scores below this count as low")->capture_default_str();
  analyze->add_option("--label-fractions", aw.label_fractions, "weight fractions for the label ratio curve");
  analyze->add_option("--tag", aw.tags, "provenance tag to report enrichment for (repeatable)");
  analyze->add_option("--out", aw_out, "output directory (default: the run directory)");
  analyze->callback([&] { action = [&] { return cmd_analyze_weights(aw_run, aw, aw_out); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kUsageError;
  }
  if (g.threads > 0) set_max_threads(g.threads);
  try {
    status = action();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return status;
}
