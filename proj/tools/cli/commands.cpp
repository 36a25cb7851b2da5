#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>
#include <set>
#include <thread>
#include <tuple>
#include <unordered_map>

#include "cdes/collocations.hpp"
#include "cdes/context_dump.hpp"
#include "cdes/error.hpp"
#include "cdes/gold_keys.hpp"
#include "cdes/projection.hpp"
#include "cdes/random.hpp"
#include "cdes/sense_inventory.hpp"
#include "cdes/static_table.hpp"
#include "report.hpp"

namespace cdes::cli {

namespace fs = std::filesystem;

namespace {

void require_file(const fs::path& path, std::string_view key) {
  if (path.empty()) throw ValidationError("missing required setting '" + std::string(key) + "'");
  if (!fs::is_regular_file(path)) {
    throw ValidationError("'" + std::string(key) + "' does not name a file: " + path.string());
  }
}

void optional_file(const fs::path& path, std::string_view key) {
  if (!path.empty()) require_file(path, key);
}

// Runs f(i) for i in [0, n) on up to `threads` workers; the first exception
// is rethrown after all workers finish.
template <typename F>
void parallel_for(std::size_t n, std::size_t threads, F&& f) {
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const std::size_t chunk = (n + threads - 1) / threads;
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = t * chunk; i < std::min(n, (t + 1) * chunk); ++i) f(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

StaticTable load_table(const RunConfig& c) {
  return load_static_table(c.static_table, {.lowercase = c.lowercase});
}

Json train_config_json(const RunConfig& c) {
  return Json{{"seed", c.seed},
              {"learning_rate", c.train.learning_rate},
              {"batch_size", c.train.batch_size},
              {"epochs", c.train.epochs},
              {"adam_beta1", c.train.adam_beta1},
              {"adam_beta2", c.train.adam_beta2},
              {"adam_epsilon", c.train.adam_epsilon},
              {"init_scheme", to_string(c.train.init_scheme)},
              {"activation", to_string(c.train.activation)},
              {"validation_fraction", c.train.validation_fraction}};
}

}  // namespace

// ---------------------------------------------------------------- train

void cmd_train(const RunConfig& c, std::ostream& out) {
  require_file(c.static_table, "static_table");
  require_file(c.train_dump, "train_dump");
  require_file(c.inventory, "inventory");

  const StaticTable table = load_table(c);
  const ContextDump dump = load_context_dump(c.train_dump);
  const SenseInventory inventory = load_sense_inventory(c.inventory);

  const TrainResult result = train(dump.records, table, inventory, c.train);
  const auto& r = result.report;
  const auto& m = result.model;
  const fs::path checkpoint = c.checkpoint_path();
  if (checkpoint.has_parent_path()) fs::create_directories(checkpoint.parent_path());
  save_checkpoint(m, checkpoint);

  Json json{{"command", "train"},
            {"config", train_config_json(c)},
            {"model", {{"p", m.p()}, {"q", m.q()}, {"senses", m.sense_count()},
                       {"activation", to_string(m.activation())}, {"checksum", hex64(r.checksum)}}},
            {"records", {{"total", r.records_total}, {"train", r.train_records},
                         {"validation", r.validation_records},
                         {"skipped_no_gold", r.skipped_no_gold}, {"skipped_oov", r.skipped_oov},
                         {"skipped_unknown_sense", r.skipped_unknown_sense}}},
            {"loss_convention", TrainReport::kLossConvention},
            {"initial_train_loss", r.initial_train_loss},
            {"train_loss", r.train_loss},
            {"validation_loss", r.validation_loss}};
  if (r.validation_records > 0) json["initial_validation_loss"] = r.initial_validation_loss;

  std::ostringstream text;
  text << "records   " << r.records_total << " read, " << r.train_records << " train, "
       << r.validation_records << " validation, " << r.skipped() << " skipped (no gold "
       << r.skipped_no_gold << ", oov " << r.skipped_oov << ", unknown sense "
       << r.skipped_unknown_sense << ")\n";
  text << "model     p=" << m.p() << " q=" << m.q() << " senses=" << m.sense_count()
       << " activation=" << to_string(m.activation()) << " checksum=" << hex64(r.checksum)
       << "\n";
  text << "loss      " << TrainReport::kLossConvention << ", initial " << fmt(r.initial_train_loss)
       << "\n";
  text << "epoch  train_loss" << (r.validation_loss.empty() ? "" : "  validation_loss") << "\n";
  for (std::size_t e = 0; e < r.train_loss.size(); ++e) {
    char epoch[16];
    std::snprintf(epoch, sizeof epoch, "%-6zu ", e + 1);
    text << epoch << fmt(r.train_loss[e]);
    if (!r.validation_loss.empty()) text << "  " << fmt(r.validation_loss[e]);
    text << "\n";
  }
  write_report(c.output_dir, "train_report", json, text.str());
  out << text.str();
}

// ---------------------------------------------------------------- build-bank

std::vector<CorpusSentence> load_corpus_sentences(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(FormatError::Kind::kIo, path.string(), 0, "cannot open file");
  std::vector<CorpusSentence> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw FormatError(FormatError::Kind::kMissingField, path.string(), line_no,
                        "expected sentence_id<TAB>lemmas");
    }
    CorpusSentence s{line.substr(0, tab), {}};
    std::istringstream words(line.substr(tab + 1));
    for (std::string w; words >> w;) s.lemmas.push_back(w);
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

std::unique_ptr<ClusterLabeler> make_labeler(const RunConfig& c) {
  switch (c.labeler) {
    case Labeler::kMajority: return std::make_unique<MajorityLabeler>();
    case Labeler::kFirstSense: return std::make_unique<FirstSenseLabeler>();
    case Labeler::kExternal:
      return std::make_unique<ExternalLabeler>(ExternalLabeler::load(c.labeler_file));
  }
  return nullptr;
}

struct CorpusBuild {
  SegmentMap segments;
  std::size_t lemmas = 0;
  std::size_t sentences = 0;
  std::size_t assignments = 0;
  std::size_t clusters = 0;
  std::size_t unlabeled_clusters = 0;
  std::size_t clamped = 0;
  std::string cluster_export;
};

CorpusBuild build_corpus_segments(const RunConfig& c, const SenseInventory& inventory,
                                  std::size_t q) {
  CorpusBuild build;
  const CollocationSet collocations = load_collocations(c.collocations);
  collocations.validate(inventory);
  const auto sentences = load_corpus_sentences(c.corpus_sentences);
  const ContextDump dump = load_context_dump(c.corpus_dump);
  if (dump.q != q) {
    throw DimensionError("corpus dump has q=" + std::to_string(dump.q) + ", model has q=" +
                         std::to_string(q));
  }
  std::unordered_map<std::string, const Vector*> vectors;
  for (const auto& r : dump.records) vectors.emplace(r.instance_id, &r.vector);

  std::vector<LemmaSentence> lemma_seqs;
  lemma_seqs.reserve(sentences.size());
  for (const auto& s : sentences) lemma_seqs.push_back(s.lemmas);
  build.sentences = sentences.size();

  const auto assigned = extract_collocation_contexts(lemma_seqs, collocations, c.collocation);

  // lemma -> (sentence index, inventory position of sense, sense)
  std::map<std::string, std::vector<std::tuple<std::size_t, std::size_t, std::string>>> by_lemma;
  std::unordered_map<std::string, std::size_t> sense_pos;
  for (std::size_t i = 0; i < inventory.senses().size(); ++i) {
    sense_pos.emplace(inventory.senses()[i].id, i);
  }
  for (const auto& [sense, idxs] : assigned) {
    const auto* entry = inventory.find(sense);
    for (std::size_t idx : idxs) by_lemma[entry->lemma].emplace_back(idx, sense_pos.at(sense), sense);
    build.assignments += idxs.size();
  }

  const auto labeler = make_labeler(c);
  const std::uint64_t kmeans_seed = derive_seed(c.seed, "kmeans");
  std::ostringstream exported;
  for (auto& [lemma, items] : by_lemma) {
    std::sort(items.begin(), items.end());
    std::vector<LabeledSentence> labeled;
    std::vector<std::size_t> origin;
    for (const auto& [idx, pos, sense] : items) {
      const auto it = vectors.find(sentences[idx].id);
      if (it == vectors.end()) {
        throw ValidationError("corpus sentence '" + sentences[idx].id +
                              "' has no vector in the corpus dump");
      }
      labeled.push_back({*it->second, sense});
      origin.push_back(idx);
    }
    const auto segs = corpus_segments(lemma, labeled, inventory, *labeler,
                                      derive_seed(kmeans_seed, lemma), c.kmeans_max_iter);
    ++build.lemmas;
    build.clusters += segs.clusters.k();
    build.unlabeled_clusters += segs.unlabeled_clusters;
    build.clamped += segs.clusters.k_clamped ? 1 : 0;
    for (const auto& [sense, v] : segs.segments) build.segments[sense] = v;
    for (std::size_t i = 0; i < labeled.size(); ++i) {
      const std::size_t cl = segs.clusters.assignment[i];
      const auto label = segs.clusters.labels.find(cl);
      exported << lemma << '\t' << cl << '\t' << sentences[origin[i]].id << '\t'
               << (label == segs.clusters.labels.end() ? "-" : label->second) << '\n';
    }
  }
  build.cluster_export = exported.str();
  return build;
}

}  // namespace

void cmd_build_bank(const RunConfig& c, std::ostream& out) {
  require_file(c.static_table, "static_table");
  require_file(c.inventory, "inventory");
  require_file(c.checkpoint_path(), "checkpoint");
  const bool any_corpus =
      !c.collocations.empty() || !c.corpus_sentences.empty() || !c.corpus_dump.empty();
  if (any_corpus) {
    require_file(c.collocations, "collocations");
    require_file(c.corpus_sentences, "corpus_sentences");
    require_file(c.corpus_dump, "corpus_dump");
  }
  if (c.labeler == Labeler::kExternal) require_file(c.labeler_file, "labeler_file");

  const StaticTable table = load_table(c);
  const SenseInventory inventory = load_sense_inventory(c.inventory);
  const ProjectionModel model = load_checkpoint(c.checkpoint_path());
  if (model.p() != table.dim()) {
    throw DimensionError("checkpoint has p=" + std::to_string(model.p()) +
                         ", static table has p=" + std::to_string(table.dim()));
  }
  if (inventory.gloss_count() > 0 && inventory.gloss_dim() != model.q()) {
    throw DimensionError("gloss vectors have q=" + std::to_string(inventory.gloss_dim()) +
                         ", checkpoint has q=" + std::to_string(model.q()));
  }

  const SegmentMap gloss = collect_gloss_segments(inventory);
  CorpusBuild corpus;
  if (any_corpus) corpus = build_corpus_segments(c, inventory, model.q());

  const BankBuild built = assemble_bank(model, table, inventory, gloss, corpus.segments,
                                        c.fill_policy);
  const fs::path bank_path = c.bank_path();
  if (bank_path.has_parent_path()) fs::create_directories(bank_path.parent_path());
  save_bank(built.bank, bank_path);
  fs::create_directories(c.output_dir);
  if (any_corpus) {
    std::ofstream(c.output_dir / "clusters.tsv", std::ios::binary) << corpus.cluster_export;
  }

  const auto& cov = built.coverage;
  Json json{{"command", "build-bank"},
            {"seed", c.seed},
            {"fill_policy", to_string(c.fill_policy)},
            {"labeler", to_string(c.labeler)},
            {"window", c.collocation.window},
            {"max_sentences_per_lemma", c.collocation.max_sentences_per_lemma},
            {"ukb_words", c.ukb_words},
            {"p", built.bank.p()},
            {"q", built.bank.q()},
            {"dim", built.bank.dim()},
            {"coverage", {{"inventory_senses", cov.inventory_senses},
                          {"bank_senses", cov.bank_senses},
                          {"skipped_oov", cov.skipped_oov},
                          {"skipped_policy", cov.skipped_policy},
                          {"with_gloss", cov.with_gloss},
                          {"with_corpus", cov.with_corpus},
                          {"gloss_fraction", cov.gloss_fraction()},
                          {"corpus_fraction", cov.corpus_fraction()},
                          {"projected", cov.projected},
                          {"unprojected", cov.unprojected}}},
            {"corpus", {{"sentences", corpus.sentences},
                        {"assignments", corpus.assignments},
                        {"lemmas", corpus.lemmas},
                        {"clusters", corpus.clusters},
                        {"unlabeled_clusters", corpus.unlabeled_clusters},
                        {"clamped_lemmas", corpus.clamped}}}};

  std::ostringstream text;
  text << "bank      " << cov.bank_senses << " senses of " << cov.inventory_senses
       << " in inventory, dim " << built.bank.dim() << " (p=" << built.bank.p()
       << " q=" << built.bank.q() << ")\n";
  text << "skipped   " << cov.skipped_oov << " oov lemma, " << cov.skipped_policy
       << " by fill policy " << to_string(c.fill_policy) << "\n";
  text << "gloss     " << cov.with_gloss << " (" << percent(cov.gloss_fraction()) << ")\n";
  text << "corpus    " << cov.with_corpus << " (" << percent(cov.corpus_fraction()) << ")\n";
  text << "projected " << cov.projected << ", static fallback " << cov.unprojected << "\n";
  if (any_corpus) {
    text << "clusters  " << corpus.clusters << " over " << corpus.lemmas << " lemmas, "
         << corpus.unlabeled_clusters << " unlabelled (labeler " << to_string(c.labeler)
         << ")\n";
  }
  write_report(c.output_dir, "bank_report", json, text.str());
  out << text.str();
}

// ---------------------------------------------------------------- eval-wsd

void cmd_eval_wsd(const RunConfig& c, std::ostream& out) {
  require_file(c.bank_path(), "bank");
  require_file(c.inventory, "inventory");
  require_file(c.static_table, "static_table");
  if (c.eval_dumps.empty()) throw ValidationError("missing required setting 'eval_dumps'");
  if (c.eval_keys.size() != c.eval_dumps.size()) {
    throw ValidationError("eval_keys must list one key file per eval dump");
  }
  if (!c.eval_names.empty() && c.eval_names.size() != c.eval_dumps.size()) {
    throw ValidationError("eval_names must list one name per eval dump");
  }
  for (std::size_t i = 0; i < c.eval_dumps.size(); ++i) {
    require_file(c.eval_dumps[i], "eval_dumps");
    require_file(c.eval_keys[i], "eval_keys");
  }

  const SenseBank bank = load_bank(c.bank_path());
  const SenseInventory inventory = load_sense_inventory(c.inventory);
  const StaticTable table = load_table(c);
  if (table.dim() != bank.p()) {
    throw DimensionError("bank has p=" + std::to_string(bank.p()) + ", static table has p=" +
                         std::to_string(table.dim()));
  }
  const DisambiguationOptions options{c.k_candidates, c.fallback};

  std::vector<EvalReport> reports;
  Json datasets = Json::array();
  std::ostringstream text;
  auto line = [&text](const std::string& name, const std::string& gold, const std::string& att,
                       const std::string& cor, const std::string& p, const std::string& r,
                       const std::string& f) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-14s %6s %9s %8s %9s %7s %7s\n", name.c_str(), gold.c_str(),
                  att.c_str(), cor.c_str(), p.c_str(), r.c_str(), f.c_str());
    text << buf;
  };
  auto row = [&line](const EvalReport& r) {
    line(r.dataset, std::to_string(r.gold_total), std::to_string(r.attempted),
         std::to_string(r.correct), fmt(r.precision, 4), fmt(r.recall, 4), fmt(r.f1, 4));
  };
  line("dataset", "gold", "attempted", "correct", "precision", "recall", "f1");
  fs::create_directories(c.output_dir);

  for (std::size_t d = 0; d < c.eval_dumps.size(); ++d) {
    const std::string name =
        c.eval_names.empty() ? c.eval_keys[d].stem().string() : c.eval_names[d];
    const ContextDump dump = load_context_dump(c.eval_dumps[d]);
    if (dump.records.empty()) throw ValidationError("evaluation set '" + name + "' is empty");
    if (dump.q != bank.q()) {
      throw DimensionError("eval dump '" + name + "' has q=" + std::to_string(dump.q) +
                           ", bank has q=" + std::to_string(bank.q()));
    }
    const GoldKeys gold = load_gold_keys(c.eval_keys[d]);

    std::vector<Prediction> preds(dump.records.size());
    std::vector<char> no_candidates(dump.records.size(), 0);
    parallel_for(dump.records.size(), c.threads, [&](std::size_t i) {
      const auto& rec = dump.records[i];
      try {
        preds[i] = disambiguate({rec.instance_id, rec.lemma, rec.pos, rec.vector}, bank,
                                inventory, table, options);
      } catch (const LookupError&) {
        preds[i] = Prediction{rec.instance_id, {}, false, !table.contains(rec.lemma)};
        no_candidates[i] = 1;
      }
    });

    EvalReport report = score_wsd(preds, gold, name);
    const auto count = [&](auto pred) {
      return static_cast<std::size_t>(std::count_if(preds.begin(), preds.end(), pred));
    };
    const std::size_t fallbacks = count([](const Prediction& p) { return p.fallback_used; });
    const std::size_t static_missing = count([](const Prediction& p) { return p.static_missing; });
    const auto missing_candidates =
        static_cast<std::size_t>(std::count(no_candidates.begin(), no_candidates.end(), 1));

    write_predictions(preds, c.output_dir / ("predictions." + name + ".txt"));
    write_prediction_keys(preds, c.output_dir / ("predictions." + name + ".key"));
    datasets.push_back({{"dataset", name},
                        {"gold_total", report.gold_total},
                        {"attempted", report.attempted},
                        {"correct", report.correct},
                        {"precision", report.precision},
                        {"recall", report.recall},
                        {"f1", report.f1},
                        {"fallback_used", fallbacks},
                        {"static_missing", static_missing},
                        {"no_candidates", missing_candidates}});
    row(report);
    reports.push_back(std::move(report));
  }
  const EvalReport all = pool_reports(reports);
  row(all);

  Json json{{"command", "eval-wsd"},
            {"k_candidates", c.k_candidates},
            {"fallback", c.fallback == Fallback::kNone ? "none" : "mfs"},
            {"datasets", datasets},
            {"pooled", {{"dataset", all.dataset},
                        {"gold_total", all.gold_total},
                        {"attempted", all.attempted},
                        {"correct", all.correct},
                        {"precision", all.precision},
                        {"recall", all.recall},
                        {"f1", all.f1}}}};
  write_report(c.output_dir, "wsd_report", json, text.str());
  out << text.str();
}

// ---------------------------------------------------------------- eval-wic

namespace {

struct WicSplit {
  std::vector<WicPair> pairs;
  std::vector<WicExample> examples;
  std::size_t unlabeled = 0;
};

WicSplit featurize(const fs::path& dump, const fs::path& sidecar, const fs::path& gold,
                   const SenseBank& bank, const SenseInventory& inventory,
                   const StaticTable& table, const ProjectionModel& model, std::size_t threads) {
  WicSplit split;
  split.pairs = load_wic_pairs(dump, sidecar,
                               gold.empty() ? std::nullopt : std::optional<fs::path>(gold));
  std::vector<std::optional<WicFeatures>> features(split.pairs.size());
  parallel_for(split.pairs.size(), threads, [&](std::size_t i) {
    features[i] = wic_features(split.pairs[i], bank, inventory, table, model);
  });
  for (std::size_t i = 0; i < split.pairs.size(); ++i) {
    if (!split.pairs[i].gold) {
      ++split.unlabeled;
      continue;
    }
    split.examples.push_back({features[i], *split.pairs[i].gold});
  }
  return split;
}

}  // namespace

void cmd_eval_wic(const RunConfig& c, std::ostream& out) {
  require_file(c.bank_path(), "bank");
  require_file(c.inventory, "inventory");
  require_file(c.static_table, "static_table");
  require_file(c.checkpoint_path(), "checkpoint");
  require_file(c.wic_train_dump, "wic_train_dump");
  require_file(c.wic_train_pairs, "wic_train_pairs");
  require_file(c.wic_test_dump, "wic_test_dump");
  require_file(c.wic_test_pairs, "wic_test_pairs");
  optional_file(c.wic_train_gold, "wic_train_gold");
  optional_file(c.wic_test_gold, "wic_test_gold");

  const SenseBank bank = load_bank(c.bank_path());
  const SenseInventory inventory = load_sense_inventory(c.inventory);
  const StaticTable table = load_table(c);
  const ProjectionModel model = load_checkpoint(c.checkpoint_path());
  if (model.p() != bank.p() || model.q() != bank.q()) {
    throw DimensionError("checkpoint and bank disagree on p or q");
  }

  const WicSplit train_split = featurize(c.wic_train_dump, c.wic_train_pairs, c.wic_train_gold,
                                         bank, inventory, table, model, c.threads);
  const WicSplit test_split = featurize(c.wic_test_dump, c.wic_test_pairs, c.wic_test_gold, bank,
                                        inventory, table, model, c.threads);
  if (test_split.examples.empty()) throw ValidationError("WiC test set has no labelled pairs");

  std::vector<LabeledFeatures> data;
  for (const auto& e : train_split.examples) {
    if (e.features) data.push_back({*e.features, e.gold});
  }
  const LogisticModel clf = train_logistic(data, c.logistic);
  const WicAccuracy train_acc = wic_accuracy(clf, train_split.examples);
  const WicAccuracy test_acc = wic_accuracy(clf, test_split.examples);

  fs::create_directories(c.output_dir);
  {
    std::ofstream preds(c.output_dir / "wic_predictions.txt", std::ios::binary);
    for (const auto& pair : test_split.pairs) {
      const auto f = wic_features(pair, bank, inventory, table, model);
      preds << pair.pair_id << '\t';
      if (f) {
        const double prob = clf.probability(*f);
        preds << (prob >= 0.5 ? 'T' : 'F') << '\t' << fmt(prob) << '\n';
      } else {
        preds << "-\t-\n";
      }
    }
  }

  auto acc_json = [](const WicAccuracy& a) {
    return Json{{"total", a.total}, {"correct", a.correct}, {"skipped", a.skipped},
                {"accuracy", a.accuracy}};
  };
  Json json{{"command", "eval-wic"},
            {"seed", c.seed},
            {"logistic", {{"learning_rate", c.logistic.learning_rate},
                          {"epochs", c.logistic.epochs},
                          {"l2", c.logistic.l2},
                          {"standardize", c.logistic.standardize},
                          {"iterations", clf.iterations},
                          {"final_loss", clf.final_loss},
                          {"weights", clf.weights},
                          {"bias", clf.bias}}},
            {"train", acc_json(train_acc)},
            {"test", acc_json(test_acc)}};

  std::ostringstream text;
  text << "train     " << fmt(train_acc.accuracy, 4) << " (" << train_acc.correct << "/"
       << train_acc.total << ", " << train_acc.skipped << " skipped)\n";
  text << "test      " << fmt(test_acc.accuracy, 4) << " (" << test_acc.correct << "/"
       << test_acc.total << ", " << test_acc.skipped << " skipped)\n";
  text << "classifier loss " << fmt(clf.final_loss) << " after " << clf.iterations
       << " epochs\n";
  write_report(c.output_dir, "wic_report", json, text.str());
  out << text.str();
}

// ---------------------------------------------------------------- neighbors

void cmd_neighbors(const RunConfig& c, std::ostream& out) {
  require_file(c.bank_path(), "bank");
  optional_file(c.inventory, "inventory");
  if (c.query.empty() == !c.query_vector.has_value()) {
    throw ValidationError("give exactly one of 'query' (sense id) or 'query_vector'");
  }
  const SenseBank bank = load_bank(c.bank_path());
  std::optional<SenseInventory> inventory;
  if (!c.inventory.empty()) inventory = load_sense_inventory(c.inventory);

  const NeighborQuery query = c.query_vector ? NeighborQuery(*c.query_vector) : NeighborQuery(c.query);
  const auto ranked = neighbors(query, bank, c.top_n);

  Json list = Json::array();
  std::ostringstream text;
  text << "neighbours of " << (c.query_vector ? std::string("query vector") : c.query) << "\n";
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const auto& n = ranked[i];
    std::string lemma;
    if (inventory) {
      if (const auto* e = inventory->find(n.sense_id)) lemma = e->lemma;
    }
    text << (i + 1) << ". " << n.sense_id;
    if (!lemma.empty()) text << " (" << lemma << ")";
    text << "  " << fmt(n.score) << "\n";
    Json item{{"rank", i + 1}, {"sense", n.sense_id}, {"score", n.score}};
    if (!lemma.empty()) item["lemma"] = lemma;
    list.push_back(item);
  }
  Json json{{"command", "neighbors"}, {"top_n", c.top_n}, {"neighbors", list}};
  if (!c.query.empty()) json["query"] = c.query;
  write_report(c.output_dir, "neighbors", json, text.str());
  out << text.str();
}

// ---------------------------------------------------------------- inspect

namespace {

std::string sniff(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  char magic[4] = {};
  in.read(magic, 4);
  const std::string m(magic, static_cast<std::size_t>(in.gcount()));
  if (m == "CDE1") return "dump";
  if (m == "CDEM") return "checkpoint";
  if (m == "CDEB") return "bank";
  in.clear();
  in.seekg(0);
  std::string line;
  while (std::getline(in, line) && line.find_first_not_of(" \t\r") == std::string::npos) {
  }
  std::size_t tabs = static_cast<std::size_t>(std::count(line.begin(), line.end(), '\t'));
  if (tabs >= 2) {
    const auto first = line.find('\t');
    const auto second = line.find('\t', first + 1);
    const auto third = line.find('\t', second + 1);
    const std::string field3 = line.substr(second + 1, third == std::string::npos
                                                           ? std::string::npos
                                                           : third - second - 1);
    return tabs >= 3 || parse_pos(field3) ? "inventory" : "collocations";
  }
  // a gold keyfile has sense ids where a table has numbers
  std::istringstream fields(line);
  std::string token;
  fields >> token;
  while (fields >> token) {
    char* end = nullptr;
    std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size()) return "keys";
  }
  return "table";
}

}  // namespace

void cmd_inspect(const InspectOptions& o, std::ostream& out) {
  require_file(o.file, "file");
  const std::string format = o.format == "auto" ? sniff(o.file) : o.format;
  Json json{{"file", o.file.string()}, {"format", format}};

  if (format == "dump") {
    const ContextDump d = load_context_dump(o.file);
    std::map<std::string, std::size_t> by_pos;
    std::size_t gold = 0;
    std::set<std::string> lemmas;
    for (const auto& r : d.records) {
      ++by_pos[std::string(to_string(r.pos))];
      gold += r.gold_sense ? 1 : 0;
      lemmas.insert(r.lemma);
    }
    json["q"] = d.q;
    json["records"] = d.records.size();
    json["with_gold"] = gold;
    json["lemmas"] = lemmas.size();
    json["pos"] = by_pos;
  } else if (format == "checkpoint") {
    const ProjectionModel m = load_checkpoint(o.file);
    json["version"] = kCheckpointVersion;
    json["p"] = m.p();
    json["q"] = m.q();
    json["activation"] = to_string(m.activation());
    json["senses"] = m.sense_count();
    json["checksum"] = hex64(m.checksum());
  } else if (format == "bank") {
    const SenseBank b = load_bank(o.file);
    const auto cov = coverage_of(b);
    json["p"] = b.p();
    json["q"] = b.q();
    json["dim"] = b.dim();
    json["senses"] = b.size();
    json["with_gloss"] = cov.with_gloss;
    json["with_corpus"] = cov.with_corpus;
  } else if (format == "table") {
    const StaticTable t = load_static_table(o.file);
    json["dim"] = t.dim();
    json["rows"] = t.size();
    json["header_skipped"] = t.load_report().header_skipped;
    json["duplicates_skipped"] = t.load_report().duplicates_skipped;
  } else if (format == "inventory") {
    const SenseInventory inv = load_sense_inventory(o.file);
    std::set<std::string> lemmas;
    for (const auto& e : inv.senses()) lemmas.insert(e.lemma);
    json["senses"] = inv.size();
    json["lemmas"] = lemmas.size();
    json["gloss_vectors"] = inv.gloss_count();
    json["gloss_dim"] = inv.gloss_dim();
  } else if (format == "collocations") {
    const CollocationSet set = load_collocations(o.file);
    json["collocations"] = set.size();
    json["pairs"] = set.pairs().size();
    json["lemmas"] = set.by_lemma().size();
  } else if (format == "keys") {
    const GoldKeys keys = load_gold_keys(o.file);
    json["instances"] = keys.size();
  } else {
    throw ValidationError("unknown format '" + format + "'");
  }

  if (o.json) {
    out << json.dump(2) << "\n";
    return;
  }
  for (const auto& [k, v] : json.items()) {
    std::string key = k;
    key.resize(std::max<std::size_t>(key.size(), 18), ' ');
    out << key << ' ' << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
  }
}

}  // namespace cdes::cli
