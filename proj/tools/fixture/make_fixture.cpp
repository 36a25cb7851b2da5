// Writes the small synthetic corpus used by the CLI tests and the README
// walkthrough. Every sense owns a prototype context direction; training
// records, glosses, corpus sentences and evaluation instances are noisy
// copies of it, so the pipeline has a recoverable signal at p=4, q=6.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cdes/context_dump.hpp"
#include "cdes/random.hpp"
#include "cdes/sense_inventory.hpp"
#include "cdes/static_table.hpp"
#include "cdes/wic.hpp"

namespace fs = std::filesystem;
using namespace cdes;

namespace {

constexpr std::size_t kP = 4;
constexpr std::size_t kQ = 6;

struct SenseSpec {
  const char* id;
  const char* lemma;
  Pos pos;
  const char* gloss;
  const char* partner;  // collocate used to harvest corpus sentences
};

const std::vector<SenseSpec> kSenses{
    {"bank%1:14:00::", "bank", Pos::kNoun, "a financial institution that accepts deposits", "money"},
    {"bank%1:17:01::", "bank", Pos::kNoun, "sloping land beside a body of water", "river"},
    {"bass%1:13:02::", "bass", Pos::kNoun, "the lean flesh of a saltwater fish", "fish"},
    {"bass%1:10:00::", "bass", Pos::kNoun, "the lowest part of the musical range", "music"},
    {"run%2:38:00::", "run", Pos::kVerb, "move fast by using one's feet", "fast"},
    {"run%2:41:00::", "run", Pos::kVerb, "direct or control a business", "company"},
    {"run%2:38:04::", "run", Pos::kVerb, "of liquids: flow or stream", "water"},
    {"plant%1:06:01::", "plant", Pos::kNoun, "buildings for carrying on industrial labor", "factory"},
    {"plant%1:03:00::", "plant", Pos::kNoun, "a living organism lacking locomotion", "tree"},
    {"light%1:19:00::", "light", Pos::kNoun, "electromagnetic radiation that is visible", "lamp"},
    {"light%3:00:01::", "light", Pos::kAdj, "of comparatively little physical weight", "feather"},
};

const std::vector<std::string> kFiller{"the", "a", "of", "in", "was", "near", "with", "old",
                                       "they", "said", "new", "by"};

Vector noisy(Rng& rng, const Vector& centre, double sd) {
  Vector v(centre.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<float>(centre[i] + sd * rng.normal());
  return v;
}

Vector random_unit(Rng& rng, std::size_t n) {
  Vector v(n);
  double norm = 0.0;
  for (float& x : v) {
    x = static_cast<float>(rng.normal());
    norm += static_cast<double>(x) * x;
  }
  for (float& x : v) x = static_cast<float>(x / std::sqrt(norm));
  return v;
}

void write(const fs::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

ContextDump wsd_set(Rng& rng, const std::vector<Vector>& protos, std::size_t n,
                    const std::string& prefix, std::string& keys) {
  ContextDump d{kQ, {}};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t s = i % kSenses.size();
    char id[64];
    std::snprintf(id, sizeof id, "%s.s%03zu.t000", prefix.c_str(), i);
    d.records.push_back({id, kSenses[s].lemma, kSenses[s].pos, std::nullopt, noisy(rng, protos[s], 0.15)});
    keys += std::string(id) + " " + kSenses[s].id + "\n";
  }
  return d;
}

void wic_set(Rng& rng, std::size_t n, const std::string& prefix, const fs::path& dir) {
  // labels are balanced and independent of the vectors
  std::vector<bool> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = i % 2 == 0;
  std::vector<char> shuffled(labels.begin(), labels.end());
  rng.shuffle(std::span<char>(shuffled));
  std::vector<WicPair> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = kSenses[rng.below(kSenses.size())];
    pairs.push_back({prefix + "." + std::to_string(i), s.lemma, s.pos, random_unit(rng, kQ),
                     random_unit(rng, kQ), shuffled[i] != 0});
  }
  save_wic_pairs(pairs, dir / (prefix + ".cde"), dir / (prefix + ".tsv"));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"write the tiny synthetic fixture", "cdes-make-fixture"};
  fs::path out_dir;
  std::uint64_t seed = 2024;
  app.add_option("dir", out_dir, "output directory")->required();
  app.add_option("--seed", seed, "generator seed");
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(out_dir);
  Rng rng(seed);

  std::vector<Vector> protos;
  for (std::size_t s = 0; s < kSenses.size(); ++s) {
    Vector v = random_unit(rng, kQ);
    for (float& x : v) x *= 2.0f;
    protos.push_back(v);
  }

  // static table: sense lemmas plus collocates and filler words
  StaticTable table(kP);
  for (const auto& s : kSenses) {
    if (!table.contains(s.lemma)) table.add(s.lemma, random_unit(rng, kP));
  }
  for (const auto& s : kSenses) table.add(s.partner, random_unit(rng, kP));
  for (const auto& w : kFiller) table.add(w, random_unit(rng, kP));
  save_static_table(table, out_dir / "static.txt");

  SenseInventory inventory;
  for (std::size_t s = 0; s < kSenses.size(); ++s) {
    inventory.add({kSenses[s].id, kSenses[s].lemma, kSenses[s].pos, kSenses[s].gloss,
                   noisy(rng, protos[s], 0.1)});
  }
  save_sense_inventory(inventory, out_dir / "inventory.tsv");

  // training records, with a few that the trainer has to skip
  ContextDump train{kQ, {}};
  for (std::size_t i = 0; i < 330; ++i) {
    const std::size_t s = rng.below(kSenses.size());
    char id[32];
    std::snprintf(id, sizeof id, "semcor.d%03zu.t%03zu", i / 10, i % 10);
    train.records.push_back({id, kSenses[s].lemma, kSenses[s].pos, std::string(kSenses[s].id),
                             noisy(rng, protos[s], 0.15)});
  }
  train.records.push_back({"semcor.x.t000", "bank", Pos::kNoun, std::nullopt, noisy(rng, protos[0], 0.15)});
  train.records.push_back({"semcor.x.t001", "zebra", Pos::kNoun, std::string("zebra%1:05:00::"),
                           random_unit(rng, kQ)});
  save_context_dump(train, out_dir / "train.cde");

  // collocations and the corpus sentences they harvest
  std::string colloc;
  for (const auto& s : kSenses) colloc += std::string(s.lemma) + "\t" + s.partner + "\t" + s.id + "\n";
  write(out_dir / "collocations.tsv", colloc);

  std::string corpus_text;
  ContextDump corpus{kQ, {}};
  std::size_t sid = 0;
  for (std::size_t round = 0; round < 12; ++round) {
    for (std::size_t s = 0; s < kSenses.size(); ++s) {
      std::vector<std::string> words;
      for (int k = 0; k < 3; ++k) words.push_back(kFiller[rng.below(kFiller.size())]);
      words.push_back(kSenses[s].lemma);
      words.push_back(kFiller[rng.below(kFiller.size())]);
      words.push_back(kSenses[s].partner);
      for (int k = 0; k < 2; ++k) words.push_back(kFiller[rng.below(kFiller.size())]);
      if (round % 2 == 1) std::reverse(words.begin(), words.end());
      const std::string id = "wiki." + std::to_string(sid++);
      corpus_text += id + "\t";
      for (std::size_t w = 0; w < words.size(); ++w) corpus_text += (w ? " " : "") + words[w];
      corpus_text += "\n";
      corpus.records.push_back({id, "", Pos::kOther, std::nullopt, noisy(rng, protos[s], 0.2)});
    }
  }
  // sentences without any collocation
  for (std::size_t i = 0; i < 10; ++i) {
    const std::string id = "wiki." + std::to_string(sid++);
    corpus_text += id + "\tthe old bank was near the old plant\n";
    corpus.records.push_back({id, "", Pos::kOther, std::nullopt, random_unit(rng, kQ)});
  }
  write(out_dir / "corpus.tsv", corpus_text);
  save_context_dump(corpus, out_dir / "corpus.cde");

  std::string keys_a;
  std::string keys_b;
  save_context_dump(wsd_set(rng, protos, 33, "eval_a", keys_a), out_dir / "eval_a.cde");
  save_context_dump(wsd_set(rng, protos, 22, "eval_b", keys_b), out_dir / "eval_b.cde");
  write(out_dir / "eval_a.key", keys_a);
  write(out_dir / "eval_b.key", keys_b);

  wic_set(rng, 200, "wic_train", out_dir);
  wic_set(rng, 200, "wic_test", out_dir);

  write(out_dir / "fixture.cfg",
        "# tiny synthetic fixture (p=4, q=6)\n"
        "static_table = static.txt\n"
        "inventory = inventory.tsv\n"
        "train_dump = train.cde\n"
        "collocations = collocations.tsv\n"
        "corpus_sentences = corpus.tsv\n"
        "corpus_dump = corpus.cde\n"
        "eval_dumps = eval_a.cde, eval_b.cde\n"
        "eval_keys = eval_a.key, eval_b.key\n"
        "wic_train_dump = wic_train.cde\n"
        "wic_train_pairs = wic_train.tsv\n"
        "wic_test_dump = wic_test.cde\n"
        "wic_test_pairs = wic_test.tsv\n"
        "seed = 13\n"
        "epochs = 40\n"
        "learning_rate = 0.01\n"
        "batch_size = 16\n"
        "activation = gelu\n"
        "validation_fraction = 0.1\n"
        "k_candidates = 3\n");
  std::cout << "fixture written to " << out_dir.string() << "\n";
  return 0;
}
