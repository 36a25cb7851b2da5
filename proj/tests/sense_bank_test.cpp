#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "cdes/collocations.hpp"
#include "cdes/error.hpp"
#include "cdes/kmeans.hpp"
#include "cdes/projection.hpp"
#include "cdes/sense_bank.hpp"
#include "cdes/sense_inventory.hpp"
#include "cdes/static_table.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace cdes {
namespace {

using testing::random_vector;

// ---------------------------------------------------------------- sentence embedding

TEST(SentenceEmbedding, Examples) {
  const std::vector<Vector> one{{1.f, 2.f, 3.f}};
  EXPECT_EQ(sentence_embedding(one), one[0]);
  const std::vector<Vector> two{{1.f, 0.f}, {0.f, 1.f}};
  EXPECT_EQ(sentence_embedding(two), (Vector{0.5f, 0.5f}));
  EXPECT_THROW(sentence_embedding({}), ValidationError);
  const std::vector<Vector> ragged{{1.f}, {1.f, 2.f}};
  EXPECT_THROW(sentence_embedding(ragged), DimensionError);
}

TEST(SentenceEmbedding, MatchesIndependentMean) {
  Rng rng(3);
  std::vector<Vector> vs;
  for (int i = 0; i < 7; ++i) vs.push_back(random_vector(rng, 11));
  const auto got = sentence_embedding(vs);
  const auto want = oracle::mean_of(vs);
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-6);
}

// ---------------------------------------------------------------- gloss

TEST(GlossSegment, StoredOrAbsent) {
  testing::TempDir dir;
  SenseInventory inv;
  inv.add({"a%1", "a", Pos::kNoun, "with vector", Vector{0.25f, -1.5f, 3.0e-7f}});
  inv.add({"a%2", "a", Pos::kNoun, "without", std::nullopt});
  EXPECT_EQ(*gloss_segment(inv, "a%1"), (Vector{0.25f, -1.5f, 3.0e-7f}));
  EXPECT_FALSE(gloss_segment(inv, "a%2").has_value());
  EXPECT_THROW(gloss_segment(inv, "zzz"), LookupError);

  // written by the extractor side, served unchanged after a reload
  save_sense_inventory(inv, dir / "inv.tsv");
  const auto back = load_sense_inventory(dir / "inv.tsv");
  EXPECT_EQ(*gloss_segment(back, "a%1"), *gloss_segment(inv, "a%1"));
  const auto all = collect_gloss_segments(back);
  EXPECT_EQ(all.size(), 1u);
}

// ---------------------------------------------------------------- k-means

std::vector<Vector> blobs(Rng& rng, std::size_t per_blob, const std::vector<Vector>& centres,
                          double spread, std::vector<std::size_t>* truth = nullptr) {
  std::vector<Vector> pts;
  for (std::size_t b = 0; b < centres.size(); ++b) {
    for (std::size_t i = 0; i < per_blob; ++i) {
      Vector v = centres[b];
      for (float& x : v) x += static_cast<float>(rng.uniform(-spread, spread));
      pts.push_back(std::move(v));
      if (truth) truth->push_back(b);
    }
  }
  return pts;
}

TEST(KMeans, SingleClusterIsGlobalMean) {
  Rng rng(1);
  std::vector<Vector> pts;
  for (int i = 0; i < 30; ++i) pts.push_back(random_vector(rng, 4));
  const auto r = kmeans(pts, 1, 5);
  ASSERT_EQ(r.k(), 1u);
  const auto mean = oracle::mean_of(pts);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(r.centroids[0][i], mean[i], 1e-6);
  for (auto a : r.assignment) EXPECT_EQ(a, 0u);
}

TEST(KMeans, OneClusterPerPoint) {
  Rng rng(2);
  std::vector<Vector> pts;
  for (int i = 0; i < 9; ++i) pts.push_back(random_vector(rng, 3));
  const auto r = kmeans(pts, 9, 5);
  EXPECT_EQ(r.inertia(), 0.0);
  std::set<std::size_t> used(r.assignment.begin(), r.assignment.end());
  EXPECT_EQ(used.size(), 9u);
}

TEST(KMeans, ClampsOversizedK) {
  const std::vector<Vector> pts{{0.f}, {1.f}};
  const auto r = kmeans(pts, 5, 1);
  EXPECT_EQ(r.k(), 2u);
  EXPECT_TRUE(r.k_clamped);
  EXPECT_EQ(r.requested_k, 5u);
}

TEST(KMeans, Errors) {
  const std::vector<Vector> ragged{{0.f, 1.f}, {1.f}};
  EXPECT_THROW(kmeans(ragged, 1, 1), DimensionError);
  const std::vector<Vector> pts{{0.f}};
  EXPECT_THROW(kmeans(pts, 0, 1), ValidationError);
  EXPECT_THROW(kmeans({}, 1, 1), ValidationError);
}

TEST(KMeans, RecoversPlantedBlobs) {
  Rng rng(4);
  std::vector<std::size_t> truth;
  const auto pts = blobs(rng, 40, {{5.f, 5.f, 0.f}, {-5.f, -5.f, 0.f}}, 1.0, &truth);
  const auto r = kmeans(pts, 2, 11);
  const std::size_t first = r.assignment[0];
  for (std::size_t i = 0; i < pts.size(); ++i) {
    EXPECT_EQ(r.assignment[i] == first, truth[i] == truth[0]) << i;
  }
  EXPECT_TRUE(r.converged);
}

TEST(KMeans, InertiaNonIncreasingAndCentroidsAreMeans) {
  Rng rng(6);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::vector<Vector> pts;
    for (int i = 0; i < 120; ++i) pts.push_back(random_vector(rng, 5));
    const auto r = kmeans(pts, 6, seed);
    for (std::size_t i = 1; i < r.inertia_history.size(); ++i) {
      EXPECT_LE(r.inertia_history[i], r.inertia_history[i - 1] + 1e-9);
    }
    for (std::size_t c = 0; c < r.k(); ++c) {
      std::vector<Vector> members;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (r.assignment[i] == c) members.push_back(pts[i]);
      }
      if (members.empty()) continue;
      const auto mean = oracle::mean_of(members);
      for (std::size_t d = 0; d < 5; ++d) EXPECT_NEAR(r.centroids[c][d], mean[d], 1e-5);
    }
  }
}

TEST(KMeans, Deterministic) {
  Rng rng(8);
  std::vector<Vector> pts;
  for (int i = 0; i < 50; ++i) pts.push_back(random_vector(rng, 3));
  const auto a = kmeans(pts, 4, 77);
  const auto b = kmeans(pts, 4, 77);
  EXPECT_EQ(a.assignment, b.assignment);
  EXPECT_EQ(a.centroids, b.centroids);
}

// ---------------------------------------------------------------- collocations

CollocationSet make_set(const std::vector<oracle::Pair>& pairs) {
  CollocationSet set;
  for (const auto& p : pairs) set.add({p.u, p.v, p.sense});
  return set;
}

TEST(Collocations, AdjacentPairIsFound) {
  const std::vector<LemmaSentence> sents{{"river", "bank"}};
  const auto set = make_set({{"bank", "river", "bank%01"}});
  const auto out = extract_collocation_contexts(sents, set);
  ASSERT_TRUE(out.contains("bank%01"));
  EXPECT_EQ(out.at("bank%01"), (std::vector<std::size_t>{0}));
}

TEST(Collocations, OutsideWindowIsIgnored) {
  const std::vector<LemmaSentence> sents{{"bank", "a", "b", "c", "d", "river"}};
  const auto set = make_set({{"bank", "river", "bank%01"}});
  EXPECT_TRUE(extract_collocation_contexts(sents, set).empty());
  EXPECT_FALSE(extract_collocation_contexts(sents, set, {.window = 5}).empty());
}

TEST(Collocations, SamePositionDoesNotPairWithItself) {
  const std::vector<LemmaSentence> sents{{"run", "x"}, {"run", "x", "run"}};
  const auto set = make_set({{"run", "run", "run%03"}});
  const auto out = extract_collocation_contexts(sents, set);
  EXPECT_EQ(out.at("run%03"), (std::vector<std::size_t>{1}));
}

std::vector<LemmaSentence> random_corpus(Rng& rng, std::size_t n) {
  const std::vector<std::string> vocab{"bank", "river", "money", "run", "fast", "the",
                                       "of", "water", "loan", "bass"};
  std::vector<LemmaSentence> out;
  for (std::size_t s = 0; s < n; ++s) {
    LemmaSentence sent;
    const std::size_t len = 1 + rng.below(14);
    for (std::size_t i = 0; i < len; ++i) sent.push_back(vocab[rng.below(vocab.size())]);
    out.push_back(std::move(sent));
  }
  return out;
}

const std::vector<oracle::Pair> kPairs{{"bank", "river", "bank%01"},
                                       {"bank", "money", "bank%00"},
                                       {"bank", "loan", "bank%00"},
                                       {"run", "fast", "run%00"},
                                       {"bass", "water", "bass%02"},
                                       {"water", "water", "water%00"}};

TEST(Collocations, MatchesBruteForce) {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const auto corpus = random_corpus(rng, 50);
    const std::size_t window = 1 + rng.below(5);
    const auto got = extract_collocation_contexts(corpus, make_set(kPairs),
                                                  {.window = window, .max_sentences_per_lemma = 0});
    const auto want = oracle::brute_collocations(corpus, kPairs, window);
    EXPECT_EQ(got, want) << "trial " << trial << " window " << window;
  }
}

TEST(Collocations, SymmetricAndMonotone) {
  Rng rng(13);
  const auto corpus = random_corpus(rng, 80);
  std::vector<oracle::Pair> swapped;
  for (const auto& p : kPairs) swapped.push_back({p.v, p.u, p.sense});
  const CollocationOptions unlimited{.window = 3, .max_sentences_per_lemma = 0};
  EXPECT_EQ(extract_collocation_contexts(corpus, make_set(kPairs), unlimited),
            extract_collocation_contexts(corpus, make_set(swapped), unlimited));
  std::map<std::string, std::vector<std::size_t>> prev;
  for (std::size_t w = 1; w <= 6; ++w) {
    const auto cur =
        extract_collocation_contexts(corpus, make_set(kPairs), {.window = w, .max_sentences_per_lemma = 0});
    for (const auto& [sense, ids] : prev) {
      ASSERT_TRUE(cur.contains(sense));
      EXPECT_TRUE(std::includes(cur.at(sense).begin(), cur.at(sense).end(), ids.begin(), ids.end()));
    }
    prev = cur;
  }
}

TEST(Collocations, PerLemmaCapKeepsFileOrder) {
  std::vector<LemmaSentence> corpus(10, LemmaSentence{"bank", "river"});
  const auto out = extract_collocation_contexts(
      corpus, make_set({{"bank", "river", "bank%01"}}), {.window = 3, .max_sentences_per_lemma = 4});
  EXPECT_EQ(out.at("bank%01"), (std::vector<std::size_t>{0, 1, 2, 3}));
}

// ---------------------------------------------------------------- corpus segments

SenseInventory two_sense_inventory() {
  SenseInventory inv;
  inv.add({"bank%00", "bank", Pos::kNoun, "money", std::nullopt});
  inv.add({"bank%01", "bank", Pos::kNoun, "river", std::nullopt});
  inv.add({"solo%00", "solo", Pos::kNoun, "alone", std::nullopt});
  return inv;
}

TEST(CorpusSegments, SingleSenseIsGlobalMean) {
  Rng rng(14);
  std::vector<LabeledSentence> sents;
  std::vector<Vector> raw;
  for (int i = 0; i < 12; ++i) {
    raw.push_back(random_vector(rng, 3));
    sents.push_back({raw.back(), std::nullopt});
  }
  const auto out = corpus_segments("solo", sents, two_sense_inventory(), FirstSenseLabeler{}, 1);
  ASSERT_EQ(out.segments.size(), 1u);
  const auto mean = oracle::mean_of(raw);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(out.segments.at("solo%00")[i], mean[i], 1e-6);
}

TEST(CorpusSegments, MajorityRecoversBlobMeans) {
  Rng rng(15);
  std::vector<std::size_t> truth;
  const auto pts = blobs(rng, 25, {{4.f, 0.f}, {-4.f, 0.f}}, 0.8, &truth);
  std::vector<LabeledSentence> sents;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    // one in five sentences carries a label
    std::optional<std::string> label;
    if (i % 5 == 0) label = truth[i] == 0 ? "bank%00" : "bank%01";
    sents.push_back({pts[i], label});
  }
  const auto out = corpus_segments("bank", sents, two_sense_inventory(), MajorityLabeler{}, 3);
  ASSERT_EQ(out.segments.size(), 2u);
  for (std::size_t b = 0; b < 2; ++b) {
    std::vector<Vector> members;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (truth[i] == b) members.push_back(pts[i]);
    }
    const auto mean = oracle::mean_of(members);
    const auto& got = out.segments.at(b == 0 ? "bank%00" : "bank%01");
    for (std::size_t d = 0; d < 2; ++d) EXPECT_NEAR(got[d], mean[d], 1e-5);
  }
  EXPECT_EQ(out.unlabeled_clusters, 0u);
}

TEST(CorpusSegments, UnlabelledClusterContributesNothing) {
  Rng rng(16);
  std::vector<std::size_t> truth;
  const auto pts = blobs(rng, 10, {{4.f, 0.f}, {-4.f, 0.f}}, 0.5, &truth);
  std::vector<LabeledSentence> sents;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    sents.push_back({pts[i], truth[i] == 0 ? std::optional<std::string>("bank%01") : std::nullopt});
  }
  const auto out = corpus_segments("bank", sents, two_sense_inventory(), MajorityLabeler{}, 3);
  EXPECT_EQ(out.segments.size(), 1u);
  EXPECT_TRUE(out.segments.contains("bank%01"));
  EXPECT_EQ(out.unlabeled_clusters, 1u);
}

TEST(CorpusSegments, NoSentencesGivesEmptyMap) {
  const auto out = corpus_segments("bank", {}, two_sense_inventory(), MajorityLabeler{}, 3);
  EXPECT_TRUE(out.segments.empty());
}

TEST(CorpusSegments, ExternalLabelsAreValidated) {
  const std::vector<LabeledSentence> sents{{{1.f}, {}}, {{-1.f}, {}}};
  const ExternalLabeler good({{"bank", {{0, "bank%01"}, {1, "bank%00"}}}});
  const auto out = corpus_segments("bank", sents, two_sense_inventory(), good, 1);
  EXPECT_EQ(out.segments.size(), 2u);
  const ExternalLabeler bad({{"bank", {{0, "solo%00"}}}});
  EXPECT_THROW(corpus_segments("bank", sents, two_sense_inventory(), bad, 1), ValidationError);

  testing::TempDir dir;
  testing::write_text(dir / "labels.tsv", "bank\t0\tbank%01\nbank\t1\tbank%00\n");
  const auto loaded = ExternalLabeler::load(dir / "labels.tsv");
  EXPECT_EQ(corpus_segments("bank", sents, two_sense_inventory(), loaded, 1).segments,
            out.segments);
}

// ---------------------------------------------------------------- assembly

struct BankInputs {
  ProjectionModel model;
  StaticTable table;
  SenseInventory inventory;
  SegmentMap gloss;
  SegmentMap corpus;
};

BankInputs small_inputs() {
  BankInputs in{ProjectionModel(2, 3, Activation::kLinear), StaticTable(2), {}, {}, {}};
  in.model.add_sense("bank%00", Vector{2.f, 0.5f});
  in.model.add_sense("bank%01", Vector{-1.f, 1.f});
  in.table.add("bank", Vector{3.f, 4.f});
  in.inventory.add({"bank%00", "bank", Pos::kNoun, "", std::nullopt});
  in.inventory.add({"bank%01", "bank", Pos::kNoun, "", std::nullopt});
  in.inventory.add({"oov%00", "oov", Pos::kNoun, "", std::nullopt});
  in.gloss["bank%00"] = {1.f, 2.f, 3.f};
  in.gloss["bank%01"] = {4.f, 5.f, 6.f};
  in.corpus["bank%00"] = {7.f, 8.f, 9.f};
  return in;
}

TEST(AssembleBank, SegmentsInOrder) {
  const auto in = small_inputs();
  const auto built = assemble_bank(in.model, in.table, in.inventory, in.gloss, in.corpus,
                                   FillPolicy::kZero);
  const auto* e = built.bank.find("bank%00");
  ASSERT_NE(e, nullptr);
  EXPECT_EQ(e->vector, (Vector{6.f, 2.f, 1.f, 2.f, 3.f, 7.f, 8.f, 9.f}));
  EXPECT_TRUE(e->has_gloss);
  EXPECT_TRUE(e->has_corpus);
  EXPECT_EQ(built.coverage.skipped_oov, 1u);
  EXPECT_EQ(built.coverage.bank_senses, 2u);
}

TEST(AssembleBank, FillPolicies) {
  const auto in = small_inputs();
  const auto zero =
      assemble_bank(in.model, in.table, in.inventory, in.gloss, in.corpus, FillPolicy::kZero);
  EXPECT_EQ(zero.bank.find("bank%01")->vector, (Vector{-3.f, 4.f, 4.f, 5.f, 6.f, 0.f, 0.f, 0.f}));
  EXPECT_FALSE(zero.bank.find("bank%01")->has_corpus);

  const auto copy = assemble_bank(in.model, in.table, in.inventory, in.gloss, in.corpus,
                                  FillPolicy::kCopyGloss);
  EXPECT_EQ(copy.bank.find("bank%01")->vector, (Vector{-3.f, 4.f, 4.f, 5.f, 6.f, 4.f, 5.f, 6.f}));

  const auto skip = assemble_bank(in.model, in.table, in.inventory, in.gloss, in.corpus,
                                  FillPolicy::kSkipSense);
  EXPECT_EQ(skip.bank.find("bank%01"), nullptr);
  EXPECT_EQ(skip.coverage.skipped_policy, 1u);
  EXPECT_EQ(skip.bank.size(), 1u);
}

TEST(AssembleBank, UnprojectedSenseUsesStaticVector) {
  auto in = small_inputs();
  in.inventory.add({"bank%02", "bank", Pos::kVerb, "", std::nullopt});
  const auto built =
      assemble_bank(in.model, in.table, in.inventory, in.gloss, in.corpus, FillPolicy::kZero);
  const auto* e = built.bank.find("bank%02");
  ASSERT_NE(e, nullptr);
  EXPECT_EQ(Vector(built.bank.projected_segment(*e).begin(), built.bank.projected_segment(*e).end()),
            (Vector{3.f, 4.f}));
  EXPECT_EQ(built.coverage.unprojected, 1u);
  EXPECT_EQ(built.coverage.projected, 2u);
}

TEST(AssembleBank, DimensionMismatch) {
  auto in = small_inputs();
  in.gloss["bank%00"] = {1.f, 2.f};
  EXPECT_THROW(
      assemble_bank(in.model, in.table, in.inventory, in.gloss, in.corpus, FillPolicy::kZero),
      DimensionError);
  auto in2 = small_inputs();
  StaticTable wide(3);
  wide.add("bank", Vector{1.f, 2.f, 3.f});
  EXPECT_THROW(assemble_bank(in2.model, wide, in2.inventory, in2.gloss, in2.corpus,
                             FillPolicy::kZero),
               DimensionError);
}

TEST(AssembleBank, DeterministicAndRoundTrips) {
  testing::TempDir dir;
  const auto in = small_inputs();
  const auto a = assemble_bank(in.model, in.table, in.inventory, in.gloss, in.corpus,
                               FillPolicy::kCopyGloss);
  const auto b = assemble_bank(in.model, in.table, in.inventory, in.gloss, in.corpus,
                               FillPolicy::kCopyGloss);
  EXPECT_EQ(a.bank, b.bank);
  save_bank(a.bank, dir / "a.cdeb");
  save_bank(b.bank, dir / "b.cdeb");
  EXPECT_EQ(testing::read_bytes(dir / "a.cdeb"), testing::read_bytes(dir / "b.cdeb"));
  const auto back = load_bank(dir / "a.cdeb");
  EXPECT_EQ(back, a.bank);
  const auto cov = coverage_of(back);
  EXPECT_EQ(cov.with_gloss, 2u);
  EXPECT_EQ(cov.with_corpus, 1u);
}

TEST(AssembleBank, RandomSlicesRecoverInputs) {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t p = 1 + rng.below(20);
    const std::size_t q = 1 + rng.below(30);
    ProjectionModel model(p, q, Activation::kLinear);
    StaticTable table(p);
    SenseInventory inv;
    SegmentMap gloss;
    SegmentMap corpus;
    table.add("w", random_vector(rng, p));
    for (int s = 0; s < 3; ++s) {
      const std::string id = "w%" + std::to_string(s);
      model.add_sense(id, random_vector(rng, p));
      inv.add({id, "w", Pos::kNoun, "", std::nullopt});
      gloss[id] = random_vector(rng, q);
      corpus[id] = random_vector(rng, q);
    }
    const auto built = assemble_bank(model, table, inv, gloss, corpus, FillPolicy::kZero);
    for (const auto& e : built.bank.entries()) {
      ASSERT_EQ(e.vector.size(), p + 2 * q);
      const auto s = built.bank.projected_segment(e);
      EXPECT_EQ(Vector(s.begin(), s.end()), project_sense(model, e.sense_id, *table.find("w")));
      const auto gs = built.bank.gloss_segment(e);
      EXPECT_EQ(Vector(gs.begin(), gs.end()), gloss.at(e.sense_id));
      const auto cs = built.bank.corpus_segment(e);
      EXPECT_EQ(Vector(cs.begin(), cs.end()), corpus.at(e.sense_id));
    }
  }
}

TEST(BankFile, RejectsWrongMagic) {
  testing::TempDir dir;
  testing::write_text(dir / "x.cdeb", "CDEM\x01\x00\x00\x00");
  EXPECT_THROW(load_bank(dir / "x.cdeb"), FormatError);
}

}  // namespace
}  // namespace cdes
