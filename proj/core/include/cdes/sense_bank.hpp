#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cdes/kmeans.hpp"
#include "cdes/types.hpp"

namespace cdes {

class CollocationSet;
class ProjectionModel;
class SenseInventory;
class StaticTable;

// Sense id -> segment vector. Ordered so iteration is reproducible.
using SegmentMap = std::map<std::string, Vector, std::less<>>;

// Coordinatewise mean of token vectors.
Vector sentence_embedding(std::span<const Vector> token_vectors);

// Stored gloss vector of a sense, or nullopt if the inventory has none.
// Throws LookupError for an unknown sense.
std::optional<Vector> gloss_segment(const SenseInventory& inventory, std::string_view sense_id);

SegmentMap collect_gloss_segments(const SenseInventory& inventory);

// ---------------------------------------------------------------------------
// Collocation-driven context harvesting

using LemmaSentence = std::vector<std::string>;

struct CollocationOptions {
  std::size_t window = 3;
  // Per anchor lemma, stop assigning after this many sentences (file order).
  // 0 disables the cap.
  std::size_t max_sentences_per_lemma = 150;
};

// A sentence supports the sense of collocation (u, v) when some occurrence of
// u and some (distinct) occurrence of v lie within `window` positions.
// Returns sense id -> ascending sentence indices.
std::map<std::string, std::vector<std::size_t>> extract_collocation_contexts(
    std::span<const LemmaSentence> sentences, const CollocationSet& collocations,
    const CollocationOptions& options = {});

// ---------------------------------------------------------------------------
// Corpus-based segments

struct LabeledSentence {
  Vector vector;                     // sentence embedding
  std::optional<std::string> label;  // sense label from any upstream source
};

struct LabelingInput {
  std::string_view lemma;
  std::span<const std::string> candidates;  // in inventory order
  std::span<const LabeledSentence> sentences;
  const ClusterAssignment& clusters;
};

// Maps clusters to senses. Clusters left out of the result stay unlabelled.
class ClusterLabeler {
 public:
  virtual ~ClusterLabeler() = default;
  virtual std::string_view name() const = 0;
  virtual std::map<std::size_t, std::string> label(const LabelingInput& input) const = 0;
};

// Majority vote over member sentence labels that are candidates of the
// lemma; ties go to the earlier candidate. Clusters without such labels stay
// unlabelled.
class MajorityLabeler final : public ClusterLabeler {
 public:
  std::string_view name() const override { return "majority"; }
  std::map<std::size_t, std::string> label(const LabelingInput& input) const override;
};

// Every cluster gets the lemma's first-listed sense.
class FirstSenseLabeler final : public ClusterLabeler {
 public:
  std::string_view name() const override { return "first_sense"; }
  std::map<std::size_t, std::string> label(const LabelingInput& input) const override;
};

// Labels supplied by an external disambiguation tool through the exchange
// file ("lemma<TAB>cluster_index<TAB>sense_id" per line).
class ExternalLabeler final : public ClusterLabeler {
 public:
  explicit ExternalLabeler(std::map<std::string, std::map<std::size_t, std::string>> labels)
      : labels_(std::move(labels)) {}
  static ExternalLabeler load(const std::filesystem::path& path);

  std::string_view name() const override { return "external"; }
  std::map<std::size_t, std::string> label(const LabelingInput& input) const override;

 private:
  std::map<std::string, std::map<std::size_t, std::string>> labels_;
};

struct CorpusSegments {
  SegmentMap segments;
  ClusterAssignment clusters;
  std::size_t unlabeled_clusters = 0;
};

// Clusters the lemma's sentences into as many groups as the lemma has
// senses, labels the clusters and returns, per labelled sense, the mean of
// the member sentences of its cluster(s). No sentences -> empty result.
CorpusSegments corpus_segments(std::string_view lemma,
                               std::span<const LabeledSentence> sentences,
                               const SenseInventory& inventory, const ClusterLabeler& labeler,
                               std::uint64_t seed, std::size_t max_iter = 100);

// ---------------------------------------------------------------------------
// Composite bank

enum class FillPolicy { kZero, kCopyGloss, kSkipSense };

std::string_view to_string(FillPolicy f);
std::optional<FillPolicy> parse_fill_policy(std::string_view name);

struct BankEntry {
  std::string sense_id;
  Vector vector;  // projected static | gloss | corpus
  bool has_gloss = false;
  bool has_corpus = false;

  friend bool operator==(const BankEntry&, const BankEntry&) = default;
};

// Sense id -> (p + 2q)-dimensional composite vector. Segment boundaries are
// [0,p) projected static, [p,p+q) gloss, [p+q,p+2q) corpus.
class SenseBank {
 public:
  SenseBank() = default;
  SenseBank(std::size_t p, std::size_t q);

  std::size_t p() const noexcept { return p_; }
  std::size_t q() const noexcept { return q_; }
  std::size_t dim() const noexcept { return p_ + 2 * q_; }
  std::size_t size() const noexcept { return entries_.size(); }

  void add(BankEntry entry);
  const std::vector<BankEntry>& entries() const noexcept { return entries_; }
  const BankEntry* find(std::string_view sense_id) const;
  // Index in insertion order, used for tie-breaking.
  std::optional<std::size_t> index_of(std::string_view sense_id) const;

  VectorView projected_segment(const BankEntry& e) const { return VectorView(e.vector).first(p_); }
  VectorView gloss_segment(const BankEntry& e) const { return VectorView(e.vector).subspan(p_, q_); }
  VectorView corpus_segment(const BankEntry& e) const { return VectorView(e.vector).subspan(p_ + q_, q_); }

  // Euclidean norms of every entry, in insertion order.
  const std::vector<double>& norms() const noexcept { return norms_; }

  friend bool operator==(const SenseBank& a, const SenseBank& b) {
    return a.p_ == b.p_ && a.q_ == b.q_ && a.entries_ == b.entries_;
  }

 private:
  std::size_t p_ = 0;
  std::size_t q_ = 0;
  std::vector<BankEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<double> norms_;
};

struct CoverageReport {
  std::size_t inventory_senses = 0;
  std::size_t bank_senses = 0;
  std::size_t skipped_oov = 0;     // lemma missing from the static table
  std::size_t skipped_policy = 0;  // dropped by FillPolicy::kSkipSense
  std::size_t with_gloss = 0;
  std::size_t with_corpus = 0;
  std::size_t projected = 0;    // sense had a trained diagonal
  std::size_t unprojected = 0;  // no diagonal; static vector used as is

  double gloss_fraction() const;
  double corpus_fraction() const;
};

struct BankBuild {
  SenseBank bank;
  CoverageReport coverage;
};

// For every inventory sense with an in-vocabulary lemma: segment 1 is the
// projected static vector (the raw static vector when the model has no
// diagonal for the sense), segments 2 and 3 come from the segment maps with
// gaps handled by `fill`.
BankBuild assemble_bank(const ProjectionModel& model, const StaticTable& table,
                        const SenseInventory& inventory, const SegmentMap& gloss,
                        const SegmentMap& corpus, FillPolicy fill);

CoverageReport coverage_of(const SenseBank& bank);

// "CDEB" | u32 p | u32 q | u64 count | per sense: str16 id, (p+2q) f32,
// u8 gloss flag, u8 corpus flag.
void save_bank(const SenseBank& bank, const std::filesystem::path& path);
SenseBank load_bank(const std::filesystem::path& path);

}  // namespace cdes
