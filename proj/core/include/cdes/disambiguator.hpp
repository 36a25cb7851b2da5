#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "cdes/types.hpp"

namespace cdes {

class GoldKeys;
class SenseBank;
class SenseInventory;
class StaticTable;

// Context vector g(u) | c | c, aligned with the bank's projected, gloss
// and corpus segments.
Vector query_vector(VectorView static_vector, VectorView context);

// dot(a,b) / (|a| |b|), clamped to [-1, 1]; 0 when either norm is 0.
double cosine(VectorView a, VectorView b);

struct WsdInstance {
  std::string instance_id;
  std::string lemma;
  Pos pos = Pos::kOther;
  Vector context;
};

struct ScoredSense {
  std::string sense_id;
  double score = 0.0;

  friend bool operator==(const ScoredSense&, const ScoredSense&) = default;
};

enum class Fallback { kNone, kMostFrequent };

// Score reported for a most-frequent-sense fallback answer.
inline constexpr double kFallbackScore = -2.0;

struct Prediction {
  std::string instance_id;
  // Descending score, ties in candidate-list order. Empty when no candidate
  // could be scored and no fallback applied (the instance is unattempted).
  std::vector<ScoredSense> ranked;
  bool fallback_used = false;
  bool static_missing = false;

  bool attempted() const { return !ranked.empty(); }
  const std::string& chosen() const { return ranked.front().sense_id; }

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

struct DisambiguationOptions {
  // Depth of the emitted ranking; scoring always uses the top entry.
  std::size_t k_candidates = 1;
  Fallback fallback = Fallback::kNone;
};

// 1-NN over the bank entries of the (lemma, pos) candidate senses. A lemma
// missing from the static table queries with a zero static head. Throws
// LookupError when the inventory has no senses for (lemma, pos).
Prediction disambiguate(const WsdInstance& instance, const SenseBank& bank,
                        const SenseInventory& inventory, const StaticTable& table,
                        const DisambiguationOptions& options = {});

struct InstanceOutcome {
  std::string instance_id;
  std::optional<std::string> predicted;
  bool correct = false;
};

struct EvalReport {
  std::string dataset;
  std::size_t gold_total = 0;
  std::size_t attempted = 0;
  std::size_t correct = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::vector<InstanceOutcome> instances;

  void recompute();
};

// precision = correct / attempted, recall = correct / gold entries,
// F1 = harmonic mean. A prediction is correct when its top sense is one of
// the instance's gold senses. Throws LookupError for an instance id absent
// from the keys.
EvalReport score_wsd(std::span<const Prediction> predictions, const GoldKeys& gold,
                     std::string dataset = "");

// Micro-average over datasets (counts pooled before the ratios).
EvalReport pool_reports(std::span<const EvalReport> reports, std::string dataset = "ALL");

using NeighborQuery = std::variant<Vector, std::string>;

// Every bank entry ranked by cosine to the query (self excluded for a
// sense-id query), truncated to `top_n`; ties in bank order.
std::vector<ScoredSense> neighbors(const NeighborQuery& query, const SenseBank& bank,
                                   std::size_t top_n);

// "instance_id chosen_sense [sense score ...]" per attempted instance.
void write_predictions(std::span<const Prediction> predictions, const std::filesystem::path& path);
// Plain "instance_id sense_id" keyfile for the external scorer.
void write_prediction_keys(std::span<const Prediction> predictions,
                           const std::filesystem::path& path);
std::vector<Prediction> read_predictions(const std::filesystem::path& path);

}  // namespace cdes
