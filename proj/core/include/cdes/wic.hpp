#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cdes/types.hpp"

namespace cdes {

class ProjectionModel;
class SenseBank;
class SenseInventory;
class StaticTable;

struct WicPair {
  std::string pair_id;
  std::string lemma;
  Pos pos = Pos::kOther;
  Vector c1;  // target word in the first sentence
  Vector c2;  // target word in the second sentence
  std::optional<bool> gold;  // true = same sense
};

inline constexpr std::size_t kWicFeatureCount = 6;
using WicFeatures = std::array<double, kWicFeatureCount>;

// Six cosine features, with s_i, s_j the senses picked by 1-NN for the two
// occurrences and zeta_1, zeta_2 their query vectors:
//   cos(s_i, s_j), cos(zeta_1, zeta_2), cos(s_i, head zeta_1),
//   cos(s_j, head zeta_2), cos(s_i, head zeta_2), cos(s_j, head zeta_1)
// where "head" is the first p coordinates. nullopt when the pair cannot be
// scored (lemma missing from the static table or inventory, or no candidate
// in the bank).
std::optional<WicFeatures> wic_features(const WicPair& pair, const SenseBank& bank,
                                        const SenseInventory& inventory,
                                        const StaticTable& table, const ProjectionModel& model);

struct LabeledFeatures {
  WicFeatures x{};
  bool y = false;
};

struct LogisticOptions {
  double learning_rate = 0.1;
  std::size_t epochs = 2000;
  double l2 = 1e-4;
  bool standardize = true;
  // Full-batch descent from zero weights draws no randomness; kept so
  // callers can thread the stage seed through uniformly.
  std::uint64_t seed = 0;
};

struct LogisticModel {
  WicFeatures weights{};
  double bias = 0.0;
  // Standardisation applied before the linear score.
  WicFeatures mean{};
  WicFeatures scale{1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
  std::size_t iterations = 0;
  double final_loss = 0.0;

  WicFeatures standardized(const WicFeatures& x) const;
  double probability(const WicFeatures& x) const;
  bool predict(const WicFeatures& x) const { return probability(x) >= 0.5; }
};

// Mean cross-entropy plus (l2/2)|w|^2 over standardised features (bias not
// penalised).
double logistic_loss(const LogisticModel& model, std::span<const LabeledFeatures> data,
                     double l2);
// Gradient of logistic_loss with respect to the weights and the bias.
void logistic_gradient(const LogisticModel& model, std::span<const LabeledFeatures> data,
                       double l2, WicFeatures& grad_w, double& grad_b);

// Full-batch gradient descent. Throws ValidationError when the data is empty
// or holds a single class.
LogisticModel train_logistic(std::span<const LabeledFeatures> data,
                             const LogisticOptions& options = {});

struct WicExample {
  std::optional<WicFeatures> features;  // nullopt = skipped pair
  bool gold = false;
};

struct WicAccuracy {
  std::size_t total = 0;
  std::size_t correct = 0;
  std::size_t skipped = 0;  // counted as errors
  double accuracy = 0.0;
};

WicAccuracy wic_accuracy(const LogisticModel& model, std::span<const WicExample> examples);

// Pairs stored as a context dump (two records per pair) plus a sidecar of
// "pair_id<TAB>instance_id_1<TAB>instance_id_2[<TAB>T|F]" lines. An optional
// gold file of T/F lines (sidecar order) overrides sidecar labels.
std::vector<WicPair> load_wic_pairs(const std::filesystem::path& dump,
                                    const std::filesystem::path& sidecar,
                                    const std::optional<std::filesystem::path>& gold = {});
void save_wic_pairs(std::span<const WicPair> pairs, const std::filesystem::path& dump,
                    const std::filesystem::path& sidecar);

}  // namespace cdes
