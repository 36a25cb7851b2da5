#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cdes/projection.hpp"

namespace cdes {

struct ContextRecord;
class StaticTable;
class SenseInventory;

struct TrainConfig {
  double learning_rate = 1e-4;
  std::size_t batch_size = 64;
  std::size_t epochs = 1;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  InitScheme init_scheme = InitScheme::kXavier;
  Activation activation = Activation::kLinear;
  std::uint64_t seed = 0;
  double validation_fraction = 0.0;
  // 1 runs the reference single-threaded path.
  std::size_t threads = 1;

  // Throws ValidationError.
  void validate() const;
};

struct TrainReport {
  // Losses are the mean squared residual norm per record.
  static constexpr const char* kLossConvention = "mean-per-record";

  double initial_train_loss = 0.0;
  double initial_validation_loss = 0.0;
  std::vector<double> train_loss;       // one per epoch
  std::vector<double> validation_loss;  // one per epoch, empty without a split

  std::size_t records_total = 0;
  std::size_t skipped_no_gold = 0;
  std::size_t skipped_oov = 0;
  std::size_t skipped_unknown_sense = 0;
  std::size_t train_records = 0;
  std::size_t validation_records = 0;
  std::size_t senses = 0;
  std::uint64_t checksum = 0;

  std::size_t skipped() const { return skipped_no_gold + skipped_oov + skipped_unknown_sense; }
};

struct TrainResult {
  ProjectionModel model;
  TrainReport report;
};

// Adam over W and the per-sense diagonals. Diagonal moments are allocated on
// the first step that touches a sense and carry their own step count for
// bias correction; senses absent from a step are left untouched.
class AdamOptimizer {
 public:
  AdamOptimizer(const ProjectionModel& model, double learning_rate, double beta1,
                double beta2, double epsilon);

  // `grad_filter` and the diagonal gradients are applied as given (callers
  // pass batch means).
  void step(ProjectionModel& model, std::span<const double> grad_filter,
            const SparseDiagonalGrad& grad_diagonals);

  std::size_t steps() const noexcept { return steps_; }
  bool has_moments(std::size_t sense) const;
  std::size_t sense_steps(std::size_t sense) const;

 private:
  struct Moments {
    std::vector<double> m;
    std::vector<double> v;
    std::size_t t = 0;
  };

  double lr_;
  double beta1_;
  double beta2_;
  double epsilon_;
  std::size_t steps_ = 0;
  std::vector<double> filter_m_;
  std::vector<double> filter_v_;
  std::vector<Moments> sense_moments_;
};

// Trains on records that carry a gold sense, whose lemma is in `table` and
// whose gold sense is a candidate of (lemma, pos) in `inventory`; all other
// records are skipped and counted. The model holds one diagonal per gold
// sense seen in the kept records, in inventory order. Deterministic in
// `config.seed` for a fixed thread count.
TrainResult train(std::span<const ContextRecord> records, const StaticTable& table,
                  const SenseInventory& inventory, const TrainConfig& config);

}  // namespace cdes
