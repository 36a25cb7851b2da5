#include "cdes/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>
#include <unordered_set>

#include "cdes/context_dump.hpp"
#include "cdes/error.hpp"
#include "cdes/random.hpp"
#include "cdes/sense_inventory.hpp"
#include "cdes/static_table.hpp"

namespace cdes {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ValidationError("learning_rate must be positive");
  }
  if (batch_size < 1) throw ValidationError("batch_size must be at least 1");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
    throw ValidationError("validation_fraction must lie in [0, 1)");
  }
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw ValidationError("adam betas must lie in [0, 1)");
  }
  if (!(adam_epsilon > 0.0)) throw ValidationError("adam_epsilon must be positive");
  if (threads < 1) throw ValidationError("threads must be at least 1");
}

AdamOptimizer::AdamOptimizer(const ProjectionModel& model, double learning_rate,
                             double beta1, double beta2, double epsilon)
    : lr_(learning_rate),
      beta1_(beta1),
      beta2_(beta2),
      epsilon_(epsilon),
      filter_m_(model.p() * model.q(), 0.0),
      filter_v_(model.p() * model.q(), 0.0),
      sense_moments_(model.sense_count()) {}

bool AdamOptimizer::has_moments(std::size_t sense) const {
  return sense < sense_moments_.size() && !sense_moments_[sense].m.empty();
}

std::size_t AdamOptimizer::sense_steps(std::size_t sense) const {
  return sense < sense_moments_.size() ? sense_moments_[sense].t : 0;
}

void AdamOptimizer::step(ProjectionModel& model, std::span<const double> grad_filter,
                         const SparseDiagonalGrad& grad_diagonals) {
  ++steps_;
  auto update = [&](std::span<float> params, std::span<const double> grad,
                    std::span<double> m, std::span<double> v, std::size_t t) {
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t));
    for (std::size_t i = 0; i < params.size(); ++i) {
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * grad[i];
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * grad[i] * grad[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      params[i] = static_cast<float>(params[i] - lr_ * m_hat / (std::sqrt(v_hat) + epsilon_));
    }
  };

  update(model.filter(), grad_filter, filter_m_, filter_v_, steps_);
  if (sense_moments_.size() < model.sense_count()) sense_moments_.resize(model.sense_count());
  for (const auto& [sense, grad] : grad_diagonals) {
    auto& mom = sense_moments_.at(sense);
    if (mom.m.empty()) {
      mom.m.assign(model.p(), 0.0);
      mom.v.assign(model.p(), 0.0);
    }
    ++mom.t;
    update(model.diagonal(sense), grad, mom.m, mom.v, mom.t);
  }
}

namespace {

// Summed loss and gradients over `batch`, split into contiguous chunks when
// more than one thread is requested; partial sums are combined in chunk order.
double batch_gradients(const ProjectionModel& model, std::span<const IndexedSample> batch,
                       std::size_t threads, std::vector<double>& grad_filter,
                       SparseDiagonalGrad& grad_diagonals) {
  std::fill(grad_filter.begin(), grad_filter.end(), 0.0);
  grad_diagonals.clear();
  const std::size_t chunks = std::min(threads, batch.size());
  if (chunks <= 1) return accumulate_gradients(model, batch, grad_filter, grad_diagonals);

  std::vector<std::vector<double>> filters(chunks, std::vector<double>(grad_filter.size()));
  std::vector<SparseDiagonalGrad> diags(chunks);
  std::vector<double> losses(chunks, 0.0);
  {
    std::vector<std::jthread> workers;
    const std::size_t per = (batch.size() + chunks - 1) / chunks;
    for (std::size_t c = 0; c < chunks; ++c) {
      const std::size_t begin = c * per;
      const std::size_t end = std::min(batch.size(), begin + per);
      if (begin >= end) break;
      workers.emplace_back([&, c, begin, end] {
        losses[c] = accumulate_gradients(model, batch.subspan(begin, end - begin),
                                         filters[c], diags[c]);
      });
    }
  }
  double total = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) {
    total += losses[c];
    for (std::size_t i = 0; i < grad_filter.size(); ++i) grad_filter[i] += filters[c][i];
    for (auto& [sense, g] : diags[c]) {
      auto& dst = grad_diagonals[sense];
      if (dst.empty()) {
        dst = std::move(g);
      } else {
        for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += g[k];
      }
    }
  }
  return total;
}

double mean_loss(const ProjectionModel& model, std::span<const IndexedSample> samples) {
  if (samples.empty()) return 0.0;
  return accumulate_loss(model, samples) / static_cast<double>(samples.size());
}

}  // namespace

TrainResult train(std::span<const ContextRecord> records, const StaticTable& table,
                  const SenseInventory& inventory, const TrainConfig& config) {
  config.validate();

  TrainReport report;
  report.records_total = records.size();

  struct Kept {
    std::size_t record;
    VectorView g;
  };
  std::vector<Kept> kept;
  std::unordered_set<std::string> seen;
  std::size_t q = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    if (!rec.gold_sense) {
      ++report.skipped_no_gold;
      continue;
    }
    auto g = table.find(rec.lemma);
    if (!g) {
      ++report.skipped_oov;
      continue;
    }
    const auto* cands = inventory.candidates(rec.lemma, rec.pos);
    if (!cands || std::find(cands->begin(), cands->end(), *rec.gold_sense) == cands->end()) {
      ++report.skipped_unknown_sense;
      continue;
    }
    if (q == 0) q = rec.vector.size();
    if (rec.vector.size() != q || q == 0) {
      throw DimensionError("record '" + rec.instance_id + "' has " +
                           std::to_string(rec.vector.size()) +
                           " contextual components, expected " + std::to_string(q));
    }
    seen.insert(*rec.gold_sense);
    kept.push_back({i, *g});
  }
  if (kept.empty()) {
    throw ValidationError("no trainable records: " + std::to_string(report.skipped_no_gold) +
                          " without gold sense, " + std::to_string(report.skipped_oov) +
                          " out of vocabulary, " +
                          std::to_string(report.skipped_unknown_sense) +
                          " with an unknown sense");
  }

  std::vector<std::string> sense_ids;
  for (const auto& e : inventory.senses()) {
    if (seen.contains(e.id)) sense_ids.push_back(e.id);
  }
  TrainResult result{init_model(table.dim(), q, sense_ids, config.init_scheme, config.seed,
                                config.activation),
                     {}};
  ProjectionModel& model = result.model;

  std::vector<IndexedSample> samples;
  samples.reserve(kept.size());
  for (const auto& k : kept) {
    const auto& rec = records[k.record];
    samples.push_back({*model.sense_index(*rec.gold_sense), rec.vector, k.g});
  }

  // validation split, drawn once
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t n_val = static_cast<std::size_t>(
      std::floor(config.validation_fraction * static_cast<double>(samples.size())));
  if (n_val >= samples.size()) n_val = samples.size() - 1;
  std::vector<IndexedSample> train_set;
  std::vector<IndexedSample> val_set;
  if (n_val > 0) {
    Rng split_rng(derive_seed(config.seed, "validation-split"));
    split_rng.shuffle(std::span<std::size_t>(order));
    std::vector<std::size_t> val_idx(order.begin(), order.begin() + n_val);
    std::vector<std::size_t> train_idx(order.begin() + n_val, order.end());
    std::sort(val_idx.begin(), val_idx.end());
    std::sort(train_idx.begin(), train_idx.end());
    for (auto i : val_idx) val_set.push_back(samples[i]);
    for (auto i : train_idx) train_set.push_back(samples[i]);
  } else {
    train_set = std::move(samples);
  }

  report.train_records = train_set.size();
  report.validation_records = val_set.size();
  report.senses = model.sense_count();
  report.initial_train_loss = mean_loss(model, train_set);
  report.initial_validation_loss = mean_loss(model, val_set);

  AdamOptimizer adam(model, config.learning_rate, config.adam_beta1, config.adam_beta2,
                     config.adam_epsilon);
  Rng shuffle_rng(derive_seed(config.seed, "batch-shuffle"));
  std::vector<double> grad_filter(model.p() * model.q());
  SparseDiagonalGrad grad_diagonals;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_rng.shuffle(std::span<IndexedSample>(train_set));
    double epoch_total = 0.0;
    std::size_t batch_no = 0;
    for (std::size_t begin = 0; begin < train_set.size(); begin += config.batch_size, ++batch_no) {
      const std::size_t end = std::min(train_set.size(), begin + config.batch_size);
      const auto batch_view = std::span<const IndexedSample>(train_set).subspan(begin, end - begin);
      const double batch_loss =
          batch_gradients(model, batch_view, config.threads, grad_filter, grad_diagonals);
      if (!std::isfinite(batch_loss)) {
        throw TrainingError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                            std::to_string(batch_no));
      }
      epoch_total += batch_loss;
      // mean over the batch keeps the step size independent of batch size
      const double scale = 1.0 / static_cast<double>(batch_view.size());
      for (double& g : grad_filter) g *= scale;
      for (auto& [sense, g] : grad_diagonals) {
        for (double& x : g) x *= scale;
      }
      adam.step(model, grad_filter, grad_diagonals);
    }
    report.train_loss.push_back(epoch_total / static_cast<double>(train_set.size()));
    if (!val_set.empty()) {
      const double v = mean_loss(model, val_set);
      if (!std::isfinite(v)) {
        throw TrainingError("non-finite validation loss after epoch " + std::to_string(epoch));
      }
      report.validation_loss.push_back(v);
    }
  }

  report.checksum = model.checksum();
  result.report = std::move(report);
  return result;
}

}  // namespace cdes
