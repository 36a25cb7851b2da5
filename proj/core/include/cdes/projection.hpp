#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cdes/types.hpp"

namespace cdes {

struct ContextRecord;

// Elementwise coupling applied to the projected static vector inside the
// alignment loss. Values are the checkpoint codes.
enum class Activation : std::uint8_t { kLinear = 0, kRelu = 1, kGelu = 2 };

enum class InitScheme { kXavier, kUniform01 };

std::string_view to_string(Activation a);
std::optional<Activation> parse_activation(std::string_view name);
std::string_view to_string(InitScheme s);
std::optional<InitScheme> parse_init_scheme(std::string_view name);

// f(x). GELU is the exact x * Phi(x) form.
double activate(Activation a, double x);
// f'(x). The ReLU subgradient at 0 is 0.
double activate_derivative(Activation a, double x);

// Filter matrix W (p x q, row-major) mapping contextual vectors into the
// static space, plus one diagonal scaling vector a_i (length p) per sense.
class ProjectionModel {
 public:
  ProjectionModel() = default;
  ProjectionModel(std::size_t p, std::size_t q, Activation activation);

  std::size_t p() const noexcept { return p_; }
  std::size_t q() const noexcept { return q_; }
  Activation activation() const noexcept { return activation_; }
  void set_activation(Activation a) noexcept { activation_ = a; }

  std::span<float> filter() noexcept { return filter_; }
  std::span<const float> filter() const noexcept { return filter_; }

  std::size_t sense_count() const noexcept { return sense_ids_.size(); }
  const std::vector<std::string>& sense_ids() const noexcept { return sense_ids_; }
  std::optional<std::size_t> sense_index(std::string_view sense_id) const;
  bool has_sense(std::string_view sense_id) const { return sense_index(sense_id).has_value(); }

  // Appends a sense; throws ValidationError on duplicates and
  // DimensionError on a diagonal of the wrong length.
  std::size_t add_sense(std::string sense_id, VectorView diagonal);

  std::span<float> diagonal(std::size_t index);
  std::span<const float> diagonal(std::size_t index) const;
  // Throws LookupError for an unknown sense.
  std::span<const float> diagonal(std::string_view sense_id) const;

  // FNV-1a over the checkpoint serialisation.
  std::uint64_t checksum() const;

  friend bool operator==(const ProjectionModel& a, const ProjectionModel& b) {
    return a.p_ == b.p_ && a.q_ == b.q_ && a.activation_ == b.activation_ &&
           a.filter_ == b.filter_ && a.sense_ids_ == b.sense_ids_ &&
           a.diagonals_ == b.diagonals_;
  }

 private:
  std::size_t p_ = 0;
  std::size_t q_ = 0;
  Activation activation_ = Activation::kLinear;
  std::vector<float> filter_;
  std::vector<std::string> sense_ids_;
  std::unordered_map<std::string, std::size_t> sense_index_;
  std::vector<float> diagonals_;
};

// Xavier: W ~ U(+-sqrt(6/(p+q))), a_i ~ U(+-sqrt(6/(p+p))).
// Uniform01: every entry ~ U[0,1). Deterministic in `seed`.
ProjectionModel init_model(std::size_t p, std::size_t q,
                           std::span<const std::string> sense_ids, InitScheme scheme,
                           std::uint64_t seed, Activation activation = Activation::kLinear);

// One term of the alignment objective.
struct AlignmentSample {
  std::string_view sense_id;
  VectorView context;        // c(u,t), length q
  VectorView static_vector;  // g(u), length p
};

struct ForwardResult {
  std::vector<double> projected_context;  // W c
  std::vector<double> predicted_sense;    // f(a_i * g)
  std::vector<double> residual;           // W c - f(a_i * g)
};

ForwardResult forward(const ProjectionModel& model, std::string_view sense_id,
                      VectorView context, VectorView static_vector);
// Uses `record.gold_sense`; throws ValidationError when it is absent.
ForwardResult forward(const ProjectionModel& model, const ContextRecord& record,
                      VectorView static_vector);

// Sum over the batch of ||W c - f(a_i g)||^2. Throws on an empty batch.
double loss(const ProjectionModel& model, std::span<const AlignmentSample> batch);

struct Gradients {
  std::vector<double> filter;  // p x q, row-major
  // Only senses present in the batch; every other sense has zero gradient.
  std::map<std::string, std::vector<double>, std::less<>> diagonals;

  // Zero vector of length p for senses absent from the batch.
  std::vector<double> diagonal(std::string_view sense_id, std::size_t p) const;
};

// Analytic gradient of `loss` with respect to W and every a_i.
Gradients gradients(const ProjectionModel& model, std::span<const AlignmentSample> batch);

// Sense-index form used by the optimiser.
struct IndexedSample {
  std::size_t sense;
  VectorView context;
  VectorView static_vector;
};

using SparseDiagonalGrad = std::map<std::size_t, std::vector<double>>;

// Adds the gradient of the summed loss over `batch` into the accumulators
// and returns that summed loss. `grad_filter` must hold p*q values.
double accumulate_gradients(const ProjectionModel& model,
                            std::span<const IndexedSample> batch,
                            std::span<double> grad_filter, SparseDiagonalGrad& grad_diagonals);

// Summed loss without gradients.
double accumulate_loss(const ProjectionModel& model, std::span<const IndexedSample> batch);

// s_i(u) = a_i * g(u). The coupling f is not applied here.
Vector project_sense(const ProjectionModel& model, std::string_view sense_id,
                     VectorView static_vector);

// "CDEM" | u32 version | u32 p | u32 q | u8 activation | p*q f32 (W row-major)
// | u64 sense count | per sense: str16 id, p f32.
inline constexpr std::uint32_t kCheckpointVersion = 1;
void save_checkpoint(const ProjectionModel& model, const std::filesystem::path& path);
ProjectionModel load_checkpoint(const std::filesystem::path& path);

}  // namespace cdes
