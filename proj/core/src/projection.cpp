#include "cdes/projection.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "binary_io.hpp"
#include "cdes/context_dump.hpp"
#include "cdes/error.hpp"
#include "cdes/random.hpp"
#include "text_util.hpp"

namespace cdes {

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::kLinear: return "linear";
    case Activation::kRelu: return "relu";
    case Activation::kGelu: return "gelu";
  }
  return "linear";
}

std::optional<Activation> parse_activation(std::string_view name) {
  const std::string n = detail::ascii_lower(name);
  if (n == "linear") return Activation::kLinear;
  if (n == "relu") return Activation::kRelu;
  if (n == "gelu") return Activation::kGelu;
  return std::nullopt;
}

std::string_view to_string(InitScheme s) {
  return s == InitScheme::kXavier ? "xavier" : "uniform01";
}

std::optional<InitScheme> parse_init_scheme(std::string_view name) {
  const std::string n = detail::ascii_lower(name);
  if (n == "xavier") return InitScheme::kXavier;
  if (n == "uniform01" || n == "uniform") return InitScheme::kUniform01;
  return std::nullopt;
}

double activate(Activation a, double x) {
  switch (a) {
    case Activation::kLinear: return x;
    case Activation::kRelu: return x > 0.0 ? x : 0.0;
    case Activation::kGelu: return x * 0.5 * (1.0 + std::erf(x * std::numbers::sqrt2 / 2.0));
  }
  return x;
}

double activate_derivative(Activation a, double x) {
  switch (a) {
    case Activation::kLinear: return 1.0;
    case Activation::kRelu: return x > 0.0 ? 1.0 : 0.0;
    case Activation::kGelu: {
      const double cdf = 0.5 * (1.0 + std::erf(x * std::numbers::sqrt2 / 2.0));
      const double pdf = std::exp(-0.5 * x * x) * std::numbers::inv_sqrtpi / std::numbers::sqrt2;
      return cdf + x * pdf;
    }
  }
  return 1.0;
}

ProjectionModel::ProjectionModel(std::size_t p, std::size_t q, Activation activation)
    : p_(p), q_(q), activation_(activation), filter_(p * q, 0.0f) {
  if (p == 0 || q == 0) throw DimensionError("projection model needs p >= 1 and q >= 1");
}

std::optional<std::size_t> ProjectionModel::sense_index(std::string_view sense_id) const {
  auto it = sense_index_.find(std::string(sense_id));
  if (it == sense_index_.end()) return std::nullopt;
  return it->second;
}

std::size_t ProjectionModel::add_sense(std::string sense_id, VectorView diagonal) {
  if (diagonal.size() != p_) {
    throw DimensionError("diagonal for '" + sense_id + "' has " +
                         std::to_string(diagonal.size()) + " entries, expected " +
                         std::to_string(p_));
  }
  const std::size_t index = sense_ids_.size();
  if (!sense_index_.emplace(sense_id, index).second) {
    throw ValidationError("duplicate sense id '" + sense_id + "'");
  }
  sense_ids_.push_back(std::move(sense_id));
  diagonals_.insert(diagonals_.end(), diagonal.begin(), diagonal.end());
  return index;
}

std::span<float> ProjectionModel::diagonal(std::size_t index) {
  return std::span<float>(diagonals_).subspan(index * p_, p_);
}

std::span<const float> ProjectionModel::diagonal(std::size_t index) const {
  return std::span<const float>(diagonals_).subspan(index * p_, p_);
}

std::span<const float> ProjectionModel::diagonal(std::string_view sense_id) const {
  auto idx = sense_index(sense_id);
  if (!idx) throw LookupError("no diagonal for sense '" + std::string(sense_id) + "'");
  return diagonal(*idx);
}

namespace {

void write_model(detail::BinaryWriter& w, const ProjectionModel& m) {
  w.magic("CDEM");
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(m.p()));
  w.u32(static_cast<std::uint32_t>(m.q()));
  w.u8(static_cast<std::uint8_t>(m.activation()));
  w.f32s(m.filter());
  w.u64(m.sense_count());
  for (std::size_t i = 0; i < m.sense_count(); ++i) {
    w.str16(m.sense_ids()[i]);
    w.f32s(m.diagonal(i));
  }
}

void check_dims(const ProjectionModel& model, VectorView context, VectorView g) {
  if (context.size() != model.q()) {
    throw DimensionError("context vector has " + std::to_string(context.size()) +
                         " components, model q is " + std::to_string(model.q()));
  }
  if (g.size() != model.p()) {
    throw DimensionError("static vector has " + std::to_string(g.size()) +
                         " components, model p is " + std::to_string(model.p()));
  }
}

// W c for one row
inline double row_dot(const float* row, const float* c, std::size_t q) {
  double s = 0.0;
  for (std::size_t j = 0; j < q; ++j) s += static_cast<double>(row[j]) * c[j];
  return s;
}

std::vector<IndexedSample> index_batch(const ProjectionModel& model,
                                       std::span<const AlignmentSample> batch) {
  if (batch.empty()) throw ValidationError("empty batch");
  std::vector<IndexedSample> out;
  out.reserve(batch.size());
  for (const auto& s : batch) {
    auto idx = model.sense_index(s.sense_id);
    if (!idx) throw LookupError("no diagonal for sense '" + std::string(s.sense_id) + "'");
    check_dims(model, s.context, s.static_vector);
    out.push_back({*idx, s.context, s.static_vector});
  }
  return out;
}

}  // namespace

std::uint64_t ProjectionModel::checksum() const {
  std::ostringstream buf(std::ios::binary);
  detail::BinaryWriter w(buf, "<checksum>");
  write_model(w, *this);
  const std::string bytes = buf.str();
  return fnv1a({reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size()});
}

ProjectionModel init_model(std::size_t p, std::size_t q,
                           std::span<const std::string> sense_ids, InitScheme scheme,
                           std::uint64_t seed, Activation activation) {
  if (sense_ids.empty()) throw ValidationError("init_model needs at least one sense");
  ProjectionModel model(p, q, activation);
  Rng rng(seed);
  const double filter_bound = std::sqrt(6.0 / static_cast<double>(p + q));
  const double diag_bound = std::sqrt(6.0 / static_cast<double>(p + p));
  auto draw = [&](double bound) {
    return scheme == InitScheme::kXavier ? static_cast<float>(rng.uniform(-bound, bound))
                                         : static_cast<float>(rng.uniform());
  };
  for (float& w : model.filter()) w = draw(filter_bound);
  std::vector<float> diag(p);
  for (const auto& id : sense_ids) {
    for (float& a : diag) a = draw(diag_bound);
    model.add_sense(id, diag);
  }
  return model;
}

ForwardResult forward(const ProjectionModel& model, std::string_view sense_id,
                      VectorView context, VectorView static_vector) {
  auto idx = model.sense_index(sense_id);
  if (!idx) throw LookupError("no diagonal for sense '" + std::string(sense_id) + "'");
  check_dims(model, context, static_vector);
  const std::size_t p = model.p();
  const std::size_t q = model.q();
  const auto a = model.diagonal(*idx);
  const auto w = model.filter();
  ForwardResult r;
  r.projected_context.resize(p);
  r.predicted_sense.resize(p);
  r.residual.resize(p);
  for (std::size_t k = 0; k < p; ++k) {
    r.projected_context[k] = row_dot(w.data() + k * q, context.data(), q);
    r.predicted_sense[k] =
        activate(model.activation(), static_cast<double>(a[k]) * static_vector[k]);
    r.residual[k] = r.projected_context[k] - r.predicted_sense[k];
  }
  return r;
}

ForwardResult forward(const ProjectionModel& model, const ContextRecord& record,
                      VectorView static_vector) {
  if (!record.gold_sense) {
    throw ValidationError("record '" + record.instance_id + "' has no gold sense");
  }
  return forward(model, *record.gold_sense, record.vector, static_vector);
}

double accumulate_loss(const ProjectionModel& model, std::span<const IndexedSample> batch) {
  const std::size_t p = model.p();
  const std::size_t q = model.q();
  const auto w = model.filter();
  double total = 0.0;
  for (const auto& s : batch) {
    const auto a = model.diagonal(s.sense);
    for (std::size_t k = 0; k < p; ++k) {
      const double proj = row_dot(w.data() + k * q, s.context.data(), q);
      const double pred =
          activate(model.activation(), static_cast<double>(a[k]) * s.static_vector[k]);
      const double r = proj - pred;
      total += r * r;
    }
  }
  return total;
}

double accumulate_gradients(const ProjectionModel& model,
                            std::span<const IndexedSample> batch,
                            std::span<double> grad_filter, SparseDiagonalGrad& grad_diagonals) {
  const std::size_t p = model.p();
  const std::size_t q = model.q();
  if (grad_filter.size() != p * q) throw DimensionError("gradient buffer has wrong size");
  const auto w = model.filter();
  double total = 0.0;
  std::vector<double> residual(p);
  for (const auto& s : batch) {
    const auto a = model.diagonal(s.sense);
    auto& ga = grad_diagonals[s.sense];
    if (ga.empty()) ga.assign(p, 0.0);
    for (std::size_t k = 0; k < p; ++k) {
      const double z = static_cast<double>(a[k]) * s.static_vector[k];
      const double r = row_dot(w.data() + k * q, s.context.data(), q) -
                       activate(model.activation(), z);
      residual[k] = r;
      total += r * r;
      ga[k] += -2.0 * r * activate_derivative(model.activation(), z) * s.static_vector[k];
    }
    for (std::size_t k = 0; k < p; ++k) {
      const double two_r = 2.0 * residual[k];
      double* gw = grad_filter.data() + k * q;
      for (std::size_t j = 0; j < q; ++j) gw[j] += two_r * s.context[j];
    }
  }
  return total;
}

double loss(const ProjectionModel& model, std::span<const AlignmentSample> batch) {
  const auto indexed = index_batch(model, batch);
  return accumulate_loss(model, indexed);
}

std::vector<double> Gradients::diagonal(std::string_view sense_id, std::size_t p) const {
  auto it = diagonals.find(sense_id);
  return it == diagonals.end() ? std::vector<double>(p, 0.0) : it->second;
}

Gradients gradients(const ProjectionModel& model, std::span<const AlignmentSample> batch) {
  const auto indexed = index_batch(model, batch);
  Gradients g;
  g.filter.assign(model.p() * model.q(), 0.0);
  SparseDiagonalGrad sparse;
  accumulate_gradients(model, indexed, g.filter, sparse);
  for (auto& [idx, values] : sparse) {
    g.diagonals.emplace(model.sense_ids()[idx], std::move(values));
  }
  return g;
}

Vector project_sense(const ProjectionModel& model, std::string_view sense_id,
                     VectorView static_vector) {
  const auto a = model.diagonal(sense_id);
  if (static_vector.size() != model.p()) {
    throw DimensionError("static vector has " + std::to_string(static_vector.size()) +
                         " components, model p is " + std::to_string(model.p()));
  }
  Vector out(model.p());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = a[k] * static_vector[k];
  return out;
}

void save_checkpoint(const ProjectionModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(FormatError::Kind::kIo, path.string(), 0, "cannot create file");
  detail::BinaryWriter w(out, path.string());
  write_model(w, model);
  w.finish();
}

ProjectionModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(FormatError::Kind::kIo, path.string(), 0, "cannot open file");
  detail::BinaryReader r(in, path.string());
  r.expect_magic("CDEM");
  const std::uint32_t version = r.u32("version");
  if (version != kCheckpointVersion) {
    throw FormatError(FormatError::Kind::kUnsupportedVersion, path.string(), 0,
                      "checkpoint version " + std::to_string(version));
  }
  const std::uint32_t p = r.u32("p");
  const std::uint32_t q = r.u32("q");
  if (p == 0 || q == 0) {
    throw FormatError(FormatError::Kind::kZeroDimension, path.string(), 0, "p or q is 0");
  }
  const std::uint8_t code = r.u8("activation");
  if (code > static_cast<std::uint8_t>(Activation::kGelu)) {
    throw FormatError(FormatError::Kind::kBadTag, path.string(), 0,
                      "activation code " + std::to_string(code));
  }
  ProjectionModel model(p, q, static_cast<Activation>(code));
  r.f32s(model.filter(), "filter matrix");
  const std::uint64_t count = r.u64("sense count");
  std::vector<float> diag(p);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::string id = r.str16("sense id");
    r.f32s(diag, "sense diagonal");
    try {
      model.add_sense(std::move(id), diag);
    } catch (const ValidationError& e) {
      throw FormatError(FormatError::Kind::kDuplicateId, path.string(), 0, e.what());
    }
  }
  return model;
}

}  // namespace cdes
