#include "cdes/disambiguator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>

#include "cdes/error.hpp"
#include "cdes/gold_keys.hpp"
#include "cdes/sense_bank.hpp"
#include "cdes/sense_inventory.hpp"
#include "cdes/static_table.hpp"
#include "text_util.hpp"

namespace cdes {

Vector query_vector(VectorView static_vector, VectorView context) {
  Vector z;
  z.reserve(static_vector.size() + 2 * context.size());
  z.insert(z.end(), static_vector.begin(), static_vector.end());
  z.insert(z.end(), context.begin(), context.end());
  z.insert(z.end(), context.begin(), context.end());
  return z;
}

namespace {

double dot(VectorView a, VectorView b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * b[i];
  return s;
}

double cosine_with_norms(VectorView a, double norm_a, VectorView b, double norm_b) {
  if (norm_a == 0.0 || norm_b == 0.0) return 0.0;
  return std::clamp(dot(a, b) / (norm_a * norm_b), -1.0, 1.0);
}

// stable: equal scores keep their input order
void rank(std::vector<ScoredSense>& scored) {
  std::stable_sort(scored.begin(), scored.end(),
                   [](const ScoredSense& x, const ScoredSense& y) { return x.score > y.score; });
}

}  // namespace

double cosine(VectorView a, VectorView b) {
  if (a.size() != b.size()) {
    throw DimensionError("cosine of vectors with lengths " + std::to_string(a.size()) +
                         " and " + std::to_string(b.size()));
  }
  return cosine_with_norms(a, std::sqrt(squared_norm(a)), b, std::sqrt(squared_norm(b)));
}

Prediction disambiguate(const WsdInstance& instance, const SenseBank& bank,
                        const SenseInventory& inventory, const StaticTable& table,
                        const DisambiguationOptions& options) {
  const auto* candidates = inventory.candidates(instance.lemma, instance.pos);
  if (!candidates) {
    throw LookupError("no senses for (" + instance.lemma + ", " +
                      std::string(to_string(instance.pos)) + ")");
  }
  if (instance.context.size() != bank.q()) {
    throw DimensionError("instance '" + instance.instance_id + "' has " +
                         std::to_string(instance.context.size()) +
                         " contextual components, bank q is " + std::to_string(bank.q()));
  }
  if (table.dim() != bank.p()) {
    throw DimensionError("static table p=" + std::to_string(table.dim()) + " but bank p=" +
                         std::to_string(bank.p()));
  }

  Prediction pred;
  pred.instance_id = instance.instance_id;
  const auto g = table.find(instance.lemma);
  pred.static_missing = !g;
  const Vector zero(bank.p(), 0.0f);
  const Vector z = query_vector(g ? *g : VectorView(zero), instance.context);
  const double z_norm = std::sqrt(squared_norm(z));

  std::vector<ScoredSense> scored;
  for (const auto& sense : *candidates) {
    auto idx = bank.index_of(sense);
    if (!idx) continue;
    const auto& e = bank.entries()[*idx];
    scored.push_back({sense, cosine_with_norms(z, z_norm, e.vector, bank.norms()[*idx])});
  }

  if (scored.empty()) {
    if (options.fallback == Fallback::kMostFrequent) {
      pred.ranked.push_back({candidates->front(), kFallbackScore});
      pred.fallback_used = true;
    }
    return pred;
  }
  rank(scored);
  scored.resize(std::min(scored.size(), std::max<std::size_t>(options.k_candidates, 1)));
  pred.ranked = std::move(scored);
  return pred;
}

void EvalReport::recompute() {
  precision = attempted ? static_cast<double>(correct) / static_cast<double>(attempted) : 0.0;
  recall = gold_total ? static_cast<double>(correct) / static_cast<double>(gold_total) : 0.0;
  f1 = (precision + recall) > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

EvalReport score_wsd(std::span<const Prediction> predictions, const GoldKeys& gold,
                     std::string dataset) {
  EvalReport report;
  report.dataset = std::move(dataset);
  report.gold_total = gold.size();
  for (const auto& p : predictions) {
    if (!gold.find(p.instance_id)) {
      throw LookupError("prediction for unknown instance '" + p.instance_id + "'");
    }
    InstanceOutcome o{p.instance_id, std::nullopt, false};
    if (p.attempted()) {
      ++report.attempted;
      o.predicted = p.chosen();
      o.correct = gold.accepts(p.instance_id, p.chosen());
      report.correct += o.correct;
    }
    report.instances.push_back(std::move(o));
  }
  report.recompute();
  return report;
}

EvalReport pool_reports(std::span<const EvalReport> reports, std::string dataset) {
  EvalReport pooled;
  pooled.dataset = std::move(dataset);
  for (const auto& r : reports) {
    pooled.gold_total += r.gold_total;
    pooled.attempted += r.attempted;
    pooled.correct += r.correct;
  }
  pooled.recompute();
  return pooled;
}

std::vector<ScoredSense> neighbors(const NeighborQuery& query, const SenseBank& bank,
                                   std::size_t top_n) {
  if (top_n < 1) throw ValidationError("top_n must be >= 1");
  std::optional<std::size_t> self;
  VectorView q;
  if (const auto* id = std::get_if<std::string>(&query)) {
    self = bank.index_of(*id);
    if (!self) throw LookupError("sense '" + *id + "' is not in the bank");
    q = bank.entries()[*self].vector;
  } else {
    q = std::get<Vector>(query);
    if (q.size() != bank.dim()) {
      throw DimensionError("query has " + std::to_string(q.size()) +
                           " components, bank vectors have " + std::to_string(bank.dim()));
    }
  }
  const double q_norm = std::sqrt(squared_norm(q));
  std::vector<ScoredSense> scored;
  scored.reserve(bank.size());
  for (std::size_t i = 0; i < bank.size(); ++i) {
    if (self && *self == i) continue;
    const auto& e = bank.entries()[i];
    scored.push_back({e.sense_id, cosine_with_norms(q, q_norm, e.vector, bank.norms()[i])});
  }
  rank(scored);
  if (scored.size() > top_n) scored.resize(top_n);
  return scored;
}

void write_predictions(std::span<const Prediction> predictions,
                       const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError(FormatError::Kind::kIo, path.string(), 0, "cannot create file");
  out << std::setprecision(9);
  for (const auto& p : predictions) {
    if (!p.attempted()) continue;
    out << p.instance_id << ' ' << p.chosen();
    for (const auto& s : p.ranked) out << ' ' << s.sense_id << ' ' << s.score;
    out << '\n';
  }
  if (!out) throw FormatError(FormatError::Kind::kIo, path.string(), 0, "write failed");
}

void write_prediction_keys(std::span<const Prediction> predictions,
                           const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError(FormatError::Kind::kIo, path.string(), 0, "cannot create file");
  for (const auto& p : predictions) {
    if (p.attempted()) out << p.instance_id << ' ' << p.chosen() << '\n';
  }
  if (!out) throw FormatError(FormatError::Kind::kIo, path.string(), 0, "write failed");
}

std::vector<Prediction> read_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(FormatError::Kind::kIo, path.string(), 0, "cannot open file");
  std::vector<Prediction> out;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> f;
  while (std::getline(in, line)) {
    ++line_no;
    detail::split_whitespace(line, f);
    if (f.empty()) continue;
    if (f.size() < 2 || f.size() % 2 != 0) {
      throw FormatError(FormatError::Kind::kRaggedRow, path.string(), line_no,
                        "expected instance_id sense_id [sense_id score ...]");
    }
    Prediction p;
    p.instance_id = std::string(f[0]);
    if (f.size() == 2) {
      p.ranked.push_back({std::string(f[1]), 0.0});
    } else {
      for (std::size_t i = 2; i < f.size(); i += 2) {
        double score = 0.0;
        const std::string tok(f[i + 1]);
        try {
          std::size_t used = 0;
          score = std::stod(tok, &used);
          if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
          throw FormatError(FormatError::Kind::kMalformedNumber, path.string(), line_no,
                            "bad score '" + tok + "'");
        }
        p.ranked.push_back({std::string(f[i]), score});
      }
      if (p.ranked.front().sense_id != f[1]) {
        throw FormatError(FormatError::Kind::kRaggedRow, path.string(), line_no,
                          "chosen sense differs from the first ranked sense");
      }
    }
    p.fallback_used = p.ranked.front().score == kFallbackScore;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace cdes
