#include "cdes/wic.hpp"

#include <cmath>
#include <fstream>
#include <unordered_map>

#include "cdes/context_dump.hpp"
#include "cdes/disambiguator.hpp"
#include "cdes/error.hpp"
#include "cdes/projection.hpp"
#include "cdes/sense_bank.hpp"
#include "cdes/sense_inventory.hpp"
#include "cdes/static_table.hpp"
#include "text_util.hpp"

namespace cdes {

namespace {

Vector sense_vector(const std::string& sense, const SenseBank& bank,
                    const ProjectionModel& model, VectorView g) {
  if (model.has_sense(sense)) return project_sense(model, sense, g);
  const auto* e = bank.find(sense);
  const auto head = bank.projected_segment(*e);
  return Vector(head.begin(), head.end());
}

double sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// log(1 + exp(t)) without overflow
double softplus(double t) { return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

double linear_score(const LogisticModel& m, const WicFeatures& z) {
  double s = m.bias;
  for (std::size_t i = 0; i < kWicFeatureCount; ++i) s += m.weights[i] * z[i];
  return s;
}

}  // namespace

std::optional<WicFeatures> wic_features(const WicPair& pair, const SenseBank& bank,
                                        const SenseInventory& inventory,
                                        const StaticTable& table, const ProjectionModel& model) {
  const auto g = table.find(pair.lemma);
  if (!g || !inventory.candidates(pair.lemma, pair.pos)) return std::nullopt;

  const DisambiguationOptions one{1, Fallback::kNone};
  const auto p1 = disambiguate({pair.pair_id + "#1", pair.lemma, pair.pos, pair.c1}, bank,
                               inventory, table, one);
  const auto p2 = disambiguate({pair.pair_id + "#2", pair.lemma, pair.pos, pair.c2}, bank,
                               inventory, table, one);
  if (!p1.attempted() || !p2.attempted()) return std::nullopt;

  const Vector si = sense_vector(p1.chosen(), bank, model, *g);
  const Vector sj = sense_vector(p2.chosen(), bank, model, *g);
  const Vector z1 = query_vector(*g, pair.c1);
  const Vector z2 = query_vector(*g, pair.c2);
  const std::size_t p = g->size();
  const VectorView h1 = VectorView(z1).first(p);
  const VectorView h2 = VectorView(z2).first(p);

  return WicFeatures{cosine(si, sj), cosine(z1, z2), cosine(si, h1),
                     cosine(sj, h2), cosine(si, h2), cosine(sj, h1)};
}

WicFeatures LogisticModel::standardized(const WicFeatures& x) const {
  WicFeatures z{};
  for (std::size_t i = 0; i < kWicFeatureCount; ++i) z[i] = (x[i] - mean[i]) / scale[i];
  return z;
}

double LogisticModel::probability(const WicFeatures& x) const {
  return sigmoid(linear_score(*this, standardized(x)));
}

double logistic_loss(const LogisticModel& model, std::span<const LabeledFeatures> data,
                     double l2) {
  if (data.empty()) throw ValidationError("logistic loss of an empty set");
  double total = 0.0;
  for (const auto& d : data) {
    const double t = linear_score(model, model.standardized(d.x));
    // -log sigma(t) = softplus(-t), -log(1 - sigma(t)) = softplus(t)
    total += d.y ? softplus(-t) : softplus(t);
  }
  double reg = 0.0;
  for (double w : model.weights) reg += w * w;
  return total / static_cast<double>(data.size()) + 0.5 * l2 * reg;
}

void logistic_gradient(const LogisticModel& model, std::span<const LabeledFeatures> data,
                       double l2, WicFeatures& grad_w, double& grad_b) {
  if (data.empty()) throw ValidationError("logistic gradient of an empty set");
  grad_w.fill(0.0);
  grad_b = 0.0;
  for (const auto& d : data) {
    const WicFeatures z = model.standardized(d.x);
    const double err = sigmoid(linear_score(model, z)) - (d.y ? 1.0 : 0.0);
    for (std::size_t i = 0; i < kWicFeatureCount; ++i) grad_w[i] += err * z[i];
    grad_b += err;
  }
  const double n = static_cast<double>(data.size());
  for (std::size_t i = 0; i < kWicFeatureCount; ++i) {
    grad_w[i] = grad_w[i] / n + l2 * model.weights[i];
  }
  grad_b /= n;
}

LogisticModel train_logistic(std::span<const LabeledFeatures> data,
                             const LogisticOptions& options) {
  if (data.empty()) throw ValidationError("no WiC training examples");
  std::size_t positives = 0;
  for (const auto& d : data) positives += d.y;
  if (positives == 0 || positives == data.size()) {
    throw ValidationError("WiC training data holds a single class");
  }
  if (!(options.learning_rate > 0.0)) throw ValidationError("learning rate must be positive");

  LogisticModel model;
  if (options.standardize) {
    const double n = static_cast<double>(data.size());
    for (std::size_t i = 0; i < kWicFeatureCount; ++i) {
      double mean = 0.0;
      for (const auto& d : data) mean += d.x[i];
      mean /= n;
      double var = 0.0;
      for (const auto& d : data) var += (d.x[i] - mean) * (d.x[i] - mean);
      const double sd = std::sqrt(var / n);
      model.mean[i] = mean;
      // constant features pass through unscaled
      model.scale[i] = sd > 1e-12 ? sd : 1.0;
    }
  }

  WicFeatures gw{};
  double gb = 0.0;
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    logistic_gradient(model, data, options.l2, gw, gb);
    for (std::size_t i = 0; i < kWicFeatureCount; ++i) {
      model.weights[i] -= options.learning_rate * gw[i];
    }
    model.bias -= options.learning_rate * gb;
    ++model.iterations;
  }
  model.final_loss = logistic_loss(model, data, options.l2);
  return model;
}

WicAccuracy wic_accuracy(const LogisticModel& model, std::span<const WicExample> examples) {
  WicAccuracy acc;
  acc.total = examples.size();
  for (const auto& e : examples) {
    if (!e.features) {
      ++acc.skipped;
      continue;
    }
    if (model.predict(*e.features) == e.gold) ++acc.correct;
  }
  acc.accuracy = acc.total ? static_cast<double>(acc.correct) / static_cast<double>(acc.total)
                           : 0.0;
  return acc;
}

namespace {

std::optional<bool> parse_label(std::string_view s) {
  s = detail::trim(s);
  if (s == "T" || s == "t" || s == "1" || s == "true") return true;
  if (s == "F" || s == "f" || s == "0" || s == "false") return false;
  return std::nullopt;
}

}  // namespace

std::vector<WicPair> load_wic_pairs(const std::filesystem::path& dump_path,
                                    const std::filesystem::path& sidecar,
                                    const std::optional<std::filesystem::path>& gold) {
  const ContextDump dump = load_context_dump(dump_path);
  std::unordered_map<std::string, const ContextRecord*> by_id;
  for (const auto& r : dump.records) by_id.emplace(r.instance_id, &r);

  std::ifstream in(sidecar);
  if (!in) throw FormatError(FormatError::Kind::kIo, sidecar.string(), 0, "cannot open file");
  std::vector<WicPair> pairs;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> f;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    detail::split_char(line, '\t', f);
    if (f.size() != 3 && f.size() != 4) {
      throw FormatError(FormatError::Kind::kRaggedRow, sidecar.string(), line_no,
                        "expected pair_id, instance_id_1, instance_id_2[, label]");
    }
    auto r1 = by_id.find(std::string(detail::trim(f[1])));
    auto r2 = by_id.find(std::string(detail::trim(f[2])));
    if (r1 == by_id.end() || r2 == by_id.end()) {
      throw FormatError(FormatError::Kind::kMissingField, sidecar.string(), line_no,
                        "instance id not found in " + dump_path.string());
    }
    if (r1->second->lemma != r2->second->lemma) {
      throw FormatError(FormatError::Kind::kRaggedRow, sidecar.string(), line_no,
                        "pair links different lemmas");
    }
    WicPair p;
    p.pair_id = std::string(detail::trim(f[0]));
    p.lemma = r1->second->lemma;
    p.pos = r1->second->pos;
    p.c1 = r1->second->vector;
    p.c2 = r2->second->vector;
    if (f.size() == 4 && !detail::trim(f[3]).empty()) {
      p.gold = parse_label(f[3]);
      if (!p.gold) {
        throw FormatError(FormatError::Kind::kBadTag, sidecar.string(), line_no,
                          "label must be T or F");
      }
    }
    pairs.push_back(std::move(p));
  }

  if (gold) {
    std::ifstream g(*gold);
    if (!g) throw FormatError(FormatError::Kind::kIo, gold->string(), 0, "cannot open file");
    std::size_t i = 0;
    line_no = 0;
    while (std::getline(g, line)) {
      ++line_no;
      if (detail::trim(line).empty()) continue;
      if (i >= pairs.size()) {
        throw FormatError(FormatError::Kind::kRaggedRow, gold->string(), line_no,
                          "more labels than pairs");
      }
      pairs[i].gold = parse_label(line);
      if (!pairs[i].gold) {
        throw FormatError(FormatError::Kind::kBadTag, gold->string(), line_no,
                          "label must be T or F");
      }
      ++i;
    }
    if (i != pairs.size()) {
      throw FormatError(FormatError::Kind::kTruncated, gold->string(), line_no,
                        "fewer labels than pairs");
    }
  }
  return pairs;
}

void save_wic_pairs(std::span<const WicPair> pairs, const std::filesystem::path& dump_path,
                    const std::filesystem::path& sidecar) {
  ContextDump dump;
  dump.q = pairs.empty() ? 1 : static_cast<std::uint32_t>(pairs.front().c1.size());
  std::ofstream out(sidecar);
  if (!out) throw FormatError(FormatError::Kind::kIo, sidecar.string(), 0, "cannot create file");
  for (const auto& p : pairs) {
    const std::string a = p.pair_id + ".1";
    const std::string b = p.pair_id + ".2";
    dump.records.push_back({a, p.lemma, p.pos, std::nullopt, p.c1});
    dump.records.push_back({b, p.lemma, p.pos, std::nullopt, p.c2});
    out << p.pair_id << '\t' << a << '\t' << b;
    if (p.gold) out << '\t' << (*p.gold ? 'T' : 'F');
    out << '\n';
  }
  if (!out) throw FormatError(FormatError::Kind::kIo, sidecar.string(), 0, "write failed");
  save_context_dump(dump, dump_path);
}

}  // namespace cdes
