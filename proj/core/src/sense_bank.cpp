#include "cdes/sense_bank.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "binary_io.hpp"
#include "cdes/collocations.hpp"
#include "cdes/error.hpp"
#include "cdes/projection.hpp"
#include "cdes/sense_inventory.hpp"
#include "cdes/static_table.hpp"
#include "text_util.hpp"

namespace cdes {

Vector sentence_embedding(std::span<const Vector> token_vectors) {
  if (token_vectors.empty()) throw ValidationError("sentence embedding of zero tokens");
  const std::size_t q = token_vectors.front().size();
  std::vector<double> sum(q, 0.0);
  for (const auto& v : token_vectors) {
    if (v.size() != q) throw DimensionError("token vectors differ in length");
    for (std::size_t i = 0; i < q; ++i) sum[i] += v[i];
  }
  Vector mean(q);
  const double n = static_cast<double>(token_vectors.size());
  for (std::size_t i = 0; i < q; ++i) mean[i] = static_cast<float>(sum[i] / n);
  return mean;
}

std::optional<Vector> gloss_segment(const SenseInventory& inventory, std::string_view sense_id) {
  const auto* e = inventory.find(sense_id);
  if (!e) throw LookupError("unknown sense '" + std::string(sense_id) + "'");
  return e->gloss_vector;
}

SegmentMap collect_gloss_segments(const SenseInventory& inventory) {
  SegmentMap out;
  for (const auto& e : inventory.senses()) {
    if (e.gloss_vector) out.emplace(e.id, *e.gloss_vector);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Smallest |i - j| over the two ascending position lists, excluding i == j.
std::size_t min_gap(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::size_t best = std::numeric_limits<std::size_t>::max();
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) {
      // same token; look at its neighbours in the other list
      if (j + 1 < b.size()) best = std::min(best, b[j + 1] - a[i]);
      if (i + 1 < a.size()) best = std::min(best, a[i + 1] - b[j]);
      ++i;
      ++j;
    } else if (a[i] < b[j]) {
      best = std::min(best, b[j] - a[i]);
      ++i;
    } else {
      best = std::min(best, a[i] - b[j]);
      ++j;
    }
  }
  return best;
}

}  // namespace

std::map<std::string, std::vector<std::size_t>> extract_collocation_contexts(
    std::span<const LemmaSentence> sentences, const CollocationSet& collocations,
    const CollocationOptions& options) {
  if (options.window < 1) throw ValidationError("collocation window must be >= 1");
  std::map<std::string, std::vector<std::size_t>> out;
  std::map<std::string, std::size_t, std::less<>> per_anchor;
  std::map<std::string_view, std::vector<std::size_t>> positions;

  for (std::size_t s = 0; s < sentences.size(); ++s) {
    positions.clear();
    for (std::size_t t = 0; t < sentences[s].size(); ++t) {
      positions[sentences[s][t]].push_back(t);
    }
    std::set<std::string_view> anchors_hit;
    for (const auto& [lemma, pos_u] : positions) {
      auto it = collocations.by_lemma().find(lemma);
      if (it == collocations.by_lemma().end()) continue;
      for (const auto& key : it->second) {
        // visit each pair once, from its first lemma
        if (key.first != lemma) continue;
        auto pv = positions.find(key.second);
        if (pv == positions.end()) continue;
        if (min_gap(pos_u, pv->second) > options.window) continue;
        for (const auto& c : collocations.pairs().at(key)) {
          if (options.max_sentences_per_lemma != 0) {
            auto cnt = per_anchor.find(c.anchor);
            const std::size_t used = cnt == per_anchor.end() ? 0 : cnt->second;
            if (used >= options.max_sentences_per_lemma && !anchors_hit.contains(c.anchor)) {
              continue;
            }
          }
          auto& dst = out[c.sense_id];
          if (dst.empty() || dst.back() != s) dst.push_back(s);
          anchors_hit.insert(c.anchor);
        }
      }
    }
    for (auto anchor : anchors_hit) ++per_anchor[std::string(anchor)];
  }
  return out;
}

// ---------------------------------------------------------------------------

std::map<std::size_t, std::string> MajorityLabeler::label(const LabelingInput& in) const {
  std::map<std::size_t, std::string> out;
  const std::size_t k = in.clusters.k();
  // votes[cluster][candidate]
  std::vector<std::vector<std::size_t>> votes(k, std::vector<std::size_t>(in.candidates.size(), 0));
  for (std::size_t i = 0; i < in.sentences.size(); ++i) {
    const auto& label = in.sentences[i].label;
    if (!label) continue;
    auto it = std::find(in.candidates.begin(), in.candidates.end(), *label);
    if (it == in.candidates.end()) continue;
    ++votes[in.clusters.assignment[i]][static_cast<std::size_t>(it - in.candidates.begin())];
  }
  for (std::size_t c = 0; c < k; ++c) {
    const auto best = std::max_element(votes[c].begin(), votes[c].end());
    if (best == votes[c].end() || *best == 0) continue;
    out.emplace(c, in.candidates[static_cast<std::size_t>(best - votes[c].begin())]);
  }
  return out;
}

std::map<std::size_t, std::string> FirstSenseLabeler::label(const LabelingInput& in) const {
  std::map<std::size_t, std::string> out;
  if (in.candidates.empty()) return out;
  for (std::size_t c = 0; c < in.clusters.k(); ++c) out.emplace(c, in.candidates.front());
  return out;
}

std::map<std::size_t, std::string> ExternalLabeler::label(const LabelingInput& in) const {
  auto it = labels_.find(std::string(in.lemma));
  if (it == labels_.end()) return {};
  std::map<std::size_t, std::string> out;
  for (const auto& [cluster, sense] : it->second) {
    if (cluster < in.clusters.k()) out.emplace(cluster, sense);
  }
  return out;
}

ExternalLabeler ExternalLabeler::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(FormatError::Kind::kIo, path.string(), 0, "cannot open file");
  std::map<std::string, std::map<std::size_t, std::string>> labels;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> fields;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    detail::split_char(line, '\t', fields);
    if (fields.size() != 3) {
      throw FormatError(FormatError::Kind::kRaggedRow, path.string(), line_no,
                        "expected lemma, cluster_index, sense_id");
    }
    std::size_t cluster = 0;
    const auto idx = detail::trim(fields[1]);
    auto [ptr, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), cluster);
    if (ec != std::errc() || ptr != idx.data() + idx.size()) {
      throw FormatError(FormatError::Kind::kMalformedNumber, path.string(), line_no,
                        "bad cluster index '" + std::string(idx) + "'");
    }
    labels[std::string(detail::trim(fields[0]))][cluster] = std::string(detail::trim(fields[2]));
  }
  return ExternalLabeler(std::move(labels));
}

CorpusSegments corpus_segments(std::string_view lemma,
                               std::span<const LabeledSentence> sentences,
                               const SenseInventory& inventory, const ClusterLabeler& labeler,
                               std::uint64_t seed, std::size_t max_iter) {
  CorpusSegments out;
  const auto* candidates = inventory.senses_of_lemma(lemma);
  if (sentences.empty() || !candidates) return out;

  std::vector<Vector> vectors;
  vectors.reserve(sentences.size());
  for (const auto& s : sentences) vectors.push_back(s.vector);
  out.clusters = kmeans(vectors, candidates->size(), seed, max_iter);

  out.clusters.labels = labeler.label({lemma, *candidates, sentences, out.clusters});
  for (const auto& [cluster, sense] : out.clusters.labels) {
    if (std::find(candidates->begin(), candidates->end(), sense) == candidates->end()) {
      throw ValidationError(std::string(labeler.name()) + " labeller assigned '" + sense +
                            "', which is not a sense of '" + std::string(lemma) + "'");
    }
  }
  out.unlabeled_clusters = out.clusters.k() - out.clusters.labels.size();

  // several clusters may carry one sense; pool their members
  const std::size_t q = vectors.front().size();
  std::map<std::string, std::pair<std::vector<double>, std::size_t>> sums;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    auto lab = out.clusters.labels.find(out.clusters.assignment[i]);
    if (lab == out.clusters.labels.end()) continue;
    auto& [sum, count] = sums[lab->second];
    if (sum.empty()) sum.assign(q, 0.0);
    for (std::size_t d = 0; d < q; ++d) sum[d] += vectors[i][d];
    ++count;
  }
  for (const auto& [sense, acc] : sums) {
    Vector v(q);
    for (std::size_t d = 0; d < q; ++d) {
      v[d] = static_cast<float>(acc.first[d] / static_cast<double>(acc.second));
    }
    out.segments.emplace(sense, std::move(v));
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string_view to_string(FillPolicy f) {
  switch (f) {
    case FillPolicy::kZero: return "zero";
    case FillPolicy::kCopyGloss: return "copy_gloss";
    case FillPolicy::kSkipSense: return "skip_sense";
  }
  return "zero";
}

std::optional<FillPolicy> parse_fill_policy(std::string_view name) {
  const std::string n = detail::ascii_lower(name);
  if (n == "zero") return FillPolicy::kZero;
  if (n == "copy_gloss" || n == "copy-gloss") return FillPolicy::kCopyGloss;
  if (n == "skip_sense" || n == "skip-sense" || n == "skip") return FillPolicy::kSkipSense;
  return std::nullopt;
}

SenseBank::SenseBank(std::size_t p, std::size_t q) : p_(p), q_(q) {
  if (p == 0 || q == 0) throw DimensionError("sense bank needs p >= 1 and q >= 1");
}

void SenseBank::add(BankEntry entry) {
  if (entry.vector.size() != dim()) {
    throw DimensionError("bank vector for '" + entry.sense_id + "' has " +
                         std::to_string(entry.vector.size()) + " components, expected " +
                         std::to_string(dim()));
  }
  if (!index_.emplace(entry.sense_id, entries_.size()).second) {
    throw ValidationError("duplicate bank sense '" + entry.sense_id + "'");
  }
  norms_.push_back(std::sqrt(squared_norm(entry.vector)));
  entries_.push_back(std::move(entry));
}

const BankEntry* SenseBank::find(std::string_view sense_id) const {
  auto idx = index_of(sense_id);
  return idx ? &entries_[*idx] : nullptr;
}

std::optional<std::size_t> SenseBank::index_of(std::string_view sense_id) const {
  auto it = index_.find(std::string(sense_id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double CoverageReport::gloss_fraction() const {
  return bank_senses ? static_cast<double>(with_gloss) / static_cast<double>(bank_senses) : 0.0;
}

double CoverageReport::corpus_fraction() const {
  return bank_senses ? static_cast<double>(with_corpus) / static_cast<double>(bank_senses) : 0.0;
}

BankBuild assemble_bank(const ProjectionModel& model, const StaticTable& table,
                        const SenseInventory& inventory, const SegmentMap& gloss,
                        const SegmentMap& corpus, FillPolicy fill) {
  const std::size_t p = model.p();
  const std::size_t q = model.q();
  if (table.dim() != p) {
    throw DimensionError("static table p=" + std::to_string(table.dim()) +
                         " but model p=" + std::to_string(p));
  }
  auto check_q = [q](const SegmentMap& m, const char* what) {
    for (const auto& [id, v] : m) {
      if (v.size() != q) {
        throw DimensionError(std::string(what) + " segment of '" + id + "' has " +
                             std::to_string(v.size()) + " components, model q=" +
                             std::to_string(q));
      }
    }
  };
  check_q(gloss, "gloss");
  check_q(corpus, "corpus");

  BankBuild build{SenseBank(p, q), {}};
  auto& cov = build.coverage;
  cov.inventory_senses = inventory.size();

  for (const auto& sense : inventory.senses()) {
    const auto g = table.find(sense.lemma);
    if (!g) {
      ++cov.skipped_oov;
      continue;
    }
    const auto gl = gloss.find(sense.id);
    const auto co = corpus.find(sense.id);
    const bool has_gloss = gl != gloss.end();
    const bool has_corpus = co != corpus.end();
    if (fill == FillPolicy::kSkipSense && !(has_gloss && has_corpus)) {
      ++cov.skipped_policy;
      continue;
    }

    BankEntry entry{sense.id, Vector(p + 2 * q, 0.0f), has_gloss, has_corpus};
    if (model.has_sense(sense.id)) {
      const Vector s = project_sense(model, sense.id, *g);
      std::copy(s.begin(), s.end(), entry.vector.begin());
      ++cov.projected;
    } else {
      std::copy(g->begin(), g->end(), entry.vector.begin());
      ++cov.unprojected;
    }
    auto gloss_dst = entry.vector.begin() + static_cast<std::ptrdiff_t>(p);
    auto corpus_dst = gloss_dst + static_cast<std::ptrdiff_t>(q);
    if (has_gloss) std::copy(gl->second.begin(), gl->second.end(), gloss_dst);
    if (has_corpus) {
      std::copy(co->second.begin(), co->second.end(), corpus_dst);
    } else if (fill == FillPolicy::kCopyGloss && has_gloss) {
      std::copy(gl->second.begin(), gl->second.end(), corpus_dst);
    }
    cov.with_gloss += has_gloss;
    cov.with_corpus += has_corpus;
    build.bank.add(std::move(entry));
  }
  cov.bank_senses = build.bank.size();
  return build;
}

CoverageReport coverage_of(const SenseBank& bank) {
  CoverageReport cov;
  cov.bank_senses = bank.size();
  for (const auto& e : bank.entries()) {
    cov.with_gloss += e.has_gloss;
    cov.with_corpus += e.has_corpus;
  }
  return cov;
}

void save_bank(const SenseBank& bank, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(FormatError::Kind::kIo, path.string(), 0, "cannot create file");
  detail::BinaryWriter w(out, path.string());
  w.magic("CDEB");
  w.u32(static_cast<std::uint32_t>(bank.p()));
  w.u32(static_cast<std::uint32_t>(bank.q()));
  w.u64(bank.size());
  for (const auto& e : bank.entries()) {
    w.str16(e.sense_id);
    w.f32s(e.vector);
    w.u8(e.has_gloss ? 1 : 0);
    w.u8(e.has_corpus ? 1 : 0);
  }
  w.finish();
}

SenseBank load_bank(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(FormatError::Kind::kIo, path.string(), 0, "cannot open file");
  detail::BinaryReader r(in, path.string());
  r.expect_magic("CDEB");
  const std::uint32_t p = r.u32("p");
  const std::uint32_t q = r.u32("q");
  if (p == 0 || q == 0) {
    throw FormatError(FormatError::Kind::kZeroDimension, path.string(), 0, "p or q is 0");
  }
  const std::uint64_t count = r.u64("sense count");
  SenseBank bank(p, q);
  for (std::uint64_t i = 0; i < count; ++i) {
    BankEntry e;
    e.sense_id = r.str16("sense id");
    e.vector.resize(bank.dim());
    r.f32s(e.vector, "bank vector");
    const std::uint8_t gf = r.u8("gloss flag");
    const std::uint8_t cf = r.u8("corpus flag");
    if (gf > 1 || cf > 1) {
      throw FormatError(FormatError::Kind::kBadTag, path.string(), 0,
                        "presence flags of '" + e.sense_id + "' are not 0/1");
    }
    e.has_gloss = gf == 1;
    e.has_corpus = cf == 1;
    try {
      bank.add(std::move(e));
    } catch (const ValidationError& err) {
      throw FormatError(FormatError::Kind::kDuplicateId, path.string(), 0, err.what());
    }
  }
  return bank;
}

}  // namespace cdes
