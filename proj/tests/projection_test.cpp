#include <gtest/gtest.h>

#include <cmath>

#include "cdes/context_dump.hpp"
#include "cdes/error.hpp"
#include "cdes/projection.hpp"
#include "cdes/trainer.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace cdes {
namespace {

using testing::random_vector;

oracle::Act to_oracle(Activation a) {
  switch (a) {
    case Activation::kLinear: return oracle::Act::kLinear;
    case Activation::kRelu: return oracle::Act::kRelu;
    case Activation::kGelu: return oracle::Act::kGelu;
  }
  return oracle::Act::kLinear;
}

oracle::Params to_oracle(const ProjectionModel& m) {
  oracle::Params out;
  out.p = m.p();
  out.q = m.q();
  out.w.assign(m.filter().begin(), m.filter().end());
  for (std::size_t s = 0; s < m.sense_count(); ++s) {
    out.diag.emplace_back(m.diagonal(s).begin(), m.diagonal(s).end());
  }
  return out;
}

// A random model plus a batch, with the float storage kept alive.
struct Fixture {
  ProjectionModel model;
  std::vector<std::string> ids;
  std::vector<Vector> contexts;
  std::vector<Vector> statics;
  std::vector<std::size_t> senses;

  std::vector<AlignmentSample> batch() const {
    std::vector<AlignmentSample> out;
    for (std::size_t i = 0; i < contexts.size(); ++i) {
      out.push_back({ids[senses[i]], contexts[i], statics[i]});
    }
    return out;
  }
  std::vector<oracle::Term> terms() const {
    std::vector<oracle::Term> out;
    for (std::size_t i = 0; i < contexts.size(); ++i) {
      out.push_back({senses[i], {contexts[i].begin(), contexts[i].end()},
                     {statics[i].begin(), statics[i].end()}});
    }
    return out;
  }
};

Fixture make_fixture(std::size_t p, std::size_t q, std::size_t n_senses, std::size_t n,
                     Activation act, std::uint64_t seed) {
  Fixture f;
  for (std::size_t s = 0; s < n_senses; ++s) f.ids.push_back("w%" + std::to_string(s));
  f.model = init_model(p, q, f.ids, InitScheme::kXavier, seed, act);
  Rng rng(seed + 1);
  for (std::size_t i = 0; i < n; ++i) {
    f.contexts.push_back(random_vector(rng, q));
    f.statics.push_back(random_vector(rng, p));
    f.senses.push_back(rng.below(n_senses));
  }
  return f;
}

// ---------------------------------------------------------------- init

TEST(InitModel, DeterministicInSeed) {
  const std::vector<std::string> ids{"s1"};
  EXPECT_EQ(init_model(2, 3, ids, InitScheme::kXavier, 7),
            init_model(2, 3, ids, InitScheme::kXavier, 7));
  EXPECT_FALSE(init_model(2, 3, ids, InitScheme::kXavier, 7) ==
               init_model(2, 3, ids, InitScheme::kXavier, 8));
}

TEST(InitModel, XavierBounds) {
  const std::vector<std::string> ids{"s1", "s2", "s3"};
  const auto m = init_model(2, 3, ids, InitScheme::kXavier, 7);
  const double w_bound = std::sqrt(6.0 / 5.0);
  EXPECT_NEAR(w_bound, 1.0954451, 1e-7);
  for (float w : m.filter()) EXPECT_LE(std::abs(w), w_bound);
  const double a_bound = std::sqrt(6.0 / 4.0);
  for (std::size_t s = 0; s < 3; ++s) {
    for (float a : m.diagonal(s)) EXPECT_LE(std::abs(a), a_bound);
  }
}

TEST(InitModel, Uniform01Range) {
  std::vector<std::string> ids;
  for (int i = 0; i < 20; ++i) ids.push_back("s" + std::to_string(i));
  const auto m = init_model(16, 32, ids, InitScheme::kUniform01, 3);
  float lo = 1.f;
  float hi = 0.f;
  for (float w : m.filter()) {
    EXPECT_GE(w, 0.f);
    EXPECT_LE(w, 1.f);
    lo = std::min(lo, w);
    hi = std::max(hi, w);
  }
  for (std::size_t s = 0; s < ids.size(); ++s) {
    for (float a : m.diagonal(s)) {
      EXPECT_GE(a, 0.f);
      EXPECT_LE(a, 1.f);
    }
  }
  EXPECT_LT(lo, 0.05f);
  EXPECT_GT(hi, 0.95f);
}

TEST(InitModel, RejectsBadArguments) {
  const std::vector<std::string> dup{"a", "a"};
  EXPECT_THROW(init_model(2, 2, dup, InitScheme::kXavier, 1), ValidationError);
  const std::vector<std::string> none;
  EXPECT_THROW(init_model(2, 2, none, InitScheme::kXavier, 1), ValidationError);
  const std::vector<std::string> one{"a"};
  EXPECT_THROW(init_model(0, 2, one, InitScheme::kXavier, 1), DimensionError);
}

// ---------------------------------------------------------------- forward / loss

ProjectionModel zero_model(std::size_t p, std::size_t q, Activation act) {
  ProjectionModel m(p, q, act);
  m.add_sense("s1", Vector(p, 0.f));
  return m;
}

TEST(Forward, ZeroModelHasZeroResidual) {
  const auto m = zero_model(3, 2, Activation::kLinear);
  const Vector c{1.f, 2.f};
  const Vector g{1.f, 2.f, 3.f};
  const auto r = forward(m, "s1", c, g);
  for (double x : r.residual) EXPECT_EQ(x, 0.0);
  const AlignmentSample s{"s1", c, g};
  EXPECT_EQ(loss(m, {&s, 1}), 0.0);
}

TEST(Forward, IdentityPerfectAlignment) {
  ProjectionModel m(2, 2, Activation::kLinear);
  m.filter()[0] = 1.f;
  m.filter()[3] = 1.f;
  m.add_sense("s1", Vector{1.f, 1.f});
  const Vector c{1.f, 2.f};
  const Vector g{1.f, 2.f};
  const auto r = forward(m, "s1", c, g);
  EXPECT_EQ(r.residual, (std::vector<double>{0.0, 0.0}));
  const AlignmentSample s{"s1", c, g};
  EXPECT_EQ(loss(m, {&s, 1}), 0.0);
}

TEST(Forward, ReluClampsNegativeCoordinates) {
  ProjectionModel m(2, 1, Activation::kRelu);
  m.add_sense("s1", Vector{-1.f, 2.f});
  const Vector c{0.f};
  const Vector g{1.f, 1.f};
  const auto r = forward(m, "s1", c, g);
  EXPECT_EQ(r.predicted_sense, (std::vector<double>{0.0, 2.0}));
}

TEST(Forward, RecordOverloadNeedsGold) {
  ProjectionModel m = zero_model(2, 2, Activation::kLinear);
  ContextRecord rec{"x", "w", Pos::kNoun, std::nullopt, {1.f, 1.f}};
  const Vector g{1.f, 1.f};
  EXPECT_THROW(forward(m, rec, g), ValidationError);
  rec.gold_sense = "s2";
  EXPECT_THROW(forward(m, rec, g), LookupError);
  rec.gold_sense = "s1";
  EXPECT_NO_THROW(forward(m, rec, g));
  const Vector bad{1.f};
  EXPECT_THROW(forward(m, rec, bad), DimensionError);
}

TEST(Loss, ThreeFourFive) {
  // W = 0, a = (-1, 1), g = (3, 4): residual is -(a*g) = (3, -4)
  ProjectionModel m(2, 1, Activation::kLinear);
  m.add_sense("s1", Vector{-1.f, 1.f});
  const Vector c{7.f};
  const Vector g{3.f, 4.f};
  const AlignmentSample s{"s1", c, g};
  EXPECT_EQ(loss(m, {&s, 1}), 25.0);
}

TEST(Loss, EmptyBatchIsAnError) {
  const auto m = zero_model(2, 2, Activation::kLinear);
  EXPECT_THROW(loss(m, {}), ValidationError);
  EXPECT_THROW(gradients(m, {}), ValidationError);
}

TEST(Loss, MatchesIndependentResummation) {
  for (Activation act : {Activation::kLinear, Activation::kRelu, Activation::kGelu}) {
    const auto f = make_fixture(6, 9, 3, 5, act, 21);
    const double got = loss(f.model, f.batch());
    const double want = oracle::alignment_loss(to_oracle(f.model), to_oracle(act), f.terms());
    EXPECT_NEAR(got, want, 1e-6 * want) << to_string(act);
  }
}

TEST(Loss, ScaleConsistency) {
  const auto f = make_fixture(4, 5, 3, 12, Activation::kGelu, 4);
  const auto all = f.batch();
  const std::span<const AlignmentSample> whole(all);
  const double sum = loss(f.model, whole.first(7)) + loss(f.model, whole.subspan(7));
  EXPECT_NEAR(loss(f.model, whole), sum, 1e-12 * sum);
}

// ---------------------------------------------------------------- gradients

class GradientCheck : public ::testing::TestWithParam<Activation> {};

TEST_P(GradientCheck, MatchesCentralDifferences) {
  const Activation act = GetParam();
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    const auto f = make_fixture(3, 4, 3, 6, act, seed);
    const auto grad = gradients(f.model, f.batch());
    const auto fd = oracle::alignment_fd(to_oracle(f.model), to_oracle(act), f.terms(), 1e-4);
    for (std::size_t i = 0; i < fd.w.size(); ++i) {
      EXPECT_TRUE(oracle::close(grad.filter[i], fd.w[i], 1e-4, 1e-6))
          << "W[" << i << "] analytic " << grad.filter[i] << " fd " << fd.w[i];
    }
    for (std::size_t s = 0; s < f.ids.size(); ++s) {
      const auto g = grad.diagonal(f.ids[s], 3);
      for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_TRUE(oracle::close(g[k], fd.diag[s][k], 1e-4, 1e-6))
            << f.ids[s] << "[" << k << "] analytic " << g[k] << " fd " << fd.diag[s][k];
      }
    }
  }
}

INSTANTIATE_TEST_SUITE_P(AllActivations, GradientCheck,
                         ::testing::Values(Activation::kLinear, Activation::kRelu,
                                           Activation::kGelu),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Gradients, ZeroResidualGivesZeroGradient) {
  ProjectionModel m(2, 2, Activation::kGelu);
  m.add_sense("s1", Vector{0.f, 0.f});
  const Vector c{1.f, -1.f};
  const Vector g{2.f, 3.f};
  const AlignmentSample s{"s1", c, g};
  const auto grad = gradients(m, {&s, 1});
  for (double x : grad.filter) EXPECT_EQ(x, 0.0);
  for (double x : grad.diagonal("s1", 2)) EXPECT_EQ(x, 0.0);
}

TEST(Gradients, AbsentSenseIsExactlyZero) {
  auto f = make_fixture(3, 4, 2, 5, Activation::kRelu, 9);
  for (auto& s : f.senses) s = 0;
  const auto grad = gradients(f.model, f.batch());
  EXPECT_FALSE(grad.diagonals.contains("w%1"));
  for (double x : grad.diagonal("w%1", 3)) EXPECT_EQ(x, 0.0);
}

TEST(Gradients, IndexedAccumulationAgrees) {
  const auto f = make_fixture(5, 3, 4, 9, Activation::kGelu, 17);
  const auto grad = gradients(f.model, f.batch());
  std::vector<IndexedSample> indexed;
  for (std::size_t i = 0; i < f.contexts.size(); ++i) {
    indexed.push_back({f.senses[i], f.contexts[i], f.statics[i]});
  }
  std::vector<double> gw(5 * 3, 0.0);
  SparseDiagonalGrad gd;
  const double l = accumulate_gradients(f.model, indexed, gw, gd);
  EXPECT_DOUBLE_EQ(l, loss(f.model, f.batch()));
  EXPECT_DOUBLE_EQ(accumulate_loss(f.model, indexed), l);
  for (std::size_t i = 0; i < gw.size(); ++i) EXPECT_DOUBLE_EQ(gw[i], grad.filter[i]);
  for (const auto& [s, g] : gd) EXPECT_EQ(g, grad.diagonal(f.ids[s], 5));
}

TEST(Gradients, LinearGradientDescentIsMonotone) {
  auto f = make_fixture(4, 6, 3, 20, Activation::kLinear, 31);
  const auto batch = f.batch();
  double prev = loss(f.model, batch);
  const double step = 1e-3;
  for (int it = 0; it < 200; ++it) {
    const auto grad = gradients(f.model, batch);
    auto w = f.model.filter();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= static_cast<float>(step * grad.filter[i]);
    for (std::size_t s = 0; s < f.ids.size(); ++s) {
      const auto g = grad.diagonal(f.ids[s], 4);
      auto a = f.model.diagonal(s);
      for (std::size_t k = 0; k < 4; ++k) a[k] -= static_cast<float>(step * g[k]);
    }
    const double cur = loss(f.model, batch);
    EXPECT_LE(cur, prev * (1.0 + 1e-9)) << "step " << it;
    prev = cur;
  }
}

TEST(Adam, UntouchedSensesKeepParametersAndMoments) {
  auto f = make_fixture(3, 4, 3, 8, Activation::kLinear, 12);
  for (auto& s : f.senses) s = s == 1 ? 0 : s;  // sense 1 never appears
  std::vector<IndexedSample> indexed;
  for (std::size_t i = 0; i < f.contexts.size(); ++i) {
    indexed.push_back({f.senses[i], f.contexts[i], f.statics[i]});
  }
  const Vector before(f.model.diagonal(1).begin(), f.model.diagonal(1).end());
  AdamOptimizer adam(f.model, 0.05, 0.9, 0.999, 1e-8);
  for (int step = 0; step < 5; ++step) {
    std::vector<double> gw(12, 0.0);
    SparseDiagonalGrad gd;
    accumulate_gradients(f.model, indexed, gw, gd);
    adam.step(f.model, gw, gd);
  }
  EXPECT_EQ(Vector(f.model.diagonal(1).begin(), f.model.diagonal(1).end()), before);
  EXPECT_FALSE(adam.has_moments(1));
  EXPECT_EQ(adam.sense_steps(1), 0u);
  EXPECT_TRUE(adam.has_moments(0));
  EXPECT_EQ(adam.sense_steps(0), 5u);
  EXPECT_EQ(adam.steps(), 5u);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  // bias-corrected Adam's first step is lr * sign(grad) up to epsilon
  ProjectionModel m(1, 1, Activation::kLinear);
  m.add_sense("s", Vector{0.5f});
  AdamOptimizer adam(m, 0.01, 0.9, 0.999, 1e-8);
  const std::vector<double> gw{3.0};
  SparseDiagonalGrad gd{{0, {-2.0}}};
  adam.step(m, gw, gd);
  EXPECT_NEAR(m.filter()[0], -0.01, 1e-7);
  EXPECT_NEAR(m.diagonal(0)[0], 0.51, 1e-7);
}

// ---------------------------------------------------------------- project_sense

TEST(ProjectSense, Examples) {
  ProjectionModel m(2, 1, Activation::kGelu);
  m.add_sense("ones", Vector{1.f, 1.f});
  m.add_sense("s", Vector{2.f, 0.f});
  const Vector g{3.f, 5.f};
  EXPECT_EQ(project_sense(m, "ones", g), g);  // f is not applied
  EXPECT_EQ(project_sense(m, "s", g), (Vector{6.f, 0.f}));
  EXPECT_THROW(project_sense(m, "nope", g), LookupError);
}

TEST(ProjectSense, DistinctDiagonalsGiveDistinctOutputs) {
  Rng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const std::vector<std::string> ids{"a", "b", "c", "d"};
    const auto m = init_model(8, 2, ids, InitScheme::kXavier, rng.below(1000));
    Vector g = random_vector(rng, 8);
    g[rng.below(8)] = 0.f;
    std::vector<Vector> outs;
    for (const auto& id : ids) outs.push_back(project_sense(m, id, g));
    for (std::size_t i = 0; i < ids.size(); ++i) {
      for (std::size_t j = i + 1; j < ids.size(); ++j) {
        bool differ_where_g_nonzero = false;
        for (std::size_t k = 0; k < 8; ++k) {
          if (g[k] != 0.f && m.diagonal(i)[k] != m.diagonal(j)[k]) differ_where_g_nonzero = true;
        }
        if (differ_where_g_nonzero) EXPECT_NE(outs[i], outs[j]);
      }
    }
  }
}

// ---------------------------------------------------------------- checkpoint

TEST(Checkpoint, RoundTripIsExact) {
  testing::TempDir dir;
  for (Activation act : {Activation::kLinear, Activation::kRelu, Activation::kGelu}) {
    const auto f = make_fixture(7, 5, 4, 1, act, 3);
    save_checkpoint(f.model, dir / "m.cdem");
    const auto back = load_checkpoint(dir / "m.cdem");
    EXPECT_EQ(back, f.model);
    EXPECT_EQ(back.checksum(), f.model.checksum());
    EXPECT_EQ(back.sense_ids(), f.ids);
  }
}

TEST(Checkpoint, RejectsUnknownVersion) {
  testing::TempDir dir;
  const auto f = make_fixture(2, 2, 1, 1, Activation::kLinear, 3);
  save_checkpoint(f.model, dir / "m.cdem");
  std::string bytes = testing::read_bytes(dir / "m.cdem");
  bytes[4] = 9;
  testing::write_text(dir / "m.cdem", bytes);
  try {
    load_checkpoint(dir / "m.cdem");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.kind(), FormatError::Kind::kUnsupportedVersion);
  }
  testing::write_text(dir / "bad.cdem", "CDEB");
  EXPECT_THROW(load_checkpoint(dir / "bad.cdem"), FormatError);
}

TEST(Activation, DerivativesMatchDifferences) {
  for (Activation act : {Activation::kLinear, Activation::kRelu, Activation::kGelu}) {
    for (double x : {-2.5, -0.3, 0.7, 1.9}) {
      const double fd = (activate(act, x + 1e-6) - activate(act, x - 1e-6)) / 2e-6;
      EXPECT_NEAR(activate_derivative(act, x), fd, 1e-6);
    }
  }
  EXPECT_EQ(activate_derivative(Activation::kRelu, 0.0), 0.0);
  EXPECT_NEAR(activate(Activation::kGelu, 1.0), 0.8413447460685429, 1e-12);
}

}  // namespace
}  // namespace cdes
