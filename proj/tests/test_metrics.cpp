#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pelrec/interp.hpp"
#include "pelrec/metrics.hpp"
#include "pelrec/synthetic.hpp"

using namespace pelrec;

namespace {

MotionField uniform_field(int rows, int cols, Displacement d) {
  MotionField f(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) f.at(r, c) = d;
  }
  return f;
}

// previous = 9x, current = 9x + 10, so with d = (-1, 0) the frame difference
// is 10 and the compensated difference is 1 wherever x + 1 is in the frame.
struct HandPair {
  Frame previous = oracle::analytic_frame(2, 3, [](double x, double) { return 9.0 * x; });
  Frame current = oracle::analytic_frame(2, 3, [](double x, double) { return 9.0 * x + 10.0; });
  MotionField field = uniform_field(2, 3, {-1.0, 0.0});
};

}  // namespace

TEST(PairMetrics, ZeroFieldIsExactlyZeroDb) {
  SyntheticSpec spec;
  spec.motions = {{0.7, -0.2}};
  const auto frames = generate_sequence(spec);
  const PairReport rep = pair_metrics(frames[1], frames[0], MotionField(64, 64));
  EXPECT_EQ(rep.imc_db, 0.0);
  EXPECT_EQ(rep.fd_sum, rep.dfd_sum);
  EXPECT_EQ(rep.support, 64u * 64u);
}

TEST(PairMetrics, PerfectIntegerMotionIsInfinite) {
  SyntheticSpec spec;
  spec.pattern = SyntheticPattern::kTexturedNoise;
  spec.motions = {{1.0, -1.0}};
  const auto frames = generate_sequence(spec);
  const PairReport rep = pair_metrics(frames[1], frames[0], uniform_field(64, 64, {1.0, -1.0}));
  EXPECT_EQ(rep.dfd_sum, 0.0);
  EXPECT_TRUE(std::isinf(rep.imc_db) && rep.imc_db > 0);
  EXPECT_EQ(format_db(rep.imc_db), "inf");
}

TEST(PairMetrics, HandComputedSums) {
  const HandPair p;
  const PairReport rep = pair_metrics(p.current, p.previous, p.field);
  EXPECT_EQ(rep.support, 4u);
  EXPECT_DOUBLE_EQ(rep.fd_sum, 400.0);
  EXPECT_DOUBLE_EQ(rep.dfd_sum, 4.0);
  EXPECT_DOUBLE_EQ(rep.imc_db, 20.0);
  EXPECT_DOUBLE_EQ(rep.fd_ms, 400.0 / 6.0);
  EXPECT_DOUBLE_EQ(rep.dfd_ms, 4.0 / 6.0);
}

TEST(PairMetrics, EmptySupportIsAnError) {
  const HandPair p;
  EXPECT_THROW(pair_metrics(p.current, p.previous, uniform_field(2, 3, {10.0, 0.0})),
               std::invalid_argument);
}

TEST(PairMetrics, ShapeMismatchIsAnError) {
  const HandPair p;
  EXPECT_THROW(pair_metrics(p.current, p.previous, MotionField(3, 3)), std::invalid_argument);
}

TEST(PairMetrics, ImprovingOnePixelNeverLowersImc) {
  SyntheticSpec spec;
  spec.motions = {{0.8, 0.4}};
  const auto frames = generate_sequence(spec);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> jitter(-0.3, 0.3);
  MotionField field(64, 64);
  for (int r = 0; r < 64; ++r) {
    for (int c = 0; c < 64; ++c) field.at(r, c) = {0.8 + jitter(rng), 0.4 + jitter(rng)};
  }
  double imc = pair_metrics(frames[1], frames[0], field).imc_db;
  for (int t = 0; t < 50; ++t) {
    const int r = 5 + t, c = 10 + t / 2;
    const double before = std::abs(dfd(frames[1], frames[0], {r, c}, field.at(r, c)));
    field.at(r, c) = {0.8, 0.4};
    ASSERT_LE(std::abs(dfd(frames[1], frames[0], {r, c}, field.at(r, c))), before);
    const double next = pair_metrics(frames[1], frames[0], field).imc_db;
    EXPECT_GE(next, imc);
    imc = next;
  }
}

TEST(ImcFromSums, LogRatio) {
  EXPECT_DOUBLE_EQ(imc_from_sums(400.0, 4.0), 20.0);
  EXPECT_TRUE(std::isinf(imc_from_sums(5.0, 0.0)));
}

TEST(SequenceMetrics, PoolsSumsBeforeTheLog) {
  PairReport a, b;
  a.fd_sum = 100.0;
  a.dfd_sum = 1.0;
  b.fd_sum = 100.0;
  b.dfd_sum = 99.0;
  EXPECT_NEAR(pooled_imc({a, b}), 10.0 * std::log10(2.0), 1e-6);
  EXPECT_NEAR(pooled_imc({a, b}), 3.0103, 1e-4);
}

TEST(SequenceMetrics, SinglePairEqualsPairValue) {
  SyntheticSpec spec;
  spec.motions = {{0.5, 0.5}};
  const auto frames = generate_sequence(spec);
  const MotionField field = uniform_field(64, 64, {0.4, 0.6});
  const SequenceReport rep = sequence_metrics(frames, {field});
  ASSERT_EQ(rep.per_pair.size(), 1u);
  EXPECT_EQ(rep.average_imc_db, rep.per_pair[0].imc_db);
}

TEST(SequenceMetrics, ZeroFieldsGiveZero) {
  SyntheticSpec spec;
  spec.frame_count = 4;
  const auto frames = generate_sequence(spec);
  const SequenceReport rep = sequence_metrics(frames, std::vector<MotionField>(3, MotionField(64, 64)));
  EXPECT_EQ(rep.average_imc_db, 0.0);
}

TEST(SequenceMetrics, LengthMismatchIsAnError) {
  SyntheticSpec spec;
  spec.frame_count = 3;
  const auto frames = generate_sequence(spec);
  EXPECT_THROW(sequence_metrics(frames, {MotionField(64, 64)}), std::invalid_argument);
}

TEST(SequenceMetrics, PooledValueLiesBetweenPairValues) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> sums(0.1, 1000.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<PairReport> pairs(2 + t % 5);
    double lo = INFINITY, hi = -INFINITY;
    for (auto& p : pairs) {
      p.fd_sum = sums(rng);
      p.dfd_sum = sums(rng);
      const double v = imc_from_sums(p.fd_sum, p.dfd_sum);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double pooled = pooled_imc(pairs);
    EXPECT_GE(pooled, lo - 1e-12);
    EXPECT_LE(pooled, hi + 1e-12);
  }
}

TEST(ErrorImage, PerfectCompensationIsBlack) {
  SyntheticSpec spec;
  spec.pattern = SyntheticPattern::kTexturedNoise;
  spec.motions = {{1.0, 0.0}};
  const auto frames = generate_sequence(spec);
  MotionField field = uniform_field(64, 64, {1.0, 0.0});
  // Column 0 would sample outside; give it a valid zero vector instead.
  for (int r = 0; r < 64; ++r) field.at(r, 0) = {0.0, 0.0};
  const Frame img = error_image(frames[1], frames[0], field);
  for (int r = 0; r < 64; ++r) {
    for (int c = 1; c < 64; ++c) ASSERT_EQ(img(r, c), 0.0);
  }
}

TEST(ErrorImage, ZeroFieldScalesFrameDifference) {
  const HandPair p;
  const Frame img = error_image(p.current, p.previous, MotionField(2, 3));
  for (double v : img.data()) EXPECT_DOUBLE_EQ(v, 255.0);  // |FD| = 10 everywhere
  SyntheticSpec spec;
  spec.motions = {{0.6, 0.3}};
  const auto frames = generate_sequence(spec);
  const Frame e = error_image(frames[1], frames[0], MotionField(64, 64));
  double max_fd = 0.0;
  for (std::size_t i = 0; i < frames[1].size(); ++i) {
    max_fd = std::max(max_fd, std::abs(frames[1].data()[i] - frames[0].data()[i]));
  }
  for (std::size_t i = 0; i < e.size(); ++i) {
    EXPECT_NEAR(e.data()[i], std::abs(frames[1].data()[i] - frames[0].data()[i]) * 255.0 / max_fd,
                1e-9);
  }
}

TEST(ErrorImage, MaxMapsTo255AndOutsideIsWhite) {
  const HandPair p;
  const Frame img = error_image(p.current, p.previous, p.field);
  EXPECT_EQ(img(0, 0), 255.0);  // |DFD| = 1 is the maximum
  EXPECT_EQ(img(1, 1), 255.0);
  EXPECT_EQ(img(0, 2), 255.0);  // displaced sample outside the frame
  Frame same = p.previous;
  const Frame black = error_image(same, same, MotionField(2, 3));
  for (double v : black.data()) EXPECT_EQ(v, 0.0);
}

TEST(MetricsCsv, SchemaAndSentinel) {
  SequenceReport rep;
  PairReport a;
  a.fd_ms = 2.5;
  a.dfd_ms = 0.25;
  a.imc_db = 10.0;
  PairReport b;
  b.fd_ms = 1.0;
  b.imc_db = INFINITY;
  rep.per_pair = {a, b};
  rep.average_imc_db = INFINITY;
  EXPECT_EQ(metrics_csv(rep),
            "frame_index,fd_ms,dfd_ms,imc_db\n"
            "2,2.5,0.25,10\n"
            "3,1,0,inf\n"
            "average,,,inf\n");
}

TEST(FormatDb, SpecialValues) {
  EXPECT_EQ(format_db(INFINITY), "inf");
  EXPECT_EQ(format_db(-INFINITY), "-inf");
  EXPECT_EQ(format_db(NAN), "nan");
  EXPECT_EQ(format_db(3.0103), "3.0103");
}
