/*
 * Copyright 2026 The mapmix Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli_util.hpp"
#include "gradcheck.hpp"
#include "mapmix/augment.hpp"
#include "mapmix/cli/experiment.hpp"
#include "mapmix/dynamics.hpp"
#include "mapmix/labels.hpp"
#include "mapmix/metrics.hpp"
#include "mapmix/synth.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace mapmix {
namespace {

namespace fs = std::filesystem;
using augment::Strategy;
using dynamics::Region;

struct Outcome {
  bool pass = true;
  std::string detail;
  double seconds = 0.0;
};

std::string Fmt(const char* format, double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, x);
  return buf;
}

// Wall-clock timing plus exception capture.
Outcome Timed(const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail = std::string("exception: ") + e.what();
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

constexpr std::uint64_t kSeeds[] = {1, 2, 3, 4, 5};

// The synthetic benchmark: 5 clusters, 14 dialects, D=16, 50 train
// utterances per dialect, 20% label noise, 20 epochs.
cli::ExperimentConfig Benchmark(std::uint64_t seed) {
  cli::ExperimentConfig config = cli::DefaultConfig();
  config.synth = synth::BenchmarkConfig();
  config.synth.seed = seed;
  config.train.epochs = 20;
  config.train.learning_rate = 1e-2;
  config.train.seed = seed;
  return config;
}

// Every datamap built during the run, for criterion 3.
std::vector<dynamics::DatamapResult> g_datamaps;

Outcome GradientCorrectness() {
  Rng rng(20260101);
  const auto r = testing::CheckGradients(120, rng);
  Outcome out;
  out.pass = r.worst_relative_error <= 1e-4 && r.worst_loss_mismatch <= 1e-12;
  out.detail = "120 instances, " + std::to_string(r.coordinates) +
               " coordinates, worst relative error " + Fmt("%.2e", r.worst_relative_error);
  return out;
}

Outcome MixupLaws() {
  Rng rng(7);
  bool endpoints = true, simplex = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const Matrix a = testing::RandomMatrix(1 + rng.Index(8), 5, rng);
    const Matrix b = testing::RandomMatrix(1 + rng.Index(8), 5, rng);
    const auto rows = std::min(a.rows(), b.rows());
    endpoints &= augment::StaticMix(a, b, 1.0) == a.topRows(rows);
    endpoints &= augment::StaticMix(a, b, 0.0) == b.topRows(rows);
    const Vector za = testing::RandomVector(6, rng);
    const Vector zb = testing::RandomVector(6, rng);
    endpoints &= augment::LatentMix(za, zb, 1.0) == za;
    endpoints &= augment::LatentMix(za, zb, 0.0) == zb;
    const Vector ya = testing::RandomSimplex(14, rng);
    const Vector yb = testing::RandomSimplex(14, rng);
    endpoints &= labels::MixLabels(ya, yb, 1.0) == ya;
    endpoints &= labels::MixLabels(ya, yb, 0.0) == yb;
    for (int k = 0; k < 10; ++k) {
      simplex &= labels::OnSimplex(labels::MixLabels(ya, yb, augment::SampleLambda(0.5, rng)));
    }
  }
  std::vector<double> draws(100000);
  for (auto& x : draws) x = augment::SampleLambda(0.5, rng);
  const double chi2 = testing::ArcsineChiSquare(draws);
  Outcome out;
  out.pass = endpoints && simplex && chi2 < testing::kChiSquare9At001;
  out.detail = std::string("endpoints ") + (endpoints ? "exact" : "BROKEN") + ", simplex " +
               (simplex ? "ok" : "BROKEN") + ", chi-square " + Fmt("%.2f", chi2) + " < " +
               Fmt("%.3f", testing::kChiSquare9At001);
  return out;
}

bool IsPartition(const dynamics::DatamapResult& r) {
  std::set<std::string> seen;
  std::size_t total = 0;
  for (Region region : {Region::kEasy, Region::kAmbiguous, Region::kHard}) {
    for (const auto& id : r.IdsIn(region)) {
      if (!seen.insert(id).second) return false;
      ++total;
    }
  }
  if (total != r.entries.size()) return false;
  for (const auto& e : r.entries) {
    if (!(e.confidence >= 0.0 && e.confidence <= 1.0)) return false;
    if (!(e.variability >= 0.0 && e.variability <= 0.5)) return false;
  }
  return true;
}

Outcome DatamapPartition() {
  std::vector<dynamics::ExampleStats> six;
  const double conf[] = {.5, .5, .7, .9, .5, .1};
  const double var[] = {.30, .25, .20, .05, .04, .03};
  for (int k = 0; k < 6; ++k) six.push_back({"e" + std::to_string(k), conf[k], var[k]});
  const auto r = dynamics::PartitionRegions(six);
  const bool example = r.IdsIn(Region::kAmbiguous) == std::vector<std::string>{"e0", "e1"} &&
                       r.IdsIn(Region::kEasy) == std::vector<std::string>{"e2", "e3", "e4"} &&
                       r.IdsIn(Region::kHard) == std::vector<std::string>{"e5"};
  Rng rng(3);
  std::size_t runs = 0, good = 0;
  auto check = [&](const dynamics::DatamapResult& m) {
    ++runs;
    good += IsPartition(m);
  };
  check(r);
  for (int trial = 0; trial < 500; ++trial) {
    dynamics::DynamicsLog log;
    const std::size_t epochs = 1 + rng.Index(30);
    for (std::size_t k = 0, n = 3 + rng.Index(200); k < n; ++k) {
      log.ids.push_back("u" + std::to_string(k));
      std::vector<double> row(epochs);
      for (auto& p : row) p = rng.Index(5) == 0 ? static_cast<double>(rng.Index(2)) : rng.Uniform(0.0, 1.0);
      log.probs.push_back(row);
    }
    check(dynamics::PartitionRegions(dynamics::ComputeStats(log)));
  }
  for (const auto& m : g_datamaps) check(m);
  Outcome out;
  out.pass = example && good == runs;
  out.detail = std::string("worked example ") + (example ? "exact" : "MISMATCH") + ", " +
               std::to_string(good) + "/" + std::to_string(runs) +
               " datamaps disjoint, exhaustive and in range (" +
               std::to_string(g_datamaps.size()) + " from training runs)";
  return out;
}

Outcome HardCapturesNoise() {
  double sum = 0.0;
  std::string per_seed;
  for (std::uint64_t seed : kSeeds) {
    const auto config = Benchmark(seed);
    const auto data = synth::Generate(config.synth);
    model::TrainConfig train = config.train;
    train.strategy = Strategy::kNone;
    const auto baseline = model::Train(data.corpus, nullptr, train);
    const auto map = cli::BuildDatamap(baseline, config.partition);
    g_datamaps.push_back(map);
    std::size_t in_hard = 0;
    for (const auto& id : data.noised_ids) in_hard += map.RegionOf(id) == Region::kHard;
    const double frac = static_cast<double>(in_hard) / static_cast<double>(data.noised_ids.size());
    sum += frac;
    per_seed += (per_seed.empty() ? "" : " ") + Fmt("%.3f", frac);
  }
  const double mean = sum / std::size(kSeeds);
  Outcome out;
  out.pass = mean >= 0.6;
  out.detail = "mean share of noised ids in hard " + Fmt("%.3f", mean) + " >= 0.6 (per seed " +
               per_seed + ")";
  return out;
}

struct SuiteResults {
  std::map<Strategy, std::vector<metrics::EvalReport>> reports;
  // map_mix dynamics ids and the hard ids of the same datamap, per seed.
  std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> map_mix_logs;
  dynamics::DatamapResult first_map;
  corpus::Corpus first_corpus;
};
SuiteResults g_suite;

double Mean(Strategy s, double metrics::EvalReport::*field) {
  double sum = 0.0;
  for (const auto& r : g_suite.reports[s]) sum += r.*field;
  return sum / static_cast<double>(g_suite.reports[s].size());
}

Outcome DirectionalOrdering() {
  for (std::uint64_t seed : kSeeds) {
    const auto config = Benchmark(seed);
    auto corpus = synth::Generate(config.synth).corpus;
    dynamics::DatamapResult map;
    const auto runs = cli::RunStrategySuite(corpus, augment::AllStrategies(), config, seed, &map);
    g_datamaps.push_back(map);
    for (const auto& run : runs) {
      g_suite.reports[run.strategy].push_back(run.report);
      if (run.strategy == Strategy::kMapMix) {
        g_suite.map_mix_logs.emplace_back(run.train.dynamics.ids, map.IdsIn(Region::kHard));
      }
    }
    if (seed == kSeeds[0]) {
      g_suite.first_map = map;
      g_suite.first_corpus = std::move(corpus);
    }
  }
  std::printf("  benchmark means over %zu seeds:\n  %-16s %7s %7s %7s %7s\n", std::size(kSeeds),
              "strategy", "Acc", "WF1", "C.Acc", "ECE");
  for (Strategy s : augment::AllStrategies()) {
    std::printf("  %-16s %7.4f %7.4f %7.4f %7.4f\n", std::string(augment::ToString(s)).c_str(),
                Mean(s, &metrics::EvalReport::acc), Mean(s, &metrics::EvalReport::wf1),
                Mean(s, &metrics::EvalReport::cluster_acc), Mean(s, &metrics::EvalReport::ece));
  }
  using R = metrics::EvalReport;
  const double wf1_random = Mean(Strategy::kRandom, &R::wf1);
  const double wf1_static = Mean(Strategy::kStatic, &R::wf1);
  const double ece_mm = Mean(Strategy::kMapMix, &R::ece);
  const double ece_random = Mean(Strategy::kRandom, &R::ece);
  const double wf1_mm = Mean(Strategy::kMapMix, &R::wf1);
  const double wf1_ae = Mean(Strategy::kAmbEasy, &R::wf1);
  const bool a = wf1_random > wf1_static;
  const bool b = ece_mm < ece_random;
  const bool c = wf1_mm >= wf1_ae;
  Outcome out;
  out.pass = a && b && c;
  out.detail = std::string(a ? "ok" : "FAILED") + " WF1(random) " + Fmt("%.4f", wf1_random) +
               " > WF1(static) " + Fmt("%.4f", wf1_static) + "; " + (b ? "ok" : "FAILED") +
               " ECE(map_mix) " + Fmt("%.4f", ece_mm) + " < ECE(random) " +
               Fmt("%.4f", ece_random) + "; " + (c ? "ok" : "FAILED") + " WF1(map_mix) " +
               Fmt("%.4f", wf1_mm) + " >= WF1(amb_easy) " + Fmt("%.4f", wf1_ae);
  return out;
}

Outcome EceOracle() {
  Rng rng(41);
  double worst = 0.0;
  for (int set = 0; set < 1000; ++set) {
    const std::size_t n = 1 + rng.Index(80);
    const std::size_t classes = 2 + rng.Index(13);
    std::vector<metrics::Prediction> preds;
    for (std::size_t k = 0; k < n; ++k) {
      metrics::Prediction p;
      p.probs = testing::RandomSimplex(static_cast<Eigen::Index>(classes), rng);
      if (rng.Index(3) == 0) {
        p.probs = (p.probs.array() * 10.0).exp();
        p.probs /= p.probs.sum();
      }
      p.predicted = metrics::Argmax(p.probs);
      p.truth = rng.Index(classes);
      preds.push_back(p);
    }
    worst = std::max(worst, std::abs(metrics::ExpectedCalibrationError(preds) - testing::NaiveEce(preds)));
  }
  std::vector<metrics::Prediction> two(2);
  two[0].probs = Eigen::Vector2d(0.9, 0.1);
  two[0].predicted = 0;
  two[0].truth = 0;
  two[1].probs = Eigen::Vector2d(0.6, 0.4);
  two[1].predicted = 0;
  two[1].truth = 1;
  const double worked = metrics::ExpectedCalibrationError(two);
  Outcome out;
  // 0.35 is not a double; accept the nearest representable results of the
  // two-term sum.
  out.pass = worst <= 1e-12 && std::abs(worked - 0.35) <= 4 * std::numeric_limits<double>::epsilon();
  out.detail = "1000 sets, worst gap to naive binning " + Fmt("%.1e", worst) +
               ", worked example " + Fmt("%.17g", worked);
  return out;
}

Outcome Chunking() {
  const auto twenty = metrics::ChunkOffsets(20.0);
  std::vector<double> starts;
  for (const auto& c : twenty) starts.push_back(c.start_s);
  const bool a = starts == std::vector<double>{0, 3, 6, 9, 12};
  const bool b = metrics::ChunkOffsets(7.0).size() == 1 && metrics::ChunkOffsets(1.5).size() == 1;
  Rng rng(5);
  double worst = 0.0;
  for (int k = 1; k <= 50; ++k) {
    const Vector p = testing::RandomSimplex(14, rng);
    const std::vector<Vector> same(static_cast<std::size_t>(k), p);
    worst = std::max(worst, (metrics::AggregateChunks(same) - p).cwiseAbs().maxCoeff());
  }
  Outcome out;
  out.pass = a && b && worst <= 1e-12;
  out.detail = std::string("20 s starts ") + (a ? "(0,3,6,9,12)" : "WRONG") + ", short signal " +
               (b ? "1 chunk" : "WRONG") + ", identical-chunk aggregation error " +
               Fmt("%.1e", worst);
  return out;
}

Outcome WeightedF1Oracle() {
  const double got = metrics::WeightedF1({{8, 2}, {3, 7}});
  const double f0 = 2.0 * (8.0 / 11.0) * 0.8 / (8.0 / 11.0 + 0.8);
  const double f1 = 2.0 * (7.0 / 9.0) * 0.7 / (7.0 / 9.0 + 0.7);
  const double diag = metrics::WeightedF1({{4, 0, 0}, {0, 6, 0}, {0, 0, 1}});
  Outcome out;
  out.pass = std::abs(got - 0.5 * (f0 + f1)) <= 1e-6 && std::abs(got - 0.7494) <= 1e-4 && diag == 1.0;
  out.detail = "[[8,2],[3,7]] -> " + Fmt("%.6f", got) + ", diagonal -> " + Fmt("%.17g", diag);
  return out;
}

Outcome Determinism() {
  testing::TempDir dir("accept_det");
  auto run = [&](const std::string& args) {
    const int code = testing::RunCli(args, dir / "log.txt");
    if (code != 0) throw std::runtime_error("`mapmix " + args + "` exited " + std::to_string(code));
  };
  auto path = [&](const std::string& name) { return (dir / name).string(); };
  testing::WriteFile(dir / "cfg.json", R"({"synth": {"train_per_dialect": 20, "eval_per_dialect": 5},
      "epochs": 5, "learning_rate": 0.01, "hours_per_dialect": 0.5, "n_subsets": 2})");
  const std::string common = "--config " + path("cfg.json") + " --corpus " + path("corpus");
  run("synth --config " + path("cfg.json") + " --seed 1 --out " + path("corpus"));
  run("map " + common + " --out " + path("map"));
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const char* s : {"static", "map_mix"}) {
    for (const char* tag : {"a", "b"}) {
      run("train " + common + " --strategy " + s + " --datamap " + path("map/datamap.csv") +
          " --out " + path(std::string("train_") + s + "_" + tag));
    }
    for (const char* f : {"checkpoint.json", "dynamics.csv", "loss_curve.csv"}) {
      pairs.emplace_back(path(std::string("train_") + s + "_a/") + f,
                         path(std::string("train_") + s + "_b/") + f);
    }
  }
  run("compare " + common + " --out " + path("cmp_a"));
  run("compare " + common + " --out " + path("cmp_b"));
  for (const char* f : {"compare.csv", "compare.txt", "runs.csv"}) {
    pairs.emplace_back(path("cmp_a/") + f, path("cmp_b/") + f);
  }
  std::size_t same = 0;
  for (const auto& [a, b] : pairs) {
    same += testing::ReadFile(a) == testing::ReadFile(b) && !testing::ReadFile(a).empty();
  }
  Outcome out;
  out.pass = same == pairs.size();
  out.detail = std::to_string(same) + "/" + std::to_string(pairs.size()) +
               " rerun artifacts byte-identical (checkpoints, dynamics, compare tables)";
  return out;
}

Outcome StrategyConstraints() {
  const auto& corpus = g_suite.first_corpus;
  const auto& map = g_suite.first_map;
  const auto train = corpus.IndicesOf(corpus::Split::kTrain);
  std::size_t checked = 0, bad = 0;
  for (Strategy s : augment::AllStrategies()) {
    if (!augment::IsMixup(s)) continue;
    const auto retained = augment::RetainedSet(corpus, train, &map, s);
    Rng rng(1000 + static_cast<std::uint64_t>(s));
    const auto pairs = augment::MakePairs(corpus, retained, &map, s, 10000, 0.5, rng);
    checked += pairs.size();
    bad += testing::PairViolations(corpus, retained, &map, s, pairs);
  }
  std::size_t leaked = 0, logged = 0;
  for (const auto& [ids, hard] : g_suite.map_mix_logs) {
    const std::set<std::string> hard_set(hard.begin(), hard.end());
    for (const auto& id : ids) leaked += hard_set.count(id);
    logged += ids.size();
  }
  Outcome out;
  out.pass = bad == 0 && leaked == 0 && checked == 80000 && logged > 0;
  out.detail = std::to_string(checked - bad) + "/" + std::to_string(checked) +
               " pairs satisfy their constraint; " + std::to_string(leaked) +
               " hard ids among " + std::to_string(logged) + " map_mix log rows";
  return out;
}

}  // namespace
}  // namespace mapmix

int main() {
  using namespace mapmix;
  struct Criterion {
    int number;
    const char* name;
    Outcome (*body)();
  };
  // Criterion 3 and 10 reuse artifacts of 4 and 5, so those run first.
  const std::vector<Criterion> order = {
      {1, "gradient correctness", GradientCorrectness},
      {2, "mixup laws", MixupLaws},
      {6, "ECE oracle", EceOracle},
      {7, "chunking", Chunking},
      {8, "weighted F1 oracle", WeightedF1Oracle},
      {4, "hard region captures label noise", HardCapturesNoise},
      {5, "directional strategy ordering", DirectionalOrdering},
      {3, "datamap partition", DatamapPartition},
      {10, "strategy constraints", StrategyConstraints},
      {9, "determinism", Determinism},
  };
  std::map<int, std::pair<const char*, Outcome>> results;
  for (const auto& c : order) {
    std::fprintf(stderr, "running criterion %d (%s)\n", c.number, c.name);
    results[c.number] = {c.name, Timed(c.body)};
  }
  const std::map<int, double> budget_s = {{1, 30.0}, {4, 120.0}, {5, 900.0}};
  int failures = 0;
  for (auto& [number, entry] : results) {
    auto& [name, out] = entry;
    if (auto it = budget_s.find(number); it != budget_s.end() && out.seconds > it->second) {
      out.pass = false;
      out.detail += "; over the " + std::to_string(static_cast<int>(it->second)) + " s budget";
    }
    failures += !out.pass;
    std::printf("%s criterion %d: %s: %s [%.1f s]\n", out.pass ? "PASS" : "FAIL", number, name,
                out.detail.c_str(), out.seconds);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(results.size()) - failures,
              results.size());
  return failures == 0 ? 0 : 1;
}
