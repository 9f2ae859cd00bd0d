#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "radopt/data.hpp"
#include "radopt/harness.hpp"

using namespace radopt;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::string file_contents(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

PcaProblem noisy_pca(Index n_samples, uint64_t seed) {
  return PcaProblem(synth_pca(12, 3, n_samples, 0.1, seed).samples, 3);
}

OptimizerSpec quick_spec(Method method, double alpha, long batch, long cap) {
  OptimizerSpec spec;
  spec.method = method;
  spec.step_schedule = StepSchedule::constant(alpha);
  spec.batch_schedule = BatchSchedule::constant(batch, cap);
  return spec;
}

}  // namespace

TEST_CASE("run_trial basics") {
  const PcaProblem train = noisy_pca(64, 3);
  const PcaProblem test = noisy_pca(16, 4);

  SUBCASE("records start at the initial point with cadence-one metrics") {
    auto spec = quick_spec(Method::RAmsGrad, 1e-2, 8, 64);
    RunSettings settings;
    settings.max_iters = 20;
    settings.cadence = 1;
    settings.record_walltime = false;
    const TrialResult trial = run_trial(train, &test, spec, 1, settings);
    REQUIRE(trial.records.size() == 20);
    CHECK(trial.records.front().k == 1);
    CHECK(trial.records.back().k == 20);
    CHECK_FALSE(trial.diverged);
    for (const auto& record : trial.records) {
      CHECK(record.gnorm_train >= 0.0);
      CHECK(record.b_k == 8);
      CHECK(record.alpha_k == 1e-2);
      CHECK(record.elapsed_s == 0.0);
    }
  }
  SUBCASE("a planted initial point records zero objective immediately") {
    const DenseDataset planted = synth_pca(6, 2, 20, 0.0, 8);
    const PcaProblem noiseless(planted.samples, 2);
    // Recover the planted basis from the data itself.
    Eigen::JacobiSVD<Matrix> svd(planted.samples.transpose(),
                                 Eigen::ComputeThinU);
    const Matrix u_star = svd.matrixU().leftCols(2);
    auto spec = quick_spec(Method::RAmsGrad, 1e-3, 4, 20);
    RunSettings settings;
    settings.max_iters = 1;
    settings.cadence = 1000;  // records only the first iteration
    settings.record_walltime = false;
    settings.initial_point = u_star;
    const TrialResult trial = run_trial(noiseless, nullptr, spec, 1, settings);
    REQUIRE(trial.records.size() == 1);
    CHECK(trial.records.front().f_train < 1e-20);
  }
  SUBCASE("recorded gradient norms come from the full dataset") {
    auto spec = quick_spec(Method::Rsgd, 1e-2, 1, 64);  // b=1: noisy batches
    RunSettings settings;
    settings.max_iters = 1;
    settings.cadence = 1;
    settings.record_walltime = false;
    const TrialResult trial = run_trial(train, nullptr, spec, 6, settings);
    std::mt19937_64 rng(6);
    const Matrix x1 = train.manifold().random_point(rng);
    CHECK(trial.records.front().gnorm_train == train.full_grad(x1).norm());
  }
  SUBCASE("sparse cadence still records the final iteration") {
    auto spec = quick_spec(Method::Rsgd, 1e-2, 8, 64);
    RunSettings settings;
    settings.max_iters = 50;
    settings.cadence = 20;
    settings.record_walltime = false;
    const TrialResult trial = run_trial(train, nullptr, spec, 2, settings);
    REQUIRE(trial.records.size() == 4);
    CHECK(trial.records[0].k == 1);
    CHECK(trial.records[1].k == 21);
    CHECK(trial.records[2].k == 41);
    CHECK(trial.records[3].k == 50);
  }
  SUBCASE("huge step sizes divergence-mark instead of crashing") {
    auto spec = quick_spec(Method::Rsgd, 1e+3, 8, 64);
    RunSettings settings;
    settings.max_iters = 200;
    settings.record_walltime = false;
    const TrialResult trial = run_trial(train, nullptr, spec, 1, settings);
    // A PCA objective is bounded on the Stiefel manifold, so the run may
    // survive; it must at least stay finite or be flagged.
    if (!trial.diverged)
      for (const auto& record : trial.records)
        CHECK(std::isfinite(record.f_train));
  }
}

TEST_CASE("identical configs give byte-identical csv files") {
  const PcaProblem train = noisy_pca(48, 5);
  auto spec = quick_spec(Method::RAmsGrad, 1e-2, 8, 48);
  RunSettings settings;
  settings.max_iters = 30;
  settings.cadence = 1;
  settings.record_walltime = false;

  const auto path_a = temp_path("radopt_run_a.csv");
  const auto path_b = temp_path("radopt_run_b.csv");
  write_records_csv(path_a, run_trial(train, nullptr, spec, 9, settings).records);
  write_records_csv(path_b, run_trial(train, nullptr, spec, 9, settings).records);
  const std::string a = file_contents(path_a);
  CHECK(a == file_contents(path_b));
  CHECK(a.rfind("k,alpha_k,b_k,f_train,f_test,gnorm_train,gnorm_test,"
                "elapsed_s\n", 0) == 0);
}

TEST_CASE("iterations_to_threshold") {
  std::vector<RunRecord> records(3);
  records[0].k = 1;
  records[0].gnorm_train = 3.1;
  records[1].k = 2;
  records[1].gnorm_train = 2.5;
  records[2].k = 3;
  records[2].gnorm_train = 1.9;
  const auto hit = iterations_to_threshold(records, 2.0);
  REQUIRE(hit.has_value());
  CHECK(*hit == 3);
  CHECK_FALSE(iterations_to_threshold(records, 1.0).has_value());
  CHECK_THROWS_AS(iterations_to_threshold({}, 1.0), ContractError);
}

TEST_CASE("grid search") {
  const PcaProblem train = noisy_pca(64, 6);
  auto spec = quick_spec(Method::RAmsGrad, 0.0, 8, 64);
  RunSettings settings;
  settings.max_iters = 150;
  settings.record_walltime = false;
  const std::vector<uint64_t> seeds = {1, 2};

  SUBCASE("a singleton set returns that step size") {
    const GridResult result =
        grid_search(train, nullptr, spec, {1e-2}, seeds, settings);
    CHECK(result.viable);
    CHECK(result.best_alpha == 1e-2);
  }
  SUBCASE("the best step size beats a tiny one") {
    const GridResult result =
        grid_search(train, nullptr, spec, {1e-2, 1e-8}, seeds, settings);
    REQUIRE(result.viable);
    CHECK(result.best_alpha == 1e-2);
  }
  SUBCASE("empty inputs are contract errors") {
    CHECK_THROWS_AS(grid_search(train, nullptr, spec, {}, seeds, settings),
                    ContractError);
    CHECK_THROWS_AS(grid_search(train, nullptr, spec, {1e-2}, {}, settings),
                    ContractError);
  }
}

TEST_CASE("repeated trials with one seed are metric-for-metric identical") {
  const PcaProblem train = noisy_pca(32, 7);
  auto spec = quick_spec(Method::Rsgd, 5e-2, 4, 32);
  RunSettings settings;
  settings.max_iters = 40;
  settings.cadence = 1;
  settings.record_walltime = false;

  const TrialResult a = run_trial(train, nullptr, spec, 3, settings);
  const TrialResult b = run_trial(train, nullptr, spec, 3, settings);
  REQUIRE(a.records.size() == b.records.size());
  for (size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].f_train == b.records[i].f_train);
    CHECK(a.records[i].gnorm_train == b.records[i].gnorm_train);
  }
}
