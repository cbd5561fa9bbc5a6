// Copyright 2026 The netslice Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "netslice/auction.hpp"
#include "netslice/scenario_io.hpp"
#include "netslice/sigprog.hpp"

using namespace netslice;

namespace {

const std::string kDir = NETSLICE_SCENARIO_DIR;

const Market& three_np() {
  static const Market m = [] {
    const Scenario sc = load_scenario(kDir + "/three_np.json");
    return build_market(sc, sc.classes);
  }();
  return m;
}

const Market& two_provider() {
  static const Market m = [] {
    const Scenario sc = load_scenario(kDir + "/two_provider.json");
    return build_market(sc, sc.classes);
  }();
  return m;
}

void BM_ExcessDemandParallel(benchmark::State& state) {
  const std::vector<double> c = {0.6, 0.62, 0.58};
  for (auto _ : state) benchmark::DoNotOptimize(excess_demand(three_np(), c));
}

void BM_ExcessDemandSerial(benchmark::State& state) {
  const std::vector<double> c = {0.6, 0.62, 0.58};
  for (auto _ : state) benchmark::DoNotOptimize(excess_demand_serial(three_np(), c));
}

void run_bnb(benchmark::State& state, bool parallel) {
  BnBOptions opt;
  opt.parallel = parallel;
  const std::vector<double> x = {1300.0, 10.0};
  for (auto _ : state) benchmark::DoNotOptimize(solve_in_sl(two_provider().sps[0], x, opt));
}

void BM_BranchAndBoundParallel(benchmark::State& state) { run_bnb(state, true); }
void BM_BranchAndBoundSerial(benchmark::State& state) { run_bnb(state, false); }

}  // namespace

BENCHMARK(BM_ExcessDemandParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExcessDemandSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BranchAndBoundParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BranchAndBoundSerial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
