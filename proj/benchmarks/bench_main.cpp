#include <benchmark/benchmark.h>

#include <fstream>
#include <random>
#include <sstream>

#include "iftrace/graph.hpp"
#include "iftrace/parser.hpp"
#include "iftrace/taint.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kFixture =
    std::string(IFTRACE_DATA_DIR) + "/suite/aes_tsc_trojan/aes_top.v";

void BM_ParseDesign(benchmark::State& state) {
  std::string text = read_file(kFixture);
  for (auto _ : state) {
    auto result = iftrace::parse_source(text, "aes_top.v");
    benchmark::DoNotOptimize(result);
  }
}
BENCHMARK(BM_ParseDesign);

void BM_TaintFixpoint(benchmark::State& state) {
  auto unit = iftrace::load_unit({kFixture});
  auto hier = iftrace::resolve_hierarchy(unit);
  auto graph = iftrace::build_graph(hier.links, unit.module_names());
  std::vector<iftrace::AssetSeed> seeds{{"top", "KEY", "key"}};
  for (auto _ : state) {
    auto taint = iftrace::propagate(unit, graph, seeds);
    benchmark::DoNotOptimize(taint);
  }
}
BENCHMARK(BM_TaintFixpoint);

void BM_TopoSort(benchmark::State& state) {
  // Random DAG, edges only from lower to higher index.
  std::mt19937 rng(7);
  std::vector<std::string> names;
  for (int i = 0; i < 200; ++i) names.push_back("m" + std::to_string(i));
  std::vector<iftrace::HierarchyLink> links;
  std::uniform_int_distribution<int> coin(0, 9);
  for (int i = 0; i < 200; ++i)
    for (int j = i + 1; j < 200; ++j)
      if (coin(rng) == 0) links.push_back({names[j], names[i], "u"});
  auto graph = iftrace::build_graph(links, names);
  for (auto _ : state) {
    auto schedule = iftrace::topo_sort(graph);
    benchmark::DoNotOptimize(schedule);
  }
}
BENCHMARK(BM_TopoSort);

}  // namespace

BENCHMARK_MAIN();
