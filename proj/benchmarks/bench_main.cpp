#include <benchmark/benchmark.h>

#include "citynet/betweenness.hpp"
#include "citynet/clustering.hpp"
#include "citynet/metrics.hpp"
#include "citynet/projection.hpp"
#include "citynet/synthetic.hpp"

namespace {

citynet::StreetGraph make_grid(std::size_t side) {
    citynet::pipeline::SyntheticSpec spec;
    spec.kind = citynet::pipeline::CityKind::kGrid;
    spec.size = side;
    spec.seed = 42;
    spec.noise = 0.2;
    return citynet::pipeline::generate_synthetic_city(spec);
}

void bm_all_pairs_profile(benchmark::State& state) {
    const auto g = make_grid(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(citynet::metrics::all_pairs_profile(g));
    }
    state.SetLabel(std::to_string(g.node_count()) + " nodes");
}
BENCHMARK(bm_all_pairs_profile)->Arg(8)->Arg(16)->Arg(24);

void bm_betweenness(benchmark::State& state) {
    const auto g = make_grid(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(citynet::betweenness_by_index(g));
    }
    state.SetLabel(std::to_string(g.node_count()) + " nodes");
}
BENCHMARK(bm_betweenness)->Arg(8)->Arg(16);

void bm_feature_vector(benchmark::State& state) {
    const auto g = make_grid(static_cast<std::size_t>(state.range(0)));
    const auto registry = citynet::metrics::MetricRegistry::standard();
    for (auto _ : state) {
        benchmark::DoNotOptimize(citynet::metrics::compute_features("bench", g, registry));
    }
}
BENCHMARK(bm_feature_vector)->Arg(8)->Arg(16);

citynet::select::FeatureMatrix random_points(std::size_t n, std::size_t d) {
    std::vector<std::string> ids;
    std::vector<std::string> names;
    std::vector<double> values;
    std::uint64_t state = 99;
    auto next = [&state] {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return static_cast<double>(state >> 11) * 0x1.0p-53;
    };
    for (std::size_t c = 0; c < d; ++c) names.push_back("f" + std::to_string(c));
    for (std::size_t r = 0; r < n; ++r) {
        ids.push_back("p" + std::to_string(r));
        for (std::size_t c = 0; c < d; ++c) values.push_back(next());
    }
    return {std::move(ids), std::move(names), std::move(values)};
}

void bm_kmeans(benchmark::State& state) {
    const auto points = random_points(static_cast<std::size_t>(state.range(0)), 6);
    for (auto _ : state) {
        benchmark::DoNotOptimize(citynet::cluster::kmeans(points, 4, 1));
    }
}
BENCHMARK(bm_kmeans)->Arg(100)->Arg(400);

void bm_silhouette(benchmark::State& state) {
    const auto points = random_points(static_cast<std::size_t>(state.range(0)), 6);
    const auto assignment = citynet::cluster::kmeans(points, 4, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(citynet::cluster::silhouette(points, assignment.labels));
    }
}
BENCHMARK(bm_silhouette)->Arg(100)->Arg(400);

void bm_isomap(benchmark::State& state) {
    const auto points = random_points(static_cast<std::size_t>(state.range(0)), 6);
    for (auto _ : state) {
        benchmark::DoNotOptimize(citynet::proj::isomap(points, 2, 5));
    }
}
BENCHMARK(bm_isomap)->Arg(50)->Arg(150);

}  // namespace

BENCHMARK_MAIN();
