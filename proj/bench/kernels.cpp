#include <benchmark/benchmark.h>

#include <random>

#include "tello_arena/render.hpp"
#include "tello_arena/vision.hpp"

using namespace tello;

namespace {

const CourseSpec& course()
{
    static const CourseSpec c = load_course_file(std::filesystem::path(TELLO_DATA_DIR) / "course_2023.json");
    return c;
}

CameraModel camera(int scale)
{
    CameraModel cam;
    cam.width = 320 * scale;
    cam.height = 240 * scale;
    return cam;
}

const Pose kPose{3.5, 1.15, 1.2, 30};

Mask random_mask(int w, int h)
{
    std::mt19937_64 rng(7);
    std::bernoulli_distribution bit(0.4);
    Mask m(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            m.set(x, y, bit(rng));
    return m;
}

void BM_RenderSerial(benchmark::State& state)
{
    const CameraModel cam = camera(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(reference::render_downward(course(), kPose, cam));
}

void BM_RenderParallel(benchmark::State& state)
{
    const CameraModel cam = camera(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(render_downward(course(), kPose, cam));
}

void BM_InRangeSerial(benchmark::State& state)
{
    const Frame f = render_downward(course(), kPose, camera(static_cast<int>(state.range(0))));
    for (auto _ : state)
        benchmark::DoNotOptimize(reference::in_range(f, ranges::kBlack));
}

void BM_InRangeParallel(benchmark::State& state)
{
    const Frame f = render_downward(course(), kPose, camera(static_cast<int>(state.range(0))));
    for (auto _ : state)
        benchmark::DoNotOptimize(in_range(f, ranges::kBlack));
}

void BM_OpenSerial(benchmark::State& state)
{
    const int s = static_cast<int>(state.range(0));
    const Mask m = random_mask(320 * s, 240 * s);
    for (auto _ : state)
        benchmark::DoNotOptimize(reference::morphology(m, MorphOp::Open, 2));
}

void BM_OpenParallel(benchmark::State& state)
{
    const int s = static_cast<int>(state.range(0));
    const Mask m = random_mask(320 * s, 240 * s);
    for (auto _ : state)
        benchmark::DoNotOptimize(morphology(m, MorphOp::Open, 2));
}

}  // namespace

BENCHMARK(BM_RenderSerial)->Arg(1)->Arg(4)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_RenderParallel)->Arg(1)->Arg(4)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_InRangeSerial)->Arg(1)->Arg(4)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_InRangeParallel)->Arg(1)->Arg(4)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_OpenSerial)->Arg(1)->Arg(4)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_OpenParallel)->Arg(1)->Arg(4)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
