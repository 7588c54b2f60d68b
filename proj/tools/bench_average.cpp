// Compares the serial reference against the OpenMP kernel on a two-track
// sublinear average and checks that the results agree bit for bit.

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <cstring>

#include "eal/engine.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace eal;

namespace {

engine::ExperimentSpec make_spec() {
  engine::ExperimentSpec spec;
  engine::Track t1;
  t1.system = systems::SystemSpec(
      systems::CircleRotation{systems::Angle::named("sqrt2")});
  t1.observable = systems::Observable(systems::TrigPoly::mode(1));
  t1.start = systems::PointState::circle(0.2);
  t1.iterate = engine::IterateSequence::power(0.7);
  engine::Track t2;
  t2.system = systems::SystemSpec(
      systems::CircleRotation{systems::Angle::named("sqrt3")});
  t2.observable = systems::Observable(systems::TrigPoly::mode(1));
  t2.start = systems::PointState::circle(0.6);
  t2.iterate = engine::IterateSequence::power(0.4);
  spec.tracks.push_back(std::move(t1));
  spec.tracks.push_back(std::move(t2));
  return spec;
}

double seconds(std::chrono::steady_clock::time_point a,
               std::chrono::steady_clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

}  // namespace

int main(int argc, char** argv) {
  std::int64_t N = 2'000'000;
  if (argc > 1) N = std::strtoll(argv[1], nullptr, 10);

  engine::ExperimentSpec spec = make_spec();

  auto t0 = std::chrono::steady_clock::now();
  engine::Complex serial = engine::multiple_average_serial(spec, N);
  auto t1 = std::chrono::steady_clock::now();
  double ts = seconds(t0, t1);
  std::printf("serial    N=%" PRId64 "  %.3f s  (%.1f Mterm/s)  A=% .12e %+.12ei\n", N,
              ts, static_cast<double>(N) / ts / 1e6, serial.real(), serial.imag());

  for (int workers : {1, 2, 4, 8}) {
    auto t2 = std::chrono::steady_clock::now();
    engine::Complex parallel = engine::multiple_average(spec, N, workers);
    auto t3 = std::chrono::steady_clock::now();
    double tp = seconds(t2, t3);
    bool identical = std::memcmp(&serial, &parallel, sizeof serial) == 0;
    std::printf("workers=%d N=%" PRId64 "  %.3f s  (%.1f Mterm/s)  speedup %.2fx  %s\n",
                workers, N, tp, static_cast<double>(N) / tp / 1e6, ts / tp,
                identical ? "bit-identical" : "MISMATCH");
    if (!identical) return 1;
  }
  return 0;
}
