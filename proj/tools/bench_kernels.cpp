#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fairgen/evaluation.hpp"
#include "fairgen/mmd.hpp"
#include "fairgen/rng.hpp"
#include "ref/reference.hpp"

using namespace fairgen;

namespace {

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch())
      .count();
}

RowMatrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  RowMatrix m(rows, cols);
  for (double& v : m.data)
    v = rng.normal();
  return m;
}

template <typename F>
double time_best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    double t0 = now_ms();
    f();
    best = std::min(best, now_ms() - t0);
  }
  return best;
}

void bench_mmd(std::size_t m, std::size_t d) {
  Rng rng(11);
  RowMatrix a = random_matrix(m, d, rng);
  RowMatrix b = random_matrix(m, d, rng);
  MmdConfig cfg;
  cfg.sigma = median_heuristic_sigma({&a, &b});

  volatile double sink = 0.0;
  double serial = time_best_of(3, [&] { sink = ref::mmd2(a, b, cfg); });
  double parallel = time_best_of(3, [&] { sink = mmd2(a, b, cfg); });
  double diff = std::fabs(ref::mmd2(a, b, cfg) - mmd2(a, b, cfg));
  std::printf("mmd2        m=%5zu d=%3zu  serial %8.2f ms  openmp %8.2f ms  "
              "speedup %5.2fx  |diff| %.2e\n",
              m, d, serial, parallel, serial / parallel, diff);

  serial = time_best_of(3, [&] { sink = ref::mmd2_grad(a, b, cfg).data[0]; });
  parallel = time_best_of(3, [&] { sink = mmd2_grad(a, b, cfg).data[0]; });
  RowMatrix gs = ref::mmd2_grad(a, b, cfg), gp = mmd2_grad(a, b, cfg);
  double gdiff = 0.0;
  for (std::size_t i = 0; i < gs.data.size(); ++i)
    gdiff = std::max(gdiff, std::fabs(gs.data[i] - gp.data[i]));
  std::printf("mmd2_grad   m=%5zu d=%3zu  serial %8.2f ms  openmp %8.2f ms  "
              "speedup %5.2fx  |diff| %.2e\n",
              m, d, serial, parallel, serial / parallel, gdiff);
  (void)sink;
}

void bench_nn(std::size_t n, std::size_t d) {
  Rng rng(13);
  RowMatrix real = random_matrix(n, d, rng);
  RowMatrix gen = random_matrix(n, d, rng);

  volatile double sink = 0.0;
  double serial = time_best_of(3, [&] {
    double sum = 0.0;
    for (std::size_t i = 0; i < gen.rows; ++i)
      sum += ref::max_cosine(gen, i, real, -1);
    sink = sum / static_cast<double>(gen.rows);
  });
  double parallel = time_best_of(3, [&] {
    // The diversity report runs three scans (G-R, R-R, G-G).
    sink = diversity_report(real, gen, n, 5).mean_gr;
  });
  std::printf("nn cosine   n=%5zu d=%3zu  serial %8.2f ms (1 scan)  openmp %8.2f ms "
              "(3 scans)\n",
              n, d, serial, parallel);
  (void)sink;
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP disabled (serial build)\n");
#endif
  bench_mmd(128, 64);
  bench_mmd(256, 64);
  bench_mmd(512, 64);
  bench_nn(500, 64);
  bench_nn(1000, 64);
  return 0;
}
