// Serial versus parallel timings of the hot kernels on the bundled example.
#include <chrono>
#include <cstdio>
#include <functional>

#include "nlclass/bounds.hpp"
#include "nlclass/globopt.hpp"
#include "nlclass/io.hpp"
#include "nlclass/matfun.hpp"
#include "nlclass/omp.hpp"

using namespace nlclass;

namespace {

double seconds(const std::function<void()>& fn, int reps) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / reps;
}

void row(const char* name, double serial, double parallel) {
  std::printf("%-28s %12.6f %12.6f %8.2fx\n", name, serial, parallel, serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
  const std::string path = argc > 1 ? argv[1] : NLCLASS_DATA_DIR "/moving_object.sys";
  const SystemModel model = load_system(path);
  const ExprMatrix psi = symmetric_part(jacobian_exprs(model));
  const Expr row0 = simplify(Expr::add(psi[0][0], Expr::call(Func::abs, psi[0][1])));
  const Objective obj = Objective::from_expr(row0);
  BnbConfig cfg;
  cfg.tol = 1e-11;

  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("%-28s %12s %12s %9s\n", "kernel", "serial [s]", "parallel [s]", "speedup");
  row("bnb gershgorin row, 1e-11",
      seconds([&] { maximize_serial(obj, model.omega, cfg); }, 5),
      seconds([&] { maximize(obj, model.omega, cfg); }, 5));
  row("spectral sampling 1e5",
      seconds([&] { osl_spectral_bounds_serial(model, 100000); }, 3),
      seconds([&] { osl_spectral_bounds(model, 100000); }, 3));
  row("zeta verifier n=4, 1e6",
      seconds([&] { verify_zeta_serial(4, 1000000, 1); }, 1),
      seconds([&] { verify_zeta(4, 1000000, 1); }, 1));
  return 0;
}
