// Timing comparison between the serial reference loops and the OpenMP batch
// layer, on the two workloads the CLI parallelizes: parameter sweeps and
// random-unitary dominance sampling.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <vector>

#include "qbatt/batch.hpp"
#include "qbatt/equilibrium.hpp"
#include "qbatt/ergotropy.hpp"
#include "qbatt/hamiltonians.hpp"

namespace {

double time_ms(const std::function<void()>& fn) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(stop - start).count();
}

void sweep_workload(bool parallel, int n_points) {
    const auto run = parallel ? qbatt::batch::run_parallel : qbatt::batch::run_serial;
    std::vector<double> etas(n_points);
    run(n_points, [&](int i) {
        const double h = 0.1 + 1.7 * static_cast<double>(i) / n_points;
        const auto ops = qbatt::build_two_qubit(h, 1.0);
        const qbatt::CollisionModel model(ops.h_s, ops.h_a, ops.v, 2.0, 0.1);
        const auto cls = qbatt::classify(model);
        etas[i] = qbatt::charging_report(model.h_s, cls.certificate->h0, 2.0).eta;
    });
}

double dominance_workload(int trials) {
    const auto ops = qbatt::build_two_qubit(0.5, 1.0);
    const qbatt::DensityMatrix rho =
        qbatt::gibbs(qbatt::HermitianOperator(-ops.h_s.matrix()), 2.0);
    return qbatt::random_unitary_dominance(rho, ops.h_s, trials, 42);
}

}  // namespace

int main() {
    std::printf("qbatt batch benchmark (max threads: %d)\n", qbatt::batch::max_threads());

    {
        const int n = 64;
        sweep_workload(false, 4);  // warmup
        const double serial = time_ms([&] { sweep_workload(false, n); });
        const double parallel = time_ms([&] { sweep_workload(true, n); });
        std::printf("two-qubit classification sweep, %6d points: serial %8.1f ms | omp %8.1f ms"
                    " | speedup %.2fx\n",
                    n, serial, parallel, serial / parallel);
    }
    {
        // The dominance sampler is seeded per trial, so the serial reference
        // (QBATT_THREADS=1) must reproduce the parallel result bit for bit.
        const int trials = 200000;
        setenv("QBATT_THREADS", "1", 1);
        double serial_result = 0.0;
        const double serial = time_ms([&] { serial_result = dominance_workload(trials); });
        unsetenv("QBATT_THREADS");
        double parallel_result = 0.0;
        const double parallel = time_ms([&] { parallel_result = dominance_workload(trials); });
        std::printf("dominance sampling,     %6d trials:        serial %8.1f ms | omp %8.1f ms"
                    " | speedup %.2fx | results %s\n",
                    trials, serial, parallel, serial / parallel,
                    serial_result == parallel_result ? "identical" : "DIFFER");
    }
    return 0;
}
