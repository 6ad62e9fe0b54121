#include "qbatt/batch.hpp"

#include <cstdlib>
#include <exception>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qbatt::batch {

int max_threads() {
#ifdef _OPENMP
    int n = omp_get_max_threads();
#else
    int n = 1;
#endif
    if (const char* env = std::getenv("QBATT_THREADS")) {
        try {
            const int cap = std::stoi(env);
            if (cap >= 1 && cap < n) {
                n = cap;
            }
        } catch (const std::exception&) {
            // Unparsable value: keep the OpenMP default.
        }
    }
    return n;
}

void run_serial(int n, const std::function<void(int)>& body) {
    for (int i = 0; i < n; ++i) {
        body(i);
    }
}

void run_parallel(int n, const std::function<void(int)>& body) {
    const int threads = max_threads();
    if (threads <= 1) {
        run_serial(n, body);
        return;
    }
#ifdef _OPENMP
    std::exception_ptr first_error = nullptr;
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (int i = 0; i < n; ++i) {
        try {
            body(i);
        } catch (...) {
#pragma omp critical(qbatt_batch_error)
            if (!first_error) {
                first_error = std::current_exception();
            }
        }
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }
#else
    run_serial(n, body);
#endif
}

}  // namespace qbatt::batch
