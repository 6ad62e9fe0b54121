#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "qbatt/batch.hpp"
#include "qbatt/ergotropy.hpp"
#include "qbatt/hamiltonians.hpp"
#include "test_util.hpp"

using namespace qbatt;

namespace {

struct EnvGuard {
    explicit EnvGuard(const char* value) {
        if (value) {
            setenv("QBATT_THREADS", value, 1);
        } else {
            unsetenv("QBATT_THREADS");
        }
    }
    ~EnvGuard() { unsetenv("QBATT_THREADS"); }
};

}  // namespace

TEST_CASE("serial loop runs bodies in order") {
    std::vector<int> order;
    batch::run_serial(5, [&](int i) { order.push_back(i); });
    CHECK(order == std::vector<int>{0, 1, 2, 3, 4});
}

TEST_CASE("parallel loop covers the index space exactly once") {
    const int n = 1000;
    std::vector<std::atomic<int>> hits(n);
    batch::run_parallel(n, [&](int i) { hits[static_cast<std::size_t>(i)]++; });
    for (const auto& h : hits) {
        CHECK(h.load() == 1);
    }
}

TEST_CASE("QBATT_THREADS caps the worker count") {
    {
        EnvGuard guard("1");
        CHECK(batch::max_threads() == 1);
    }
    {
        EnvGuard guard("unparsable");
        CHECK(batch::max_threads() >= 1);
    }
    {
        EnvGuard guard(nullptr);
        CHECK(batch::max_threads() >= 1);
    }
}

TEST_CASE("exceptions propagate out of the parallel loop") {
    CHECK_THROWS_AS(batch::run_parallel(64,
                                        [&](int i) {
                                            if (i == 13) {
                                                throw std::runtime_error("boom");
                                            }
                                        }),
                    std::runtime_error);
}

TEST_CASE("dominance sampling is thread-count independent") {
    std::mt19937_64 rng(13001);
    const HermitianOperator h(oracle::random_hermitian_unit(3, rng));
    const DensityMatrix rho(oracle::random_density(3, rng));

    double serial = 0.0;
    {
        EnvGuard guard("1");
        serial = random_unitary_dominance(rho, h, 4000, 77);
    }
    double parallel = 0.0;
    {
        EnvGuard guard(nullptr);
        parallel = random_unitary_dominance(rho, h, 4000, 77);
    }
    CHECK(serial == parallel);  // bitwise: per-trial seeding, max reduction
}
