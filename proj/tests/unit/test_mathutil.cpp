#include "doctest.h"

#include <cmath>

#include "rrreg/errors.hpp"
#include "rrreg/mathutil.hpp"

using namespace rrreg;

TEST_CASE("normal quantile matches reference values") {
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-14));
    CHECK(normal_quantile(0.025) == doctest::Approx(-1.959963984540054).epsilon(1e-14));
    CHECK(normal_quantile(0.995) == doctest::Approx(2.5758293035489004).epsilon(1e-14));
    CHECK(normal_quantile(0.9999) == doctest::Approx(3.719016485455709).epsilon(1e-13));
    CHECK_THROWS_AS(normal_quantile(0.0), DomainError);
    CHECK_THROWS_AS(normal_quantile(1.0), DomainError);
}

TEST_CASE("normal quantile inverts the cdf") {
    for (double p : {1e-8, 1e-4, 0.01, 0.3, 0.5, 0.77, 0.999, 1.0 - 1e-9}) {
        CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
    }
}

TEST_CASE("median uses the average-two-middle convention") {
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
    CHECK(median({5.0}) == 5.0);
    CHECK_THROWS_AS(median({}), DomainError);
}

TEST_CASE("type-7 quantile interpolates") {
    std::vector<double> v = {1, 2, 3, 4, 5};
    CHECK(quantile_type7(v, 0.0) == 1.0);
    CHECK(quantile_type7(v, 1.0) == 5.0);
    CHECK(quantile_type7(v, 0.25) == 2.0);
    CHECK(quantile_type7(v, 0.5) == 3.0);
    CHECK(quantile_type7(v, 0.1) == doctest::Approx(1.4));
}

TEST_CASE("z multiplier") {
    CHECK(z_for_level(0.95) == doctest::Approx(1.959963984540054).epsilon(1e-14));
    CHECK_THROWS_AS(z_for_level(1.0), DomainError);
}
