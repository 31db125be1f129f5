#include <catch2/catch_amalgamated.hpp>

#include <polc/lattice.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace polc;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double pi = std::numbers::pi;

CrystalParams reduced16() {
    return CrystalParams::from_hoppings(16, 1.0, 0.5, 1.0, 0.1, 10.0, 10.0);
}

} // namespace

TEST_CASE("build_hamiltonian lays out ring bonds and coupling", "[lattice]") {
    auto p = CrystalParams::from_hoppings(4, 1.0, 0.5, 1.0, 0.1, 10.0, 12.0);
    auto h = build_hamiltonian(p);
    REQUIRE(h.dim == 8);

    const auto& m = h.matrix;
    for (std::size_t c = 0; c < 4; ++c) {
        CHECK(m(c, c) == 10.0);
        CHECK(m(4 + c, 4 + c) == 12.0);
        std::size_t next = (c + 1) % 4;
        CHECK(m(c, next) == -1.0);
        CHECK(m(next, c) == -1.0);
        CHECK(m(4 + c, 4 + next) == -0.1);
        CHECK(m(c, 4 + c) == 0.5);
        CHECK(m(4 + c, c) == 0.5);
    }
    // No photon-atom hopping between different cells.
    CHECK(m(0, 5) == 0.0);
    CHECK(m(1, 4) == 0.0);

    // Trace is M (omega_ph + omega_ab): sums of exact doubles here.
    CHECK(m.trace() == 4.0 * (10.0 + 12.0));
}

TEST_CASE("build_hamiltonian validates its input", "[lattice]") {
    auto p = reduced16();
    p.g = 0.0;
    CHECK_THROWS_AS(build_hamiltonian(p), std::invalid_argument);
}

TEST_CASE("jacobi solves the 2x2 coupling block exactly", "[lattice][jacobi]") {
    SymmetricMatrix m(2);
    m.set_sym(0, 1, 0.5);
    auto ev = jacobi_eigenvalues(m);
    REQUIRE(ev.size() == 2);
    CHECK_THAT(ev[0], WithinAbs(-0.5, 1e-15));
    CHECK_THAT(ev[1], WithinAbs(0.5, 1e-15));

    SymmetricMatrix d(2);
    d(0, 0) = 3.0;
    d(1, 1) = -1.0;
    d.set_sym(0, 1, 2.0);
    auto ev2 = jacobi_eigenvalues(d);
    // Analytic: 1 +- 2 sqrt(2).
    CHECK_THAT(ev2[0], WithinRel(1.0 - 2.0 * std::sqrt(2.0), 1e-14));
    CHECK_THAT(ev2[1], WithinRel(1.0 + 2.0 * std::sqrt(2.0), 1e-14));
}

TEST_CASE("jacobi returns a diagonal matrix's entries sorted", "[lattice][jacobi]") {
    SymmetricMatrix m(5);
    double vals[5] = {4.0, -2.0, 7.5, 0.0, 1.25};
    for (std::size_t i = 0; i < 5; ++i) m(i, i) = vals[i];
    auto ev = jacobi_eigenvalues(m);
    std::vector<double> expect = {-2.0, 0.0, 1.25, 4.0, 7.5};
    CHECK(ev == expect);
}

TEST_CASE("jacobi reproduces the 3-site ring spectrum", "[lattice][jacobi]") {
    // Tight-binding ring, hopping -1: eigenvalues -2 cos(2 pi j / 3)
    // = {-2, 1, 1}.
    SymmetricMatrix m(3);
    m.set_sym(0, 1, -1.0);
    m.set_sym(1, 2, -1.0);
    m.set_sym(2, 0, -1.0);
    auto ev = jacobi_eigenvalues(m);
    REQUIRE(ev.size() == 3);
    CHECK_THAT(ev[0], WithinAbs(-2.0, 1e-13));
    CHECK_THAT(ev[1], WithinAbs(1.0, 1e-13));
    CHECK_THAT(ev[2], WithinAbs(1.0, 1e-13));
}

TEST_CASE("jacobi preserves matrix invariants on random input", "[lattice][jacobi]") {
    std::mt19937 rng(314159);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int rep = 0; rep < 10; ++rep) {
        SymmetricMatrix m(10);
        double tr = 0.0;
        double frob2 = 0.0;
        for (std::size_t i = 0; i < 10; ++i) {
            for (std::size_t j = i; j < 10; ++j) {
                double v = u(rng);
                m.set_sym(i, j, v);
                frob2 += (i == j) ? v * v : 2.0 * v * v;
            }
            tr += m(i, i);
        }
        auto ev = jacobi_eigenvalues(m);
        double sum = 0.0;
        double sum2 = 0.0;
        for (double e : ev) {
            sum += e;
            sum2 += e * e;
        }
        // Sum of eigenvalues = trace; sum of squares = Frobenius norm^2.
        CHECK_THAT(sum, WithinAbs(tr, 1e-10));
        CHECK_THAT(sum2, WithinRel(frob2, 1e-10));
        CHECK(std::is_sorted(ev.begin(), ev.end()));
    }
}

TEST_CASE("jacobi reports non-convergence through numerical_error", "[lattice][jacobi]") {
    SymmetricMatrix m(3);
    m.set_sym(0, 1, 1.0);
    m.set_sym(1, 2, 1.0);
    JacobiOptions opt;
    opt.max_sweeps = 0;
    CHECK_THROWS_MATCHES(jacobi_eigenvalues(m, opt), numerical_error,
                         Catch::Matchers::MessageMatches(ContainsSubstring("sweeps")));
}

TEST_CASE("oracle matches the decoupled bands when g is negligible", "[lattice][oracle]") {
    // Detuned so the bare bands never cross (min |delta_omega| = 0.2): the
    // coupling then shifts eigenvalues by ~g^2/gap ~ 5e-16, not by +-g.
    auto p = reduced16();
    p.omega_ab = 12.0;
    p.g = 1e-8;
    auto ev = eigenvalues(build_hamiltonian(p));
    std::vector<double> bare;
    for (int j = 0; j < p.M; ++j) {
        double kl = 2.0 * pi * j / p.M;
        bare.push_back(p.omega_ph - 2.0 * p.alpha * std::cos(kl));
        bare.push_back(p.omega_ab - 2.0 * p.beta * std::cos(kl));
    }
    std::sort(bare.begin(), bare.end());
    REQUIRE(ev.size() == bare.size());
    for (std::size_t i = 0; i < ev.size(); ++i) {
        CHECK_THAT(ev[i], WithinAbs(bare[i], 1e-10));
    }
}

TEST_CASE("compare_to_analytic: reduced M = 16 ring", "[lattice][oracle]") {
    auto cmp = compare_to_analytic(reduced16());
    REQUIRE(cmp.eigenvalues.size() == 32);
    REQUIRE(cmp.analytic.size() == 32);
    CHECK(cmp.max_rel_dev < spectrum_pass_threshold);
    // Actual agreement is at the rounding floor.
    CHECK(cmp.max_rel_dev < 1e-12);
}

TEST_CASE("compare_to_analytic: cavity M = 8 ring", "[lattice][oracle]") {
    auto cmp = compare_to_analytic(sodium_cavity_params(8));
    REQUIRE(cmp.eigenvalues.size() == 16);
    CHECK(cmp.max_rel_dev < spectrum_pass_threshold);
}

TEST_CASE("oracle spectrum is invariant under ring relabeling", "[lattice][oracle]") {
    auto p = CrystalParams::from_hoppings(8, 1.0, 0.7, 1.3, 0.2, 9.0, 11.0);
    auto h = build_hamiltonian(p);
    const std::size_t m = 8;

    // Cyclic relabeling of cells (shift by 3) applied to both blocks.
    auto perm = [&](std::size_t i) {
        std::size_t block = i / m;
        std::size_t cell = i % m;
        return block * m + (cell + 3) % m;
    };
    SymmetricMatrix shuffled(2 * m);
    for (std::size_t i = 0; i < 2 * m; ++i)
        for (std::size_t j = 0; j < 2 * m; ++j) shuffled(perm(i), perm(j)) = h.matrix(i, j);

    auto ev_a = jacobi_eigenvalues(h.matrix);
    auto ev_b = jacobi_eigenvalues(shuffled);
    REQUIRE(ev_a.size() == ev_b.size());
    for (std::size_t i = 0; i < ev_a.size(); ++i) {
        CHECK_THAT(ev_b[i], WithinAbs(ev_a[i], 1e-10));
    }
}

TEST_CASE("compare_to_analytic over random reduced-unit draws", "[lattice][oracle]") {
    std::mt19937 rng(20240518);
    std::uniform_real_distribution<double> rate(0.01, 10.0);
    for (int rep = 0; rep < 8; ++rep) {
        for (int m : {4, 8, 16}) {
            auto p = CrystalParams::from_hoppings(m, 1.0, rate(rng), rate(rng), rate(rng),
                                                  rate(rng), rate(rng));
            auto cmp = compare_to_analytic(p);
            INFO("M=" << m << " g=" << p.g << " alpha=" << p.alpha << " beta=" << p.beta);
            CHECK(cmp.max_rel_dev < spectrum_pass_threshold);
        }
    }
}

TEST_CASE("spectrum CSV format", "[lattice][io]") {
    auto cmp = compare_to_analytic(CrystalParams::from_hoppings(4, 1.0, 0.5, 1.0, 0.1, 10.0, 10.0));
    std::ostringstream out;
    write_spectrum_csv(out, cmp);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "oracle_rad_s,analytic_rad_s");
    std::size_t rows = 0;
    bool saw_footer = false;
    while (std::getline(in, line)) {
        if (line.rfind("# max_rel_dev = ", 0) == 0) {
            saw_footer = true;
        } else if (!line.empty()) {
            ++rows;
        }
    }
    CHECK(rows == 8);
    CHECK(saw_footer);
}
