#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "projlab/analysis.hpp"
#include "projlab/rates.hpp"
#include "projlab/sampling.hpp"
#include "test_support.hpp"

#include <cmath>
#include <numbers>

using namespace projlab;
using projlab::test::v;

namespace {

Vec unit(double angle) { return v({std::cos(angle), std::sin(angle)}); }

// line through 0 with direction at the given angle
SetPtr<double> line(double angle) { return make_hyperplane<double>(unit(angle + std::numbers::pi / 2), 0.0); }

// Brute force sup of |x| / max_i d_i(x) over a fine circle (the ratio is
// scale invariant for cones through 0).
double kappa_grid_oracle(const std::vector<SetPtr<double>>& lines)
{
    double best = 0.0;
    constexpr int n = 200000;
    for (int i = 0; i < n; ++i) {
        const Vec x = unit(2 * std::numbers::pi * i / n);
        double dmax = 0.0;
        for (const auto& l : lines) {
            const Vec a = l->as<shapes::Hyperplane<double>>()->a;
            dmax = std::max(dmax, std::abs(a.dot(x)) / a.norm());
        }
        best = std::max(best, 1.0 / dmax);
    }
    return best;
}

} // namespace

TEST_CASE("projector onto a halfspace is quasi firmly Fejer with gamma = beta = 1")
{
    auto h = make_halfspace<double>(v({1, 2}), 1.0);
    const Vec w = v({1, 0});
    auto rep = check_quasi_firm_fejer(as_map(make_relaxed(h, 1.0)), *h, 1.0, 1.0, w, 1.0, 2000, 7);
    CHECK(rep.samples == 2000);
    CHECK(rep.violations == 0);
    CHECK(rep.passed());
}

TEST_CASE("reflector across a line with gamma = 1, beta = 0")
{
    auto l = line(0.4);
    auto rep = check_quasi_firm_fejer(as_map(make_relaxed(l, 2.0)), *l, 1.0, 0.0, Vec::Zero(2), 2.0, 2000, 8);
    CHECK(rep.violations == 0);
    // an isometry fixing the line: the inequality is an equality
    CHECK(rep.max_abs_margin < 1e-12);
}

TEST_CASE("fixed point margin is zero")
{
    auto b = make_ball<double>(v({0, 0}), 1.0);
    auto pts = make_points<double>({v({0.1, 0.2})});
    auto rep = check_quasi_firm_fejer(as_map(make_relaxed(b, 1.0)), *pts, 1.0, 1.0, v({0.1, 0.2}), 1e-6, 50, 1);
    CHECK(rep.violations == 0);
    CHECK(rep.max_abs_margin < 1e-20);
}

TEST_CASE("quasi Fejer check fails loudly without reference points")
{
    auto far = make_ball<double>(v({10, 0}), 1.0);
    auto op = as_map(make_relaxed(far, 1.0));
    CHECK_THROWS_AS(check_quasi_firm_fejer(op, *far, 1.0, 1.0, v({0, 0}), 1.0, 20, 1), Error);
    try {
        check_quasi_firm_fejer(op, *far, 1.0, 1.0, v({0, 0}), 1.0, 20, 1);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SamplingFailure);
    }
    CHECK_THROWS_AS(check_quasi_firm_fejer(op, *far, 0.5, 1.0, v({0, 0}), 1.0, 20, 1), Error);
}

TEST_CASE("a wrong beta is detected")
{
    auto l = line(0.0);
    // reflection does not satisfy beta > 0 with gamma = 1
    auto rep = check_quasi_firm_fejer(as_map(make_relaxed(l, 2.0)), *l, 1.0, 0.5, Vec::Zero(2), 1.0, 500, 3);
    CHECK(rep.violations > 0);
    CHECK(rep.worst_margin < 0.0);
    CHECK(rep.witness.size() == 3);
}

TEST_CASE("relaxed projector is quasi coercive with equality")
{
    auto s = make_sphere<double>(v({0, 0}), 1.0);
    for (double lam : {0.5, 1.0, 1.7}) {
        auto rep = check_quasi_coercive(as_map(make_relaxed(s, lam)), *s, lam, v({1, 0}), 0.5, 1000, 4);
        CHECK(rep.violations == 0);
        CHECK(rep.max_abs_margin < 1e-12);
    }
}

TEST_CASE("DR on lines at pi/3 is quasi coercive with the closed-form nu")
{
    const double theta = std::numbers::pi / 3;
    auto a = line(0.0);
    auto b = line(theta);
    auto origin = make_points<double>({v({0, 0})});
    IntersectionDistance dist(std::vector<SetPtr<double>>{a, b}, origin);
    auto kap = estimate_linear_regularity({a, b}, dist, Vec::Zero(2), 1.0, 20000, 5);
    CHECK(kap.value == doctest::Approx(1.0 / std::sin(theta / 2)).epsilon(1e-3));
    for (double lam : {1.0, 2.0})
        for (double mu : {0.5, 2.0})
            for (double alpha : {0.5, 1.0}) {
                const double nu = dr_coercivity(lam, mu, alpha, std::cos(theta), kap.value);
                auto rep = check_quasi_coercive(as_map(make_dr(a, b, lam, mu, alpha)), *origin, nu, Vec::Zero(2), 1.0,
                                                2000, 6);
                CHECK(rep.violations == 0);
            }
}

TEST_CASE("eps regularity of a halfspace is zero")
{
    auto h = make_halfspace<double>(v({1, -1, 2}), 0.5);
    const Vec w = project(h, v({0, 0, 0})).canonical;
    auto est = estimate_eps_regularity(*h, w, 1.0, 3000, 9);
    CHECK(est.kind == EstimateKind::EpsDelta);
    CHECK(est.value <= 1e-9);
    CHECK(est.samples == 3000);
}

TEST_CASE("eps regularity of the unit circle near a point")
{
    auto s = make_sphere<double>(v({0, 0}), 1.0);
    const Vec w = v({1, 0});
    const double delta = 0.2;
    auto est = estimate_eps_regularity(*s, w, delta, 5000, 10);
    CHECK(est.value <= 0.11);

    // Dense boundary grid over the arc the member sampler reaches: projections
    // of B(w, delta/2) onto the circle.
    const double half = std::asin(delta / 2);
    std::vector<Vec> arc;
    constexpr int n = 400;
    for (int i = 0; i <= n; ++i) arc.push_back(unit(-half + 2 * half * i / n));
    double oracle = 0.0;
    for (const auto& x : arc) {
        const Vec u = x.normalized();
        for (const auto& y : arc) {
            const double len = (y - x).norm();
            if (len < 1e-9) continue;
            oracle = std::max(oracle, std::abs(u.dot(y - x)) / len);
        }
    }
    CHECK(est.value <= oracle + 1e-12);
    CHECK(est.value >= 0.9 * oracle);
    CHECK(eps_ratio_over(*s, arc) == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("eps regularity of a single point is zero")
{
    auto p = make_points<double>({v({1, 2})});
    auto est = estimate_eps_regularity(*p, v({1, 2}), 1.0, 200, 11);
    CHECK(est.value == 0.0);
    CHECK_THROWS_AS(estimate_eps_regularity(*p, v({0, 0}), 1.0, 10, 1), Error);
}

TEST_CASE("linear regularity of orthogonal lines matches the grid oracle")
{
    std::vector<SetPtr<double>> sys = {line(0.0), line(std::numbers::pi / 2)};
    const double oracle = kappa_grid_oracle(sys);
    CHECK(oracle == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
    IntersectionDistance dist(sys, make_points<double>({v({0, 0})}));
    auto est = estimate_linear_regularity(sys, dist, Vec::Zero(2), 1.0, 20000, 12);
    CHECK(est.value <= oracle + 1e-12);
    CHECK(est.value >= oracle * (1 - 1e-3));
}

TEST_CASE("linear regularity of identical halfspaces is one")
{
    auto h = make_halfspace<double>(v({0, 1}), 0.0);
    std::vector<SetPtr<double>> sys = {h, h};
    IntersectionDistance dist(sys, h);
    auto est = estimate_linear_regularity(sys, dist, Vec::Zero(2), 1.0, 2000, 13);
    CHECK(est.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("linear regularity of lines at pi/6")
{
    std::vector<SetPtr<double>> sys = {line(0.0), line(std::numbers::pi / 6)};
    const double oracle = kappa_grid_oracle(sys);
    // the ratio has a kink at its peak, so the grid converges linearly
    CHECK(oracle == doctest::Approx(1.0 / std::sin(std::numbers::pi / 12)).epsilon(1e-4));
    IntersectionDistance dist(sys, make_points<double>({v({0, 0})}));
    auto est = estimate_linear_regularity(sys, dist, Vec::Zero(2), 1.0, 20000, 14);
    CHECK(est.value <= 1.0 / std::sin(std::numbers::pi / 12) + 1e-12);
    CHECK(est.value >= oracle * (1 - 2e-3));

    // the projection-based fallback agrees and is flagged
    IntersectionDistance approx(sys, std::nullopt);
    CHECK(approx.approximate());
    auto est2 = estimate_linear_regularity(sys, approx, Vec::Zero(2), 1.0, 200, 14);
    CHECK(std::abs(est2.value - estimate_linear_regularity(sys, dist, Vec::Zero(2), 1.0, 200, 14).value) < 1e-6);
    CHECK(std::find(est2.flags.begin(), est2.flags.end(), "approximate intersection distance") != est2.flags.end());
}

TEST_CASE("theta bar examples")
{
    for (double th : {0.3, 1.0, std::numbers::pi / 2}) {
        auto est = estimate_theta_bar(*line(0.0), *line(th), Vec::Zero(2), 50, 15);
        CHECK(est.value == doctest::Approx(std::cos(th)).epsilon(1e-12));
    }
    auto h = make_halfspace<double>(v({1, 1}), 0.0);
    CHECK(estimate_theta_bar(*h, *h, Vec::Zero(2), 50, 16).value == doctest::Approx(-1.0));
    auto ball = make_ball<double>(v({0, 0}), 1.0);
    auto triv = estimate_theta_bar(*ball, *h, Vec::Zero(2), 50, 17);
    CHECK(triv.value == 0.0);
    CHECK(triv.flags.size() == 1);
}

TEST_CASE("strong regularity of the three halfspace example")
{
    auto c1 = make_halfspace<double>(v({1, 1}), 0.0);
    auto c2 = make_halfspace<double>(v({1, -1}), 0.0);
    auto c3 = make_halfspace<double>(v({-1, 0}), 0.0);
    const Vec w = Vec::Zero(2);
    auto all = check_strong_regularity({c1, c2, c3}, w, 0.5, 200, 18);
    CHECK(all.value < 1e-9);
    CHECK_FALSE(all.holds);
    for (auto pair : {std::vector{c1, c2}, std::vector{c1, c3}, std::vector{c2, c3}}) {
        auto est = check_strong_regularity(pair, w, 0.5, 200, 19);
        CHECK(est.value > 0.1);
        CHECK(est.holds);
    }
    auto single = check_strong_regularity({c1}, w, 0.5, 50, 20);
    CHECK(single.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("injectability examples")
{
    for (double tau0 : {0.1, 1.0, 5.0}) {
        auto e = make_enlargement<double>(make_points<double>({v({0, 0}), v({3, 1})}), tau0);
        auto rep = check_injectable(*e, 2 * tau0, v({0, tau0}), 3 * tau0, 1000, 21);
        CHECK(rep.violations == 0);
    }
    auto quad = make_translate<double>(make_orthant<double>({1, 1}), v({2, -1}));
    for (double tau : {0.5, 10.0}) CHECK(check_injectable(*quad, tau, v({2, -1}), 3.0, 1000, 22).violations == 0);
    auto hyp = make_hyperplane<double>(v({1, 1}), 0.0);
    auto bad = check_injectable(*hyp, 0.1, Vec::Zero(2), 1.0, 100, 23);
    CHECK(bad.violations > 0);
}

TEST_CASE("obtuse cone examples")
{
    CHECK(is_obtuse_cone(*make_orthant<double>({1, -1, 1}), 200, 24).passed());
    CHECK(is_obtuse_cone(*make_translate<double>(make_orthant<double>({1, 0}), v({1, 1})), 200, 24).passed());
    Mat ray(2, 1);
    ray << 1, 1;
    CHECK_FALSE(is_obtuse_cone(*make_cone<double>(ray), 200, 25).passed());
    Mat half(2, 3);
    half << 1, 0, 0, 0, 1, -1;
    CHECK(is_obtuse_cone(*make_cone<double>(half), 200, 26).passed());
    // a cone narrower than a quadrant is not obtuse
    Mat narrow(2, 2);
    narrow << 1, 1, 0, 1;
    CHECK_FALSE(is_obtuse_cone(*make_cone<double>(narrow), 200, 27).passed());
    CHECK_THROWS_AS(is_obtuse_cone(*make_ball<double>(v({0, 0}), 1.0), 10, 1), Error);
}

TEST_CASE("property: reports are deterministic per seed")
{
    auto s = make_sphere<double>(v({0, 0}), 1.0);
    auto op = as_map(make_relaxed(s, 1.5));
    auto a = check_quasi_firm_fejer(op, *s, 1.2, 0.1, v({0, 1}), 0.3, 500, 99);
    auto b = check_quasi_firm_fejer(op, *s, 1.2, 0.1, v({0, 1}), 0.3, 500, 99);
    CHECK(a.worst_margin == b.worst_margin);
    CHECK(a.violations == b.violations);
    REQUIRE(a.witness.size() == b.witness.size());
    for (std::size_t i = 0; i < a.witness.size(); ++i) CHECK(a.witness[i] == b.witness[i]);
    auto e1 = estimate_eps_regularity(*s, v({0, 1}), 0.3, 500, 5);
    auto e2 = estimate_eps_regularity(*s, v({0, 1}), 0.3, 500, 5);
    CHECK(e1.value == e2.value);
    auto c = check_quasi_firm_fejer(op, *s, 1.2, 0.1, v({0, 1}), 0.3, 500, 100);
    CHECK(c.worst_margin != a.worst_margin);
}

TEST_CASE("property: sampled eps feeds constants that pass the Fejer check")
{
    std::vector<std::pair<SetPtr<double>, Vec>> cases = {
        {make_sphere<double>(v({0, 0}), 1.0), v({1, 0})},
        {make_sphere<double>(v({1, 1, 0}), 2.0), v({1, 1, 2})},
        {make_halfspace<double>(v({1, 3}), 1.0), v({1, 0})},
        {make_enlargement<double>(make_points<double>({v({0, 0}), v({1.5, 0})}), 0.8), v({0, 0.8})},
    };
    std::uint64_t seed = 30;
    for (const auto& [s, w] : cases) {
        for (double delta : {0.1, 0.3}) {
            const double eps = estimate_eps_regularity(*s, w, delta, 2000, seed++).value;
            for (double lam : {0.5, 1.0, 1.5, 2.0}) {
                const auto k = relaxed_projector_constants(lam, eps + 0.05);
                auto rep = check_quasi_firm_fejer(as_map(make_relaxed(s, lam)), *s, k.gamma, k.beta, w, delta, 1000,
                                                  seed++);
                CHECK(rep.violations == 0);
            }
        }
    }
}

TEST_CASE("property: estimators are monotone on nested samples")
{
    Rng rng(40);
    auto s = make_sphere<double>(v({0, 0}), 1.0);
    const Vec w = v({0, 1});
    std::vector<SetPtr<double>> sys = {line(0.0), line(0.7)};
    IntersectionDistance dist(sys, make_points<double>({v({0, 0})}));
    std::vector<Vec> members, points;
    double last_eps = 0.0, last_kappa = 0.0;
    for (double delta : {0.05, 0.1, 0.2, 0.4, 0.8}) {
        for (int i = 0; i < 200; ++i) {
            members.push_back(sample_member_near(*s, w, delta, rng));
            points.push_back(sample_ball(Vec::Zero(2), delta / 2, rng));
        }
        const double eps = eps_ratio_over(*s, members);
        const double kappa = linear_regularity_over(sys, dist, points);
        CHECK(eps >= last_eps);
        CHECK(kappa >= last_kappa);
        last_eps = eps;
        last_kappa = kappa;
    }
    CHECK(last_eps > 0.0);
}
