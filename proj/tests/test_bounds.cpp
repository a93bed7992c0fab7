#include <doctest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "setrisk/bounds.hpp"
#include "setrisk/errors.hpp"

#include <cmath>
#include <numeric>
#include <random>

using namespace setrisk;

using namespace fixtures;

TEST_CASE("regulator region")
{
    auto r = regulator_region(*nonmargin(), RiskSpec::es(0.75));
    REQUIRE(r.vertices().size() == 1);
    CHECK(r.vertices()[0].x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.vertices()[0].y == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.recession().approx_equal(ConvexCone2D::positive_orthant()));

    auto c = regulator_region(*ens({{1.5, -2}}), RiskSpec::es(0.1));
    CHECK(c.vertices()[0].x == doctest::Approx(-1.5).epsilon(1e-15));
    CHECK(c.vertices()[0].y == doctest::Approx(2.0).epsilon(1e-15));

    std::mt19937_64 g(1);
    for (int k = 0; k < 20; ++k) {
        auto e = random_ensemble(g, 50, true);
        auto reg = regulator_region(*e, RiskSpec::es(0.2));
        auto w = e->weights();
        CHECK(reg.vertices()[0].x == doctest::Approx(oracle::es_ru(e->column(0), w, 0.2)).epsilon(1e-10));
        CHECK(reg.vertices()[0].y == doctest::Approx(oracle::es_ru(e->column(1), w, 0.2)).epsilon(1e-10));
    }
}

TEST_CASE("dual bound for a fixed cone")
{
    auto e = nonmargin();
    auto k = ExchangeCone2D::bid_ask(5, 5);
    auto lb = lower_bound_det_cone(*e, k, RiskSpec::es(0.75));
    // 5x + y = -2 and x + 5y = -2
    double det = 5 * 5 - 1 * 1;
    Point2 want{(-2 * 5 - 1 * -2) / det, (5 * -2 - -2 * 1) / det};
    REQUIRE(lb.vertices().size() == 1);
    CHECK(lb.vertices()[0].x == doctest::Approx(want.x).epsilon(1e-12));
    CHECK(lb.vertices()[0].y == doctest::Approx(-1.0 / 3).epsilon(1e-12));
    CHECK(lb.recession().approx_equal(k.solvency()));

    auto c = lower_bound_det_cone(*ens({{1, 2}}), k, RiskSpec::es(0.3));
    CHECK(c.vertices()[0].x == doctest::Approx(-1));
    CHECK(c.vertices()[0].y == doctest::Approx(-2));

    // comonotone two-point sample: both lines pass through r(X)
    auto cm = lower_bound_det_cone(*ens({{0, 0}, {1, 1}}), ExchangeCone2D::bid_ask(2, 2), RiskSpec::es(0.5));
    CHECK(cm.vertices()[0].x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(cm.vertices()[0].y == doctest::Approx(0.0).epsilon(1e-12));

    // the general grid bound agrees once the extreme directions are included
    std::mt19937_64 g(2);
    for (int t = 0; t < 20; ++t) {
        auto p = random_portfolio(g, 0, 40);
        auto a = lower_bound_det_cone(p.ensemble(), p.cone(), RiskSpec::es(0.1));
        auto b = lower_bound_general(p, RiskSpec::es(0.1));
        Point2 v = a.vertices()[0];
        Box w{v.x - 3, v.y - 3, v.x + 3, v.y + 3};
        CHECK(hausdorff_on_window(a, b, w) <= 1e-9);
    }
}

TEST_CASE("general dual bound")
{
    // ball around the origin: boundary arc of radius R
    auto zero = ens({{0, 0}, {0, 0}});
    auto ball = SetPortfolio::ball(zero, 1.0);
    auto lb = lower_bound_general(ball, RiskSpec::es(0.3));
    CHECK(lb.recession().approx_equal(ConvexCone2D::positive_orthant()));
    const double step = std::numbers::pi / 2 / 180;
    for (auto v : lb.vertices()) {
        CHECK(norm(v) >= 1.0 - 1e-12);
        CHECK(norm(v) <= 1.0 / std::cos(step / 2) + 1e-12);
    }

    // negative expectation: every grid constraint is tight
    std::mt19937_64 g(3);
    for (int kind = 0; kind < 5; ++kind) {
        if (kind == 1) continue;
        auto p = random_portfolio(g, kind, 60);
        auto spec = RiskSpec::neg_expectation();
        auto r = lower_bound_general(p, spec);
        for (const auto& u : dual_directions(p)) {
            double hmean = 0.0;
            bool finite = true;
            for (std::size_t i = 0; i < p.ensemble().size(); ++i) {
                double h = p.support(i, u);
                finite = finite && std::isfinite(h);
                hmean += p.ensemble().weight(i) * h;
            }
            if (!finite) continue;
            CHECK(r.scalarize({u[0], u[1]}) == doctest::Approx(-hmean).epsilon(1e-9));
        }
    }

    // random half-plane: no finite direction
    auto hp = random_portfolio(g, 1, 30);
    CHECK_THROWS_AS(lower_bound_general(hp, RiskSpec::es(0.1)), ModelingError);
    auto db = [&] {
        try {
            dual_halfspaces(hp, RiskSpec::es(0.1));
        } catch (const ModelingError& e) {
            return std::string(e.what());
        }
        return std::string();
    }();
    CHECK(db.find("whole plane") != std::string::npos);

    // three currencies stay as half-spaces
    ScenarioEnsemble e3(3, {1, 0, 2, -1, 2, 0.5, 0.3, 0.3, -0.2});
    auto b3 = SetPortfolio::ball(std::make_shared<ScenarioEnsemble>(e3), 0.5);
    auto d3 = dual_halfspaces(b3, RiskSpec::es(0.4), 60);
    CHECK(d3.set.dim() == 3);
    CHECK(d3.used > 10);
    CHECK(d3.skipped == 0);
    CHECK_THROWS_AS(lower_bound_general(b3, RiskSpec::es(0.4)), ValidationError);
}

TEST_CASE("lognormal cone bounds")
{
    auto b = cone_risk_bounds(LognormalRateModel{1.0, 0.4}, 0.05);
    CHECK(b.c1_slopes.first == doctest::Approx(-0.4086929).epsilon(1e-6));
    CHECK(b.c1_slopes.second == doctest::Approx(-2.085047).epsilon(1e-6));
    CHECK(b.c2_slopes.first == doctest::Approx(-0.4780971).epsilon(1e-6));
    CHECK(b.c2_slopes.second == doctest::Approx(-1.782366).epsilon(1e-6));
    CHECK(b.c2.contains_cone(b.c1));
    CHECK_FALSE(b.c1.contains_cone(b.c2));
    CHECK(b.c1.contains_positive_orthant());

    auto flat = cone_risk_bounds(LognormalRateModel{1.0, 1e-7}, 0.05);
    CHECK(flat.c1_slopes.first == doctest::Approx(-1.0).epsilon(1e-5));
    CHECK(flat.c1_slopes.second == doctest::Approx(-1.0).epsilon(1e-5));
    CHECK(flat.c2_slopes.first == doctest::Approx(-1.0).epsilon(1e-5));
    CHECK(flat.c2_slopes.second == doctest::Approx(-1.0).epsilon(1e-5));

    // mean scales the lower-right slopes and divides the upper-left ones
    auto m = cone_risk_bounds(LognormalRateModel{1.5, 0.4}, 0.05);
    CHECK(m.c1_slopes.first == doctest::Approx(1.5 * b.c1_slopes.first));
    CHECK(m.c1_slopes.second == doctest::Approx(1.5 * b.c1_slopes.second));

    CHECK_THROWS_AS(cone_risk_bounds(LognormalRateModel{1.0, 0.4}, 0.6), ValidationError);
    CHECK_THROWS_AS(cone_risk_bounds(LognormalRateModel{-1.0, 0.4}, 0.05), ValidationError);

    std::mt19937_64 g(77);
    std::normal_distribution<double> z;
    std::vector<double> pi(1'000'000);
    for (double& v : pi) v = std::exp(0.4 * z(g) - 0.08);
    auto emp = cone_risk_bounds(SampleView{pi, {}, true}, 0.05);
    CHECK(std::abs(emp.c1_slopes.first - b.c1_slopes.first) < 5e-3);
    CHECK(std::abs(emp.c1_slopes.second - b.c1_slopes.second) < 5e-3);
    CHECK(std::abs(emp.c2_slopes.first - b.c2_slopes.first) < 5e-3);
    CHECK(std::abs(emp.c2_slopes.second - b.c2_slopes.second) < 5e-3);
}

TEST_CASE("marginalized bound and comonotone exactness")
{
    auto k = ExchangeCone2D::bid_ask(5, 5);
    auto c = marginalized_bound(*ens({{2, -1}}), k, RiskSpec::es(0.2));
    CHECK(c.vertices()[0] == Point2{-2, 1});
    CHECK(c.recession().approx_equal(k.solvency()));

    std::mt19937_64 g(9);
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> u(0.2, 3.0);
    std::uniform_real_distribution<double> rate(1.0, 4.0);
    std::uniform_real_distribution<double> lvl(0.02, 0.5);
    for (int t = 0; t < 200; ++t) {
        std::size_t n = 5 + std::size_t(t % 40);
        double a = u(g), b = u(g), s = u(g) - 1.5, o = z(g);
        std::vector<Point2> x(n);
        for (auto& p : x) {
            double v = z(g);
            p = {a * v + s, b * std::exp(0.5 * v) + o};
        }
        auto e = ens(x);
        auto kk = ExchangeCone2D::bid_ask(rate(g), rate(g));
        auto spec = RiskSpec::es(lvl(g));
        auto outer = lower_bound_det_cone(*e, kk, spec);
        auto marg = marginalized_bound(*e, kk, spec);
        Point2 v = marg.vertices()[0];
        Box w{v.x - 2, v.y - 2, v.x + 2, v.y + 2};
        CHECK(hausdorff_on_window(outer, marg, w) <= 1e-9);
    }
}

TEST_CASE("non-margin example bundle")
{
    auto p = SetPortfolio::cone_det(nonmargin(), ExchangeCone2D::bid_ask(5, 5));
    BundleOptions opt;
    opt.risk = RiskSpec::es(0.75);
    opt.strategies = default_strategies(p.kind());
    for (auto& s : opt.strategies) s.t_max = 8.0;
    auto b = compute_bundle(p, opt);
    REQUIRE(b.inner);
    REQUIRE(b.outer);
    REQUIRE(b.marginal);
    CHECK(b.inner->contains({-0.8, 2}, 1e-12));
    CHECK(b.inner->contains({2, -0.8}, 1e-12));
    CHECK(b.inner->scalarize({1, 5}) == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(b.inner->scalarize({5, 1}) == doctest::Approx(-2.0).epsilon(1e-12));
    REQUIRE(b.outer->vertices().size() == 1);
    CHECK(b.outer->vertices()[0].x == doctest::Approx(-1.0 / 3).epsilon(1e-12));
    CHECK(b.outer->vertices()[0].y == doctest::Approx(-1.0 / 3).epsilon(1e-12));
    CHECK(b.marginal->vertices()[0].x == doctest::Approx(0).epsilon(1e-12));
    CHECK(region_within(*b.marginal, *b.inner));
    CHECK(region_within(*b.inner, *b.outer));
    CHECK(b.meta.outer_method == "dual-halfspaces");
    CHECK(b.meta.selections > 100);
}

TEST_CASE("deterministic gains with no trades")
{
    auto k = ExchangeCone2D::bid_ask(2, 3);
    auto p = SetPortfolio::cone_det(ens({{1, -1}}), k);
    auto inner = inner_region(p, {StrategySpec{}}, RiskSpec::es(0.1));
    REQUIRE(inner.vertices().size() == 1);
    CHECK(inner.vertices()[0] == Point2{-1, 1});
    CHECK(inner.recession().approx_equal(k.solvency()));
    CHECK_THROWS_AS(inner_region(p, {StrategySpec{"liquidity"}}, RiskSpec::es(0.1)), ValidationError);
}

TEST_CASE("sandwich on every portfolio kind")
{
    std::mt19937_64 g(2024);
    int cases = 0;
    for (int rep = 0; rep < 44; ++rep) {
        for (int kind = 0; kind < 5; ++kind) {
            auto p = random_portfolio(g, kind, 20 + std::size_t(rep), rep % 3 == 0);
            BundleOptions opt;
            opt.risk = RiskSpec::es(std::uniform_real_distribution<double>(0.05, 0.45)(g));
            opt.strategies = small_strategies(p.kind());
            opt.directions = 61;
            auto b = compute_bundle(p, opt);
            INFO(to_string(p.kind()) << " rep " << rep);
            REQUIRE(b.inner);
            REQUIRE(b.outer);
            REQUIRE(b.marginal);
            CHECK(region_within(*b.marginal, *b.inner));
            CHECK(region_within(*b.inner, *b.outer));
            for (auto q : probe_points(*b.inner, g)) {
                if (b.marginal->contains(q, 0.0)) CHECK(b.inner->contains(q, 1e-9));
                if (b.inner->contains(q, 0.0)) CHECK(b.outer->contains(q, 1e-9));
            }
            for (Point2 u : {Point2{1, 0}, Point2{0, 1}, Point2{1, 1}, Point2{1, 2.5}}) {
                const double uu[2] = {u.x, u.y};
                auto [hi, lo] = scalarize_bundle(b, uu);
                CHECK(hi >= lo - 1e-9);
            }
            ++cases;
        }
    }
    CHECK(cases >= 200);
}

TEST_CASE("meet-K corners sit on both boundaries")
{
    std::mt19937_64 g(31);
    for (int t = 0; t < 200; ++t) {
        auto p = random_portfolio(g, 0, 10 + std::size_t(t % 30), t % 2 == 0);
        auto spec = RiskSpec::es(std::uniform_real_distribution<double>(0.05, 0.5)(g));
        StrategySpec s;
        s.strategy = "meetk";
        s.lambda_count = 3;
        auto inner = inner_region(p, {s}, spec);
        auto outer = lower_bound_det_cone(p.ensemble(), p.cone(), spec);
        auto [x1, x2] = meetk_corner_points(p.ensemble(), p.cone(), spec);
        Point2 a1 = p.cone().a1(), a2 = p.cone().a2();
        double tol = 1e-9 * (1 + std::abs(outer.scalarize(a2)));
        CHECK(std::abs(inner.scalarize(a2) - outer.scalarize(a2)) <= tol);
        CHECK(std::abs(dot(x1, a2) - outer.scalarize(a2)) <= tol);
        tol = 1e-9 * (1 + std::abs(outer.scalarize(a1)));
        CHECK(std::abs(inner.scalarize(a1) - outer.scalarize(a1)) <= tol);
        CHECK(std::abs(dot(x2, a1) - outer.scalarize(a1)) <= tol);
    }
}

TEST_CASE("coherence of the inner region")
{
    std::mt19937_64 g(47);
    std::uniform_real_distribution<double> sh(-2, 2), sc(0.2, 4);
    for (int t = 0; t < 200; ++t) {
        int kind = t % 5;
        auto p = random_portfolio(g, kind, 25);
        auto strat = small_strategies(p.kind());
        auto spec = RiskSpec::es(0.1);
        auto base = inner_region(p, strat, spec);
        INFO(to_string(p.kind()) << " case " << t);

        // cash invariance, with the strategies that commute with translation
        std::vector<StrategySpec> eq;
        for (const auto& s : strat)
            if (translation_equivariant(s.strategy)) eq.push_back(s);
        const double a[2] = {sh(g), sh(g)};
        auto moved = inner_region(p.translated(a), eq, spec);
        auto expect = inner_region(p, eq, spec).translated({-a[0], -a[1]});
        Box w{-20, -20, 20, 20};
        CHECK(hausdorff_on_window(moved, expect, w) <= 1e-9);

        // positive homogeneity
        double c = sc(g);
        auto scaled = inner_region(p.scaled(c), strat, spec);
        CHECK(hausdorff_on_window(scaled, base.scaled(c), Box{-40, -40, 40, 40}) <= 1e-9);
    }
}

TEST_CASE("monotonicity and subadditivity through transported selections")
{
    std::mt19937_64 g(48);
    std::uniform_real_distribution<double> pos(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        auto p = random_portfolio(g, t % 5, 15);
        const auto& e = p.ensemble();
        auto spec = RiskSpec::es(0.2);
        auto rec = inner_recession(p, spec);
        auto strat = small_strategies(p.kind());
        std::vector<SelectionMatrix> sels;
        for (const auto& st : strat)
            for (const auto& f : make_families(p, st, spec)) {
                auto m = materialize(f);
                for (std::size_t j = 0; j < m.size(); j += 3) sels.push_back(m[j]);
            }
        auto base = inner_region_from_selections(e, sels, spec, rec);

        // X' = X + D with D >= 0: each selection moved by D stays admissible for X'
        std::vector<double> d(e.gains().size());
        for (double& v : d) v = pos(g);
        std::vector<SelectionMatrix> moved = sels;
        for (auto& m : moved)
            for (std::size_t k = 0; k < d.size(); ++k) m.gains[k] += d[k];
        auto up = inner_region_from_selections(e, moved, spec, rec);
        CHECK(region_within(base, up));

        // sums of selections of X and of a second copy Y = X shifted
        std::vector<SelectionMatrix> other = sels;
        for (auto& m : other)
            for (std::size_t k = 0; k < m.gains.size(); ++k) m.gains[k] = 0.5 * m.gains[k] + d[k];
        std::vector<SelectionMatrix> sums;
        std::vector<Point2> minkowski;
        std::size_t lim = std::min<std::size_t>(sels.size(), 12);
        for (std::size_t i = 0; i < lim; ++i)
            for (std::size_t j = 0; j < lim; ++j) {
                SelectionMatrix m = sels[i];
                for (std::size_t k = 0; k < m.gains.size(); ++k) m.gains[k] += other[j].gains[k];
                sums.push_back(std::move(m));
                minkowski.push_back(risk_point(e, sels[i], spec) + risk_point(e, other[j], spec));
            }
        auto sum_region = inner_region_from_selections(e, sums, spec, rec);
        for (auto q : minkowski) CHECK(sum_region.contains(q, 1e-9));
    }

    // the dual bound for a fixed cone is subadditive exactly
    for (int t = 0; t < 200; ++t) {
        auto p = random_portfolio(g, 0, 20);
        auto q = random_portfolio(g, 0, 20);
        const auto& k = p.cone();
        std::vector<double> sum(p.ensemble().gains());
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += q.ensemble().gains()[i];
        ScenarioEnsemble es(2, sum);
        auto spec = RiskSpec::es(0.15);
        auto lx = lower_bound_det_cone(p.ensemble(), k, spec);
        auto ly = lower_bound_det_cone(q.ensemble(), k, spec);
        auto ls = lower_bound_det_cone(es, k, spec);
        CHECK(ls.contains(lx.vertices()[0] + ly.vertices()[0], 1e-9));
        // monotone: adding a nonnegative amount shrinks the requirement
        auto lm = lower_bound_det_cone(p.ensemble(), k, spec);
        std::vector<double> up(p.ensemble().gains());
        for (double& v : up) v += pos(g);
        auto lu = lower_bound_det_cone(ScenarioEnsemble(2, up), k, spec);
        CHECK(lu.contains(lm.vertices()[0], 1e-9));
    }
}

TEST_CASE("law invariance: permuted scenarios give identical bundles")
{
    std::mt19937_64 g(55);
    for (int t = 0; t < 200; ++t) {
        auto p = random_portfolio(g, t % 5, 12 + std::size_t(t % 17), t % 2 == 1);
        std::vector<std::size_t> perm(p.ensemble().size());
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), g);
        BundleOptions opt;
        opt.risk = RiskSpec::es(0.1 + 0.01 * (t % 20));
        opt.strategies = small_strategies(p.kind());
        opt.directions = 31;
        auto a = compute_bundle(p, opt);
        auto b = compute_bundle(p.permuted(perm), opt);
        INFO(to_string(p.kind()) << " case " << t);
        CHECK(*a.inner == *b.inner);
        CHECK(*a.outer == *b.outer);
        CHECK(*a.marginal == *b.marginal);
    }
}

TEST_CASE("collapsing to the mean only loses diversification")
{
    std::mt19937_64 g(66);
    for (int t = 0; t < 100; ++t) {
        bool cone = t % 2 == 0;
        auto p = random_portfolio(g, cone ? 0 : 3, 30);
        const auto& e = p.ensemble();
        Point2 mean{};
        for (std::size_t i = 0; i < e.size(); ++i) mean = mean + e.weight(i) * e.gain2(i);
        auto spec = RiskSpec::es(0.1);
        auto inner = inner_region(p, small_strategies(p.kind()), spec);
        RiskRegion2D collapsed = cone ? RiskRegion2D::from_points_plus_cone(std::vector<Point2>{-mean}, p.cone().solvency())
                                      : lower_bound_general(SetPortfolio::ball(ens({mean}), p.radius()), spec);
        CHECK(region_within(inner, collapsed));
    }
}

TEST_CASE("bundle scalarization")
{
    // exchange-symmetric sample and cone
    std::mt19937_64 g(70);
    std::normal_distribution<double> z;
    std::vector<Point2> x;
    for (int i = 0; i < 40; ++i) {
        Point2 p{z(g), z(g)};
        x.push_back(p);
        x.push_back({p.y, p.x});
    }
    auto p = SetPortfolio::cone_det(ens(x), ExchangeCone2D::bid_ask(1.7, 1.7));
    BundleOptions opt;
    opt.risk = RiskSpec::es(0.1);
    auto b = compute_bundle(p, opt);
    for (Point2 u : {Point2{1, 0.8}, Point2{1, 0.7}, Point2{0.9, 0.65}}) {
        const double a[2] = {u.x, u.y}, s[2] = {u.y, u.x};
        auto [i1, o1] = scalarize_bundle(b, a);
        auto [i2, o2] = scalarize_bundle(b, s);
        CHECK(i1 == doctest::Approx(i2).epsilon(1e-9));
        CHECK(o1 == doctest::Approx(o2).epsilon(1e-9));
        CHECK(i1 >= o1);
    }
    const double bad[2] = {-1, 1};
    CHECK_THROWS_AS(scalarize_bundle(b, bad), ValidationError);
}

TEST_CASE("thread count does not change the bundle")
{
    std::mt19937_64 g(90);
    auto p = random_portfolio(g, 2, 500);
    BundleOptions opt;
    setenv("SETRISK_THREADS", "1", 1);
    auto a = compute_bundle(p, opt);
    setenv("SETRISK_THREADS", "7", 1);
    auto b = compute_bundle(p, opt);
    unsetenv("SETRISK_THREADS");
    CHECK(*a.inner == *b.inner);
    CHECK(*a.outer == *b.outer);
    setenv("SETRISK_THREADS", "zero", 1);
    CHECK_THROWS_AS(compute_bundle(p, opt), ValidationError);
    unsetenv("SETRISK_THREADS");
}
