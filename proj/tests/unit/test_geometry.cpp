#include <doctest.h>

#include <dropstyle/geometry.hpp>
#include <shapes.hpp>

#include <random>

using namespace dropstyle;

TEST_CASE("kd-tree nearest matches brute force")
{
	std::mt19937_64 rng(3);
	std::uniform_real_distribution<double> u(-1.0, 1.0);
	std::vector<Vec3> pts(2000);
	for (Vec3 &p : pts)
		p = Vec3(u(rng), u(rng), u(rng));
	const KdTree tree(pts);
	for (int q = 0; q < 500; ++q)
	{
		const Vec3 x(1.5 * u(rng), 1.5 * u(rng), 1.5 * u(rng));
		int best = 0;
		for (int i = 1; i < static_cast<int>(pts.size()); ++i)
			if ((pts[i] - x).squaredNorm() < (pts[best] - x).squaredNorm())
				best = i;
		const auto hit = tree.nearest(x);
		CHECK(hit.index == best);
		CHECK(hit.distance2 == doctest::Approx((pts[best] - x).squaredNorm()));
	}
}

TEST_CASE("kd-tree ties resolve to the lowest index")
{
	std::vector<Vec3> pts(40, Vec3(1, 2, 3));
	pts.push_back(Vec3::Zero());
	const KdTree tree(pts);
	CHECK(tree.nearest(Vec3(1, 2, 3.1)).index == 0);
	CHECK(tree.nearest(Vec3(0, 0, -1)).index == 40);
}

TEST_CASE("closest point on triangle agrees with dense sampling")
{
	std::mt19937_64 rng(5);
	std::uniform_real_distribution<double> u(-1.0, 1.0);
	for (int trial = 0; trial < 50; ++trial)
	{
		const Vec3 a(u(rng), u(rng), u(rng)), b(u(rng), u(rng), u(rng)), c(u(rng), u(rng), u(rng));
		const Vec3 p(2 * u(rng), 2 * u(rng), 2 * u(rng));
		double best = 1e300;
		const int n = 200;
		for (int i = 0; i <= n; ++i)
			for (int j = 0; i + j <= n; ++j)
			{
				const Vec3 q = a + (b - a) * (double(i) / n) + (c - a) * (double(j) / n);
				best = std::min(best, (q - p).norm());
			}
		const double got = (closest_point_on_triangle(p, a, b, c) - p).norm();
		CHECK(got <= best + 1e-12);
		CHECK(got >= best - 0.02);
	}
}

TEST_CASE("triangle BVH closest point and ray hits match brute force")
{
	const SurfaceMesh s = test::icosphere(1.0, 3);
	const TriangleBvh bvh(s.vertices, s.faces);
	std::mt19937_64 rng(11);
	std::uniform_real_distribution<double> u(-2.0, 2.0);
	for (int q = 0; q < 200; ++q)
	{
		const Vec3 p(u(rng), u(rng), u(rng));
		double best = 1e300;
		for (const Face &f : s.faces)
			best = std::min(best, (closest_point_on_triangle(p, s.vertices[f[0]], s.vertices[f[1]], s.vertices[f[2]]) - p).squaredNorm());
		const auto hit = bvh.closest_point(p);
		REQUIRE(hit.face >= 0);
		CHECK(hit.distance2 == doctest::Approx(best).epsilon(1e-12));
	}
	// from the centre every ray leaves through the unit-ish sphere
	for (int q = 0; q < 100; ++q)
	{
		const Vec3 d = Vec3(u(rng), u(rng), u(rng)).normalized();
		const auto t = bvh.first_hit(Vec3::Zero(), d, 0.0);
		REQUIRE(t.has_value());
		CHECK(*t <= 1.0 + 1e-12);
		CHECK(*t > 0.98);
	}
	CHECK_FALSE(bvh.first_hit(Vec3(5, 0, 0), Vec3(1, 0, 0), 0.0).has_value());
}

TEST_CASE("unit-box normalization")
{
	const std::vector<Vec3> pts = {{1, 2, 3}, {3, 2, 7}, {2, 2, 5}};
	const auto n = normalize_to_unit_box(pts, bounding_box(pts));
	CHECK(n[0].norm() < 1e-15);
	CHECK((n[1] - Vec3(1, 0, 1)).norm() < 1e-15);
	CHECK((n[2] - Vec3(0.5, 0, 0.5)).norm() < 1e-15);
	CHECK(bounding_box(pts).diagonal() == doctest::Approx(std::sqrt(4.0 + 16.0)));
	CHECK(BBox{}.diagonal() == 0.0);
}
