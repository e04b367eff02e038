#include <doctest.h>

#include <dropstyle/errors.hpp>
#include <dropstyle/thickness.hpp>
#include <shapes.hpp>

#include <cmath>

using namespace dropstyle;

namespace
{
	SurfaceMesh grown(SurfaceMesh m, double s)
	{
		for (Vec3 &v : m.vertices)
			v *= s;
		return m;
	}
} // namespace

TEST_CASE("slab interior vertices see the slab thickness")
{
	const double t = 1.0;
	const SurfaceMesh slab = test::slab(10.0, 10.0, t, 40, 40);
	const ThicknessField th = local_thickness(slab);
	int checked = 0;
	for (std::size_t v = 0; v < slab.num_vertices(); ++v)
	{
		const Vec3 &p = slab.vertices[v];
		if (p.x() < 2.5 || p.x() > 7.5 || p.y() < 2.5 || p.y() > 7.5)
			continue;
		CHECK(th[v] >= 0.9 * t);
		CHECK(th[v] <= 1.1 * t);
		++checked;
	}
	CHECK(checked > 100);
}

TEST_CASE("sphere thickness is its diameter")
{
	const SurfaceMesh sphere = test::icosphere(1.5, 4);
	const ThicknessField th = local_thickness(sphere);
	for (double x : th)
		CHECK(std::abs(x - 3.0) <= 0.3);
}

TEST_CASE("tube outer wall sees the wall thickness")
{
	const double inner = 4.0, outer = 5.0, height = 10.0;
	const SurfaceMesh tube = test::tube(inner, outer, height, 128, 20);
	const ThicknessField th = local_thickness(tube);
	int checked = 0;
	for (std::size_t v = 0; v < tube.num_vertices(); ++v)
	{
		const Vec3 &p = tube.vertices[v];
		const double r = std::hypot(p.x(), p.y());
		if (std::abs(r - outer) > 1e-9 || p.z() < 2.0 || p.z() > height - 2.0)
			continue;
		CHECK(std::abs(th[v] - (outer - inner)) <= 0.15 * (outer - inner));
		++checked;
	}
	CHECK(checked > 500);
}

TEST_CASE("thickness is bounded, scale equivariant and deterministic")
{
	const SurfaceMesh beam = test::beam(8, 3, 2, 0.5, 2);
	const ThicknessField a = local_thickness(beam);
	const double diag = bbox_diagonal(beam);
	for (double x : a)
	{
		CHECK(x > 0.0);
		CHECK(x <= diag);
	}
	CHECK(local_thickness(beam) == a);
	const double s = 7.25;
	const ThicknessField b = local_thickness(grown(beam, s));
	for (std::size_t v = 0; v < a.size(); ++v)
		CHECK(b[v] == doctest::Approx(s * a[v]).epsilon(1e-6));
}

TEST_CASE("spacing floor")
{
	// a coarse cube: without the floor the ball may shrink onto a neighbour
	const SurfaceMesh cube = test::unit_cube();
	ThicknessOptions off;
	off.spacing_floor = false;
	const ThicknessField with = local_thickness(cube), without = local_thickness(cube, off);
	for (std::size_t v = 0; v < cube.num_vertices(); ++v)
	{
		CHECK(with[v] >= without[v]);
		CHECK(with[v] >= 1.0 - 1e-12); // every cube edge is at least 1 long
	}
}

TEST_CASE("degenerate input")
{
	SurfaceMesh flat = test::flat_square();
	flat.vertices.push_back(Vec3(3, 3, 3)); // isolated, no incident area
	CHECK_THROWS_AS(local_thickness(flat), DegenerateNormal);
}
