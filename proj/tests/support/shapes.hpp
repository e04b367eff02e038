#pragma once

#include <dropstyle/mesh.hpp>
#include <dropstyle/tet.hpp>

#include <array>
#include <random>
#include <vector>

namespace dropstyle::test
{
	/// Axis-aligned box, 8 vertices, 12 outward triangles.
	SurfaceMesh box(const Vec3 &lo, const Vec3 &hi);
	SurfaceMesh unit_cube();

	SurfaceMesh icosphere(double radius, int subdivisions, const Vec3 &center = Vec3::Zero());

	/// Closed tube along z. Inner and outer rings share angles so every inner
	/// vertex has an outer partner straight across the wall.
	SurfaceMesh tube(double inner_radius, double outer_radius, double height, int segments, int layers);

	/// Closed slab [0,lx]x[0,ly]x[0,t] with matching vertex grids on top and bottom.
	SurfaceMesh slab(double lx, double ly, double t, int nx, int ny);

	/// Flat unit square in the z = 0 plane (two triangles).
	SurfaceMesh flat_square();

	using Voxel = std::array<int, 3>;

	/// Boundary of a face-connected voxel set, each exposed voxel face split into
	/// subdiv x subdiv quads. Edge-only contacts between voxels are not allowed.
	SurfaceMesh voxel_union_surface(const std::vector<Voxel> &voxels, double h, int subdiv = 1, const Vec3 &origin = Vec3::Zero());

	std::vector<Voxel> voxel_block(const Voxel &lo, const Voxel &size);

	/// nx x ny x nz voxels of size h.
	SurfaceMesh beam(int nx, int ny, int nz, double h, int subdiv = 1);

	/// Deck of deck_len x width x deck_thick voxels resting on two feet of
	/// foot_len x width x foot_height at its ends. Dropped feet-first.
	struct BridgeShape
	{
		int deck_len = 30;
		int width = 6;
		int deck_thick = 3;
		int foot_len = 5;
		int foot_height = 6;
	};
	std::vector<Voxel> bridge_voxels(const BridgeShape &shape);
	SurfaceMesh bridge(const BridgeShape &shape, double h, int subdiv = 1);

	/// Random tetrahedra with positive volume and bounded aspect.
	TetMesh random_tets(std::mt19937_64 &rng, int count, double scale = 1.0);

	/// A uniformly random rotation matrix.
	Mat3 random_rotation(std::mt19937_64 &rng);

	/// Every undirected edge used by exactly two faces.
	bool is_watertight(const SurfaceMesh &mesh);
} // namespace dropstyle::test
